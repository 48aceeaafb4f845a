//! Direct quadrature of `−(ħ²/2μ)∮ (n̂·∇ψ*)(q̂·∇ψ) da` over the wall, using
//! the full Cartesian gradient of the state.

use num_complex::Complex64;

use super::{real_part, Direction, ForceMethod, ForceSample};
use crate::error::Result;
use crate::math::{cos, sin, PI};
use crate::quad::{periodic_trapezoid, GaussLegendre};
use crate::trapstate::{ModeIndex, Point, TrapKind, WaveState};

const NODES_PER_PANEL: usize = 16;

struct Accumulator {
    sum: Complex64,
    scale: f64,
}

impl Accumulator {
    fn add(&mut self, state: &WaveState, p: &Point, t: f64, normal: [f64; 3], q: &[f64; 3], weight: f64) -> Result<()> {
        let kind = state.geometry().kind();
        let grad = state.gradient(p, t)?.to_cartesian(p, kind);
        let dn = grad[0] * normal[0] + grad[1] * normal[1] + grad[2] * normal[2];
        let dq = grad[0] * q[0] + grad[1] * q[1] + grad[2] * q[2];
        let term = dn.conj() * dq * weight;
        self.sum += term;
        self.scale += term.norm();
        Ok(())
    }
}

fn limits(state: &WaveState) -> (usize, usize, f64) {
    let mut m_max = 0usize;
    let mut k_max = 0usize;
    let mut x_max = 0.0f64;
    for mode in state.modes() {
        let idx = mode.index();
        m_max = m_max.max(idx.m().unsigned_abs() as usize);
        if let ModeIndex::Spherical { l, .. } = idx {
            m_max = m_max.max(l as usize);
        }
        if let ModeIndex::Cylindrical { k, .. } = idx {
            k_max = k_max.max(k as usize);
        }
        x_max = x_max.max(mode.zero());
    }
    (m_max, k_max, x_max)
}

/// Force by quadrature over the wall: the circle for the disc, the lateral
/// wall and both lids for the cylinder, the sphere `r = L(t)`.
pub fn force_surface_quadrature(state: &WaveState, direction: Direction, t: f64) -> Result<ForceSample> {
    let geometry = state.geometry();
    geometry.check_horizon(t)?;
    let l = geometry.wall(t);
    let q = direction.unit_vector();
    let (m_max, k_max, x_max) = limits(state);
    let mut acc = Accumulator { sum: Complex64::new(0.0, 0.0), scale: 0.0 };
    let n_phi = 4 * m_max + 16;
    match geometry.kind() {
        TrapKind::Circular => {
            let q = [q[0], q[1], 0.0];
            for (phi, w) in periodic_trapezoid(n_phi) {
                let normal = [cos(phi), sin(phi), 0.0];
                acc.add(state, &Point::polar(l, phi), t, normal, &q, w * l)?;
            }
        }
        TrapKind::Cylindrical => {
            let h = geometry.height().unwrap_or(1.0);
            let gl = GaussLegendre::new(NODES_PER_PANEL);
            for (z, wz) in gl.composite(0.0, h, k_max + 1) {
                for (phi, wp) in periodic_trapezoid(n_phi) {
                    let normal = [cos(phi), sin(phi), 0.0];
                    acc.add(state, &Point::cylindrical(l, phi, z), t, normal, &q, wz * wp * l)?;
                }
            }
            let panels = (x_max / PI) as usize + 2;
            for (rho, wr) in gl.composite(0.0, l, panels) {
                for (phi, wp) in periodic_trapezoid(n_phi) {
                    acc.add(state, &Point::cylindrical(rho, phi, h), t, [0.0, 0.0, 1.0], &q, wr * wp * rho)?;
                    acc.add(state, &Point::cylindrical(rho, phi, 0.0), t, [0.0, 0.0, -1.0], &q, wr * wp * rho)?;
                }
            }
        }
        TrapKind::Spherical => {
            let gl = GaussLegendre::new(2 * m_max + 8);
            for (&c, &wc) in gl.nodes().iter().zip(gl.weights()) {
                let theta = libm::acos(c);
                let st = sin(theta);
                for (phi, wp) in periodic_trapezoid(n_phi) {
                    let normal = [st * cos(phi), st * sin(phi), c];
                    acc.add(state, &Point::spherical(l, theta, phi), t, normal, &q, wc * wp * l * l)?;
                }
            }
        }
    }
    let value = real_part(acc.sum * -0.5, 0.5 * acc.scale)?;
    Ok(ForceSample::exact(t, direction, value, ForceMethod::SurfaceQuadrature))
}
