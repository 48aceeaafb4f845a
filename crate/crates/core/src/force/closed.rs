//! Closed-form mode sums over the radial derivatives at the wall.
//!
//! With `b_j = c_j ∂_r R_j(L, t)` the boundary derivative of mode `j`, the
//! force along a fixed unit vector `q̂` is `−(1/2)∮ (q̂·n̂)|∂_n ψ|² da`.
//! For the disc and the lateral cylinder wall the φ integral selects
//! neighbouring azimuthal numbers; for the cylinder lids only pairs with
//! equal `(m, n)` and `k + k'` odd survive; for the sphere the weights
//! `q̂·r̂` are combinations of `Y₁₁` and `Y₁₀`, integrated exactly by a
//! Gauss–Legendre × trapezoid rule.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{real_part, Direction, ForceMethod, ForceSample, Frame};
use crate::error::{Error, Result};
use crate::math::{cos, sin, PI};
use crate::quad::{periodic_trapezoid, GaussLegendre};
use crate::specfun::theta_factor;
use crate::trapstate::{ModeIndex, RadialFactor, TrapKind, WaveState};

struct Boundary {
    index: ModeIndex,
    derivative: Complex64,
}

fn boundary(state: &WaveState, t: f64) -> Result<Vec<Boundary>> {
    let geometry = state.geometry();
    geometry.check_horizon(t)?;
    let l = geometry.wall(t);
    Ok(state
        .modes()
        .iter()
        .zip(state.coeffs())
        .map(|(m, c)| Boundary {
            index: m.index(),
            derivative: *c * RadialFactor::new(geometry, m, l, t).derivative,
        })
        .collect())
}

fn require_planar(state: &WaveState) -> Result<()> {
    match state.geometry().kind() {
        TrapKind::Circular | TrapKind::Cylindrical => Ok(()),
        found => Err(Error::GeometryMismatch { expected: "circular or cylindrical", found: found.name() }),
    }
}

fn require_spherical(state: &WaveState) -> Result<()> {
    match state.geometry().kind() {
        TrapKind::Spherical => Ok(()),
        found => Err(Error::GeometryMismatch { expected: "spherical", found: found.name() }),
    }
}

fn axial(index: &ModeIndex) -> u32 {
    match *index {
        ModeIndex::Cylindrical { k, .. } => k,
        _ => 0,
    }
}

/// `S₊ = Σ b_j b*_{j'}` over pairs with `m_{j'} − m_j = 1` and equal `k`,
/// with the sum of term magnitudes.
fn neighbour_sum(b: &[Boundary]) -> (Complex64, f64) {
    let mut s = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for p in b {
        for q in b {
            if q.index.m() - p.index.m() == 1 && axial(&p.index) == axial(&q.index) {
                let term = p.derivative * q.derivative.conj();
                s += term;
                scale += term.norm();
            }
        }
    }
    (s, scale)
}

/// Force along `ρ̂₀ = (cos φ₀, sin φ₀, 0)` for the disc or the cylinder:
/// `−(L/4) Σ b_j b*_{j'} [e^{−iφ₀} δ_{m'−m,1} + e^{iφ₀} δ_{m−m',1}]`.
pub fn force_cylinder_rho(state: &WaveState, phi0: f64, t: f64) -> Result<ForceSample> {
    require_planar(state)?;
    let b = boundary(state, t)?;
    let l = state.geometry().wall(t);
    let (s, scale) = neighbour_sum(&b);
    let e = Complex64::cis(-phi0);
    let bracket = e * s + e.conj() * s.conj();
    let value = real_part(bracket * (-0.25 * l), 0.5 * l * scale)?;
    Ok(ForceSample::exact(t, Direction::planar_radial(phi0)?, value, ForceMethod::ClosedForm))
}

/// Force along `φ̂₀ = (−sin φ₀, cos φ₀, 0)`:
/// `−(L/4i) Σ b_j b*_{j'} [e^{−iφ₀} δ_{m'−m,1} − e^{iφ₀} δ_{m−m',1}]`.
pub fn force_cylinder_phi(state: &WaveState, phi0: f64, t: f64) -> Result<ForceSample> {
    require_planar(state)?;
    let b = boundary(state, t)?;
    let l = state.geometry().wall(t);
    let (s, scale) = neighbour_sum(&b);
    let e = Complex64::cis(-phi0);
    let bracket = (e * s - e.conj() * s.conj()) / Complex64::new(0.0, 1.0);
    let value = real_part(bracket * (-0.25 * l), 0.5 * l * scale)?;
    Ok(ForceSample::exact(t, Direction::planar_azimuthal(phi0)?, value, ForceMethod::ClosedForm))
}

/// Force along `ẑ` from the two lids:
/// `−(π²/Z³) Σ c_{mnk} c*_{mnk'} k k' [−1 + (−1)^{k+k'}] e^{−i(k²−k'²)π²t/2Z²}`.
/// Identically zero for the disc.
pub fn force_cylinder_z(state: &WaveState, t: f64) -> Result<ForceSample> {
    require_planar(state)?;
    state.geometry().check_horizon(t)?;
    let Some(h) = state.geometry().height() else {
        return Ok(ForceSample::exact(t, Direction::z(), 0.0, ForceMethod::ClosedForm));
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let w = PI * PI / (2.0 * h * h);
    for (mi, ci) in state.modes().iter().zip(state.coeffs()) {
        for (mj, cj) in state.modes().iter().zip(state.coeffs()) {
            let (ModeIndex::Cylindrical { m, n, k }, ModeIndex::Cylindrical { m: m2, n: n2, k: k2 }) =
                (mi.index(), mj.index())
            else {
                continue;
            };
            if m != m2 || n != n2 || (k + k2) % 2 == 0 {
                continue;
            }
            let (kf, kf2) = (k as f64, k2 as f64);
            let phase = Complex64::cis(-(kf * kf - kf2 * kf2) * w * t);
            let term = ci * cj.conj() * (kf * kf2 * -2.0) * phase;
            sum += term;
            scale += term.norm();
        }
    }
    let c = -PI * PI / (h * h * h);
    let value = real_part(sum * c, scale * c.abs())?;
    Ok(ForceSample::exact(t, Direction::z(), value, ForceMethod::ClosedForm))
}

/// The moments `∫|∂_r ψ|² sinθ e^{iφ} dΩ` and `∫|∂_r ψ|² cos θ dΩ` at the
/// wall, i.e. the `Y₁₁` and `Y₁₀` projections up to `−√(8π/3)` and
/// `√(4π/3)`. The integrands are trigonometric polynomials, so the rule is
/// exact.
fn sphere_moments(state: &WaveState, t: f64) -> Result<(Complex64, f64)> {
    let b = boundary(state, t)?;
    let l_max = b
        .iter()
        .map(|x| match x.index {
            ModeIndex::Spherical { l, .. } => l as usize,
            _ => 0,
        })
        .max()
        .unwrap_or(0);
    let gl = GaussLegendre::new(l_max + 4);
    let n_phi = 2 * l_max + 6;
    let mut xy = Complex64::new(0.0, 0.0);
    let mut z = 0.0;
    for (&c, &wc) in gl.nodes().iter().zip(gl.weights()) {
        let theta = libm::acos(c);
        let st = sin(theta);
        let factors: Vec<(f64, i32)> = b
            .iter()
            .map(|x| match x.index {
                ModeIndex::Spherical { l, m, .. } => (theta_factor(l, m, theta).0, m),
                _ => (0.0, 0),
            })
            .collect();
        for (phi, wp) in periodic_trapezoid(n_phi) {
            let d: Complex64 = b
                .iter()
                .zip(&factors)
                .map(|(x, (th, m))| x.derivative * Complex64::cis(*m as f64 * phi) * *th)
                .sum();
            let w = wc * wp * d.norm_sqr();
            xy += Complex64::cis(phi) * (w * st);
            z += w * c;
        }
    }
    Ok((xy, z))
}

fn sphere_force(state: &WaveState, direction: Direction, t: f64) -> Result<ForceSample> {
    require_spherical(state)?;
    let (xy, z) = sphere_moments(state, t)?;
    let l = state.geometry().wall(t);
    let (st0, ct0) = (sin(direction.theta0()), cos(direction.theta0()));
    let planar = Complex64::cis(-direction.phi0()) * xy;
    let weighted = match direction.frame() {
        Frame::Radial => st0 * planar.re + ct0 * z,
        Frame::Polar => ct0 * planar.re - st0 * z,
        Frame::Azimuthal => planar.im,
        Frame::CartesianZ => z,
    };
    Ok(ForceSample::exact(t, direction, -0.5 * l * l * weighted, ForceMethod::ClosedForm))
}

/// Sphere: force along `r̂₀(θ₀, φ₀)`.
pub fn force_sphere_r(state: &WaveState, theta0: f64, phi0: f64, t: f64) -> Result<ForceSample> {
    sphere_force(state, Direction::radial(theta0, phi0)?, t)
}

/// Sphere: force along `θ̂₀(θ₀, φ₀)`.
pub fn force_sphere_theta(state: &WaveState, theta0: f64, phi0: f64, t: f64) -> Result<ForceSample> {
    sphere_force(state, Direction::polar(theta0, phi0)?, t)
}

/// Sphere: force along `φ̂₀(φ₀)`.
pub fn force_sphere_phi(state: &WaveState, theta0: f64, phi0: f64, t: f64) -> Result<ForceSample> {
    sphere_force(state, Direction::azimuthal(theta0, phi0)?, t)
}

/// Closed-form force along any direction. For the disc and the cylinder a
/// direction with a `ẑ` component combines the `ρ̂₀` and lid results.
pub fn force_closed_form(state: &WaveState, direction: Direction, t: f64) -> Result<ForceSample> {
    if state.geometry().kind() == TrapKind::Spherical {
        return sphere_force(state, direction, t);
    }
    let (st0, ct0) = (sin(direction.theta0()), cos(direction.theta0()));
    let phi0 = direction.phi0();
    let value = match direction.frame() {
        Frame::CartesianZ => force_cylinder_z(state, t)?.value,
        Frame::Azimuthal => force_cylinder_phi(state, phi0, t)?.value,
        Frame::Radial | Frame::Polar => {
            let rho = force_cylinder_rho(state, phi0, t)?.value;
            let z = force_cylinder_z(state, t)?.value;
            if direction.frame() == Frame::Radial {
                st0 * rho + ct0 * z
            } else {
                ct0 * rho - st0 * z
            }
        }
    };
    Ok(ForceSample::exact(t, direction, value, ForceMethod::ClosedForm))
}
