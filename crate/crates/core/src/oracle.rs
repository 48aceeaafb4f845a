//! An independent finite-difference propagator for one angular sector,
//! used to validate the spectral machinery.
//!
//! With `χ = r R` (sphere) or `χ = √ρ R` (disc) and the co-moving
//! coordinate `y = r/L(t)`, the field `w(y, t) = √L χ(Ly, t)` obeys
//!
//! ```text
//! i ∂_t w = −(1/2L²) ∂²_y w + V(y) w / L² + i (u/L)(y ∂_y + 1/2) w
//! ```
//!
//! on the fixed interval `0 < y < 1` with `w = 0` at the wall, where
//! `V = l(l+1)/2y²` or `(m² − 1/4)/2y²`. Steps are uniform in the
//! rescaled time `τ = a t/L(t)` (`dτ = (a/L)² dt`), which keeps the
//! kinetic stiffness per step constant as the wall moves.
//!
//! The sphere uses nodes `y_j = jΔy` with `w = 0` at both ends and the
//! advection stencil `[(y_j + y_{j+1}) w_{j+1} − (y_j + y_{j−1}) w_{j−1}]/4Δy`.
//! On the disc `w ~ √y` at the axis and `V` is singular for `m = 0`, so the
//! disc instead uses cell centres `y_j = (j − 1/2)Δy` and the flux form of
//! `(1/y)∂_y(y ∂_y R)` and of the dilation `y ∂_y R + R`, written for
//! `w_j = √y_j R_j`; the axis enters only through the vanishing flux at
//! `y = 0`. Either way the advection matrix is antisymmetric, the discrete
//! Hamiltonian is Hermitian and Crank–Nicolson stepping is exactly unitary.
//! `∫|w|² dy` is the probability, so the discrete norm is conserved.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::trapstate::{Sector, TrapGeometry, TrapKind};

/// Largest tolerated drift of the discrete norm per unit time.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// Grid and step settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Grid spacing in `y`; `1/Δy` is rounded to an integer.
    pub dy: f64,
    /// Step in the rescaled time `τ = a t/L(t)`; rounded so that it
    /// divides `τ(t_end)`. Equal to the time step when the wall is at rest.
    pub dt: f64,
    pub t_end: f64,
    /// Keep every `store_every`-th step (the first and last are always kept).
    pub store_every: usize,
}

/// The field `w(y_j, t_n)` on the interior points `y_j = jΔy`,
/// `j = 1, …, J−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSolution {
    pub geometry: TrapGeometry,
    pub sector: Sector,
    pub y: Vec<f64>,
    pub times: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
    /// Largest `|Σ|w|²Δy − initial|` over the run.
    pub norm_drift: f64,
}

fn intervals(dy: f64) -> Result<usize> {
    if !(dy > 0.0 && dy <= 0.25) {
        return Err(Error::InvalidParameter(alloc::format!("Δy must lie in (0, 1/4], got {dy}")));
    }
    Ok(libm::round(1.0 / dy) as usize)
}

/// Offset of the first node: `y_j = (j − offset)Δy`.
fn offset(kind: TrapKind) -> f64 {
    match kind {
        TrapKind::Circular => 0.5,
        _ => 0.0,
    }
}

/// Interior nodes for `1/Δy` rounded to `J`, with the wall at node `J`.
fn nodes(kind: TrapKind, dy: f64) -> Result<(f64, Vec<f64>)> {
    let j = intervals(dy)?;
    let off = offset(kind);
    let h = 1.0 / (j as f64 - off);
    Ok((h, (1..j).map(|i| (i as f64 - off) * h).collect()))
}

/// Off-diagonal kinetic and advection couplings between nodes `j` and
/// `j+1`, and the diagonal potential, all for `a = L = 1`.
struct Stencil {
    kinetic: Vec<f64>,
    advection: Vec<f64>,
    potential: Vec<f64>,
}

impl Stencil {
    fn new(kind: TrapKind, sector: Sector, y: &[f64], h: f64) -> Result<Self> {
        let next = |k: usize| y.get(k + 1).copied().unwrap_or(1.0);
        match (kind, sector) {
            (TrapKind::Spherical, Sector::Spherical { l, .. }) => {
                let v0 = 0.5 * (l * (l + 1)) as f64;
                Ok(Self {
                    kinetic: alloc::vec![-0.5 / (h * h); y.len()],
                    advection: (0..y.len()).map(|k| (y[k] + next(k)) / (4.0 * h)).collect(),
                    potential: y.iter().map(|yk| v0 / (yk * yk)).collect(),
                })
            }
            (TrapKind::Circular, Sector::Circular { m }) => {
                let v0 = 0.5 * m as f64 * m as f64;
                let face = |k: usize| y[k] + 0.5 * h;
                let geo = |k: usize| sqrt(y[k] * next(k));
                Ok(Self {
                    kinetic: (0..y.len()).map(|k| -face(k) / (2.0 * h * h * geo(k))).collect(),
                    advection: (0..y.len()).map(|k| face(k) * face(k) / (2.0 * h * geo(k))).collect(),
                    potential: y.iter().map(|yk| v0 / (yk * yk)).collect(),
                })
            }
            (TrapKind::Cylindrical, _) => Err(Error::GeometryMismatch { expected: "circular or spherical", found: "cylindrical" }),
            _ => Err(Error::InvalidParameter(alloc::format!("sector {sector:?} does not belong to a {} trap", kind.name()))),
        }
    }
}

/// Samples `w(y, 0) = √a χ(a y)` on the interior grid from a radial
/// profile `R(r)`.
pub fn initial_field(geometry: &TrapGeometry, dy: f64, radial: impl Fn(f64) -> Complex64) -> Result<Vec<Complex64>> {
    let (_, y) = nodes(geometry.kind(), dy)?;
    let a = geometry.radius();
    Ok(y
        .iter()
        .map(|yk| {
            let r = a * yk;
            let chi = match geometry.kind() {
                TrapKind::Spherical => r,
                _ => sqrt(r),
            };
            radial(r) * chi * sqrt(a)
        })
        .collect())
}

/// Solves `(d_j, off)` tridiagonal system `A x = rhs` with constant
/// structure: `A = diag(d) + upper(up) + lower(lo)`.
fn thomas(lo: &[Complex64], d: &[Complex64], up: &[Complex64], rhs: &mut [Complex64], scratch: &mut [Complex64]) {
    let n = d.len();
    scratch[0] = up[0] / d[0];
    rhs[0] /= d[0];
    for i in 1..n {
        let denom = d[i] - lo[i] * scratch[i - 1];
        if i + 1 < n {
            scratch[i] = up[i] / denom;
        }
        rhs[i] = (rhs[i] - lo[i] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}

/// Crank–Nicolson propagation of `initial` (interior values of `w`).
pub fn propagate_scaled(
    initial: &[Complex64],
    geometry: &TrapGeometry,
    sector: Sector,
    options: &GridOptions,
) -> Result<GridSolution> {
    let (h, y) = nodes(geometry.kind(), options.dy)?;
    let stencil = Stencil::new(geometry.kind(), sector, &y, h)?;
    let n = y.len();
    if initial.len() != n {
        return Err(Error::InvalidParameter(alloc::format!(
            "initial field has {} values, grid has {n} interior points",
            initial.len()
        )));
    }
    geometry.check_horizon(options.t_end)?;
    if !(options.dt > 0.0) || !(options.t_end >= 0.0) {
        return Err(Error::InvalidParameter("need Δt > 0 and t_end ≥ 0".into()));
    }
    let a = geometry.radius();
    let u = geometry.wall_speed();
    let tau_end = a * options.t_end / geometry.wall(options.t_end);
    let time_of = |tau: f64| a * tau / (a - u * tau);
    let steps = libm::ceil(tau_end / options.dt - 1e-9).max(0.0) as usize;
    let dt = if steps == 0 { 0.0 } else { tau_end / steps as f64 };

    let norm = |w: &[Complex64]| w.iter().map(|c| c.norm_sqr()).sum::<f64>() * h;
    let n0 = norm(initial);
    let mut w = initial.to_vec();
    let mut times = alloc::vec![0.0];
    let mut values = alloc::vec![w.clone()];
    let mut drift = 0.0f64;

    let i_unit = Complex64::new(0.0, 1.0);
    let mut diag = alloc::vec![Complex64::new(0.0, 0.0); n];
    let mut lower = alloc::vec![Complex64::new(0.0, 0.0); n];
    let mut upper = alloc::vec![Complex64::new(0.0, 0.0); n];
    let mut rhs = alloc::vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = alloc::vec![Complex64::new(0.0, 0.0); n];
    let every = options.store_every.max(1);
    // (1 + iΔτH/2) w' = (1 − iΔτH/2) w on [τ0, τ0 + Δτ]
    let mut advance = |w: &mut [Complex64], tau0: f64, dtau: f64| {
        // H scaled by (L/a)², the Jacobian of t → τ
        let l = geometry.wall(time_of(tau0 + 0.5 * dtau));
        let kin = 1.0 / (a * a);
        let adv = u * l / (a * a);
        let half = 0.5 * dtau;
        // H = kinetic + centrifugal (Hermitian real) + i·adv·D (Hermitian)
        for k in 0..n {
            let hd = kin * (1.0 / (h * h) + stencil.potential[k]);
            let h_up = Complex64::new(kin * stencil.kinetic[k], adv * stencil.advection[k]);
            let h_lo = if k > 0 {
                Complex64::new(kin * stencil.kinetic[k - 1], -adv * stencil.advection[k - 1])
            } else {
                Complex64::new(0.0, 0.0)
            };
            diag[k] = Complex64::new(1.0, 0.0) + i_unit * (half * hd);
            upper[k] = i_unit * h_up * half;
            lower[k] = i_unit * h_lo * half;
            let mut r = (Complex64::new(1.0, 0.0) - i_unit * (half * hd)) * w[k];
            if k + 1 < n {
                r -= i_unit * h_up * half * w[k + 1];
            }
            if k > 0 {
                r -= i_unit * h_lo * half * w[k - 1];
            }
            rhs[k] = r;
        }
        thomas(&lower, &diag, &upper, &mut rhs, &mut scratch);
        w.copy_from_slice(&rhs);
    };
    for step in 0..steps {
        advance(&mut w, step as f64 * dt, dt);
        drift = drift.max((norm(&w) - n0).abs());
        let done = step + 1 == steps;
        if (step + 1) % every == 0 || done {
            times.push(if done { options.t_end } else { time_of((step + 1) as f64 * dt) });
            values.push(w.clone());
        }
    }
    if options.t_end > 0.0 && drift / options.t_end > NORM_DRIFT_LIMIT {
        return Err(Error::Resolution { drift: drift / options.t_end });
    }
    Ok(GridSolution { geometry: *geometry, sector, y, times, values, norm_drift: drift })
}

impl GridSolution {
    fn offset(&self) -> f64 {
        offset(self.geometry.kind())
    }

    fn spacing(&self) -> f64 {
        self.y[0] / (1.0 - self.offset())
    }

    fn time_index(&self, t: f64) -> Result<usize> {
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= 1e-9 * (1.0 + t.abs()))
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("t = {t} is not a stored time")))
    }

    fn position(&self, k: usize) -> f64 {
        (k as f64 - self.offset()) * self.spacing()
    }

    /// The smooth profile at node `k` (node `J` is the wall): `w` on the
    /// sphere, `w/√y` (that is, `R`) on the disc.
    fn smooth_at(&self, n: usize, k: usize) -> Complex64 {
        if k == 0 || k > self.y.len() {
            return Complex64::new(0.0, 0.0);
        }
        let w = self.values[n][k - 1];
        match self.geometry.kind() {
            TrapKind::Spherical => w,
            _ => w / sqrt(self.y[k - 1]),
        }
    }

    /// Cubic Lagrange interpolation of `w(·, t)` at `y`.
    pub fn field(&self, y: f64, t: f64) -> Result<Complex64> {
        if !(0.0..=1.0).contains(&y) {
            return Err(Error::OutOfDomain { radius: y, wall: 1.0, t });
        }
        let n = self.time_index(t)?;
        let h = self.spacing();
        let off = self.offset();
        let j = self.y.len() + 1;
        // the disc has no node on the axis
        let first = if off > 0.0 { 1 } else { 0 };
        let base = ((y / h + off) as usize).saturating_sub(1).clamp(first, j - 3);
        let mut sum = Complex64::new(0.0, 0.0);
        for a in 0..4 {
            let ya = self.position(base + a);
            let mut weight = 1.0;
            for b in 0..4 {
                if a != b {
                    let yb = self.position(base + b);
                    weight *= (y - yb) / (ya - yb);
                }
            }
            sum += self.smooth_at(n, base + a) * weight;
        }
        Ok(match self.geometry.kind() {
            TrapKind::Spherical => sum,
            _ => sum * sqrt(y),
        })
    }

    /// Radial part `R(r, t)` of ψ recovered from the grid.
    pub fn radial(&self, r: f64, t: f64) -> Result<Complex64> {
        let l = self.geometry.wall(t);
        let w = self.field(r / l, t)?;
        let chi = w / sqrt(l);
        Ok(match self.geometry.kind() {
            TrapKind::Spherical => chi / r,
            _ => chi / sqrt(r),
        })
    }
}

/// Radial Bohmian velocity `Im(∂_r ψ/ψ) = Im(∂_y w / w)/L` at a stored
/// interior node with two interior neighbours, from a centred difference.
pub fn bohmian_velocity_from_grid(solution: &GridSolution, y: f64, t: f64) -> Result<f64> {
    let n = solution.time_index(t)?;
    let h = solution.spacing();
    let off = solution.offset();
    let k = libm::round(y / h + off) as usize;
    let first = if off > 0.0 { 2 } else { 1 };
    if k < first || k > solution.y.len() || (solution.position(k) - y).abs() > 1e-9 {
        return Err(Error::InvalidParameter(alloc::format!("y = {y} is not an interior grid point")));
    }
    let w = solution.values[n][k - 1];
    let scale = solution.values[0].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let threshold = crate::bohm::NODE_THRESHOLD * scale;
    if w.norm() < threshold {
        return Err(Error::NodeProximity { amplitude: w.norm(), threshold });
    }
    // the phase of w and of R coincide, so either smooth profile serves
    let q = solution.smooth_at(n, k);
    let dq = (solution.smooth_at(n, k + 1) - solution.smooth_at(n, k - 1)) / (2.0 * h);
    Ok((dq / q).im / solution.geometry.wall(t))
}
