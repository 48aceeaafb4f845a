//! The quantum potential `Q = −(ħ²/2μ)∇²R/R`, `R = |ψ|`, and the force
//! `⟨−∂_q Q⟩` it exerts.
//!
//! Integrating by parts once, `⟨−∂_q Q⟩ = ∫ Q ∂_q(R²) dV = −(ħ²/μ)∫ ∇²R ∂_q R dV`;
//! the boundary term `R²Q = −(ħ²/2μ) R∇²R` vanishes at the wall. The
//! integrand stays finite at the wall, and at vortex lines it diverges only
//! like the inverse distance.
//!
//! `∇R = Re(ψ*∇ψ)/R` and `∇²R = (Re(ψ*∇²ψ) + |∇ψ|² − |∇R|²)/R` are built
//! from the analytic value, gradient and Laplacian of every mode. Modes
//! are grouped by azimuthal number, `ψ = Σ_m e^{imφ} F_m(r, θ)`, so the
//! innermost azimuthal integral only recombines the `F_m` and their
//! derivatives; the Bessel functions are evaluated once per radius and the
//! angular factors once per `(r, θ)` or `(ρ, z)`.

use alloc::vec::Vec;
use core::cell::{Cell, RefCell};

use num_complex::Complex64;

use super::{dot, Direction, ForceMethod, ForceSample};
use crate::error::{Error, Result};
use crate::math::{cos, sin, sqrt, PI, TAU};
use crate::quad::{integrate_adaptive, Estimate, Tolerance};
use crate::trapstate::basis::AngularFactor;
use crate::trapstate::{ModeIndex, Point, RadialFactor, TrapKind, WaveState};

/// Nodes with `|ψ| < NODE_THRESHOLD·max|ψ|` are skipped.
pub const NODE_THRESHOLD: f64 = 1e-8;

/// Relative accuracy floor of the nested integrals. Near nodes `ψ` is a
/// cancelling sum, so the integrand carries rounding noise that no
/// subdivision removes.
const RELATIVE_FLOOR: f64 = 1e-10;

/// Settings of the quantum-potential force integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialOptions {
    /// Absolute accuracy requested for the force.
    pub tolerance: f64,
    pub node_threshold: f64,
    /// Subdivision budget of each nested adaptive integral.
    pub max_intervals: usize,
}

impl Default for PotentialOptions {
    fn default() -> Self {
        Self { tolerance: 1e-6, node_threshold: NODE_THRESHOLD, max_intervals: 1000 }
    }
}

/// Radial factor of every mode at one radius: value, first and second
/// derivative.
type Radial = Vec<(RadialFactor, Complex64)>;

fn radial_factors(state: &WaveState, r: f64, t: f64) -> Radial {
    state.modes().iter().map(|m| RadialFactor::with_second(state.geometry(), m, r, t)).collect()
}

/// One azimuthal component `F_m` on a line of fixed `(r, θ)` or `(ρ, z)`.
#[derive(Debug, Clone, Copy)]
struct Harmonic {
    m: f64,
    value: Complex64,
    d_radius: Complex64,
    /// `∂_θ` on the sphere, `∂_z` in the cylinder, zero on the disc.
    d_other: Complex64,
    laplacian: Complex64,
}

/// `ψ` and its derivatives along the azimuth at fixed `(r, θ)` or `(ρ, z)`.
struct Line {
    kind: TrapKind,
    radius: f64,
    theta: f64,
    harmonics: Vec<Harmonic>,
}

impl Line {
    /// `other` is `θ` on the sphere, `z` in the cylinder and unused on the disc.
    fn new(state: &WaveState, radial: &Radial, radius: f64, other: f64, t: f64) -> Self {
        let g = state.geometry();
        let kind = g.kind();
        let theta = if kind == TrapKind::Spherical { other } else { 0.5 * PI };
        let p = match kind {
            TrapKind::Spherical => Point::spherical(radius, other, 0.0),
            TrapKind::Cylindrical => Point::cylindrical(radius, 0.0, other),
            TrapKind::Circular => Point::polar(radius, 0.0),
        };
        let mut harmonics: Vec<Harmonic> = Vec::new();
        for ((mode, c), (f, second)) in state.modes().iter().zip(state.coeffs()).zip(radial) {
            let index = mode.index();
            let a = AngularFactor::new(g, &index, &p, t);
            let (centrifugal, axial) = match index {
                ModeIndex::Spherical { l, .. } => ((l * (l + 1)) as f64, 0.0),
                ModeIndex::Circular { m, .. } => ((m * m) as f64, 0.0),
                ModeIndex::Cylindrical { m, k, .. } => {
                    let kz = k as f64 * PI / g.height().unwrap_or(1.0);
                    ((m * m) as f64, kz * kz)
                }
            };
            let dims = if kind == TrapKind::Spherical { 2.0 } else { 1.0 };
            let radial_lap = second + f.derivative * (dims / radius) - f.value * (centrifugal / (radius * radius) + axial);
            let other = match kind {
                TrapKind::Spherical => a.d_theta,
                TrapKind::Cylindrical => a.d_z,
                TrapKind::Circular => Complex64::new(0.0, 0.0),
            };
            let term = Harmonic {
                m: index.m() as f64,
                value: c * f.value * a.value,
                d_radius: c * f.derivative * a.value,
                d_other: c * f.value * other,
                laplacian: c * radial_lap * a.value,
            };
            match harmonics.iter_mut().find(|h| h.m == term.m) {
                Some(h) => {
                    h.value += term.value;
                    h.d_radius += term.d_radius;
                    h.d_other += term.d_other;
                    h.laplacian += term.laplacian;
                }
                None => harmonics.push(term),
            }
        }
        Self { kind, radius, theta, harmonics }
    }

    /// `|ψ|²` and `½∂_φ|ψ|² = Re(ψ* ∂_φψ)` at azimuth `φ`.
    fn modulus_sqr(&self, phi: f64) -> (f64, f64) {
        let (psi, dphi) = self.harmonics.iter().fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |(p, d), h| {
            let v = h.value * Complex64::cis(h.m * phi);
            (p + v, d + v * Complex64::new(0.0, h.m))
        });
        (psi.norm_sqr(), (psi.conj() * dphi).re)
    }

    /// Azimuths of the deep minima of `|ψ|` along the line, sorted, and
    /// the least `|ψ|²` found. The line passes closest to a vortex at those
    /// minima, where the integrand has an odd near-singularity.
    fn scan(&self) -> (Vec<f64>, f64) {
        let (lo, hi) = self.harmonics.iter().fold((0.0f64, 0.0f64), |(lo, hi), h| (lo.min(h.m), hi.max(h.m)));
        if hi == lo {
            return (Vec::new(), self.modulus_sqr(0.0).0);
        }
        let n = (8.0 * (hi - lo + 1.0)).max(32.0) as usize;
        let h = TAU / n as f64;
        let samples: Vec<f64> = (0..n).map(|j| self.modulus_sqr(h * j as f64).0).collect();
        let peak = samples.iter().cloned().fold(0.0, f64::max);
        let mut lowest = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut nodes = Vec::new();
        for j in 0..n {
            let (prev, next) = (samples[(j + n - 1) % n], samples[(j + 1) % n]);
            if samples[j] <= prev && samples[j] < next && samples[j] < 0.04 * peak {
                let (a, b) = (h * (j as f64 - 1.0), h * (j as f64 + 1.0));
                let phi = self.minimum(a, b);
                lowest = lowest.min(self.modulus_sqr(phi).0);
                nodes.push(if phi < 0.0 { phi + TAU } else { phi % TAU });
            }
        }
        nodes.sort_by(f64::total_cmp);
        (nodes, lowest)
    }

    /// Minimum of `|ψ|²` in `[a, b]`: bisection on its slope when that
    /// brackets a root, which is accurate to rounding, else golden section.
    fn minimum(&self, mut a: f64, mut b: f64) -> f64 {
        if self.modulus_sqr(a).1 >= 0.0 || self.modulus_sqr(b).1 <= 0.0 {
            return golden_minimum(|phi| self.modulus_sqr(phi).0, a, b);
        }
        loop {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                return mid;
            }
            if self.modulus_sqr(mid).1 < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
    }

    /// `(ψ, ∇ψ, ∇²ψ)` at azimuth `φ`, gradient in Cartesian components.
    fn at(&self, phi: f64) -> (Complex64, [Complex64; 3], Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let (mut psi, mut dr, mut dother, mut dphi, mut lap) = (zero, zero, zero, zero, zero);
        for h in &self.harmonics {
            let e = Complex64::cis(h.m * phi);
            let v = h.value * e;
            psi += v;
            dr += h.d_radius * e;
            dother += h.d_other * e;
            dphi += v * Complex64::new(0.0, h.m);
            lap += h.laplacian * e;
        }
        let (sp, cp) = (sin(phi), cos(phi));
        let grad = match self.kind {
            TrapKind::Spherical => {
                let (st, ct) = (sin(self.theta), cos(self.theta));
                let gt = dother / self.radius;
                let gp = dphi / (self.radius * st);
                [dr * (st * cp) + gt * (ct * cp) - gp * sp, dr * (st * sp) + gt * (ct * sp) + gp * cp, dr * ct - gt * st]
            }
            _ => {
                let gp = dphi / self.radius;
                [dr * cp - gp * sp, dr * sp + gp * cp, dother]
            }
        };
        (psi, grad, lap)
    }
}

/// Golden-section search for a minimum of `f` bracketed by `[a, b]`.
fn golden_minimum(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = 0.5 * (sqrt(5.0) - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-11 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Deep minima in `(a, b)` of `g ≥ 0`, sorted. With `g` the least `|ψ|²`
/// on the azimuthal line through a coordinate, they mark where a vortex
/// crosses the line and the integrand over that coordinate jumps.
fn crossings(a: f64, b: f64, g: impl Fn(f64) -> f64) -> Vec<f64> {
    const SAMPLES: usize = 32;
    let h = (b - a) / SAMPLES as f64;
    let x = |j: usize| a + h * (j as f64 + 0.5);
    let values: Vec<f64> = (0..SAMPLES).map(|j| g(x(j))).collect();
    let peak = values.iter().cloned().fold(0.0, f64::max);
    let mut found = Vec::new();
    for j in 0..SAMPLES {
        let prev = if j == 0 { f64::INFINITY } else { values[j - 1] };
        let next = values.get(j + 1).copied().unwrap_or(f64::INFINITY);
        if values[j] <= prev && values[j] < next && values[j] < 0.04 * peak {
            let c = golden_minimum(&g, (x(j) - h).max(a), (x(j) + h).min(b));
            if c > a && c < b {
                found.push(c);
            }
        }
    }
    found.sort_by(f64::total_cmp);
    found
}

/// `[a, b]` cut at `breaks` into pieces, each with its share of `tol`.
fn pieces(a: f64, b: f64, breaks: &[f64], tol: f64) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
    let edges: Vec<f64> = core::iter::once(a).chain(breaks.iter().copied()).chain(core::iter::once(b)).collect();
    (0..edges.len() - 1).map(move |i| (edges[i], edges[i + 1], tol * (edges[i + 1] - edges[i]) / (b - a)))
}

/// `(R, ∇R, ∇²R)` from `ψ`, `∇ψ` and `∇²ψ`.
fn amplitude(psi: Complex64, grad: &[Complex64; 3], lap: Complex64) -> (f64, [f64; 3], f64) {
    let r = psi.norm();
    let g = grad.map(|c| (psi.conj() * c).re / r);
    let grad_sq: f64 = grad.iter().map(|c| c.norm_sqr()).sum();
    let lap_r = ((psi.conj() * lap).re + grad_sq - dot(&g, &g)) / r;
    (r, g, lap_r)
}

/// Cartesian components of `q̂·∇R` and friends at `x`, for the generic
/// [`quantum_potential_of`].
fn stencil(r: impl Fn([f64; 3]) -> f64, x: [f64; 3], h: f64) -> (f64, f64) {
    let c = r(x);
    let mut lap = 0.0;
    for i in 0..3 {
        let mut plus = x;
        let mut minus = x;
        plus[i] += h;
        minus[i] -= h;
        lap += (r(plus) + r(minus) - 2.0 * c) / (h * h);
    }
    (c, lap)
}

/// `Q = −(ħ²/2μ)∇²R/R` for an arbitrary amplitude `R(x)` given in
/// Cartesian coordinates, with a 7-point Laplacian of step `h`.
pub fn quantum_potential_of(r: impl Fn([f64; 3]) -> f64, x: [f64; 3], h: f64, hbar2_over_mu: f64) -> f64 {
    let (c, lap) = stencil(r, x, h);
    -0.5 * hbar2_over_mu * lap / c
}

/// Quantum potential of `state` at an interior point (ħ = μ = 1).
pub fn quantum_potential(state: &WaveState, p: &Point, t: f64) -> Result<f64> {
    let geometry = state.geometry();
    geometry.check_point(p, t)?;
    let other = match geometry.kind() {
        TrapKind::Spherical => p.theta,
        _ => p.z,
    };
    let line = Line::new(state, &radial_factors(state, p.radius, t), p.radius, other, t);
    let (psi, grad, lap) = line.at(p.phi);
    // amplitude of a uniform unit density sets the node scale
    let threshold = NODE_THRESHOLD / sqrt(geometry.volume(t));
    if psi.norm() < threshold {
        return Err(Error::NodeProximity { amplitude: psi.norm(), threshold });
    }
    let (r, _, lap_r) = amplitude(psi, &grad, lap);
    Ok(-0.5 * lap_r / r)
}

fn max_amplitude(state: &WaveState, t: f64) -> f64 {
    let g = state.geometry();
    let (kind, wall, height) = (g.kind(), g.wall(t), g.height().unwrap_or(0.0));
    let mut best = 0.0f64;
    let n = 16;
    for i in 1..n {
        let r = wall * i as f64 / n as f64;
        for j in 0..n {
            let a = PI * (j as f64 + 0.5) / n as f64;
            for k in 0..n / 2 {
                let phi = TAU * k as f64 / (n / 2) as f64;
                let p = match kind {
                    TrapKind::Circular => Point::polar(r, 2.0 * a + phi),
                    TrapKind::Cylindrical => Point::cylindrical(r, phi, height * a / PI),
                    TrapKind::Spherical => Point::spherical(r, a, phi),
                };
                best = best.max(state.evaluate_unchecked(&p, t).norm());
            }
        }
    }
    best
}

/// A volume integrand in terms of `(ψ, ∇ψ, ∇²ψ)`; `None` marks a skipped
/// node.
type Integrand<'f> = dyn Fn(Complex64, &[Complex64; 3], Complex64) -> Option<f64> + 'f;

struct VolumeIntegral {
    estimate: Estimate<f64>,
    excluded_fraction: f64,
}

/// Nested adaptive quadrature over the box at time `t`: radius outermost,
/// then `θ` or `z`, then the azimuth.
fn volume_integral(state: &WaveState, t: f64, options: &PotentialOptions, integrand: &Integrand<'_>) -> Result<VolumeIntegral> {
    let g = state.geometry();
    let kind = g.kind();
    let l = g.wall(t);
    let height = g.height().unwrap_or(0.0);
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let calls = Cell::new(0usize);
    let skipped = Cell::new(0usize);
    let budget = options.max_intervals;
    let tol = options.tolerance;

    let run = |a: f64, b: f64, tol: f64, f: &mut dyn FnMut(f64) -> f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        match integrate_adaptive(a, b, Tolerance::absolute(tol).with_relative(RELATIVE_FLOOR).with_max_intervals(budget), f) {
            Ok(e) => e.value,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let azimuthal = |line: &Line, tol: f64| -> f64 {
        let mut f = |phi: f64| {
            calls.set(calls.get() + 1);
            let (psi, grad, lap) = line.at(phi);
            integrand(psi, &grad, lap).unwrap_or_else(|| {
                skipped.set(skipped.get() + 1);
                0.0
            })
        };
        let (nodes, _) = line.scan();
        if nodes.is_empty() {
            return run(0.0, TAU, tol, &mut f);
        }
        // the arc around each near node is folded onto itself, so the odd
        // singular part cancels pointwise
        let k = nodes.len();
        let mut total = 0.0;
        for (i, &n) in nodes.iter().enumerate() {
            let prev = if i == 0 { nodes[k - 1] - TAU } else { nodes[i - 1] };
            let next = if i + 1 == k { nodes[0] + TAU } else { nodes[i + 1] };
            let (left, right) = (0.5 * (n - prev), 0.5 * (next - n));
            let w = left.min(right);
            total += run(0.0, w, tol * 2.0 * w / TAU, &mut |x| f(n + x) + f(n - x));
            if right > w {
                total += run(n + w, n + right, tol * (right - w) / TAU, &mut f);
            }
            if left > w {
                total += run(n - left, n - w, tol * (left - w) / TAU, &mut f);
            }
        }
        total
    };

    // error budget: half to the outer rule, the rest split between the
    // inner levels after dividing by the measure they are weighted with
    let outer_tol = Tolerance::absolute(0.5 * tol).with_max_intervals(budget);
    let outer = match kind {
        TrapKind::Circular => {
            let t1 = 0.5 * tol / (0.5 * l * l);
            let line = |rho: f64| Line::new(state, &radial_factors(state, rho, t), rho, 0.0, t);
            let breaks = crossings(0.0, l, |rho| line(rho).scan().1);
            let mut sum = Estimate { value: 0.0, error: 0.0, evaluations: 0 };
            for (a, b, share) in pieces(0.0, l, &breaks, 0.5 * tol) {
                let e = integrate_adaptive(a, b, Tolerance::absolute(share).with_max_intervals(budget), |rho| rho * azimuthal(&line(rho), t1))?;
                sum.value += e.value;
                sum.error += e.error;
                sum.evaluations += e.evaluations;
            }
            Ok(sum)
        }
        TrapKind::Spherical => {
            let measure = l * l * l / 3.0;
            let (t1, t2) = (0.25 * tol / measure, 0.125 * tol / (2.0 * measure));
            integrate_adaptive(0.0, l, outer_tol, |r| {
                let radial = radial_factors(state, r, t);
                let line = |theta: f64| Line::new(state, &radial, r, theta, t);
                let breaks = crossings(0.0, PI, |theta| line(theta).scan().1);
                let mut sum = 0.0;
                for (a, b, share) in pieces(0.0, PI, &breaks, t1) {
                    sum += run(a, b, share, &mut |theta| sin(theta) * azimuthal(&line(theta), t2));
                }
                r * r * sum
            })
        }
        TrapKind::Cylindrical => {
            let measure = 0.5 * l * l;
            let (t1, t2) = (0.25 * tol / measure, 0.125 * tol / (height * measure));
            integrate_adaptive(0.0, l, outer_tol, |rho| {
                let radial = radial_factors(state, rho, t);
                let line = |z: f64| Line::new(state, &radial, rho, z, t);
                let breaks = crossings(0.0, height, |z| line(z).scan().1);
                let mut sum = 0.0;
                for (a, b, share) in pieces(0.0, height, &breaks, t1) {
                    sum += run(a, b, share, &mut |z| azimuthal(&line(z), t2));
                }
                rho * sum
            })
        }
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let estimate = outer?;
    let total = calls.get().max(1);
    Ok(VolumeIntegral { estimate, excluded_fraction: skipped.get() as f64 / total as f64 })
}

fn projected(direction: Direction, kind: TrapKind) -> [f64; 3] {
    let q = direction.unit_vector();
    if kind == TrapKind::Circular {
        [q[0], q[1], 0.0]
    } else {
        q
    }
}

/// `⟨−∂_q Q⟩` by volume quadrature (ħ = μ = 1).
pub fn force_from_quantum_potential(
    state: &WaveState,
    direction: Direction,
    t: f64,
    options: PotentialOptions,
) -> Result<ForceSample> {
    state.geometry().check_horizon(t)?;
    let floor = options.node_threshold * max_amplitude(state, t);
    let q = projected(direction, state.geometry().kind());
    let integrand = |psi: Complex64, grad: &[Complex64; 3], lap: Complex64| -> Option<f64> {
        if psi.norm() < floor {
            return None;
        }
        let (_, g, lap_r) = amplitude(psi, grad, lap);
        Some(-lap_r * dot(&q, &g))
    };
    let v = volume_integral(state, t, &options, &integrand)?;
    Ok(ForceSample {
        t,
        direction,
        value: v.estimate.value,
        method: ForceMethod::QuantumPotential,
        error: v.estimate.error,
        excluded_fraction: v.excluded_fraction,
    })
}

/// `⟨p_q⟩ = ∫ Im(ψ* q̂·∇ψ) dV` by volume quadrature of the analytic
/// gradient (ħ = 1). Differencing this in time is an independent check of
/// the force formulas.
pub fn momentum_expectation(state: &WaveState, direction: Direction, t: f64, tolerance: f64) -> Result<f64> {
    state.geometry().check_horizon(t)?;
    let q = projected(direction, state.geometry().kind());
    let integrand = |psi: Complex64, grad: &[Complex64; 3], _: Complex64| -> Option<f64> {
        Some(q.iter().zip(grad).map(|(qi, g)| qi * (psi.conj() * g).im).sum())
    };
    let options = PotentialOptions { tolerance, ..PotentialOptions::default() };
    Ok(volume_integral(state, t, &options, &integrand)?.estimate.value)
}
