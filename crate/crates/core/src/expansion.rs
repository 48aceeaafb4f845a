//! Projection of initial data onto the moving-wall basis at `t = 0`.
//!
//! At `t = 0` every basis function equals a static eigenfunction of the box
//! of radius `a` times `exp(iα(r/a)²)`, so a coefficient is the overlap of
//! the initial profile with `exp(−iα(r/a)²)` times that eigenfunction. For
//! an eigenstate of a smaller box of radius `a_s` the overlap reads
//!
//! ```text
//! I_{nn'}(α) = 2/(a_s a |J_{m+1}(x_n)| |J_{m+1}(x_n')|)
//!              ∫₀^{a_s} ρ e^{−iα(ρ/a)²} J_m(x_n ρ/a_s) J_m(x_n' ρ/a) dρ
//! ```
//!
//! in the disc and the analogue with `r²`, `j_l` and `2/√(a_s³ a³)` in the
//! sphere.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{sqrt, PI};
use crate::quad::{integrate_adaptive, Tolerance};
use crate::specfun::{bessel_zero, jn, sph_jn, BesselKind};
use crate::trapstate::{Mode, ModeIndex, TrapGeometry, TrapKind, WaveState};

/// Default number of radial modes kept per sector.
pub const DEFAULT_N_MAX: usize = 40;

/// Absolute accuracy of each overlap integral.
pub const OVERLAP_TOLERANCE: f64 = 1e-10;

/// Overlaps of one initial eigenstate with the radial modes `n' = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapRow {
    pub kind: BesselKind,
    /// Radial order `|m|` or `l`.
    pub order: u32,
    /// Radial index of the initial eigenstate.
    pub n: u32,
    pub alpha: f64,
    /// Radius of the box the initial eigenstate belongs to.
    pub a_s: f64,
    pub a: f64,
    /// `values[j]` is the overlap with `n' = j + 1`.
    pub values: Vec<Complex64>,
    /// `|1 − Σ|I|²|`.
    pub norm_defect: f64,
}

impl OverlapRow {
    /// Computes the row by adaptive quadrature.
    pub fn compute(kind: BesselKind, order: u32, n: u32, alpha: f64, a_s: f64, a: f64, n_max: usize) -> Result<Self> {
        check_radii(a_s, a)?;
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        let values = (1..=n_max as u32)
            .map(|np| overlap(kind, order, n, np, alpha, a_s, a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_values(kind, order, n, alpha, a_s, a, values))
    }

    fn from_values(kind: BesselKind, order: u32, n: u32, alpha: f64, a_s: f64, a: f64, values: Vec<Complex64>) -> Self {
        let norm: f64 = values.iter().map(|c| c.norm_sqr()).sum();
        Self { kind, order, n, alpha, a_s, a, values, norm_defect: (1.0 - norm).abs() }
    }

    /// The exact row `δ_{nn'}` of a static box with `a_s = a`.
    fn identity(kind: BesselKind, order: u32, n: u32, a: f64, n_max: usize) -> Self {
        let mut values = alloc::vec![Complex64::new(0.0, 0.0); n_max];
        if let Some(v) = values.get_mut(n as usize - 1) {
            *v = Complex64::new(1.0, 0.0);
        }
        Self::from_values(kind, order, n, 0.0, a, a, values)
    }
}

fn check_radii(a_s: f64, a: f64) -> Result<()> {
    if !(a > 0.0) || !(a_s > 0.0) || a_s > a {
        return Err(Error::InvalidParameter(alloc::format!("need 0 < a_s ≤ a, got a_s = {a_s}, a = {a}")));
    }
    Ok(())
}

fn overlap(kind: BesselKind, order: u32, n: u32, np: u32, alpha: f64, a_s: f64, a: f64) -> Result<Complex64> {
    check_radii(a_s, a)?;
    if order > kind.cap() {
        return Err(Error::UnsupportedOrder { order, cap: kind.cap() });
    }
    let x = bessel_zero(kind, order, n)?;
    let xp = bessel_zero(kind, order, np)?;
    let prefactor = match kind {
        BesselKind::Cylinder => 2.0 / (a_s * a),
        BesselKind::Spherical => 2.0 / sqrt(a_s * a_s * a_s * a * a * a),
    } / (kind.eval(order + 1, x).abs() * kind.eval(order + 1, xp).abs());
    let integrand = |rho: f64| {
        let w = match kind {
            BesselKind::Cylinder => rho,
            BesselKind::Spherical => rho * rho,
        };
        let s = rho / a;
        Complex64::cis(-alpha * s * s) * (w * kind.eval(order, x * rho / a_s) * kind.eval(order, xp * rho / a))
    };
    // pre-split into pieces shorter than half an oscillation of the fastest
    // factor so the adaptive rule never under-samples a whole lobe
    let lobes = (x + xp * a_s / a + 2.0 * alpha.abs() * (a_s / a) * (a_s / a)) / PI;
    let pieces = (libm::ceil(lobes) as usize).clamp(1, 20_000);
    let tol = OVERLAP_TOLERANCE / (prefactor * pieces as f64);
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..pieces {
        let lo = a_s * i as f64 / pieces as f64;
        let hi = a_s * (i + 1) as f64 / pieces as f64;
        let est = integrate_adaptive(lo, hi, Tolerance::absolute(tol), integrand).map_err(|e| match e {
            Error::Accuracy { estimate, error, requested } => Error::Accuracy {
                estimate: estimate * prefactor,
                error: error * prefactor,
                requested: requested * prefactor,
            },
            other => other,
        })?;
        total += est.value;
    }
    Ok(total * prefactor)
}

/// Overlap `I_{mnn'}(α)` of the disc eigenstate `(m, n)` of radius `a_s`
/// with the moving-wall mode `(m, n')` of the box of radius `a`.
pub fn overlap_circular(m: i32, n: u32, n_prime: u32, alpha: f64, a_s: f64, a: f64) -> Result<Complex64> {
    overlap(BesselKind::Cylinder, m.unsigned_abs(), n, n_prime, alpha, a_s, a)
}

/// Overlap `I_{lnn'}(α)` for the sphere.
pub fn overlap_spherical(l: u32, n: u32, n_prime: u32, alpha: f64, a_s: f64, a: f64) -> Result<Complex64> {
    overlap(BesselKind::Spherical, l, n, n_prime, alpha, a_s, a)
}

/// Settings for [`expand_initial_eigenstate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionOptions {
    /// Radius of the box whose eigenstate is the initial state; `None`
    /// means the trap radius `a`.
    pub small_radius: Option<f64>,
    pub n_max: usize,
    /// Largest accepted norm defect of the truncated row.
    pub tolerance: f64,
}

impl Default for ExpansionOptions {
    fn default() -> Self {
        Self { small_radius: None, n_max: DEFAULT_N_MAX, tolerance: crate::trapstate::DEFAULT_NORM_TOLERANCE }
    }
}

/// Expands an eigenstate of the static box of radius `a_s ≤ a` on the
/// moving-wall basis of `geometry`.
///
/// The quantum numbers of `initial` fix the angular sector and the radial
/// index of the initial eigenstate. A static trap with `a_s = a` yields the
/// single coefficient one without any quadrature.
pub fn expand_initial_eigenstate(geometry: &TrapGeometry, initial: ModeIndex, options: ExpansionOptions) -> Result<WaveState> {
    let row = overlap_row(geometry, initial, options)?;
    if row.norm_defect > options.tolerance {
        return Err(Error::Truncation { defect: row.norm_defect, tolerance: options.tolerance, n_max: options.n_max });
    }
    let mut modes = Vec::with_capacity(row.values.len());
    let mut coeffs = Vec::with_capacity(row.values.len());
    for (j, c) in row.values.iter().enumerate() {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let index = initial.with_n(j as u32 + 1);
        let zero = bessel_zero(geometry.kind().zero_kind(), index.radial_order(), index.n())?;
        modes.push(Mode::with_zero(index, zero)?);
        coeffs.push(*c);
    }
    WaveState::with_tolerance(*geometry, modes, coeffs, options.tolerance)
}

/// The overlap row used by [`expand_initial_eigenstate`].
pub fn overlap_row(geometry: &TrapGeometry, initial: ModeIndex, options: ExpansionOptions) -> Result<OverlapRow> {
    initial.validate()?;
    if initial.kind() != geometry.kind() {
        return Err(Error::GeometryMismatch { expected: geometry.kind().name(), found: initial.kind().name() });
    }
    let a = geometry.radius();
    let a_s = options.small_radius.unwrap_or(a);
    check_radii(a_s, a)?;
    if options.n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let kind = geometry.kind().zero_kind();
    let order = initial.radial_order();
    let alpha = geometry.alpha();
    if alpha == 0.0 && a_s == a {
        return Ok(OverlapRow::identity(kind, order, initial.n(), a, options.n_max));
    }
    OverlapRow::compute(kind, order, initial.n(), alpha, a_s, a, options.n_max)
}

/// Static eigenfunction of the box of radius `a_s`, radial part only,
/// extended by zero outside it. Used to compare an expansion at `t = 0`
/// with its initial state.
pub fn initial_radial_profile(kind: TrapKind, order: u32, n: u32, a_s: f64, r: f64) -> Result<f64> {
    let zk = kind.zero_kind();
    let x = bessel_zero(zk, order, n)?;
    if r > a_s {
        return Ok(0.0);
    }
    Ok(match zk {
        BesselKind::Cylinder => crate::math::SQRT_2 / a_s * jn(order, x * r / a_s) / jn(order + 1, x).abs(),
        BesselKind::Spherical => sqrt(2.0 / (a_s * a_s * a_s)) * sph_jn(order, x * r / a_s) / sph_jn(order + 1, x).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::GaussLegendre;
    use crate::specfun::spherical_harmonic;
    use crate::trapstate::Point;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const A01: f64 = PI / 2.0;

    #[test]
    fn static_rows_are_the_identity() {
        for (n, np) in [(1, 1), (1, 2), (2, 2), (3, 1), (2, 5)] {
            let delta = if n == np { 1.0 } else { 0.0 };
            for m in [0, 1, -2] {
                let v = overlap_circular(m, n, np, 0.0, 1.0, 1.0).unwrap();
                assert!((v - delta).norm() < 1e-9, "m={m} n={n} n'={np}: {v}");
            }
            for l in [0, 1, 3] {
                let v = overlap_spherical(l, n, np, 0.0, 2.0, 2.0).unwrap();
                assert!((v - delta).norm() < 1e-9, "l={l} n={n} n'={np}: {v}");
            }
        }
    }

    #[test]
    fn second_quadrature_family_agrees() {
        let x11 = bessel_zero(BesselKind::Cylinder, 1, 1).unwrap();
        let alpha = -x11 / 4.0;
        for np in [1, 2, 7] {
            let v = overlap_circular(1, 1, np, alpha, 1.0, 1.0).unwrap();
            let xp = bessel_zero(BesselKind::Cylinder, 1, np).unwrap();
            let pre = 2.0 / (jn(2, x11).abs() * jn(2, xp).abs());
            let gl = GaussLegendre::new(40);
            let check: Complex64 = gl
                .composite(0.0, 1.0, 20)
                .into_iter()
                .map(|(r, w)| Complex64::cis(-alpha * r * r) * (r * jn(1, x11 * r) * jn(1, xp * r) * w))
                .sum::<Complex64>()
                * pre;
            assert!((v - check).norm() < 1e-9, "n'={np}: {v} vs {check}");
        }
    }

    #[test]
    fn sphere_l0_against_riemann_sums() {
        // for l = 0 the integrand is r² e^{−iαr²} sin(πr) sin(n'πr) / (n'π² r²)
        let alpha = 0.8;
        for np in [1, 2, 5] {
            let k = np as f64 * PI;
            let f = |r: f64| Complex64::cis(-alpha * r * r) * (libm::sin(PI * r) * libm::sin(k * r));
            let midpoint = |n: usize| {
                let h = 1.0 / n as f64;
                (0..n).map(|i| f((i as f64 + 0.5) * h)).sum::<Complex64>() * h
            };
            // Richardson on the h² midpoint error
            let integral = (4.0 * midpoint(40_000) - midpoint(20_000)) / 3.0;
            // 1/|j₁(nπ)| = nπ, so the prefactor 2 nπ·π cancels the 1/(nπ²)
            let expected = integral * 2.0;
            let v = overlap_spherical(0, 1, np, alpha, 1.0, 1.0).unwrap();
            assert!((v - expected).norm() < 1e-9, "n'={np}: {v} vs {expected}");
        }
    }

    #[test]
    fn conjugation_symmetry() {
        for np in 1..6 {
            let p = overlap_spherical(1, 1, np, 1.3, 1.0, 1.0).unwrap();
            let m = overlap_spherical(1, 1, np, -1.3, 1.0, 1.0).unwrap();
            assert!((p - m.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn parseval_defects() {
        let mut last = f64::INFINITY;
        for n_max in [5, 10, 20, 40] {
            let row = OverlapRow::compute(BesselKind::Spherical, 0, 1, 0.5 * A01, 1.0, 1.0, n_max).unwrap();
            assert!(row.norm_defect < last, "defect grew at N = {n_max}");
            last = row.norm_defect;
        }
        assert!(last < 1e-6);
        let row = OverlapRow::compute(BesselKind::Spherical, 0, 1, -0.5 * A01, 1.0, 1.0, 40).unwrap();
        assert!(row.norm_defect < 1e-6);
    }

    #[test]
    fn figure_configurations_build() {
        let x11 = bessel_zero(BesselKind::Cylinder, 1, 1).unwrap();
        for f in [-2.0, -0.5, 0.5, 2.0] {
            let disc = TrapGeometry::from_alpha(TrapKind::Circular, 1.0, f * x11 / 2.0, None).unwrap();
            let s = expand_initial_eigenstate(&disc, ModeIndex::Circular { m: 1, n: 1 }, ExpansionOptions::default()).unwrap();
            assert!(s.norm_defect() < 1e-6);
            let ball = TrapGeometry::from_alpha(TrapKind::Spherical, 1.0, f * A01, None).unwrap();
            let s = expand_initial_eigenstate(&ball, ModeIndex::Spherical { l: 0, n: 1, m: 0 }, ExpansionOptions::default()).unwrap();
            assert!(s.norm_defect() < 1e-6);
        }
    }

    #[test]
    fn static_trap_gives_a_single_coefficient() {
        let g = TrapGeometry::spherical(1.0, 0.0).unwrap();
        let s = expand_initial_eigenstate(&g, ModeIndex::Spherical { l: 2, n: 3, m: -1 }, ExpansionOptions::default()).unwrap();
        assert_eq!(s.modes().len(), 1);
        assert_eq!(s.coeffs()[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.modes()[0].index(), ModeIndex::Spherical { l: 2, n: 3, m: -1 });
    }

    #[test]
    fn reproduces_the_initial_eigenstate() {
        // pointwise accuracy next to the wall is set by the truncation: the disc
        // at α = x₁₁ still misses by 2e-5 at N = 160
        let options = ExpansionOptions { n_max: 320, ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = TrapGeometry::from_alpha(TrapKind::Spherical, 1.0, -0.5 * A01, None).unwrap();
        let s = expand_initial_eigenstate(&g, ModeIndex::Spherical { l: 1, n: 1, m: 1 }, options).unwrap();
        for _ in 0..200 {
            let p = Point::spherical(rng.random_range(0.0..1.0), rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI));
            let expected = initial_radial_profile(TrapKind::Spherical, 1, 1, 1.0, p.radius).unwrap()
                * spherical_harmonic(1, 1, p.theta, p.phi).unwrap();
            let err = (s.evaluate(&p, 0.0).unwrap() - expected).norm();
            assert!(err < 1e-5, "r = {}: error {err:e}", p.radius);
        }
        let x11 = bessel_zero(BesselKind::Cylinder, 1, 1).unwrap();
        let g = TrapGeometry::from_alpha(TrapKind::Circular, 1.0, 2.0 * x11 / 2.0, None).unwrap();
        let s = expand_initial_eigenstate(&g, ModeIndex::Circular { m: 1, n: 1 }, options).unwrap();
        for _ in 0..200 {
            let p = Point::polar(rng.random_range(0.0..1.0), rng.random_range(0.0..2.0 * PI));
            let expected = initial_radial_profile(TrapKind::Circular, 1, 1, 1.0, p.radius).unwrap()
                * Complex64::cis(p.phi)
                / sqrt(2.0 * PI);
            let err = (s.evaluate(&p, 0.0).unwrap() - expected).norm();
            assert!(err < 1e-5, "r = {}: error {err:e}", p.radius);
        }
    }

    #[test]
    fn smaller_box_eigenstate() {
        let g = TrapGeometry::spherical(1.0, 0.0).unwrap();
        let options = ExpansionOptions { small_radius: Some(0.5), n_max: 80, tolerance: 1e-4 };
        let s = expand_initial_eigenstate(&g, ModeIndex::Spherical { l: 0, n: 1, m: 0 }, options).unwrap();
        let y00 = spherical_harmonic(0, 0, 0.0, 0.0).unwrap().re;
        for r in [0.1, 0.25, 0.4] {
            let expected = initial_radial_profile(TrapKind::Spherical, 0, 1, 0.5, r).unwrap() * y00;
            let v = s.evaluate(&Point::spherical(r, 1.0, 1.0), 0.0).unwrap();
            assert!((v - expected).norm() < 1e-3 * expected.abs(), "r = {r}: {v} vs {expected}");
        }
        for r in [0.6, 0.8] {
            assert!(s.evaluate(&Point::spherical(r, 1.0, 1.0), 0.0).unwrap().norm() < 1e-3);
        }
    }

    #[test]
    fn invalid_requests() {
        let g = TrapGeometry::spherical(1.0, 0.5).unwrap();
        let opts = ExpansionOptions { small_radius: Some(1.5), ..Default::default() };
        assert!(expand_initial_eigenstate(&g, ModeIndex::Spherical { l: 0, n: 1, m: 0 }, opts).is_err());
        assert!(matches!(
            expand_initial_eigenstate(&g, ModeIndex::Circular { m: 0, n: 1 }, ExpansionOptions::default()),
            Err(Error::GeometryMismatch { .. })
        ));
        let opts = ExpansionOptions { n_max: 2, ..Default::default() };
        assert!(matches!(
            expand_initial_eigenstate(&g, ModeIndex::Spherical { l: 0, n: 1, m: 0 }, opts),
            Err(Error::Truncation { .. })
        ));
    }
}
