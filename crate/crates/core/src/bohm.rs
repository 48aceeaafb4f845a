//! Single-particle Bohmian trajectories, `v = (ħ/μ) Im(∇ψ/ψ)`.
//!
//! For a state confined to one angular sector the phase is
//! `S(r, t) + mφ`, so θ never changes and `φ̇ = m/(r² sin²θ₀)` (or `m/ρ²` in
//! the plane); the radial coordinate and φ are then integrated together as
//! an augmented two-component system. States mixing sectors use the full
//! three-dimensional guidance field.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{sin, sqrt, PI, TAU};
use crate::ode::{integrate, OdeOptions, Output, Stalled};
use crate::specfun::theta_factor;
use crate::trapstate::{Gradient, Point, Sector, TrapKind, WaveState};

/// `|ψ|` below this multiple of `1/√V` counts as a node.
pub const NODE_THRESHOLD: f64 = 1e-10;

/// Integrator settings for trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Number of equal intervals at which the trajectory is sampled; zero
    /// records every accepted step.
    pub samples: usize,
    pub max_steps: usize,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, samples: 200, max_steps: 200_000 }
    }
}

impl TrajectoryOptions {
    fn ode(&self) -> OdeOptions {
        OdeOptions { rtol: self.rtol, atol: self.atol, max_steps: self.max_steps, ..OdeOptions::default() }
    }

    fn output(&self, t_end: f64) -> Output {
        if self.samples == 0 {
            Output::Steps
        } else {
            let n = self.samples;
            Output::Times((0..=n).map(|i| if i == n { t_end } else { t_end * i as f64 / n as f64 }).collect())
        }
    }
}

/// Time-ordered samples of one or more particles.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: TrapKind,
    pub times: Vec<f64>,
    /// `particles[i][j]` is particle `i` at `times[j]`.
    pub particles: Vec<Vec<Point>>,
    /// Wall radius `L(t)` at each sample.
    pub wall: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
    /// Accumulated local error estimate of the integrator.
    pub error_estimate: f64,
    pub rtol: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Path of particle `i`.
    pub fn path(&self, i: usize) -> &[Point] {
        &self.particles[i]
    }

    /// Last sample of particle `i`.
    pub fn last(&self, i: usize) -> Option<&Point> {
        self.particles.get(i).and_then(|p| p.last())
    }

    pub(crate) fn build<const N: usize>(
        kind: TrapKind,
        times: Vec<f64>,
        states: &[[f64; N]],
        wall: impl Fn(f64) -> f64,
        to_points: impl Fn(&[f64; N]) -> Vec<Point>,
        stats: (usize, usize, f64, f64),
    ) -> Self {
        let count = states.first().map(|s| to_points(s).len()).unwrap_or(0);
        let mut particles = alloc::vec![Vec::with_capacity(times.len()); count];
        for s in states {
            for (i, p) in to_points(s).into_iter().enumerate() {
                particles[i].push(p);
            }
        }
        let wall = times.iter().map(|&t| wall(t)).collect();
        Self {
            kind,
            times,
            particles,
            wall,
            accepted: stats.0,
            rejected: stats.1,
            error_estimate: stats.2,
            rtol: stats.3,
        }
    }
}

fn amplitude_scale(state: &WaveState, t: f64) -> f64 {
    1.0 / sqrt(state.geometry().volume(t))
}

fn radial_velocity(state: &WaveState, r: f64, t: f64) -> Result<f64> {
    let g = state.geometry();
    g.check_horizon(t)?;
    let l = g.wall(t);
    if !(r >= 0.0) || r >= l {
        return Err(Error::OutOfDomain { radius: r, wall: l, t });
    }
    if state.single_sector().is_none() {
        return Err(Error::InvalidParameter("radial velocity needs a single-sector state".into()));
    }
    let (v, d) = state.radial_sum(r, t);
    let threshold = NODE_THRESHOLD * amplitude_scale(state, t);
    if v.norm() < threshold {
        return Err(Error::NodeProximity { amplitude: v.norm(), threshold });
    }
    Ok((d / v).im)
}

/// Radial Bohmian velocity `ρ̇ = Im(Σ c ∂_ρ f / Σ c f)` of a single-sector
/// disc or cylinder state.
pub fn velocity_circular(state: &WaveState, rho: f64, t: f64) -> Result<f64> {
    match state.geometry().kind() {
        TrapKind::Circular | TrapKind::Cylindrical => radial_velocity(state, rho, t),
        found => Err(Error::GeometryMismatch { expected: "circular or cylindrical", found: found.name() }),
    }
}

/// Radial Bohmian velocity `ṙ = Im(Σ c ∂_r g / Σ c g)` of a single-sector
/// sphere state.
pub fn velocity_spherical(state: &WaveState, r: f64, t: f64) -> Result<f64> {
    match state.geometry().kind() {
        TrapKind::Spherical => radial_velocity(state, r, t),
        found => Err(Error::GeometryMismatch { expected: "spherical", found: found.name() }),
    }
}

/// Coordinate rates `(ṙ, θ̇, φ̇, ż)` of the full guidance field at `p`.
/// Unused coordinates get zero rates.
pub fn velocity(state: &WaveState, p: &Point, t: f64) -> Result<[f64; 4]> {
    let (psi, grad) = state.evaluate_with_gradient(p, t)?;
    let threshold = NODE_THRESHOLD * amplitude_scale(state, t);
    if psi.norm() < threshold {
        return Err(Error::NodeProximity { amplitude: psi.norm(), threshold });
    }
    Ok(rates(state.geometry().kind(), p, psi, &grad))
}

fn rates(kind: TrapKind, p: &Point, psi: Complex64, grad: &Gradient) -> [f64; 4] {
    let ratio = |g: Complex64| (g / psi).im;
    let r = p.radius;
    match kind {
        TrapKind::Spherical => {
            let s = sin(p.theta);
            [ratio(grad.radial), ratio(grad.polar) / (r * r), ratio(grad.azimuthal) / (r * r * s * s), 0.0]
        }
        TrapKind::Circular => [ratio(grad.radial), 0.0, ratio(grad.azimuthal) / (r * r), 0.0],
        TrapKind::Cylindrical => [ratio(grad.radial), 0.0, ratio(grad.azimuthal) / (r * r), ratio(grad.axial)],
    }
}

fn check_start(state: &WaveState, start: &Point, t_end: f64) -> Result<()> {
    let g = state.geometry();
    g.check_horizon(t_end)?;
    if !(start.radius >= 0.0) || start.radius >= g.wall(0.0) {
        return Err(Error::OutOfDomain { radius: start.radius, wall: g.wall(0.0), t: 0.0 });
    }
    if g.kind() == TrapKind::Cylindrical {
        let h = g.height().unwrap_or(0.0);
        if !(start.z > 0.0 && start.z < h) {
            return Err(Error::InvalidParameter(alloc::format!("z₀ = {} must lie strictly inside (0, {h})", start.z)));
        }
    }
    let amp = state.evaluate(start, 0.0)?.norm();
    let threshold = NODE_THRESHOLD * amplitude_scale(state, 0.0);
    if amp < threshold {
        return Err(Error::NodeProximity { amplitude: amp, threshold });
    }
    Ok(())
}

fn stalled<const N: usize>(
    s: Stalled<N>,
    build: impl Fn(Vec<f64>, &[[f64; N]], (usize, usize, f64, f64)) -> Trajectory,
    rtol: f64,
) -> Error {
    let p = s.partial;
    let traj = build(p.times, &p.states, (p.accepted, p.rejected, p.error_estimate, rtol));
    if let Some(Error::ForbiddenConfiguration(msg)) = s.cause {
        return Error::ForbiddenConfiguration(msg);
    }
    Error::TrajectoryStalled { t: s.t, step: s.step, partial: alloc::boxed::Box::new(traj) }
}

/// Integrates one trajectory from `start` at `t = 0` to `t_end`.
///
/// Single-sector states use the reduced radial system with θ (and z)
/// fixed; otherwise the full guidance field is integrated.
pub fn integrate_trajectory(
    state: &WaveState,
    start: Point,
    t_end: f64,
    options: &TrajectoryOptions,
) -> Result<Trajectory> {
    check_start(state, &start, t_end)?;
    let g = *state.geometry();
    let kind = g.kind();
    let wall = move |t: f64| g.wall(t);
    if let Some(sector) = state.single_sector() {
        let m = sector.m() as f64;
        let angular = match sector {
            Sector::Spherical { .. } => {
                let s = sin(start.theta);
                s * s
            }
            _ => 1.0,
        };
        let rhs = |t: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
            let v = radial_velocity(state, y[0], t)?;
            let phi_dot = if m == 0.0 { 0.0 } else { m / (y[0] * y[0] * angular) };
            Ok([v, phi_dot])
        };
        let to_points = |y: &[f64; 2]| alloc::vec![Point { radius: y[0], phi: y[1], ..start }];
        let build = |times: Vec<f64>, states: &[[f64; 2]], stats| Trajectory::build(kind, times, states, wall, to_points, stats);
        return match integrate(rhs, 0.0, [start.radius, start.phi], t_end, &options.ode(), options.output(t_end)) {
            Ok(sol) => Ok(build(sol.times, &sol.states, (sol.accepted, sol.rejected, sol.error_estimate, options.rtol))),
            Err(s) => Err(stalled(s, build, options.rtol)),
        };
    }
    let rhs = |t: f64, y: &[f64; 4]| -> Result<[f64; 4]> {
        let p = Point { radius: y[0], theta: y[1], phi: y[2], z: y[3] };
        if p.radius >= g.wall(t) {
            return Err(Error::OutOfDomain { radius: p.radius, wall: g.wall(t), t });
        }
        velocity(state, &p, t)
    };
    let to_points = |y: &[f64; 4]| alloc::vec![Point { radius: y[0], theta: y[1], phi: y[2], z: y[3] }];
    let build = |times: Vec<f64>, states: &[[f64; 4]], stats| Trajectory::build(kind, times, states, wall, to_points, stats);
    let y0 = [start.radius, start.theta, start.phi, start.z];
    match integrate(rhs, 0.0, y0, t_end, &options.ode(), options.output(t_end)) {
        Ok(sol) => Ok(build(sol.times, &sol.states, (sol.accepted, sol.rejected, sol.error_estimate, options.rtol))),
        Err(s) => Err(stalled(s, build, options.rtol)),
    }
}

/// Draws from `f` on `[lo, hi]` by rejection against a flat envelope found
/// on a fine grid.
struct Rejection<F> {
    f: F,
    lo: f64,
    hi: f64,
    envelope: f64,
}

impl<F: Fn(f64) -> f64> Rejection<F> {
    fn new(f: F, lo: f64, hi: f64) -> Result<Self> {
        let n = 4000;
        let peak = (0..=n).map(|i| f(lo + (hi - lo) * i as f64 / n as f64)).fold(0.0f64, f64::max);
        if !(peak > 0.0) || !peak.is_finite() {
            return Err(Error::Sampler("density vanishes on the sampling interval".into()));
        }
        Ok(Self { f, lo, hi, envelope: 1.2 * peak })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Result<f64> {
        for _ in 0..100_000 {
            let x = self.lo + (self.hi - self.lo) * rng.random::<f64>();
            let v = (self.f)(x);
            if v > self.envelope {
                return Err(Error::Sampler(alloc::format!("density {v} exceeds the envelope {}", self.envelope)));
            }
            if rng.random::<f64>() * self.envelope < v {
                return Ok(x);
            }
        }
        Err(Error::Sampler("acceptance rate collapsed".into()))
    }
}

/// Draws `count` positions from `|ψ(·, 0)|²` of a single-sector state.
///
/// The radial coordinate comes from rejection sampling of the radial
/// marginal (`r²|R|²` or `ρ|R|²`), θ from `|Θ_lm|² sin θ`, z from
/// `sin²(kπz/Z)`, and φ is uniform. The same seed always yields the same
/// points.
pub fn sample_born(state: &WaveState, count: usize, seed: u64) -> Result<Vec<Point>> {
    let Some(sector) = state.single_sector() else {
        return Err(Error::Sampler("Born sampling needs a single-sector state".into()));
    };
    let l = state.geometry().wall(0.0);
    let kind = state.geometry().kind();
    let radial = Rejection::new(
        |r: f64| {
            let w = if kind == TrapKind::Spherical { r * r } else { r };
            w * state.radial_sum(r, 0.0).0.norm_sqr()
        },
        0.0,
        l,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    match sector {
        Sector::Spherical { l: deg, m } => {
            let polar = Rejection::new(
                |th: f64| {
                    let f = theta_factor(deg, m, th).0;
                    f * f * sin(th)
                },
                0.0,
                PI,
            )?;
            for _ in 0..count {
                let r = radial.draw(&mut rng)?;
                let theta = polar.draw(&mut rng)?;
                out.push(Point::spherical(r, theta, TAU * rng.random::<f64>()));
            }
        }
        Sector::Cylindrical { k, .. } => {
            let h = state.geometry().height().unwrap_or(1.0);
            let axial = Rejection::new(
                |z: f64| {
                    let s = sin(k as f64 * PI * z / h);
                    s * s
                },
                0.0,
                h,
            )?;
            for _ in 0..count {
                let r = radial.draw(&mut rng)?;
                let z = axial.draw(&mut rng)?;
                out.push(Point::cylindrical(r, TAU * rng.random::<f64>(), z));
            }
        }
        Sector::Circular { .. } => {
            for _ in 0..count {
                let r = radial.draw(&mut rng)?;
                out.push(Point::polar(r, TAU * rng.random::<f64>()));
            }
        }
    }
    Ok(out)
}

/// Samples `count` starting points from the Born density and integrates
/// each to `t_end`. Results keep the sample order; with the `parallel`
/// feature the integrations run on the rayon pool.
pub fn ensemble_run(
    state: &WaveState,
    count: usize,
    seed: u64,
    t_end: f64,
    options: &TrajectoryOptions,
) -> Result<Vec<Result<Trajectory>>> {
    if count == 0 {
        return Err(Error::InvalidParameter("ensemble needs at least one trajectory".into()));
    }
    state.geometry().check_horizon(t_end)?;
    let starts = sample_born(state, count, seed)?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(starts.par_iter().map(|p| integrate_trajectory(state, *p, t_end, options)).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(starts.iter().map(|p| integrate_trajectory(state, *p, t_end, options)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{expand_initial_eigenstate, ExpansionOptions};
    use crate::quad::GaussLegendre;
    use crate::specfun::bessel_zero;
    use crate::trapstate::{Mode, ModeIndex, TrapGeometry};
    use crate::BesselKind;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    fn single(g: TrapGeometry, index: ModeIndex) -> WaveState {
        WaveState::single_mode(g, Mode::new(index).unwrap()).unwrap()
    }

    fn disc_u11(factor: f64) -> WaveState {
        let x11 = bessel_zero(BesselKind::Cylinder, 1, 1).unwrap();
        let g = TrapGeometry::from_alpha(TrapKind::Circular, 1.0, factor * x11 / 2.0, None).unwrap();
        expand_initial_eigenstate(&g, ModeIndex::Circular { m: 1, n: 1 }, ExpansionOptions::default()).unwrap()
    }

    #[test]
    fn static_box_has_no_flow() {
        let s = single(TrapGeometry::spherical(1.0, 0.0).unwrap(), ModeIndex::Spherical { l: 0, n: 1, m: 0 });
        for r in [0.1, 0.5, 0.9] {
            assert!(velocity_spherical(&s, r, 3.0).unwrap().abs() < 1e-14);
        }
        let c = single(TrapGeometry::circular(1.0, 0.0).unwrap(), ModeIndex::Circular { m: 0, n: 2 });
        assert!(velocity_circular(&c, 0.3, 1.0).unwrap().abs() < 1e-14);
        let traj = integrate_trajectory(&s, Point::spherical(0.4, 1.0, 2.0), 10.0, &TrajectoryOptions::default()).unwrap();
        for p in traj.path(0) {
            assert!((p.radius - 0.4).abs() < 1e-8 && p.phi == 2.0 && p.theta == 1.0);
        }
    }

    #[test]
    fn single_moving_mode_scales_with_the_wall() {
        // one exact mode has phase α ξ (r/L)², hence ṙ = u r / L
        for u in [0.6, -0.6] {
            let s = single(TrapGeometry::spherical(1.0, u).unwrap(), ModeIndex::Spherical { l: 1, n: 2, m: 1 });
            for (r, t) in [(0.2, 0.1), (0.3, 0.5), (0.2, 1.0)] {
                let v = velocity_spherical(&s, r, t).unwrap();
                assert!((v - u * r / s.geometry().wall(t)).abs() < 1e-12);
            }
            let traj = integrate_trajectory(&s, Point::spherical(0.3, 0.8, 0.0), 1.0, &TrajectoryOptions::default()).unwrap();
            let end = traj.last(0).unwrap();
            assert!((end.radius - 0.3 * s.geometry().wall(1.0)).abs() < 1e-7);
        }
    }

    #[test]
    fn full_field_reduces_to_the_sector_field() {
        let s = disc_u11(0.5);
        let p = Point::polar(0.45, 1.0);
        let [vr, vt, vp, vz] = velocity(&s, &p, 0.3).unwrap();
        assert!((vr - velocity_circular(&s, 0.45, 0.3).unwrap()).abs() < 1e-12);
        assert_eq!((vt, vz), (0.0, 0.0));
        assert!((vp - 1.0 / (0.45 * 0.45)).abs() < 1e-10);
    }

    #[test]
    fn expansion_and_contraction_drift() {
        let options = TrajectoryOptions::default();
        for factor in [0.5, -0.5] {
            let s = disc_u11(factor);
            let g = *s.geometry();
            let t_end = 0.8 / g.wall_speed().abs();
            for r0 in [0.2, 0.4, 0.6, 0.8] {
                let traj = integrate_trajectory(&s, Point::polar(r0, 0.0), t_end, &options).unwrap();
                for (p, l) in traj.path(0).iter().zip(&traj.wall) {
                    assert!(p.radius < *l);
                }
                let end = traj.last(0).unwrap().radius;
                assert_eq!(end > r0, factor > 0.0, "r0 = {r0}: {end}");
                // m = 1 winds in the positive sense
                assert!(traj.last(0).unwrap().phi > 0.0);
            }
        }
    }

    #[test]
    fn m_zero_moves_along_a_ray() {
        let g = TrapGeometry::from_alpha(TrapKind::Spherical, 1.0, PI / 4.0, None).unwrap();
        let s = expand_initial_eigenstate(&g, ModeIndex::Spherical { l: 0, n: 1, m: 0 }, ExpansionOptions::default()).unwrap();
        let start = Point::spherical(0.5, 0.7, 1.3);
        let traj = integrate_trajectory(&s, start, 0.5, &TrajectoryOptions::default()).unwrap();
        assert!(traj.path(0).iter().all(|p| p.phi == 1.3 && p.theta == 0.7));
    }

    #[test]
    fn tighter_tolerance_stays_within_the_error_estimate() {
        let s = disc_u11(-0.5);
        let t_end = 0.8 / s.geometry().wall_speed().abs();
        let coarse = TrajectoryOptions { rtol: 1e-8, atol: 1e-10, ..Default::default() };
        let fine = TrajectoryOptions { rtol: 5e-9, atol: 5e-11, ..Default::default() };
        for r0 in [0.3, 0.7] {
            let a = integrate_trajectory(&s, Point::polar(r0, 0.0), t_end, &coarse).unwrap();
            let b = integrate_trajectory(&s, Point::polar(r0, 0.0), t_end, &fine).unwrap();
            let d = (a.last(0).unwrap().radius - b.last(0).unwrap().radius).abs();
            assert!(d < a.error_estimate, "{d:e} vs {:e}", a.error_estimate);
        }
    }

    #[test]
    fn invalid_starts() {
        let s = disc_u11(0.5);
        let o = TrajectoryOptions::default();
        assert!(matches!(integrate_trajectory(&s, Point::polar(1.2, 0.0), 0.1, &o), Err(Error::OutOfDomain { .. })));
        assert!(matches!(integrate_trajectory(&s, Point::polar(0.0, 0.0), 0.1, &o), Err(Error::NodeProximity { .. })));
        let c = disc_u11(-0.5);
        assert!(integrate_trajectory(&c, Point::polar(0.5, 0.0), 100.0, &o).is_err());
        assert!(matches!(velocity_spherical(&s, 0.5, 0.0), Err(Error::GeometryMismatch { .. })));
        let g = TrapGeometry::spherical(1.0, 0.4).unwrap();
        let modes = [ModeIndex::Spherical { l: 0, n: 1, m: 0 }, ModeIndex::Spherical { l: 1, n: 1, m: 0 }];
        let mixed = WaveState::normalized(g, modes.iter().map(|&i| Mode::new(i).unwrap()).collect(), alloc::vec![ONE, ONE]).unwrap();
        assert!(velocity_spherical(&mixed, 0.5, 0.0).is_err());
        assert!(matches!(sample_born(&mixed, 10, 1), Err(Error::Sampler(_))));
        assert!(ensemble_run(&s, 0, 1, 0.1, &o).is_err());
    }

    #[test]
    fn mixed_sector_trajectories_use_the_full_field() {
        let g = TrapGeometry::spherical(1.0, 0.5).unwrap();
        let modes = [ModeIndex::Spherical { l: 0, n: 1, m: 0 }, ModeIndex::Spherical { l: 1, n: 1, m: 0 }];
        let s = WaveState::normalized(g, modes.iter().map(|&i| Mode::new(i).unwrap()).collect(), alloc::vec![ONE, Complex64::new(0.0, 0.5)]).unwrap();
        let traj = integrate_trajectory(&s, Point::spherical(0.4, 1.0, 0.5), 0.5, &TrajectoryOptions::default()).unwrap();
        let end = traj.last(0).unwrap();
        assert!((end.theta - 1.0).abs() > 1e-6, "θ should move when sectors mix");
        assert_eq!(end.phi, 0.5);
        assert!(end.radius < g.wall(0.5));
    }

    #[test]
    fn ensemble_of_one_is_a_single_trajectory() {
        let s = disc_u11(0.5);
        let o = TrajectoryOptions::default();
        let runs = ensemble_run(&s, 1, 42, 0.3, &o).unwrap();
        let start = sample_born(&s, 1, 42).unwrap()[0];
        let direct = integrate_trajectory(&s, start, 0.3, &o).unwrap();
        assert_eq!(runs[0].as_ref().unwrap(), &direct);
        assert_eq!(sample_born(&s, 50, 7).unwrap(), sample_born(&s, 50, 7).unwrap());
    }

    /// Chi-square p-value of radial samples against `w(r)|R(r)|²`.
    fn radial_p_value(state: &WaveState, radii: &[f64], t: f64) -> f64 {
        let bins = 20;
        let l = state.geometry().wall(t);
        let spherical = state.geometry().kind() == TrapKind::Spherical;
        let gl = GaussLegendre::new(20);
        let mass = |lo: f64, hi: f64| {
            gl.integrate(lo, hi, |r| {
                let w = if spherical { r * r } else { r };
                w * state.radial_sum(r, t).0.norm_sqr()
            })
        };
        let total = mass(0.0, l);
        let mut counts = alloc::vec![0usize; bins];
        for &r in radii {
            counts[((r / l * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let n = radii.len() as f64;
        let stat: f64 = (0..bins)
            .map(|b| {
                let e = n * mass(l * b as f64 / bins as f64, l * (b + 1) as f64 / bins as f64) / total;
                (counts[b] as f64 - e).powi(2) / e
            })
            .sum();
        1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat)
    }

    #[test]
    fn born_samples_follow_the_radial_marginal() {
        let g = TrapGeometry::from_alpha(TrapKind::Spherical, 1.0, PI / 4.0, None).unwrap();
        let s = expand_initial_eigenstate(&g, ModeIndex::Spherical { l: 0, n: 1, m: 0 }, ExpansionOptions::default()).unwrap();
        let radii: Vec<f64> = sample_born(&s, 10_000, 3).unwrap().iter().map(|p| p.radius).collect();
        let p = radial_p_value(&s, &radii, 0.0);
        assert!(p > 0.01, "p = {p}");
        let d = disc_u11(-2.0);
        let radii: Vec<f64> = sample_born(&d, 10_000, 4).unwrap().iter().map(|p| p.radius).collect();
        assert!(radial_p_value(&d, &radii, 0.0) > 0.01);
    }

    #[test]
    fn polar_samples_follow_the_harmonic() {
        let s = single(TrapGeometry::spherical(1.0, 0.0).unwrap(), ModeIndex::Spherical { l: 1, n: 1, m: 0 });
        // |Y₁₀|² sin θ ∝ cos²θ sin θ, so cos θ has density (3/2)c²
        let pts = sample_born(&s, 10_000, 8).unwrap();
        let mean_c2: f64 = pts.iter().map(|p| libm::cos(p.theta).powi(2)).sum::<f64>() / pts.len() as f64;
        assert!((mean_c2 - 0.6).abs() < 0.01, "{mean_c2}");
    }
}
