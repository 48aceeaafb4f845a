//! Two particles in the moving-wall sphere, both in s-wave one-body states
//! `A` and `B` (the expansions of `u₀₁₀` and `u₀₂₀`):
//!
//! ```text
//! MB: Ψ = A(r₁)B(r₂)        FD/BE: Ψ = [A(r₁)B(r₂) ∓ B(r₁)A(r₂)]/√2
//! ```
//!
//! times `Y₀₀(Ω₁)Y₀₀(Ω₂)`. Each one-body factor evolves exactly, so the
//! form is preserved and the motion is purely radial.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bohm::{Trajectory, TrajectoryOptions, NODE_THRESHOLD};
use crate::error::{Error, Result};
use crate::expansion::{expand_initial_eigenstate, ExpansionOptions};
use crate::math::{sqrt, FRAC_PI_2, PI, SQRT_2};
use crate::ode::{integrate, OdeOptions, Output};
use crate::quad::GaussLegendre;
use crate::trapstate::{ModeIndex, Point, Sector, TrapGeometry, TrapKind, WaveState};

/// Exchange statistics of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    /// Distinguishable particles in a product state.
    MaxwellBoltzmann,
    /// Antisymmetric state.
    FermiDirac,
    /// Symmetric state.
    BoseEinstein,
}

impl Statistics {
    pub const ALL: [Statistics; 3] = [Statistics::MaxwellBoltzmann, Statistics::FermiDirac, Statistics::BoseEinstein];

    /// `+1` for BE, `−1` for FD, `None` for MB.
    pub fn sign(self) -> Option<f64> {
        match self {
            Statistics::MaxwellBoltzmann => None,
            Statistics::FermiDirac => Some(-1.0),
            Statistics::BoseEinstein => Some(1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistics::MaxwellBoltzmann => "mb",
            Statistics::FermiDirac => "fd",
            Statistics::BoseEinstein => "be",
        }
    }
}

impl core::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mb" => Ok(Statistics::MaxwellBoltzmann),
            "fd" => Ok(Statistics::FermiDirac),
            "be" => Ok(Statistics::BoseEinstein),
            other => Err(Error::InvalidParameter(alloc::format!("unknown statistics {other:?} (expected mb, fd or be)"))),
        }
    }
}

/// A two-particle state built from two s-wave one-body states.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyState {
    statistics: Statistics,
    a: WaveState,
    b: WaveState,
}

impl TwoBodyState {
    pub fn new(statistics: Statistics, a: WaveState, b: WaveState) -> Result<Self> {
        for s in [&a, &b] {
            if s.geometry().kind() != TrapKind::Spherical {
                return Err(Error::GeometryMismatch { expected: "spherical", found: s.geometry().kind().name() });
            }
            if s.single_sector() != Some(Sector::Spherical { l: 0, m: 0 }) {
                return Err(Error::InvalidQuantumNumber("two-body factors must be s-wave (l = 0, m = 0) states".into()));
            }
        }
        if a.geometry() != b.geometry() {
            return Err(Error::InvalidParameter("both one-body factors must live in the same trap".into()));
        }
        Ok(Self { statistics, a, b })
    }

    /// The pair built from the `u₀₁₀` and `u₀₂₀` expansions in `geometry`.
    pub fn ground_and_first(statistics: Statistics, geometry: &TrapGeometry, options: ExpansionOptions) -> Result<Self> {
        let a = expand_initial_eigenstate(geometry, ModeIndex::Spherical { l: 0, n: 1, m: 0 }, options)?;
        let b = expand_initial_eigenstate(geometry, ModeIndex::Spherical { l: 0, n: 2, m: 0 }, options)?;
        Self::new(statistics, a, b)
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn with_statistics(&self, statistics: Statistics) -> Self {
        Self { statistics, ..self.clone() }
    }

    pub fn geometry(&self) -> &TrapGeometry {
        self.a.geometry()
    }

    pub fn factors(&self) -> (&WaveState, &WaveState) {
        (&self.a, &self.b)
    }

    /// Radial one-body values `(A, A', B, B')` at `r`.
    fn one_body(&self, r: f64, t: f64) -> (Complex64, Complex64, Complex64, Complex64) {
        let (a, da) = self.a.radial_sum(r, t);
        let (b, db) = self.b.radial_sum(r, t);
        (a, da, b, db)
    }

    fn combine(&self, a1: Complex64, b1: Complex64, a2: Complex64, b2: Complex64) -> Complex64 {
        match self.statistics.sign() {
            None => a1 * b2,
            Some(s) => (a1 * b2 + b1 * a2 * s) / SQRT_2,
        }
    }

    fn check(&self, r1: f64, r2: f64, t: f64) -> Result<()> {
        let g = self.geometry();
        g.check_horizon(t)?;
        let l = g.wall(t);
        for r in [r1, r2] {
            if !(0.0..=l).contains(&r) {
                return Err(Error::OutOfDomain { radius: r, wall: l, t });
            }
        }
        Ok(())
    }

    /// Radial section `Φ(r₁, r₂, t)` without the angular factors.
    pub fn radial_amplitude(&self, r1: f64, r2: f64, t: f64) -> Result<Complex64> {
        self.check(r1, r2, t)?;
        let (a1, _, b1, _) = self.one_body(r1, t);
        let (a2, _, b2, _) = self.one_body(r2, t);
        Ok(self.combine(a1, b1, a2, b2))
    }

    /// Full amplitude `Ψ = Φ(r₁, r₂) Y₀₀²`.
    pub fn evaluate(&self, r1: f64, r2: f64, t: f64) -> Result<Complex64> {
        Ok(self.radial_amplitude(r1, r2, t)? / (4.0 * PI))
    }

    /// Bohmian radial velocities `(ṙ₁, ṙ₂) = Im(∂ᵢΨ/Ψ)`.
    pub fn velocity(&self, r1: f64, r2: f64, t: f64) -> Result<(f64, f64)> {
        self.check(r1, r2, t)?;
        let l = self.geometry().wall(t);
        if r1 >= l || r2 >= l {
            return Err(Error::OutOfDomain { radius: r1.max(r2), wall: l, t });
        }
        if self.statistics == Statistics::FermiDirac && r1 == r2 {
            return Err(Error::ForbiddenConfiguration("fermions cannot occupy the same radius".into()));
        }
        let (a1, da1, b1, db1) = self.one_body(r1, t);
        let (a2, da2, b2, db2) = self.one_body(r2, t);
        let psi = self.combine(a1, b1, a2, b2);
        let scale = 1.0 / self.geometry().volume(t);
        let threshold = NODE_THRESHOLD * scale;
        if psi.norm() < threshold {
            return Err(Error::NodeProximity { amplitude: psi.norm(), threshold });
        }
        let d1 = self.combine(da1, db1, a2, b2);
        let d2 = self.combine(a1, b1, da2, db2);
        Ok(((d1 / psi).im, (d2 / psi).im))
    }

    /// `ρ₁(r) = ∫ dΩ₂ ∫ r₂² |Ψ(r, r₂)|² dr₂`, normalised so that
    /// `∫ ρ₁ r² dr dΩ = 1`.
    pub fn one_particle_density(&self, r: f64, t: f64) -> Result<f64> {
        self.check(r, 0.0, t)?;
        let grid = RadialGrid::new(self, t);
        let (a1, _, b1, _) = self.one_body(r, t);
        let sum: f64 = grid
            .nodes
            .iter()
            .zip(&grid.weights)
            .zip(grid.a.iter().zip(&grid.b))
            .map(|((r2, w), (a2, b2))| w * r2 * r2 * self.combine(a1, b1, *a2, *b2).norm_sqr())
            .sum();
        Ok(sum / (4.0 * PI))
    }

    /// `⟨Ψ|Ψ⟩`.
    pub fn norm(&self, t: f64) -> Result<f64> {
        self.geometry().check_horizon(t)?;
        Ok(RadialGrid::new(self, t).moments(self).0)
    }

    /// `(⟨r₂ − r₁⟩, √⟨(r₂ − r₁)²⟩)`.
    pub fn separation_moments(&self, t: f64) -> Result<(f64, f64)> {
        self.geometry().check_horizon(t)?;
        let (_, mean, second) = RadialGrid::new(self, t).moments(self);
        Ok((mean, sqrt(second)))
    }
}

/// Composite Gauss–Legendre nodes on `[0, L]` with the one-body values.
struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

impl RadialGrid {
    fn new(state: &TwoBodyState, t: f64) -> Self {
        let l = state.geometry().wall(t);
        let x_max = state.a.modes().iter().chain(state.b.modes()).map(|m| m.zero()).fold(0.0, f64::max);
        let panels = (x_max / PI) as usize + 8;
        let rule = GaussLegendre::new(16).composite(0.0, l, panels);
        let (nodes, weights): (Vec<f64>, Vec<f64>) = rule.into_iter().unzip();
        let (a, b) = nodes.iter().map(|&r| (state.a.radial_sum(r, t).0, state.b.radial_sum(r, t).0)).unzip();
        Self { nodes, weights, a, b }
    }

    /// `(∫|Φ|², ∫(r₂−r₁)|Φ|², ∫(r₂−r₁)²|Φ|²)` with weights `r₁² r₂²`.
    fn moments(&self, state: &TwoBodyState) -> (f64, f64, f64) {
        let mut m = (0.0, 0.0, 0.0);
        for i in 0..self.nodes.len() {
            let (r1, w1) = (self.nodes[i], self.weights[i] * self.nodes[i] * self.nodes[i]);
            for j in 0..self.nodes.len() {
                let (r2, w2) = (self.nodes[j], self.weights[j] * self.nodes[j] * self.nodes[j]);
                let p = w1 * w2 * state.combine(self.a[i], self.b[i], self.a[j], self.b[j]).norm_sqr();
                let d = r2 - r1;
                m.0 += p;
                m.1 += p * d;
                m.2 += p * d * d;
            }
        }
        m
    }
}

/// `(ṙ₁, ṙ₂)` at `(r₁, r₂, t)`.
pub fn twobody_velocity(state: &TwoBodyState, r1: f64, r2: f64, t: f64) -> Result<(f64, f64)> {
    state.velocity(r1, r2, t)
}

/// Integrates the coupled guidance equations of the pair.
pub fn integrate_pair(
    state: &TwoBodyState,
    r1: f64,
    r2: f64,
    t_end: f64,
    options: &TrajectoryOptions,
) -> Result<Trajectory> {
    let g = *state.geometry();
    g.check_horizon(t_end)?;
    if state.statistics == Statistics::FermiDirac && r1 == r2 {
        return Err(Error::ForbiddenConfiguration("the antisymmetric state vanishes on r₁ = r₂".into()));
    }
    state.velocity(r1, r2, 0.0)?;
    let rhs = |t: f64, y: &[f64; 2]| -> Result<[f64; 2]> {
        let (v1, v2) = state.velocity(y[0], y[1], t)?;
        Ok([v1, v2])
    };
    let ode = OdeOptions { rtol: options.rtol, atol: options.atol, max_steps: options.max_steps, ..OdeOptions::default() };
    let output = if options.samples == 0 {
        Output::Steps
    } else {
        let n = options.samples;
        Output::Times((0..=n).map(|i| if i == n { t_end } else { t_end * i as f64 / n as f64 }).collect())
    };
    let to_points =
        |y: &[f64; 2]| alloc::vec![Point::spherical(y[0], FRAC_PI_2, 0.0), Point::spherical(y[1], FRAC_PI_2, 0.0)];
    let wall = move |t: f64| g.wall(t);
    match integrate(rhs, 0.0, [r1, r2], t_end, &ode, output) {
        Ok(sol) => Ok(Trajectory::build(
            TrapKind::Spherical,
            sol.times,
            &sol.states,
            wall,
            to_points,
            (sol.accepted, sol.rejected, sol.error_estimate, options.rtol),
        )),
        Err(s) => {
            let p = s.partial;
            let traj = Trajectory::build(
                TrapKind::Spherical,
                p.times,
                &p.states,
                wall,
                to_points,
                (p.accepted, p.rejected, p.error_estimate, options.rtol),
            );
            Err(Error::TrajectoryStalled { t: s.t, step: s.step, partial: alloc::boxed::Box::new(traj) })
        }
    }
}

/// An instant at which a boson pair is farther apart than a fermion pair
/// started from the same positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationExcess {
    pub alpha: f64,
    pub r1: f64,
    pub r2: f64,
    pub t: f64,
    pub boson_separation: f64,
    pub fermion_separation: f64,
}

/// Integrates BE and FD pairs from each `(r₁, r₂)` in `starts` and returns
/// every sample time where `|r₂ − r₁|_BE > |r₂ − r₁|_FD`, earliest first
/// per start.
pub fn boson_fermion_excess(
    geometry: &TrapGeometry,
    starts: &[(f64, f64)],
    t_end: f64,
    expansion: ExpansionOptions,
    options: &TrajectoryOptions,
) -> Result<Vec<SeparationExcess>> {
    let be = TwoBodyState::ground_and_first(Statistics::BoseEinstein, geometry, expansion)?;
    let fd = be.with_statistics(Statistics::FermiDirac);
    // both runs must share their sample times
    let options = &TrajectoryOptions { samples: options.samples.max(1), ..*options };
    let mut hits = Vec::new();
    for &(r1, r2) in starts {
        let tb = integrate_pair(&be, r1, r2, t_end, options)?;
        let tf = integrate_pair(&fd, r1, r2, t_end, options)?;
        for (j, &t) in tb.times.iter().enumerate() {
            let sb = (tb.particles[1][j].radius - tb.particles[0][j].radius).abs();
            let sf = (tf.particles[1][j].radius - tf.particles[0][j].radius).abs();
            if sb > sf {
                hits.push(SeparationExcess {
                    alpha: geometry.alpha(),
                    r1,
                    r2,
                    t,
                    boson_separation: sb,
                    fermion_separation: sf,
                });
            }
        }
    }
    Ok(hits)
}
