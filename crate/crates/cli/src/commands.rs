//! One function per subcommand.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use bohmtrap::bohm::{ensemble_run, integrate_trajectory};
use bohmtrap::expansion::{expand_initial_eigenstate, initial_radial_profile, overlap_row, ExpansionOptions};
use bohmtrap::force::{force_closed_form, force_from_quantum_potential, force_surface_quadrature, PotentialOptions};
use bohmtrap::oracle::{initial_field, propagate_scaled, GridOptions};
use bohmtrap::specfun::bessel_zeros;
use bohmtrap::trapstate::Sector;
use bohmtrap::twobody::integrate_pair;
use bohmtrap::{
    BesselKind, Complex64, Direction, ForceSample, ModeIndex, Point, Statistics, Trajectory, TrajectoryOptions, TrapGeometry,
    TrapKind, TwoBodyState, WaveState,
};
use serde_json::{json, Value};

use crate::config::{mode_from_labels, parse_kind, parse_labels, AlphaSpec, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{header, CsvOutput, Field};
use crate::{MethodChoice, ZeroKind};

/// `α₀₁ = x₀₁/2 = π/2`, the reference for two-body runs.
pub const ALPHA_01: f64 = FRAC_PI_2;

pub fn zeros(kind: ZeroKind, order: u32, count: usize, out: Option<&Path>) -> Result<()> {
    let bk = match kind {
        ZeroKind::Cylinder => BesselKind::Cylinder,
        ZeroKind::Spherical => BesselKind::Spherical,
    };
    let zs = bessel_zeros(bk, order, count)?;
    let settings = json!({ "kind": format!("{kind:?}").to_lowercase(), "order": order, "count": count });
    let mut csv = CsvOutput::create(out, &header("zeros", settings), &["order", "n", "zero"])?;
    for (i, x) in zs.iter().enumerate() {
        csv.row(&[Field::Int(order as i64), Field::Int(i as i64 + 1), Field::Num(*x)])?;
    }
    csv.finish()
}

/// The configured initial eigenstate expanded in the moving-wall basis.
pub fn initial_state(config: &RunConfig) -> Result<WaveState> {
    Ok(expand_initial_eigenstate(&config.trap()?, config.mode, config.expansion_options())?)
}

fn parse_numbers(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::Config(format!("cannot read {what} {s:?}"))))
        .collect()
}

fn complex(c: Complex64) -> Value {
    json!({ "re": c.re, "im": c.im })
}

pub fn state(config: &RunConfig, probe: &str) -> Result<()> {
    let v = parse_numbers(probe, "probe")?;
    let (point, t) = match (config.geometry, v.as_slice()) {
        (TrapKind::Spherical, [r, th, ph, t]) => (Point::spherical(*r, *th, *ph), *t),
        (TrapKind::Circular, [r, ph, t]) => (Point::polar(*r, *ph), *t),
        (TrapKind::Cylindrical, [r, ph, z, t]) => (Point::cylindrical(*r, *ph, *z), *t),
        _ => {
            return Err(CliError::Config(format!(
                "probe for a {} trap is {}, got {probe:?}",
                config.geometry.name(),
                match config.geometry {
                    TrapKind::Spherical => "r,theta,phi,t",
                    TrapKind::Circular => "rho,phi,t",
                    TrapKind::Cylindrical => "rho,phi,z,t",
                }
            )))
        }
    };
    let s = initial_state(config)?;
    let (psi, g) = s.evaluate_with_gradient(&point, t)?;
    let report = json!({
        "settings": config.to_json(),
        "t": t,
        "point": { "radius": point.radius, "theta": point.theta, "phi": point.phi, "z": point.z },
        "psi": complex(psi),
        "density": psi.norm_sqr(),
        "gradient": {
            "radial": complex(g.radial),
            "polar": complex(g.polar),
            "azimuthal": complex(g.azimuthal),
            "axial": complex(g.axial),
        },
        "wall": s.geometry().wall(t),
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("JSON values always serialise"));
    Ok(())
}

pub fn expand(geometry: &str, mode: &str, alpha: &str, small_radius_ratio: f64, n_max: usize, out: Option<&Path>) -> Result<()> {
    let kind = parse_kind(geometry)?;
    let mode = mode_from_labels(kind, &parse_labels(mode)?)?;
    let spec: AlphaSpec = alpha.parse()?;
    let reference = bohmtrap::Mode::new(mode)?.alpha_ref();
    let alpha = spec.resolve(reference);
    if !(small_radius_ratio > 0.0 && small_radius_ratio <= 1.0) {
        return Err(CliError::Config(format!("--as must lie in (0, 1], got {small_radius_ratio}")));
    }
    let height = (kind == TrapKind::Cylindrical).then_some(1.0);
    let trap = TrapGeometry::from_alpha(kind, 1.0, alpha, height)?;
    let options = ExpansionOptions { small_radius: (small_radius_ratio < 1.0).then_some(small_radius_ratio), n_max, ..Default::default() };
    let row = overlap_row(&trap, mode, options)?;
    let settings = json!({
        "geometry": kind.name(), "mode": mode.to_string(), "alpha": spec.to_string(), "alpha_value": alpha,
        "small_radius_ratio": small_radius_ratio, "n_max": n_max,
    });
    let mut csv = CsvOutput::create(out, &header("expand", settings), &["nprime", "re", "im", "abs2"])?;
    for (i, c) in row.values.iter().enumerate() {
        csv.row(&[Field::Int(i as i64 + 1), Field::Num(c.re), Field::Num(c.im), Field::Num(c.norm_sqr())])?;
    }
    csv.comment(&format!("norm_defect = {:?}", row.norm_defect));
    csv.finish()
}

/// Parses a direction for the given trap.
pub fn parse_direction(kind: TrapKind, text: &str) -> Result<Direction> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| CliError::Config(format!("cannot read angle {s:?} in {text:?}")));
    let dir = match (kind, parts.as_slice()) {
        (_, ["z"]) => Direction::z(),
        (TrapKind::Spherical, ["r", th, ph]) => Direction::radial(num(th)?, num(ph)?)?,
        (TrapKind::Spherical, ["theta", th, ph]) => Direction::polar(num(th)?, num(ph)?)?,
        (TrapKind::Spherical, ["phi", th, ph]) => Direction::azimuthal(num(th)?, num(ph)?)?,
        (TrapKind::Circular | TrapKind::Cylindrical, ["rho", ph]) => Direction::planar_radial(num(ph)?)?,
        (TrapKind::Circular | TrapKind::Cylindrical, ["phi", ph]) => Direction::planar_azimuthal(num(ph)?)?,
        _ => {
            return Err(CliError::Config(format!(
                "cannot read direction {text:?} for a {} trap (expected {})",
                kind.name(),
                if kind == TrapKind::Spherical { "r|theta|phi,THETA0,PHI0 or z" } else { "rho|phi,PHI0 or z" }
            )))
        }
    };
    Ok(dir)
}

/// Parses `t0:t1:steps` into `steps + 1` equally spaced times.
pub fn parse_times(text: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Config(format!("cannot read times {text:?} (expected t0:t1:steps)"));
    let parts: Vec<&str> = text.split(':').collect();
    let [t0, t1, steps] = parts.as_slice() else { return Err(bad()) };
    let (t0, t1): (f64, f64) = (t0.trim().parse().map_err(|_| bad())?, t1.trim().parse().map_err(|_| bad())?);
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    if !(t0 >= 0.0 && t1 >= t0) {
        return Err(CliError::Config(format!("need 0 ≤ t0 ≤ t1, got {t0}:{t1}")));
    }
    if steps == 0 {
        return Ok(vec![t0]);
    }
    Ok((0..=steps).map(|i| if i == steps { t1 } else { t0 + (t1 - t0) * i as f64 / steps as f64 }).collect())
}

pub fn force_samples(state: &WaveState, direction: Direction, t: f64, method: MethodChoice) -> Result<Vec<ForceSample>> {
    let mut out = Vec::new();
    if matches!(method, MethodChoice::All | MethodChoice::ClosedForm) {
        out.push(force_closed_form(state, direction, t)?);
    }
    if matches!(method, MethodChoice::All | MethodChoice::Surface) {
        out.push(force_surface_quadrature(state, direction, t)?);
    }
    if matches!(method, MethodChoice::All | MethodChoice::Potential) {
        out.push(force_from_quantum_potential(state, direction, t, PotentialOptions::default())?);
    }
    Ok(out)
}

pub fn force(config: &RunConfig, direction: &str, times: &str, method: MethodChoice, out: Option<&Path>) -> Result<()> {
    let dir = parse_direction(config.geometry, direction)?;
    let times = parse_times(times)?;
    let s = initial_state(config)?;
    let settings = json!({ "config": config.to_json(), "direction": direction, "method": format!("{method:?}") });
    let mut csv = CsvOutput::create(out, &header("force", settings), &["t", "method", "value"])?;
    for t in times {
        for f in force_samples(&s, dir, t, method)? {
            csv.row(&[Field::Num(t), Field::Text(f.method.name()), Field::Num(f.value)])?;
        }
    }
    csv.finish()
}

pub struct TrajStart {
    pub r0: f64,
    pub theta0: f64,
    pub phi0: f64,
    pub z0: Option<f64>,
}

fn start_point(config: &RunConfig, start: &TrajStart) -> Point {
    match config.geometry {
        TrapKind::Spherical => Point::spherical(start.r0, start.theta0, start.phi0),
        TrapKind::Circular => Point::polar(start.r0, start.phi0),
        TrapKind::Cylindrical => Point::cylindrical(start.r0, start.phi0, start.z0.unwrap_or(0.5 * config.height.unwrap_or(1.0))),
    }
}

fn trajectory_columns(kind: TrapKind, leading: &[&'static str]) -> Vec<&'static str> {
    let mut cols = leading.to_vec();
    cols.extend(["t", "r", "theta", "phi", "L"]);
    if kind == TrapKind::Cylindrical {
        cols.push("z");
    }
    cols
}

fn write_path(csv: &mut CsvOutput, traj: &Trajectory, lead: Option<i64>) -> Result<()> {
    for (j, (t, p)) in traj.times.iter().zip(traj.path(0)).enumerate() {
        let mut row: Vec<Field> = lead.map(Field::Int).into_iter().collect();
        row.extend([Field::Num(*t), Field::Num(p.radius), Field::Num(p.theta), Field::Num(p.phi), Field::Num(traj.wall[j])]);
        if traj.kind == TrapKind::Cylindrical {
            row.push(Field::Num(p.z));
        }
        csv.row(&row)?;
    }
    Ok(())
}

pub fn traj(config: &RunConfig, start: TrajStart, tend: f64, samples: usize, out: Option<&Path>) -> Result<()> {
    let s = initial_state(config)?;
    let options = TrajectoryOptions { samples, ..config.trajectory_options() };
    let traj = integrate_trajectory(&s, start_point(config, &start), tend, &options)?;
    let settings = json!({
        "config": config.to_json(), "r0": start.r0, "theta0": start.theta0, "phi0": start.phi0, "z0": start.z0,
        "tend": tend, "samples": samples,
    });
    let mut csv = CsvOutput::create(out, &header("traj", settings), &trajectory_columns(config.geometry, &[]))?;
    write_path(&mut csv, &traj, None)?;
    csv.finish()
}

pub fn ensemble(config: &RunConfig, count: usize, seed: Option<u64>, tend: f64, samples: usize, out: Option<&Path>) -> Result<()> {
    let s = initial_state(config)?;
    let seed = seed.unwrap_or(config.seed);
    let options = TrajectoryOptions { samples, ..config.trajectory_options() };
    let runs = ensemble_run(&s, count, seed, tend, &options)?;
    let settings = json!({ "config": config.to_json(), "count": count, "seed": seed, "tend": tend, "samples": samples });
    let mut csv = CsvOutput::create(out, &header("ensemble", settings), &trajectory_columns(config.geometry, &["traj"]))?;
    let mut first_failure = None;
    for (i, run) in runs.into_iter().enumerate() {
        match run {
            Ok(traj) => write_path(&mut csv, &traj, Some(i as i64))?,
            Err(e) => {
                csv.comment(&format!("trajectory {i} failed: {e}"));
                first_failure.get_or_insert(e);
            }
        }
    }
    csv.finish()?;
    match first_failure {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

/// `α` for two-body runs, where multiples refer to `α₀₁`.
pub fn two_body_alpha(text: &str) -> Result<(AlphaSpec, f64)> {
    let spec: AlphaSpec = text.parse()?;
    Ok((spec, spec.resolve(ALPHA_01)))
}

pub fn pair_state(stats: Statistics, alpha: f64, n_max: usize) -> Result<TwoBodyState> {
    let trap = TrapGeometry::from_alpha(TrapKind::Spherical, 1.0, alpha, None)?;
    Ok(TwoBodyState::ground_and_first(stats, &trap, ExpansionOptions { n_max, ..Default::default() })?)
}

pub fn twobody(stats: &str, alpha: &str, (r10, r20): (f64, f64), tend: f64, n_max: usize, samples: usize, out: Option<&Path>) -> Result<()> {
    let stats: Statistics = stats.parse()?;
    let (spec, value) = two_body_alpha(alpha)?;
    let state = pair_state(stats, value, n_max)?;
    let traj = integrate_pair(&state, r10, r20, tend, &TrajectoryOptions { samples, ..Default::default() })?;
    let settings = json!({
        "stats": stats.name(), "alpha": spec.to_string(), "alpha_value": value, "r10": r10, "r20": r20,
        "tend": tend, "n_max": n_max, "samples": samples,
    });
    let mut csv = CsvOutput::create(out, &header("twobody", settings), &["t", "r1", "r2", "sep"])?;
    for (j, t) in traj.times.iter().enumerate() {
        let (r1, r2) = (traj.particles[0][j].radius, traj.particles[1][j].radius);
        csv.row(&[Field::Num(*t), Field::Num(r1), Field::Num(r2), Field::Num(r2 - r1)])?;
    }
    csv.finish()
}

pub fn moments(alpha: &str, tend: f64, steps: usize, n_max: usize, out: Option<&Path>) -> Result<()> {
    let (spec, value) = two_body_alpha(alpha)?;
    let base = pair_state(Statistics::MaxwellBoltzmann, value, n_max)?;
    base.geometry().check_horizon(tend)?;
    let settings = json!({ "alpha": spec.to_string(), "alpha_value": value, "tend": tend, "steps": steps, "n_max": n_max });
    let mut csv = CsvOutput::create(out, &header("moments", settings), &["stats", "t", "mean", "rms"])?;
    for stats in Statistics::ALL {
        let s = base.with_statistics(stats);
        for t in parse_times(&format!("0:{tend}:{steps}"))? {
            let (mean, rms) = s.separation_moments(t)?;
            csv.row(&[Field::Text(stats.name()), Field::Num(t), Field::Num(mean), Field::Num(rms)])?;
        }
    }
    csv.finish()
}

pub struct OracleGrid {
    pub dy: f64,
    pub dt: f64,
    pub slices: usize,
    pub points: usize,
}

pub fn oracle(config: &RunConfig, grid: OracleGrid, tend: f64, out: Option<&Path>) -> Result<()> {
    let sector = match config.mode {
        ModeIndex::Circular { m, .. } => Sector::Circular { m },
        ModeIndex::Spherical { l, m, .. } => Sector::Spherical { l, m },
        ModeIndex::Cylindrical { .. } => return Err(CliError::Config("the grid propagator covers disc and sphere sectors only".into())),
    };
    if config.small_radius_ratio < 1.0 {
        return Err(CliError::Config("the grid propagator starts from an eigenstate of the full box (small_radius_ratio = 1)".into()));
    }
    let trap = config.trap()?;
    let order = config.mode.radial_order();
    let n = config.mode.n();
    let a = config.radius;
    let profile = |r: f64| Complex64::new(initial_radial_profile(config.geometry, order, n, a, r).unwrap_or(0.0), 0.0);
    let w0 = initial_field(&trap, grid.dy, profile)?;
    let tau_end = a * tend / trap.wall(tend);
    let steps = (tau_end / grid.dt).ceil().max(1.0) as usize;
    let store_every = (steps / grid.slices.max(1)).max(1);
    let sol = propagate_scaled(&w0, &trap, sector, &GridOptions { dy: grid.dy, dt: grid.dt, t_end: tend, store_every })?;
    let settings = json!({
        "config": config.to_json(), "dy": grid.dy, "dt": grid.dt, "tend": tend, "slices": grid.slices,
        "points": grid.points, "norm_drift": sol.norm_drift,
    });
    let mut csv = CsvOutput::create(out, &header("oracle", settings), &["t", "y", "r", "abs"])?;
    let stride = (sol.y.len() / grid.points.max(1)).max(1);
    for &t in &sol.times {
        let l = trap.wall(t);
        for &y in sol.y.iter().step_by(stride) {
            let r = y * l;
            csv.row(&[Field::Num(t), Field::Num(y), Field::Num(r), Field::Num(sol.radial(r, t)?.norm())])?;
        }
    }
    csv.finish()
}
