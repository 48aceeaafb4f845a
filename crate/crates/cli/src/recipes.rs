//! Figure-reproduction recipes. Each writes CSV series into
//! `<out_dir>/<name>/` together with a `manifest.json` that lists the files
//! and every convention chosen where the source description is silent.

use std::path::{Path, PathBuf};

use bohmtrap::bohm::integrate_trajectory;
use bohmtrap::expansion::{expand_initial_eigenstate, ExpansionOptions};
use bohmtrap::twobody::{boson_fermion_excess, integrate_pair};
use bohmtrap::{Mode, ModeIndex, Point, Statistics, TrajectoryOptions, TrapGeometry, TrapKind, TwoBodyState};
use serde_json::{json, Value};

use crate::commands::{pair_state, ALPHA_01};
use crate::error::{CliError, Result};
use crate::output::{header, write_json, CsvOutput, Field};

pub const NAMES: &[&str] = &["fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d", "fig3", "fig4", "fig5"];

/// Wall-speed factors of the four panels a–d, in units of the mode reference.
pub const PANEL_FACTORS: [f64; 4] = [-0.5, -2.0, 0.5, 2.0];

/// Two-body runs use `α = ±0.5 α₀₁`.
pub const PAIR_FACTORS: [f64; 2] = [-0.5, 0.5];

/// Fraction of `a/|u|` covered by every moving-wall run.
pub const HORIZON_FRACTION: f64 = 0.8;

const SAMPLES: usize = 200;

/// Expands group names and runs each recipe, returning the manifest paths.
pub fn run_recipe(name: &str, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let names: Vec<&str> = match name {
        "all" => NAMES.to_vec(),
        "fig1" => NAMES[0..4].to_vec(),
        "fig2" => NAMES[4..8].to_vec(),
        n if NAMES.contains(&n) => vec![n],
        other => {
            return Err(CliError::Config(format!("unknown recipe {other:?}; expected one of {}, fig1, fig2 or all", NAMES.join(", "))))
        }
    };
    names.into_iter().map(|n| run_one(n, out_dir)).collect()
}

fn run_one(name: &str, out_dir: &Path) -> Result<PathBuf> {
    let dir = out_dir.join(name);
    std::fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
    let mut manifest = match name {
        "fig3" => initial_densities(&dir)?,
        "fig4" => pair_trajectories(&dir)?,
        "fig5" => separations(&dir)?,
        _ => {
            let panel = (name.as_bytes()[4] - b'a') as usize;
            if name.starts_with("fig1") {
                trajectory_fan(&dir, TrapKind::Circular, PANEL_FACTORS[panel])?
            } else {
                trajectory_fan(&dir, TrapKind::Spherical, PANEL_FACTORS[panel])?
            }
        }
    };
    manifest["recipe"] = json!(name);
    manifest["units"] = json!(crate::output::UNITS);
    let path = dir.join("manifest.json");
    write_json(&path, &manifest)?;
    Ok(path)
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default()
}

fn evenly(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).collect()
}

fn wall_curve(dir: &Path, trap: &TrapGeometry, t_end: f64, settings: &Value) -> Result<PathBuf> {
    let path = dir.join("wall.csv");
    let mut csv = CsvOutput::create(Some(&path), &header("recipe", settings.clone()), &["t", "L"])?;
    for i in 0..=SAMPLES {
        let t = t_end * i as f64 / SAMPLES as f64;
        csv.row(&[Field::Num(t), Field::Num(trap.wall(t))])?;
    }
    csv.finish()?;
    Ok(path)
}

/// Single-particle trajectory fans: `u₁₁` in the disc or `u₀₁₀` in the
/// sphere, started on the x axis.
fn trajectory_fan(dir: &Path, kind: TrapKind, factor: f64) -> Result<Value> {
    let (mode, radii) = match kind {
        TrapKind::Circular => (ModeIndex::Circular { m: 1, n: 1 }, evenly(0.2, 0.8, 0.1)),
        _ => (ModeIndex::Spherical { l: 0, n: 1, m: 0 }, evenly(0.1, 0.9, 0.1)),
    };
    let alpha_ref = Mode::new(mode)?.alpha_ref();
    let trap = TrapGeometry::from_alpha(kind, 1.0, factor * alpha_ref, None)?;
    let t_end = HORIZON_FRACTION / trap.wall_speed().abs();
    let expansion = ExpansionOptions::default();
    let state = expand_initial_eigenstate(&trap, mode, expansion)?;
    let options = TrajectoryOptions { samples: SAMPLES, ..Default::default() };
    let settings = json!({
        "geometry": kind.name(), "mode": mode.to_string(), "alpha_factor": factor, "alpha_ref": alpha_ref,
        "alpha": trap.alpha(), "wall_speed": trap.wall_speed(), "t_end": t_end, "n_max": expansion.n_max,
        "rtol": options.rtol, "atol": options.atol, "initial_radii": radii,
    });
    let path = dir.join("trajectories.csv");
    let columns = ["traj", "t", "r", "theta", "phi", "x", "y", "L"];
    let mut csv = CsvOutput::create(Some(&path), &header("recipe", settings.clone()), &columns)?;
    for (i, &r0) in radii.iter().enumerate() {
        let start = match kind {
            TrapKind::Circular => Point::polar(r0, 0.0),
            _ => Point::spherical(r0, std::f64::consts::FRAC_PI_2, 0.0),
        };
        let traj = integrate_trajectory(&state, start, t_end, &options)?;
        for (j, p) in traj.path(0).iter().enumerate() {
            let [x, y, _] = p.to_cartesian(kind);
            csv.row(&[
                Field::Int(i as i64),
                Field::Num(traj.times[j]),
                Field::Num(p.radius),
                Field::Num(p.theta),
                Field::Num(p.phi),
                Field::Num(x),
                Field::Num(y),
                Field::Num(traj.wall[j]),
            ])?;
        }
    }
    csv.finish()?;
    let wall = wall_curve(dir, &trap, t_end, &settings)?;
    Ok(json!({
        "files": [file_name(&path), file_name(&wall)],
        "settings": settings,
        "conventions": {
            "initial_radii": "evenly spaced starting radii in units of a, listed in settings.initial_radii",
            "initial_angles": "every trajectory starts on the positive x axis (phi = 0, theta = pi/2)",
            "duration": "each run covers t in [0, 0.8 a/|u|], short of the collapse time a/|u| for contraction",
            "truncation": "initial eigenstate expanded over n_max moving-wall modes",
        },
    }))
}

/// `ρ₁(r, 0)` and `ρ(r₁, r₂, 0)` for the three statistics.
fn initial_densities(dir: &Path) -> Result<Value> {
    let trap = TrapGeometry::spherical(1.0, 0.0)?;
    let base = TwoBodyState::ground_and_first(Statistics::MaxwellBoltzmann, &trap, ExpansionOptions::default())?;
    let settings = json!({ "geometry": "spherical", "t": 0.0, "one_body_points": 201, "two_body_points": 51 });
    let rho1 = dir.join("rho1.csv");
    let mut csv = CsvOutput::create(Some(&rho1), &header("recipe", settings.clone()), &["r", "mb", "fd", "be"])?;
    for i in 0..=200 {
        let r = i as f64 / 200.0;
        let mut row = vec![Field::Num(r)];
        for stats in Statistics::ALL {
            row.push(Field::Num(base.with_statistics(stats).one_particle_density(r, 0.0)?));
        }
        csv.row(&row)?;
    }
    csv.finish()?;
    let rho2 = dir.join("rho2.csv");
    let mut csv = CsvOutput::create(Some(&rho2), &header("recipe", settings.clone()), &["stats", "r1", "r2", "density"])?;
    for stats in Statistics::ALL {
        let s = base.with_statistics(stats);
        for i in 0..=50 {
            for j in 0..=50 {
                let (r1, r2) = (i as f64 / 50.0, j as f64 / 50.0);
                csv.row(&[Field::Text(stats.name()), Field::Num(r1), Field::Num(r2), Field::Num(s.evaluate(r1, r2, 0.0)?.norm_sqr())])?;
            }
        }
    }
    csv.finish()?;
    Ok(json!({
        "files": [file_name(&rho1), file_name(&rho2)],
        "settings": settings,
        "conventions": {
            "wall": "initial distributions do not depend on the wall speed, so a static box is used",
            "rho1": "normalised so that the integral of rho1 r^2 dr dOmega is 1",
            "rho2": "|Psi(r1, r2)|^2 including both Y00 factors",
        },
    }))
}

fn pair_duration(factor: f64) -> f64 {
    HORIZON_FRACTION / (2.0 * factor * ALPHA_01).abs()
}

/// `r₁(0) ∈ {0.1, …, 0.5}` with `r₂(0) = r₁(0) + 0.4`.
fn pair_starts() -> Vec<(f64, f64)> {
    evenly(0.1, 0.5, 0.1).into_iter().map(|r1| (r1, ((r1 + 0.4) * 1e12).round() / 1e12)).collect()
}

/// Two-particle radial trajectories for each statistics and wall speed.
fn pair_trajectories(dir: &Path) -> Result<Value> {
    let starts = pair_starts();
    let options = TrajectoryOptions { samples: SAMPLES, ..Default::default() };
    let settings = json!({
        "geometry": "spherical", "alpha_factors": PAIR_FACTORS, "alpha_ref": ALPHA_01,
        "starts": starts, "n_max": ExpansionOptions::default().n_max,
    });
    let path = dir.join("pairs.csv");
    let columns = ["stats", "alpha_factor", "pair", "t", "r1", "r2", "L"];
    let mut csv = CsvOutput::create(Some(&path), &header("recipe", settings.clone()), &columns)?;
    for factor in PAIR_FACTORS {
        let t_end = pair_duration(factor);
        let base = pair_state(Statistics::MaxwellBoltzmann, factor * ALPHA_01, ExpansionOptions::default().n_max)?;
        for stats in Statistics::ALL {
            let s = base.with_statistics(stats);
            for (k, &(r1, r2)) in starts.iter().enumerate() {
                let traj = integrate_pair(&s, r1, r2, t_end, &options)?;
                for (j, t) in traj.times.iter().enumerate() {
                    csv.row(&[
                        Field::Text(stats.name()),
                        Field::Num(factor),
                        Field::Int(k as i64),
                        Field::Num(*t),
                        Field::Num(traj.particles[0][j].radius),
                        Field::Num(traj.particles[1][j].radius),
                        Field::Num(traj.wall[j]),
                    ])?;
                }
            }
        }
    }
    csv.finish()?;
    Ok(json!({
        "files": [file_name(&path)],
        "settings": settings,
        "conventions": {
            "starts": "r1(0) evenly spaced in [0.1, 0.5] a with r2(0) = r1(0) + 0.4 a",
            "duration": "each run covers t in [0, 0.8 a/|u|]",
        },
    }))
}

fn excess(h: &bohmtrap::twobody::SeparationExcess) -> f64 {
    h.boson_separation - h.fermion_separation
}

/// Separation of one chosen pair, the rms separation, and every sampled
/// instant where bosons are farther apart than fermions.
fn separations(dir: &Path) -> Result<Value> {
    let starts = pair_starts();
    let n_max = ExpansionOptions::default().n_max;
    let options = TrajectoryOptions { samples: SAMPLES, ..Default::default() };
    let settings = json!({ "geometry": "spherical", "alpha_factors": PAIR_FACTORS, "scan_starts": starts, "n_max": n_max });

    let excess_path = dir.join("excess.csv");
    let columns = ["alpha_factor", "r1", "r2", "t", "boson_separation", "fermion_separation"];
    let mut excess_csv = CsvOutput::create(Some(&excess_path), &header("recipe", settings.clone()), &columns)?;
    let mut chosen = Vec::new();
    let mut found = Vec::new();
    for factor in PAIR_FACTORS {
        let trap = TrapGeometry::from_alpha(TrapKind::Spherical, 1.0, factor * ALPHA_01, None)?;
        let hits = boson_fermion_excess(&trap, &starts, pair_duration(factor), ExpansionOptions::default(), &options)?;
        for h in &hits {
            excess_csv.row(&[
                Field::Num(factor),
                Field::Num(h.r1),
                Field::Num(h.r2),
                Field::Num(h.t),
                Field::Num(h.boson_separation),
                Field::Num(h.fermion_separation),
            ])?;
        }
        // the start with the largest excess, else the second scanned start
        let largest = hits.iter().max_by(|a, b| excess(a).total_cmp(&excess(b)));
        let pick = largest.map(|h| (h.r1, h.r2)).unwrap_or(starts[1]);
        chosen.push(json!({ "alpha_factor": factor, "r1": pick.0, "r2": pick.1 }));
        found.push(json!({ "alpha_factor": factor, "instants": hits.len(), "largest": largest.map(|h| json!({
            "r1": h.r1, "r2": h.r2, "t": h.t, "boson_separation": h.boson_separation, "fermion_separation": h.fermion_separation,
        })) }));
    }
    excess_csv.finish()?;

    let sep_path = dir.join("separation.csv");
    let columns = ["stats", "alpha_factor", "t", "r1", "r2", "sep"];
    let mut sep_csv = CsvOutput::create(Some(&sep_path), &header("recipe", json!({ "chosen_starts": chosen })), &columns)?;
    let rms_path = dir.join("rms.csv");
    let mut rms_csv = CsvOutput::create(Some(&rms_path), &header("recipe", settings.clone()), &["stats", "alpha_factor", "t", "mean", "rms"])?;
    for (factor, pick) in PAIR_FACTORS.iter().zip(&chosen) {
        let t_end = pair_duration(*factor);
        let base = pair_state(Statistics::MaxwellBoltzmann, factor * ALPHA_01, n_max)?;
        let (r1, r2) = (pick["r1"].as_f64().unwrap_or(0.2), pick["r2"].as_f64().unwrap_or(0.6));
        for stats in Statistics::ALL {
            let s = base.with_statistics(stats);
            let traj = integrate_pair(&s, r1, r2, t_end, &options)?;
            for (j, t) in traj.times.iter().enumerate() {
                let (a, b) = (traj.particles[0][j].radius, traj.particles[1][j].radius);
                sep_csv.row(&[Field::Text(stats.name()), Field::Num(*factor), Field::Num(*t), Field::Num(a), Field::Num(b), Field::Num(b - a)])?;
            }
            for i in 0..=40 {
                let t = if i == 40 { t_end } else { t_end * i as f64 / 40.0 };
                let (mean, rms) = s.separation_moments(t)?;
                rms_csv.row(&[Field::Text(stats.name()), Field::Num(*factor), Field::Num(t), Field::Num(mean), Field::Num(rms)])?;
            }
        }
    }
    sep_csv.finish()?;
    rms_csv.finish()?;
    Ok(json!({
        "files": [file_name(&sep_path), file_name(&rms_path), file_name(&excess_path)],
        "settings": settings,
        "chosen_starts": chosen,
        "boson_fermion_excess": found,
        "conventions": {
            "separation_start": "the scanned start (r1(0) in [0.1, 0.5] a, r2(0) = r1(0) + 0.4 a) with the largest instantaneous excess of boson over fermion separation; the second scanned start if there is none",
            "rms_times": "41 equally spaced instants over [0, 0.8 a/|u|]",
        },
    }))
}
