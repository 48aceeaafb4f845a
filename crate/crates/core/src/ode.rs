//! Dormand–Prince 5(4) with step-size control and continuous (dense)
//! output, for small fixed-size systems.
//!
//! A right-hand side may refuse a state (e.g. a point outside the box or
//! too close to a node of ψ); the step is then rejected and retried with a
//! quarter of the step size.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Tolerances and limits of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; `None` picks `10⁻³·|t_end − t₀|`.
    pub initial_step: Option<f64>,
    /// Smallest step before the integration is declared stalled, relative
    /// to `|t_end − t₀|`.
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, initial_step: None, min_step: 1e-14, max_steps: 200_000 }
    }
}

/// Where the solution is recorded.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    /// After every accepted step.
    Steps,
    /// At the given increasing times, by dense output.
    Times(Vec<f64>),
}

/// Recorded solution and step statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<const N: usize> {
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    pub accepted: usize,
    pub rejected: usize,
    /// Sum over accepted steps of the max-norm local error estimate.
    pub error_estimate: f64,
}

/// Failure to reach `t_end`: the step size collapsed or the step budget ran
/// out. Carries everything recorded so far.
#[derive(Debug, Clone)]
pub struct Stalled<const N: usize> {
    pub t: f64,
    pub step: f64,
    pub partial: Solution<N>,
    /// Last error raised by the right-hand side, if any.
    pub cause: Option<Error>,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// dense-output weights
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

struct Dense<const N: usize> {
    t0: f64,
    h: f64,
    r: [[f64; N]; 5],
}

impl<const N: usize> Dense<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let mut y = [0.0; N];
        for i in 0..N {
            let r = &self.r;
            y[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        }
        y
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end > t0`.
// the partial solution travels back by value; it is built once per run
#[allow(clippy::result_large_err)]
pub fn integrate<const N: usize>(
    mut f: impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    options: &OdeOptions,
    output: Output,
) -> core::result::Result<Solution<N>, Stalled<N>> {
    let span = t_end - t0;
    let mut sol = Solution { times: Vec::new(), states: Vec::new(), accepted: 0, rejected: 0, error_estimate: 0.0 };
    let (samples, mut next_sample) = match output {
        Output::Steps => (None, 0),
        Output::Times(ts) => (Some(ts), 0),
    };
    let record_sample = |ts: &Vec<f64>, idx: &mut usize, upto: f64, dense: Option<&Dense<N>>, sol: &mut Solution<N>, y: &[f64; N]| {
        while *idx < ts.len() && ts[*idx] <= upto {
            let v = match dense {
                Some(d) if ts[*idx] < upto => d.eval(ts[*idx]),
                _ => *y,
            };
            sol.times.push(ts[*idx]);
            sol.states.push(v);
            *idx += 1;
        }
    };

    let stall = |t: f64, h: f64, sol: Solution<N>, cause: Option<Error>| Stalled { t, step: h, partial: sol, cause };
    let mut k1 = match f(t0, &y0) {
        Ok(k) => k,
        Err(e) => return Err(stall(t0, 0.0, sol, Some(e))),
    };
    match &samples {
        None => {
            sol.times.push(t0);
            sol.states.push(y0);
        }
        Some(ts) => record_sample(ts, &mut next_sample, t0, None, &mut sol, &y0),
    }
    if !(span > 0.0) {
        return Ok(sol);
    }

    let mut t = t0;
    let mut y = y0;
    let mut h = options.initial_step.unwrap_or(1e-3 * span).min(span);
    let h_min = options.min_step * span;
    let mut last_cause = None;
    let mut steps = 0usize;
    while t < t_end {
        if steps >= options.max_steps || h < h_min {
            return Err(stall(t, h, sol, last_cause));
        }
        steps += 1;
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let mut k = [[0.0; N]; 7];
        k[0] = k1;
        let mut failed = None;
        for s in 1..7 {
            let mut ys = y;
            for (i, yi) in ys.iter_mut().enumerate() {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                *yi += h * acc;
            }
            match f(t + C[s] * h, &ys) {
                Ok(v) => k[s] = v,
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            last_cause = Some(e);
            sol.rejected += 1;
            h *= 0.25;
            continue;
        }
        let mut y1 = y;
        for (i, yi) in y1.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..6 {
                acc += A[6][j] * k[j][i];
            }
            *yi += h * acc;
        }
        let mut err2 = 0.0;
        let mut err_max = 0.0f64;
        for i in 0..N {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * k[j][i];
            }
            e *= h;
            let sc = options.atol + options.rtol * y[i].abs().max(y1[i].abs());
            err2 += (e / sc) * (e / sc);
            err_max = err_max.max(e.abs());
        }
        let err = sqrt(err2 / N as f64);
        let factor = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
        if err > 1.0 {
            sol.rejected += 1;
            h *= factor.min(1.0);
            continue;
        }
        let t1 = if last { t_end } else { t + h };
        if samples.is_some() {
            let mut r = [[0.0; N]; 5];
            for i in 0..N {
                let dy = y1[i] - y[i];
                let bspl = h * k[0][i] - dy;
                r[0][i] = y[i];
                r[1][i] = dy;
                r[2][i] = bspl;
                r[3][i] = dy - h * k[6][i] - bspl;
                let mut acc = 0.0;
                for j in 0..7 {
                    acc += D[j] * k[j][i];
                }
                r[4][i] = h * acc;
            }
            let dense = Dense { t0: t, h, r };
            if let Some(ts) = &samples {
                record_sample(ts, &mut next_sample, t1, Some(&dense), &mut sol, &y1);
            }
        } else {
            sol.times.push(t1);
            sol.states.push(y1);
        }
        sol.accepted += 1;
        sol.error_estimate += err_max;
        t = t1;
        y = y1;
        k1 = k[6];
        h *= factor;
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_matches_closed_form() {
        let opts = OdeOptions::default();
        let sol = integrate(|_, y: &[f64; 1]| Ok([-y[0]]), 0.0, [1.0], 2.0, &opts, Output::Steps).unwrap();
        let end = sol.states.last().unwrap()[0];
        assert!((end - (-2.0f64).exp()).abs() < 1e-8);
        assert_eq!(*sol.times.last().unwrap(), 2.0);
    }

    #[test]
    fn dense_output_hits_requested_times() {
        let opts = OdeOptions::default();
        let ts: Vec<f64> = (0..=20).map(|i| i as f64 * 0.3).collect();
        let sol = integrate(
            |_, y: &[f64; 2]| Ok([y[1], -y[0]]),
            0.0,
            [0.0, 1.0],
            6.0,
            &opts,
            Output::Times(ts.clone()),
        )
        .unwrap();
        assert_eq!(sol.times, ts);
        for (t, y) in sol.times.iter().zip(&sol.states) {
            assert!((y[0] - t.sin()).abs() < 1e-7, "t={t}: {} vs {}", y[0], t.sin());
        }
    }

    #[test]
    fn refused_states_shrink_the_step() {
        // the right-hand side refuses y > 1.5; the exact solution stays below
        let opts = OdeOptions { initial_step: Some(1.0), ..OdeOptions::default() };
        let sol = integrate(
            |_, y: &[f64; 1]| {
                if y[0] > 1.5 {
                    Err(Error::InvalidParameter("too far".into()))
                } else {
                    Ok([0.5 * (1.5 - y[0])])
                }
            },
            0.0,
            [0.0],
            5.0,
            &opts,
            Output::Steps,
        )
        .unwrap();
        assert!(sol.states.iter().all(|y| y[0] <= 1.5));
    }

    #[test]
    fn collapse_reports_partial_solution() {
        let opts = OdeOptions::default();
        let res = integrate(
            |t, _: &[f64; 1]| if t > 0.5 { Err(Error::InvalidParameter("wall".into())) } else { Ok([1.0]) },
            0.0,
            [0.0],
            1.0,
            &opts,
            Output::Steps,
        );
        let stalled = res.unwrap_err();
        assert!(stalled.t <= 0.5 + 1e-9);
        assert!(!stalled.partial.times.is_empty());
        assert!(stalled.cause.is_some());
    }
}
