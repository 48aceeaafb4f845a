use crate::error::{Error, Result};
use crate::math::{cos, sin, sqrt};

/// Largest spherical Bessel order accepted by the public API.
pub const MAX_SPHERICAL_ORDER: u32 = 30;

/// `j_l(x)` for `0 ≤ l ≤ 30` and `x ≥ 0`.
pub fn spherical_bessel_j(l: u32, x: f64) -> Result<f64> {
    check_args(l, x)?;
    Ok(sph_jn(l, x))
}

/// `j'_l(x)`.
pub fn spherical_bessel_j_derivative(l: u32, x: f64) -> Result<f64> {
    check_args(l, x)?;
    Ok(sph_jn_with_derivative(l, x).1)
}

fn check_args(l: u32, x: f64) -> Result<()> {
    if l > MAX_SPHERICAL_ORDER {
        return Err(Error::UnsupportedOrder { order: l, cap: MAX_SPHERICAL_ORDER });
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("spherical Bessel argument must be finite and non-negative, got {x}")));
    }
    Ok(())
}

pub(crate) fn sph_jn(l: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    let lf = l as f64;
    if x < 0.5 || 0.25 * x * x < lf + 1.5 {
        return series(l, x);
    }
    match l {
        0 => sin(x) / x,
        1 => j1_closed(x),
        _ if x >= lf => upward(l, x),
        _ => miller(l, x),
    }
}

pub(crate) fn sph_jn_with_derivative(l: u32, x: f64) -> (f64, f64) {
    let j = sph_jn(l, x);
    let d = if x == 0.0 {
        if l == 1 {
            1.0 / 3.0
        } else {
            0.0
        }
    } else {
        (l as f64 / x) * j - sph_jn(l + 1, x)
    };
    (j, d)
}

fn j1_closed(x: f64) -> f64 {
    (sin(x) / x - cos(x)) / x
}

fn series(l: u32, x: f64) -> f64 {
    // x^l / (2l+1)!!
    let mut lead = 1.0;
    for k in 1..=l {
        lead *= x / (2 * k + 1) as f64;
    }
    let q = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1u32;
    loop {
        term *= q / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 200 {
            break;
        }
        k += 1;
    }
    lead * sum
}

fn upward(l: u32, x: f64) -> f64 {
    let mut prev = sin(x) / x;
    let mut cur = j1_closed(x);
    for k in 1..l {
        let next = (2 * k + 1) as f64 / x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Backward recurrence, normalised against whichever of `j_0`, `j_1` is
/// larger in magnitude at `x`.
fn miller(l: u32, x: f64) -> f64 {
    let start = l + 20 + sqrt(40.0 * l as f64) as u32;
    let mut above = 0.0;
    let mut cur = 1e-30;
    let mut ans = 0.0;
    let mut at_one = 0.0;
    for k in (1..=start).rev() {
        let below = (2 * k + 1) as f64 / x * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            ans *= 1e-250;
        }
        if k - 1 == l {
            ans = cur;
        }
        if k - 1 == 1 {
            at_one = cur;
        }
    }
    let j0 = sin(x) / x;
    let j1 = j1_closed(x);
    if j0.abs() >= j1.abs() {
        ans * j0 / cur
    } else {
        ans * j1 / at_one
    }
}
