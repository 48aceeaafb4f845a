use crate::error::{Error, Result};
use crate::math::{cos, sin, sq, sqrt, PI};

/// Largest cylinder-function order accepted by the public API.
pub const MAX_CYLINDER_ORDER: u32 = 50;

// Below this argument the ascending series loses at most ~3 digits to
// cancellation.
const SERIES_LIMIT: f64 = 8.0;

/// `J_m(x)` for `0 ≤ m ≤ 50` and `x ≥ 0`.
pub fn bessel_j(m: u32, x: f64) -> Result<f64> {
    check_args(m, x)?;
    Ok(jn(m, x))
}

/// `J'_m(x)`.
pub fn bessel_j_derivative(m: u32, x: f64) -> Result<f64> {
    check_args(m, x)?;
    Ok(jn_with_derivative(m, x).1)
}

fn check_args(m: u32, x: f64) -> Result<()> {
    if m > MAX_CYLINDER_ORDER {
        return Err(Error::UnsupportedOrder { order: m, cap: MAX_CYLINDER_ORDER });
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("Bessel argument must be finite and non-negative, got {x}")));
    }
    Ok(())
}

/// Unchecked `J_m(x)`; the order cap is enforced only at the public surface
/// so that derivative recurrences may reach `m + 1`.
pub(crate) fn jn(m: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let nu = m as f64;
    if x < SERIES_LIMIT || 0.25 * x * x < nu + 1.0 {
        series(m, x)
    } else if x >= asymptotic_threshold(m) {
        hankel(m, x)
    } else {
        miller(m, x)
    }
}

/// `(J_m(x), J'_m(x))`.
pub(crate) fn jn_with_derivative(m: u32, x: f64) -> (f64, f64) {
    let j = jn(m, x);
    let jp1 = jn(m + 1, x);
    let d = if x == 0.0 {
        if m == 1 {
            0.5
        } else {
            0.0
        }
    } else {
        (m as f64 / x) * j - jp1
    };
    (j, d)
}

fn asymptotic_threshold(m: u32) -> f64 {
    25.0 + sq(m as f64)
}

fn series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut lead = 1.0;
    for k in 1..=m {
        lead *= half / k as f64;
    }
    let q = -half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * (k + m as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 200.0 {
            break;
        }
        k += 1.0;
    }
    lead * sum
}

/// Hankel's large-argument expansion, summed until the terms stop shrinking.
fn hankel(m: u32, x: f64) -> f64 {
    let mu = 4.0 * sq(m as f64);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut k = 1u32;
    loop {
        let next = term * (mu - sq((2 * k - 1) as f64)) / (k as f64 * 8.0 * x);
        if next.abs() > term.abs() && k > 1 {
            break;
        }
        term = next;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 || k >= 80 {
            break;
        }
        k += 1;
    }
    // χ = x − (2m+1)π/4, with the constant phase taken from an exact table.
    let (cs, sn) = eighth_turn((2 * m + 1) % 8);
    let (cx, sx) = (cos(x), sin(x));
    let cos_chi = cx * cs + sx * sn;
    let sin_chi = sx * cs - cx * sn;
    sqrt(2.0 / (PI * x)) * (p * cos_chi - q * sin_chi)
}

/// `(cos, sin)` of `k·π/4`.
fn eighth_turn(k: u32) -> (f64, f64) {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    match k % 8 {
        0 => (1.0, 0.0),
        1 => (h, h),
        2 => (0.0, 1.0),
        3 => (-h, h),
        4 => (-1.0, 0.0),
        5 => (-h, -h),
        6 => (0.0, -1.0),
        _ => (h, -h),
    }
}

/// Miller's backward recurrence normalised by `J_0 + 2 Σ J_{2k} = 1`.
fn miller(m: u32, x: f64) -> f64 {
    let big = m.max(libm::ceil(x) as u32);
    let mut start = big + 20 + sqrt(40.0 * big as f64) as u32;
    start += start % 2;
    let mut above = 0.0;
    let mut cur = 1e-30;
    let mut sum = 0.0;
    let mut ans = 0.0;
    for k in (1..=start).rev() {
        let below = (2.0 * k as f64 / x) * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            ans *= 1e-250;
            sum *= 1e-250;
        }
        let order = k - 1;
        if order == m {
            ans = cur;
        }
        if order > 0 && order % 2 == 0 {
            sum += cur;
        }
    }
    ans / (cur + 2.0 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn first_zero_of_j0() {
        assert!(bessel_j(0, 2.404825557695773).unwrap().abs() < 1e-12);
    }

    #[test]
    fn regimes_agree_at_crossovers() {
        // Miller's recurrence is valid everywhere, so it checks the other two.
        for m in 0..6u32 {
            for &x in &[0.5, 3.0, 7.9] {
                assert!((series(m, x) - miller(m, x)).abs() < 1e-13, "series m={m} x={x}");
            }
            for &x in &[asymptotic_threshold(m), asymptotic_threshold(m) + 13.7, 150.0] {
                assert!((hankel(m, x) - miller(m, x)).abs() < 1e-13, "hankel m={m} x={x}");
            }
        }
    }

    #[test]
    fn order_cap_and_domain() {
        assert!(matches!(bessel_j(51, 1.0), Err(Error::UnsupportedOrder { .. })));
        assert!(bessel_j(2, -1.0).is_err());
        assert!(bessel_j(2, f64::NAN).is_err());
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for m in 0..5u32 {
            for &x in &[0.7, 4.2, 13.0, 41.0] {
                let h = 1e-5;
                let fd = (jn(m, x + h) - jn(m, x - h)) / (2.0 * h);
                let (_, d) = jn_with_derivative(m, x);
                assert!((fd - d).abs() < 1e-9, "m={m} x={x}");
            }
        }
    }
}
