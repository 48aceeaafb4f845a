use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{cos, factorial, parity, sin, sqrt, PI};

/// Largest degree `l` accepted for spherical harmonics.
pub const MAX_HARMONIC_DEGREE: u32 = 10;

/// Orthonormal `Y_lm(θ, φ)` with the Condon–Shortley phase.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    check(l, m)?;
    let (p, _) = theta_factor(l, m, theta);
    Ok(Complex64::from_polar(p, m as f64 * phi))
}

/// `∂Y_lm/∂θ`.
pub fn spherical_harmonic_dtheta(l: u32, m: i32, theta: f64, phi: f64) -> Result<Complex64> {
    check(l, m)?;
    let (_, dp) = theta_factor(l, m, theta);
    Ok(Complex64::from_polar(1.0, m as f64 * phi) * dp)
}

fn check(l: u32, m: i32) -> Result<()> {
    if l > MAX_HARMONIC_DEGREE {
        return Err(Error::UnsupportedOrder { order: l, cap: MAX_HARMONIC_DEGREE });
    }
    if m.unsigned_abs() > l {
        return Err(Error::InvalidQuantumNumber(alloc::format!("|m| = {} exceeds l = {l}", m.unsigned_abs())));
    }
    Ok(())
}

/// The real θ-part of `Y_lm` and its θ-derivative, `Y_lm = Θ(θ) e^{imφ}`.
///
/// Evaluated with the signed `sin θ`, so the result continues analytically
/// to `θ < 0` (where it equals the value at `(−θ, φ + π)`).
pub(crate) fn theta_factor(l: u32, m: i32, theta: f64) -> (f64, f64) {
    let am = m.unsigned_abs();
    let (s, c) = (sin(theta), cos(theta));
    let p = legendre(l, am as i64, s, c);
    // dP_l^m/dθ = ½ [P_l^{m+1} − (l+m)(l−m+1) P_l^{m−1}]
    let up = legendre(l, am as i64 + 1, s, c);
    let down = legendre(l, am as i64 - 1, s, c);
    let (lf, mf) = (l as f64, am as f64);
    let dp = 0.5 * (up - (lf + mf) * (lf - mf + 1.0) * down);
    let norm = sqrt((2.0 * lf + 1.0) / (4.0 * PI) * factorial(l - am) / factorial(l + am));
    // Y_{l,−m} = (−1)^m conj(Y_lm)
    let sign = if m < 0 { parity(am as i64) } else { 1.0 };
    (sign * norm * p, sign * norm * dp)
}

/// Unnormalised `P_l^m(cos θ)` with Condon–Shortley phase, for any integer
/// `m` (negative orders via the reflection formula, `|m| > l` gives 0).
fn legendre(l: u32, m: i64, s: f64, c: f64) -> f64 {
    if m < 0 {
        let am = (-m) as u32;
        if am > l {
            return 0.0;
        }
        return parity(am as i64) * factorial(l - am) / factorial(l + am) * legendre(l, am as i64, s, c);
    }
    let m = m as u32;
    if m > l {
        return 0.0;
    }
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= -((2 * k - 1) as f64) * s;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = c * (2 * m + 1) as f64 * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut prev = pmm;
    for ll in (m + 2)..=l {
        let next = (c * (2 * ll - 1) as f64 * pm1 - (ll + m - 1) as f64 * prev) / (ll - m) as f64;
        prev = pm1;
        pm1 = next;
    }
    pm1
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn low_order_values() {
        let y00 = spherical_harmonic(0, 0, 0.3, 1.1).unwrap();
        assert!((y00.re - 1.0 / sqrt(4.0 * PI)).abs() < 1e-15 && y00.im.abs() < 1e-15);
        let y10 = spherical_harmonic(1, 0, 0.0, 0.0).unwrap();
        assert!((y10.re - sqrt(3.0 / (4.0 * PI))).abs() < 1e-15);
        let y11 = spherical_harmonic(1, 1, FRAC_PI_2, 0.0).unwrap();
        assert!((y11.re + sqrt(3.0 / (8.0 * PI))).abs() < 1e-15);
    }

    #[test]
    fn negative_order_is_conjugate_reflection() {
        for l in 1..5u32 {
            for m in 1..=l as i32 {
                let a = spherical_harmonic(l, m, 0.7, 0.4).unwrap();
                let b = spherical_harmonic(l, -m, 0.7, 0.4).unwrap();
                let expect = a.conj() * parity(m as i64);
                assert!((b - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn theta_derivative_matches_difference_quotient() {
        for l in 0..6u32 {
            for m in -(l as i32)..=(l as i32) {
                for &t in &[0.0, 0.4, 1.3, 2.9, PI] {
                    let h = 1e-6;
                    let fd = (spherical_harmonic(l, m, t + h, 0.2).unwrap()
                        - spherical_harmonic(l, m, t - h, 0.2).unwrap())
                        / (2.0 * h);
                    let d = spherical_harmonic_dtheta(l, m, t, 0.2).unwrap();
                    assert!((fd - d).norm() < 1e-8, "l={l} m={m} θ={t}");
                }
            }
        }
    }

    #[test]
    fn rejects_bad_quantum_numbers() {
        assert!(matches!(spherical_harmonic(1, 2, 0.0, 0.0), Err(Error::InvalidQuantumNumber(_))));
        assert!(matches!(spherical_harmonic(11, 0, 0.0, 0.0), Err(Error::UnsupportedOrder { .. })));
    }
}
