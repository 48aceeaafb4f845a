//! Transcendental functions routed through `libm` so the crate builds
//! without `std`.

pub(crate) use core::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};
pub(crate) use libm::{atan2, cos, floor, hypot, sin, sqrt};

#[inline]
pub(crate) fn sq(x: f64) -> f64 {
    x * x
}

/// `(-1)^n` for a signed integer.
#[inline]
pub(crate) fn parity(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `n!` as a float; exact up to `n = 22`, correctly rounded well beyond.
pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
