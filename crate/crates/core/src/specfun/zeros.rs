use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::bessel::{jn, jn_with_derivative, MAX_CYLINDER_ORDER};
use super::spherical::{sph_jn, sph_jn_with_derivative, MAX_SPHERICAL_ORDER};
use crate::error::{Error, Result};
use crate::math::PI;

/// Which family of Bessel functions a zero belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BesselKind {
    /// Zeros of `J_m`.
    Cylinder,
    /// Zeros of `j_l`.
    Spherical,
}

impl BesselKind {
    pub fn cap(self) -> u32 {
        match self {
            BesselKind::Cylinder => MAX_CYLINDER_ORDER,
            BesselKind::Spherical => MAX_SPHERICAL_ORDER,
        }
    }

    /// Order of the underlying cylinder function (`l + 1/2` for spherical).
    fn nu(self, order: u32) -> f64 {
        match self {
            BesselKind::Cylinder => order as f64,
            BesselKind::Spherical => order as f64 + 0.5,
        }
    }

    pub(crate) fn eval(self, order: u32, x: f64) -> f64 {
        match self {
            BesselKind::Cylinder => jn(order, x),
            BesselKind::Spherical => sph_jn(order, x),
        }
    }

    pub(crate) fn eval_with_derivative(self, order: u32, x: f64) -> (f64, f64) {
        match self {
            BesselKind::Cylinder => jn_with_derivative(order, x),
            BesselKind::Spherical => sph_jn_with_derivative(order, x),
        }
    }
}

// Consecutive zeros of J_ν are never closer than ~3.1 for ν ≥ 0, so a scan
// with this step cannot skip a sign change.
const SCAN_STEP: f64 = 0.25;
const POLISH_TARGET: f64 = 1e-15;
const ACCEPT: f64 = 1e-13;

/// McMahon's large-`n` expansion for the `n`-th zero of `J_ν`.
pub fn mcmahon_guess(nu: f64, n: u32) -> f64 {
    let beta = (n as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    let b8 = 8.0 * beta;
    beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8)
}

/// The `n`-th positive zero (`n ≥ 1`) of `J_order` or `j_order`.
pub fn bessel_zero(kind: BesselKind, order: u32, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidQuantumNumber("zero index n must be at least 1".into()));
    }
    Ok(bessel_zeros(kind, order, n as usize)?[n as usize - 1])
}

/// The first `count` positive zeros, in increasing order.
pub fn bessel_zeros(kind: BesselKind, order: u32, count: usize) -> Result<Vec<f64>> {
    if order > kind.cap() {
        return Err(Error::UnsupportedOrder { order, cap: kind.cap() });
    }
    let nu = kind.nu(order);
    let mut out = Vec::with_capacity(count);
    // No zero lies below ν, and the function is positive there.
    let mut lo = nu;
    let mut f_lo = kind.eval(order, lo);
    while out.len() < count {
        let hi = lo + SCAN_STEP;
        let f_hi = kind.eval(order, hi);
        if f_hi == 0.0 {
            out.push(hi);
        } else if f_lo != 0.0 && (f_lo < 0.0) != (f_hi < 0.0) {
            let guess = mcmahon_guess(nu, out.len() as u32 + 1);
            out.push(polish(kind, order, lo, hi, f_lo, guess)?);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(out)
}

/// Newton's method kept inside a sign-change bracket, falling back to
/// bisection whenever a step would leave it.
fn polish(kind: BesselKind, order: u32, mut lo: f64, mut hi: f64, f_lo: f64, guess: f64) -> Result<f64> {
    let lo_negative = f_lo < 0.0;
    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    let mut best = (f64::INFINITY, x);
    for _ in 0..200 {
        let (f, df) = kind.eval_with_derivative(order, x);
        if f.abs() < best.0 {
            best = (f.abs(), x);
        }
        if f.abs() <= POLISH_TARGET {
            break;
        }
        if (f < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let newton = x - f / df;
        x = if df != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    if best.0 < ACCEPT {
        Ok(best.1)
    } else {
        Err(Error::Accuracy { estimate: best.1, error: best.0, requested: ACCEPT })
    }
}

/// Memoised zeros `x_{order, n}` of one Bessel family.
///
/// Entries are filled per order, always as a prefix `n = 1..N`, so the
/// table never has holes. Once built, a table is plain data and can be
/// shared between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselZeroTable {
    kind: BesselKind,
    entries: BTreeMap<(u32, u32), f64>,
}

impl BesselZeroTable {
    pub fn new(kind: BesselKind) -> Self {
        Self { kind, entries: BTreeMap::new() }
    }

    /// Eagerly computes `count` zeros for every order `0..=max_order`.
    pub fn build(kind: BesselKind, max_order: u32, count: usize) -> Result<Self> {
        let mut table = Self::new(kind);
        for order in 0..=max_order {
            table.extend(order, count)?;
        }
        Ok(table)
    }

    pub fn kind(&self) -> BesselKind {
        self.kind
    }

    pub fn get(&self, order: u32, n: u32) -> Option<f64> {
        self.entries.get(&(order, n)).copied()
    }

    /// Looks up `x_{order, n}`, computing and storing it if missing.
    pub fn zero(&mut self, order: u32, n: u32) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidQuantumNumber("zero index n must be at least 1".into()));
        }
        if let Some(x) = self.get(order, n) {
            return Ok(x);
        }
        self.extend(order, n as usize)?;
        Ok(self.entries[&(order, n)])
    }

    /// Zeros `n = 1..=count` of one order.
    pub fn row(&mut self, order: u32, count: usize) -> Result<Vec<f64>> {
        self.extend(order, count)?;
        Ok((1..=count as u32).map(|n| self.entries[&(order, n)]).collect())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `((order, n), x)` in order-major, then index order.
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    fn extend(&mut self, order: u32, count: usize) -> Result<()> {
        let have = self.entries.range((order, 1)..=(order, u32::MAX)).count();
        if have >= count {
            return Ok(());
        }
        for (i, x) in bessel_zeros(self.kind, order, count)?.into_iter().enumerate() {
            self.entries.insert((order, i as u32 + 1), x);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spherical_order_zero_is_multiples_of_pi() {
        for k in 1..=10u32 {
            let x = bessel_zero(BesselKind::Spherical, 0, k).unwrap();
            assert!((x - k as f64 * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn known_cylinder_zeros() {
        let x11 = bessel_zero(BesselKind::Cylinder, 1, 1).unwrap();
        assert!((x11 - 3.8317059702).abs() < 1e-9);
        let x02 = bessel_zero(BesselKind::Cylinder, 0, 2).unwrap();
        assert!((x02 - 5.5200781103).abs() < 1e-9);
    }

    #[test]
    fn zero_index_must_be_positive() {
        assert!(bessel_zero(BesselKind::Cylinder, 0, 0).is_err());
    }

    #[test]
    fn table_memoises_prefixes() {
        let mut t = BesselZeroTable::new(BesselKind::Cylinder);
        let x = t.zero(2, 3).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.get(2, 3), Some(x));
        assert_eq!(t.zero(2, 1).unwrap(), t.get(2, 1).unwrap());
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn mcmahon_is_close_for_large_index() {
        let exact = bessel_zero(BesselKind::Cylinder, 1, 20).unwrap();
        assert!((mcmahon_guess(1.0, 20) - exact).abs() < 1e-6);
    }
}
