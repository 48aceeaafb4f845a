use crate::error::{Error, Result};
use crate::math::sq;
use crate::specfun::{bessel_zero, jn, sph_jn, MAX_CYLINDER_ORDER, MAX_HARMONIC_DEGREE};

use super::TrapKind;

/// Quantum numbers of one basis function.
///
/// The azimuthal number `m` is signed in every geometry: `e^{imφ}` covers
/// both signs of the circular `e^{±imφ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeIndex {
    Circular { m: i32, n: u32 },
    Cylindrical { m: i32, n: u32, k: u32 },
    Spherical { l: u32, n: u32, m: i32 },
}

impl ModeIndex {
    pub fn kind(&self) -> TrapKind {
        match self {
            ModeIndex::Circular { .. } => TrapKind::Circular,
            ModeIndex::Cylindrical { .. } => TrapKind::Cylindrical,
            ModeIndex::Spherical { .. } => TrapKind::Spherical,
        }
    }

    /// Order of the radial Bessel function: `|m|` or `l`.
    pub fn radial_order(&self) -> u32 {
        match *self {
            ModeIndex::Circular { m, .. } | ModeIndex::Cylindrical { m, .. } => m.unsigned_abs(),
            ModeIndex::Spherical { l, .. } => l,
        }
    }

    /// Radial index `n ≥ 1`.
    pub fn n(&self) -> u32 {
        match *self {
            ModeIndex::Circular { n, .. } | ModeIndex::Cylindrical { n, .. } | ModeIndex::Spherical { n, .. } => n,
        }
    }

    /// Azimuthal number `m`.
    pub fn m(&self) -> i32 {
        match *self {
            ModeIndex::Circular { m, .. } | ModeIndex::Cylindrical { m, .. } | ModeIndex::Spherical { m, .. } => m,
        }
    }

    /// The same angular labels with a different radial index.
    pub fn with_n(&self, n: u32) -> Self {
        match *self {
            ModeIndex::Circular { m, .. } => ModeIndex::Circular { m, n },
            ModeIndex::Cylindrical { m, k, .. } => ModeIndex::Cylindrical { m, n, k },
            ModeIndex::Spherical { l, m, .. } => ModeIndex::Spherical { l, n, m },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n() == 0 {
            return Err(Error::InvalidQuantumNumber("radial index n must be at least 1".into()));
        }
        match *self {
            ModeIndex::Cylindrical { k: 0, .. } => Err(Error::InvalidQuantumNumber("axial index k must be at least 1".into())),
            ModeIndex::Circular { m, .. } | ModeIndex::Cylindrical { m, .. } if m.unsigned_abs() > MAX_CYLINDER_ORDER => {
                Err(Error::UnsupportedOrder { order: m.unsigned_abs(), cap: MAX_CYLINDER_ORDER })
            }
            ModeIndex::Spherical { l, .. } if l > MAX_HARMONIC_DEGREE => {
                Err(Error::UnsupportedOrder { order: l, cap: MAX_HARMONIC_DEGREE })
            }
            ModeIndex::Spherical { l, m, .. } if m.unsigned_abs() > l => {
                Err(Error::InvalidQuantumNumber(alloc::format!("|m| = {} exceeds l = {l}", m.unsigned_abs())))
            }
            _ => Ok(()),
        }
    }
}

impl core::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ModeIndex::Circular { m, n } => write!(f, "(m={m}, n={n})"),
            ModeIndex::Cylindrical { m, n, k } => write!(f, "(m={m}, n={n}, k={k})"),
            ModeIndex::Spherical { l, n, m } => write!(f, "(l={l}, n={n}, m={m})"),
        }
    }
}

/// A basis mode: its quantum numbers, Bessel zero `x` and the radial
/// normalisation `1/|J_{m+1}(x)|` (or `1/|j_{l+1}(x)|`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    index: ModeIndex,
    zero: f64,
    inv_edge: f64,
}

impl Mode {
    pub fn new(index: ModeIndex) -> Result<Self> {
        index.validate()?;
        let zero = bessel_zero(index.kind().zero_kind(), index.radial_order(), index.n())?;
        Ok(Self::from_parts(index, zero))
    }

    /// Uses a zero looked up elsewhere (e.g. a [`crate::BesselZeroTable`]).
    pub fn with_zero(index: ModeIndex, zero: f64) -> Result<Self> {
        index.validate()?;
        if !(zero > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!("Bessel zero must be positive, got {zero}")));
        }
        Ok(Self::from_parts(index, zero))
    }

    fn from_parts(index: ModeIndex, zero: f64) -> Self {
        let order = index.radial_order();
        let edge = match index.kind() {
            TrapKind::Spherical => sph_jn(order + 1, zero),
            _ => jn(order + 1, zero),
        };
        Self { index, zero, inv_edge: 1.0 / edge.abs() }
    }

    pub fn index(&self) -> ModeIndex {
        self.index
    }

    /// The Bessel zero `x`.
    pub fn zero(&self) -> f64 {
        self.zero
    }

    pub(crate) fn inv_edge(&self) -> f64 {
        self.inv_edge
    }

    /// `v = ħ x / μ a`.
    pub fn velocity_scale(&self, a: f64) -> f64 {
        self.zero / a
    }

    /// `t = μ a² / ħ x`.
    pub fn time_scale(&self, a: f64) -> f64 {
        a * a / self.zero
    }

    /// `α_ref = μ a v / 2ħ = x / 2`.
    pub fn alpha_ref(&self) -> f64 {
        0.5 * self.zero
    }

    /// Stationary energy `ħ² x² / 2 μ a²` in a static box of radius `a`.
    pub fn energy(&self, a: f64) -> f64 {
        0.5 * sq(self.zero / a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn scales_follow_the_zero() {
        let m = Mode::new(ModeIndex::Spherical { l: 0, n: 1, m: 0 }).unwrap();
        assert!((m.zero() - PI).abs() < 1e-12);
        assert_eq!(m.alpha_ref(), m.zero() / 2.0);
        assert!((m.velocity_scale(2.0) - PI / 2.0).abs() < 1e-12);
        assert!((m.time_scale(2.0) - 4.0 / PI).abs() < 1e-12);
        assert!((m.energy(1.0) - PI * PI / 2.0).abs() < 1e-12);
        let c = Mode::new(ModeIndex::Circular { m: -1, n: 1 }).unwrap();
        assert!((c.zero() - 3.8317059702).abs() < 1e-9);
    }

    #[test]
    fn invalid_indices() {
        assert!(Mode::new(ModeIndex::Circular { m: 0, n: 0 }).is_err());
        assert!(Mode::new(ModeIndex::Cylindrical { m: 0, n: 1, k: 0 }).is_err());
        assert!(Mode::new(ModeIndex::Spherical { l: 1, n: 1, m: 2 }).is_err());
        assert!(matches!(
            Mode::new(ModeIndex::Spherical { l: 11, n: 1, m: 0 }),
            Err(Error::UnsupportedOrder { .. })
        ));
        assert!(Mode::with_zero(ModeIndex::Circular { m: 0, n: 1 }, -1.0).is_err());
    }

    #[test]
    fn labels() {
        let i = ModeIndex::Cylindrical { m: -2, n: 3, k: 4 };
        assert_eq!(i.radial_order(), 2);
        assert_eq!(i.with_n(7).n(), 7);
        assert_eq!(i.m(), -2);
        assert_eq!(alloc::format!("{i}"), "(m=-2, n=3, k=4)");
    }
}
