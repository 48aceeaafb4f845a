//! Exact time-dependent basis functions of the moving-wall trap and
//! truncated superpositions of them.
//!
//! For a wall `L(t) = a + u t` and `α = a u / 2` (ħ = μ = 1) every basis
//! function carries the quadratic phase `exp[i α ξ (r/L)² − i x² t / (2 a L)]`
//! with `ξ = L/a`. The second exponent is the familiar
//! `x² (1 − 1/ξ) / 4α` with the `α` cancelled algebraically, so static
//! boxes (`u = 0`) need no special path.

pub(crate) mod basis;
mod mode;
mod state;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{atan2, cos, hypot, sin, sqrt, PI};
use crate::specfun::BesselKind;

pub use basis::{basis_cylindrical, basis_spherical, basis_value, basis_value_with_gradient};
pub use mode::{Mode, ModeIndex};
pub use state::{Sector, WaveState, DEFAULT_NORM_TOLERANCE};

pub(crate) use basis::RadialFactor;

/// Shape of the confining well.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrapKind {
    /// Two-dimensional disc.
    Circular,
    /// Cylinder of fixed height whose lateral wall moves.
    Cylindrical,
    Spherical,
}

impl TrapKind {
    pub fn name(self) -> &'static str {
        match self {
            TrapKind::Circular => "circular",
            TrapKind::Cylindrical => "cylindrical",
            TrapKind::Spherical => "spherical",
        }
    }

    /// Family of Bessel zeros that sets the radial nodes.
    pub fn zero_kind(self) -> BesselKind {
        match self {
            TrapKind::Spherical => BesselKind::Spherical,
            _ => BesselKind::Cylinder,
        }
    }
}

/// The trap: kind, initial radius `a`, wall speed `u` and (cylinder only)
/// the fixed height `Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapGeometry {
    kind: TrapKind,
    a: f64,
    u: f64,
    height: f64,
}

impl TrapGeometry {
    pub fn circular(a: f64, u: f64) -> Result<Self> {
        Self::new(TrapKind::Circular, a, u, 0.0)
    }

    pub fn cylindrical(a: f64, u: f64, height: f64) -> Result<Self> {
        Self::new(TrapKind::Cylindrical, a, u, height)
    }

    pub fn spherical(a: f64, u: f64) -> Result<Self> {
        Self::new(TrapKind::Spherical, a, u, 0.0)
    }

    /// Builds the geometry from the dimensionless wall parameter
    /// `α = a u / 2`.
    pub fn from_alpha(kind: TrapKind, a: f64, alpha: f64, height: Option<f64>) -> Result<Self> {
        Self::new(kind, a, 2.0 * alpha / a, height.unwrap_or(0.0))
    }

    fn new(kind: TrapKind, a: f64, u: f64, height: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("initial radius must be positive, got {a}")));
        }
        if !u.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("wall speed must be finite, got {u}")));
        }
        let height = match kind {
            TrapKind::Cylindrical if !(height > 0.0) || !height.is_finite() => {
                return Err(Error::InvalidParameter(alloc::format!("cylinder height must be positive, got {height}")));
            }
            TrapKind::Cylindrical => height,
            _ => 0.0,
        };
        Ok(Self { kind, a, u, height })
    }

    pub fn kind(&self) -> TrapKind {
        self.kind
    }

    /// Initial radius `a`.
    pub fn radius(&self) -> f64 {
        self.a
    }

    /// Wall speed `u` (positive: expansion).
    pub fn wall_speed(&self) -> f64 {
        self.u
    }

    /// Cylinder height `Z`; `None` for the other kinds.
    pub fn height(&self) -> Option<f64> {
        (self.kind == TrapKind::Cylindrical).then_some(self.height)
    }

    /// `α = μ a u / 2ħ`.
    pub fn alpha(&self) -> f64 {
        0.5 * self.a * self.u
    }

    /// `L(t) = a + u t`.
    pub fn wall(&self, t: f64) -> f64 {
        self.a + self.u * t
    }

    /// `ξ(t) = L(t)/a`.
    pub fn xi(&self, t: f64) -> f64 {
        self.wall(t) / self.a
    }

    /// Time at which a contracting wall reaches the origin.
    pub fn collapse_time(&self) -> Option<f64> {
        (self.u < 0.0).then(|| self.a / -self.u)
    }

    /// Fails unless `L(t) > 0` between `0` and `t_end`.
    pub fn check_horizon(&self, t_end: f64) -> Result<()> {
        if !t_end.is_finite() || !(self.wall(t_end) > 0.0) {
            return Err(Error::InvalidParameter(alloc::format!(
                "wall L(t) = {} + {}·t must stay positive up to t = {t_end}",
                self.a, self.u
            )));
        }
        Ok(())
    }

    /// The same trap with a different wall speed.
    pub fn with_wall_speed(&self, u: f64) -> Result<Self> {
        Self::new(self.kind, self.a, u, self.height)
    }

    /// Volume (area for the disc) enclosed at time `t`.
    pub fn volume(&self, t: f64) -> f64 {
        let l = self.wall(t);
        match self.kind {
            TrapKind::Circular => PI * l * l,
            TrapKind::Cylindrical => PI * l * l * self.height,
            TrapKind::Spherical => 4.0 / 3.0 * PI * l * l * l,
        }
    }

    /// Whether `p` lies in the closed box at time `t`.
    pub fn contains(&self, p: &Point, t: f64) -> bool {
        let l = self.wall(t);
        let slack = 1e-12 * l;
        let radial_ok = p.radius >= 0.0 && p.radius <= l + slack;
        match self.kind {
            TrapKind::Cylindrical => radial_ok && p.z >= -slack && p.z <= self.height + slack,
            _ => radial_ok,
        }
    }

    pub(crate) fn check_point(&self, p: &Point, t: f64) -> Result<()> {
        if self.contains(p, t) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { radius: p.radius, wall: self.wall(t), t })
        }
    }
}

/// A position in the trap's natural coordinates.
///
/// Circular: `(ρ, φ)`; cylindrical: `(ρ, φ, z)`; spherical: `(r, θ, φ)`.
/// Unused coordinates are zero (`θ = π/2` for planar points).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub radius: f64,
    pub theta: f64,
    pub phi: f64,
    pub z: f64,
}

impl Point {
    pub fn polar(rho: f64, phi: f64) -> Self {
        Self { radius: rho, theta: 0.5 * PI, phi, z: 0.0 }
    }

    pub fn cylindrical(rho: f64, phi: f64, z: f64) -> Self {
        Self { radius: rho, theta: 0.5 * PI, phi, z }
    }

    pub fn spherical(r: f64, theta: f64, phi: f64) -> Self {
        Self { radius: r, theta, phi, z: 0.0 }
    }

    pub fn to_cartesian(&self, kind: TrapKind) -> [f64; 3] {
        match kind {
            TrapKind::Spherical => {
                let s = sin(self.theta);
                [self.radius * s * cos(self.phi), self.radius * s * sin(self.phi), self.radius * cos(self.theta)]
            }
            _ => [self.radius * cos(self.phi), self.radius * sin(self.phi), self.z],
        }
    }

    pub fn from_cartesian(kind: TrapKind, c: [f64; 3]) -> Self {
        match kind {
            TrapKind::Spherical => {
                let rho = hypot(c[0], c[1]);
                Self::spherical(sqrt(rho * rho + c[2] * c[2]), atan2(rho, c[2]), atan2(c[1], c[0]))
            }
            TrapKind::Cylindrical => Self::cylindrical(hypot(c[0], c[1]), atan2(c[1], c[0]), c[2]),
            TrapKind::Circular => Self::polar(hypot(c[0], c[1]), atan2(c[1], c[0])),
        }
    }
}

/// Partial derivatives of ψ with respect to the natural coordinates:
/// `radial = ∂ψ/∂r` (or `∂ψ/∂ρ`), `polar = ∂ψ/∂θ`, `azimuthal = ∂ψ/∂φ`,
/// `axial = ∂ψ/∂z`. Components a geometry does not have are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub radial: Complex64,
    pub polar: Complex64,
    pub azimuthal: Complex64,
    pub axial: Complex64,
}

impl Gradient {
    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { radial: z, polar: z, azimuthal: z, axial: z }
    }

    pub(crate) fn scaled_add(&mut self, c: Complex64, other: &Gradient) {
        self.radial += c * other.radial;
        self.polar += c * other.polar;
        self.azimuthal += c * other.azimuthal;
        self.axial += c * other.axial;
    }

    /// Cartesian components of ∇ψ at `p`. Singular on the polar axis.
    pub fn to_cartesian(&self, p: &Point, kind: TrapKind) -> [Complex64; 3] {
        let (sp, cp) = (sin(p.phi), cos(p.phi));
        match kind {
            TrapKind::Spherical => {
                let (st, ct) = (sin(p.theta), cos(p.theta));
                let gr = self.radial;
                let gt = self.polar / p.radius;
                let gp = self.azimuthal / (p.radius * st);
                [gr * (st * cp) + gt * (ct * cp) - gp * sp, gr * (st * sp) + gt * (ct * sp) + gp * cp, gr * ct - gt * st]
            }
            _ => {
                let gr = self.radial;
                let gp = self.azimuthal / p.radius;
                [gr * cp - gp * sp, gr * sp + gp * cp, self.axial]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn geometry_rejects_bad_parameters() {
        assert!(TrapGeometry::spherical(0.0, 1.0).is_err());
        assert!(TrapGeometry::spherical(-1.0, 1.0).is_err());
        assert!(TrapGeometry::circular(1.0, f64::NAN).is_err());
        assert!(TrapGeometry::cylindrical(1.0, 0.5, 0.0).is_err());
        assert!(TrapGeometry::cylindrical(1.0, 0.5, 2.0).is_ok());
    }

    #[test]
    fn wall_and_alpha() {
        let g = TrapGeometry::from_alpha(TrapKind::Spherical, 2.0, 0.75, None).unwrap();
        assert_eq!(g.wall_speed(), 0.75);
        assert_eq!(g.alpha(), 0.75);
        assert_eq!(g.wall(2.0), 3.5);
        assert_eq!(g.xi(2.0), 1.75);
        assert_eq!(g.collapse_time(), None);
        assert_eq!(g.height(), None);
        let c = g.with_wall_speed(-0.5).unwrap();
        assert_eq!(c.collapse_time(), Some(4.0));
        assert!(c.check_horizon(3.9).is_ok());
        assert!(c.check_horizon(4.0).is_err());
        assert!(c.check_horizon(f64::INFINITY).is_err());
    }

    #[test]
    fn volumes() {
        let t = 0.5;
        let g = TrapGeometry::cylindrical(1.0, 2.0, 3.0).unwrap();
        assert!((g.volume(t) - PI * 4.0 * 3.0).abs() < 1e-12);
        let s = TrapGeometry::spherical(1.0, 2.0).unwrap();
        assert!((s.volume(t) - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);
        let d = TrapGeometry::circular(1.0, 2.0).unwrap();
        assert!((d.volume(t) - PI * 4.0).abs() < 1e-12);
    }

    #[test]
    fn containment_follows_the_wall() {
        let g = TrapGeometry::spherical(1.0, -1.0).unwrap();
        let p = Point::spherical(0.6, 1.0, 2.0);
        assert!(g.contains(&p, 0.3));
        assert!(!g.contains(&p, 0.5));
        assert!(g.check_point(&p, 0.5).is_err());
        let c = TrapGeometry::cylindrical(1.0, 0.0, 2.0).unwrap();
        assert!(c.contains(&Point::cylindrical(0.5, 0.0, 2.0), 0.0));
        assert!(!c.contains(&Point::cylindrical(0.5, 0.0, 2.1), 0.0));
    }

    #[test]
    fn cartesian_gradient_of_a_linear_field() {
        // ψ = z = r cos θ has ∇ψ = ẑ
        let p = Point::spherical(0.7, 0.4, 1.3);
        let g = Gradient {
            radial: Complex64::new(cos(p.theta), 0.0),
            polar: Complex64::new(-p.radius * sin(p.theta), 0.0),
            azimuthal: Complex64::new(0.0, 0.0),
            axial: Complex64::new(0.0, 0.0),
        };
        let c = g.to_cartesian(&p, TrapKind::Spherical);
        assert!(c[0].norm() < 1e-14 && c[1].norm() < 1e-14);
        assert!((c[2].re - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn cartesian_round_trip(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
            for kind in [TrapKind::Spherical, TrapKind::Cylindrical] {
                let back = Point::from_cartesian(kind, [x, y, z]).to_cartesian(kind);
                prop_assert!((back[0] - x).abs() < 1e-12);
                prop_assert!((back[1] - y).abs() < 1e-12);
                prop_assert!((back[2] - z).abs() < 1e-12);
            }
        }
    }
}
