use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::basis::{value_unchecked, value_with_gradient_unchecked, RadialFactor};
use super::{Gradient, Mode, ModeIndex, Point, TrapGeometry};

/// Tolerance on `|Σ|c|² − 1|` used by [`WaveState::new`].
pub const DEFAULT_NORM_TOLERANCE: f64 = 1e-6;

/// Angular labels shared by all modes of one radial family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    Circular { m: i32 },
    Cylindrical { m: i32, k: u32 },
    Spherical { l: u32, m: i32 },
}

impl Sector {
    pub fn m(&self) -> i32 {
        match *self {
            Sector::Circular { m } | Sector::Cylindrical { m, .. } | Sector::Spherical { m, .. } => m,
        }
    }
}

impl ModeIndex {
    pub fn sector(&self) -> Sector {
        match *self {
            ModeIndex::Circular { m, .. } => Sector::Circular { m },
            ModeIndex::Cylindrical { m, k, .. } => Sector::Cylindrical { m, k },
            ModeIndex::Spherical { l, m, .. } => Sector::Spherical { l, m },
        }
    }
}

/// A finite superposition `ψ = Σ c_j φ_j` of exact moving-wall modes.
///
/// Because each mode solves the moving-wall problem exactly, the
/// coefficients are time independent.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    geometry: TrapGeometry,
    modes: Vec<Mode>,
    coeffs: Vec<Complex64>,
    norm_defect: f64,
}

impl WaveState {
    /// Builds a state whose coefficient norm is within
    /// [`DEFAULT_NORM_TOLERANCE`] of one.
    pub fn new(geometry: TrapGeometry, modes: Vec<Mode>, coeffs: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(geometry, modes, coeffs, DEFAULT_NORM_TOLERANCE)
    }

    pub fn with_tolerance(geometry: TrapGeometry, modes: Vec<Mode>, coeffs: Vec<Complex64>, tolerance: f64) -> Result<Self> {
        Self::validate(&geometry, &modes, &coeffs)?;
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        let norm_defect = (norm - 1.0).abs();
        if !(norm_defect <= tolerance) {
            return Err(Error::Truncation { defect: norm_defect, tolerance, n_max: modes.len() });
        }
        Ok(Self { geometry, modes, coeffs, norm_defect })
    }

    /// Builds a state after rescaling the coefficients to unit norm.
    pub fn normalized(geometry: TrapGeometry, modes: Vec<Mode>, mut coeffs: Vec<Complex64>) -> Result<Self> {
        Self::validate(&geometry, &modes, &coeffs)?;
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("coefficients must not all vanish".into()));
        }
        let s = 1.0 / crate::math::sqrt(norm);
        coeffs.iter_mut().for_each(|c| *c *= s);
        Self::new(geometry, modes, coeffs)
    }

    /// The single eigenstate `mode` with coefficient one.
    pub fn single_mode(geometry: TrapGeometry, mode: Mode) -> Result<Self> {
        Self::new(geometry, alloc::vec![mode], alloc::vec![Complex64::new(1.0, 0.0)])
    }

    fn validate(geometry: &TrapGeometry, modes: &[Mode], coeffs: &[Complex64]) -> Result<()> {
        if modes.is_empty() || modes.len() != coeffs.len() {
            return Err(Error::InvalidParameter(alloc::format!(
                "need one coefficient per mode, got {} modes and {} coefficients",
                modes.len(),
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("non-finite coefficient {c}")));
        }
        for (i, mode) in modes.iter().enumerate() {
            let kind = mode.index().kind();
            if kind != geometry.kind() {
                return Err(Error::GeometryMismatch { expected: geometry.kind().name(), found: kind.name() });
            }
            if modes[..i].iter().any(|other| other.index() == mode.index()) {
                return Err(Error::InvalidQuantumNumber(alloc::format!("mode {} appears twice", mode.index())));
            }
        }
        Ok(())
    }

    pub fn geometry(&self) -> &TrapGeometry {
        &self.geometry
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `|Σ|c|² − 1|` at construction.
    pub fn norm_defect(&self) -> f64 {
        self.norm_defect
    }

    /// Distinct angular sectors, in order of first appearance.
    pub fn sectors(&self) -> Vec<Sector> {
        let mut out = Vec::new();
        for m in &self.modes {
            let s = m.index().sector();
            if !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }

    /// The common sector when every mode shares its angular labels.
    pub fn single_sector(&self) -> Option<Sector> {
        let first = self.modes[0].index().sector();
        self.modes.iter().all(|m| m.index().sector() == first).then_some(first)
    }

    /// The same modes and coefficients in a trap with another wall speed.
    pub fn with_geometry(&self, geometry: TrapGeometry) -> Result<Self> {
        Self::with_tolerance(geometry, self.modes.clone(), self.coeffs.clone(), f64::INFINITY)
    }

    pub fn evaluate(&self, p: &Point, t: f64) -> Result<Complex64> {
        self.geometry.check_point(p, t)?;
        Ok(self.evaluate_unchecked(p, t))
    }

    /// Coordinate derivatives of ψ.
    pub fn gradient(&self, p: &Point, t: f64) -> Result<Gradient> {
        Ok(self.evaluate_with_gradient(p, t)?.1)
    }

    pub fn evaluate_with_gradient(&self, p: &Point, t: f64) -> Result<(Complex64, Gradient)> {
        self.geometry.check_point(p, t)?;
        Ok(self.evaluate_with_gradient_unchecked(p, t))
    }

    /// `|ψ|²`.
    pub fn density(&self, p: &Point, t: f64) -> Result<f64> {
        Ok(self.evaluate(p, t)?.norm_sqr())
    }

    pub(crate) fn evaluate_unchecked(&self, p: &Point, t: f64) -> Complex64 {
        self.modes
            .iter()
            .zip(&self.coeffs)
            .map(|(m, c)| c * value_unchecked(&self.geometry, m, p, t))
            .sum()
    }

    pub(crate) fn evaluate_with_gradient_unchecked(&self, p: &Point, t: f64) -> (Complex64, Gradient) {
        let mut psi = Complex64::new(0.0, 0.0);
        let mut grad = Gradient::zero();
        for (m, c) in self.modes.iter().zip(&self.coeffs) {
            let (v, g) = value_with_gradient_unchecked(&self.geometry, m, p, t);
            psi += c * v;
            grad.scaled_add(*c, &g);
        }
        (psi, grad)
    }

    /// `Σ c_j R_j(r,t)` and its radial derivative, where `R_j` is the
    /// radial factor of mode `j`. For a single-sector state this is ψ up to
    /// a common angular factor.
    pub(crate) fn radial_sum(&self, r: f64, t: f64) -> (Complex64, Complex64) {
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for (m, c) in self.modes.iter().zip(&self.coeffs) {
            let f = RadialFactor::new(&self.geometry, m, r, t);
            v += c * f.value;
            d += c * f.derivative;
        }
        (v, d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{sin, PI};
    use crate::quad::{periodic_trapezoid, GaussLegendre};
    use crate::trapstate::{basis_value, TrapKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn modes(indices: &[ModeIndex]) -> Vec<Mode> {
        indices.iter().map(|&i| Mode::new(i).unwrap()).collect()
    }

    fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    fn norm(state: &WaveState, t: f64) -> f64 {
        let g = state.geometry();
        let radial = GaussLegendre::new(16).composite(0.0, g.wall(t), 12);
        let theta = GaussLegendre::new(20);
        let mut sum = 0.0;
        for &(r, wr) in &radial {
            for (ph, wp) in periodic_trapezoid(24) {
                match g.kind() {
                    TrapKind::Spherical => {
                        for (th, wt) in theta.mapped(0.0, PI) {
                            let v = state.density(&Point::spherical(r, th, ph), t).unwrap();
                            sum += v * r * r * sin(th) * wr * wt * wp;
                        }
                    }
                    _ => sum += state.density(&Point::polar(r, ph), t).unwrap() * r * wr * wp,
                }
            }
        }
        sum
    }

    #[test]
    fn construction_checks() {
        let g = TrapGeometry::spherical(1.0, 0.5).unwrap();
        let ms = modes(&[ModeIndex::Spherical { l: 0, n: 1, m: 0 }, ModeIndex::Spherical { l: 1, n: 1, m: 0 }]);
        let one = Complex64::new(1.0, 0.0);
        assert!(WaveState::new(g, ms.clone(), alloc::vec![one]).is_err());
        assert!(matches!(WaveState::new(g, ms.clone(), alloc::vec![one, one]), Err(Error::Truncation { .. })));
        assert!(WaveState::new(g, alloc::vec![ms[0], ms[0]], alloc::vec![one * 0.6, one * 0.8]).is_err());
        assert!(WaveState::new(g, ms.clone(), alloc::vec![one, Complex64::new(f64::NAN, 0.0)]).is_err());
        let disc = modes(&[ModeIndex::Circular { m: 0, n: 1 }]);
        assert!(matches!(WaveState::single_mode(g, disc[0]), Err(Error::GeometryMismatch { .. })));
        let s = WaveState::normalized(g, ms, alloc::vec![one, one]).unwrap();
        assert!(s.norm_defect() < 1e-15);
        assert_eq!(s.sectors().len(), 2);
        assert_eq!(s.single_sector(), None);
    }

    #[test]
    fn single_mode_equals_basis() {
        let g = TrapGeometry::circular(1.0, -0.4).unwrap();
        let m = Mode::new(ModeIndex::Circular { m: 2, n: 3 }).unwrap();
        let s = WaveState::single_mode(g, m).unwrap();
        assert_eq!(s.single_sector(), Some(Sector::Circular { m: 2 }));
        let p = Point::polar(0.37, 1.9);
        assert_eq!(s.evaluate(&p, 0.8).unwrap(), basis_value(&g, &m, &p, 0.8).unwrap());
    }

    #[test]
    fn random_superpositions_stay_normalised() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sphere = modes(&[
            ModeIndex::Spherical { l: 0, n: 1, m: 0 },
            ModeIndex::Spherical { l: 0, n: 2, m: 0 },
            ModeIndex::Spherical { l: 1, n: 1, m: -1 },
            ModeIndex::Spherical { l: 1, n: 1, m: 1 },
            ModeIndex::Spherical { l: 2, n: 2, m: 0 },
        ]);
        let disc = modes(&[
            ModeIndex::Circular { m: 0, n: 1 },
            ModeIndex::Circular { m: 1, n: 1 },
            ModeIndex::Circular { m: -1, n: 2 },
            ModeIndex::Circular { m: 3, n: 1 },
        ]);
        for (g, ms) in [
            (TrapGeometry::spherical(1.0, 1.2).unwrap(), sphere.clone()),
            (TrapGeometry::spherical(1.0, -1.2).unwrap(), sphere),
            (TrapGeometry::circular(1.0, -0.9).unwrap(), disc),
        ] {
            let c = random_coeffs(&mut rng, ms.len());
            let s = WaveState::normalized(g, ms, c).unwrap();
            for t in [0.0, 0.25, 0.6] {
                let n = norm(&s, t);
                assert!((n - 1.0).abs() < 1e-8, "norm {n} at t = {t}");
            }
        }
    }

    #[test]
    fn m_zero_disc_state_has_no_azimuthal_derivative() {
        let g = TrapGeometry::circular(1.0, 0.7).unwrap();
        let ms = modes(&[ModeIndex::Circular { m: 0, n: 1 }, ModeIndex::Circular { m: 0, n: 2 }]);
        let s = WaveState::normalized(g, ms, alloc::vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        for phi in [0.0, 1.0, 4.0] {
            assert_eq!(s.gradient(&Point::polar(0.4, phi), 0.3).unwrap().azimuthal, Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn radial_sum_factors_a_single_sector() {
        let g = TrapGeometry::spherical(1.0, 0.6).unwrap();
        let ms = modes(&[ModeIndex::Spherical { l: 1, n: 1, m: 1 }, ModeIndex::Spherical { l: 1, n: 3, m: 1 }]);
        let s = WaveState::normalized(g, ms, alloc::vec![Complex64::new(0.3, 0.2), Complex64::new(-0.5, 1.0)]).unwrap();
        let p = Point::spherical(0.45, 0.9, 2.0);
        let t = 0.7;
        let (v, d) = s.radial_sum(p.radius, t);
        let y = crate::specfun::spherical_harmonic(1, 1, p.theta, p.phi).unwrap();
        let (psi, grad) = s.evaluate_with_gradient(&p, t).unwrap();
        assert!((v * y - psi).norm() < 1e-14);
        assert!((d * y - grad.radial).norm() < 1e-13);
    }

    #[test]
    fn gradient_is_linear_in_the_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = TrapGeometry::cylindrical(1.0, 0.3, 1.5).unwrap();
        let ms = modes(&[ModeIndex::Cylindrical { m: 0, n: 1, k: 1 }, ModeIndex::Cylindrical { m: 1, n: 2, k: 2 }]);
        let c = random_coeffs(&mut rng, 2);
        let s = WaveState::normalized(g, ms.clone(), c).unwrap();
        let p = Point::cylindrical(0.3, 2.5, 0.4);
        let grad = s.gradient(&p, 1.1).unwrap();
        let mut expected = Gradient::zero();
        for (m, c) in ms.iter().zip(s.coeffs()) {
            let (_, gm) = crate::trapstate::basis_value_with_gradient(&g, m, &p, 1.1).unwrap();
            expected.scaled_add(*c, &gm);
        }
        assert!((grad.radial - expected.radial).norm() < 1e-14);
        assert!((grad.axial - expected.axial).norm() < 1e-14);
    }
}
