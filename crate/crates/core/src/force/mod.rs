//! The quantum effective force `d⟨p⟩/dt` along a fixed direction.
//!
//! Three independent routes are provided:
//!
//! * closed-form mode sums over boundary derivatives ([`force_closed_form`]),
//! * direct quadrature of `−(ħ²/2μ)∮ (n̂·∇ψ*)(q̂·∇ψ) da` over the wall
//!   ([`force_surface_quadrature`]),
//! * the Bohmian expectation `⟨−∂_q Q⟩` of the quantum potential
//!   ([`force_from_quantum_potential`]).

mod closed;
mod potential;
mod surface;

use crate::error::{Error, Result};
use crate::math::{cos, floor, sin, FRAC_PI_2, PI, TAU};

pub use closed::{
    force_closed_form, force_cylinder_phi, force_cylinder_rho, force_cylinder_z, force_sphere_phi, force_sphere_r,
    force_sphere_theta,
};
pub use potential::{
    force_from_quantum_potential, momentum_expectation, quantum_potential, quantum_potential_of, PotentialOptions,
    NODE_THRESHOLD,
};
pub use surface::force_surface_quadrature;

/// Relative imaginary residue tolerated before a force is reported as real.
pub const REALITY_TOLERANCE: f64 = 1e-10;

/// Which unit vector a [`Direction`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    /// The fixed axis `ẑ`.
    CartesianZ,
    /// `r̂₀` (or `ρ̂₀` with `θ₀ = π/2`).
    Radial,
    /// `θ̂₀`.
    Polar,
    /// `φ̂₀`.
    Azimuthal,
}

/// A fixed unit vector labelled by a frame and the angles `(θ₀, φ₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    frame: Frame,
    theta0: f64,
    phi0: f64,
}

impl Direction {
    pub fn new(frame: Frame, theta0: f64, phi0: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta0) {
            return Err(Error::InvalidParameter(alloc::format!("θ₀ must lie in [0, π], got {theta0}")));
        }
        if !phi0.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("φ₀ must be finite, got {phi0}")));
        }
        let mut phi0 = phi0 - TAU * floor(phi0 / TAU);
        if phi0 >= TAU {
            phi0 = 0.0;
        }
        let theta0 = if frame == Frame::CartesianZ { 0.0 } else { theta0 };
        Ok(Self { frame, theta0, phi0 })
    }

    pub fn z() -> Self {
        Self { frame: Frame::CartesianZ, theta0: 0.0, phi0: 0.0 }
    }

    /// In-plane radial direction `ρ̂₀`.
    pub fn planar_radial(phi0: f64) -> Result<Self> {
        Self::new(Frame::Radial, FRAC_PI_2, phi0)
    }

    /// In-plane azimuthal direction `φ̂₀`.
    pub fn planar_azimuthal(phi0: f64) -> Result<Self> {
        Self::new(Frame::Azimuthal, FRAC_PI_2, phi0)
    }

    pub fn radial(theta0: f64, phi0: f64) -> Result<Self> {
        Self::new(Frame::Radial, theta0, phi0)
    }

    pub fn polar(theta0: f64, phi0: f64) -> Result<Self> {
        Self::new(Frame::Polar, theta0, phi0)
    }

    pub fn azimuthal(theta0: f64, phi0: f64) -> Result<Self> {
        Self::new(Frame::Azimuthal, theta0, phi0)
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    /// Cartesian components of the unit vector.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = (sin(self.theta0), cos(self.theta0));
        let (sp, cp) = (sin(self.phi0), cos(self.phi0));
        match self.frame {
            Frame::CartesianZ => [0.0, 0.0, 1.0],
            Frame::Radial => [st * cp, st * sp, ct],
            Frame::Polar => [ct * cp, ct * sp, -st],
            Frame::Azimuthal => [-sp, cp, 0.0],
        }
    }
}

/// How a [`ForceSample`] was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForceMethod {
    ClosedForm,
    SurfaceQuadrature,
    QuantumPotential,
}

impl ForceMethod {
    pub fn name(self) -> &'static str {
        match self {
            ForceMethod::ClosedForm => "closed-form",
            ForceMethod::SurfaceQuadrature => "surface-quadrature",
            ForceMethod::QuantumPotential => "quantum-potential",
        }
    }
}

/// One evaluation of `d⟨p_q⟩/dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSample {
    pub t: f64,
    pub direction: Direction,
    pub value: f64,
    pub method: ForceMethod,
    /// Estimated absolute error (zero for exact rules).
    pub error: f64,
    /// Fraction of integrand evaluations skipped near nodes (quantum-potential
    /// path only).
    pub excluded_fraction: f64,
}

impl ForceSample {
    fn exact(t: f64, direction: Direction, value: f64, method: ForceMethod) -> Self {
        Self { t, direction, value, method, error: 0.0, excluded_fraction: 0.0 }
    }
}

/// Accepts a complex force if its imaginary part is negligible.
pub(crate) fn real_part(value: num_complex::Complex64, scale: f64) -> Result<f64> {
    let bound = REALITY_TOLERANCE * value.re.abs().max(scale).max(1e-300);
    if value.im.abs() > bound && value.im.abs() > 1e-13 {
        return Err(Error::ImaginaryResidue { real: value.re, imag: value.im });
    }
    Ok(value.re)
}

pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{expand_initial_eigenstate, ExpansionOptions};
    use crate::trapstate::{Mode, ModeIndex, TrapGeometry, TrapKind, WaveState};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn state(g: TrapGeometry, indices: &[ModeIndex], coeffs: &[Complex64]) -> WaveState {
        let modes = indices.iter().map(|&i| Mode::new(i).unwrap()).collect();
        WaveState::normalized(g, modes, coeffs.to_vec()).unwrap()
    }

    fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    fn random_direction(rng: &mut ChaCha8Rng, kind: TrapKind) -> Direction {
        let phi = rng.random_range(0.0..TAU);
        match kind {
            TrapKind::Spherical => {
                let theta = rng.random_range(0.0..PI);
                match rng.random_range(0..4) {
                    0 => Direction::radial(theta, phi),
                    1 => Direction::polar(theta, phi),
                    2 => Direction::azimuthal(theta, phi),
                    _ => Ok(Direction::z()),
                }
                .unwrap()
            }
            _ => if rng.random_bool(0.5) { Direction::planar_radial(phi) } else { Direction::planar_azimuthal(phi) }.unwrap(),
        }
    }

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn directions_are_unit_vectors() {
        let d = Direction::new(Frame::Radial, 0.3, -1.0).unwrap();
        assert!((d.phi0() - (TAU - 1.0)).abs() < 1e-15);
        assert!(Direction::radial(4.0, 0.0).is_err());
        assert!(Direction::radial(1.0, f64::NAN).is_err());
        for frame in [Frame::Radial, Frame::Polar, Frame::Azimuthal, Frame::CartesianZ] {
            let v = Direction::new(frame, 1.1, 2.3).unwrap().unit_vector();
            assert!((dot(&v, &v) - 1.0).abs() < 1e-15);
        }
        let r = Direction::radial(1.1, 2.3).unwrap().unit_vector();
        let t = Direction::polar(1.1, 2.3).unwrap().unit_vector();
        let p = Direction::azimuthal(1.1, 2.3).unwrap().unit_vector();
        assert!(dot(&r, &t).abs() < 1e-15 && dot(&r, &p).abs() < 1e-15 && dot(&t, &p).abs() < 1e-15);
    }

    #[test]
    fn stationary_states_feel_no_force() {
        let g = TrapGeometry::spherical(1.0, 0.0).unwrap();
        let s = state(g, &[ModeIndex::Spherical { l: 0, n: 1, m: 0 }], &[ONE]);
        for d in [Direction::radial(0.4, 1.0).unwrap(), Direction::z()] {
            assert!(force_closed_form(&s, d, 0.7).unwrap().value.abs() < 1e-14);
            assert!(force_surface_quadrature(&s, d, 0.7).unwrap().value.abs() < 1e-12);
            let q = force_from_quantum_potential(&s, d, 0.7, PotentialOptions::default()).unwrap();
            assert!(q.value.abs() < 1e-6, "{}", q.value);
        }
    }

    #[test]
    fn single_cylinder_modes_feel_no_force() {
        let g = TrapGeometry::cylindrical(1.0, 0.6, 2.0).unwrap();
        let s = state(g, &[ModeIndex::Cylindrical { m: 1, n: 2, k: 1 }], &[ONE]);
        for t in [0.0, 0.4] {
            assert!(force_cylinder_rho(&s, 0.3, t).unwrap().value.abs() < 1e-12);
            assert!(force_cylinder_phi(&s, 0.3, t).unwrap().value.abs() < 1e-12);
            assert!(force_cylinder_z(&s, t).unwrap().value.abs() < 1e-12);
        }
    }

    #[test]
    fn cylinder_closed_form_matches_surface_quadrature() {
        let g = TrapGeometry::cylindrical(1.0, -0.5, 1.5).unwrap();
        let s = state(g, &[ModeIndex::Cylindrical { m: 0, n: 1, k: 1 }, ModeIndex::Cylindrical { m: 1, n: 1, k: 1 }], &[ONE, ONE]);
        let t = 0.3;
        let rho = force_cylinder_rho(&s, 0.8, t).unwrap();
        assert!(rho.value.abs() > 1e-2);
        let check = force_surface_quadrature(&s, Direction::planar_radial(0.8).unwrap(), t).unwrap();
        assert!((rho.value - check.value).abs() < 1e-8);
        let phi = force_cylinder_phi(&s, 0.8, t).unwrap();
        let check = force_surface_quadrature(&s, Direction::planar_azimuthal(0.8).unwrap(), t).unwrap();
        assert!((phi.value - check.value).abs() < 1e-8);
    }

    #[test]
    fn cylinder_axial_parity() {
        let g = TrapGeometry::cylindrical(1.0, 0.4, 1.0).unwrap();
        let even = state(g, &[ModeIndex::Cylindrical { m: 0, n: 1, k: 1 }, ModeIndex::Cylindrical { m: 0, n: 1, k: 3 }], &[ONE, ONE]);
        assert!(force_cylinder_z(&even, 0.2).unwrap().value.abs() < 1e-12);
        let odd = state(g, &[ModeIndex::Cylindrical { m: 0, n: 1, k: 1 }, ModeIndex::Cylindrical { m: 0, n: 1, k: 2 }], &[ONE, ONE]);
        let z = force_cylinder_z(&odd, 0.2).unwrap().value;
        assert!(z.abs() > 1e-2);
        let check = force_surface_quadrature(&odd, Direction::z(), 0.2).unwrap().value;
        assert!((z - check).abs() < 1e-8);
    }

    #[test]
    fn expansion_states_feel_no_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cases = [
            (TrapGeometry::from_alpha(TrapKind::Circular, 1.0, -1.9, None).unwrap(), ModeIndex::Circular { m: 1, n: 1 }),
            (TrapGeometry::from_alpha(TrapKind::Spherical, 1.0, 0.78, None).unwrap(), ModeIndex::Spherical { l: 0, n: 1, m: 0 }),
            (TrapGeometry::from_alpha(TrapKind::Spherical, 1.0, -2.2, None).unwrap(), ModeIndex::Spherical { l: 1, n: 1, m: 1 }),
        ];
        for (g, index) in cases {
            let s = expand_initial_eigenstate(&g, index, ExpansionOptions::default()).unwrap();
            let horizon = 0.8 / g.wall_speed().abs();
            for _ in 0..5 {
                let t = rng.random_range(0.0..horizon);
                let d = random_direction(&mut rng, g.kind());
                assert!(force_closed_form(&s, d, t).unwrap().value.abs() < 1e-6);
                assert!(force_surface_quadrature(&s, d, t).unwrap().value.abs() < 1e-6);
            }
        }
        let s = expand_initial_eigenstate(&cases[1].0, cases[1].1, ExpansionOptions::default()).unwrap();
        let q = force_from_quantum_potential(&s, Direction::radial(0.9, 0.2).unwrap(), 0.3, PotentialOptions::default()).unwrap();
        assert!(q.value.abs() < 1e-4, "{}", q.value);
    }

    #[test]
    fn three_methods_agree_on_a_mixed_sphere_state() {
        let g = TrapGeometry::spherical(1.0, 0.9).unwrap();
        let s = state(
            g,
            &[ModeIndex::Spherical { l: 0, n: 1, m: 0 }, ModeIndex::Spherical { l: 1, n: 1, m: 0 }],
            &[ONE, Complex64::new(0.3, 0.7)],
        );
        let t = 0.35;
        for theta0 in [0.0, 0.7, 2.0] {
            let d = Direction::radial(theta0, 0.4).unwrap();
            let closed = force_closed_form(&s, d, t).unwrap().value;
            let surface = force_surface_quadrature(&s, d, t).unwrap().value;
            let q = force_from_quantum_potential(&s, d, t, PotentialOptions::default()).unwrap().value;
            assert!((closed - surface).abs() < 1e-8);
            assert!((closed - q).abs() < 1e-4, "{closed} vs {q}");
            // only the z component survives for an m = 0 mixture
            let fz = force_closed_form(&s, Direction::z(), t).unwrap().value;
            assert!((closed - fz * theta0.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn random_superpositions_agree_across_methods() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..4 {
            let alpha = rng.random_range(-1.5..1.5);
            let (g, indices) = if rng.random_bool(0.5) {
                let g = TrapGeometry::from_alpha(TrapKind::Circular, 1.0, alpha, None).unwrap();
                (g, alloc::vec![ModeIndex::Circular { m: 0, n: 1 }, ModeIndex::Circular { m: 0, n: 2 }, ModeIndex::Circular { m: 1, n: 1 }])
            } else {
                let g = TrapGeometry::from_alpha(TrapKind::Spherical, 1.0, alpha, None).unwrap();
                let m = rng.random_range(-1..=1);
                (g, alloc::vec![ModeIndex::Spherical { l: 0, n: 1, m: 0 }, ModeIndex::Spherical { l: 1, n: 1, m }, ModeIndex::Spherical { l: 1, n: 2, m }])
            };
            let s = state(g, &indices, &random_coeffs(&mut rng, indices.len()));
            let t = rng.random_range(0.0..0.5 / alpha.abs().max(0.5));
            let d = random_direction(&mut rng, g.kind());
            let closed = force_closed_form(&s, d, t).unwrap();
            let surface = force_surface_quadrature(&s, d, t).unwrap();
            assert_eq!(closed.method, ForceMethod::ClosedForm);
            assert!((closed.value - surface.value).abs() < 1e-8, "{} vs {}", closed.value, surface.value);
        }
    }

    #[test]
    fn direction_decomposition_and_rotation() {
        let g = TrapGeometry::spherical(1.0, -0.7).unwrap();
        let s = state(
            g,
            &[ModeIndex::Spherical { l: 0, n: 1, m: 0 }, ModeIndex::Spherical { l: 1, n: 1, m: 1 }, ModeIndex::Spherical { l: 1, n: 1, m: 0 }],
            &[ONE, Complex64::new(0.2, -0.5), Complex64::new(0.4, 0.1)],
        );
        let t = 0.5;
        let f = |d: Direction| force_closed_form(&s, d, t).unwrap().value;
        let fx = f(Direction::radial(FRAC_PI_2, 0.0).unwrap());
        let fy = f(Direction::radial(FRAC_PI_2, FRAC_PI_2).unwrap());
        let fz = f(Direction::z());
        for (theta0, phi0) in [(0.3, 1.0), (1.2, 4.0), (2.9, 5.5)] {
            for d in [Direction::radial(theta0, phi0).unwrap(), Direction::polar(theta0, phi0).unwrap(), Direction::azimuthal(theta0, phi0).unwrap()] {
                let v = d.unit_vector();
                assert!((f(d) - (v[0] * fx + v[1] * fy + v[2] * fz)).abs() < 1e-12);
            }
            // the equatorial part flips under φ₀ → φ₀ + π
            let a = f(Direction::radial(FRAC_PI_2, phi0).unwrap());
            let b = f(Direction::radial(FRAC_PI_2, phi0 + PI).unwrap());
            assert!((a + b).abs() < 1e-12);
        }
        let e = f(Direction::polar(0.7, 1.0).unwrap());
        let expected = 0.7f64.cos() * (1.0f64.cos() * fx + 1.0f64.sin() * fy) - 0.7f64.sin() * fz;
        assert!((e - expected).abs() < 1e-12);
    }

    #[test]
    fn force_is_the_rate_of_momentum_change() {
        let g = TrapGeometry::circular(1.0, 0.8).unwrap();
        let s = state(g, &[ModeIndex::Circular { m: 0, n: 1 }, ModeIndex::Circular { m: 1, n: 1 }], &[ONE, Complex64::new(0.0, 1.0)]);
        let d = Direction::planar_radial(0.6).unwrap();
        let t = 0.4;
        let h = 1e-4 * s.modes()[0].time_scale(1.0);
        let p = |t: f64| momentum_expectation(&s, d, t, 1e-11).unwrap();
        let numeric = (p(t + h) - p(t - h)) / (2.0 * h);
        let closed = force_closed_form(&s, d, t).unwrap().value;
        assert!((numeric - closed).abs() < 1e-5 * closed.abs().max(1.0), "{numeric} vs {closed}");
    }

    #[test]
    fn quantum_potential_examples() {
        let g = TrapGeometry::spherical(1.0, 0.0).unwrap();
        let s = state(g, &[ModeIndex::Spherical { l: 0, n: 1, m: 0 }], &[ONE]);
        for r in [0.1, 0.4, 0.8] {
            let q = quantum_potential(&s, &crate::trapstate::Point::spherical(r, 1.0, 2.0), 0.5).unwrap();
            assert!((q - PI * PI / 2.0).abs() < 1e-5, "Q({r}) = {q}");
        }
        let gauss = |x: [f64; 3]| libm::exp(-0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
        for x in [[0.0, 0.0, 0.0], [0.5, -0.3, 1.0], [1.5, 0.2, 0.1]] {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            let q = quantum_potential_of(gauss, x, 1e-4, 1.0);
            assert!((q - (1.5 - 0.5 * r2)).abs() < 1e-6);
            assert!((quantum_potential_of(gauss, x, 1e-4, 2.0) - 2.0 * q).abs() < 1e-12);
        }
        // the node of the first excited l = 1 state along θ = π/2
        let s = state(g, &[ModeIndex::Spherical { l: 1, n: 1, m: 0 }], &[ONE]);
        assert!(matches!(
            quantum_potential(&s, &crate::trapstate::Point::spherical(0.5, FRAC_PI_2, 0.0), 0.0),
            Err(Error::NodeProximity { .. })
        ));
    }

    #[test]
    fn wrong_geometry_is_rejected() {
        let g = TrapGeometry::spherical(1.0, 0.3).unwrap();
        let s = state(g, &[ModeIndex::Spherical { l: 0, n: 1, m: 0 }], &[ONE]);
        assert!(matches!(force_cylinder_rho(&s, 0.0, 0.0), Err(Error::GeometryMismatch { .. })));
        let d = TrapGeometry::circular(1.0, 0.3).unwrap();
        let s = state(d, &[ModeIndex::Circular { m: 0, n: 1 }], &[ONE]);
        assert!(matches!(force_sphere_r(&s, 0.0, 0.0, 0.0), Err(Error::GeometryMismatch { .. })));
    }

    #[test]
    fn complex_residue_is_rejected() {
        assert!(real_part(Complex64::new(1.0, 1e-12), 1.0).is_ok());
        assert!(matches!(real_part(Complex64::new(1.0, 1e-6), 1.0), Err(Error::ImaginaryResidue { .. })));
    }
}
