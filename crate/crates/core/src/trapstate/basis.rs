use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{cos, sin, sqrt, PI, TAU};
use crate::specfun::{jn_with_derivative, sph_jn_with_derivative, theta_factor};

use super::{Gradient, Mode, ModeIndex, Point, TrapGeometry, TrapKind};

/// The radial part of a basis function, quadratic phase included, and its
/// radial derivative.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialFactor {
    pub value: Complex64,
    pub derivative: Complex64,
}

impl RadialFactor {
    pub(crate) fn new(geometry: &TrapGeometry, mode: &Mode, r: f64, t: f64) -> Self {
        RadialParts::new(geometry, mode, r, t).factor()
    }

    /// The factor together with its second radial derivative.
    pub(crate) fn with_second(geometry: &TrapGeometry, mode: &Mode, r: f64, t: f64) -> (Self, Complex64) {
        let p = RadialParts::new(geometry, mode, r, t);
        (p.factor(), p.second())
    }
}

/// `c j(x r/L)` with its radial derivatives and the quadratic phase
/// `e^{iβr²}` (time phase included) that multiplies it.
struct RadialParts {
    spherical: bool,
    order: u32,
    /// Scaled argument `x r/L` and wavenumber `x/L`.
    s: f64,
    k: f64,
    amp: f64,
    damp: f64,
    j: f64,
    dj: f64,
    c: f64,
    phase: Complex64,
    /// `2β`, so the phase slope is `2βr`.
    curvature: f64,
    r: f64,
}

impl RadialParts {
    fn new(geometry: &TrapGeometry, mode: &Mode, r: f64, t: f64) -> Self {
        let l = geometry.wall(t);
        let x = mode.zero();
        let order = mode.index().radial_order();
        let s = x * r / l;
        let k = x / l;
        let spherical = geometry.kind() == TrapKind::Spherical;
        let (c, (j, dj)) = if spherical {
            (sqrt(2.0 / (l * l * l)) * mode.inv_edge(), sph_jn_with_derivative(order, s))
        } else {
            (crate::math::SQRT_2 / l * mode.inv_edge(), jn_with_derivative(order, s))
        };
        let a = geometry.radius();
        let alpha = geometry.alpha();
        let xi = geometry.xi(t);
        let phase = alpha * xi * (r / l) * (r / l) - x * x * t / (2.0 * a * l);
        Self {
            spherical,
            order,
            s,
            k,
            amp: c * j,
            damp: c * dj * k,
            j,
            dj,
            c,
            phase: Complex64::cis(phase),
            curvature: 2.0 * alpha * xi / (l * l),
            r,
        }
    }

    fn factor(&self) -> RadialFactor {
        let slope = self.curvature * self.r;
        RadialFactor { value: self.phase * self.amp, derivative: self.phase * Complex64::new(self.damp, slope * self.amp) }
    }

    fn second(&self) -> Complex64 {
        let (s, j, dj) = (self.s, self.j, self.dj);
        let nu = self.order as f64;
        let d2j = if s < 1e-8 {
            // limits of the Bessel equation at the origin
            match (self.spherical, self.order) {
                (true, 0) => -1.0 / 3.0,
                (true, 2) => 2.0 / 15.0,
                (false, 0) => -0.5,
                (false, 2) => 0.25,
                _ => 0.0,
            }
        } else if self.spherical {
            -2.0 * dj / s - (1.0 - nu * (nu + 1.0) / (s * s)) * j
        } else {
            -dj / s - (1.0 - nu * nu / (s * s)) * j
        };
        let d2amp = self.c * d2j * self.k * self.k;
        let slope = self.curvature * self.r;
        let (amp, damp) = (self.amp, self.damp);
        self.phase * Complex64::new(d2amp - slope * slope * amp, 2.0 * slope * damp + self.curvature * amp)
    }
}

/// Angular (and axial) factor with its derivatives in θ, φ and z.
pub(crate) struct AngularFactor {
    pub value: Complex64,
    pub d_theta: Complex64,
    pub d_phi: Complex64,
    pub d_z: Complex64,
}

impl AngularFactor {
    pub(crate) fn new(geometry: &TrapGeometry, index: &ModeIndex, p: &Point, t: f64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        match *index {
            ModeIndex::Circular { m, .. } => {
                let e = Complex64::cis(m as f64 * p.phi) / sqrt(TAU);
                Self { value: e, d_theta: zero, d_phi: e * Complex64::new(0.0, m as f64), d_z: zero }
            }
            ModeIndex::Cylindrical { m, k, .. } => {
                let h = geometry.height().unwrap_or(1.0);
                let kz = k as f64 * PI / h;
                let c = sqrt(2.0 / h);
                let axial_phase = -(kz * kz) * t / 2.0;
                let e = Complex64::cis(m as f64 * p.phi + axial_phase) / sqrt(TAU) * c;
                let value = e * sin(kz * p.z);
                Self {
                    value,
                    d_theta: zero,
                    d_phi: value * Complex64::new(0.0, m as f64),
                    d_z: e * (kz * cos(kz * p.z)),
                }
            }
            ModeIndex::Spherical { l, m, .. } => {
                let (th, dth) = theta_factor(l, m, p.theta);
                let e = Complex64::cis(m as f64 * p.phi);
                let value = e * th;
                Self { value, d_theta: e * dth, d_phi: value * Complex64::new(0.0, m as f64), d_z: zero }
            }
        }
    }
}

fn check_kind(geometry: &TrapGeometry, mode: &Mode) -> Result<()> {
    let found = mode.index().kind();
    if found != geometry.kind() {
        return Err(Error::GeometryMismatch { expected: geometry.kind().name(), found: found.name() });
    }
    Ok(())
}

/// Value and gradient without kind or domain checks. Points outside the
/// box give the analytic continuation of the basis function.
pub(crate) fn value_with_gradient_unchecked(
    geometry: &TrapGeometry,
    mode: &Mode,
    p: &Point,
    t: f64,
) -> (Complex64, Gradient) {
    let radial = RadialFactor::new(geometry, mode, p.radius, t);
    let ang = AngularFactor::new(geometry, &mode.index(), p, t);
    let grad = Gradient {
        radial: radial.derivative * ang.value,
        polar: radial.value * ang.d_theta,
        azimuthal: radial.value * ang.d_phi,
        axial: radial.value * ang.d_z,
    };
    (radial.value * ang.value, grad)
}

pub(crate) fn value_unchecked(geometry: &TrapGeometry, mode: &Mode, p: &Point, t: f64) -> Complex64 {
    RadialFactor::new(geometry, mode, p.radius, t).value * AngularFactor::new(geometry, &mode.index(), p, t).value
}

/// Evaluates one exact basis function at `p` and time `t`.
pub fn basis_value(geometry: &TrapGeometry, mode: &Mode, p: &Point, t: f64) -> Result<Complex64> {
    check_kind(geometry, mode)?;
    geometry.check_point(p, t)?;
    Ok(value_unchecked(geometry, mode, p, t))
}

/// Evaluates one exact basis function and its coordinate derivatives.
pub fn basis_value_with_gradient(
    geometry: &TrapGeometry,
    mode: &Mode,
    p: &Point,
    t: f64,
) -> Result<(Complex64, Gradient)> {
    check_kind(geometry, mode)?;
    geometry.check_point(p, t)?;
    Ok(value_with_gradient_unchecked(geometry, mode, p, t))
}

/// Disc or cylinder basis function at `(ρ, φ, z)`; `z` is ignored for the
/// disc.
pub fn basis_cylindrical(geometry: &TrapGeometry, mode: &Mode, rho: f64, phi: f64, z: f64, t: f64) -> Result<Complex64> {
    basis_value(geometry, mode, &Point::cylindrical(rho, phi, z), t)
}

/// Sphere basis function `g_ln(r,t) Y_lm(θ,φ)`.
pub fn basis_spherical(geometry: &TrapGeometry, mode: &Mode, r: f64, theta: f64, phi: f64, t: f64) -> Result<Complex64> {
    basis_value(geometry, mode, &Point::spherical(r, theta, phi), t)
}
