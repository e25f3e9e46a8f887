//! Radial initial data given directly in frequency space.
//!
//! The theory only consumes `û₀`, `û₁`, the moment `P₁ = û₁(0)` and the norms
//! `‖u₁‖₁`, `‖u₁‖_{1,θ}`. Each built-in profile has a documented physical-space
//! counterpart from which those norms are derived.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, sphere_area};
use crate::special::gamma;

/// A radial function of `r = |ξ|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RadialProfile {
    Zero,
    /// `amplitude · e^{−s² r²/2}`, the transform of a centred Gaussian of
    /// standard deviation `s`.
    Gaussian {
        scale: f64,
        amplitude: f64,
    },
    /// Wendland C² function `(1−q)₊^{ℓ+1}((ℓ+1)q + 1)`, `q = r/radius`,
    /// `ℓ = ⌊n/2⌋ + 2`. Positive definite on `Rⁿ`, so its inverse transform is
    /// nonnegative.
    WendlandBump {
        radius: f64,
        ell: u32,
    },
    /// `e^{−r²/2} − e^{−r²}`: difference of unit-mass Gaussians with variances 1 and 2.
    GaussianDifference,
}

impl RadialProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Gaussian { scale, amplitude } => {
                amplitude * (-0.5 * scale * scale * r * r).exp()
            }
            RadialProfile::WendlandBump { .. } => 1.0 + self.deviation_from_origin(r),
            RadialProfile::GaussianDifference => (-r * r).exp() * (0.5 * r * r).exp_m1(),
        }
    }

    /// `f(r) − f(0)`, evaluated without cancellation for small `r`.
    pub fn deviation_from_origin(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Zero => 0.0,
            RadialProfile::Gaussian { scale, amplitude } => {
                amplitude * (-0.5 * scale * scale * r * r).exp_m1()
            }
            RadialProfile::WendlandBump { radius, ell } => {
                let q = r / radius;
                if q >= 1.0 {
                    return -1.0;
                }
                let e = f64::from(ell + 1);
                (e * (-q).ln_1p() + (e * q).ln_1p()).exp_m1()
            }
            RadialProfile::GaussianDifference => self.eval(r),
        }
    }

    /// Lower bound on `−log |f(r)/f_scale|`, used to truncate improper
    /// integrals. `∞` where the profile vanishes identically.
    pub fn decay_exponent(&self, r: f64) -> f64 {
        match *self {
            RadialProfile::Zero => f64::INFINITY,
            RadialProfile::Gaussian { scale, .. } => 0.5 * scale * scale * r * r,
            RadialProfile::WendlandBump { radius, .. } => {
                if r >= radius {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            RadialProfile::GaussianDifference => 0.5 * r * r,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, RadialProfile::Zero)
    }
}

/// Built-in data choices by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum DataSpec {
    Gaussian { scale: f64 },
    FourierBump { radius: f64 },
    MeanZeroGaussianDifference,
}

impl DataSpec {
    pub fn build(&self, n: u32, theta: f64) -> Result<FourierData> {
        match *self {
            DataSpec::Gaussian { scale } => FourierData::gaussian(n, theta, scale),
            DataSpec::FourierBump { radius } => FourierData::fourier_bump(n, theta, radius),
            DataSpec::MeanZeroGaussianDifference => FourierData::gaussian_difference(n, theta),
        }
    }
}

/// Initial data `(û₀, û₁)` with the moments the estimates depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierData {
    pub displacement: RadialProfile,
    pub velocity: RadialProfile,
    pub p1: f64,
    pub l1_norm: f64,
    pub l1_theta_norm: f64,
}

impl FourierData {
    /// Centred Gaussian velocity with standard deviation `scale` and unit
    /// mass: `û₁(r) = e^{−s²r²/2}`, `P₁ = ‖u₁‖₁ = 1`,
    /// `‖u₁‖_{1,θ} = 1 + s^θ 2^{θ/2} Γ((n+θ)/2)/Γ(n/2)`.
    pub fn gaussian(n: u32, theta: f64, scale: f64) -> Result<Self> {
        check_positive("scale", scale)?;
        let moment =
            scale.powf(theta) * 2f64.powf(0.5 * theta) * gamma(0.5 * (f64::from(n) + theta))
                / gamma(0.5 * f64::from(n));
        Ok(Self {
            displacement: RadialProfile::Zero,
            velocity: RadialProfile::Gaussian {
                scale,
                amplitude: 1.0,
            },
            p1: 1.0,
            l1_norm: 1.0,
            l1_theta_norm: 1.0 + moment,
        })
    }

    /// Compactly supported velocity transform (Wendland C² bump of the given
    /// radius). Its physical counterpart is nonnegative, so `‖u₁‖₁ = P₁ = 1`;
    /// the `θ`-moment comes from [`fractional_moment`].
    pub fn fourier_bump(n: u32, theta: f64, radius: f64) -> Result<Self> {
        check_positive("radius", radius)?;
        let velocity = RadialProfile::WendlandBump {
            radius,
            ell: n / 2 + 2,
        };
        let moment = fractional_moment(&velocity, n, theta)?;
        Ok(Self {
            displacement: RadialProfile::Zero,
            velocity,
            p1: 1.0,
            l1_norm: 1.0,
            l1_theta_norm: 1.0 + moment,
        })
    }

    /// Mean-zero velocity `u₁ = G₁ − G₂` (unit-mass Gaussians of variance 1
    /// and 2), so `P₁ = 0`. The norms are physical-space radial integrals.
    pub fn gaussian_difference(n: u32, theta: f64) -> Result<Self> {
        let nf = f64::from(n);
        let g = |rho: f64, var: f64| {
            (2.0 * PI * var).powf(-0.5 * nf) * (-rho * rho / (2.0 * var)).exp()
        };
        let density = |rho: f64| (g(rho, 1.0) - g(rho, 2.0)).abs() * rho.powi(n as i32 - 1);
        // densities cross at ρ² = 2n log 2
        let cross = (2.0 * nf * 2f64.ln()).sqrt();
        let bps = [0.0, cross, cross + 10.0, cross + 20.0, 60.0];
        let omega = sphere_area(n)?;
        let l1 = omega * integrate(density, &bps, 1e-13, 100_000)?.value;
        let weighted =
            omega * integrate(|rho| rho.powf(theta) * density(rho), &bps, 1e-13, 100_000)?.value;
        Ok(Self {
            displacement: RadialProfile::Zero,
            velocity: RadialProfile::GaussianDifference,
            p1: 0.0,
            l1_norm: l1,
            l1_theta_norm: l1 + weighted,
        })
    }

    pub fn with_displacement(mut self, displacement: RadialProfile) -> Self {
        self.displacement = displacement;
        self
    }

    #[inline]
    pub fn u0_hat(&self, r: f64) -> f64 {
        self.displacement.eval(r)
    }

    #[inline]
    pub fn u1_hat(&self, r: f64) -> f64 {
        self.p1 + self.velocity.deviation_from_origin(r)
    }

    /// Lower bound on the decay exponent of the data at `r`.
    pub fn decay_exponent(&self, r: f64) -> f64 {
        self.velocity
            .decay_exponent(r)
            .min(self.displacement.decay_exponent(r))
    }
}

fn check_positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            field,
            reason: format!("must be positive, got {v}"),
        })
    }
}

/// `∫ |x|^s u(x) dx` for `0 < s < 2` from the transform alone:
///
/// ```text
/// ∫ |x|^s u dx = C(n,s) ∫ (û(0) − û(ξ)) / |ξ|^{n+s} dξ,
/// C(n,s) = s 2^{s−1} Γ((n+s)/2) / (π^{n/2} Γ(1 − s/2)).
/// ```
///
/// Valid for real radial `û` whose physical counterpart has a finite
/// `s`-moment.
pub fn fractional_moment(profile: &RadialProfile, n: u32, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::InvalidParameter {
            field: "s",
            reason: format!("moment order must lie in (0, 2), got {s}"),
        });
    }
    let nf = f64::from(n);
    let c =
        s * 2f64.powf(s - 1.0) * gamma(0.5 * (nf + s)) / (PI.powf(0.5 * nf) * gamma(1.0 - 0.5 * s));
    let omega = sphere_area(n)?;
    let integrand = |r: f64| -profile.deviation_from_origin(r) * r.powf(-1.0 - s);
    let (inner, tail) = match *profile {
        RadialProfile::WendlandBump { radius, .. } => {
            let bps = crate::quadrature::geometric_breakpoints(0.0, radius);
            (
                integrate(integrand, &bps, 1e-12, 200_000)?.value,
                radius.powf(-s) / s,
            )
        }
        RadialProfile::Gaussian { scale, amplitude } => {
            let hi = 40.0 / scale;
            let bps = crate::quadrature::geometric_breakpoints(0.0, hi);
            (
                integrate(integrand, &bps, 1e-12, 200_000)?.value,
                amplitude * hi.powf(-s) / s,
            )
        }
        _ => {
            return Err(Error::Precondition(
                "fractional moment is defined for Gaussian and bump profiles".into(),
            ))
        }
    };
    Ok(c * omega * (inner + tail))
}
