//! Model parameters, the characteristic roots of the mode equation
//!
//! ```text
//! û'' + r² û' + (r² + m² log(1 + r^{2θ})) û = 0,
//! ```
//!
//! and the radii that split frequency space into zones.
//!
//! The roots are `λ± = −a ± i b` below the critical radius `δ` and
//! `λ± = −a ± d` above it, with `a = r²/2`. The decay factor is always
//! `e^{−a t}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative width around `δ` treated as the double-root case.
pub const CRITICAL_REL_WIDTH: f64 = 1e-9;

/// Relative size of a wrong-signed radicand that is still attributed to
/// roundoff and clamped to zero.
pub const RADICAND_CLAMP: f64 = 1e-12;

/// Dimension, logarithmic exponent and mass of the equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u32,
    pub theta: f64,
    pub m: f64,
}

impl ModelParams {
    pub fn new(n: u32, theta: f64, m: f64) -> Result<Self> {
        let p = Self { n, theta, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParameter {
                field: "n",
                reason: format!("dimension must be at least 1, got {}", self.n),
            });
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::InvalidParameter {
                field: "theta",
                reason: format!("must lie in (0, 1], got {}", self.theta),
            });
        }
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "m",
                reason: format!("must be positive and finite, got {}", self.m),
            });
        }
        Ok(())
    }

    /// `m² log(1 + r^{2θ})`.
    #[inline]
    pub fn mass_term(&self, r: f64) -> f64 {
        self.m * self.m * r.powf(2.0 * self.theta).ln_1p()
    }

    /// `w(r)² = r² + m² log(1 + r^{2θ})`, the squared modulus of the roots.
    #[inline]
    pub fn w_sq(&self, r: f64) -> f64 {
        r * r + self.mass_term(r)
    }

    /// Oscillation frequency of the asymptotic profile.
    #[inline]
    pub fn w(&self, r: f64) -> f64 {
        self.w_sq(r).sqrt()
    }
}

/// `f(r) = r⁴ − 4r² − 4m² log(1 + r^{2θ})`. Negative below `δ`, positive above.
pub fn eval_discriminant_f(r: f64, params: &ModelParams) -> f64 {
    let r2 = r * r;
    r2 * r2 - 4.0 * r2 - 4.0 * params.mass_term(r)
}

const MAX_BRACKET_DOUBLINGS: u32 = 64;

/// Unique root `δ > 2` of the discriminant, by bisection.
///
/// Stops once `|f(δ)| ≤ 10⁻¹²·max(1, δ⁴)` and the bracket is narrower than
/// `10⁻¹³·δ`, or when the bracket can no longer be split in `f64`.
pub fn find_delta(params: &ModelParams) -> Result<f64> {
    let f = |r: f64| eval_discriminant_f(r, params);
    let mut lo = 2.0;
    let mut hi = 4.0;
    let mut doublings = 0;
    while f(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS || !hi.is_finite() {
            return Err(Error::Bracketing {
                iterations: doublings,
            });
        }
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Bracket exhausted; `hi` keeps δ strictly above the last negative point.
            return Ok(hi);
        }
        let fm = f(mid);
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        let center = 0.5 * (lo + hi);
        let width_ok = hi - lo <= 1e-13 * center;
        let resid_ok = f(center).abs() <= 1e-12 * center.powi(4).max(1.0);
        if width_ok && resid_ok {
            return Ok(if center > lo { center } else { hi });
        }
    }
}

/// Radii and exponential rates partitioning frequency space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneThresholds {
    pub delta: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ZoneThresholds {
    /// `find_delta` followed by `select_thresholds`.
    pub fn for_params(params: &ModelParams) -> Result<Self> {
        let delta = find_delta(params)?;
        Ok(select_thresholds(params, delta))
    }

    /// `1 − 4/δ₁² − 4m²/δ₁⁴·log(1 + δ₁^{2θ})`, which equals `f(δ₁)/δ₁⁴`.
    pub fn radicand(&self, params: &ModelParams) -> f64 {
        high_radicand(self.delta1, params)
    }
}

fn high_radicand(r: f64, params: &ModelParams) -> f64 {
    let r2 = r * r;
    1.0 - 4.0 / r2 - 4.0 * params.mass_term(r) / (r2 * r2)
}

/// `δ₀ = min(1, δ/2)`, `δ₁ = δ + 1`, and the rates
/// `α = δ²(1 − √ρ)`, `β = (δ₁²/2)(1 − √ρ)` with `ρ` the radicand at `δ₁`.
pub fn select_thresholds(params: &ModelParams, delta: f64) -> ZoneThresholds {
    let delta0 = (0.5 * delta).min(1.0);
    let delta1 = delta + 1.0;
    let gap = 1.0 - high_radicand(delta1, params).sqrt();
    ZoneThresholds {
        delta,
        delta0,
        delta1,
        alpha: delta * delta * gap,
        beta: 0.5 * delta1 * delta1 * gap,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootZone {
    LowComplex,
    Critical,
    HighReal,
}

/// Characteristic roots at one radius: decay rate `a` plus either the
/// oscillation frequency `b` (complex pair) or the real splitting `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharRoots {
    pub a: f64,
    pub zone: RootZone,
    pub osc: f64,
}

pub fn classify(r: f64, thr: &ZoneThresholds) -> RootZone {
    if (r - thr.delta).abs() <= CRITICAL_REL_WIDTH * thr.delta {
        RootZone::Critical
    } else if r < thr.delta {
        RootZone::LowComplex
    } else {
        RootZone::HighReal
    }
}

pub fn char_roots(r: f64, params: &ModelParams, thr: &ZoneThresholds) -> Result<CharRoots> {
    if !(r > 0.0) {
        return Err(Error::OutOfDomain {
            radius: r,
            domain: "(0, ∞)",
        });
    }
    let a = 0.5 * r * r;
    let zone = classify(r, thr);
    let osc = match zone {
        RootZone::Critical => 0.0,
        RootZone::LowComplex => clamped_sqrt(b_sq(r, params), r, params)?,
        RootZone::HighReal => clamped_sqrt(d_sq(r, params), r, params)?,
    };
    Ok(CharRoots { a, zone, osc })
}

/// `b² = r² + m² log(1 + r^{2θ}) − r⁴/4`.
#[inline]
pub(crate) fn b_sq(r: f64, params: &ModelParams) -> f64 {
    let r2 = r * r;
    params.w_sq(r) - 0.25 * r2 * r2
}

/// `d² = r⁴/4 − r² − m² log(1 + r^{2θ})`.
#[inline]
pub(crate) fn d_sq(r: f64, params: &ModelParams) -> f64 {
    let r2 = r * r;
    0.25 * r2 * r2 - params.w_sq(r)
}

fn clamped_sqrt(value: f64, r: f64, params: &ModelParams) -> Result<f64> {
    if value >= 0.0 {
        return Ok(value.sqrt());
    }
    let r2 = r * r;
    let scale = params.w_sq(r) + 0.25 * r2 * r2;
    if -value <= RADICAND_CLAMP * scale {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand { radius: r, value })
    }
}

/// Remainder `R(r) = 1/b(r) − 1/w(r)` on `(0, δ)`, in the explicit quotient
///
/// ```text
/// R = r⁴ / (2 b w² (2 + √(4 − r⁴/w²)))
/// ```
///
/// which never subtracts nearly equal numbers.
pub fn remainder_r(r: f64, params: &ModelParams, delta: f64) -> Result<f64> {
    if !(r > 0.0 && r < delta) {
        return Err(Error::OutOfDomain {
            radius: r,
            domain: "(0, δ)",
        });
    }
    let w2 = params.w_sq(r);
    let r4 = r * r * r * r;
    let b = clamped_sqrt(b_sq(r, params), r, params)?;
    Ok(r4 / (2.0 * b * w2 * (2.0 + (4.0 - r4 / w2).sqrt())))
}
