//! Exact Fourier-mode solutions, the asymptotic profile and the low-frequency
//! remainder decomposition.
//!
//! Every zone is written in the same shape
//!
//! ```text
//! û  = û₀·c(t) + (û₁ + a û₀)·s(t)
//! ût = û₁·c(t) − (w² û₀ + a û₁)·s(t)
//! ```
//!
//! where `c` and `s` are the fundamental solutions with `c(0) = 1`, `s(0) = 0`,
//! `s'(0) = 1` shifted by the decay factor. Only `c` and `s` change between
//! zones.

use serde::{Deserialize, Serialize};

use crate::data::FourierData;
use crate::error::{Error, Result};
use crate::special::{sinc, sinch, SERIES_THRESHOLD};
use crate::symbol::{char_roots, remainder_r, CharRoots, ModelParams, RootZone, ZoneThresholds};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModeValue {
    pub value: f64,
    pub dvalue: f64,
}

/// Fundamental pair at one `(t, r)` together with the quantities the norm
/// integrands need.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Propagator {
    pub a: f64,
    pub w_sq: f64,
    pub roots: CharRoots,
    pub c: f64,
    pub s: f64,
}

impl Propagator {
    pub fn new(t: f64, r: f64, params: &ModelParams, thr: &ZoneThresholds) -> Result<Self> {
        if t < 0.0 {
            return Err(Error::NegativeTime(t));
        }
        if r < 0.0 {
            return Err(Error::OutOfDomain {
                radius: r,
                domain: "[0, ∞)",
            });
        }
        if r == 0.0 {
            let roots = CharRoots {
                a: 0.0,
                zone: RootZone::LowComplex,
                osc: 0.0,
            };
            return Ok(Self {
                a: 0.0,
                w_sq: 0.0,
                roots,
                c: 1.0,
                s: t,
            });
        }
        let roots = char_roots(r, params, thr)?;
        let a = roots.a;
        let w_sq = params.w_sq(r);
        let (c, s) = match roots.zone {
            RootZone::LowComplex => {
                let damp = (-a * t).exp();
                let b = roots.osc;
                (damp * (b * t).cos(), damp * t * sinc(b * t))
            }
            RootZone::Critical => {
                let damp = (-a * t).exp();
                (damp, damp * t)
            }
            RootZone::HighReal => {
                let d = roots.osc;
                // a − d = w²/(a + d) avoids cancellation for large r
                let slow = (-(w_sq / (a + d)) * t).exp();
                let dt = d * t;
                if dt < SERIES_THRESHOLD {
                    let damp = (-a * t).exp();
                    (damp * dt.cosh(), damp * t * sinch(dt))
                } else {
                    let fast_ratio = (-2.0 * dt).exp();
                    (
                        0.5 * slow * (1.0 + fast_ratio),
                        slow * -(-2.0 * dt).exp_m1() / (2.0 * d),
                    )
                }
            }
        };
        Ok(Self {
            a,
            w_sq,
            roots,
            c,
            s,
        })
    }

    pub fn apply(&self, u0: f64, u1: f64) -> ModeValue {
        let c2 = u1 + self.a * u0;
        let k = self.w_sq * u0 + self.a * u1;
        ModeValue {
            value: u0 * self.c + c2 * self.s,
            dvalue: u1 * self.c - k * self.s,
        }
    }
}

/// `(û, ∂ₜû)` at time `t` and radius `r`.
pub fn mode_solution(
    t: f64,
    r: f64,
    data: &FourierData,
    params: &ModelParams,
    thr: &ZoneThresholds,
) -> Result<ModeValue> {
    let prop = Propagator::new(t, r, params, thr)?;
    Ok(prop.apply(data.u0_hat(r), data.u1_hat(r)))
}

/// Asymptotic profile `P₁ e^{−r²t/2} sin(t w)/w`.
pub fn profile_phi(t: f64, r: f64, p1: f64, params: &ModelParams) -> f64 {
    let w = params.w(r);
    p1 * (-0.5 * r * r * t).exp() * t * sinc(t * w)
}

fn low_zone_check(r: f64, thr: &ZoneThresholds) -> Result<()> {
    if r > 0.0 && r < thr.delta {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            radius: r,
            domain: "(0, δ)",
        })
    }
}

/// `F₁ = P₁ e^{−at} R(r) sin(t w)`.
pub fn remainder_f1(
    t: f64,
    r: f64,
    p1: f64,
    params: &ModelParams,
    thr: &ZoneThresholds,
) -> Result<f64> {
    low_zone_check(r, thr)?;
    let rr = remainder_r(r, params, thr.delta)?;
    Ok(p1 * (-0.5 * r * r * t).exp() * rr * (t * params.w(r)).sin())
}

/// `F₃ = A(r) e^{−at} sin(bt)/b`.
pub fn remainder_f3(
    t: f64,
    r: f64,
    data: &FourierData,
    params: &ModelParams,
    thr: &ZoneThresholds,
) -> Result<f64> {
    low_zone_check(r, thr)?;
    let b = char_roots(r, params, thr)?.osc;
    let (a_part, _) = decompose_data(data, r);
    Ok(a_part * (-0.5 * r * r * t).exp() * t * sinc(b * t))
}

/// `|b − w|` in the form `r⁴/(4(b + w))`.
pub fn root_gap(r: f64, b: f64, w: f64) -> f64 {
    let r2 = r * r;
    r2 * r2 / (4.0 * (b + w))
}

/// Upper envelope `t |P₁| e^{−at} |b − w| / b` of the mean-value term `F₂`.
pub fn remainder_f2_envelope(
    t: f64,
    r: f64,
    p1: f64,
    params: &ModelParams,
    thr: &ZoneThresholds,
) -> Result<f64> {
    low_zone_check(r, thr)?;
    let b = char_roots(r, params, thr)?.osc;
    let w = params.w(r);
    Ok(t * p1.abs() * (-0.5 * r * r * t).exp() * root_gap(r, b, w) / b)
}

/// `(A, B)` with `û₁ = P₁ + A − iB`. Radial real data have `B = 0`.
pub fn decompose_data(data: &FourierData, r: f64) -> (f64, f64) {
    (data.velocity.deviation_from_origin(r), 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeEnergy {
    pub energy: f64,
    pub dissipation: f64,
}

/// Energy density `½(ût² + w² û²)` and its dissipation rate `r² ût²`.
pub fn mode_energy(
    t: f64,
    r: f64,
    data: &FourierData,
    params: &ModelParams,
    thr: &ZoneThresholds,
) -> Result<ModeEnergy> {
    let v = mode_solution(t, r, data, params, thr)?;
    Ok(energy_of(v, r, params))
}

pub(crate) fn energy_of(v: ModeValue, r: f64, params: &ModelParams) -> ModeEnergy {
    ModeEnergy {
        energy: 0.5 * (v.dvalue * v.dvalue + params.w_sq(r) * v.value * v.value),
        dissipation: r * r * v.dvalue * v.dvalue,
    }
}
