//! Radial reduction and adaptive integration.
//!
//! Every integrand in this crate is radial, so `∫ g(|ξ|) dξ = ωₙ ∫ g(r) r^{n−1} dr`.
//! The one-dimensional integrals are computed by globally adaptive 7/15-point
//! Gauss–Kronrod panels. Oscillatory integrands get their initial panels from
//! a monotone phase function so that no panel spans more than `π/8` of phase.

mod norms;

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::gamma;

pub use norms::{
    energy_integral, norm_sq_error, norm_sq_profile, norm_sq_solution, NormBreakdown,
    AVERAGING_PHASE,
};

/// Largest phase increment allowed inside one initial panel.
pub const PHASE_STEP: f64 = PI / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum QuadMode {
    /// Integrate the oscillating integrand panel by panel.
    Resolved,
    /// Replace `sin²` by its mean on the low zone once the phase is large.
    #[default]
    Averaged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub mode: QuadMode,
    pub rel_tol: f64,
    pub max_panels: usize,
    pub tail_cutoff_exponent: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            mode: QuadMode::Averaged,
            rel_tol: 1e-8,
            max_panels: 2_000_000,
            tail_cutoff_exponent: 40.0,
        }
    }
}

impl QuadratureConfig {
    pub fn resolved() -> Self {
        Self {
            mode: QuadMode::Resolved,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter {
                field: "rel_tol",
                reason: format!("must be positive, got {}", self.rel_tol),
            });
        }
        if self.max_panels < 64 {
            return Err(Error::InvalidParameter {
                field: "max_panels",
                reason: format!("must be at least 64, got {}", self.max_panels),
            });
        }
        if !(self.tail_cutoff_exponent > 0.0) {
            return Err(Error::InvalidParameter {
                field: "tail_cutoff_exponent",
                reason: format!("must be positive, got {}", self.tail_cutoff_exponent),
            });
        }
        Ok(())
    }
}

/// Integral value with its accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate {
        value: 0.0,
        error: 0.0,
        panels: 0,
    };

    fn scaled(self, k: f64) -> Self {
        Self {
            value: self.value * k,
            error: self.error * k.abs(),
            ..self
        }
    }
}

/// Surface area of the unit sphere in `Rⁿ`, `ωₙ = 2π^{n/2}/Γ(n/2)`.
pub fn sphere_area(n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            field: "n",
            reason: "dimension must be at least 1".into(),
        });
    }
    let h = 0.5 * f64::from(n);
    Ok(2.0 * PI.powf(h) / gamma(h))
}

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae on [0, 1]).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let k = kronrod * h;
    let err = ((kronrod - gauss) * h).abs();
    (k, if err.is_nan() { f64::INFINITY } else { err })
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Absolute tolerance below which a sum of panel errors is considered zero.
const ABS_FLOOR: f64 = 1e-300;

/// Globally adaptive Gauss–Kronrod integration over the union of the panels
/// delimited by `breakpoints` (sorted, at least two entries).
///
/// Refines the panel with the largest error until the summed error is at
/// most `rel_tol·|value|`. Fails with [`Error::NonConvergence`] when the panel
/// budget is exhausted.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    rel_tol: f64,
    max_panels: usize,
) -> Result<Estimate> {
    if breakpoints.len() < 2 {
        return Ok(Estimate::ZERO);
    }
    if breakpoints.len() - 1 > max_panels {
        return Err(Error::NonConvergence {
            value: f64::NAN,
            error: f64::INFINITY,
            panels: breakpoints.len() - 1,
        });
    }
    let mut heap = BinaryHeap::with_capacity(2 * breakpoints.len());
    let (mut total, mut err) = (0.0, 0.0);
    for w in breakpoints.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gauss_kronrod(&f, w[0], w[1]);
        total += v;
        err += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let mut since_resum = 0usize;
    loop {
        if err <= (rel_tol * total.abs()).max(ABS_FLOOR) || since_resum >= 1024 {
            // Re-sum to shed accumulated cancellation before deciding.
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
            since_resum = 0;
            if err <= (rel_tol * total.abs()).max(ABS_FLOOR) {
                break;
            }
        }
        if !total.is_finite() {
            return Err(Error::NonConvergence {
                value: total,
                error: err,
                panels: heap.len(),
            });
        }
        if heap.len() >= max_panels {
            return Err(Error::NonConvergence {
                value: total,
                error: err,
                panels: heap.len(),
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            return Err(Error::NonConvergence {
                value: total,
                error: err,
                panels: heap.len(),
            });
        }
        let (v1, e1) = gauss_kronrod(&f, worst.a, mid);
        let (v2, e2) = gauss_kronrod(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        since_resum += 1;
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    Ok(Estimate {
        value: panels.iter().map(|p| p.value).sum(),
        error: panels.iter().map(|p| p.error).sum(),
        panels: panels.len(),
    })
}

/// Breakpoints at which a nondecreasing `phase` advances by [`PHASE_STEP`].
pub fn phase_breakpoints<P: Fn(f64) -> f64>(
    phase: P,
    lo: f64,
    hi: f64,
    max_panels: usize,
) -> Result<Vec<f64>> {
    let p_lo = phase(lo);
    let p_hi = phase(hi);
    let span = (p_hi - p_lo).max(0.0);
    let count = (span / PHASE_STEP).ceil() as usize;
    if count > max_panels {
        return Err(Error::NonConvergence {
            value: f64::NAN,
            error: f64::INFINITY,
            panels: count,
        });
    }
    let mut points = Vec::with_capacity(count + 1);
    points.push(lo);
    let mut prev = lo;
    let mut spacing = 0.0;
    for k in 1..count {
        let target = p_lo + k as f64 * PHASE_STEP;
        let (mut a, mut b) = (prev, hi);
        for _ in 0..2000 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if phase(mid) < target {
                a = mid;
            } else {
                b = mid;
            }
            // Stop once the bracket is small next to the local spacing.
            if spacing > 0.0 && b - a < 1e-6 * spacing {
                break;
            }
        }
        let r = 0.5 * (a + b);
        if r > prev && r < hi {
            spacing = r - prev;
            points.push(r);
            prev = r;
        }
    }
    points.push(hi);
    Ok(points)
}

/// Breakpoints growing by a factor of two from `lo` to `hi`; with `lo = 0`
/// they instead shrink from `hi` towards zero for forty halvings.
pub fn geometric_breakpoints(lo: f64, hi: f64) -> Vec<f64> {
    let mut points = vec![lo];
    if lo > 0.0 {
        let mut r = 2.0 * lo;
        while r < hi {
            points.push(r);
            r *= 2.0;
        }
    } else {
        let mut inner: Vec<f64> = (1..=40).map(|k| hi * 0.5f64.powi(k)).collect();
        inner.reverse();
        points.extend(inner);
    }
    points.push(hi);
    points
}

/// Largest radius at which `|g(r)| r^{n−1}` is still within
/// `e^{−cutoff}` of its running peak, found by doubling from `max(lo, 1)`.
fn generic_truncation<G: Fn(f64) -> f64>(g: &G, lo: f64, n: u32, cutoff: f64) -> Result<f64> {
    let weight = |r: f64| (g(r) * r.powi(n as i32 - 1)).abs();
    let mut peak = 0.0f64;
    let mut r = lo.max(1.0);
    for _ in 0..200 {
        let samples: Vec<f64> = (0..8)
            .map(|k| weight(r * (1.0 + f64::from(k) / 8.0)))
            .collect();
        let local = samples.iter().cloned().fold(0.0, f64::max);
        peak = peak.max(local);
        if peak > 0.0 && local <= peak * (-cutoff).exp() {
            return Ok(r);
        }
        r *= 2.0;
    }
    Err(Error::Precondition(
        "integrand does not decay on [lo, ∞)".into(),
    ))
}

/// `ωₙ ∫_{lo}^{hi} g(r) r^{n−1} dr`. An infinite `hi` is truncated where the
/// integrand has dropped by `e^{−tail_cutoff_exponent}` from its peak.
pub fn integrate_radial<G: Fn(f64) -> f64>(
    g: G,
    lo: f64,
    hi: f64,
    n: u32,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let omega = sphere_area(n)?;
    let hi = if hi.is_infinite() {
        generic_truncation(&g, lo, n, cfg.tail_cutoff_exponent)?
    } else {
        hi
    };
    if hi <= lo {
        return Ok(Estimate::ZERO);
    }
    let k = n as i32 - 1;
    let bps = if lo == 0.0 || hi / lo > 4.0 {
        geometric_breakpoints(lo, hi)
    } else {
        vec![lo, hi]
    };
    let est = integrate(|r| g(r) * r.powi(k), &bps, cfg.rel_tol, cfg.max_panels)?;
    Ok(est.scaled(omega))
}

/// Like [`integrate_radial`] on a finite interval, with initial panels placed
/// by the monotone `phase` so each spans at most `π/8`.
pub fn integrate_radial_oscillatory<G: Fn(f64) -> f64, P: Fn(f64) -> f64>(
    g: G,
    phase: P,
    lo: f64,
    hi: f64,
    n: u32,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    let omega = sphere_area(n)?;
    if hi <= lo {
        return Ok(Estimate::ZERO);
    }
    let k = n as i32 - 1;
    let bps = phase_breakpoints(phase, lo, hi, cfg.max_panels)?;
    let est = integrate(|r| g(r) * r.powi(k), &bps, cfg.rel_tol, cfg.max_panels)?;
    Ok(est.scaled(omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(1).unwrap(), 2.0, max_relative = 1e-13);
        assert_relative_eq!(sphere_area(2).unwrap(), 2.0 * PI, max_relative = 1e-13);
        assert_relative_eq!(sphere_area(3).unwrap(), 4.0 * PI, max_relative = 1e-13);
        assert_relative_eq!(sphere_area(4).unwrap(), 2.0 * PI * PI, max_relative = 1e-13);
        assert!(sphere_area(0).is_err());
    }

    #[test]
    fn unit_ball_volume() {
        let cfg = QuadratureConfig::default();
        let v = integrate_radial(|_| 1.0, 0.0, 1.0, 3, &cfg).unwrap();
        assert_relative_eq!(v.value, 4.0 * PI / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn gaussian_over_plane() {
        let cfg = QuadratureConfig::default();
        let v = integrate_radial(|r| (-r * r).exp(), 0.0, f64::INFINITY, 2, &cfg).unwrap();
        assert_relative_eq!(v.value, PI, max_relative = 1e-10);
        for n in 1..=5 {
            let v = integrate_radial(|r| (-r * r).exp(), 0.0, f64::INFINITY, n, &cfg).unwrap();
            assert_relative_eq!(v.value, PI.powf(0.5 * f64::from(n)), max_relative = 1e-10);
        }
    }

    #[test]
    fn endpoint_singularity() {
        let cfg = QuadratureConfig::default();
        // ∫₀¹ r^{-1/2} dr = 2
        let v = integrate(
            |r: f64| r.powf(-0.5),
            &geometric_breakpoints(0.0, 1.0),
            1e-10,
            100_000,
        )
        .unwrap();
        assert_relative_eq!(v.value, 2.0, max_relative = 1e-8);
        let _ = cfg;
    }

    #[test]
    fn oscillatory_panels_resolve_phase() {
        let cfg = QuadratureConfig::default();
        let t = 1e3;
        // ∫₀^π sin²(t r) dr = π/2 with t integer multiple
        let v =
            integrate_radial_oscillatory(|r| (t * r).sin().powi(2), |r| t * r, 0.0, PI, 1, &cfg)
                .unwrap();
        assert_relative_eq!(v.value, 2.0 * PI / 2.0, max_relative = 1e-10);
        assert!(v.panels >= (t * PI / PHASE_STEP) as usize);
    }

    #[test]
    fn phase_breakpoints_spacing() {
        let bps = phase_breakpoints(|r: f64| 100.0 * r.sqrt(), 0.0, 1.0, 10_000).unwrap();
        for w in bps.windows(2) {
            let dp = 100.0 * (w[1].sqrt() - w[0].sqrt());
            assert!(dp <= PHASE_STEP * (1.0 + 1e-4), "dp = {dp}");
        }
        assert!(phase_breakpoints(|r: f64| 1e9 * r, 0.0, 1.0, 1000).is_err());
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let r = integrate(|x: f64| (1.0 / x).sin(), &[1e-12, 1.0], 1e-14, 64);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        let bad = QuadratureConfig {
            max_panels: 10,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureConfig {
            rel_tol: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
