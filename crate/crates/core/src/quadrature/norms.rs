//! Zone-split squared `L²` norms of the solution, the profile and their
//! difference, and the integrated energy.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{
    geometric_breakpoints, integrate, phase_breakpoints, sphere_area, Estimate, QuadMode,
    QuadratureConfig,
};
use crate::data::FourierData;
use crate::error::{Error, Result};
use crate::evolution::{decompose_data, energy_of, profile_phi, root_gap, Propagator};
use crate::special::sinc;
use crate::symbol::{remainder_r, ModelParams, ZoneThresholds};

/// Phase `t·w` beyond which `sin²` is replaced by its mean on the low zone.
pub const AVERAGING_PHASE: f64 = 64.0 * PI;

/// Contributions of the four frequency zones.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormBreakdown {
    /// `(0, δ₀]`
    pub low: f64,
    /// `(δ₀, δ]`
    pub middle: f64,
    /// `(δ, δ₁]`
    pub high_mid: f64,
    /// `(δ₁, ∞)`
    pub high_tail: f64,
    pub total: f64,
    /// Estimate of what the tail truncation dropped (not included in `total`).
    pub truncation_remainder: f64,
}

impl NormBreakdown {
    pub fn norm(&self) -> f64 {
        self.total.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Quantity {
    Solution,
    Profile,
    Error,
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Zone {
    Low,
    Middle,
    High,
}

struct Ctx<'a> {
    t: f64,
    p1: f64,
    data: Option<&'a FourierData>,
    params: &'a ModelParams,
    thr: &'a ZoneThresholds,
    cfg: &'a QuadratureConfig,
    failure: RefCell<Option<Error>>,
}

impl Ctx<'_> {
    fn record<T: Default>(&self, r: Result<T>) -> T {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.failure.borrow_mut().get_or_insert(e);
                T::default()
            }
        }
    }

    fn data_exponent(&self, r: f64) -> f64 {
        self.data.map_or(f64::INFINITY, |d| d.decay_exponent(r))
    }

    /// Lower bound on `−log` of the integrand amplitude at `r`.
    fn exponent(&self, q: Quantity, zone: Zone, r: f64) -> f64 {
        let gauss = 0.5 * r * r * self.t;
        let solution = match zone {
            Zone::High => self.t + self.data_exponent(r),
            _ => gauss + self.data_exponent(r),
        };
        match q {
            Quantity::Profile => gauss,
            Quantity::Solution | Quantity::Energy => solution,
            Quantity::Error => solution.min(gauss),
        }
    }

    fn resolved(&self, q: Quantity, zone: Zone, r: f64) -> f64 {
        if q == Quantity::Profile {
            return profile_phi(self.t, r, self.p1, self.params).powi(2);
        }
        let data = self.data.expect("data-dependent quantity");
        if q == Quantity::Error && zone == Zone::Low && r > 0.0 {
            return self.record(self.low_error(data, r)).powi(2);
        }
        let v = self.record(
            Propagator::new(self.t, r, self.params, self.thr)
                .map(|p| p.apply(data.u0_hat(r), data.u1_hat(r))),
        );
        match q {
            Quantity::Solution => v.value * v.value,
            Quantity::Error => (v.value - profile_phi(self.t, r, self.p1, self.params)).powi(2),
            Quantity::Energy => energy_of(v, r, self.params).energy,
            Quantity::Profile => unreachable!(),
        }
    }

    /// `û − φ` on the low zone, regrouped so that no two large terms cancel.
    fn low_error(&self, data: &FourierData, r: f64) -> Result<f64> {
        let t = self.t;
        let prop = Propagator::new(t, r, self.params, self.thr)?;
        let b = prop.roots.osc;
        let w = self.params.w(r);
        let u0 = data.u0_hat(r);
        let x = decompose_data(data, r).0 + prop.a * u0;
        let rr = remainder_r(r, self.params, self.thr.delta)?;
        let gap = root_gap(r, b, w);
        let beat = 2.0 * (0.5 * (b + w) * t).cos() * (0.5 * gap * t).sin() / w;
        let inner =
            u0 * (b * t).cos() + x * t * sinc(b * t) + data.p1 * (rr * (b * t).sin() - beat);
        Ok((-prop.a * t).exp() * inner)
    }

    /// Phase average of the squared integrand over the fast oscillation.
    fn averaged(&self, q: Quantity, r: f64) -> f64 {
        let damp2 = (-r * r * self.t).exp();
        let w_sq = self.params.w_sq(r);
        if q == Quantity::Profile {
            return damp2 * 0.5 * self.p1 * self.p1 / w_sq;
        }
        let data = self.data.expect("data-dependent quantity");
        self.record(self.averaged_data(q, data, r, damp2, w_sq))
    }

    fn averaged_data(
        &self,
        q: Quantity,
        data: &FourierData,
        r: f64,
        damp2: f64,
        w_sq: f64,
    ) -> Result<f64> {
        let prop = Propagator::new(self.t, r, self.params, self.thr)?;
        let (a, b) = (prop.a, prop.roots.osc);
        let (u0, u1) = (data.u0_hat(r), data.u1_hat(r));
        let c2 = u1 + a * u0;
        let sol = u0 * u0 + (c2 / b).powi(2);
        Ok(match q {
            Quantity::Solution => damp2 * 0.5 * sol,
            Quantity::Energy => {
                let k = w_sq * u0 + a * u1;
                0.5 * damp2 * 0.5 * (u1 * u1 + (k / b).powi(2) + w_sq * sol)
            }
            Quantity::Error => {
                let w = w_sq.sqrt();
                let x = decompose_data(data, r).0 + a * u0;
                let y = x / b + data.p1 * remainder_r(r, self.params, self.thr.delta)?;
                let psi = 0.5 * root_gap(r, b, w) * self.t;
                let z = 2.0 * data.p1 * psi.sin() / w;
                damp2 * 0.5 * ((u0 - z * psi.cos()).powi(2) + (y + z * psi.sin()).powi(2))
            }
            Quantity::Profile => unreachable!(),
        })
    }

    /// Largest radius in `[lo, hi]` still below the cutoff exponent, or `None`
    /// when the zone lies entirely beyond it.
    fn cut_radius(&self, q: Quantity, zone: Zone, lo: f64, hi: f64) -> Result<Option<f64>> {
        let cutoff = self.cfg.tail_cutoff_exponent;
        let e = |r: f64| self.exponent(q, zone, r);
        if e(lo) >= cutoff {
            return Ok(None);
        }
        if hi.is_finite() && e(hi) < cutoff {
            return Ok(Some(hi));
        }
        let (mut below, mut above) = (lo, hi);
        if hi.is_infinite() {
            above = (2.0 * lo).max(lo + 1.0);
            let mut steps = 0;
            while e(above) < cutoff {
                below = above;
                above *= 2.0;
                steps += 1;
                if steps > 200 {
                    return Err(Error::Precondition(
                        "integrand exponent does not grow on the tail".into(),
                    ));
                }
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (below + above);
            if mid <= below || mid >= above || above - below <= 1e-12 * above {
                break;
            }
            if e(mid) < cutoff {
                below = mid;
            } else {
                above = mid;
            }
        }
        Ok(Some(above))
    }

    /// One-panel estimate of the truncated tail beyond `r`.
    fn tail_estimate(&self, q: Quantity, zone: Zone, r: f64) -> f64 {
        let h = 1e-6 * r;
        let slope = (self.exponent(q, zone, r + h) - self.exponent(q, zone, r)) / h;
        if !(slope.is_finite() && slope > 0.0) {
            return 0.0;
        }
        let g = self.resolved(q, zone, r) * r.powi(self.params.n as i32 - 1);
        let omega = sphere_area(self.params.n).unwrap_or(0.0);
        omega * g / (2.0 * slope)
    }

    fn zone_integral(&self, q: Quantity, zone: Zone, lo: f64, hi: f64) -> Result<(Estimate, f64)> {
        let Some(upper) = self.cut_radius(q, zone, lo, hi)? else {
            return Ok((Estimate::ZERO, 0.0));
        };
        let remainder = if upper < hi {
            self.tail_estimate(q, zone, upper)
        } else {
            0.0
        };
        let omega = sphere_area(self.params.n)?;
        let k = self.params.n as i32 - 1;
        let t = self.t;
        let phase = |r: f64| t * self.params.w(r);
        let tol = self.cfg.rel_tol;
        let budget = self.cfg.max_panels;

        let est = match zone {
            Zone::High => {
                let bps = geometric_breakpoints(lo, upper);
                integrate(|r| self.resolved(q, zone, r) * r.powi(k), &bps, tol, budget)?
            }
            Zone::Middle => {
                let bps = phase_breakpoints(phase, lo, upper, budget)?;
                integrate(|r| self.resolved(q, zone, r) * r.powi(k), &bps, tol, budget)?
            }
            Zone::Low => {
                let switch = match self.cfg.mode {
                    QuadMode::Resolved => upper,
                    QuadMode::Averaged => averaging_radius(&phase, lo, upper),
                };
                let mut total = Estimate::ZERO;
                if switch > lo {
                    let bps = phase_breakpoints(phase, lo, switch, budget)?;
                    let part =
                        integrate(|r| self.resolved(q, zone, r) * r.powi(k), &bps, tol, budget)?;
                    total = add(total, part);
                }
                if upper > switch {
                    let bps = geometric_breakpoints(switch, upper);
                    let part = integrate(|r| self.averaged(q, r) * r.powi(k), &bps, tol, budget)?;
                    total = add(total, part);
                }
                total
            }
        };
        if let Some(e) = self.failure.borrow_mut().take() {
            return Err(e);
        }
        Ok((est.scaled(omega), remainder))
    }

    fn breakdown(&self, q: Quantity) -> Result<NormBreakdown> {
        let thr = self.thr;
        let (low, r0) = self.zone_integral(q, Zone::Low, 0.0, thr.delta0)?;
        let (middle, r1) = self.zone_integral(q, Zone::Middle, thr.delta0, thr.delta)?;
        let (high_mid, r2) = self.zone_integral(q, Zone::High, thr.delta, thr.delta1)?;
        let (high_tail, r3) = self.zone_integral(q, Zone::High, thr.delta1, f64::INFINITY)?;
        let parts = [low.value, middle.value, high_mid.value, high_tail.value].map(|v| v.max(0.0));
        Ok(NormBreakdown {
            low: parts[0],
            middle: parts[1],
            high_mid: parts[2],
            high_tail: parts[3],
            total: parts.iter().sum(),
            truncation_remainder: r0 + r1 + r2 + r3,
        })
    }
}

fn add(a: Estimate, b: Estimate) -> Estimate {
    Estimate {
        value: a.value + b.value,
        error: a.error + b.error,
        panels: a.panels + b.panels,
    }
}

/// Radius in `[lo, hi]` where the phase reaches [`AVERAGING_PHASE`]; `hi` if
/// it never does.
fn averaging_radius<P: Fn(f64) -> f64>(phase: &P, lo: f64, hi: f64) -> f64 {
    if phase(hi) <= AVERAGING_PHASE {
        return hi;
    }
    if phase(lo) >= AVERAGING_PHASE {
        return lo;
    }
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b || b - a <= 1e-12 * b {
            break;
        }
        if phase(mid) < AVERAGING_PHASE {
            a = mid;
        } else {
            b = mid;
        }
    }
    b
}

fn context<'a>(
    t: f64,
    p1: f64,
    data: Option<&'a FourierData>,
    params: &'a ModelParams,
    thr: &'a ZoneThresholds,
    cfg: &'a QuadratureConfig,
) -> Result<Ctx<'a>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Precondition(format!(
            "norms need a positive finite time, got {t}"
        )));
    }
    params.validate()?;
    cfg.validate()?;
    Ok(Ctx {
        t,
        p1,
        data,
        params,
        thr,
        cfg,
        failure: RefCell::new(None),
    })
}

/// `∫ |û(t, ξ)|² dξ`, zone by zone.
pub fn norm_sq_solution(
    t: f64,
    data: &FourierData,
    params: &ModelParams,
    thr: &ZoneThresholds,
    cfg: &QuadratureConfig,
) -> Result<NormBreakdown> {
    context(t, data.p1, Some(data), params, thr, cfg)?.breakdown(Quantity::Solution)
}

/// `∫ |φ(t, ξ)|² dξ`, zone by zone.
pub fn norm_sq_profile(
    t: f64,
    p1: f64,
    params: &ModelParams,
    thr: &ZoneThresholds,
    cfg: &QuadratureConfig,
) -> Result<NormBreakdown> {
    if p1 == 0.0 {
        context(t, p1, None, params, thr, cfg)?;
        return Ok(NormBreakdown::default());
    }
    context(t, p1, None, params, thr, cfg)?.breakdown(Quantity::Profile)
}

/// `∫ |û(t, ξ) − φ(t, ξ)|² dξ`, zone by zone.
pub fn norm_sq_error(
    t: f64,
    data: &FourierData,
    params: &ModelParams,
    thr: &ZoneThresholds,
    cfg: &QuadratureConfig,
) -> Result<NormBreakdown> {
    context(t, data.p1, Some(data), params, thr, cfg)?.breakdown(Quantity::Error)
}

/// `∫ ½(|ût|² + w²|û|²) dξ`, zone by zone.
pub fn energy_integral(
    t: f64,
    data: &FourierData,
    params: &ModelParams,
    thr: &ZoneThresholds,
    cfg: &QuadratureConfig,
) -> Result<NormBreakdown> {
    context(t, data.p1, Some(data), params, thr, cfg)?.breakdown(Quantity::Energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn setup(n: u32, theta: f64) -> (ModelParams, ZoneThresholds, FourierData) {
        let p = ModelParams::new(n, theta, 1.0).unwrap();
        let thr = ZoneThresholds::for_params(&p).unwrap();
        let data = FourierData::gaussian(n, theta, 1.0).unwrap();
        (p, thr, data)
    }

    #[test]
    fn parts_sum_to_total() {
        let (p, thr, data) = setup(3, 1.0);
        let cfg = QuadratureConfig::default();
        for t in [0.5, 5.0, 100.0] {
            let nb = norm_sq_solution(t, &data, &p, &thr, &cfg).unwrap();
            assert_relative_eq!(
                nb.total,
                nb.low + nb.middle + nb.high_mid + nb.high_tail,
                max_relative = 1e-15
            );
            assert!(nb.low >= 0.0 && nb.middle >= 0.0 && nb.high_mid >= 0.0 && nb.high_tail >= 0.0);
        }
    }

    #[test]
    fn short_time_matches_free_motion() {
        // û ≈ t û₁ for small t, so ‖û‖² ≈ t² ‖û₁‖² = t² π^{n/2} for the unit Gaussian
        let (p, thr, data) = setup(2, 0.5);
        let cfg = QuadratureConfig::default();
        let t = 1e-4;
        let nb = norm_sq_solution(t, &data, &p, &thr, &cfg).unwrap();
        assert_relative_eq!(nb.total / (t * t), PI, max_relative = 1e-3);
    }

    #[test]
    fn splitting_is_exact() {
        let (p, thr, data) = setup(3, 1.0);
        for mode in [QuadMode::Averaged, QuadMode::Resolved] {
            let cfg = QuadratureConfig {
                mode,
                ..Default::default()
            };
            let ctx = context(50.0, data.p1, Some(&data), &p, &thr, &cfg).unwrap();
            for q in [Quantity::Solution, Quantity::Error, Quantity::Energy] {
                let whole = ctx
                    .zone_integral(q, Zone::Low, 0.0, thr.delta0)
                    .unwrap()
                    .0
                    .value;
                let mid = 0.37 * thr.delta0;
                let a = ctx.zone_integral(q, Zone::Low, 0.0, mid).unwrap().0.value;
                let b = ctx
                    .zone_integral(q, Zone::Low, mid, thr.delta0)
                    .unwrap()
                    .0
                    .value;
                assert!(
                    (whole - a - b).abs() <= cfg.rel_tol * whole,
                    "{mode:?} {q:?}"
                );
            }
        }
    }

    #[test]
    fn doubling_cutoff_changes_little() {
        let (p, thr, data) = setup(2, 0.5);
        let cfg = QuadratureConfig::default();
        let wide = QuadratureConfig {
            tail_cutoff_exponent: 80.0,
            ..cfg
        };
        for t in [1.0, 10.0, 1e3] {
            let a = norm_sq_solution(t, &data, &p, &thr, &cfg).unwrap().total;
            let b = norm_sq_solution(t, &data, &p, &thr, &wide).unwrap().total;
            assert!((a - b).abs() <= cfg.rel_tol * b, "t={t}");
            let a = norm_sq_error(t, &data, &p, &thr, &cfg).unwrap().total;
            let b = norm_sq_error(t, &data, &p, &thr, &wide).unwrap().total;
            assert!((a - b).abs() <= cfg.rel_tol * b, "t={t}");
        }
    }

    #[test]
    fn mean_zero_data_has_no_profile() {
        let (p, thr, _) = setup(3, 1.0);
        let nb = norm_sq_profile(10.0, 0.0, &p, &thr, &QuadratureConfig::default()).unwrap();
        assert_eq!(nb.total, 0.0);
    }

    #[test]
    fn averaged_agrees_with_resolved() {
        let (p, thr, data) = setup(3, 1.0);
        let t = 1e3;
        let avg = QuadratureConfig::default();
        let res = QuadratureConfig::resolved();
        let a = norm_sq_solution(t, &data, &p, &thr, &avg).unwrap().total;
        let r = norm_sq_solution(t, &data, &p, &thr, &res).unwrap().total;
        assert!((a.sqrt() - r.sqrt()).abs() <= 0.02 * r.sqrt());
        let a = norm_sq_error(t, &data, &p, &thr, &avg).unwrap().total;
        let r = norm_sq_error(t, &data, &p, &thr, &res).unwrap().total;
        assert!((a.sqrt() - r.sqrt()).abs() <= 0.02 * r.sqrt());
    }

    #[test]
    fn high_zones_decay_exponentially() {
        let (p, thr, data) = setup(3, 1.0);
        let cfg = QuadratureConfig::default();
        let rate = thr.alpha.min(thr.beta);
        let ratios: Vec<f64> = [5.0, 10.0, 20.0]
            .iter()
            .map(|&t| {
                let nb = norm_sq_solution(t, &data, &p, &thr, &cfg).unwrap();
                (nb.high_mid + nb.high_tail) / (t * t * (-rate * t).exp())
            })
            .collect();
        assert!(
            ratios.iter().all(|c| c.is_finite() && *c < 1e3),
            "{ratios:?}"
        );
    }

    #[test]
    fn middle_zone_bound() {
        let (p, thr, data) = setup(3, 1.0);
        let cfg = QuadratureConfig::default();
        let u1_sq = super::super::integrate_radial(
            |r| data.u1_hat(r).powi(2),
            thr.delta0,
            thr.delta,
            3,
            &cfg,
        )
        .unwrap()
        .value;
        for t in [1.0, 5.0, 20.0, 50.0] {
            let nb = norm_sq_solution(t, &data, &p, &thr, &cfg).unwrap();
            let bound = t * t * (-thr.delta0.powi(2) * t).exp() * u1_sq;
            assert!(nb.middle <= bound, "t={t}: {} > {bound}", nb.middle);
        }
        // the rate δ₀² is sharp: a bound decaying like e^{−2δ₀²t} fails
        let t = 30.0;
        let nb = norm_sq_solution(t, &data, &p, &thr, &cfg).unwrap();
        assert!(nb.middle > t * t * (-2.0 * thr.delta0.powi(2) * t).exp() * u1_sq);
    }

    #[test]
    fn profile_high_frequencies_are_small() {
        let (p, thr, _) = setup(2, 1.0);
        let cfg = QuadratureConfig::default();
        let ratios: Vec<f64> = [2.0, 5.0, 10.0, 20.0]
            .iter()
            .map(|&t| {
                let nb = norm_sq_profile(t, 1.0, &p, &thr, &cfg).unwrap();
                (nb.middle + nb.high_mid + nb.high_tail).sqrt()
                    / (-thr.delta0.powi(2) * t / 2.0).exp()
            })
            .collect();
        assert!(
            ratios.iter().all(|c| c.is_finite() && *c < 10.0),
            "{ratios:?}"
        );
    }

    #[test]
    fn triangle_inequality() {
        let (p, thr, data) = setup(1, 0.75);
        let cfg = QuadratureConfig::default();
        for t in [1.0, 1e2, 1e4, 1e6] {
            let u = norm_sq_solution(t, &data, &p, &thr, &cfg).unwrap().norm();
            let phi = norm_sq_profile(t, data.p1, &p, &thr, &cfg).unwrap().norm();
            let e = norm_sq_error(t, &data, &p, &thr, &cfg).unwrap().norm();
            assert!(e <= (u + phi) * (1.0 + 1e-6), "t={t}");
            assert!(u <= (e + phi) * (1.0 + 1e-6), "t={t}");
        }
    }

    #[test]
    fn energy_decreases() {
        let (p, thr, data) = setup(2, 1.0);
        let cfg = QuadratureConfig::default();
        let mut prev = f64::INFINITY;
        for t in [0.1, 1.0, 10.0, 100.0, 1e4] {
            let e = energy_integral(t, &data, &p, &thr, &cfg).unwrap().total;
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn rejects_nonpositive_time() {
        let (p, thr, data) = setup(2, 1.0);
        assert!(norm_sq_solution(0.0, &data, &p, &thr, &QuadratureConfig::default()).is_err());
    }
}
