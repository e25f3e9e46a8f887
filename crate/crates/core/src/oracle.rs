//! Direct time integration of the mode equation, used to cross-check the
//! closed-form solutions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::FourierData;
use crate::error::{Error, Result};
use crate::evolution::{mode_solution, ModeValue};
use crate::symbol::{ModelParams, ZoneThresholds};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeRunConfig {
    /// Initial step, reduced to `0.1/r²` for stiff modes.
    pub dt: f64,
    /// Agreement required between two successive halvings.
    pub rel_tol: f64,
    /// Smallest step tried before giving up.
    pub dt_floor: f64,
}

impl Default for OdeRunConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            rel_tol: 1e-9,
            dt_floor: 1e-9,
        }
    }
}

impl OdeRunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "dt",
                reason: format!("must be positive, got {}", self.dt),
            });
        }
        Ok(())
    }
}

/// Classical RK4 with `steps` equal steps on `u'' + r²u' + w²u = 0`.
pub fn rk4_fixed(
    t_end: f64,
    r: f64,
    u0: f64,
    u1: f64,
    params: &ModelParams,
    steps: u64,
) -> ModeValue {
    let damping = r * r;
    let stiffness = params.w_sq(r);
    let rhs = |u: f64, v: f64| (v, -damping * v - stiffness * u);
    let h = t_end / steps as f64;
    let (mut u, mut v) = (u0, u1);
    for _ in 0..steps {
        let (k1u, k1v) = rhs(u, v);
        let (k2u, k2v) = rhs(u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = rhs(u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = rhs(u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    ModeValue {
        value: u,
        dvalue: v,
    }
}

/// `(û, ût)` at `t_end` by RK4, halving the step until two successive runs
/// agree to `cfg.rel_tol` relative to `max(|value|, 10⁻³‖u₁‖₁)`.
pub fn rk4_mode(
    t_end: f64,
    r: f64,
    data: &FourierData,
    params: &ModelParams,
    cfg: &OdeRunConfig,
) -> Result<ModeValue> {
    cfg.validate()?;
    if t_end < 0.0 {
        return Err(Error::NegativeTime(t_end));
    }
    if r < 0.0 {
        return Err(Error::OutOfDomain {
            radius: r,
            domain: "[0, ∞)",
        });
    }
    let (u0, u1) = (data.u0_hat(r), data.u1_hat(r));
    if t_end == 0.0 {
        return Ok(ModeValue {
            value: u0,
            dvalue: u1,
        });
    }
    let mut dt = if r > 0.0 {
        cfg.dt.min(0.1 / (r * r))
    } else {
        cfg.dt
    };
    let mut steps = (t_end / dt).ceil().max(1.0) as u64;
    let floor = 1e-3 * data.l1_norm;
    let mut prev = rk4_fixed(t_end, r, u0, u1, params, steps);
    loop {
        steps *= 2;
        dt = t_end / steps as f64;
        if dt < cfg.dt_floor {
            return Err(Error::StepFloor { dt });
        }
        let cur = rk4_fixed(t_end, r, u0, u1, params, steps);
        let agree = |p: f64, c: f64| (p - c).abs() <= cfg.rel_tol * c.abs().max(p.abs()).max(floor);
        if agree(prev.value, cur.value) && agree(prev.dvalue, cur.dvalue) {
            return Ok(cur);
        }
        prev = cur;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointDeviation {
    pub t: f64,
    pub r: f64,
    pub closed: ModeValue,
    pub rk4: ModeValue,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub points: Vec<PointDeviation>,
    pub max_deviation: f64,
    /// `(t, r)` of the largest deviation.
    pub argmax: Option<(f64, f64)>,
}

/// Largest time accepted by [`compare_modes`]; beyond it both sides underflow.
pub const COMPARE_T_MAX: f64 = 50.0;

/// Closed form against RK4 over a grid of `(t, r)`, in parallel.
pub fn compare_modes(
    grid: &[(f64, f64)],
    data: &FourierData,
    params: &ModelParams,
    thr: &ZoneThresholds,
    cfg: &OdeRunConfig,
) -> Result<CompareReport> {
    if let Some(&(t, _)) = grid.iter().find(|(t, _)| *t > COMPARE_T_MAX) {
        return Err(Error::Precondition(format!(
            "comparison time {t} exceeds {COMPARE_T_MAX}"
        )));
    }
    let floor = 1e-3 * data.l1_norm;
    let points = grid
        .par_iter()
        .map(|&(t, r)| {
            let closed = mode_solution(t, r, data, params, thr)?;
            let rk4 = rk4_mode(t, r, data, params, cfg)?;
            let rel = |c: f64, k: f64| (c - k).abs() / c.abs().max(k.abs()).max(floor);
            let deviation = rel(closed.value, rk4.value).max(rel(closed.dvalue, rk4.dvalue));
            Ok(PointDeviation {
                t,
                r,
                closed,
                rk4,
                deviation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = points
        .iter()
        .max_by(|a, b| a.deviation.total_cmp(&b.deviation));
    Ok(CompareReport {
        max_deviation: worst.map_or(0.0, |p| p.deviation),
        argmax: worst.map(|p| (p.t, p.r)),
        points,
    })
}

/// The standard comparison grid `{1, 5, 20} × {0.1, 1, δ−10⁻², δ, δ+10⁻², δ₁+1}`.
pub fn standard_grid(thr: &ZoneThresholds) -> Vec<(f64, f64)> {
    let radii = [
        0.1,
        1.0,
        thr.delta - 1e-2,
        thr.delta,
        thr.delta + 1e-2,
        thr.delta1 + 1.0,
    ];
    [1.0, 5.0, 20.0]
        .iter()
        .flat_map(|&t| radii.iter().map(move |&r| (t, r)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::mode_energy;

    fn setup(theta: f64, m: f64) -> (ModelParams, ZoneThresholds, FourierData) {
        let p = ModelParams::new(3, theta, m).unwrap();
        let thr = ZoneThresholds::for_params(&p).unwrap();
        (p, thr, FourierData::gaussian(3, theta, 1.0).unwrap())
    }

    #[test]
    fn zero_radius_is_free_motion() {
        let (p, _, data) = setup(1.0, 1.0);
        let v = rk4_mode(7.0, 0.0, &data, &p, &OdeRunConfig::default()).unwrap();
        assert!((v.value - 7.0 * data.p1).abs() < 1e-10);
        assert!((v.dvalue - data.p1).abs() < 1e-12);
    }

    #[test]
    fn matches_closed_form_generic_and_critical() {
        let (p, thr, data) = setup(1.0, 1.0);
        let cfg = OdeRunConfig::default();
        for r in [1.5, thr.delta] {
            let closed = mode_solution(10.0, r, &data, &p, &thr).unwrap();
            let rk = rk4_mode(10.0, r, &data, &p, &cfg).unwrap();
            assert!(
                (closed.value - rk.value).abs() < 1e-6 * closed.value.abs(),
                "r={r}"
            );
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let (p, thr, data) = setup(1.0, 1.0);
        let (t, r) = (5.0, 1.0);
        let exact = mode_solution(t, r, &data, &p, &thr).unwrap().value;
        let err = |steps| (rk4_fixed(t, r, 0.0, data.u1_hat(r), &p, steps).value - exact).abs();
        let ratio = err(400) / err(800);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn energy_along_rk4_trajectory_decreases() {
        let (p, thr, data) = setup(0.5, 1.0);
        let r = 0.8;
        let cfg = OdeRunConfig::default();
        let mut prev = f64::INFINITY;
        for k in 0..=20 {
            let t = f64::from(k);
            let v = rk4_mode(t, r, &data, &p, &cfg).unwrap();
            let e = 0.5 * (v.dvalue.powi(2) + p.w_sq(r) * v.value.powi(2));
            assert!(e <= prev * (1.0 + 1e-9));
            let closed = mode_energy(t, r, &data, &p, &thr).unwrap().energy;
            assert!((e - closed).abs() <= 1e-8 * closed.max(1e-12));
            prev = e;
        }
    }

    #[test]
    fn empty_grid() {
        let (p, thr, data) = setup(1.0, 1.0);
        let rep = compare_modes(&[], &data, &p, &thr, &OdeRunConfig::default()).unwrap();
        assert!(rep.points.is_empty());
        assert_eq!(rep.max_deviation, 0.0);
        assert!(rep.argmax.is_none());
    }

    #[test]
    fn standard_grid_agrees() {
        for (theta, m) in [(1.0, 1.0), (0.5, 1.0), (0.75, 2.0)] {
            let (p, thr, data) = setup(theta, m);
            let rep = compare_modes(
                &standard_grid(&thr),
                &data,
                &p,
                &thr,
                &OdeRunConfig::default(),
            )
            .unwrap();
            assert!(rep.max_deviation < 1e-6, "theta={theta}: {rep:?}");
            let mean_zero = FourierData::gaussian_difference(3, theta).unwrap();
            let rep = compare_modes(
                &standard_grid(&thr),
                &mean_zero,
                &p,
                &thr,
                &OdeRunConfig::default(),
            )
            .unwrap();
            assert!(rep.max_deviation < 1e-6);
        }
    }

    #[test]
    fn late_times_rejected() {
        let (p, thr, data) = setup(1.0, 1.0);
        assert!(compare_modes(&[(60.0, 1.0)], &data, &p, &thr, &OdeRunConfig::default()).is_err());
    }
}
