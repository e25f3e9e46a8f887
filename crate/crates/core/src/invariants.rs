//! Structural properties of the symbol, the mode solution and the norms,
//! evaluated as named pass/fail checks.

use crate::data::FourierData;
use crate::error::Result;
use crate::evolution::{
    decompose_data, mode_energy, mode_solution, profile_phi, remainder_f1, remainder_f2_envelope,
    remainder_f3,
};
use crate::quadrature::{integrate, norm_sq_solution, QuadratureConfig};
use crate::rates::{geometric_grid, lemma21_check, Check};
use crate::symbol::{char_roots, eval_discriminant_f, remainder_r, ModelParams, ZoneThresholds};

/// Sign of `f` on `(0, δ)` and `(δ, 10δ]`.
pub fn discriminant_sign_check(params: &ModelParams, thr: &ZoneThresholds) -> Check {
    let samples = 2000;
    let mut bad = 0usize;
    for k in 1..samples {
        let r = thr.delta * k as f64 / samples as f64;
        if eval_discriminant_f(r, params) >= 0.0 {
            bad += 1;
        }
        let r = thr.delta * (1.0 + 9.0 * k as f64 / (samples - 1) as f64);
        if eval_discriminant_f(r, params) <= 0.0 {
            bad += 1;
        }
    }
    Check::new("discriminant-sign", bad == 0, bad as f64, 0.0, 0.0)
}

/// `d(r) < r²/2` on `(δ, 100]`, so every overdamped mode decays.
pub fn overdamped_decay_check(params: &ModelParams, thr: &ZoneThresholds) -> Result<Check> {
    let mut worst = f64::NEG_INFINITY;
    for k in 1..=2000 {
        let r = thr.delta + (100.0 - thr.delta) * f64::from(k) / 2000.0;
        let roots = char_roots(r, params, thr)?;
        worst = worst.max(roots.osc / roots.a);
    }
    Ok(Check::new("overdamped-decay", worst < 1.0, worst, 1.0, 0.0))
}

/// `2b = √(4r² + 4M − r⁴)` on `(0, δ)`.
pub fn oscillation_formula_check(params: &ModelParams, thr: &ZoneThresholds) -> Result<Check> {
    let mut worst = 0.0f64;
    for k in 1..1000 {
        let r = thr.delta * f64::from(k) / 1000.0;
        let b = char_roots(r, params, thr)?.osc;
        let r2 = r * r;
        let direct = (4.0 * r2 + 4.0 * params.mass_term(r) - r2 * r2).sqrt();
        worst = worst.max((2.0 * b - direct).abs() / direct);
    }
    Ok(Check::new(
        "oscillation-formula",
        worst <= 1e-13,
        worst,
        0.0,
        1e-13,
    ))
}

/// `1/b = 1/w + R` at `δ₀/2` (absolute) and across `(0, δ₀]` (relative).
pub fn remainder_identity_check(params: &ModelParams, thr: &ZoneThresholds) -> Result<Check> {
    let residual = |r: f64| -> Result<(f64, f64)> {
        let b = char_roots(r, params, thr)?.osc;
        let rr = remainder_r(r, params, thr.delta)?;
        Ok(((1.0 / b - 1.0 / params.w(r) - rr).abs(), 1.0 / b))
    };
    let (at_half, _) = residual(0.5 * thr.delta0)?;
    let mut worst_rel = 0.0f64;
    for k in 0..=60 {
        let r = thr.delta0 * 10f64.powf(-f64::from(k) / 10.0);
        let (res, scale) = residual(r)?;
        worst_rel = worst_rel.max(res / scale);
    }
    Ok(Check::new(
        "remainder-identity",
        at_half < 1e-12 && worst_rel < 1e-12,
        at_half,
        0.0,
        1e-12,
    )
    .with_detail(format!(
        "worst relative residual on (0, δ₀]: {worst_rel:.3e}"
    )))
}

/// `(m²/2) r^{2θ} ≤ w² ≤ (1 + m²) r^{2θ}` on `(0, 1]`.
pub fn mass_equivalence_check(params: &ModelParams) -> Check {
    let m2 = params.m * params.m;
    let mut worst = f64::INFINITY;
    for k in 0..=2000 {
        let r = 10f64.powf(-8.0 * f64::from(k) / 2000.0);
        let x = r.powf(2.0 * params.theta);
        let w2 = params.w_sq(r);
        worst = worst.min(w2 - 0.5 * m2 * x).min((1.0 + m2) * x - w2);
    }
    Check::new("mass-equivalence", worst >= 0.0, worst, 0.0, 0.0)
}

/// `sup r^θ/b(r)` over `(0, δ₀]`, stable under grid refinement.
pub fn low_frequency_constant(params: &ModelParams, thr: &ZoneThresholds) -> Result<Check> {
    let sup = |points: u32| -> Result<f64> {
        let mut s = 0.0f64;
        for k in 1..=points {
            let r = thr.delta0 * 10f64.powf(-10.0 * f64::from(points - k) / f64::from(points));
            s = s.max(r.powf(params.theta) / char_roots(r, params, thr)?.osc);
        }
        Ok(s)
    };
    let coarse = sup(500)?;
    let fine = sup(4000)?;
    let drift = (fine - coarse).abs() / fine;
    Ok(Check::new(
        "low-frequency-constant",
        fine.is_finite() && drift < 1e-2,
        fine,
        coarse,
        1e-2,
    ))
}

/// `|û(t, δ−ε) − û(t, δ+ε)|` shrinks linearly in `ε`.
pub fn zone_continuity_check(
    data: &FourierData,
    params: &ModelParams,
    thr: &ZoneThresholds,
) -> Result<Check> {
    let mut worst = 10.0f64;
    let mut ok = true;
    for t in [1.0, 5.0, 20.0] {
        let scale = mode_solution(t, thr.delta, data, params, thr)?
            .value
            .abs()
            .max(f64::MIN_POSITIVE);
        let mut gaps = Vec::new();
        for k in 4..=8 {
            let eps = 10f64.powi(-k);
            let lo = mode_solution(t, thr.delta - eps, data, params, thr)?.value;
            let hi = mode_solution(t, thr.delta + eps, data, params, thr)?.value;
            gaps.push((lo - hi).abs());
        }
        for pair in gaps.windows(2) {
            if pair[1] < 1e-12 * scale {
                continue;
            }
            let ratio = pair[0] / pair[1];
            if (ratio - 10.0).abs() > (worst - 10.0).abs() {
                worst = ratio;
            }
            ok &= (8.0..=12.5).contains(&ratio);
        }
    }
    Ok(Check::new("zone-continuity", ok, worst, 10.0, 2.5))
}

/// `|û − φ − F₁ − F₃| ≤ F₂` envelope on `(0, δ) × [1, 10³]`.
pub fn decomposition_check(
    data: &FourierData,
    params: &ModelParams,
    thr: &ZoneThresholds,
) -> Result<Check> {
    let mut worst = 0.0f64;
    let mut ok = true;
    for i in 1..40 {
        let r = thr.delta * f64::from(i) / 40.0;
        for t in geometric_grid(1.0, 1e3, 25)? {
            let u = mode_solution(t, r, data, params, thr)?.value;
            let phi = profile_phi(t, r, data.p1, params);
            let f1 = remainder_f1(t, r, data.p1, params, thr)?;
            let f3 = remainder_f3(t, r, data, params, thr)?;
            let env = remainder_f2_envelope(t, r, data.p1, params, thr)?;
            let slack = 1e-12 * (u.abs() + phi.abs() + f1.abs() + f3.abs()) + f64::MIN_POSITIVE;
            let lhs = (u - phi - f1 - f3).abs();
            ok &= lhs <= env + slack;
            if env > 0.0 {
                worst = worst.max(lhs / (env + slack));
            }
        }
    }
    Ok(Check::new("decomposition-sandwich", ok, worst, 1.0, 0.0))
}

/// Per-mode energy: non-increasing in `t`, and at `(r = 1, T = 5)`
/// `E(T) + ∫₀ᵀ r²ût² = E(0)` to `10⁻⁸`.
pub fn energy_check(
    data: &FourierData,
    params: &ModelParams,
    thr: &ZoneThresholds,
) -> Result<Vec<Check>> {
    let mut monotone = true;
    for r in [0.05, 0.5, 1.0, thr.delta, thr.delta1, 10.0] {
        let mut prev = f64::INFINITY;
        for k in 0..=200 {
            let e = mode_energy(0.1 * f64::from(k), r, data, params, thr)?.energy;
            monotone &= e <= prev * (1.0 + 1e-12);
            prev = e;
        }
    }
    let (r, t_end) = (1.0, 5.0);
    let e0 = mode_energy(0.0, r, data, params, thr)?.energy;
    let bps: Vec<f64> = (0..=50).map(|k| t_end * f64::from(k) / 50.0).collect();
    let lost = integrate(
        |s| mode_energy(s, r, data, params, thr).map_or(f64::NAN, |e| e.dissipation),
        &bps,
        1e-13,
        100_000,
    )?
    .value;
    let e_end = mode_energy(t_end, r, data, params, thr)?.energy;
    let residual = (e_end + lost - e0).abs() / e0;
    Ok(vec![
        Check::new(
            "energy-monotone",
            monotone,
            f64::from(u8::from(monotone)),
            1.0,
            0.0,
        ),
        Check::new("energy-identity", residual < 1e-8, residual, 0.0, 1e-8),
    ])
}

/// Empirical `K` in `|A(r)| ≤ K r^θ ‖u₁‖_{1,θ}` on `(0, 1]` (reported).
pub fn moment_bound_constant(data: &FourierData, params: &ModelParams) -> Check {
    let mut k_sup = 0.0f64;
    for k in 0..=400 {
        let r = 10f64.powf(-6.0 * f64::from(k) / 400.0);
        let (a, _) = decompose_data(data, r);
        k_sup = k_sup.max(a.abs() / (r.powf(params.theta) * data.l1_theta_norm));
    }
    Check::new("moment-bound-constant", k_sup.is_finite(), k_sup, 0.0, 0.0)
}

/// Exponential bounds of the middle and high zones, as sup-ratios over `t`.
pub fn zone_decay_checks(
    data: &FourierData,
    params: &ModelParams,
    thr: &ZoneThresholds,
    cfg: &QuadratureConfig,
) -> Result<Vec<Check>> {
    let u1_sq = crate::quadrature::integrate_radial(
        |r| data.u1_hat(r).powi(2),
        thr.delta0,
        thr.delta,
        params.n,
        cfg,
    )?
    .value;
    let rate = thr.alpha.min(thr.beta);
    let mut middle_ok = true;
    let mut high_sup = 0.0f64;
    let mut middle_worst = 0.0f64;
    for t in [5.0, 10.0, 20.0] {
        let nb = norm_sq_solution(t, data, params, thr, cfg)?;
        let middle_bound = t * t * (-thr.delta0.powi(2) * t).exp() * u1_sq;
        middle_ok &= nb.middle <= middle_bound;
        if middle_bound > 0.0 {
            middle_worst = middle_worst.max(nb.middle / middle_bound);
        }
        high_sup = high_sup.max((nb.high_mid + nb.high_tail) / (t * t * (-rate * t).exp()));
    }
    Ok(vec![
        Check::new("middle-zone-bound", middle_ok, middle_worst, 1.0, 0.0),
        Check::new(
            "high-zone-constant",
            high_sup.is_finite(),
            high_sup,
            0.0,
            0.0,
        ),
    ])
}

/// Every structural check for one configuration.
pub fn structural_checks(
    data: &FourierData,
    params: &ModelParams,
    cfg: &QuadratureConfig,
) -> Result<Vec<Check>> {
    let thr = ZoneThresholds::for_params(params)?;
    let mut checks = vec![
        discriminant_sign_check(params, &thr),
        overdamped_decay_check(params, &thr)?,
        oscillation_formula_check(params, &thr)?,
        remainder_identity_check(params, &thr)?,
        mass_equivalence_check(params),
        low_frequency_constant(params, &thr)?,
        zone_continuity_check(data, params, &thr)?,
    ];
    if data.displacement.is_zero() {
        checks.push(decomposition_check(data, params, &thr)?);
    }
    checks.extend(energy_check(data, params, &thr)?);
    checks.push(moment_bound_constant(data, params));
    checks.extend(zone_decay_checks(data, params, &thr, cfg)?);
    let times = geometric_grid(1e2, 1e6, 17)?;
    let scaling = lemma21_check(3, 1.0, &times, 0.02, cfg)?;
    checks.push(Check::new(
        "quadrature-scaling",
        scaling.holds,
        scaling.fit.slope,
        scaling.expected,
        0.02,
    ));
    Ok(checks)
}
