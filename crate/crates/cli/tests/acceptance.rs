//! Acceptance criteria, one PASS/FAIL line each.

use std::process::{Command, ExitCode};
use std::time::Instant;

use dampwave_core::invariants::structural_checks;
use dampwave_core::oracle::standard_grid;
use dampwave_core::rates::{
    erf_lemma_check, geometric_grid, lemma21_check, log_integral_check, quadrature_consistency,
    verify_theorem11, verify_theorem12, Check, VerifyOptions,
};
use dampwave_core::{
    compare_modes, FourierData, ModelParams, OdeRunConfig, QuadratureConfig, ZoneThresholds,
};

const EXPONENTS: [(u32, f64, f64); 6] = [
    (3, 1.0, -0.25),
    (4, 1.0, -0.5),
    (2, 0.5, -0.25),
    (1, 0.25, -0.125),
    (1, 0.75, 1.0 / 3.0),
    (1, 1.0, 0.5),
];

type Verdict = Result<(bool, String), String>;

fn setup(n: u32, theta: f64, m: f64) -> Result<(ModelParams, FourierData), String> {
    let p = ModelParams::new(n, theta, m).map_err(|e| e.to_string())?;
    let data = FourierData::gaussian(n, theta, 1.0).map_err(|e| e.to_string())?;
    Ok((p, data))
}

fn failing(checks: &[Check]) -> Vec<String> {
    checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("{} (measured {:.4e})", c.name, c.measured))
        .collect()
}

fn with_failures(summary: String, bad: &[String]) -> String {
    if bad.is_empty() {
        summary
    } else {
        format!("{summary}; failing: {}", bad.join("; "))
    }
}

fn regime_exponents() -> Verdict {
    let cfg = QuadratureConfig::default();
    let opts = VerifyOptions::default();
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for (n, theta, expected) in EXPONENTS {
        let (p, data) = setup(n, theta, 1.0)?;
        let rep = verify_theorem12(&p, &data, &cfg, &opts).map_err(|e| e.to_string())?;
        let gap = (rep.power_fit.slope - expected).abs();
        worst = worst.max(gap);
        if gap > 0.03 {
            bad.push(format!("({n},{theta}) slope {:.4}", rep.power_fit.slope));
        }
    }
    Ok((
        bad.is_empty(),
        with_failures(
            format!("worst |slope - theory| = {worst:.2e} (tolerance 0.03)"),
            &bad,
        ),
    ))
}

fn log_regimes() -> Verdict {
    let cfg = QuadratureConfig::default();
    let opts = VerifyOptions::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, theta) in [(1, 0.5), (2, 1.0)] {
        let (p, data) = setup(n, theta, 1.0)?;
        let rep = verify_theorem12(&p, &data, &cfg, &opts).map_err(|e| e.to_string())?;
        let ratio = rep.power_fit.residual_rms / rep.log_fit.residual_rms;
        ok &= ratio >= 5.0 && rep.log_fit.slope > 0.0;
        notes.push(format!(
            "({n},{theta}) residual ratio {ratio:.1}, log slope {:.4}",
            rep.log_fit.slope
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn profile_dominance() -> Verdict {
    let cfg = QuadratureConfig::default();
    let opts = VerifyOptions::default();
    let mut bad = Vec::new();
    let mut margin = f64::INFINITY;
    for (n, theta, _) in EXPONENTS {
        let (p, data) = setup(n, theta, 1.0)?;
        let rep = verify_theorem11(&p, &data, &cfg, &opts).map_err(|e| e.to_string())?;
        margin = margin.min(rep.error_slope_bound - rep.error_fit.slope);
        let tail = &rep.ratio_to_solution[rep.ratio_to_solution.len() - 10..];
        let decreasing = tail.windows(2).all(|w| w[1] < w[0]);
        let slope_ok = rep.error_fit.slope <= -f64::from(n) / 4.0 + 0.05;
        if !(decreasing && slope_ok) {
            bad.push(format!("({n},{theta}) slope {:.4}", rep.error_fit.slope));
        }
        bad.extend(failing(&rep.checks));
    }
    Ok((
        bad.is_empty(),
        with_failures(
            format!("smallest margin below the error slope bound {margin:.3e}"),
            &bad,
        ),
    ))
}

fn oracle_equivalence() -> Verdict {
    let mut worst = 0.0f64;
    for (theta, m) in [(1.0, 1.0), (0.5, 1.0), (0.75, 2.0)] {
        let (p, data) = setup(3, theta, m)?;
        let thr = ZoneThresholds::for_params(&p).map_err(|e| e.to_string())?;
        let mean_zero = FourierData::gaussian_difference(3, theta).map_err(|e| e.to_string())?;
        for d in [&data, &mean_zero] {
            let rep = compare_modes(&standard_grid(&thr), d, &p, &thr, &OdeRunConfig::default())
                .map_err(|e| e.to_string())?;
            worst = worst.max(rep.max_deviation);
        }
    }
    Ok((
        worst < 1e-6,
        format!("max relative deviation {worst:.3e} (limit 1e-6)"),
    ))
}

fn quadrature_self_consistency() -> Verdict {
    let mut worst = 0.0f64;
    for (n, theta, _) in EXPONENTS {
        let (p, data) = setup(n, theta, 1.0)?;
        let points =
            quadrature_consistency(&[1e2, 1e3, 1e4], &data, &p, &QuadratureConfig::default())
                .map_err(|e| e.to_string())?;
        worst = points.iter().map(|c| c.rel_diff).fold(worst, f64::max);
    }
    Ok((
        worst <= 0.02,
        format!("max averaged/resolved gap {worst:.3e} (limit 0.02)"),
    ))
}

fn structural_invariants() -> Verdict {
    let cfg = QuadratureConfig::default();
    let mut configs: Vec<(u32, f64, f64)> =
        EXPONENTS.iter().map(|&(n, t, _)| (n, t, 1.0)).collect();
    configs.extend([(3, 0.5, 1.0), (3, 0.75, 2.0), (1, 0.5, 1.0), (2, 1.0, 1.0)]);
    let mut bad = Vec::new();
    let mut count = 0;
    for (n, theta, m) in configs {
        let (p, data) = setup(n, theta, m)?;
        let checks = structural_checks(&data, &p, &cfg).map_err(|e| e.to_string())?;
        count += checks.len();
        bad.extend(
            failing(&checks)
                .into_iter()
                .map(|f| format!("({n},{theta},{m}) {f}")),
        );
    }
    let scaling = lemma21_check(
        3,
        1.0,
        &geometric_grid(1e2, 1e6, 17).map_err(|e| e.to_string())?,
        0.02,
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    if !scaling.holds {
        bad.push(format!("scaling exponent {:.4}", scaling.fit.slope));
    }
    Ok((
        bad.is_empty(),
        with_failures(format!("{count} checks"), &bad),
    ))
}

fn lemma_checkers() -> Verdict {
    let times = geometric_grid(10.0, 1e6, 21).map_err(|e| e.to_string())?;
    let mut ok = true;
    for (c, alpha) in [(1.0, 0.5), (2.0, 1.0), (0.5, 1.0 / 3.0)] {
        ok &= erf_lemma_check(c, alpha, &times)
            .map_err(|e| e.to_string())?
            .holds;
    }
    let log_times: Vec<f64> = (2..=8).map(|k| 10f64.powi(k)).collect();
    let rep =
        log_integral_check(&log_times, &QuadratureConfig::default()).map_err(|e| e.to_string())?;
    let lower_ok = rep.points.iter().all(|p| p.lower <= p.integral);
    Ok((
        ok && lower_ok && rep.monotone,
        format!(
            "erf sandwich {}, log-integral lower bound {} (I(1e8) = {:.4})",
            if ok { "holds" } else { "fails" },
            if lower_ok { "holds" } else { "fails" },
            rep.points.last().map_or(f64::NAN, |p| p.integral)
        ),
    ))
}

fn determinism() -> Verdict {
    let run = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_dampwave"))
            .args(args)
            .output()
            .map_err(|e| e.to_string())
    };
    let mut ok = true;
    for args in [
        &["verify"][..],
        &["verify", "--n", "1", "--theta", "0.75", "--out", "csv"],
    ] {
        let a = run(args)?;
        let b = run(args)?;
        ok &= a.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    }
    Ok((
        ok,
        "two verify runs per configuration compared byte for byte".into(),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("regime exponent matrix", regime_exponents),
        ("log regimes", log_regimes),
        ("profile dominance", profile_dominance),
        ("oracle equivalence", oracle_equivalence),
        ("quadrature self-consistency", quadrature_self_consistency),
        ("structural invariants", structural_invariants),
        ("lemma checkers", lemma_checkers),
        ("determinism", determinism),
    ];
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        all &= ok;
        println!(
            "criterion {} {name}: {} ({detail}) [{:.1}s]",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
