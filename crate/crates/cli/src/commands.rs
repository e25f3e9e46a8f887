use dampwave_core::invariants::structural_checks;
use dampwave_core::oracle::standard_grid;
use dampwave_core::rates::{
    erf_lemma_check, fit_log_law, fit_power_law, geometric_grid, lemma21_check, log_integral_check,
    mass_sweep, nan_from_null, profile_constants, quadrature_consistency, sample_grid,
    theorem11_from_samples, theorem12_from_series, Check, NormKind, NormSample, Status,
    VerifyOptions,
};
use dampwave_core::symbol::eval_discriminant_f;
use dampwave_core::{
    compare_modes, predict_regime, FourierData, NormSeries, OdeRunConfig, RateFit, RegimeKind,
    RegimePrediction, ZoneThresholds,
};
use serde::{Deserialize, Serialize};

use crate::config::{OutFormat, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

pub const NORMS_HEADER: &str = "t,norm_u,norm_phi,norm_err,energy,zone_low,zone_mid,zone_high,flag";

/// Rendered report and whether every check in it passed.
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    s.replace([',', '\n'], ";")
}

/// Pretty JSON with a trailing newline, as every report is written.
pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignRow {
    pub r: f64,
    pub f: f64,
    pub expected_sign: i8,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootsReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub thresholds: ZoneThresholds,
    pub radicand: f64,
    pub prediction: RegimePrediction,
    pub sign_table: Vec<SignRow>,
    pub sign_pattern_ok: bool,
}

pub fn roots(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let thr = ZoneThresholds::for_params(&cfg.params)?;
    let sign_table: Vec<SignRow> = [
        0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 1.001, 1.01, 1.1, 2.0, 5.0, 10.0,
    ]
    .iter()
    .map(|&k| {
        let r = k * thr.delta;
        let f = eval_discriminant_f(r, &cfg.params);
        let expected_sign = if k < 1.0 { -1 } else { 1 };
        SignRow {
            r,
            f,
            expected_sign,
            ok: f * f64::from(expected_sign) > 0.0,
        }
    })
    .collect();
    let report = RootsReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        thresholds: thr,
        radicand: thr.radicand(&cfg.params),
        prediction: predict_regime(cfg.params.n, cfg.params.theta)?,
        sign_pattern_ok: sign_table.iter().all(|r| r.ok),
        sign_table,
    };
    let text = match cfg.out.unwrap_or(OutFormat::Json) {
        OutFormat::Json => json(&report),
        OutFormat::Csv => {
            let mut s = String::from("key,value\n");
            for (k, v) in [
                ("delta", thr.delta),
                ("delta0", thr.delta0),
                ("delta1", thr.delta1),
                ("alpha", thr.alpha),
                ("beta", thr.beta),
                ("radicand", report.radicand),
            ] {
                s += &format!("{k},{}\n", sci(v));
            }
            s += "\nr,f,expected_sign,ok\n";
            for row in &report.sign_table {
                s += &format!(
                    "{},{},{},{}\n",
                    sci(row.r),
                    sci(row.f),
                    row.expected_sign,
                    row.ok
                );
            }
            s
        }
    };
    Ok(Outcome {
        text,
        passed: report.sign_pattern_ok,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub t: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub norm_u: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub norm_phi: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub norm_err: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub energy: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub zone_low: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub zone_mid: f64,
    #[serde(deserialize_with = "nan_from_null")]
    pub zone_high: f64,
    pub flag: String,
}

impl NormRow {
    fn from_sample(s: &NormSample) -> Self {
        let u = &s.solution;
        Self {
            t: s.t,
            norm_u: u.norm(),
            norm_phi: s.profile.norm(),
            norm_err: s.error.norm(),
            energy: s.energy.map_or(f64::NAN, |e| e.total),
            zone_low: u.low.sqrt(),
            zone_mid: u.middle.sqrt(),
            zone_high: (u.high_mid + u.high_tail).sqrt(),
            flag: "ok".into(),
        }
    }

    fn failed(t: f64, reason: String) -> Self {
        Self {
            t,
            norm_u: f64::NAN,
            norm_phi: f64::NAN,
            norm_err: f64::NAN,
            energy: f64::NAN,
            zone_low: f64::NAN,
            zone_mid: f64::NAN,
            zone_high: f64::NAN,
            flag: reason,
        }
    }

    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            sci(self.t),
            sci(self.norm_u),
            sci(self.norm_phi),
            sci(self.norm_err),
            sci(self.energy),
            sci(self.zone_low),
            sci(self.zone_mid),
            sci(self.zone_high),
            csv_field(&self.flag)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormsReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub rows: Vec<NormRow>,
}

pub fn norm_rows(
    cfg: &RunConfig,
    data: &FourierData,
    with_energy: bool,
) -> anyhow::Result<Vec<NormRow>> {
    let thr = ZoneThresholds::for_params(&cfg.params)?;
    let times = cfg.times();
    Ok(
        sample_grid(&times, data, &cfg.params, &thr, &cfg.quad, with_energy)
            .into_iter()
            .zip(&times)
            .map(|(s, &t)| match s {
                Ok(s) => NormRow::from_sample(&s),
                Err(e) => NormRow::failed(t, format!("failed: {e}")),
            })
            .collect(),
    )
}

pub fn norms(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let data = cfg.build_data()?;
    let rows = norm_rows(cfg, &data, true)?;
    let passed = rows.iter().all(|r| r.flag == "ok");
    let text = match cfg.out.unwrap_or(OutFormat::Csv) {
        OutFormat::Csv => {
            let mut s = format!("{NORMS_HEADER}\n");
            for row in &rows {
                s += &row.csv();
                s.push('\n');
            }
            s
        }
        OutFormat::Json => json(&NormsReport {
            schema_version: SCHEMA_VERSION,
            config: cfg.clone(),
            rows,
        }),
    };
    Ok(Outcome { text, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesFits {
    pub kind: NormKind,
    pub power: Option<RateFit>,
    pub log: Option<RateFit>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub prediction: RegimePrediction,
    pub fits: Vec<SeriesFits>,
    /// `(t, ‖u‖, ‖φ‖, ‖û − φ‖)` for external plotting.
    pub series: Vec<[f64; 4]>,
}

fn fits_for(kind: NormKind, times: &[f64], values: Vec<f64>) -> SeriesFits {
    let mut out = SeriesFits {
        kind,
        power: None,
        log: None,
        note: String::new(),
    };
    if values.iter().any(|v| !(*v > 0.0)) {
        out.note = "series not positive".into();
        return out;
    }
    match NormSeries::new(kind, times.to_vec(), values) {
        Ok(series) => match (fit_power_law(&series), fit_log_law(&series)) {
            (Ok(p), Ok(l)) => {
                out.power = Some(p);
                out.log = Some(l);
            }
            (Err(e), _) | (_, Err(e)) => out.note = e.to_string(),
        },
        Err(e) => out.note = e.to_string(),
    }
    out
}

pub fn rates(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let data = cfg.build_data()?;
    let rows = norm_rows(cfg, &data, false)?;
    if let Some(bad) = rows.iter().find(|r| r.flag != "ok") {
        anyhow::bail!("t = {}: {}", bad.t, bad.flag);
    }
    let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let col = |f: fn(&NormRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
    let fits = vec![
        fits_for(NormKind::Solution, &times, col(|r| r.norm_u)),
        fits_for(NormKind::Profile, &times, col(|r| r.norm_phi)),
        fits_for(NormKind::Error, &times, col(|r| r.norm_err)),
    ];
    let report = RatesReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        prediction: predict_regime(cfg.params.n, cfg.params.theta)?,
        fits,
        series: rows
            .iter()
            .map(|r| [r.t, r.norm_u, r.norm_phi, r.norm_err])
            .collect(),
    };
    let text = match cfg.out.unwrap_or(OutFormat::Json) {
        OutFormat::Json => json(&report),
        OutFormat::Csv => {
            let mut s = String::from("series,law,slope,intercept,residual_rms,samples,note\n");
            for f in &report.fits {
                let name = format!("{:?}", f.kind).to_lowercase();
                for (law, fit) in [("power", f.power), ("log", f.log)] {
                    match fit {
                        Some(fit) => {
                            s += &format!(
                                "{name},{law},{},{},{},{},\n",
                                sci(fit.slope),
                                sci(fit.intercept),
                                sci(fit.residual_rms),
                                fit.samples
                            );
                        }
                        None => s += &format!("{name},{law},,,,,{}\n", csv_field(&f.note)),
                    }
                }
            }
            s
        }
    };
    Ok(Outcome { text, passed: true })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn render_checks(command: &str, cfg: &RunConfig, checks: Vec<Check>) -> Outcome {
    let passed = checks.iter().all(Check::passed);
    let text = match cfg.out.unwrap_or(OutFormat::Json) {
        OutFormat::Json => json(&CheckReport {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config: cfg.clone(),
            checks,
            passed,
        }),
        OutFormat::Csv => {
            let mut s = String::from("name,status,measured,expected,tolerance,detail\n");
            for c in &checks {
                let status = match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                    Status::Skipped => "skipped",
                };
                s += &format!(
                    "{},{status},{},{},{},{}\n",
                    c.name,
                    sci(c.measured),
                    sci(c.expected),
                    sci(c.tolerance),
                    csv_field(&c.detail)
                );
            }
            s
        }
    };
    Outcome { text, passed }
}

/// Prefix check names with `group/`; a precondition failure becomes one
/// skipped entry and any other error one failed entry.
fn group(name: &str, result: dampwave_core::Result<Vec<Check>>) -> Vec<Check> {
    match result {
        Ok(checks) => checks
            .into_iter()
            .map(|mut c| {
                c.name = format!("{name}/{}", c.name);
                c
            })
            .collect(),
        Err(dampwave_core::Error::Precondition(reason)) => vec![Check::skipped(name, reason)],
        Err(e) => {
            vec![Check::new(name, false, f64::NAN, f64::NAN, f64::NAN).with_detail(e.to_string())]
        }
    }
}

fn clip(times: Vec<f64>, cfg: &RunConfig) -> Vec<f64> {
    match cfg.t_max {
        Some(t_max) => times
            .into_iter()
            .filter(|&t| t <= t_max * (1.0 + 1e-12))
            .collect(),
        None => times,
    }
}

fn require_decades(times: &[f64]) -> dampwave_core::Result<()> {
    match (times.first(), times.last()) {
        (Some(a), Some(b)) if times.len() >= 8 && (b / a).log10() >= 3.0 - 1e-9 => Ok(()),
        _ => Err(dampwave_core::Error::Precondition(format!(
            "grid after t_max has {} points, short of 3 decades",
            times.len()
        ))),
    }
}

fn rate_checks(cfg: &RunConfig, data: &FourierData) -> Vec<Check> {
    let opts = VerifyOptions {
        grid: cfg.grid,
        exponent_override: cfg.expect_exponent,
        ..VerifyOptions::default()
    };
    let prepared = (|| {
        if data.p1 == 0.0 {
            return Err(dampwave_core::Error::Precondition(
                "data have zero mean, the rate laws need P₁ ≠ 0".into(),
            ));
        }
        let times = cfg.times();
        require_decades(&times)?;
        let thr = ZoneThresholds::for_params(&cfg.params)?;
        sample_grid(&times, data, &cfg.params, &thr, &cfg.quad, false)
            .into_iter()
            .collect::<dampwave_core::Result<Vec<_>>>()
    })();
    let samples = match prepared {
        Ok(s) => s,
        Err(e) => {
            let mut out = group("growth-law", Err(e.clone()));
            out.extend(group("profile-dominance", Err(e)));
            return out;
        }
    };
    let prediction = predict_regime(cfg.params.n, cfg.params.theta);
    let growth = prediction.and_then(|p| {
        let series = NormSeries::new(
            NormKind::Solution,
            samples.iter().map(|s| s.t).collect(),
            samples.iter().map(|s| s.solution.norm()).collect(),
        )?;
        Ok(theorem12_from_series(series, p, data, &opts)?.checks)
    });
    let mut out = group("growth-law", growth);
    out.extend(group(
        "profile-dominance",
        theorem11_from_samples(&cfg.params, &samples, &opts).map(|r| r.checks),
    ));
    out
}

fn oracle_checks(cfg: &RunConfig, data: &FourierData) -> dampwave_core::Result<Vec<Check>> {
    let thr = ZoneThresholds::for_params(&cfg.params)?;
    let grid: Vec<(f64, f64)> = standard_grid(&thr)
        .into_iter()
        .filter(|&(t, _)| cfg.t_max.is_none_or(|m| t <= m))
        .collect();
    let rep = compare_modes(&grid, data, &cfg.params, &thr, &OdeRunConfig::default())?;
    let detail = rep
        .argmax
        .map(|(t, r)| format!("worst at t = {t}, r = {r}"))
        .unwrap_or_default();
    Ok(vec![Check::new(
        "standard-grid",
        rep.max_deviation < 1e-6,
        rep.max_deviation,
        0.0,
        1e-6,
    )
    .with_detail(detail)])
}

fn consistency_checks(cfg: &RunConfig, data: &FourierData) -> dampwave_core::Result<Vec<Check>> {
    let times = clip(vec![1e2, 1e3, 1e4], cfg);
    if times.is_empty() {
        return Err(dampwave_core::Error::Precondition(
            "t_max excludes every consistency time".into(),
        ));
    }
    let points = quadrature_consistency(&times, data, &cfg.params, &cfg.quad)?;
    Ok(points
        .iter()
        .map(|p| {
            Check::new(
                format!("averaged-vs-resolved@{:e}", p.t),
                p.rel_diff <= 0.02,
                p.rel_diff,
                0.0,
                0.02,
            )
        })
        .collect())
}

fn constant_checks(cfg: &RunConfig, data: &FourierData) -> Vec<Check> {
    let mut out = Vec::new();
    let times = cfg.times();
    let grid = match (times.first(), times.last()) {
        (Some(&t0), Some(&t1)) if times.len() >= 2 => dampwave_core::GridSpec {
            t0,
            t1,
            count: times.len(),
        },
        _ => {
            return vec![Check::skipped("constants", "grid empty after t_max")];
        }
    };
    let p = &cfg.params;
    let decay = f64::from(p.n) > 2.0 * p.theta;
    out.extend(group(
        "constants",
        if decay {
            profile_constants(p, data.p1, &cfg.quad, &grid).map(|c| {
                vec![
                    Check::new(
                        "profile-upper",
                        c.upper.is_finite(),
                        c.upper,
                        f64::NAN,
                        f64::NAN,
                    ),
                    Check::new("profile-lower", c.lower > 0.0, c.lower, 0.0, f64::NAN),
                ]
            })
        } else {
            Err(dampwave_core::Error::Precondition(
                "profile constants apply when n > 2θ".into(),
            ))
        },
    ));
    let growth = predict_regime(p.n, p.theta).is_ok_and(|r| r.kind == RegimeKind::PowerGrowth);
    out.extend(group(
        "mass-sweep",
        if growth && data.p1 != 0.0 {
            mass_sweep(p.theta, &[0.5, 1.0, 2.0], data, &cfg.quad, &grid).map(|s| {
                let sup = s.entries.iter().map(|e| e.1).fold(0.0, f64::max);
                vec![
                    Check::new("scaled-constant", s.bounded, sup, f64::NAN, f64::NAN).with_detail(
                        format!(
                            "m ↦ constant: {:?}; non-increasing: {}",
                            s.entries, s.non_increasing
                        ),
                    ),
                ]
            })
        } else {
            Err(dampwave_core::Error::Precondition(
                "mass sweep applies to n = 1, θ > ½ with P₁ ≠ 0".into(),
            ))
        },
    ));
    out
}

fn lemma_checks(cfg: &RunConfig) -> Vec<Check> {
    let mut out = Vec::new();
    let erf_times = clip(geometric_grid(10.0, 1e6, 21).unwrap_or_default(), cfg);
    for (c, alpha) in [(1.0, 0.5), (2.0, 1.0), (0.5, 1.0 / 3.0)] {
        out.extend(group(
            "erf-sandwich",
            erf_lemma_check(c, alpha, &erf_times).map(|r| {
                let worst = r
                    .points
                    .iter()
                    .map(|p| (p.value - p.lower).min(p.upper - p.value))
                    .fold(f64::INFINITY, f64::min);
                vec![Check::new(
                    format!("c={c},alpha={alpha:.4}"),
                    r.holds,
                    worst,
                    0.0,
                    0.0,
                )]
            }),
        ));
    }
    let log_times = clip((2..=8).map(|k| 10f64.powi(k)).collect(), cfg);
    out.extend(group(
        "log-integral",
        log_integral_check(&log_times, &cfg.quad).map(|r| {
            let margin = r
                .points
                .iter()
                .map(|p| p.integral - p.lower)
                .fold(f64::INFINITY, f64::min);
            vec![
                Check::new(
                    "lower-bound",
                    r.points.iter().all(|p| p.lower <= p.integral),
                    margin,
                    0.0,
                    0.0,
                ),
                Check::new(
                    "monotone",
                    r.monotone,
                    f64::from(u8::from(r.monotone)),
                    1.0,
                    0.0,
                ),
                Check::new("bounded-ratio", r.holds, r.sup_ratio, f64::NAN, f64::NAN),
            ]
        }),
    ));
    let times = geometric_grid(1e2, 1e6, 17).unwrap_or_default();
    out.extend(group(
        "scaling",
        lemma21_check(cfg.params.n, 1.0, &times, 0.02, &cfg.quad).map(|r| {
            vec![Check::new(
                "exponent",
                r.holds,
                r.fit.slope,
                r.expected,
                0.02,
            )]
        }),
    ));
    out
}

pub fn verify(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let data = cfg.build_data()?;
    let mut checks = rate_checks(cfg, &data);
    checks.extend(group("oracle", oracle_checks(cfg, &data)));
    checks.extend(group("consistency", consistency_checks(cfg, &data)));
    checks.extend(group(
        "structure",
        structural_checks(&data, &cfg.params, &cfg.quad),
    ));
    checks.extend(constant_checks(cfg, &data));
    checks.extend(lemma_checks(cfg));
    Ok(render_checks("verify", cfg, checks))
}

pub fn lemmas(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    Ok(render_checks("lemmas", cfg, lemma_checks(cfg)))
}
