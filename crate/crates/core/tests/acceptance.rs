//! One pass/fail line per acceptance criterion. Lines go straight to stderr
//! so they show whether or not the harness captures output.

mod common;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::*;
use sourcebf::cli::cmd_evaluate;
use sourcebf::config::RunConfig;
use sourcebf::evaluator::*;
use sourcebf::evidence::{build_scenario, load_dataset, EvidenceSet};
use sourcebf::samplers::*;
use sourcebf::simulator::{convergence_study, median_gaps, study_default_mcmc, DesignSpec, TrueParams};
use sourcebf::stats::{compound_logpdf, MeanVector, SpdMatrix};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn line(text: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{text}");
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_time(elapsed: Duration, limit_s: f64, what: &str) -> Outcome {
    check(
        elapsed.as_secs_f64() < limit_s,
        format!("{what} took {:.2}s (limit {limit_s}s)", elapsed.as_secs_f64()),
    )
}

// ---- real glass data (criteria 1 to 4) ----

const SEED_B: u64 = 977;

struct GlassScenario {
    name: &'static str,
    config: RunConfig,
}

impl GlassScenario {
    fn evidence(&self) -> EvidenceSet {
        let data = self.config.data.as_ref().unwrap();
        let bytes = std::fs::read(self.config.data_path().unwrap()).unwrap();
        let dataset = load_dataset(&bytes[..], &data.schema()).unwrap();
        build_scenario(&dataset, &self.config.scenario.as_ref().unwrap().spec()).unwrap()
    }

    fn evaluate(&self, seed: u64) -> std::result::Result<(BayesFactorReport, Duration), String> {
        let out = tempfile::tempdir().unwrap();
        let start = Instant::now();
        let outcome = cmd_evaluate(&self.config, Some(seed), Some(out.path())).map_err(|e| e.to_string())?;
        Ok((outcome.report, start.elapsed()))
    }
}

fn glass_data_path() -> std::result::Result<PathBuf, String> {
    let path = std::env::var_os("SOURCEBF_GLASS_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| fixture("glass_class1.csv"));
    if path.is_file() {
        Ok(path)
    } else {
        Err(format!(
            "real class-1 glass fixture unavailable (looked for {}; set SOURCEBF_GLASS_DATA); synthetic data cannot stand in for published values",
            path.display()
        ))
    }
}

fn glass_scenarios() -> std::result::Result<[GlassScenario; 2], String> {
    let data = glass_data_path()?;
    let load = |name: &'static str, file: &str| {
        let text = std::fs::read_to_string(fixture(file))
            .unwrap()
            .replace("\"synthetic_glass.csv\"", &format!("{:?}", data.display().to_string()));
        let config = RunConfig::parse(&text, fixture("")).map_err(|e| e.to_string())?;
        Ok::<_, String>(GlassScenario { name, config })
    };
    Ok([load("scenario 1", "scenario1.toml")?, load("scenario 2", "scenario2.toml")?])
}

fn all_of(parts: Vec<Outcome>) -> Outcome {
    let failed = parts.iter().any(|p| p.is_err());
    let text = parts
        .into_iter()
        .map(|p| match p {
            Ok(s) => s,
            Err(s) => format!("FAILED {s}"),
        })
        .collect::<Vec<_>>()
        .join("; ");
    check(!failed, text)
}

fn criterion_1() -> Outcome {
    let scenarios = glass_scenarios()?;
    let targets = [582.6974, 144.1683];
    let mut parts = Vec::new();
    for (s, target) in scenarios.iter().zip(targets) {
        let e = s.evidence();
        let start = Instant::now();
        let est = plugin_estimates(&e.alternative_features()).map_err(|e| e.to_string())?;
        let den = log_denominator_plugin(&e.trace_features(), &est).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let value = den.log_value.exp();
        let rel = (value - target).abs() / target;
        parts.push(check(rel <= 0.01, format!("{} f = {value:.4} vs {target} (rel {rel:.4}, tol 0.01)", s.name)));
        parts.push(within_time(elapsed, 1.0, s.name));
    }
    all_of(parts)
}

/// Criteria 2 and 3 share shape: log value within ±0.70 of the published
/// figure, two seeds within 3 combined MC-SE, and a runtime bound.
fn mc_criterion(pick: fn(&BayesFactorReport) -> &LogDensityEstimate, targets: [f64; 2], limit_s: f64) -> Outcome {
    let scenarios = glass_scenarios()?;
    let mut parts = Vec::new();
    for (s, target) in scenarios.iter().zip(targets) {
        let seed_a = s.config.mcmc.seed;
        let (ra, ta) = s.evaluate(seed_a)?;
        let (rb, _) = s.evaluate(SEED_B)?;
        let (a, b) = (pick(&ra), pick(&rb));
        let gap = (a.log_value - target.ln()).abs();
        parts.push(check(
            gap <= 0.70,
            format!("{} log = {:.4} vs ln {target} = {:.4} (|diff| {gap:.3}, tol 0.70)", s.name, a.log_value, target.ln()),
        ));
        let se = a.mc_se.hypot(b.mc_se);
        let diff = (a.log_value - b.log_value).abs();
        parts.push(check(diff <= 3.0 * se, format!("{} seeds differ by {diff:.4} (3 SE = {:.4})", s.name, 3.0 * se)));
        parts.push(within_time(ta, limit_s, s.name));
    }
    all_of(parts)
}

fn criterion_2() -> Outcome {
    mc_criterion(|r| &r.numerator, [119740.3, 2.316277], 60.0)
}

fn criterion_3() -> Outcome {
    mc_criterion(|r| &r.denominator_full, [30.17140, 209.5902], 120.0)
}

fn criterion_4() -> Outcome {
    let [s1, s2] = glass_scenarios()?;
    let (r1, _) = s1.evaluate(s1.config.mcmc.seed)?;
    let (r2, _) = s2.evaluate(s2.config.mcmc.seed)?;
    all_of(vec![
        check(r1.plugin.v > 50.0, format!("scenario 1 V_plugin = {:.4} (> 50)", r1.plugin.v)),
        check(r1.full.v > 500.0, format!("scenario 1 V_full = {:.4} (> 500)", r1.full.v)),
        check(r2.plugin.v < 0.05, format!("scenario 2 V_plugin = {:.6} (< 0.05)", r2.plugin.v)),
        check(r2.full.v < 0.05, format!("scenario 2 V_full = {:.6} (< 0.05)", r2.full.v)),
    ])
}

// ---- oracles (criteria 5 to 7) ----

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut r = rng(500);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for i in 0..20 {
        let k = 1 + i % 3;
        let sigma = random_spd(k, 0.5, &mut r);
        let mu_true = random_vec(k, 1.0, &mut r);
        let l = sigma.clone().cholesky().unwrap().l();
        let mut draw = || mv(&(&mu_true + &l * random_vec(k, 1.0, &mut r)));
        let e_s: Vec<MeanVector> = (0..3).map(|_| draw()).collect();
        let e_u: Vec<MeanVector> = (0..2).map(|_| draw()).collect();
        let prior = SpecificPrior::new(
            MeanVector::zeros(k),
            SpdMatrix::scaled_identity(k, 10.0),
            SpdMatrix::identity(k),
            k as f64 + 2.0,
        )
        .unwrap();
        let hooks = SpecificHooks {
            fixed_sigma: Some(spd(&sigma)),
            prior_only: false,
        };
        let settings = McmcSettings {
            seed: 5_000 + i as u64,
            ..McmcSettings::default()
        };
        let set = gibbs_specific_with(&e_s, &prior, &settings, &hooks).map_err(|e| e.to_string())?;
        let mc = log_numerator(&e_u, &set).map_err(|e| e.to_string())?;
        let exact = closed_form_predictive_known_cov(&e_u, &e_s, &prior.mu0, &prior.lambda0, &spd(&sigma))
            .map_err(|e| e.to_string())?;
        let z = (mc.log_value - exact).abs() / mc.mc_se;
        worst = worst.max(z);
        if z > 3.0 {
            failures.push(format!("instance {i} (k={k}) off by {z:.2} SE"));
        }
    }
    all_of(vec![
        check(failures.is_empty(), format!("20 instances, worst {worst:.2} MC-SE (tol 3) {}", failures.join(", "))),
        within_time(start.elapsed(), 30.0, "total"),
    ])
}

fn criterion_6() -> Outcome {
    let mut r = rng(600);
    let mut exact_err: f64 = 0.0;
    for k in 1..=3 {
        let sb = random_spd(k, 1.0, &mut r);
        let sw = random_spd(k, 0.3, &mut r);
        let mu = random_vec(k, 1.0, &mut r);
        let y = random_vec(k, 1.0, &mut r);
        let c = compound_logpdf(&[mv(&y)], &mv(&mu), &spd(&sb), &spd(&sw)).map_err(|e| e.to_string())?;
        exact_err = exact_err.max((c - gauss_logpdf(&y, &mu, &(&sb + &sw))).abs());
    }
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        let k = 1 + i % 3;
        let sb = random_spd(k, 0.5, &mut r);
        let sw = random_spd(k, 0.5, &mut r);
        let mu = random_vec(k, 1.0, &mut r);
        let ys: Vec<_> = (0..3).map(|_| &mu + random_vec(k, 0.8, &mut r)).collect();
        let frags: Vec<MeanVector> = ys.iter().map(mv).collect();
        let c = compound_logpdf(&frags, &mv(&mu), &spd(&sb), &spd(&sw)).map_err(|e| e.to_string())?;
        let (est, se) = mc_compound(&ys, &mu, &sb, &sw, 1_000_000, 6_000 + i as u64);
        worst = worst.max((c - est).abs() / se);
    }
    all_of(vec![
        check(exact_err <= 1e-10, format!("m=1 max error {exact_err:.2e} (tol 1e-10)")),
        check(worst <= 3.0, format!("m=3, 10 instances at 1e6 draws, worst {worst:.2} MC-SE (tol 3)")),
    ])
}

fn criterion_7() -> Outcome {
    let mut r = rng(700);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let n = 2 + i % 12;
        let m = 2 + i % 4;
        let k = 1 + i % 3;
        let groups: Vec<Vec<Vec<f64>>> = (0..n)
            .map(|_| (0..m).map(|_| (0..k).map(|_| 3.0 * normal(&mut r)).collect()).collect())
            .collect();
        let e_a: Vec<Vec<MeanVector>> = groups
            .iter()
            .map(|g| g.iter().map(|y| MeanVector::from_slice(y).unwrap()).collect())
            .collect();
        let est = plugin_estimates(&e_a).map_err(|e| e.to_string())?;
        let (mu, sw, sb) = brute_plugin(&groups);
        for p in 0..k {
            worst = worst.max((est.mu_hat[p] - mu[p]).abs() / mu[p].abs().max(1.0));
            for q in 0..k {
                let scale = sw[p][q].abs().max(sb[p][q].abs()).max(1.0);
                worst = worst.max((est.raw_sigma_w[(p, q)] - sw[p][q]).abs() / scale);
                worst = worst.max((est.raw_sigma_b[(p, q)] - sb[p][q]).abs() / scale);
            }
        }
    }
    check(worst <= 1e-12, format!("100 datasets, worst scaled error {worst:.2e} (tol 1e-12)"))
}

// ---- study, invariance, determinism (criteria 8 to 10) ----

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let rows = convergence_study(
        &TrueParams::study_default(),
        &DesignSpec::default(),
        &[10, 50, 250],
        20,
        &study_default_mcmc(),
        20140101,
    )
    .map_err(|e| e.to_string())?;
    let medians = median_gaps(&rows);
    let at = |n| medians.iter().find(|(m, _)| *m == n).map(|(_, g)| *g).unwrap();
    let (g10, g250) = (at(10), at(250));
    let summary = medians.iter().map(|(n, g)| format!("n={n}: {g:.4}")).collect::<Vec<_>>().join(", ");
    all_of(vec![
        check(g250 < g10, format!("median gaps {summary}")),
        within_time(start.elapsed(), 1800.0, "study"),
    ])
}

fn synthetic_scenario1() -> EvidenceSet {
    let config = RunConfig::load(&fixture("scenario1.toml")).unwrap();
    let bytes = std::fs::read(config.data_path().unwrap()).unwrap();
    let dataset = load_dataset(&bytes[..], &config.data.as_ref().unwrap().schema()).unwrap();
    build_scenario(&dataset, &config.scenario.as_ref().unwrap().spec()).unwrap()
}

fn criterion_9() -> Outcome {
    let e = synthetic_scenario1();
    let settings = McmcSettings {
        iterations: 5_000,
        seed: 9,
        ..McmcSettings::default()
    };
    let e_u = e.trace_features();
    let mut rev = e_u.clone();
    rev.reverse();
    let groups = e.alternative_features();
    let mut relabeled = groups.clone();
    relabeled.rotate_left(3);
    relabeled.swap(1, 9);
    for g in &mut relabeled {
        g.rotate_left(2);
    }
    let err = |x: sourcebf::Error| x.to_string();
    let spec = gibbs_specific(&e.specific_features(), &SpecificPrior::glass_default(), &settings).map_err(err)?;
    let alt = gibbs_alternative(&groups, &AlternativePrior::glass_default(), &settings).map_err(err)?;
    let alt_relabeled = gibbs_alternative(&relabeled, &AlternativePrior::glass_default(), &settings).map_err(err)?;
    let est = plugin_estimates(&groups).map_err(err)?;
    let est_relabeled = plugin_estimates(&relabeled).map_err(err)?;
    all_of(vec![
        check(
            log_numerator(&e_u, &spec).map_err(err)? == log_numerator(&rev, &spec).map_err(err)?,
            "numerator trace permutation".into(),
        ),
        check(
            log_denominator_full(&e_u, &alt).map_err(err)? == log_denominator_full(&rev, &alt).map_err(err)?,
            "full denominator trace permutation".into(),
        ),
        check(
            log_denominator_plugin(&e_u, &est).map_err(err)? == log_denominator_plugin(&rev, &est).map_err(err)?,
            "plug-in denominator trace permutation".into(),
        ),
        check(est == est_relabeled, "plug-in estimates under source relabeling".into()),
        check(
            log_denominator_full(&e_u, &alt).map_err(err)? == log_denominator_full(&e_u, &alt_relabeled).map_err(err)?,
            "full denominator under source relabeling".into(),
        ),
    ])
    .map(|s| format!("bit-exact: {s}"))
}

fn report_without_timestamp(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("generated_at"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn criterion_10() -> Outcome {
    let config = RunConfig::load(&fixture("scenario1.toml")).map_err(|e| e.to_string())?;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = cmd_evaluate(&config, None, Some(a.path())).map_err(|e| e.to_string())?;
    let rb = cmd_evaluate(&config, None, Some(b.path())).map_err(|e| e.to_string())?;
    let same_report = report_without_timestamp(&ra.report_path) == report_without_timestamp(&rb.report_path);
    let same_files = ra
        .files
        .iter()
        .zip(&rb.files)
        .filter(|(p, _)| p.extension().is_some_and(|x| x == "csv"))
        .all(|(p, q)| std::fs::read(p).unwrap() == std::fs::read(q).unwrap());
    all_of(vec![
        check(same_report, "structured report identical apart from generated_at".into()),
        check(same_files, "draw and diagnostics files byte-identical".into()),
    ])
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("plug-in denominator on glass data", criterion_1),
        ("MC numerator on glass data", criterion_2),
        ("MC full denominator on glass data", criterion_3),
        ("direction of evidence on glass data", criterion_4),
        ("closed-form predictive oracle", criterion_5),
        ("compound density oracle", criterion_6),
        ("plug-in estimator oracle", criterion_7),
        ("convergence study", criterion_8),
        ("invariance suite", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        match run() {
            Ok(detail) => line(&format!("criterion {n:>2} PASS  {name}: {detail}")),
            Err(detail) => {
                line(&format!("criterion {n:>2} FAIL  {name}: {detail}"));
                failed.push(n);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
