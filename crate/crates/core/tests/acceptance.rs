//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities (run with `--nocapture` to see them).

use asl_core::harness::{
    self, ExperimentConfig, MuGridSpec, ProcedureId, SweepResult, TrialRecord,
};
use asl_core::sensing::{BudgetMode, LogPolicy, SignalInstance, SensingOracle};
use asl_core::slrt::{run_slrt, SlrtConfig};
use asl_core::support::{SupportClass, SupportSet};
use asl_core::theory;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn oracle_single(active: bool, mu: f64, seed: u64) -> SensingOracle {
    let inst = if active {
        let set = SupportSet::new(vec![1], SupportClass::Sset { n: 1, s: 1 }).unwrap();
        SignalInstance::new(set, mu).unwrap()
    } else {
        SignalInstance::null(1)
    };
    SensingOracle::with_log(inst, ChaCha8Rng::seed_from_u64(seed), None, LogPolicy::Off)
}

/// Criterion 1: single-component sequential test calibration. Nominal
/// alpha = beta = 0.05 must realize within 0.06 empirically, and the mean
/// energy under the alternative must respect the Wald bound with a 15%
/// overshoot band.
#[test]
fn c01_slrt_calibration() {
    let trials = 10_000u64;
    let mu = 1.0;
    let (alpha, beta) = (0.05, 0.05);
    let mut false_alarms = 0u64;
    let mut misses = 0u64;
    let mut h1_energy = 0.0;
    for t in 0..trials {
        let cfg = SlrtConfig::new(alpha, beta, vec![1], 0.0, 1.0, mu).unwrap();
        let mut o0 = oracle_single(false, mu, 2 * t);
        if run_slrt(&mut o0, &cfg).accepted_alt() {
            false_alarms += 1;
        }
        let mut o1 = oracle_single(true, mu, 2 * t + 1);
        let out = run_slrt(&mut o1, &cfg);
        if !out.accepted_alt() {
            misses += 1;
        }
        h1_energy += out.energy;
    }
    let type1 = false_alarms as f64 / trials as f64;
    let type2 = misses as f64 / trials as f64;
    let mean_energy = h1_energy / trials as f64;
    let bound = (2.0 / (mu * mu)) * (1.0 / alpha).ln() * 1.15;
    assert!(type1 <= 0.06, "type I rate {type1} > 0.06");
    assert!(type2 <= 0.06, "type II rate {type2} > 0.06");
    assert!(mean_energy <= bound, "mean H1 energy {mean_energy} > {bound}");
    println!(
        "ACCEPTANCE C1 (slrt calibration): PASS — type I {type1:.4}, type II {type2:.4}, \
         mean H1 energy {mean_energy:.3} <= {bound:.3}"
    );
}

fn sweep_records(config: &ExperimentConfig) -> (SweepResult, Vec<TrialRecord>) {
    harness::sweep_with_records(config).expect("sweep")
}

/// Criterion 2: per-component recovery at n=512, s=2, m=512, eps=0.1 and
/// mu = 1.5x the sequential-test threshold.
#[test]
fn c02_sset_recovery_at_calibrated_mu() {
    let config = ExperimentConfig {
        class: SupportClass::Sset { n: 512, s: 2 },
        procedure: ProcedureId::Sset,
        m: 512.0,
        epsilon: 0.1,
        mu_grid: MuGridSpec::ThresholdMultiples { threshold: None, factors: vec![1.5] },
        trials: 1000,
        seed: 1002,
        budget_mode: BudgetMode::Expected,
        hard_budget_multiplier: 4.0,
        calibration_mu: None,
        fixed_support: None,
    };
    let (result, _) = sweep_records(&config);
    let point = &result.points[0];
    let upper = point.mean_sym_diff + point.ci95_half_width;
    assert!(
        upper <= 0.1,
        "mean symmetric difference CI upper bound {upper} > 0.1 (mean {})",
        point.mean_sym_diff
    );
    assert!(
        point.mean_energy <= 1.1 * config.m,
        "mean energy {} > 1.1m",
        point.mean_energy
    );
    println!(
        "ACCEPTANCE C2 (s-set recovery): PASS — mean sym diff {:.4} (+CI {:.4}), \
         mean energy {:.1} <= {:.1}",
        point.mean_sym_diff,
        point.ci95_half_width,
        point.mean_energy,
        1.1 * config.m
    );
}

/// Criterion 3: bisection s-set recovery at its sufficient point, fixed
/// schedule within the 2s*log2(n/2s) cap and energy within m on every trial.
#[test]
fn c03_cass_sset_sufficient_point() {
    let (n, s) = (1024usize, 4usize);
    let m = 1024.0;
    let eps = 0.1;
    let mu = (32.0 * n as f64 / m * (2.0 * s as f64 / eps).ln()).sqrt();
    let config = ExperimentConfig {
        class: SupportClass::Sset { n, s },
        procedure: ProcedureId::CassSset,
        m,
        epsilon: eps,
        mu_grid: MuGridSpec::single(mu),
        trials: 1000,
        seed: 1003,
        budget_mode: BudgetMode::Expected,
        hard_budget_multiplier: 4.0,
        calibration_mu: None,
        fixed_support: None,
    };
    let (result, records) = sweep_records(&config);
    let cap = 2.0 * s as f64 * (n as f64 / (2.0 * s as f64)).log2(); // 56
    let fixed = records[0].samples;
    for r in &records {
        assert!(r.samples as f64 <= cap, "trial {}: {} samples > {cap}", r.trial, r.samples);
        assert_eq!(r.samples, fixed, "schedule not fixed at trial {}", r.trial);
        assert!(r.energy <= m, "trial {}: energy {} > m", r.trial, r.energy);
    }
    let failure = 1.0 - result.points[0].exact_rate;
    assert!(failure <= 0.1, "P(estimate != truth) = {failure} > 0.1");
    println!(
        "ACCEPTANCE C3 (bisection s-sets): PASS — failure rate {failure:.4}, \
         samples {fixed} <= {cap}, max energy {:.2} <= {m}",
        result.points[0].max_energy
    );
}

/// Criterion 4: bisection interval recovery at the stated sufficient point
/// with the 3k(log2(n/2ks) + 1.5s) sample cap.
#[test]
fn c04_cass_intervals_sufficient_point() {
    let (n, s, k) = (8192usize, 8usize, 1usize);
    let m = 8192.0;
    let eps = 0.1;
    let config = ExperimentConfig {
        class: SupportClass::Intervals { n, s, k },
        procedure: ProcedureId::CassIntervals,
        m,
        epsilon: eps,
        mu_grid: MuGridSpec::ThresholdMultiples {
            threshold: Some("prop19".into()),
            factors: vec![1.0],
        },
        trials: 500,
        seed: 1004,
        budget_mode: BudgetMode::Expected,
        hard_budget_multiplier: 4.0,
        calibration_mu: None,
        fixed_support: None,
    };
    let (result, records) = sweep_records(&config);
    let cap = 3.0 * k as f64
        * ((n as f64 / (2.0 * (k * s) as f64)).log2() + 1.5 * s as f64); // 63
    for r in &records {
        assert!(r.samples as f64 <= cap, "trial {}: {} samples > {cap}", r.trial, r.samples);
    }
    let point = &result.points[0];
    assert!(point.mean_sym_diff <= 0.1, "mean sym diff {} > 0.1", point.mean_sym_diff);
    println!(
        "ACCEPTANCE C4 (bisection intervals): PASS — mean sym diff {:.4}, \
         max samples {} <= {cap}",
        point.mean_sym_diff, point.max_samples
    );
}

/// Criterion 5: star bisection at its stated sufficient point with the
/// 4 log2(p/4) + 2s log2((p-1)/s) sample cap.
#[test]
fn c05_cass_star_sufficient_point() {
    let (p, s) = (64usize, 4usize);
    let n = p * (p - 1) / 2; // 2016
    let m = n as f64;
    let eps = 0.1;
    let mu = (392.0 * n as f64 / ((s * s) as f64 * m) * (9.0 * s as f64 / eps).ln()).sqrt();
    let config = ExperimentConfig {
        class: SupportClass::Stars { p, s, k: 1 },
        procedure: ProcedureId::CassStar,
        m,
        epsilon: eps,
        mu_grid: MuGridSpec::single(mu),
        trials: 500,
        seed: 1005,
        budget_mode: BudgetMode::Expected,
        hard_budget_multiplier: 4.0,
        calibration_mu: None,
        fixed_support: None,
    };
    let (result, records) = sweep_records(&config);
    let cap = 4.0 * (p as f64 / 4.0).log2()
        + 2.0 * s as f64 * ((p as f64 - 1.0) / s as f64).log2();
    for r in &records {
        assert!(
            r.samples as f64 <= cap.ceil(),
            "trial {}: {} samples > {}",
            r.trial,
            r.samples,
            cap.ceil()
        );
        assert!(r.energy <= m, "trial {}: energy {} > m", r.trial, r.energy);
    }
    let point = &result.points[0];
    assert!(point.mean_sym_diff <= 0.1, "mean sym diff {} > 0.1", point.mean_sym_diff);
    println!(
        "ACCEPTANCE C5 (bisection stars): PASS — mean sym diff {:.4}, \
         max samples {} <= {:.2}",
        point.mean_sym_diff, point.max_samples, cap
    );
}

/// Criterion 6: submatrix bisection at the stated sufficient point with the
/// two-phase 48-sample cap.
#[test]
fn c06_cass_submatrix_sufficient_point() {
    let (n_r, n_c, s_r, s_c) = (64usize, 64usize, 4usize, 4usize);
    let m = (n_r * n_c) as f64;
    let eps = 0.1;
    let config = ExperimentConfig {
        class: SupportClass::Submatrix { n_r, n_c, s_r, s_c },
        procedure: ProcedureId::CassSubmatrix,
        m,
        epsilon: eps,
        mu_grid: MuGridSpec::ThresholdMultiples {
            threshold: Some("prop20".into()),
            factors: vec![1.0],
        },
        trials: 500,
        seed: 1006,
        budget_mode: BudgetMode::Expected,
        hard_budget_multiplier: 4.0,
        calibration_mu: None,
        fixed_support: None,
    };
    let (result, records) = sweep_records(&config);
    let cap = 2.0 * s_c as f64 * (n_c as f64 / (2.0 * s_c as f64)).log2()
        + 2.0 * s_r as f64 * (n_r as f64 / (2.0 * s_r as f64)).log2(); // 48
    for r in &records {
        assert!(r.samples as f64 <= cap, "trial {}: {} samples > {cap}", r.trial, r.samples);
    }
    let point = &result.points[0];
    assert!(point.mean_sym_diff <= 0.1, "mean sym diff {} > 0.1", point.mean_sym_diff);
    println!(
        "ACCEPTANCE C6 (bisection submatrix): PASS — mean sym diff {:.4}, \
         max samples {} <= {cap}",
        point.mean_sym_diff, point.max_samples
    );
}

/// Criterion 7: the interval recovery transition reproduces the
/// (1/s) sqrt((n/m) log ks) scaling law: with m = n and s, k fixed, the
/// critical magnitude is invariant in n, so mu* x s / sqrt(ln ks) collapses
/// across n in {2^13, 2^15, 2^17}. The budget is enforced as a hard cap
/// (the transition is exactly where the energy demand crosses m).
#[test]
fn c07_interval_scaling_collapse() {
    let (s, k) = (8usize, 1usize);
    let factors = vec![0.35, 0.5, 0.6, 0.68, 0.76, 0.85, 0.95, 1.1];
    let mut collapsed = Vec::new();
    for exp in [13u32, 15, 17] {
        let n = 1usize << exp;
        let config = ExperimentConfig {
            class: SupportClass::Intervals { n, s, k },
            procedure: ProcedureId::Intervals,
            m: n as f64,
            epsilon: 0.1,
            mu_grid: MuGridSpec::ThresholdMultiples {
                threshold: Some("prop2".into()),
                factors: factors.clone(),
            },
            trials: 300,
            seed: 1007,
            budget_mode: BudgetMode::Hard,
            hard_budget_multiplier: 1.0,
            calibration_mu: None,
            fixed_support: None,
        };
        let result = harness::sweep(&config).expect("sweep");
        let crit = result
            .critical_mu
            .unwrap_or_else(|| panic!("no critical mu found at n=2^{exp}"));
        collapsed.push(crit * s as f64 / ((k * s) as f64).ln().sqrt());
    }
    let mean = collapsed.iter().sum::<f64>() / collapsed.len() as f64;
    for (i, v) in collapsed.iter().enumerate() {
        let dev = (v - mean).abs() / mean;
        assert!(
            dev <= 0.2,
            "scaling collapse broke at n index {i}: values {collapsed:?}"
        );
    }
    println!(
        "ACCEPTANCE C7 (interval scaling law): PASS — collapsed mu* values {:?} \
         (max deviation {:.1}%)",
        collapsed,
        collapsed
            .iter()
            .map(|v| (v - mean).abs() / mean)
            .fold(0.0f64, f64::max)
            * 100.0
    );
}

/// Criterion 8: hard-budget wrapping of the s-set procedure at c = 4 keeps
/// every trial within 4m, truncates rarely, and preserves the criterion-2
/// recovery target.
#[test]
fn c08_hard_budget_mode() {
    let config = ExperimentConfig {
        class: SupportClass::Sset { n: 512, s: 2 },
        procedure: ProcedureId::Sset,
        m: 512.0,
        epsilon: 0.1,
        mu_grid: MuGridSpec::ThresholdMultiples { threshold: None, factors: vec![1.5] },
        trials: 1000,
        seed: 1008,
        budget_mode: BudgetMode::Hard,
        hard_budget_multiplier: 4.0,
        calibration_mu: None,
        fixed_support: None,
    };
    let (result, records) = sweep_records(&config);
    let cap = 4.0 * config.m;
    for r in &records {
        assert!(r.energy <= cap, "trial {}: energy {} > 4m", r.trial, r.energy);
    }
    let point = &result.points[0];
    assert!(
        point.truncation_rate <= 0.05,
        "truncation rate {} > 0.05",
        point.truncation_rate
    );
    let upper = point.mean_sym_diff + point.ci95_half_width;
    assert!(upper <= 0.1, "mean sym diff CI upper bound {upper} > 0.1");
    println!(
        "ACCEPTANCE C8 (hard budget): PASS — max energy {:.1} <= {cap}, truncation \
         rate {:.4}, mean sym diff {:.4}",
        point.max_energy, point.truncation_rate, point.mean_sym_diff
    );
}

/// Criterion 9: threshold evaluators agree with an independently written
/// generator (tools/gen_golden_thresholds.py) to ten significant digits on
/// twenty reports.
#[test]
fn c09_threshold_golden_file() {
    let data = include_str!("golden/thresholds.json");
    let golden: serde_json::Value = serde_json::from_str(data).expect("golden json");
    let cases = golden.as_array().expect("array of reports");
    assert_eq!(cases.len(), 20);
    let mut compared = 0usize;
    for case in cases {
        let class: SupportClass =
            serde_json::from_value(case["class"].clone()).expect("class");
        let m = case["m"].as_f64().unwrap();
        let eps = case["epsilon"].as_f64().unwrap();
        let mu = case.get("mu").and_then(|v| v.as_f64());
        let report = theory::evaluate(&class, m, eps, mu).expect("evaluate");

        let mut ours: BTreeMap<String, Option<f64>> = BTreeMap::new();
        for (prefix, list) in [
            ("sufficient", &report.sufficient_mu),
            ("necessary_adaptive", &report.necessary_mu_adaptive),
            ("necessary_nonadaptive", &report.necessary_mu_nonadaptive),
            ("sample_cap", &report.sample_caps),
        ] {
            for lv in list {
                ours.insert(format!("{prefix}.{}", lv.id), lv.value);
            }
        }
        if let Some(lv) = &report.sample_lower_nonadaptive {
            ours.insert(format!("sample_lower.{}", lv.id), lv.value);
        }

        let theirs = case["values"].as_object().expect("values");
        assert_eq!(
            ours.len(),
            theirs.len(),
            "id sets differ for {class:?}: ours {ours:?} vs {theirs:?}"
        );
        for (key, val) in theirs {
            let mine = ours
                .get(key)
                .unwrap_or_else(|| panic!("{class:?}: missing id {key}"));
            match (mine, val.as_f64()) {
                (Some(a), Some(b)) => {
                    let tol = 1e-9 * a.abs().max(b.abs()).max(1e-300);
                    assert!(
                        (a - b).abs() <= tol,
                        "{class:?} {key}: {a} vs {b}"
                    );
                    compared += 1;
                }
                (None, None) => {
                    compared += 1;
                }
                (a, b) => panic!("{class:?} {key}: applicability mismatch {a:?} vs {b:?}"),
            }
        }

        let regime = case["regime"].as_object().expect("regime");
        assert_eq!(regime.len(), report.regime_checks.len(), "{class:?} regime count");
        for rc in &report.regime_checks {
            let want = regime
                .get(&rc.condition)
                .unwrap_or_else(|| panic!("{class:?}: regime '{}' missing", rc.condition))
                .as_bool()
                .unwrap();
            assert_eq!(rc.satisfied, want, "{class:?} regime '{}'", rc.condition);
        }
    }
    println!(
        "ACCEPTANCE C9 (threshold golden file): PASS — 20 reports, {compared} values \
         agree to 10 significant digits"
    );
}

/// Criterion 10: sweeps are byte-deterministic across reruns and thread
/// counts.
#[test]
fn c10_sweep_determinism() {
    let config = ExperimentConfig {
        class: SupportClass::Sset { n: 256, s: 2 },
        procedure: ProcedureId::CassSset,
        m: 256.0,
        epsilon: 0.1,
        mu_grid: MuGridSpec::ThresholdMultiples {
            threshold: None,
            factors: vec![0.5, 1.0, 2.0],
        },
        trials: 50,
        seed: 1010,
        budget_mode: BudgetMode::Expected,
        hard_budget_multiplier: 4.0,
        calibration_mu: None,
        fixed_support: None,
    };
    let mut outputs = Vec::new();
    for threads in [1usize, 4, 4] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let result = pool.install(|| harness::sweep(&config)).unwrap();
        outputs.push(serde_json::to_string_pretty(&result).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "1-thread vs 4-thread outputs differ");
    assert_eq!(outputs[1], outputs[2], "repeat runs differ");
    println!(
        "ACCEPTANCE C10 (sweep determinism): PASS — {} output bytes identical across \
         thread counts and reruns",
        outputs[0].len()
    );
}
