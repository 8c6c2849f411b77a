//! Sequential likelihood-ratio test over a fixed probe set.
//!
//! The test repeatedly senses `a * 1_{probe}` and accumulates the Gaussian
//! log-likelihood ratio between "alt_count active components in the probe"
//! and "null_count active", stopping at the first exit from the boundary
//! interval `(l, u)` with `l = ln(beta / (1 - alpha))` and
//! `u = ln((1 - beta) / alpha)`.
//!
//! The boundary error guarantees are asymptotic in the per-step amplitude;
//! at a finite amplitude the realized error rates track the nominal ones up
//! to the boundary overshoot, which the default step-size rule keeps small.

use crate::error::{Error, MeasureError, Result};
use crate::sensing::{SenseVector, SensingOracle};
use serde::{Deserialize, Serialize};

/// Fraction of the nearer boundary allowed per step of expected drift
/// (per-step KL divergence). Governs the asymptotic-regime approximation:
/// smaller means more steps and less overshoot.
pub const DEFAULT_STEP_KL_FRACTION: f64 = 0.01;

/// Multiplier on `(u - l) / step_kl` used for the truncation safety cap.
const MAX_STEPS_FACTOR: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlrtDecision {
    AcceptNull,
    AcceptAlt,
    /// Stopped without a boundary crossing (step cap or budget refusal).
    /// Callers treat this as a null acceptance.
    Truncated,
}

/// Boundaries `(l, u)` for nominal error probabilities `alpha`, `beta`.
pub fn slrt_boundaries(alpha: f64, beta: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 0.5) || !(beta > 0.0 && beta < 0.5) {
        return Err(Error::Domain(format!(
            "slrt boundaries require alpha, beta in (0, 1/2), got alpha={alpha} beta={beta}"
        )));
    }
    let l = (beta / (1.0 - alpha)).ln();
    let u = ((1.0 - beta) / alpha).ln();
    Ok((l, u))
}

/// Log-likelihood ratio of one observation `y` between `N(a*d1, 1)` and
/// `N(a*d0, 1)`: `a(d1-d0)y - a^2(d1^2-d0^2)/2`.
pub fn llr_increment(y: f64, a: f64, d0: f64, d1: f64) -> f64 {
    a * (d1 - d0) * y - a * a * (d1 * d1 - d0 * d0) / 2.0
}

/// Configuration of one sequential test.
#[derive(Debug, Clone)]
pub struct SlrtConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Per-step sensing amplitude applied to every probe component.
    pub amplitude: f64,
    pub probe_set: Vec<usize>,
    /// Hypothesized active component counts under the null and alternative.
    pub null_count: f64,
    pub alt_count: f64,
    /// Working signal magnitude the test is calibrated for.
    pub mu: f64,
    pub lower: f64,
    pub upper: f64,
    pub max_steps: u64,
}

impl SlrtConfig {
    /// Builds a test with the default amplitude rule: the amplitude is chosen
    /// so the per-step KL divergence `a^2 ((alt-null) mu)^2 / 2` equals
    /// `step_kl_fraction * min(|l|, u)`.
    pub fn new(
        alpha: f64,
        beta: f64,
        probe_set: Vec<usize>,
        null_count: f64,
        alt_count: f64,
        mu: f64,
    ) -> Result<Self> {
        Self::with_step_fraction(
            alpha,
            beta,
            probe_set,
            null_count,
            alt_count,
            mu,
            DEFAULT_STEP_KL_FRACTION,
        )
    }

    pub fn with_step_fraction(
        alpha: f64,
        beta: f64,
        probe_set: Vec<usize>,
        null_count: f64,
        alt_count: f64,
        mu: f64,
        step_kl_fraction: f64,
    ) -> Result<Self> {
        let (lower, upper) = slrt_boundaries(alpha, beta)?;
        if !(alt_count > null_count) || null_count < 0.0 {
            return Err(Error::Domain(format!(
                "slrt requires 0 <= null_count < alt_count, got {null_count} vs {alt_count}"
            )));
        }
        if !(mu > 0.0) {
            return Err(Error::Domain(format!("slrt requires mu > 0, got {mu}")));
        }
        if !(step_kl_fraction > 0.0) {
            return Err(Error::Domain("step_kl_fraction must be positive".into()));
        }
        let step_kl = step_kl_fraction * (-lower).min(upper);
        let drift_gap = (alt_count - null_count) * mu;
        let amplitude = (2.0 * step_kl).sqrt() / drift_gap;
        let max_steps = (MAX_STEPS_FACTOR * (upper - lower) / step_kl).ceil() as u64;
        Ok(SlrtConfig {
            alpha,
            beta,
            amplitude,
            probe_set,
            null_count,
            alt_count,
            mu,
            lower,
            upper,
            max_steps,
        })
    }
}

/// Outcome of one sequential test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlrtOutcome {
    pub decision: SlrtDecision,
    pub steps: u64,
    pub energy: f64,
    pub final_llr: f64,
    /// True when the oracle refused a query (hard budget), as opposed to the
    /// step cap.
    pub refused: bool,
}

impl SlrtOutcome {
    pub fn accepted_alt(&self) -> bool {
        self.decision == SlrtDecision::AcceptAlt
    }
}

/// Runs the test to a boundary crossing, the step cap, or a budget refusal.
pub fn run_slrt(oracle: &mut SensingOracle, cfg: &SlrtConfig) -> SlrtOutcome {
    let vector = SenseVector::uniform(&cfg.probe_set, cfg.amplitude);
    let d0 = cfg.null_count * cfg.mu;
    let d1 = cfg.alt_count * cfg.mu;
    let mut llr = 0.0;
    let mut steps = 0u64;
    let per_step_energy = vector.squared_norm();
    loop {
        if steps >= cfg.max_steps {
            return SlrtOutcome {
                decision: SlrtDecision::Truncated,
                steps,
                energy: per_step_energy * steps as f64,
                final_llr: llr,
                refused: false,
            };
        }
        let y = match oracle.measure(&vector) {
            Ok(y) => y,
            Err(MeasureError::BudgetExhausted) => {
                return SlrtOutcome {
                    decision: SlrtDecision::Truncated,
                    steps,
                    energy: per_step_energy * steps as f64,
                    final_llr: llr,
                    refused: true,
                }
            }
            Err(e) => panic!("sense vector construction bug: {e}"),
        };
        steps += 1;
        llr += llr_increment(y, cfg.amplitude, d0, d1);
        if llr >= cfg.upper {
            return SlrtOutcome {
                decision: SlrtDecision::AcceptAlt,
                steps,
                energy: per_step_energy * steps as f64,
                final_llr: llr,
                refused: false,
            };
        }
        if llr <= cfg.lower {
            return SlrtOutcome {
                decision: SlrtDecision::AcceptNull,
                steps,
                energy: per_step_energy * steps as f64,
                final_llr: llr,
                refused: false,
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sensing::{LogPolicy, SignalInstance, SensingOracle};
    use crate::support::{SupportClass, SupportSet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn oracle_with(n: usize, support: Vec<usize>, mu: f64, seed: u64) -> SensingOracle {
        let inst = if support.is_empty() || mu == 0.0 {
            SignalInstance::null(n)
        } else {
            let s = support.len();
            SignalInstance::new(
                SupportSet::new(support, SupportClass::Sset { n, s }).unwrap(),
                mu,
            )
            .unwrap()
        };
        SensingOracle::with_log(inst, ChaCha8Rng::seed_from_u64(seed), None, LogPolicy::Off)
    }

    #[test]
    fn boundary_values() {
        let (l, u) = slrt_boundaries(0.1, 0.1).unwrap();
        assert!((l + 2.19722).abs() < 1e-5);
        assert!((u - 2.19722).abs() < 1e-5);
        assert!((l + u).abs() < 1e-12); // alpha = beta symmetry

        let (l, u) = slrt_boundaries(0.05, 0.2).unwrap();
        assert!((l - (0.2f64 / 0.95).ln()).abs() < 1e-12);
        assert!((u - (0.8f64 / 0.05).ln()).abs() < 1e-12);
        assert!((l + 1.55814).abs() < 1e-5);
        assert!((u - 2.77259).abs() < 1e-5);

        assert!(slrt_boundaries(0.5, 0.1).is_err());
        assert!(slrt_boundaries(0.1, 0.0).is_err());
    }

    #[test]
    fn increment_values() {
        assert!((llr_increment(0.0, 1.0, 0.0, 1.0) + 0.5).abs() < 1e-15);
        assert!((llr_increment(1.0, 1.0, 0.0, 1.0) - 0.5).abs() < 1e-15);
        // hand evaluation: 0.5*2*2 - 0.25*8/2 = 1.0
        assert!((llr_increment(2.0, 0.5, 1.0, 3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn increment_matches_density_ratio() {
        // cross-check against direct evaluation of the two normal densities
        let cases = [(0.7, 0.3, 0.0, 2.0), (-1.2, 0.8, 1.0, 3.0), (2.5, 0.1, 0.5, 4.0)];
        for (y, a, d0, d1) in cases {
            let logphi = |x: f64, m: f64| -0.5 * (x - m) * (x - m);
            let want = logphi(y, a * d1) - logphi(y, a * d0);
            assert!((llr_increment(y, a, d0, d1) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn extreme_snr_decides_in_one_step() {
        // a*(d1-d0) >= 10: one observation carries the whole decision
        for t in 0..1000u64 {
            let mut o = oracle_with(1, vec![1], 100.0, t);
            let mut cfg =
                SlrtConfig::new(0.05, 0.05, vec![1], 0.0, 1.0, 100.0).unwrap();
            cfg.amplitude = 0.1; // a*(d1-d0) = 10
            let out = run_slrt(&mut o, &cfg);
            assert_eq!(out.decision, SlrtDecision::AcceptAlt);
            assert_eq!(out.steps, 1);
        }
    }

    #[test]
    fn nominal_error_rates_hold_empirically() {
        let trials = 10_000;
        let mut false_alarms = 0;
        let mut misses = 0;
        for t in 0..trials {
            let cfg = SlrtConfig::new(0.05, 0.05, vec![1], 0.0, 1.0, 1.0).unwrap();
            let mut o0 = oracle_with(1, vec![], 0.0, 2 * t);
            if run_slrt(&mut o0, &cfg).accepted_alt() {
                false_alarms += 1;
            }
            let mut o1 = oracle_with(1, vec![1], 1.0, 2 * t + 1);
            if !run_slrt(&mut o1, &cfg).accepted_alt() {
                misses += 1;
            }
        }
        let fa = false_alarms as f64 / trials as f64;
        let miss = misses as f64 / trials as f64;
        assert!(fa <= 0.06, "type I rate {fa}");
        assert!(miss <= 0.06, "type II rate {miss}");
    }

    #[test]
    fn energy_identity_and_ledger_agree() {
        let mut o = oracle_with(8, vec![1, 2], 1.5, 3);
        let cfg = SlrtConfig::new(0.1, 0.1, vec![1, 2, 3], 0.0, 2.0, 1.5).unwrap();
        let before = o.energy_spent();
        let out = run_slrt(&mut o, &cfg);
        let ledger = o.energy_spent() - before;
        let identity = out.steps as f64 * cfg.amplitude * cfg.amplitude * 3.0;
        assert!((out.energy - ledger).abs() <= 1e-9 * ledger.max(1.0));
        assert!((out.energy - identity).abs() <= 1e-9 * identity.max(1.0));
    }

    #[test]
    fn refusal_truncates_without_panic() {
        let inst = SignalInstance::null(4);
        let mut o = SensingOracle::with_log(
            inst,
            ChaCha8Rng::seed_from_u64(5),
            Some(1e-6),
            LogPolicy::Off,
        );
        let cfg = SlrtConfig::new(0.1, 0.1, vec![1], 0.0, 1.0, 1.0).unwrap();
        let out = run_slrt(&mut o, &cfg);
        assert_eq!(out.decision, SlrtDecision::Truncated);
        assert!(out.refused);
        assert_eq!(out.steps, 0);
    }

    #[test]
    fn mean_energy_tracks_wald_bounds() {
        // mean spend per probe component obeys the asymptotic bounds
        // (2/drift_gap^2) ln(1/alpha) under H1 and ln(1/beta) under H0,
        // up to a 15% overshoot band
        let trials = 10_000;
        let mu = 1.0;
        let (alpha, beta) = (0.05f64, 0.08f64);
        let mut total_h1 = 0.0;
        let mut total_h0 = 0.0;
        for t in 0..trials {
            let cfg = SlrtConfig::new(alpha, beta, vec![1], 0.0, 1.0, mu).unwrap();
            let mut o1 = oracle_with(1, vec![1], mu, 31_000 + t);
            total_h1 += run_slrt(&mut o1, &cfg).energy;
            let mut o0 = oracle_with(1, vec![], 0.0, 61_000 + t);
            total_h0 += run_slrt(&mut o0, &cfg).energy;
        }
        let mean_h1 = total_h1 / trials as f64;
        let bound_h1 = (2.0 / (mu * mu)) * (1.0 / alpha).ln() * 1.15;
        assert!(mean_h1 <= bound_h1, "H1 mean energy {mean_h1} > {bound_h1}");
        let mean_h0 = total_h0 / trials as f64;
        let bound_h0 = (2.0 / (mu * mu)) * (1.0 / beta).ln() * 1.15;
        assert!(mean_h0 <= bound_h0, "H0 mean energy {mean_h0} > {bound_h0}");
    }

    #[test]
    fn partial_drift_energy_bounded() {
        // true count strictly between null and alt, away from the midpoint
        let trials = 10_000;
        let mu = 1.0;
        let (alpha, beta) = (0.05, 0.05);
        for truth in [1usize, 3usize] {
            let mut total = 0.0;
            for t in 0..trials {
                let cfg = SlrtConfig::new(alpha, beta, vec![1, 2, 3, 4], 0.0, 4.0, mu).unwrap();
                let mut o = oracle_with(4, (1..=truth).collect(), mu, 77_000 + t);
                total += run_slrt(&mut o, &cfg).energy / 4.0;
            }
            let mean = total / trials as f64;
            let delta = (truth as f64 - 2.0).abs();
            let bound =
                2.0 / (4.0 * delta * mu * mu) * (1.0f64 / alpha.min(beta)).ln() * 1.25;
            assert!(mean <= bound, "truth {truth}: mean {mean} > bound {bound}");
        }
    }

    #[test]
    fn acceptance_probability_monotone_in_true_count() {
        let trials = 4000;
        let mu = 0.8;
        let mut rates = Vec::new();
        for truth in 0usize..=4 {
            let mut hits = 0;
            for t in 0..trials {
                let cfg = SlrtConfig::new(0.1, 0.1, vec![1, 2, 3, 4], 0.0, 4.0, mu).unwrap();
                let mut o = oracle_with(4, (1..=truth.max(1)).take(truth).collect(), mu, 55_000 + t);
                if run_slrt(&mut o, &cfg).accepted_alt() {
                    hits += 1;
                }
            }
            rates.push(hits as f64 / trials as f64);
        }
        // two-sigma slack on each adjacent comparison
        let slack = 2.0 * (0.25f64 / trials as f64).sqrt();
        for w in rates.windows(2) {
            assert!(w[1] >= w[0] - slack, "rates not monotone: {rates:?}");
        }
    }
}
