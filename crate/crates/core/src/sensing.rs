//! The noisy projection channel: `Y_j = <A_j, x> + W_j` with `W_j ~ N(0,1)`,
//! plus exact accounting of spent sensing energy `sum_j ||A_j||^2` and the
//! measurement count.
//!
//! Two budget semantics exist. In expected-budget mode the oracle only meters
//! energy; procedures are calibrated so the *mean* spend stays within `m`. In
//! hard mode a query that would push the ledger past the cap is refused and
//! the oracle is marked exhausted; procedures must finalize from the
//! decisions made so far.

use crate::error::MeasureError;
use crate::support::SupportSet;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::sync::atomic::{AtomicU64, Ordering};

/// Default ring-buffer capacity for query-log retention.
pub const DEFAULT_LOG_CAP: usize = 1_000_000;

static NEXT_VECTOR_ID: AtomicU64 = AtomicU64::new(1);

/// Hidden signal: `x_i = mu` for `i` in the support, 0 elsewhere.
#[derive(Debug, Clone)]
pub struct SignalInstance {
    n: usize,
    support: SupportSet,
    mu: f64,
}

impl SignalInstance {
    pub fn new(support: SupportSet, mu: f64) -> crate::Result<Self> {
        if !(mu > 0.0) {
            return Err(crate::Error::Config(format!("mu must be positive, got {mu}")));
        }
        Ok(SignalInstance { n: support.ambient_n(), support, mu })
    }

    /// Zero signal of dimension `n` (used for null-behavior experiments).
    pub fn null(n: usize) -> Self {
        let class = crate::SupportClass::Sset { n: n.max(1), s: 1 };
        // mu = 0 with a dummy support index: every measurement is pure noise.
        SignalInstance {
            n,
            support: SupportSet::new(vec![1], class).expect("dummy support"),
            mu: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &SupportSet {
        &self.support
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// A sparse sensing vector: sorted `(index, coefficient)` pairs with a cached
/// squared norm and a process-unique id (used by the oracle to memoize the
/// signal projection of a vector that is measured repeatedly).
#[derive(Debug, Clone)]
pub struct SenseVector {
    entries: Vec<(usize, f64)>,
    squared_norm: f64,
    id: u64,
}

impl SenseVector {
    pub fn new(mut entries: Vec<(usize, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(i, _)| i);
        entries.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        entries.retain(|&(_, c)| c != 0.0);
        let squared_norm = entries.iter().map(|&(_, c)| c * c).sum();
        SenseVector {
            entries,
            squared_norm,
            id: NEXT_VECTOR_ID.fetch_add(1, Ordering::Relaxed),
        }
    }

    /// `coeff * 1_{indices}`.
    pub fn uniform(indices: &[usize], coeff: f64) -> Self {
        SenseVector::new(indices.iter().map(|&i| (i, coeff)).collect())
    }

    pub fn singleton(index: usize, coeff: f64) -> Self {
        SenseVector::new(vec![(index, coeff)])
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn squared_norm(&self) -> f64 {
        self.squared_norm
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn max_index(&self) -> usize {
        self.entries.last().map(|&(i, _)| i).unwrap_or(0)
    }
}

/// One served query, as retained by the log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    /// 1-based measurement counter at the time the query was served.
    pub j: u64,
    pub norm_sq: f64,
    pub y: f64,
}

/// Query-log retention policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogPolicy {
    Off,
    /// Keep the most recent `cap` queries.
    Ring(usize),
    Full,
}

/// Energy budget semantics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetMode {
    Expected,
    Hard,
}

/// Stateful measurement channel. One oracle per trial; procedures are
/// sequential, so the oracle is deliberately not `Sync`.
pub struct SensingOracle {
    instance: SignalInstance,
    active: Vec<bool>,
    rng: ChaCha8Rng,
    energy_spent: f64,
    measurement_count: u64,
    hard_cap: Option<f64>,
    exhausted: bool,
    log_policy: LogPolicy,
    log: VecDeque<QueryRecord>,
    dot_cache: [(u64, f64); 2],
}

impl SensingOracle {
    pub fn new(instance: SignalInstance, rng: ChaCha8Rng, hard_cap: Option<f64>) -> Self {
        Self::with_log(instance, rng, hard_cap, LogPolicy::Ring(DEFAULT_LOG_CAP))
    }

    pub fn with_log(
        instance: SignalInstance,
        rng: ChaCha8Rng,
        hard_cap: Option<f64>,
        log_policy: LogPolicy,
    ) -> Self {
        let mut active = vec![false; instance.n() + 1];
        if instance.mu() > 0.0 {
            for &i in instance.support().indices() {
                active[i] = true;
            }
        }
        SensingOracle {
            instance,
            active,
            rng,
            energy_spent: 0.0,
            measurement_count: 0,
            hard_cap,
            exhausted: false,
            log_policy,
            log: VecDeque::new(),
            dot_cache: [(0, 0.0); 2],
        }
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    /// Serves one measurement: returns `mu * sum_{i in S} a_i + w` with a
    /// fresh standard normal `w`, charging `||a||^2` to the ledger.
    pub fn measure(&mut self, a: &SenseVector) -> Result<f64, MeasureError> {
        let n = self.instance.n();
        if a.max_index() > n {
            return Err(MeasureError::IndexOutOfRange(a.max_index(), n));
        }
        if let Some(cap) = self.hard_cap {
            if self.energy_spent + a.squared_norm() > cap {
                self.exhausted = true;
                return Err(MeasureError::BudgetExhausted);
            }
        }
        let dot = self.signal_dot(a);
        let w: f64 = StandardNormal.sample(&mut self.rng);
        let y = dot + w;
        self.energy_spent += a.squared_norm();
        self.measurement_count += 1;
        match self.log_policy {
            LogPolicy::Off => {}
            LogPolicy::Ring(cap) => {
                if self.log.len() == cap {
                    self.log.pop_front();
                }
                self.log.push_back(QueryRecord {
                    j: self.measurement_count,
                    norm_sq: a.squared_norm(),
                    y,
                });
            }
            LogPolicy::Full => self.log.push_back(QueryRecord {
                j: self.measurement_count,
                norm_sq: a.squared_norm(),
                y,
            }),
        }
        Ok(y)
    }

    fn signal_dot(&mut self, a: &SenseVector) -> f64 {
        for slot in &self.dot_cache {
            if slot.0 == a.id {
                return slot.1;
            }
        }
        let mut sum = 0.0;
        for &(i, c) in a.entries() {
            if self.active[i] {
                sum += c;
            }
        }
        let dot = self.instance.mu() * sum;
        self.dot_cache[1] = self.dot_cache[0];
        self.dot_cache[0] = (a.id, dot);
        dot
    }

    pub fn energy_spent(&self) -> f64 {
        self.energy_spent
    }

    pub fn measurement_count(&self) -> u64 {
        self.measurement_count
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn hard_cap(&self) -> Option<f64> {
        self.hard_cap
    }

    pub fn query_log(&self) -> &VecDeque<QueryRecord> {
        &self.log
    }

    /// Query log as CSV rows `trial,j,norm_sq,y`.
    pub fn log_to_csv(&self, trial: u64) -> String {
        let mut out = String::from("trial,j,norm_sq,y\n");
        for q in &self.log {
            out.push_str(&format!("{},{},{},{}\n", trial, q.j, q.norm_sq, q.y));
        }
        out
    }
}
