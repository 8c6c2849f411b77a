//! Two-phase (search + refine) support recovery built on sequential
//! likelihood-ratio tests, one procedure per structured class.
//!
//! Each procedure takes the working signal magnitude it is calibrated for;
//! the energy budget itself lives in the oracle (a hard cap refuses queries,
//! the expected-budget mode just meters). On a refusal the procedure stops
//! testing and finalizes from the decisions made so far, with the
//! `truncated` flag set.

use crate::error::Result;
use crate::sensing::SensingOracle;
use crate::slrt::{run_slrt, SlrtConfig, SlrtOutcome};
use crate::support::EdgeIndexer;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Energy/sample split between the two phases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseBreakdown {
    pub search_energy: f64,
    pub refine_energy: f64,
    pub search_samples: u64,
    pub refine_samples: u64,
}

/// Outcome of one recovery run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    /// Estimated support, sorted component indices in `1..=n`.
    pub estimate: Vec<usize>,
    pub energy: f64,
    pub samples: u64,
    pub phases: PhaseBreakdown,
    pub truncated: bool,
    /// Size of the search-phase candidate set, where the procedure has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate_size: Option<usize>,
}

/// Tracks ledger deltas and the refusal flag across a run.
struct RunMeter {
    start_energy: f64,
    start_samples: u64,
    truncated: bool,
}

impl RunMeter {
    fn new(oracle: &SensingOracle) -> Self {
        RunMeter {
            start_energy: oracle.energy_spent(),
            start_samples: oracle.measurement_count(),
            truncated: false,
        }
    }

    fn observe(&mut self, outcome: &SlrtOutcome) -> bool {
        if outcome.refused {
            self.truncated = true;
        }
        outcome.refused
    }

    fn snapshot(&self, oracle: &SensingOracle) -> (f64, u64) {
        (
            oracle.energy_spent() - self.start_energy,
            oracle.measurement_count() - self.start_samples,
        )
    }

    fn finish(
        self,
        oracle: &SensingOracle,
        estimate: Vec<usize>,
        search: (f64, u64),
        candidate_size: Option<usize>,
    ) -> RecoveryResult {
        let (energy, samples) = self.snapshot(oracle);
        RecoveryResult {
            estimate,
            energy,
            samples,
            phases: PhaseBreakdown {
                search_energy: search.0,
                refine_energy: energy - search.0,
                search_samples: search.1,
                refine_samples: samples - search.1,
            },
            truncated: self.truncated,
            candidate_size,
        }
    }
}

/// Per-component sequential tests over the whole signal; the estimate is the
/// set of components whose test crossed the upper boundary.
pub fn recover_sset(
    oracle: &mut SensingOracle,
    n: usize,
    s: usize,
    epsilon: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    let alpha = epsilon / (2.0 * n as f64);
    let beta = epsilon / (2.0 * s as f64);
    let mut meter = RunMeter::new(oracle);
    let mut estimate = Vec::new();
    for i in 1..=n {
        let cfg = SlrtConfig::new(alpha, beta, vec![i], 0.0, 1.0, mu)?;
        let out = run_slrt(oracle, &cfg);
        if out.accepted_alt() {
            estimate.push(i);
        }
        if meter.observe(&out) {
            break;
        }
    }
    let search = meter.snapshot(oracle);
    Ok(meter.finish(oracle, estimate, search, None))
}

/// Options for the interval search binning.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntervalOptions {
    /// Shrink bins from `s/2` to `s/2 - 1` components, which removes the
    /// midpoint-drift tie for `s` divisible by 4.
    pub shrink_bins: bool,
}

pub fn recover_intervals(
    oracle: &mut SensingOracle,
    n: usize,
    s: usize,
    k: usize,
    epsilon: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    recover_intervals_with(oracle, n, s, k, epsilon, mu, IntervalOptions::default())
}

/// Search over length-`s/2` bins with H0 "bin disjoint from S" vs H1 "bin
/// inside S"; the candidate set P adds both neighbors of every accepted bin;
/// refinement runs per-component tests inside P.
pub fn recover_intervals_with(
    oracle: &mut SensingOracle,
    n: usize,
    s: usize,
    k: usize,
    epsilon: f64,
    mu: f64,
    opts: IntervalOptions,
) -> Result<RecoveryResult> {
    let nf = n as f64;
    let (sf, kf) = (s as f64, k as f64);
    let alpha = epsilon / (6.0 * nf);
    let beta = epsilon / (8.0 * kf * kf * sf * sf);
    let alpha_r = epsilon / (4.0 * nf);
    let beta_r = epsilon / (4.0 * kf * sf);

    let mut bin_len = (s / 2).max(1);
    if opts.shrink_bins && bin_len > 1 {
        bin_len -= 1;
    }
    let bins: Vec<(usize, usize)> = (1..=n)
        .step_by(bin_len)
        .map(|lo| (lo, (lo + bin_len - 1).min(n)))
        .collect();

    let mut meter = RunMeter::new(oracle);
    let mut accepted = vec![false; bins.len()];
    'search: for (b, &(lo, hi)) in bins.iter().enumerate() {
        let probe: Vec<usize> = (lo..=hi).collect();
        let alt = probe.len() as f64;
        let cfg = SlrtConfig::new(alpha, beta, probe, 0.0, alt, mu)?;
        let out = run_slrt(oracle, &cfg);
        accepted[b] = out.accepted_alt();
        if meter.observe(&out) {
            break 'search;
        }
    }
    let search = meter.snapshot(oracle);

    // a bin enters P if it or a neighbor was accepted
    let mut candidates = Vec::new();
    for (b, &(lo, hi)) in bins.iter().enumerate() {
        let keep = accepted[b]
            || (b > 0 && accepted[b - 1])
            || (b + 1 < bins.len() && accepted[b + 1]);
        if keep {
            candidates.extend(lo..=hi);
        }
    }
    let p_size = candidates.len();

    let mut estimate = Vec::new();
    if !meter.truncated {
        for &i in &candidates {
            let cfg = SlrtConfig::new(alpha_r, beta_r, vec![i], 0.0, 1.0, mu)?;
            let out = run_slrt(oracle, &cfg);
            if out.accepted_alt() {
                estimate.push(i);
            }
            if meter.observe(&out) {
                break;
            }
        }
    }
    Ok(meter.finish(oracle, estimate, search, Some(p_size)))
}

/// Single star on `K_p`: the search tests every vertex for "is the star
/// center" (1 vs `s` incident active edges), refinement tests each edge of
/// the accepted vertices' union.
pub fn recover_star(
    oracle: &mut SensingOracle,
    p: usize,
    s: usize,
    epsilon: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    if s < 2 {
        return Err(crate::Error::Config(
            "star recovery requires s >= 2: a 1-star has no distinguishable center".into(),
        ));
    }
    recover_stars_impl(oracle, p, s, 1, epsilon, mu)
}

/// Union of `k < s` vertex-disjoint stars; the center test becomes `k` vs
/// `s` incident active edges and the type II calibrations pick up a factor k.
pub fn recover_union_stars(
    oracle: &mut SensingOracle,
    p: usize,
    s: usize,
    k: usize,
    epsilon: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    if k >= s {
        return Err(crate::Error::Config(format!(
            "union-star recovery requires k < s, got k={k} s={s}"
        )));
    }
    recover_stars_impl(oracle, p, s, k, epsilon, mu)
}

fn recover_stars_impl(
    oracle: &mut SensingOracle,
    p: usize,
    s: usize,
    k: usize,
    epsilon: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    let indexer = EdgeIndexer::new(p)?;
    let n = indexer.edge_count() as f64;
    let sf = s as f64;
    let alpha = epsilon / (2.0 * n);
    let alpha_r = epsilon / (4.0 * n);
    let (beta, beta_r) = if k == 1 {
        (epsilon / (4.0 * sf), epsilon / (4.0 * sf))
    } else {
        let b = epsilon / (4.0 * k as f64 * sf);
        (b, b)
    };

    let mut meter = RunMeter::new(oracle);
    let mut centers = Vec::new();
    for v in 1..=p {
        let probe = indexer.vertex_edges(v);
        let cfg = SlrtConfig::new(alpha, beta, probe, k as f64, sf, mu)?;
        let out = run_slrt(oracle, &cfg);
        if out.accepted_alt() {
            centers.push(v);
        }
        if meter.observe(&out) {
            break;
        }
    }
    let search = meter.snapshot(oracle);

    let candidates = indexer.vertices_edges(&centers);
    let p_size = candidates.len();
    let mut estimate = Vec::new();
    if !meter.truncated {
        for &e in &candidates {
            let cfg = SlrtConfig::new(alpha_r, beta_r, vec![e], 0.0, 1.0, mu)?;
            let out = run_slrt(oracle, &cfg);
            if out.accepted_alt() {
                estimate.push(e);
            }
            if meter.observe(&out) {
                break;
            }
        }
    }
    estimate.sort_unstable();
    Ok(meter.finish(oracle, estimate, search, Some(p_size)))
}

/// Maps between normalized (rows >= cols in sparsity) coordinates and the
/// original component indexing.
#[derive(Clone, Copy)]
struct SubmatrixView {
    n_r: usize,
    n_c: usize,
    orig_n_c: usize,
    transposed: bool,
}

impl SubmatrixView {
    fn new(n_r: usize, n_c: usize, s_r: usize, s_c: usize) -> (Self, usize, usize) {
        if s_r >= s_c {
            (SubmatrixView { n_r, n_c, orig_n_c: n_c, transposed: false }, s_r, s_c)
        } else {
            (SubmatrixView { n_r: n_c, n_c: n_r, orig_n_c: n_c, transposed: true }, s_c, s_r)
        }
    }

    /// Component index of normalized cell `(r, c)` (both 1-based).
    fn comp(&self, r: usize, c: usize) -> usize {
        let (or, oc) = if self.transposed { (c, r) } else { (r, c) };
        (or - 1) * self.orig_n_c + oc
    }

    fn column(&self, c: usize) -> Vec<usize> {
        (1..=self.n_r).map(|r| self.comp(r, c)).collect()
    }

    fn row_restricted(&self, r: usize, cols: &[usize]) -> Vec<usize> {
        cols.iter().map(|&c| self.comp(r, c)).collect()
    }
}

/// Submatrix recovery, all-columns variant: sequential tests find the active
/// columns, then every row is tested against the accepted columns; the
/// estimate is the accepted rows x accepted columns product.
pub fn recover_submatrix(
    oracle: &mut SensingOracle,
    n_r: usize,
    n_c: usize,
    s_r: usize,
    s_c: usize,
    epsilon: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    let (view, s_r, s_c) = SubmatrixView::new(n_r, n_c, s_r, s_c);
    let n = (view.n_r * view.n_c) as f64;
    let s = (s_r * s_c) as f64;
    let alpha = epsilon / (4.0 * n);
    let beta = epsilon / (4.0 * s);

    let mut meter = RunMeter::new(oracle);
    let mut cols = Vec::new();
    for c in 1..=view.n_c {
        let cfg = SlrtConfig::new(alpha, beta, view.column(c), 0.0, s_r as f64, mu)?;
        let out = run_slrt(oracle, &cfg);
        if out.accepted_alt() {
            cols.push(c);
        }
        if meter.observe(&out) {
            break;
        }
    }
    let search = meter.snapshot(oracle);
    let p_size = cols.len() * view.n_r;

    let mut rows = Vec::new();
    if !meter.truncated && !cols.is_empty() {
        for r in 1..=view.n_r {
            let probe = view.row_restricted(r, &cols);
            let cfg = SlrtConfig::new(alpha, beta, probe, 0.0, s_c as f64, mu)?;
            let out = run_slrt(oracle, &cfg);
            if out.accepted_alt() {
                rows.push(r);
            }
            if meter.observe(&out) {
                break;
            }
        }
    }
    let mut estimate: Vec<usize> = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| view.comp(r, c)))
        .collect();
    estimate.sort_unstable();
    Ok(meter.finish(oracle, estimate, search, Some(p_size)))
}

/// Submatrix recovery, single-column variant: a conservative column search
/// aims to accept only truly active columns, one accepted column is chosen
/// at random and refined per-component to expose the active rows, then one
/// accepted row is refined to recover all active columns.
pub fn recover_submatrix_single_column<R: Rng>(
    oracle: &mut SensingOracle,
    n_r: usize,
    n_c: usize,
    s_r: usize,
    s_c: usize,
    epsilon: f64,
    mu: f64,
    pick_rng: &mut R,
) -> Result<RecoveryResult> {
    let (view, s_r, s_c) = SubmatrixView::new(n_r, n_c, s_r, s_c);
    let n = (view.n_r * view.n_c) as f64;
    let s = (s_r * s_c) as f64;
    let alpha = epsilon / (16.0 * n * n);
    // the search miss calibration only needs beta^{s_c} <= eps/8s, so
    // clamping below 1/2 keeps the bound while the s_c-th root approaches 1
    let beta = (epsilon / (8.0 * s)).powf(1.0 / s_c as f64).min(0.49);
    let alpha_r = epsilon / (8.0 * n);
    let beta_r = epsilon / (8.0 * s);

    let mut meter = RunMeter::new(oracle);
    let mut cols = Vec::new();
    for c in 1..=view.n_c {
        let cfg = SlrtConfig::new(alpha, beta, view.column(c), 0.0, s_r as f64, mu)?;
        let out = run_slrt(oracle, &cfg);
        if out.accepted_alt() {
            cols.push(c);
        }
        if meter.observe(&out) {
            break;
        }
    }
    let search = meter.snapshot(oracle);
    let p_size = cols.len() * view.n_r;

    // empty search output counts as a declared failure
    if cols.is_empty() || meter.truncated {
        return Ok(meter.finish(oracle, Vec::new(), search, Some(p_size)));
    }

    let picked_col = cols[pick_rng.gen_range(0..cols.len())];
    let mut rows = Vec::new();
    for r in 1..=view.n_r {
        let cfg = SlrtConfig::new(
            alpha_r,
            beta_r,
            vec![view.comp(r, picked_col)],
            0.0,
            1.0,
            mu,
        )?;
        let out = run_slrt(oracle, &cfg);
        if out.accepted_alt() {
            rows.push(r);
        }
        if meter.observe(&out) {
            break;
        }
    }
    if rows.is_empty() || meter.truncated {
        return Ok(meter.finish(oracle, Vec::new(), search, Some(p_size)));
    }

    let picked_row = rows[pick_rng.gen_range(0..rows.len())];
    let mut final_cols = Vec::new();
    for c in 1..=view.n_c {
        let cfg = SlrtConfig::new(
            alpha_r,
            beta_r,
            vec![view.comp(picked_row, c)],
            0.0,
            1.0,
            mu,
        )?;
        let out = run_slrt(oracle, &cfg);
        if out.accepted_alt() {
            final_cols.push(c);
        }
        if meter.observe(&out) {
            break;
        }
    }

    let mut estimate: Vec<usize> = rows
        .iter()
        .flat_map(|&r| final_cols.iter().map(move |&c| view.comp(r, c)))
        .collect();
    estimate.sort_unstable();
    Ok(meter.finish(oracle, estimate, search, Some(p_size)))
}
