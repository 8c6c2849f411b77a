//! Sample-efficient sense-and-search recovery: fixed measurement schedules,
//! bisection over bins, sqrt(j)-weighted sensing amplitudes, and
//! Gaussian-threshold decisions.
//!
//! The shared engine bisects over "units" (single components, bins of
//! consecutive components, matrix columns or rows). Non-power-of-two domains
//! are padded virtually with known-zero units so every bin size is an exact
//! power of two; virtual components get zero sensing weight.
//!
//! Each level measures one child per kept bin and assigns the sibling the
//! remainder of the parent's estimated active count, so a level costs one
//! measurement per tracked bin. Observation thresholds sit halfway between
//! adjacent count hypotheses, which reproduces the usual
//! `(mu/2) * a * sqrt(j)` empty/non-empty decision point and its error
//! exponent. Measurement counts are deterministic functions of the class
//! parameters and always fit the theoretical caps in
//! [`crate::theory::sample_caps`].

use crate::error::{MeasureError, Result};
use crate::recovery_slrt::{PhaseBreakdown, RecoveryResult};
use crate::sensing::{SenseVector, SensingOracle};
use crate::support::EdgeIndexer;

fn next_pow2(x: usize) -> usize {
    x.max(1).next_power_of_two()
}

/// Descent-series bound `sum_{l>=1} (l+1) 2^-l <= 3` used for worst-case
/// schedule energy; exposed for the numeric identity test.
#[cfg(test)]
pub(crate) fn descent_series(levels: usize) -> f64 {
    (1..=levels).map(|l| (l as f64 + 1.0) * 0.5f64.powi(l as i32)).sum()
}

#[derive(Debug, Clone)]
struct Slot {
    /// Start position in padded unit space.
    start: usize,
    width: usize,
    mass: usize,
    score: f64,
}

struct BisectPlan {
    level0_groups: usize,
    mass_cap: usize,
    group_width: usize,
    levels: usize,
}

impl BisectPlan {
    fn new(unit_count: usize, level0_groups: usize, mass_cap: usize) -> Self {
        let per_group = unit_count.div_ceil(level0_groups);
        let group_width = next_pow2(per_group);
        let levels = group_width.trailing_zeros() as usize;
        BisectPlan { level0_groups, mass_cap, group_width, levels }
    }

    fn sample_count(&self) -> u64 {
        (self.level0_groups + self.mass_cap * self.levels) as u64
    }

    /// Worst-case schedule energy for a unit amplitude.
    fn worst_energy_per_amp2(&self, max_unit_size: usize) -> f64 {
        let width = (self.group_width * max_unit_size) as f64;
        (self.level0_groups as f64 + 3.0 * self.mass_cap as f64) * width
    }
}

struct BisectOutcome {
    /// Indices of units selected as active, sorted.
    selected: Vec<usize>,
    refused: bool,
}

/// Runs the bisection schedule over `units`. `unit_drift` is the number of
/// active components a fully active unit contributes to a projection.
/// Returns the selected unit indices.
fn bisect_units<F>(
    oracle: &mut SensingOracle,
    unit_count: usize,
    unit_comps: F,
    unit_drift: f64,
    plan: &BisectPlan,
    amp: f64,
    mu: f64,
) -> BisectOutcome
where
    F: Fn(usize) -> Vec<usize>,
{
    let probe_of = |start: usize, width: usize| -> Vec<usize> {
        let mut v = Vec::new();
        for u in start..(start + width).min(unit_count) {
            v.extend(unit_comps(u));
        }
        v
    };
    let estimate_mass = |y: f64, amp_j: f64, cap: usize| -> usize {
        let unit_value = amp_j * mu * unit_drift;
        let raw = (y / unit_value).round();
        if raw.is_nan() || raw < 0.0 {
            0
        } else {
            (raw as usize).min(cap)
        }
    };

    // level 0: measure every group at amplitude amp * sqrt(1)
    let mut cands: Vec<Slot> = Vec::with_capacity(2 * plan.level0_groups);
    let mut refused = false;
    'level0: for g in 0..plan.level0_groups {
        let start = g * plan.group_width;
        let probe = probe_of(start, plan.group_width);
        let vector = SenseVector::uniform(&probe, amp);
        let y = match oracle.measure(&vector) {
            Ok(y) => y,
            Err(MeasureError::BudgetExhausted) => {
                refused = true;
                break 'level0;
            }
            Err(e) => panic!("bisection probe bug: {e}"),
        };
        let real_units = (start + plan.group_width).min(unit_count).saturating_sub(start);
        let mass = estimate_mass(y, amp, plan.mass_cap.min(real_units));
        cands.push(Slot { start, width: plan.group_width, mass, score: y });
    }
    if refused {
        return BisectOutcome { selected: Vec::new(), refused: true };
    }
    let mut slots = select_slots(cands, plan.mass_cap);

    for level in 1..=plan.levels {
        let amp_j = amp * ((level + 1) as f64).sqrt();
        let mut cands = Vec::with_capacity(2 * slots.len());
        for slot in &slots {
            let half = slot.width / 2;
            let left_probe = probe_of(slot.start, half);
            let vector = SenseVector::uniform(&left_probe, amp_j);
            let y = match oracle.measure(&vector) {
                Ok(y) => y,
                Err(MeasureError::BudgetExhausted) => {
                    refused = true;
                    break;
                }
                Err(e) => panic!("bisection probe bug: {e}"),
            };
            let left_units = (slot.start + half).min(unit_count).saturating_sub(slot.start);
            let right_start = slot.start + half;
            let right_units = (right_start + half).min(unit_count).saturating_sub(right_start);
            let left_mass = estimate_mass(y, amp_j, slot.mass.min(left_units));
            let right_mass = (slot.mass - left_mass).min(right_units);
            cands.push(Slot { start: slot.start, width: half, mass: left_mass, score: y });
            cands.push(Slot {
                start: right_start,
                width: half,
                mass: right_mass,
                score: f64::NEG_INFINITY,
            });
        }
        if refused {
            return BisectOutcome { selected: Vec::new(), refused: true };
        }
        slots = select_slots(cands, plan.mass_cap);
    }

    let mut selected: Vec<usize> = slots
        .iter()
        .filter(|s| s.mass >= 1 && s.start < unit_count)
        .map(|s| s.start)
        .collect();
    selected.sort_unstable();
    selected.dedup();
    BisectOutcome { selected, refused: false }
}

/// Ranks candidates by (mass, observation, position), enforces the total
/// mass cap, and keeps exactly `cap` tracked bins (padding with the best
/// empty candidates so the schedule length never depends on noise).
fn select_slots(mut cands: Vec<Slot>, cap: usize) -> Vec<Slot> {
    cands.sort_by(|a, b| {
        b.mass
            .cmp(&a.mass)
            .then(b.score.partial_cmp(&a.score).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.start.cmp(&b.start))
    });
    let mut remaining = cap;
    let mut out = Vec::with_capacity(cap);
    for mut slot in cands {
        if out.len() == cap {
            break;
        }
        slot.mass = slot.mass.min(remaining);
        remaining -= slot.mass;
        out.push(slot);
    }
    out
}

fn clamp_amp(paper_amp: f64, share: f64, plan: &BisectPlan, max_unit_size: usize) -> f64 {
    let worst = plan.worst_energy_per_amp2(max_unit_size);
    if worst <= 0.0 {
        return paper_amp;
    }
    paper_amp.min((share / worst).sqrt())
}

struct Meter {
    e0: f64,
    c0: u64,
}

impl Meter {
    fn new(o: &SensingOracle) -> Self {
        Meter { e0: o.energy_spent(), c0: o.measurement_count() }
    }

    fn delta(&self, o: &SensingOracle) -> (f64, u64) {
        (o.energy_spent() - self.e0, o.measurement_count() - self.c0)
    }
}

fn finish(
    oracle: &SensingOracle,
    meter: Meter,
    estimate: Vec<usize>,
    search: (f64, u64),
    truncated: bool,
    candidate_size: Option<usize>,
) -> RecoveryResult {
    let (energy, samples) = meter.delta(oracle);
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
        truncated,
        candidate_size,
    }
}

/// Bisection recovery of an s-set over `{1..n}`: amplitude `sqrt(m/4n)`
/// scaled by `sqrt(j)` per round, at most `2s + s log2(n/2s)` measurements,
/// schedule energy deterministically below `m`.
pub fn cass_sset(
    oracle: &mut SensingOracle,
    n: usize,
    s: usize,
    m: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    let comps: Vec<usize> = (1..=n).collect();
    cass_over_components(oracle, &comps, s, m, mu)
}

/// The s-set schedule over an arbitrary component list (used directly and as
/// the star refinement).
fn cass_over_components(
    oracle: &mut SensingOracle,
    comps: &[usize],
    s: usize,
    budget: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    if comps.is_empty() || s == 0 {
        let meter = Meter::new(oracle);
        return Ok(finish(oracle, meter, Vec::new(), (0.0, 0), false, None));
    }
    let n = comps.len();
    let plan = BisectPlan::new(n, 2 * s, s);
    let paper_amp = (budget / (4.0 * n as f64)).sqrt();
    let amp = clamp_amp(paper_amp, budget, &plan, 1);
    let meter = Meter::new(oracle);
    let out = bisect_units(oracle, n, |u| vec![comps[u]], 1.0, &plan, amp, mu);
    let estimate: Vec<usize> = out.selected.iter().map(|&u| comps[u]).collect();
    let search = meter.delta(oracle);
    Ok(finish(oracle, meter, estimate, search, out.refused, None))
}

/// Interval recovery: bins of `s/2` components grouped for bisection with
/// half the budget, then one thresholded measurement per candidate
/// component, `sqrt(m/(9ks))` amplitude each.
pub fn cass_intervals(
    oracle: &mut SensingOracle,
    n: usize,
    s: usize,
    k: usize,
    m: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    let bin_len = (s / 2).max(1);
    let bins: Vec<(usize, usize)> = (1..=n)
        .step_by(bin_len)
        .map(|lo| (lo, (lo + bin_len - 1).min(n)))
        .collect();
    let nbins = bins.len();
    // total active mass in full-bin units
    let mass_cap = k * s.div_ceil(bin_len);
    let plan = BisectPlan::new(nbins, 4 * k, mass_cap);
    let paper_amp = (m / (12.0 * n as f64)).sqrt();
    let amp = clamp_amp(paper_amp, m / 2.0, &plan, bin_len);

    let meter = Meter::new(oracle);
    let out = bisect_units(
        oracle,
        nbins,
        |b| (bins[b].0..=bins[b].1).collect(),
        bin_len as f64,
        &plan,
        amp,
        mu,
    );
    let search = meter.delta(oracle);
    if out.refused {
        return Ok(finish(oracle, meter, Vec::new(), search, true, None));
    }

    // An interval spans at most three consecutive bins, and its quantized
    // mass can land on any of them. An isolated accepted bin may be a
    // straddler two bins away from the far end of its interval, so it takes
    // neighbors at radius two; adjacent accepted bins localize the interval
    // and take radius one. A deterministic component budget (what the
    // theoretical sample cap leaves for refinement) trims outermost
    // neighbors first if the accepted bins are pathologically scattered.
    let mut alive = vec![false; nbins];
    for &b in &out.selected {
        alive[b] = true;
    }
    let mut keep = vec![usize::MAX; nbins];
    for &b in &out.selected {
        let clustered =
            (b > 0 && alive[b - 1]) || (b + 1 < nbins && alive[b + 1]);
        let radius = if clustered { 1 } else { 2 };
        for d in 0..=radius {
            if b >= d {
                keep[b - d] = keep[b - d].min(d);
            }
            if b + d < nbins {
                keep[b + d] = keep[b + d].min(d);
            }
        }
    }
    let comp_budget = ((k * plan.levels) as f64 + 4.5 * (k * s) as f64 - (4 * k) as f64)
        .floor()
        .max((5 * bin_len) as f64) as usize;
    let mut ranked: Vec<(usize, usize)> = keep
        .iter()
        .enumerate()
        .filter(|&(_, &r)| r != usize::MAX)
        .map(|(b, &r)| (r, b))
        .collect();
    ranked.sort_unstable();
    let mut kept_bins = Vec::new();
    let mut comp_count = 0usize;
    for &(_, b) in &ranked {
        let len = bins[b].1 - bins[b].0 + 1;
        if comp_count + len > comp_budget && !kept_bins.is_empty() {
            continue;
        }
        comp_count += len;
        kept_bins.push(b);
    }
    kept_bins.sort_unstable();
    let candidates: Vec<usize> = kept_bins
        .iter()
        .flat_map(|&b| bins[b].0..=bins[b].1)
        .collect();
    let p_size = candidates.len();

    let refine_amp = (m / (9.0 * (k * s) as f64)).sqrt();
    let mut estimate = Vec::new();
    let mut truncated = false;
    for &i in &candidates {
        let vector = SenseVector::singleton(i, refine_amp);
        match oracle.measure(&vector) {
            Ok(y) => {
                if y > refine_amp * mu / 2.0 {
                    estimate.push(i);
                }
            }
            Err(MeasureError::BudgetExhausted) => {
                truncated = true;
                break;
            }
            Err(e) => panic!("refinement probe bug: {e}"),
        }
    }
    Ok(finish(oracle, meter, estimate, search, truncated, Some(p_size)))
}

/// Star recovery: a four-group tournament over contiguous vertex blocks
/// narrows the center down to at most four candidate vertices using half the
/// budget, then the s-set schedule runs over the candidates' incident edges.
pub fn cass_star(
    oracle: &mut SensingOracle,
    p: usize,
    s: usize,
    m: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    let indexer = EdgeIndexer::new(p)?;
    let n = indexer.edge_count();
    let p2 = next_pow2(p);
    let amp = (m / (16.0 * n as f64)).sqrt();

    let meter = Meter::new(oracle);
    // groups are (start_vertex, width) over the padded vertex line
    let mut groups: Vec<(usize, usize)> = if p2 >= 8 {
        let w = p2 / 4;
        (0..4).map(|i| (1 + i * w, w)).collect()
    } else {
        Vec::new()
    };
    let mut level = 1usize;
    let mut winners: Vec<(usize, usize)> = Vec::new();
    let mut refused = false;
    while !groups.is_empty() {
        let amp_j = amp * (level as f64).sqrt();
        let mut scored: Vec<(f64, usize)> = Vec::with_capacity(groups.len());
        for (gi, &(start, width)) in groups.iter().enumerate() {
            let verts: Vec<usize> = (start..start + width).filter(|&v| v <= p).collect();
            let probe = indexer.vertices_edges(&verts);
            let vector = SenseVector::uniform(&probe, amp_j);
            match oracle.measure(&vector) {
                Ok(y) => scored.push((y, gi)),
                Err(MeasureError::BudgetExhausted) => {
                    refused = true;
                    break;
                }
                Err(e) => panic!("star probe bug: {e}"),
            }
        }
        if refused {
            break;
        }
        // two highest observations win; ties resolve to the lower group index
        scored.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.1.cmp(&b.1))
        });
        winners = scored.iter().take(2).map(|&(_, gi)| groups[gi]).collect();
        let width = winners[0].1;
        if width <= 2 {
            break;
        }
        groups = winners
            .iter()
            .flat_map(|&(start, w)| [(start, w / 2), (start + w / 2, w / 2)])
            .collect();
        level += 1;
    }
    let search = meter.delta(oracle);
    if refused {
        return Ok(finish(oracle, meter, Vec::new(), search, true, None));
    }

    let candidate_verts: Vec<usize> = if winners.is_empty() {
        (1..=p).collect() // p too small for a tournament
    } else {
        winners
            .iter()
            .flat_map(|&(start, w)| start..start + w)
            .filter(|&v| v <= p)
            .collect()
    };
    let candidates = indexer.vertices_edges(&candidate_verts);
    let p_size = candidates.len();

    let refine = cass_over_components(oracle, &candidates, s, m / 2.0, mu)?;
    Ok(finish(
        oracle,
        meter,
        refine.estimate,
        search,
        refine.truncated,
        Some(p_size),
    ))
}

/// Submatrix recovery: bisection over columns (half budget), then bisection
/// over rows restricted to the selected columns (half budget); the estimate
/// is the row-by-column product.
pub fn cass_submatrix(
    oracle: &mut SensingOracle,
    n_r: usize,
    n_c: usize,
    s_r: usize,
    s_c: usize,
    m: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    // normalized orientation: more active rows than columns
    let (vn_r, vn_c, vs_r, vs_c, transposed) = if s_r >= s_c {
        (n_r, n_c, s_r, s_c, false)
    } else {
        (n_c, n_r, s_c, s_r, true)
    };
    let orig_n_c = n_c;
    let comp = |r: usize, c: usize| -> usize {
        let (or, oc) = if transposed { (c, r) } else { (r, c) };
        (or - 1) * orig_n_c + oc
    };
    let n = n_r * n_c;

    let col_plan = BisectPlan::new(vn_c, 2 * vs_c, vs_c);
    let col_amp = clamp_amp((m / (8.0 * n as f64)).sqrt(), m / 2.0, &col_plan, vn_r);
    let meter = Meter::new(oracle);
    let cols = bisect_units(
        oracle,
        vn_c,
        |c| (1..=vn_r).map(|r| comp(r, c + 1)).collect(),
        vs_r as f64,
        &col_plan,
        col_amp,
        mu,
    );
    let search = meter.delta(oracle);
    if cols.refused {
        return Ok(finish(oracle, meter, Vec::new(), search, true, None));
    }
    let sel_cols: Vec<usize> = cols.selected.iter().map(|&c| c + 1).collect();
    if sel_cols.is_empty() {
        return Ok(finish(oracle, meter, Vec::new(), search, false, Some(0)));
    }
    let p_size = sel_cols.len() * vn_r;

    let row_plan = BisectPlan::new(vn_r, 2 * vs_r, vs_r);
    let row_amp = clamp_amp(
        (m / (8.0 * (vn_r * vs_c) as f64)).sqrt(),
        m / 2.0,
        &row_plan,
        sel_cols.len(),
    );
    let rows = bisect_units(
        oracle,
        vn_r,
        |r| sel_cols.iter().map(|&c| comp(r + 1, c)).collect(),
        vs_c as f64,
        &row_plan,
        row_amp,
        mu,
    );
    let truncated = rows.refused;
    let mut estimate: Vec<usize> = rows
        .selected
        .iter()
        .flat_map(|&r| sel_cols.iter().map(move |&c| comp(r + 1, c)))
        .collect();
    estimate.sort_unstable();
    Ok(finish(oracle, meter, estimate, search, truncated, Some(p_size)))
}

/// Diagnostic non-adaptive baseline: one fixed pass spending `m/n` per
/// coordinate, thresholding each observation at half the active mean.
pub fn nonadaptive_baseline(
    oracle: &mut SensingOracle,
    n: usize,
    m: f64,
    mu: f64,
) -> Result<RecoveryResult> {
    let amp = (m / n as f64).sqrt();
    let meter = Meter::new(oracle);
    let mut estimate = Vec::new();
    let mut truncated = false;
    for i in 1..=n {
        let vector = SenseVector::singleton(i, amp);
        match oracle.measure(&vector) {
            Ok(y) => {
                if y > amp * mu / 2.0 {
                    estimate.push(i);
                }
            }
            Err(MeasureError::BudgetExhausted) => {
                truncated = true;
                break;
            }
            Err(e) => panic!("baseline probe bug: {e}"),
        }
    }
    let search = meter.delta(oracle);
    Ok(finish(oracle, meter, estimate, search, truncated, None))
}

/// Deterministic sample-count of the s-set schedule (level 0 plus one
/// measurement per tracked bin per level).
pub fn cass_sset_sample_count(n: usize, s: usize) -> u64 {
    BisectPlan::new(n, 2 * s, s).sample_count()
}
