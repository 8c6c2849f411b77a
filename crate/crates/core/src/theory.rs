//! Closed-form signal-strength thresholds and sample bounds for every
//! supported class, used to calibrate experiments and overlay bounds on
//! empirical phase transitions.
//!
//! Values are labeled with stable ids (`prop1`..`prop20`, `cass_*`,
//! `lemma10`) so reports can be joined against sweep outputs. Natural
//! logarithms throughout except the explicit base-2 logs in bisection sample
//! counts. Evaluators are pure: same inputs, bit-identical outputs.

use crate::error::{Error, Result};
use crate::support::{star_packing_bound, SupportClass};
use serde::{Deserialize, Serialize};

/// A threshold or bound value tagged with its formula id.
///
/// `value` is `None` when the formula does not apply at these parameters
/// (degenerate denominator, nonpositive log argument); `note` then says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledValue {
    pub id: String,
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl LabeledValue {
    fn ok(id: &str, value: f64) -> Self {
        LabeledValue { id: id.into(), value: Some(value), note: None }
    }

    fn noted(id: &str, value: f64, note: &str) -> Self {
        LabeledValue { id: id.into(), value: Some(value), note: Some(note.into()) }
    }

    fn na(id: &str, note: &str) -> Self {
        LabeledValue { id: id.into(), value: None, note: Some(note.into()) }
    }
}

/// One sparsity-regime condition attached to a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeCheck {
    pub condition: String,
    pub satisfied: bool,
}

/// Full evaluator report for one class at budget `m` and target `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub class: SupportClass,
    pub m: f64,
    pub epsilon: f64,
    pub regime_checks: Vec<RegimeCheck>,
    pub sufficient_mu: Vec<LabeledValue>,
    pub necessary_mu_adaptive: Vec<LabeledValue>,
    pub necessary_mu_nonadaptive: Vec<LabeledValue>,
    pub sample_caps: Vec<LabeledValue>,
    /// Nonadaptive sample-complexity lower bound; needs `mu`, so only present
    /// when one was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample_lower_nonadaptive: Option<LabeledValue>,
}

fn sqrt_or_zero(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.sqrt()
    }
}

/// `(1 - 2eps)` family: the factor clamps at zero once `eps >= 1/2`.
fn one_minus_2eps(eps: f64) -> f64 {
    (1.0 - 2.0 * eps).max(0.0)
}

fn log2(x: f64) -> f64 {
    x.log2()
}

/// Sufficient signal-strength thresholds applicable to the class.
pub fn sufficient_mu(class: &SupportClass, m: f64, eps: f64) -> Vec<LabeledValue> {
    let mut out = Vec::new();
    match *class {
        SupportClass::Sset { n, s } => {
            let (n, s) = (n as f64, s as f64);
            out.push(LabeledValue::ok(
                "prop1",
                (2.0 * n / m * (2.0 * s / eps).ln() + 2.0 * s / m * (2.0 * n / eps).ln()).sqrt(),
            ));
            out.push(LabeledValue::ok(
                "cass_sset",
                (32.0 * n / m * (2.0 * s / eps).ln()).sqrt(),
            ));
        }
        SupportClass::Intervals { n, s, k } => {
            let (nf, sf, kf) = (n as f64, s as f64, k as f64);
            out.push(LabeledValue::ok(
                "prop2",
                (30.0 * nf / (sf * sf * m) * (2.0 * 2.0f64.sqrt() * kf * sf / eps).ln()).sqrt(),
            ));
            out.push(LabeledValue::ok(
                "prop19",
                (768.0 * nf / (sf * sf * m) * (3.0 * 2.0f64.sqrt() * kf * sf / eps).ln()).sqrt(),
            ));
            out.push(LabeledValue::noted(
                "prop19_text",
                (384.0 * nf / (sf * sf * m) * (9.0 * kf / eps).ln()).sqrt(),
                "search-phase constant from the in-text derivation; the \
                 proposition states the prop19 form",
            ));
        }
        SupportClass::Stars { p, s, k } => {
            let n = (p * (p - 1) / 2) as f64;
            let (sf, kf) = (s as f64, k as f64);
            if k == 1 {
                if s > 1 {
                    out.push(LabeledValue::ok(
                        "prop3",
                        (16.0 * n / ((sf - 1.0) * (sf - 1.0) * m) * (4.0 * sf / eps).ln()).sqrt(),
                    ));
                } else {
                    out.push(LabeledValue::na("prop3", "requires s > 1"));
                }
                out.push(LabeledValue::ok(
                    "cass_star",
                    (392.0 * n / (sf * sf * m) * (9.0 * sf / eps).ln()).sqrt(),
                ));
            } else if k < s {
                out.push(LabeledValue::ok(
                    "prop4",
                    (16.0 * n / ((sf - kf) * (sf - kf) * m) * (4.0 * sf * kf / eps).ln()).sqrt(),
                ));
            } else {
                out.push(LabeledValue::na("prop4", "requires k < s"));
            }
        }
        SupportClass::Submatrix { .. } => {
            let (n_r, n_c, s_r, s_c, _) = class.normalized_submatrix().unwrap();
            let n = (n_r * n_c) as f64;
            let s = (s_r * s_c) as f64;
            let (srf, scf) = (s_r as f64, s_c as f64);
            out.push(LabeledValue::ok(
                "prop5",
                (8.0 * n / (srf * srf * m) * (4.0 * s / eps).ln()).sqrt(),
            ));
            out.push(LabeledValue::ok(
                "prop6",
                (10.0 * n / (scf * srf * srf * m) * (8.0 * s / eps).ln()).sqrt(),
            ));
            out.push(LabeledValue::ok(
                "prop20",
                (128.0 * n / (srf * srf * m) * (2.0 * s / eps).ln()).sqrt(),
            ));
        }
    }
    out
}

/// Adaptive-sensing necessary thresholds applicable to the class.
pub fn necessary_mu_adaptive(class: &SupportClass, m: f64, eps: f64) -> Vec<LabeledValue> {
    let mut out = Vec::new();
    match *class {
        SupportClass::Sset { n, s } => {
            let (nf, sf) = (n as f64, s as f64);
            let inner = (sf / (2.0 * eps)).ln() + ((nf - sf + 1.0) / (nf + 1.0)).ln();
            out.push(LabeledValue::ok(
                "prop11",
                sqrt_or_zero(2.0 * (nf - sf + 1.0) / m * inner),
            ));
        }
        SupportClass::Intervals { n, s, k } => {
            let (nf, sf, kf) = (n as f64, s as f64, k as f64);
            if k == 1 {
                out.push(LabeledValue::ok(
                    "prop12",
                    (1.0 - eps).max(0.0) * (nf / (2.0 * sf * sf * m)).sqrt(),
                ));
            } else {
                out.push(LabeledValue::na("prop12", "stated for k = 1"));
            }
            let span = nf - sf * (kf - 1.0);
            let inner = (kf * sf / (8.0 * eps)).ln() + (span / (nf + sf)).ln();
            out.push(LabeledValue::ok(
                "prop13",
                sqrt_or_zero(2.0 * span / (sf * sf * m) * inner),
            ));
        }
        SupportClass::Stars { p, s, k } => {
            let (pf, sf, kf) = (p as f64, s as f64, k as f64);
            let pack = match star_packing_bound(p, s) {
                Ok(v) => v,
                Err(_) => {
                    out.push(LabeledValue::na("prop14", "packing bound needs s <= p-1"));
                    return out;
                }
            };
            out.push(LabeledValue::ok(
                "prop14",
                (1.0 - eps).max(0.0) * (pack / (2.0 * sf * m)).sqrt(),
            ));
            let span = pack - kf + 1.0;
            if span > 0.0 {
                let inner = (kf * sf / (8.0 * eps)).ln() + (span / (pack + 1.0)).ln();
                out.push(LabeledValue::ok(
                    "prop15",
                    sqrt_or_zero(2.0 * span / (m / sf) * inner) / sf,
                ));
            } else {
                out.push(LabeledValue::na("prop15", "packing bound smaller than k"));
            }
            let inner16 = (sf / (2.0 * eps)).ln() + ((pf - sf) / pf).ln();
            out.push(LabeledValue::ok(
                "prop16",
                sqrt_or_zero(2.0 * (pf - sf) / m * inner16),
            ));
        }
        SupportClass::Submatrix { .. } => {
            let (n_r, n_c, s_r, s_c, _) = class.normalized_submatrix().unwrap();
            let n = (n_r * n_c) as f64;
            let s = (s_r * s_c) as f64;
            let (ncf, srf, scf) = (n_c as f64, s_r as f64, s_c as f64);
            out.push(LabeledValue::ok(
                "prop17",
                (1.0 - eps).max(0.0) * (n / (2.0 * s * s * m)).sqrt(),
            ));
            let span = ncf - scf + 1.0;
            let inner = (s / (8.0 * eps)).ln() + (span / (ncf + 1.0)).ln();
            out.push(LabeledValue::ok(
                "prop18",
                sqrt_or_zero(2.0 * span / (srf * m) * inner),
            ));
        }
    }
    out
}

/// Non-adaptive-sensing necessary thresholds applicable to the class.
pub fn necessary_mu_nonadaptive(class: &SupportClass, m: f64, eps: f64) -> Vec<LabeledValue> {
    let factor = one_minus_2eps(eps);
    let mut out = Vec::new();
    match *class {
        SupportClass::Sset { n, s } => {
            let (nf, sf) = (n as f64, s as f64);
            let arg = nf - sf;
            if arg > 1.0 {
                out.push(LabeledValue::ok(
                    "prop7",
                    (factor * nf / (4.0 * m) * arg.ln()).sqrt(),
                ));
            } else {
                out.push(LabeledValue::na("prop7", "log argument n - s <= 1"));
            }
        }
        SupportClass::Intervals { n, s, k } => {
            let (nf, sf, kf) = (n as f64, s as f64, k as f64);
            let arg = nf / sf - kf;
            if arg > 1.0 {
                out.push(LabeledValue::ok(
                    "prop8",
                    (factor * (nf - (kf - 1.0) * sf) / (4.0 * sf * sf * m) * arg.ln()).sqrt(),
                ));
            } else {
                out.push(LabeledValue::na("prop8", "log argument n/s - k <= 1"));
            }
        }
        SupportClass::Stars { p, s, .. } => {
            let n = (p * (p - 1) / 2) as f64;
            let arg = (2.0 * n).sqrt() - s as f64 - 1.0;
            if arg > 1.0 {
                out.push(LabeledValue::ok(
                    "prop9",
                    (factor * n / (2.0 * m) * arg.ln()).sqrt(),
                ));
            } else {
                out.push(LabeledValue::na("prop9", "log argument sqrt(2n) - s - 1 <= 1"));
            }
        }
        SupportClass::Submatrix { .. } => {
            let (n_r, n_c, s_r, s_c, _) = class.normalized_submatrix().unwrap();
            let n = (n_r * n_c) as f64;
            let (nrf, ncf, srf, scf) = (n_r as f64, n_c as f64, s_r as f64, s_c as f64);
            let shape = ((ncf - scf) / (ncf * srf)).max((nrf - srf) / (nrf * scf));
            let arg = (nrf - srf).max(ncf - scf);
            if arg > 1.0 && shape > 0.0 {
                out.push(LabeledValue::ok(
                    "prop10",
                    (factor * n / (4.0 * m) * shape * arg.ln()).sqrt(),
                ));
            } else {
                out.push(LabeledValue::na("prop10", "degenerate max/log term"));
            }
        }
    }
    out
}

/// Theoretical bisection sample caps for the class (real-valued forms).
pub fn sample_caps(class: &SupportClass) -> Vec<LabeledValue> {
    let mut out = Vec::new();
    match *class {
        SupportClass::Sset { n, s } => {
            let (nf, sf) = (n as f64, s as f64);
            if nf > 2.0 * sf {
                out.push(LabeledValue::ok("cass_sset_cap", 2.0 * sf * log2(nf / (2.0 * sf))));
            } else {
                out.push(LabeledValue::na("cass_sset_cap", "requires n > 2s"));
            }
        }
        SupportClass::Intervals { n, s, k } => {
            let (nf, sf, kf) = (n as f64, s as f64, k as f64);
            if nf > 2.0 * kf * sf {
                out.push(LabeledValue::ok(
                    "prop19_cap",
                    3.0 * kf * (log2(nf / (2.0 * kf * sf)) + 1.5 * sf),
                ));
            } else {
                out.push(LabeledValue::na("prop19_cap", "requires n > 2ks"));
            }
        }
        SupportClass::Stars { p, s, .. } => {
            let (pf, sf) = (p as f64, s as f64);
            if pf > 4.0 && pf - 1.0 > sf {
                out.push(LabeledValue::ok(
                    "cass_star_cap",
                    4.0 * log2(pf / 4.0) + 2.0 * sf * log2((pf - 1.0) / sf),
                ));
            } else {
                out.push(LabeledValue::na("cass_star_cap", "requires p > 4 and p-1 > s"));
            }
        }
        SupportClass::Submatrix { .. } => {
            let (n_r, n_c, s_r, s_c, _) = class.normalized_submatrix().unwrap();
            let (nrf, ncf, srf, scf) = (n_r as f64, n_c as f64, s_r as f64, s_c as f64);
            if ncf > 2.0 * scf && nrf > 2.0 * srf {
                out.push(LabeledValue::ok(
                    "prop20_cap",
                    2.0 * scf * log2(ncf / (2.0 * scf)) + 2.0 * srf * log2(nrf / (2.0 * srf)),
                ));
            } else {
                out.push(LabeledValue::na("prop20_cap", "requires n_c > 2s_c and n_r > 2s_r"));
            }
        }
    }
    out
}

/// Nonadaptive sample-complexity lower bound `s ln(n/s) / ln(mu^2 m/n + 1)`,
/// evaluated with its unspecified constant set to 1.
pub fn sample_lower_nonadaptive(class: &SupportClass, mu: f64, m: f64) -> LabeledValue {
    let n = class.ambient_n() as f64;
    let s = class.sparsity() as f64;
    let denom = (mu * mu * m / n + 1.0).ln();
    if denom <= 0.0 {
        return LabeledValue::na("lemma10", "nonpositive log denominator");
    }
    LabeledValue::noted(
        "lemma10",
        s * (n / s).ln() / denom,
        "constant c evaluated at 1; the bound holds up to an unspecified constant",
    )
}

/// Sparsity-regime conditions attached to the class's thresholds.
pub fn regime_checks(class: &SupportClass, eps: f64) -> Vec<RegimeCheck> {
    let mut out = Vec::new();
    let mut check = |condition: String, satisfied: bool| {
        out.push(RegimeCheck { condition, satisfied });
    };
    match *class {
        SupportClass::Sset { n, s } => {
            let (nf, sf) = (n as f64, s as f64);
            check(
                "1 <= (1-2eps) * ln(n-s)".into(),
                nf - sf > 1.0 && one_minus_2eps(eps) * (nf - sf).ln() >= 1.0,
            );
        }
        SupportClass::Intervals { n, s, k } => {
            let (nf, sf, kf) = (n as f64, s as f64, k as f64);
            check(
                "n / ln(4n) >= k*s^3".into(),
                nf / (4.0 * nf).ln() >= kf * sf * sf * sf,
            );
            check("n > k*s^3".into(), nf > kf * sf * sf * sf);
        }
        SupportClass::Stars { p, s, k } => {
            let n = (p * (p - 1) / 2) as f64;
            let (sf, kf) = (s as f64, k as f64);
            if k == 1 {
                check(
                    "sqrt(n) / ln(4n) >= s^2".into(),
                    n.sqrt() / (4.0 * n).ln() >= sf * sf,
                );
                check("sqrt(2n) >= s^2".into(), (2.0 * n).sqrt() >= sf * sf);
            } else {
                check("k < s".into(), k < s);
                check(
                    "sqrt(n) / ln(4n) >= k*(s-k)^2".into(),
                    n.sqrt() / (4.0 * n).ln() >= kf * (sf - kf) * (sf - kf),
                );
            }
        }
        SupportClass::Submatrix { .. } => {
            let (n_r, n_c, s_r, s_c, _) = class.normalized_submatrix().unwrap();
            let n = (n_r * n_c) as f64;
            let (nrf, ncf, srf, scf) = (n_r as f64, n_c as f64, s_r as f64, s_c as f64);
            check(
                "n_c / ln(4n) >= s_r^2 / s_c".into(),
                ncf / (4.0 * n).ln() >= srf * srf / scf,
            );
            check(
                "min(n_r, n_c) / ln(8n) >= s_c * s_r^2".into(),
                nrf.min(ncf) / (8.0 * n).ln() >= scf * srf * srf,
            );
            check("n_c > s_r^2 / s_c".into(), ncf > srf * srf / scf);
        }
    }
    out
}

/// Builds the full report for a class.
pub fn evaluate(
    class: &SupportClass,
    m: f64,
    epsilon: f64,
    mu: Option<f64>,
) -> Result<ThresholdReport> {
    class.validate()?;
    if !(m > 0.0) {
        return Err(Error::Config(format!("m must be positive, got {m}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon must lie in (0,1), got {epsilon}")));
    }
    Ok(ThresholdReport {
        class: *class,
        m,
        epsilon,
        regime_checks: regime_checks(class, epsilon),
        sufficient_mu: sufficient_mu(class, m, epsilon),
        necessary_mu_adaptive: necessary_mu_adaptive(class, m, epsilon),
        necessary_mu_nonadaptive: necessary_mu_nonadaptive(class, m, epsilon),
        sample_caps: sample_caps(class),
        sample_lower_nonadaptive: mu.map(|mu| sample_lower_nonadaptive(class, mu, m)),
    })
}

/// Looks up a single threshold value by id (used by multiplier grids).
pub fn threshold_by_id(class: &SupportClass, m: f64, eps: f64, id: &str) -> Result<f64> {
    let report = evaluate(class, m, eps, None)?;
    let all = report
        .sufficient_mu
        .iter()
        .chain(report.necessary_mu_adaptive.iter())
        .chain(report.necessary_mu_nonadaptive.iter());
    for lv in all {
        if lv.id == id {
            return lv.value.ok_or_else(|| {
                Error::Config(format!("threshold '{id}' inapplicable for this class"))
            });
        }
    }
    Err(Error::Config(format!("unknown threshold id '{id}'")))
}

/// Default sufficient-threshold id a procedure is calibrated against.
pub fn default_threshold_id(proc_name: &str) -> Option<&'static str> {
    Some(match proc_name {
        "sset" | "baseline" => "prop1",
        "intervals" => "prop2",
        "star" => "prop3",
        "union_stars" => "prop4",
        "submatrix" => "prop5",
        "submatrix_single_column" => "prop6",
        "cass_sset" => "cass_sset",
        "cass_intervals" => "prop19",
        "cass_star" => "cass_star",
        "cass_submatrix" => "prop20",
        _ => return None,
    })
}

/// Flattens a report into one CSV row (header + row).
pub fn report_to_csv(report: &ThresholdReport) -> String {
    let mut header = vec![
        "class".to_string(),
        "m".to_string(),
        "epsilon".to_string(),
    ];
    let mut row = vec![
        serde_json::to_string(&report.class).unwrap().replace(',', ";"),
        format!("{}", report.m),
        format!("{}", report.epsilon),
    ];
    let push = |prefix: &str, lv: &LabeledValue, header: &mut Vec<String>, row: &mut Vec<String>| {
        header.push(format!("{prefix}.{}", lv.id));
        row.push(lv.value.map(|v| format!("{v}")).unwrap_or_default());
    };
    for lv in &report.sufficient_mu {
        push("sufficient", lv, &mut header, &mut row);
    }
    for lv in &report.necessary_mu_adaptive {
        push("necessary_adaptive", lv, &mut header, &mut row);
    }
    for lv in &report.necessary_mu_nonadaptive {
        push("necessary_nonadaptive", lv, &mut header, &mut row);
    }
    for lv in &report.sample_caps {
        push("sample_cap", lv, &mut header, &mut row);
    }
    if let Some(lv) = &report.sample_lower_nonadaptive {
        push("sample_lower", lv, &mut header, &mut row);
    }
    for rc in &report.regime_checks {
        header.push(format!("regime.{}", rc.condition.replace(',', ";")));
        row.push(format!("{}", rc.satisfied));
    }
    format!("{}\n{}\n", header.join(","), row.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn value(values: &[LabeledValue], id: &str) -> f64 {
        values
            .iter()
            .find(|lv| lv.id == id)
            .unwrap_or_else(|| panic!("id {id} missing"))
            .value
            .unwrap_or_else(|| panic!("id {id} inapplicable"))
    }

    #[test]
    fn sset_sufficient_example() {
        let class = SupportClass::Sset { n: 1024, s: 4 };
        let v = value(&sufficient_mu(&class, 1024.0, 0.1), "prop1");
        // sqrt(2 ln 80 + (8/1024) ln 20480)
        let want = (2.0 * 80.0f64.ln() + 8.0 / 1024.0 * 20480.0f64.ln()).sqrt();
        assert_relative_eq!(v, want, max_relative = 1e-12);
        assert_relative_eq!(v, 2.9735, max_relative = 1e-4);
    }

    #[test]
    fn intervals_sufficient_example() {
        let class = SupportClass::Intervals { n: 65536, s: 8, k: 2 };
        let v = value(&sufficient_mu(&class, 65536.0, 0.1), "prop2");
        let want = (30.0 / 64.0 * (2.0 * 2.0f64.sqrt() * 16.0 / 0.1).ln()).sqrt();
        assert_relative_eq!(v, want, max_relative = 1e-12);
        assert_relative_eq!(v, 1.6931, max_relative = 1e-4);
    }

    #[test]
    fn star_sufficient_example() {
        let class = SupportClass::Stars { p: 128, s: 4, k: 1 };
        let v = value(&sufficient_mu(&class, 8128.0, 0.1), "prop3");
        let want = (16.0f64 / 9.0 * 160.0f64.ln()).sqrt();
        assert_relative_eq!(v, want, max_relative = 1e-12);
        assert_relative_eq!(v, 3.0038, max_relative = 1e-4);
    }

    #[test]
    fn adaptive_necessary_examples() {
        let intervals = SupportClass::Intervals { n: 4096, s: 8, k: 1 };
        let v12 = value(&necessary_mu_adaptive(&intervals, 4096.0, 0.1), "prop12");
        assert_relative_eq!(v12, 0.9 * (1.0f64 / 128.0).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(v12, 0.07955, max_relative = 1e-3);

        let stars = SupportClass::Stars { p: 128, s: 4, k: 1 };
        let v14 = value(&necessary_mu_adaptive(&stars, 8128.0, 0.1), "prop14");
        assert_relative_eq!(
            v14,
            0.9 * (1968.0f64 / (2.0 * 4.0 * 8128.0)).sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn vanishing_factor_distinction() {
        // the (1-2eps) nonadaptive family vanishes at eps = 1/2, while the
        // prop11 log(s/2eps) term stays positive
        let class = SupportClass::Sset { n: 1024, s: 8 };
        let non = necessary_mu_nonadaptive(&class, 1024.0, 0.5);
        assert_eq!(value(&non, "prop7"), 0.0);
        let ad = value(&necessary_mu_adaptive(&class, 1024.0, 0.5), "prop11");
        assert!(ad > 0.0);
    }

    #[test]
    fn nonadaptive_examples() {
        let sset = SupportClass::Sset { n: 1024, s: 4 };
        let v7 = value(&necessary_mu_nonadaptive(&sset, 1024.0, 0.1), "prop7");
        let want7 = (0.8 * 0.25 * 1020.0f64.ln()).sqrt();
        assert_relative_eq!(v7, want7, max_relative = 1e-12);

        let stars = SupportClass::Stars { p: 128, s: 4, k: 1 };
        let v9 = value(&necessary_mu_nonadaptive(&stars, 8128.0, 0.1), "prop9");
        let want9 = (0.8 * 0.5 * (16256.0f64.sqrt() - 5.0).ln()).sqrt();
        assert_relative_eq!(v9, want9, max_relative = 1e-12);
    }

    #[test]
    fn sample_cap_examples() {
        let sset = SupportClass::Sset { n: 1024, s: 4 };
        assert_relative_eq!(value(&sample_caps(&sset), "cass_sset_cap"), 56.0);

        let intervals = SupportClass::Intervals { n: 8192, s: 8, k: 1 };
        assert_relative_eq!(value(&sample_caps(&intervals), "prop19_cap"), 63.0);
    }

    #[test]
    fn lemma10_unit_denominator() {
        let class = SupportClass::Sset { n: 1024, s: 4 };
        // mu^2 m / n = e - 1 makes the denominator exactly 1
        let mu = ((std::f64::consts::E - 1.0) * 1024.0 / 1024.0).sqrt();
        let lv = sample_lower_nonadaptive(&class, mu, 1024.0);
        assert_relative_eq!(lv.value.unwrap(), 4.0 * 256.0f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn table1_interval_scaling_is_n_invariant_at_m_eq_n() {
        let base: Vec<f64> = [4096usize, 16384, 65536]
            .iter()
            .map(|&n| {
                let class = SupportClass::Intervals { n, s: 8, k: 2 };
                value(&sufficient_mu(&class, n as f64, 0.1), "prop2") / (16.0f64).ln().sqrt()
            })
            .collect();
        for v in &base {
            assert!((v / base[0] - 1.0).abs() <= 0.01, "scaling drifted: {base:?}");
        }
    }

    #[test]
    fn adaptive_necessary_below_sufficient_for_intervals() {
        for n in [4096usize, 16384, 65536] {
            for s in [4usize, 8, 16] {
                for k in [1usize, 2, 4] {
                    if k * s * s * s > n {
                        continue;
                    }
                    for eps in [0.05, 0.1, 0.2] {
                        let class = SupportClass::Intervals { n, s, k };
                        let m = n as f64;
                        let lower = value(&necessary_mu_adaptive(&class, m, eps), "prop13");
                        let upper = value(&sufficient_mu(&class, m, eps), "prop2");
                        assert!(
                            lower <= upper,
                            "prop13 {lower} > prop2 {upper} at n={n} s={s} k={k} eps={eps}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn evaluators_are_pure() {
        let class = SupportClass::Stars { p: 64, s: 4, k: 1 };
        let a = evaluate(&class, 2016.0, 0.1, Some(1.5)).unwrap();
        let b = evaluate(&class, 2016.0, 0.1, Some(1.5)).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn star_s1_reports_inapplicable() {
        let class = SupportClass::Stars { p: 16, s: 1, k: 1 };
        let vals = sufficient_mu(&class, 120.0, 0.1);
        let prop3 = vals.iter().find(|lv| lv.id == "prop3").unwrap();
        assert!(prop3.value.is_none());
    }

    #[test]
    fn csv_row_shape() {
        let class = SupportClass::Sset { n: 1024, s: 4 };
        let report = evaluate(&class, 1024.0, 0.1, None).unwrap();
        let csv = report_to_csv(&report);
        let mut lines = csv.lines();
        let header = lines.next().unwrap();
        let row = lines.next().unwrap();
        assert_eq!(header.split(',').count(), row.split(',').count());
        assert!(header.contains("sufficient.prop1"));
    }
}
