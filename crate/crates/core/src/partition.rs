//! Extraction of the uniform partition modulus `N` and every intermediate
//! constant, with a record of each inequality the argument relies on, and
//! empirical validation against Gram sections.
//!
//! Pipeline: `ε` from `F̄ = Σℓ_n`, then `(J, R)` from the subsample-density
//! lemma with `β = 1 − α`, then `M`, then `K`, then `L*` from the index-gap
//! lemma, and finally `N ≥ max(J, L*)` raised until every residue class is
//! `K`-separated on the window.

use serde::{Deserialize, Serialize};

use crate::bounds::{lemma_l1, lemma_l2, lemma_l2_scan_grid, verify_lemma_l2};
use crate::error::{Error, Result};
use crate::gram::gram_matrix;
use crate::par;
use crate::pointset::PointSetWindow;
use crate::setmodel::{CoverCost, CoverSpec, IntervalUnion};

/// Slack allowed on the predicted upper Riesz bound.
pub const UPPER_TOL: f64 = 1e-8;
/// Below this `ε` the certificate is flagged as degenerate.
pub const DEGENERATE_EPS: f64 = 1e-6;
const MAX_M: usize = 1_000_000;
const DIM_SCALES: usize = 24;

/// One inequality `lhs < rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            slack: rhs - lhs,
            pass: lhs < rhs,
        }
    }
}

/// Every constant of the construction plus the checks it passed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "Z")]
    pub z: usize,
    #[serde(rename = "F_bar")]
    pub f_bar: f64,
    pub cover_cost: CoverCost,
    pub dim_plus_estimate: f64,
    pub eps: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// `ℓ_M`.
    pub length_m: f64,
    /// `Σ_{n>M} ℓ_n^α`.
    pub tail_after_m: f64,
    /// `Σ_{n≤M} ℓ_n`.
    pub s1_head: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L_star")]
    pub l_star: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Smallest gap inside any residue class `Λ_j(N)` on the window.
    pub min_class_gap: f64,
    pub predicted_lower_riesz: f64,
    pub predicted_upper_riesz: f64,
    /// The set on which the lower bound is established.
    pub riesz_set: String,
    pub window_only: bool,
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
}

impl PartitionCertificate {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let failed = self.failed_checks();
        if failed.is_empty() {
            return Ok(());
        }
        let names: Vec<String> = failed
            .iter()
            .map(|c| format!("{} ({} !< {})", c.name, c.lhs, c.rhs))
            .collect();
        Err(Error::extraction("certificate", names.join("; ")))
    }

    /// Recomputes every check from the stored constants. Checks that depend
    /// on the window reuse the stored window statistics.
    pub fn recheck(&self) -> Vec<Check> {
        let mut out = arithmetic_checks(self);
        for c in &self.checks {
            if WINDOW_CHECKS.contains(&c.name.as_str()) {
                out.push(Check::new(&c.name, c.lhs, c.rhs));
            }
        }
        out
    }

    /// True when [`recheck`](Self::recheck) reproduces the stored checks.
    pub fn is_consistent(&self) -> bool {
        let mut fresh = self.recheck();
        let mut stored = self.checks.clone();
        let key = |c: &Check| c.name.clone();
        fresh.sort_by_key(key);
        stored.sort_by_key(key);
        fresh.len() == stored.len()
            && fresh.iter().zip(&stored).all(|(a, b)| {
                a.name == b.name && a.pass == b.pass && a.lhs == b.lhs && a.rhs == b.rhs
            })
    }
}

const WINDOW_CHECKS: [&str; 3] = [
    "dim_plus_hypothesis",
    "class_separation",
    "subsample_density",
];

fn arithmetic_checks(c: &PartitionCertificate) -> Vec<Check> {
    let (f, eps, alpha, beta) = (c.f_bar, c.eps, c.alpha, c.beta);
    let lm = c.length_m.powf(1.0 - alpha);
    let tail = c.tail_after_m;
    let k = c.k as f64;
    let m = c.m as f64;
    vec![
        Check::new("cover_cost_below_one", c.cover_cost.total, 1.0),
        Check::new("eps_condition_1", 0.75 + 0.25 * f, 1.0 - eps),
        Check::new("eps_condition_2", f + 2.0 * eps, 0.5 * (1.0 + f)),
        Check::new("m_condition_1", 4.0 * lm * tail, 1.0),
        Check::new("m_condition_2", 4.0 * (lm + eps) * tail, eps),
        Check::new("m_condition_3", c.r, 1.0 / c.length_m),
        Check::new(
            "m_condition_tail",
            2.0 * (2.0 * c.r.powf(-beta) + eps) * tail,
            eps,
        ),
        Check::new("k_condition", m / k, eps),
        Check::new("k_inverse_below_lower_gap", 1.0 / k, 0.25 * (1.0 - f)),
        Check::new("final_chain", 0.25 * (3.0 + f), 1.0 - 1.0 / k),
        Check::new("s1_bound", c.s1_sum(), f + eps),
        Check::new("s2_bound", 2.0 * tail * (2.0 * c.r.powf(-beta) + eps), eps),
        Check::new("s2_bound_at_length_m", 2.0 * tail * (2.0 * lm + eps), eps),
        Check::new("s1_plus_s2", f + 2.0 * eps, 0.5 * (1.0 + f)),
    ]
}

impl PartitionCertificate {
    /// `Σ_{n≤M}(ℓ_n + 1/K)`, bounded through `Σ_{n≤M} ℓ_n ≤ F̄`.
    fn s1_sum(&self) -> f64 {
        self.s1_head + self.m as f64 / self.k as f64
    }
}

/// `ε = (1 − F̄)/8`; both `ε`-conditions reduce to `ε < (1 − F̄)/4`.
pub fn choose_epsilon(f_bar: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&f_bar) {
        return Err(Error::hypothesis(
            "condition (2): cover cost < 1",
            format!("total cover length {f_bar} is not below 1"),
        ));
    }
    Ok((1.0 - f_bar) / 8.0)
}

/// Smallest `M ≥ max(Z, 1)` meeting the three conditions on `ℓ_M` and the
/// tail `Σ_{n>M} ℓ_n^α`, plus `2(2R^{−β} + ε)·Σ_{n>M} ℓ_n^α < ε` so that the
/// tail estimate goes through with the subsample-density bound at `R`.
pub fn choose_m(cover: &CoverSpec, eps: f64, r: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    let alpha = cover.alpha;
    let beta = 1.0 - alpha;
    let last = if cover.is_infinite() {
        MAX_M
    } else {
        cover.explicit_len()
    };
    let start = cover.z.max(1);
    let mut first_unmet = String::from("cover has fewer than max(Z, 1) intervals");
    for m in start..=last {
        let Some(len) = cover.length(m) else { break };
        let tail = cover.power_sum_after(m, alpha)?;
        let lm = len.powf(1.0 - alpha);
        let unmet = if !(4.0 * lm * tail < 1.0) {
            Some(format!(
                "condition (1): |E_M|^(1-a) < 1/(4 tail) fails at M = {m}"
            ))
        } else if !(4.0 * (lm + eps) * tail < eps) {
            Some(format!(
                "condition (2): 4(|E_M|^(1-a) + eps) tail < eps fails at M = {m}"
            ))
        } else if !(1.0 / len > r) {
            Some(format!(
                "condition (3): |E_M|^-1 = {} > R = {r} fails at M = {m}",
                1.0 / len
            ))
        } else if !(2.0 * (2.0 * r.powf(-beta) + eps) * tail < eps) {
            Some(format!(
                "tail condition: 2(2R^-b + eps) tail < eps fails at M = {m}"
            ))
        } else {
            None
        };
        match unmet {
            None => return Ok(m),
            Some(msg) => first_unmet = msg,
        }
    }
    Err(Error::extraction("choose_M", first_unmet))
}

/// `K = ⌊M/ε⌋ + 1`, at least 2.
pub fn choose_k(m: usize, eps: f64) -> usize {
    ((m as f64 / eps).floor() as usize + 1).max(2)
}

/// Smallest gap between consecutive members of any `Λ_j(N)` on the window.
pub fn min_class_gap(w: &PointSetWindow, n: usize) -> f64 {
    let p = w.points();
    if n == 0 || p.len() <= n {
        return f64::INFINITY;
    }
    (0..p.len() - n)
        .map(|i| p[i + n] - p[i])
        .fold(f64::INFINITY, f64::min)
}

/// Runs the full construction.
pub fn extract(cover: &CoverSpec, w: &PointSetWindow) -> Result<PartitionCertificate> {
    cover.validate()?;
    let cost = cover.cover_cost()?;
    if !cost.below_one() {
        return Err(Error::hypothesis(
            "condition (2): sum_{n<=Z}|E_n| + sum_{n>Z}|E_n|^alpha < 1",
            format!(
                "cover cost is {} (head {}, tail {})",
                cost.total, cost.head, cost.tail_alpha
            ),
        ));
    }
    let alpha = cover.alpha;
    let beta = 1.0 - alpha;
    let f_bar = cover.sum_lengths();

    let grid = w.default_scale_grid(DIM_SCALES);
    let dim = w.dim_estimate(&[], &grid)?;
    if !(dim.dim_plus < beta) {
        return Err(Error::hypothesis(
            "dim+(Lambda) < 1 - alpha",
            format!(
                "estimated upper dimension {:.4} is not below 1 - alpha = {beta}",
                dim.dim_plus
            ),
        ));
    }

    let eps = choose_epsilon(f_bar)?;
    let l2 = lemma_l2(w, beta, eps)?;
    let m = choose_m(cover, eps, l2.r)?;
    let length_m = cover
        .length(m)
        .expect("choose_m returns an index with a length");
    let tail_after_m = cover.power_sum_after(m, alpha)?;
    let k = choose_k(m, eps);
    let l_star = lemma_l1(w, k as f64);

    // index gap N = L* can still pair two points within K; raise N until the
    // classes are K-separated on the window
    let mut n = l2.n.max(l_star).max(1);
    while min_class_gap(w, n) <= k as f64 {
        n += 1;
    }
    let gap = min_class_gap(w, n);

    let grid = lemma_l2_scan_grid(w, n, l2.r)?;
    let density = verify_lemma_l2(w, beta, eps, n, l2.r, &grid)?;
    let worst_density = density.worst.map_or(0.0, |c| c.value);

    let mut warnings = Vec::new();
    if !w.window_certified() {
        warnings.push(
            "window not certified: dimension estimate, R, J and L* are computed on the window only"
                .to_string(),
        );
    }
    if eps < DEGENERATE_EPS {
        warnings.push(format!("degenerate eps = {eps:e}"));
    }

    let mut cert = PartitionCertificate {
        alpha,
        beta,
        z: cover.z,
        f_bar,
        cover_cost: cost,
        dim_plus_estimate: dim.dim_plus,
        eps,
        r: l2.r,
        j: l2.n,
        m,
        length_m,
        tail_after_m,
        k,
        l_star,
        n,
        min_class_gap: finite_or_max(gap),
        predicted_lower_riesz: 0.25 * (1.0 - f_bar),
        predicted_upper_riesz: 1.0 + 1.0 / k as f64,
        riesz_set: "complement".to_string(),
        window_only: !w.window_certified(),
        warnings,
        checks: Vec::new(),
        s1_head: cover.head_sum(m),
    };
    let mut checks = arithmetic_checks(&cert);
    checks.insert(1, Check::new("dim_plus_hypothesis", dim.dim_plus, beta));
    checks.push(Check::new("class_separation", k as f64, finite_or_max(gap)));
    checks.push(Check::new(
        "subsample_density",
        worst_density,
        density.bound,
    ));
    cert.checks = checks;
    Ok(cert)
}

fn finite_or_max(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        f64::MAX
    }
}

/// One Gram section of a residue class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionCheck {
    pub j: usize,
    pub m: usize,
    pub m_effective: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationCheck {
    pub j: usize,
    pub min_gap: f64,
    pub k: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub predicted_lower: f64,
    pub predicted_upper: f64,
    pub certificate_consistent: bool,
    pub separations: Vec<SeparationCheck>,
    pub sections: Vec<SectionCheck>,
    pub worst_lower_margin: f64,
    pub worst_upper_margin: f64,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl ValidationReport {
    pub fn ensure(&self) -> Result<()> {
        if self.passed {
            Ok(())
        } else {
            Err(Error::Validation(self.failures.join("; ")))
        }
    }
}

/// `m` consecutive members of `sub` centred on the first one `≥ 0`.
fn centred_section(sub: &PointSetWindow, m: usize) -> &[f64] {
    let pts = sub.points();
    let m = m.min(pts.len());
    let start = sub.anchor().saturating_sub(m / 2).min(pts.len() - m);
    &pts[start..start + m]
}

/// Checks the certificate's predictions on Gram sections of every residue
/// class over the complement of `set`.
pub fn validate(
    cert: &PartitionCertificate,
    cover: &CoverSpec,
    set: &IntervalUnion,
    w: &PointSetWindow,
    window_sizes: &[usize],
) -> Result<ValidationReport> {
    if cert.n == 0 {
        return Err(Error::domain("certificate has N = 0"));
    }
    if window_sizes.contains(&0) {
        return Err(Error::config("window sizes must be positive"));
    }
    let n_centers = cover.centers.as_ref().map_or(0, |c| c.len());
    let covered = cover.realize(n_centers)?;
    if !set.is_subset_of(&covered, 1e-12) {
        return Err(Error::config(
            "the set is not contained in the realized cover",
        ));
    }
    let complement = set.complement();
    let mut failures = Vec::new();

    let recheck = cert.recheck();
    let consistent = cert.is_consistent() && recheck.iter().all(|c| c.pass);
    for c in recheck.iter().filter(|c| !c.pass) {
        failures.push(format!(
            "certificate check {} fails: {} !< {}",
            c.name, c.lhs, c.rhs
        ));
    }

    let subs = (1..=cert.n)
        .map(|j| w.subsample(cert.n, j))
        .collect::<Result<Vec<_>>>()?;
    let separations: Vec<SeparationCheck> = subs
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let min_gap = s.separation().unwrap_or(f64::INFINITY);
            SeparationCheck {
                j: i + 1,
                min_gap,
                k: cert.k,
                pass: min_gap > cert.k as f64,
            }
        })
        .collect();
    for s in separations.iter().filter(|s| !s.pass) {
        failures.push(format!(
            "separation: class j = {} has gap {} <= K = {}",
            s.j, s.min_gap, s.k
        ));
    }

    let lower = cert.predicted_lower_riesz;
    let upper = cert.predicted_upper_riesz + UPPER_TOL;
    let pairs: Vec<(usize, usize)> = (1..=cert.n)
        .flat_map(|j| window_sizes.iter().map(move |&m| (j, m)))
        .filter(|&(j, _)| !subs[j - 1].is_empty())
        .collect();
    let sections = par::map_slice(&pairs, |&(j, m)| -> Result<SectionCheck> {
        let freqs = centred_section(&subs[j - 1], m);
        let g = gram_matrix(&complement, freqs)?;
        let lower_margin = g.lambda_min - lower;
        let upper_margin = upper - g.lambda_max;
        Ok(SectionCheck {
            j,
            m,
            m_effective: freqs.len(),
            lambda_min: g.lambda_min,
            lambda_max: g.lambda_max,
            lower_margin,
            upper_margin,
            pass: lower_margin > 0.0 && upper_margin > 0.0,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    for s in sections.iter().filter(|s| !s.pass) {
        failures.push(format!(
            "section (j = {}, m = {}): lambda_min = {}, lambda_max = {}",
            s.j, s.m, s.lambda_min, s.lambda_max
        ));
    }

    let worst_lower_margin = sections
        .iter()
        .map(|s| s.lower_margin)
        .fold(f64::INFINITY, f64::min);
    let worst_upper_margin = sections
        .iter()
        .map(|s| s.upper_margin)
        .fold(f64::INFINITY, f64::min);
    Ok(ValidationReport {
        predicted_lower: lower,
        predicted_upper: cert.predicted_upper_riesz,
        certificate_consistent: consistent,
        separations,
        sections,
        worst_lower_margin: finite_or_max(worst_lower_margin),
        worst_upper_margin: finite_or_max(worst_upper_margin),
        passed: failures.is_empty(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setmodel::GeometricTail;

    #[test]
    fn epsilon_examples() {
        let e = choose_epsilon(0.0).unwrap();
        assert_eq!(e, 0.125);
        assert!(0.75 < 1.0 - e && 2.0 * e < 0.5);
        let e = choose_epsilon(0.5).unwrap();
        assert_eq!(e, 0.0625);
        assert!(0.875 < 1.0 - e && 0.5 + 2.0 * e < 0.75);
        assert!(choose_epsilon(1.0 - 1e-9).unwrap() < DEGENERATE_EPS);
        assert!(matches!(choose_epsilon(1.0), Err(Error::Hypothesis { .. })));
    }

    fn quarter_cover() -> CoverSpec {
        CoverSpec::new(
            vec![],
            Some(GeometricTail {
                c: 1.0 / 16.0,
                rho: 0.25,
                from_n: 1,
            }),
            None,
            0,
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn m_for_quarter_cover() {
        assert_eq!(choose_m(&quarter_cover(), 0.1, 10.0).unwrap(), 2);
    }

    #[test]
    fn m_single_interval() {
        let c = CoverSpec::new(vec![0.5], None, None, 1, 0.5).unwrap();
        assert_eq!(choose_m(&c, 0.1, 1.0).unwrap(), 1);
        let err = choose_m(&c, 0.1, 1e12).unwrap_err();
        assert!(err.to_string().contains("condition (3)"), "{err}");
    }

    #[test]
    fn k_examples() {
        assert_eq!(choose_k(2, 0.0625), 33);
        assert_eq!(choose_k(1, 0.5), 3);
        assert_eq!(choose_k(1, 5.0), 2);
    }

    #[test]
    fn class_gaps() {
        let w = PointSetWindow::new(vec![0.0, 1.0, 3.0, 6.0, 10.0]).unwrap();
        assert_eq!(min_class_gap(&w, 1), 1.0);
        assert_eq!(min_class_gap(&w, 2), 3.0);
        assert_eq!(min_class_gap(&w, 5), f64::INFINITY);
    }
}
