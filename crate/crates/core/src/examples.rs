//! Concrete constructions: a cover of the torus by intervals centred at the
//! rationals, a lacunary block frequency set of prescribed upper dimension,
//! and a search for long arithmetic progressions with small step inside a
//! residue-class subsample.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointset::PointSetWindow;
use crate::setmodel::{CoverSpec, GeometricTail};

/// How the interval lengths of [`hkw_cover`] decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LengthRule {
    /// `ℓ_n = c·ρ^n`, kept infinite through a geometric tail.
    Geometric { c: f64, rho: f64 },
    /// `ℓ_n = c/n²` for `n ≤ n_max`; the cover is finite.
    InverseSquare { c: f64 },
}

impl Default for LengthRule {
    /// `ℓ_n = 2^{−(n+1)}`.
    fn default() -> Self {
        LengthRule::Geometric { c: 0.5, rho: 0.5 }
    }
}

impl LengthRule {
    /// Sum of all lengths the rule would ever produce.
    pub fn total(&self) -> f64 {
        match *self {
            LengthRule::Geometric { c, rho } if rho < 1.0 => c * rho / (1.0 - rho),
            LengthRule::Geometric { .. } => f64::INFINITY,
            LengthRule::InverseSquare { c } => c * std::f64::consts::PI.powi(2) / 6.0,
        }
    }
}

/// The first `n` rationals of `[0, 1)` in Farey diagonal order:
/// `0/1, 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, …` (reduced fractions by denominator,
/// then numerator).
pub fn farey_rationals(n: usize) -> Vec<(u64, u64)> {
    let mut out = Vec::with_capacity(n);
    let mut q = 1u64;
    while out.len() < n {
        for p in 0..q {
            if out.len() == n {
                break;
            }
            if gcd(p, q) == 1 {
                out.push((p, q));
            }
        }
        q += 1;
    }
    out
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A cover of the torus by `n_max` explicit intervals centred at the
/// rationals in Farey diagonal order, with lengths from `rule`.
///
/// `Z = 0` and `α = 1/2`; adjust with [`CoverSpec`]'s public fields and
/// re-validate.
pub fn hkw_cover(n_max: usize, rule: LengthRule) -> Result<CoverSpec> {
    if n_max == 0 {
        return Err(Error::config("n_max must be at least 1"));
    }
    let total = rule.total();
    if !(total < 1.0) {
        return Err(Error::config(format!(
            "length rule sums to {total}, which is not below 1"
        )));
    }
    let centers: Vec<f64> = farey_rationals(n_max)
        .into_iter()
        .map(|(p, q)| p as f64 / q as f64)
        .collect();
    let (lengths, tail) = match rule {
        LengthRule::Geometric { c, rho } => {
            let tail = GeometricTail {
                c,
                rho,
                from_n: n_max + 1,
            };
            let lengths: Vec<f64> = (1..=n_max).map(|n| tail.length(n)).collect();
            (lengths, Some(tail))
        }
        LengthRule::InverseSquare { c } => {
            let lengths = (1..=n_max).map(|n| c / (n as f64 * n as f64)).collect();
            (lengths, None)
        }
    };
    if let Some(n) = lengths.iter().position(|&l| !(l > 0.0)) {
        return Err(Error::config(format!(
            "length of interval {} underflows; use a smaller n_max",
            n + 1
        )));
    }
    CoverSpec::new(lengths, tail, Some(centers), 0, 0.5)
}

/// Block offsets `Q_j` of the lacunary construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// `Q_j = j·2^j·⌈j^γ⌉`.
    #[default]
    Desk,
    /// `Q_j = 2^{2^j}`, exact in `f64` only for `j ≤ 5`.
    Paper,
}

/// Largest `j_max` accepted with [`Schedule::Paper`].
pub const PAPER_SCHEDULE_MAX_J: usize = 5;

impl Schedule {
    fn offset(self, j: usize, step: u64) -> f64 {
        match self {
            Schedule::Desk => (j as u64 * (1u64 << j) * step) as f64,
            Schedule::Paper => 2f64.powi(1 << j),
        }
    }
}

/// Block `j`: `j + 1` points `start, start + step, …, start + j·step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub j: usize,
    pub start: f64,
    pub step: u64,
}

impl Block {
    pub fn width(&self) -> f64 {
        (self.j as u64 * self.step) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.j as u64).map(move |a| self.start + (a * self.step) as f64)
    }
}

/// `γ = (1 − β)/β`.
pub fn easycor_gamma(beta: f64) -> f64 {
    (1.0 - beta) / beta
}

/// `⌈j^γ⌉`, ignoring round-off just above an integer.
pub fn block_step(j: usize, gamma: f64) -> u64 {
    ((j as f64).powf(gamma) - 1e-9).ceil().max(1.0) as u64
}

/// The blocks `j = 1..=j_max` of the lacunary set with upper dimension `β`.
pub fn easycor_blocks(beta: f64, j_max: usize, schedule: Schedule) -> Result<Vec<Block>> {
    if !(beta > 2.0 / 3.0 && beta < 1.0) {
        return Err(Error::config(format!(
            "beta must lie in (2/3, 1), got {beta}"
        )));
    }
    if j_max == 0 {
        return Err(Error::config("j_max must be at least 1"));
    }
    if schedule == Schedule::Paper && j_max > PAPER_SCHEDULE_MAX_J {
        return Err(Error::config(format!(
            "the 2^(2^j) schedule is exact only up to j = {PAPER_SCHEDULE_MAX_J}, got j_max = {j_max}"
        )));
    }
    let gamma = easycor_gamma(beta);
    let blocks: Vec<Block> = (1..=j_max)
        .map(|j| {
            let step = block_step(j, gamma);
            Block {
                j,
                start: schedule.offset(j, step),
                step,
            }
        })
        .collect();
    for w in blocks.windows(2) {
        if !(w[1].start > w[0].start + w[0].width()) {
            return Err(Error::config(format!(
                "blocks {} and {} overlap: Q_{} = {} <= {}",
                w[0].j,
                w[1].j,
                w[1].j,
                w[1].start,
                w[0].start + w[0].width()
            )));
        }
    }
    Ok(blocks)
}

/// The sorted union of the blocks of [`easycor_blocks`].
pub fn easycor_lambda(beta: f64, j_max: usize, schedule: Schedule) -> Result<PointSetWindow> {
    let blocks = easycor_blocks(beta, j_max, schedule)?;
    PointSetWindow::new(blocks.iter().flat_map(|b| b.points()).collect())
}

/// Window counts at the scale `h = j^{γ+1}` of block `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockCount {
    pub j: usize,
    pub h: f64,
    /// `sup_x #(Λ ∩ Q_h(x))` over all `x`.
    pub global: usize,
    /// The same supremum over cubes whose left edge lies in block `j`.
    pub local: usize,
}

/// [`BlockCount`] for every block of the window.
pub fn easycor_block_counts(w: &PointSetWindow, blocks: &[Block], beta: f64) -> Vec<BlockCount> {
    let gamma = easycor_gamma(beta);
    let pts = w.points();
    blocks
        .iter()
        .map(|b| {
            let h = (b.j as f64).powf(gamma + 1.0);
            let local = b
                .points()
                .map(|p| {
                    let lo = pts.partition_point(|&q| q < p);
                    let hi = pts.partition_point(|&q| q - p <= 2.0 * h);
                    hi - lo
                })
                .max()
                .unwrap_or(0);
            BlockCount {
                j: b.j,
                h,
                global: w.max_count(h),
                local,
            }
        })
        .collect()
}

/// An arithmetic progression `{start + k·step : 0 ≤ k ≤ n_prog}` inside a
/// residue-class subsample, scored by `step·n_prog^{−1/2}·(ln n_prog)³`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressionCertificate {
    #[serde(rename = "M")]
    pub start: i64,
    #[serde(rename = "N_prog")]
    pub n_prog: usize,
    #[serde(rename = "ell")]
    pub step: i64,
    pub delta: f64,
    pub value: f64,
    pub log_base: String,
    pub subsample_n: usize,
    pub contained: bool,
}

impl ProgressionCertificate {
    pub fn is_valid(&self) -> bool {
        self.contained && self.value < self.delta
    }

    pub fn elements(&self) -> impl Iterator<Item = i64> + '_ {
        (0..=self.n_prog as i64).map(move |k| self.start + k * self.step)
    }
}

/// Outcome of [`progression_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressionSearch {
    pub found: Option<ProgressionCertificate>,
    /// Lowest-scoring progression examined.
    pub best: Option<ProgressionCertificate>,
    pub examined: usize,
    pub budget_exhausted: bool,
}

/// Shortest progression scored; `ln 1 = 0` would make any step qualify.
pub const MIN_PROGRESSION_LEN: usize = 2;

/// `step·n^{−1/2}·(ln n)³`.
pub fn progression_value(step: i64, n_prog: usize) -> f64 {
    let n = n_prog as f64;
    step as f64 * n.ln().powi(3) / n.sqrt()
}

/// Searches `Λ_{n_sub} = {λ_{k·n_sub}}` for a progression scoring below
/// `delta`.
///
/// Candidates are maximal runs of equal consecutive gaps, visited in
/// increasing order of their first element. Along one run of `r` gaps,
/// `n ↦ n^{−1/2}(ln n)³` is unimodal, so the best length is `2` or `r`.
/// At most `budget` runs are examined.
pub fn progression_check(
    w: &PointSetWindow,
    n_sub: usize,
    delta: f64,
    budget: usize,
) -> Result<ProgressionSearch> {
    if n_sub == 0 {
        return Err(Error::domain("subsample modulus must be at least 1"));
    }
    if !(delta > 0.0) {
        return Err(Error::domain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if let Some(x) = w
        .points()
        .iter()
        .find(|x| x.fract() != 0.0 || x.abs() > 2f64.powi(53))
    {
        return Err(Error::domain(format!(
            "point {x} is not an exactly representable integer"
        )));
    }
    let sub: Vec<i64> = w
        .subsample(n_sub, n_sub)?
        .points()
        .iter()
        .map(|&x| x as i64)
        .collect();

    let mut best: Option<ProgressionCertificate> = None;
    let mut examined = 0;
    let mut i = 0;
    while i + MIN_PROGRESSION_LEN < sub.len() {
        let step = sub[i + 1] - sub[i];
        let mut end = i + 1;
        while end + 1 < sub.len() && sub[end + 1] - sub[end] == step {
            end += 1;
        }
        let run = end - i;
        if run >= MIN_PROGRESSION_LEN {
            if examined == budget {
                return Ok(ProgressionSearch {
                    found: None,
                    best,
                    examined,
                    budget_exhausted: true,
                });
            }
            examined += 1;
            let n_prog =
                if progression_value(step, run) < progression_value(step, MIN_PROGRESSION_LEN) {
                    run
                } else {
                    MIN_PROGRESSION_LEN
                };
            let mut cert = ProgressionCertificate {
                start: sub[i],
                n_prog,
                step,
                delta,
                value: progression_value(step, n_prog),
                log_base: "e".to_string(),
                subsample_n: n_sub,
                contained: false,
            };
            let contained = cert.elements().all(|x| sub.binary_search(&x).is_ok());
            cert.contained = contained;
            if cert.is_valid() {
                return Ok(ProgressionSearch {
                    found: Some(cert.clone()),
                    best: Some(cert),
                    examined,
                    budget_exhausted: false,
                });
            }
            if best.as_ref().is_none_or(|b| cert.value < b.value) {
                best = Some(cert);
            }
        }
        i = end;
    }
    Ok(ProgressionSearch {
        found: None,
        best,
        examined,
        budget_exhausted: false,
    })
}
