//! Trigonometric-sum energies and the quantitative estimates behind the
//! partition theorem: the Montgomery–Vaughan inequality, the index-gap
//! lemma, the subsample-density lemma and the interval energy bound.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::pointset::PointSetWindow;

/// `sin(x)/x`, accurate near zero.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `∫_a^b e^{2πiνt} dt`, evaluated as `e^{πiν(a+b)}·(b−a)·sinc(πν(b−a))`.
///
/// The product form agrees with `(e^{2πiνb} − e^{2πiνa})/(2πiν)` but never
/// subtracts nearly equal exponentials, so it stays accurate as `ν → 0`.
pub fn exp_integral(nu: f64, a: f64, b: f64) -> Complex64 {
    let len = b - a;
    // reduce the phase mod one turn before scaling by 2π
    let turns = (0.5 * nu * (a + b)).rem_euclid(1.0);
    Complex64::from_polar(len * sinc(PI * nu * len), 2.0 * PI * turns)
}

/// `Σ a_n e^{2πiλ_n t}` with strictly increasing real frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    frequencies: Vec<f64>,
    coefficients: Vec<Complex64>,
}

impl TrigPolynomial {
    pub fn new(frequencies: Vec<f64>, coefficients: Vec<Complex64>) -> Result<Self> {
        if frequencies.len() != coefficients.len() {
            return Err(Error::domain(format!(
                "{} frequencies but {} coefficients",
                frequencies.len(),
                coefficients.len()
            )));
        }
        if frequencies.iter().any(|f| !f.is_finite()) {
            return Err(Error::input("non-finite frequency"));
        }
        if let Some(w) = frequencies.windows(2).find(|w| w[0] >= w[1]) {
            let what = if w[0] == w[1] { "repeated" } else { "unsorted" };
            return Err(Error::domain(format!(
                "{what} frequency {} / {}",
                w[0], w[1]
            )));
        }
        Ok(Self {
            frequencies,
            coefficients,
        })
    }

    /// All coefficients equal to one.
    pub fn unit(frequencies: Vec<f64>) -> Result<Self> {
        let n = frequencies.len();
        Self::new(frequencies, vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `Σ|a_n|²`.
    pub fn coefficient_energy(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm_sqr())
            .fold(0.0, |s, x| s + x)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.frequencies
            .iter()
            .zip(&self.coefficients)
            .map(|(&f, &c)| c * Complex64::from_polar(1.0, 2.0 * PI * (f * t).rem_euclid(1.0)))
            .sum()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            frequencies: self.frequencies.clone(),
            coefficients: self.coefficients.iter().map(|&c| c * s).collect(),
        }
    }

    /// `∫_a^b |p(t)|² dt` in closed form.
    pub fn exact_energy(&self, a: f64, b: f64) -> f64 {
        let f = &self.frequencies;
        let c = &self.coefficients;
        let len = b - a;
        // diagonal plus twice the real part of the strict upper triangle
        let rows = par::map_range(f.len(), |n| {
            let mut acc = c[n].norm_sqr() * len;
            for m in n + 1..f.len() {
                let z = c[n] * c[m].conj() * exp_integral(f[n] - f[m], a, b);
                acc += 2.0 * z.re;
            }
            acc
        });
        rows.iter().sum::<f64>().max(0.0)
    }
}

/// Both sides of `(T − 1/δ)Σ|a|² ≤ ∫_I |p|² ≤ (T + 1/δ)Σ|a|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MvReport {
    pub lower: f64,
    pub energy: f64,
    pub upper: f64,
    pub delta: f64,
    pub holds: bool,
}

/// Checks the Montgomery–Vaughan inequality on `I = [a, b]` with `δ` the
/// separation of the frequencies.
pub fn mv_check(p: &TrigPolynomial, a: f64, b: f64) -> Result<MvReport> {
    let delta = match p.frequencies.len() {
        0 | 1 => f64::INFINITY,
        _ => p
            .frequencies
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min),
    };
    mv_check_with_delta(p, a, b, delta)
}

/// As [`mv_check`] with a declared separation, which must not exceed the true
/// one.
pub fn mv_check_with_delta(p: &TrigPolynomial, a: f64, b: f64, delta: f64) -> Result<MvReport> {
    if !(b > a) {
        return Err(Error::domain(format!("interval [{a}, {b}] has no length")));
    }
    if !(delta > 0.0) {
        return Err(Error::domain(format!(
            "separation must be positive, got {delta}"
        )));
    }
    if let Some(w) = p.frequencies.windows(2).find(|w| w[1] - w[0] < delta) {
        return Err(Error::domain(format!(
            "declared separation {delta} exceeds gap {} between {} and {}",
            w[1] - w[0],
            w[0],
            w[1]
        )));
    }
    let mass = p.coefficient_energy();
    let t = b - a;
    let lower = (t - 1.0 / delta) * mass;
    let upper = (t + 1.0 / delta) * mass;
    let energy = p.exact_energy(a, b);
    let tol = 1e-9 * mass;
    Ok(MvReport {
        lower,
        energy,
        upper,
        delta,
        holds: lower - tol <= energy && energy <= upper + tol,
    })
}

/// A random Montgomery–Vaughan instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvInstance {
    pub poly: TrigPolynomial,
    pub a: f64,
    pub b: f64,
    /// Exact separation of the frequencies.
    pub delta: f64,
}

/// Up to 20 frequencies with separation `δ ∈ [0.1, 10]` (attained by one gap),
/// coefficients uniform in the unit square, an interval of length in
/// `[0.1, 2]` starting in `[−5, 5]`.
pub fn mv_random_instance<R: Rng + ?Sized>(rng: &mut R) -> MvInstance {
    let k = rng.random_range(2..=20usize);
    let delta = rng.random_range(0.1..=10.0);
    let tight = rng.random_range(0..k - 1);
    let mut freqs = Vec::with_capacity(k);
    let mut x = rng.random_range(-50.0..50.0);
    freqs.push(x);
    for i in 0..k - 1 {
        x += if i == tight {
            delta
        } else {
            delta * (1.0 + rng.random::<f64>())
        };
        freqs.push(x);
    }
    let coeffs = (0..k)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let a = rng.random_range(-5.0..5.0);
    let b = a + rng.random_range(0.1..=2.0);
    let poly = TrigPolynomial::new(freqs, coeffs).expect("generated frequencies are increasing");
    let delta = poly
        .frequencies
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    MvInstance { poly, a, b, delta }
}

/// Summary of [`mv_random_suite`]. Slacks are normalised by `Σ|a|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MvSuiteReport {
    pub seed: u64,
    pub instances: usize,
    pub violations: usize,
    pub worst_lower_slack: f64,
    pub worst_upper_slack: f64,
}

/// Runs `count` instances drawn from a ChaCha stream seeded with `seed`.
pub fn mv_random_suite(count: usize, seed: u64) -> Result<MvSuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances: Vec<MvInstance> = (0..count).map(|_| mv_random_instance(&mut rng)).collect();
    let reports = par::map_slice(&instances, |inst| {
        mv_check_with_delta(&inst.poly, inst.a, inst.b, inst.delta)
            .map(|r| (r, inst.poly.coefficient_energy()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut worst_lower_slack = f64::MAX;
    let mut worst_upper_slack = f64::MAX;
    for (r, mass) in &reports {
        worst_lower_slack = worst_lower_slack.min((r.energy - r.lower) / mass);
        worst_upper_slack = worst_upper_slack.min((r.upper - r.energy) / mass);
    }
    Ok(MvSuiteReport {
        seed,
        instances: count,
        violations: reports.iter().filter(|(r, _)| !r.holds).count(),
        worst_lower_slack,
        worst_upper_slack,
    })
}

/// Smallest `L*` such that, across the window, an index gap larger than `L*`
/// forces a frequency gap larger than `k`: `max{j − i : λ_j − λ_i ≤ k}`.
pub fn lemma_l1(w: &PointSetWindow, k: f64) -> usize {
    let pts = w.points();
    let mut best = 0;
    let mut hi = 0;
    for lo in 0..pts.len() {
        if hi < lo {
            hi = lo;
        }
        while hi + 1 < pts.len() && pts[hi + 1] - pts[lo] <= k {
            hi += 1;
        }
        best = best.max(hi - lo);
    }
    best
}

/// Output of [`lemma_l2`]: the partition modulus and the scale it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsampleDensity {
    pub n: usize,
    pub r: f64,
}

/// Finds the smallest integer scale `R ≥ 1` past which `D⁺_{β,Λ}` never
/// exceeds `D⁺_{β,Λ}(R) + ε` on the window, and sets `N = sup_x #(Λ ∩ Q_R(x))`.
///
/// `sup_x #(Λ ∩ Q_r(x))` is a step function of `r`, so `D⁺_β` peaks on
/// `[R, ∞)` either at `R` or at a step; the scan is exact over all integers.
pub fn lemma_l2(w: &PointSetWindow, beta: f64, eps: f64) -> Result<SubsampleDensity> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::domain(format!(
            "beta must lie in (0, 1], got {beta}"
        )));
    }
    if !(eps > 0.0) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    if w.is_empty() {
        return Err(Error::domain("empty window"));
    }
    let breaks = w.count_breakpoints();
    let r_max = w.max_scale();
    let count_at = |r: f64| breaks.partition_point(|&b| b <= r);
    let d_beta = |r: f64| count_at(r) as f64 / r.powf(beta);

    // peak of D⁺_β over steps strictly above each breakpoint index
    let steps: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&b| b > 0.0 && b <= r_max)
        .collect();
    let mut suffix_peak = vec![0.0f64; steps.len() + 1];
    for i in (0..steps.len()).rev() {
        suffix_peak[i] = suffix_peak[i + 1].max(d_beta(steps[i]));
    }

    let mut candidates: Vec<f64> = std::iter::once(1.0)
        .chain(steps.iter().map(|b| b.ceil().max(1.0)))
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    for r in candidates {
        let first_above = steps.partition_point(|&b| b <= r);
        if suffix_peak[first_above] <= d_beta(r) + eps {
            if r > r_max && w.len() > 1 {
                break;
            }
            return Ok(SubsampleDensity { n: count_at(r), r });
        }
    }
    let curve: Vec<String> = steps
        .iter()
        .take(16)
        .map(|&b| format!("({b}, {:.6})", d_beta(b)))
        .collect();
    Err(Error::extraction(
        "lemma_l2",
        format!(
            "no integer scale up to the window half-span {r_max} satisfies the monotone-tail condition; D+_beta curve: {}",
            curve.join(", ")
        ),
    ))
}

/// One `(j, r)` pair of [`verify_lemma_l2`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsampleDensityCheck {
    pub j: usize,
    pub r: f64,
    pub value: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleDensityReport {
    pub bound: f64,
    pub worst: Option<SubsampleDensityCheck>,
    pub violations: Vec<SubsampleDensityCheck>,
    pub checks: usize,
}

impl SubsampleDensityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn worst_margin(&self) -> f64 {
        self.worst.map_or(f64::INFINITY, |c| c.margin)
    }
}

/// Checks `D⁺_{β,Λ_j(N)}(r) ≤ 2R^{−β} + ε` for every `1 ≤ j ≤ N` and every
/// `r` in `r_grid`. A violation says the window is not representative, not
/// that the lemma is wrong.
pub fn verify_lemma_l2(
    w: &PointSetWindow,
    beta: f64,
    eps: f64,
    n: usize,
    r: f64,
    r_grid: &[f64],
) -> Result<SubsampleDensityReport> {
    if n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    let bound = 2.0 * r.powf(-beta) + eps;
    let subs = (1..=n)
        .map(|j| w.subsample(n, j))
        .collect::<Result<Vec<_>>>()?;
    let per_j = par::map_range(n, |idx| {
        r_grid
            .iter()
            .map(|&rr| {
                let value = subs[idx].d_plus_profile(beta, rr);
                SubsampleDensityCheck {
                    j: idx + 1,
                    r: rr,
                    value,
                    margin: bound - value,
                }
            })
            .collect::<Vec<_>>()
    });
    let all: Vec<SubsampleDensityCheck> = per_j.into_iter().flatten().collect();
    let worst = all
        .iter()
        .copied()
        .min_by(|a, b| a.margin.total_cmp(&b.margin));
    let violations = all.iter().copied().filter(|c| c.margin < 0.0).collect();
    Ok(SubsampleDensityReport {
        bound,
        worst,
        violations,
        checks: all.len(),
    })
}

/// Scales at which `D⁺_{β,Λ_j(N)}` can peak on `[r_min, ∞)`: `r_min` itself
/// and every step of every subsample's count function above it.
pub fn lemma_l2_scan_grid(w: &PointSetWindow, n: usize, r_min: f64) -> Result<Vec<f64>> {
    let mut grid = vec![r_min];
    for j in 1..=n {
        let sub = w.subsample(n, j)?;
        grid.extend(sub.count_breakpoints().into_iter().filter(|&b| b > r_min));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

/// `B = 2ℓ(I)·D⁺_{0,Λ}(ℓ(I)^{−1})`, so that
/// `∫_I |Σ a_λ e^{2πiλξ}|² ≤ B·Σ|a_λ|²` for every interval `I` of length `ℓ(I)`.
pub fn interval_energy_bound(w: &PointSetWindow, interval_length: f64) -> Result<f64> {
    if !(interval_length > 0.0) {
        return Err(Error::domain(format!(
            "interval length must be positive, got {interval_length}"
        )));
    }
    Ok(2.0 * interval_length * w.d_plus_profile(0.0, 1.0 / interval_length))
}
