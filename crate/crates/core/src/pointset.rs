//! Finite windows of a bi-infinite frequency set `Λ ⊂ ℝ` and estimators of
//! its Beurling densities and dimensions.
//!
//! `Q_h(x) = [x − h, x + h]` throughout. Suprema over `x ∈ ℝ` of window
//! counts are exact on a finite window: a closed window of length `2h` holding
//! the most points can always be slid until its left end sits on a point.
//! Infima over `x` are taken over the centres whose cube lies inside the
//! observed span, since an unobserved region says nothing about gaps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// Asserted growth bound `#(Λ ∩ Q_r(x)) ≤ c·r^{beta_bar}` for `r ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityBound {
    pub beta_bar: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSetWindow {
    points: Vec<f64>,
    #[serde(default)]
    window_certified: bool,
    #[serde(default)]
    density_bound: Option<DensityBound>,
}

impl PointSetWindow {
    /// Builds a window from strictly increasing finite points.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        let w = Self {
            points,
            window_certified: false,
            density_bound: None,
        };
        w.check()?;
        Ok(w)
    }

    /// Sorts and deduplicates first; fails only on non-finite input.
    pub fn from_unsorted(mut points: Vec<f64>) -> Result<Self> {
        if let Some(bad) = points.iter().find(|x| !x.is_finite()) {
            return Err(Error::input(format!("non-finite point {bad}")));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        Self::new(points)
    }

    pub(crate) fn check(&self) -> Result<()> {
        if let Some(bad) = self.points.iter().find(|x| !x.is_finite()) {
            return Err(Error::input(format!("non-finite point {bad}")));
        }
        if let Some(i) = self.points.windows(2).position(|p| p[0] >= p[1]) {
            return Err(Error::domain(format!(
                "points must be strictly increasing: {} then {}",
                self.points[i],
                self.points[i + 1]
            )));
        }
        Ok(())
    }

    pub fn certified(mut self, certified: bool) -> Self {
        self.window_certified = certified;
        self
    }

    pub fn with_density_bound(mut self, bound: Option<DensityBound>) -> Self {
        self.density_bound = bound;
        self
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn window_certified(&self) -> bool {
        self.window_certified
    }

    pub fn density_bound(&self) -> Option<DensityBound> {
        self.density_bound
    }

    /// `(min, max)` of the window.
    pub fn span(&self) -> Option<(f64, f64)> {
        Some((*self.points.first()?, *self.points.last()?))
    }

    /// Half the span: the largest scale at which a cube still fits inside the
    /// observed window.
    pub fn max_scale(&self) -> f64 {
        self.span().map_or(0.0, |(a, b)| (b - a) / 2.0)
    }

    /// Position of `λ_0`, the smallest point `≥ 0` (equal to `len()` when every
    /// point is negative).
    pub fn anchor(&self) -> usize {
        self.points.partition_point(|&p| p < 0.0)
    }

    /// Global index of the point stored at `pos`.
    pub fn index_of(&self, pos: usize) -> i64 {
        pos as i64 - self.anchor() as i64
    }

    /// `#(Λ ∩ [x − h, x + h])`.
    pub fn count_in_cube(&self, x: f64, h: f64) -> usize {
        let lo = self.points.partition_point(|&p| p < x - h);
        let hi = self.points.partition_point(|&p| p <= x + h);
        hi.saturating_sub(lo)
    }

    /// True when `Q_h(x)` reaches past the observed span of an uncertified
    /// window, so the count may miss points.
    pub fn cube_truncated(&self, x: f64, h: f64) -> bool {
        if self.window_certified {
            return false;
        }
        match self.span() {
            Some((a, b)) => x - h < a || x + h > b,
            None => true,
        }
    }

    /// Minimum consecutive gap `δ`.
    pub fn separation(&self) -> Result<f64> {
        if self.points.len() < 2 {
            return Err(Error::domain("separation needs at least two points"));
        }
        Ok(self
            .points
            .windows(2)
            .map(|p| p[1] - p[0])
            .fold(f64::INFINITY, f64::min))
    }

    /// `sup_x #(Λ ∩ Q_h(x))`.
    pub fn max_count(&self, h: f64) -> usize {
        let pts = &self.points;
        let mut best = 0;
        let mut k = 0;
        for i in 0..pts.len() {
            if k < i {
                k = i;
            }
            while k < pts.len() && pts[k] - pts[i] <= 2.0 * h {
                k += 1;
            }
            best = best.max(k - i);
        }
        best
    }

    /// `inf_x #(Λ ∩ Q_h(x))` over centres `x ∈ [min + h, max − h]`; `None` when
    /// no cube of radius `h` fits inside the span.
    pub fn min_count(&self, h: f64) -> Option<usize> {
        let (a, b) = self.span()?;
        let (lo, hi) = (a + h, b - h);
        if lo > hi {
            return None;
        }
        let mut breaks: Vec<f64> = self
            .points
            .iter()
            .flat_map(|&p| [p - h, p + h])
            .filter(|&x| x > lo && x < hi)
            .collect();
        breaks.push(lo);
        breaks.push(hi);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut best = self.count_in_cube(lo, h).min(self.count_in_cube(hi, h));
        for w in breaks.windows(2) {
            best = best.min(self.count_in_cube(0.5 * (w[0] + w[1]), h));
        }
        Some(best)
    }

    /// `D⁺_{α,Λ}(r) = sup_x #(Λ ∩ Q_r(x)) / r^α`.
    pub fn d_plus_profile(&self, alpha: f64, r: f64) -> f64 {
        self.max_count(r) as f64 / r.powf(alpha)
    }

    /// Radii at which `max_count` steps up: entry `k − 1` is the smallest `r`
    /// with `max_count(r) ≥ k`, i.e. half the narrowest span of `k`
    /// consecutive points. Nondecreasing, first entry `0`.
    pub fn count_breakpoints(&self) -> Vec<f64> {
        let pts = &self.points;
        let n = pts.len();
        let widths = par::map_range(n, |k| {
            (0..n - k)
                .map(|i| pts[i + k] - pts[i])
                .fold(f64::INFINITY, f64::min)
                / 2.0
        });
        // Narrowest spans are monotone in k already; cummax guards rounding.
        let mut out = Vec::with_capacity(n);
        let mut run = 0.0f64;
        for w in widths {
            run = run.max(w);
            out.push(run);
        }
        out
    }

    /// Sup and inf counts at scale `h`; the inf is 0 when no cube of radius
    /// `h` fits inside the span.
    pub fn discreteness_profile(&self, h: f64) -> (usize, usize) {
        (self.max_count(h), self.min_count(h).unwrap_or(0))
    }

    /// Finite-window surrogate of `D⁺_r` and `D⁻_r` over a scale grid.
    pub fn density_estimate(&self, r: f64, h_grid: &[f64]) -> Result<DensityReport> {
        validate_grid(h_grid, 1)?;
        if !(r > 0.0) {
            return Err(Error::config(format!(
                "density exponent must be positive, got {r}"
            )));
        }
        let counts = par::map_slice(h_grid, |&h| self.discreteness_profile(h));
        let sup_curve: Vec<f64> = h_grid
            .iter()
            .zip(&counts)
            .map(|(&h, &(s, _))| s as f64 / h.powf(r))
            .collect();
        let inf_curve: Vec<f64> = h_grid
            .iter()
            .zip(&counts)
            .map(|(&h, &(_, i))| i as f64 / h.powf(r))
            .collect();
        let tail = largest_third(h_grid.len());
        let d_plus_estimate = sup_curve[tail.clone()].iter().copied().fold(0.0, f64::max);
        let d_minus_estimate = inf_curve[tail]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let truncated = !self.window_certified && h_grid.iter().any(|&h| h > self.max_scale());
        Ok(DensityReport {
            r,
            h_values: h_grid.to_vec(),
            sup_curve,
            inf_curve,
            d_plus_estimate,
            d_minus_estimate,
            truncated,
        })
    }

    /// Log–log regression of the sup and inf counts against `h`, giving
    /// slopes that estimate `dim⁺` and `dim⁻`; also evaluates
    /// `density_estimate` at every exponent of `r_grid`.
    pub fn dim_estimate(&self, r_grid: &[f64], h_grid: &[f64]) -> Result<DimReport> {
        validate_grid(h_grid, 3)?;
        let counts = par::map_slice(h_grid, |&h| self.discreteness_profile(h));
        let sup: Vec<(f64, f64)> = h_grid
            .iter()
            .zip(&counts)
            .filter(|(_, c)| c.0 > 0)
            .map(|(&h, c)| (h.ln(), (c.0 as f64).ln()))
            .collect();
        let inf: Vec<(f64, f64)> = h_grid
            .iter()
            .zip(&counts)
            .filter(|(_, c)| c.1 > 0)
            .map(|(&h, c)| (h.ln(), (c.1 as f64).ln()))
            .collect();
        let dim_plus = slope(&sup).map_or(0.0, |s| s.clamp(0.0, 1.0));
        let dim_minus = slope(&inf).map_or(0.0, |s| s.clamp(0.0, 1.0));
        let densities = r_grid
            .iter()
            .map(|&r| self.density_estimate(r, h_grid))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .map(|d| (d.r, d.d_plus_estimate, d.d_minus_estimate))
            .collect();
        Ok(DimReport {
            dim_plus,
            dim_minus,
            densities,
        })
    }

    /// Geometric grid of `steps` scales from the median gap up to
    /// `max_scale()`; empty when the window has fewer than two points.
    pub fn default_scale_grid(&self, steps: usize) -> Vec<f64> {
        if self.points.len() < 2 || steps == 0 {
            return Vec::new();
        }
        let mut gaps: Vec<f64> = self.points.windows(2).map(|p| p[1] - p[0]).collect();
        gaps.sort_by(f64::total_cmp);
        let lo = gaps[gaps.len() / 2];
        let hi = self.max_scale();
        if !(hi > lo) {
            return vec![hi];
        }
        geometric_grid(lo, hi, steps)
    }

    /// `Λ_j(N) = {λ_{mN+j} : m ∈ ℤ}` restricted to the window, `1 ≤ j ≤ N`.
    pub fn subsample(&self, n: usize, j: usize) -> Result<PointSetWindow> {
        if n == 0 || j == 0 || j > n {
            return Err(Error::domain(format!(
                "subsample needs 1 <= j <= N, got N = {n}, j = {j}"
            )));
        }
        let anchor = self.anchor() as i64;
        let residue = (j % n) as i64;
        let points = self
            .points
            .iter()
            .enumerate()
            .filter(|(pos, _)| (*pos as i64 - anchor).rem_euclid(n as i64) == residue)
            .map(|(_, &p)| p)
            .collect();
        Ok(PointSetWindow {
            points,
            window_certified: self.window_certified,
            density_bound: None,
        })
    }

    /// First radius `r ≥ 1` at which the window exceeds its asserted
    /// `density_bound`, if any.
    pub fn density_bound_violation(&self) -> Option<f64> {
        let bound = self.density_bound?;
        self.count_breakpoints()
            .iter()
            .enumerate()
            .map(|(k, &r)| (k + 1, r.max(1.0)))
            .find(|&(count, r)| count as f64 > bound.c * r.powf(bound.beta_bar))
            .map(|(_, r)| r)
    }
}

/// Finite-window densities at one exponent `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub r: f64,
    pub h_values: Vec<f64>,
    pub sup_curve: Vec<f64>,
    pub inf_curve: Vec<f64>,
    /// Max of `sup_curve` over the largest third of the scales.
    pub d_plus_estimate: f64,
    /// Min of `inf_curve` over the largest third of the scales.
    pub d_minus_estimate: f64,
    /// Some scale exceeds half the span of an uncertified window.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimReport {
    pub dim_plus: f64,
    pub dim_minus: f64,
    /// `(r, d_plus_estimate, d_minus_estimate)` for each exponent requested.
    pub densities: Vec<(f64, f64, f64)>,
}

/// `steps` geometrically spaced values from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![hi];
    }
    let ratio = (hi / lo).ln() / (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo * (ratio * i as f64).exp()
            }
        })
        .collect()
}

fn validate_grid(grid: &[f64], min_len: usize) -> Result<()> {
    if grid.len() < min_len {
        return Err(Error::config(format!(
            "scale grid needs at least {min_len} values, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
        return Err(Error::config(
            "scale grid values must be positive and finite",
        ));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config("scale grid must be strictly increasing"));
    }
    Ok(())
}

fn largest_third(n: usize) -> std::ops::Range<usize> {
    let k = n.div_ceil(3).max(1);
    n - k..n
}

/// Least-squares slope; `None` with fewer than two distinct abscissae.
fn slope(xy: &[(f64, f64)]) -> Option<f64> {
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
