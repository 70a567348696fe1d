//! Finite unions of closed intervals on the torus `𝕋 = [0, 1)` (normalised so
//! that `|𝕋| = 1`) and the cost of interval covers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A canonical finite union of disjoint closed intervals in `[0, 1]`.
///
/// Intervals are sorted by left endpoint and separated by gaps of positive
/// length; touching or overlapping inputs are merged and zero-length pieces
/// are dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
    measure: f64,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The whole torus.
    pub fn full() -> Self {
        Self {
            intervals: vec![(0.0, 1.0)],
            measure: 1.0,
        }
    }

    /// Builds the canonical union of arcs given as `(a, b)` pairs read mod 1.
    ///
    /// A pair with `a < b` is the arc of length `b - a` starting at `a`; a pair
    /// with `a > b` runs forward from `a` across the seam to `b`. Pieces that
    /// already lie in `[0, 1]` are kept verbatim; anything else is reduced mod 1
    /// and split at the seam.
    pub fn normalize(raw: &[(f64, f64)]) -> Result<Self> {
        let mut pieces = Vec::with_capacity(raw.len() + 1);
        for &(a, b) in raw {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::input(format!(
                    "non-finite interval endpoint ({a}, {b})"
                )));
            }
            push_arc(&mut pieces, a, b);
        }
        Ok(Self::from_pieces(pieces))
    }

    fn from_pieces(mut pieces: Vec<(f64, f64)>) -> Self {
        pieces.retain(|&(a, b)| b > a);
        pieces.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
        for (a, b) in pieces {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        let measure = merged.iter().map(|&(a, b)| b - a).fold(0.0, |s, l| s + l);
        Self {
            intervals: merged,
            measure,
        }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// `[0, 1] \ self`, again in canonical form.
    pub fn complement(&self) -> Self {
        let mut pieces = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = 0.0;
        for &(a, b) in &self.intervals {
            if a > cursor {
                pieces.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < 1.0 {
            pieces.push((cursor, 1.0));
        }
        Self::from_pieces(pieces)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut pieces = self.intervals.clone();
        pieces.extend_from_slice(&other.intervals);
        Self::from_pieces(pieces)
    }

    /// True when every interval of `self` lies inside some interval of `other`,
    /// allowing each endpoint to stick out by at most `tol`.
    pub fn is_subset_of(&self, other: &Self, tol: f64) -> bool {
        self.intervals.iter().all(|&(a, b)| {
            other
                .intervals
                .iter()
                .any(|&(c, d)| c - tol <= a && b <= d + tol)
        })
    }

    pub fn contains(&self, x: f64) -> bool {
        let x = x.rem_euclid(1.0);
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }
}

fn push_arc(out: &mut Vec<(f64, f64)>, a: f64, b: f64) {
    if a == b {
        return;
    }
    if a < b {
        if a >= 0.0 && b <= 1.0 {
            out.push((a, b));
            return;
        }
        if b - a >= 1.0 {
            out.push((0.0, 1.0));
            return;
        }
        let shift = a.floor();
        let (a, b) = (a - shift, b - shift);
        if b <= 1.0 {
            out.push((a, b));
        } else {
            out.push((a, 1.0));
            out.push((0.0, b - 1.0));
        }
    } else if (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) {
        out.push((a, 1.0));
        out.push((0.0, b));
    } else {
        let (a, b) = (a.rem_euclid(1.0), b.rem_euclid(1.0));
        if a < b {
            out.push((a, b));
        } else if a > b {
            out.push((a, 1.0));
            out.push((0.0, b));
        }
    }
}

/// Geometric tail `ℓ_n = c·ρ^n` for `n ≥ from_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricTail {
    pub c: f64,
    pub rho: f64,
    pub from_n: usize,
}

impl GeometricTail {
    pub fn length(&self, n: usize) -> f64 {
        self.c * self.rho.powi(n as i32)
    }

    /// `Σ_{n ≥ start} ℓ_n^p` in closed form.
    fn power_sum_from(&self, start: usize, p: f64) -> Result<f64> {
        let start = start.max(self.from_n);
        let ratio = self.rho.powf(p);
        if ratio >= 1.0 {
            return Err(Error::config(format!(
                "geometric tail diverges under exponent {p} (rho^p = {ratio})"
            )));
        }
        Ok(self.c.powf(p) * ratio.powi(start as i32) / (1.0 - ratio))
    }
}

/// An ordered interval cover `{E_n}` with nonincreasing lengths, the split
/// index `Z` and the Hausdorff exponent `α`.
///
/// Indices are 1-based, as in `E_1, E_2, …`. The explicit list gives
/// `ℓ_1..ℓ_{n₀}`; an optional geometric tail continues from `n₀ + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverSpec {
    pub lengths: Vec<f64>,
    #[serde(default)]
    pub tail: Option<GeometricTail>,
    #[serde(default)]
    pub centers: Option<Vec<f64>>,
    #[serde(rename = "Z")]
    pub z: usize,
    pub alpha: f64,
}

/// Head and tail of the cover cost `Σ_{n≤Z} ℓ_n + Σ_{n>Z} ℓ_n^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverCost {
    pub head: f64,
    pub tail_alpha: f64,
    pub total: f64,
}

impl CoverCost {
    pub fn below_one(&self) -> bool {
        self.total < 1.0
    }
}

impl CoverSpec {
    pub fn new(
        lengths: Vec<f64>,
        tail: Option<GeometricTail>,
        centers: Option<Vec<f64>>,
        z: usize,
        alpha: f64,
    ) -> Result<Self> {
        let spec = Self {
            lengths,
            tail,
            centers,
            z,
            alpha,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the structural invariants. Deserialized covers should be passed
    /// through here before use.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        for (i, &l) in self.lengths.iter().enumerate() {
            if !(l.is_finite() && l > 0.0 && l <= 1.0) {
                return Err(Error::config(format!(
                    "length l_{} = {l} outside (0, 1]",
                    i + 1
                )));
            }
            if i > 0 && l > self.lengths[i - 1] {
                return Err(Error::config(format!(
                    "lengths must be nonincreasing: l_{} = {} < l_{} = {l}",
                    i,
                    self.lengths[i - 1],
                    i + 1
                )));
            }
        }
        if let Some(t) = &self.tail {
            if !(t.rho > 0.0 && t.rho < 1.0) || !(t.c.is_finite() && t.c > 0.0) {
                return Err(Error::config(format!(
                    "geometric tail needs c > 0 and 0 < rho < 1, got c = {}, rho = {}",
                    t.c, t.rho
                )));
            }
            if t.from_n != self.lengths.len() + 1 {
                return Err(Error::config(format!(
                    "geometric tail must start right after the explicit list (from_n = {}, expected {})",
                    t.from_n,
                    self.lengths.len() + 1
                )));
            }
            let first = t.length(t.from_n);
            if first > 1.0 {
                return Err(Error::config(format!(
                    "tail length l_{} = {first} exceeds 1",
                    t.from_n
                )));
            }
            if let Some(&last) = self.lengths.last() {
                if first > last {
                    return Err(Error::config(format!(
                        "tail length l_{} = {first} exceeds last explicit length {last}",
                        t.from_n
                    )));
                }
            }
        }
        if let Some(c) = &self.centers {
            if let Some(bad) = c.iter().find(|x| !x.is_finite()) {
                return Err(Error::config(format!("non-finite center {bad}")));
            }
        }
        Ok(())
    }

    /// Number of explicitly listed lengths.
    pub fn explicit_len(&self) -> usize {
        self.lengths.len()
    }

    /// True when the cover has infinitely many terms.
    pub fn is_infinite(&self) -> bool {
        self.tail.is_some()
    }

    /// `ℓ_n` for 1-based `n`, or `None` past the end of a finite cover.
    pub fn length(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        if n <= self.lengths.len() {
            return Some(self.lengths[n - 1]);
        }
        self.tail.as_ref().map(|t| t.length(n))
    }

    /// `Σ_{n > m} ℓ_n^p`.
    pub fn power_sum_after(&self, m: usize, p: f64) -> Result<f64> {
        let explicit: f64 = self
            .lengths
            .iter()
            .skip(m)
            .map(|l| l.powf(p))
            .fold(0.0, |s, l| s + l);
        let tail = match &self.tail {
            Some(t) => t.power_sum_from(m + 1, p)?,
            None => 0.0,
        };
        Ok(explicit + tail)
    }

    /// `Σ_{n ≤ m} ℓ_n` (terms past the end of a finite cover count as zero).
    pub fn head_sum(&self, m: usize) -> f64 {
        (1..=m)
            .map_while(|n| self.length(n))
            .fold(0.0, |s, l| s + l)
    }

    /// Evaluates `Σ_{n≤Z} ℓ_n + Σ_{n>Z} ℓ_n^α`.
    pub fn cover_cost(&self) -> Result<CoverCost> {
        let head = self.head_sum(self.z);
        let tail_alpha = self.power_sum_after(self.z, self.alpha)?;
        Ok(CoverCost {
            head,
            tail_alpha,
            total: head + tail_alpha,
        })
    }

    /// `F̄ = Σ_n ℓ_n`, an upper bound for `|∪E_n|` that stays valid for
    /// overlapping covers.
    pub fn sum_lengths(&self) -> f64 {
        // exponent 1 with rho < 1 never diverges
        self.power_sum_after(0, 1.0).unwrap_or(f64::INFINITY)
    }

    /// The union of the first `n_max` intervals `[c_n − ℓ_n/2, c_n + ℓ_n/2]`.
    pub fn realize(&self, n_max: usize) -> Result<IntervalUnion> {
        let centers = self
            .centers
            .as_ref()
            .ok_or_else(|| Error::config("cover has no centers"))?;
        if centers.len() < n_max {
            return Err(Error::config(format!(
                "cover lists {} centers, {n_max} requested",
                centers.len()
            )));
        }
        let mut raw = Vec::with_capacity(n_max);
        for (n, &c) in centers.iter().enumerate().take(n_max) {
            let l = self
                .length(n + 1)
                .ok_or_else(|| Error::config(format!("cover has no length for E_{}", n + 1)))?;
            raw.push((c - l / 2.0, c + l / 2.0));
        }
        IntervalUnion::normalize(&raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn overlap_merge() {
        let u = IntervalUnion::normalize(&[(0.1, 0.3), (0.2, 0.5)]).unwrap();
        assert_eq!(u.intervals(), &[(0.1, 0.5)]);
        assert!(close(u.measure(), 0.4));
    }

    #[test]
    fn seam_split() {
        let u = IntervalUnion::normalize(&[(0.9, 0.2)]).unwrap();
        assert_eq!(u.intervals(), &[(0.0, 0.2), (0.9, 1.0)]);
        assert!(close(u.measure(), 0.3));
    }

    #[test]
    fn empty_input() {
        let u = IntervalUnion::normalize(&[]).unwrap();
        assert!(u.is_empty());
        assert_eq!(u.measure(), 0.0);
    }

    #[test]
    fn negative_arc_wraps() {
        let u = IntervalUnion::normalize(&[(-0.05, 0.05)]).unwrap();
        assert_eq!(u.intervals().len(), 2);
        assert!(close(u.measure(), 0.1));
        assert!(u.contains(0.99) && u.contains(0.01) && !u.contains(0.5));
    }

    #[test]
    fn touching_and_degenerate() {
        let u = IntervalUnion::normalize(&[(0.1, 0.2), (0.2, 0.3), (0.4, 0.4)]).unwrap();
        assert_eq!(u.intervals(), &[(0.1, 0.3)]);
        let full = IntervalUnion::normalize(&[(0.3, 1.7)]).unwrap();
        assert_eq!(full, IntervalUnion::full());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(
            IntervalUnion::normalize(&[(0.0, f64::NAN)]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn complements() {
        let u = IntervalUnion::normalize(&[(0.25, 0.75)]).unwrap();
        assert_eq!(u.complement().intervals(), &[(0.0, 0.25), (0.75, 1.0)]);
        assert_eq!(
            IntervalUnion::empty().complement().intervals(),
            &[(0.0, 1.0)]
        );
        let w = IntervalUnion::normalize(&[(0.0, 0.2), (0.9, 1.0)]).unwrap();
        assert_eq!(w.complement().intervals(), &[(0.2, 0.9)]);
        assert!(IntervalUnion::full().complement().is_empty());
    }

    fn geometric_quarter() -> CoverSpec {
        // l_n = 4^{-(n+2)} = (1/16)(1/4)^n
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
    fn geometric_cover_cost() {
        let c = geometric_quarter();
        let brute: f64 = (1..=200).map(|n| 4f64.powi(-(n + 2)).sqrt()).sum();
        let cost = c.cover_cost().unwrap();
        assert!((cost.tail_alpha - 0.25).abs() < 1e-15);
        assert!((cost.tail_alpha - brute).abs() < 1e-14);
        assert_eq!(cost.head, 0.0);
        assert!(cost.below_one());
    }

    #[test]
    fn single_interval_cost() {
        let c = CoverSpec::new(vec![0.5], None, None, 1, 0.5).unwrap();
        let cost = c.cover_cost().unwrap();
        assert_eq!((cost.head, cost.tail_alpha, cost.total), (0.5, 0.0, 0.5));
    }

    #[test]
    fn dyadic_cover_fails_condition() {
        let c = CoverSpec::new(
            vec![],
            Some(GeometricTail {
                c: 1.0,
                rho: 0.5,
                from_n: 1,
            }),
            None,
            0,
            0.5,
        )
        .unwrap();
        let cost = c.cover_cost().unwrap();
        let brute: f64 = (1..=400).map(|n| 2f64.powf(-(n as f64) / 2.0)).sum();
        assert!((cost.tail_alpha - 1.0 / (2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((cost.tail_alpha - brute).abs() < 1e-12);
        assert!(!cost.below_one());
    }

    #[test]
    fn sum_lengths_examples() {
        assert!((geometric_quarter().sum_lengths() - 1.0 / 48.0).abs() < 1e-16);
        let one = CoverSpec::new(vec![0.5], None, None, 0, 0.5).unwrap();
        assert_eq!(one.sum_lengths(), 0.5);
        let c = CoverSpec::new(
            vec![],
            Some(GeometricTail {
                c: 0.4,
                rho: 0.5,
                from_n: 1,
            }),
            None,
            0,
            0.5,
        )
        .unwrap();
        assert!((c.sum_lengths() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn cover_validation() {
        assert!(CoverSpec::new(vec![0.1, 0.2], None, None, 0, 0.5).is_err());
        assert!(CoverSpec::new(vec![1.5], None, None, 0, 0.5).is_err());
        assert!(CoverSpec::new(vec![0.1], None, None, 0, 1.0).is_err());
        let bad_tail = GeometricTail {
            c: 1.0,
            rho: 0.5,
            from_n: 2,
        };
        // l_2 = 0.25 > l_1 = 0.1
        assert!(CoverSpec::new(vec![0.1], Some(bad_tail), None, 0, 0.5).is_err());
        let gap = GeometricTail {
            from_n: 5,
            ..bad_tail
        };
        assert!(CoverSpec::new(vec![0.5], Some(gap), None, 0, 0.5).is_err());
    }

    #[test]
    fn realize_examples() {
        let c = CoverSpec::new(vec![0.2], None, Some(vec![0.5]), 0, 0.5).unwrap();
        let u = c.realize(1).unwrap();
        assert_eq!(u.intervals().len(), 1);
        assert!(close(u.intervals()[0].0, 0.4) && close(u.intervals()[0].1, 0.6));

        let disjoint = CoverSpec::new(vec![0.2, 0.1], None, Some(vec![0.2, 0.7]), 0, 0.5).unwrap();
        assert!(close(disjoint.realize(2).unwrap().measure(), 0.3));

        let overlapping =
            CoverSpec::new(vec![0.2, 0.1], None, Some(vec![0.2, 0.25]), 0, 0.5).unwrap();
        assert!(overlapping.realize(2).unwrap().measure() < 0.3 - 1e-9);

        assert!(matches!(disjoint.realize(3), Err(Error::Config(_))));
        let no_centers = CoverSpec::new(vec![0.2], None, None, 0, 0.5).unwrap();
        assert!(matches!(no_centers.realize(1), Err(Error::Config(_))));
    }
}
