//! Gram matrices of restricted exponentials `{e^{2πiλx}·1_E}` over a finite
//! frequency window, and their extremal eigenvalues (the finite-section Riesz
//! bounds).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::exp_integral;
use crate::error::{Error, Result};
use crate::par;
use crate::setmodel::IntervalUnion;

/// Largest section assembled by [`gram_matrix`].
pub const DEFAULT_MAX_DIM: usize = 512;

const HERMITIAN_TOL: f64 = 1e-12;

/// A Gram section with its extremal eigenvalues.
#[derive(Debug, Clone)]
pub struct GramSection {
    pub frequencies: Vec<f64>,
    pub set: IntervalUnion,
    pub matrix: DMatrix<Complex64>,
    /// Raw smallest eigenvalue; may dip below zero by round-off.
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl GramSection {
    pub fn dim(&self) -> usize {
        self.frequencies.len()
    }

    /// `lambda_min` with round-off negatives clamped to zero.
    pub fn lambda_min_clamped(&self) -> f64 {
        let floor = -1e-10 * self.lambda_max.max(1.0);
        if self.lambda_min < 0.0 && self.lambda_min >= floor {
            0.0
        } else {
            self.lambda_min
        }
    }

    /// Row-major `[re, im]` pairs.
    pub fn matrix_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.matrix.nrows())
            .map(|i| {
                (0..self.matrix.ncols())
                    .map(|j| {
                        let z = self.matrix[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }
}

/// `∫_E e^{2πiνx} dx`, summed over the intervals of `E`.
pub fn set_transform(set: &IntervalUnion, nu: f64) -> Complex64 {
    if nu == 0.0 {
        return Complex64::new(set.measure(), 0.0);
    }
    set.intervals()
        .iter()
        .map(|&(a, b)| exp_integral(nu, a, b))
        .sum()
}

/// `G_{nm} = ∫_E e^{2πi(λ_n − λ_m)x} dx`.
pub fn assemble(set: &IntervalUnion, freqs: &[f64]) -> Result<DMatrix<Complex64>> {
    check_frequencies(freqs)?;
    let n = freqs.len();
    let upper = par::map_range(n, |i| {
        (i..n)
            .map(|j| set_transform(set, freqs[i] - freqs[j]))
            .collect::<Vec<_>>()
    });
    let mut g = DMatrix::<Complex64>::zeros(n, n);
    for (i, row) in upper.into_iter().enumerate() {
        for (off, z) in row.into_iter().enumerate() {
            let j = i + off;
            if i == j {
                g[(i, i)] = Complex64::new(set.measure(), 0.0);
            } else {
                g[(i, j)] = z;
                g[(j, i)] = z.conj();
            }
        }
    }
    Ok(g)
}

fn check_frequencies(freqs: &[f64]) -> Result<()> {
    if freqs.iter().any(|f| !f.is_finite()) {
        return Err(Error::input("non-finite frequency"));
    }
    let mut sorted = freqs.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::domain(format!("duplicate frequency {}", w[0])));
    }
    Ok(())
}

/// Assembles the section and computes its extremal eigenvalues.
pub fn gram_matrix(set: &IntervalUnion, freqs: &[f64]) -> Result<GramSection> {
    gram_matrix_with_limit(set, freqs, DEFAULT_MAX_DIM)
}

pub fn gram_matrix_with_limit(
    set: &IntervalUnion,
    freqs: &[f64],
    max_dim: usize,
) -> Result<GramSection> {
    if freqs.len() > max_dim {
        return Err(Error::config(format!(
            "section of {} frequencies exceeds the limit {max_dim}",
            freqs.len()
        )));
    }
    let matrix = assemble(set, freqs)?;
    let (lambda_min, lambda_max) = extremal_eigs(&matrix)?;
    Ok(GramSection {
        frequencies: freqs.to_vec(),
        set: set.clone(),
        matrix,
        lambda_min,
        lambda_max,
    })
}

/// Smallest and largest eigenvalue of a Hermitian matrix (dense solve).
pub fn extremal_eigs(m: &DMatrix<Complex64>) -> Result<(f64, f64)> {
    if m.nrows() != m.ncols() {
        return Err(Error::domain(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::domain("empty matrix has no eigenvalues"));
    }
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > HERMITIAN_TOL {
                return Err(Error::domain(format!(
                    "matrix is not Hermitian at ({i}, {j}): defect {d:e}"
                )));
            }
        }
    }
    let eigs = m.clone().symmetric_eigenvalues();
    let lo = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Finite-section evidence for a lower Riesz bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RieszMarginReport {
    pub freqs: Vec<f64>,
    pub complement: bool,
    pub set_measure: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub target_lower: f64,
    /// `lambda_min − target_lower` (clamped `lambda_min`).
    pub margin: f64,
    /// Empty Gram set: every section is the zero matrix.
    pub degenerate: bool,
    /// `"consistent"` when the margin is positive (a finite section can only
    /// fail to refute the infinite bound), `"refuted"` otherwise.
    pub evidence: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

/// Compares the smallest eigenvalue of the section on `E` (or on `E^c` when
/// `complement` is set) with `target_lower`.
pub fn riesz_margin(
    complement: bool,
    set: &IntervalUnion,
    freqs: &[f64],
    target_lower: f64,
) -> Result<RieszMarginReport> {
    let gram_set = if complement {
        set.complement()
    } else {
        set.clone()
    };
    let section = gram_matrix(&gram_set, freqs)?;
    let margin = section.lambda_min_clamped() - target_lower;
    Ok(RieszMarginReport {
        freqs: freqs.to_vec(),
        complement,
        set_measure: gram_set.measure(),
        lambda_min: section.lambda_min,
        lambda_max: section.lambda_max,
        target_lower,
        margin,
        degenerate: gram_set.is_empty(),
        evidence: if margin > 0.0 {
            "consistent"
        } else {
            "refuted"
        }
        .to_string(),
        matrix: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ints(n: usize) -> Vec<f64> {
        (0..n).map(|k| k as f64).collect()
    }

    #[test]
    fn full_torus_integer_identity() {
        let g = gram_matrix(&IntervalUnion::full(), &ints(10)).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g.matrix[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-14);
            }
        }
        assert!((g.lambda_min - 1.0).abs() < 1e-10 && (g.lambda_max - 1.0).abs() < 1e-10);
    }

    #[test]
    fn half_interval_entry() {
        let half = IntervalUnion::normalize(&[(0.0, 0.5)]).unwrap();
        let g = assemble(&half, &[1.0, 0.0]).unwrap();
        // ν = λ_0 − λ_1 = 1
        assert!((g[(0, 1)] - Complex64::new(0.0, 1.0 / PI)).norm() < 1e-15);
        assert!((g[(1, 0)] - Complex64::new(0.0, -1.0 / PI)).norm() < 1e-15);
    }

    #[test]
    fn empty_set_zero_matrix() {
        let g = gram_matrix(&IntervalUnion::empty(), &ints(4)).unwrap();
        assert!(g.matrix.iter().all(|z| z.norm() == 0.0));
        assert_eq!((g.lambda_min, g.lambda_max), (0.0, 0.0));
    }

    #[test]
    fn quarter_interval_spaced_by_four() {
        let e = IntervalUnion::normalize(&[(0.0, 0.25)]).unwrap();
        let g = gram_matrix(&e, &[0.0, 4.0, 8.0]).unwrap();
        assert!((g.lambda_min - 0.25).abs() < 1e-10);
        assert!((g.lambda_max - 0.25).abs() < 1e-10);
    }

    #[test]
    fn two_by_two_closed_form() {
        let z = Complex64::new(0.3, -0.4);
        let d = 1.5;
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(d, 0.0), z, z.conj(), Complex64::new(d, 0.0)],
        );
        let (lo, hi) = extremal_eigs(&m).unwrap();
        assert!((lo - (d - 0.5)).abs() < 1e-12);
        assert!((hi - (d + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.2, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(extremal_eigs(&m), Err(Error::Domain(_))));
    }

    #[test]
    fn duplicate_and_oversize_rejected() {
        let e = IntervalUnion::full();
        assert!(matches!(
            gram_matrix(&e, &[0.0, 1.0, 0.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            gram_matrix_with_limit(&e, &ints(5), 4),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn margins() {
        let r = riesz_margin(true, &IntervalUnion::empty(), &ints(6), 0.25).unwrap();
        assert!((r.lambda_min - 1.0).abs() < 1e-10);
        assert!((r.margin - 0.75).abs() < 1e-10);
        assert_eq!(r.evidence, "consistent");

        let r = riesz_margin(true, &IntervalUnion::full(), &ints(6), 0.1).unwrap();
        assert!(r.degenerate);
        assert!(r.margin < 0.0);
        assert_eq!(r.evidence, "refuted");
    }
}
