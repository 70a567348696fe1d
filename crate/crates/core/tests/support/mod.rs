//! Independent oracles shared by the integration tests. Nothing here calls
//! the closed forms under test.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

/// Adaptive Simpson quadrature of a real function on `[a, b]`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `Σ a_k e^{2πiλ_k t}` summed directly.
pub fn poly_at(freqs: &[f64], coeffs: &[Complex64], t: f64) -> Complex64 {
    freqs
        .iter()
        .zip(coeffs)
        .map(|(&l, &a)| a * Complex64::from_polar(1.0, 2.0 * PI * l * t))
        .sum()
}

/// `∫_a^b |Σ a_k e^{2πiλ_k t}|² dt` by quadrature on a fine partition.
pub fn energy_by_quadrature(freqs: &[f64], coeffs: &[Complex64], a: f64, b: f64) -> f64 {
    let span = freqs.last().unwrap_or(&0.0) - freqs.first().unwrap_or(&0.0);
    let pieces = ((b - a) * span.abs() * 4.0).ceil().max(1.0) as usize;
    let h = (b - a) / pieces as f64;
    let f = |t: f64| poly_at(freqs, coeffs, t).norm_sqr();
    (0..pieces)
        .map(|i| simpson(&f, a + i as f64 * h, a + (i + 1) as f64 * h, 1e-13))
        .sum()
}

/// `∫_a^b e^{2πiνx} dx` by quadrature of real and imaginary parts.
pub fn exp_integral_by_quadrature(nu: f64, a: f64, b: f64) -> Complex64 {
    let pieces = ((b - a) * nu.abs() * 4.0).ceil().max(1.0) as usize;
    let h = (b - a) / pieces as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    for i in 0..pieces {
        let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        re += simpson(&|x: f64| (2.0 * PI * nu * x).cos(), lo, hi, 1e-14);
        im += simpson(&|x: f64| (2.0 * PI * nu * x).sin(), lo, hi, 1e-14);
    }
    Complex64::new(re, im)
}

/// `#(pts ∩ [x − h, x + h])` by linear scan.
pub fn brute_count(pts: &[f64], x: f64, h: f64) -> usize {
    pts.iter().filter(|&&p| x - h <= p && p <= x + h).count()
}

/// `sup_x #(pts ∩ [x − h, x + h])`: some maximising cube has a point `p` on
/// its left edge, so count the points `q` with `0 ≤ q − p ≤ 2h`.
pub fn brute_max_count(pts: &[f64], h: f64) -> usize {
    pts.iter()
        .map(|&p| pts.iter().filter(|&&q| q >= p && q - p <= 2.0 * h).count())
        .max()
        .unwrap_or(0)
}

/// `max{j − i : λ_j − λ_i ≤ k}` over all pairs.
pub fn brute_index_gap(pts: &[f64], k: f64) -> usize {
    let mut best = 0;
    for i in 0..pts.len() {
        for j in i..pts.len() {
            if pts[j] - pts[i] <= k {
                best = best.max(j - i);
            }
        }
    }
    best
}

/// Strictly increasing points with gaps in `[min_gap, max_gap]`.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, min_gap: f64, max_gap: f64) -> Vec<f64> {
    let mut x = rng.random_range(-20.0..20.0);
    (0..n)
        .map(|_| {
            x += rng.random_range(min_gap..=max_gap);
            x
        })
        .collect()
}

pub fn random_coeffs<R: Rng>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Disjoint intervals in `[0, 1]` with random endpoints.
pub fn random_intervals<R: Rng>(rng: &mut R, max_pieces: usize) -> Vec<(f64, f64)> {
    let k = rng.random_range(1..=max_pieces);
    let mut cuts: Vec<f64> = (0..2 * k).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.chunks(2)
        .map(|c| (c[0], c[1]))
        .filter(|(a, b)| b > a)
        .collect()
}

/// Cover `ℓ_n = 4^{−(n+2)}` with 12 explicit intervals at Farey centres and a
/// geometric tail, `Z = 0`, `α = 1/2`; frequencies `{sign(n)·n³ : |n| ≤ 60}`.
pub fn quarter_instance() -> (
    espart::setmodel::CoverSpec,
    espart::pointset::PointSetWindow,
) {
    let rule = espart::examples::LengthRule::Geometric {
        c: 1.0 / 16.0,
        rho: 0.25,
    };
    let cover = espart::examples::hkw_cover(12, rule).unwrap();
    (cover, espart::io::cube_window(60).unwrap())
}
