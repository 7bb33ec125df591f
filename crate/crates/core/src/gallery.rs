//! Closed-form witnesses.
//!
//! - `remark1`: `e^{z/λ}`, extendable exactly along curves through `z = 0`
//!   at `λ = 0`.
//! - `example1`: `Σ_{n≥1} 3^{-4n³} Π_{j≤n}[z − (2λ/3)^j] λ^{-n²} z^n`, finite
//!   along `z = (2λ/3)^l` but with no one-parameter family of extendable
//!   restrictions.
//! - `example2`: `Σ_{l≥0} P_l(z) λ^{-(l+1)}` with `P_l` vanishing at
//!   `z_0..z_l`, whose restriction to `z = z_k` has a pole of order exactly
//!   `k` at the origin.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::boundary::{grid_points, BoundaryError, CircleFunction};
use crate::extension::{ExtensionError, RingFunction};

pub const EXAMPLE1_DEPTH: usize = 40;
pub const EXAMPLE2_DEPTH: usize = 40;
/// Sample circle used for example 2 restrictions.
pub const EXAMPLE2_RADIUS: f64 = 0.01;
const LN3: f64 = 1.098_612_288_668_109_8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GalleryError {
    #[error("λ = 0 is outside the domain")]
    LambdaZero,
    #[error("truncation error bound 10^{log10_bound:.1} is not below the required level")]
    Truncation { log10_bound: f64 },
    #[error("parameter check failed: {0}")]
    Parameter(String),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
}

// ---------------------------------------------------------------- remark 1

pub fn remark1_eval(lambda: Complex64, z: Complex64) -> Result<Complex64, GalleryError> {
    if lambda.norm() == 0.0 {
        return Err(GalleryError::LambdaZero);
    }
    Ok((z / lambda).exp())
}

pub fn remark1_ring(epsilon: f64) -> Result<RingFunction, ExtensionError> {
    Ok(RingFunction::new(epsilon, |l, z| (z / l).exp())?
        .with_z_radius(f64::INFINITY)
        .with_name("remark1"))
}

// ---------------------------------------------------------------- example 1

/// Natural log of `|term n|` and its argument; `None` when the term is zero.
fn example1_log_term(lambda: Complex64, z: Complex64, n: usize) -> Option<(f64, f64)> {
    if z.norm() == 0.0 {
        return None;
    }
    let w = lambda * (2.0 / 3.0);
    let nf = n as f64;
    let mut lg = -4.0 * nf.powi(3) * LN3 - nf * nf * lambda.norm().ln() + nf * z.norm().ln();
    let mut arg = -nf * nf * lambda.arg() + nf * z.arg();
    let mut wj = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        wj *= w;
        let f = z - wj;
        if f.norm() == 0.0 {
            return None;
        }
        lg += f.norm().ln();
        arg += f.arg();
    }
    Some((lg, arg))
}

/// `log10 |term n|`, `-∞` for a vanishing term.
pub fn example1_term_log10(lambda: Complex64, z: Complex64, n: usize) -> f64 {
    example1_log_term(lambda, z, n).map_or(f64::NEG_INFINITY, |(l, _)| l / std::f64::consts::LN_10)
}

/// Partial sum `Σ_{n=1}^{n_trunc}` as `(mantissa, ln scale)`, value
/// `mantissa·e^{scale}`; avoids overflow for tiny `λ`.
pub fn example1_partial_sum_scaled(
    lambda: Complex64,
    z: Complex64,
    n_trunc: usize,
) -> (Complex64, f64) {
    let terms: Vec<(f64, f64)> = (1..=n_trunc)
        .filter_map(|n| example1_log_term(lambda, z, n))
        .collect();
    let top = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let m = terms
        .iter()
        .map(|&(l, a)| Complex64::from_polar((l - top).exp(), a))
        .sum();
    (m, top)
}

/// Unchecked partial sum.
pub fn example1_partial_sum(lambda: Complex64, z: Complex64, n_trunc: usize) -> Complex64 {
    let (m, s) = example1_partial_sum_scaled(lambda, z, n_trunc);
    if m.norm() == 0.0 {
        return m;
    }
    m * s.exp()
}

/// `log10` of the normal-convergence bound `Σ_{n>n_trunc} 3^{-4n³-n} ε_d^{-3(n²+n)/2}`
/// for the smallest admissible `ε_d` at `(λ, z)`.
pub fn example1_tail_log10(lambda: Complex64, z: Complex64, n_trunc: usize) -> f64 {
    let r = lambda.norm();
    let mut eps = r.min(1.0 / r).min(0.333_333_333_333);
    if z.norm() > 0.0 {
        eps = eps.min(1.0 / (3.0 * z.norm()));
    }
    let li = -eps.log10();
    let l3 = 3f64.log10();
    let b = |n: f64| (-4.0 * n.powi(3) - n) * l3 + 1.5 * (n * n + n) * li;
    let start = n_trunc as f64 + 1.0;
    // terms decrease once the cubic dominates; sum the first 400
    let logs: Vec<f64> = (0..400).map(|i| b(start + i as f64)).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + logs
        .iter()
        .map(|l| 10f64.powf(l - top))
        .sum::<f64>()
        .log10()
}

/// Partial sum to `n_trunc`; errors unless the truncation bound is below
/// `1e-12`.
pub fn example1_eval(
    lambda: Complex64,
    z: Complex64,
    n_trunc: usize,
) -> Result<Complex64, GalleryError> {
    if lambda.norm() == 0.0 {
        return Err(GalleryError::LambdaZero);
    }
    let t = example1_tail_log10(lambda, z, n_trunc);
    if !(t < -12.0) {
        return Err(GalleryError::Truncation { log10_bound: t });
    }
    Ok(example1_partial_sum(lambda, z, n_trunc))
}

pub fn example1_ring(epsilon: f64) -> Result<RingFunction, ExtensionError> {
    Ok(
        RingFunction::new(epsilon, |l, z| example1_partial_sum(l, z, EXAMPLE1_DEPTH))?
            .with_z_radius(f64::INFINITY)
            .with_name("example1"),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthRow {
    pub m: i32,
    pub lambda: f64,
    pub log10_abs_f: f64,
    /// `log10(|f|·λ^p)` for `p = 1..=6`.
    pub log10_ratios: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthProbe {
    pub n0: u32,
    pub c: f64,
    /// Least `n₁ > n₀` with `(2/3)^{n₁} < c/2`.
    pub n1: u32,
    pub rows: Vec<GrowthRow>,
}

/// `|f(λ_m, c·λ_m^{n₀})|` at `λ_m = 2^{-m}` with the ratios `|f|·λ_m^p`.
pub fn example1_growth_probe(
    n0: u32,
    c: f64,
    ms: impl IntoIterator<Item = i32>,
) -> Result<GrowthProbe, GalleryError> {
    if n0 == 0 {
        return Err(GalleryError::Parameter("n0 must be at least 1".into()));
    }
    if !(c > 0.0 && c <= 1.0) {
        return Err(GalleryError::Parameter(format!(
            "c = {c} must lie in (0, 1]; no n1 > n0 with (2/3)^n1 < c/2 can serve a family with values in the unit disc"
        )));
    }
    let mut n1 = n0 + 1;
    while (2.0f64 / 3.0).powi(n1 as i32) >= c / 2.0 {
        n1 += 1;
    }
    let mut rows = Vec::new();
    for m in ms {
        let lambda = 2f64.powi(-m);
        let l = Complex64::new(lambda, 0.0);
        let z = Complex64::new(c * lambda.powi(n0 as i32), 0.0);
        let t = example1_tail_log10(l, z, EXAMPLE1_DEPTH);
        let (mant, scale) = example1_partial_sum_scaled(l, z, EXAMPLE1_DEPTH);
        let log10_abs_f = (mant.norm().ln() + scale) / std::f64::consts::LN_10;
        if !(t < log10_abs_f - 12.0) {
            return Err(GalleryError::Truncation { log10_bound: t });
        }
        let log10_ratios = (1..=6)
            .map(|p| log10_abs_f + p as f64 * lambda.log10())
            .collect();
        rows.push(GrowthRow {
            m,
            lambda,
            log10_abs_f,
            log10_ratios,
        });
    }
    Ok(GrowthProbe { n0, c, n1, rows })
}

// ---------------------------------------------------------------- example 2

/// `P_l(z) = s_l Π_{j=0}^{l} (z − z_j)` with `sup_{|z|=1} |P_l| = 1/l!`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example2Poly {
    pub roots: Vec<Complex64>,
    pub scale: f64,
}

impl Example2Poly {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.roots.iter().map(|r| z - r).product::<Complex64>() * self.scale
    }

    pub fn degree(&self) -> usize {
        self.roots.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example2 {
    pub z_seq: Vec<Complex64>,
    pub polys: Vec<Example2Poly>,
}

impl Example2 {
    /// `z_k = 1/(k+2)` and `P_0..P_{l_max}`.
    pub fn new(l_max: usize) -> Self {
        let z_seq: Vec<Complex64> = (0..=l_max + 1)
            .map(|k| Complex64::new(1.0 / (k as f64 + 2.0), 0.0))
            .collect();
        Self::with_sequence(z_seq).expect("default sequence is valid")
    }

    /// Custom nonzero sequence; builds `P_l` for `l + 1 < z_seq.len()`.
    pub fn with_sequence(z_seq: Vec<Complex64>) -> Result<Self, GalleryError> {
        if z_seq.iter().any(|z| z.norm() == 0.0) {
            return Err(GalleryError::Parameter("z_k must be nonzero".into()));
        }
        if z_seq.len() < 2 {
            return Err(GalleryError::Parameter("need at least two z_k".into()));
        }
        let circle = grid_points(1.0, 256);
        let mut fact = 1.0;
        let mut polys = Vec::new();
        for l in 0..z_seq.len() - 1 {
            if l > 0 {
                fact *= l as f64;
            }
            let roots = z_seq[..=l].to_vec();
            let monic = Example2Poly {
                roots: roots.clone(),
                scale: 1.0,
            };
            let sup = circle
                .iter()
                .map(|&z| monic.eval(z).norm())
                .fold(0.0, f64::max);
            polys.push(Example2Poly {
                roots,
                scale: 1.0 / (fact * sup),
            });
        }
        Ok(Example2 { z_seq, polys })
    }

    pub fn z(&self, k: usize) -> Complex64 {
        self.z_seq[k]
    }

    /// `Σ_{l=0}^{l_trunc} P_l(z) λ^{-(l+1)}`.
    pub fn eval(
        &self,
        lambda: Complex64,
        z: Complex64,
        l_trunc: usize,
    ) -> Result<Complex64, GalleryError> {
        if lambda.norm() == 0.0 {
            return Err(GalleryError::LambdaZero);
        }
        if l_trunc >= self.polys.len() {
            return Err(GalleryError::Parameter(format!(
                "l_trunc {l_trunc} exceeds the {} constructed polynomials",
                self.polys.len()
            )));
        }
        let w = lambda.inv();
        let mut acc = Complex64::new(0.0, 0.0);
        for p in self.polys[..=l_trunc].iter().rev() {
            acc = (acc + p.eval(z)) * w;
        }
        Ok(acc)
    }

    /// Samples of `f(·, z_k)` on `|λ| = radius` with `m` points.
    pub fn restriction(
        &self,
        k: usize,
        radius: f64,
        m: usize,
    ) -> Result<CircleFunction, GalleryError> {
        if k >= self.z_seq.len() {
            return Err(GalleryError::Parameter(format!("no z_{k} in the sequence")));
        }
        let z = self.z_seq[k];
        let l_trunc = self.polys.len() - 1;
        let pts = grid_points(radius, m);
        let mut s = Vec::with_capacity(m);
        for l in pts {
            s.push(self.eval(l, z, l_trunc)?);
        }
        Ok(CircleFunction::from_samples(s, radius)?)
    }
}

/// Restriction of the default example 2 at `z_k` on the default circle.
pub fn example2_restriction(k: usize) -> Result<CircleFunction, GalleryError> {
    Example2::new(EXAMPLE2_DEPTH).restriction(k, EXAMPLE2_RADIUS, 256)
}

pub fn example2_eval(
    lambda: Complex64,
    z: Complex64,
    l_trunc: usize,
) -> Result<Complex64, GalleryError> {
    Example2::new(l_trunc.max(1)).eval(lambda, z, l_trunc)
}

pub fn example2_ring(epsilon: f64) -> Result<RingFunction, ExtensionError> {
    let ex = Example2::new(EXAMPLE2_DEPTH);
    Ok(RingFunction::new(epsilon, move |l, z| {
        ex.eval(l, z, EXAMPLE2_DEPTH)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    })?
    .with_z_radius(4.0)
    .with_name("example2"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn remark1_examples() {
        assert_eq!(remark1_eval(c(1.0, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let v = remark1_eval(c(0.5, 0.0), c(0.1, 0.0)).unwrap();
        assert!((v - 0.2f64.exp()).norm() < 1e-15);
        assert_eq!(
            remark1_eval(c(0.0, 0.0), c(0.1, 0.0)),
            Err(GalleryError::LambdaZero)
        );
    }

    #[test]
    fn example1_vanishes_on_first_curve() {
        for &l in &[c(0.5, 0.2), c(-0.9, 0.1), c(1.3, 0.0)] {
            let z = l * (2.0 / 3.0);
            assert_eq!(example1_eval(l, z, 40).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn example1_truncates_on_third_curve() {
        let l = c(0.7, 0.0);
        let z = (l * (2.0 / 3.0)).powi(3);
        let a = example1_eval(l, z, 2).unwrap();
        let b = example1_eval(l, z, 40).unwrap();
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn example1_terms_decay() {
        let l = c(0.5, 0.0);
        let z = c(0.1, 0.0);
        assert!(example1_eval(l, z, 40).unwrap().norm().is_finite());
        let t: Vec<f64> = (3..12).map(|n| example1_term_log10(l, z, n)).collect();
        for w in t.windows(2) {
            assert!(w[1] < w[0] - 1.0);
        }
        assert_eq!(
            example1_eval(c(0.0, 0.0), z, 40),
            Err(GalleryError::LambdaZero)
        );
    }

    #[test]
    fn growth_probe_parameters() {
        assert!(matches!(
            example1_growth_probe(1, 2.0, 4..=12),
            Err(GalleryError::Parameter(_))
        ));
        assert!(example1_growth_probe(1, 0.1, std::iter::empty())
            .unwrap()
            .rows
            .is_empty());
        let p = example1_growth_probe(1, 0.1, [6]).unwrap();
        assert_eq!(p.n1, 8);
        assert_eq!(p.rows[0].log10_ratios.len(), 6);
    }

    #[test]
    fn example1_grows_eventually() {
        // super-polynomial growth of |f(λ, 0.1λ)|·λ^6 sets in near m ≈ 48
        let p = example1_growth_probe(1, 0.1, 55..=70).unwrap();
        for w in p.rows.windows(2) {
            assert!(w[1].log10_ratios[5] > w[0].log10_ratios[5]);
        }
    }

    #[test]
    fn example2_polynomials() {
        let ex = Example2::new(12);
        let circle = grid_points(1.0, 256);
        let mut fact = 1.0;
        for (l, p) in ex.polys.iter().enumerate() {
            if l > 0 {
                fact *= l as f64;
            }
            assert_eq!(p.degree(), l + 1);
            for j in 0..=l {
                assert_eq!(p.eval(ex.z(j)), c(0.0, 0.0));
            }
            assert!(p.eval(c(0.0, 0.0)).norm() > 0.0);
            let sup = circle.iter().map(|&z| p.eval(z).norm()).fold(0.0, f64::max);
            assert!((sup * fact - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn example2_restriction_at_zero_vanishes() {
        let g = example2_restriction(0).unwrap();
        assert!(g.sup_norm() == 0.0);
    }

    #[test]
    fn example2_off_sequence_does_not_truncate() {
        let ex = Example2::new(30);
        let z = c(0.3, 0.1);
        let diff = grid_points(0.5, 64)
            .into_iter()
            .map(|l| (ex.eval(l, z, 10).unwrap() - ex.eval(l, z, 20).unwrap()).norm())
            .fold(0.0, f64::max);
        assert!(diff > 0.0);
    }
}
