use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ExtensionError;
use crate::boundary::{grid_points, BoundaryError, CircleFunction};
use crate::poly;

/// Coefficients below this are dropped from the end of a Taylor vector.
pub const TAIL_TOL: f64 = 1e-14;
/// Relative level at which a Taylor polynomial counts as identically zero.
pub const ROOT_REL_TOL: f64 = 1e-14;

/// A holomorphic curve `z = φ(λ)` as a truncated Taylor series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscFunction {
    coeffs: Vec<Complex64>,
}

impl DiscFunction {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, ExtensionError> {
        if let Some(i) = coeffs
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(ExtensionError::Invalid(format!(
                "non-finite Taylor coefficient at index {i}"
            )));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() < TAIL_TOL) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Ok(DiscFunction { coeffs })
    }

    pub fn constant(c: Complex64) -> Self {
        DiscFunction { coeffs: vec![c] }
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    /// `c·λ^k`.
    pub fn monomial(c: Complex64, k: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        DiscFunction::new(coeffs).expect("finite coefficients")
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        poly::eval(&self.coeffs, lambda)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn sub(&self, other: &DiscFunction) -> DiscFunction {
        DiscFunction::new(poly::sub(&self.coeffs, &other.coeffs)).expect("finite")
    }

    pub fn add(&self, other: &DiscFunction) -> DiscFunction {
        let neg: Vec<Complex64> = other.coeffs.iter().map(|c| -c).collect();
        DiscFunction::new(poly::sub(&self.coeffs, &neg)).expect("finite")
    }

    pub fn scale(&self, c: Complex64) -> DiscFunction {
        DiscFunction::new(self.coeffs.iter().map(|x| x * c).collect()).expect("finite")
    }

    /// `Σ|c_k|`, an upper bound for `sup |φ|` on the closed unit disc.
    pub fn sup_bound(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Sampled sup of `|φ|` on `|λ| = r` over `m` points.
    pub fn sup_on_circle(&self, r: f64, m: usize) -> f64 {
        grid_points(r, m)
            .into_iter()
            .map(|l| self.eval(l).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_circle(&self, r: f64, m: usize) -> Result<CircleFunction, BoundaryError> {
        CircleFunction::sample(r, m, |l| self.eval(l))
    }

    /// All roots of the Taylor polynomial; `None` when `φ ≡ 0`.
    pub fn roots(&self) -> Option<Vec<Complex64>> {
        poly::roots(&self.coeffs, ROOT_REL_TOL)
    }

    /// Roots with `|λ| < radius`; `None` when `φ ≡ 0`.
    pub fn zeros_in(&self, radius: f64) -> Option<Vec<Complex64>> {
        self.roots()
            .map(|r| r.into_iter().filter(|z| z.norm() < radius).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trims_tail_and_evaluates() {
        let d = DiscFunction::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(1e-16, 0.0)]).unwrap();
        assert_eq!(d.degree(), 1);
        assert_eq!(d.eval(c(0.5, 0.0)), c(2.0, 0.0));
        assert!(DiscFunction::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn zeros_inside() {
        let d = DiscFunction::new(vec![c(-0.25, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let mut z = d.zeros_in(1.0).unwrap();
        z.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((z[0] + 0.5).norm() < 1e-14 && (z[1] - 0.5).norm() < 1e-14);
        assert!(DiscFunction::zero().zeros_in(1.0).is_none());
        let m = DiscFunction::monomial(c(0.5, 0.0), 2);
        assert_eq!(m.zeros_in(1.0).unwrap().len(), 2);
    }

    #[test]
    fn sup_bounds() {
        let d = DiscFunction::new(vec![c(0.1, 0.0), c(0.0, 0.3)]).unwrap();
        assert!((d.sup_bound() - 0.4).abs() < 1e-15);
        assert!(d.sup_on_circle(1.0, 256) <= d.sup_bound() + 1e-15);
    }
}
