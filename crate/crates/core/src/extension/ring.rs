use std::fmt;
use std::io::Read;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ExtensionError;
use crate::boundary::{grid_points, CircleFunction, DEFAULT_GRID};

type Evaluator = Arc<dyn Fn(Complex64, Complex64) -> Complex64 + Send + Sync>;

/// One term `a·λ^l·z^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaurentTerm {
    pub n: u32,
    pub l: i32,
    pub a: Complex64,
}

/// `Σ a_{n,l} λ^l z^n`, polynomial in `z`, Laurent polynomial in `λ`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BivariateLaurent {
    terms: Vec<LaurentTerm>,
}

impl BivariateLaurent {
    /// Merges repeated `(n, l)` and drops exact zeros; terms are sorted by
    /// `(n, l)`.
    pub fn new(terms: impl IntoIterator<Item = LaurentTerm>) -> Self {
        let mut v: Vec<LaurentTerm> = Vec::new();
        for t in terms {
            match v.iter_mut().find(|u| u.n == t.n && u.l == t.l) {
                Some(u) => u.a += t.a,
                None => v.push(t),
            }
        }
        v.retain(|t| t.a != Complex64::new(0.0, 0.0));
        v.sort_by_key(|t| (t.n, t.l));
        BivariateLaurent { terms: v }
    }

    pub fn terms(&self) -> &[LaurentTerm] {
        &self.terms
    }

    pub fn eval(&self, lambda: Complex64, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.a * lambda.powi(t.l) * z.powu(t.n))
            .sum()
    }

    /// Reads CSV rows `n,l,re,im` (header required).
    pub fn from_csv<R: Read>(r: R) -> Result<Self, ExtensionError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(r);
        let headers = rdr
            .headers()
            .map_err(|e| ExtensionError::Invalid(format!("laurent csv: {e}")))?
            .clone();
        let want = ["n", "l", "re", "im"];
        if headers.iter().collect::<Vec<_>>() != want {
            return Err(ExtensionError::Invalid(format!(
                "laurent csv header must be n,l,re,im, got {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut terms = Vec::new();
        for rec in rdr.deserialize::<(u32, i32, f64, f64)>() {
            let (n, l, re, im) =
                rec.map_err(|e| ExtensionError::Invalid(format!("laurent csv: {e}")))?;
            terms.push(LaurentTerm {
                n,
                l,
                a: Complex64::new(re, im),
            });
        }
        Ok(BivariateLaurent::new(terms))
    }
}

/// A function on `{1 − ε < |λ| < 1 + ε} × {|z| < z_radius}`.
///
/// `z_radius` is 1 for the plain ring; functions known to be holomorphic in
/// a larger `z`-disc may declare it, which lets restrictions along curves
/// touching `|z| = 1` and wider Cauchy circles be used.
#[derive(Clone)]
pub struct RingFunction {
    evaluator: Evaluator,
    epsilon: f64,
    z_radius: f64,
    exact: Option<BivariateLaurent>,
    name: String,
}

impl fmt::Debug for RingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingFunction")
            .field("name", &self.name)
            .field("epsilon", &self.epsilon)
            .field("z_radius", &self.z_radius)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

fn check_epsilon(epsilon: f64) -> Result<(), ExtensionError> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(ExtensionError::Invalid(format!(
            "ring width must lie in (0, 1), got {epsilon}"
        )))
    }
}

impl RingFunction {
    pub fn new<F>(epsilon: f64, f: F) -> Result<Self, ExtensionError>
    where
        F: Fn(Complex64, Complex64) -> Complex64 + Send + Sync + 'static,
    {
        check_epsilon(epsilon)?;
        Ok(RingFunction {
            evaluator: Arc::new(f),
            epsilon,
            z_radius: 1.0,
            exact: None,
            name: "custom".into(),
        })
    }

    /// A Laurent polynomial; entire in `z`.
    pub fn from_laurent(epsilon: f64, p: BivariateLaurent) -> Result<Self, ExtensionError> {
        check_epsilon(epsilon)?;
        let q = p.clone();
        Ok(RingFunction {
            evaluator: Arc::new(move |l, z| q.eval(l, z)),
            epsilon,
            z_radius: f64::INFINITY,
            exact: Some(p),
            name: "laurent".into(),
        })
    }

    pub fn with_z_radius(mut self, r: f64) -> Self {
        self.z_radius = r;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Attaches an exact form; see [`RingFunction::consistency_error`].
    pub fn with_exact(mut self, p: BivariateLaurent) -> Self {
        self.exact = Some(p);
        self
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn z_radius(&self) -> f64 {
        self.z_radius
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exact(&self) -> Option<&BivariateLaurent> {
        self.exact.as_ref()
    }

    /// Domain-checked evaluation.
    pub fn eval(&self, lambda: Complex64, z: Complex64) -> Result<Complex64, ExtensionError> {
        let r = lambda.norm();
        let slack = 1e-12;
        if !(r > 1.0 - self.epsilon - slack && r < 1.0 + self.epsilon + slack) {
            return Err(ExtensionError::Domain {
                lambda,
                z,
                reason: format!("|λ| = {r} outside the annulus of width {}", self.epsilon),
            });
        }
        if !(z.norm() < self.z_radius) {
            return Err(ExtensionError::Domain {
                lambda,
                z,
                reason: format!("|z| = {} not below {}", z.norm(), self.z_radius),
            });
        }
        let v = (self.evaluator)(lambda, z);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(ExtensionError::Domain {
                lambda,
                z,
                reason: "evaluator returned a non-finite value".into(),
            });
        }
        Ok(v)
    }

    /// Raw evaluator, no checks.
    pub fn eval_unchecked(&self, lambda: Complex64, z: Complex64) -> Complex64 {
        (self.evaluator)(lambda, z)
    }

    /// Largest deviation between evaluator and exact form over `count`
    /// quasi-random ring points; `None` without an exact form.
    pub fn consistency_error(&self, count: usize) -> Option<f64> {
        let p = self.exact.as_ref()?;
        let zr = self.z_radius.min(1.0);
        let mut worst: f64 = 0.0;
        for i in 0..count {
            // additive recurrences with irrational steps
            let u = ((i as f64 + 0.5) * 0.618_033_988_749_894_9).fract();
            let v = ((i as f64 + 0.5) * 0.414_213_562_373_095_1).fract();
            let w = ((i as f64 + 0.5) * 0.732_050_807_568_877_2).fract();
            let x = ((i as f64 + 0.5) * 0.236_067_977_499_789_7).fract();
            let r = 1.0 - self.epsilon + 2.0 * self.epsilon * (0.02 + 0.96 * u);
            let lambda = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * v);
            let z = Complex64::from_polar(0.98 * zr * w.sqrt(), 2.0 * std::f64::consts::PI * x);
            let a = self.eval_unchecked(lambda, z);
            let b = p.eval(lambda, z);
            worst = worst.max((a - b).norm() / b.norm().max(1.0));
        }
        Some(worst)
    }

    /// `f⁻(λ, z)`: the part of `f(·, z)` with negative Laurent modes on
    /// `|λ| = 1`, continued to the ring.
    pub fn minus_part(&self) -> RingFunction {
        let inner = self.clone();
        let pts = grid_points(1.0, DEFAULT_GRID);
        let eval = move |lambda: Complex64, z: Complex64| {
            let samples: Vec<Complex64> = pts.iter().map(|&m| inner.eval_unchecked(m, z)).collect();
            match CircleFunction::from_samples(samples, 1.0) {
                Ok(g) => {
                    let w = lambda.inv();
                    // modes at roundoff level would be amplified by |λ|^{-n}
                    let half = (g.bandwidth(1e-14) as i64 + 1).min((g.len() / 2) as i64);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for n in (1..half).rev() {
                        acc = (acc + g.normalized_coeff(-n)) * w;
                    }
                    acc
                }
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            }
        };
        RingFunction {
            evaluator: Arc::new(eval),
            epsilon: self.epsilon,
            z_radius: self.z_radius,
            exact: None,
            name: format!("{}-minus", self.name),
        }
    }
}
