//! Rational boundary functions: detection, principal parts, Blaschke products.

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary::CircleFunction;
use crate::poly;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest supported pole budget.
pub const MAX_N: usize = 16;
/// Default exclusion radius around poles for evaluation.
pub const POLE_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RationalError {
    #[error("N_max must be in 1..={MAX_N}, got {0}")]
    InvalidNMax(usize),
    #[error("input has nonnegative modes of size {mass:e}; it is not in H-")]
    NotHardyMinus { mass: f64 },
    #[error("grid of {grid} samples is too small for a Hankel matrix of size {size}")]
    GridTooSmall { grid: usize, size: usize },
    #[error("recovered pole {pole} has modulus {modulus} >= {limit}; coefficients are inconsistent with poles inside the disc")]
    PoleOutsideDisc {
        pole: Complex64,
        modulus: f64,
        limit: f64,
    },
    #[error("evaluation at {lambda} lies within {radius:e} of the pole {pole}")]
    NearPole {
        lambda: Complex64,
        pole: Complex64,
        radius: f64,
    },
    #[error("invalid pole record: {0}")]
    InvalidPole(String),
    #[error("Blaschke zero {0} is not inside the unit disc")]
    ZeroOutsideDisc(Complex64),
}

/// A pole `a` of order `m`; `c[k]` multiplies `(λ − a)^{k − m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub a: Complex64,
    pub m: usize,
    pub c: Vec<Complex64>,
}

impl Pole {
    /// Coefficient of `(λ − a)^{-k}` for `k = 1..=m`.
    pub fn principal(&self, k: usize) -> Complex64 {
        if k == 0 || k > self.m {
            return ZERO;
        }
        self.c[self.m - k]
    }

    fn validate(&self) -> Result<(), RationalError> {
        if self.m == 0 {
            return Err(RationalError::InvalidPole("multiplicity 0".into()));
        }
        if self.c.len() != self.m {
            return Err(RationalError::InvalidPole(format!(
                "pole at {} has m = {} but {} coefficients",
                self.a,
                self.m,
                self.c.len()
            )));
        }
        Ok(())
    }
}

/// Finite sum of principal parts, zero at infinity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RationalPart {
    pub poles: Vec<Pole>,
}

impl RationalPart {
    pub fn new(poles: Vec<Pole>) -> Result<Self, RationalError> {
        for p in &poles {
            p.validate()?;
        }
        Ok(RationalPart { poles })
    }

    pub fn zero() -> Self {
        RationalPart::default()
    }

    pub fn is_zero(&self) -> bool {
        self.poles.is_empty()
    }

    /// Total degree `Σ m_j`.
    pub fn degree(&self) -> usize {
        self.poles.iter().map(|p| p.m).sum()
    }

    /// Unchecked evaluation; infinite or NaN at a pole.
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        let mut s = ZERO;
        for p in &self.poles {
            let w = (lambda - p.a).inv();
            // Horner in w over k = m..1
            let mut acc = ZERO;
            for k in (1..=p.m).rev() {
                acc = (acc + p.principal(k)) * w;
            }
            s += acc;
        }
        s
    }

    /// Coefficient of `λ^{-n}` (n ≥ 1) in the expansion about infinity.
    pub fn laurent_at_infinity(&self, n: usize) -> Complex64 {
        let mut s = ZERO;
        for p in &self.poles {
            for k in 1..=p.m {
                s += p.principal(k) * basis_value(p.a, k, n);
            }
        }
        s
    }

    pub fn scale(&self, c: Complex64) -> RationalPart {
        RationalPart {
            poles: self
                .poles
                .iter()
                .map(|p| Pole {
                    a: p.a,
                    m: p.m,
                    c: p.c.iter().map(|x| x * c).collect(),
                })
                .collect(),
        }
    }

    /// Distinct poles with multiplicities.
    pub fn pole_set(&self) -> Vec<(Complex64, usize)> {
        self.poles.iter().map(|p| (p.a, p.m)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("rational part serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, RationalError> {
        let rp: RationalPart =
            serde_json::from_str(s).map_err(|e| RationalError::InvalidPole(e.to_string()))?;
        RationalPart::new(rp.poles)
    }
}

/// Checked evaluation with the default exclusion radius.
pub fn evaluate_rational(rp: &RationalPart, lambda: Complex64) -> Result<Complex64, RationalError> {
    evaluate_rational_with(rp, lambda, POLE_EXCLUSION)
}

pub fn evaluate_rational_with(
    rp: &RationalPart,
    lambda: Complex64,
    exclusion: f64,
) -> Result<Complex64, RationalError> {
    for p in &rp.poles {
        if (lambda - p.a).norm() <= exclusion {
            return Err(RationalError::NearPole {
                lambda,
                pole: p.a,
                radius: exclusion,
            });
        }
    }
    Ok(rp.eval(lambda))
}

/// `Π (λ − b)/(1 − conj(b)·λ)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    pub zeros: Vec<Complex64>,
}

impl BlaschkeProduct {
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.zeros.iter().fold(Complex64::new(1.0, 0.0), |acc, &b| {
            acc * (lambda - b) / (1.0 - b.conj() * lambda)
        })
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }
}

pub fn blaschke_from_zeros(zeros: &[Complex64]) -> Result<BlaschkeProduct, RationalError> {
    if let Some(&z) = zeros.iter().find(|z| !(z.norm() < 1.0)) {
        return Err(RationalError::ZeroOutsideDisc(z));
    }
    Ok(BlaschkeProduct {
        zeros: zeros.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalConfig {
    /// `σ_{k+1}/σ_1` below this is numerically zero.
    pub rank_tol: f64,
    /// `σ_{k+1}/σ_k` must also drop below this for rank `k` to be declared.
    pub gap_tol: f64,
    /// Merge radii tried in order when grouping pencil eigenvalues.
    pub cluster_radii: Vec<f64>,
    /// Relative sup residual the fitted principal parts must reach.
    pub fit_tol: f64,
    /// Poles must satisfy `|a| < r·(1 − δ_pole)` on the sample circle `|λ| = r`.
    pub delta_pole: f64,
    /// Admissible nonnegative-mode mass.
    pub minus_tol: f64,
    /// Largest accepted ratio between the summed moduli of the fitted terms
    /// and the data; beyond it the fit is split poles cancelling each other.
    pub max_cancellation: f64,
}

impl Default for RationalConfig {
    fn default() -> Self {
        RationalConfig {
            rank_tol: 1e-8,
            gap_tol: 1e-6,
            cluster_radii: vec![1e-4, 1e-3, 1e-2, 5e-2, 1e-1],
            fit_tol: 1e-9,
            delta_pole: 0.0,
            minus_tol: 1e-10,
            max_cancellation: 1e4,
        }
    }
}

impl RationalConfig {
    /// Minimum accepted `σ_r/σ_{r+1}`.
    pub fn gap_threshold(&self) -> f64 {
        1.0 / self.gap_tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum RationalityKind {
    Rational(RationalPart),
    NotRationalUpTo(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalityVerdict {
    pub kind: RationalityKind,
    pub numeric_rank: usize,
    /// `σ_r/σ_{r+1}` at the declared rank, or the largest consecutive ratio
    /// seen when no rank was declared.
    pub gap: f64,
    /// Singular values of the Hankel matrix relative to the largest.
    pub singular_values: Vec<f64>,
    /// Relative sup residual of the principal-part fit (0 when not fitted).
    pub fit_residual: f64,
}

impl RationalityVerdict {
    pub fn rational(&self) -> Option<&RationalPart> {
        match &self.kind {
            RationalityKind::Rational(rp) => Some(rp),
            RationalityKind::NotRationalUpTo(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.rational().is_some()
    }
}

/// `C(n−1, k−1)·a^{n−k}`: coefficient of `λ^{-n}` in `(λ − a)^{-k}`.
fn basis_value(a: Complex64, k: usize, n: usize) -> Complex64 {
    if n < k {
        return ZERO;
    }
    let mut v = Complex64::new(1.0, 0.0);
    for j in k..n {
        v *= a * (j as f64 / (j + 1 - k) as f64);
    }
    v
}

/// Column of `basis_value(a, k, n)` for `n = 1..=len`.
fn basis_column(a: Complex64, k: usize, len: usize) -> Vec<Complex64> {
    let mut col = vec![ZERO; len];
    if k > len {
        return col;
    }
    let mut v = Complex64::new(1.0, 0.0);
    col[k - 1] = v;
    for n in k..len {
        v *= a * (n as f64 / (n + 1 - k) as f64);
        col[n] = v;
    }
    col
}

fn lstsq(a: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Option<DVector<Complex64>> {
    let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
    if norms.iter().any(|n| !n.is_finite()) {
        return None;
    }
    let mut scaled = a.clone();
    for (j, &n) in norms.iter().enumerate() {
        if n > 0.0 {
            scaled.column_mut(j).unscale_mut(n);
        }
    }
    let svd = SVD::new(scaled, true, true);
    let smax = svd.singular_values.max();
    let x = svd.solve(b, smax * 1e-13).ok()?;
    let x = DVector::from_iterator(
        x.len(),
        x.iter()
            .zip(&norms)
            .map(|(v, &n)| if n > 0.0 { v / n } else { ZERO }),
    );
    x.iter()
        .all(|v| v.re.is_finite() && v.im.is_finite())
        .then_some(x)
}

struct Fit {
    poles: Vec<Complex64>,
    mults: Vec<usize>,
    // coefficient of (μ − μ_j)^{-k}, k = 1..=m_j
    coefs: Vec<Vec<Complex64>>,
    residual: f64,
    /// `max_n Σ_j |A_{nj} x_j|`.
    magnitude: f64,
}

fn design(d_len: usize, poles: &[Complex64], mults: &[usize]) -> DMatrix<Complex64> {
    let p: usize = mults.iter().sum();
    let mut a = DMatrix::<Complex64>::zeros(d_len, p);
    let mut col = 0;
    for (&mu, &m) in poles.iter().zip(mults) {
        for k in 1..=m {
            let c = basis_column(mu, k, d_len);
            for (i, v) in c.into_iter().enumerate() {
                a[(i, col)] = v;
            }
            col += 1;
        }
    }
    a
}

fn fit(d: &DVector<Complex64>, poles: &[Complex64], mults: &[usize]) -> Option<Fit> {
    let a = design(d.len(), poles, mults);
    let x = lstsq(&a, d)?;
    let r = &a * &x - d;
    let residual = r.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let magnitude = a
        .row_iter()
        .map(|row| {
            row.iter()
                .zip(x.iter())
                .map(|(a, x)| (a * x).norm())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    let mut coefs = Vec::with_capacity(poles.len());
    let mut idx = 0;
    for &m in mults {
        coefs.push(x.rows(idx, m).iter().copied().collect());
        idx += m;
    }
    Some(Fit {
        poles: poles.to_vec(),
        mults: mults.to_vec(),
        coefs,
        residual,
        magnitude,
    })
}

/// Gauss-Newton on pole locations with coefficients eliminated by linear
/// least squares at every step.
fn refine(d: &DVector<Complex64>, poles: &[Complex64], mults: &[usize]) -> Option<Fit> {
    let len = d.len();
    let mut cur = fit(d, poles, mults)?;
    for _ in 0..20 {
        let a = design(len, &cur.poles, mults);
        let x: Vec<Complex64> = cur.coefs.iter().flatten().copied().collect();
        let r = &a * DVector::from_vec(x) - d;
        let p = a.ncols();
        let mut full = DMatrix::<Complex64>::zeros(len, p + cur.poles.len());
        full.columns_mut(0, p).copy_from(&a);
        for (j, (&mu, &m)) in cur.poles.iter().zip(mults).enumerate() {
            let mut jac = vec![ZERO; len];
            for k in 1..=m {
                let e = cur.coefs[j][k - 1] * k as f64;
                for (n, v) in basis_column(mu, k + 1, len).into_iter().enumerate() {
                    jac[n] += e * v;
                }
            }
            for (n, v) in jac.into_iter().enumerate() {
                full[(n, p + j)] = v;
            }
        }
        let step = lstsq(&full, &(-r))?;
        let dmu: Vec<Complex64> = step.rows(p, cur.poles.len()).iter().copied().collect();
        let moved: Vec<Complex64> = cur.poles.iter().zip(&dmu).map(|(a, s)| a + s).collect();
        if moved
            .iter()
            .any(|m| !m.re.is_finite() || !m.im.is_finite() || m.norm() > 2.0)
        {
            return None;
        }
        let next = fit(d, &moved, mults)?;
        let small = dmu.iter().map(|s| s.norm()).fold(0.0, f64::max) < 1e-15;
        if next.residual <= cur.residual || small {
            cur = next;
        } else {
            break;
        }
        if small {
            break;
        }
    }
    Some(cur)
}

fn sorted_svd(h: DMatrix<Complex64>) -> (DMatrix<Complex64>, Vec<f64>, DMatrix<Complex64>) {
    let svd = SVD::new(h, true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap_or(std::cmp::Ordering::Equal));
    let su = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let sv = DMatrix::from_fn(order.len(), vt.ncols(), |r, c| vt[(order[r], c)]);
    let ss = order.iter().map(|&i| s[i]).collect();
    (su, ss, sv)
}

fn to_lambda(fit: &Fit, radius: f64) -> RationalPart {
    let mut poles = Vec::with_capacity(fit.poles.len());
    for ((mu, m), coefs) in fit.poles.iter().zip(&fit.mults).zip(&fit.coefs) {
        let c = (0..*m)
            .map(|i| {
                let k = m - i;
                coefs[k - 1] * radius.powi(k as i32)
            })
            .collect();
        poles.push(Pole {
            a: mu * radius,
            m: *m,
            c,
        });
    }
    poles.sort_by(|p, q| {
        p.a.norm()
            .partial_cmp(&q.a.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                p.a.arg()
                    .partial_cmp(&q.a.arg())
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    RationalPart { poles }
}

fn negative_modes(psi: &CircleFunction) -> DVector<Complex64> {
    let len = psi.len() / 2 - 1;
    DVector::from_iterator(len, (1..=len).map(|n| psi.normalized_coeff(-(n as i64))))
}

/// Least-squares principal parts at prescribed poles `(a, max order)`.
///
/// Returns the fitted part and the relative sup residual of the negative
/// modes of `psi`. Trailing highest-order coefficients of modulus at most
/// `drop_below` are removed. `None` if the system cannot be solved.
pub fn fit_principal_parts(
    psi: &CircleFunction,
    poles: &[(Complex64, usize)],
    drop_below: f64,
) -> Option<(RationalPart, f64)> {
    let d = negative_modes(psi);
    let nrm = d.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if nrm == 0.0 {
        return Some((RationalPart::zero(), 0.0));
    }
    let r = psi.radius();
    let mus: Vec<Complex64> = poles.iter().map(|p| p.0 / r).collect();
    let mults: Vec<usize> = poles.iter().map(|p| p.1).collect();
    let f = fit(&d, &mus, &mults)?;
    let mut rp = to_lambda(&f, r);
    for p in rp.poles.iter_mut() {
        while p.m > 0 && p.c[0].norm() <= drop_below {
            p.c.remove(0);
            p.m -= 1;
        }
    }
    rp.poles.retain(|p| p.m > 0);
    Some((rp, f.residual / nrm))
}

/// Kronecker-style detection of a rational function in `H₋` with at most
/// `n_max` poles, from the negative modes of `psi`.
///
/// Works in the normalized variable `μ = λ/r` of the sample circle; poles and
/// coefficients are mapped back to `λ`.
pub fn detect_rational(
    psi: &CircleFunction,
    n_max: usize,
    cfg: &RationalConfig,
) -> Result<RationalityVerdict, RationalError> {
    if n_max == 0 || n_max > MAX_N {
        return Err(RationalError::InvalidNMax(n_max));
    }
    let plus = psi.plus_mass();
    if plus > cfg.minus_tol * psi.minus_mass().max(1.0) {
        return Err(RationalError::NotHardyMinus { mass: plus });
    }
    let size = n_max + 4;
    let len = psi.len() / 2 - 1;
    if len < 2 * size {
        return Err(RationalError::GridTooSmall {
            grid: psi.len(),
            size,
        });
    }
    let d = negative_modes(psi);
    let nrm = d.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if nrm == 0.0 {
        return Ok(RationalityVerdict {
            kind: RationalityKind::Rational(RationalPart::zero()),
            numeric_rank: 0,
            gap: f64::INFINITY,
            singular_values: vec![0.0; size],
            fit_residual: 0.0,
        });
    }
    let h0 = DMatrix::from_fn(size, size, |i, j| d[i + j]);
    let h1 = DMatrix::from_fn(size, size, |i, j| d[i + j + 1]);
    let (u, s, vt) = sorted_svd(h0);
    let rel: Vec<f64> = s.iter().map(|x| x / s[0]).collect();
    // the SVD returns exact zeros below roundoff; floor them so a gap cannot
    // open inside the noise
    let floor = s[0] * f64::EPSILON;
    let sf: Vec<f64> = s.iter().map(|&x| x.max(floor)).collect();
    // every k passing the rank rule is a candidate; an ill-conditioned
    // high-order pole can open an earlier gap whose fit then fails
    let candidates: Vec<usize> = (1..size)
        .filter(|&k| rel[k] < cfg.rank_tol && sf[k] / sf[k - 1] < cfg.gap_tol)
        .collect();
    let not_rational = |rank: usize| {
        let gap = (1..size).map(|k| sf[k - 1] / sf[k]).fold(0.0, f64::max);
        RationalityVerdict {
            kind: RationalityKind::NotRationalUpTo(n_max),
            numeric_rank: rank,
            gap,
            singular_values: rel.clone(),
            fit_residual: 0.0,
        }
    };
    match candidates.first() {
        None => return Ok(not_rational(size)),
        Some(&r) if r > n_max => return Ok(not_rational(r)),
        _ => {}
    }

    let mut found: Option<(usize, f64, Fit)> = None;
    for &r in candidates.iter().filter(|&&r| r <= n_max) {
        let ur = u.columns(0, r);
        let vr = vt.rows(0, r).adjoint();
        let mut t = ur.adjoint() * &h1 * vr;
        for i in 0..r {
            let inv = 1.0 / s[i];
            t.row_mut(i).scale_mut(inv);
        }
        let Some(eig) = poly::eigenvalues(t) else {
            continue;
        };
        let mut best: Option<Fit> = None;
        for &radius in &cfg.cluster_radii {
            let groups = poly::cluster(&eig, radius);
            let poles: Vec<Complex64> = groups.iter().map(|g| g.0).collect();
            let mults: Vec<usize> = groups.iter().map(|g| g.1).collect();
            if best.as_ref().is_some_and(|b| b.poles.len() <= poles.len()) {
                continue;
            }
            if let Some(f) = refine(&d, &poles, &mults) {
                if f.residual <= cfg.fit_tol * nrm && f.magnitude <= cfg.max_cancellation * nrm {
                    best = Some(f);
                }
            }
        }
        if let Some(f) = best {
            found = Some((r, sf[r - 1] / sf[r], f));
            break;
        }
    }
    let first = candidates[0];
    let first_gap = sf[first - 1] / sf[first];
    // a finitely supported tail is a pole at the origin of order equal to its
    // support, even when a small top coefficient hides it from the SVD
    let support = d
        .iter()
        .rposition(|v| v.norm() > cfg.fit_tol * nrm)
        .map_or(0, |i| i + 1);
    let found = found.or_else(|| {
        if support < first || support > n_max {
            return None;
        }
        let f = fit(&d, &[ZERO], &[support])?;
        (f.residual <= cfg.fit_tol * nrm).then_some((support, first_gap, f))
    });
    let Some((r, gap, fit)) = found else {
        let mut v = not_rational(first);
        v.gap = first_gap;
        return Ok(v);
    };

    let radius = psi.radius();
    let limit = radius * (1.0 - cfg.delta_pole);
    if let Some(mu) = fit.poles.iter().find(|mu| (*mu * radius).norm() >= limit) {
        let a = mu * radius;
        return Err(RationalError::PoleOutsideDisc {
            pole: a,
            modulus: a.norm(),
            limit,
        });
    }
    Ok(RationalityVerdict {
        kind: RationalityKind::Rational(to_lambda(&fit, radius)),
        numeric_rank: r,
        gap,
        singular_values: rel,
        fit_residual: fit.residual / nrm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::hardy_project_minus;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> RationalConfig {
        RationalConfig::default()
    }

    #[test]
    fn basis_matches_binomial_expansion() {
        // (λ − a)^{-2} = Σ_{n≥2} (n−1) a^{n−2} λ^{-n}
        let a = c(0.3, -0.2);
        for n in 1..10 {
            let want = if n < 2 {
                ZERO
            } else {
                a.powi(n as i32 - 2) * (n - 1) as f64
            };
            assert!((basis_value(a, 2, n) - want).norm() < 1e-15);
        }
        let col = basis_column(a, 3, 12);
        for n in 1..=12 {
            assert!((col[n - 1] - basis_value(a, 3, n)).norm() < 1e-15);
        }
    }

    #[test]
    fn single_pole_at_origin() {
        let psi = CircleFunction::sample(1.0, 256, |l| 4.0 / l).unwrap();
        let v = detect_rational(&psi, 10, &cfg()).unwrap();
        let rp = v.rational().unwrap();
        assert_eq!(rp.poles.len(), 1);
        assert!(rp.poles[0].a.norm() < 1e-10);
        assert_eq!(rp.poles[0].m, 1);
        assert!((rp.poles[0].c[0] - 4.0).norm() < 1e-10);
        assert_eq!(v.numeric_rank, 1);
        assert!(v.gap >= cfg().gap_threshold());
    }

    #[test]
    fn simple_pole_off_origin() {
        let psi = CircleFunction::sample(1.0, 256, |l| 1.0 / (l - 0.3)).unwrap();
        let v = detect_rational(&psi, 10, &cfg()).unwrap();
        let rp = v.rational().unwrap();
        assert_eq!(rp.degree(), 1);
        assert!((rp.poles[0].a - 0.3).norm() < 1e-8);
    }

    #[test]
    fn exponential_tail_is_not_rational() {
        let psi = CircleFunction::sample(1.0, 256, |l| (1.0 / l).exp() - 1.0).unwrap();
        let v = detect_rational(&psi, 10, &cfg()).unwrap();
        assert_eq!(v.kind, RationalityKind::NotRationalUpTo(10));
        assert!(v.numeric_rank > 10);
    }

    #[test]
    fn high_order_pole_with_small_top_coefficient() {
        // σ_5/σ_1 of the Hankel matrix sits at roundoff
        let phi = c(0.25, -0.25);
        let psi = CircleFunction::sample(1.0, 256, |l| {
            c(2.0, -3.0) * l.powi(-4) - phi.powi(6) * l.powi(-5)
                + c(-1.0, 2.0) * phi.powi(4) * l.powi(-3)
        })
        .unwrap();
        let v = detect_rational(&psi, 10, &cfg()).unwrap();
        let rp = v.rational().unwrap();
        assert_eq!(rp.poles.len(), 1);
        assert_eq!(rp.poles[0].m, 5);
        assert!((rp.poles[0].c[0] + phi.powi(6)).norm() < 1e-12);
        assert!(v.gap >= cfg().gap_threshold());
    }

    #[test]
    fn rejects_plus_modes_and_bad_budget() {
        let g = CircleFunction::sample(1.0, 64, |l| l + 1.0 / l).unwrap();
        assert!(matches!(
            detect_rational(&g, 4, &cfg()),
            Err(RationalError::NotHardyMinus { .. })
        ));
        let psi = hardy_project_minus(&g);
        assert_eq!(
            detect_rational(&psi, 17, &cfg()),
            Err(RationalError::InvalidNMax(17))
        );
        assert!(matches!(
            detect_rational(&psi, 16, &cfg()),
            Err(RationalError::GridTooSmall { .. })
        ));
    }

    #[test]
    fn pole_on_circle_is_an_error() {
        // Hankel data of 1/(λ − 0.999): rank one, pole beyond 1 − δ
        let psi = CircleFunction::sample(1.0, 256, |l| 1.0 / (l - 0.999)).unwrap();
        let psi = hardy_project_minus(&psi);
        let cfg = RationalConfig {
            delta_pole: 0.05,
            ..cfg()
        };
        assert!(matches!(
            detect_rational(&psi, 4, &cfg),
            Err(RationalError::PoleOutsideDisc { .. })
        ));
    }

    #[test]
    fn evaluation_examples() {
        let rp = RationalPart::new(vec![Pole {
            a: ZERO,
            m: 1,
            c: vec![c(1.0, 0.0)],
        }])
        .unwrap();
        assert_abs_diff_eq!(evaluate_rational(&rp, c(0.5, 0.0)).unwrap().re, 2.0);
        assert_eq!(
            evaluate_rational(&RationalPart::zero(), c(0.1, 0.7)).unwrap(),
            ZERO
        );
        let rp = RationalPart::new(vec![Pole {
            a: c(0.3, 0.0),
            m: 2,
            c: vec![c(1.0, 0.0), ZERO],
        }])
        .unwrap();
        let v = evaluate_rational(&rp, c(0.8, 0.0)).unwrap();
        assert!((v - 4.0).norm() < 1e-14);
        assert!(matches!(
            evaluate_rational(&rp, c(0.3 + 1e-7, 0.0)),
            Err(RationalError::NearPole { .. })
        ));
    }

    #[test]
    fn laurent_at_infinity_matches_geometric_series() {
        let rp = RationalPart::new(vec![Pole {
            a: c(0.3, 0.0),
            m: 1,
            c: vec![c(1.0, 0.0)],
        }])
        .unwrap();
        for n in 1..10 {
            let want = 0.3f64.powi(n as i32 - 1);
            assert!((rp.laurent_at_infinity(n) - want).norm() < 1e-15);
        }
    }

    #[test]
    fn blaschke_examples() {
        let b = blaschke_from_zeros(&[]).unwrap();
        assert_eq!(b.eval(c(0.3, 0.2)), c(1.0, 0.0));
        let b = blaschke_from_zeros(&[ZERO, ZERO]).unwrap();
        let l = c(0.4, -0.3);
        assert!((b.eval(l) - l * l).norm() < 1e-15);
        let b = blaschke_from_zeros(&[c(0.5, 0.0), c(0.0, -0.3)]).unwrap();
        for i in 0..64 {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 64.0;
            assert!((b.eval(Complex64::from_polar(1.0, t)).norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(b.eval(c(0.5, 0.0)), ZERO);
        assert_eq!(
            blaschke_from_zeros(&[c(1.0, 0.0)]),
            Err(RationalError::ZeroOutsideDisc(c(1.0, 0.0)))
        );
    }

    #[test]
    fn json_shape() {
        let rp = RationalPart::new(vec![Pole {
            a: c(0.3, -0.1),
            m: 2,
            c: vec![c(1.0, 0.0), c(0.0, 2.0)],
        }])
        .unwrap();
        let s = rp.to_json();
        assert_eq!(
            s,
            r#"{"poles":[{"a":[0.3,-0.1],"m":2,"c":[[1.0,0.0],[0.0,2.0]]}]}"#
        );
        assert_eq!(RationalPart::from_json(&s).unwrap(), rp);
        assert!(RationalPart::from_json(r#"{"poles":[{"a":[0,0],"m":2,"c":[[1,0]]}]}"#).is_err());
    }

    #[test]
    fn off_unit_radius_detection_maps_back() {
        // pole of order 3 at 0 sampled on |λ| = 0.01
        let psi = CircleFunction::sample(0.01, 256, |l| 1e-6 * l.powi(-3) + 2e-3 / l).unwrap();
        let v = detect_rational(&psi, 10, &cfg()).unwrap();
        let rp = v.rational().unwrap();
        assert_eq!(rp.pole_set().len(), 1);
        assert_eq!(rp.poles[0].m, 3);
        assert!((rp.poles[0].principal(3) - 1e-6).norm() < 1e-15);
        assert!((rp.poles[0].principal(1) - 2e-3).norm() < 1e-12);
    }
}
