//! Polynomials in ascending coefficient order and their roots.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Horner evaluation of `Σ p_k x^k`.
pub fn eval(p: &[Complex64], x: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
}

pub fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

/// Coefficient-wise difference, padded to the longer input.
pub fn sub(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|k| p.get(k).copied().unwrap_or(ZERO) - q.get(k).copied().unwrap_or(ZERO))
        .collect()
}

pub fn mul(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn scale_of(p: &[Complex64]) -> f64 {
    p.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Drops trailing coefficients with modulus `<= rel·max|p|`.
pub fn trim(p: &[Complex64], rel: f64) -> Vec<Complex64> {
    let s = scale_of(p);
    let mut v = p.to_vec();
    while v.last().is_some_and(|c| c.norm() <= rel * s) {
        v.pop();
    }
    v
}

/// Roots of a polynomial, or `None` when it vanishes identically (all
/// coefficients below `rel` relative to the largest, or all exactly zero).
///
/// Exact low-order zero coefficients are split off as roots at the origin,
/// the rest come from the eigenvalues of the companion matrix followed by a
/// guarded Newton polish.
pub fn roots(p: &[Complex64], rel: f64) -> Option<Vec<Complex64>> {
    let s = scale_of(p);
    if s == 0.0 {
        return None;
    }
    let p = trim(p, rel);
    if p.is_empty() {
        return None;
    }
    let lead_zeros = p.iter().take_while(|c| c.norm() <= rel * s).count();
    let q = &p[lead_zeros..];
    let mut out = vec![ZERO; lead_zeros];
    let deg = q.len() - 1;
    if deg == 0 {
        return Some(out);
    }
    let lead = q[deg];
    let mut comp = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -q[i] / lead;
    }
    let dq = derivative(q);
    for e in eigenvalues(comp)? {
        out.push(polish(q, &dq, e));
    }
    Some(out)
}

/// Eigenvalues from a complex Schur form. Shifted copies of the matrix are
/// tried when the QR iteration stalls, as it does on cyclic matrices.
pub fn eigenvalues(m: DMatrix<Complex64>) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    let scale = m
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for shift in [0.0, 0.3172, -0.577, 1.234] {
        let sigma = Complex64::new(shift, 0.5 * shift) * scale;
        let shifted = &m + DMatrix::<Complex64>::identity(n, n) * sigma;
        if let Some(s) = Schur::try_new(shifted, f64::EPSILON, 100 * n.max(10)) {
            let (_, t) = s.unpack();
            return Some((0..n).map(|i| t[(i, i)] - sigma).collect());
        }
    }
    None
}

fn polish(p: &[Complex64], dp: &[Complex64], mut x: Complex64) -> Complex64 {
    let mut fx = eval(p, x).norm();
    for _ in 0..4 {
        let d = eval(dp, x);
        if d.norm() == 0.0 {
            break;
        }
        let y = x - eval(p, x) / d;
        let fy = eval(p, y).norm();
        if !(fy < fx) {
            break;
        }
        x = y;
        fx = fy;
    }
    x
}

/// Greedy clustering: points closer than `radius` to the running mean of a
/// cluster join it. Output is `(center, count)` ordered by modulus, then
/// argument.
pub fn cluster(points: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                a.arg()
                    .partial_cmp(&b.arg())
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    let mut groups: Vec<(Complex64, usize)> = Vec::new();
    for x in sorted {
        match groups
            .iter_mut()
            .find(|(sum, n)| (sum / *n as f64 - x).norm() < radius)
        {
            Some(g) => {
                g.0 += x;
                g.1 += 1;
            }
            None => groups.push((x, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(sum, n)| (sum / n as f64, n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_known_polynomial() {
        // (x - 0.5)(x + 0.25i)(x - 2)
        let p = mul(
            &mul(&[c(-0.5, 0.0), c(1.0, 0.0)], &[c(0.0, 0.25), c(1.0, 0.0)]),
            &[c(-2.0, 0.0), c(1.0, 0.0)],
        );
        let mut r = roots(&p, 1e-14).unwrap();
        r.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        assert!((r[0] - c(0.0, -0.25)).norm() < 1e-13);
        assert!((r[1] - c(0.5, 0.0)).norm() < 1e-13);
        assert!((r[2] - c(2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn zeros_at_origin_are_exact() {
        let p = [ZERO, ZERO, c(0.5, 0.0)];
        assert_eq!(roots(&p, 1e-14).unwrap(), vec![ZERO, ZERO]);
        assert!(roots(&[ZERO, ZERO], 1e-14).is_none());
        assert_eq!(roots(&[c(3.0, 0.0)], 1e-14).unwrap(), vec![]);
    }

    #[test]
    fn clustering_merges_close_points() {
        let pts = [c(0.3, 0.0), c(0.3 + 1e-6, 0.0), c(-0.2, 0.1)];
        let g = cluster(&pts, 1e-4);
        assert_eq!(g.len(), 2);
        assert_eq!(
            g.iter().find(|(z, _)| (z - 0.3).norm() < 1e-5).unwrap().1,
            2
        );
    }
}
