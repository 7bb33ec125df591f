use num_complex::Complex64;
use serde::Serialize;

use super::ladder::{CoefficientLadder, PinchPoint, PoleLine};
use super::ExtensionError;
use crate::boundary::grid_points;

/// Safety margin applied to the pinched-domain radius before evaluation.
pub const DOMAIN_MARGIN: f64 = 0.9;
const POLE_LINE_EXCLUSION: f64 = 1e-6;

/// `{|z| < c·Π|λ − a_j|^{l_j}} ∖ ⋃ {λ = b_i}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinchDescriptor {
    pub pinches: Vec<PinchPoint>,
    pub pole_lines: Vec<PoleLine>,
    pub c: f64,
    /// Ladder levels `n` whose ratio `A_{n+1}/A_n` fixed `c`.
    pub levels_used: Vec<usize>,
}

impl PinchDescriptor {
    /// `c·Π|λ − a_j|^{l_j}`.
    pub fn radius_at(&self, lambda: Complex64) -> f64 {
        self.c
            * self
                .pinches
                .iter()
                .map(|p| (lambda - p.a).norm().powi(p.l as i32))
                .product::<f64>()
    }

    pub fn contains(&self, lambda: Complex64, z: Complex64) -> bool {
        lambda.norm() < 1.0
            && z.norm() < self.radius_at(lambda)
            && self
                .pole_lines
                .iter()
                .all(|p| (lambda - p.b).norm() > POLE_LINE_EXCLUSION)
    }
}

/// Pinches from the ladder and the largest `c` in a halving search with
/// `|A_{n+1}|·c·Π|λ−a_j|^{l_j} ≤ |A_n|/2` on a test grid for the top three
/// level pairs.
pub fn pinch_estimate(ladder: &CoefficientLadder) -> Result<PinchDescriptor, ExtensionError> {
    if ladder.entries.len() < 3 {
        return Err(ExtensionError::EmptyLadder);
    }
    let pinches: Vec<PinchPoint> = ladder
        .zeros
        .iter()
        .zip(&ladder.pinch_orders)
        .filter(|(_, &p)| p > 0)
        .map(|(z, &p)| PinchPoint { a: z.a, l: p })
        .collect();
    let eps = ladder.epsilon;
    let mut pts = Vec::new();
    for r in [0.25, 0.5, 0.75, 1.0 - eps / 4.0] {
        pts.extend(grid_points(r, 64).into_iter().filter(|&l| {
            ladder.zeros.iter().all(|z| (l - z.a).norm() > 1e-2)
                && ladder.pole_lines.iter().all(|p| (l - p.b).norm() > 1e-2)
        }));
    }
    let d = ladder.depth();
    let pairs: Vec<usize> = (d.saturating_sub(3)..d).collect();
    let vals: Vec<Vec<Complex64>> = ladder
        .entries
        .iter()
        .map(|e| pts.iter().map(|&l| e.eval(l)).collect())
        .collect();
    let mut worst: f64 = 0.0;
    let mut used = Vec::new();
    for &n in &pairs {
        if ladder.entries[n].is_zero() {
            continue;
        }
        let scale = vals[n].iter().map(|v| v.norm()).fold(0.0, f64::max);
        used.push(n);
        for (i, &l) in pts.iter().enumerate() {
            let lo = vals[n][i].norm();
            if lo <= 1e-12 * scale {
                continue;
            }
            let pin: f64 = pinches
                .iter()
                .map(|p| (l - p.a).norm().powi(p.l as i32))
                .product();
            let ratio = vals[n + 1][i].norm() * pin / lo;
            if ratio.is_finite() {
                worst = worst.max(ratio);
            }
        }
    }
    let mut c = 1.0;
    for _ in 0..200 {
        if c * worst <= 0.5 {
            break;
        }
        c *= 0.5;
    }
    Ok(PinchDescriptor {
        pinches,
        pole_lines: ladder.pole_lines.clone(),
        c,
        levels_used: used,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtensionValue {
    pub value: Complex64,
    pub truncation_bound: f64,
}

/// `Σ_{n ≤ depth} A_n(λ) z^n` inside the pinched domain, with the geometric
/// truncation bound of the coefficient estimate.
pub fn evaluate_extension(
    ladder: &CoefficientLadder,
    desc: &PinchDescriptor,
    lambda: Complex64,
    z: Complex64,
    tol: f64,
) -> Result<ExtensionValue, ExtensionError> {
    if !(lambda.norm() < 1.0) {
        return Err(ExtensionError::OutsideDomain {
            lambda,
            z,
            limit: 0.0,
        });
    }
    if let Some(p) = desc
        .pole_lines
        .iter()
        .find(|p| (lambda - p.b).norm() <= POLE_LINE_EXCLUSION)
    {
        return Err(ExtensionError::OnPoleLine { lambda, pole: p.b });
    }
    let limit = DOMAIN_MARGIN * desc.radius_at(lambda);
    if !(z.norm() < limit) {
        return Err(ExtensionError::OutsideDomain { lambda, z, limit });
    }
    let value = ladder.sum(lambda, z);
    let bound = ladder.truncation_bound(lambda, z);
    if !(bound <= tol) {
        return Err(ExtensionError::TruncationTooLarge { bound, tol });
    }
    Ok(ExtensionValue {
        value,
        truncation_bound: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{Pole, RationalPart};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // 2^{-n} λ^{-2n}/(λ − b) in partial fractions
    fn synthetic(depth: usize, b: f64) -> CoefficientLadder {
        let mut parts = Vec::new();
        for n in 0..=depth {
            let p = 2 * n;
            let s = 0.5f64.powi(n as i32);
            let mut poles = vec![Pole {
                a: c(b, 0.0),
                m: 1,
                c: vec![c(s * b.powi(-(p as i32)), 0.0)],
            }];
            if p > 0 {
                // coefficient of λ^{-k} is −b^{-(p−k+1)}
                let cs = (0..p)
                    .map(|i| {
                        let k = p - i;
                        c(-s * b.powi(-((p - k + 1) as i32)), 0.0)
                    })
                    .collect();
                poles.push(Pole {
                    a: c(0.0, 0.0),
                    m: p,
                    c: cs,
                });
            }
            parts.push((RationalPart::new(poles).unwrap(), Vec::new()));
        }
        CoefficientLadder::from_parts(
            0.25,
            parts,
            vec![PinchPoint {
                a: c(0.0, 0.0),
                l: 2,
            }],
            vec![PoleLine { b: c(b, 0.0), m: 1 }],
        )
        .unwrap()
    }

    #[test]
    fn synthetic_partial_fractions_are_right() {
        let lad = synthetic(3, 0.4);
        let l = c(0.3, 0.5);
        for (n, e) in lad.entries.iter().enumerate() {
            let want = 0.5f64.powi(n as i32) * l.powi(-2 * n as i32) / (l - 0.4);
            assert!((e.eval(l) - want).norm() < 1e-10 * want.norm());
        }
    }

    #[test]
    fn synthetic_pinch_and_pole_line() {
        let lad = synthetic(4, 0.4);
        assert_eq!(lad.pinch_orders, vec![2]);
        assert!(verify_ok(&lad));
        let d = pinch_estimate(&lad).unwrap();
        assert_eq!(d.pinches.len(), 1);
        assert_eq!(d.pinches[0].l, 2);
        assert!(d.pinches[0].a.norm() < 1e-12);
        assert_eq!(d.pole_lines.len(), 1);
        assert!((d.pole_lines[0].b - 0.4).norm() < 1e-12);
        assert!(d.c > 0.0 && d.c <= 1.0);
        let e = evaluate_extension(&lad, &d, c(0.4, 0.0), c(0.0, 0.0), 1.0);
        assert!(matches!(e, Err(ExtensionError::OnPoleLine { .. })));
    }

    fn verify_ok(l: &CoefficientLadder) -> bool {
        super::super::verify_coefficient_bounds(l).is_empty()
    }

    #[test]
    fn no_poles_means_full_bidisc() {
        let parts = vec![
            (RationalPart::zero(), vec![c(1.0, 0.0)]),
            (RationalPart::zero(), vec![c(0.5, 0.0)]),
            (RationalPart::zero(), vec![c(0.0, 0.0), c(0.25, 0.0)]),
        ];
        let lad = CoefficientLadder::from_parts(0.25, parts, vec![], vec![]).unwrap();
        let d = pinch_estimate(&lad).unwrap();
        assert!(d.pinches.is_empty());
        assert_eq!(d.c, 1.0);
        let v = evaluate_extension(&lad, &d, c(0.2, 0.1), c(0.0, 0.0), 1.0).unwrap();
        assert!((v.value - 1.0).norm() < 1e-15);
    }

    #[test]
    fn shallow_ladder_rejected() {
        let parts = vec![(RationalPart::zero(), vec![c(1.0, 0.0)])];
        let lad = CoefficientLadder::from_parts(0.25, parts, vec![], vec![]).unwrap();
        assert_eq!(pinch_estimate(&lad), Err(ExtensionError::EmptyLadder));
    }

    #[test]
    fn membership_is_monotone_in_z() {
        let d = PinchDescriptor {
            pinches: vec![PinchPoint {
                a: c(0.1, 0.0),
                l: 2,
            }],
            pole_lines: vec![],
            c: 0.5,
            levels_used: vec![],
        };
        let l = c(0.5, 0.2);
        let r = d.radius_at(l);
        assert!(d.contains(l, c(0.99 * r, 0.0)));
        assert!(!d.contains(l, c(1.01 * r, 0.0)));
    }
}
