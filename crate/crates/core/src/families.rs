//! Test sequences, test families, general position and winding profiles.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::boundary::{winding_number, CircleFunction};
use crate::extension::DiscFunction;

/// Roots closer than this to a circle make the difference "vanish" there.
pub const CIRCLE_ROOT_TOL: f64 = 1e-6;
/// Curves agreeing to this distance at a point pass through it together.
pub const TRIPLE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("need at least {need} curves, got {got}")]
    TooFewCurves { need: usize, got: usize },
    #[error("ring width must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("the parameter grid contains the base point {0}")]
    GridContainsBase(Complex64),
    #[error("no radius in the scan makes every difference zero-free")]
    NoCommonRadius,
}

fn grid_for(d: &DiscFunction) -> usize {
    (4 * (d.degree() + 1)).next_power_of_two().max(256)
}

/// Winding of `d` on `|λ| = r`, or the reason it is undefined.
fn winding_on(d: &DiscFunction, r: f64) -> Result<i64, String> {
    if d.is_zero() {
        return Err("difference vanishes identically".into());
    }
    if let Some(roots) = d.roots() {
        if let Some(z) = roots
            .iter()
            .find(|z| (z.norm() - r).abs() < CIRCLE_ROOT_TOL)
        {
            return Err(format!("difference has a zero at {z} on the circle"));
        }
    }
    let g = d.to_circle(r, grid_for(d)).map_err(|e| e.to_string())?;
    winding_number(&g).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveWinding {
    pub index: usize,
    pub winding: Option<i64>,
    /// Zeros of `φ_k − φ₀` in the open unit disc, from companion roots.
    pub zeros_inside: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestSequenceReport {
    pub windings: Vec<CurveWinding>,
    /// Largest observed winding.
    pub bound: Option<i64>,
    pub n_bound: usize,
    pub is_test: bool,
    pub first_failure: Option<usize>,
}

/// Windings of `φ_k − φ₀` on the unit circle.
pub fn validate_test_sequence(
    curves: &[DiscFunction],
    base: &DiscFunction,
    n_bound: usize,
) -> Result<TestSequenceReport, FamilyError> {
    if curves.len() < 3 {
        return Err(FamilyError::TooFewCurves {
            need: 3,
            got: curves.len(),
        });
    }
    let mut windings = Vec::with_capacity(curves.len());
    let mut first_failure = None;
    let mut bound: Option<i64> = None;
    for (k, phi) in curves.iter().enumerate() {
        let d = phi.sub(base);
        let zeros_inside = d
            .roots()
            .map(|r| r.iter().filter(|z| z.norm() < 1.0).count());
        let (winding, error) = match winding_on(&d, 1.0) {
            Ok(w) => (Some(w), None),
            Err(e) => (None, Some(e)),
        };
        if let Some(w) = winding {
            bound = Some(bound.map_or(w, |b| b.max(w)));
        }
        let bad = winding.is_none_or(|w| w < 0 || w as usize > n_bound);
        if bad && first_failure.is_none() {
            first_failure = Some(k);
        }
        windings.push(CurveWinding {
            index: k,
            winding,
            zeros_inside,
            error,
        });
    }
    Ok(TestSequenceReport {
        windings,
        bound,
        n_bound,
        is_test: first_failure.is_none(),
        first_failure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairWitness {
    pub s: usize,
    pub t: usize,
    pub radius: Option<f64>,
    pub winding: Option<i64>,
    pub radii_scanned: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFamilyReport {
    pub pairs: Vec<PairWitness>,
    pub n_bound: usize,
    pub epsilon: f64,
    pub is_test_family: bool,
}

fn scan_radii(epsilon: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| 1.0 - epsilon / 2.0 + epsilon * (i as f64 + 0.5) / count as f64)
        .collect()
}

/// For each pair `(s, t)`, the first radius in `(1 − ε/2, 1 + ε/2)` where
/// `φ_s − φ_t` is zero-free with winding at most `n_bound`.
pub fn validate_test_family(
    curves: &[DiscFunction],
    n_bound: usize,
    epsilon: f64,
) -> Result<TestFamilyReport, FamilyError> {
    if curves.len() < 2 {
        return Err(FamilyError::TooFewCurves {
            need: 2,
            got: curves.len(),
        });
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(FamilyError::InvalidEpsilon(epsilon));
    }
    let mut pairs = Vec::new();
    for s in 0..curves.len() {
        for t in s + 1..curves.len() {
            let d = curves[s].sub(&curves[t]);
            let mut found = None;
            let mut scanned = 0;
            'scan: for count in [32, 64] {
                for r in scan_radii(epsilon, count) {
                    scanned += 1;
                    if let Ok(w) = winding_on(&d, r) {
                        if w >= 0 && w as usize <= n_bound {
                            found = Some((r, w));
                            break 'scan;
                        }
                    }
                }
            }
            pairs.push(PairWitness {
                s,
                t,
                radius: found.map(|f| f.0),
                winding: found.map(|f| f.1),
                radii_scanned: scanned,
            });
        }
    }
    Ok(TestFamilyReport {
        is_test_family: pairs.iter().all(|p| p.radius.is_some()),
        pairs,
        n_bound,
        epsilon,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeVerdict {
    pub probe: Complex64,
    /// Curves whose zeros of `φ_k − φ₀` in the disc avoid the probe disc.
    pub indices: Vec<usize>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleViolation {
    pub indices: [usize; 3],
    pub lambda: Complex64,
    pub z: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralPositionReport {
    pub probe_radius: f64,
    pub probes: Vec<ProbeVerdict>,
    pub triple_violations: Vec<TripleViolation>,
}

/// Probe-wise avoidance of zero sets and enumeration of triple points.
pub fn general_position_check(
    curves: &[DiscFunction],
    base: &DiscFunction,
    probes: &[Complex64],
    probe_radius: f64,
) -> Result<GeneralPositionReport, FamilyError> {
    if curves.len() < 3 {
        return Err(FamilyError::TooFewCurves {
            need: 3,
            got: curves.len(),
        });
    }
    let zero_sets: Vec<Option<Vec<Complex64>>> = curves
        .iter()
        .map(|c| {
            c.sub(base)
                .roots()
                .map(|r| r.into_iter().filter(|z| z.norm() < 1.0).collect())
        })
        .collect();
    let probes = probes
        .iter()
        .map(|&p| {
            let indices: Vec<usize> = zero_sets
                .iter()
                .enumerate()
                .filter(|(_, z)| {
                    z.as_ref()
                        .is_some_and(|z| z.iter().all(|r| (r - p).norm() >= probe_radius))
                })
                .map(|(k, _)| k)
                .collect();
            ProbeVerdict {
                probe: p,
                passed: indices.len() >= 3,
                indices,
            }
        })
        .collect();

    let k = curves.len();
    // roots in the disc of pairwise differences; None when the curves coincide
    let mut pair_roots = vec![vec![None; k]; k];
    for s in 0..k {
        for t in s + 1..k {
            pair_roots[s][t] = curves[s]
                .sub(&curves[t])
                .roots()
                .map(|r| r.into_iter().filter(|z| z.norm() < 1.0).collect::<Vec<_>>());
        }
    }
    let mut triple_violations = Vec::new();
    for s in 0..k {
        for t in s + 1..k {
            for u in t + 1..k {
                let (pts, other) = match (&pair_roots[s][t], &pair_roots[s][u]) {
                    (Some(r), _) => (r.clone(), u),
                    (None, Some(r)) => (r.clone(), t),
                    (None, None) => (vec![Complex64::new(0.0, 0.0)], u),
                };
                let mut seen: Vec<Complex64> = Vec::new();
                for l in pts {
                    let zs = curves[s].eval(l);
                    if (curves[other].eval(l) - zs).norm() < TRIPLE_TOL
                        && seen.iter().all(|q| (q - l).norm() > 1e-7)
                    {
                        seen.push(l);
                        triple_violations.push(TripleViolation {
                            indices: [s, t, u],
                            lambda: l,
                            z: zs,
                        });
                    }
                }
            }
        }
    }
    Ok(GeneralPositionReport {
        probe_radius,
        probes,
        triple_violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingProfile {
    pub radius: f64,
    pub alphas: Vec<Complex64>,
    pub windings: Vec<i64>,
    pub constant: bool,
}

/// Windings of `φ_α − φ_{α₀}` over the grid at the first common zero-free
/// radius of the scan.
pub fn winding_profile<F>(
    family: F,
    grid: &[Complex64],
    alpha0: Complex64,
    epsilon: f64,
) -> Result<WindingProfile, FamilyError>
where
    F: Fn(Complex64) -> DiscFunction,
{
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(FamilyError::InvalidEpsilon(epsilon));
    }
    if grid.contains(&alpha0) {
        return Err(FamilyError::GridContainsBase(alpha0));
    }
    let base = family(alpha0);
    let diffs: Vec<DiscFunction> = grid.iter().map(|&a| family(a).sub(&base)).collect();
    for count in [32, 64] {
        for r in scan_radii(epsilon, count) {
            let ws: Result<Vec<i64>, String> = diffs.iter().map(|d| winding_on(d, r)).collect();
            if let Ok(windings) = ws {
                let constant = windings.windows(2).all(|w| w[0] == w[1]);
                return Ok(WindingProfile {
                    radius: r,
                    alphas: grid.to_vec(),
                    windings,
                    constant,
                });
            }
        }
    }
    Err(FamilyError::NoCommonRadius)
}

/// Sampled restriction of a curve difference to `|λ| = r`.
pub fn difference_on_circle(
    a: &DiscFunction,
    b: &DiscFunction,
    r: f64,
) -> Result<CircleFunction, crate::boundary::BoundaryError> {
    let d = a.sub(b);
    d.to_circle(r, grid_for(&d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mono(a: f64, k: usize) -> DiscFunction {
        DiscFunction::monomial(c(a, 0.0), k)
    }

    #[test]
    fn lambda_over_k_is_test() {
        let curves: Vec<_> = (1..=6).map(|k| mono(1.0 / k as f64, 1)).collect();
        let r = validate_test_sequence(&curves, &DiscFunction::zero(), 3).unwrap();
        assert!(r.is_test);
        assert!(r.windings.iter().all(|w| w.winding == Some(1)));
        assert_eq!(r.bound, Some(1));
    }

    #[test]
    fn growing_windings_are_not_test() {
        let curves: Vec<_> = (1..=12)
            .map(|k| mono((2.0f64 / 3.0).powi(k as i32), k))
            .collect();
        let r = validate_test_sequence(&curves, &DiscFunction::zero(), 10).unwrap();
        assert!(!r.is_test);
        assert_eq!(r.first_failure, Some(10));
        for (k, w) in r.windings.iter().enumerate() {
            assert_eq!(w.winding, Some(k as i64 + 1));
            assert_eq!(w.zeros_inside, Some(k + 1));
        }
    }

    #[test]
    fn dominant_quadratic() {
        let curves: Vec<_> = (1..=10)
            .map(|k| {
                let mut v = vec![c(0.0, 0.0); k.max(2) + 1];
                v[2] += 1.0 / k as f64;
                v[k] += (-(k as f64)).exp();
                DiscFunction::new(v).unwrap()
            })
            .collect();
        let r = validate_test_sequence(&curves, &DiscFunction::zero(), 4).unwrap();
        assert!(r.is_test);
        assert!(r.windings.iter().all(|w| w.winding == Some(2)));
    }

    #[test]
    fn vanishing_is_per_curve() {
        let curves = vec![
            mono(1.0, 1),
            DiscFunction::new(vec![c(-1.0, 0.0), c(1.0, 0.0)]).unwrap(),
            mono(0.5, 1),
        ];
        let r = validate_test_sequence(&curves, &DiscFunction::zero(), 3).unwrap();
        assert!(!r.is_test);
        assert_eq!(r.first_failure, Some(1));
        assert!(r.windings[1].error.is_some());
        assert_eq!(r.windings[2].winding, Some(1));
        assert!(validate_test_sequence(&curves[..2], &DiscFunction::zero(), 3).is_err());
    }

    #[test]
    fn family_examples() {
        let h = vec![
            DiscFunction::constant(c(0.1, 0.0)),
            DiscFunction::constant(c(0.3, 0.0)),
        ];
        let r = validate_test_family(&h, 2, 0.2).unwrap();
        assert!(r.is_test_family);
        assert_eq!(r.pairs[0].winding, Some(0));

        let v = vec![mono(1.0, 1), mono(1.0, 3)];
        let r = validate_test_family(&v, 2, 0.1).unwrap();
        assert!(r.is_test_family);
        let p = &r.pairs[0];
        assert_eq!(p.winding, Some(1));
        assert!(p.radius.unwrap() < 1.0);

        assert_eq!(
            validate_test_family(&v[..1], 2, 0.1),
            Err(FamilyError::TooFewCurves { need: 2, got: 1 })
        );
    }

    #[test]
    fn general_position_examples() {
        let curves: Vec<_> = (1..=5).map(|k| mono(1.0 / k as f64, 1)).collect();
        let r = general_position_check(
            &curves,
            &DiscFunction::zero(),
            &[c(0.0, 0.0), c(0.5, 0.0)],
            0.05,
        )
        .unwrap();
        assert!(!r.probes[0].passed);
        assert!(r.probes[1].passed);

        let h: Vec<_> = (1..=4)
            .map(|k| DiscFunction::constant(c(1.0 / k as f64, 0.0)))
            .collect();
        let r =
            general_position_check(&h, &DiscFunction::zero(), &[c(0.0, 0.0), c(0.3, 0.3)], 0.05)
                .unwrap();
        assert!(r.probes.iter().all(|p| p.passed));
        assert!(r.triple_violations.is_empty());

        let lines = vec![mono(0.2, 1), mono(0.5, 1), mono(0.9, 1)];
        let r = general_position_check(&lines, &DiscFunction::zero(), &[], 0.05).unwrap();
        assert_eq!(r.triple_violations.len(), 1);
        let v = &r.triple_violations[0];
        assert_eq!(v.indices, [0, 1, 2]);
        assert!(v.lambda.norm() < 1e-12 && v.z.norm() < 1e-12);
    }

    #[test]
    fn winding_profiles() {
        let grid = [c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0)];
        let zero = c(0.0, 0.0);
        let p = winding_profile(|a| DiscFunction::monomial(a, 2), &grid, zero, 0.2).unwrap();
        assert_eq!(p.windings, vec![2, 2, 2]);
        assert!(p.constant);
        let p = winding_profile(DiscFunction::constant, &grid, zero, 0.2).unwrap();
        assert_eq!(p.windings, vec![0, 0, 0]);
        let p = winding_profile(
            |a| DiscFunction::new(vec![a * -0.5, a]).unwrap(),
            &grid,
            zero,
            0.2,
        )
        .unwrap();
        assert_eq!(p.windings, vec![1, 1, 1]);
        assert_eq!(
            winding_profile(DiscFunction::constant, &[zero], zero, 0.2),
            Err(FamilyError::GridContainsBase(zero))
        );
    }
}
