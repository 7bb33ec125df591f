//! Reconstruction of the `z`-Taylor coefficients `A_n(λ)` of `f` as
//! meromorphic functions on the disc.
//!
//! Boundary values of `A_n` on `|λ| = 1` come from Cauchy integrals in `z`
//! over the ring. Their `H₋` parts are resolved into principal parts at the
//! accumulated zeros `a_j` of the curves and the pole lines `b_i`, their `H₊`
//! parts give the Taylor tail. The curve sequence supplies `a_j`, `l_j`,
//! `b_i`, the per-level Blaschke corrections `g_{n,k} = P_{n,k} f_{n,k}` and a
//! convergence check of `f_{n,k}` against `A_n`.

use num_complex::Complex64;
use serde::Serialize;

use super::verdict::classify;
use super::{restrict_along_curve, DiscFunction, ExtensionConfig, ExtensionError, RingFunction};
use crate::boundary::{grid_points, hardy_project_minus, hardy_split, CircleFunction};
use crate::poly;
use crate::rational::{
    blaschke_from_zeros, detect_rational, fit_principal_parts, RationalPart, RationalityKind, MAX_N,
};

/// Deepest supported ladder.
pub const MAX_DEPTH: usize = 24;
const U: f64 = f64::EPSILON;
const NOISE_FACTOR: f64 = 64.0;
const BOUND_SAMPLES: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct LadderConfig {
    pub extension: ExtensionConfig,
    /// Samples on each Cauchy circle in `z`.
    pub z_grid: usize,
    /// Base Cauchy radius as a fraction of `min(1, z_radius)`.
    pub inner_radius: f64,
    /// Zeros of a curve closer than this are one zero with multiplicity.
    pub zero_cluster: f64,
    /// Zeros and poles of the last three curves must agree to this distance;
    /// also the distance at which a pole of `A_n` is matched to `a_j`, `b_i`.
    pub zero_stability: f64,
    /// Replace `f` by its `H₋` part in `λ` before building the ladder.
    pub subtract_plus: bool,
}

impl Default for LadderConfig {
    fn default() -> Self {
        LadderConfig {
            extension: ExtensionConfig::default(),
            z_grid: 256,
            inner_radius: 0.9,
            zero_cluster: 1e-4,
            zero_stability: 1e-2,
            subtract_plus: false,
        }
    }
}

/// Accumulated zero `a` of the curves with multiplicity `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinchPoint {
    pub a: Complex64,
    pub l: usize,
}

/// Limit pole `b` of the restrictions with multiplicity `m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleLine {
    pub b: Complex64,
    pub m: usize,
}

/// Diagnostics of curve `k` at one ladder level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRecord {
    pub curve: usize,
    /// `sup |f_{n,k} − A_n|` on `|λ| = 1`.
    pub residual: f64,
    /// Cauchy bound for `Σ_{m≥1} A_{n+m} φ_k^m`.
    pub tail_bound: f64,
    /// Rounding allowance for `f_{n,k}`.
    pub noise: f64,
    pub converged: bool,
    /// `sup |φ_k|` on `|λ| = 1`.
    pub phi_sup: f64,
    pub blaschke_degree: usize,
    /// `sup |g_{n,k}|` on `|λ| = 1`.
    pub g_sup: f64,
    /// `C·C₁/((1+ε)^n (1 − sup|φ_k|/(1+ε)))`.
    pub g_bound: f64,
    pub g_bounded: bool,
    /// `sup |P(g_{n,k})| / sup |g_{n,k}|`.
    pub g_minus_residual: f64,
}

/// `A_n = rational + Σ tail_j λ^j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderEntry {
    pub level: usize,
    pub rational: RationalPart,
    pub tail: Vec<Complex64>,
    pub boundary_sup: f64,
    /// Estimated absolute error of the boundary values.
    pub noise: f64,
    pub curve_records: Vec<CurveRecord>,
}

impl LadderEntry {
    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.rational.eval(lambda) + poly::eval(&self.tail, lambda)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.tail.iter().all(|c| c.norm() == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientLadder {
    pub epsilon: f64,
    pub entries: Vec<LadderEntry>,
    pub zeros: Vec<PinchPoint>,
    /// Order of the pinch actually carried by the entries at each zero:
    /// the least `p ≤ l_j` with `ord_{a_j} A_n ≤ n·p` for all `n ≥ 1`.
    pub pinch_orders: Vec<usize>,
    pub pole_lines: Vec<PoleLine>,
    /// `N = Σ l_j`.
    pub n_zeros: usize,
    /// `M = Σ m_i`.
    pub n_poles: usize,
    /// `|A_n| ≤ C/(1+ε)^n` on `|λ| = 1`.
    pub c: f64,
    /// Constant of the bound `|A_n| ≤ C′/(Π|λ−a_j|^{n p_j} Π|λ−b_i|^{m_i} (1+ε)^n)`.
    pub c_prime: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundViolation {
    pub level: usize,
    pub lambda: Complex64,
    pub lhs: f64,
    pub rhs: f64,
}

impl CoefficientLadder {
    /// Assembles a ladder from explicit entries `(rational, tail)`; constants
    /// are computed from boundary suprema.
    pub fn from_parts(
        epsilon: f64,
        parts: Vec<(RationalPart, Vec<Complex64>)>,
        zeros: Vec<PinchPoint>,
        pole_lines: Vec<PoleLine>,
    ) -> Result<Self, ExtensionError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ExtensionError::Invalid(format!(
                "ring width must lie in (0, 1), got {epsilon}"
            )));
        }
        let entries = parts
            .into_iter()
            .enumerate()
            .map(|(level, (rational, tail))| LadderEntry {
                level,
                rational,
                tail,
                boundary_sup: 0.0,
                noise: 0.0,
                curve_records: Vec::new(),
            })
            .collect();
        let mut ladder = CoefficientLadder {
            epsilon,
            entries,
            zeros,
            pinch_orders: Vec::new(),
            pole_lines,
            n_zeros: 0,
            n_poles: 0,
            c: 0.0,
            c_prime: 0.0,
            c1: 1.0,
            c2: 1.0,
        };
        ladder.finalize(0.0, 1e-9);
        Ok(ladder)
    }

    pub fn depth(&self) -> usize {
        self.entries.len().saturating_sub(1)
    }

    /// Copy with level `n` multiplied by `factor` and constants kept.
    pub fn with_scaled_level(&self, n: usize, factor: f64) -> CoefficientLadder {
        let mut out = self.clone();
        if let Some(e) = out.entries.get_mut(n) {
            let f = Complex64::new(factor, 0.0);
            e.rational = e.rational.scale(f);
            for t in e.tail.iter_mut() {
                *t *= f;
            }
        }
        out
    }

    /// `Π|λ−a_j|^{n p_j} Π|λ−b_i|^{m_i}`.
    pub fn bound_factor(&self, lambda: Complex64, n: usize) -> f64 {
        let za: f64 = self
            .zeros
            .iter()
            .zip(&self.pinch_orders)
            .map(|(z, &p)| (lambda - z.a).norm().powi((n * p) as i32))
            .product();
        let pb: f64 = self
            .pole_lines
            .iter()
            .map(|p| (lambda - p.b).norm().powi(p.m as i32))
            .product();
        za * pb
    }

    /// Right-hand side of the coefficient bound at `λ`.
    pub fn bound(&self, lambda: Complex64, n: usize) -> f64 {
        self.c_prime / (self.bound_factor(lambda, n) * (1.0 + self.epsilon).powi(n as i32))
    }

    /// `Σ A_n(λ) z^n` over the computed levels.
    pub fn sum(&self, lambda: Complex64, z: Complex64) -> Complex64 {
        self.entries
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, e| acc * z + e.eval(lambda))
    }

    /// Geometric tail bound for the terms beyond the depth at `(λ, z)`.
    pub fn truncation_bound(&self, lambda: Complex64, z: Complex64) -> f64 {
        let pin: f64 = self
            .zeros
            .iter()
            .zip(&self.pinch_orders)
            .map(|(a, &p)| (lambda - a.a).norm().powi(p as i32))
            .product();
        let pb: f64 = self
            .pole_lines
            .iter()
            .map(|p| (lambda - p.b).norm().powi(p.m as i32))
            .product();
        let t = z.norm() / (pin * (1.0 + self.epsilon));
        if !(t < 1.0) {
            return f64::INFINITY;
        }
        self.c_prime / pb * t.powi(self.entries.len() as i32) / (1.0 - t)
    }

    /// Largest deviation on `|λ| = 1` between `f(λ, φ(λ))` and the resummed
    /// ladder, with the matching truncation bound.
    pub fn resum_on_curve(
        &self,
        f: &RingFunction,
        phi: &DiscFunction,
        m: usize,
    ) -> Result<(f64, f64), ExtensionError> {
        let mut err: f64 = 0.0;
        let mut bound: f64 = 0.0;
        for lambda in grid_points(1.0, m) {
            let z = phi.eval(lambda);
            let exact = f.eval(lambda, z)?;
            err = err.max((self.sum(lambda, z) - exact).norm());
            bound = bound.max(self.truncation_bound(lambda, z));
        }
        Ok((err, bound))
    }

    fn finalize(&mut self, extra_c: f64, match_tol: f64) {
        let eps = self.epsilon;
        self.n_zeros = self.zeros.iter().map(|z| z.l).sum();
        self.n_poles = self.pole_lines.iter().map(|p| p.m).sum();
        self.pinch_orders = self
            .zeros
            .iter()
            .map(|z| {
                let need = self
                    .entries
                    .iter()
                    .skip(1)
                    .map(|e| {
                        let ord: usize = e
                            .rational
                            .poles
                            .iter()
                            .filter(|p| (p.a - z.a).norm() <= match_tol)
                            .map(|p| p.m)
                            .sum();
                        ord.div_ceil(e.level)
                    })
                    .max()
                    .unwrap_or(0);
                need.min(z.l)
            })
            .collect();
        let pts = grid_points(1.0, BOUND_SAMPLES);
        let mut c: f64 = extra_c;
        let mut cp: f64 = 0.0;
        for e in self.entries.iter_mut() {
            e.boundary_sup = pts.iter().map(|&l| e.eval(l).norm()).fold(0.0, f64::max);
        }
        for e in &self.entries {
            let w = (1.0 + eps).powi(e.level as i32);
            c = c.max(e.boundary_sup * w);
            let h = pts
                .iter()
                .map(|&l| e.eval(l).norm() * self.bound_factor(l, e.level))
                .fold(0.0, f64::max);
            cp = cp.max(h * w);
        }
        self.c = c;
        self.c_prime = cp * (1.0 + 1e-6);
        self.c1 = pts
            .iter()
            .map(|&l| {
                self.pole_lines
                    .iter()
                    .map(|p| (1.0 - p.b.conj() * l).norm().powi(p.m as i32))
                    .product::<f64>()
            })
            .fold(1.0, f64::max);
        self.c2 = pts
            .iter()
            .map(|&l| {
                self.zeros
                    .iter()
                    .map(|z| (1.0 - z.a.conj() * l).norm().powi(z.l as i32))
                    .product::<f64>()
            })
            .fold(1.0, f64::max);
        for e in self.entries.iter_mut() {
            let w = (1.0 + eps).powi(e.level as i32);
            for r in e.curve_records.iter_mut() {
                let q = r.phi_sup / (1.0 + eps);
                r.g_bound = if q < 1.0 {
                    self.c * self.c1 / (w * (1.0 - q))
                } else {
                    f64::INFINITY
                };
                r.g_bounded = r.g_sup <= r.g_bound * (1.0 + 1e-9);
            }
        }
    }
}

/// Checks `|A_n(λ)|` against the coefficient bound on 64 points of
/// `|λ| = 1 − ε/4`, skipping `10⁻²`-neighbourhoods of zeros and pole lines.
pub fn verify_coefficient_bounds(ladder: &CoefficientLadder) -> Vec<BoundViolation> {
    let r = 1.0 - ladder.epsilon / 4.0;
    let mut out = Vec::new();
    let pts: Vec<Complex64> = grid_points(r, 64)
        .into_iter()
        .filter(|&l| {
            ladder.zeros.iter().all(|z| (l - z.a).norm() > 1e-2)
                && ladder.pole_lines.iter().all(|p| (l - p.b).norm() > 1e-2)
        })
        .collect();
    for e in &ladder.entries {
        for &l in &pts {
            let lhs = e.eval(l).norm();
            let rhs = ladder.bound(l, e.level);
            if !(lhs <= rhs * (1.0 + 1e-8)) {
                out.push(BoundViolation {
                    level: e.level,
                    lambda: l,
                    lhs,
                    rhs,
                });
            }
        }
    }
    out
}

struct CauchyData {
    levels: Vec<CircleFunction>,
    noise: Vec<f64>,
    /// `(ρ, sup |f| on |λ| = 1, |z| = ρ)` for every admissible circle.
    circles: Vec<(f64, f64)>,
    /// Rigorous `C` from the circle `|z| = 1 + ε` when available.
    c_rigorous: f64,
}

fn cauchy_data(
    f: &RingFunction,
    pts: &[Complex64],
    depth: usize,
    cfg: &LadderConfig,
) -> Result<CauchyData, ExtensionError> {
    let eps = f.epsilon();
    let zr = f.z_radius();
    let mut radii = vec![cfg.inner_radius * zr.min(1.0)];
    for r in [1.0 + eps, 2.0, 4.0, 8.0, 16.0] {
        if r < 0.9 * zr && r > radii[0] {
            radii.push(r);
        }
    }
    let mz = cfg.z_grid;
    if 2 * depth >= mz {
        return Err(ExtensionError::Invalid(format!(
            "z grid of {mz} points cannot resolve depth {depth}"
        )));
    }
    let zpts: Vec<Vec<Complex64>> = radii.iter().map(|&r| grid_points(r, mz)).collect();
    // coef[i][n][m]
    let mut coef: Vec<Vec<Vec<Complex64>>> = Vec::new();
    let mut circles = Vec::new();
    let mut c_rigorous: f64 = 0.0;
    for (i, &rho) in radii.iter().enumerate() {
        let mut per_level = vec![Vec::with_capacity(pts.len()); depth + 1];
        let mut sup: f64 = 0.0;
        let mut ok = true;
        for &lambda in pts {
            let mut samples = Vec::with_capacity(mz);
            for &z in &zpts[i] {
                samples.push(f.eval(lambda, z)?);
            }
            let g = CircleFunction::from_samples(samples, rho)?;
            if let Err(e) = g.check_resolved() {
                if i == 0 {
                    return Err(e.into());
                }
                ok = false;
                break;
            }
            sup = sup.max(g.sup_norm());
            for (n, lvl) in per_level.iter_mut().enumerate() {
                lvl.push(g.coeff(n as i64));
            }
        }
        if !ok {
            continue;
        }
        if (rho - (1.0 + eps)).abs() < 1e-15 {
            c_rigorous = sup;
        }
        circles.push((rho, sup));
        coef.push(per_level);
    }
    let mut levels = Vec::with_capacity(depth + 1);
    let mut noise = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        let (best, _) = circles
            .iter()
            .enumerate()
            .map(|(i, &(rho, s))| (i, s / rho.powi(n as i32)))
            .fold(
                (0, f64::INFINITY),
                |acc, x| if x.1 < acc.1 { x } else { acc },
            );
        let (rho, s) = circles[best];
        let nz = NOISE_FACTOR * U * s / rho.powi(n as i32);
        noise.push(nz);
        let mut a = CircleFunction::from_samples(coef[best][n].clone(), 1.0)?;
        if a.sup_norm() <= 100.0 * nz {
            a = CircleFunction::from_samples(vec![Complex64::new(0.0, 0.0); a.len()], 1.0)?;
        }
        a.check_resolved()?;
        levels.push(a);
    }
    Ok(CauchyData {
        levels,
        noise,
        circles,
        c_rigorous,
    })
}

fn stable(sets: &[Vec<(Complex64, usize)>], tol: f64) -> bool {
    let Some(last) = sets.last() else {
        return true;
    };
    sets.iter().all(|s| {
        s.len() == last.len()
            && s.iter()
                .all(|(a, m)| last.iter().any(|(b, n)| m == n && (a - b).norm() < tol))
    })
}

/// Builds `A₀..A_depth` from `f` and a curve sequence converging to `0`.
pub fn coefficient_ladder(
    f: &RingFunction,
    curves: &[DiscFunction],
    depth: usize,
    n_max: usize,
    cfg: &LadderConfig,
) -> Result<CoefficientLadder, ExtensionError> {
    if curves.len() < 3 {
        return Err(ExtensionError::Precondition(format!(
            "need at least 3 curves, got {}",
            curves.len()
        )));
    }
    if depth > MAX_DEPTH {
        return Err(ExtensionError::Invalid(format!(
            "depth {depth} exceeds {MAX_DEPTH}"
        )));
    }
    if n_max == 0 || n_max > MAX_N {
        return Err(ExtensionError::Invalid(format!(
            "N_max must be in 1..={MAX_N}, got {n_max}"
        )));
    }
    let f = if cfg.subtract_plus {
        f.minus_part()
    } else {
        f.clone()
    };
    let eps = f.epsilon();
    let m = cfg.extension.grid;
    let pts = grid_points(1.0, m);
    let kk = curves.len();

    let mut restr = Vec::with_capacity(kk);
    let mut curve_poles = Vec::with_capacity(kk);
    for (k, phi) in curves.iter().enumerate() {
        let g = restrict_along_curve(&f, phi, m)?;
        g.check_resolved()?;
        let v = classify(&g, eps, n_max, &cfg.extension)?;
        if !v.is_extendable() {
            return Err(ExtensionError::CurveNotExtendable { curve: k, n_max });
        }
        restr.push(g);
        curve_poles.push(v.poles());
    }

    let zero_radius = 1.0 - eps / 2.0;
    let mut zero_sets = Vec::new();
    for k in kk - 3..kk {
        let z = curves[k].zeros_in(zero_radius).ok_or_else(|| {
            ExtensionError::Precondition(format!("curve {k} vanishes identically"))
        })?;
        zero_sets.push(poly::cluster(&z, cfg.zero_cluster));
    }
    if !stable(&zero_sets, cfg.zero_stability) {
        return Err(ExtensionError::Precondition(
            "zeros of the last three curves do not stabilize".into(),
        ));
    }
    if !stable(&curve_poles[kk - 3..], cfg.zero_stability) {
        return Err(ExtensionError::Precondition(
            "poles of the last three restrictions do not stabilize".into(),
        ));
    }
    let mut zeros: Vec<PinchPoint> = zero_sets[2]
        .iter()
        .map(|&(a, l)| PinchPoint { a, l })
        .collect();
    let pole_lines: Vec<PoleLine> = curve_poles[kk - 1]
        .iter()
        .map(|&(b, m)| PoleLine { b, m })
        .collect();
    let n_total: usize = zeros.iter().map(|z| z.l).sum();
    let m_total: usize = pole_lines.iter().map(|p| p.m).sum();

    let phis: Vec<Vec<Complex64>> = curves
        .iter()
        .map(|c| pts.iter().map(|&l| c.eval(l)).collect())
        .collect();
    for (k, ph) in phis.iter().enumerate() {
        let min = ph.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        if min <= 1e-9 {
            return Err(ExtensionError::Precondition(format!(
                "curve {k} vanishes on the unit circle"
            )));
        }
    }
    let phi_sup: Vec<f64> = phis
        .iter()
        .map(|p| p.iter().map(|v| v.norm()).fold(0.0, f64::max))
        .collect();
    let curve_roots: Vec<Vec<Complex64>> = curves
        .iter()
        .map(|c| c.zeros_in(1.0).unwrap_or_default())
        .collect();

    let cd = cauchy_data(&f, &pts, depth, cfg)?;
    let extra_c = restr
        .iter()
        .map(|g| g.sup_norm())
        .fold(cd.c_rigorous, f64::max);

    // running Σ_{j<n} A_j φ_k^j and its error accumulators
    let mut partial: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); m]; kk];
    let mut absacc: Vec<Vec<f64>> = restr
        .iter()
        .map(|g| g.samples().iter().map(|v| v.norm()).collect())
        .collect();
    let mut noiseacc: Vec<Vec<f64>> = vec![vec![0.0; m]; kk];
    let mut refined = vec![false; zeros.len()];

    let mut entries = Vec::with_capacity(depth + 1);
    for n in 0..=depth {
        let a_n = &cd.levels[n];
        let noise_n = cd.noise[n];
        let split = hardy_split(a_n);
        let budget = n * n_total + m_total;
        let floor = 100.0 * noise_n;

        // allowed poles: (location, order, zero index)
        let mut allowed: Vec<(Complex64, usize, Option<usize>)> = Vec::new();
        if n > 0 {
            for (j, z) in zeros.iter().enumerate() {
                allowed.push((z.a, n * z.l, Some(j)));
            }
        }
        for p in &pole_lines {
            match allowed
                .iter_mut()
                .find(|x| (x.0 - p.b).norm() < cfg.zero_stability)
            {
                Some(x) => x.1 += p.m,
                None => allowed.push((p.b, p.m, None)),
            }
        }

        let rational = if split.minus.sup_norm() <= floor {
            RationalPart::zero()
        } else if budget == 0 {
            let mut rc = cfg.extension.rational.clone();
            rc.delta_pole = eps / 2.0;
            let count = detect_rational(&split.minus, MAX_N, &rc)
                .map(|v| v.numeric_rank)
                .unwrap_or(MAX_N + 1);
            return Err(ExtensionError::PoleBudget {
                level: n,
                count,
                budget,
            });
        } else if budget <= MAX_N {
            let mut rc = cfg.extension.rational.clone();
            rc.delta_pole = eps / 2.0;
            let mass = split.minus.minus_mass();
            rc.fit_tol = rc.fit_tol.max(floor / mass);
            let v = detect_rational(&split.minus, budget, &rc)?;
            match v.kind {
                RationalityKind::Rational(rp) => {
                    for p in &rp.poles {
                        let hit = allowed
                            .iter()
                            .position(|x| (x.0 - p.a).norm() < cfg.zero_stability);
                        let Some(i) = hit else {
                            return Err(ExtensionError::UnexpectedPole {
                                level: n,
                                pole: p.a,
                            });
                        };
                        if p.m > allowed[i].1 {
                            return Err(ExtensionError::PoleBudget {
                                level: n,
                                count: rp.degree(),
                                budget,
                            });
                        }
                        if let Some(j) = allowed[i].2 {
                            if !refined[j] {
                                zeros[j].a = p.a;
                                refined[j] = true;
                            }
                        }
                    }
                    rp
                }
                RationalityKind::NotRationalUpTo(_) => {
                    let wide = detect_rational(&split.minus, MAX_N, &rc).ok();
                    if let Some(rp) = wide.as_ref().and_then(|w| w.rational()) {
                        return Err(ExtensionError::PoleBudget {
                            level: n,
                            count: rp.degree(),
                            budget,
                        });
                    }
                    return Err(ExtensionError::NonConvergence(format!(
                        "level {n}: boundary values of A_n are not rational within {budget} poles"
                    )));
                }
            }
        } else {
            let known: Vec<(Complex64, usize)> = allowed.iter().map(|x| (x.0, x.1)).collect();
            let mass = split.minus.minus_mass();
            let (rp, res) = fit_principal_parts(&split.minus, &known, floor).ok_or_else(|| {
                ExtensionError::NonConvergence(format!("level {n}: principal-part fit failed"))
            })?;
            if res > cfg.extension.rational.fit_tol.max(floor / mass) {
                return Err(ExtensionError::NonConvergence(format!(
                    "level {n}: principal parts at the known poles leave residual {res:e}"
                )));
            }
            rp
        };

        let mut tail: Vec<Complex64> = (0..(m / 2) as i64).map(|j| split.plus.coeff(j)).collect();
        while tail.last().is_some_and(|c| c.norm() <= floor) {
            tail.pop();
        }

        let mut records = Vec::with_capacity(kk);
        for k in 0..kk {
            let ph = &phis[k];
            let fv = restr[k].samples();
            let mut fnk = Vec::with_capacity(m);
            let mut res: f64 = 0.0;
            let mut nz: f64 = 0.0;
            for i in 0..m {
                let pn = ph[i].powi(n as i32);
                let v = (fv[i] - partial[k][i]) / pn;
                res = res.max((v - a_n.samples()[i]).norm());
                nz = nz.max((NOISE_FACTOR * U * absacc[k][i] + noiseacc[k][i]) / pn.norm());
                fnk.push(v);
            }
            nz += noise_n;
            let s = phi_sup[k];
            let tail_bound = cd
                .circles
                .iter()
                .filter(|&&(rho, _)| s < rho)
                .map(|&(rho, sup)| {
                    let q = s / rho;
                    sup / rho.powi(n as i32) * q / (1.0 - q)
                })
                .fold(f64::INFINITY, f64::min);
            let converged = res <= tail_bound + 10.0 * nz;

            let mut bz: Vec<Complex64> = Vec::new();
            for &r in &curve_roots[k] {
                bz.extend(std::iter::repeat_n(r, n));
            }
            for &(b, mb) in &curve_poles[k] {
                bz.extend(std::iter::repeat_n(b, mb));
            }
            if n >= 2 {
                for z in &zeros {
                    if curve_roots[k].iter().all(|r| (r - z.a).norm() > 1e-9) {
                        bz.extend(std::iter::repeat_n(z.a, (n - 1) * z.l));
                    }
                }
            }
            for p in &pole_lines {
                if curve_poles[k].iter().all(|(b, _)| (b - p.b).norm() > 1e-9) {
                    bz.extend(std::iter::repeat_n(p.b, p.m));
                }
            }
            bz.retain(|z| z.norm() < 1.0);
            let bl = blaschke_from_zeros(&bz)?;
            let gs: Vec<Complex64> = fnk.iter().zip(&pts).map(|(v, &l)| v * bl.eval(l)).collect();
            let g = CircleFunction::from_samples(gs, 1.0)?;
            let g_sup = g.sup_norm();
            let g_minus_residual = if g_sup > 0.0 {
                hardy_project_minus(&g).sup_norm() / g_sup
            } else {
                0.0
            };
            records.push(CurveRecord {
                curve: k,
                residual: res,
                tail_bound,
                noise: nz,
                converged,
                phi_sup: s,
                blaschke_degree: bl.degree(),
                g_sup,
                g_bound: f64::INFINITY,
                g_bounded: true,
                g_minus_residual,
            });

            for i in 0..m {
                let pw = ph[i].powi(n as i32);
                partial[k][i] += a_n.samples()[i] * pw;
                absacc[k][i] += (a_n.samples()[i] * pw).norm();
                noiseacc[k][i] += noise_n * pw.norm();
            }
        }
        for r in &records[kk - 3..] {
            if !r.converged {
                return Err(ExtensionError::NonConvergence(format!(
                    "level {n}, curve {}: residual {:e} exceeds tail bound {:e} plus noise {:e}",
                    r.curve, r.residual, r.tail_bound, r.noise
                )));
            }
        }

        entries.push(LadderEntry {
            level: n,
            rational,
            tail,
            boundary_sup: 0.0,
            noise: noise_n,
            curve_records: records,
        });
    }

    let mut ladder = CoefficientLadder {
        epsilon: eps,
        entries,
        zeros,
        pinch_orders: Vec::new(),
        pole_lines,
        n_zeros: 0,
        n_poles: 0,
        c: 0.0,
        c_prime: 0.0,
        c1: 1.0,
        c2: 1.0,
    };
    ladder.finalize(extra_c, cfg.zero_stability);
    Ok(ladder)
}
