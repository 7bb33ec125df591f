use num_complex::Complex64;
use serde::Serialize;

use super::{DiscFunction, ExtensionConfig, ExtensionError, RingFunction};
use crate::boundary::{grid_points, hardy_project_minus, CircleFunction};
use crate::rational::{detect_rational, RationalPart, RationalityKind};

/// Samples `λ ↦ f(λ, φ(λ))` on `|λ| = 1`.
pub fn restrict_along_curve(
    f: &RingFunction,
    phi: &DiscFunction,
    m: usize,
) -> Result<CircleFunction, ExtensionError> {
    let mut samples = Vec::with_capacity(m);
    for lambda in grid_points(1.0, m) {
        samples.push(f.eval(lambda, phi.eval(lambda))?);
    }
    Ok(CircleFunction::from_samples(samples, 1.0)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum VerdictKind {
    Holomorphic,
    Meromorphic(RationalPart),
    NotExtendable(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionVerdict {
    pub kind: VerdictKind,
    /// Sup norm of `P(F(φ))`.
    pub residual: f64,
    pub holo_tolerance: f64,
    pub numeric_rank: Option<usize>,
    pub gap: Option<f64>,
}

impl ExtensionVerdict {
    pub fn is_extendable(&self) -> bool {
        !matches!(self.kind, VerdictKind::NotExtendable(_))
    }

    /// Principal parts of the extension; empty when holomorphic.
    pub fn rational(&self) -> Option<RationalPart> {
        match &self.kind {
            VerdictKind::Holomorphic => Some(RationalPart::zero()),
            VerdictKind::Meromorphic(rp) => Some(rp.clone()),
            VerdictKind::NotExtendable(_) => None,
        }
    }

    pub fn poles(&self) -> Vec<(Complex64, usize)> {
        self.rational().map(|r| r.pole_set()).unwrap_or_default()
    }
}

/// Classifies `F(φ)` by its `H₋` part `P(F(φ))`.
pub fn extension_test(
    f: &RingFunction,
    phi: &DiscFunction,
    n_max: usize,
    cfg: &ExtensionConfig,
) -> Result<ExtensionVerdict, ExtensionError> {
    let g = restrict_along_curve(f, phi, cfg.grid)?;
    g.check_resolved()?;
    classify(&g, f.epsilon(), n_max, cfg)
}

pub(crate) fn classify(
    g: &CircleFunction,
    epsilon: f64,
    n_max: usize,
    cfg: &ExtensionConfig,
) -> Result<ExtensionVerdict, ExtensionError> {
    let psi = hardy_project_minus(g);
    let residual = psi.sup_norm();
    if residual < cfg.holo_tolerance {
        return Ok(ExtensionVerdict {
            kind: VerdictKind::Holomorphic,
            residual,
            holo_tolerance: cfg.holo_tolerance,
            numeric_rank: None,
            gap: None,
        });
    }
    let mut rc = cfg.rational.clone();
    rc.delta_pole = epsilon / 2.0;
    let v = detect_rational(&psi, n_max, &rc)?;
    let kind = match v.kind {
        RationalityKind::Rational(rp) => VerdictKind::Meromorphic(rp),
        RationalityKind::NotRationalUpTo(n) => VerdictKind::NotExtendable(n),
    };
    Ok(ExtensionVerdict {
        kind,
        residual,
        holo_tolerance: cfg.holo_tolerance,
        numeric_rank: Some(v.numeric_rank),
        gap: Some(v.gap),
    })
}
