use std::fmt::Write as _;
use std::fs;

use num_complex::Complex64;
use pinchext_core::boundary::BoundaryError;
use pinchext_core::families::{
    general_position_check, validate_test_family, validate_test_sequence, FamilyError,
};
use pinchext_core::gallery::{self, example1_growth_probe, example2_restriction, GalleryError};
use pinchext_core::{
    coefficient_ladder, detect_rational, extension_test, pinch_estimate, verify_coefficient_bounds,
    BivariateLaurent, DiscFunction, ExtensionConfig, ExtensionError, LadderConfig, RationalConfig,
    RationalError, RingFunction, VerdictKind,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{AnalysisConfig, CurveSpec, FunctionSpec};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_NEGATIVE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn boundary_code(e: &BoundaryError) -> u8 {
    match e {
        BoundaryError::NonFinite(_)
        | BoundaryError::Bandwidth { .. }
        | BoundaryError::VanishingOnCircle { .. }
        | BoundaryError::WindingNotConverged { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

impl From<ExtensionError> for Failure {
    fn from(e: ExtensionError) -> Self {
        let code = match &e {
            ExtensionError::Domain { .. }
            | ExtensionError::Invalid(_)
            | ExtensionError::EmptyLadder => EXIT_USAGE,
            ExtensionError::Boundary(b) => boundary_code(b),
            ExtensionError::Rational(RationalError::InvalidNMax(_)) => EXIT_USAGE,
            ExtensionError::Precondition(_) | ExtensionError::CurveNotExtendable { .. } => {
                EXIT_NEGATIVE
            }
            _ => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Self {
        let code = match e {
            FamilyError::NoCommonRadius => EXIT_NEGATIVE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GalleryError> for Failure {
    fn from(e: GalleryError) -> Self {
        let code = match e {
            GalleryError::Parameter(_) | GalleryError::LambdaZero => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<RationalError> for Failure {
    fn from(e: RationalError) -> Self {
        ExtensionError::Rational(e).into()
    }
}

/// JSON report, optional CSV and whether the analysis came out negative.
pub struct Report {
    pub json: Value,
    pub csv: Option<String>,
    pub negative: bool,
}

fn ring(cfg: &AnalysisConfig, spec: &FunctionSpec) -> Result<RingFunction, Failure> {
    let eps = cfg.epsilon;
    let f = match spec {
        FunctionSpec::Gallery(n) => match n.as_str() {
            "remark1" => gallery::remark1_ring(eps)?,
            "example1" => gallery::example1_ring(eps)?,
            "example2" => gallery::example2_ring(eps)?,
            _ => return Err(Failure::usage(format!("unknown gallery function {n:?}"))),
        },
        FunctionSpec::Laurent(path) => {
            let file = fs::File::open(path)
                .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let p = BivariateLaurent::from_csv(file).map_err(|e| Failure::usage(e.to_string()))?;
            RingFunction::from_laurent(eps, p)?.with_name(spec.label())
        }
    };
    Ok(match cfg.z_radius {
        Some(r) => f.with_z_radius(r),
        None => f,
    })
}

fn function(cfg: &AnalysisConfig) -> Result<(RingFunction, String), Failure> {
    let spec = cfg
        .function
        .as_ref()
        .ok_or_else(|| Failure::usage("config has no [function] section"))?;
    Ok((ring(cfg, spec)?, spec.label()))
}

fn curves(cfg: &AnalysisConfig) -> Result<Vec<DiscFunction>, Failure> {
    if cfg.curves.is_empty() {
        return Err(Failure::usage("config lists no curves"));
    }
    Ok(cfg.curves.iter().map(|c| c.curve.clone()).collect())
}

fn extension_config(cfg: &AnalysisConfig) -> ExtensionConfig {
    ExtensionConfig {
        grid: cfg.grid,
        holo_tolerance: cfg.holo_tolerance,
        rational: RationalConfig::default(),
    }
}

fn kind_name(k: &VerdictKind) -> &'static str {
    match k {
        VerdictKind::Holomorphic => "holomorphic",
        VerdictKind::Meromorphic(_) => "meromorphic",
        VerdictKind::NotExtendable(_) => "not-extendable",
    }
}

fn verdict_rows(
    f: &RingFunction,
    specs: &[CurveSpec],
    cfg: &AnalysisConfig,
) -> Result<(Vec<Value>, String, bool), Failure> {
    let ecfg = extension_config(cfg);
    let results: Vec<_> = specs
        .par_iter()
        .map(|s| extension_test(f, &s.curve, cfg.n_max, &ecfg))
        .collect();
    let mut rows = Vec::new();
    let mut csv = String::from("index,curve,verdict,residual,poles\n");
    let mut negative = false;
    for (i, (s, r)) in specs.iter().zip(results).enumerate() {
        let v = r?;
        negative |= !v.is_extendable();
        let poles: Vec<Value> = v
            .poles()
            .iter()
            .map(|(a, m)| json!({"a": a, "m": m}))
            .collect();
        let _ = writeln!(
            csv,
            "{i},\"{}\",{},{:.16e},{}",
            s.label,
            kind_name(&v.kind),
            v.residual,
            poles.len()
        );
        rows.push(json!({
            "index": i,
            "curve": s.label,
            "coefficients": s.curve.coeffs(),
            "verdict": kind_name(&v.kind),
            "residual": v.residual,
            "poles": poles,
            "detail": v,
        }));
    }
    Ok((rows, csv, negative))
}

pub fn cmd_test(cfg: &AnalysisConfig) -> Result<Report, Failure> {
    let (f, name) = function(cfg)?;
    curves(cfg)?;
    let (rows, csv, negative) = verdict_rows(&f, &cfg.curves, cfg)?;
    Ok(Report {
        json: json!({
            "command": "test",
            "function": name,
            "settings": cfg.summary(),
            "curves": rows,
            "all_extendable": !negative,
        }),
        csv: Some(csv),
        negative,
    })
}

pub fn cmd_ladder(cfg: &AnalysisConfig) -> Result<Report, Failure> {
    let (f, name) = function(cfg)?;
    let cs = curves(cfg)?;
    let lcfg = LadderConfig {
        extension: extension_config(cfg),
        z_grid: cfg.z_grid,
        inner_radius: cfg.inner_radius,
        zero_cluster: cfg.zero_cluster,
        zero_stability: cfg.zero_stability,
        subtract_plus: cfg.subtract_plus,
    };
    let ladder = coefficient_ladder(&f, &cs, cfg.depth, cfg.n_max, &lcfg)?;
    let pinch = pinch_estimate(&ladder)?;
    let violations = verify_coefficient_bounds(&ladder);
    let dir = Complex64::from_polar(1.0, cfg.ray_angle);
    let mut csv = String::from("n,r,abs_An\n");
    for e in &ladder.entries {
        for i in 1..=cfg.ray_points {
            let r = cfg.ray_max * i as f64 / cfg.ray_points as f64;
            let _ = writeln!(
                csv,
                "{},{:.16e},{:.16e}",
                e.level,
                r,
                e.eval(dir * r).norm()
            );
        }
    }
    Ok(Report {
        json: json!({
            "command": "ladder",
            "function": name,
            "settings": cfg.summary(),
            "ladder": ladder,
            "pinch": pinch,
            "bound_violations": violations,
        }),
        csv: Some(csv),
        negative: false,
    })
}

pub fn cmd_validate(cfg: &AnalysisConfig) -> Result<Report, Failure> {
    let cs = curves(cfg)?;
    let seq = validate_test_sequence(&cs, &cfg.base, cfg.n_bound)?;
    let probes = if cfg.probes.is_empty() {
        vec![Complex64::new(0.0, 0.0)]
    } else {
        cfg.probes.clone()
    };
    let gp = general_position_check(&cs, &cfg.base, &probes, cfg.probe_radius)?;
    let family = if cfg.family {
        Some(validate_test_family(&cs, cfg.n_bound, cfg.epsilon)?)
    } else {
        None
    };
    let negative = !seq.is_test || family.as_ref().is_some_and(|f| !f.is_test_family);
    let mut csv = String::from("index,winding,zeros_inside\n");
    for w in &seq.windings {
        let opt = |v: Option<String>| v.unwrap_or_default();
        let _ = writeln!(
            csv,
            "{},{},{}",
            w.index,
            opt(w.winding.map(|x| x.to_string())),
            opt(w.zeros_inside.map(|x| x.to_string()))
        );
    }
    Ok(Report {
        json: json!({
            "command": "validate",
            "settings": cfg.summary(),
            "is_test": seq.is_test,
            "test_sequence": seq,
            "general_position": gp,
            "test_family": family,
        }),
        csv: Some(csv),
        negative,
    })
}

fn default_remark1_curves() -> Vec<CurveSpec> {
    let mut v: Vec<CurveSpec> = (1..=5)
        .map(|k| CurveSpec {
            label: format!("lambda_over_k[{k}]"),
            curve: DiscFunction::monomial(Complex64::new(1.0 / k as f64, 0.0), 1),
        })
        .collect();
    v.push(CurveSpec {
        label: "0.2".into(),
        curve: DiscFunction::constant(Complex64::new(0.2, 0.0)),
    });
    v
}

pub fn cmd_gallery(cfg: &AnalysisConfig) -> Result<Report, Failure> {
    let name = match (&cfg.gallery, &cfg.function) {
        (Some(n), _) => n.clone(),
        (None, Some(FunctionSpec::Gallery(n))) => n.clone(),
        _ => return Err(Failure::usage("config names no gallery function")),
    };
    match name.as_str() {
        "remark1" => {
            let f = ring(cfg, &FunctionSpec::Gallery(name.clone()))?;
            let specs = if cfg.curves.is_empty() {
                default_remark1_curves()
            } else {
                cfg.curves.clone()
            };
            let (rows, csv, _) = verdict_rows(&f, &specs, cfg)?;
            Ok(Report {
                json: json!({"command": "gallery", "gallery": name, "curves": rows}),
                csv: Some(csv),
                negative: false,
            })
        }
        "example1" => {
            let probe = example1_growth_probe(cfg.n0, cfg.c, cfg.m_from..=cfg.m_to)?;
            let last: Vec<f64> = probe.rows.iter().map(|r| r.log10_ratios[5]).collect();
            let increasing = last.windows(2).all(|w| w[1] > w[0]);
            let f = ring(cfg, &FunctionSpec::Gallery(name.clone()))?;
            let ecfg = extension_config(cfg);
            let truncation: Vec<Value> = (2..=8usize)
                .into_par_iter()
                .map(|l| {
                    let phi = DiscFunction::monomial(
                        Complex64::new((2.0f64 / 3.0).powi(l as i32), 0.0),
                        l,
                    );
                    extension_test(&f, &phi, cfg.n_max, &ecfg).map(
                        |v| json!({"l": l, "verdict": kind_name(&v.kind), "residual": v.residual}),
                    )
                })
                .collect::<Result<_, _>>()?;
            let mut csv = String::from("m,lambda,log10_abs_f,log10_ratio_p6\n");
            for r in &probe.rows {
                let _ = writeln!(
                    csv,
                    "{},{:.16e},{:.16e},{:.16e}",
                    r.m, r.lambda, r.log10_abs_f, r.log10_ratios[5]
                );
            }
            Ok(Report {
                json: json!({
                    "command": "gallery",
                    "gallery": name,
                    "growth": probe,
                    "growth_increasing": increasing,
                    "truncation_curves": truncation,
                }),
                csv: Some(csv),
                negative: false,
            })
        }
        "example2" => {
            let rcfg = RationalConfig::default();
            let rows: Vec<(usize, Option<usize>, Value)> = (1..=cfg.k_max)
                .into_par_iter()
                .map(|k| -> Result<_, Failure> {
                    let g = example2_restriction(k)?;
                    let v = detect_rational(&g, cfg.n_max, &rcfg)?;
                    let m = v.rational().and_then(|rp| match rp.poles.as_slice() {
                        [p] if p.a.norm() < 1e-6 => Some(p.m),
                        _ => None,
                    });
                    Ok((k, m, serde_json::to_value(&v).unwrap_or(Value::Null)))
                })
                .collect::<Result<_, _>>()?;
            let mults: Vec<Option<usize>> = rows.iter().map(|r| r.1).collect();
            let increasing = mults
                .windows(2)
                .all(|w| matches!(w, [Some(a), Some(b)] if b > a));
            let mut csv = String::from("k,multiplicity\n");
            for (k, m, _) in &rows {
                let _ = writeln!(csv, "{k},{}", m.map(|x| x.to_string()).unwrap_or_default());
            }
            let detail: Vec<Value> = rows
                .into_iter()
                .map(|(k, m, v)| json!({"k": k, "multiplicity": m, "verdict": v}))
                .collect();
            Ok(Report {
                json: json!({
                    "command": "gallery",
                    "gallery": name,
                    "restrictions": detail,
                    "multiplicities_increasing": increasing,
                }),
                csv: Some(csv),
                negative: false,
            })
        }
        _ => Err(Failure::usage(format!("unknown gallery function {name:?}"))),
    }
}
