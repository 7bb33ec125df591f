//! Flat `key = value` config files with `[section]` headers.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pinchext_core::extension::MAX_DEPTH;
use pinchext_core::DiscFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Gallery(String),
    Laurent(PathBuf),
}

impl FunctionSpec {
    pub fn label(&self) -> String {
        match self {
            FunctionSpec::Gallery(n) => n.clone(),
            FunctionSpec::Laurent(p) => p.display().to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CurveSpec {
    pub label: String,
    pub curve: DiscFunction,
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub function: Option<FunctionSpec>,
    pub z_radius: Option<f64>,
    pub curves: Vec<CurveSpec>,
    pub base: DiscFunction,
    pub epsilon: f64,
    pub grid: usize,
    pub depth: usize,
    pub n_max: usize,
    pub holo_tolerance: f64,
    pub z_grid: usize,
    pub inner_radius: f64,
    pub zero_cluster: f64,
    pub zero_stability: f64,
    pub subtract_plus: bool,
    pub seed: u64,
    pub ray_angle: f64,
    pub ray_points: usize,
    pub ray_max: f64,
    pub n_bound: usize,
    pub probes: Vec<Complex64>,
    pub probe_radius: f64,
    pub family: bool,
    pub gallery: Option<String>,
    pub n0: u32,
    pub c: f64,
    pub m_from: i32,
    pub m_to: i32,
    pub k_max: usize,
    pub out_dir: Option<PathBuf>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            function: None,
            z_radius: None,
            curves: Vec::new(),
            base: DiscFunction::zero(),
            epsilon: 0.25,
            grid: 256,
            depth: 6,
            n_max: 10,
            holo_tolerance: 1e-8,
            z_grid: 256,
            inner_radius: 0.9,
            zero_cluster: 1e-4,
            zero_stability: 1e-2,
            subtract_plus: false,
            seed: 0,
            ray_angle: 0.0,
            ray_points: 32,
            ray_max: 1.0,
            n_bound: 10,
            probes: Vec::new(),
            probe_radius: 0.05,
            family: false,
            gallery: None,
            n0: 1,
            c: 0.1,
            m_from: 6,
            m_to: 12,
            k_max: 8,
            out_dir: None,
        }
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi`; `i` alone means `1i`.
pub fn parse_complex(s: &str) -> Result<Complex64, ConfigError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return err("empty complex number");
    }
    let bad = || ConfigError(format!("cannot parse complex number {s:?}"));
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, ConfigError> {
    s.split(',').map(parse_complex).collect()
}

fn parse_range(s: &str) -> Result<(i64, i64), ConfigError> {
    let Some((a, b)) = s.split_once("..") else {
        return err(format!("range {s:?} must look like a..b"));
    };
    let a = a.trim().parse::<i64>();
    let b = b.trim().parse::<i64>();
    match (a, b) {
        (Ok(a), Ok(b)) if a <= b => Ok((a, b)),
        _ => err(format!("invalid range {s:?}")),
    }
}

/// Named curve sequences indexed by `k`.
pub fn generate(name: &str, k: i64) -> Result<DiscFunction, ConfigError> {
    if k < 1 {
        return err(format!("generator index must be at least 1, got {k}"));
    }
    let kf = k as f64;
    let c = |re: f64| Complex64::new(re, 0.0);
    Ok(match name {
        "lambda_over_k" => DiscFunction::monomial(c(1.0 / kf), 1),
        "power_two_thirds" => DiscFunction::monomial(c((2.0f64 / 3.0).powi(k as i32)), k as usize),
        "horizontal_inverse" => DiscFunction::constant(c(1.0 / (kf + 1.0))),
        "quadratic_perturbed" => {
            DiscFunction::monomial(c(1.0 / kf), 2).add(&DiscFunction::monomial(c(0.5f64.powi(k as i32)), 1))
        }
        _ => {
            return err(format!(
                "unknown generator {name:?} (expected lambda_over_k, power_two_thirds, horizontal_inverse or quadratic_perturbed)"
            ))
        }
    })
}

fn resolve(dir: &Path, v: &str) -> PathBuf {
    let p = PathBuf::from(v);
    if p.is_absolute() {
        p
    } else {
        dir.join(p)
    }
}

fn read_probe_csv(path: &Path) -> Result<Vec<Complex64>, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("probe file {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.replace(' ', "") == "re,im") {
            continue;
        }
        let Some((a, b)) = line.split_once(',') else {
            return err(format!("{}:{}: expected re,im", path.display(), i + 1));
        };
        match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(re), Ok(im)) => out.push(Complex64::new(re, im)),
            _ => return err(format!("{}:{}: expected re,im", path.display(), i + 1)),
        }
    }
    Ok(out)
}

const REPEATABLE: [&str; 2] = ["curve", "generator"];

struct Entry {
    section: String,
    key: String,
    value: String,
    line: usize,
}

fn tokenize(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut section = String::new();
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(s) = line.strip_prefix('[') {
            let Some(name) = s.strip_suffix(']') else {
                return err(format!("line {}: unterminated section header", i + 1));
            };
            section = name.trim().to_string();
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return err(format!("line {}: expected key = value", i + 1));
        };
        let key = k.trim().to_string();
        if !REPEATABLE.contains(&key.as_str())
            && out.iter().any(|e| e.section == section && e.key == key)
        {
            return err(format!(
                "line {}: duplicate key {key:?} in [{section}]",
                i + 1
            ));
        }
        out.push(Entry {
            section: section.clone(),
            key,
            value: v.trim().to_string(),
            line: i + 1,
        });
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(e: &Entry) -> Result<T, ConfigError> {
    let v = if e.value.eq_ignore_ascii_case("inf") {
        "inf"
    } else {
        e.value.as_str()
    };
    v.parse::<T>().or_else(|_| {
        err(format!(
            "line {}: {} = {:?} is not a valid number",
            e.line, e.key, e.value
        ))
    })
}

fn boolean(e: &Entry) -> Result<bool, ConfigError> {
    match e.value.as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => err(format!("line {}: {} expects true or false", e.line, e.key)),
    }
}

impl AnalysisConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("config {}: {e}", path.display())))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, dir)
    }

    /// Relative paths are taken from `dir`.
    pub fn parse(text: &str, dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg = AnalysisConfig::default();
        let mut random_probes = 0usize;
        for e in tokenize(text)? {
            match (e.section.as_str(), e.key.as_str()) {
                ("function", "gallery") => {
                    cfg.function = Some(FunctionSpec::Gallery(e.value.clone()))
                }
                ("function", "laurent") => {
                    cfg.function = Some(FunctionSpec::Laurent(resolve(dir, &e.value)))
                }
                ("function", "z_radius") => cfg.z_radius = Some(num(&e)?),
                ("curves", "curve") => {
                    let coeffs = parse_complex_list(&e.value)
                        .map_err(|x| ConfigError(format!("line {}: {x}", e.line)))?;
                    let curve = DiscFunction::new(coeffs)
                        .map_err(|x| ConfigError(format!("line {}: {x}", e.line)))?;
                    cfg.curves.push(CurveSpec {
                        label: e.value.clone(),
                        curve,
                    });
                }
                ("curves", "generator") => {
                    let (name, range) =
                        e.value.split_once(char::is_whitespace).ok_or_else(|| {
                            ConfigError(format!("line {}: generator expects `name a..b`", e.line))
                        })?;
                    let (a, b) = parse_range(range.trim())?;
                    for k in a..=b {
                        cfg.curves.push(CurveSpec {
                            label: format!("{name}[{k}]"),
                            curve: generate(name, k)?,
                        });
                    }
                }
                ("curves", "base") => {
                    cfg.base = DiscFunction::new(parse_complex_list(&e.value)?)
                        .map_err(|x| ConfigError(x.to_string()))?
                }
                ("analysis", "epsilon") => cfg.epsilon = num(&e)?,
                ("analysis", "grid") => cfg.grid = num(&e)?,
                ("analysis", "depth") => cfg.depth = num(&e)?,
                ("analysis", "n_max") => cfg.n_max = num(&e)?,
                ("analysis", "holo_tolerance") => cfg.holo_tolerance = num(&e)?,
                ("analysis", "seed") => cfg.seed = num(&e)?,
                ("ladder", "z_grid") => cfg.z_grid = num(&e)?,
                ("ladder", "inner_radius") => cfg.inner_radius = num(&e)?,
                ("ladder", "zero_cluster") => cfg.zero_cluster = num(&e)?,
                ("ladder", "zero_stability") => cfg.zero_stability = num(&e)?,
                ("ladder", "subtract_plus") => cfg.subtract_plus = boolean(&e)?,
                ("ladder", "ray_angle") => cfg.ray_angle = num(&e)?,
                ("ladder", "ray_points") => cfg.ray_points = num(&e)?,
                ("ladder", "ray_max") => cfg.ray_max = num(&e)?,
                ("validate", "n_bound") => cfg.n_bound = num(&e)?,
                ("validate", "probes") => cfg.probes.extend(parse_complex_list(&e.value)?),
                ("validate", "probes_file") => {
                    let p = resolve(dir, &e.value);
                    cfg.probes.extend(read_probe_csv(&p)?)
                }
                ("validate", "random_probes") => random_probes = num(&e)?,
                ("validate", "probe_radius") => cfg.probe_radius = num(&e)?,
                ("validate", "family") => cfg.family = boolean(&e)?,
                ("gallery", "name") => cfg.gallery = Some(e.value.clone()),
                ("gallery", "n0") => cfg.n0 = num(&e)?,
                ("gallery", "c") => cfg.c = num(&e)?,
                ("gallery", "m_range") => {
                    let (a, b) = parse_range(&e.value)?;
                    cfg.m_from = a as i32;
                    cfg.m_to = b as i32;
                }
                ("gallery", "k_max") => cfg.k_max = num(&e)?,
                ("output", "dir") => cfg.out_dir = Some(resolve(dir, &e.value)),
                (s, k) => return err(format!("line {}: unknown key {k:?} in [{s}]", e.line)),
            }
        }
        if random_probes > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for _ in 0..random_probes {
                let r = 0.9 * rng.random::<f64>().sqrt();
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                cfg.probes.push(Complex64::from_polar(r, t));
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), ConfigError> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return err(format!(
                "epsilon must lie in (0, 0.5), got {}",
                self.epsilon
            ));
        }
        if self.depth > MAX_DEPTH {
            return err(format!("depth {} exceeds {MAX_DEPTH}", self.depth));
        }
        if let Some(FunctionSpec::Laurent(p)) = &self.function {
            if !p.is_file() {
                return err(format!("laurent file {} does not exist", p.display()));
            }
        }
        if let Some(FunctionSpec::Gallery(n)) = &self.function {
            check_gallery_name(n)?;
        }
        if let Some(n) = &self.gallery {
            check_gallery_name(n)?;
        }
        if !(self.probe_radius > 0.0) {
            return err("probe_radius must be positive");
        }
        if self.ray_points == 0 || !(self.ray_max > 0.0) {
            return err("ray_points and ray_max must be positive");
        }
        Ok(())
    }

    /// Keys and values echoed into reports.
    pub fn summary(&self) -> BTreeMap<&'static str, serde_json::Value> {
        use serde_json::json;
        BTreeMap::from([
            ("epsilon", json!(self.epsilon)),
            ("grid", json!(self.grid)),
            ("depth", json!(self.depth)),
            ("n_max", json!(self.n_max)),
            ("holo_tolerance", json!(self.holo_tolerance)),
            ("seed", json!(self.seed)),
        ])
    }
}

fn check_gallery_name(n: &str) -> Result<(), ConfigError> {
    match n {
        "remark1" | "example1" | "example2" => Ok(()),
        _ => err(format!(
            "unknown gallery function {n:?} (expected remark1, example1 or example2)"
        )),
    }
}
