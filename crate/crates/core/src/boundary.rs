//! Functions sampled uniformly on a circle `|λ| = r`.
//!
//! Coefficients are kept internally in the normalized variable `μ = λ/r`,
//! i.e. `d_n` with `g(r·e^{iθ}) = Σ d_n e^{inθ}`. The Laurent coefficient on
//! the circle is `c_n = d_n·r^{-n}`; see [`CircleFunction::coeff`].

use std::cell::RefCell;
use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

/// Smallest admissible grid.
pub const MIN_GRID: usize = 16;
/// Default grid size used by the higher-level modules.
pub const DEFAULT_GRID: usize = 256;
/// Relative level below which a Fourier mode does not count towards bandwidth.
pub const BANDWIDTH_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error("sample count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("sample count {0} is below the minimum of {MIN_GRID}")]
    TooFewSamples(usize),
    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("bandwidth {bandwidth} is not resolved on a grid of {grid} points (need grid >= 4*bandwidth)")]
    Bandwidth { bandwidth: usize, grid: usize },
    #[error(
        "function vanishes on the circle: min modulus {min_modulus:e} <= tolerance {tolerance:e}"
    )]
    VanishingOnCircle { min_modulus: f64, tolerance: f64 },
    #[error("winding number refinement did not converge at the cap of {cap} samples")]
    WindingNotConverged { cap: usize },
    #[error("circle functions live on different grids ({0} vs {1} samples, or radii differ)")]
    GridMismatch(usize, usize),
    #[error("csv: {0}")]
    Csv(String),
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_forward(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(buf));
}

fn fft_inverse(buf: &mut [Complex64]) {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(buf));
}

fn check_grid(m: usize) -> Result<(), BoundaryError> {
    if !m.is_power_of_two() {
        return Err(BoundaryError::NotPowerOfTwo(m));
    }
    if m < MIN_GRID {
        return Err(BoundaryError::TooFewSamples(m));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<(), BoundaryError> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(BoundaryError::InvalidRadius(r))
    }
}

/// A function sampled at `λ_m = r·e^{2πim/M}` together with its Fourier data.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFunction {
    radius: f64,
    samples: Vec<Complex64>,
    // d_n at index n.rem_euclid(M), i.e. FFT order
    modes: Vec<Complex64>,
}

impl CircleFunction {
    /// Builds a circle function from samples; see [`analyze`].
    pub fn from_samples(samples: Vec<Complex64>, radius: f64) -> Result<Self, BoundaryError> {
        check_grid(samples.len())?;
        check_radius(radius)?;
        if let Some(i) = samples
            .iter()
            .position(|s| !s.re.is_finite() || !s.im.is_finite())
        {
            return Err(BoundaryError::NonFinite(i));
        }
        let m = samples.len();
        let mut modes = samples.clone();
        fft_forward(&mut modes);
        let inv = 1.0 / m as f64;
        for c in modes.iter_mut() {
            *c *= inv;
        }
        Ok(CircleFunction {
            radius,
            samples,
            modes,
        })
    }

    /// Samples `f` on `|λ| = radius` at `m` points.
    pub fn sample<F>(radius: f64, m: usize, f: F) -> Result<Self, BoundaryError>
    where
        F: Fn(Complex64) -> Complex64,
    {
        check_grid(m)?;
        check_radius(radius)?;
        let samples = grid_points(radius, m).into_iter().map(f).collect();
        Self::from_samples(samples, radius)
    }

    /// Builds a circle function from normalized modes `d_n` (mode `n` at
    /// index `n mod M`).
    pub fn from_modes(modes: Vec<Complex64>, radius: f64) -> Result<Self, BoundaryError> {
        check_grid(modes.len())?;
        check_radius(radius)?;
        let samples = synthesize_modes(&modes);
        Ok(CircleFunction {
            radius,
            samples,
            modes,
        })
    }

    /// Builds a circle function from Laurent coefficients `(n, c_n)` on
    /// `|λ| = radius`. Repeated `n` accumulate.
    pub fn from_laurent(
        radius: f64,
        m: usize,
        coeffs: &[(i64, Complex64)],
    ) -> Result<Self, BoundaryError> {
        check_grid(m)?;
        check_radius(radius)?;
        let half = (m / 2) as i64;
        let mut modes = vec![Complex64::new(0.0, 0.0); m];
        for &(n, c) in coeffs {
            if n < -half || n >= half {
                return Err(BoundaryError::Bandwidth {
                    bandwidth: n.unsigned_abs() as usize,
                    grid: m,
                });
            }
            modes[n.rem_euclid(m as i64) as usize] += c * radius.powi(n as i32);
        }
        Self::from_modes(modes, radius)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Sample points `λ_m`.
    pub fn points(&self) -> Vec<Complex64> {
        grid_points(self.radius, self.len())
    }

    /// Mode indices in `[−M/2, M/2)`, ascending.
    pub fn mode_range(&self) -> std::ops::Range<i64> {
        let half = (self.len() / 2) as i64;
        -half..half
    }

    /// Normalized coefficient `d_n` (zero outside the resolved range).
    pub fn normalized_coeff(&self, n: i64) -> Complex64 {
        let m = self.len() as i64;
        if n < -m / 2 || n >= m / 2 {
            return Complex64::new(0.0, 0.0);
        }
        self.modes[n.rem_euclid(m) as usize]
    }

    /// Laurent coefficient `c_n = d_n·r^{-n}` on `|λ| = r`.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let d = self.normalized_coeff(n);
        if d == Complex64::new(0.0, 0.0) {
            return d;
        }
        d * self.radius.powi(-(n as i32))
    }

    /// All Laurent coefficients as `(n, c_n)`, ascending in `n`.
    pub fn coeffs(&self) -> Vec<(i64, Complex64)> {
        self.mode_range().map(|n| (n, self.coeff(n))).collect()
    }

    /// Normalized modes in FFT order.
    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    /// Re-synthesizes samples from the stored coefficients.
    pub fn synthesize(&self) -> Vec<Complex64> {
        synthesize_modes(&self.modes)
    }

    /// Applies a per-mode map `d_n ↦ g(n, d_n)` and re-synthesizes.
    pub fn map_modes<G>(&self, g: G) -> CircleFunction
    where
        G: Fn(i64, Complex64) -> Complex64,
    {
        let m = self.len() as i64;
        let modes: Vec<Complex64> = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let i = i as i64;
                let n = if i >= m / 2 { i - m } else { i };
                g(n, d)
            })
            .collect();
        let samples = synthesize_modes(&modes);
        CircleFunction {
            radius: self.radius,
            samples,
            modes,
        }
    }

    /// Pointwise map on samples.
    pub fn map_samples<G>(&self, g: G) -> Result<CircleFunction, BoundaryError>
    where
        G: Fn(Complex64, Complex64) -> Complex64,
    {
        let pts = self.points();
        let samples = self
            .samples
            .iter()
            .zip(pts)
            .map(|(&s, p)| g(p, s))
            .collect();
        CircleFunction::from_samples(samples, self.radius)
    }

    /// Band-limited resampling to `m` points (zero padding or truncation of
    /// the trigonometric interpolant).
    pub fn resample(&self, m: usize) -> Result<CircleFunction, BoundaryError> {
        check_grid(m)?;
        let old = self.len() as i64;
        let new = m as i64;
        let keep = old.min(new) / 2;
        let mut modes = vec![Complex64::new(0.0, 0.0); m];
        for n in -keep..keep {
            modes[n.rem_euclid(new) as usize] = self.modes[n.rem_euclid(old) as usize];
        }
        CircleFunction::from_modes(modes, self.radius)
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn same_grid(&self, other: &CircleFunction) -> Result<(), BoundaryError> {
        if self.len() != other.len() || self.radius != other.radius {
            return Err(BoundaryError::GridMismatch(self.len(), other.len()));
        }
        Ok(())
    }

    pub fn add(&self, other: &CircleFunction) -> Result<CircleFunction, BoundaryError> {
        self.same_grid(other)?;
        let s = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        CircleFunction::from_samples(s, self.radius)
    }

    pub fn sub(&self, other: &CircleFunction) -> Result<CircleFunction, BoundaryError> {
        self.same_grid(other)?;
        let s = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        CircleFunction::from_samples(s, self.radius)
    }

    pub fn mul(&self, other: &CircleFunction) -> Result<CircleFunction, BoundaryError> {
        self.same_grid(other)?;
        let s = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .collect();
        CircleFunction::from_samples(s, self.radius)
    }

    pub fn scale(&self, c: Complex64) -> CircleFunction {
        CircleFunction {
            radius: self.radius,
            samples: self.samples.iter().map(|s| s * c).collect(),
            modes: self.modes.iter().map(|d| d * c).collect(),
        }
    }

    /// Largest `|n|` whose mode exceeds `tol·max|d|`; zero for the zero
    /// function.
    pub fn bandwidth(&self, tol: f64) -> usize {
        let peak = self.modes.iter().map(|d| d.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0;
        }
        self.mode_range()
            .filter(|&n| self.normalized_coeff(n).norm() > tol * peak)
            .map(|n| n.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Aliasing guard: errors unless `M ≥ 4B` for the bandwidth `B` at
    /// relative level [`BANDWIDTH_TOL`].
    pub fn check_resolved(&self) -> Result<(), BoundaryError> {
        let b = self.bandwidth(BANDWIDTH_TOL);
        if 4 * b > self.len() {
            return Err(BoundaryError::Bandwidth {
                bandwidth: b,
                grid: self.len(),
            });
        }
        Ok(())
    }

    /// Largest modulus among nonnegative modes.
    pub fn plus_mass(&self) -> f64 {
        self.mode_range()
            .filter(|&n| n >= 0)
            .map(|n| self.normalized_coeff(n).norm())
            .fold(0.0, f64::max)
    }

    /// Largest modulus among negative modes.
    pub fn minus_mass(&self) -> f64 {
        self.mode_range()
            .filter(|&n| n < 0)
            .map(|n| self.normalized_coeff(n).norm())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), BoundaryError> {
        let io = |e: std::io::Error| BoundaryError::Csv(e.to_string());
        writeln!(w, "# radius={:.17e}", self.radius).map_err(io)?;
        let mut cw = csv::Writer::from_writer(w);
        let csv_err = |e: csv::Error| BoundaryError::Csv(e.to_string());
        cw.write_record(["theta", "re", "im"]).map_err(csv_err)?;
        let m = self.len();
        for (i, s) in self.samples.iter().enumerate() {
            let theta = 2.0 * PI * i as f64 / m as f64;
            cw.write_record([
                format!("{theta:.17e}"),
                format!("{:.17e}", s.re),
                format!("{:.17e}", s.im),
            ])
            .map_err(csv_err)?;
        }
        cw.flush().map_err(io)?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(mut r: R) -> Result<CircleFunction, BoundaryError> {
        let mut first = String::new();
        r.read_line(&mut first)
            .map_err(|e| BoundaryError::Csv(e.to_string()))?;
        let radius: f64 = first
            .trim()
            .strip_prefix('#')
            .map(str::trim)
            .and_then(|s| s.strip_prefix("radius="))
            .ok_or_else(|| BoundaryError::Csv("missing '# radius=<r>' header".into()))?
            .trim()
            .parse()
            .map_err(|e| BoundaryError::Csv(format!("bad radius: {e}")))?;
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(r);
        let mut rows: Vec<(f64, Complex64)> = Vec::new();
        for rec in rdr.deserialize::<(f64, f64, f64)>() {
            let (t, re, im) = rec.map_err(|e| BoundaryError::Csv(e.to_string()))?;
            rows.push((t, Complex64::new(re, im)));
        }
        let m = rows.len();
        check_grid(m)?;
        for (i, (t, _)) in rows.iter().enumerate() {
            let expect = 2.0 * PI * i as f64 / m as f64;
            if (t - expect).abs() > 1e-9 {
                return Err(BoundaryError::Csv(format!(
                    "row {i}: theta {t} is not on the uniform grid"
                )));
            }
        }
        CircleFunction::from_samples(rows.into_iter().map(|(_, s)| s).collect(), radius)
    }
}

/// Uniform grid `r·e^{2πim/M}`.
pub fn grid_points(radius: f64, m: usize) -> Vec<Complex64> {
    (0..m)
        .map(|i| Complex64::from_polar(radius, 2.0 * PI * i as f64 / m as f64))
        .collect()
}

fn synthesize_modes(modes: &[Complex64]) -> Vec<Complex64> {
    let mut buf = modes.to_vec();
    fft_inverse(&mut buf);
    buf
}

/// Samples plus Laurent coefficients of a function on `|λ| = radius`.
pub fn analyze(samples: &[Complex64], radius: f64) -> Result<CircleFunction, BoundaryError> {
    CircleFunction::from_samples(samples.to_vec(), radius)
}

/// Both halves of the Hardy decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct HardySplit {
    pub plus: CircleFunction,
    pub minus: CircleFunction,
}

/// `P(g)`: keeps the modes `n < 0`.
pub fn hardy_project_minus(g: &CircleFunction) -> CircleFunction {
    g.map_modes(|n, d| if n < 0 { d } else { Complex64::new(0.0, 0.0) })
}

pub fn hardy_split(g: &CircleFunction) -> HardySplit {
    HardySplit {
        plus: g.map_modes(|n, d| if n >= 0 { d } else { Complex64::new(0.0, 0.0) }),
        minus: hardy_project_minus(g),
    }
}

/// `S(g)`: multiplier `+1` on `n ≥ 0`, `−1` on `n < 0`.
pub fn hilbert_transform(g: &CircleFunction) -> CircleFunction {
    g.map_modes(|n, d| if n < 0 { -d } else { d })
}

/// `sqrt(Σ (1+n²)|d_n|²)` over the modes of `g` as a function of the angle.
pub fn sobolev_norm(g: &CircleFunction) -> f64 {
    g.mode_range()
        .map(|n| {
            let w = 1.0 + (n * n) as f64;
            w * g.normalized_coeff(n).norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingConfig {
    pub zero_tolerance: f64,
    pub max_grid: usize,
}

impl Default for WindingConfig {
    fn default() -> Self {
        WindingConfig {
            zero_tolerance: 1e-9,
            max_grid: 1 << 16,
        }
    }
}

/// Winding number with the default configuration.
pub fn winding_number(g: &CircleFunction) -> Result<i64, BoundaryError> {
    winding_number_with(g, &WindingConfig::default())
}

/// Sums argument increments along the circle, doubling the grid through the
/// trigonometric interpolant until every increment is below `π/2`.
pub fn winding_number_with(g: &CircleFunction, cfg: &WindingConfig) -> Result<i64, BoundaryError> {
    let mut cur = g.clone();
    loop {
        let min = cur.min_modulus();
        if min <= cfg.zero_tolerance {
            return Err(BoundaryError::VanishingOnCircle {
                min_modulus: min,
                tolerance: cfg.zero_tolerance,
            });
        }
        let s = cur.samples();
        let m = s.len();
        let mut total = 0.0;
        let mut fine = true;
        for i in 0..m {
            let step = (s[(i + 1) % m] / s[i]).arg();
            if step.abs() >= PI / 2.0 {
                fine = false;
                break;
            }
            total += step;
        }
        if fine {
            return Ok((total / (2.0 * PI)).round() as i64);
        }
        if 2 * m > cfg.max_grid {
            return Err(BoundaryError::WindingNotConverged { cap: cfg.max_grid });
        }
        cur = cur.resample(2 * m)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_coefficients() {
        let g = CircleFunction::sample(1.0, 64, |l| l * l).unwrap();
        for n in g.mode_range() {
            let want = if n == 2 { 1.0 } else { 0.0 };
            assert!((g.coeff(n) - want).norm() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn constant_coefficient() {
        let g = CircleFunction::sample(1.0, 32, |_| c(5.0, 0.0)).unwrap();
        assert_abs_diff_eq!(g.coeff(0).re, 5.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_grids() {
        let s = vec![c(1.0, 0.0); 24];
        assert_eq!(analyze(&s, 1.0), Err(BoundaryError::NotPowerOfTwo(24)));
        let s = vec![c(1.0, 0.0); 8];
        assert_eq!(analyze(&s, 1.0), Err(BoundaryError::TooFewSamples(8)));
        let s = vec![c(1.0, 0.0); 16];
        assert!(matches!(
            analyze(&s, -1.0),
            Err(BoundaryError::InvalidRadius(_))
        ));
    }

    #[test]
    fn laurent_rescaling_off_unit_circle() {
        let g = CircleFunction::sample(0.5, 64, |l| l * l * l + 2.0 / l).unwrap();
        assert!((g.coeff(3) - 1.0).norm() < 1e-12);
        assert!((g.coeff(-1) - 2.0).norm() < 1e-12);
        let h =
            CircleFunction::from_laurent(0.5, 64, &[(3, c(1.0, 0.0)), (-1, c(2.0, 0.0))]).unwrap();
        for (a, b) in g.samples().iter().zip(h.samples()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn projections_on_monomials() {
        let g = CircleFunction::from_laurent(
            1.0,
            64,
            &[(1, c(3.0, 0.0)), (-1, c(4.0, 0.0)), (0, c(5.0, 0.0))],
        )
        .unwrap();
        let p = hardy_project_minus(&g);
        for (pt, v) in p.points().iter().zip(p.samples()) {
            assert!((v - 4.0 / pt).norm() < 1e-13);
        }
        let t3 = CircleFunction::sample(1.0, 64, |l| c(2.0, 1.0) * l.powi(3)).unwrap();
        assert!(hardy_project_minus(&t3).sup_norm() < 1e-14);
        let s = hilbert_transform(&CircleFunction::sample(1.0, 64, |l| l.powi(-3)).unwrap());
        for (pt, v) in s.points().iter().zip(s.samples()) {
            assert!((v + pt.powi(-3)).norm() < 1e-13);
        }
    }

    #[test]
    fn sobolev_examples() {
        let one = CircleFunction::sample(1.0, 16, |_| c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(sobolev_norm(&one), 1.0, epsilon = 1e-14);
        let tau = CircleFunction::sample(1.0, 16, |l| l).unwrap();
        assert_abs_diff_eq!(sobolev_norm(&tau), 2f64.sqrt(), epsilon = 1e-14);
        let zero = CircleFunction::sample(1.0, 16, |_| c(0.0, 0.0)).unwrap();
        assert_eq!(sobolev_norm(&zero), 0.0);
    }

    #[test]
    fn winding_examples() {
        let g = CircleFunction::sample(1.0, 64, |l| l.powi(5)).unwrap();
        assert_eq!(winding_number(&g), Ok(5));
        let one = CircleFunction::sample(1.0, 16, |_| c(1.0, 0.0)).unwrap();
        assert_eq!(winding_number(&one), Ok(0));
        // 16 samples cannot resolve increments of 2π·12/16, refinement kicks in
        for k in 1..=12 {
            let g = CircleFunction::sample(1.0, 64, |l| (l * (2.0 / 3.0)).powi(k)).unwrap();
            assert_eq!(winding_number(&g), Ok(k as i64));
        }
        let g = CircleFunction::sample(1.0, 16, |l| l.powi(-6)).unwrap();
        assert_eq!(winding_number(&g), Ok(-6));
    }

    #[test]
    fn winding_rejects_vanishing() {
        let g = CircleFunction::sample(1.0, 64, |l| l - 1.0).unwrap();
        assert!(matches!(
            winding_number(&g),
            Err(BoundaryError::VanishingOnCircle { .. })
        ));
    }

    #[test]
    fn winding_cap() {
        let g = CircleFunction::sample(1.0, 64, |l| l.powi(20)).unwrap();
        let cfg = WindingConfig {
            max_grid: 64,
            ..Default::default()
        };
        assert_eq!(
            winding_number_with(&g, &cfg),
            Err(BoundaryError::WindingNotConverged { cap: 64 })
        );
    }

    #[test]
    fn bandwidth_guard() {
        let g = CircleFunction::sample(1.0, 64, |l| l.powi(17)).unwrap();
        assert_eq!(g.bandwidth(BANDWIDTH_TOL), 17);
        assert!(g.check_resolved().is_err());
        let g = CircleFunction::sample(1.0, 64, |l| l.powi(16)).unwrap();
        assert!(g.check_resolved().is_ok());
    }

    #[test]
    fn csv_round_trip() {
        let g = CircleFunction::sample(0.75, 32, |l| l.exp() + 1.0 / l).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# radius="));
        assert!(text.lines().nth(1).unwrap() == "theta,re,im");
        let h = CircleFunction::read_csv(&buf[..]).unwrap();
        assert_eq!(h.radius(), 0.75);
        for (a, b) in g.samples().iter().zip(h.samples()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn csv_rejects_missing_header() {
        let text = "theta,re,im\n0,1,0\n";
        assert!(matches!(
            CircleFunction::read_csv(text.as_bytes()),
            Err(BoundaryError::Csv(_))
        ));
    }

    #[test]
    fn resample_preserves_band_limited() {
        let g = CircleFunction::sample(1.0, 32, |l| l * l + 0.5 / l).unwrap();
        let h = g.resample(128).unwrap();
        for (p, v) in h.points().iter().zip(h.samples()) {
            assert!((v - (p * p + 0.5 / p)).norm() < 1e-13);
        }
    }
}
