//! Tsang-type kernels.
//!
//! A kernel is defined by an even, non-negative, bounded weight `j`
//! supported on `[-1, 1]`. Its Fourier transform is
//! `K^(t) = j(2 pi t) sech(2 pi t)` and
//!
//! ```text
//! K(z) = (1/pi) * integral_0^1 j(a) sech(a) cos(z a) da
//! ```
//!
//! is even and entire, positive on the real line, has positive real part in
//! the strip `|Im z| < 1`, and decays like `e^{|Im z|} / |z|^2`.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, integrate_adaptive_with, QuadOptions};

pub type WeightFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Fejer weight `max(0, 1 - |a|)`.
pub fn fejer_j(alpha: f64) -> f64 {
    (1.0 - alpha.abs()).max(0.0)
}

/// Fourier transform of the Fejer weight, `(sin(pi w) / (pi w))^2`.
/// Reference formula only; no computation depends on it.
pub fn fejer_j_hat(w: f64) -> f64 {
    if w == 0.0 {
        return 1.0;
    }
    let x = PI * w;
    (x.sin() / x).powi(2)
}

/// Montgomery-Taylor weight.
pub fn montgomery_taylor_j(alpha: f64) -> f64 {
    if alpha.abs() > 1.0 {
        return 0.0;
    }
    let jf = fejer_j(alpha);
    let scale = 1.0 / (1.0 - SQRT_2.cos());
    scale * ((SQRT_2 * jf).sin() / (2.0 * SQRT_2) + 0.5 * jf * (SQRT_2 * alpha).cos())
}

/// Fourier transform of the Montgomery-Taylor weight.
/// Reference formula only; no computation depends on it.
pub fn montgomery_taylor_j_hat(w: f64) -> f64 {
    let scale = 1.0 / (1.0 - SQRT_2.cos());
    let term = |d: f64| {
        if d.abs() < 1e-12 {
            0.5
        } else {
            (0.5 * d).sin() / d
        }
    };
    let s = term(SQRT_2 - 2.0 * PI * w) + term(SQRT_2 + 2.0 * PI * w);
    scale * s * s
}

fn sech(x: f64) -> f64 {
    1.0 / x.cosh()
}

#[derive(Clone)]
pub struct Kernel {
    name: String,
    j: WeightFn,
    j_at_0: f64,
    notes: String,
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("name", &self.name)
            .field("j_at_0", &self.j_at_0)
            .field("notes", &self.notes)
            .finish()
    }
}

impl Kernel {
    /// Wraps a weight given on `[0, 1]`; the result is extended evenly and
    /// set to zero outside `[-1, 1]`.
    pub fn from_fn(
        name: impl Into<String>,
        notes: impl Into<String>,
        j: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let j: WeightFn = Arc::new(move |a: f64| if a.abs() > 1.0 { 0.0 } else { j(a.abs()) });
        let j_at_0 = j(0.0);
        Self {
            name: name.into(),
            j,
            j_at_0,
            notes: notes.into(),
        }
    }

    pub fn fejer() -> Self {
        Self::from_fn("fejer", "j(a) = max(0, 1 - |a|)", fejer_j)
    }

    pub fn montgomery_taylor() -> Self {
        Self::from_fn(
            "montgomery-taylor",
            "j(a) = (sin(sqrt2 jF(a))/(2 sqrt2) + jF(a) cos(sqrt2 a)/2) / (1 - cos sqrt2)",
            montgomery_taylor_j,
        )
    }

    /// Built-in kernel by name: `fejer` or `mt` / `montgomery-taylor`.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "fejer" | "fejér" => Some(Self::fejer()),
            "mt" | "montgomery-taylor" | "montgomery_taylor" => Some(Self::montgomery_taylor()),
            _ => None,
        }
    }

    pub fn builtins() -> Vec<Self> {
        vec![Self::fejer(), Self::montgomery_taylor()]
    }

    /// Piecewise-linear weight through `(alpha, j)` samples covering `[0, 1]`.
    pub fn tabulated(name: impl Into<String>, mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::KernelTable("need at least two samples".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
            return Err(Error::KernelTable("samples must span exactly [0, 1]".into()));
        }
        if let Some(bad) = points.iter().find(|p| !(p.1 >= 0.0) || !p.1.is_finite()) {
            return Err(Error::KernelTable(format!(
                "negative or non-finite weight at alpha = {}",
                bad.0
            )));
        }
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::KernelTable("duplicate alpha".into()));
        }
        let n = points.len();
        let name = name.into();
        let notes = format!("tabulated, {n} samples, linear interpolation");
        Ok(Self::from_fn(name, notes, move |a| {
            let i = points.partition_point(|p| p.0 <= a).clamp(1, n - 1);
            let (x0, y0) = points[i - 1];
            let (x1, y1) = points[i];
            y0 + (y1 - y0) * (a - x0) / (x1 - x0)
        }))
    }

    /// Reads a tabulated kernel: one `alpha,j` pair per line, `#` comments and
    /// a leading header line allowed.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut points = Vec::new();
        let mut seen_header = false;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split(',').map(str::trim);
            let parsed = (fields.next(), fields.next(), fields.next());
            let (Some(a), Some(v), None) = parsed else {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: "expected alpha,j".into(),
                });
            };
            let header = points.is_empty() && a.parse::<f64>().is_err();
            if header && !seen_header {
                seen_header = true;
                continue;
            }
            let num = |s: &str| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    message: format!("not a number: {s:?}"),
                })
            };
            points.push((num(a)?, num(v)?));
        }
        let stem = path
            .file_stem()
            .map_or("tabulated".into(), |s| s.to_string_lossy().into_owned());
        Self::tabulated(stem, points)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn notes(&self) -> &str {
        &self.notes
    }

    pub fn j_at_0(&self) -> f64 {
        self.j_at_0
    }

    pub fn j(&self, alpha: f64) -> f64 {
        (self.j)(alpha)
    }

    /// `j(a) sech(a)`, the integrand weight of K.
    pub fn weight(&self, alpha: f64) -> f64 {
        self.j(alpha) * sech(alpha)
    }

    /// Constants of the decay bound, from integrating by parts on `[0, 1]`
    /// with `h = j sech`:
    /// `|K(z)| <= e^{|Im z|}/pi * (A1/|z| + A2/|z|^2 + min(R2/|z|^2, R3/|z|^3))`.
    /// Derivatives come from finite differences and variations from dense
    /// sampling, so the constants are numerical and padded by 1%.
    pub fn decay_constants(&self) -> DecayConstants {
        let h = |a: f64| self.weight(a);
        let e = 1e-4;
        let d1 = |a: f64| (h(a + e) - h(a - e)) / (2.0 * e);
        let d2 = |a: f64| (h(a + e) - 2.0 * h(a) + h(a - e)) / (e * e);
        let left_d1 = (-3.0 * h(0.0) + 4.0 * h(e) - h(2.0 * e)) / (2.0 * e);
        let right_d1 = (3.0 * h(1.0) - 4.0 * h(1.0 - e) + h(1.0 - 2.0 * e)) / (2.0 * e);
        let s = 1e-3;
        let left_d2 = (2.0 * h(0.0) - 5.0 * h(s) + 4.0 * h(2.0 * s) - h(3.0 * s)) / (s * s);
        let right_d2 = (2.0 * h(1.0) - 5.0 * h(1.0 - s) + 4.0 * h(1.0 - 2.0 * s) - h(1.0 - 3.0 * s)) / (s * s);
        // total variation of a sampled function on [2e, 1 - 2e]
        let variation = |f: &dyn Fn(f64) -> f64| {
            let n = 20_000;
            let lo = 2.0 * e;
            let step = (1.0 - 4.0 * e) / n as f64;
            let mut prev = f(lo);
            let mut total = 0.0;
            for k in 1..=n {
                let v = f(lo + k as f64 * step);
                total += (v - prev).abs();
                prev = v;
            }
            total
        };
        let pad = |v: f64| 1.01 * v + 1e-9;
        let smooth = self.smoothness_probe().looks_smooth;
        DecayConstants {
            endpoint: h(1.0).abs(),
            slope: pad(left_d1.abs() + right_d1.abs()),
            second_variation: pad(variation(&d1)),
            third: if smooth {
                pad(left_d2.abs() + right_d2.abs() + variation(&d2))
            } else {
                f64::INFINITY
            },
        }
    }

    /// Finite-difference smoothness probe at 1000 interior points of (0, 1).
    /// Informational only.
    pub fn smoothness_probe(&self) -> SmoothnessReport {
        let step = 1e-3;
        let mut max_second = 0.0f64;
        let mut worst_alpha = 0.0;
        for k in 1..1000 {
            let a = k as f64 * step;
            let lo = (a - step * 0.5).max(0.0);
            let hi = (a + step * 0.5).min(1.0);
            let d2 = (self.j(hi) - 2.0 * self.j(0.5 * (lo + hi)) + self.j(lo)) / ((hi - lo) * 0.5).powi(2);
            if d2.abs() > max_second {
                max_second = d2.abs();
                worst_alpha = a;
            }
        }
        SmoothnessReport {
            max_second_difference: max_second,
            at_alpha: worst_alpha,
            looks_smooth: max_second < 1e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayConstants {
    /// `|h(1)|`; non-zero means only `1/|z|` decay.
    pub endpoint: f64,
    /// `|h'(0)| + |h'(1)|`.
    pub slope: f64,
    /// Integral of `|h''|`.
    pub second_variation: f64,
    /// `|h''(0)| + |h''(1)| +` integral of `|h'''|`; infinite for kinked weights.
    pub third: f64,
}

impl DecayConstants {
    /// Upper bound on `|K(z)|`.
    pub fn bound(&self, z: Complex64) -> f64 {
        self.bound_at(z.norm(), z.im.abs())
    }

    /// Bound for every `z` with `|z| >= r` and `|Im z| <= y`; infinite at `r = 0`.
    pub fn bound_at(&self, r: f64, y: f64) -> f64 {
        if !(r > 0.0) {
            return f64::INFINITY;
        }
        let tail = (self.second_variation / (r * r)).min(self.third / (r * r * r));
        y.exp() / PI * (self.endpoint / r + self.slope / (r * r) + tail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub max_second_difference: f64,
    pub at_alpha: f64,
    pub looks_smooth: bool,
}

/// K^(t) = j(2 pi t) sech(2 pi t).
pub fn khat(kernel: &Kernel, t: f64) -> f64 {
    kernel.weight(2.0 * PI * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue {
    #[serde(serialize_with = "crate::serde_complex")]
    pub z: Complex64,
    #[serde(serialize_with = "crate::serde_complex")]
    pub value: Complex64,
    pub quadrature_error: f64,
    pub converged: bool,
}

// one panel per half period of cos(Re z * a)
fn oscillation_breakpoints(frequency: f64) -> Vec<f64> {
    let n = (frequency.abs() / PI).ceil().min(1e5) as usize;
    (1..n.max(1)).map(|k| k as f64 / n as f64).collect()
}

/// K(z) by adaptive quadrature of the finite-interval representation.
pub fn k_of_z(kernel: &Kernel, z: Complex64, tol: f64) -> Result<KernelValue> {
    let options = QuadOptions {
        breakpoints: oscillation_breakpoints(z.re),
        ..QuadOptions::default()
    };
    // the integral is pi * K, so pi * tol keeps K within tol
    let (value, error, converged) = if z.im == 0.0 {
        let r = integrate_adaptive_with(
            |a: f64| kernel.weight(a) * (z.re * a).cos(),
            0.0,
            1.0,
            PI * tol,
            &options,
        )?;
        (Complex64::new(r.value, 0.0), r.error_estimate, r.converged)
    } else {
        let r = integrate_adaptive_with(|a: f64| (z * a).cos() * kernel.weight(a), 0.0, 1.0, PI * tol, &options)?;
        (r.value, r.error_estimate, r.converged)
    };
    Ok(KernelValue {
        z,
        value: value / PI,
        quadrature_error: error / PI,
        converged,
    })
}

/// K on a uniform grid of real arguments, with cubic interpolation and a
/// rigorous interpolation-error term.
///
/// For real x, `|K''''(x)| <= (1/pi) integral a^4 |h(a)| da`; cubic Lagrange
/// interpolation on the central interval then errs by at most
/// `(9/16) step^4 M4 / 24`, and node errors are amplified by at most 1.25.
#[derive(Debug, Clone)]
pub struct KernelGrid {
    step: f64,
    values: Vec<f64>,
    node_error: f64,
    interpolation_bound: f64,
}

impl KernelGrid {
    pub fn build(kernel: &Kernel, x_max: f64, step: f64, tol: f64) -> Result<Self> {
        if !(step > 0.0) || !(x_max > 0.0) {
            return Err(Error::Domain("grid needs positive step and extent".into()));
        }
        let nodes = (x_max / step).ceil() as usize + 3;
        let mut values = Vec::with_capacity(nodes);
        let mut node_error = 0.0f64;
        for i in 0..nodes {
            let kv = k_of_z(kernel, Complex64::new(i as f64 * step, 0.0), tol)?;
            if !kv.converged {
                return Err(Error::NotConverged {
                    estimate: kv.quadrature_error,
                    tol,
                });
            }
            node_error = node_error.max(kv.quadrature_error);
            values.push(kv.value.re);
        }
        let m4 = integrate_adaptive(|a: f64| a.powi(4) * kernel.weight(a).abs(), 0.0, 1.0, 1e-12)?;
        let m4 = (m4.value + m4.error_estimate) / PI;
        let interpolation_bound = 9.0 / 16.0 / 24.0 * step.powi(4) * m4;
        Ok(Self {
            step,
            values,
            node_error,
            interpolation_bound,
        })
    }

    /// Largest argument the grid serves.
    pub fn x_max(&self) -> f64 {
        (self.values.len() - 3) as f64 * self.step
    }

    /// Certified bound on `|eval(x) - K(x)|` for every served x.
    pub fn error_bound(&self) -> f64 {
        self.interpolation_bound + 1.25 * self.node_error
    }

    /// Interpolated K(x), or None outside the grid.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let x = x.abs();
        if x > self.x_max() {
            return None;
        }
        let s = x / self.step;
        let i = (s.floor() as usize).min(self.values.len() - 3);
        let u = s - i as f64;
        let node = |k: isize| -> f64 { self.values[(i as isize + k).unsigned_abs()] };
        let (fm, f0, f1, f2) = (node(-1), node(0), node(1), node(2));
        // Lagrange weights on nodes -1, 0, 1, 2
        let wm = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let w0 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let w1 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let w2 = (u + 1.0) * u * (u - 1.0) / 6.0;
        Some(wm * fm + w0 * f0 + w1 * f1 + w2 * f2)
    }
}

/// Sampling plan for the Tsang property checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TsangGrid {
    pub x_max: f64,
    pub x_step: f64,
    /// Imaginary parts sampled; property (c) uses those with `|y| <= y_max`.
    pub y_values: Vec<f64>,
    pub y_max: f64,
}

impl Default for TsangGrid {
    fn default() -> Self {
        Self {
            x_max: 50.0,
            x_step: 0.1,
            y_values: vec![0.0, 0.45, -0.45, 0.9, -0.9],
            y_max: 0.9,
        }
    }
}

impl TsangGrid {
    fn points(&self) -> Vec<Complex64> {
        let n = (2.0 * self.x_max / self.x_step).round() as i64;
        let mut out = Vec::new();
        for &y in &self.y_values {
            for k in 0..=n {
                let x = -self.x_max + k as f64 * self.x_step;
                out.push(Complex64::new(x, y));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyViolation {
    pub re: f64,
    pub im: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub samples: usize,
    /// Smallest margin observed (value minus quadrature error for (a) and
    /// (c); `bound_C` minus the scaled magnitude for (b)).
    pub min_margin: f64,
    pub violations: Vec<PropertyViolation>,
}

impl PropertyCheck {
    fn new() -> Self {
        Self {
            samples: 0,
            min_margin: f64::INFINITY,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, z: Complex64, value: Complex64, margin: f64) {
        self.samples += 1;
        self.min_margin = self.min_margin.min(margin);
        if !(margin > 0.0) {
            self.violations.push(PropertyViolation {
                re: z.re,
                im: z.im,
                value_re: value.re,
                value_im: value.im,
                margin,
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TsangReport {
    pub kernel: String,
    pub bound_c: f64,
    /// Largest `|K(z)| |z|^2 e^{-|Im z|}` seen over samples with `|z| >= 1`.
    pub max_decay_ratio: f64,
    pub positivity_real: PropertyCheck,
    pub decay: PropertyCheck,
    pub positivity_strip: PropertyCheck,
    pub smoothness: SmoothnessReport,
}

impl TsangReport {
    pub fn passed(&self) -> bool {
        self.positivity_real.passed() && self.decay.passed() && self.positivity_strip.passed()
    }
}

/// Checks the three Tsang properties on a grid. Values are cached by
/// `(|x|, |y|)`: K is even and real on the real axis, so
/// `K(+-x +- iy)` is `K(|x| + i|y|)` or its conjugate.
pub fn verify_tsang_properties(kernel: &Kernel, grid: &TsangGrid, bound_c: f64, tol: f64) -> Result<TsangReport> {
    let mut cache: HashMap<(u64, u64), KernelValue> = HashMap::new();
    let mut positivity_real = PropertyCheck::new();
    let mut decay = PropertyCheck::new();
    let mut positivity_strip = PropertyCheck::new();
    let mut max_decay_ratio = 0.0f64;

    for z in grid.points() {
        let key = (z.re.abs().to_bits(), z.im.abs().to_bits());
        let kv = match cache.get(&key) {
            Some(kv) => *kv,
            None => {
                let kv = k_of_z(kernel, Complex64::new(z.re.abs(), z.im.abs()), tol)?;
                cache.insert(key, kv);
                kv
            }
        };
        let value = if (z.re < 0.0) != (z.im < 0.0) {
            kv.value.conj()
        } else {
            kv.value
        };
        let err = kv.quadrature_error;

        if z.im == 0.0 {
            positivity_real.record(z, value, value.re - err);
        }
        if z.im.abs() <= grid.y_max {
            positivity_strip.record(z, value, value.re - err);
        }
        if z.norm() >= 1.0 {
            let ratio = (value.norm() + err) * z.norm_sqr() * (-z.im.abs()).exp();
            max_decay_ratio = max_decay_ratio.max(ratio);
            decay.record(z, value, bound_c - ratio);
        }
    }
    Ok(TsangReport {
        kernel: kernel.name().to_string(),
        bound_c,
        max_decay_ratio,
        positivity_real,
        decay,
        positivity_strip,
        smoothness: kernel.smoothness_probe(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fejer_values() {
        assert_eq!(fejer_j(0.0), 1.0);
        assert_eq!(fejer_j(0.25), 0.75);
        assert_eq!(fejer_j(-1.5), 0.0);
    }

    #[test]
    fn montgomery_taylor_values() {
        assert_abs_diff_eq!(montgomery_taylor_j(0.0), 1.0061271908, epsilon = 1e-10);
        assert_abs_diff_eq!(montgomery_taylor_j(1.0), 0.0, epsilon = 1e-15);
        assert_eq!(montgomery_taylor_j(-0.3), montgomery_taylor_j(0.3));
        assert_eq!(montgomery_taylor_j(1.2), 0.0);
    }

    #[test]
    fn montgomery_taylor_shape() {
        // continuous at 1 and maximal at 0 on a dense grid
        assert!(montgomery_taylor_j(1.0 - 1e-9) < 1e-8);
        let max = (0..=10_000)
            .map(|k| montgomery_taylor_j(k as f64 / 10_000.0))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(max, montgomery_taylor_j(0.0));
        assert!((0..=1000).all(|k| montgomery_taylor_j(k as f64 / 1000.0) >= 0.0));
    }

    #[test]
    fn j_hat_reference_formulas() {
        assert_eq!(fejer_j_hat(0.0), 1.0);
        assert!(fejer_j_hat(1.0) < 1e-30);
        // j_M^(0) = integral of j_M over [-1, 1]
        let integral = 2.0 * integrate_adaptive(montgomery_taylor_j, 0.0, 1.0, 1e-13).unwrap().value;
        assert_abs_diff_eq!(montgomery_taylor_j_hat(0.0), integral, epsilon = 1e-10);
        let fejer_integral = 1.0;
        assert_abs_diff_eq!(fejer_j_hat(0.0), fejer_integral, epsilon = 1e-15);
    }

    #[test]
    fn khat_values() {
        let f = Kernel::fejer();
        let m = Kernel::montgomery_taylor();
        assert_eq!(khat(&f, 0.0), 1.0);
        assert_abs_diff_eq!(khat(&m, 0.0), 1.0061271908, epsilon = 1e-10);
        assert_eq!(khat(&f, 1.0), 0.0);
        assert_eq!(khat(&m, 1.0), 0.0);
        for t in [0.01, 0.05, 0.1, 0.15] {
            assert_eq!(khat(&m, t), khat(&m, -t));
        }
    }

    #[test]
    fn k_at_zero() {
        let f = k_of_z(&Kernel::fejer(), Complex64::new(0.0, 0.0), 1e-13).unwrap();
        assert_abs_diff_eq!(f.value.re, 0.464_064_839_283_936_4 / PI, epsilon = 1e-13);
        let m = k_of_z(&Kernel::montgomery_taylor(), Complex64::new(0.0, 0.0), 1e-13).unwrap();
        assert_abs_diff_eq!(m.value.re, 0.466_319_912_453_11 / PI, epsilon = 1e-13);
    }

    #[test]
    fn k_is_even() {
        let k = Kernel::montgomery_taylor();
        for z in [
            Complex64::new(3.7, 0.4),
            Complex64::new(-120.0, 0.9),
            Complex64::new(0.2, -0.7),
        ] {
            let a = k_of_z(&k, z, 1e-12).unwrap();
            let b = k_of_z(&k, -z, 1e-12).unwrap();
            assert!((a.value - b.value).norm() < 1e-12);
        }
    }

    #[test]
    fn k_agrees_with_fourier_representation() {
        // K(x) = 2 * integral_0^inf K^(t) cos(2 pi x t) dt, K^ supported on [0, 1/(2 pi)]
        let tol = 1e-10;
        for kernel in Kernel::builtins() {
            for x in [0.0, 0.5, 3.0, 17.5, 140.0] {
                let direct = k_of_z(&kernel, Complex64::new(x, 0.0), tol).unwrap();
                let upper = 1.0 / (2.0 * PI);
                let options = QuadOptions {
                    breakpoints: (1..64).map(|k| upper * k as f64 / 64.0).collect(),
                    ..QuadOptions::default()
                };
                let oracle = integrate_adaptive_with(
                    |t: f64| 2.0 * khat(&kernel, t) * (2.0 * PI * x * t).cos(),
                    0.0,
                    upper,
                    tol / 10.0,
                    &options,
                )
                .unwrap();
                assert!(
                    (direct.value.re - oracle.value).abs() <= 10.0 * tol,
                    "{} x={x}: {} vs {}",
                    kernel.name(),
                    direct.value.re,
                    oracle.value
                );
            }
        }
    }

    #[test]
    fn error_estimate_is_sane() {
        let k = Kernel::fejer();
        let tol = 1e-8;
        for z in [Complex64::new(2.0, 0.3), Complex64::new(250.0, 0.0)] {
            let a = k_of_z(&k, z, tol).unwrap();
            let b = k_of_z(&k, z, tol / 10.0).unwrap();
            assert!((a.value - b.value).norm() <= 11.0 * tol);
            assert!(a.converged && a.quadrature_error <= tol);
        }
    }

    #[test]
    fn grid_interpolation_within_bound() {
        let k = Kernel::fejer();
        let grid = KernelGrid::build(&k, 40.0, 0.02, 1e-13).unwrap();
        assert!(grid.error_bound() < 1e-10);
        for i in 0..400 {
            let x = i as f64 * 0.0997 + 0.013;
            let exact = k_of_z(&k, Complex64::new(x, 0.0), 1e-13).unwrap().value.re;
            let interp = grid.eval(x).unwrap();
            assert!((exact - interp).abs() <= grid.error_bound() + 1e-13, "x={x}");
            assert_eq!(grid.eval(-x), grid.eval(x));
        }
        assert!(grid.eval(41.0).is_none());
    }

    #[test]
    fn decay_constants_bound_large_arguments() {
        for kernel in Kernel::builtins() {
            let c = kernel.decay_constants();
            assert!(c.endpoint < 1e-12, "{}", kernel.name());
            assert!(c.third.is_finite() && c.slope > 0.0);
            for z in [
                Complex64::new(1.0, 0.0),
                Complex64::new(2.5, 0.9),
                Complex64::new(30.0, 0.0),
                Complex64::new(400.0, 0.8),
                Complex64::new(-77.0, -0.5),
            ] {
                let v = k_of_z(&kernel, z, 1e-12).unwrap();
                assert!(v.value.norm() <= c.bound(z), "{} z={z}", kernel.name());
            }
        }
    }

    #[test]
    fn tabulated_kernel() {
        let k = Kernel::tabulated("tri", vec![(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]).unwrap();
        for a in [0.0, 0.1, 0.33, 0.5, 0.9, 1.0] {
            assert_abs_diff_eq!(k.j(a), fejer_j(a), epsilon = 1e-15);
            assert_abs_diff_eq!(k.j(-a), fejer_j(a), epsilon = 1e-15);
        }
        assert_eq!(k.j(1.5), 0.0);
        assert!(Kernel::tabulated("x", vec![(0.0, 1.0), (0.5, 0.0)]).is_err());
        assert!(Kernel::tabulated("x", vec![(0.0, 1.0), (1.0, -0.1)]).is_err());
    }

    #[test]
    fn kernel_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mine.csv");
        std::fs::write(&path, "# alpha,j\n0,1\n1,0\n").unwrap();
        let k = Kernel::from_file(&path).unwrap();
        assert_eq!(k.name(), "mine");
        assert_eq!(k.j(0.25), 0.75);
        std::fs::write(&path, "alpha,j\n0,1\n1,0.0\n").unwrap();
        assert_eq!(Kernel::from_file(&path).unwrap().j(0.5), 0.5);
        std::fs::write(&path, "0,1\n1\n").unwrap();
        assert!(matches!(Kernel::from_file(&path), Err(Error::Parse { line: 2, .. })));
        std::fs::write(&path, "alpha,j\n0,1\nj,0\n").unwrap();
        assert!(matches!(Kernel::from_file(&path), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn builtin_lookup() {
        assert_eq!(Kernel::builtin("mt").unwrap().name(), "montgomery-taylor");
        assert_eq!(Kernel::builtin("Fejer").unwrap().name(), "fejer");
        assert!(Kernel::builtin("bogus").is_none());
    }

    #[test]
    fn smoothness_probe_flags_kinks() {
        assert!(Kernel::fejer().smoothness_probe().looks_smooth);
        assert!(Kernel::montgomery_taylor().smoothness_probe().looks_smooth);
        let kinked = Kernel::tabulated("kink", vec![(0.0, 1.0), (0.50025, 1.0), (1.0, 0.0)]).unwrap();
        assert!(!kinked.smoothness_probe().looks_smooth);
    }
}
