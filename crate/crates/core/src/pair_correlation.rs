//! Empirical pair correlation over a zero table.
//!
//! `F(x, T) = sum over ordered pairs x^{u} w(u)` with
//! `u = delta + delta' + i(gamma - gamma')` and `w(u) = 4 / (4 - u^2)`,
//! counting each zero with its multiplicity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_real_line, QuadOptions, TailDecay};
use crate::summation::{chunked_reduce, ComplexSum, DEFAULT_CHUNK};
use crate::zero_table::{ZeroTable, ZetaZero};

/// `w(u) = 4 / (4 - u^2)`.
pub fn weight_w(u: Complex64) -> Result<Complex64> {
    let d = Complex64::new(4.0, 0.0) - u * u;
    if d.norm() == 0.0 {
        return Err(Error::Domain(format!("w has a pole at u = {u}")));
    }
    Ok(Complex64::new(4.0, 0.0) / d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairSumResult {
    #[serde(serialize_with = "crate::serde_complex")]
    pub value: Complex64,
    /// Certified bound on the omitted terms; 0 when every pair is summed.
    pub truncation_bound: f64,
    pub pairs_evaluated: u64,
    #[serde(rename = "T")]
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "band")]
pub enum PairMode {
    Exact,
    Banded(f64),
}

// per-zero factors shared by every pair
struct Prepared {
    gamma: Vec<f64>,
    delta: Vec<f64>,
    amp: Vec<f64>,
    phase: Vec<Complex64>,
}

impl Prepared {
    fn new(zeros: &[ZetaZero], log_x: f64) -> Self {
        let mut p = Prepared {
            gamma: Vec::with_capacity(zeros.len()),
            delta: Vec::with_capacity(zeros.len()),
            amp: Vec::with_capacity(zeros.len()),
            phase: Vec::with_capacity(zeros.len()),
        };
        for z in zeros {
            let m = z.multiplicity as f64;
            p.gamma.push(z.gamma);
            p.delta.push(z.delta);
            p.amp.push(m * (z.delta * log_x).exp());
            let (s, c) = (z.gamma * log_x).sin_cos();
            p.phase.push(Complex64::new(c, s));
        }
        p
    }

    #[inline]
    fn term(&self, i: usize, j: usize) -> Complex64 {
        let u = Complex64::new(self.delta[i] + self.delta[j], self.gamma[i] - self.gamma[j]);
        let w = Complex64::new(4.0, 0.0) / (Complex64::new(4.0, 0.0) - u * u);
        self.phase[i] * self.phase[j].conj() * w * (self.amp[i] * self.amp[j])
    }

    fn sum(&self, band: Option<f64>) -> (Complex64, u64) {
        let n = self.gamma.len();
        let partial = |range: std::ops::Range<usize>| {
            let mut acc = ComplexSum::new();
            let mut pairs = 0u64;
            for i in range {
                let (lo, hi) = match band {
                    None => (0, n),
                    Some(b) => (
                        self.gamma.partition_point(|&g| g < self.gamma[i] - b),
                        self.gamma.partition_point(|&g| g <= self.gamma[i] + b),
                    ),
                };
                for j in lo..hi {
                    acc.add(self.term(i, j));
                }
                pairs += (hi - lo) as u64;
            }
            (acc, pairs)
        };
        let merged = chunked_reduce(n, DEFAULT_CHUNK, partial, |a, b| {
            a.0.merge(&b.0);
            a.1 += b.1;
        });
        merged.map_or((Complex64::new(0.0, 0.0), 0), |(acc, pairs)| (acc.value(), pairs))
    }
}

fn zeros_for(table: &ZeroTable, t: f64) -> Result<&[ZetaZero]> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("T must be positive, got {t}")));
    }
    if t > table.coverage() {
        return Err(Error::Coverage {
            requested: t,
            available: table.coverage(),
        });
    }
    Ok(table.up_to(t))
}

/// F(x, T) summed over every ordered pair.
pub fn f_exact(table: &ZeroTable, x: f64, t: f64) -> Result<PairSumResult> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let zeros = zeros_for(table, t)?;
    let (value, pairs) = Prepared::new(zeros, x.ln()).sum(None);
    Ok(PairSumResult {
        value,
        truncation_bound: 0.0,
        pairs_evaluated: pairs,
        t,
        x,
    })
}

/// F(x, T) over pairs with `|gamma - gamma'| <= band`.
///
/// An omitted pair has `|x^u| <= x^{2 Theta - 1}` and `|w(u)| <= 4 / g^2`
/// with `g = |gamma - gamma'| > band`. Counting at most `D` zeros (with
/// multiplicity) in each unit window beyond the band on either side gives
/// `truncation_bound = x^{2 Theta - 1} * sum_rho m_rho * 8 D (1/band + 1/band^2)`.
pub fn f_banded(table: &ZeroTable, x: f64, t: f64, band: f64) -> Result<PairSumResult> {
    if !(band > 0.0) {
        return Err(Error::Domain(format!("band must be positive, got {band}")));
    }
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::Domain(format!("banded mode needs x >= 1, got {x}")));
    }
    let zeros = zeros_for(table, t)?;
    if zeros.is_empty() {
        return Ok(PairSumResult {
            value: Complex64::new(0.0, 0.0),
            truncation_bound: 0.0,
            pairs_evaluated: 0,
            t,
            x,
        });
    }
    let (value, pairs) = Prepared::new(zeros, x.ln()).sum(Some(band));
    let theta = table.theta_up_to(t)?;
    let d = table.max_unit_density(t) as f64;
    let mass = table.count_up_to(t) as f64;
    let truncation_bound = x.powf(2.0 * theta - 1.0) * mass * 8.0 * d * (1.0 / band + 1.0 / (band * band));
    Ok(PairSumResult {
        value,
        truncation_bound,
        pairs_evaluated: pairs,
        t,
        x,
    })
}

pub fn f_pair_sum(table: &ZeroTable, x: f64, t: f64, mode: PairMode) -> Result<PairSumResult> {
    match mode {
        PairMode::Exact => f_exact(table, x, t),
        PairMode::Banded(band) => f_banded(table, x, t, band),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FAlphaCurve {
    #[serde(rename = "T")]
    pub t: f64,
    pub alphas: Vec<f64>,
    pub empirical: Vec<f64>,
    pub theoretical: Vec<f64>,
    /// Truncation bounds divided by `normalization`, in the units of `empirical`.
    pub truncation_bounds: Vec<f64>,
    pub pairs_evaluated: Vec<u64>,
    pub normalization: f64,
}

impl FAlphaCurve {
    /// Mean of `|empirical - theoretical|`.
    pub fn mean_abs_deviation(&self) -> f64 {
        let n = self.alphas.len().max(1) as f64;
        self.deviations().map(f64::abs).sum::<f64>() / n
    }

    pub fn deviations(&self) -> impl Iterator<Item = f64> + '_ {
        self.empirical.iter().zip(&self.theoretical).map(|(e, t)| e - t)
    }
}

/// Main terms of the asymptotic, `T^{-2 alpha} log T + alpha`.
pub fn f_alpha_theoretical(alpha: f64, t: f64) -> f64 {
    (-2.0 * alpha * t.ln()).exp() * t.ln() + alpha
}

/// F(alpha) = Re F(T^alpha, T) / ((T / 2pi) log T) on a grid of alphas.
pub fn f_alpha_curve(table: &ZeroTable, t: f64, alphas: &[f64], mode: PairMode) -> Result<FAlphaCurve> {
    if !(t >= 3.0) {
        return Err(Error::Domain(format!("T must be at least 3, got {t}")));
    }
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::Domain(format!("alpha {a} outside [0, 1]")));
    }
    let log_t = t.ln();
    let normalization = t / (2.0 * PI) * log_t;
    let mut curve = FAlphaCurve {
        t,
        alphas: alphas.to_vec(),
        empirical: Vec::with_capacity(alphas.len()),
        theoretical: Vec::with_capacity(alphas.len()),
        truncation_bounds: Vec::with_capacity(alphas.len()),
        pairs_evaluated: Vec::with_capacity(alphas.len()),
        normalization,
    };
    for &alpha in alphas {
        let x = (alpha * log_t).exp();
        let r = f_pair_sum(table, x, t, mode)?;
        curve.empirical.push(r.value.re / normalization);
        curve.theoretical.push(f_alpha_theoretical(alpha, t));
        curve.truncation_bounds.push(r.truncation_bound / normalization);
        curve.pairs_evaluated.push(r.pairs_evaluated);
    }
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    /// Pair-sum side (real part).
    pub direct: f64,
    /// Integral side.
    pub integral: f64,
    pub quadrature_error: f64,
    pub difference: f64,
    pub tol: f64,
    pub passed: bool,
}

impl IdentityReport {
    fn new(direct: f64, integral: f64, quadrature_error: f64, tol: f64) -> Self {
        let difference = (direct - integral).abs();
        Self {
            direct,
            integral,
            quadrature_error,
            difference,
            tol,
            passed: difference <= tol + quadrature_error,
        }
    }
}

/// Checks `F(x, T) = (2/pi) integral |sum m x^{delta + i gamma} / (1 + (t - gamma + i delta)^2)|^2 dt`.
///
/// For `|t| >= 2 gamma_max` every denominator is at least `t^2 / 4`, so the
/// integrand is at most `(2/pi) 16 A^2 / t^4` with `A = sum m x^delta`.
pub fn verify_pair_integral_identity(table: &ZeroTable, x: f64, t: f64, tol: f64) -> Result<IdentityReport> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let direct = f_exact(table, x, t)?;
    let zeros = table.up_to(t);
    let log_x = x.ln();
    let terms: Vec<(Complex64, f64, f64)> = zeros
        .iter()
        .map(|z| {
            let c = Complex64::from_polar((z.delta * log_x).exp(), z.gamma * log_x) * z.multiplicity as f64;
            (c, z.gamma, z.delta)
        })
        .collect();
    let amplitude: f64 = terms.iter().map(|(c, _, _)| c.norm()).sum();
    let integrand = |s: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(c, gamma, delta) in &terms {
            let v = Complex64::new(s - gamma, delta);
            acc += c / (v * v + 1.0);
        }
        2.0 / PI * acc.norm_sqr()
    };
    let gamma_max = zeros.last().map_or(1.0, |z| z.gamma);
    let decay = TailDecay {
        constant: 2.0 / PI * 16.0 * amplitude * amplitude,
        exponent: 4.0,
        valid_from: (2.0 * gamma_max).max(1.0),
    };
    let mut breakpoints: Vec<f64> = Vec::new();
    let lo = zeros.first().map_or(0.0, |z| z.gamma).floor() - 2.0;
    let mut b = lo;
    while b <= gamma_max + 2.0 {
        breakpoints.push(b);
        b += 1.0;
    }
    let options = QuadOptions {
        breakpoints,
        ..QuadOptions::default()
    };
    let r = integrate_real_line(integrand, decay, tol / 2.0, &options)?.require_converged(tol / 2.0)?;
    Ok(IdentityReport::new(direct.value.re, r.value, r.error_estimate, tol))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueReport {
    #[serde(serialize_with = "crate::serde_complex")]
    pub a: Complex64,
    #[serde(serialize_with = "crate::serde_complex")]
    pub quadrature: Complex64,
    #[serde(serialize_with = "crate::serde_complex")]
    pub closed_form: Complex64,
    pub quadrature_error: f64,
    pub difference: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Checks `integral dt / ((1 + t^2)(1 + (t + a)^2)) = 2 pi / (4 + a^2)` for `|Im a| < 1`.
pub fn verify_residue_integral(a: Complex64, tol: f64) -> Result<ResidueReport> {
    if !(a.im.abs() < 1.0) || !a.re.is_finite() {
        return Err(Error::Domain(format!("need |Im a| < 1, got a = {a}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let f = |t: f64| {
        let s = Complex64::new(t, 0.0) + a;
        Complex64::new(1.0, 0.0) / ((1.0 + t * t) * (s * s + 1.0))
    };
    // |1 + (t + a)^2| >= (t + Re a)^2 >= t^2 / 4 once |t| >= 2 |Re a| + 1
    let decay = TailDecay {
        constant: 4.0,
        exponent: 4.0,
        valid_from: 2.0 * a.re.abs() + 1.0,
    };
    // the second factor peaks at t = -Re a with width 1 - |Im a|
    let width = 1.0 - a.im.abs();
    let mut breakpoints = vec![0.0, -a.re];
    for k in 1..=6 {
        let d = width * (1 << k) as f64 / 8.0;
        breakpoints.extend([-a.re - d, -a.re + d]);
    }
    let options = QuadOptions {
        breakpoints,
        ..QuadOptions::default()
    };
    let r = integrate_real_line(f, decay, tol / 2.0, &options)?.require_converged(tol / 2.0)?;
    let closed_form = Complex64::new(2.0 * PI, 0.0) / (a * a + 4.0);
    let difference = (r.value - closed_form).norm();
    Ok(ResidueReport {
        a,
        quadrature: r.value,
        closed_form,
        quadrature_error: r.error_estimate,
        difference,
        tol,
        passed: difference <= tol,
    })
}
