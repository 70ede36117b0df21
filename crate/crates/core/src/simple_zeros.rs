//! Kernel-weighted pair sums and the simple-zero proportion bound.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{k_of_z, DecayConstants, Kernel, KernelGrid};
use crate::pair_correlation::weight_w;
use crate::quadrature::integrate_adaptive;
use crate::summation::{chunked_reduce, CompensatedSum, DEFAULT_CHUNK};
use crate::zero_table::{ZeroTable, ZetaZero};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimpleZeroBound {
    pub kernel_name: String,
    /// `K^(0) = j(0)`.
    pub khat0: f64,
    /// `2 * integral_0^1 a j(a) sech(a) da`.
    pub alpha_moment: f64,
    /// `pi K(0) = integral_0^1 j(a) sech(a) da`.
    #[serde(rename = "piK0")]
    pub pi_k0: f64,
    pub bound: f64,
    pub quadrature_error: f64,
}

impl SimpleZeroBound {
    pub fn recomputed_bound(&self) -> f64 {
        2.0 - (self.khat0 + self.alpha_moment) / (2.0 * self.pi_k0)
    }

    /// `bound + (khat0 + alpha_moment) / (2 piK0) - 2`, zero up to rounding.
    pub fn consistency_residual(&self) -> f64 {
        self.bound + (self.khat0 + self.alpha_moment) / (2.0 * self.pi_k0) - 2.0
    }
}

/// Lower bound on the proportion of simple zeros,
/// `2 - (K^(0) + 2 int a K^(a/2pi) da) / (2 pi K(0))`, with the o(1) dropped.
pub fn simple_zero_bound(kernel: &Kernel, tol: f64) -> Result<SimpleZeroBound> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let moment = integrate_adaptive(|a: f64| 2.0 * a * kernel.weight(a), 0.0, 1.0, tol)?.require_converged(tol)?;
    let base = integrate_adaptive(|a: f64| kernel.weight(a), 0.0, 1.0, tol)?.require_converged(tol)?;
    if !(base.value > base.error_estimate) {
        return Err(Error::DegenerateKernel(format!(
            "{}: integral of j sech is {} (K(0) must be positive)",
            kernel.name(),
            base.value
        )));
    }
    let khat0 = kernel.j_at_0();
    let bound = 2.0 - (khat0 + moment.value) / (2.0 * base.value);
    Ok(SimpleZeroBound {
        kernel_name: kernel.name().to_string(),
        khat0,
        alpha_moment: moment.value,
        pi_k0: base.value,
        bound,
        quadrature_error: moment.error_estimate + base.error_estimate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSumOptions {
    pub tol: f64,
    /// Largest `|gamma - gamma'|` evaluated in the close sum; `None` picks the
    /// smallest band whose truncation bound is at most 0.1% of `rhs_main`.
    pub band: Option<f64>,
    /// Close-pair cut on `|beta - beta'|`; `None` means `1 / log T`.
    pub threshold: Option<f64>,
    /// Interpolate real-argument K values on a grid of this step instead of
    /// integrating each one; the interpolation bound joins `evaluation_error`.
    pub grid_step: Option<f64>,
}

impl Default for KernelSumOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            band: None,
            threshold: None,
            grid_step: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelPairSum {
    pub kernel: String,
    #[serde(rename = "T")]
    pub t: f64,
    pub threshold: f64,
    pub band: f64,
    /// `2 pi sum Re K((gamma - gamma' - i(beta - beta')) log T)` over close pairs.
    pub close_sum: f64,
    /// `2 pi Re sum K(...) w(rho - rho')` over pairs with `|beta - beta'| >= threshold`.
    pub s_of_t: f64,
    /// `(K^(0) + alpha_moment) (T / 2pi) log T`.
    pub rhs_main: f64,
    /// Certified bound on close pairs beyond the band.
    pub truncation_bound: f64,
    /// Accumulated quadrature or interpolation error of the evaluated terms.
    pub evaluation_error: f64,
    pub close_pairs: u64,
    pub offline_pairs: u64,
    /// Smallest `Re K` among evaluated close terms.
    pub min_close_term: f64,
    pub nonpositive_close_terms: u64,
    /// `K(0)`.
    pub k0: f64,
    /// N(T) with multiplicity.
    pub zero_count: u64,
}

impl KernelPairSum {
    pub fn ratio(&self) -> f64 {
        self.close_sum / self.rhs_main
    }

    /// `close_sum / (2 pi K(0))`.
    pub fn multiplicity_upper_bound(&self) -> f64 {
        self.close_sum / (2.0 * PI * self.k0)
    }
}

// K on real arguments, exact or interpolated
enum RealK<'a> {
    Exact { kernel: &'a Kernel, tol: f64 },
    Grid(KernelGrid),
}

impl RealK<'_> {
    fn eval(&self, x: f64) -> Result<(f64, f64)> {
        match self {
            RealK::Grid(grid) => {
                if let Some(v) = grid.eval(x) {
                    return Ok((v, grid.error_bound()));
                }
                Err(Error::Domain(format!("argument {x} beyond the kernel grid")))
            }
            RealK::Exact { kernel, tol } => {
                let kv = k_of_z(kernel, Complex64::new(x.abs(), 0.0), *tol)?;
                if !kv.converged {
                    return Err(Error::NotConverged {
                        estimate: kv.quadrature_error,
                        tol: *tol,
                    });
                }
                Ok((kv.value.re, kv.quadrature_error))
            }
        }
    }
}

fn complex_k(
    kernel: &Kernel,
    z: Complex64,
    tol: f64,
    cache: &mut HashMap<(u64, u64), (Complex64, f64)>,
) -> Result<(Complex64, f64)> {
    let key = (z.re.abs().to_bits(), z.im.abs().to_bits());
    let (v, err) = match cache.get(&key) {
        Some(hit) => *hit,
        None => {
            let kv = k_of_z(kernel, Complex64::new(z.re.abs(), z.im.abs()), tol)?;
            if !kv.converged {
                return Err(Error::NotConverged {
                    estimate: kv.quadrature_error,
                    tol,
                });
            }
            cache.insert(key, (kv.value, kv.quadrature_error));
            (kv.value, kv.quadrature_error)
        }
    };
    // K is even and real on the real axis
    let v = if (z.re < 0.0) != (z.im < 0.0) { v.conj() } else { v };
    Ok((v, err))
}

/// Bound on the close pairs with `|gamma - gamma'| > band`. Each unit window
/// beyond the band holds at most `D` zeros (with multiplicity), and a close
/// pair at distance `g` has `|K| <= decay.bound_at(g log T, y)` where `y` is
/// the largest `|beta - beta'| log T` among close pairs.
fn close_truncation_bound(decay: &DecayConstants, mass: f64, d: f64, band: f64, t: f64, y: f64) -> f64 {
    if band >= t {
        return 0.0;
    }
    let log_t = t.ln();
    let windows = (t - band).ceil() as usize;
    let mut total = CompensatedSum::new();
    for k in 0..windows {
        total.add(decay.bound_at((band + k as f64) * log_t, y));
    }
    2.0 * PI * mass * 2.0 * d * total.value()
}

fn default_band(decay: &DecayConstants, mass: f64, d: f64, t: f64, y: f64, rhs_main: f64) -> f64 {
    let target = 1e-3 * rhs_main;
    let fits = |b: f64| close_truncation_bound(decay, mass, d, b, t, y) <= target;
    let mut hi = 1.0f64.min(t);
    while hi < t && !fits(hi) {
        hi *= 2.0;
    }
    if hi >= t {
        return t;
    }
    let mut lo = hi / 2.0;
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Kernel-weighted pair sums over the zeros with `gamma <= T`.
pub fn kernel_pair_sum(
    table: &ZeroTable,
    kernel: &Kernel,
    t: f64,
    options: &KernelSumOptions,
) -> Result<KernelPairSum> {
    if !(t >= 3.0) {
        return Err(Error::Domain(format!("T must be at least 3, got {t}")));
    }
    if t > table.coverage() {
        return Err(Error::Coverage {
            requested: t,
            available: table.coverage(),
        });
    }
    let log_t = t.ln();
    let threshold = options.threshold.unwrap_or(1.0 / log_t);
    if !(threshold > 0.0) {
        return Err(Error::Domain(format!("threshold must be positive, got {threshold}")));
    }
    let constants = simple_zero_bound(kernel, options.tol.max(1e-13))?;
    let k0 = constants.pi_k0 / PI;
    let rhs_main = (constants.khat0 + constants.alpha_moment) * t / (2.0 * PI) * log_t;
    let zeros: &[ZetaZero] = table.up_to(t);
    let mass = table.count_up_to(t) as f64;
    let d = table.max_unit_density(t) as f64;
    let decay = kernel.decay_constants();

    let (dmin, dmax) = zeros
        .iter()
        .fold((0.0f64, 0.0f64), |(lo, hi), z| (lo.min(z.delta), hi.max(z.delta)));
    let y_close = (dmax - dmin).min(threshold) * log_t;
    let band = match options.band {
        Some(b) if b > 0.0 => b,
        Some(b) => return Err(Error::Domain(format!("band must be positive, got {b}"))),
        None => default_band(&decay, mass, d, t, y_close, rhs_main),
    };
    let truncation_bound = close_truncation_bound(&decay, mass, d, band, t, y_close);

    let real_k = match options.grid_step {
        Some(step) => RealK::Grid(KernelGrid::build(kernel, band * log_t + 1.0, step, options.tol)?),
        None => RealK::Exact {
            kernel,
            tol: options.tol,
        },
    };

    struct Partial {
        close: CompensatedSum,
        error: CompensatedSum,
        pairs: u64,
        min_term: f64,
        nonpositive: u64,
        failure: Option<Error>,
    }

    let gammas: Vec<f64> = zeros.iter().map(|z| z.gamma).collect();
    let run = |range: std::ops::Range<usize>| {
        let mut p = Partial {
            close: CompensatedSum::new(),
            error: CompensatedSum::new(),
            pairs: 0,
            min_term: f64::INFINITY,
            nonpositive: 0,
            failure: None,
        };
        let mut cache = HashMap::new();
        let mut step = || -> Result<()> {
            for i in range.clone() {
                let zi = &zeros[i];
                let lo = gammas.partition_point(|&g| g < zi.gamma - band);
                let hi = gammas.partition_point(|&g| g <= zi.gamma + band);
                for zj in &zeros[lo..hi] {
                    let db = zi.delta - zj.delta;
                    if db.abs() >= threshold {
                        continue;
                    }
                    let weight = (zi.multiplicity * zj.multiplicity) as f64;
                    let z = Complex64::new(zi.gamma - zj.gamma, -db) * log_t;
                    let (value, err) = if db == 0.0 {
                        real_k.eval(z.re)?
                    } else {
                        let (v, e) = complex_k(kernel, z, options.tol, &mut cache)?;
                        (v.re, e)
                    };
                    p.close.add(weight * value);
                    p.error.add(weight * err);
                    p.pairs += 1;
                    p.min_term = p.min_term.min(value);
                    if !(value > 0.0) {
                        p.nonpositive += 1;
                    }
                }
            }
            Ok(())
        };
        if let Err(e) = step() {
            p.failure = Some(e);
        }
        p
    };
    let merged = chunked_reduce(zeros.len(), DEFAULT_CHUNK, run, |a, b| {
        a.close.merge(&b.close);
        a.error.merge(&b.error);
        a.pairs += b.pairs;
        a.min_term = a.min_term.min(b.min_term);
        a.nonpositive += b.nonpositive;
        if a.failure.is_none() {
            a.failure = b.failure;
        }
    });
    let (close, close_error, close_pairs, min_term, nonpositive) = match merged {
        None => (0.0, 0.0, 0, f64::INFINITY, 0),
        Some(p) => {
            if let Some(e) = p.failure {
                return Err(e);
            }
            (p.close.value(), p.error.value(), p.pairs, p.min_term, p.nonpositive)
        }
    };

    // off-line pairs need at least one zero off the line
    let mut s_sum = CompensatedSum::new();
    let mut s_error = CompensatedSum::new();
    let mut offline_pairs = 0u64;
    let mut cache = HashMap::new();
    if dmax - dmin >= threshold {
        for zi in zeros {
            for zj in zeros {
                let db = zi.delta - zj.delta;
                if db.abs() < threshold {
                    continue;
                }
                let weight = (zi.multiplicity * zj.multiplicity) as f64;
                let z = Complex64::new(zi.gamma - zj.gamma, -db) * log_t;
                let (kv, err) = complex_k(kernel, z, options.tol, &mut cache)?;
                let w = weight_w(Complex64::new(db, zi.gamma - zj.gamma))?;
                s_sum.add(weight * (kv * w).re);
                s_error.add(weight * err * w.norm());
                offline_pairs += 1;
            }
        }
    }

    Ok(KernelPairSum {
        kernel: kernel.name().to_string(),
        t,
        threshold,
        band,
        close_sum: 2.0 * PI * close,
        s_of_t: 2.0 * PI * s_sum.value(),
        rhs_main,
        truncation_bound,
        evaluation_error: 2.0 * PI * (close_error + s_error.value()),
        close_pairs,
        offline_pairs,
        min_close_term: min_term,
        nonpositive_close_terms: nonpositive,
        k0,
        zero_count: table.count_up_to(t),
    })
}

/// `close_sum / (2 pi K(0))`, the empirical bound on the sum of multiplicities.
pub fn multiplicity_upper_bound(table: &ZeroTable, kernel: &Kernel, t: f64, options: &KernelSumOptions) -> Result<f64> {
    Ok(kernel_pair_sum(table, kernel, t, options)?.multiplicity_upper_bound())
}
