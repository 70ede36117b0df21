//! Both sides of the symmetrized explicit formula
//!
//! ```text
//! sum_rho 2 x^{delta + i(gamma - t)} / (1 + (t - gamma + i delta)^2)
//!     = -sum_n Lambda(n) n^{-1/2 - it} min(n/x, x/n) + log(|t| + 2) / x + error
//! ```
//!
//! with the error made of `O(1/x)`, `O(x^{1/2} / (1 + t^2))` and
//! `O(x^{-5/2} / (|t| + 2))` terms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::summation::ComplexSum;
use crate::zero_table::ZeroTable;

/// `|psi(u) - u| <= 0.94 sqrt(u)` for `11 < u <= 1e19` (Buthe).
const PSI_SQRT_CONSTANT: f64 = 0.94;
const PSI_SQRT_RANGE: f64 = 1e19;
/// `psi(u) < 1.03883 u` for all `u > 0` (Rosser and Schoenfeld).
const PSI_LINEAR_CONSTANT: f64 = 1.03883;

#[derive(Debug, Clone, PartialEq)]
pub struct VonMangoldtTable {
    limit: usize,
    // values[n] = Lambda(n); values[0] is unused
    values: Vec<f64>,
}

impl VonMangoldtTable {
    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Lambda(n) for `1 <= n <= limit`.
    pub fn get(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        self.values.get(n).copied()
    }

    pub fn values(&self) -> &[f64] {
        &self.values[1..]
    }

    /// Chebyshev's psi(n) = sum of Lambda(k) for k <= n.
    pub fn psi(&self, n: usize) -> f64 {
        self.values[1..=n.min(self.limit)].iter().sum()
    }
}

/// Lambda(n) for `n <= limit` by an Eratosthenes sieve over prime powers.
pub fn sieve_von_mangoldt(limit: usize) -> Result<VonMangoldtTable> {
    if limit < 2 {
        return Err(Error::Domain(format!("sieve limit must be at least 2, got {limit}")));
    }
    if limit > (isize::MAX as usize) / std::mem::size_of::<f64>() - 1 {
        return Err(Error::Domain(format!(
            "sieve limit {limit} overflows memory addressing"
        )));
    }
    let mut values = vec![0.0; limit + 1];
    let mut composite = vec![false; limit + 1];
    for p in 2..=limit {
        if composite[p] {
            continue;
        }
        let mut multiple = p.saturating_mul(p);
        while multiple <= limit {
            composite[multiple] = true;
            multiple += p;
        }
        let log_p = (p as f64).ln();
        let mut power = p;
        loop {
            values[power] = log_p;
            match power.checked_mul(p) {
                Some(next) if next <= limit => power = next,
                _ => break,
            }
        }
    }
    Ok(VonMangoldtTable { limit, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedSum {
    /// Sum over the retained terms.
    #[serde(serialize_with = "crate::serde_complex")]
    pub partial: Complex64,
    /// Smooth approximation of the omitted terms (zero when none is used).
    #[serde(serialize_with = "crate::serde_complex")]
    pub tail_estimate: Complex64,
    /// Bound on `|omitted terms - tail_estimate|`.
    pub tail_bound: f64,
}

impl TruncatedSum {
    pub fn value(&self) -> Complex64 {
        self.partial + self.tail_estimate
    }
}

/// Sum over zeros with `|gamma| <= gamma_cutoff`, conjugates included.
///
/// For `|gamma| > Z >= 2|t| + 2` each term is at most `8 x^{1/2} / gamma^2`.
/// With `N(u) <= (u/2pi) log(u/2pi)` for `u >= 30` (from the explicit
/// Riemann-von Mangoldt bound of Trudgian) the omitted terms total at most
/// `16 x^{1/2} (log(Z/2pi) + 1) / (pi Z)`.
pub fn lhs_zero_sum(table: &ZeroTable, x: f64, t: f64, gamma_cutoff: f64) -> Result<TruncatedSum> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be at least 1, got {x}")));
    }
    if gamma_cutoff > table.coverage() {
        return Err(Error::Coverage {
            requested: gamma_cutoff,
            available: table.coverage(),
        });
    }
    let log_x = x.ln();
    let mut acc = ComplexSum::new();
    for z in table.up_to(gamma_cutoff) {
        let m = z.multiplicity as f64;
        let amp = 2.0 * m * (z.delta * log_x).exp();
        for gamma in [z.gamma, -z.gamma] {
            let s = Complex64::new(t - gamma, z.delta);
            let phase = Complex64::from_polar(amp, (gamma - t) * log_x);
            acc.add(phase / (s * s + 1.0));
        }
    }
    let z_cut = gamma_cutoff;
    let tail_bound = if z_cut >= (2.0 * t.abs() + 2.0).max(30.0) {
        16.0 * x.sqrt() * ((z_cut / (2.0 * PI)).ln() + 1.0) / (PI * z_cut)
    } else {
        f64::INFINITY
    };
    Ok(TruncatedSum {
        partial: acc.value(),
        tail_estimate: Complex64::new(0.0, 0.0),
        tail_bound,
    })
}

/// `-sum_{n <= n_cutoff} Lambda(n) n^{-1/2 - it} min(n/x, x/n) + log(|t| + 2)/x`.
///
/// Beyond the cutoff the weight is `x/n`, and partial summation against
/// `psi(u) = u + E(u)` splits the omitted terms into the smooth part
/// `x N^{-1/2 - it} / (1/2 + it)` (reported as `tail_estimate`) and a
/// remainder bounded by `0.94 x (1 + |3/2 + it|) / N` plus a negligible
/// contribution from beyond `1e19`.
pub fn rhs_main(vm: &VonMangoldtTable, x: f64, t: f64, n_cutoff: usize) -> Result<TruncatedSum> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::Domain(format!("x must be at least 1, got {x}")));
    }
    if n_cutoff > vm.limit() {
        return Err(Error::Coverage {
            requested: n_cutoff as f64,
            available: vm.limit() as f64,
        });
    }
    if (n_cutoff as f64) < x || n_cutoff < 12 {
        return Err(Error::Domain(format!(
            "n_cutoff {n_cutoff} must be at least max(x, 12) = {}",
            x.max(12.0)
        )));
    }
    let mut acc = ComplexSum::new();
    for n in 2..=n_cutoff {
        let lambda = vm.values[n];
        if lambda == 0.0 {
            continue;
        }
        let nf = n as f64;
        let weight = (nf / x).min(x / nf);
        let term = Complex64::from_polar(lambda * weight / nf.sqrt(), -t * nf.ln());
        acc.add(-term);
    }
    acc.add(Complex64::new((t.abs() + 2.0).ln() / x, 0.0));

    let nf = n_cutoff as f64;
    let s = Complex64::new(0.5, t);
    let smooth = Complex64::from_polar(x / nf.sqrt(), -t * nf.ln()) / s;
    let slope = Complex64::new(1.5, t).norm();
    let tail_bound = PSI_SQRT_CONSTANT * x * (1.0 + slope) / nf
        + (PSI_LINEAR_CONSTANT + 1.0) * x * (1.0 + slope) * 2.0 / PSI_SQRT_RANGE.sqrt();
    Ok(TruncatedSum {
        partial: acc.value(),
        tail_estimate: -smooth,
        tail_bound,
    })
}

/// Frozen constants of the error envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl ErrorBudget {
    pub fn envelope(&self, x: f64, t: f64) -> f64 {
        self.c1 / x + self.c2 * x.sqrt() / (1.0 + t * t) + self.c3 * x.powf(-2.5) / (t.abs() + 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualStatus {
    Pass,
    Fail,
    /// `t` lies within `1e-6` of a tabulated ordinate; not evaluated.
    NearResonance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExplicitFormulaResidual {
    pub x: f64,
    pub t: f64,
    #[serde(serialize_with = "crate::serde_complex")]
    pub lhs: Complex64,
    #[serde(serialize_with = "crate::serde_complex")]
    pub rhs_main: Complex64,
    #[serde(serialize_with = "crate::serde_complex")]
    pub residual: Complex64,
    /// Budget envelope plus both truncation bounds.
    pub envelope: f64,
    pub lhs_tail_bound: f64,
    pub rhs_tail_bound: f64,
    pub status: ResidualStatus,
}

impl ExplicitFormulaResidual {
    pub fn passed(&self) -> bool {
        self.status == ResidualStatus::Pass
    }
}

pub const RESONANCE_WINDOW: f64 = 1e-6;

/// Residuals on a grid of `(x, t)`, summing zeros up to the table coverage
/// and prime powers up to the sieve limit. The coverage must reach
/// `max(2|t| + 2, 30)` for the zero-sum tail bound to apply.
pub fn residual_report(
    table: &ZeroTable,
    vm: &VonMangoldtTable,
    grid: &[(f64, f64)],
    budget: ErrorBudget,
) -> Result<Vec<ExplicitFormulaResidual>> {
    if !(budget.c1 >= 0.0 && budget.c2 >= 0.0 && budget.c3 >= 0.0) || budget.c1 + budget.c2 + budget.c3 <= 0.0 {
        return Err(Error::Domain(format!(
            "budget must be non-negative and not all zero: {budget:?}"
        )));
    }
    let cutoff = table.coverage();
    let gammas: Vec<f64> = table.zeros().iter().map(|z| z.gamma).collect();
    let near = |t: f64| {
        let i = gammas.partition_point(|&g| g < t.abs());
        let before = i.checked_sub(1).map(|k| gammas[k]);
        [before, gammas.get(i).copied()]
            .into_iter()
            .flatten()
            .any(|g| (g - t.abs()).abs() <= RESONANCE_WINDOW)
    };
    grid.par_iter()
        .map(|&(x, t)| {
            if near(t) {
                return Ok(ExplicitFormulaResidual {
                    x,
                    t,
                    lhs: Complex64::new(0.0, 0.0),
                    rhs_main: Complex64::new(0.0, 0.0),
                    residual: Complex64::new(0.0, 0.0),
                    envelope: budget.envelope(x, t),
                    lhs_tail_bound: 0.0,
                    rhs_tail_bound: 0.0,
                    status: ResidualStatus::NearResonance,
                });
            }
            let lhs = lhs_zero_sum(table, x, t, cutoff)?;
            if !lhs.tail_bound.is_finite() {
                return Err(Error::Coverage {
                    requested: (2.0 * t.abs() + 2.0).max(30.0),
                    available: cutoff,
                });
            }
            let rhs = rhs_main(vm, x, t, vm.limit())?;
            let residual = lhs.value() - rhs.value();
            let envelope = budget.envelope(x, t) + lhs.tail_bound + rhs.tail_bound;
            let status = if residual.norm() <= envelope {
                ResidualStatus::Pass
            } else {
                ResidualStatus::Fail
            };
            Ok(ExplicitFormulaResidual {
                x,
                t,
                lhs: lhs.value(),
                rhs_main: rhs.value(),
                residual,
                envelope,
                lhs_tail_bound: lhs.tail_bound,
                rhs_tail_bound: rhs.tail_bound,
                status,
            })
        })
        .collect()
}
