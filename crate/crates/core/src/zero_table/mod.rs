//! Tables of nontrivial zeta zeros: ingestion, validation and counting queries.
//!
//! A zero is stored as `(delta, gamma)` with `beta = 1/2 + delta`, so that
//! zeros on the critical line carry an exact `delta = 0.0`. Only zeros with
//! `gamma > 0` are stored; conjugates are synthesized by the formulas that
//! need them.

mod fetch;
mod parse;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fetch::{cache_paths, fetch_remote_table, CacheMeta};
pub use parse::{parse_zero_file, parse_zero_str, write_zero_table, ZeroFormat};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaZero {
    pub delta: f64,
    pub gamma: f64,
    pub multiplicity: u32,
}

impl ZetaZero {
    pub fn new(delta: f64, gamma: f64, multiplicity: u32) -> Result<Self> {
        if !(delta.abs() < 0.5) {
            return Err(Error::Domain(format!("delta {delta} outside (-1/2, 1/2)")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("ordinate {gamma} must be positive and finite")));
        }
        if multiplicity == 0 {
            return Err(Error::Domain("multiplicity must be at least 1".into()));
        }
        Ok(Self {
            delta,
            gamma,
            multiplicity,
        })
    }

    /// A simple zero on the critical line.
    pub fn on_line(gamma: f64) -> Self {
        Self {
            delta: 0.0,
            gamma,
            multiplicity: 1,
        }
    }

    pub fn beta(&self) -> f64 {
        0.5 + self.delta
    }
}

/// Where a table came from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// File path or URL.
    pub source: String,
    /// Hex SHA-256 of the raw bytes that were parsed (empty for in-memory tables).
    pub checksum: String,
    /// Set when the input was not sorted by ordinate and had to be reordered.
    pub reordered: bool,
}

/// Immutable, gamma-sorted table of zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    zeros: Vec<ZetaZero>,
    // cumulative[i] = total multiplicity of zeros[..i]
    cumulative: Vec<u64>,
    provenance: Provenance,
    // height up to which the table is known to be complete
    coverage: f64,
}

impl ZeroTable {
    /// Builds a table, validating every zero and sorting by ordinate if needed.
    pub fn new(mut zeros: Vec<ZetaZero>, mut provenance: Provenance) -> Result<Self> {
        for z in &zeros {
            ZetaZero::new(z.delta, z.gamma, z.multiplicity)?;
        }
        if !zeros.windows(2).all(|w| w[0].gamma <= w[1].gamma) {
            zeros.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
            provenance.reordered = true;
        }
        let mut cumulative = Vec::with_capacity(zeros.len() + 1);
        let mut running = 0u64;
        cumulative.push(0);
        for z in &zeros {
            running += z.multiplicity as u64;
            cumulative.push(running);
        }
        let coverage = zeros.last().map_or(0.0, |z| z.gamma);
        Ok(Self {
            zeros,
            cumulative,
            provenance,
            coverage,
        })
    }

    /// Table of simple on-line zeros at the given ordinates.
    pub fn from_ordinates(ordinates: &[f64]) -> Result<Self> {
        Self::new(
            ordinates.iter().map(|&g| ZetaZero::on_line(g)).collect(),
            Provenance {
                source: "<memory>".into(),
                ..Provenance::default()
            },
        )
    }

    pub fn zeros(&self) -> &[ZetaZero] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Largest ordinate present (0 for an empty table).
    pub fn t_max(&self) -> f64 {
        self.zeros.last().map_or(0.0, |z| z.gamma)
    }

    /// Height up to which the table claims to hold every zero. Defaults to
    /// `t_max`; see [`ZeroTable::with_coverage`].
    pub fn coverage(&self) -> f64 {
        self.coverage
    }

    /// Declares the table complete up to `height >= t_max`, e.g. when the
    /// next zero above the last entry is known to lie beyond `height`.
    pub fn with_coverage(mut self, height: f64) -> Result<Self> {
        if !(height >= self.t_max()) || !height.is_finite() {
            return Err(Error::Domain(format!(
                "coverage {height} is below the largest ordinate {}",
                self.t_max()
            )));
        }
        self.coverage = height;
        Ok(self)
    }

    /// Number of stored entries with `gamma <= t`.
    pub fn index_up_to(&self, t: f64) -> usize {
        self.zeros.partition_point(|z| z.gamma <= t)
    }

    /// Entries with `0 < gamma <= t`.
    pub fn up_to(&self, t: f64) -> &[ZetaZero] {
        &self.zeros[..self.index_up_to(t)]
    }

    /// N(t): zeros with `0 < gamma <= t`, counted with multiplicity.
    pub fn count_up_to(&self, t: f64) -> u64 {
        self.cumulative[self.index_up_to(t)]
    }

    /// Theta(t) = max of `1/2 + |delta|` over zeros with `gamma <= t`.
    ///
    /// `|delta|` is used because a table may hold only one member of each
    /// pair `rho`, `1 - conj(rho)`.
    pub fn theta_up_to(&self, t: f64) -> Result<f64> {
        let zeros = self.up_to(t);
        if zeros.is_empty() {
            return Err(Error::EmptyRange(format!("no zeros with gamma <= {t}")));
        }
        Ok(zeros
            .iter()
            .map(|z| 0.5 + z.delta.abs())
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// N(sigma, t): zeros with `1/2 + |delta| >= sigma` and `gamma <= t`.
    pub fn count_density(&self, sigma: f64, t: f64) -> u64 {
        self.up_to(t)
            .iter()
            .filter(|z| 0.5 + z.delta.abs() >= sigma)
            .map(|z| z.multiplicity as u64)
            .sum()
    }

    /// Largest total multiplicity found in any closed window `[a, a + 1]`
    /// among zeros with `gamma <= t`.
    pub fn max_unit_density(&self, t: f64) -> u64 {
        let zeros = self.up_to(t);
        let mut best = 0;
        let mut hi = 0;
        for lo in 0..zeros.len() {
            while hi < zeros.len() && zeros[hi].gamma <= zeros[lo].gamma + 1.0 {
                hi += 1;
            }
            best = best.max(self.cumulative[hi] - self.cumulative[lo]);
        }
        best
    }

    /// Copy of the table with the entries for which `drop` is true removed.
    pub fn without(&self, drop: impl Fn(&ZetaZero) -> bool) -> ZeroTable {
        let kept = self.zeros.iter().filter(|z| !drop(z)).copied().collect();
        let mut provenance = self.provenance.clone();
        provenance.source = format!("{} (filtered)", provenance.source);
        let mut table = ZeroTable::new(kept, provenance).expect("subset of a valid table is valid");
        table.coverage = self.coverage;
        table
    }
}

/// Main terms of the Riemann-von Mangoldt formula,
/// `(t/2pi) log(t/2pi) - t/2pi`.
pub fn rvm_estimate(t: f64) -> Result<f64> {
    if !(t >= 3.0) {
        return Err(Error::Domain(format!("rvm_estimate needs t >= 3, got {t}")));
    }
    let u = t / (2.0 * PI);
    Ok(u * u.ln() - u)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RvmCheck {
    pub t: f64,
    pub count: u64,
    pub estimate: f64,
    pub allowed: f64,
    /// `|count - estimate| / log t`.
    pub ratio: f64,
}

impl RvmCheck {
    pub fn passed(&self) -> bool {
        (self.count as f64 - self.estimate).abs() <= self.allowed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RvmReport {
    pub slack_factor: f64,
    pub checks: Vec<RvmCheck>,
    /// Check with the largest ratio, if any.
    pub worst: Option<RvmCheck>,
}

impl RvmReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(RvmCheck::passed)
    }

    pub fn violations(&self) -> impl Iterator<Item = &RvmCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// Err with the first violation, if any.
    pub fn into_result(self) -> Result<RvmReport> {
        if let Some(v) = self.violations().next() {
            return Err(Error::RvmViolation {
                t: v.t,
                count: v.count,
                estimate: v.estimate,
                allowed: v.allowed,
            });
        }
        Ok(self)
    }
}

/// Compares N(t) with the Riemann-von Mangoldt main terms on a grid,
/// allowing a deviation of `slack_factor * log t`.
pub fn validate_rvm(table: &ZeroTable, t_grid: &[f64], slack_factor: f64) -> Result<RvmReport> {
    let mut checks = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if t > table.coverage() {
            return Err(Error::Coverage {
                requested: t,
                available: table.coverage(),
            });
        }
        let estimate = rvm_estimate(t)?;
        let count = table.count_up_to(t);
        checks.push(RvmCheck {
            t,
            count,
            estimate,
            allowed: slack_factor * t.ln(),
            ratio: (count as f64 - estimate).abs() / t.ln(),
        });
    }
    let worst = checks.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio)).cloned();
    Ok(RvmReport {
        slack_factor,
        checks,
        worst,
    })
}
