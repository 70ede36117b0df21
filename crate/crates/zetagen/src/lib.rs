//! Ordinates of the nontrivial zeros of the Riemann zeta function.
//!
//! Hardy's Z function is evaluated with Euler-Maclaurin summation at small
//! heights and the Riemann-Siegel formula (four correction terms) above
//! [`RS_CROSSOVER`]. Zeros are isolated Gram block by Gram block using
//! Rosser's rule and refined with a safeguarded secant iteration.
//!
//! Rosser's rule is known to hold below the 13,999,525th Gram point, which
//! is far beyond the heights this crate is meant for.

mod euler_maclaurin;
mod riemann_siegel;
mod zeros;

pub use euler_maclaurin::zeta_critical_line;
pub use riemann_siegel::RiemannSiegel;
pub use zeros::{gram_point, ZeroFinder, ZeroFinderError};

use std::f64::consts::PI;

/// Height above which Z(t) is evaluated with the Riemann-Siegel formula.
pub const RS_CROSSOVER: f64 = 400.0;

/// Riemann-Siegel theta function via its asymptotic expansion (t >= 5).
pub fn theta(t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t5 = t3 * t2;
    let t7 = t5 * t2;
    0.5 * t * (t / (2.0 * PI)).ln() - 0.5 * t - PI / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t3)
        + 31.0 / (80640.0 * t5)
        + 127.0 / (430080.0 * t7)
}

/// Derivative of [`theta`], main terms.
pub fn theta_prime(t: f64) -> f64 {
    0.5 * (t / (2.0 * PI)).ln() - 1.0 / (48.0 * t * t)
}

/// Hardy's Z function, Z(t) = exp(i theta(t)) zeta(1/2 + it), for t >= 5.
pub fn hardy_z(t: f64) -> f64 {
    if t < RS_CROSSOVER {
        euler_maclaurin::hardy_z_em(t)
    } else {
        RiemannSiegel::shared().z(t)
    }
}

/// Writes ordinates one per line with nine decimals, the layout of the
/// classic public tables.
pub fn write_ordinates<W: std::io::Write>(mut out: W, ordinates: &[f64]) -> std::io::Result<()> {
    for g in ordinates {
        writeln!(out, "{g:.9}")?;
    }
    Ok(())
}
