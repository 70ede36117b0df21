use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::theta;

const CHEB_DEGREE: usize = 48;
const CAUCHY_POINTS: usize = 96;
const CAUCHY_RADIUS: f64 = 0.5;

/// Riemann-Siegel evaluator of Z(t) with correction terms C0..C4.
///
/// The correction functions are built once from derivatives of
/// Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p), obtained by Cauchy
/// integrals (Psi is entire), and stored as Chebyshev series on [0, 1].
pub struct RiemannSiegel {
    corrections: [Vec<f64>; 5],
    ln_n: Vec<f64>,
    inv_sqrt_n: Vec<f64>,
}

impl RiemannSiegel {
    pub fn shared() -> &'static RiemannSiegel {
        static RS: OnceLock<RiemannSiegel> = OnceLock::new();
        RS.get_or_init(|| RiemannSiegel::new(200_000.0))
    }

    /// Builds an evaluator valid for heights up to `t_max`.
    pub fn new(t_max: f64) -> Self {
        let terms = (t_max / (2.0 * PI)).sqrt() as usize + 2;
        let ln_n = (0..=terms).map(|n| (n.max(1) as f64).ln()).collect();
        let inv_sqrt_n = (0..=terms).map(|n| 1.0 / (n.max(1) as f64).sqrt()).collect();

        let nodes: Vec<f64> = (0..CHEB_DEGREE)
            .map(|j| 0.5 + 0.5 * (PI * (j as f64 + 0.5) / CHEB_DEGREE as f64).cos())
            .collect();
        let samples: Vec<[f64; 5]> = nodes.iter().map(|&p| correction_values(p)).collect();
        let corrections = std::array::from_fn(|k| {
            let vals: Vec<f64> = samples.iter().map(|s| s[k]).collect();
            chebyshev_coefficients(&vals)
        });
        Self {
            corrections,
            ln_n,
            inv_sqrt_n,
        }
    }

    pub fn z(&self, t: f64) -> f64 {
        let a = (t / (2.0 * PI)).sqrt();
        let n = a.floor() as usize;
        assert!(n + 1 < self.ln_n.len(), "height {t} beyond evaluator range");
        let p = a - n as f64;
        let th = theta(t);

        let mut main = 0.0;
        for k in 1..=n {
            main += (th - t * self.ln_n[k]).cos() * self.inv_sqrt_n[k];
        }
        main *= 2.0;

        let x = 2.0 * p - 1.0;
        let inv_a = 1.0 / a;
        let mut remainder = 0.0;
        let mut scale = 1.0;
        for coeffs in &self.corrections {
            remainder += clenshaw(coeffs, x) * scale;
            scale *= inv_a;
        }
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        main + sign * remainder / a.sqrt()
    }
}

fn psi(p: Complex64) -> Complex64 {
    let arg = (p * p - p - 1.0 / 16.0) * (2.0 * PI);
    arg.cos() / (p * (2.0 * PI)).cos()
}

fn psi_derivatives(p0: f64) -> [f64; 13] {
    let mut out = [0.0; 13];
    let m = CAUCHY_POINTS as f64;
    let samples: Vec<(f64, Complex64)> = (0..CAUCHY_POINTS)
        .map(|j| {
            let phi = 2.0 * PI * (j as f64 + 0.37) / m;
            let point = Complex64::new(p0, 0.0) + Complex64::from_polar(CAUCHY_RADIUS, phi);
            (phi, psi(point))
        })
        .collect();
    let mut factorial = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        if k > 0 {
            factorial *= k as f64;
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &(phi, value) in &samples {
            acc += value * Complex64::from_polar(1.0, -(k as f64) * phi);
        }
        *slot = (acc / m).re * factorial / CAUCHY_RADIUS.powi(k as i32);
    }
    out
}

fn correction_values(p: f64) -> [f64; 5] {
    let d = psi_derivatives(p);
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    [
        d[0],
        -d[3] / (96.0 * pi2),
        d[2] / (64.0 * pi2) + d[6] / (18432.0 * pi4),
        -d[1] / (64.0 * pi2) - d[5] / (3840.0 * pi4) - d[9] / (5308416.0 * pi6),
        d[0] / (128.0 * pi2)
            + 19.0 * d[4] / (24576.0 * pi4)
            + 11.0 * d[8] / (5898240.0 * pi6)
            + d[12] / (2038431744.0 * pi8),
    ]
}

fn chebyshev_coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|k| {
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                .sum();
            let c = 2.0 * s / n as f64;
            if k == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect()
}

fn clenshaw(coeffs: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + coeffs[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_has_removable_singularities() {
        // Psi is finite at p = 1/4, where both numerator and denominator vanish.
        let d = psi_derivatives(0.25);
        assert!(d[0].is_finite());
        let near = psi(Complex64::new(0.25 + 1e-4, 0.0)).re;
        assert!((d[0] - near).abs() < 1e-2);
    }

    #[test]
    fn chebyshev_reproduces_c0() {
        let rs = RiemannSiegel::new(1000.0);
        for k in 1..20 {
            let p = k as f64 / 20.0 + 0.013;
            let direct = psi(Complex64::new(p, 0.0)).re;
            let interp = clenshaw(&rs.corrections[0], 2.0 * p - 1.0);
            assert!((direct - interp).abs() < 1e-12, "p={p}");
        }
    }
}
