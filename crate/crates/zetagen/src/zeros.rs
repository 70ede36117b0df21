use std::f64::consts::PI;
use std::fmt;

use crate::{hardy_z, theta, theta_prime};

const MAX_REFINEMENT_LEVELS: usize = 16;
const ROOT_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroFinderError {
    /// A Gram block did not yield as many sign changes as Rosser's rule demands.
    MissingZeros {
        block_start: f64,
        block_end: f64,
        expected: usize,
        found: usize,
    },
    /// More sign changes than the block can hold; Z evaluation is unreliable.
    ExcessZeros {
        block_start: f64,
        block_end: f64,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for ZeroFinderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZeroFinderError::MissingZeros {
                block_start,
                block_end,
                expected,
                found,
            } => write!(
                f,
                "Gram block [{block_start}, {block_end}] should hold {expected} zeros, isolated {found}"
            ),
            ZeroFinderError::ExcessZeros {
                block_start,
                block_end,
                expected,
                found,
            } => write!(
                f,
                "Gram block [{block_start}, {block_end}] holds {expected} zeros but {found} sign changes were seen"
            ),
        }
    }
}

impl std::error::Error for ZeroFinderError {}

/// The n-th Gram point, theta(g_n) = n pi, for n >= -1.
pub fn gram_point(n: i64) -> f64 {
    gram_from(n, 20.0_f64.max(asymptotic_gram(n)))
}

fn asymptotic_gram(n: i64) -> f64 {
    // theta(t) ~ (t/2) log(t/(2 pi e)); one fixed-point pass is enough for a start value
    let target = (n as f64 + 0.125) * PI;
    let mut t = 20.0;
    for _ in 0..8 {
        t = 2.0 * target / ((t / (2.0 * PI)).ln() - 1.0).max(0.5);
    }
    t
}

fn gram_from(n: i64, start: f64) -> f64 {
    let target = n as f64 * PI;
    let mut t = start.max(7.5);
    for _ in 0..60 {
        let step = (theta(t) - target) / theta_prime(t);
        t -= step;
        t = t.max(7.0);
        if step.abs() < 1e-13 * t {
            break;
        }
    }
    t
}

/// Sequential zero isolator walking Gram blocks upward from g_{-1}.
#[derive(Debug, Default)]
pub struct ZeroFinder {
    /// Number of Z evaluations performed so far.
    pub evaluations: usize,
}

impl ZeroFinder {
    pub fn new() -> Self {
        Self::default()
    }

    fn z(&mut self, t: f64) -> f64 {
        self.evaluations += 1;
        hardy_z(t)
    }

    /// Ordinates of the first `count` zeros in increasing order.
    pub fn first_zeros(&mut self, count: usize) -> Result<Vec<f64>, ZeroFinderError> {
        let mut zeros = Vec::with_capacity(count);
        let mut index: i64 = -1;
        let mut g = gram_point(-1);
        let mut zg = self.z(g);

        while zeros.len() < count {
            let mut samples = vec![(g, zg)];
            let mut k = index;
            let mut gk = g;
            loop {
                k += 1;
                let guess = gk + PI / theta_prime(gk);
                gk = gram_from(k, guess);
                let zk = self.z(gk);
                samples.push((gk, zk));
                if is_good(k, zk) {
                    break;
                }
            }
            let expected = (k - index) as usize;
            let closing = samples[samples.len() - 1].1;
            let brackets = self.isolate(samples, expected)?;
            for (a, fa, b, fb) in brackets {
                zeros.push(self.refine(a, fa, b, fb));
            }
            index = k;
            g = gk;
            zg = closing;
        }
        zeros.truncate(count);
        Ok(zeros)
    }

    fn isolate(
        &mut self,
        mut samples: Vec<(f64, f64)>,
        expected: usize,
    ) -> Result<Vec<(f64, f64, f64, f64)>, ZeroFinderError> {
        let block_start = samples[0].0;
        let block_end = samples[samples.len() - 1].0;
        for _ in 0..MAX_REFINEMENT_LEVELS {
            let found = sign_changes(&samples);
            if found == expected {
                return Ok(samples
                    .windows(2)
                    .filter(|w| w[0].1.signum() != w[1].1.signum())
                    .map(|w| (w[0].0, w[0].1, w[1].0, w[1].1))
                    .collect());
            }
            if found > expected {
                return Err(ZeroFinderError::ExcessZeros {
                    block_start,
                    block_end,
                    expected,
                    found,
                });
            }
            let mut refined = Vec::with_capacity(samples.len() * 2);
            for w in samples.windows(2) {
                // a sign-changing interval may still hide an extra pair
                refined.push(w[0]);
                let mid = 0.5 * (w[0].0 + w[1].0);
                refined.push((mid, self.z(mid)));
            }
            refined.push(samples[samples.len() - 1]);
            samples = refined;
        }
        Err(ZeroFinderError::MissingZeros {
            block_start,
            block_end,
            expected,
            found: sign_changes(&samples),
        })
    }

    // Illinois variant of regula falsi on a sign-changing bracket.
    fn refine(&mut self, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> f64 {
        let mut side = 0i8;
        for _ in 0..200 {
            if (b - a).abs() < ROOT_TOLERANCE {
                break;
            }
            let mut c = (a * fb - b * fa) / (fb - fa);
            if !(c > a.min(b) && c < a.max(b)) {
                c = 0.5 * (a + b);
            }
            let fc = self.z(c);
            if fc == 0.0 {
                return c;
            }
            if fc.signum() == fb.signum() {
                b = c;
                fb = fc;
                if side == -1 {
                    fa *= 0.5;
                }
                side = -1;
            } else {
                a = c;
                fa = fc;
                if side == 1 {
                    fb *= 0.5;
                }
                side = 1;
            }
        }
        0.5 * (a + b)
    }
}

fn is_good(k: i64, z: f64) -> bool {
    if k % 2 == 0 {
        z > 0.0
    } else {
        z < 0.0
    }
}

fn sign_changes(samples: &[(f64, f64)]) -> usize {
    samples
        .windows(2)
        .filter(|w| w[0].1.signum() != w[1].1.signum())
        .count()
}
