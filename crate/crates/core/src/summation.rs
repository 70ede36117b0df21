//! Error-free-transform accumulation and a deterministic chunked reduction.

use num_complex::Complex64;
use rayon::prelude::*;

/// Knuth's TwoSum: `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Compensated accumulator; error terms are captured with [`two_sum`] and
/// folded back in at the end.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    err: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let (s, e) = two_sum(self.sum, value);
        self.sum = s;
        self.err += e;
    }

    /// Merges another partial sum, keeping both error terms.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.err += other.err;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.err
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Outer-index chunk size used by the pair-sum engines. Results are
/// bit-reproducible for a fixed chunk size regardless of thread count.
pub const DEFAULT_CHUNK: usize = 256;

/// Splits `0..len` into contiguous chunks, evaluates `partial` on each in
/// parallel, and merges the partial results in ascending chunk order.
pub fn chunked_reduce<T, F, M>(len: usize, chunk: usize, partial: F, mut merge: M) -> Option<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
    M: FnMut(&mut T, T),
{
    let chunk = chunk.max(1);
    let starts: Vec<usize> = (0..len).step_by(chunk).collect();
    let partials: Vec<T> = starts.par_iter().map(|&s| partial(s..(s + chunk).min(len))).collect();
    let mut iter = partials.into_iter();
    let mut acc = iter.next()?;
    for p in iter {
        merge(&mut acc, p);
    }
    Some(acc)
}
