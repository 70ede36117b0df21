//! Adaptive Gauss-Kronrod (7/15) integration with a certified-style error
//! estimate, for real or complex integrands.
//!
//! The per-panel estimate is the raw `|K15 - G7|` difference, which bounds
//! the error of the lower-order rule while the higher-order value is
//! returned. Panel contributions are summed in left-to-right order with
//! compensated accumulation, so results do not depend on refinement order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::summation::{CompensatedSum, ComplexSum};

pub const DEFAULT_MAX_PANELS: usize = 1_000_000;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values an integrand may return.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    type Acc: Default;
    fn magnitude(self) -> f64;
    fn is_finite_value(self) -> bool;
    fn accumulate(acc: &mut Self::Acc, v: Self);
    fn finish(acc: &Self::Acc) -> Self;
}

impl QuadValue for f64 {
    type Acc = CompensatedSum;
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
    fn accumulate(acc: &mut CompensatedSum, v: f64) {
        acc.add(v)
    }
    fn finish(acc: &CompensatedSum) -> f64 {
        acc.value()
    }
}

impl QuadValue for Complex64 {
    type Acc = ComplexSum;
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn accumulate(acc: &mut ComplexSum, v: Complex64) {
        acc.add(v)
    }
    fn finish(acc: &ComplexSum) -> Complex64 {
        acc.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult<V = f64> {
    pub value: V,
    pub error_estimate: f64,
    pub subdivisions: usize,
    pub converged: bool,
}

impl<V> QuadratureResult<V> {
    /// Err unless converged.
    pub fn require_converged(self, tol: f64) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                estimate: self.error_estimate,
                tol,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadOptions {
    /// Cap on the number of panels; reaching it returns `converged = false`.
    pub max_panels: usize,
    /// Extra initial panel boundaries (points outside the interval are ignored).
    pub breakpoints: Vec<f64>,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            max_panels: DEFAULT_MAX_PANELS,
            breakpoints: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
}

#[derive(Debug, PartialEq)]
struct HeapKey {
    error: f64,
    index: usize,
}

impl Eq for HeapKey {}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn gauss_kronrod<V: QuadValue, F: Fn(f64) -> V>(f: &F, a: f64, b: f64) -> Result<Panel<V>> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<V> {
        let v = f(x);
        if v.is_finite_value() {
            Ok(v)
        } else {
            Err(Error::NonFinite { at: x })
        }
    };
    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = eval(center - dx)? + eval(center + dx)?;
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).magnitude();
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate_adaptive<V, F>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadratureResult<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    integrate_adaptive_with(f, a, b, tol, &QuadOptions::default())
}

pub fn integrate_adaptive_with<V, F>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    options: &QuadOptions,
) -> Result<QuadratureResult<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("need finite a < b, got [{a}, {b}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }

    let mut cuts: Vec<f64> = options
        .breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let mut panels = Vec::with_capacity(edges.len() * 2);
    let mut heap = BinaryHeap::new();
    let mut total_error = 0.0;
    for w in edges.windows(2) {
        let p = gauss_kronrod(&f, w[0], w[1])?;
        total_error += p.error;
        heap.push(HeapKey {
            error: p.error,
            index: panels.len(),
        });
        panels.push(p);
    }

    let max_panels = options.max_panels.max(panels.len());
    while total_error > tol && panels.len() < max_panels {
        let Some(worst) = heap.pop() else { break };
        let p = panels[worst.index];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // cannot split further; leave its error in place
            continue;
        }
        let left = gauss_kronrod(&f, p.a, mid)?;
        let right = gauss_kronrod(&f, mid, p.b)?;
        total_error += left.error + right.error - p.error;
        panels[worst.index] = left;
        heap.push(HeapKey {
            error: left.error,
            index: worst.index,
        });
        heap.push(HeapKey {
            error: right.error,
            index: panels.len(),
        });
        panels.push(right);
    }

    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut acc = V::Acc::default();
    let mut err = CompensatedSum::new();
    for p in &panels {
        V::accumulate(&mut acc, p.value);
        err.add(p.error);
    }
    let error_estimate = err.value();
    Ok(QuadratureResult {
        value: V::finish(&acc),
        error_estimate,
        subdivisions: panels.len(),
        converged: error_estimate <= tol,
    })
}

/// Caller's decay contract for [`integrate_real_line`]:
/// `|f(t)| <= constant / |t|^exponent` whenever `|t| >= valid_from`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailDecay {
    pub constant: f64,
    pub exponent: f64,
    pub valid_from: f64,
}

impl TailDecay {
    /// Bound on the integral of |f| over `|t| >= cut`.
    pub fn tail_bound(&self, cut: f64) -> f64 {
        2.0 * self.constant * cut.powf(1.0 - self.exponent) / (self.exponent - 1.0)
    }
}

/// Integrates `f` over the whole real line: a core interval `[-T0, T0]`
/// by adaptive quadrature plus the analytic tail bound from `decay`,
/// which is folded into `error_estimate`.
///
/// `T0` is the smallest admissible cut (not below `decay.valid_from`)
/// whose tail bound is at most `tol / 2`. Breakpoints in `options`
/// mark where the integrand has structure; geometric breakpoints are
/// added outward from them.
pub fn integrate_real_line<V, F>(f: F, decay: TailDecay, tol: f64, options: &QuadOptions) -> Result<QuadratureResult<V>>
where
    V: QuadValue,
    F: Fn(f64) -> V,
{
    if !(decay.exponent >= 2.0) || !(decay.constant >= 0.0) {
        return Err(Error::Domain(format!(
            "decay exponent must be >= 2 and constant non-negative, got {:?}",
            decay
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let p = decay.exponent;
    let needed = if decay.constant > 0.0 {
        (4.0 * decay.constant / ((p - 1.0) * tol)).powf(1.0 / (p - 1.0))
    } else {
        1.0
    };
    let cut = needed.max(decay.valid_from).max(1.0);
    let tail = if decay.constant > 0.0 {
        decay.tail_bound(cut)
    } else {
        0.0
    };

    let (lo, hi) = match (
        options.breakpoints.iter().copied().reduce(f64::min),
        options.breakpoints.iter().copied().reduce(f64::max),
    ) {
        (Some(lo), Some(hi)) => (lo, hi),
        _ => (0.0, 0.0),
    };
    let mut breakpoints = options.breakpoints.clone();
    let mut step = 1.0;
    while hi + step < cut || lo - step > -cut {
        breakpoints.push(hi + step);
        breakpoints.push(lo - step);
        step *= 2.0;
    }
    let core_options = QuadOptions {
        max_panels: options.max_panels,
        breakpoints,
    };
    let core_tol = (tol - tail).max(tol * 1e-3);
    let core = integrate_adaptive_with(f, -cut, cut, core_tol, &core_options)?;
    let error_estimate = core.error_estimate + tail;
    Ok(QuadratureResult {
        value: core.value,
        error_estimate,
        subdivisions: core.subdivisions,
        converged: core.converged && error_estimate <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    #[test]
    fn constant() {
        let r = integrate_adaptive(|_| 1.0, 0.0, 1.0, 1e-12).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.converged);
    }

    #[test]
    fn sech_moments() {
        let r = integrate_adaptive(|u: f64| (1.0 - u) * sech(u), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 0.4640648392).abs() < 1e-10);
        assert!(r.converged && r.error_estimate <= 1e-12);
        let r = integrate_adaptive(|u: f64| 2.0 * u * (1.0 - u) * sech(u), 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 0.2913876354).abs() < 1e-10);
    }

    #[test]
    fn polynomials_are_exact() {
        // Kronrod 15 integrates degree 22 exactly; one panel suffices.
        let r = integrate_adaptive(|x: f64| x.powi(13) - 3.0 * x.powi(4), -1.0, 2.0, 1e-12).unwrap();
        let exact = (2f64.powi(14) - 1.0) / 14.0 - 3.0 * (2f64.powi(5) + 1.0) / 5.0;
        assert!((r.value - exact).abs() < 1e-12 * exact.abs());
        assert_eq!(r.subdivisions, 1);
    }

    #[test]
    fn complex_integrand() {
        // integral_0^1 e^{i x} dx = (e^i - 1)/i
        let r = integrate_adaptive(|x: f64| Complex64::from_polar(1.0, x), 0.0, 1.0, 1e-13).unwrap();
        let exact = (Complex64::from_polar(1.0, 1.0) - 1.0) / Complex64::i();
        assert!((r.value - exact).norm() < 1e-14);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let err = integrate_adaptive(|x: f64| 1.0 / (x - 0.5), 0.0, 1.0, 1e-8);
        assert!(err.is_ok() || matches!(err, Err(Error::NonFinite { .. })));
        let err = integrate_adaptive(|x: f64| if x == 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, 1e-8).unwrap_err();
        assert!(matches!(err, Error::NonFinite { at } if at == 0.5));
    }

    #[test]
    fn panel_cap_reports_non_convergence() {
        let options = QuadOptions {
            max_panels: 4,
            breakpoints: vec![],
        };
        let r = integrate_adaptive_with(|x: f64| (1.0 / x.max(1e-300)).sqrt(), 0.0, 1.0, 1e-14, &options).unwrap();
        assert!(!r.converged);
        assert!(r.subdivisions <= 4);
        assert!(r.error_estimate > 1e-14);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(integrate_adaptive(|x: f64| x, 1.0, 0.0, 1e-8).is_err());
        assert!(integrate_adaptive(|x: f64| x, 0.0, 1.0, 0.0).is_err());
        assert!(integrate_adaptive(|x: f64| x, 0.0, f64::INFINITY, 1e-8).is_err());
    }

    fn quartic_decay() -> TailDecay {
        TailDecay {
            constant: 1.0,
            exponent: 4.0,
            valid_from: 1.0,
        }
    }

    #[test]
    fn real_line_closed_forms() {
        let r = integrate_real_line(
            |t: f64| 1.0 / (1.0 + t * t).powi(2),
            quartic_decay(),
            1e-10,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.value - PI / 2.0).abs() < 1e-10);

        let decay = TailDecay {
            constant: 4.0,
            exponent: 4.0,
            valid_from: 2.0,
        };
        let r = integrate_real_line(
            |t: f64| 1.0 / ((1.0 + t * t) * (1.0 + (t + 1.0) * (t + 1.0))),
            decay,
            1e-10,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0 * PI / 5.0).abs() < 1e-10);

        let r = integrate_real_line(
            |t: f64| t / (1.0 + t * t).powi(2),
            quartic_decay(),
            1e-10,
            &QuadOptions::default(),
        )
        .unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn cut_moves_out_until_tail_fits() {
        let decay = TailDecay {
            constant: 1.0,
            exponent: 2.0,
            valid_from: 10.0,
        };
        let r = integrate_real_line(|t: f64| 1.0 / (1.0 + t * t), decay, 1e-3, &QuadOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.error_estimate <= 1e-3);
        assert!(r.error_estimate >= decay.tail_bound(4000.0));
        assert!((r.value - PI).abs() <= 1e-3);
    }

    #[test]
    fn even_integrand_is_twice_half_line() {
        let f = |t: f64| (-t * t).exp() * (3.0 * t).cos() + 1.0 / (1.0 + t * t).powi(2);
        let decay = TailDecay {
            constant: 2.0,
            exponent: 4.0,
            valid_from: 3.0,
        };
        let full = integrate_real_line(f, decay, 1e-10, &QuadOptions::default()).unwrap();
        let cut = 3000.0;
        let half = integrate_adaptive_with(
            f,
            0.0,
            cut,
            1e-11,
            &QuadOptions {
                breakpoints: (0..12).map(|k| 2f64.powi(k)).collect(),
                ..QuadOptions::default()
            },
        )
        .unwrap();
        let half_tail = decay.tail_bound(cut) / 2.0;
        assert!((full.value - 2.0 * half.value).abs() <= full.error_estimate + 2.0 * (half.error_estimate + half_tail));
    }

    #[test]
    fn tighter_tolerance_does_not_hurt() {
        type Case = (fn(f64) -> f64, f64);
        let cases: [Case; 3] = [
            (|u| (1.0 - u) / u.cosh(), 0.464_064_839_283_936_4),
            (|u| (20.0 * u).cos() / u.cosh(), 0.0),
            (|u| u.sqrt(), 2.0 / 3.0),
        ];
        for (f, reference) in cases {
            let reference = if reference == 0.0 {
                integrate_adaptive(f, 0.0, 1.0, 1e-15).unwrap().value
            } else {
                reference
            };
            let mut last = f64::INFINITY;
            for k in 3..11 {
                let tol = 10f64.powi(-k);
                let r = integrate_adaptive(f, 0.0, 1.0, tol).unwrap();
                let dev = (r.value - reference).abs();
                assert!(dev <= last.max(1e-15), "tol {tol}: {dev} > {last}");
                assert!(dev <= tol);
                last = dev;
            }
        }
    }
}
