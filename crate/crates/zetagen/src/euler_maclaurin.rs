use num_complex::Complex64;

use crate::theta;

// B_2, B_4, ..., B_30
const BERNOULLI: [f64; 15] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// zeta(1/2 + it) by Euler-Maclaurin summation. Cost grows linearly in t.
pub fn zeta_critical_line(t: f64) -> Complex64 {
    let s = Complex64::new(0.5, t);
    let n_cut = (t.abs() / 2.0).ceil() as usize + 10;

    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..n_cut {
        let ln = (n as f64).ln();
        sum += (-s * ln).exp();
    }

    let big_n = n_cut as f64;
    let ln_n = big_n.ln();
    let n_pow = (-s * ln_n).exp();
    sum += n_pow * big_n / (s - 1.0);
    sum += n_pow * 0.5;

    // term_k = B_2k/(2k)! * s(s+1)...(s+2k-2) * N^{-s-2k+1}
    let mut rising = s;
    let mut factorial = 2.0;
    let mut n_power = n_pow / big_n;
    for (k, b) in BERNOULLI.iter().enumerate() {
        if k > 0 {
            let m = 2.0 * k as f64;
            rising *= (s + (m - 1.0)) * (s + m);
            factorial *= (m + 1.0) * (m + 2.0);
            n_power /= big_n * big_n;
        }
        sum += rising * n_power * (b / factorial);
    }
    sum
}

pub(crate) fn hardy_z_em(t: f64) -> f64 {
    let rotation = Complex64::from_polar(1.0, theta(t));
    (rotation * zeta_critical_line(t)).re
}
