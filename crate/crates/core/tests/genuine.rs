//! Properties of the engines on genuine zero tables.

mod common;

use paircorr::explicit_formula::{lhs_zero_sum, residual_report, rhs_main, sieve_von_mangoldt, ErrorBudget};
use paircorr::kernels::Kernel;
use paircorr::pair_correlation::{f_banded, f_exact};
use paircorr::simple_zeros::{kernel_pair_sum, KernelSumOptions};

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn pair_sum_is_real_for_on_line_table() {
    let table = common::genuine_table(1000);
    let t = table.t_max();
    for x in [1.0, 3.5, 40.0, t] {
        let r = f_exact(&table, x, t).unwrap();
        assert!(r.value.im.abs() <= 1e-9 * r.value.re.abs(), "x = {x}: {}", r.value);
        // diagonal terms alone contribute N(T) w(0) = N(T)
        assert!(r.value.re > 0.0);
    }
}

#[test]
fn banded_converges_to_exact() {
    let table = common::genuine_table(10_000);
    let t = table.t_max();
    let x = t.sqrt();
    let exact = f_exact(&table, x, t).unwrap().value;
    let mut prev = f64::INFINITY;
    for band in [2.0, 8.0, 32.0, 128.0] {
        let r = f_banded(&table, x, t, band).unwrap();
        let diff = (r.value - exact).norm();
        assert!(
            diff <= r.truncation_bound + 1e-9,
            "band {band}: {diff} > {}",
            r.truncation_bound
        );
        assert!(r.truncation_bound < prev);
        prev = r.truncation_bound;
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let table = common::genuine_table(10_000);
    let t = table.t_max();
    let vm = sieve_von_mangoldt(100_000).unwrap();
    let budget = ErrorBudget {
        c1: 3.0,
        c2: 3.0,
        c3: 3.0,
    };
    let grid = [(10.0, 10.0), (100.0, 50.0), (1000.0, 200.0)];
    let options = KernelSumOptions {
        grid_step: Some(0.05),
        band: Some(20.0),
        ..KernelSumOptions::default()
    };
    let run = || {
        let f = f_exact(&table, 17.0, t).unwrap().value;
        let b = f_banded(&table, 17.0, t, 30.0).unwrap().value;
        let res: Vec<_> = residual_report(&table, &vm, &grid, budget)
            .unwrap()
            .into_iter()
            .map(|r| r.residual)
            .collect();
        let k = kernel_pair_sum(&table, &Kernel::fejer(), t, &options)
            .unwrap()
            .close_sum;
        (f, b, res, k)
    };
    let reference = in_pool(1, run);
    for threads in [2, 3, 8] {
        assert_eq!(in_pool(threads, run), reference, "{threads} threads");
    }
}

#[test]
fn explicit_formula_cutoffs_agree_within_tail_bounds() {
    let table = common::genuine_table(100_000);
    let vm = sieve_von_mangoldt(1_000_000).unwrap();
    for (x, t) in [(10.0, 10.0), (100.0, 50.0), (1000.0, 200.0)] {
        let short = lhs_zero_sum(&table, x, t, 5000.0).unwrap();
        let long = lhs_zero_sum(&table, x, t, table.coverage()).unwrap();
        let diff = (short.value() - long.value()).norm();
        assert!(
            diff <= short.tail_bound + long.tail_bound,
            "lhs x = {x}, t = {t}: {diff}"
        );

        let short = rhs_main(&vm, x, t, 100_000).unwrap();
        let long = rhs_main(&vm, x, t, 1_000_000).unwrap();
        let diff = (short.value() - long.value()).norm();
        assert!(
            diff <= short.tail_bound + long.tail_bound,
            "rhs x = {x}, t = {t}: {diff}"
        );
    }
}

#[test]
fn genuine_zeros_are_separated_at_unit_scale() {
    let table = common::genuine_table(100_000);
    let t = table.t_max();
    let d = table.max_unit_density(t);
    // about log(T/2pi)/2pi zeros per unit near the top, never many more
    let mean = (t / (2.0 * std::f64::consts::PI)).ln() / (2.0 * std::f64::consts::PI);
    assert!(
        (d as f64) >= mean && (d as f64) <= 4.0 * mean + 2.0,
        "density {d}, mean {mean}"
    );
}
