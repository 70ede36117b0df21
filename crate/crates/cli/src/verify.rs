//! `verify`: identity and property checks with one JSON verdict each.

use std::f64::consts::PI;

use anyhow::Result;
use num_complex::Complex64;
use paircorr::explicit_formula::{residual_report, sieve_von_mangoldt, ResidualStatus};
use paircorr::kernels::{montgomery_taylor_j, verify_tsang_properties, Kernel, TsangGrid};
use paircorr::pair_correlation::{f_banded, f_exact, verify_pair_integral_identity, verify_residue_integral};
use paircorr::simple_zeros::simple_zero_bound;
use paircorr::zero_table::{validate_rvm, Provenance, ZeroTable, ZetaZero};
use serde_json::{json, Value};

use crate::commands::{default_rvm_grid, explicit_plan, Settings, DEFAULT_BOUND_C, DEFAULT_SLACK};
use crate::output::source_info;
use crate::{usage, VerifyArgs, EXIT_VALIDATION};

pub const CHECKS: &[&str] = &[
    "constants",
    "residue-integral",
    "pair-identity",
    "banded-oracle",
    "tsang",
    "rvm",
    "explicit-check",
];

const NEEDS_TABLE: &[&str] = &["banded-oracle", "rvm", "explicit-check"];

struct Verdict {
    passed: bool,
    details: Value,
}

fn constants(tol: f64) -> Result<Verdict> {
    let fejer = simple_zero_bound(&Kernel::fejer(), tol.min(1e-12))?;
    let mt = simple_zero_bound(&Kernel::montgomery_taylor(), tol.min(1e-12))?;
    let rows = [
        ("fejer_pi_k0", fejer.pi_k0, 0.4640648392, 1e-9),
        ("fejer_alpha_moment", fejer.alpha_moment, 0.2913876354, 1e-9),
        ("fejer_bound", fejer.bound, 0.608612927, 1e-8),
        ("mt_j0", montgomery_taylor_j(0.0), 1.0061271908, 1e-9),
        ("mt_alpha_moment", mt.alpha_moment, 0.2832624869, 1e-9),
        ("mt_pi_k0", mt.pi_k0, 0.4663199124, 1e-9),
        ("mt_bound", mt.bound, 0.617483786, 1e-8),
    ];
    let details: Vec<Value> = rows
        .iter()
        .map(|&(name, got, want, tol)| json!({ "name": name, "value": got, "reference": want, "tol": tol, "passed": (got - want).abs() <= tol }))
        .collect();
    Ok(Verdict {
        passed: rows.iter().all(|&(_, got, want, tol)| (got - want).abs() <= tol),
        details: json!(details),
    })
}

fn residue_integral() -> Result<Verdict> {
    let mut worst = 0.0f64;
    for k in 0..20 {
        let a = Complex64::new(-19.0 + 2.0 * k as f64, 0.9 * (k as f64).sin());
        let r = verify_residue_integral(a, 1e-11)?;
        let closed = 2.0 * PI / (Complex64::new(4.0, 0.0) + a * a);
        worst = worst.max((r.quadrature - closed).norm());
    }
    Ok(Verdict {
        passed: worst <= 1e-8,
        details: json!({ "samples": 20, "max_difference": worst, "tol": 1e-8 }),
    })
}

// fixed synthetic tables mixing on-line, off-line and double zeros
fn synthetic_tables() -> Vec<ZeroTable> {
    (1..=3)
        .map(|k| {
            let zeros = (0..12 * k)
                .map(|i| {
                    let gamma = 14.0 + 1.7 * i as f64 + 0.3 * ((i * k) as f64).sin();
                    let delta = if i % 3 == 0 { 0.08 * ((i + k) as f64).cos() } else { 0.0 };
                    ZetaZero::new(delta, gamma, if i % 7 == 5 { 2 } else { 1 }).unwrap()
                })
                .collect();
            ZeroTable::new(zeros, Provenance::default()).unwrap()
        })
        .collect()
}

fn pair_identity() -> Result<Verdict> {
    let mut worst = 0.0f64;
    let mut passed = true;
    for table in synthetic_tables() {
        for x in [1.0, 2.0, 10.0] {
            let r = verify_pair_integral_identity(&table, x, table.t_max(), 1e-6)?;
            worst = worst.max(r.difference);
            passed &= r.passed;
        }
    }
    Ok(Verdict {
        passed,
        details: json!({ "tables": 3, "max_difference": worst, "tol": 1e-6 }),
    })
}

fn banded_oracle(table: &ZeroTable, samples: usize) -> Result<Verdict> {
    let head = ZeroTable::new(
        table.zeros()[..table.len().min(1000)].to_vec(),
        table.provenance().clone(),
    )?;
    let t = head.t_max();
    if t < 3.0 {
        return Err(usage("banded-oracle needs zeros above height 3"));
    }
    let mut worst = 0.0f64;
    let mut passed = true;
    for k in 0..samples {
        let x = t.powf((k as f64 + 0.5) / samples as f64);
        let band = 0.5 + 40.0 * ((k as f64 * 0.618_033_988_75).fract());
        let exact = f_exact(&head, x, t)?;
        let banded = f_banded(&head, x, t, band)?;
        let diff = (exact.value - banded.value).norm();
        passed &= diff <= banded.truncation_bound + 1e-9;
        worst = worst.max(diff / banded.truncation_bound);
    }
    Ok(Verdict {
        passed,
        details: json!({ "zeros": head.len(), "T": t, "samples": samples, "max_difference_over_bound": worst }),
    })
}

fn tsang(bound_c: f64, tol: f64) -> Result<Verdict> {
    let mut passed = true;
    let mut details = Vec::new();
    for kernel in Kernel::builtins() {
        let r = verify_tsang_properties(&kernel, &TsangGrid::default(), bound_c, tol)?;
        passed &= r.passed();
        details.push(json!({
            "kernel": r.kernel,
            "positivity_real_min_margin": r.positivity_real.min_margin,
            "max_decay_ratio": r.max_decay_ratio,
            "bound_c": bound_c,
            "positivity_strip_min_margin": r.positivity_strip.min_margin,
            "passed": r.passed(),
        }));
    }
    Ok(Verdict {
        passed,
        details: json!(details),
    })
}

pub fn run(s: &Settings, a: VerifyArgs) -> Result<u8> {
    let selected: Vec<String> = match s.config.pick(a.only, "only")? {
        Some(list) => list
            .split(',')
            .map(|c| c.trim().to_string())
            .filter(|c| !c.is_empty())
            .collect(),
        None => CHECKS.iter().map(|c| c.to_string()).collect(),
    };
    if selected.is_empty() {
        return Err(usage("no checks selected"));
    }
    if let Some(bad) = selected.iter().find(|c| !CHECKS.contains(&c.as_str())) {
        return Err(usage(format!("unknown check {bad:?}; known: {}", CHECKS.join(", "))));
    }
    let table = if selected.iter().any(|c| NEEDS_TABLE.contains(&c.as_str())) {
        Some(s.load_table()?)
    } else {
        None
    };
    let samples = s.config.pick(a.samples, "samples")?.unwrap_or(20);
    let slack = s.config.pick(a.slack, "slack")?.unwrap_or(DEFAULT_SLACK);
    let bound_c = s.config.pick(a.bound_c, "bound-c")?.unwrap_or(DEFAULT_BOUND_C);
    let plan = explicit_plan(s, a.explicit)?;

    let mut results = Vec::new();
    let mut failures = Vec::new();
    for name in CHECKS.iter().filter(|c| selected.iter().any(|s| s == *c)) {
        let verdict = match *name {
            "constants" => constants(s.tol)?,
            "residue-integral" => residue_integral()?,
            "pair-identity" => pair_identity()?,
            "banded-oracle" => banded_oracle(table.as_ref().unwrap(), samples)?,
            "tsang" => tsang(bound_c, s.tol)?,
            "rvm" => {
                let table = table.as_ref().unwrap();
                let report = validate_rvm(table, &default_rvm_grid(table.coverage())?, slack)?;
                Verdict {
                    passed: report.passed(),
                    details: serde_json::to_value(report)?,
                }
            }
            "explicit-check" => {
                let vm = sieve_von_mangoldt(plan.sieve_limit)?;
                let report = residual_report(table.as_ref().unwrap(), &vm, &plan.grid, plan.budget)?;
                let failing: Vec<Value> = report
                    .iter()
                    .filter(|r| r.status == ResidualStatus::Fail)
                    .map(|r| json!({ "x": r.x, "t": r.t, "abs_residual": r.residual.norm(), "envelope": r.envelope }))
                    .collect();
                Verdict {
                    passed: failing.is_empty(),
                    details: json!({ "budget": plan.budget, "points": report.len(), "failing": failing }),
                }
            }
            _ => unreachable!(),
        };
        if !verdict.passed {
            failures.push(name.to_string());
        }
        results.push(json!({ "name": name, "passed": verdict.passed, "details": verdict.details }));
    }
    let result = json!({ "checks": results, "passed": failures.is_empty(), "failures": failures });
    s.sink.json("verify", table.as_ref().map(source_info), result)?;
    if failures.is_empty() {
        Ok(0)
    } else {
        eprintln!("paircorr: failed checks: {}", failures.join(", "));
        Ok(EXIT_VALIDATION)
    }
}
