use std::path::PathBuf;

use anyhow::{Context, Result};
use num_complex::Complex64;
use paircorr::explicit_formula::{residual_report, sieve_von_mangoldt, ErrorBudget, ResidualStatus};
use paircorr::kernels::{k_of_z, verify_tsang_properties, Kernel, TsangGrid};
use paircorr::pair_correlation::{f_alpha_curve, PairMode};
use paircorr::simple_zeros::{kernel_pair_sum, simple_zero_bound, KernelSumOptions};
use paircorr::theory_utils::{density_hypothesis_curve, eta_kv, ZeroFreeRegion};
use paircorr::zero_table::{cache_paths, fetch_remote_table, parse_zero_file, validate_rvm, ZeroFormat, ZeroTable};
use paircorr::Error;
use serde_json::{json, Value};

use crate::config::{parse_grid, Config};
use crate::output::{num, source_info, Format, Sink, Table};
use crate::{usage, Cli, Command, EXIT_VALIDATION};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_BAND: f64 = 100.0;
pub const DEFAULT_SLACK: f64 = 2.0;
pub const DEFAULT_BOUND_C: f64 = 0.8;
pub const DEFAULT_BUDGET: &str = "3,3,3";
pub const DEFAULT_SIEVE_LIMIT: usize = 1_000_000;

/// Global settings after merging flags, environment, config file and defaults.
pub struct Settings {
    pub config: Config,
    pub zeros: Option<String>,
    pub zeros_format: ZeroFormat,
    pub checksum: Option<String>,
    pub coverage: Option<f64>,
    pub cache_dir: PathBuf,
    pub tol: f64,
    pub sink: Sink,
}

fn default_cache_dir() -> PathBuf {
    if let Some(xdg) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(xdg).join("paircorr");
    }
    match std::env::var_os("HOME") {
        Some(home) => PathBuf::from(home).join(".cache").join("paircorr"),
        None => PathBuf::from(".paircorr-cache"),
    }
}

impl Settings {
    fn resolve(cli: &Cli) -> Result<Self> {
        let g = &cli.global;
        let config = match &g.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        let zeros_format = config
            .pick(g.zeros_format.clone(), "zeros-format")?
            .map(|s: String| s.parse::<ZeroFormat>())
            .transpose()
            .map_err(|e| usage(e.to_string()))?
            .unwrap_or(ZeroFormat::OrdinatesOnly);
        let format: Format = config
            .pick(g.format.clone(), "format")?
            .map(|s: String| s.parse())
            .transpose()
            .map_err(usage)?
            .unwrap_or(Format::Csv);
        let cache_dir = match (&g.cache_dir, std::env::var_os("PAIRCORR_CACHE")) {
            (Some(dir), _) => dir.clone(),
            (None, Some(env)) => PathBuf::from(env),
            (None, None) => config.pick(None, "cache-dir")?.unwrap_or_else(default_cache_dir),
        };
        let tol = config.pick(g.tol, "tol")?.unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(usage(format!("tol must be positive, got {tol}")));
        }
        let threads: Option<String> = config.pick(g.threads.clone(), "threads")?;
        if let Some(threads) = threads.filter(|t| t != "auto") {
            let n: usize = threads
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| usage(format!("threads must be a positive integer or auto, got {threads:?}")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .context("cannot configure worker threads")?;
        }
        Ok(Self {
            zeros: config.pick(g.zeros.clone(), "zeros")?,
            zeros_format,
            checksum: config.pick(g.checksum.clone(), "checksum")?,
            coverage: config.pick(g.coverage, "coverage")?,
            cache_dir,
            tol,
            sink: Sink {
                output: config.pick(g.output.clone(), "output")?,
                format,
                timestamp: !config.flag(g.no_timestamp, "no-timestamp")?,
            },
            config,
        })
    }

    pub fn load_table(&self) -> Result<ZeroTable> {
        let src = self
            .zeros
            .as_deref()
            .ok_or_else(|| usage("no zero table: pass --zeros or set zeros in the config file"))?;
        let table = if is_url(src) {
            fetch_remote_table(src, &self.cache_dir, self.checksum.as_deref(), self.zeros_format)?
        } else {
            let table = parse_zero_file(src, self.zeros_format)?;
            if let Some(expected) = &self.checksum {
                let expected = expected.trim().to_ascii_lowercase();
                if expected != table.provenance().checksum {
                    return Err(Error::ChecksumMismatch {
                        expected,
                        actual: table.provenance().checksum.clone(),
                    }
                    .into());
                }
            }
            table
        };
        Ok(match self.coverage {
            Some(h) => table.with_coverage(h)?,
            None => table,
        })
    }

    fn height(&self, flag: Option<f64>, table: &ZeroTable) -> Result<f64> {
        Ok(self.config.pick(flag, "T")?.unwrap_or(table.coverage()))
    }

    fn kernel(&self, flag: Option<String>, default: &str) -> Result<String> {
        Ok(self.config.pick(flag, "kernel")?.unwrap_or_else(|| default.to_string()))
    }
}

fn is_url(src: &str) -> bool {
    ["http://", "https://", "file://"].iter().any(|p| src.starts_with(p))
}

pub fn resolve_kernel(name: &str) -> Result<Kernel> {
    if let Some(k) = Kernel::builtin(name) {
        return Ok(k);
    }
    let path = std::path::Path::new(name);
    if path.is_file() {
        return Ok(Kernel::from_file(path)?);
    }
    Err(usage(format!("unknown kernel {name:?} (fejer, mt, or a kernel file)")))
}

pub fn grid_option(config: &Config, flag: Option<String>, key: &str, default: &str) -> Result<Vec<f64>> {
    let spec = config.pick(flag, key)?.unwrap_or_else(|| default.to_string());
    parse_grid(&spec)
}

pub fn budget_option(config: &Config, flag: Option<String>) -> Result<ErrorBudget> {
    let v = grid_option(config, flag, "budget", DEFAULT_BUDGET)?;
    if v.len() != 3 {
        return Err(usage("budget must be three numbers C1,C2,C3"));
    }
    Ok(ErrorBudget {
        c1: v[0],
        c2: v[1],
        c3: v[2],
    })
}

/// Powers of ten from 50 up to the coverage, plus the coverage itself.
pub fn default_rvm_grid(coverage: f64) -> Result<Vec<f64>> {
    if coverage < 3.0 {
        return Err(usage(format!(
            "table coverage {coverage} is below 3; nothing to validate"
        )));
    }
    let mut grid: Vec<f64> = [50.0, 100.0, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8]
        .into_iter()
        .filter(|&t| t < coverage)
        .collect();
    grid.push(coverage);
    Ok(grid)
}

pub fn run(cli: Cli) -> Result<u8> {
    let s = Settings::resolve(&cli)?;
    match cli.command {
        Command::Fetch(a) => {
            let src = s.zeros.as_deref().unwrap_or("");
            if !is_url(src) {
                return Err(usage("fetch needs --zeros to be an http(s):// or file:// URL"));
            }
            validate(&s, a, "fetch")
        }
        Command::Validate(a) => validate(&s, a, "validate"),
        Command::Fcurve(a) => fcurve(&s, a),
        Command::Kernel(a) => kernel(&s, a),
        Command::SimpleBound(a) => simple_bound(&s, a),
        Command::PairKernelSum(a) => pair_kernel_sum(&s, a),
        Command::ExplicitCheck(a) => explicit_check(&s, a),
        Command::DensityPlot(a) => density_plot(&s, a),
        Command::Verify(a) => crate::verify::run(&s, a),
    }
}

fn validate(s: &Settings, a: crate::ValidateArgs, command: &str) -> Result<u8> {
    let table = s.load_table()?;
    let slack = s.config.pick(a.slack, "slack")?.unwrap_or(DEFAULT_SLACK);
    let grid = match s.config.pick(a.t_grid, "t-grid")? {
        Some(spec) => parse_grid(&spec)?,
        None => default_rvm_grid(table.coverage())?,
    };
    let report = validate_rvm(&table, &grid, slack)?;
    let mut result = json!({ "rvm": report, "passed": report.passed() });
    if command == "fetch" {
        let (data, _) = cache_paths(&s.cache_dir, s.zeros.as_deref().unwrap_or(""));
        result["cache_path"] = json!(data.display().to_string());
    }
    s.sink.json(command, Some(source_info(&table)), result)?;
    if let Some(worst) = report.violations().max_by(|a, b| a.ratio.total_cmp(&b.ratio)) {
        eprintln!(
            "paircorr: Riemann-von Mangoldt check failed; worst at t = {}: N(t) = {}, main term {:.4}, allowed {:.4}",
            worst.t, worst.count, worst.estimate, worst.allowed
        );
        return Ok(EXIT_VALIDATION);
    }
    Ok(0)
}

fn fcurve(s: &Settings, a: crate::FcurveArgs) -> Result<u8> {
    let table = s.load_table()?;
    let t = s.height(a.t, &table)?;
    let alphas = grid_option(&s.config, a.alpha, "alpha", "0.1:1:0.1")?;
    if alphas.is_empty() {
        return Err(usage("alpha grid is empty"));
    }
    let mode = match s.config.pick(a.mode, "mode")?.as_deref().unwrap_or("banded") {
        "exact" => PairMode::Exact,
        "banded" => PairMode::Banded(s.config.pick(a.band, "band")?.unwrap_or(DEFAULT_BAND)),
        other => return Err(usage(format!("mode must be exact or banded, got {other:?}"))),
    };
    if t > table.coverage() {
        return Err(Error::Coverage {
            requested: t,
            available: table.coverage(),
        }
        .into());
    }
    let banded = matches!(mode, PairMode::Banded(_));
    let mut columns = vec!["alpha", "F", "main_terms", "deviation"];
    if banded {
        columns.push("truncation_bound");
    }
    columns.extend(["pairs_evaluated", "status"]);
    let mut out = Table::new(columns);
    let mut failure = None;
    for &alpha in &alphas {
        match f_alpha_curve(&table, t, &[alpha], mode) {
            Ok(c) => {
                let mut row = vec![
                    num(alpha),
                    num(c.empirical[0]),
                    num(c.theoretical[0]),
                    num(c.empirical[0] - c.theoretical[0]),
                ];
                if banded {
                    row.push(num(c.truncation_bounds[0]));
                }
                row.extend([c.pairs_evaluated[0].to_string(), "ok".to_string()]);
                out.push(row);
            }
            Err(e) => {
                let mut row = vec![num(alpha)];
                row.resize(out.columns.len() - 1, String::new());
                row.push(format!("failed: {e}"));
                out.push(row);
                failure = Some(e);
                break;
            }
        }
    }
    s.sink.table("fcurve", Some(source_info(&table)), &out)?;
    match failure {
        Some(e) => Err(e.into()),
        None => Ok(0),
    }
}

fn kernel(s: &Settings, a: crate::KernelArgs) -> Result<u8> {
    let kernel = resolve_kernel(&s.kernel(a.kernel, "fejer")?)?;
    if a.check {
        let defaults = TsangGrid::default();
        let grid = TsangGrid {
            x_max: s.config.pick(a.x_max, "x-max")?.unwrap_or(defaults.x_max),
            x_step: s.config.pick(a.step, "step")?.unwrap_or(defaults.x_step),
            y_values: match s.config.pick(a.y, "y")? {
                Some(spec) => parse_grid(&spec)?,
                None => defaults.y_values.clone(),
            },
            y_max: defaults.y_max,
        };
        if !(grid.x_step > 0.0 && grid.x_max > 0.0) {
            return Err(usage("x-max and step must be positive"));
        }
        let bound_c = s.config.pick(a.bound_c, "bound-c")?.unwrap_or(DEFAULT_BOUND_C);
        let report = verify_tsang_properties(&kernel, &grid, bound_c, s.tol)?;
        let passed = report.passed();
        s.sink.json(
            "kernel",
            None,
            json!({ "grid": grid, "report": report, "passed": passed }),
        )?;
        return Ok(if passed { 0 } else { EXIT_VALIDATION });
    }
    let xs = grid_option(&s.config, a.x, "x", "0:10:0.5")?;
    let ys = grid_option(&s.config, a.y, "y", "0")?;
    let decay = kernel.decay_constants();
    let mut out = Table::new(vec![
        "x",
        "y",
        "re",
        "im",
        "quadrature_error",
        "decay_bound",
        "converged",
    ]);
    for &y in &ys {
        for &x in &xs {
            let z = Complex64::new(x, y);
            let v = k_of_z(&kernel, z, s.tol)?;
            out.push(vec![
                num(x),
                num(y),
                num(v.value.re),
                num(v.value.im),
                num(v.quadrature_error),
                num(decay.bound(z)),
                v.converged.to_string(),
            ]);
        }
    }
    s.sink.table("kernel", None, &out)?;
    Ok(0)
}

fn simple_bound(s: &Settings, a: crate::SimpleBoundArgs) -> Result<u8> {
    let name = s.kernel(a.kernel, "all")?;
    let result = if name == "all" {
        let bounds = Kernel::builtins()
            .iter()
            .map(|k| simple_zero_bound(k, s.tol))
            .collect::<paircorr::Result<Vec<_>>>()?;
        serde_json::to_value(bounds)?
    } else {
        serde_json::to_value(simple_zero_bound(&resolve_kernel(&name)?, s.tol)?)?
    };
    s.sink.json("simple-bound", None, result)?;
    Ok(0)
}

fn pair_kernel_sum(s: &Settings, a: crate::PairKernelSumArgs) -> Result<u8> {
    let table = s.load_table()?;
    let kernel = resolve_kernel(&s.kernel(a.kernel, "fejer")?)?;
    let t = s.height(a.t, &table)?;
    let options = KernelSumOptions {
        tol: s.tol,
        band: s.config.pick(a.band, "band")?,
        threshold: s.config.pick(a.threshold, "threshold")?,
        grid_step: s.config.pick(a.grid_step, "grid-step")?,
    };
    let r = kernel_pair_sum(&table, &kernel, t, &options)?;
    let mut result: Value = serde_json::to_value(&r)?;
    result["ratio"] = json!(r.ratio());
    result["multiplicity_upper_bound"] = json!(r.multiplicity_upper_bound());
    s.sink.json("pair-kernel-sum", Some(source_info(&table)), result)?;
    Ok(0)
}

pub struct ExplicitPlan {
    pub grid: Vec<(f64, f64)>,
    pub budget: ErrorBudget,
    pub sieve_limit: usize,
}

pub fn explicit_plan(s: &Settings, a: crate::ExplicitArgs) -> Result<ExplicitPlan> {
    let xs = grid_option(&s.config, a.x, "x", "10,100,1000")?;
    let ts = grid_option(&s.config, a.t, "t", "10,50,200")?;
    if xs.is_empty() || ts.is_empty() {
        return Err(usage("x and t grids must be non-empty"));
    }
    let sieve_limit = s
        .config
        .pick(a.sieve_limit, "sieve-limit")?
        .unwrap_or(DEFAULT_SIEVE_LIMIT);
    Ok(ExplicitPlan {
        grid: xs.iter().flat_map(|&x| ts.iter().map(move |&t| (x, t))).collect(),
        budget: budget_option(&s.config, a.budget)?,
        sieve_limit,
    })
}

fn explicit_check(s: &Settings, a: crate::ExplicitArgs) -> Result<u8> {
    let plan = explicit_plan(s, a)?;
    let table = s.load_table()?;
    let vm = sieve_von_mangoldt(plan.sieve_limit)?;
    let report = residual_report(&table, &vm, &plan.grid, plan.budget)?;
    let mut out = Table::new(vec![
        "x",
        "t",
        "residual_re",
        "residual_im",
        "abs_residual",
        "envelope",
        "lhs_tail_bound",
        "rhs_tail_bound",
        "status",
    ]);
    let mut failed = 0;
    for r in &report {
        failed += (r.status == ResidualStatus::Fail) as usize;
        let status = match r.status {
            ResidualStatus::Pass => "pass",
            ResidualStatus::Fail => "fail",
            ResidualStatus::NearResonance => "near-resonance",
        };
        out.push(vec![
            num(r.x),
            num(r.t),
            num(r.residual.re),
            num(r.residual.im),
            num(r.residual.norm()),
            num(r.envelope),
            num(r.lhs_tail_bound),
            num(r.rhs_tail_bound),
            status.to_string(),
        ]);
    }
    s.sink.table("explicit-check", Some(source_info(&table)), &out)?;
    if failed > 0 {
        eprintln!("paircorr: {failed} of {} grid points exceed the envelope", report.len());
        return Ok(EXIT_VALIDATION);
    }
    Ok(0)
}

fn density_plot(s: &Settings, a: crate::DensityArgs) -> Result<u8> {
    let table = s.load_table()?;
    let t = s.height(a.t, &table)?;
    if t > table.coverage() {
        return Err(Error::Coverage {
            requested: t,
            available: table.coverage(),
        }
        .into());
    }
    let sigmas = grid_option(&s.config, a.sigma, "sigma", "0.5:1:0.05")?;
    if sigmas.is_empty() {
        return Err(usage("sigma grid is empty"));
    }
    let c = s.config.pick(a.kv_c, "kv-c")?.unwrap_or(ZeroFreeRegion::DEFAULT_C);
    let edge = 1.0 - eta_kv(&ZeroFreeRegion::new(c, 3.0)?, t)?;
    let mut out = Table::new(vec!["sigma", "count", "hypothesis_curve", "ratio", "zero_free_edge"]);
    for &sigma in &sigmas {
        let curve = density_hypothesis_curve(sigma, t)?;
        let count = table.count_density(sigma, t);
        out.push(vec![
            num(sigma),
            count.to_string(),
            num(curve),
            num(count as f64 / curve),
            num(edge),
        ]);
    }
    s.sink.table("density-plot", Some(source_info(&table)), &out)?;
    Ok(0)
}
