//! `qwalk`: verification suites and data export for the quantum-walk path
//! calculus. Every subcommand prints one JSON report unless `--out csv` is given.
//! Exit status is 0 when every check passes, 1 on a numerical failure and 2
//! on bad input.

mod report;

use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qwalk_core::acceptance::{self, Check};
use qwalk_core::classical::{
    binomial_law, classical_theorem_check, doob_meyer, endpoint_distribution, martingale_increments,
};
use qwalk_core::decoherence::{
    decoherence_matrix, quantum_integral, spectrum_bounds, DecoherenceMatrix, DEFAULT_DENSE_MAX_N,
};
use qwalk_core::evolution::{distribution, evolve};
use qwalk_core::ito::{
    char_decomposition, ito_step, ito_telescoped, residual_scale, tanaka, tanaka_explicit,
};
use qwalk_core::pathspace::{positions_into, PathFn, DEFAULT_MAX_N};
use qwalk_core::{CoinF64, Cx, FunctionTableF64, Mat2F64, Method, PathFunctionalF64, PathSum};
use qwalk_core::{QubitStateF64, StepWeightsF64};

use report::RunReport;

#[derive(Parser, Debug)]
#[command(name = "qwalk", version, about = "Quantum walk path-sum identities")]
struct Cli {
    /// Worker threads for path enumeration (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct CoinArg {
    /// "hadamard" or eight numbers a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im
    #[arg(long, default_value = "hadamard")]
    coin: CoinF64,
}

#[derive(clap::Args, Debug, Clone)]
struct StateArgs {
    /// Left chirality amplitude as re,im
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    alpha: String,
    /// Right chirality amplitude as re,im
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    beta: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Operator Ito identity at every step and telescoped
    VerifyIto {
        #[command(flatten)]
        coin: CoinArg,
        #[arg(long)]
        n: u32,
        /// random | x | x2 | abs | ceil | const:re[,im] | exp:xi | table:<csv>
        #[arg(long, default_value = "random")]
        f: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bound on residual / (n max|f|)
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Tanaka formula and the local time at the origin
    Tanaka {
        #[command(flatten)]
        coin: CoinArg,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Decomposition of U(xi)^n
    Char {
        #[command(flatten)]
        coin: CoinArg,
        #[arg(long)]
        n: u32,
        /// Single frequency; without it, `--samples` uniform points in [0, 2 pi)
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<f64>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Position distribution
    Dist {
        #[command(flatten)]
        coin: CoinArg,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = MethodArg::Recursion)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        out: Output,
    },
    /// Min-kernel quantum integral of a real path functional
    Qintegral {
        #[command(flatten)]
        coin: CoinArg,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        n: u32,
        /// const:c | endpoint_indicator:x | cylinder:x | endpoint_table:<csv>
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Decoherence matrix structure
    Decoherence {
        #[command(flatten)]
        coin: CoinArg,
        #[command(flatten)]
        state: StateArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, value_delimiter = ',', default_value = "hermitian,psd,grandsum")]
        check: Vec<DecoherenceCheck>,
        /// Largest n for which the matrix is materialised
        #[arg(long, default_value_t = DEFAULT_DENSE_MAX_N)]
        dense_cap: u32,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        out: Output,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Simple random walk reduction
    Classical {
        /// Left-step probability
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "random")]
        f: String,
        #[arg(long, value_delimiter = ',', default_value = "ito,doob,binomial")]
        check: Vec<ClassicalCheck>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// Full acceptance suite
    Sweep {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run only these criteria
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum MethodArg {
    Paths,
    Recursion,
    Fourier,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Paths => Method::Paths,
            MethodArg::Recursion => Method::Recursion,
            MethodArg::Fourier => Method::Fourier,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Output {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum DecoherenceCheck {
    Hermitian,
    Psd,
    Grandsum,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ClassicalCheck {
    Ito,
    Doob,
    Binomial,
}

/// Failure modes that map to distinct exit codes.
enum Outcome {
    Pass,
    Fail(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(what)) => {
            eprintln!("qwalk: check failed: {what}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("qwalk: error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring thread pool")?;
    }
    let max_n = match std::env::var("QWALK_MAX_N") {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .with_context(|| format!("QWALK_MAX_N={v:?} is not a non-negative integer"))?,
        Err(_) => DEFAULT_MAX_N,
    };
    let eval = PathSum::default().with_max_n(max_n);

    match cli.command {
        Command::VerifyIto {
            coin,
            n,
            f,
            seed,
            tol,
        } => verify_ito(eval, coin.coin, n, &f, seed, tol),
        Command::Tanaka {
            coin,
            state,
            n,
            tol,
        } => run_tanaka(eval, coin.coin, &state, n, tol),
        Command::Char {
            coin,
            n,
            xi,
            samples,
            tol,
        } => run_char(eval, coin.coin, n, xi, samples, tol),
        Command::Dist {
            coin,
            state,
            n,
            method,
            out,
        } => run_dist(coin.coin, &state, n, method, out),
        Command::Qintegral {
            coin,
            state,
            n,
            f,
            tol,
        } => run_qintegral(eval, coin.coin, &state, n, &f, tol),
        Command::Decoherence {
            coin,
            state,
            n,
            check,
            dense_cap,
            out,
            seed,
        } => run_decoherence(
            eval,
            coin.coin,
            &state,
            n,
            &check,
            DenseOpts {
                cap: dense_cap,
                out,
                seed,
            },
        ),
        Command::Classical {
            p,
            n,
            f,
            check,
            seed,
            tol,
        } => run_classical(eval, p, n, &f, &check, seed, tol),
        Command::Sweep { seed, only } => run_sweep(seed, &only),
    }
}

/// Spreads enumeration over the pool once there is enough work. The split
/// reduction is bit-identical to the serial one, so output does not depend
/// on the thread count.
fn split(eval: PathSum, n: u32) -> PathSum {
    eval.with_split_depth(if n >= 12 { 6 } else { 0 })
}

fn parse_complex(s: &str) -> Result<Cx<f64>> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |p: &str| {
        p.trim()
            .parse::<f64>()
            .with_context(|| format!("{p:?} in {s:?}"))
    };
    match parts.as_slice() {
        [re] => Ok(Cx::new(num(re)?, 0.0)),
        [re, im] => Ok(Cx::new(num(re)?, num(im)?)),
        _ => bail!("expected re,im, got {s:?}"),
    }
}

fn state(args: &StateArgs) -> Result<QubitStateF64> {
    let alpha = parse_complex(&args.alpha).context("--alpha")?;
    let beta = parse_complex(&args.beta).context("--beta")?;
    QubitStateF64::new(alpha, beta).map_err(|e| anyhow!("initial state: {e}"))
}

fn coin_label(c: &CoinF64) -> Value {
    if *c == CoinF64::hadamard() {
        json!("hadamard")
    } else {
        report::mat_json(c.u())
    }
}

fn outcome(report: &RunReport) -> Outcome {
    match report.first_failure() {
        None => Outcome::Pass,
        Some(c) => Outcome::Fail(format!("{} = {:e}, bound {:e}", c.name, c.value, c.bound)),
    }
}

fn finish(report: RunReport) -> Result<Outcome> {
    let outcome = outcome(&report);
    report.print()?;
    Ok(outcome)
}

fn verify_ito(
    eval: PathSum,
    coin: CoinF64,
    n: u32,
    f_spec: &str,
    seed: u64,
    tol: f64,
) -> Result<Outcome> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let mut r = RunReport::start("verify-ito");
    let f = FunctionTableF64::parse(f_spec, n, seed)?;
    let eval = split(eval, n);
    let mut step_max = 0.0f64;
    for m in 0..n {
        step_max = step_max.max(ito_step(&eval, &coin, n, m, &f)?.residual::<f64>());
    }
    let tele = ito_telescoped(&eval, &coin, n, &f)?.residual::<f64>();
    let scale = residual_scale(n, &f);
    r.param("n", n)
        .param("coin", coin_label(&coin))
        .param("f", f.name())
        .param("seed", seed)
        .param("tol", tol)
        .value("scale", scale)
        .value("residual_step_max", step_max)
        .value("residual_telescoped", tele)
        .check(Check::at_most("residual_step_max", step_max, tol * scale))
        .check(Check::at_most("residual_telescoped", tele, tol * scale));
    finish(r)
}

fn run_tanaka(eval: PathSum, coin: CoinF64, st: &StateArgs, n: u32, tol: f64) -> Result<Outcome> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let mut r = RunReport::start("tanaka");
    let phi = state(st)?;
    let eval = split(eval, n);
    let t = tanaka(&eval, &coin, n)?;
    let explicit = tanaka_explicit(&eval, &coin, n)?;
    let gap = t
        .lhs()
        .max_abs_diff(&explicit.lhs)
        .max(t.sgn_term().max_abs_diff(&explicit.martingale_term))
        .max(t.local_time_term().max_abs_diff(&explicit.compensator_term));
    let residual = t.ito.residual::<f64>();
    let form = |m: &Mat2F64| phi.spinor().inner(&m.apply(phi.spinor()));
    r.param("n", n)
        .param("coin", coin_label(&coin))
        .param("alpha", report::cx_json(phi.alpha()))
        .param("beta", report::cx_json(phi.beta()))
        .param("tol", tol)
        .value("lhs", report::mat_json(t.lhs()))
        .value("sgn_term", report::mat_json(t.sgn_term()))
        .value("local_time_term", report::mat_json(t.local_time_term()))
        .value(
            "local_time_form",
            report::cx_json(form(t.local_time_term())),
        )
        .value("residual", residual)
        .check(Check::at_most("residual", residual, tol))
        .check(Check::at_most(
            "explicit sgn and local time vs differences",
            gap,
            tol,
        ));
    finish(r)
}

fn run_char(
    eval: PathSum,
    coin: CoinF64,
    n: u32,
    xi: Option<f64>,
    samples: usize,
    tol: f64,
) -> Result<Outcome> {
    let mut r = RunReport::start("char");
    let xis: Vec<f64> = match xi {
        Some(x) => vec![x],
        None if samples == 0 => bail!("--samples must be positive"),
        None => (0..samples)
            .map(|j| std::f64::consts::TAU * j as f64 / samples as f64)
            .collect(),
    };
    let eval = split(eval, n);
    let mut worst = 0.0f64;
    let mut worst_xi = xis[0];
    for x in &xis {
        let d = char_decomposition(&eval, &coin, n, *x)?;
        let res = d.max_residual();
        if res.is_nan() || res > worst {
            worst = res;
            worst_xi = *x;
        }
    }
    r.param("n", n)
        .param("coin", coin_label(&coin))
        .param("xi", xis.iter().map(|x| json!(x)).collect::<Vec<_>>())
        .param("tol", tol)
        .value("worst_xi", worst_xi);
    if let [x] = xis.as_slice() {
        let d = char_decomposition(&eval, &coin, n, *x)?;
        r.value("u_xi_pow_n", report::mat_json(&d.lhs_power))
            .value("sin_term", report::mat_json(&d.sin_term))
            .value("cos_term", report::mat_json(&d.cos_term));
    }
    r.value("max_residual", worst)
        .check(Check::at_most("max pairwise gap", worst, tol));
    finish(r)
}

fn run_dist(
    coin: CoinF64,
    st: &StateArgs,
    n: u32,
    method: MethodArg,
    out: Output,
) -> Result<Outcome> {
    let mut r = RunReport::start("dist");
    let phi = state(st)?;
    let field = evolve(method.into(), &coin, &phi, n)?;
    let d = distribution(&field);
    let total = d.total();
    let min_p = d.probs.iter().cloned().fold(f64::INFINITY, f64::min);
    let ni = n as i64;
    let rows: Vec<(i64, f64, Cx<f64>, Cx<f64>)> = field
        .iter()
        .filter(|(x, _)| (x + ni) % 2 == 0)
        .map(|(x, s)| (x, d.at(x), s.l, s.r))
        .collect();
    r.check(Check::at_most("|total - 1|", (total - 1.0).abs(), 1e-12))
        .check(Check::at_least("min probability", min_p, -1e-14));
    if out == Output::Csv {
        let mut w = std::io::stdout().lock();
        report::write_dist_csv(&mut w, &rows)?;
        return Ok(outcome(&r));
    }
    r.param("n", n)
        .param("coin", coin_label(&coin))
        .param("alpha", report::cx_json(phi.alpha()))
        .param("beta", report::cx_json(phi.beta()))
        .param("method", format!("{method:?}").to_lowercase())
        .value("total", total)
        .value(
            "rows",
            rows.iter()
                .map(|(x, p, l, rr)| json!({"x": x, "prob": p, "psiL": [l.re, l.im], "psiR": [rr.re, rr.im]}))
                .collect::<Vec<_>>(),
        );
    finish(r)
}

fn run_qintegral(
    eval: PathSum,
    coin: CoinF64,
    st: &StateArgs,
    n: u32,
    spec: &str,
    tol: f64,
) -> Result<Outcome> {
    let mut r = RunReport::start("qintegral");
    let phi = state(st)?;
    let f = PathFunctionalF64::parse(spec)?;
    let value = quantum_integral(&eval, &coin, &phi, n, &f)?;
    r.param("n", n)
        .param("coin", coin_label(&coin))
        .param("alpha", report::cx_json(phi.alpha()))
        .param("beta", report::cx_json(phi.beta()))
        .param("f", f.name())
        .param("tol", tol)
        .value("integral", value)
        .check(Check::at_most(
            "non-finite integral",
            if value.is_finite() { 0.0 } else { 1.0 },
            0.0,
        ));
    // the dense double sum is the reference while it is cheap
    if n <= 8 {
        let d = decoherence_matrix(&coin, &phi, n)?;
        let mut buf = Vec::new();
        let vals: Vec<f64> = (0..1u64 << n)
            .map(|k| {
                positions_into(n, k, &mut buf);
                f.eval(&buf).re
            })
            .collect();
        let dense = d.integrate(&vals);
        r.value("dense_integral", dense).check(Check::at_most(
            "matrix-free vs double sum",
            (value - dense).abs(),
            tol,
        ));
    }
    finish(r)
}

/// How the dense decoherence matrix is handled.
struct DenseOpts {
    cap: u32,
    out: Output,
    seed: u64,
}

fn run_decoherence(
    eval: PathSum,
    coin: CoinF64,
    st: &StateArgs,
    n: u32,
    checks: &[DecoherenceCheck],
    opts: DenseOpts,
) -> Result<Outcome> {
    let DenseOpts {
        cap: dense_cap,
        out,
        seed,
    } = opts;
    if out == Output::Csv && n > dense_cap {
        bail!("CSV export needs the dense matrix; n = {n} exceeds --dense-cap {dense_cap}");
    }
    let mut r = RunReport::start("decoherence");
    let phi = state(st)?;
    r.param("n", n)
        .param("coin", coin_label(&coin))
        .param("alpha", report::cx_json(phi.alpha()))
        .param("beta", report::cx_json(phi.beta()))
        .param("seed", seed)
        .param("dense_cap", dense_cap);
    let dense = if n <= dense_cap {
        Some(DecoherenceMatrix::build(&coin, &phi, n, dense_cap)?)
    } else {
        eprintln!("qwalk: n = {n} exceeds the dense cap {dense_cap}; using matrix-free checks");
        None
    };
    r.value(
        "mode",
        if dense.is_some() {
            "dense"
        } else {
            "matrix-free"
        },
    );
    let (lo, hi) = spectrum_bounds(&eval, &coin, &phi, n)?;
    for c in checks {
        match (c, &dense) {
            (DecoherenceCheck::Hermitian, Some(d)) => {
                r.check(Check::at_most(
                    "hermitian residual",
                    d.hermitian_residual(),
                    1e-13,
                ));
            }
            (DecoherenceCheck::Hermitian, None) => {
                // a Gram matrix is Hermitian by construction; the 2x2 dual is
                // the only object formed here
                let g = qwalk_core::decoherence::dual_gram(&eval, &coin, &phi, n)?;
                let res = (g.b - g.c.conj())
                    .norm()
                    .max(g.a.im.abs())
                    .max(g.d.im.abs());
                r.check(Check::at_most("dual Gram hermitian residual", res, 1e-13));
            }
            (DecoherenceCheck::Psd, Some(d)) => {
                let (l, _) = d.eigen_bounds(64, seed);
                r.value("lanczos_min_eigenvalue", l)
                    .check(Check::at_least("lanczos min eigenvalue", l, -1e-10))
                    .check(Check::at_least(
                        "min principal 2x2 minor",
                        d.min_principal_minor(2000, seed),
                        -1e-10,
                    ));
            }
            (DecoherenceCheck::Psd, None) => {}
            (DecoherenceCheck::Grandsum, Some(d)) => {
                let g = d.grand_sum();
                r.value("grand_sum", report::cx_json(g))
                    .check(Check::at_most(
                        "|grand sum - 1|",
                        (g - Cx::new(1.0, 0.0)).norm(),
                        1e-12,
                    ));
            }
            (DecoherenceCheck::Grandsum, None) => {
                let g = quantum_integral(&eval, &coin, &phi, n, &PathFunctionalF64::constant(1.0))?;
                r.value("grand_sum", g).check(Check::at_most(
                    "|grand sum - 1|",
                    (g - 1.0).abs(),
                    1e-12,
                ));
            }
        }
    }
    if checks.contains(&DecoherenceCheck::Psd) {
        r.value("min_eigenvalue", lo)
            .value("max_eigenvalue", hi)
            .check(Check::at_least("min eigenvalue", lo, -1e-10));
    }
    if let (Output::Csv, Some(d)) = (out, &dense) {
        report::write_matrix_csv(std::io::stdout().lock(), d)?;
        return Ok(outcome(&r));
    }
    finish(r)
}

fn run_classical(
    eval: PathSum,
    p: f64,
    n: u32,
    f_spec: &str,
    checks: &[ClassicalCheck],
    seed: u64,
    tol: f64,
) -> Result<Outcome> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let mut r = RunReport::start("classical");
    let wts = StepWeightsF64::new(p)?;
    let f = FunctionTableF64::parse(f_spec, n, seed)?;
    let eval = split(eval, n);
    r.param("p", p)
        .param("n", n)
        .param("f", f.name())
        .param("seed", seed)
        .param("tol", tol);
    for c in checks {
        match c {
            ClassicalCheck::Ito => {
                let res = classical_theorem_check(&eval, &wts, n, &f)?;
                let scale = residual_scale(n, &f);
                r.value("theorem_residual", res).check(Check::at_most(
                    "theorem residual",
                    res,
                    tol * scale,
                ));
            }
            ClassicalCheck::Doob => {
                let d = doob_meyer(&eval, &wts, n, &f)?;
                let split_gap =
                    (d.total_expect - d.martingale_expect - d.compensator_expect).norm();
                r.value("martingale_expect", report::cx_json(d.martingale_expect))
                    .value("compensator_expect", report::cx_json(d.compensator_expect))
                    .value("total_expect", report::cx_json(d.total_expect))
                    .check(Check::at_most(
                        "total - martingale - compensator",
                        split_gap,
                        tol * residual_scale(n, &f),
                    ));
                if p == 0.5 {
                    let inc = martingale_increments(&eval, &wts, n, &f)?
                        .iter()
                        .map(|z| z.norm())
                        .fold(0.0f64, f64::max);
                    r.check(Check::at_most(
                        "|martingale expectation|",
                        d.martingale_expect.norm(),
                        tol,
                    ))
                    .check(Check::at_most(
                        "max |martingale increment expectation|",
                        inc,
                        tol,
                    ));
                }
            }
            ClassicalCheck::Binomial => {
                let got = endpoint_distribution(&eval, &wts, n)?;
                let want = binomial_law(&wts, n)?;
                let gap = got
                    .iter()
                    .zip(&want)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                r.value(
                    "endpoint_law",
                    got.iter().map(|v| json!(v)).collect::<Vec<_>>(),
                )
                .check(Check::at_most("endpoint law vs exact binomial", gap, tol));
            }
        }
    }
    finish(r)
}

fn run_sweep(seed: u64, only: &[u8]) -> Result<Outcome> {
    let mut r = RunReport::start("sweep");
    let ids: Vec<u8> = if only.is_empty() {
        (1..=8).collect()
    } else {
        only.to_vec()
    };
    let mut reports = Vec::new();
    for id in ids {
        let c = acceptance::run(id, seed)
            .ok_or_else(|| anyhow!("no criterion {id}; valid ids are 1 to 8"))?;
        eprintln!("{}", c.summary_line());
        reports.push(c);
    }
    r.param("seed", seed);
    for c in &reports {
        for check in &c.checks {
            let mut check = check.clone();
            check.name = format!("{}: {}", c.id, check.name);
            r.check(check);
        }
        if let Some(e) = &c.error {
            r.check(Check::at_most(format!("{}: error {e}", c.id), 1.0, 0.0));
        }
    }
    r.value("criteria", serde_json::to_value(&reports)?);
    finish(r)
}
