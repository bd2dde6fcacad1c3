//! `mdl`: evaluate multiple Dirichlet L-series from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 region error, 3 budget exhausted.

mod parse;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mdl_core::characters::{enumerate_characters, BoundedSequence, UnitGroup};
use mdl_core::compositions::enumerate_compositions;
use mdl_core::error::MdlError;
use mdl_core::integrator::{evaluate_integral_with, EvaluationResult, IntegralOptions, DEFAULT_MAX_CELLS};
use mdl_core::kernel::{
    in_domain_d, in_domain_d0, kernel_eval, kernel_eval_explained, lemma1_lhs, lemma1_potential, lemma1_rhs,
    SPoint,
};
use mdl_core::oracle::{evaluate_direct, evaluate_iterated_abel, partial_sum_trajectory};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use parse::{parse_complex_list, parse_real_list, parse_sequence, FieldError};
use report::*;

#[derive(Parser, Debug)]
#[command(name = "mdl", version, about = "Multiple Dirichlet L-series evaluator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate with one method.
    Eval(EvalArgs),
    /// Evaluate with every applicable method and report pairwise deltas.
    Compare(JobArgs),
    /// List the constrained compositions of rank R with their coefficients.
    Compositions {
        r: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// List the Dirichlet characters mod Q and the generator convention.
    Characters {
        q: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Check the derivative identity between kernels of ranks r-1 and r at random points.
    #[command(name = "lemma1-check")]
    Lemma1Check {
        /// Rank (3..=12); may also be given as --r.
        #[arg(required_unless_present = "r_flag", conflicts_with = "r_flag")]
        r: Option<usize>,
        #[arg(long = "r", id = "r_flag")]
        r_flag: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Report whether s lies in D and D0.
    Region {
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Evaluate the integral kernel at one point.
    #[command(name = "kernel-at")]
    KernelAt {
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Comma-separated t_1..t_r (each >= 1).
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = 0)]
        n0: u64,
        /// Include the per-composition terms.
        #[arg(long)]
        explain: bool,
    },
    /// Outer partial sums for x = 1..X as CSV (x,re,im).
    Trajectory {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long = "x")]
        x: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args, Debug)]
struct PointArgs {
    #[arg(long)]
    r: Option<usize>,
    /// Comma-separated complex list, e.g. 0.5+0i,0.7-1i.
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    /// Sequence per index: char:q:e1[,e2...] | alt | file:path. Repeat r times.
    #[arg(long = "seq", required = true)]
    seq: Vec<String>,
    #[arg(long, default_value_t = 0)]
    n0: u64,
}

#[derive(Args, Debug)]
struct JobArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Cell budget for the integral method (default: MDL_MAX_CELLS or 10^7).
    #[arg(long)]
    max_cells: Option<u64>,
    /// Omit wall-clock times so identical jobs give identical output.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    job: JobArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Integral)]
    method: MethodArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Integral,
    Direct,
    IteratedAbel,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

enum Failure {
    Usage(String),
    Core(MdlError),
}

impl From<FieldError> for Failure {
    fn from(e: FieldError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<MdlError> for Failure {
    fn from(e: MdlError) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<String, Failure>;

struct Point {
    p: SPoint,
    seqs: Vec<BoundedSequence>,
    labels: Vec<String>,
}

fn parse_s(r: Option<usize>, s: &str) -> Result<Vec<Complex64>, FieldError> {
    let s = parse_complex_list("s", s)?;
    if let Some(r) = r {
        if r == 0 {
            return Err(FieldError::new("r", "must be at least 1"));
        }
        if r != s.len() {
            return Err(FieldError::new("r", format!("r = {r} but --s has {} entries", s.len())));
        }
    }
    Ok(s)
}

fn parse_point(args: &PointArgs) -> Result<Point, Failure> {
    let s = parse_s(args.r, &args.s)?;
    if args.seq.len() != s.len() {
        return Err(FieldError::new("seq", format!("expected {} sequences, got {}", s.len(), args.seq.len())).into());
    }
    let seqs = args.seq.iter().map(|t| parse_sequence(t)).collect::<Result<Vec<_>, _>>()?;
    let labels = seqs.iter().map(|q| q.label().to_string()).collect();
    let p = SPoint::new(s, args.n0).map_err(|e| Failure::Usage(format!("--s: {e}")))?;
    Ok(Point { p, seqs, labels })
}

fn max_cells(flag: Option<u64>) -> Result<u64, FieldError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("MDL_MAX_CELLS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| FieldError::new("max-cells", format!("MDL_MAX_CELLS='{v}' is not a positive integer"))),
        Err(_) => Ok(DEFAULT_MAX_CELLS),
    }
}

fn job_of(pt: &Point, tol: f64) -> Job {
    Job {
        r: pt.p.r(),
        s: pt.p.s().iter().map(|&z| z.into()).collect(),
        n0: pt.p.n0(),
        sequences: pt.labels.clone(),
        tol,
    }
}

fn check_tol(tol: f64) -> Result<(), FieldError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(FieldError::new("tol", format!("must be positive, got {tol}")))
    }
}

fn run_method(method: MethodArg, pt: &Point, tol: f64, cells: u64) -> Result<EvaluationResult, MdlError> {
    match method {
        MethodArg::Integral => {
            let opts = IntegralOptions {
                max_cells: cells,
                ..Default::default()
            };
            evaluate_integral_with(&pt.seqs, &pt.p, tol, &opts)
        }
        MethodArg::Direct => evaluate_direct(&pt.seqs, &pt.p, tol).map(|r| r.to_evaluation(&pt.p)),
        MethodArg::IteratedAbel => evaluate_iterated_abel(&pt.seqs, &pt.p, tol).map(|r| r.to_evaluation(&pt.p)),
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn csv_row(res: &MethodReport) -> String {
    format!(
        "{},{},{},{},{},{}",
        res.method, res.value.re, res.value.im, res.error_estimate, res.in_d, res.in_d0
    )
}

const CSV_HEADER: &str = "method,re,im,error_estimate,in_D,in_D0";

fn cmd_eval(args: &EvalArgs) -> Outcome {
    let job = &args.job;
    check_tol(job.tol)?;
    let cells = max_cells(job.max_cells)?;
    let pt = parse_point(&job.point)?;
    let res = run_method(args.method, &pt, job.tol, cells)?;
    let result = MethodReport::new(&res, !job.no_timing);
    Ok(match job.format {
        Format::Json => json(&EvalReport {
            schema_version: SCHEMA_VERSION,
            command: "eval",
            job: job_of(&pt, job.tol),
            result,
        }),
        Format::Csv => format!("{CSV_HEADER}\n{}", csv_row(&result)),
    })
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Integral => "integral",
        MethodArg::Direct => "direct",
        MethodArg::IteratedAbel => "iterated-abel",
    }
}

fn cmd_compare(job: &JobArgs) -> Outcome {
    check_tol(job.tol)?;
    let cells = max_cells(job.max_cells)?;
    let pt = parse_point(&job.point)?;
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    let mut first_error = None;
    for m in [MethodArg::Integral, MethodArg::Direct, MethodArg::IteratedAbel] {
        match run_method(m, &pt, job.tol, cells) {
            Ok(res) => results.push(MethodReport::new(&res, !job.no_timing)),
            Err(e) => {
                skipped.push(Skipped {
                    method: method_name(m),
                    kind: error_kind(&e),
                    message: e.to_string(),
                });
                first_error.get_or_insert(e);
            }
        }
    }
    if results.is_empty() {
        return Err(Failure::Core(first_error.expect("at least one method ran")));
    }
    let mut deltas = Vec::new();
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let (a, b) = (&results[i], &results[j]);
            let delta = Complex64::new(a.value.re - b.value.re, a.value.im - b.value.im).norm();
            let combined_error = a.error_estimate + b.error_estimate;
            deltas.push(Delta {
                a: a.method,
                b: b.method,
                delta,
                combined_error,
                within: delta <= combined_error,
            });
        }
    }
    Ok(match job.format {
        Format::Json => json(&CompareReport {
            schema_version: SCHEMA_VERSION,
            command: "compare",
            job: job_of(&pt, job.tol),
            in_d: in_domain_d(&pt.p),
            in_d0: in_domain_d0(&pt.p),
            results,
            skipped,
            deltas,
        }),
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            for r in &results {
                out.push('\n');
                out.push_str(&csv_row(r));
            }
            out
        }
    })
}

fn cmd_compositions(r: usize, format: Format) -> Outcome {
    let terms = enumerate_compositions(r).map_err(|e| Failure::Usage(format!("r: {e}")))?;
    Ok(match format {
        Format::Json => serde_json::to_string(terms).expect("terms serialize"),
        Format::Csv => {
            let mut out = String::from("k,coeff");
            for t in terms {
                let k: Vec<String> = t.k.iter().map(u32::to_string).collect();
                out.push_str(&format!("\n{},{}", k.join(" "), t.coeff));
            }
            out
        }
    })
}

fn convention(group: &UnitGroup) -> String {
    let mut parts = vec![
        "chi(g_j) = exp(2 pi i e_j / d_j) on the listed generators g_j of orders d_j".to_string(),
        "each generator is 1 modulo the other prime-power components (CRT lift)".to_string(),
        "odd p^k and 4: smallest primitive root; 2^k with k >= 3: -1 then 5".to_string(),
    ];
    if group.factors().is_empty() {
        parts.push("trivial unit group: only the principal character".into());
    }
    parts.join("; ")
}

fn cmd_characters(q: u64, format: Format) -> Outcome {
    let group = UnitGroup::new(q).map_err(|e| Failure::Usage(format!("q: {e}")))?;
    let chars = enumerate_characters(q).map_err(|e| Failure::Usage(format!("q: {e}")))?;
    let entries: Vec<CharacterEntry> = chars
        .iter()
        .map(|c| CharacterEntry {
            label: c.label(),
            exponents: c.exponents().to_vec(),
            principal: c.is_principal(),
            values: (1..=q).map(|n| c.value_exact(n).map(|z| [z.num(), z.den()])).collect(),
        })
        .collect();
    Ok(match format {
        Format::Json => json(&CharactersReport {
            schema_version: SCHEMA_VERSION,
            command: "characters",
            modulus: q,
            convention: convention(&group),
            generators: group.generators(),
            orders: group.orders(),
            characters: entries,
        }),
        Format::Csv => {
            let mut out = String::from("label,principal,n,re,im");
            for c in &chars {
                for n in 1..=q {
                    let z = c.value(n);
                    out.push_str(&format!("\n{},{},{n},{},{}", c.label(), c.is_principal(), z.re, z.im));
                }
            }
            out
        }
    })
}

fn cmd_lemma1(r: usize, trials: usize, seed: u64) -> Outcome {
    if !(3..=12).contains(&r) {
        return Err(FieldError::new("r", "the identity is checked for 3 <= r <= 12").into());
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut rel, mut fd_gap) = (0.0f64, 0.0f64);
    let h = 1e-5;
    for _ in 0..trials {
        let s: Vec<Complex64> = (0..r)
            .map(|_| Complex64::new(rng.gen_range(-1.5..3.0), rng.gen_range(-3.0..3.0)))
            .collect();
        let p = SPoint::new(s, rng.gen_range(0..4))?;
        let t: Vec<f64> = (0..r).map(|_| rng.gen_range(1.5..6.0)).collect();
        let lhs = lemma1_lhs(&t, &p)?;
        let rhs = lemma1_rhs(&t, &p)?;
        rel = rel.max((lhs - rhs).norm() / rhs.norm());
        let (mut up, mut dn) = (t.clone(), t.clone());
        up[0] += h;
        dn[0] -= h;
        let fd = -(lemma1_potential(&up, &p)? - lemma1_potential(&dn, &p)?) / (2.0 * h);
        fd_gap = fd_gap.max((fd - lhs).norm() / lhs.norm());
    }
    Ok(json(&LemmaReport {
        schema_version: SCHEMA_VERSION,
        command: "lemma1-check",
        r,
        trials,
        seed,
        max_relative_gap: rel,
        max_finite_difference_gap: fd_gap,
        pass: rel <= 1e-10 && fd_gap <= 1e-6,
    }))
}

fn cmd_region(r: Option<usize>, s: &str) -> Outcome {
    let s = parse_s(r, s)?;
    let p = SPoint::new(s, 0).map_err(|e| Failure::Usage(format!("--s: {e}")))?;
    let (d, d0) = (in_domain_d(&p), in_domain_d0(&p));
    Ok(json(&RegionReport {
        schema_version: SCHEMA_VERSION,
        command: "region",
        r: p.r(),
        s: p.s().iter().map(|&z| z.into()).collect(),
        in_d: d,
        in_d0: d0,
        classification: match (d, d0) {
            (_, true) => "absolutely convergent (D0)",
            (true, false) => "conditionally convergent (D)",
            _ => "outside proven region",
        },
    }))
}

fn cmd_kernel(r: Option<usize>, s: &str, t: &str, n0: u64, explain: bool) -> Outcome {
    let s = parse_s(r, s)?;
    let t = parse_real_list("t", t)?;
    if t.len() != s.len() {
        return Err(FieldError::new("t", format!("expected {} entries, got {}", s.len(), t.len())).into());
    }
    let p = SPoint::new(s, n0).map_err(|e| Failure::Usage(format!("--s: {e}")))?;
    let comps = enumerate_compositions(p.r()).map_err(|e| Failure::Usage(format!("--r: {e}")))?;
    let kv = if explain {
        kernel_eval_explained(&t, &p, comps)
    } else {
        kernel_eval(&t, &p, comps)
    }
    .map_err(|e| Failure::Usage(format!("--t: {e}")))?;
    Ok(json(&KernelReport {
        schema_version: SCHEMA_VERSION,
        command: "kernel-at",
        r: p.r(),
        s: p.s().iter().map(|&z| z.into()).collect(),
        t,
        n0,
        value: kv.value.into(),
        terms: kv.terms,
    }))
}

fn cmd_trajectory(point: &PointArgs, x: u64, format: Format) -> Outcome {
    if x == 0 {
        return Err(FieldError::new("x", "must be a positive integer").into());
    }
    let pt = parse_point(point)?;
    let traj = partial_sum_trajectory(&pt.seqs, &pt.p, x)?;
    Ok(match format {
        Format::Csv => {
            let mut out = String::from("x,re,im");
            for (i, z) in traj.iter().enumerate() {
                out.push_str(&format!("\n{},{},{}", i + 1, z.re, z.im));
            }
            out
        }
        Format::Json => json(&traj.iter().map(|&z| Cplx::from(z)).collect::<Vec<_>>()),
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Eval(_) => "eval",
        Command::Compare(_) => "compare",
        Command::Compositions { .. } => "compositions",
        Command::Characters { .. } => "characters",
        Command::Lemma1Check { .. } => "lemma1-check",
        Command::Region { .. } => "region",
        Command::KernelAt { .. } => "kernel-at",
        Command::Trajectory { .. } => "trajectory",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = command_name(&cli.command);
    let outcome = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Compositions { r, format } => cmd_compositions(*r, *format),
        Command::Characters { q, format } => cmd_characters(*q, *format),
        Command::Lemma1Check { r, r_flag, trials, seed } => cmd_lemma1(r.or(*r_flag).unwrap_or(0), *trials, *seed),
        Command::Region { r, s } => cmd_region(*r, s),
        Command::KernelAt { r, s, t, n0, explain } => cmd_kernel(*r, s, t, *n0, *explain),
        Command::Trajectory { point, x, format } => cmd_trajectory(point, *x, *format),
    };
    let mut stdout = std::io::stdout().lock();
    match outcome {
        Ok(text) => {
            let _ = writeln!(stdout, "{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            let body = ErrorBody {
                kind: "usage",
                message: msg,
                best_value: None,
                best_error_estimate: None,
            };
            let _ = writeln!(
                stdout,
                "{}",
                json(&ErrorReport {
                    schema_version: SCHEMA_VERSION,
                    command: name.into(),
                    error: body,
                })
            );
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            let code = match &e {
                MdlError::Region(_) => 2,
                MdlError::Budget { .. } => 3,
                _ => 1,
            };
            let _ = writeln!(
                stdout,
                "{}",
                json(&ErrorReport {
                    schema_version: SCHEMA_VERSION,
                    command: name.into(),
                    error: error_body(&e),
                })
            );
            ExitCode::from(code)
        }
    }
}
