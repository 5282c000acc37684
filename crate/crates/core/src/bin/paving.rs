//! `paving`: build and certify the counterexample projection, run exhaustive
//! symmetry searches, and scan random projections.
//!
//! Exit codes: 0 success, 1 usage or cap error, 2 internal verification
//! failure, 3 certification inconclusive.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use paving_core::linalg::{random_projection, random_unit_vector, Vector};
use paving_core::paving::{
    conjecture_a_test, conjecture_b_probe, paving_pair, scan, summarize, ScanConfig, ScanMode, DEFAULT_MAX_N,
};
use paving_core::rearrange::theorem1_symmetry;
use paving_core::report::{certificates_csv, header, json_document, records_csv};
use paving_core::weaver::{
    block_row_norms, build_frame, delta_p_exact, dimension, min_over_symmetries_v0, row_norm_sq_closed_form,
    verify_orthonormal, Block, Verdict,
};
use paving_core::{Error, WeaverParams};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "paving", version, about = "Paving counterexample certificates and symmetry experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the frame for one m and verify it exactly.
    Construct {
        #[arg(long)]
        m: u32,
    },
    /// Exhaustive exact certificate for each m in a range such as `6..12`.
    Certify {
        #[arg(long, value_parser = parse_range)]
        m: (u32, u32),
    },
    /// Exhaustive min ||psp|| on one random projection.
    Bruteforce {
        #[command(flatten)]
        instance: Instance,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
        /// With --epsilon, also probe the weaker conjecture.
        #[arg(long, requires = "epsilon")]
        gamma: Option<f64>,
        #[arg(long, requires = "gamma")]
        epsilon: Option<f64>,
    },
    /// Single-vector symmetry on one random projection.
    Theorem1 {
        #[command(flatten)]
        instance: Instance,
        /// Use the basis vector e_i (0-based) instead of a random unit vector.
        #[arg(long)]
        basis: Option<usize>,
    },
    /// A seeded batch of instance tests.
    Scan {
        #[command(flatten)]
        instance: Instance,
        #[arg(long)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Mode::ConjectureA)]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
    },
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
struct Instance {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    rank: usize,
    #[arg(long)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    ConjectureA,
    Theorem1,
    Both,
}

impl From<Mode> for ScanMode {
    fn from(m: Mode) -> ScanMode {
        match m {
            Mode::ConjectureA => ScanMode::ConjectureA,
            Mode::Theorem1 => ScanMode::Theorem1,
            Mode::Both => ScanMode::Both,
        }
    }
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let parse = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("bad m {x:?}: {e}"));
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (parse(lo)?, parse(hi.trim_start_matches('='))?),
        None => {
            let m = parse(s)?;
            (m, m)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok((lo, hi))
}

/// A finished report plus the exit code it implies.
struct Outcome {
    text: String,
    code: u8,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } | Error::InvalidArgument(_) | Error::DimensionMismatch { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Internal(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn flags(cli: &Cli) -> Value {
    let mut f = match &cli.command {
        Command::Construct { m } => json!({ "m": m }),
        Command::Certify { m } => json!({ "m": format!("{}..{}", m.0, m.1) }),
        Command::Bruteforce {
            instance,
            max_n,
            gamma,
            epsilon,
        } => json!({
            "n": instance.n, "rank": instance.rank, "seed": instance.seed,
            "max_n": max_n, "gamma": gamma, "epsilon": epsilon,
        }),
        Command::Theorem1 { instance, basis } => json!({
            "n": instance.n, "rank": instance.rank, "seed": instance.seed, "basis": basis,
        }),
        Command::Scan {
            instance,
            count,
            mode,
            max_n,
        } => json!({
            "n": instance.n, "rank": instance.rank, "seed": instance.seed,
            "count": count, "mode": ScanMode::from(*mode), "max_n": max_n,
        }),
    };
    if let Value::Object(map) = &mut f {
        map.insert("format".into(), json!(cli.format));
        map.insert("timing".into(), json!(cli.timing));
    }
    f
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Construct { .. } => "construct",
        Command::Certify { .. } => "certify",
        Command::Bruteforce { .. } => "bruteforce",
        Command::Theorem1 { .. } => "theorem1",
        Command::Scan { .. } => "scan",
    }
}

fn require_json(cli: &Cli) -> Result<(), Failure> {
    if cli.format == Format::Csv {
        return Err(Failure::Usage(format!(
            "{} reports are JSON only",
            command_name(&cli.command)
        )));
    }
    Ok(())
}

fn block_name(b: Block) -> &'static str {
    match b {
        Block::A => "a",
        Block::B => "b",
        Block::C => "c",
        Block::D => "d",
    }
}

fn construct(cli: &Cli, head: &Value, m: u32) -> Result<Outcome, Failure> {
    require_json(cli)?;
    let params = WeaverParams::new(m)?;
    eprintln!("building frame for m = {m}");
    let frame = build_frame(&params);
    let orthonormal = verify_orthonormal(&frame);
    let delta = delta_p_exact(&params)?;
    let mut norms = serde_json::Map::new();
    let mut delta_block = None;
    for (block, value) in block_row_norms(&params)? {
        if value == delta && delta_block.is_none() {
            delta_block = Some(block_name(block));
        }
        norms.insert(
            block_name(block).into(),
            json!({
                "exact": value,
                "decimal": value.to_f64(),
                "matches_closed_form": value == row_norm_sq_closed_form(&params, block),
            }),
        );
    }
    let body = json!({
        "m": m,
        "dimension": dimension(u64::from(m)),
        "rank": params.rank(),
        "block_sizes": {
            "a": params.a_count(), "b": params.b_count(),
            "c": params.c_count(), "d": params.d_count(),
        },
        "orthonormal": orthonormal,
        "delta_p": delta,
        "delta_p_decimal": delta.to_f64(),
        "delta_p_block": delta_block,
        "claims_apply": params.claims_apply(),
        "block_row_norms": norms,
    });
    Ok(Outcome {
        text: json_document(head, &body)?,
        code: if orthonormal { 0 } else { EXIT_VERIFY },
    })
}

fn certify(cli: &Cli, head: &Value, range: (u32, u32)) -> Result<Outcome, Failure> {
    let params: Vec<WeaverParams> = (range.0..=range.1)
        .map(WeaverParams::new)
        .collect::<paving_core::Result<_>>()?;
    let mut certs = Vec::with_capacity(params.len());
    for p in &params {
        let c = min_over_symmetries_v0(p)?;
        eprintln!("m = {}: min ||psp(v0)||^2 = {} ({:?})", p.m(), c.min_norm_sq, c.verdict);
        certs.push(c);
    }
    let code = if certs.iter().any(|c| c.verdict == Verdict::FalsifiesA) {
        0
    } else {
        EXIT_INCONCLUSIVE
    };
    let text = match cli.format {
        Format::Json => json_document(head, &json!({ "results": certs }))?,
        Format::Csv => certificates_csv(head, &certs)?,
    };
    Ok(Outcome { text, code })
}

fn bruteforce(
    cli: &Cli,
    head: &Value,
    inst: Instance,
    max_n: usize,
    gamma_eps: Option<(f64, f64)>,
) -> Result<Outcome, Failure> {
    let start = Instant::now();
    let p = random_projection(inst.n, inst.rank, inst.seed)?;
    let mut rec = conjecture_a_test(&p, max_n)?;
    rec.seed = Some(inst.seed);
    rec.runtime_ms = cli.timing.then(|| start.elapsed().as_millis() as u64);
    let text = match cli.format {
        Format::Csv => records_csv(head, std::slice::from_ref(&rec))?,
        Format::Json => {
            let pair = rec.argmin_signs.as_ref().map(|s| paving_pair(&p, s)).transpose()?;
            let conj_b = gamma_eps
                .map(|(g, e)| conjecture_b_probe(&p, g, e, max_n))
                .transpose()?;
            json_document(
                head,
                &json!({ "record": rec, "paving_pair": pair, "conjecture_b": conj_b }),
            )?
        }
    };
    Ok(Outcome { text, code: 0 })
}

fn theorem1(cli: &Cli, head: &Value, inst: Instance, basis: Option<usize>) -> Result<Outcome, Failure> {
    require_json(cli)?;
    let p = random_projection(inst.n, inst.rank, inst.seed)?;
    let (v, label) = match basis {
        Some(i) if i < inst.n => (Vector::basis(inst.n, i), format!("e_{i}")),
        Some(i) => return Err(Failure::Usage(format!("--basis {i} out of range for n = {}", inst.n))),
        None => (random_unit_vector(inst.n, inst.seed), "random".to_string()),
    };
    let result = theorem1_symmetry(&p, &v)?;
    if result.achieved_norm > result.bound + 1e-9 {
        return Err(Failure::Internal(format!(
            "achieved norm {} exceeds bound {}",
            result.achieved_norm, result.bound
        )));
    }
    let body = json!({
        "n": inst.n, "rank": inst.rank, "seed": inst.seed, "vector": label,
        "result": result,
    });
    Ok(Outcome {
        text: json_document(head, &body)?,
        code: 0,
    })
}

fn run_scan(cli: &Cli, head: &Value, inst: Instance, count: usize, mode: Mode, max_n: usize) -> Result<Outcome, Failure> {
    let config = ScanConfig {
        n: inst.n,
        rank: inst.rank,
        count,
        seed: inst.seed,
        mode: mode.into(),
        max_n,
    };
    eprintln!("scanning {count} instances (n = {}, rank = {})", inst.n, inst.rank);
    let mut records = scan(&config);
    if !cli.timing {
        records.iter_mut().for_each(|r| r.runtime_ms = None);
    }
    let summary = summarize(&records);
    eprintln!(
        "conjecture A held on {}/{} tested instances ({} errors)",
        summary.satisfied, summary.tested, summary.errors
    );
    let text = match cli.format {
        Format::Json => json_document(head, &json!({ "records": records, "summary": summary }))?,
        Format::Csv => records_csv(head, &records)?,
    };
    Ok(Outcome { text, code: 0 })
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    let head = header(command_name(&cli.command), flags(cli));
    match &cli.command {
        Command::Construct { m } => construct(cli, &head, *m),
        Command::Certify { m } => certify(cli, &head, *m),
        Command::Bruteforce {
            instance,
            max_n,
            gamma,
            epsilon,
        } => bruteforce(cli, &head, *instance, *max_n, gamma.zip(*epsilon)),
        Command::Theorem1 { instance, basis } => theorem1(cli, &head, *instance, *basis),
        Command::Scan {
            instance,
            count,
            mode,
            max_n,
        } => run_scan(cli, &head, *instance, *count, *mode, *max_n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        pool = pool.num_threads(t);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    match pool.install(|| dispatch(&cli)) {
        Ok(outcome) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, &outcome.text),
                None => std::io::stdout().write_all(outcome.text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(outcome.code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
