use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mpda_core::bench::Benchmark;
use mpda_core::holesearch::{check_reachable_logged, Analysis, Outcome, SearchError, SearchOptions, StageStats};
use mpda_core::oracle::{oracle_reachable, OracleError, OracleOptions, OracleOutcome};
use mpda_core::semantics::{hole_bound_of_run, parse_witness, replay, write_witness, Replay};
use mpda_core::witness::assemble_witness;
use mpda_core::{parse_model, serialize_model, Model};

const EXIT_NONEMPTY: u8 = 0;
const EXIT_EMPTY: u8 = 1;
const EXIT_ERROR: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mpda",
    version,
    about = "Hole-bounded reachability for multi-stack pushdown automata",
    after_help = "Exit status: 0 nonempty/reachable/accepting, 1 empty/not found/rejected, 2 error, 3 budget exceeded."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide reachability of a final location with empty stacks within a hole bound.
    Check {
        model: PathBuf,
        #[arg(long, default_value_t = 2)]
        max_holes: usize,
        /// Search with clocks and ages (default for `model tmpda`).
        #[arg(long, conflicts_with = "untimed")]
        timed: bool,
        /// Search the untimed projection; witnesses then replay on the projection only.
        #[arg(long)]
        untimed: bool,
        /// Write the witness here (`-` for stdout, with labels as comments).
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Append one JSON line per deepening stage.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Maximum number of distinct lists per stage.
        #[arg(long)]
        node_cap: Option<usize>,
        /// Permit --max-holes above 16.
        #[arg(long)]
        allow_large_k: bool,
    },
    /// Write a benchmark model: lbh, lcrit, lcrit-timed, prodcons(M,N), maze,
    /// maze-timed, lprime-phase(N), skeleton, random(SEED), random-timed(SEED).
    Generate {
        spec: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Dump the well-nested reachability relation as sorted `src -> dst [t=..]` lines.
    Wr {
        model: PathBuf,
        /// Ignore clocks and ages.
        #[arg(long)]
        untimed: bool,
    },
    /// Search exact configurations breadth-first for an accepting run.
    Oracle {
        model: PathBuf,
        /// Maximum number of fired transitions.
        #[arg(long)]
        depth: usize,
        /// Largest single elapse considered.
        #[arg(long, default_value_t = 0)]
        elapse: u64,
        /// Bound on the summed elapses of the run.
        #[arg(long)]
        max_total_elapse: Option<u64>,
        #[arg(long)]
        node_cap: Option<usize>,
    },
    /// Replay a witness file against a model.
    Replay { model: PathBuf, witness: PathBuf },
}

fn read_model(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_model(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    if path == Path::new("-") {
        print!("{text}");
        Ok(())
    } else {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

fn stats_line(s: &StageStats) -> String {
    serde_json::json!({
        "k": s.k,
        "lists": s.lists,
        "wr_size": s.wr_size,
        "outcome": s.outcome,
        "elapsed_ms": s.elapsed_ms,
    })
    .to_string()
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    path: &Path,
    max_holes: usize,
    timed: bool,
    untimed: bool,
    witness: Option<&Path>,
    stats: Option<&Path>,
    node_cap: Option<usize>,
    allow_large_k: bool,
) -> Result<u8> {
    if max_holes > 16 && !allow_large_k {
        bail!("--max-holes {max_holes} exceeds 16; pass --allow-large-k to proceed");
    }
    let m = read_model(path)?;
    let timed = if untimed { false } else { timed || m.is_timed() };
    let an = Analysis::new(&m, timed)?;
    let mut stats_file = match stats {
        Some(p) => Some(
            fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .with_context(|| format!("opening {}", p.display()))?,
        ),
        None => None,
    };
    let mut write_err = None;
    let mut log = |s: &StageStats| {
        if let Some(f) = stats_file.as_mut() {
            if let Err(e) = writeln!(f, "{}", stats_line(s)) {
                write_err.get_or_insert(e);
            }
        }
    };
    let opts = SearchOptions { max_holes, timed, node_cap };
    let result = check_reachable_logged(&an, &opts, &mut log);
    if let Some(e) = write_err {
        return Err(e).context("writing stats");
    }
    let out = match result {
        Ok(o) => o,
        Err(SearchError::BudgetExceeded { k, cap }) => {
            println!("RESULT: BUDGET_EXCEEDED holes={k} cap={cap}");
            return Ok(EXIT_BUDGET);
        }
        Err(e) => return Err(e.into()),
    };
    match &out.outcome {
        Outcome::Reachable { hole_bound, .. } => {
            println!("RESULT: NONEMPTY holes={hole_bound}");
            if let Some(p) = witness {
                let w = assemble_witness(&an, &out).context("building witness")?;
                write_out(p, &write_witness(&an.model, &w, p == Path::new("-")))?;
            }
            Ok(EXIT_NONEMPTY)
        }
        Outcome::EmptyUpTo(k) => {
            println!("RESULT: EMPTY up_to_holes={k}");
            Ok(EXIT_EMPTY)
        }
    }
}

fn cmd_generate(spec: &str, out: Option<&Path>) -> Result<u8> {
    let bm: Benchmark = spec.parse().map_err(anyhow::Error::msg)?;
    let text = serialize_model(&bm.generate());
    write_out(out.unwrap_or(Path::new("-")), &text)?;
    Ok(EXIT_NONEMPTY)
}

/// Sorted dump lines; timed relations are projected to location pairs with
/// the union of their clamped durations.
fn wr_dump(m: &Model, timed: bool) -> Result<Vec<String>> {
    let wr = if timed { mpda_core::compute_wrt(m)? } else { mpda_core::compute_wr(m)? };
    let sp = &wr.space;
    let mut pairs: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for x in 0..wr.nodes() as u32 {
        for (y, &mask) in wr.row(x).iter().enumerate() {
            if mask != 0 {
                *pairs.entry((sp.loc(x), sp.loc(y as u32))).or_default() |= mask;
            }
        }
    }
    let mut lines: Vec<String> = pairs
        .into_iter()
        .map(|((a, b), mask)| {
            let mut line = format!("{} -> {}", m.locations[a], m.locations[b]);
            if timed {
                let ts: Vec<String> = (0..64).filter(|d| mask >> d & 1 == 1).map(|d| d.to_string()).collect();
                line.push_str(&format!(" t={}", ts.join(",")));
            }
            line
        })
        .collect();
    lines.sort();
    Ok(lines)
}

fn cmd_wr(path: &Path, untimed: bool) -> Result<u8> {
    let m = read_model(path)?;
    for line in wr_dump(&m, m.is_timed() && !untimed)? {
        println!("{line}");
    }
    Ok(EXIT_NONEMPTY)
}

fn cmd_oracle(path: &Path, depth: usize, elapse: u64, total: Option<u64>, cap: Option<usize>) -> Result<u8> {
    let m = read_model(path)?;
    let mut opts = OracleOptions::timed(depth, if m.is_timed() { elapse } else { 0 });
    opts.max_total_elapse = total;
    if let Some(c) = cap {
        opts.node_cap = c;
    }
    match oracle_reachable(&m, &opts) {
        Ok(OracleOutcome::Reachable(mut w)) => {
            w.hole_bound = hole_bound_of_run(&m, &w)?;
            println!(
                "RESULT: REACHABLE holes={} transitions={} elapse={}",
                w.hole_bound,
                w.transitions(),
                w.total_elapse()
            );
            print!("{}", write_witness(&m, &w, true));
            Ok(EXIT_NONEMPTY)
        }
        Ok(OracleOutcome::NotFoundWithinBound) => {
            println!("RESULT: NOT_FOUND depth={depth}");
            Ok(EXIT_EMPTY)
        }
        Err(OracleError::BudgetExceeded(n)) => {
            println!("RESULT: BUDGET_EXCEEDED cap={n}");
            Ok(EXIT_BUDGET)
        }
    }
}

fn cmd_replay(model: &Path, witness: &Path) -> Result<u8> {
    let m = read_model(model)?;
    let text = fs::read_to_string(witness).with_context(|| format!("reading {}", witness.display()))?;
    let w = parse_witness(&text)?;
    match replay(&m, &w) {
        Replay::Accepting(_) => {
            let h = hole_bound_of_run(&m, &w)?;
            println!("ACCEPTING holes={h} transitions={} elapse={}", w.transitions(), w.total_elapse());
            Ok(EXIT_NONEMPTY)
        }
        Replay::Rejected { at, reason } => {
            println!("REJECTED step={at}: {reason}");
            Ok(EXIT_EMPTY)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Check { model, max_holes, timed, untimed, witness, stats, node_cap, allow_large_k } => cmd_check(
            model,
            *max_holes,
            *timed,
            *untimed,
            witness.as_deref(),
            stats.as_deref(),
            *node_cap,
            *allow_large_k,
        ),
        Cmd::Generate { spec, out } => cmd_generate(spec, out.as_deref()),
        Cmd::Wr { model, untimed } => cmd_wr(model, *untimed),
        Cmd::Oracle { model, depth, elapse, max_total_elapse, node_cap } => {
            cmd_oracle(model, *depth, *elapse, *max_total_elapse, *node_cap)
        }
        Cmd::Replay { model, witness } => cmd_replay(model, witness),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
