//! One PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use mpda_core::bench::{lcrit, random_timed, random_untimed, Benchmark};
use mpda_core::closure::compute_wr;
use mpda_core::holesearch::{check_reachable_with, list_bound, Analysis, SearchError, SearchOptions, SearchOutcome};
use mpda_core::oracle::{oracle_reachable, oracle_wellnested_pairs, OracleOptions, OracleOutcome};
use mpda_core::semantics::{hole_bound_of_run, parse_witness, replay};
use mpda_core::witness::assemble_witness;
use mpda_core::Model;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn fixture(bm: Benchmark) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(bm.file_name())
}

struct Run {
    code: Option<i32>,
    stdout: String,
    took: Duration,
}

fn mpda(args: &[&str]) -> Run {
    let start = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_mpda")).args(args).output().expect("run mpda");
    Run { code: o.status.code(), stdout: String::from_utf8_lossy(&o.stdout).into_owned(), took: start.elapsed() }
}

fn check(bm: Benchmark, k: usize, witness: Option<&Path>) -> Run {
    let path = fixture(bm);
    let k = k.to_string();
    let mut args = vec!["check", path.to_str().unwrap(), "--max-holes", &k];
    if let Some(w) = witness {
        args.extend(["--witness", w.to_str().unwrap()]);
    }
    mpda(&args)
}

const TABLE: [(Benchmark, usize); 7] = [
    (Benchmark::Lbh, 2),
    (Benchmark::Lcrit, 2),
    (Benchmark::ProdCons(3, 2), 2),
    (Benchmark::ProdCons(24, 7), 2),
    (Benchmark::Maze, 0),
    (Benchmark::LcritTimed, 2),
    (Benchmark::MazeTimed, 2),
];

fn hole_bounds() -> Verdict {
    let mut slowest = Duration::ZERO;
    for (bm, holes) in TABLE {
        let r = check(bm, 2, None);
        let want = format!("RESULT: NONEMPTY holes={holes}");
        if r.code != Some(0) || r.stdout.trim() != want {
            return Err(format!("{bm}: got `{}`", r.stdout.trim()));
        }
        if r.took > Duration::from_secs(60) {
            return Err(format!("{bm} took {:?}", r.took));
        }
        slowest = slowest.max(r.took);
    }
    Ok(format!("7 models, slowest {:.2}s", slowest.as_secs_f64()))
}

fn minimality() -> Verdict {
    let mut n = 0;
    for (bm, holes) in TABLE.into_iter().filter(|(_, h)| *h == 2) {
        let r = check(bm, holes - 1, None);
        if r.code != Some(1) || r.stdout.trim() != "RESULT: EMPTY up_to_holes=1" {
            return Err(format!("{bm}: got `{}`", r.stdout.trim()));
        }
        n += 1;
    }
    Ok(format!("{n} models empty at one hole"))
}

fn replayed(bm: Benchmark, dir: &Path) -> Result<mpda_core::Witness, String> {
    let w = dir.join(bm.file_name() + ".run");
    let r = check(bm, 2, Some(&w));
    if r.code != Some(0) {
        return Err(format!("{bm}: check failed"));
    }
    let text = std::fs::read_to_string(&w).map_err(|e| e.to_string())?;
    let wit = parse_witness(&text).map_err(|e| e.to_string())?;
    let rep = mpda(&["replay", fixture(bm).to_str().unwrap(), w.to_str().unwrap()]);
    if rep.code != Some(0) {
        return Err(format!("{bm}: replay `{}`", rep.stdout.trim()));
    }
    Ok(wit)
}

fn witness_length() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let w = replayed(Benchmark::ProdCons(3, 2), dir.path())?;
    match w.transitions() {
        24 => Ok("24 transitions, replay accepting".into()),
        n => Err(format!("{n} transitions")),
    }
}

fn timed_maze() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let w = replayed(Benchmark::MazeTimed, dir.path())?;
    if w.total_elapse() != 5 {
        return Err(format!("witness elapses {}", w.total_elapse()));
    }
    let m = Benchmark::MazeTimed.generate();
    let mut opts = OracleOptions::timed(30, 4);
    opts.max_total_elapse = Some(4);
    match oracle_reachable(&m, &opts) {
        Ok(OracleOutcome::NotFoundWithinBound) => Ok("witness elapse 5; oracle finds none within 4 (depth 30)".into()),
        other => Err(format!("oracle with total elapse 4: {other:?}")),
    }
}

fn search(m: &Model, timed: bool, k: usize) -> Result<(Analysis, SearchOutcome), String> {
    let an = Analysis::new(m, timed).map_err(|e| e.to_string())?;
    let out = check_reachable_with(&an, &SearchOptions::new(k, timed)).map_err(|e| e.to_string())?;
    Ok((an, out))
}

fn fuzz_models() -> Vec<(String, Model)> {
    (0..200u64)
        .map(|s| (format!("random({s})"), random_untimed(s)))
        .chain((0..100u64).map(|s| (format!("random-timed({s})"), random_timed(s))))
        .collect()
}

fn oracle_equivalence() -> Verdict {
    let mut compared = 0;
    for (name, m) in fuzz_models() {
        let opts = if m.is_timed() { OracleOptions::timed(7, 4) } else { OracleOptions::untimed(10) };
        let Ok(OracleOutcome::Reachable(w)) = oracle_reachable(&m, &opts) else { continue };
        let h = hole_bound_of_run(&m, &w).map_err(|e| format!("{name}: {e}"))?;
        if h > 2 {
            continue;
        }
        compared += 1;
        let (_, out) = search(&m, m.is_timed(), 2).map_err(|e| format!("{name}: {e}"))?;
        if !out.hole_bound().is_some_and(|b| b <= h) {
            return Err(format!("{name}: oracle run with {h} holes, search {:?}", out.hole_bound()));
        }
    }
    Ok(format!("300 models, {compared} oracle runs with at most 2 holes, 0 disagreements"))
}

fn witness_validity() -> Verdict {
    let mut n = 0;
    let mut cases: Vec<(String, Model)> = Benchmark::bundled().into_iter().map(|b| (b.to_string(), b.generate())).collect();
    cases.extend(fuzz_models());
    for (name, m) in cases {
        let an = Analysis::new(&m, m.is_timed()).map_err(|e| e.to_string())?;
        let mut opts = SearchOptions::new(3, m.is_timed());
        opts.node_cap = Some(200_000);
        let out = match check_reachable_with(&an, &opts) {
            Err(SearchError::BudgetExceeded { .. }) => check_reachable_with(&an, &SearchOptions::new(2, m.is_timed())),
            other => other,
        }
        .map_err(|e| format!("{name}: {e}"))?;
        let Some(k) = out.hole_bound() else { continue };
        let w = assemble_witness(&an, &out).map_err(|e| format!("{name}: {e}"))?;
        if !replay(&m, &w).is_accepting() {
            return Err(format!("{name}: witness rejected"));
        }
        match hole_bound_of_run(&m, &w) {
            Ok(h) if h <= k => n += 1,
            other => return Err(format!("{name}: hole bound {other:?} vs reported {k}")),
        }
    }
    Ok(format!("{n} witnesses accepting within their reported bound"))
}

fn structural() -> Verdict {
    let mut skipped = 0;
    for (name, m) in fuzz_models() {
        let timed = m.is_timed();
        let an = Analysis::new(&m, timed).map_err(|e| e.to_string())?;
        let mut outs = Vec::new();
        for k in 0..=3 {
            let mut opts = SearchOptions::new(k, timed);
            if k == 3 {
                opts.node_cap = Some(200_000);
            }
            match check_reachable_with(&an, &opts) {
                Ok(o) => outs.push(o),
                Err(SearchError::BudgetExceeded { .. }) if k == 3 => skipped += 1,
                Err(e) => return Err(format!("{name}: {e}")),
            }
        }
        for k in 0..outs.len() - 1 {
            if let Some(b) = outs[k].hole_bound() {
                if outs[k + 1].hole_bound() != Some(b) {
                    return Err(format!("{name}: monotonicity fails at K={k}"));
                }
            }
        }
        if outs[0].is_reachable() != outs[1].is_reachable() || outs[1].hole_bound() == Some(1) {
            return Err(format!("{name}: one-hole collapse fails"));
        }
        if !timed {
            for st in outs.iter().flat_map(|o| &o.stats) {
                if st.lists as u128 > list_bound(m.locations.len(), m.n_stacks, st.k) {
                    return Err(format!("{name}: {} lists at K={}", st.lists, st.k));
                }
            }
        }
    }
    let mut trend = Vec::new();
    for (timed, kmax) in [(false, 4), (true, 2)] {
        let (_, out) = search(&lcrit(timed).with_finals(vec![]), timed, kmax)?;
        let lists: Vec<usize> = out.stats.iter().map(|s| s.lists).collect();
        if out.is_reachable() || lists.windows(2).any(|w| w[0] > w[1]) {
            return Err(format!("finals-stripped lcrit (timed={timed}): {lists:?}"));
        }
        trend.push(format!("{lists:?}"));
    }
    Ok(format!(
        "300 models ({skipped} over the K=3 budget, checked to K=2); stripped lcrit lists {}",
        trend.join(" / ")
    ))
}

fn binary_reachability() -> Verdict {
    let mut compared = 0;
    for s in 0..200u64 {
        let m = random_untimed(s);
        let wr = compute_wr(&m).map_err(|e| e.to_string())?;
        let longest = wr
            .location_pairs()
            .into_iter()
            .map(|(a, b)| wr.unroll(a as u32, b as u32, 0).map(|v| v.len()).unwrap_or(0))
            .max()
            .unwrap_or(0);
        let Ok(pairs) = oracle_wellnested_pairs(&m, &OracleOptions::untimed(longest.max(8))) else { continue };
        if pairs != wr.location_pairs() {
            return Err(format!("random({s}): relations differ"));
        }
        compared += 1;
    }
    Ok(format!("{compared} of 200 models compared, all equal"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("hole-bound reproduction", hole_bounds),
        ("minimality", minimality),
        ("witness length", witness_length),
        ("timed maze", timed_maze),
        ("oracle equivalence", oracle_equivalence),
        ("universal witness validity", witness_validity),
        ("structural properties", structural),
        ("binary reachability", binary_reachability),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        match f() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
