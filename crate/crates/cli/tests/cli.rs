use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mpda_core::bench::Benchmark;
use mpda_core::oracle::{oracle_wellnested_pairs, OracleOptions};
use mpda_core::{parse_model, serialize_model};

fn mpda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpda")).args(args).output().expect("run mpda")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn fixtures_match_generators() {
    for bm in Benchmark::bundled() {
        let text = fs::read_to_string(fixture(&bm.file_name())).unwrap();
        assert_eq!(text, serialize_model(&bm.generate()), "{bm}");
        let o = mpda(&["generate", &bm.to_string()]);
        assert_eq!(stdout(&o), text, "{bm}");
    }
    assert_eq!(mpda(&["generate", "prodcons(0,1)"]).status.code(), Some(2));
}

#[test]
fn check_exit_codes_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.run");
    let stats = dir.path().join("stats.jsonl");
    let lbh = fixture("lbh.mpda");
    let o = mpda(&["check", p(&lbh), "--max-holes", "2", "--witness", p(&w), "--stats", p(&stats)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "RESULT: NONEMPTY holes=2");
    let r = mpda(&["replay", p(&lbh), p(&w)]);
    assert_eq!(r.status.code(), Some(0));
    assert!(stdout(&r).starts_with("ACCEPTING holes=2"));
    let lines: Vec<serde_json::Value> =
        fs::read_to_string(&stats).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[2]["outcome"], "nonempty");
    assert_eq!(lines[1]["k"], 1);

    let o = mpda(&["check", p(&lbh), "--max-holes", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "RESULT: EMPTY up_to_holes=1");

    let o = mpda(&["check", p(&lbh), "--max-holes", "2", "--node-cap", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(mpda(&["check", p(&lbh), "--max-holes", "17"]).status.code(), Some(2));

    let streamed = mpda(&["check", p(&fixture("prodcons_3_2.mpda")), "--witness", "-"]);
    let text = stdout(&streamed);
    assert!(text.contains("# q0 -> a1 a"));
    assert_eq!(text.lines().filter(|l| l.starts_with("fire ")).count(), 24);
}

#[test]
fn replay_rejects_truncated_witness() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.run");
    let m = fixture("prodcons_3_2.mpda");
    assert_eq!(mpda(&["check", p(&m), "--witness", p(&w)]).status.code(), Some(0));
    let text = fs::read_to_string(&w).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.pop();
    let cut = dir.path().join("cut.run");
    fs::write(&cut, lines.join("\n")).unwrap();
    let r = mpda(&["replay", p(&m), p(&cut)]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stdout(&r).contains("non-empty stacks"));
}

#[test]
fn malformed_model_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mpda");
    fs::write(&bad, "model mpda\nstacks 1\nlocations a\ninitial a\ntrans a b nop\n").unwrap();
    let o = mpda(&["check", p(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5, column 9"));
}

#[test]
fn wr_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let nop = dir.path().join("nop.mpda");
    fs::write(&nop, "model mpda\nstacks 1\nlocations s0 s1\ninitial s0\nfinal s1\ntrans s0 s1 nop\n").unwrap();
    assert_eq!(stdout(&mpda(&["wr", p(&nop)])), "s0 -> s0\ns0 -> s1\ns1 -> s1\n");

    let timed = dir.path().join("nop.tmpda");
    fs::write(&timed, "model tmpda\nstacks 1\nclocks 0\nlocations s0 s1\ninitial s0\nfinal s1\ntrans s0 s1 nop\n").unwrap();
    let dump = stdout(&mpda(&["wr", p(&timed)]));
    let projected: String = dump.lines().map(|l| l.split(" t=").next().unwrap().to_string() + "\n").collect();
    assert_eq!(projected, "s0 -> s0\ns0 -> s1\ns1 -> s1\n");
    assert_eq!(stdout(&mpda(&["wr", p(&timed), "--untimed"])), "s0 -> s0\ns0 -> s1\ns1 -> s1\n");
}

#[test]
fn lbh_wr_golden() {
    let lbh = fixture("lbh.mpda");
    let golden = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/lbh.wr")).unwrap();
    assert_eq!(stdout(&mpda(&["wr", p(&lbh)])), golden);
    assert_eq!(stdout(&mpda(&["wr", p(&lbh)])), golden);
    let m = parse_model(&fs::read_to_string(&lbh).unwrap()).unwrap();
    let names: Vec<String> = oracle_wellnested_pairs(&m, &OracleOptions::untimed(8))
        .unwrap()
        .into_iter()
        .map(|(a, b)| format!("{} -> {}", m.locations[a], m.locations[b]))
        .collect();
    let mut names = names;
    names.sort();
    assert_eq!(names.join("\n") + "\n", golden);
}

#[test]
fn oracle_subcommand() {
    let o = mpda(&["oracle", p(&fixture("lbh.mpda")), "--depth", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("RESULT: REACHABLE holes=2"));

    let dir = tempfile::tempdir().unwrap();
    let stripped = dir.path().join("stripped.mpda");
    let m = Benchmark::Lbh.generate().with_finals(vec![]);
    fs::write(&stripped, serialize_model(&m)).unwrap();
    let o = mpda(&["oracle", p(&stripped), "--depth", "8"]);
    assert_eq!(o.status.code(), Some(1));

    let maze = fixture("maze_timed.tmpda");
    let o = mpda(&["oracle", p(&maze), "--depth", "30", "--elapse", "5"]);
    assert!(stdout(&o).starts_with("RESULT: REACHABLE holes=2 transitions=18 elapse=5"));
}
