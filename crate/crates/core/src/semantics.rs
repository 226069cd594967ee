//! Exact configuration semantics, replay and run analysis.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::model::{LocId, Model, StackOp, SymId, TransId};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    pub loc: LocId,
    /// Bottom first; each entry is (symbol, age).
    pub stacks: Vec<Vec<(SymId, u64)>>,
    pub clocks: Vec<u64>,
    pub elapsed: u64,
}

impl Config {
    pub fn initial(m: &Model) -> Self {
        Config {
            loc: m.initial,
            stacks: vec![Vec::new(); m.n_stacks],
            clocks: vec![0; m.n_clocks],
            elapsed: 0,
        }
    }

    pub fn stacks_empty(&self) -> bool {
        self.stacks.iter().all(|s| s.is_empty())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RunStep {
    Fire(TransId),
    Elapse(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub steps: Vec<RunStep>,
    pub hole_bound: usize,
}

impl Witness {
    pub fn new(steps: Vec<RunStep>, hole_bound: usize) -> Self {
        Witness { steps: normalize(steps), hole_bound }
    }

    pub fn transitions(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, RunStep::Fire(_))).count()
    }

    pub fn total_elapse(&self) -> u64 {
        self.steps
            .iter()
            .map(|s| match s {
                RunStep::Elapse(t) => *t,
                RunStep::Fire(_) => 0,
            })
            .sum()
    }

    pub fn fired(&self) -> Vec<TransId> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                RunStep::Fire(t) => Some(*t),
                RunStep::Elapse(_) => None,
            })
            .collect()
    }
}

/// Merges adjacent elapses and drops empty ones.
pub fn normalize(steps: Vec<RunStep>) -> Vec<RunStep> {
    let mut out: Vec<RunStep> = Vec::with_capacity(steps.len());
    for s in steps {
        match (s, out.last_mut()) {
            (RunStep::Elapse(0), _) => {}
            (RunStep::Elapse(t), Some(RunStep::Elapse(u))) => *u += t,
            _ => out.push(s),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("unknown transition {0}")]
    UnknownTransition(TransId),
    #[error("transition {0} does not start at the current location")]
    WrongSource(TransId),
    #[error("guard of transition {0} is not satisfied")]
    GuardFalse(TransId),
    #[error("transition {0} pops an empty stack")]
    EmptyStack(TransId),
    #[error("transition {0} expects a different top symbol")]
    WrongSymbol(TransId),
    #[error("transition {t} pops an item of age {age} outside {interval}")]
    AgeOutOfRange { t: TransId, age: u64, interval: String },
    #[error("elapse of zero time units")]
    ZeroElapse,
}

pub fn step_in_place(m: &Model, c: &mut Config, s: RunStep) -> Result<(), StepError> {
    match s {
        RunStep::Elapse(0) => Err(StepError::ZeroElapse),
        RunStep::Elapse(t) => {
            for v in &mut c.clocks {
                *v += t;
            }
            for st in &mut c.stacks {
                for e in st.iter_mut() {
                    e.1 += t;
                }
            }
            c.elapsed += t;
            Ok(())
        }
        RunStep::Fire(id) => {
            let tr = m.transitions.get(id).ok_or(StepError::UnknownTransition(id))?;
            if tr.src != c.loc {
                return Err(StepError::WrongSource(id));
            }
            if !tr.guard.holds(&c.clocks) {
                return Err(StepError::GuardFalse(id));
            }
            match tr.op {
                StackOp::Nop => {}
                StackOp::Push { stack, sym } => c.stacks[stack].push((sym, 0)),
                StackOp::Pop { stack, sym, age } => {
                    let &(top, a) = c.stacks[stack].last().ok_or(StepError::EmptyStack(id))?;
                    if top != sym {
                        return Err(StepError::WrongSymbol(id));
                    }
                    if !age.contains(a) {
                        return Err(StepError::AgeOutOfRange { t: id, age: a, interval: age.to_string() });
                    }
                    c.stacks[stack].pop();
                }
            }
            for &r in &tr.resets {
                c.clocks[r] = 0;
            }
            c.loc = tr.dst;
            Ok(())
        }
    }
}

pub fn step(m: &Model, c: &Config, s: RunStep) -> Result<Config, StepError> {
    let mut next = c.clone();
    step_in_place(m, &mut next, s)?;
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectReason {
    Step(StepError),
    NotFinal(LocId),
    StacksNotEmpty,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Step(e) => write!(f, "{e}"),
            RejectReason::NotFinal(l) => write!(f, "run ends in non-final location #{l}"),
            RejectReason::StacksNotEmpty => write!(f, "run ends with non-empty stacks"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Replay {
    Accepting(Config),
    Rejected { at: usize, reason: RejectReason },
}

impl Replay {
    pub fn is_accepting(&self) -> bool {
        matches!(self, Replay::Accepting(_))
    }
}

/// Runs `steps` from `start` without checking acceptance.
pub fn run_from(m: &Model, start: Config, steps: &[RunStep]) -> Result<Config, (usize, StepError)> {
    let mut c = start;
    for (i, s) in steps.iter().enumerate() {
        step_in_place(m, &mut c, *s).map_err(|e| (i, e))?;
    }
    Ok(c)
}

pub fn replay(m: &Model, w: &Witness) -> Replay {
    replay_steps(m, &w.steps)
}

pub fn replay_steps(m: &Model, steps: &[RunStep]) -> Replay {
    match run_from(m, Config::initial(m), steps) {
        Err((at, e)) => Replay::Rejected { at, reason: RejectReason::Step(e) },
        Ok(c) if !c.stacks_empty() => Replay::Rejected { at: steps.len(), reason: RejectReason::StacksNotEmpty },
        Ok(c) if !m.is_final(c.loc) => Replay::Rejected { at: steps.len(), reason: RejectReason::NotFinal(c.loc) },
        Ok(c) => Replay::Accepting(c),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum HoleBoundError {
    #[error("run is not accepting: {0}")]
    NotAccepting(String),
}

/// Maximum number of simultaneously open holes along an accepting run.
///
/// Pushes whose matched factor is well-nested belong to a well-nested block;
/// every other push is a hole push. A hole of stack `i` is a maximal factor
/// of hole pushes of `i` separated only by well-nested blocks, and it is open
/// after position `x` while one of its pushes is still pending there.
pub fn hole_bound_of_run(m: &Model, w: &Witness) -> Result<usize, HoleBoundError> {
    if let Replay::Rejected { at, reason } = replay(m, w) {
        return Err(HoleBoundError::NotAccepting(format!("step {at}: {reason}")));
    }
    Ok(hole_bound_of_sequence(m, &w.fired()))
}

/// Hole bound of a complete transition sequence (every push matched).
pub fn hole_bound_of_sequence(m: &Model, seq: &[TransId]) -> usize {
    let n = seq.len();
    let ops: Vec<StackOp> = seq.iter().map(|&t| m.transitions[t].op).collect();
    let mut matched = vec![usize::MAX; n];
    let mut pending: Vec<Vec<usize>> = vec![Vec::new(); m.n_stacks];
    for (x, op) in ops.iter().enumerate() {
        match *op {
            StackOp::Push { stack, .. } => pending[stack].push(x),
            StackOp::Pop { stack, .. } => {
                if let Some(p) = pending[stack].pop() {
                    matched[p] = x;
                    matched[x] = p;
                }
            }
            StackOp::Nop => {}
        }
    }
    // A factor p..=z is well-nested iff its combined-stack scan never
    // pops across another stack's pending item and ends balanced.
    let wellnested = |p: usize, z: usize| -> bool {
        let mut scan: Vec<usize> = Vec::new();
        for x in p..=z {
            match ops[x] {
                StackOp::Push { .. } => scan.push(x),
                StackOp::Pop { .. } => {
                    if scan.last() != Some(&matched[x]) {
                        return false;
                    }
                    scan.pop();
                }
                StackOp::Nop => {}
            }
        }
        scan.is_empty()
    };
    let mut ws_push = vec![false; n];
    for x in 0..n {
        if let StackOp::Push { .. } = ops[x] {
            if matched[x] != usize::MAX && wellnested(x, matched[x]) {
                ws_push[x] = true;
            }
        }
    }
    // Group hole pushes into maximal holes.
    let mut hole_of = vec![usize::MAX; n];
    let mut holes = 0usize;
    let mut x = 0;
    while x < n {
        let StackOp::Push { stack, .. } = ops[x] else {
            x += 1;
            continue;
        };
        if ws_push[x] {
            x = matched[x] + 1;
            continue;
        }
        let id = holes;
        holes += 1;
        hole_of[x] = id;
        x += 1;
        while x < n {
            match ops[x] {
                StackOp::Nop => x += 1,
                StackOp::Push { .. } if ws_push[x] => x = matched[x] + 1,
                StackOp::Push { stack: s, .. } if s == stack => {
                    hole_of[x] = id;
                    x += 1;
                }
                _ => break,
            }
        }
    }
    // Open after position x: some push p <= x of the hole with match > x.
    let mut last_open = vec![None::<(usize, usize)>; holes];
    for x in 0..n {
        if hole_of[x] != usize::MAX {
            let h = hole_of[x];
            let z = if matched[x] == usize::MAX { n } else { matched[x] };
            let e = last_open[h].get_or_insert((x, z));
            e.1 = e.1.max(z);
        }
    }
    let mut delta = vec![0i64; n + 1];
    for (first, end) in last_open.into_iter().flatten() {
        delta[first] += 1;
        delta[end] -= 1;
    }
    let mut best = 0i64;
    let mut cur = 0i64;
    for d in delta {
        cur += d;
        best = best.max(cur);
    }
    best as usize
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("witness line {line}: {msg}")]
pub struct WitnessParseError {
    pub line: usize,
    pub msg: String,
}

pub fn write_witness(m: &Model, w: &Witness, labels: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "witness holes={}", w.hole_bound);
    for st in &w.steps {
        match *st {
            RunStep::Fire(t) => {
                let _ = write!(s, "fire {t}");
                if labels {
                    let tr = &m.transitions[t];
                    let _ = write!(s, " # {} -> {}", m.locations[tr.src], m.locations[tr.dst]);
                    if let Some(l) = m.label_of(t) {
                        let _ = write!(s, " {l}");
                    }
                }
                s.push('\n');
            }
            RunStep::Elapse(d) => {
                let _ = writeln!(s, "elapse {d}");
            }
        }
    }
    s
}

pub fn parse_witness(text: &str) -> Result<Witness, WitnessParseError> {
    let mut hole_bound = None;
    let mut steps = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| WitnessParseError { line: i + 1, msg };
        let mut parts = line.split_whitespace();
        let kw = parts.next().unwrap_or("");
        let arg = parts.next().ok_or_else(|| err(format!("`{kw}` needs an argument")))?;
        if let Some(extra) = parts.next() {
            return Err(err(format!("unexpected `{extra}`")));
        }
        match kw {
            "witness" => {
                let k = arg
                    .strip_prefix("holes=")
                    .and_then(|v| v.parse::<usize>().ok())
                    .ok_or_else(|| err(format!("malformed header `{arg}`")))?;
                hole_bound = Some(k);
            }
            "fire" => steps.push(RunStep::Fire(arg.parse().map_err(|_| err(format!("bad transition id `{arg}`")))?)),
            "elapse" => steps.push(RunStep::Elapse(arg.parse().map_err(|_| err(format!("bad duration `{arg}`")))?)),
            other => return Err(err(format!("unknown step `{other}`"))),
        }
    }
    let hole_bound = hole_bound.ok_or(WitnessParseError { line: 1, msg: "missing `witness holes=<k>` header".into() })?;
    Ok(Witness { steps: normalize(steps), hole_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgeInterval, Builder, Kind, OpSpec};

    fn push_pop(age: AgeInterval) -> Model {
        let mut b = Builder::new(Kind::Timed, 1, 0);
        let s0 = b.loc("s0");
        let s1 = b.loc("s1");
        let s2 = b.loc("s2");
        b.initial(s0).accept(s2);
        b.trans(s0, s1, OpSpec::Push(0, "A"));
        b.trans(s1, s2, OpSpec::Pop(0, "A", age));
        b.build()
    }

    #[test]
    fn push_then_pop() {
        let m = push_pop(AgeInterval::new(4, Some(6)));
        let c = step(&m, &Config::initial(&m), RunStep::Fire(0)).unwrap();
        assert_eq!(c.loc, 1);
        assert_eq!(c.stacks[0], vec![(0, 0)]);
        let c3 = step(&m, &c, RunStep::Elapse(3)).unwrap();
        assert!(matches!(step(&m, &c3, RunStep::Fire(1)), Err(StepError::AgeOutOfRange { age: 3, .. })));
        let c4 = step(&m, &c3, RunStep::Elapse(1)).unwrap();
        assert_eq!(step(&m, &c4, RunStep::Fire(1)).unwrap().loc, 2);
    }

    #[test]
    fn elapse_is_additive() {
        let m = push_pop(AgeInterval::ANY);
        let c = step(&m, &Config::initial(&m), RunStep::Fire(0)).unwrap();
        let a = step(&m, &step(&m, &c, RunStep::Elapse(2)).unwrap(), RunStep::Elapse(5)).unwrap();
        assert_eq!(a, step(&m, &c, RunStep::Elapse(7)).unwrap());
        assert_eq!(step(&m, &c, RunStep::Elapse(0)), Err(StepError::ZeroElapse));
    }

    #[test]
    fn replay_rejections() {
        let m = push_pop(AgeInterval::ANY);
        assert!(replay_steps(&m, &[RunStep::Fire(0), RunStep::Fire(1)]).is_accepting());
        assert_eq!(
            replay_steps(&m, &[RunStep::Fire(0)]),
            Replay::Rejected { at: 1, reason: RejectReason::StacksNotEmpty }
        );
        assert_eq!(replay_steps(&m, &[]), Replay::Rejected { at: 0, reason: RejectReason::NotFinal(0) });
        assert!(matches!(replay_steps(&m, &[RunStep::Fire(1)]), Replay::Rejected { at: 0, .. }));
        let mut single = Builder::new(Kind::Untimed, 1, 0);
        let s = single.loc("s");
        single.initial(s).accept(s);
        assert!(replay_steps(&single.build(), &[]).is_accepting());
    }

    fn crossing() -> Model {
        // s0 -push1 A-> s1 -push2 B-> s2 -pop1 A-> s3 -pop2 B-> s4, plus a
        // push/pop pair on stack 1 at s4.
        let mut b = Builder::new(Kind::Untimed, 2, 0);
        let l = b.locs(&["s0", "s1", "s2", "s3", "s4", "s5"]);
        b.initial(l[0]).accept(l[4]);
        b.trans(l[0], l[1], OpSpec::Push(0, "A"));
        b.trans(l[1], l[2], OpSpec::Push(1, "B"));
        b.trans(l[2], l[3], OpSpec::Pop(0, "A", AgeInterval::ANY));
        b.trans(l[3], l[4], OpSpec::Pop(1, "B", AgeInterval::ANY));
        b.trans(l[4], l[5], OpSpec::Push(0, "A"));
        b.trans(l[5], l[4], OpSpec::Pop(0, "A", AgeInterval::ANY));
        b.build()
    }

    #[test]
    fn hole_bounds() {
        let m = crossing();
        assert_eq!(hole_bound_of_sequence(&m, &[4, 5]), 0);
        assert_eq!(hole_bound_of_sequence(&m, &[0, 1, 2, 3]), 2);
        assert_eq!(hole_bound_of_sequence(&m, &[4, 5, 0, 1, 2, 3, 4, 5]), 2);
        let w = Witness::new(vec![RunStep::Fire(0)], 0);
        assert!(hole_bound_of_run(&m, &w).is_err());
    }

    #[test]
    fn witness_text_round_trip() {
        let m = push_pop(AgeInterval::ANY);
        let w = Witness::new(
            vec![RunStep::Fire(0), RunStep::Elapse(1), RunStep::Elapse(0), RunStep::Elapse(2), RunStep::Fire(1)],
            2,
        );
        assert_eq!(w.steps.len(), 3);
        let text = write_witness(&m, &w, true);
        assert!(text.starts_with("witness holes=2\n"));
        assert_eq!(parse_witness(&text).unwrap(), w);
        assert!(parse_witness("fire 1\n").is_err());
    }
}
