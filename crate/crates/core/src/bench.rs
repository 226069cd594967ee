//! Generators for the benchmark models.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{AgeInterval, Atom, Builder, Guard, Kind, Model, OpSpec};

const ANY: AgeInterval = AgeInterval::ANY;

fn iv(lo: u32, hi: u32) -> AgeInterval {
    AgeInterval::new(lo, Some(hi))
}

/// `a^n b^m c^n d^m` with interleaved `a`/`b` blocks; needs two holes.
pub fn lbh() -> Model {
    let mut b = Builder::new(Kind::Untimed, 2, 0);
    let l = b.locs(&["L0", "L1", "L2", "L3", "L4", "L5", "L6"]);
    b.initial(l[0]).accept(l[6]);
    let rows: [(usize, usize, OpSpec, Option<&str>); 13] = [
        (0, 0, OpSpec::Push(0, "P"), Some("a")),
        (0, 1, OpSpec::Push(1, "Q"), Some("b")),
        (1, 1, OpSpec::Push(1, "Q"), Some("b")),
        (1, 2, OpSpec::Nop, None),
        (2, 2, OpSpec::Push(0, "G"), Some("a")),
        (2, 3, OpSpec::Nop, None),
        (3, 3, OpSpec::Pop(0, "G", ANY), Some("c")),
        (3, 4, OpSpec::Pop(0, "P", ANY), Some("c")),
        (4, 4, OpSpec::Push(1, "H"), Some("b")),
        (4, 5, OpSpec::Nop, None),
        (5, 5, OpSpec::Pop(1, "H", ANY), Some("d")),
        (5, 6, OpSpec::Pop(1, "Q", ANY), Some("d")),
        (6, 2, OpSpec::Nop, None),
    ];
    for (s, d, op, lab) in rows {
        let t = b.trans(l[s], l[d], op);
        if let Some(a) = lab {
            b.label(t, a);
        }
    }
    b.build()
}

/// `a^y b^z c^y d^z`; the timed variant bounds the phases with two clocks.
pub fn lcrit(timed: bool) -> Model {
    let kind = if timed { Kind::Timed } else { Kind::Untimed };
    let mut b = Builder::new(kind, 2, if timed { 2 } else { 0 });
    let l = b.locs(&["l0", "l1", "l2", "l3", "l4", "l5"]);
    b.initial(l[0]).accept(l[5]);
    let age = |lo, hi| if timed { iv(lo, hi) } else { ANY };
    let t1 = b.trans(l[0], l[1], OpSpec::Push(0, "A"));
    let t2 = b.trans(l[1], l[1], OpSpec::Push(0, "A"));
    let t3 = b.trans(l[1], l[2], OpSpec::Push(1, "B"));
    let t4 = b.trans(l[2], l[2], OpSpec::Push(1, "B"));
    let t5 = b.trans(l[2], l[3], OpSpec::Pop(0, "A", age(0, 8)));
    let t6 = b.trans(l[3], l[3], OpSpec::Pop(0, "A", age(0, 8)));
    let t7 = b.trans(l[3], l[4], OpSpec::Pop(1, "B", age(0, 3)));
    let t8 = b.trans(l[4], l[4], OpSpec::Pop(1, "B", age(0, 8)));
    let t9 = b.trans(l[4], l[5], OpSpec::Pop(1, "B", age(0, 8)));
    let t10 = b.trans(l[3], l[5], OpSpec::Pop(1, "B", age(0, 3)));
    for (t, a) in [(t1, "a"), (t2, "a"), (t3, "b"), (t4, "b"), (t5, "c"), (t6, "c")] {
        b.label(t, a);
    }
    for t in [t7, t8, t9, t10] {
        b.label(t, "d");
    }
    if timed {
        let (x1, x2) = (0, 1);
        b.reset(t1, &[x2]).reset(t2, &[x2]);
        b.guard(t3, &[Guard::le(x1, 2)]).guard(t4, &[Guard::le(x1, 2)]);
        b.guard(t5, &[Guard::ge(x2, 1), Guard::le(x2, 8), Guard::le(x1, 8)]);
        b.guard(t6, &[Guard::le(x2, 8)]);
        b.guard(t9, &[Guard::ge(x1, 4), Guard::le(x1, 4)]);
        b.guard(t10, &[Guard::ge(x1, 4), Guard::le(x1, 4)]);
    }
    b.build()
}

/// Producers filling stack 1 in blocks of `m` and stack 2 in blocks of `n`;
/// consumers pop the stacks alternately.
pub fn prodcons(m: usize, n: usize) -> Model {
    assert!(m >= 1 && n >= 1);
    let mut b = Builder::new(Kind::Untimed, 2, 0);
    let q0 = b.loc("q0");
    let a: Vec<usize> = (1..m).map(|i| b.loc(&format!("a{i}"))).collect();
    let bs: Vec<usize> = (1..n).map(|i| b.loc(&format!("b{i}"))).collect();
    let c1 = b.loc("c1");
    let f = b.loc("f");
    let c2 = b.loc("c2");
    b.initial(q0).accept(f);
    let ring = |v: &[usize]| {
        let mut r = vec![q0];
        r.extend_from_slice(v);
        r.push(q0);
        r
    };
    for w in ring(&a).windows(2) {
        let t = b.trans(w[0], w[1], OpSpec::Push(0, "A"));
        b.label(t, "a");
    }
    for w in ring(&bs).windows(2) {
        let t = b.trans(w[0], w[1], OpSpec::Push(1, "B"));
        b.label(t, "b");
    }
    for (s, d, op, lab) in [
        (q0, c1, OpSpec::Pop(0, "A", ANY), "c"),
        (c1, f, OpSpec::Pop(1, "B", ANY), "d"),
        (f, c2, OpSpec::Pop(0, "A", ANY), "c"),
        (c2, f, OpSpec::Pop(1, "B", ANY), "d"),
        (f, a.first().copied().unwrap_or(q0), OpSpec::Push(0, "A"), "a"),
        (f, bs.first().copied().unwrap_or(q0), OpSpec::Push(1, "B"), "b"),
    ] {
        let t = b.trans(s, d, op);
        b.label(t, lab);
    }
    b.build()
}

/// A timed maze whose fastest exit takes five time units; clock `x`
/// measures phases and `y` forbids lingering.
pub fn maze(timed: bool) -> Model {
    let mut b = Builder::new(Kind::Timed, 2, 2);
    let names: Vec<String> = (1..=9).map(|i| format!("l{i}")).collect();
    let l = b.locs(&names.iter().map(String::as_str).collect::<Vec<_>>());
    b.initial(l[0]).accept(l[8]);
    let (x, y) = (0, 1);
    let at = |i: usize| l[i - 1];
    let mut add = |lab: &str, s: usize, d: usize, op: OpSpec, g: &[Atom], r: &[usize]| {
        let t = b.trans(at(s), at(d), op);
        b.label(t, lab).guard(t, g).reset(t, r);
    };
    add("t1", 1, 8, OpSpec::Nop, &[Guard::le(y, 0)], &[y]);
    add("t2", 8, 2, OpSpec::Nop, &[Guard::le(y, 0)], &[x, y]);
    add("t4", 2, 3, OpSpec::Push(0, "I3"), &[Guard::le(y, 0)], &[y]);
    add("t5", 3, 2, OpSpec::Nop, &[Guard::le(y, 1)], &[y]);
    add("t6", 2, 4, OpSpec::Nop, &[Guard::le(y, 0), Guard::ge(x, 2), Guard::le(x, 3)], &[x, y]);
    add("t9", 4, 5, OpSpec::Push(1, "I5"), &[Guard::le(y, 0)], &[y]);
    add("t10", 5, 4, OpSpec::Nop, &[Guard::le(y, 1)], &[y]);
    add("t11", 4, 6, OpSpec::Nop, &[Guard::le(y, 0), Guard::ge(x, 2), Guard::le(x, 3)], &[x, y]);
    add("t14", 6, 7, OpSpec::Pop(0, "I3", iv(4, 6)), &[Guard::le(y, 1)], &[y]);
    add("t15", 7, 6, OpSpec::Pop(1, "I5", iv(1, 4)), &[Guard::le(y, 0)], &[y]);
    add("t16", 6, 8, OpSpec::Nop, &[Guard::le(y, 1)], &[y]);
    add("t19", 8, 9, OpSpec::Nop, &[Guard::le(y, 0), Guard::ge(x, 1)], &[]);
    let m = b.build();
    if timed {
        m
    } else {
        m.untimed_projection()
    }
}

/// `(ab)^n c^n d^n` for `n >= nmin`: every word needs `2n` holes.
pub fn lprime(nmin: usize) -> Model {
    assert!(nmin >= 1);
    let mut b = Builder::new(Kind::Untimed, 2, 0);
    let mut p = b.loc("p0");
    b.initial(p);
    for i in 0..nmin {
        let q = b.loc(&format!("q{i}"));
        let next = b.loc(&format!("p{}", i + 1));
        let t = b.trans(p, q, OpSpec::Push(0, "X"));
        b.label(t, "a");
        let t = b.trans(q, next, OpSpec::Push(1, "Y"));
        b.label(t, "b");
        p = next;
    }
    let q = b.loc("q");
    let r = b.loc("r");
    let u = b.loc("u");
    b.accept(u);
    for (s, d, op, lab) in [
        (p, q, OpSpec::Push(0, "X"), "a"),
        (q, p, OpSpec::Push(1, "Y"), "b"),
        (p, r, OpSpec::Pop(0, "X", ANY), "c"),
        (r, r, OpSpec::Pop(0, "X", ANY), "c"),
        (r, u, OpSpec::Pop(1, "Y", ANY), "d"),
        (u, u, OpSpec::Pop(1, "Y", ANY), "d"),
    ] {
        let t = b.trans(s, d, op);
        b.label(t, lab);
    }
    b.build()
}

/// A straight-line run with three simultaneously open holes, two on stack 1
/// and one on stack 2. Labels name the operations: `push1_2` is the second
/// push onto stack 1, `wsN` a well-nested block.
pub fn skeleton() -> Model {
    use OpSpec::*;
    let seq: Vec<(&str, OpSpec)> = vec![
        ("ws1", Nop),
        ("push1_1", Push(0, "P1")),
        ("push1_2", Push(0, "P2")),
        ("ws2", Push(1, "W")),
        ("ws2", Pop(1, "W", ANY)),
        ("push1_3", Push(0, "P3")),
        ("ws3", Push(0, "W")),
        ("ws3", Pop(0, "W", ANY)),
        ("push2_1", Push(1, "Q1")),
        ("push2_2", Push(1, "Q2")),
        ("ws4", Nop),
        ("pop1_3", Pop(0, "P3", ANY)),
        ("pop1_2", Pop(0, "P2", ANY)),
        ("ws5", Push(1, "W")),
        ("ws5", Pop(1, "W", ANY)),
        ("push1_4", Push(0, "P4")),
        ("push1_5", Push(0, "P5")),
        ("pop2_2", Pop(1, "Q2", ANY)),
        ("pop1_5", Pop(0, "P5", ANY)),
        ("pop2_1", Pop(1, "Q1", ANY)),
        ("pop1_4", Pop(0, "P4", ANY)),
        ("pop1_1", Pop(0, "P1", ANY)),
    ];
    let mut b = Builder::new(Kind::Untimed, 2, 0);
    let mut cur = b.loc("f0");
    b.initial(cur);
    for (i, (lab, op)) in seq.into_iter().enumerate() {
        let next = b.loc(&format!("f{}", i + 1));
        let t = b.trans(cur, next, op);
        b.label(t, lab);
        cur = next;
    }
    b.accept(cur);
    b.build()
}

#[derive(Clone, Copy)]
enum RawOp {
    Nop,
    Push(usize, usize),
    Pop(usize, usize),
}

const SYMS: [&str; 2] = ["A", "B"];

/// Random control structure over `n` locations with at most `max_trans`
/// transitions. Most shapes contain a planted complete run from location 0
/// to the final location, whose pushes and pops interleave freely across
/// the two stacks; the rest is noise.
fn random_shape(rng: &mut ChaCha8Rng, n: usize, max_trans: usize) -> (usize, Vec<(usize, usize, RawOp)>) {
    let fin = rng.gen_range(1..n);
    let mut out = Vec::new();
    if rng.gen_bool(0.7) {
        let pairs = rng.gen_range(1..=(max_trans / 2).min(3));
        let mut ops = Vec::new();
        // Pending (position, symbol) per stack.
        let mut pending: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
        let mut pushes = pairs;
        let mut last_stack = rng.gen_range(0..2);
        while ops.len() < 2 * pairs {
            let open: Vec<usize> = (0..2).filter(|&i| !pending[i].is_empty()).collect();
            if pushes > 0 && (open.is_empty() || rng.gen_bool(0.5)) {
                let st = if rng.gen_bool(0.7) { 1 - last_stack } else { last_stack };
                let sym = rng.gen_range(0..2);
                pending[st].push((ops.len(), sym));
                ops.push(RawOp::Push(st, sym));
                last_stack = st;
                pushes -= 1;
            } else {
                let oldest = *open.iter().min_by_key(|&&i| pending[i].last().map(|p| p.0)).expect("open stack");
                let st = if rng.gen_bool(0.7) { oldest } else { open[rng.gen_range(0..open.len())] };
                let (_, sym) = pending[st].pop().expect("open stack");
                ops.push(RawOp::Pop(st, sym));
            }
        }
        let mut at = 0;
        for (i, op) in ops.iter().enumerate() {
            let next = if i + 1 == ops.len() { fin } else { rng.gen_range(0..n) };
            out.push((at, next, *op));
            at = next;
        }
    }
    let total = rng.gen_range(out.len().max(1)..=max_trans);
    while out.len() < total {
        let (st, sym) = (rng.gen_range(0..2), rng.gen_range(0..2));
        let op = match rng.gen_range(0..10) {
            0..=2 => RawOp::Nop,
            3..=6 => RawOp::Push(st, sym),
            _ => RawOp::Pop(st, sym),
        };
        out.push((rng.gen_range(0..n), rng.gen_range(0..n), op));
    }
    (fin, out)
}

fn spec_of(op: RawOp, age: AgeInterval) -> OpSpec<'static> {
    match op {
        RawOp::Nop => OpSpec::Nop,
        RawOp::Push(st, sym) => OpSpec::Push(st, SYMS[sym]),
        RawOp::Pop(st, sym) => OpSpec::Pop(st, SYMS[sym], age),
    }
}

/// A random untimed model with 2 stacks, at most 5 locations and at most 8
/// transitions.
pub fn random_untimed(seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new(Kind::Untimed, 2, 0);
    let n = rng.gen_range(2..=5);
    let locs: Vec<usize> = (0..n).map(|i| b.loc(&format!("s{i}"))).collect();
    let (fin, shape) = random_shape(&mut rng, n, 8);
    b.initial(locs[0]).accept(locs[fin]);
    for (s, d, op) in shape {
        b.trans(locs[s], locs[d], spec_of(op, ANY));
    }
    b.build()
}

/// A random timed model with 2 stacks, one clock, at most 4 locations and
/// at most 6 transitions; all constants are at most 3.
pub fn random_timed(seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new(Kind::Timed, 2, 1);
    let n = rng.gen_range(2..=4);
    let locs: Vec<usize> = (0..n).map(|i| b.loc(&format!("s{i}"))).collect();
    let (fin, shape) = random_shape(&mut rng, n, 6);
    b.initial(locs[0]).accept(locs[fin]);
    for (s, d, op) in shape {
        let lo = rng.gen_range(0..=2);
        let age = AgeInterval::new(lo, if rng.gen_bool(0.3) { None } else { Some(rng.gen_range(lo..=3)) });
        let t = b.trans(locs[s], locs[d], spec_of(op, age));
        let mut atoms: Vec<Atom> = Vec::new();
        if rng.gen_bool(0.3) {
            atoms.push(Guard::ge(0, rng.gen_range(0..=2)));
        }
        if rng.gen_bool(0.3) {
            atoms.push(Guard::le(0, rng.gen_range(1..=3)));
        }
        b.guard(t, &atoms);
        if rng.gen_bool(0.4) {
            b.reset(t, &[0]);
        }
    }
    b.build()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Benchmark {
    Lbh,
    Lcrit,
    LcritTimed,
    ProdCons(usize, usize),
    Maze,
    MazeTimed,
    LPrime(usize),
    Skeleton,
    Random(u64),
    RandomTimed(u64),
}

impl Benchmark {
    pub fn generate(self) -> Model {
        match self {
            Benchmark::Lbh => lbh(),
            Benchmark::Lcrit => lcrit(false),
            Benchmark::LcritTimed => lcrit(true),
            Benchmark::ProdCons(m, n) => prodcons(m, n),
            Benchmark::Maze => maze(false),
            Benchmark::MazeTimed => maze(true),
            Benchmark::LPrime(n) => lprime(n),
            Benchmark::Skeleton => skeleton(),
            Benchmark::Random(s) => random_untimed(s),
            Benchmark::RandomTimed(s) => random_timed(s),
        }
    }

    /// File name of the bundled fixture.
    pub fn file_name(self) -> String {
        match self {
            Benchmark::Lbh => "lbh.mpda".into(),
            Benchmark::Lcrit => "lcrit.mpda".into(),
            Benchmark::LcritTimed => "lcrit_timed.tmpda".into(),
            Benchmark::ProdCons(m, n) => format!("prodcons_{m}_{n}.mpda"),
            Benchmark::Maze => "maze.mpda".into(),
            Benchmark::MazeTimed => "maze_timed.tmpda".into(),
            Benchmark::LPrime(n) => format!("lprime_{n}.mpda"),
            Benchmark::Skeleton => "skeleton.mpda".into(),
            Benchmark::Random(s) => format!("random_{s}.mpda"),
            Benchmark::RandomTimed(s) => format!("random_timed_{s}.tmpda"),
        }
    }

    pub fn bundled() -> Vec<Benchmark> {
        vec![
            Benchmark::Lbh,
            Benchmark::Lcrit,
            Benchmark::LcritTimed,
            Benchmark::ProdCons(3, 2),
            Benchmark::ProdCons(24, 7),
            Benchmark::Maze,
            Benchmark::MazeTimed,
            Benchmark::LPrime(3),
            Benchmark::Skeleton,
        ]
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Benchmark::Lbh => write!(f, "lbh"),
            Benchmark::Lcrit => write!(f, "lcrit"),
            Benchmark::LcritTimed => write!(f, "lcrit-timed"),
            Benchmark::ProdCons(m, n) => write!(f, "prodcons({m},{n})"),
            Benchmark::Maze => write!(f, "maze"),
            Benchmark::MazeTimed => write!(f, "maze-timed"),
            Benchmark::LPrime(n) => write!(f, "lprime-phase({n})"),
            Benchmark::Skeleton => write!(f, "skeleton"),
            Benchmark::Random(s) => write!(f, "random({s})"),
            Benchmark::RandomTimed(s) => write!(f, "random-timed({s})"),
        }
    }
}

impl FromStr for Benchmark {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (name, args) = match s.split_once('(') {
            Some((n, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| format!("missing `)` in `{s}`"))?;
                let args = inner
                    .split(',')
                    .map(|a| a.trim().parse::<usize>().map_err(|_| format!("bad parameter `{a}` in `{s}`")))
                    .collect::<Result<Vec<_>, _>>()?;
                (n, args)
            }
            None => (s, Vec::new()),
        };
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(format!("`{name}` takes {n} parameter(s)"))
            }
        };
        Ok(match name {
            "lbh" => arity(0).map(|_| Benchmark::Lbh)?,
            "lcrit" => arity(0).map(|_| Benchmark::Lcrit)?,
            "lcrit-timed" => arity(0).map(|_| Benchmark::LcritTimed)?,
            "maze" => arity(0).map(|_| Benchmark::Maze)?,
            "maze-timed" => arity(0).map(|_| Benchmark::MazeTimed)?,
            "skeleton" => arity(0).map(|_| Benchmark::Skeleton)?,
            "prodcons" => {
                arity(2)?;
                if args[0] == 0 || args[1] == 0 {
                    return Err("prodcons parameters must be at least 1".into());
                }
                Benchmark::ProdCons(args[0], args[1])
            }
            "random" => arity(1).map(|_| Benchmark::Random(args[0] as u64))?,
            "random-timed" => arity(1).map(|_| Benchmark::RandomTimed(args[0] as u64))?,
            "lprime-phase" => match args.as_slice() {
                [] => Benchmark::LPrime(3),
                [0] => return Err("lprime-phase parameter must be at least 1".into()),
                [n] => Benchmark::LPrime(*n),
                _ => return Err("`lprime-phase` takes at most 1 parameter".into()),
            },
            _ => return Err(format!("unknown benchmark `{s}`")),
        })
    }
}
