//! Well-nested reachability: the untimed relation WR over locations and the
//! timed relation WRT over clamped states with clamped durations.
//!
//! Both are computed by one engine. A node is a location paired with a
//! clamped clock valuation (a bare location when untimed). Entries
//! `(x, y, d)` are derived from reflexive seeds by appending base moves:
//! unit elapses, guarded nops, and wraps `push . ws . pop` whose inner `ws`
//! is itself an entry. Every entry keeps the move that first produced it, so
//! a run can be unrolled by following strictly older entries.

use std::collections::VecDeque;

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::model::{Guard, LocId, Model, StackOp, TransId};
use crate::semantics::RunStep;

pub type Node = u32;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClosureError {
    #[error("state space too large: {size} exceeds the cap of {cap}")]
    StateSpaceTooLarge { size: u128, cap: u128 },
    #[error("stack constant {0} is too large for the duration domain")]
    DurationDomainTooLarge(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("no well-nested run from {from} to {to} with duration {dur}")]
pub struct NotInWr {
    pub from: Node,
    pub to: Node,
    pub dur: u8,
}

pub const DEFAULT_STATE_CAP: u128 = 10_000_000;
pub const DEFAULT_TABLE_CAP: u128 = 60_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimedState {
    pub loc: LocId,
    pub val: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WrtEntry {
    pub src: TimedState,
    pub t: u32,
    pub dst: TimedState,
}

/// Indexing of clamped states and clamped duration arithmetic.
#[derive(Clone, Debug)]
pub struct Space {
    pub n_locs: usize,
    pub timed: bool,
    radix: Vec<u32>,
    stride: Vec<usize>,
    vals: usize,
    /// Duration clamp value; durations live in `0..=cap`.
    pub cap: u8,
    elapse: Vec<Node>,
}

impl Space {
    pub fn untimed(m: &Model) -> Space {
        Space {
            n_locs: m.locations.len(),
            timed: false,
            radix: Vec::new(),
            stride: Vec::new(),
            vals: 1,
            cap: 0,
            elapse: Vec::new(),
        }
    }

    pub fn timed(m: &Model, state_cap: u128) -> Result<Space, ClosureError> {
        if m.cmax_stack > 62 {
            return Err(ClosureError::DurationDomainTooLarge(m.cmax_stack));
        }
        let radix: Vec<u32> = m.cmax_clock.iter().map(|c| c + 2).collect();
        let size = radix.iter().fold(m.locations.len() as u128, |a, r| a * *r as u128);
        if size > state_cap {
            return Err(ClosureError::StateSpaceTooLarge { size, cap: state_cap });
        }
        let mut stride = vec![1usize; radix.len()];
        for c in (0..radix.len().saturating_sub(1)).rev() {
            stride[c] = stride[c + 1] * radix[c + 1] as usize;
        }
        let vals = radix.iter().map(|r| *r as usize).product();
        let mut sp = Space {
            n_locs: m.locations.len(),
            timed: true,
            radix,
            stride,
            vals,
            cap: (m.cmax_stack + 1) as u8,
            elapse: Vec::new(),
        };
        sp.elapse = (0..sp.len() as Node)
            .map(|x| {
                let v: Vec<u32> = sp.val(x).into_iter().map(|v| v + 1).collect();
                sp.node(sp.loc(x), &v)
            })
            .collect();
        Ok(sp)
    }

    pub fn len(&self) -> usize {
        self.n_locs * self.vals
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn durations(&self) -> usize {
        self.cap as usize + 1
    }

    /// Node of `loc` with valuation `val`, clamping each clock.
    pub fn node(&self, loc: LocId, val: &[u32]) -> Node {
        let mut i = 0usize;
        for (c, v) in val.iter().enumerate() {
            i += (*v).min(self.radix[c] - 1) as usize * self.stride[c];
        }
        (loc * self.vals + i) as Node
    }

    pub fn initial(&self, m: &Model) -> Node {
        self.node(m.initial, &vec![0; self.radix.len()])
    }

    pub fn loc(&self, x: Node) -> LocId {
        x as usize / self.vals
    }

    pub fn val(&self, x: Node) -> Vec<u32> {
        let r = x as usize % self.vals;
        self.radix.iter().zip(&self.stride).map(|(rad, st)| ((r / st) % *rad as usize) as u32).collect()
    }

    pub fn state(&self, x: Node) -> TimedState {
        TimedState { loc: self.loc(x), val: self.val(x) }
    }

    pub fn node_of(&self, s: &TimedState) -> Node {
        self.node(s.loc, &s.val)
    }

    pub fn add(&self, a: u8, b: u8) -> u8 {
        (a as u16 + b as u16).min(self.cap as u16) as u8
    }

    /// Clamped sum set of two duration masks.
    pub fn add_masks(&self, a: u64, b: u64) -> u64 {
        let full = (1u64 << self.durations()) - 1;
        let mut out = 0u64;
        let mut rest = a;
        while rest != 0 {
            let t = rest.trailing_zeros();
            rest &= rest - 1;
            let shifted = (b as u128) << t;
            out |= shifted as u64 & full;
            if shifted >> self.cap != 0 {
                out |= 1 << self.cap;
            }
        }
        out
    }

    pub fn guard(&self, x: Node, g: &Guard) -> bool {
        if !self.timed || g.is_true() {
            return true;
        }
        g.holds(&self.val(x))
    }

    pub fn reset(&self, x: Node, resets: &[usize]) -> Node {
        if !self.timed || resets.is_empty() {
            return x;
        }
        let mut v = self.val(x);
        for &r in resets {
            v[r] = 0;
        }
        self.node(self.loc(x), &v)
    }

    pub fn elapse1(&self, x: Node) -> Node {
        if self.timed {
            self.elapse[x as usize]
        } else {
            x
        }
    }

    /// Nodes at location `loc` where `t`'s guard holds, paired with the node
    /// reached after firing it.
    pub fn firings(&self, m: &Model, t: TransId) -> Vec<(Node, Node)> {
        let tr = &m.transitions[t];
        let base = (tr.src * self.vals) as Node;
        (base..base + self.vals as Node)
            .filter(|&x| self.guard(x, &tr.guard))
            .map(|x| {
                let y = self.reset(x, &tr.resets);
                (x, (tr.dst * self.vals) as Node + y % self.vals as Node)
            })
            .collect()
    }
}

/// All clamped states of a timed model.
pub fn enumerate_states(m: &Model, cap: u128) -> Result<Vec<TimedState>, ClosureError> {
    let sp = Space::timed(m, cap)?;
    Ok((0..sp.len() as Node).map(|x| sp.state(x)).collect())
}

/// `(s, t, s_t)` for every `t` in `0..=cap`, clamping clocks independently.
pub fn time_elapse_closure(m: &Model, s: &TimedState, cap: u32) -> Vec<WrtEntry> {
    let mut out = Vec::with_capacity(cap as usize + 1);
    let mut val = s.val.clone();
    for t in 0..=cap {
        out.push(WrtEntry { src: s.clone(), t, dst: TimedState { loc: s.loc, val: val.clone() } });
        for (c, v) in val.iter_mut().enumerate() {
            *v = (*v + 1).min(m.cmax_clock[c] + 1);
        }
    }
    out
}

/// Dense boolean matrix over `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix { n, words, bits: vec![0; n * words] }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = BitMatrix::new(n);
        for (i, j) in pairs {
            m.set(i, j);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let r = &self.bits[i * self.words..(i + 1) * self.words];
        r.iter().enumerate().flat_map(|(w, &bits)| {
            let mut b = bits;
            std::iter::from_fn(move || {
                if b == 0 {
                    return None;
                }
                let t = b.trailing_zeros() as usize;
                b &= b - 1;
                Some(w * 64 + t)
            })
        })
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|i| self.row(i).map(move |j| (i, j))).collect()
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Reflexive-transitive closure (Floyd-Warshall over bit rows).
pub fn transitive_closure(rel: &BitMatrix) -> BitMatrix {
    let mut m = transitive_closure_plus(rel);
    for i in 0..m.n {
        m.set(i, i);
    }
    m
}

/// Transitive closure without the reflexive seed.
pub fn transitive_closure_plus(rel: &BitMatrix) -> BitMatrix {
    let mut m = rel.clone();
    let w = m.words;
    let mut krow = vec![0u64; w];
    for k in 0..m.n {
        krow.copy_from_slice(&m.bits[k * w..(k + 1) * w]);
        for i in 0..m.n {
            if m.get(i, k) {
                for (a, b) in m.bits[i * w..(i + 1) * w].iter_mut().zip(&krow) {
                    *a |= *b;
                }
            }
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveKind {
    Elapse,
    Nop(TransId),
    Wrap { push: TransId, pop: TransId, inner: (Node, Node) },
}

/// A base move between nodes; a wrap's inner entry has the move's duration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Move {
    pub from: Node,
    pub to: Node,
    pub dur: u8,
    pub kind: MoveKind,
}

const SEED: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default)]
struct Deriv {
    rank: u32,
    mv: u32,
    prev: u8,
}

/// How an entry was first derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Derivation {
    Seed,
    Step { rank: u32, prev: (Node, Node, u8), mv: Move },
}

/// Decreases strictly along every unrolling step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProgressMeasure {
    pub remaining_elapse: u8,
    pub rank: u32,
}

#[derive(Clone, Copy, Debug)]
struct PushIn {
    src: Node,
    tid: u32,
    stack: u32,
    sym: u32,
}

#[derive(Clone, Copy, Debug)]
struct PopOut {
    dst: Node,
    tid: u32,
    stack: u32,
    sym: u32,
}

/// The well-nested reachability relation of a model over a [`Space`].
pub struct WellNested {
    pub space: Space,
    n: usize,
    d: usize,
    reach: Vec<u64>,
    deriv: Vec<Deriv>,
    moves: Vec<Move>,
    out: Vec<Vec<u32>>,
    into: Vec<Vec<Node>>,
    push_in: Vec<Vec<PushIn>>,
    pop_out: Vec<Vec<PopOut>>,
    wraps: FxHashSet<(Node, Node, u8)>,
    queue: VecDeque<(Node, Node, u8)>,
    rank: u32,
    /// Per transition, the guarded (source node, target node) pairs.
    pub firings: Vec<Vec<(Node, Node)>>,
}

impl WellNested {
    pub fn compute(m: &Model, space: Space, table_cap: u128) -> Result<WellNested, ClosureError> {
        let n = space.len();
        let d = space.durations();
        let size = n as u128 * n as u128 * d as u128;
        if size > table_cap {
            return Err(ClosureError::StateSpaceTooLarge { size, cap: table_cap });
        }
        let firings: Vec<Vec<(Node, Node)>> = (0..m.transitions.len()).map(|t| space.firings(m, t)).collect();
        let mut w = WellNested {
            n,
            d,
            reach: vec![0; n * n],
            deriv: vec![Deriv::default(); n * n * d],
            moves: Vec::new(),
            out: vec![Vec::new(); n],
            into: vec![Vec::new(); n],
            push_in: vec![Vec::new(); n],
            pop_out: vec![Vec::new(); n],
            wraps: FxHashSet::default(),
            queue: VecDeque::new(),
            rank: 0,
            firings,
            space,
        };
        if w.space.timed {
            for x in 0..n as Node {
                let to = w.space.elapse1(x);
                w.add_move(Move { from: x, to, dur: 1, kind: MoveKind::Elapse });
            }
        }
        for t in &m.transitions {
            for i in 0..w.firings[t.id].len() {
                let (x, y) = w.firings[t.id][i];
                match t.op {
                    StackOp::Nop => w.add_move(Move { from: x, to: y, dur: 0, kind: MoveKind::Nop(t.id) }),
                    StackOp::Push { stack, sym } => w.push_in[y as usize].push(PushIn {
                        src: x,
                        tid: t.id as u32,
                        stack: stack as u32,
                        sym: sym as u32,
                    }),
                    StackOp::Pop { stack, sym, .. } => w.pop_out[x as usize].push(PopOut {
                        dst: y,
                        tid: t.id as u32,
                        stack: stack as u32,
                        sym: sym as u32,
                    }),
                }
            }
        }
        for x in 0..n as Node {
            w.insert(x, x, 0, SEED, 0);
        }
        while let Some((x, a, d1)) = w.queue.pop_front() {
            let k = w.out[a as usize].len();
            for j in 0..k {
                let mi = w.out[a as usize][j];
                let mv = w.moves[mi as usize];
                let dd = w.space.add(d1, mv.dur);
                w.insert(x, mv.to, dd, mi, d1);
            }
            for pi in 0..w.push_in[x as usize].len() {
                let p = w.push_in[x as usize][pi];
                for qi in 0..w.pop_out[a as usize].len() {
                    let q = w.pop_out[a as usize][qi];
                    if p.stack != q.stack || p.sym != q.sym {
                        continue;
                    }
                    let StackOp::Pop { age, .. } = m.transitions[q.tid as usize].op else { unreachable!() };
                    if !age.contains_clamped(d1 as u32, w.space.cap as u32) {
                        continue;
                    }
                    if w.wraps.insert((p.src, q.dst, d1)) {
                        w.add_move(Move {
                            from: p.src,
                            to: q.dst,
                            dur: d1,
                            kind: MoveKind::Wrap { push: p.tid as usize, pop: q.tid as usize, inner: (x, a) },
                        });
                    }
                }
            }
        }
        w.queue = VecDeque::new();
        w.wraps = FxHashSet::default();
        Ok(w)
    }

    fn insert(&mut self, x: Node, b: Node, d: u8, mv: u32, prev: u8) {
        let idx = x as usize * self.n + b as usize;
        let bit = 1u64 << d;
        if self.reach[idx] & bit != 0 {
            return;
        }
        if self.reach[idx] == 0 {
            self.into[b as usize].push(x);
        }
        self.reach[idx] |= bit;
        self.deriv[idx * self.d + d as usize] = Deriv { rank: self.rank, mv, prev };
        self.rank += 1;
        self.queue.push_back((x, b, d));
    }

    fn add_move(&mut self, mv: Move) {
        let mi = self.moves.len() as u32;
        self.moves.push(mv);
        self.out[mv.from as usize].push(mi);
        let k = self.into[mv.from as usize].len();
        for j in 0..k {
            let x = self.into[mv.from as usize][j];
            let mut mask = self.reach[x as usize * self.n + mv.from as usize];
            while mask != 0 {
                let d1 = mask.trailing_zeros() as u8;
                mask &= mask - 1;
                let dd = self.space.add(d1, mv.dur);
                self.insert(x, mv.to, dd, mi, d1);
            }
        }
    }

    pub fn nodes(&self) -> usize {
        self.n
    }

    /// Number of `(src, dst, duration)` entries.
    pub fn size(&self) -> usize {
        self.rank as usize
    }

    pub fn durs(&self, x: Node, y: Node) -> u64 {
        self.reach[x as usize * self.n + y as usize]
    }

    pub fn contains(&self, x: Node, y: Node) -> bool {
        self.durs(x, y) != 0
    }

    pub fn row(&self, x: Node) -> &[u64] {
        &self.reach[x as usize * self.n..(x as usize + 1) * self.n]
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    /// Location pairs of the relation (durations and valuations projected).
    pub fn location_pairs(&self) -> Vec<(LocId, LocId)> {
        let nl = self.space.n_locs;
        let mut seen = BitMatrix::new(nl);
        for x in 0..self.n {
            for y in 0..self.n {
                if self.reach[x * self.n + y] != 0 {
                    seen.set(self.space.loc(x as Node), self.space.loc(y as Node));
                }
            }
        }
        seen.pairs()
    }

    pub fn entries(&self) -> Vec<WrtEntry> {
        let mut out = Vec::new();
        for x in 0..self.n as Node {
            for y in 0..self.n as Node {
                let mut mask = self.durs(x, y);
                while mask != 0 {
                    let t = mask.trailing_zeros();
                    mask &= mask - 1;
                    out.push(WrtEntry { src: self.space.state(x), t, dst: self.space.state(y) });
                }
            }
        }
        out
    }

    /// Node pairs joined by a well-nested run with at least one move.
    pub fn nonempty(&self) -> BitMatrix {
        let mut plus = BitMatrix::new(self.n);
        for mv in &self.moves {
            for (z, &mask) in self.row(mv.to).iter().enumerate() {
                if mask != 0 {
                    plus.set(mv.from as usize, z);
                }
            }
        }
        plus
    }

    pub fn derivation(&self, x: Node, y: Node, d: u8) -> Option<Derivation> {
        if self.durs(x, y) >> d & 1 == 0 {
            return None;
        }
        let dv = self.deriv[(x as usize * self.n + y as usize) * self.d + d as usize];
        if dv.mv == SEED {
            return Some(Derivation::Seed);
        }
        let mv = self.moves[dv.mv as usize];
        Some(Derivation::Step { rank: dv.rank, prev: (x, mv.from, dv.prev), mv })
    }

    pub fn measure(&self, x: Node, y: Node, d: u8) -> Option<ProgressMeasure> {
        if self.durs(x, y) >> d & 1 == 0 {
            return None;
        }
        let dv = self.deriv[(x as usize * self.n + y as usize) * self.d + d as usize];
        Some(ProgressMeasure { remaining_elapse: d, rank: dv.rank })
    }

    /// An explicit well-nested run realizing entry `(x, y, d)`.
    pub fn unroll(&self, x: Node, y: Node, d: u8) -> Result<Vec<RunStep>, NotInWr> {
        enum Task {
            Entry(Node, Node, u8),
            Emit(RunStep),
        }
        if self.durs(x, y) >> d & 1 == 0 {
            return Err(NotInWr { from: x, to: y, dur: d });
        }
        let mut out = Vec::new();
        let mut stack = vec![Task::Entry(x, y, d)];
        while let Some(task) = stack.pop() {
            match task {
                Task::Emit(s) => out.push(s),
                Task::Entry(a, b, t) => match self.derivation(a, b, t).expect("derived entry") {
                    Derivation::Seed => {}
                    Derivation::Step { prev, mv, .. } => {
                        match mv.kind {
                            MoveKind::Elapse => stack.push(Task::Emit(RunStep::Elapse(1))),
                            MoveKind::Nop(tid) => stack.push(Task::Emit(RunStep::Fire(tid))),
                            MoveKind::Wrap { push, pop, inner } => {
                                stack.push(Task::Emit(RunStep::Fire(pop)));
                                stack.push(Task::Entry(inner.0, inner.1, mv.dur));
                                stack.push(Task::Emit(RunStep::Fire(push)));
                            }
                        }
                        stack.push(Task::Entry(prev.0, prev.1, prev.2));
                    }
                },
            }
        }
        Ok(crate::semantics::normalize(out))
    }
}

/// Well-nested reachability of the untimed projection of `m`.
pub fn compute_wr(m: &Model) -> Result<WellNested, ClosureError> {
    let u = m.untimed_projection();
    WellNested::compute(&u, Space::untimed(&u), DEFAULT_TABLE_CAP)
}

/// Timed well-nested reachability over clamped states and durations.
pub fn compute_wrt(m: &Model) -> Result<WellNested, ClosureError> {
    WellNested::compute(m, Space::timed(m, DEFAULT_STATE_CAP)?, DEFAULT_TABLE_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgeInterval, Builder, Kind, OpSpec};

    fn naive_closure(rel: &BitMatrix) -> BitMatrix {
        let n = rel.len();
        let mut m = rel.clone();
        for i in 0..n {
            m.set(i, i);
        }
        loop {
            let mut next = m.clone();
            for i in 0..n {
                for k in 0..n {
                    if m.get(i, k) {
                        for j in 0..n {
                            if m.get(k, j) {
                                next.set(i, j);
                            }
                        }
                    }
                }
            }
            if next == m {
                return m;
            }
            m = next;
        }
    }

    #[test]
    fn closure_small_cases() {
        let c = transitive_closure(&BitMatrix::new(1));
        assert_eq!(c.pairs(), vec![(0, 0)]);
        let c = transitive_closure(&BitMatrix::from_pairs(3, [(0, 1), (1, 2)]));
        assert!(c.get(0, 2));
        assert!(!c.get(2, 0));
    }

    #[test]
    fn closure_matches_squaring() {
        let mut seed = 0x9e3779b97f4a7c15u64;
        for _ in 0..200 {
            let mut rel = BitMatrix::new(6);
            for i in 0..6 {
                for j in 0..6 {
                    seed ^= seed << 13;
                    seed ^= seed >> 7;
                    seed ^= seed << 17;
                    if seed.is_multiple_of(5) {
                        rel.set(i, j);
                    }
                }
            }
            assert_eq!(transitive_closure(&rel), naive_closure(&rel));
        }
    }

    fn pushpop(sym2: &str) -> Model {
        let mut b = Builder::new(Kind::Untimed, 1, 0);
        let l = b.locs(&["s0", "s1", "s2"]);
        b.initial(l[0]).accept(l[2]);
        b.trans(l[0], l[1], OpSpec::Push(0, "A"));
        b.trans(l[1], l[2], OpSpec::Pop(0, sym2, AgeInterval::ANY));
        b.build()
    }

    #[test]
    fn wrap_requires_matching_symbol() {
        let wr = compute_wr(&pushpop("A")).unwrap();
        assert!(wr.contains(0, 2));
        assert_eq!(wr.unroll(0, 2, 0).unwrap(), vec![RunStep::Fire(0), RunStep::Fire(1)]);
        assert!(wr.unroll(0, 0, 0).unwrap().is_empty());
        let wr = compute_wr(&pushpop("B")).unwrap();
        assert!(!wr.contains(0, 2));
        assert!(wr.unroll(0, 2, 0).is_err());
    }

    #[test]
    fn state_counts() {
        let mut b = Builder::new(Kind::Timed, 1, 1);
        let s = b.loc("s");
        let t = b.trans(s, s, OpSpec::Nop);
        b.guard(t, &[crate::model::Guard::le(0, 2)]);
        let m = b.build();
        assert_eq!(enumerate_states(&m, DEFAULT_STATE_CAP).unwrap().len(), 4);
        let mut b = Builder::new(Kind::Timed, 1, 0);
        b.loc("a");
        b.loc("b");
        assert_eq!(enumerate_states(&b.build(), DEFAULT_STATE_CAP).unwrap().len(), 2);
        assert!(matches!(enumerate_states(&m, 3), Err(ClosureError::StateSpaceTooLarge { .. })));
    }

    #[test]
    fn elapse_closure_clamps_per_clock() {
        let mut b = Builder::new(Kind::Timed, 1, 2);
        let s = b.loc("s");
        let t = b.trans(s, s, OpSpec::Nop);
        b.guard(t, &[crate::model::Guard::le(0, 1), crate::model::Guard::le(1, 3)]);
        let m = b.build();
        let e = time_elapse_closure(&m, &TimedState { loc: 0, val: vec![0, 0] }, 2);
        assert_eq!(e.len(), 3);
        assert_eq!(e[0].dst, e[0].src);
        assert_eq!(e[2].dst.val, vec![2, 2]);
        let e5 = time_elapse_closure(&m, &TimedState { loc: 0, val: vec![0, 0] }, 5);
        for t in 0..=5u32 {
            for t2 in 0..=t {
                let mid = &e5[t2 as usize].dst;
                let rest = time_elapse_closure(&m, mid, 5);
                assert_eq!(rest[(t - t2) as usize].dst, e5[t as usize].dst);
            }
        }
    }

    #[test]
    fn timed_wrap_duration() {
        let mut b = Builder::new(Kind::Timed, 1, 0);
        let l = b.locs(&["s0", "s1", "s2"]);
        b.initial(l[0]).accept(l[2]);
        b.trans(l[0], l[1], OpSpec::Push(0, "A"));
        b.trans(l[1], l[2], OpSpec::Pop(0, "A", AgeInterval::new(2, Some(5))));
        let m = b.build();
        let w = compute_wrt(&m).unwrap();
        assert_eq!(w.durs(0, 2), 0b111_1100);
        assert_eq!(w.durs(0, 1), 0);
        assert_eq!(w.durs(0, 0), 0b111_1111);
        let steps = w.unroll(0, 2, 2).unwrap();
        assert_eq!(steps, vec![RunStep::Fire(0), RunStep::Elapse(2), RunStep::Fire(1)]);
    }

    #[test]
    fn mask_sums_clamp() {
        let mut b = Builder::new(Kind::Timed, 1, 0);
        let s = b.loc("s");
        b.trans(s, s, OpSpec::Pop(0, "A", AgeInterval::new(0, Some(2))));
        let sp = Space::timed(&b.build(), DEFAULT_STATE_CAP).unwrap();
        assert_eq!(sp.cap, 3);
        assert_eq!(sp.add_masks(0b0011, 0b0110), 0b1110);
        assert_eq!(sp.add_masks(0b1000, 0b0001), 0b1000);
    }
}
