//! K-hole bounded reachability by breadth-first search over exploration
//! lists.
//!
//! A list summarizes a run prefix as the sequence of its open holes followed
//! by the current state. Each hole records its stack, entry and exit nodes,
//! its clamped duration, and the clamped time from its exit to the next
//! element (`gap`). Untimed searches keep every duration at zero.

use std::cell::RefCell;
use std::collections::VecDeque;
use std::rc::Rc;
use std::time::Instant;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;
use thiserror::Error;

use crate::closure::{
    transitive_closure_plus, BitMatrix, ClosureError, Node, Space, WellNested, DEFAULT_STATE_CAP, DEFAULT_TABLE_CAP,
};
use crate::model::{Kind, LocId, Model, StackOp, TransId};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Closure(#[from] ClosureError),
    #[error("search budget of {cap} lists exceeded at hole bound {k}")]
    BudgetExceeded { k: usize, cap: usize },
    #[error("location {0} out of range")]
    BadTarget(LocId),
    #[error("repeated reachability is defined for untimed models only")]
    TimedUnsupported,
}

/// A model together with its well-nested relation and hole segment tables.
pub struct Analysis {
    pub model: Model,
    pub wr: WellNested,
    /// Per stack and symbol, the push transitions.
    push_by: Vec<Vec<Vec<TransId>>>,
    /// Per node, guarded pop firings `(target node, transition)`.
    pop_at: Vec<Vec<(Node, TransId)>>,
    /// Per stack and node, atomic hole segment endpoints with duration masks.
    ahs: Vec<Vec<Vec<(Node, u64)>>>,
    hs: RefCell<Vec<Option<Rc<[u64]>>>>,
}

impl Analysis {
    /// Analyses `m` in timed mode (clamped clocks and ages) or on its untimed
    /// projection.
    pub fn new(m: &Model, timed: bool) -> Result<Analysis, SearchError> {
        let model = if timed {
            if m.kind == Kind::Timed {
                m.clone()
            } else {
                m.as_timed()
            }
        } else {
            m.untimed_projection()
        };
        let space = if timed { Space::timed(&model, DEFAULT_STATE_CAP)? } else { Space::untimed(&model) };
        let wr = WellNested::compute(&model, space, DEFAULT_TABLE_CAP)?;
        let n = wr.nodes();
        let mut push_by = vec![vec![Vec::new(); model.stack_alphabet.len()]; model.n_stacks];
        let mut pop_at = vec![Vec::new(); n];
        for t in &model.transitions {
            match t.op {
                StackOp::Push { stack, sym } => push_by[stack][sym].push(t.id),
                StackOp::Pop { .. } => {
                    for &(x, y) in &wr.firings[t.id] {
                        pop_at[x as usize].push((y, t.id));
                    }
                }
                StackOp::Nop => {}
            }
        }
        let mut ahs = vec![vec![Vec::new(); n]; model.n_stacks];
        let mut acc = vec![0u64; n];
        for (i, per_stack) in ahs.iter_mut().enumerate() {
            let mut by_src: Vec<Vec<Node>> = vec![Vec::new(); n];
            for t in push_by[i].iter().flatten() {
                for &(x, y) in &wr.firings[*t] {
                    by_src[x as usize].push(y);
                }
            }
            for (u, ys) in by_src.iter().enumerate() {
                if ys.is_empty() {
                    continue;
                }
                acc.iter_mut().for_each(|a| *a = 0);
                for &y in ys {
                    for (a, r) in acc.iter_mut().zip(wr.row(y)) {
                        *a |= *r;
                    }
                }
                per_stack[u] = acc.iter().enumerate().filter(|(_, m)| **m != 0).map(|(w, m)| (w as Node, *m)).collect();
            }
        }
        let hs = RefCell::new(vec![None; model.n_stacks * n]);
        Ok(Analysis { model, wr, push_by, pop_at, ahs, hs })
    }

    pub fn timed(&self) -> bool {
        self.wr.space.timed
    }

    pub fn space(&self) -> &Space {
        &self.wr.space
    }

    pub fn initial(&self) -> Node {
        self.wr.space.initial(&self.model)
    }

    pub fn ahs_row(&self, stack: usize, u: Node) -> &[(Node, u64)] {
        &self.ahs[stack][u as usize]
    }

    /// Hole segment endpoints from `u` on `stack`: one or more atomic hole
    /// segments, with clamped total duration masks.
    pub fn hs_row(&self, stack: usize, u: Node) -> Rc<[u64]> {
        let n = self.wr.nodes();
        let key = stack * n + u as usize;
        if let Some(r) = &self.hs.borrow()[key] {
            return r.clone();
        }
        let sp = &self.wr.space;
        let mut dist = vec![0u64; n];
        let mut fresh = vec![0u64; n];
        let mut queue = VecDeque::new();
        for &(w, m) in &self.ahs[stack][u as usize] {
            dist[w as usize] |= m;
            fresh[w as usize] |= m;
            queue.push_back(w);
        }
        while let Some(v) = queue.pop_front() {
            let delta = std::mem::take(&mut fresh[v as usize]);
            if delta == 0 {
                continue;
            }
            for &(w, m2) in &self.ahs[stack][v as usize] {
                let new = sp.add_masks(delta, m2) & !dist[w as usize];
                if new != 0 {
                    dist[w as usize] |= new;
                    if fresh[w as usize] == 0 {
                        queue.push_back(w);
                    }
                    fresh[w as usize] |= new;
                }
            }
        }
        let row: Rc<[u64]> = dist.into();
        self.hs.borrow_mut()[key] = Some(row.clone());
        row
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomicHoleSeg {
    pub stack: usize,
    pub entry: Node,
    pub push: TransId,
    pub sym: usize,
    pub exit: Node,
    pub t: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HoleTriple {
    pub stack: usize,
    pub entry: Node,
    pub exit: Node,
    pub t: u32,
}

pub struct HoleSegments {
    pub ahs: Vec<Vec<AtomicHoleSeg>>,
    pub hs: Vec<Vec<HoleTriple>>,
}

fn bits(mut m: u64) -> impl Iterator<Item = u8> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let t = m.trailing_zeros() as u8;
        m &= m - 1;
        Some(t)
    })
}

/// Materializes all atomic hole segments and hole segments. Untimed hole
/// segments are the transitive closure of the atomic endpoint relation;
/// timed ones add durations with clamping.
pub fn compute_ahs_hs(an: &Analysis) -> HoleSegments {
    let m = &an.model;
    let n = an.wr.nodes();
    let mut ahs = vec![Vec::new(); m.n_stacks];
    let mut hs = vec![Vec::new(); m.n_stacks];
    for i in 0..m.n_stacks {
        for t in &m.transitions {
            let StackOp::Push { stack, sym } = t.op else { continue };
            if stack != i {
                continue;
            }
            for &(x, y) in &an.wr.firings[t.id] {
                for (w, &mask) in an.wr.row(y).iter().enumerate() {
                    for d in bits(mask) {
                        ahs[i].push(AtomicHoleSeg { stack: i, entry: x, push: t.id, sym, exit: w as Node, t: d as u32 });
                    }
                }
            }
        }
        if an.timed() {
            for u in 0..n as Node {
                let row = an.hs_row(i, u);
                for (w, &mask) in row.iter().enumerate() {
                    for d in bits(mask) {
                        hs[i].push(HoleTriple { stack: i, entry: u, exit: w as Node, t: d as u32 });
                    }
                }
            }
        } else {
            let rel = BitMatrix::from_pairs(n, ahs[i].iter().map(|a| (a.entry as usize, a.exit as usize)));
            hs[i] = transitive_closure_plus(&rel)
                .pairs()
                .into_iter()
                .map(|(a, b)| HoleTriple { stack: i, entry: a as Node, exit: b as Node, t: 0 })
                .collect();
        }
    }
    HoleSegments { ahs, hs }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ListHole {
    pub stack: u8,
    pub dur: u8,
    pub gap: u8,
    pub entry: Node,
    pub exit: Node,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExplorationList {
    pub holes: SmallVec<[ListHole; 4]>,
    pub last: Node,
}

impl ExplorationList {
    pub fn open_holes(&self) -> usize {
        self.holes.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PopStep {
    pub stack: usize,
    /// Index of the hole popped from, in the parent list.
    pub hole: usize,
    pub closed: bool,
    pub push: TransId,
    /// Source and target nodes of the matching push.
    pub mid: Node,
    pub pushed: Node,
    /// Exit of the hole before the pop and the duration of the atomic
    /// segment `push . ws` ending there.
    pub exit: Node,
    pub t2: u8,
    pub pop: TransId,
    pub after_pop: Node,
    pub t4: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeOp {
    /// A well-nested prefix from the initial node of duration `dur`.
    Root { dur: u8 },
    /// The last hole of the list was appended.
    Hole,
    Pop(PopStep),
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub parent: u32,
    pub op: TreeOp,
    pub depth: u32,
}

pub const NO_PARENT: u32 = u32::MAX;

#[derive(Clone, Debug, Default)]
pub struct ExplorationTree {
    pub nodes: Vec<TreeNode>,
    pub lists: Vec<ExplorationList>,
}

impl ExplorationTree {
    pub fn path(&self, leaf: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut i = leaf;
        while i != NO_PARENT {
            out.push(i);
            i = self.nodes[i as usize].parent;
        }
        out.reverse();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageStats {
    pub k: usize,
    pub lists: usize,
    pub wr_size: usize,
    pub outcome: &'static str,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Reachable { hole_bound: usize, tree: ExplorationTree, leaf: u32 },
    EmptyUpTo(usize),
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub outcome: Outcome,
    pub stats: Vec<StageStats>,
}

impl SearchOutcome {
    pub fn hole_bound(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Reachable { hole_bound, .. } => Some(hole_bound),
            Outcome::EmptyUpTo(_) => None,
        }
    }

    pub fn is_reachable(&self) -> bool {
        self.hole_bound().is_some()
    }

    pub fn lists_explored(&self) -> usize {
        self.stats.iter().map(|s| s.lists).sum()
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_holes: usize,
    pub timed: bool,
    /// Overrides the default budget on distinct lists per stage.
    pub node_cap: Option<usize>,
}

impl SearchOptions {
    pub fn new(max_holes: usize, timed: bool) -> Self {
        SearchOptions { max_holes, timed, node_cap: None }
    }
}

/// `|S|^(2k+3) * n^(k+1)`, saturating.
pub fn list_bound(states: usize, stacks: usize, k: usize) -> u128 {
    let mut b: u128 = 1;
    for _ in 0..2 * k + 3 {
        b = b.saturating_mul(states as u128);
    }
    for _ in 0..k + 1 {
        b = b.saturating_mul(stacks as u128);
    }
    b
}

pub fn default_cap(an: &Analysis, k: usize) -> usize {
    list_bound(an.wr.nodes(), an.model.n_stacks, k).min(10_000_000) as usize
}

pub struct Stage {
    pub tree: ExplorationTree,
    pub found: Option<u32>,
}

struct Explorer<'a> {
    an: &'a Analysis,
    k: usize,
    cap: usize,
    tree: ExplorationTree,
    seen: FxHashMap<ExplorationList, u32>,
    queue: VecDeque<u32>,
}

impl<'a> Explorer<'a> {
    /// Records a new list; returns its id when it was not seen before.
    fn add(&mut self, list: ExplorationList, parent: u32, op: TreeOp) -> Result<Option<u32>, SearchError> {
        if self.seen.contains_key(&list) {
            return Ok(None);
        }
        if self.seen.len() >= self.cap {
            return Err(SearchError::BudgetExceeded { k: self.k, cap: self.cap });
        }
        let id = self.tree.nodes.len() as u32;
        let depth = if parent == NO_PARENT { 0 } else { self.tree.nodes[parent as usize].depth + 1 };
        self.seen.insert(list.clone(), id);
        self.tree.nodes.push(TreeNode { parent, op, depth });
        self.tree.lists.push(list);
        self.queue.push_back(id);
        Ok(Some(id))
    }

    fn children(&self, id: u32) -> Vec<(ExplorationList, TreeOp)> {
        let an = self.an;
        let sp = an.space();
        let list = &self.tree.lists[id as usize];
        let mut out = Vec::new();
        if list.holes.len() < self.k {
            // Appending a hole right at the exit of a hole of the same stack
            // gives a list with the same continuations as one merged hole.
            let after = list.holes.last().filter(|h| h.exit == list.last && h.gap == 0).map(|h| h.stack as usize);
            for i in (0..an.model.n_stacks).filter(|&i| Some(i) != after) {
                let row = an.hs_row(i, list.last);
                for (w, &mask) in row.iter().enumerate() {
                    for t in bits(mask) {
                        let mut next = list.clone();
                        next.holes.push(ListHole { stack: i as u8, dur: t, gap: 0, entry: list.last, exit: w as Node });
                        next.last = w as Node;
                        out.push((next, TreeOp::Hole));
                    }
                }
            }
        }
        if list.holes.is_empty() {
            return out;
        }
        for &(after_pop, q) in &an.pop_at[list.last as usize] {
            let StackOp::Pop { stack, sym, age } = an.model.transitions[q].op else { unreachable!() };
            let Some(hk) = list.holes.iter().rposition(|h| h.stack as usize == stack) else { continue };
            let h = list.holes[hk];
            let mut base = h.gap;
            for later in &list.holes[hk + 1..] {
                base = sp.add(base, sp.add(later.dur, later.gap));
            }
            let shrink_row = an.hs_row(stack, h.entry);
            for &p in &an.push_by[stack][sym] {
                for &(mid, pushed) in &an.wr.firings[p] {
                    let m2 = an.wr.durs(pushed, h.exit);
                    if m2 == 0 {
                        continue;
                    }
                    for t2 in bits(m2) {
                        if !age.contains_clamped(sp.add(t2, base) as u32, sp.cap as u32) {
                            continue;
                        }
                        let step = PopStep {
                            stack,
                            hole: hk,
                            closed: false,
                            push: p,
                            mid,
                            pushed,
                            exit: h.exit,
                            t2,
                            pop: q,
                            after_pop,
                            t4: 0,
                        };
                        if mid == h.entry && t2 == h.dur {
                            let mut holes = list.holes.clone();
                            let merged = sp.add(h.dur, h.gap);
                            holes.remove(hk);
                            if hk > 0 {
                                holes[hk - 1].gap = sp.add(holes[hk - 1].gap, merged);
                            }
                            self.tails(&mut out, holes, PopStep { closed: true, ..step });
                        }
                        for t1 in bits(shrink_row[mid as usize]) {
                            if sp.add(t1, t2) != h.dur {
                                continue;
                            }
                            let mut holes = list.holes.clone();
                            holes[hk].exit = mid;
                            holes[hk].dur = t1;
                            holes[hk].gap = sp.add(t2, h.gap);
                            self.tails(&mut out, holes, step);
                        }
                    }
                }
            }
        }
        out
    }

    fn tails(&self, out: &mut Vec<(ExplorationList, TreeOp)>, holes: SmallVec<[ListHole; 4]>, step: PopStep) {
        let sp = self.an.space();
        for (s2, &mask) in self.an.wr.row(step.after_pop).iter().enumerate() {
            if mask == 0 {
                continue;
            }
            if holes.is_empty() {
                let t4 = mask.trailing_zeros() as u8;
                out.push((
                    ExplorationList { holes: holes.clone(), last: s2 as Node },
                    TreeOp::Pop(PopStep { t4, ..step }),
                ));
                continue;
            }
            for t4 in bits(mask) {
                let mut hs = holes.clone();
                let lastgap = &mut hs.last_mut().expect("nonempty").gap;
                *lastgap = sp.add(*lastgap, t4);
                out.push((ExplorationList { holes: hs, last: s2 as Node }, TreeOp::Pop(PopStep { t4, ..step })));
            }
        }
    }
}

/// Breadth-first exploration of lists with at most `k` open holes from the
/// given roots, stopping at the first list satisfying `goal`.
pub fn explore(
    an: &Analysis,
    k: usize,
    cap: usize,
    start: Node,
    goal: &dyn Fn(&ExplorationList, &TreeOp) -> bool,
) -> Result<Stage, SearchError> {
    let mut ex = Explorer {
        an,
        k,
        cap,
        tree: ExplorationTree::default(),
        seen: FxHashMap::default(),
        queue: VecDeque::new(),
    };
    for (s, &mask) in an.wr.row(start).iter().enumerate() {
        if mask == 0 {
            continue;
        }
        let list = ExplorationList { holes: SmallVec::new(), last: s as Node };
        let op = TreeOp::Root { dur: mask.trailing_zeros() as u8 };
        let ok = goal(&list, &op);
        if let Some(id) = ex.add(list, NO_PARENT, op)? {
            if ok {
                return Ok(Stage { tree: ex.tree, found: Some(id) });
            }
        }
    }
    while let Some(id) = ex.queue.pop_front() {
        for (list, op) in ex.children(id) {
            let ok = goal(&list, &op);
            if let Some(nid) = ex.add(list, id, op)? {
                if ok {
                    return Ok(Stage { tree: ex.tree, found: Some(nid) });
                }
            }
        }
    }
    Ok(Stage { tree: ex.tree, found: None })
}

/// Iterative deepening over hole bounds `0..=max_holes`, accepting complete
/// runs ending in a final location.
pub fn check_reachable_with(an: &Analysis, opts: &SearchOptions) -> Result<SearchOutcome, SearchError> {
    check_reachable_logged(an, opts, &mut |_| {})
}

/// As [`check_reachable_with`], reporting each stage to `log` as it ends.
pub fn check_reachable_logged(
    an: &Analysis,
    opts: &SearchOptions,
    log: &mut dyn FnMut(&StageStats),
) -> Result<SearchOutcome, SearchError> {
    let sp = an.space();
    let finals: Vec<bool> = (0..an.model.locations.len()).map(|l| an.model.is_final(l)).collect();
    let goal = |l: &ExplorationList, _: &TreeOp| l.holes.is_empty() && finals[sp.loc(l.last)];
    let mut stats = Vec::new();
    for k in 0..=opts.max_holes {
        let started = Instant::now();
        let cap = opts.node_cap.unwrap_or_else(|| default_cap(an, k));
        let result = explore(an, k, cap, an.initial(), &goal);
        let stat = |lists, outcome| StageStats {
            k,
            lists,
            wr_size: an.wr.size(),
            outcome,
            elapsed_ms: started.elapsed().as_millis() as u64,
        };
        let stage = match result {
            Ok(s) => s,
            Err(e) => {
                log(&stat(cap, "budget"));
                return Err(e);
            }
        };
        let lists = stage.tree.lists.len();
        if let Some(leaf) = stage.found {
            stats.push(stat(lists, "nonempty"));
            log(&stats[stats.len() - 1]);
            return Ok(SearchOutcome { outcome: Outcome::Reachable { hole_bound: k, tree: stage.tree, leaf }, stats });
        }
        stats.push(stat(lists, "empty"));
        log(&stats[stats.len() - 1]);
    }
    Ok(SearchOutcome { outcome: Outcome::EmptyUpTo(opts.max_holes), stats })
}

/// Decides K-hole bounded reachability; timed models are searched with
/// clamped time.
pub fn check_reachable(m: &Model, k: usize) -> Result<SearchOutcome, SearchError> {
    let an = Analysis::new(m, m.is_timed())?;
    check_reachable_with(&an, &SearchOptions::new(k, m.is_timed()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepeatMode {
    /// Non-empty well-nested runs to the target and around it.
    WellNested = 1,
    /// A complete hole-bounded run to the target, then a well-nested cycle.
    CompleteThenCycle = 2,
    /// Hole-bounded runs that may leave items on the stacks.
    OpenStacks = 3,
}

/// Whether `target` can be visited infinitely often, under one of three
/// finite decompositions of an infinite run.
pub fn repeated_reachability(m: &Model, target: LocId, k: usize, mode: RepeatMode) -> Result<bool, SearchError> {
    if target >= m.locations.len() {
        return Err(SearchError::BadTarget(target));
    }
    if m.is_timed() && m.n_clocks > 0 {
        return Err(SearchError::TimedUnsupported);
    }
    let an = Analysis::new(m, false)?;
    let plus = an.wr.nonempty();
    let init = an.initial() as usize;
    let cycle = plus.get(target, target);
    match mode {
        RepeatMode::WellNested => Ok(plus.get(init, target) && cycle),
        RepeatMode::CompleteThenCycle => {
            if !cycle {
                return Ok(false);
            }
            let an2 = Analysis::new(&m.with_finals(vec![target]), false)?;
            Ok(check_reachable_with(&an2, &SearchOptions::new(k, false))?.is_reachable())
        }
        RepeatMode::OpenStacks => {
            let cap = default_cap(&an, k);
            let reach = |l: &ExplorationList, _: &TreeOp| l.last as usize == target;
            if explore(&an, k, cap, an.initial(), &reach)?.found.is_none() {
                return Ok(false);
            }
            let again = |l: &ExplorationList, op: &TreeOp| {
                l.last as usize == target && (!matches!(op, TreeOp::Root { .. }) || cycle)
            };
            Ok(explore(&an, k, cap, target as Node, &again)?.found.is_some())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgeInterval, Builder, OpSpec};

    fn single_push() -> Model {
        let mut b = Builder::new(Kind::Untimed, 2, 0);
        let l = b.locs(&["s0", "s1"]);
        b.initial(l[0]).accept(l[1]);
        b.trans(l[0], l[1], OpSpec::Push(0, "A"));
        b.build()
    }

    #[test]
    fn single_atomic_segment() {
        let an = Analysis::new(&single_push(), false).unwrap();
        let segs = compute_ahs_hs(&an);
        assert_eq!(segs.ahs[0], vec![AtomicHoleSeg { stack: 0, entry: 0, push: 0, sym: 0, exit: 1, t: 0 }]);
        assert_eq!(segs.hs[0], vec![HoleTriple { stack: 0, entry: 0, exit: 1, t: 0 }]);
        assert!(segs.ahs[1].is_empty() && segs.hs[1].is_empty());
    }

    #[test]
    fn initial_final_is_trivially_reachable() {
        let mut b = Builder::new(Kind::Untimed, 1, 0);
        let s = b.loc("s");
        b.initial(s).accept(s);
        let out = check_reachable(&b.build(), 0).unwrap();
        assert_eq!(out.hole_bound(), Some(0));
    }

    #[test]
    fn pop_closes_the_hole() {
        // s0 -push A-> s1 -pop A-> s2 only through a hole: the pop is on a
        // different path than the well-nested one would need.
        let mut b = Builder::new(Kind::Untimed, 2, 0);
        let l = b.locs(&["s0", "s1", "s2", "s3", "s4"]);
        b.initial(l[0]).accept(l[4]);
        b.trans(l[0], l[1], OpSpec::Push(0, "A"));
        b.trans(l[1], l[2], OpSpec::Push(1, "B"));
        b.trans(l[2], l[3], OpSpec::Pop(0, "A", AgeInterval::ANY));
        b.trans(l[3], l[4], OpSpec::Pop(1, "B", AgeInterval::ANY));
        let m = b.build();
        let out = check_reachable(&m, 1).unwrap();
        assert!(!out.is_reachable());
        let out = check_reachable(&m, 2).unwrap();
        assert_eq!(out.hole_bound(), Some(2));
        let mut wrong = m.clone();
        wrong.transitions[2].op = StackOp::Pop { stack: 0, sym: 1, age: AgeInterval::ANY };
        assert!(!check_reachable(&wrong, 3).unwrap().is_reachable());
    }

    #[test]
    fn list_bound_arithmetic() {
        assert_eq!(list_bound(3, 2, 1), 3u128.pow(5) * 4);
        assert_eq!(list_bound(usize::MAX, 2, 8), u128::MAX);
    }

    #[test]
    fn repeated_modes() {
        // A nop self-loop on the initial final location.
        let mut b = Builder::new(Kind::Untimed, 1, 0);
        let s = b.loc("s");
        b.initial(s).accept(s);
        b.trans(s, s, OpSpec::Nop);
        assert!(repeated_reachability(&b.build(), 0, 0, RepeatMode::WellNested).unwrap());

        // The target is re-entered only by pushing.
        let mut b = Builder::new(Kind::Untimed, 1, 0);
        let l = b.locs(&["s0", "t", "u"]);
        b.initial(l[0]).accept(l[1]);
        b.trans(l[0], l[1], OpSpec::Nop);
        b.trans(l[1], l[2], OpSpec::Push(0, "A"));
        b.trans(l[2], l[1], OpSpec::Nop);
        let m = b.build();
        assert!(repeated_reachability(&m, 1, 2, RepeatMode::OpenStacks).unwrap());
        assert!(!repeated_reachability(&m, 1, 2, RepeatMode::CompleteThenCycle).unwrap());
        assert!(!repeated_reachability(&m, 1, 2, RepeatMode::WellNested).unwrap());
    }
}
