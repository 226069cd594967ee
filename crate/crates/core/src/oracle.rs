//! Exhaustive search over exact configurations. Exponential; meant for small
//! models in tests and for cross-checking the clamped algorithms.

use std::collections::VecDeque;

use rustc_hash::{FxHashMap, FxHashSet};
use thiserror::Error;

use crate::model::{LocId, Model, StackOp};
use crate::semantics::{step_in_place, Config, RunStep, Witness};

#[derive(Clone, Debug)]
pub struct OracleOptions {
    /// Maximum number of fired transitions.
    pub max_steps: usize,
    /// Largest single elapse; 0 disables time.
    pub max_elapse: u64,
    pub max_total_elapse: Option<u64>,
    pub node_cap: usize,
}

impl OracleOptions {
    pub fn untimed(max_steps: usize) -> Self {
        OracleOptions { max_steps, max_elapse: 0, max_total_elapse: None, node_cap: 2_000_000 }
    }

    pub fn timed(max_steps: usize, max_elapse: u64) -> Self {
        OracleOptions { max_steps, max_elapse, max_total_elapse: None, node_cap: 2_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Reachable(Witness),
    NotFoundWithinBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle frontier exceeded {0} configurations")]
    BudgetExceeded(usize),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Discipline {
    Free,
    /// Pops must match the most recent pending push across all stacks.
    WellNested,
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Node {
    c: Config,
    nest: Vec<u8>,
    after_elapse: bool,
}

struct Explorer<'m> {
    m: &'m Model,
    opts: &'m OracleOptions,
    discipline: Discipline,
    track_elapsed: bool,
    /// Largest finite age at which (stack, symbol) can still be popped;
    /// `None` inside means unbounded, missing means never.
    pop_horizon: FxHashMap<(usize, usize), Option<u64>>,
}

impl<'m> Explorer<'m> {
    fn new(m: &'m Model, opts: &'m OracleOptions, discipline: Discipline) -> Self {
        let mut pop_horizon: FxHashMap<(usize, usize), Option<u64>> = FxHashMap::default();
        for t in &m.transitions {
            if let StackOp::Pop { stack, sym, age } = t.op {
                let e = pop_horizon.entry((stack, sym)).or_insert(Some(0));
                *e = match (*e, age.hi) {
                    (None, _) | (_, None) => None,
                    (Some(a), Some(b)) => Some(a.max(b as u64)),
                };
            }
        }
        Explorer { m, opts, discipline, track_elapsed: opts.max_total_elapse.is_some(), pop_horizon }
    }

    fn doomed(&self, c: &Config) -> bool {
        c.stacks.iter().enumerate().any(|(i, st)| {
            st.iter().any(|&(sym, age)| match self.pop_horizon.get(&(i, sym)) {
                None => true,
                Some(None) => false,
                Some(Some(h)) => age > *h,
            })
        })
    }

    fn key(&self, n: &Node) -> Node {
        let mut k = n.clone();
        if !self.track_elapsed {
            k.c.elapsed = 0;
        }
        k
    }

    /// BFS by fired transitions; returns the path to the first configuration
    /// satisfying `goal`, or visits everything when `goal` never holds.
    fn explore(
        &self,
        start: Config,
        mut goal: impl FnMut(&Config, usize) -> bool,
    ) -> Result<Option<Vec<RunStep>>, OracleError> {
        let mut nodes: Vec<(usize, RunStep)> = Vec::new();
        let mut seen: FxHashSet<Node> = FxHashSet::default();
        let mut queue: VecDeque<(Node, usize, usize)> = VecDeque::new();
        let root = Node { c: start, nest: Vec::new(), after_elapse: false };
        if goal(&root.c, 0) {
            return Ok(Some(Vec::new()));
        }
        seen.insert(self.key(&root));
        nodes.push((usize::MAX, RunStep::Elapse(0)));
        queue.push_back((root, 0, 0));
        let path = |nodes: &Vec<(usize, RunStep)>, mut i: usize| {
            let mut out = Vec::new();
            while nodes[i].0 != usize::MAX {
                out.push(nodes[i].1);
                i = nodes[i].0;
            }
            out.reverse();
            out
        };
        while let Some((node, depth, id)) = queue.pop_front() {
            let mut succ: Vec<(Node, RunStep, usize)> = Vec::new();
            if !node.after_elapse && self.opts.max_elapse > 0 {
                for d in 1..=self.opts.max_elapse {
                    if let Some(cap) = self.opts.max_total_elapse {
                        if node.c.elapsed + d > cap {
                            break;
                        }
                    }
                    let mut n = node.clone();
                    step_in_place(self.m, &mut n.c, RunStep::Elapse(d)).expect("positive elapse");
                    n.after_elapse = true;
                    succ.push((n, RunStep::Elapse(d), depth));
                }
            }
            if depth < self.opts.max_steps {
                for t in &self.m.transitions {
                    if t.src != node.c.loc {
                        continue;
                    }
                    let mut n = node.clone();
                    if self.discipline == Discipline::WellNested {
                        match t.op {
                            StackOp::Push { stack, .. } => n.nest.push(stack as u8),
                            StackOp::Pop { stack, .. } => {
                                if n.nest.last() != Some(&(stack as u8)) {
                                    continue;
                                }
                                n.nest.pop();
                            }
                            StackOp::Nop => {}
                        }
                    }
                    if step_in_place(self.m, &mut n.c, RunStep::Fire(t.id)).is_err() {
                        continue;
                    }
                    n.after_elapse = false;
                    succ.push((n, RunStep::Fire(t.id), depth + 1));
                }
            }
            for (n, s, d) in succ {
                if self.doomed(&n.c) || !seen.insert(self.key(&n)) {
                    continue;
                }
                nodes.push((id, s));
                let nid = nodes.len() - 1;
                if goal(&n.c, d) {
                    return Ok(Some(path(&nodes, nid)));
                }
                if seen.len() > self.opts.node_cap {
                    return Err(OracleError::BudgetExceeded(self.opts.node_cap));
                }
                // Elapse successors do not consume a step; keep the queue
                // ordered by fired transitions.
                if matches!(s, RunStep::Elapse(_)) {
                    queue.push_front((n, d, nid));
                } else {
                    queue.push_back((n, d, nid));
                }
            }
        }
        Ok(None)
    }
}

/// Searches for an accepting run within the given bounds.
pub fn oracle_reachable(m: &Model, opts: &OracleOptions) -> Result<OracleOutcome, OracleError> {
    let ex = Explorer::new(m, opts, Discipline::Free);
    let found = ex.explore(Config::initial(m), |c, _| m.is_final(c.loc) && c.stacks_empty())?;
    Ok(match found {
        Some(steps) => OracleOutcome::Reachable(Witness::new(steps, 0)),
        None => OracleOutcome::NotFoundWithinBound,
    })
}

/// Location pairs joined by a well-nested run of at most `opts.max_steps`
/// transitions, starting and ending with empty stacks.
pub fn oracle_wellnested_pairs(m: &Model, opts: &OracleOptions) -> Result<Vec<(LocId, LocId)>, OracleError> {
    let ex = Explorer::new(m, opts, Discipline::WellNested);
    let mut out = Vec::new();
    for s in 0..m.locations.len() {
        let mut start = Config::initial(m);
        start.loc = s;
        let mut hit = vec![false; m.locations.len()];
        ex.explore(start, |c, _| {
            if c.stacks_empty() {
                hit[c.loc] = true;
            }
            false
        })?;
        out.extend(hit.iter().enumerate().filter(|(_, h)| **h).map(|(d, _)| (s, d)));
    }
    Ok(out)
}

/// Well-nested runs from `start` (stacks must be empty), reporting each
/// reached empty-stack configuration once per distinct (location, clocks,
/// elapsed) triple.
pub fn oracle_wellnested_from(
    m: &Model,
    start: Config,
    opts: &OracleOptions,
) -> Result<Vec<(LocId, Vec<u64>, u64)>, OracleError> {
    let mut ex = Explorer::new(m, opts, Discipline::WellNested);
    ex.track_elapsed = true;
    let mut found = FxHashSet::default();
    ex.explore(start, |c, _| {
        if c.stacks_empty() {
            found.insert((c.loc, c.clocks.clone(), c.elapsed));
        }
        false
    })?;
    let mut v: Vec<_> = found.into_iter().collect();
    v.sort();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgeInterval, Builder, Kind, OpSpec};
    use crate::semantics::replay;

    #[test]
    fn single_nop() {
        let mut b = Builder::new(Kind::Untimed, 1, 0);
        let s0 = b.loc("s0");
        let s1 = b.loc("s1");
        b.initial(s0).accept(s1);
        b.trans(s0, s1, OpSpec::Nop);
        let m = b.build();
        match oracle_reachable(&m, &OracleOptions::untimed(1)).unwrap() {
            OracleOutcome::Reachable(w) => {
                assert_eq!(w.steps, vec![RunStep::Fire(0)]);
                assert!(replay(&m, &w).is_accepting());
            }
            other => panic!("{other:?}"),
        }
        let stripped = m.with_finals(vec![]);
        assert_eq!(oracle_reachable(&stripped, &OracleOptions::untimed(5)).unwrap(), OracleOutcome::NotFoundWithinBound);
    }

    #[test]
    fn crossing_run_is_not_wellnested() {
        let mut b = Builder::new(Kind::Untimed, 2, 0);
        let l = b.locs(&["a", "b", "c", "d", "e"]);
        b.initial(l[0]).accept(l[4]);
        b.trans(l[0], l[1], OpSpec::Push(0, "A"));
        b.trans(l[1], l[2], OpSpec::Push(1, "B"));
        b.trans(l[2], l[3], OpSpec::Pop(0, "A", AgeInterval::ANY));
        b.trans(l[3], l[4], OpSpec::Pop(1, "B", AgeInterval::ANY));
        let m = b.build();
        assert!(matches!(oracle_reachable(&m, &OracleOptions::untimed(4)).unwrap(), OracleOutcome::Reachable(_)));
        let pairs = oracle_wellnested_pairs(&m, &OracleOptions::untimed(4)).unwrap();
        assert!(!pairs.contains(&(0, 4)));
        assert!(pairs.contains(&(3, 3)));
    }

    #[test]
    fn timed_wait_is_found() {
        let mut b = Builder::new(Kind::Timed, 1, 0);
        let l = b.locs(&["a", "b", "c"]);
        b.initial(l[0]).accept(l[2]);
        b.trans(l[0], l[1], OpSpec::Push(0, "A"));
        b.trans(l[1], l[2], OpSpec::Pop(0, "A", AgeInterval::new(3, Some(3))));
        let m = b.build();
        match oracle_reachable(&m, &OracleOptions::timed(2, 3)).unwrap() {
            OracleOutcome::Reachable(w) => assert_eq!(w.total_elapse(), 3),
            other => panic!("{other:?}"),
        }
    }
}
