//! Witness construction: unrolling well-nested entries and backtracking
//! through an exploration tree.

use thiserror::Error;

use crate::closure::{NotInWr, TimedState, WellNested};
use crate::holesearch::{Analysis, ExplorationTree, Outcome, SearchOutcome, TreeOp, NO_PARENT};
use crate::model::{LocId, TransId};
use crate::semantics::{normalize, replay, Replay, RunStep, Witness};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("no accepting run was found")]
    NotReachable,
    #[error(transparent)]
    NotInWr(#[from] NotInWr),
    #[error("witness stack for stack {0} ran out before a hole boundary")]
    StackUnderflow(usize),
    #[error("assembled run does not replay: {0}")]
    Replay(String),
}

/// A well-nested run of the untimed relation from `s1` to `s2`.
pub fn wellnested_witness(wr: &WellNested, s1: LocId, s2: LocId) -> Result<Vec<TransId>, NotInWr> {
    let steps = wr.unroll(s1 as u32, s2 as u32, 0)?;
    Ok(steps
        .into_iter()
        .filter_map(|s| match s {
            RunStep::Fire(t) => Some(t),
            RunStep::Elapse(_) => None,
        })
        .collect())
}

/// A well-nested timed run from `from` to `to` taking clamped time `t`.
pub fn timed_wellnested_witness(
    wrt: &WellNested,
    from: &TimedState,
    t: u32,
    to: &TimedState,
) -> Result<Vec<RunStep>, NotInWr> {
    let sp = &wrt.space;
    wrt.unroll(sp.node_of(from), sp.node_of(to), t as u8)
}

enum Entry {
    Barrier,
    Segment(Vec<RunStep>),
}

/// Per-stack storage of hole contents met while backtracking.
pub struct WitnessStack {
    stacks: Vec<Vec<Entry>>,
}

impl WitnessStack {
    pub fn new(n: usize) -> Self {
        WitnessStack { stacks: (0..n).map(|_| Vec::new()).collect() }
    }

    pub fn push_barrier(&mut self, i: usize) {
        self.stacks[i].push(Entry::Barrier);
    }

    pub fn push_segment(&mut self, i: usize, seg: Vec<RunStep>) {
        self.stacks[i].push(Entry::Segment(seg));
    }

    /// Removes everything down to and including the topmost barrier and
    /// returns the segments in run order.
    pub fn release(&mut self, i: usize) -> Result<Vec<RunStep>, WitnessError> {
        let mut segs = Vec::new();
        loop {
            match self.stacks[i].pop() {
                None => return Err(WitnessError::StackUnderflow(i)),
                Some(Entry::Barrier) => break,
                Some(Entry::Segment(s)) => segs.push(s),
            }
        }
        Ok(segs.into_iter().rev().flatten().collect())
    }

    pub fn is_empty(&self) -> bool {
        self.stacks.iter().all(Vec::is_empty)
    }
}

/// The content of a hole, recorded when backtracking reaches its creation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoleRelease {
    pub node: u32,
    pub stack: usize,
    pub content: Vec<RunStep>,
}

/// Rebuilds the run represented by the path from the root to `leaf`.
pub fn hole_witness(an: &Analysis, tree: &ExplorationTree, leaf: u32) -> Result<Vec<RunStep>, WitnessError> {
    hole_witness_traced(an, tree, leaf).map(|(s, _)| s)
}

pub fn hole_witness_traced(
    an: &Analysis,
    tree: &ExplorationTree,
    leaf: u32,
) -> Result<(Vec<RunStep>, Vec<HoleRelease>), WitnessError> {
    let wr = &an.wr;
    let mut ws = WitnessStack::new(an.model.n_stacks);
    let mut rev: Vec<RunStep> = Vec::new();
    let mut trace = Vec::new();
    let mut id = leaf;
    while id != NO_PARENT {
        let node = &tree.nodes[id as usize];
        let list = &tree.lists[id as usize];
        match node.op {
            TreeOp::Root { dur } => {
                rev.extend(wr.unroll(an.initial(), list.last, dur)?.into_iter().rev());
            }
            TreeOp::Pop(p) => {
                rev.extend(wr.unroll(p.after_pop, list.last, p.t4)?.into_iter().rev());
                rev.push(RunStep::Fire(p.pop));
                if p.closed {
                    ws.push_barrier(p.stack);
                }
                let mut seg = vec![RunStep::Fire(p.push)];
                seg.extend(wr.unroll(p.pushed, p.exit, p.t2)?);
                ws.push_segment(p.stack, seg);
            }
            TreeOp::Hole => {
                let h = list.holes.last().expect("hole node has a hole");
                let content = ws.release(h.stack as usize)?;
                rev.extend(content.iter().rev().copied());
                trace.push(HoleRelease { node: id, stack: h.stack as usize, content });
            }
        }
        id = node.parent;
    }
    rev.reverse();
    trace.reverse();
    Ok((normalize(rev), trace))
}

/// Turns a search outcome into a replay-checked witness.
pub fn assemble_witness(an: &Analysis, out: &SearchOutcome) -> Result<Witness, WitnessError> {
    let Outcome::Reachable { hole_bound, tree, leaf } = &out.outcome else {
        return Err(WitnessError::NotReachable);
    };
    let w = Witness::new(hole_witness(an, tree, *leaf)?, *hole_bound);
    match replay(&an.model, &w) {
        Replay::Accepting(_) => Ok(w),
        Replay::Rejected { at, reason } => Err(WitnessError::Replay(format!("step {at}: {reason:?}"))),
    }
}
