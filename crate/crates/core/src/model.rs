//! Multi-stack pushdown automata, optionally timed.
//!
//! Stacks and clocks are 0-based in memory and 1-based in the text format.

use std::fmt;

use rustc_hash::FxHashMap;

pub type LocId = usize;
pub type TransId = usize;
pub type SymId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Untimed,
    Timed,
}

/// Closed interval on stack ages. `hi == None` means no upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AgeInterval {
    pub lo: u32,
    pub hi: Option<u32>,
}

impl AgeInterval {
    pub const ANY: AgeInterval = AgeInterval { lo: 0, hi: None };

    pub fn new(lo: u32, hi: Option<u32>) -> Self {
        AgeInterval { lo, hi }
    }

    pub fn contains(&self, age: u64) -> bool {
        age >= self.lo as u64 && self.hi.is_none_or(|h| age <= h as u64)
    }

    /// Membership for an age clamped at `cap`: the clamp value stands for
    /// every age at or above `cap`.
    pub fn contains_clamped(&self, age: u32, cap: u32) -> bool {
        if age >= cap {
            self.hi.is_none()
        } else {
            self.contains(age as u64)
        }
    }
}

impl fmt::Display for AgeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(h) => write!(f, "[{},{}]", self.lo, h),
            None => write!(f, "[{},inf)", self.lo),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cmp {
    Le,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub clock: usize,
    pub cmp: Cmp,
    pub bound: u32,
}

impl Atom {
    pub fn holds(&self, v: u64) -> bool {
        match self.cmp {
            Cmp::Le => v <= self.bound as u64,
            Cmp::Ge => v >= self.bound as u64,
        }
    }
}

/// Conjunction of clock atoms; empty is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Guard {
    pub atoms: Vec<Atom>,
}

impl Guard {
    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn holds<V: Copy + Into<u64>>(&self, clocks: &[V]) -> bool {
        self.atoms.iter().all(|a| a.holds(clocks[a.clock].into()))
    }

    pub fn le(clock: usize, bound: u32) -> Atom {
        Atom { clock, cmp: Cmp::Le, bound }
    }

    pub fn ge(clock: usize, bound: u32) -> Atom {
        Atom { clock, cmp: Cmp::Ge, bound }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StackOp {
    Nop,
    Push { stack: usize, sym: SymId },
    Pop { stack: usize, sym: SymId, age: AgeInterval },
}

impl StackOp {
    pub fn stack(&self) -> Option<usize> {
        match *self {
            StackOp::Nop => None,
            StackOp::Push { stack, .. } | StackOp::Pop { stack, .. } => Some(stack),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub id: TransId,
    pub src: LocId,
    pub dst: LocId,
    pub label: Option<usize>,
    pub op: StackOp,
    pub guard: Guard,
    pub resets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub kind: Kind,
    pub locations: Vec<String>,
    pub initial: LocId,
    pub finals: Vec<LocId>,
    pub n_stacks: usize,
    pub n_clocks: usize,
    pub stack_alphabet: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub transitions: Vec<Transition>,
    pub cmax_clock: Vec<u32>,
    pub cmax_stack: u32,
}

impl Model {
    pub fn is_timed(&self) -> bool {
        self.kind == Kind::Timed
    }

    pub fn is_final(&self, l: LocId) -> bool {
        self.finals.contains(&l)
    }

    pub fn loc_by_name(&self, name: &str) -> Option<LocId> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn label_of(&self, t: TransId) -> Option<&str> {
        self.transitions[t].label.map(|l| self.input_alphabet[l].as_str())
    }

    /// Recomputes the derived clock and stack constants.
    pub fn derive_constants(&mut self) {
        let mut cc = vec![0u32; self.n_clocks];
        let mut cs = 0u32;
        for t in &self.transitions {
            for a in &t.guard.atoms {
                if a.clock < cc.len() {
                    cc[a.clock] = cc[a.clock].max(a.bound);
                }
            }
            if let StackOp::Pop { age, .. } = t.op {
                cs = cs.max(age.lo);
                if let Some(h) = age.hi {
                    cs = cs.max(h);
                }
            }
        }
        self.cmax_clock = cc;
        self.cmax_stack = cs;
    }

    /// Drops clocks, guards, resets and age constraints.
    pub fn untimed_projection(&self) -> Model {
        let mut m = self.clone();
        m.kind = Kind::Untimed;
        m.n_clocks = 0;
        for t in &mut m.transitions {
            t.guard = Guard::default();
            t.resets.clear();
            if let StackOp::Pop { age, .. } = &mut t.op {
                *age = AgeInterval::ANY;
            }
        }
        m.derive_constants();
        m
    }

    /// Reads an untimed model as a timed one without clocks.
    pub fn as_timed(&self) -> Model {
        let mut m = self.clone();
        m.kind = Kind::Timed;
        m.derive_constants();
        m
    }

    pub fn with_finals(&self, finals: Vec<LocId>) -> Model {
        let mut m = self.clone();
        m.finals = finals;
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub entity: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.entity, self.message)
    }
}

pub fn validate_model(m: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |entity: String, message: &str| {
        out.push(Diagnostic { entity, message: message.to_string() })
    };
    let nl = m.locations.len();
    if nl == 0 {
        diag("model".into(), "no locations declared");
    }
    let mut seen = FxHashMap::default();
    for (i, l) in m.locations.iter().enumerate() {
        if let Some(j) = seen.insert(l.as_str(), i) {
            diag(format!("location {l}"), &format!("duplicate location name (also #{j})"));
        }
    }
    if m.n_stacks == 0 {
        diag("model".into(), "at least one stack is required");
    }
    if m.initial >= nl {
        diag("initial".into(), "initial location out of range");
    }
    for &f in &m.finals {
        if f >= nl {
            diag(format!("final #{f}"), "final location out of range");
        }
    }
    if m.kind == Kind::Untimed && m.n_clocks > 0 {
        diag("model".into(), "untimed model declares clocks");
    }
    for t in &m.transitions {
        let name = format!("transition {}", t.id);
        if t.src >= nl || t.dst >= nl {
            diag(name.clone(), "location out of range");
        }
        if let Some(l) = t.label {
            if l >= m.input_alphabet.len() {
                diag(name.clone(), "label out of range");
            }
        }
        match t.op {
            StackOp::Nop => {}
            StackOp::Push { stack, sym } | StackOp::Pop { stack, sym, .. } => {
                if stack >= m.n_stacks {
                    diag(name.clone(), "stack index out of range");
                }
                if sym >= m.stack_alphabet.len() {
                    diag(name.clone(), "stack symbol out of range");
                }
            }
        }
        if let StackOp::Pop { age, .. } = t.op {
            if matches!(age.hi, Some(h) if h < age.lo) {
                diag(name.clone(), "malformed age interval (lo > hi)");
            }
            if m.kind == Kind::Untimed && age != AgeInterval::ANY {
                diag(name.clone(), "age interval on untimed model");
            }
        }
        for a in &t.guard.atoms {
            if a.clock >= m.n_clocks {
                diag(name.clone(), "guard clock out of range");
            }
        }
        for &r in &t.resets {
            if r >= m.n_clocks {
                diag(name.clone(), "reset clock out of range");
            }
        }
    }
    for (i, t) in m.transitions.iter().enumerate() {
        if t.id != i {
            diag(format!("transition {}", t.id), "transition ids are not dense");
            break;
        }
    }
    out
}

pub enum OpSpec<'a> {
    Nop,
    Push(usize, &'a str),
    Pop(usize, &'a str, AgeInterval),
}

/// Incremental construction; interns stack symbols and labels in order of
/// first use.
pub struct Builder {
    m: Model,
    syms: FxHashMap<String, SymId>,
    labels: FxHashMap<String, usize>,
}

impl Builder {
    pub fn new(kind: Kind, n_stacks: usize, n_clocks: usize) -> Self {
        Builder {
            m: Model {
                kind,
                locations: Vec::new(),
                initial: 0,
                finals: Vec::new(),
                n_stacks,
                n_clocks,
                stack_alphabet: Vec::new(),
                input_alphabet: Vec::new(),
                transitions: Vec::new(),
                cmax_clock: vec![0; n_clocks],
                cmax_stack: 0,
            },
            syms: FxHashMap::default(),
            labels: FxHashMap::default(),
        }
    }

    pub fn loc(&mut self, name: &str) -> LocId {
        self.m.locations.push(name.to_string());
        self.m.locations.len() - 1
    }

    pub fn locs(&mut self, names: &[&str]) -> Vec<LocId> {
        names.iter().map(|n| self.loc(n)).collect()
    }

    pub fn initial(&mut self, l: LocId) -> &mut Self {
        self.m.initial = l;
        self
    }

    pub fn accept(&mut self, l: LocId) -> &mut Self {
        if !self.m.finals.contains(&l) {
            self.m.finals.push(l);
        }
        self
    }

    pub fn sym(&mut self, s: &str) -> SymId {
        if let Some(&i) = self.syms.get(s) {
            return i;
        }
        self.m.stack_alphabet.push(s.to_string());
        let i = self.m.stack_alphabet.len() - 1;
        self.syms.insert(s.to_string(), i);
        i
    }

    pub fn trans(&mut self, src: LocId, dst: LocId, op: OpSpec<'_>) -> TransId {
        let op = match op {
            OpSpec::Nop => StackOp::Nop,
            OpSpec::Push(stack, s) => StackOp::Push { stack, sym: self.sym(s) },
            OpSpec::Pop(stack, s, age) => StackOp::Pop { stack, sym: self.sym(s), age },
        };
        let id = self.m.transitions.len();
        self.m.transitions.push(Transition {
            id,
            src,
            dst,
            label: None,
            op,
            guard: Guard::default(),
            resets: Vec::new(),
        });
        id
    }

    pub fn label(&mut self, t: TransId, a: &str) -> &mut Self {
        let l = match self.labels.get(a) {
            Some(&l) => l,
            None => {
                self.m.input_alphabet.push(a.to_string());
                let l = self.m.input_alphabet.len() - 1;
                self.labels.insert(a.to_string(), l);
                l
            }
        };
        self.m.transitions[t].label = Some(l);
        self
    }

    pub fn guard(&mut self, t: TransId, atoms: &[Atom]) -> &mut Self {
        self.m.transitions[t].guard.atoms.extend_from_slice(atoms);
        self
    }

    pub fn reset(&mut self, t: TransId, clocks: &[usize]) -> &mut Self {
        self.m.transitions[t].resets.extend_from_slice(clocks);
        self
    }

    pub fn transition_count(&self) -> usize {
        self.m.transitions.len()
    }

    pub fn build(mut self) -> Model {
        self.m.derive_constants();
        self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_stack() -> Model {
        let mut b = Builder::new(Kind::Untimed, 2, 0);
        let s0 = b.loc("s0");
        let s1 = b.loc("s1");
        b.initial(s0).accept(s1);
        b.trans(s0, s1, OpSpec::Push(0, "A"));
        b.trans(s1, s1, OpSpec::Pop(1, "A", AgeInterval::ANY));
        b.build()
    }

    #[test]
    fn well_formed_has_no_diagnostics() {
        assert!(validate_model(&two_stack()).is_empty());
    }

    #[test]
    fn stack_out_of_range() {
        let mut m = two_stack();
        m.transitions[1].op = StackOp::Pop { stack: 2, sym: 0, age: AgeInterval::ANY };
        let d = validate_model(&m);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("stack index out of range"));
    }

    #[test]
    fn guard_clock_out_of_range() {
        let mut b = Builder::new(Kind::Timed, 1, 1);
        let s = b.loc("s");
        let t = b.trans(s, s, OpSpec::Nop);
        b.guard(t, &[Guard::le(1, 3)]);
        let d = validate_model(&b.build());
        assert_eq!(d.len(), 1);
        assert!(d[0].entity.contains("transition 0"));
    }

    #[test]
    fn derived_constants() {
        let mut b = Builder::new(Kind::Timed, 1, 2);
        let s = b.loc("s");
        let t = b.trans(s, s, OpSpec::Pop(0, "A", AgeInterval::new(2, Some(5))));
        b.guard(t, &[Guard::ge(1, 4), Guard::le(1, 2)]);
        let m = b.build();
        assert_eq!(m.cmax_clock, vec![0, 4]);
        assert_eq!(m.cmax_stack, 5);
    }

    #[test]
    fn clamped_membership() {
        let i = AgeInterval::new(1, Some(4));
        assert!(i.contains_clamped(4, 5));
        assert!(!i.contains_clamped(5, 5));
        assert!(AgeInterval::new(3, None).contains_clamped(5, 5));
        assert!(!AgeInterval::new(3, None).contains_clamped(2, 5));
    }
}
