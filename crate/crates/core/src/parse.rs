//! Line-oriented model files.
//!
//! ```text
//! model tmpda
//! stacks 2
//! clocks 1
//! locations s0 s1
//! initial s0
//! final s1
//! trans s0 s1 push 1 A label a guard x1<=2 reset 1
//! trans s1 s1 pop 1 A age 1 inf label b guard x1>=1|x1<=0
//! ```
//!
//! A guard with `|` yields one transition per disjunct.

use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::model::{validate_model, AgeInterval, Atom, Builder, Cmp, Kind, Model, OpSpec, StackOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok { text: &body[s..i], col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &body[s..], col: s + 1 });
    }
    out
}

struct Parser<'a> {
    line: usize,
    toks: Vec<Tok<'a>>,
    pos: usize,
    eol_col: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { line: self.line, col, msg: msg.into() })
    }

    fn next(&mut self, what: &str) -> Result<Tok<'a>, ParseError> {
        if self.pos >= self.toks.len() {
            return self.err(self.eol_col, format!("expected {what}"));
        }
        self.pos += 1;
        Ok(self.toks[self.pos - 1])
    }

    fn peek(&self) -> Option<&Tok<'a>> {
        self.toks.get(self.pos)
    }

    fn nat(&mut self, what: &str) -> Result<(u32, usize), ParseError> {
        let t = self.next(what)?;
        let (text, col) = (t.text, t.col);
        match text.parse::<u32>() {
            Ok(v) => Ok((v, col)),
            Err(_) => self.err(col, format!("expected {what}, found `{text}`")),
        }
    }

    fn done(&self) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) => self.err(t.col, format!("unexpected `{}`", t.text)),
            None => Ok(()),
        }
    }
}

struct PendingTrans<'a> {
    line: usize,
    src: (&'a str, usize),
    dst: (&'a str, usize),
    op: PendingOp<'a>,
    label: Option<&'a str>,
    guards: Vec<Vec<Atom>>,
    resets: Vec<usize>,
}

enum PendingOp<'a> {
    Nop,
    Push(usize, &'a str),
    Pop(usize, &'a str, AgeInterval),
}

fn parse_atom(p: &Parser<'_>, s: &str, col: usize, clocks: usize) -> Result<Atom, ParseError> {
    let (lhs, cmp, rhs) = if let Some(i) = s.find("<=") {
        (&s[..i], Cmp::Le, &s[i + 2..])
    } else if let Some(i) = s.find(">=") {
        (&s[..i], Cmp::Ge, &s[i + 2..])
    } else {
        return p.err(col, format!("malformed guard atom `{s}`"));
    };
    let clock = parse_clock(p, lhs, col, clocks)?;
    let bound = match rhs.parse::<u32>() {
        Ok(b) => b,
        Err(_) => return p.err(col, format!("malformed guard bound in `{s}`")),
    };
    Ok(Atom { clock, cmp, bound })
}

fn parse_clock(p: &Parser<'_>, s: &str, col: usize, clocks: usize) -> Result<usize, ParseError> {
    let digits = s.strip_prefix('x').unwrap_or(s);
    match digits.parse::<usize>() {
        Ok(i) if i >= 1 && i <= clocks => Ok(i - 1),
        Ok(i) => p.err(col, format!("undeclared clock {i}")),
        Err(_) => p.err(col, format!("malformed clock `{s}`")),
    }
}

pub fn parse_model(text: &str) -> Result<Model, ParseError> {
    let mut kind = None;
    let mut stacks: Option<usize> = None;
    let mut clocks = 0usize;
    let mut locations: Vec<(&str, usize, usize)> = Vec::new();
    let mut initial: Option<(&str, usize, usize)> = None;
    let mut finals: Vec<(&str, usize, usize)> = Vec::new();
    let mut trans: Vec<PendingTrans<'_>> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        let mut p = Parser { line: ln + 1, toks, pos: 0, eol_col: raw.trim_end().len() + 1 };
        let kw = p.next("statement")?;
        let (kw, kw_col) = (kw.text, kw.col);
        if kind.is_none() && kw != "model" {
            return p.err(kw_col, "the first statement must be `model`");
        }
        match kw {
            "model" => {
                if kind.is_some() {
                    return p.err(kw_col, "duplicate `model` statement");
                }
                let t = p.next("mpda or tmpda")?;
                kind = Some(match t.text {
                    "mpda" => Kind::Untimed,
                    "tmpda" => Kind::Timed,
                    other => return p.err(t.col, format!("unknown model kind `{other}`")),
                });
            }
            "stacks" => {
                let (n, col) = p.nat("stack count")?;
                if n == 0 {
                    return p.err(col, "at least one stack is required");
                }
                stacks = Some(n as usize);
            }
            "clocks" => {
                let (n, col) = p.nat("clock count")?;
                if kind == Some(Kind::Untimed) && n > 0 {
                    return p.err(col, "clocks require `model tmpda`");
                }
                clocks = n as usize;
            }
            "locations" => {
                while let Some(t) = p.peek() {
                    if locations.iter().any(|l| l.0 == t.text) {
                        return p.err(t.col, format!("duplicate location `{}`", t.text));
                    }
                    locations.push((t.text, p.line, t.col));
                    p.pos += 1;
                }
            }
            "initial" => {
                let t = p.next("initial location")?;
                initial = Some((t.text, p.line, t.col));
            }
            "final" => {
                while let Some(t) = p.peek() {
                    finals.push((t.text, p.line, t.col));
                    p.pos += 1;
                }
            }
            "trans" => {
                let n_stacks = match stacks {
                    Some(n) => n,
                    None => return p.err(kw_col, "`stacks` must precede transitions"),
                };
                let timed = kind == Some(Kind::Timed);
                let src = p.next("source location")?;
                let src = (src.text, src.col);
                let dst = p.next("target location")?;
                let dst = (dst.text, dst.col);
                let opt = p.next("nop, push or pop")?;
                let (optext, opcol) = (opt.text, opt.col);
                let op = match optext {
                    "nop" => PendingOp::Nop,
                    "push" | "pop" => {
                        let (s, scol) = p.nat("stack index")?;
                        if s == 0 || s as usize > n_stacks {
                            return p.err(scol, format!("stack index {s} out of range"));
                        }
                        let sym = p.next("stack symbol")?.text;
                        if optext == "push" {
                            PendingOp::Push(s as usize - 1, sym)
                        } else {
                            PendingOp::Pop(s as usize - 1, sym, AgeInterval::ANY)
                        }
                    }
                    other => return p.err(opcol, format!("unknown operation `{other}`")),
                };
                let mut pt = PendingTrans {
                    line: p.line,
                    src,
                    dst,
                    op,
                    label: None,
                    guards: vec![Vec::new()],
                    resets: Vec::new(),
                };
                while let Some(t) = p.peek() {
                    let (word, col) = (t.text, t.col);
                    p.pos += 1;
                    match word {
                        "age" => {
                            if !timed {
                                return p.err(col, "age intervals require `model tmpda`");
                            }
                            let (lo, _) = p.nat("age lower bound")?;
                            let h = p.next("age upper bound")?;
                            let (htext, hcol) = (h.text, h.col);
                            let hi = if htext == "inf" {
                                None
                            } else {
                                match htext.parse::<u32>() {
                                    Ok(v) => Some(v),
                                    Err(_) => return p.err(hcol, format!("expected age upper bound, found `{htext}`")),
                                }
                            };
                            if matches!(hi, Some(h) if h < lo) {
                                return p.err(hcol, format!("malformed interval: {lo} > {}", hi.unwrap()));
                            }
                            match &mut pt.op {
                                PendingOp::Pop(_, _, age) => *age = AgeInterval::new(lo, hi),
                                _ => return p.err(col, "age interval on a non-pop transition"),
                            }
                        }
                        "label" => pt.label = Some(p.next("label")?.text),
                        "guard" => {
                            if !timed {
                                return p.err(col, "guards require `model tmpda`");
                            }
                            let g = p.next("guard")?;
                            let (gtext, gcol) = (g.text, g.col);
                            let mut disj = Vec::new();
                            for d in gtext.split('|') {
                                let mut conj = Vec::new();
                                for a in d.split('&') {
                                    if a == "true" {
                                        continue;
                                    }
                                    conj.push(parse_atom(&p, a, gcol, clocks)?);
                                }
                                disj.push(conj);
                            }
                            pt.guards = disj;
                        }
                        "reset" => {
                            if !timed {
                                return p.err(col, "resets require `model tmpda`");
                            }
                            let r = p.next("reset list")?;
                            let (rtext, rcol) = (r.text, r.col);
                            for c in rtext.split(',') {
                                pt.resets.push(parse_clock(&p, c, rcol, clocks)?);
                            }
                        }
                        other => return p.err(col, format!("unexpected `{other}`")),
                    }
                }
                trans.push(pt);
            }
            other => return p.err(kw_col, format!("unknown statement `{other}`")),
        }
        p.done()?;
    }

    let kind = kind.ok_or(ParseError { line: 1, col: 1, msg: "missing `model` statement".into() })?;
    let n_stacks = stacks.ok_or(ParseError { line: 1, col: 1, msg: "missing `stacks` statement".into() })?;
    let mut b = Builder::new(kind, n_stacks, clocks);
    let mut index = FxHashMap::default();
    for (name, _, _) in &locations {
        index.insert(*name, b.loc(name));
    }
    let lookup = |name: &str, line: usize, col: usize| {
        index.get(name).copied().ok_or_else(|| ParseError {
            line,
            col,
            msg: format!("undeclared location `{name}`"),
        })
    };
    match initial {
        Some((name, line, col)) => {
            b.initial(lookup(name, line, col)?);
        }
        None => return Err(ParseError { line: 1, col: 1, msg: "missing `initial` statement".into() }),
    }
    for (name, line, col) in finals {
        b.accept(lookup(name, line, col)?);
    }
    for pt in trans {
        let src = lookup(pt.src.0, pt.line, pt.src.1)?;
        let dst = lookup(pt.dst.0, pt.line, pt.dst.1)?;
        for conj in &pt.guards {
            let op = match pt.op {
                PendingOp::Nop => OpSpec::Nop,
                PendingOp::Push(s, sym) => OpSpec::Push(s, sym),
                PendingOp::Pop(s, sym, age) => OpSpec::Pop(s, sym, age),
            };
            let t = b.trans(src, dst, op);
            if let Some(l) = pt.label {
                b.label(t, l);
            }
            b.guard(t, conj);
            b.reset(t, &pt.resets);
        }
    }
    let m = b.build();
    if let Some(d) = validate_model(&m).into_iter().next() {
        return Err(ParseError { line: 0, col: 0, msg: d.to_string() });
    }
    Ok(m)
}

pub fn serialize_model(m: &Model) -> String {
    let mut s = String::new();
    let timed = m.is_timed();
    let _ = writeln!(s, "model {}", if timed { "tmpda" } else { "mpda" });
    let _ = writeln!(s, "stacks {}", m.n_stacks);
    if timed {
        let _ = writeln!(s, "clocks {}", m.n_clocks);
    }
    s.push_str("locations");
    for l in &m.locations {
        s.push(' ');
        s.push_str(l);
    }
    s.push('\n');
    let _ = writeln!(s, "initial {}", m.locations[m.initial]);
    s.push_str("final");
    for &f in &m.finals {
        s.push(' ');
        s.push_str(&m.locations[f]);
    }
    s.push('\n');
    for t in &m.transitions {
        let _ = write!(s, "trans {} {}", m.locations[t.src], m.locations[t.dst]);
        match t.op {
            StackOp::Nop => s.push_str(" nop"),
            StackOp::Push { stack, sym } => {
                let _ = write!(s, " push {} {}", stack + 1, m.stack_alphabet[sym]);
            }
            StackOp::Pop { stack, sym, age } => {
                let _ = write!(s, " pop {} {}", stack + 1, m.stack_alphabet[sym]);
                if timed {
                    match age.hi {
                        Some(h) => {
                            let _ = write!(s, " age {} {}", age.lo, h);
                        }
                        None => {
                            let _ = write!(s, " age {} inf", age.lo);
                        }
                    }
                }
            }
        }
        if let Some(l) = t.label {
            let _ = write!(s, " label {}", m.input_alphabet[l]);
        }
        if !t.guard.atoms.is_empty() {
            s.push_str(" guard ");
            for (i, a) in t.guard.atoms.iter().enumerate() {
                if i > 0 {
                    s.push('&');
                }
                let op = if a.cmp == Cmp::Le { "<=" } else { ">=" };
                let _ = write!(s, "x{}{}{}", a.clock + 1, op, a.bound);
            }
        }
        if !t.resets.is_empty() {
            s.push_str(" reset ");
            let r: Vec<String> = t.resets.iter().map(|c| (c + 1).to_string()).collect();
            s.push_str(&r.join(","));
        }
        s.push('\n');
    }
    s
}
