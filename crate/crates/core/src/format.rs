//! Plain-text serialization of automata and Graphviz DOT export.
//!
//! All three formats are line oriented. `#` starts a comment, blank lines are
//! ignored, and the first line names the format and its version.
//!
//! ```text
//! leastper-dfa 1          leastper-nfa 1           leastper-dfao 1
//! base 2                  base 2                   base 2
//! order lsd               order lsd                outputs 0 1
//! tracks n                tracks n                 start 0
//! states 2                states 2                 states 2
//! start 0                 start 0 1                0 0: 0 1
//! accept 1                accept 1                 1 1: 1 0
//! 0: 0 1                  0 1: 0 1
//! 1: 1 1                  1 0: 1
//! ```
//!
//! A DFA state line lists one successor per letter, letters in ascending index
//! order (track 0 varies fastest). An NFA line `q l: s...` gives the successor
//! set of state `q` on letter `l`; omitted pairs have no successors. A DFAO line
//! is `id output: succ_0 ... succ_{k-1}`.

use std::fmt::Write as _;

use crate::alphabet::{DigitOrder, TrackAlphabet};
use crate::dfa::{Dfa, StateId};
use crate::dfao::Dfao;
use crate::error::{Error, Result};
use crate::nfa::Nfa;

const DFA_MAGIC: &str = "leastper-dfa";
const NFA_MAGIC: &str = "leastper-nfa";
const DFAO_MAGIC: &str = "leastper-dfao";
const VERSION: &str = "1";

pub fn save_dfa(a: &Dfa) -> String {
    let mut out = String::new();
    writeln!(out, "{DFA_MAGIC} {VERSION}").unwrap();
    writeln!(out, "base {}", a.base()).unwrap();
    writeln!(out, "order {}", a.order()).unwrap();
    writeln!(out, "{}", keyed("tracks", a.tracks())).unwrap();
    writeln!(out, "states {}", a.state_count()).unwrap();
    writeln!(out, "start {}", a.start()).unwrap();
    let accepting: Vec<usize> = (0..a.state_count())
        .filter(|&q| a.is_accepting(q as StateId))
        .collect();
    writeln!(out, "{}", keyed("accept", &accepting)).unwrap();
    for q in 0..a.state_count() as StateId {
        let succ: Vec<StateId> = (0..a.letter_count()).map(|l| a.next(q, l)).collect();
        writeln!(out, "{q}: {}", join(&succ)).unwrap();
    }
    out
}

pub fn load_dfa(text: &str) -> Result<Dfa> {
    let mut lines = Lines::new(text);
    lines.header(DFA_MAGIC)?;
    let base = lines.field("base")?.parse_one::<u32>()?;
    let order = lines.field("order")?.parse_order()?;
    let tracks = lines.field("tracks")?.words();
    let states = lines.field("states")?.parse_one::<usize>()?;
    let start = lines.field("start")?.parse_one::<StateId>()?;
    let accept_line = lines.field("accept")?;
    let accept_ids = accept_line.parse_all::<usize>()?;
    let letters = TrackAlphabet::new(base, tracks.len())
        .map_err(|e| lines.error(e.to_string()))?
        .letter_count();
    let mut accepting = vec![false; states];
    for q in accept_ids {
        if q >= states {
            return Err(accept_line.error(format!("accepting state {q} out of range")));
        }
        accepting[q] = true;
    }
    let mut delta = vec![StateId::MAX; states * letters];
    let mut seen = vec![false; states];
    while let Some(line) = lines.next_line() {
        let (id, rest) = line.split_label()?;
        let q: usize = line.parse_token(id)?;
        if q >= states {
            return Err(line.error(format!("state {q} out of range")));
        }
        if seen[q] {
            return Err(line.error(format!("state {q} listed twice")));
        }
        seen[q] = true;
        let succ = line.parse_tokens::<StateId>(rest)?;
        if succ.len() != letters {
            return Err(line.error(format!(
                "state {q} has {} transitions, expected {letters}",
                succ.len()
            )));
        }
        delta[q * letters..(q + 1) * letters].copy_from_slice(&succ);
    }
    if let Some(q) = seen.iter().position(|s| !s) {
        return Err(lines.error(format!("missing transitions for state {q}")));
    }
    Dfa::new(base, tracks, order, start, accepting, delta).map_err(|e| lines.error(e.to_string()))
}

pub fn save_nfa(a: &Nfa) -> String {
    let mut out = String::new();
    writeln!(out, "{NFA_MAGIC} {VERSION}").unwrap();
    writeln!(out, "base {}", a.base()).unwrap();
    writeln!(out, "order {}", a.order()).unwrap();
    writeln!(out, "{}", keyed("tracks", a.tracks())).unwrap();
    writeln!(out, "states {}", a.state_count()).unwrap();
    writeln!(out, "{}", keyed("start", a.starts())).unwrap();
    let accepting: Vec<usize> = (0..a.state_count())
        .filter(|&q| a.is_accepting(q as StateId))
        .collect();
    writeln!(out, "{}", keyed("accept", &accepting)).unwrap();
    for q in 0..a.state_count() as StateId {
        for l in 0..a.letter_count() {
            let succ = a.successors(q, l);
            if !succ.is_empty() {
                writeln!(out, "{q} {l}: {}", join(succ)).unwrap();
            }
        }
    }
    out
}

pub fn load_nfa(text: &str) -> Result<Nfa> {
    let mut lines = Lines::new(text);
    lines.header(NFA_MAGIC)?;
    let base = lines.field("base")?.parse_one::<u32>()?;
    let order = lines.field("order")?.parse_order()?;
    let tracks = lines.field("tracks")?.words();
    let states = lines.field("states")?.parse_one::<usize>()?;
    let starts = lines.field("start")?.parse_all::<StateId>()?;
    let accept_line = lines.field("accept")?;
    let accept_ids = accept_line.parse_all::<usize>()?;
    let letters = TrackAlphabet::new(base, tracks.len())
        .map_err(|e| lines.error(e.to_string()))?
        .letter_count();
    let mut accepting = vec![false; states];
    for q in accept_ids {
        if q >= states {
            return Err(accept_line.error(format!("accepting state {q} out of range")));
        }
        accepting[q] = true;
    }
    let mut delta = vec![Vec::new(); states * letters];
    while let Some(line) = lines.next_line() {
        let (label, rest) = line.split_label()?;
        let head = line.parse_tokens::<usize>(label)?;
        let [q, l] = head[..] else {
            return Err(line.error("expected `state letter:`".into()));
        };
        if q >= states || l >= letters {
            return Err(line.error(format!("transition ({q}, {l}) out of range")));
        }
        delta[q * letters + l] = line.parse_tokens::<StateId>(rest)?;
    }
    Nfa::new(base, tracks, order, starts, accepting, delta).map_err(|e| lines.error(e.to_string()))
}

pub fn save_dfao(a: &Dfao) -> String {
    let mut out = String::new();
    writeln!(out, "{DFAO_MAGIC} {VERSION}").unwrap();
    writeln!(out, "base {}", a.base()).unwrap();
    writeln!(out, "{}", keyed("outputs", &a.output_alphabet())).unwrap();
    writeln!(out, "start {}", a.start()).unwrap();
    writeln!(out, "states {}", a.state_count()).unwrap();
    for q in 0..a.state_count() as StateId {
        let succ: Vec<StateId> = (0..a.base()).map(|d| a.next(q, d)).collect();
        writeln!(out, "{q} {}: {}", a.output(q), join(&succ)).unwrap();
    }
    out
}

/// Parses a DFAO file and validates zero-stability.
pub fn load_dfao(text: &str) -> Result<Dfao> {
    let mut lines = Lines::new(text);
    lines.header(DFAO_MAGIC)?;
    let base = lines.field("base")?.parse_one::<u32>()?;
    let alphabet = lines.field("outputs")?.parse_all::<u32>()?;
    let start = lines.field("start")?.parse_one::<StateId>()?;
    let states = lines.field("states")?.parse_one::<usize>()?;
    let k = base as usize;
    let mut outputs = vec![0u32; states];
    let mut delta = vec![StateId::MAX; states * k];
    let mut seen = vec![false; states];
    while let Some(line) = lines.next_line() {
        let (label, rest) = line.split_label()?;
        let head = line.parse_tokens::<u64>(label)?;
        let [q, out] = head[..] else {
            return Err(line.error("expected `state output:`".into()));
        };
        let q = q as usize;
        if q >= states {
            return Err(line.error(format!("state {q} out of range")));
        }
        if seen[q] {
            return Err(line.error(format!("state {q} listed twice")));
        }
        let out = u32::try_from(out).map_err(|_| line.error("output too large".into()))?;
        if !alphabet.contains(&out) {
            return Err(line.error(format!("output {out} not in the declared alphabet")));
        }
        let succ = line.parse_tokens::<StateId>(rest)?;
        if succ.len() != k {
            return Err(line.error(format!(
                "state {q} has {} transitions, expected {k}",
                succ.len()
            )));
        }
        seen[q] = true;
        outputs[q] = out;
        delta[q * k..(q + 1) * k].copy_from_slice(&succ);
    }
    if let Some(q) = seen.iter().position(|s| !s) {
        return Err(lines.error(format!("missing transitions for state {q}")));
    }
    match Dfao::new(base, start, outputs, delta) {
        Err(e @ Error::ZeroStability { .. }) => Err(e),
        other => other.map_err(|e| lines.error(e.to_string())),
    }
}

fn letter_label(alphabet: &TrackAlphabet, letter: usize) -> String {
    let digits = alphabet.digits(letter);
    match digits.len() {
        0 => "()".to_string(),
        1 => digits[0].to_string(),
        _ => format!("({})", join_with(&digits, ",")),
    }
}

/// DOT rendering; accepting states are double circles and parallel edges are
/// merged into one edge listing every digit tuple.
pub fn dfa_to_dot(a: &Dfa, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{name}\" {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(
        out,
        "  label=\"tracks: {} ({})\";",
        join_with(a.tracks(), ","),
        a.order()
    )
    .unwrap();
    writeln!(out, "  __start [shape=point];").unwrap();
    for q in 0..a.state_count() as StateId {
        let shape = if a.is_accepting(q) {
            "doublecircle"
        } else {
            "circle"
        };
        writeln!(out, "  {q} [shape={shape}];").unwrap();
    }
    writeln!(out, "  __start -> {};", a.start()).unwrap();
    let alphabet = a.alphabet();
    for q in 0..a.state_count() as StateId {
        let mut targets: Vec<(StateId, Vec<String>)> = Vec::new();
        for l in 0..a.letter_count() {
            let r = a.next(q, l);
            let label = letter_label(&alphabet, l);
            match targets.iter_mut().find(|(t, _)| *t == r) {
                Some((_, labels)) => labels.push(label),
                None => targets.push((r, vec![label])),
            }
        }
        for (r, labels) in targets {
            writeln!(out, "  {q} -> {r} [label=\"{}\"];", labels.join(" ")).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// DOT rendering of a DFAO; nodes are labelled `state/output`.
pub fn dfao_to_dot(a: &Dfao, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{name}\" {{").unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  __start [shape=point];").unwrap();
    for q in 0..a.state_count() as StateId {
        writeln!(out, "  {q} [shape=circle,label=\"{q}/{}\"];", a.output(q)).unwrap();
    }
    writeln!(out, "  __start -> {};", a.start()).unwrap();
    for q in 0..a.state_count() as StateId {
        let mut targets: Vec<(StateId, Vec<String>)> = Vec::new();
        for d in 0..a.base() {
            let r = a.next(q, d);
            match targets.iter_mut().find(|(t, _)| *t == r) {
                Some((_, labels)) => labels.push(d.to_string()),
                None => targets.push((r, vec![d.to_string()])),
            }
        }
        for (r, labels) in targets {
            writeln!(out, "  {q} -> {r} [label=\"{}\"];", labels.join(",")).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn join<T: ToString>(items: &[T]) -> String {
    join_with(items, " ")
}

fn join_with<T: ToString>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

fn keyed<T: ToString>(key: &str, items: &[T]) -> String {
    if items.is_empty() {
        key.to_string()
    } else {
        format!("{key} {}", join(items))
    }
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn error(&self, message: String) -> Error {
        Error::Format {
            line: self.number,
            message,
        }
    }

    fn rest(&self) -> &'a str {
        self.text
            .split_once(char::is_whitespace)
            .map_or("", |(_, r)| r.trim())
    }

    fn words(&self) -> Vec<String> {
        self.rest().split_whitespace().map(str::to_string).collect()
    }

    fn parse_token<T: std::str::FromStr>(&self, token: &str) -> Result<T> {
        token
            .trim()
            .parse()
            .map_err(|_| self.error(format!("expected a number, found `{}`", token.trim())))
    }

    fn parse_tokens<T: std::str::FromStr>(&self, text: &str) -> Result<Vec<T>> {
        text.split_whitespace()
            .map(|t| self.parse_token(t))
            .collect()
    }

    fn parse_one<T: std::str::FromStr>(&self) -> Result<T> {
        let values = self.parse_all::<T>()?;
        match values.len() {
            1 => Ok(values.into_iter().next().unwrap()),
            n => Err(self.error(format!("expected one value, found {n}"))),
        }
    }

    fn parse_all<T: std::str::FromStr>(&self) -> Result<Vec<T>> {
        self.parse_tokens(self.rest())
    }

    fn parse_order(&self) -> Result<DigitOrder> {
        self.rest()
            .parse()
            .map_err(|_| self.error(format!("unknown digit order `{}`", self.rest())))
    }

    fn split_label(&self) -> Result<(&'a str, &'a str)> {
        self.text
            .split_once(':')
            .ok_or_else(|| self.error("expected `:`".into()))
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    fn next_line(&mut self) -> Option<Line<'a>> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if !text.is_empty() {
                return Some(Line {
                    number: i + 1,
                    text,
                });
            }
        }
        None
    }

    fn error(&self, message: String) -> Error {
        Error::Format {
            line: self.last,
            message,
        }
    }

    fn header(&mut self, magic: &str) -> Result<()> {
        let line = self
            .next_line()
            .ok_or_else(|| self.error("empty file".into()))?;
        let mut words = line.text.split_whitespace();
        if words.next() != Some(magic) {
            return Err(line.error(format!("expected header `{magic} {VERSION}`")));
        }
        match words.next() {
            Some(VERSION) => Ok(()),
            other => Err(line.error(format!("unsupported version {}", other.unwrap_or("(none)")))),
        }
    }

    fn field(&mut self, key: &str) -> Result<Line<'a>> {
        let line = self
            .next_line()
            .ok_or_else(|| self.error(format!("missing `{key}` line")))?;
        if line.text.split_whitespace().next() != Some(key) {
            return Err(line.error(format!("expected `{key}`")));
        }
        Ok(line)
    }
}
