//! Complete deterministic automata over multi-track digit alphabets.

use std::collections::{HashMap, VecDeque};

use crate::alphabet::{DigitOrder, Letter, TrackAlphabet};
use crate::error::{Error, Result};
use crate::numeration;

pub type StateId = u32;

/// Binary Boolean connective used by [`Dfa::product`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
    Xor,
    Implies,
    Iff,
}

impl BoolOp {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            BoolOp::And => a && b,
            BoolOp::Or => a || b,
            BoolOp::Xor => a != b,
            BoolOp::Implies => !a || b,
            BoolOp::Iff => a == b,
        }
    }
}

/// A complete DFA whose letters are tuples of base-k digits, one per named track.
///
/// Every constructor checks completeness: `delta` holds exactly one successor for
/// each `(state, letter)` pair, stored row-major by state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    alphabet: TrackAlphabet,
    tracks: Vec<String>,
    order: DigitOrder,
    start: StateId,
    accepting: Vec<bool>,
    delta: Vec<StateId>,
}

impl Dfa {
    pub fn new(
        base: u32,
        tracks: Vec<String>,
        order: DigitOrder,
        start: StateId,
        accepting: Vec<bool>,
        delta: Vec<StateId>,
    ) -> Result<Self> {
        let alphabet = TrackAlphabet::new(base, tracks.len())?;
        check_distinct(&tracks)?;
        let states = accepting.len();
        if states == 0 {
            return Err(Error::Invalid("automaton has no states".into()));
        }
        if start as usize >= states {
            return Err(Error::Invalid(format!("start state {start} out of range")));
        }
        if delta.len() != states * alphabet.letter_count() {
            return Err(Error::Invalid(format!(
                "transition table has {} entries, expected {}",
                delta.len(),
                states * alphabet.letter_count()
            )));
        }
        if let Some(bad) = delta.iter().find(|&&q| q as usize >= states) {
            return Err(Error::Invalid(format!("transition to unknown state {bad}")));
        }
        Ok(Self {
            alphabet,
            tracks,
            order,
            start,
            accepting,
            delta,
        })
    }

    /// Builds an automaton from a successor function; `states` is the state count.
    pub fn from_fn(
        base: u32,
        tracks: Vec<String>,
        states: usize,
        start: StateId,
        accept: impl Fn(StateId) -> bool,
        next: impl Fn(StateId, &[u32]) -> StateId,
    ) -> Result<Self> {
        let alphabet = TrackAlphabet::new(base, tracks.len())?;
        let letters: Vec<Vec<u32>> = alphabet.letters().map(|l| alphabet.digits(l)).collect();
        let mut delta = Vec::with_capacity(states * letters.len());
        for q in 0..states as StateId {
            for digits in &letters {
                delta.push(next(q, digits));
            }
        }
        let accepting = (0..states as StateId).map(accept).collect();
        Self::new(base, tracks, DigitOrder::Lsd, start, accepting, delta)
    }

    /// One-state automaton accepting everything (or nothing).
    pub fn constant(base: u32, tracks: Vec<String>, value: bool) -> Result<Self> {
        let letters = TrackAlphabet::new(base, tracks.len())?.letter_count();
        Self::new(
            base,
            tracks,
            DigitOrder::Lsd,
            0,
            vec![value],
            vec![0; letters],
        )
    }

    pub fn universal(base: u32, tracks: Vec<String>) -> Result<Self> {
        Self::constant(base, tracks, true)
    }

    pub fn empty(base: u32, tracks: Vec<String>) -> Result<Self> {
        Self::constant(base, tracks, false)
    }

    pub fn alphabet(&self) -> TrackAlphabet {
        self.alphabet
    }

    pub fn base(&self) -> u32 {
        self.alphabet.base()
    }

    pub fn arity(&self) -> usize {
        self.alphabet.arity()
    }

    pub fn tracks(&self) -> &[String] {
        &self.tracks
    }

    pub fn order(&self) -> DigitOrder {
        self.order
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn letter_count(&self) -> usize {
        self.alphabet.letter_count()
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q as usize]
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    #[inline]
    pub fn next(&self, q: StateId, letter: Letter) -> StateId {
        self.delta[q as usize * self.letter_count() + letter]
    }

    pub fn transitions(&self) -> &[StateId] {
        &self.delta
    }

    pub(crate) fn with_order(mut self, order: DigitOrder) -> Self {
        self.order = order;
        self
    }

    pub(crate) fn require_lsd(&self) -> Result<()> {
        match self.order {
            DigitOrder::Lsd => Ok(()),
            DigitOrder::Msd => Err(Error::WrongOrder { expected: "lsd" }),
        }
    }

    pub fn track_index(&self, name: &str) -> Option<usize> {
        self.tracks.iter().position(|t| t == name)
    }

    /// Runs the automaton on a letter word and reports acceptance.
    pub fn accepts_word(&self, word: &[Letter]) -> bool {
        let end = word.iter().fold(self.start, |q, &l| self.next(q, l));
        self.is_accepting(end)
    }

    /// Membership of a tuple of naturals (one per track, in track order).
    ///
    /// The tuple is encoded at its minimal common length (at least one column
    /// when the arity is positive).
    pub fn run(&self, values: &[u64]) -> Result<bool> {
        self.run_padded(values, 0)
    }

    /// As [`Dfa::run`], with `extra` additional padding columns.
    pub fn run_padded(&self, values: &[u64], extra: usize) -> Result<bool> {
        if values.len() != self.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                got: values.len(),
            });
        }
        let minimal = numeration::minimal_length(values, self.base());
        let len = if self.arity() == 0 {
            0
        } else {
            minimal.max(1) + extra
        };
        let word = numeration::encode(values, self.base(), Some(len))?;
        let mut letters = word.letters();
        if self.order == DigitOrder::Msd {
            letters.reverse();
        }
        Ok(self.accepts_word(&letters))
    }

    /// Flips acceptance; the result is padding-normalized again.
    pub fn complement(&self) -> Dfa {
        let mut out = self.clone();
        for a in &mut out.accepting {
            *a = !*a;
        }
        out.pad_normalize()
    }

    /// Synchronous product under `op`, after aligning both operands on the
    /// sorted union of their tracks.
    pub fn product(&self, other: &Dfa, op: BoolOp) -> Result<Dfa> {
        if self.base() != other.base() {
            return Err(Error::IncompatibleBase(self.base(), other.base()));
        }
        if self.order != other.order {
            return Err(Error::IncompatibleOrder(
                self.order.as_str(),
                other.order.as_str(),
            ));
        }
        let mut union: Vec<String> = self.tracks.iter().chain(&other.tracks).cloned().collect();
        union.sort();
        union.dedup();
        let a = self.cylindrify(&union)?;
        let b = other.cylindrify(&union)?;
        Ok(pair_product(&a, &b, op))
    }

    /// Extends (and reorders) the automaton to `new_tracks`, ignoring tracks it
    /// did not have.
    pub fn cylindrify(&self, new_tracks: &[String]) -> Result<Dfa> {
        check_distinct(new_tracks)?;
        let map = self
            .tracks
            .iter()
            .map(|t| {
                new_tracks
                    .iter()
                    .position(|n| n == t)
                    .ok_or_else(|| Error::UnknownTrack(t.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.relabel(new_tracks.to_vec(), &map))
    }

    /// Renames tracks. Tracks renamed to the same name are identified (the
    /// result only reads words where they carry equal digits). The result's
    /// tracks are sorted.
    pub fn rename_tracks(&self, renames: &HashMap<String, String>) -> Result<Dfa> {
        let targets: Vec<String> = self
            .tracks
            .iter()
            .map(|t| renames.get(t).unwrap_or(t).clone())
            .collect();
        let mut new_tracks = targets.clone();
        new_tracks.sort();
        new_tracks.dedup();
        let map: Vec<usize> = targets
            .iter()
            .map(|t| {
                new_tracks
                    .iter()
                    .position(|n| n == t)
                    .expect("target present")
            })
            .collect();
        Ok(self.relabel(new_tracks, &map))
    }

    /// Reorders tracks into sorted order.
    pub fn with_sorted_tracks(&self) -> Dfa {
        let mut sorted = self.tracks.clone();
        sorted.sort();
        if sorted == self.tracks {
            return self.clone();
        }
        self.cylindrify(&sorted).expect("permutation of own tracks")
    }

    /// `map[i]` is the new position of old track `i`; new positions outside the
    /// image are free tracks, repeated positions identify tracks.
    fn relabel(&self, new_tracks: Vec<String>, map: &[usize]) -> Dfa {
        let new_alpha =
            TrackAlphabet::new(self.base(), new_tracks.len()).expect("base already validated");
        let table: Vec<Letter> = new_alpha
            .letters()
            .map(|l| {
                let digits: Vec<u32> = map.iter().map(|&p| new_alpha.digit(l, p)).collect();
                self.alphabet.letter(&digits)
            })
            .collect();
        let m = self.letter_count();
        let mut delta = Vec::with_capacity(self.state_count() * table.len());
        for q in 0..self.state_count() {
            let row = &self.delta[q * m..(q + 1) * m];
            delta.extend(table.iter().map(|&old| row[old]));
        }
        Dfa {
            alphabet: new_alpha,
            tracks: new_tracks,
            order: self.order,
            start: self.start,
            accepting: self.accepting.clone(),
            delta,
        }
    }

    /// States reachable from the start, in BFS order over ascending letters.
    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.state_count()];
        let mut order = vec![self.start];
        seen[self.start as usize] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for l in 0..self.letter_count() {
                let r = self.next(q, l);
                if !seen[r as usize] {
                    seen[r as usize] = true;
                    order.push(r);
                }
            }
        }
        order
    }

    pub fn is_empty(&self) -> bool {
        self.reachable().iter().all(|&q| !self.is_accepting(q))
    }

    pub fn is_universal(&self) -> bool {
        self.reachable().iter().all(|&q| self.is_accepting(q))
    }

    /// Makes membership of a tuple independent of how many padding columns
    /// follow its encoding.
    ///
    /// A state becomes accepting when an accepting state is reachable through
    /// all-zero columns; a second component remembers whether such a state was
    /// passed since the last nonzero column, so that extra zero columns never
    /// lose acceptance.
    pub fn pad_normalize(&self) -> Dfa {
        if self.order == DigitOrder::Msd {
            let lsd = crate::nfa::reverse(self)
                .determinize()
                .with_order(DigitOrder::Lsd);
            let normal = lsd.pad_normalize();
            return crate::nfa::reverse(&normal)
                .determinize()
                .with_order(DigitOrder::Msd);
        }
        let closed = self.zero_closure();
        let m = self.letter_count();
        let mut index: HashMap<(StateId, bool), StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut accepting = Vec::new();
        let mut delta = Vec::new();
        let start = (self.start, closed[self.start as usize]);
        index.insert(start, 0);
        queue.push_back(start);
        accepting.push(start.1);
        while let Some((q, seen)) = queue.pop_front() {
            for l in 0..m {
                let r = self.next(q, l);
                let flag = if l == 0 {
                    seen || closed[r as usize]
                } else {
                    closed[r as usize]
                };
                let key = (r, flag);
                let id = *index.entry(key).or_insert_with(|| {
                    queue.push_back(key);
                    accepting.push(flag);
                    (accepting.len() - 1) as StateId
                });
                delta.push(id);
            }
        }
        Dfa {
            alphabet: self.alphabet,
            tracks: self.tracks.clone(),
            order: self.order,
            start: 0,
            accepting,
            delta,
        }
    }

    /// `closure[q]`: an accepting state is reachable from `q` via all-zero columns.
    pub(crate) fn zero_closure(&self) -> Vec<bool> {
        let n = self.state_count();
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for q in 0..n as StateId {
            preds[self.next(q, 0) as usize].push(q);
        }
        let mut closed = self.accepting.clone();
        let mut stack: Vec<StateId> = (0..n as StateId).filter(|&q| closed[q as usize]).collect();
        while let Some(q) = stack.pop() {
            for &p in &preds[q as usize] {
                if !closed[p as usize] {
                    closed[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        closed
    }

    /// Language equality. Track sets must agree (order may differ).
    pub fn equivalent(&self, other: &Dfa) -> Result<bool> {
        if self.base() != other.base() {
            return Err(Error::IncompatibleBase(self.base(), other.base()));
        }
        let mut a = self.tracks.clone();
        let mut b = other.tracks.clone();
        a.sort();
        b.sort();
        if a != b {
            return Err(Error::TrackMismatch(
                self.tracks.clone(),
                other.tracks.clone(),
            ));
        }
        if self.order != other.order {
            return Err(Error::IncompatibleOrder(
                self.order.as_str(),
                other.order.as_str(),
            ));
        }
        let other = other.cylindrify(&self.tracks)?;
        Ok(self.minimize() == other.minimize())
    }

    /// Whether an arity-1 automaton accepts infinitely many integers.
    ///
    /// Counts canonical encodings only (no padding zeros): the answer is yes iff
    /// some cycle lies on a path from the start to a nonzero final digit that
    /// ends in acceptance.
    pub fn is_infinite(&self) -> Result<bool> {
        if self.arity() != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                got: self.arity(),
            });
        }
        let n = self.state_count();
        let k = self.base() as usize;
        let mut succ: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for q in 0..n as StateId {
            for d in 0..k {
                succ[q as usize].push(self.next(q, d));
            }
        }
        // `sources`: states where a canonical word's free middle part may begin;
        // `targets`: states from which that middle part may end.
        let (sources, targets): (Vec<StateId>, Vec<StateId>) = match self.order {
            DigitOrder::Lsd => {
                let targets = (0..n as StateId)
                    .filter(|&q| (1..k).any(|d| self.is_accepting(self.next(q, d))))
                    .collect();
                (vec![self.start], targets)
            }
            DigitOrder::Msd => {
                let sources = (1..k).map(|d| self.next(self.start, d)).collect();
                let targets = (0..n as StateId)
                    .filter(|&q| self.is_accepting(q))
                    .collect();
                (sources, targets)
            }
        };
        let forward = reach(&succ, &sources);
        let mut pred: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (q, outs) in succ.iter().enumerate() {
            for &r in outs {
                pred[r as usize].push(q as StateId);
            }
        }
        let backward = reach(&pred, &targets);
        let live: Vec<bool> = (0..n).map(|q| forward[q] && backward[q]).collect();
        Ok(has_cycle(&succ, &live))
    }
}

fn check_distinct(tracks: &[String]) -> Result<()> {
    for (i, t) in tracks.iter().enumerate() {
        if tracks[..i].contains(t) {
            return Err(Error::DuplicateTrack(t.clone()));
        }
    }
    Ok(())
}

fn pair_product(a: &Dfa, b: &Dfa, op: BoolOp) -> Dfa {
    debug_assert_eq!(a.tracks, b.tracks);
    let m = a.letter_count();
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut pairs = vec![(a.start, b.start)];
    index.insert((a.start, b.start), 0);
    let mut delta = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        i += 1;
        for l in 0..m {
            let key = (a.next(p, l), b.next(q, l));
            let id = *index.entry(key).or_insert_with(|| {
                pairs.push(key);
                (pairs.len() - 1) as StateId
            });
            delta.push(id);
        }
    }
    let accepting = pairs
        .iter()
        .map(|&(p, q)| op.apply(a.is_accepting(p), b.is_accepting(q)))
        .collect();
    Dfa {
        alphabet: a.alphabet,
        tracks: a.tracks.clone(),
        order: a.order,
        start: 0,
        accepting,
        delta,
    }
}

fn reach(graph: &[Vec<StateId>], from: &[StateId]) -> Vec<bool> {
    let mut seen = vec![false; graph.len()];
    let mut stack = Vec::new();
    for &s in from {
        if !seen[s as usize] {
            seen[s as usize] = true;
            stack.push(s);
        }
    }
    while let Some(q) = stack.pop() {
        for &r in &graph[q as usize] {
            if !seen[r as usize] {
                seen[r as usize] = true;
                stack.push(r);
            }
        }
    }
    seen
}

/// Cycle detection on the subgraph induced by `live` (Kahn's algorithm).
fn has_cycle(succ: &[Vec<StateId>], live: &[bool]) -> bool {
    let n = succ.len();
    let mut indegree = vec![0usize; n];
    for q in (0..n).filter(|&q| live[q]) {
        for &r in &succ[q] {
            if live[r as usize] {
                indegree[r as usize] += 1;
            }
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&q| live[q] && indegree[q] == 0).collect();
    let mut removed = 0;
    while let Some(q) = stack.pop() {
        removed += 1;
        for &r in &succ[q] {
            let r = r as usize;
            if live[r] {
                indegree[r] -= 1;
                if indegree[r] == 0 {
                    stack.push(r);
                }
            }
        }
    }
    removed < live.iter().filter(|&&l| l).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeration::{add_automaton, const_automaton, eq_automaton, lt_automaton};

    fn names(ts: &[&str]) -> Vec<String> {
        ts.iter().map(|s| s.to_string()).collect()
    }

    fn evens() -> Dfa {
        // LSD: the first digit decides parity.
        Dfa::from_fn(
            2,
            names(&["n"]),
            3,
            0,
            |q| q == 1,
            |q, d| match q {
                0 if d[0] == 0 => 1,
                0 => 2,
                s => s,
            },
        )
        .unwrap()
        .pad_normalize()
        .minimize()
    }

    #[test]
    fn and_is_idempotent() {
        let e = evens();
        assert!(e.product(&e, BoolOp::And).unwrap().equivalent(&e).unwrap());
    }

    #[test]
    fn eq_and_lt_disjoint() {
        let eq = eq_automaton(2).unwrap();
        let lt = lt_automaton(2).unwrap();
        assert!(eq.product(&lt, BoolOp::And).unwrap().is_empty());
    }

    #[test]
    fn or_over_different_tracks() {
        let e = evens();
        let lt = lt_automaton(2)
            .unwrap()
            .rename_tracks(&HashMap::from([
                ("x".to_string(), "n".to_string()),
                ("y".to_string(), "i".to_string()),
            ]))
            .unwrap();
        let or = e.product(&lt, BoolOp::Or).unwrap();
        assert_eq!(or.tracks(), &names(&["i", "n"]));
        for n in 0..16u64 {
            for i in 0..16u64 {
                let expected = e.run(&[n]).unwrap() || lt.run(&[i, n]).unwrap();
                assert_eq!(or.run(&[i, n]).unwrap(), expected, "n={n} i={i}");
            }
        }
        assert!(or.run(&[5, 2]).unwrap());
    }

    #[test]
    fn complement_involution() {
        let lt = lt_automaton(2).unwrap();
        assert!(lt.complement().complement().equivalent(&lt).unwrap());
        assert!(!lt.complement().equivalent(&lt).unwrap());
        for x in 0..32u64 {
            for y in 0..32u64 {
                assert_eq!(lt.complement().run(&[x, y]).unwrap(), x >= y);
            }
        }
    }

    #[test]
    fn complement_of_empty_is_everything() {
        let empty = Dfa::empty(2, names(&["n"])).unwrap();
        let all = empty.complement();
        assert!(all.is_universal());
        assert!(all.run(&[0]).unwrap() && all.run(&[12345]).unwrap());
    }

    #[test]
    fn cylindrify_ignores_new_track() {
        let lt = lt_automaton(2).unwrap();
        let same = lt.cylindrify(&names(&["x", "y"])).unwrap();
        assert!(same.equivalent(&lt).unwrap());
        let wide = lt.cylindrify(&names(&["x", "y", "z"])).unwrap();
        assert!(wide.run(&[1, 2, 7]).unwrap());
        assert!(!wide.run(&[2, 1, 0]).unwrap());
    }

    #[test]
    fn cylindrify_rejects_missing_track() {
        let lt = lt_automaton(2).unwrap();
        assert_eq!(
            lt.cylindrify(&names(&["x", "z"])),
            Err(Error::UnknownTrack("y".into()))
        );
    }

    #[test]
    fn product_base_mismatch() {
        let a = eq_automaton(2).unwrap();
        let b = eq_automaton(3).unwrap();
        assert_eq!(
            a.product(&b, BoolOp::And),
            Err(Error::IncompatibleBase(2, 3))
        );
    }

    #[test]
    fn rename_identifies_tracks() {
        // x + y = z with y := x gives 2x = z.
        let add = add_automaton(2).unwrap();
        let doubled = add
            .rename_tracks(&HashMap::from([("y".to_string(), "x".to_string())]))
            .unwrap();
        assert_eq!(doubled.tracks(), &names(&["x", "z"]));
        for x in 0..20u64 {
            for z in 0..40u64 {
                assert_eq!(doubled.run(&[x, z]).unwrap(), 2 * x == z);
            }
        }
    }

    #[test]
    fn pad_normalize_extends_exact_encoding() {
        // Accepts exactly the one-column word (1,1) and nothing longer.
        let a = Dfa::from_fn(
            2,
            names(&["x", "y"]),
            3,
            0,
            |q| q == 1,
            |q, d| match q {
                0 if d == [1, 1] => 1,
                _ => 2,
            },
        )
        .unwrap();
        assert!(a.run(&[1, 1]).unwrap());
        assert!(!a.run_padded(&[1, 1], 1).unwrap());
        let n = a.pad_normalize();
        for extra in 0..5 {
            assert!(n.run_padded(&[1, 1], extra).unwrap());
            assert!(!n.run_padded(&[1, 0], extra).unwrap());
        }
        assert!(n.pad_normalize().equivalent(&n).unwrap());
    }

    #[test]
    fn infinitude() {
        let all = Dfa::universal(2, names(&["n"])).unwrap();
        assert!(all.is_infinite().unwrap());
        let five = const_automaton(5, 2).unwrap();
        assert!(!five.is_infinite().unwrap());
        assert!(five.complement().is_infinite().unwrap());
        let none = Dfa::empty(2, names(&["n"])).unwrap();
        assert!(!none.is_infinite().unwrap());
        assert!(matches!(
            eq_automaton(2).unwrap().is_infinite(),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn infinitude_of_zero_only_set() {
        // {0} accepts all-zero words of every length yet only one integer.
        let zero = const_automaton(0, 2).unwrap();
        assert!(!zero.is_infinite().unwrap());
    }

    #[test]
    fn run_checks_arity() {
        let lt = lt_automaton(2).unwrap();
        assert_eq!(
            lt.run(&[1]),
            Err(Error::ArityMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn constructor_rejects_incomplete_table() {
        let r = Dfa::new(2, names(&["n"]), DigitOrder::Lsd, 0, vec![true], vec![0]);
        assert!(matches!(r, Err(Error::Invalid(_))));
    }
}
