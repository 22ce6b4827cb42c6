//! Nondeterministic intermediates: projection (existential quantification),
//! reversal, and the subset construction back to a [`Dfa`].

use std::collections::HashMap;

use crate::alphabet::{DigitOrder, Letter, TrackAlphabet};
use crate::dfa::{Dfa, StateId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    alphabet: TrackAlphabet,
    tracks: Vec<String>,
    order: DigitOrder,
    starts: Vec<StateId>,
    accepting: Vec<bool>,
    /// Successor sets, row-major by state.
    delta: Vec<Vec<StateId>>,
}

impl Nfa {
    pub fn new(
        base: u32,
        tracks: Vec<String>,
        order: DigitOrder,
        starts: Vec<StateId>,
        accepting: Vec<bool>,
        delta: Vec<Vec<StateId>>,
    ) -> Result<Self> {
        let alphabet = TrackAlphabet::new(base, tracks.len())?;
        let n = accepting.len();
        if delta.len() != n * alphabet.letter_count() {
            return Err(Error::Invalid(format!(
                "transition table has {} rows, expected {}",
                delta.len(),
                n * alphabet.letter_count()
            )));
        }
        let out_of_range = starts
            .iter()
            .chain(delta.iter().flatten())
            .any(|&q| q as usize >= n);
        if out_of_range {
            return Err(Error::Invalid("reference to unknown state".into()));
        }
        Ok(Self {
            alphabet,
            tracks,
            order,
            starts,
            accepting,
            delta,
        })
    }

    pub fn from_dfa(dfa: &Dfa) -> Nfa {
        Nfa {
            alphabet: dfa.alphabet(),
            tracks: dfa.tracks().to_vec(),
            order: dfa.order(),
            starts: vec![dfa.start()],
            accepting: dfa.accepting().to_vec(),
            delta: dfa.transitions().iter().map(|&q| vec![q]).collect(),
        }
    }

    pub fn base(&self) -> u32 {
        self.alphabet.base()
    }

    pub fn tracks(&self) -> &[String] {
        &self.tracks
    }

    pub fn order(&self) -> DigitOrder {
        self.order
    }

    pub fn starts(&self) -> &[StateId] {
        &self.starts
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

    pub fn successors(&self, q: StateId, letter: Letter) -> &[StateId] {
        &self.delta[q as usize * self.letter_count() + letter]
    }

    pub fn accepts_word(&self, word: &[Letter]) -> bool {
        let mut current: Vec<StateId> = self.starts.clone();
        for &l in word {
            let mut next: Vec<StateId> = current
                .iter()
                .flat_map(|&q| self.successors(q, l).iter().copied())
                .collect();
            next.sort_unstable();
            next.dedup();
            current = next;
        }
        current.iter().any(|&q| self.is_accepting(q))
    }

    /// Marks a state accepting when an accepting state is reachable from it
    /// through all-zero columns.
    pub fn pad_normalize(&self) -> Nfa {
        let n = self.state_count();
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for q in 0..n as StateId {
            for &r in self.successors(q, 0) {
                preds[r as usize].push(q);
            }
        }
        let mut out = self.clone();
        let mut stack: Vec<StateId> = (0..n as StateId)
            .filter(|&q| self.is_accepting(q))
            .collect();
        while let Some(q) = stack.pop() {
            for &p in &preds[q as usize] {
                if !out.accepting[p as usize] {
                    out.accepting[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        out
    }

    /// Subset construction. The empty subset is kept as an explicit dead state.
    pub fn determinize(&self) -> Dfa {
        let m = self.letter_count();
        let mut initial = self.starts.clone();
        initial.sort_unstable();
        initial.dedup();
        let mut index: HashMap<Vec<StateId>, StateId> = HashMap::new();
        index.insert(initial.clone(), 0);
        let mut subsets = vec![initial];
        let mut delta = Vec::new();
        let mut stamp = vec![usize::MAX; self.state_count()];
        let mut step = 0usize;
        let mut scratch: Vec<StateId> = Vec::new();
        let mut i = 0;
        while i < subsets.len() {
            for l in 0..m {
                scratch.clear();
                for &q in &subsets[i] {
                    for &r in self.successors(q, l) {
                        if stamp[r as usize] != step {
                            stamp[r as usize] = step;
                            scratch.push(r);
                        }
                    }
                }
                step += 1;
                scratch.sort_unstable();
                let id = match index.get(&scratch) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len() as StateId;
                        index.insert(scratch.clone(), id);
                        subsets.push(scratch.clone());
                        id
                    }
                };
                delta.push(id);
            }
            i += 1;
        }
        let accepting = subsets
            .iter()
            .map(|s| s.iter().any(|&q| self.is_accepting(q)))
            .collect();
        Dfa::new(
            self.base(),
            self.tracks.clone(),
            self.order,
            0,
            accepting,
            delta,
        )
        .expect("subset construction yields a complete automaton")
    }
}

/// Erases `track`, realizing existential quantification over it.
///
/// A state of the projection accepts when some continuation that is zero on
/// every remaining track, but arbitrary on the erased one, reaches acceptance
/// in `dfa`; this lets the witness be longer than the remaining values.
pub fn project(dfa: &Dfa, track: &str) -> Result<Nfa> {
    dfa.require_lsd()?;
    let erased = dfa
        .track_index(track)
        .ok_or_else(|| Error::UnknownTrack(track.to_string()))?;
    let old = dfa.alphabet();
    let tracks: Vec<String> = dfa
        .tracks()
        .iter()
        .filter(|t| *t != track)
        .cloned()
        .collect();
    let alphabet = TrackAlphabet::new(dfa.base(), tracks.len())?;
    let k = dfa.base();
    // lift[l][d]: old letter for new letter l with digit d on the erased track.
    let lift: Vec<Vec<Letter>> = alphabet
        .letters()
        .map(|l| {
            let rest = alphabet.digits(l);
            (0..k)
                .map(|d| {
                    let mut digits = rest.clone();
                    digits.insert(erased, d);
                    old.letter(&digits)
                })
                .collect()
        })
        .collect();

    let n = dfa.state_count();
    let mut delta = Vec::with_capacity(n * lift.len());
    for q in 0..n as StateId {
        for options in &lift {
            let mut succ: Vec<StateId> = options.iter().map(|&l| dfa.next(q, l)).collect();
            succ.sort_unstable();
            succ.dedup();
            delta.push(succ);
        }
    }

    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for q in 0..n as StateId {
        for &l in &lift[0] {
            preds[dfa.next(q, l) as usize].push(q);
        }
    }
    let mut accepting = dfa.accepting().to_vec();
    let mut stack: Vec<StateId> = (0..n as StateId)
        .filter(|&q| accepting[q as usize])
        .collect();
    while let Some(q) = stack.pop() {
        for &p in &preds[q as usize] {
            if !accepting[p as usize] {
                accepting[p as usize] = true;
                stack.push(p);
            }
        }
    }

    Nfa::new(
        dfa.base(),
        tracks,
        dfa.order(),
        vec![dfa.start()],
        accepting,
        delta,
    )
}

/// Automaton for the digit-reversed language, reading in the opposite order.
pub fn reverse(dfa: &Dfa) -> Nfa {
    let n = dfa.state_count();
    let m = dfa.letter_count();
    let mut delta: Vec<Vec<StateId>> = vec![Vec::new(); n * m];
    for q in 0..n as StateId {
        for l in 0..m {
            let r = dfa.next(q, l);
            delta[r as usize * m + l].push(q);
        }
    }
    let starts = (0..n as StateId).filter(|&q| dfa.is_accepting(q)).collect();
    let mut accepting = vec![false; n];
    accepting[dfa.start() as usize] = true;
    Nfa {
        alphabet: dfa.alphabet(),
        tracks: dfa.tracks().to_vec(),
        order: dfa.order().flipped(),
        starts,
        accepting,
        delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeration::{add_automaton, eq_automaton};

    #[test]
    fn determinize_of_dfa_is_equivalent() {
        let add = add_automaton(2).unwrap();
        let back = Nfa::from_dfa(&add).determinize();
        assert!(back.equivalent(&add).unwrap());
    }

    #[test]
    fn some_digit_one_nfa() {
        // 0 waits, guesses a 1 and moves to 1, state 2 is an unreachable spare.
        let delta = vec![vec![0], vec![0, 1], vec![1], vec![1], vec![2], vec![2]];
        let nfa = Nfa::new(
            2,
            vec!["n".into()],
            DigitOrder::Lsd,
            vec![0],
            vec![false, true, false],
            delta,
        )
        .unwrap();
        let dfa = nfa.determinize().minimize();
        assert_eq!(dfa.state_count(), 2);
        for n in 0..64u64 {
            assert_eq!(dfa.run(&[n]).unwrap(), n != 0);
        }
    }

    #[test]
    fn project_equality_is_universal() {
        let eq = eq_automaton(2).unwrap();
        let p = project(&eq, "y").unwrap().determinize().minimize();
        assert!(p.is_universal());
        assert_eq!(p.tracks(), &["x".to_string()]);
    }

    #[test]
    fn project_sum_is_universal() {
        let add = add_automaton(2).unwrap();
        let p = project(&add, "z").unwrap().determinize().minimize();
        assert!(p.is_universal());
    }

    #[test]
    fn project_addend_gives_order() {
        for base in [2, 3] {
            let add = add_automaton(base).unwrap();
            let p = project(&add, "y")
                .unwrap()
                .determinize()
                .pad_normalize()
                .minimize();
            for x in 0..64u64 {
                for z in 0..64u64 {
                    assert_eq!(p.run(&[x, z]).unwrap(), x <= z, "base {base} x={x} z={z}");
                }
            }
        }
    }

    #[test]
    fn project_unknown_track() {
        let eq = eq_automaton(2).unwrap();
        assert_eq!(
            project(&eq, "q").unwrap_err(),
            Error::UnknownTrack("q".into())
        );
    }

    #[test]
    fn reverse_flips_order() {
        let eq = eq_automaton(2).unwrap();
        let r = reverse(&eq);
        assert_eq!(r.order(), DigitOrder::Msd);
        let d = r.determinize();
        for x in 0..16u64 {
            assert!(d.run(&[x, x]).unwrap());
            assert!(!d.run(&[x, x + 1]).unwrap());
        }
    }
}
