//! Deterministic automata with output, representing k-automatic sequences.

use std::collections::HashMap;

use crate::dfa::{Dfa, StateId};
use crate::error::{Error, Result};

/// A DFAO reading the LSD-first base-k digits of `n`; `x[n]` is the output of
/// the state reached.
///
/// Construction enforces zero-stability: from every reachable state, reading a
/// 0 digit keeps the output, so padding never changes a value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfao {
    base: u32,
    start: StateId,
    outputs: Vec<u32>,
    delta: Vec<StateId>,
}

impl Dfao {
    pub fn new(base: u32, start: StateId, outputs: Vec<u32>, delta: Vec<StateId>) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        let n = outputs.len();
        if n == 0 {
            return Err(Error::Invalid("DFAO has no states".into()));
        }
        if start as usize >= n {
            return Err(Error::Invalid(format!("start state {start} out of range")));
        }
        if delta.len() != n * base as usize {
            return Err(Error::Invalid(format!(
                "transition table has {} entries, expected {}",
                delta.len(),
                n * base as usize
            )));
        }
        if let Some(bad) = delta.iter().find(|&&q| q as usize >= n) {
            return Err(Error::Invalid(format!("transition to unknown state {bad}")));
        }
        let dfao = Self {
            base,
            start,
            outputs,
            delta,
        };
        dfao.check_zero_stability()?;
        Ok(dfao)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn state_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn output(&self, q: StateId) -> u32 {
        self.outputs[q as usize]
    }

    pub fn outputs(&self) -> &[u32] {
        &self.outputs
    }

    #[inline]
    pub fn next(&self, q: StateId, digit: u32) -> StateId {
        self.delta[q as usize * self.base as usize + digit as usize]
    }

    /// Sorted distinct output symbols of reachable states.
    pub fn output_alphabet(&self) -> Vec<u32> {
        let mut symbols: Vec<u32> = self.reachable().iter().map(|&q| self.output(q)).collect();
        symbols.sort_unstable();
        symbols.dedup();
        symbols
    }

    /// `x[n]`.
    pub fn eval(&self, mut n: u64) -> u32 {
        let mut q = self.start;
        while n > 0 {
            q = self.next(q, (n % self.base as u64) as u32);
            n /= self.base as u64;
        }
        self.output(q)
    }

    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.state_count()];
        let mut order = vec![self.start];
        seen[self.start as usize] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for d in 0..self.base {
                let r = self.next(q, d);
                if !seen[r as usize] {
                    seen[r as usize] = true;
                    order.push(r);
                }
            }
        }
        order
    }

    pub fn check_zero_stability(&self) -> Result<()> {
        for q in self.reachable() {
            if self.output(self.next(q, 0)) != self.output(q) {
                return Err(Error::ZeroStability { state: q as usize });
            }
        }
        Ok(())
    }

    /// Arity-1 automaton over `track` accepting `{n : x[n] = symbol}`.
    pub fn symbol_set(&self, symbol: u32, track: &str) -> Dfa {
        Dfa::from_fn(
            self.base,
            vec![track.to_string()],
            self.state_count(),
            self.start,
            |q| self.output(q) == symbol,
            |q, d| self.next(q, d[0]),
        )
        .expect("DFAO transition table is complete")
    }

    /// Minimal DFAO with states numbered in BFS order (Moore refinement).
    pub fn minimize(&self) -> Dfao {
        let reachable = self.reachable();
        let k = self.base as usize;
        let mut local = vec![usize::MAX; self.state_count()];
        for (i, &q) in reachable.iter().enumerate() {
            local[q as usize] = i;
        }
        let mut class: Vec<usize> = {
            let mut ids: HashMap<u32, usize> = HashMap::new();
            reachable
                .iter()
                .map(|&q| {
                    let next = ids.len();
                    *ids.entry(self.output(q)).or_insert(next)
                })
                .collect()
        };
        loop {
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let refined: Vec<usize> = reachable
                .iter()
                .enumerate()
                .map(|(i, &q)| {
                    let succ = (0..self.base)
                        .map(|d| class[local[self.next(q, d) as usize]])
                        .collect();
                    let next = ids.len();
                    *ids.entry((class[i], succ)).or_insert(next)
                })
                .collect();
            let before = class.iter().max().copied().unwrap_or(0);
            let after = refined.iter().max().copied().unwrap_or(0);
            class = refined;
            if before == after {
                break;
            }
        }
        // BFS renumbering from the start class.
        let classes = class.iter().max().map_or(0, |&c| c + 1);
        let mut rep = vec![usize::MAX; classes];
        for (i, &c) in class.iter().enumerate() {
            if rep[c] == usize::MAX {
                rep[c] = i;
            }
        }
        let mut number = vec![u32::MAX; classes];
        let mut order = vec![class[0]];
        number[class[0]] = 0;
        let mut i = 0;
        while i < order.len() {
            let q = reachable[rep[order[i]]];
            i += 1;
            for d in 0..self.base {
                let c = class[local[self.next(q, d) as usize]];
                if number[c] == u32::MAX {
                    number[c] = order.len() as u32;
                    order.push(c);
                }
            }
        }
        let mut delta = Vec::with_capacity(order.len() * k);
        let mut outputs = Vec::with_capacity(order.len());
        for &c in &order {
            let q = reachable[rep[c]];
            outputs.push(self.output(q));
            for d in 0..self.base {
                delta.push(number[class[local[self.next(q, d) as usize]]]);
            }
        }
        Dfao {
            base: self.base,
            start: 0,
            outputs,
            delta,
        }
    }

    /// The 0/1 characteristic sequence of an arity-1, LSD-first automaton.
    pub fn from_dfa(a: &Dfa) -> Result<Dfao> {
        if a.arity() != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                got: a.arity(),
            });
        }
        a.require_lsd()?;
        let outputs = a.accepting().iter().map(|&b| u32::from(b)).collect();
        Dfao::new(a.base(), a.start(), outputs, a.transitions().to_vec())
    }

    /// Whether both DFAOs define the same sequence.
    pub fn output_equivalent(&self, other: &Dfao) -> bool {
        self.base == other.base && self.minimize() == other.minimize()
    }
}
