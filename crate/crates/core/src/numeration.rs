//! Base-k encodings of tuples of naturals and the primitive relation automata
//! (constants, equality, order, addition) that terms compile to.
//!
//! Words are read least significant digit first. A tuple is encoded column-wise:
//! column `p` holds digit `p` of every component, and shorter components are
//! padded with zeros at the tail. Zero's canonical representation is the empty
//! word.

use crate::alphabet::{DigitOrder, Letter, TrackAlphabet};
use crate::dfa::Dfa;
use crate::error::{Error, Result};
use crate::nfa;

/// A column word over a multi-track digit alphabet (LSD-first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitWord {
    alphabet: TrackAlphabet,
    columns: Vec<Vec<u32>>,
}

impl DigitWord {
    pub fn base(&self) -> u32 {
        self.alphabet.base()
    }

    pub fn arity(&self) -> usize {
        self.alphabet.arity()
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.columns
    }

    pub fn letters(&self) -> Vec<Letter> {
        self.columns
            .iter()
            .map(|c| self.alphabet.letter(c))
            .collect()
    }
}

/// Number of base-`base` digits of `v` (0 for zero).
pub fn digit_length(mut v: u64, base: u32) -> usize {
    let mut len = 0;
    while v > 0 {
        v /= base as u64;
        len += 1;
    }
    len
}

pub fn minimal_length(values: &[u64], base: u32) -> usize {
    values
        .iter()
        .map(|&v| digit_length(v, base))
        .max()
        .unwrap_or(0)
}

/// Encodes `values` column-wise; `pad_to` of `None` means minimal length.
pub fn encode(values: &[u64], base: u32, pad_to: Option<usize>) -> Result<DigitWord> {
    let alphabet = TrackAlphabet::new(base, values.len())?;
    let minimal = minimal_length(values, base);
    let len = pad_to.unwrap_or(minimal);
    if len < minimal {
        return Err(Error::PadTooSmall { pad: len, minimal });
    }
    let mut rest = values.to_vec();
    let columns = (0..len)
        .map(|_| {
            rest.iter_mut()
                .map(|v| {
                    let d = (*v % base as u64) as u32;
                    *v /= base as u64;
                    d
                })
                .collect()
        })
        .collect();
    Ok(DigitWord { alphabet, columns })
}

pub fn decode(word: &DigitWord) -> Vec<u64> {
    let k = word.base() as u64;
    let mut values = vec![0u64; word.arity()];
    for column in word.columns.iter().rev() {
        for (v, &d) in values.iter_mut().zip(column) {
            *v = *v * k + d as u64;
        }
    }
    values
}

fn tracks(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Comparison state while reading LSD-first: later (more significant)
/// differing columns override earlier ones.
const SAME: u32 = 0;
const LESS: u32 = 1;
const GREATER: u32 = 2;

fn compare_automaton(base: u32, accept: impl Fn(u32) -> bool) -> Result<Dfa> {
    Dfa::from_fn(base, tracks(&["x", "y"]), 3, SAME, accept, |q, d| {
        use std::cmp::Ordering::*;
        match d[0].cmp(&d[1]) {
            Less => LESS,
            Greater => GREATER,
            Equal => q,
        }
    })
}

/// `x = y` over tracks `x`, `y`.
pub fn eq_automaton(base: u32) -> Result<Dfa> {
    Ok(compare_automaton(base, |q| q == SAME)?.minimize())
}

/// `x < y` over tracks `x`, `y`.
pub fn lt_automaton(base: u32) -> Result<Dfa> {
    compare_automaton(base, |q| q == LESS)
}

/// `x <= y` over tracks `x`, `y`.
pub fn leq_automaton(base: u32) -> Result<Dfa> {
    compare_automaton(base, |q| q != GREATER)
}

/// `x + y = z` over tracks `x`, `y`, `z`; states are the carry plus a dead state.
pub fn add_automaton(base: u32) -> Result<Dfa> {
    const DEAD: u32 = 2;
    Dfa::from_fn(
        base,
        tracks(&["x", "y", "z"]),
        3,
        0,
        |q| q == 0,
        |q, d| {
            if q == DEAD {
                return DEAD;
            }
            let sum = d[0] + d[1] + q;
            if sum % base == d[2] {
                sum / base
            } else {
                DEAD
            }
        },
    )
}

/// `x = c` over track `x`.
pub fn const_automaton(c: u64, base: u32) -> Result<Dfa> {
    let word = encode(&[c], base, None)?;
    let digits: Vec<u32> = word.columns().iter().map(|col| col[0]).collect();
    let len = digits.len() as u32;
    let dead = len + 1;
    Dfa::from_fn(
        base,
        tracks(&["x"]),
        len as usize + 2,
        0,
        |q| q == len,
        |q, d| {
            if q < len && d[0] == digits[q as usize] {
                q + 1
            } else if q == len && d[0] == 0 {
                len
            } else {
                dead
            }
        },
    )
}

/// Converts an LSD-first arity-1 automaton into the minimal MSD-first automaton
/// for the same set of integers.
pub fn reverse_to_msd(a: &Dfa) -> Result<Dfa> {
    if a.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: a.arity(),
        });
    }
    a.require_lsd()?;
    let msd = nfa::reverse(a).determinize().minimize();
    debug_assert_eq!(msd.order(), DigitOrder::Msd);
    Ok(msd)
}

/// Inverse of [`reverse_to_msd`].
pub fn reverse_to_lsd(a: &Dfa) -> Result<Dfa> {
    if a.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: a.arity(),
        });
    }
    if a.order() != DigitOrder::Msd {
        return Err(Error::WrongOrder { expected: "msd" });
    }
    Ok(nfa::reverse(a).determinize().minimize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn encode_examples() {
        let six = encode(&[6], 2, None).unwrap();
        assert_eq!(six.columns(), &[vec![0], vec![1], vec![1]]);
        assert!(encode(&[0], 2, None).unwrap().is_empty());
        let pair = encode(&[2, 3], 2, None).unwrap();
        assert_eq!(pair.columns(), &[vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn encode_rejects_short_padding() {
        assert_eq!(
            encode(&[6], 2, Some(2)),
            Err(Error::PadTooSmall { pad: 2, minimal: 3 })
        );
    }

    #[test]
    fn decode_round_trip_small_values() {
        for v in 0..10_000u64 {
            for extra in [0, 3] {
                let minimal = digit_length(v, 2);
                let w = encode(&[v], 2, Some(minimal + extra)).unwrap();
                assert_eq!(decode(&w), vec![v]);
            }
        }
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(values in proptest::collection::vec(0u64..1_000_000, 0..4),
                                 base in 2u32..7, extra in 0usize..4) {
            let minimal = minimal_length(&values, base);
            let w = encode(&values, base, Some(minimal + extra)).unwrap();
            prop_assert_eq!(decode(&w), values);
        }
    }

    #[test]
    fn eq_examples() {
        let eq = eq_automaton(2).unwrap();
        assert!(eq.run(&[7, 7]).unwrap());
        assert!(!eq.run(&[7, 8]).unwrap());
    }

    #[test]
    fn lt_examples() {
        let lt = lt_automaton(2).unwrap();
        assert_eq!(lt.state_count(), 3);
        assert!(lt.run(&[3, 5]).unwrap());
        assert!(!lt.run(&[5, 3]).unwrap());
        assert!(!lt.run(&[4, 4]).unwrap());
    }

    #[test]
    fn lt_matches_integer_order() {
        let lt = lt_automaton(2).unwrap();
        let leq = leq_automaton(2).unwrap();
        for x in 0..256u64 {
            for y in 0..256u64 {
                assert_eq!(lt.run(&[x, y]).unwrap(), x < y);
                assert_eq!(leq.run(&[x, y]).unwrap(), x <= y);
            }
        }
    }

    #[test]
    fn order_trichotomy() {
        for base in [2, 3] {
            let lt = lt_automaton(base).unwrap();
            let eq = eq_automaton(base).unwrap();
            for a in 0..128u64 {
                for b in 0..128u64 {
                    let hits = [
                        lt.run(&[a, b]).unwrap(),
                        eq.run(&[a, b]).unwrap(),
                        lt.run(&[b, a]).unwrap(),
                    ];
                    assert_eq!(hits.iter().filter(|&&h| h).count(), 1, "{a} {b}");
                }
            }
        }
    }

    #[test]
    fn addition_exhaustive() {
        for base in [2, 3] {
            let add = add_automaton(base).unwrap();
            for x in 0..64u64 {
                for y in 0..64u64 {
                    for z in 0..64u64 {
                        assert_eq!(add.run(&[x, y, z]).unwrap(), x + y == z);
                    }
                }
            }
        }
    }

    #[test]
    fn addition_examples() {
        let add = add_automaton(2).unwrap();
        assert!(add.run(&[2, 3, 5]).unwrap());
        assert!(!add.run(&[2, 3, 6]).unwrap());
        for n in 0..64 {
            assert!(add.run(&[0, n, n]).unwrap());
        }
        assert!(add_automaton(3).unwrap().run(&[4, 5, 9]).unwrap());
    }

    #[test]
    fn constants() {
        let zero = const_automaton(0, 2).unwrap();
        assert!(zero.run(&[0]).unwrap());
        assert!(!zero.run(&[1]).unwrap());
        let five = const_automaton(5, 2).unwrap();
        let hits: Vec<u64> = (0..64).filter(|&n| five.run(&[n]).unwrap()).collect();
        assert_eq!(hits, vec![5]);
        for extra in 0..6 {
            assert!(five.run_padded(&[5], extra).unwrap());
        }
    }

    #[test]
    fn msd_reversal_of_six() {
        let six = const_automaton(6, 2).unwrap();
        let msd = reverse_to_msd(&six).unwrap();
        let a = msd.alphabet();
        let word = |bits: &str| -> Vec<usize> {
            bits.chars()
                .map(|c| a.letter(&[c.to_digit(10).unwrap()]))
                .collect()
        };
        assert!(msd.accepts_word(&word("110")));
        assert!(msd.accepts_word(&word("0110")));
        assert!(!msd.accepts_word(&word("011")));
        assert!(msd.run(&[6]).unwrap());
        assert!(!msd.run(&[3]).unwrap());
    }

    #[test]
    fn msd_reversal_is_involutive() {
        let lt5 = {
            let lt = lt_automaton(2).unwrap();
            let c = const_automaton(5, 2)
                .unwrap()
                .rename_tracks(&[("x".to_string(), "y".to_string())].into())
                .unwrap();
            let both = lt.product(&c, crate::dfa::BoolOp::And).unwrap();
            nfa::project(&both, "y").unwrap().determinize().minimize()
        };
        let msd = reverse_to_msd(&lt5).unwrap();
        for n in 0..512u64 {
            assert_eq!(msd.run(&[n]).unwrap(), n < 5);
        }
        let back = reverse_to_lsd(&msd).unwrap();
        assert!(back.equivalent(&lt5).unwrap());
    }

    #[test]
    fn reverse_requires_arity_one() {
        assert!(matches!(
            reverse_to_msd(&eq_automaton(2).unwrap()),
            Err(Error::ArityMismatch { .. })
        ));
    }
}
