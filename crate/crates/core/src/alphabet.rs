//! Multi-track digit alphabets.
//!
//! A letter over `r` tracks in base `k` is an `r`-tuple of digits. Letters are
//! numbered `sum(digit[p] * k^p)`, so track 0 is the fastest-varying position
//! and the all-zero column is always letter 0.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Letter index into a [`TrackAlphabet`].
pub type Letter = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrackAlphabet {
    base: u32,
    arity: usize,
}

impl TrackAlphabet {
    pub fn new(base: u32, arity: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidBase(base));
        }
        Ok(Self { base, arity })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `k^r`; arity 0 has the single empty letter.
    pub fn letter_count(&self) -> usize {
        (self.base as usize).pow(self.arity as u32)
    }

    pub fn digit(&self, letter: Letter, track: usize) -> u32 {
        debug_assert!(track < self.arity);
        ((letter / (self.base as usize).pow(track as u32)) % self.base as usize) as u32
    }

    pub fn digits(&self, letter: Letter) -> Vec<u32> {
        let k = self.base as usize;
        let mut rest = letter;
        (0..self.arity)
            .map(|_| {
                let d = rest % k;
                rest /= k;
                d as u32
            })
            .collect()
    }

    pub fn letter(&self, digits: &[u32]) -> Letter {
        debug_assert_eq!(digits.len(), self.arity);
        digits
            .iter()
            .rev()
            .fold(0, |acc, &d| acc * self.base as usize + d as usize)
    }

    pub fn letters(&self) -> std::ops::Range<Letter> {
        0..self.letter_count()
    }
}

/// Which end of a digit word carries the least significant digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DigitOrder {
    /// Least significant digit first; padding zeros go at the tail.
    #[default]
    Lsd,
    /// Most significant digit first; padding zeros lead.
    Msd,
}

impl DigitOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            DigitOrder::Lsd => "lsd",
            DigitOrder::Msd => "msd",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            DigitOrder::Lsd => DigitOrder::Msd,
            DigitOrder::Msd => DigitOrder::Lsd,
        }
    }
}

impl fmt::Display for DigitOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DigitOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lsd" => Ok(DigitOrder::Lsd),
            "msd" => Ok(DigitOrder::Msd),
            other => Err(Error::Invalid(format!("unknown digit order `{other}`"))),
        }
    }
}
