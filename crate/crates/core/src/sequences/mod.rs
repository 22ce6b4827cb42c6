//! The four classical binary sequences, as direct oracles and as DFAOs.

mod factors;
mod kernel;

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

pub use factors::factor_least_periods;
pub use kernel::{synthesize_dfao, KernelConfig};

use crate::dfao::Dfao;
use crate::error::{Error, Result};
use crate::logic::CompileEnv;

/// A sequence given directly by a function of the index.
#[derive(Clone)]
pub struct SequenceOracle {
    name: String,
    definition: String,
    f: Arc<dyn Fn(u64) -> u32 + Send + Sync>,
}

impl SequenceOracle {
    pub fn new(
        name: impl Into<String>,
        definition: impl Into<String>,
        f: impl Fn(u64) -> u32 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            definition: definition.into(),
            f: Arc::new(f),
        }
    }

    /// The sequence a DFAO generates.
    pub fn from_dfao(name: impl Into<String>, dfao: Dfao) -> Self {
        Self::new(name, "DFAO evaluation", move |n| dfao.eval(n))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn definition(&self) -> &str {
        &self.definition
    }

    pub fn at(&self, n: u64) -> u32 {
        (self.f)(n)
    }

    pub fn prefix(&self, len: usize) -> Vec<u32> {
        (0..len as u64).map(|n| self.at(n)).collect()
    }
}

impl fmt::Debug for SequenceOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceOracle")
            .field("name", &self.name)
            .field("definition", &self.definition)
            .finish()
    }
}

pub fn thue_morse_value(n: u64) -> u32 {
    n.count_ones() % 2
}

/// Parity of the number of (possibly overlapping) `11` blocks in binary.
pub fn rudin_shapiro_value(n: u64) -> u32 {
    (n & (n >> 1)).count_ones() % 2
}

pub fn period_doubling_value(n: u64) -> u32 {
    u32::from(thue_morse_value(n) != thue_morse_value(n + 1))
}

/// Paperfolding by unfolding `p_{i+1} = p_i 0 reverse(complement(p_i))`.
///
/// `p_i` has length `2^(i+1) - 1` with its middle `0` at index `2^i - 1`;
/// positions after the middle mirror positions before it, complemented.
pub fn paperfolding_value(mut n: u64) -> u32 {
    let mut flip = 0;
    while n > 0 {
        // Smallest level whose word covers n; its middle sits at `half - 1`
        // and n cannot lie left of it by minimality.
        let mut half = 1u64;
        while n >= 2 * half - 1 {
            half *= 2;
        }
        let middle = half - 1;
        if n == middle {
            return flip;
        }
        n = 2 * middle - n;
        flip ^= 1;
    }
    flip
}

/// The sequences shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    ThueMorse,
    RudinShapiro,
    PeriodDoubling,
    Paperfolding,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [
        Builtin::ThueMorse,
        Builtin::RudinShapiro,
        Builtin::PeriodDoubling,
        Builtin::Paperfolding,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::ThueMorse => "thue-morse",
            Builtin::RudinShapiro => "rudin-shapiro",
            Builtin::PeriodDoubling => "period-doubling",
            Builtin::Paperfolding => "paperfolding",
        }
    }

    pub fn definition(self) -> &'static str {
        match self {
            Builtin::ThueMorse => "t[n] = number of 1 bits of n, mod 2",
            Builtin::RudinShapiro => {
                "r[n] = number of (overlapping) 11 blocks in the binary expansion of n, mod 2"
            }
            Builtin::PeriodDoubling => "d[n] = 1 if t[n] != t[n+1], else 0",
            Builtin::Paperfolding => "limit of p_0 = 0, p_{i+1} = p_i 0 reverse(complement(p_i))",
        }
    }

    pub fn oracle(self) -> SequenceOracle {
        let f: fn(u64) -> u32 = match self {
            Builtin::ThueMorse => thue_morse_value,
            Builtin::RudinShapiro => rudin_shapiro_value,
            Builtin::PeriodDoubling => period_doubling_value,
            Builtin::Paperfolding => paperfolding_value,
        };
        SequenceOracle::new(self.name(), self.definition(), f)
    }

    /// The sequence's base-2 DFAO (built once per process).
    pub fn dfao(self) -> Dfao {
        static CACHE: [OnceLock<Dfao>; 4] = [
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
        ];
        CACHE[self as usize]
            .get_or_init(|| match self {
                Builtin::ThueMorse => thue_morse(),
                Builtin::RudinShapiro => rudin_shapiro(),
                Builtin::PeriodDoubling => period_doubling().expect("period-doubling kernel"),
                Builtin::Paperfolding => paperfolding().expect("paperfolding kernel"),
            })
            .clone()
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "thuemorse" | "tm" => Ok(Builtin::ThueMorse),
            "rudinshapiro" | "rs" => Ok(Builtin::RudinShapiro),
            "perioddoubling" | "pd" => Ok(Builtin::PeriodDoubling),
            "paperfolding" | "pf" => Ok(Builtin::Paperfolding),
            _ => Err(Error::UnboundSequence(s.to_string())),
        }
    }
}

/// Two states: the parity of ones read so far.
pub fn thue_morse() -> Dfao {
    Dfao::new(2, 0, vec![0, 1], vec![0, 1, 1, 0]).expect("valid DFAO")
}

/// Four states `2 * parity + previous digit`; a `1` after a `1` flips parity.
/// The `11` count does not depend on reading direction.
pub fn rudin_shapiro() -> Dfao {
    let mut delta = Vec::with_capacity(8);
    let mut outputs = Vec::with_capacity(4);
    for q in 0..4u32 {
        let (parity, prev) = (q / 2, q % 2);
        outputs.push(parity);
        for d in 0..2u32 {
            let flip = prev & d;
            delta.push(2 * (parity ^ flip) + d);
        }
    }
    Dfao::new(2, 0, outputs, delta).expect("valid DFAO")
}

pub fn period_doubling() -> Result<Dfao> {
    synthesize_dfao(
        &Builtin::PeriodDoubling.oracle(),
        2,
        KernelConfig::default(),
    )
}

/// Period-doubling obtained by compiling `t[n] != t[n+1]` over Thue-Morse,
/// independently of the kernel construction.
pub fn period_doubling_by_compilation() -> Result<Dfao> {
    let env = CompileEnv::new(2)?.with_sequence("t", thue_morse())?;
    Dfao::from_dfa(&env.compile_str("t[n] != t[n+1]")?)
}

pub fn paperfolding() -> Result<Dfao> {
    synthesize_dfao(&Builtin::Paperfolding.oracle(), 2, KernelConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(f: fn(u64) -> u32, len: u64) -> String {
        (0..len).map(|n| char::from(b'0' + f(n) as u8)).collect()
    }

    #[test]
    fn thue_morse_prefix() {
        assert_eq!(bits(thue_morse_value, 16), "0110100110010110");
        assert_eq!(thue_morse_value(0), 0);
        assert_eq!(thue_morse_value(1 << 10), 1);
    }

    #[test]
    fn rudin_shapiro_values() {
        assert_eq!(rudin_shapiro_value(3), 1);
        assert_eq!(rudin_shapiro_value(7), 0);
        // Substring-count oracle over the binary string.
        for n in 0..8u64 {
            let s = format!("{n:b}");
            let count = s.as_bytes().windows(2).filter(|w| w == b"11").count() as u32;
            assert_eq!(rudin_shapiro_value(n), count % 2, "n={n}");
        }
        assert_eq!(bits(rudin_shapiro_value, 8), "00010010");
    }

    #[test]
    fn period_doubling_values() {
        assert_eq!(bits(period_doubling_value, 8), "10111010");
        assert_eq!(period_doubling_value(1), 0);
    }

    /// Expands the folding recurrence literally.
    fn unfold(levels: usize) -> Vec<u32> {
        let mut p = vec![0u32];
        for _ in 0..levels {
            let mirrored: Vec<u32> = p.iter().rev().map(|b| 1 - b).collect();
            p.push(0);
            p.extend(mirrored);
        }
        p
    }

    #[test]
    fn paperfolding_values() {
        assert_eq!(unfold(2), vec![0, 0, 1, 0, 0, 1, 1]);
        assert_eq!(bits(paperfolding_value, 7), "0010011");
        assert_eq!(paperfolding_value(0), 0);
        let long = unfold(16);
        for (n, &b) in long.iter().enumerate() {
            assert_eq!(paperfolding_value(n as u64), b, "n={n}");
        }
        for m in 1..=16u32 {
            let n = (1u64 << m) - 1;
            assert_eq!(paperfolding_value(n), long[n as usize]);
        }
    }

    #[test]
    fn paperfolding_matches_odd_part_rule() {
        // Independent closed form: n + 1 = 2^a (2b + 1), p[n] = b mod 2.
        for n in 0..100_000u64 {
            let m = n + 1;
            let odd = m >> m.trailing_zeros();
            assert_eq!(paperfolding_value(n), ((odd - 1) / 2 % 2) as u32);
        }
    }

    #[test]
    fn builtin_dfaos_match_oracles() {
        for b in Builtin::ALL {
            let dfao = b.dfao();
            let oracle = b.oracle();
            for n in 0..(1u64 << 20) {
                assert_eq!(dfao.eval(n), oracle.at(n), "{b} at {n}");
            }
        }
    }

    #[test]
    fn period_doubling_two_ways() {
        let compiled = period_doubling_by_compilation().unwrap();
        assert!(compiled.output_equivalent(&Builtin::PeriodDoubling.dfao()));
    }

    #[test]
    fn builtin_sizes() {
        assert_eq!(Builtin::ThueMorse.dfao().state_count(), 2);
        assert_eq!(Builtin::RudinShapiro.dfao().state_count(), 4);
        assert!(Builtin::Paperfolding.dfao().state_count() <= 5);
    }

    #[test]
    fn builtin_names_parse() {
        for b in Builtin::ALL {
            assert_eq!(b.name().parse::<Builtin>().unwrap(), b);
        }
        assert_eq!("Thue_Morse".parse::<Builtin>().unwrap(), Builtin::ThueMorse);
        assert!("fibonacci".parse::<Builtin>().is_err());
    }
}
