//! DFAO synthesis from an oracle through the k-kernel.
//!
//! Kernel elements are the subsequences `n -> x(k^e * n + r)`, identified by
//! `(e, r)`. Two elements are merged when their first `probe_len` terms agree,
//! which is only a heuristic, so every result is checked against the oracle on
//! `[0, verify_len)` before it is returned.

use std::collections::HashMap;

use rayon::prelude::*;

use super::SequenceOracle;
use crate::dfa::StateId;
use crate::dfao::Dfao;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelConfig {
    pub probe_len: usize,
    pub verify_len: u64,
    /// Give up when the kernel grows beyond this many elements.
    pub max_states: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            probe_len: 1 << 14,
            verify_len: 1 << 20,
            max_states: 4096,
        }
    }
}

pub fn synthesize_dfao(oracle: &SequenceOracle, base: u32, config: KernelConfig) -> Result<Dfao> {
    if base < 2 {
        return Err(Error::InvalidBase(base));
    }
    if config.probe_len < 1 << 14 || config.verify_len < 4 * config.probe_len as u64 {
        return Err(Error::Invalid(format!(
            "kernel probe {} / verification {} below the minimum 2^14 / 4 x probe",
            config.probe_len, config.verify_len
        )));
    }
    let k = base as u64;
    let probe = |scale: u64, r: u64| -> Option<Vec<u32>> {
        (0..config.probe_len as u64)
            .map(|n| scale.checked_mul(n)?.checked_add(r).map(|i| oracle.at(i)))
            .collect()
    };
    let overflow = || {
        Error::KernelProbeInsufficient(format!("kernel indices overflow for `{}`", oracle.name()))
    };

    // (scale = k^e, r) per state, in discovery order.
    let mut elements: Vec<(u64, u64)> = vec![(1, 0)];
    let mut index: HashMap<Vec<u32>, StateId> = HashMap::new();
    index.insert(probe(1, 0).ok_or_else(overflow)?, 0);
    let mut delta: Vec<StateId> = Vec::new();
    let mut i = 0;
    while i < elements.len() {
        let (scale, r) = elements[i];
        i += 1;
        for d in 0..k {
            let child_scale = scale.checked_mul(k).ok_or_else(overflow)?;
            let child_r = d
                .checked_mul(scale)
                .and_then(|x| x.checked_add(r))
                .ok_or_else(overflow)?;
            let values = probe(child_scale, child_r).ok_or_else(overflow)?;
            let id = match index.get(&values) {
                Some(&id) => id,
                None => {
                    if elements.len() >= config.max_states {
                        return Err(Error::KernelProbeInsufficient(format!(
                            "kernel of `{}` exceeds {} elements",
                            oracle.name(),
                            config.max_states
                        )));
                    }
                    let id = elements.len() as StateId;
                    index.insert(values, id);
                    elements.push((child_scale, child_r));
                    id
                }
            };
            delta.push(id);
        }
    }
    let outputs = elements.iter().map(|&(_, r)| oracle.at(r)).collect();
    let dfao = Dfao::new(base, 0, outputs, delta)?;

    let mismatch = (0..config.verify_len)
        .into_par_iter()
        .find_first(|&n| dfao.eval(n) != oracle.at(n));
    if let Some(n) = mismatch {
        return Err(Error::KernelProbeInsufficient(format!(
            "`{}` disagrees with its synthesized DFAO at index {n}",
            oracle.name()
        )));
    }
    Ok(dfao)
}
