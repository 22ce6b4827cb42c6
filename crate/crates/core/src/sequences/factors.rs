//! Brute-force least periods of the factors of a finite prefix.

use std::collections::BTreeSet;

use rayon::prelude::*;

use super::SequenceOracle;
use crate::error::{Error, Result};

/// Every `p <= max_n` that is the least period of some factor `w` of the
/// length-`prefix_len` prefix with `|w| >= p + min_extra`.
///
/// For each start position the factor is grown one letter at a time while a
/// KMP border table tracks its least period (`length - longest border`). The
/// least period never decreases as a factor grows to the right, so a start is
/// abandoned once it exceeds `max_n`. The result only grows with `prefix_len`.
pub fn factor_least_periods(
    oracle: &SequenceOracle,
    prefix_len: usize,
    max_n: usize,
    min_extra: usize,
) -> Result<BTreeSet<usize>> {
    if prefix_len <= max_n + min_extra {
        return Err(Error::Invalid(format!(
            "prefix length {prefix_len} must exceed max_n + min_extra = {}",
            max_n + min_extra
        )));
    }
    let x = oracle.prefix(prefix_len);
    let found = (0..prefix_len)
        .into_par_iter()
        .fold(
            || (vec![false; max_n + 1], Vec::new()),
            |(mut found, mut border), start| {
                scan_start(&x[start..], max_n, min_extra, &mut border, &mut found);
                (found, border)
            },
        )
        .map(|(found, _)| found)
        .reduce(
            || vec![false; max_n + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x |= y);
                a
            },
        );
    Ok(found
        .iter()
        .enumerate()
        .filter_map(|(p, &hit)| hit.then_some(p))
        .collect())
}

fn scan_start(
    w: &[u32],
    max_n: usize,
    min_extra: usize,
    border: &mut Vec<usize>,
    found: &mut [bool],
) {
    // border[m] = length of the longest proper border of w[..m].
    border.clear();
    border.push(0);
    if w.is_empty() {
        return;
    }
    border.push(0);
    let mut b = 0;
    for m in 1..=w.len() {
        if m > 1 {
            while b > 0 && w[m - 1] != w[b] {
                b = border[b];
            }
            if w[m - 1] == w[b] {
                b += 1;
            }
            border.push(b);
        }
        let period = m - border[m];
        if period > max_n {
            return;
        }
        if m >= period + min_extra {
            found[period] = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::Builtin;

    /// Least period straight from the definition.
    fn naive_least_period(w: &[u32]) -> usize {
        (1..=w.len())
            .find(|&p| (0..w.len() - p).all(|i| w[i] == w[i + p]))
            .unwrap()
    }

    fn naive(x: &[u32], max_n: usize, min_extra: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for i in 0..x.len() {
            for j in i + 1..=x.len() {
                let p = naive_least_period(&x[i..j]);
                if p <= max_n && j - i >= p + min_extra {
                    out.insert(p);
                }
            }
        }
        out
    }

    #[test]
    fn matches_definition_on_short_prefixes() {
        for b in Builtin::ALL {
            let oracle = b.oracle();
            let x = oracle.prefix(200);
            for extra in [1, 2] {
                let fast = factor_least_periods(&oracle, 200, 40, extra).unwrap();
                assert_eq!(fast, naive(&x, 40, extra), "{b} slack {extra}");
            }
        }
    }

    #[test]
    fn period_one_from_repeated_letter() {
        for b in Builtin::ALL {
            let set = factor_least_periods(&b.oracle(), 64, 8, 1).unwrap();
            assert!(set.contains(&1), "{b}");
        }
    }

    #[test]
    fn thue_morse_has_no_cube_of_a_letter() {
        // Least period 1 with two extra letters needs `aaa`.
        let set = factor_least_periods(&Builtin::ThueMorse.oracle(), 4096, 8, 2).unwrap();
        assert!(!set.contains(&1));
        for b in [
            Builtin::RudinShapiro,
            Builtin::PeriodDoubling,
            Builtin::Paperfolding,
        ] {
            assert!(factor_least_periods(&b.oracle(), 4096, 8, 2)
                .unwrap()
                .contains(&1));
        }
    }

    #[test]
    fn kmp_periods_small_words() {
        let mut found = vec![false; 10];
        let mut border = Vec::new();
        // 1101: periods 3 (and 4), least 3.
        scan_start(&[1, 1, 0, 1], 9, 1, &mut border, &mut found);
        assert_eq!(naive_least_period(&[1, 1, 0, 1]), 3);
        assert!(found[1] && found[3]);
        assert!(!found[2]);
    }

    #[test]
    fn monotone_in_prefix_length() {
        let oracle = Builtin::Paperfolding.oracle();
        let mut previous = BTreeSet::new();
        for len in [64, 128, 256, 512, 1024] {
            let set = factor_least_periods(&oracle, len, 40, 2).unwrap();
            assert!(previous.is_subset(&set));
            previous = set;
        }
    }

    #[test]
    fn prefix_too_short_rejected() {
        assert!(factor_least_periods(&Builtin::ThueMorse.oracle(), 10, 8, 2).is_err());
    }
}
