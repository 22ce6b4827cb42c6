//! Exact statistics of integer sets given by arity-1 automata.
//!
//! For a padding-normalized automaton, the fraction of length-`n` digit words
//! it accepts is the fraction of integers in `[0, k^n)` it accepts. That
//! fraction is the start row of `S^n` (with `S = M / k`) summed over accepting
//! states, so its limit is read off the Cesàro limit of `S`.

mod limit;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

pub use limit::{count_matrix, limit_matrix, multiply, CountMatrix, Limit, Ratio, RecurrentClass};

use crate::alphabet::DigitOrder;
use crate::dfa::{Dfa, StateId};
use crate::error::{Error, Result};
use crate::numeration;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub order: DigitOrder,
    pub states: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub cesaro_density: Ratio,
    /// Every recurrent class is aperiodic, so the limit exists without averaging.
    pub natural_density_exists: bool,
    /// Exactly one recurrent class, so every row of the limit is the same.
    pub rank_one_limit: bool,
    #[serde(serialize_with = "ser_ratios")]
    pub stationary_row: Vec<Ratio>,
    pub accepting: Vec<bool>,
    /// Smallest rejected `n >= 1`.
    pub least_omitted: Option<u64>,
    pub complement_infinite: bool,
}

#[derive(Serialize)]
struct Fraction {
    numerator: String,
    denominator: String,
}

impl From<&Ratio> for Fraction {
    fn from(r: &Ratio) -> Self {
        Fraction {
            numerator: r.numer().to_string(),
            denominator: r.denom().to_string(),
        }
    }
}

fn ser_ratio<S: Serializer>(r: &Ratio, s: S) -> std::result::Result<S::Ok, S::Error> {
    Fraction::from(r).serialize(s)
}

fn ser_ratios<S: Serializer>(v: &[Ratio], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(Fraction::from))
}

fn require_unary(a: &Dfa) -> Result<()> {
    if a.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: a.arity(),
        });
    }
    Ok(())
}

pub fn density(a: &Dfa) -> Result<DensityReport> {
    require_unary(a)?;
    let m = count_matrix(a)?;
    let limit = limit_matrix(&m)?;
    let start = a.start() as usize;
    let row = limit.matrix[start].clone();
    let cesaro_density = row
        .iter()
        .enumerate()
        .filter(|&(q, _)| a.is_accepting(q as StateId))
        .map(|(_, x)| x.clone())
        .sum();
    let reachable = a.reachable();
    let natural_density_exists = limit
        .classes
        .iter()
        .filter(|c| {
            c.states
                .iter()
                .any(|q| reachable.contains(&(*q as StateId)))
        })
        .all(|c| c.period == 1);
    Ok(DensityReport {
        order: a.order(),
        states: a.state_count(),
        cesaro_density,
        natural_density_exists,
        rank_one_limit: limit.classes.len() == 1,
        stationary_row: row,
        accepting: a.accepting().to_vec(),
        least_omitted: least_omitted_exact(a)?,
        complement_infinite: a.complement().is_infinite()?,
    })
}

/// Smallest `n` in `[1, bound]` that `a` rejects.
pub fn least_omitted(a: &Dfa, bound: u64) -> Result<Option<u64>> {
    require_unary(a)?;
    for n in 1..=bound {
        if !a.run(&[n])? {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Smallest rejected `n >= 1` with no search bound: the shortest, then
/// lexicographically least, canonical most-significant-first word rejected.
pub fn least_omitted_exact(a: &Dfa) -> Result<Option<u64>> {
    require_unary(a)?;
    let rejected = a.complement();
    let msd = match a.order() {
        DigitOrder::Lsd => numeration::reverse_to_msd(&rejected)?,
        DigitOrder::Msd => rejected.minimize(),
    };
    let n = msd.state_count();
    let k = msd.base();
    // good[r][q]: acceptance reachable from q in exactly r steps.
    let mut good: Vec<Vec<bool>> = vec![msd.accepting().to_vec()];
    let first = |good: &Vec<Vec<bool>>, r: usize| {
        (1..k).find(|&d| good[r][msd.next(msd.start(), d as usize) as usize])
    };
    let mut len = 1;
    loop {
        if first(&good, len - 1).is_some() {
            break;
        }
        if len > n + 1 {
            // Lengths beyond the state count repeat earlier patterns.
            return Ok(None);
        }
        let prev = &good[len - 1];
        let next: Vec<bool> = (0..n as StateId)
            .map(|q| (0..k).any(|d| prev[msd.next(q, d as usize) as usize]))
            .collect();
        good.push(next);
        len += 1;
    }
    let overflow = || Error::Invalid("least omitted value exceeds 64 bits".into());
    let d = first(&good, len - 1).expect("found above");
    let mut q = msd.next(msd.start(), d as usize);
    let mut value = u64::from(d);
    for r in (0..len - 1).rev() {
        let d = (0..k)
            .find(|&d| good[r][msd.next(q, d as usize) as usize])
            .expect("a continuation exists");
        q = msd.next(q, d as usize);
        value = value
            .checked_mul(u64::from(k))
            .and_then(|v| v.checked_add(u64::from(d)))
            .ok_or_else(overflow)?;
    }
    Ok(Some(value))
}

/// Start-row limit masses of accepting and of rejecting states, each sorted
/// in decreasing order.
pub fn accepting_mass_split(a: &Dfa) -> Result<(Vec<Ratio>, Vec<Ratio>)> {
    require_unary(a)?;
    let limit = limit_matrix(&count_matrix(a)?)?;
    let row = &limit.matrix[a.start() as usize];
    let mut accepting = Vec::new();
    let mut rejecting = Vec::new();
    for (q, mass) in row.iter().enumerate() {
        if a.is_accepting(q as StateId) {
            accepting.push(mass.clone());
        } else {
            rejecting.push(mass.clone());
        }
    }
    accepting.sort_by(|x, y| y.cmp(x));
    rejecting.sort_by(|x, y| y.cmp(x));
    Ok((accepting, rejecting))
}

/// Number of accepted integers in `[0, k^n)`, from the `n`-th power of `M`.
pub fn accepted_below_power(a: &Dfa, n: u32) -> Result<BigInt> {
    require_unary(a)?;
    let p = count_matrix(a)?.power(n);
    Ok(p[a.start() as usize]
        .iter()
        .enumerate()
        .filter(|&(q, _)| a.is_accepting(q as StateId))
        .map(|(_, c)| c.clone())
        .sum())
}

/// `|{m < k^n : a accepts m}| / k^n` by running the automaton on each integer.
pub fn empirical_fraction(a: &Dfa, n: u32) -> Result<Ratio> {
    require_unary(a)?;
    let total = u64::from(a.base())
        .checked_pow(n)
        .ok_or_else(|| Error::Invalid("range too large to enumerate".into()))?;
    let mut hits = 0u64;
    for m in 0..total {
        if a.run(&[m])? {
            hits += 1;
        }
    }
    Ok(Ratio::new(hits.into(), total.into()))
}

/// Nearest `f64`, for display only.
pub fn approx(r: &Ratio) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::CompileEnv;

    fn r(n: i64, d: i64) -> Ratio {
        Ratio::new(n.into(), d.into())
    }

    fn set(text: &str) -> Dfa {
        CompileEnv::new(2).unwrap().compile_str(text).unwrap()
    }

    #[test]
    fn simple_densities() {
        assert_eq!(density(&set("n >= 0")).unwrap().cesaro_density, r(1, 1));
        assert_eq!(density(&set("Em n = m+m")).unwrap().cesaro_density, r(1, 2));
        assert_eq!(density(&set("n = 5")).unwrap().cesaro_density, r(0, 1));
        let threes = CompileEnv::new(3)
            .unwrap()
            .compile_str("Em n = m+m+m+1")
            .unwrap();
        assert_eq!(density(&threes).unwrap().cesaro_density, r(1, 3));
    }

    #[test]
    fn universal_and_parity_counts() {
        let all = set("n >= 0");
        assert_eq!(count_matrix(&all).unwrap().rows(), &[vec![2]]);
        let parity = crate::sequences::thue_morse().symbol_set(0, "n");
        assert_eq!(
            count_matrix(&parity).unwrap().rows(),
            &[vec![1, 1], vec![1, 1]]
        );
        assert_eq!(
            accepting_mass_split(&parity).unwrap(),
            (vec![r(1, 2)], vec![r(1, 2)])
        );
        assert_eq!(accepting_mass_split(&all).unwrap(), (vec![r(1, 1)], vec![]));
    }

    #[test]
    fn least_omitted_examples() {
        assert_eq!(least_omitted(&set("n >= 0"), 100).unwrap(), None);
        assert_eq!(least_omitted_exact(&set("n >= 0")).unwrap(), None);
        assert_eq!(least_omitted(&set("n != 5"), 100).unwrap(), Some(5));
        assert_eq!(least_omitted_exact(&set("n != 5")).unwrap(), Some(5));
        // Zero is never reported.
        assert_eq!(least_omitted_exact(&set("n >= 1")).unwrap(), None);
        assert_eq!(least_omitted_exact(&set("n < 1000")).unwrap(), Some(1000));
    }

    #[test]
    fn power_counts_match_enumeration() {
        let a = set("Em n = m+m+m");
        for n in 0..=6 {
            let direct = (0..1u64 << n).filter(|&m| a.run(&[m]).unwrap()).count();
            assert_eq!(accepted_below_power(&a, n).unwrap(), BigInt::from(direct));
        }
    }

    #[test]
    fn complement_densities_sum_to_one() {
        let a = set("Em (n = m+m+m | n = m+m+m+m+m+1)");
        let d =
            density(&a).unwrap().cesaro_density + density(&a.complement()).unwrap().cesaro_density;
        assert_eq!(d, r(1, 1));
    }

    #[test]
    fn msd_form_has_same_density() {
        let a = set("Em (n = m+m+m | n = m+m+m+m+m+1)");
        let msd = numeration::reverse_to_msd(&a).unwrap();
        assert_eq!(
            density(&a).unwrap().cesaro_density,
            density(&msd).unwrap().cesaro_density
        );
    }

    #[test]
    fn report_serializes_fractions() {
        let json = serde_json::to_value(density(&set("Em n = m+m")).unwrap()).unwrap();
        assert_eq!(json["cesaro_density"]["numerator"], "1");
        assert_eq!(json["cesaro_density"]["denominator"], "2");
        assert_eq!(json["order"], "lsd");
    }
}
