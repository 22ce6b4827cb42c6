//! Transition count matrices and their exact Cesàro limits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dfa::{Dfa, StateId};
use crate::error::{Error, Result};

pub type Ratio = BigRational;

/// `M[i][j]` = number of digits leading from state `i` to state `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    base: u32,
    rows: Vec<Vec<u64>>,
}

impl CountMatrix {
    /// Checks that the matrix is square with every row summing to `base`.
    pub fn new(rows: Vec<Vec<u64>>, base: u32) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            let sum: u64 = row.iter().sum();
            if sum != u64::from(base) {
                return Err(Error::RowSum { row: i, sum, base });
            }
        }
        Ok(Self { base, rows })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.rows[i][j]
    }

    /// `M^n` with exact integer entries.
    pub fn power(&self, n: u32) -> Vec<Vec<BigInt>> {
        let size = self.size();
        let mut acc: Vec<Vec<BigInt>> = (0..size)
            .map(|i| (0..size).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
        for _ in 0..n {
            acc = acc
                .iter()
                .map(|row| {
                    (0..size)
                        .map(|j| {
                            row.iter()
                                .zip(&self.rows)
                                .map(|(a, r)| a * BigInt::from(r[j]))
                                .sum()
                        })
                        .collect()
                })
                .collect();
        }
        acc
    }

    /// `S = M / k`, row-stochastic.
    pub fn stochastic(&self) -> Vec<Vec<Ratio>> {
        let k = BigInt::from(self.base);
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| Ratio::new(BigInt::from(c), k.clone()))
                    .collect()
            })
            .collect()
    }
}

/// Count matrix of an arity-1 automaton.
pub fn count_matrix(a: &Dfa) -> Result<CountMatrix> {
    if a.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            got: a.arity(),
        });
    }
    let n = a.state_count();
    let mut rows = vec![vec![0u64; n]; n];
    for q in 0..n {
        for l in 0..a.letter_count() {
            rows[q][a.next(q as StateId, l) as usize] += 1;
        }
    }
    CountMatrix::new(rows, a.base())
}

/// A terminal strongly connected component of the transition graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrentClass {
    pub states: Vec<usize>,
    /// Gcd of the cycle lengths inside the class.
    pub period: u64,
    /// Stationary distribution, indexed like `states`.
    pub stationary: Vec<Ratio>,
}

/// `C = lim (1/N) Σ_{n<N} S^n`, exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limit {
    pub matrix: Vec<Vec<Ratio>>,
    pub classes: Vec<RecurrentClass>,
}

impl Limit {
    /// Every recurrent class has period 1, so `S^n` itself converges to `C`.
    pub fn aperiodic(&self) -> bool {
        self.classes.iter().all(|c| c.period == 1)
    }
}

/// Cesàro limit of `M / k`.
///
/// Each recurrent class contributes its stationary distribution, weighted by
/// the probability of absorption into it; both come from exact linear solves.
pub fn limit_matrix(m: &CountMatrix) -> Result<Limit> {
    let n = m.size();
    let s = m.stochastic();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| m.get(i, j) > 0).collect())
        .collect();
    let comp = strongly_connected(&succ);
    let comps = comp.iter().copied().max().map_or(0, |c| c + 1);
    let mut terminal = vec![true; comps];
    for i in 0..n {
        if succ[i].iter().any(|&j| comp[j] != comp[i]) {
            terminal[comp[i]] = false;
        }
    }

    let mut classes = Vec::new();
    let mut class_of = vec![None; n];
    for c in (0..comps).filter(|&c| terminal[c]) {
        let states: Vec<usize> = (0..n).filter(|&i| comp[i] == c).collect();
        for &q in &states {
            class_of[q] = Some(classes.len());
        }
        let stationary = stationary_distribution(&s, &states)?;
        let period = class_period(&succ, &states);
        classes.push(RecurrentClass {
            states,
            period,
            stationary,
        });
    }

    let transient: Vec<usize> = (0..n).filter(|&i| class_of[i].is_none()).collect();
    let mut matrix = vec![vec![Ratio::zero(); n]; n];
    for (ci, class) in classes.iter().enumerate() {
        // Absorption probability into this class from every transient state:
        // (I - S_TT) h = S_T,class 1.
        let t = transient.len();
        let mut system: Vec<Vec<Ratio>> = (0..t)
            .map(|a| {
                let i = transient[a];
                let mut row: Vec<Ratio> = transient
                    .iter()
                    .map(|&j| {
                        let id = if i == j { Ratio::one() } else { Ratio::zero() };
                        id - &s[i][j]
                    })
                    .collect();
                let rhs: Ratio = class.states.iter().map(|&j| s[i][j].clone()).sum();
                row.push(rhs);
                row
            })
            .collect();
        let h = solve(&mut system)?;
        for (a, &i) in transient.iter().enumerate() {
            for (b, &j) in class.states.iter().enumerate() {
                matrix[i][j] = &h[a] * &class.stationary[b];
            }
        }
        for &i in &class.states {
            for (b, &j) in class.states.iter().enumerate() {
                matrix[i][j] = class.stationary[b].clone();
            }
        }
        debug_assert!(class.states.iter().all(|&q| class_of[q] == Some(ci)));
    }
    Ok(Limit { matrix, classes })
}

/// `π S_C = π`, `Σ π = 1` on a closed class.
fn stationary_distribution(s: &[Vec<Ratio>], states: &[usize]) -> Result<Vec<Ratio>> {
    let c = states.len();
    // Unknowns π_0..π_{c-1}; equations: (S_C^T - I) π = 0 for all but one
    // state (the system has rank c - 1), plus normalization.
    let mut system: Vec<Vec<Ratio>> = Vec::with_capacity(c);
    for b in 0..c.saturating_sub(1) {
        let j = states[b];
        let mut row: Vec<Ratio> = states
            .iter()
            .map(|&i| {
                let id = if i == j { Ratio::one() } else { Ratio::zero() };
                &s[i][j] - id
            })
            .collect();
        row.push(Ratio::zero());
        system.push(row);
    }
    let mut norm = vec![Ratio::one(); c];
    norm.push(Ratio::one());
    system.push(norm);
    solve(&mut system)
}

/// Gcd over in-class edges `u -> v` of `level(u) + 1 - level(v)`, with BFS levels.
fn class_period(succ: &[Vec<usize>], states: &[usize]) -> u64 {
    let mut level = vec![None; succ.len()];
    let inside = |q: usize| states.binary_search(&q).is_ok();
    level[states[0]] = Some(0i64);
    let mut queue = std::collections::VecDeque::from([states[0]]);
    while let Some(u) = queue.pop_front() {
        for &v in &succ[u] {
            if inside(v) && level[v].is_none() {
                level[v] = Some(level[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    let mut g = 0u64;
    for &u in states {
        for &v in succ[u].iter().filter(|&&v| inside(v)) {
            let d = (level[u].unwrap() + 1 - level[v].unwrap()).unsigned_abs();
            g = gcd(g, d);
        }
    }
    g
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Component index per vertex (iterative Tarjan).
fn strongly_connected(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0;
    let mut comps = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*edge) {
                *edge += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("vertex on stack");
                        on_stack[w] = false;
                        comp[w] = comps;
                        if w == v {
                            break;
                        }
                    }
                    comps += 1;
                }
            }
        }
    }
    comp
}

/// Gauss-Jordan elimination on an augmented square system with a unique solution.
fn solve(system: &mut [Vec<Ratio>]) -> Result<Vec<Ratio>> {
    let n = system.len();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !system[r][col].is_zero())
            .ok_or_else(|| Error::Invalid("singular linear system".into()))?;
        system.swap(col, pivot);
        let inv = system[col][col].recip();
        for x in system[col].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = system[col].clone();
        for (r, row) in system.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
    }
    Ok(system.iter().map(|row| row[n].clone()).collect())
}

/// `A · B` for square rational matrices.
pub fn multiply(a: &[Vec<Ratio>], b: &[Vec<Ratio>]) -> Vec<Vec<Ratio>> {
    let n = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, _)| !x.is_zero())
                        .map(|(x, brow)| x * &brow[j])
                        .sum()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Ratio {
        Ratio::new(n.into(), d.into())
    }

    #[test]
    fn row_sums_enforced() {
        assert!(matches!(
            CountMatrix::new(vec![vec![1, 0], vec![1, 1]], 2),
            Err(Error::RowSum {
                row: 0,
                sum: 1,
                base: 2
            })
        ));
    }

    #[test]
    fn universal_and_parity() {
        let one = CountMatrix::new(vec![vec![2]], 2).unwrap();
        let l = limit_matrix(&one).unwrap();
        assert_eq!(l.matrix, vec![vec![r(1, 1)]]);
        let parity = CountMatrix::new(vec![vec![1, 1], vec![1, 1]], 2).unwrap();
        let l = limit_matrix(&parity).unwrap();
        assert_eq!(l.matrix, vec![vec![r(1, 2), r(1, 2)]; 2]);
        assert!(l.aperiodic());
    }

    #[test]
    fn periodic_class_detected() {
        // Two-cycle: S^n oscillates, Cesàro limit is uniform.
        let m = CountMatrix::new(vec![vec![0, 2], vec![2, 0]], 2).unwrap();
        let l = limit_matrix(&m).unwrap();
        assert_eq!(l.classes[0].period, 2);
        assert!(!l.aperiodic());
        assert_eq!(l.matrix, vec![vec![r(1, 2), r(1, 2)]; 2]);
    }

    #[test]
    fn absorption_into_two_classes() {
        // 0 moves to itself, 1 or 2 with equal odds; 1 and 2 absorb.
        let m = CountMatrix::new(vec![vec![1, 1, 1], vec![0, 3, 0], vec![0, 0, 3]], 3).unwrap();
        let l = limit_matrix(&m).unwrap();
        assert_eq!(l.matrix[0], vec![r(0, 1), r(1, 2), r(1, 2)]);
        assert_eq!(l.classes.len(), 2);
        let s = m.stochastic();
        assert_eq!(multiply(&l.matrix, &s), l.matrix);
        assert_eq!(multiply(&s, &l.matrix), l.matrix);
    }

    #[test]
    fn powers_count_words() {
        let m = CountMatrix::new(vec![vec![1, 1], vec![0, 2]], 2).unwrap();
        let p = m.power(3);
        assert_eq!(p[0][0], BigInt::from(1));
        assert_eq!(p[0][1], BigInt::from(7));
    }
}
