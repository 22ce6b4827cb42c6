//! Hopcroft partition refinement with canonical renumbering.

use crate::dfa::{Dfa, StateId};

impl Dfa {
    /// Minimal complete automaton for the same language.
    ///
    /// Unreachable states are dropped first. States of the result are numbered
    /// in BFS order from the start, visiting letters in ascending order, so two
    /// equivalent inputs minimize to identical values.
    pub fn minimize(&self) -> Dfa {
        let reachable = self.reachable();
        let n = reachable.len();
        let m = self.letter_count();
        let mut local = vec![u32::MAX; self.state_count()];
        for (i, &q) in reachable.iter().enumerate() {
            local[q as usize] = i as u32;
        }
        let mut delta = Vec::with_capacity(n * m);
        for &q in &reachable {
            for l in 0..m {
                delta.push(local[self.next(q, l) as usize]);
            }
        }
        let accepting: Vec<bool> = reachable.iter().map(|&q| self.is_accepting(q)).collect();

        let class = hopcroft(n, m, &delta, &accepting);

        // Quotient, then renumber by BFS from the start class.
        let classes = class.iter().max().map_or(0, |&c| c + 1);
        let mut rep = vec![usize::MAX; classes];
        for (q, &c) in class.iter().enumerate() {
            if rep[c] == usize::MAX {
                rep[c] = q;
            }
        }
        let mut number = vec![u32::MAX; classes];
        let mut order = vec![class[0]];
        number[class[0]] = 0;
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            i += 1;
            let q = rep[c];
            for l in 0..m {
                let d = class[delta[q * m + l] as usize];
                if number[d] == u32::MAX {
                    number[d] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        let mut out_delta = Vec::with_capacity(order.len() * m);
        for &c in &order {
            let q = rep[c];
            for l in 0..m {
                out_delta.push(number[class[delta[q * m + l] as usize]]);
            }
        }
        let out_accepting = order.iter().map(|&c| accepting[rep[c]]).collect();
        Dfa::new(
            self.base(),
            self.tracks().to_vec(),
            self.order(),
            0,
            out_accepting,
            out_delta,
        )
        .expect("quotient of a complete automaton is complete")
    }
}

/// Returns the Myhill–Nerode class of every state. State 0 is the start.
fn hopcroft(n: usize, m: usize, delta: &[StateId], accepting: &[bool]) -> Vec<usize> {
    // Inverse transitions in CSR form, per letter.
    let mut inv_start = vec![0usize; m * n + 1];
    for q in 0..n {
        for l in 0..m {
            inv_start[l * n + delta[q * m + l] as usize + 1] += 1;
        }
    }
    for i in 1..inv_start.len() {
        inv_start[i] += inv_start[i - 1];
    }
    let mut fill = inv_start.clone();
    let mut inv = vec![0u32; n * m];
    for q in 0..n {
        for l in 0..m {
            let slot = l * n + delta[q * m + l] as usize;
            inv[fill[slot]] = q as u32;
            fill[slot] += 1;
        }
    }

    // Blocks are contiguous ranges of `elems`.
    let mut elems: Vec<usize> = (0..n).collect();
    elems.sort_by_key(|&q| !accepting[q]);
    let mut pos = vec![0usize; n];
    for (i, &q) in elems.iter().enumerate() {
        pos[q] = i;
    }
    let accepting_count = accepting.iter().filter(|&&a| a).count();
    let mut block_of = vec![0usize; n];
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    if accepting_count > 0 {
        starts.push(0);
        ends.push(accepting_count);
    }
    if accepting_count < n {
        starts.push(accepting_count);
        ends.push(n);
    }
    for b in 0..starts.len() {
        for &q in &elems[starts[b]..ends[b]] {
            block_of[q] = b;
        }
    }

    let mut in_work = vec![false; starts.len() * m];
    let mut work: Vec<(usize, usize)> = Vec::new();
    if starts.len() == 2 {
        let smaller = if ends[0] - starts[0] <= ends[1] - starts[1] {
            0
        } else {
            1
        };
        for l in 0..m {
            work.push((smaller, l));
            in_work[smaller * m + l] = true;
        }
    }

    let mut marked = vec![0usize; starts.len()];
    let mut touched: Vec<usize> = Vec::new();
    let mut splitter: Vec<usize> = Vec::new();
    while let Some((b, l)) = work.pop() {
        in_work[b * m + l] = false;
        splitter.clear();
        splitter.extend_from_slice(&elems[starts[b]..ends[b]]);
        for &r in &splitter {
            let slot = l * n + r;
            for &p in &inv[inv_start[slot]..inv_start[slot + 1]] {
                let p = p as usize;
                let pb = block_of[p];
                let boundary = starts[pb] + marked[pb];
                if pos[p] < boundary {
                    continue;
                }
                if marked[pb] == 0 {
                    touched.push(pb);
                }
                // Swap p to the marked prefix of its block.
                let other = elems[boundary];
                elems.swap(pos[p], boundary);
                pos[other] = pos[p];
                pos[p] = boundary;
                marked[pb] += 1;
            }
        }
        for &y in &touched {
            let size = ends[y] - starts[y];
            let count = marked[y];
            marked[y] = 0;
            if count == size {
                continue;
            }
            let nb = starts.len();
            starts.push(starts[y]);
            ends.push(starts[y] + count);
            starts[y] += count;
            marked.push(0);
            in_work.extend(std::iter::repeat_n(false, m));
            for &q in &elems[starts[nb]..ends[nb]] {
                block_of[q] = nb;
            }
            let new_small = count <= size - count;
            for a in 0..m {
                if in_work[y * m + a] {
                    in_work[nb * m + a] = true;
                    work.push((nb, a));
                } else {
                    let pick = if new_small { nb } else { y };
                    in_work[pick * m + a] = true;
                    work.push((pick, a));
                }
            }
        }
        touched.clear();
    }
    block_of
}
