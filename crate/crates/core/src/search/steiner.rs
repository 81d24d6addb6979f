//! Steiner systems `S(t, k, v)` by exact cover: every t-subset of the `v`
//! points lies in exactly one k-subset block.

use crate::fock::{binomial, for_each_subset_of, rank_bits, subsets_lex};

/// Outcome of [`find_steiner_system`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SteinerSearch {
    Found(Vec<u64>),
    /// The divisibility conditions `C(k-i, t-i) | C(v-i, t-i)` fail for this `i`.
    Indivisible {
        i: usize,
    },
    /// The exact-cover search finished without a solution.
    Exhausted {
        nodes: u64,
    },
    Budget {
        nodes: u64,
    },
}

/// Necessary conditions for `S(t, k, v)`; returns the first failing `i`.
pub fn divisibility_failure(t: usize, k: usize, v: usize) -> Option<usize> {
    (0..t).find(|&i| !binomial(v - i, t - i).is_multiple_of(binomial(k - i, t - i)))
}

struct Cover {
    blocks: Vec<u64>,
    /// t-subset ranks of each block
    parts: Vec<Vec<usize>>,
    covered: Vec<bool>,
    /// for each t-subset, blocks containing it
    by_elem: Vec<Vec<usize>>,
    chosen: Vec<u64>,
    nodes: u64,
    max_nodes: u64,
}

impl Cover {
    fn available(&self, b: usize) -> bool {
        self.parts[b].iter().all(|&r| !self.covered[r])
    }

    fn set(&mut self, b: usize, on: bool) {
        for i in 0..self.parts[b].len() {
            let r = self.parts[b][i];
            self.covered[r] = on;
        }
    }

    /// `Some(true)` on success, `Some(false)` when exhausted, `None` on budget.
    fn solve(&mut self) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return None;
        }
        // uncovered t-subset with the fewest available blocks, lowest rank on ties
        let mut best: Option<(usize, usize)> = None;
        for e in 0..self.covered.len() {
            if self.covered[e] {
                continue;
            }
            let count = self.by_elem[e]
                .iter()
                .filter(|&&b| self.available(b))
                .count();
            if count == 0 {
                return Some(false);
            }
            if best.is_none_or(|(_, c)| count < c) {
                best = Some((e, count));
            }
        }
        let Some((elem, _)) = best else {
            return Some(true);
        };
        let options: Vec<usize> = self.by_elem[elem]
            .iter()
            .copied()
            .filter(|&b| self.available(b))
            .collect();
        for b in options {
            self.set(b, true);
            self.chosen.push(self.blocks[b]);
            match self.solve() {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            self.chosen.pop();
            self.set(b, false);
        }
        Some(false)
    }
}

/// Searches for an `S(t, k, v)`; the first block is fixed to `{1..k}`, which
/// loses no isomorphism class.
pub fn find_steiner_system(t: usize, k: usize, v: usize, max_nodes: u64) -> SteinerSearch {
    debug_assert!(t <= k && k <= v && v <= 64);
    if let Some(i) = divisibility_failure(t, k, v) {
        return SteinerSearch::Indivisible { i };
    }
    let blocks = subsets_lex(v, k);
    let n_elems = binomial(v, t) as usize;
    let mut parts = Vec::with_capacity(blocks.len());
    let mut by_elem = vec![Vec::new(); n_elems];
    for (bi, &b) in blocks.iter().enumerate() {
        let mut p = Vec::new();
        for_each_subset_of(b, t, |s| p.push(rank_bits(s, v, t) as usize));
        for &r in &p {
            by_elem[r].push(bi);
        }
        parts.push(p);
    }
    let mut cover = Cover {
        blocks,
        parts,
        covered: vec![false; n_elems],
        by_elem,
        chosen: Vec::new(),
        nodes: 0,
        max_nodes,
    };
    // blocks[0] is {1..k}
    cover.set(0, true);
    cover.chosen.push(cover.blocks[0]);
    match cover.solve() {
        Some(true) => SteinerSearch::Found(cover.chosen),
        Some(false) => SteinerSearch::Exhausted { nodes: cover.nodes },
        None => SteinerSearch::Budget { nodes: cover.nodes },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;

    #[test]
    fn perfect_matchings() {
        match find_steiner_system(1, 2, 8, 1000) {
            SteinerSearch::Found(b) => {
                let h = Hypergraph::from_bits(8, 2, b).unwrap();
                assert!(h.is_steiner(1));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            find_steiner_system(1, 2, 7, 1000),
            SteinerSearch::Indivisible { i: 0 }
        );
    }

    #[test]
    fn projective_plane_of_order_three() {
        match find_steiner_system(2, 4, 13, 1_000_000) {
            SteinerSearch::Found(b) => {
                let h = Hypergraph::from_bits(13, 4, b).unwrap();
                assert_eq!(h.num_edges(), 13);
                assert!(h.is_steiner(2));
                let pp = crate::hypergraph::projective_plane_order3();
                assert_eq!(h.canonical_form().unwrap(), pp.canonical_form().unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fano_plane_and_indivisible_orders() {
        assert!(matches!(
            find_steiner_system(2, 3, 7, 10_000),
            SteinerSearch::Found(_)
        ));
        // S(2, 4, 10): 9 is divisible by 3 but 45 is not divisible by 6
        assert_eq!(
            find_steiner_system(2, 4, 10, 10_000),
            SteinerSearch::Indivisible { i: 0 }
        );
        assert_eq!(divisibility_failure(2, 4, 16), None);
    }
}
