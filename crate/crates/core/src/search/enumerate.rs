//! Depth-first walk over isomorphism classes of overlap-admissible
//! N-uniform hypergraphs.
//!
//! Every class with `b` edges is reached from a class with `b - 1` edges by
//! adding one compatible edge, so expanding every child of every new class
//! visits each class exactly once. Children that are images of each other
//! under a known automorphism of the parent are generated once.

use std::collections::HashSet;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{binomial, subsets_lex};
use crate::hypergraph::{canonicalize, key_bytes, Hypergraph};

use super::SearchBudget;

/// What the walker should do after visiting a class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Visit {
    Descend,
    /// Do not extend this class (its superclasses may still be reached
    /// through other parents).
    Skip,
    Stop,
}

/// A class as seen by the visitor, in the labelling the walker generated it.
pub struct ClassView<'a> {
    pub edges: &'a [u64],
    /// Edges that could still be added without breaking the overlap criterion.
    pub candidates: &'a [u64],
}

#[derive(Clone, Debug, Default)]
pub struct WalkStats {
    pub classes_visited: u64,
    /// Smallest and largest edge counts among visited classes.
    pub edges_range: Option<(usize, usize)>,
    /// Some class had candidates but sat at the edge cap.
    pub truncated: bool,
    /// Description of the exhausted budget, if any.
    pub budget_hit: Option<String>,
    pub stopped: bool,
    pub elapsed_seconds: f64,
}

impl WalkStats {
    /// The walk covered every class (no budget, no edge cap, no early stop).
    pub fn complete(&self) -> bool {
        !self.truncated && self.budget_hit.is_none() && !self.stopped
    }
}

struct Walker<'v, F> {
    d: usize,
    n: usize,
    limit: u32,
    max_edges: usize,
    budget: SearchBudget,
    start: Instant,
    seen: HashSet<Vec<u8>>,
    stats: WalkStats,
    visit: &'v mut F,
}

enum Flow {
    Continue,
    Halt,
}

impl<F: FnMut(&ClassView) -> Result<Visit>> Walker<'_, F> {
    fn expand(
        &mut self,
        edges: &mut Vec<u64>,
        candidates: &[u64],
        automorphisms: &[Vec<usize>],
    ) -> Result<Flow> {
        if candidates.is_empty() {
            return Ok(Flow::Continue);
        }
        if edges.len() >= self.max_edges {
            self.stats.truncated = true;
            return Ok(Flow::Continue);
        }
        let reps = orbit_representatives(candidates, automorphisms);
        // canonical forms of all children; independent, so computed in parallel
        let leaf_budget = self.budget.leaf_budget;
        let d = self.d;
        let children: Vec<Result<(Vec<u8>, Vec<Vec<usize>>)>> = reps
            .par_iter()
            .map(|&e| {
                let mut child = edges.clone();
                child.push(e);
                let c = canonicalize(d, &child, leaf_budget)?;
                Ok((key_bytes(d, self.n, &c.edges), c.automorphisms))
            })
            .collect();
        for (&e, child) in reps.iter().zip(children) {
            let (key, autos) = match child {
                Ok(x) => x,
                Err(Error::ResourceExhausted(msg)) => {
                    self.stats.budget_hit = Some(msg);
                    return Ok(Flow::Halt);
                }
                Err(other) => return Err(other),
            };
            if !self.seen.insert(key) {
                continue;
            }
            self.stats.classes_visited += 1;
            edges.push(e);
            let b = edges.len();
            self.stats.edges_range = Some(match self.stats.edges_range {
                None => (b, b),
                Some((lo, hi)) => (lo.min(b), hi.max(b)),
            });
            let child_cands: Vec<u64> = candidates
                .iter()
                .copied()
                .filter(|&c| c != e && (c & e).count_ones() < self.limit)
                .collect();
            let verdict = (self.visit)(&ClassView {
                edges,
                candidates: &child_cands,
            })?;
            let flow = match verdict {
                Visit::Stop => {
                    self.stats.stopped = true;
                    Flow::Halt
                }
                Visit::Skip => Flow::Continue,
                Visit::Descend => {
                    if let Some(msg) = self.over_budget() {
                        self.stats.budget_hit = Some(msg);
                        Flow::Halt
                    } else {
                        self.expand(edges, &child_cands, &autos)?
                    }
                }
            };
            edges.pop();
            if let Flow::Halt = flow {
                return Ok(Flow::Halt);
            }
            if let Some(msg) = self.over_budget() {
                self.stats.budget_hit = Some(msg);
                return Ok(Flow::Halt);
            }
        }
        Ok(Flow::Continue)
    }

    fn over_budget(&self) -> Option<String> {
        if let Some(c) = self.budget.max_classes {
            if self.stats.classes_visited >= c {
                return Some(format!("class budget of {c} reached"));
            }
        }
        if let Some(s) = self.budget.max_seconds {
            if self.start.elapsed().as_secs_f64() >= s {
                return Some(format!("time budget of {s} s reached"));
            }
        }
        None
    }
}

/// Keeps the smallest candidate of every orbit under the given automorphisms.
fn orbit_representatives(candidates: &[u64], automorphisms: &[Vec<usize>]) -> Vec<u64> {
    if automorphisms.is_empty() {
        return candidates.to_vec();
    }
    let index: std::collections::HashMap<u64, usize> = candidates
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let mut parent: Vec<usize> = (0..candidates.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for g in automorphisms {
        for (i, &c) in candidates.iter().enumerate() {
            let img = crate::hypergraph::permute_edge(c, g);
            if let Some(&j) = index.get(&img) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    // keep the smaller index as root so the representative is the lex-first
                    if a < b {
                        parent[b] = a;
                    } else {
                        parent[a] = b;
                    }
                }
            }
        }
    }
    (0..candidates.len())
        .filter(|&i| find(&mut parent, i) == i)
        .map(|i| candidates[i])
        .collect()
}

/// Walks all admissible classes on `d` vertices with `n`-edges whose pairwise
/// overlaps stay below `n - m`, calling `visit` once per class.
pub fn walk_classes<F>(
    d: usize,
    n: usize,
    m: usize,
    max_edges: Option<usize>,
    budget: SearchBudget,
    mut visit: F,
) -> Result<WalkStats>
where
    F: FnMut(&ClassView) -> Result<Visit>,
{
    if n == 0 || n > d || m == 0 || m >= n {
        return Err(crate::error::invalid(format!(
            "no admissible hypergraphs for (D, N, M) = ({d}, {n}, {m})"
        )));
    }
    let start = Instant::now();
    let mut w = Walker {
        d,
        n,
        limit: (n - m) as u32,
        max_edges: max_edges.unwrap_or(usize::MAX),
        budget,
        start,
        seen: HashSet::new(),
        stats: WalkStats::default(),
        visit: &mut visit,
    };
    let all = subsets_lex(d, n);
    // the empty hypergraph is invariant under every relabelling
    let sym: Vec<Vec<usize>> = (0..d.saturating_sub(1))
        .map(|i| {
            let mut g: Vec<usize> = (0..d).collect();
            g.swap(i, i + 1);
            g
        })
        .collect();
    w.expand(&mut Vec::new(), &all, &sym)?;
    w.stats.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(w.stats)
}

/// Result of [`enumerate_admissible_classes`].
#[derive(Clone, Debug)]
pub struct Enumeration {
    pub classes: Vec<Hypergraph>,
    pub stats: WalkStats,
    pub b_min: usize,
}

impl Enumeration {
    /// `false` when the listing is partial (budget or edge cap).
    pub fn complete(&self) -> bool {
        self.stats.complete()
    }
}

/// `ceil(C(D,M) / C(N,M))`: a feasible system needs at least this many columns.
pub fn b_min(d: usize, n: usize, m: usize) -> usize {
    binomial(d, m).div_ceil(binomial(n, m)) as usize
}

/// One representative per admissible isomorphism class with at least
/// `b_min` edges (and at most `max_edges`).
pub fn enumerate_admissible_classes(
    d: usize,
    n: usize,
    m: usize,
    max_edges: Option<usize>,
    budget: SearchBudget,
) -> Result<Enumeration> {
    let lo = b_min(d, n, m);
    let mut classes = Vec::new();
    let stats = walk_classes(d, n, m, max_edges, budget, |view| {
        if view.edges.len() >= lo {
            classes.push(Hypergraph::from_bits_unchecked(d, n, view.edges.to_vec()));
        }
        Ok(Visit::Descend)
    })?;
    Ok(Enumeration {
        classes,
        stats,
        b_min: lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unlimited() -> SearchBudget {
        SearchBudget::unlimited()
    }

    #[test]
    fn pairs_on_four_vertices() {
        let e = enumerate_admissible_classes(4, 2, 1, None, unlimited()).unwrap();
        assert_eq!(e.b_min, 2);
        assert!(e.complete());
        assert_eq!(e.classes.len(), 1);
        assert_eq!(e.classes[0].num_edges(), 2);
        assert_eq!(e.stats.classes_visited, 2);
    }

    #[test]
    fn pairs_on_five_vertices_cover_at_most_four() {
        let e = enumerate_admissible_classes(5, 2, 1, None, unlimited()).unwrap();
        assert!(e.complete());
        for h in &e.classes {
            assert!(h.num_edges() <= 2);
            assert!(h.degrees().iter().filter(|&&x| x > 0).count() <= 4);
        }
    }

    #[test]
    fn class_counts_match_brute_force() {
        // D = 6, N = 3, M = 1: pairwise overlaps at most 1
        let (d, n, m) = (6, 3, 1);
        let all = subsets_lex(d, n);
        let mut brute: HashSet<Vec<u8>> = HashSet::new();
        // every admissible family, by subset enumeration over at most 4 edges
        fn rec(
            all: &[u64],
            start: usize,
            cur: &mut Vec<u64>,
            out: &mut HashSet<Vec<u8>>,
            d: usize,
            n: usize,
        ) {
            if !cur.is_empty() {
                let c = canonicalize(d, cur, usize::MAX).unwrap();
                out.insert(key_bytes(d, n, &c.edges));
            }
            for i in start..all.len() {
                if cur.iter().all(|&e| (e & all[i]).count_ones() < 2) {
                    cur.push(all[i]);
                    rec(all, i + 1, cur, out, d, n);
                    cur.pop();
                }
            }
        }
        rec(&all, 0, &mut Vec::new(), &mut brute, d, n);
        let mut walked = 0;
        let stats = walk_classes(d, n, m, None, unlimited(), |_| {
            walked += 1;
            Ok(Visit::Descend)
        })
        .unwrap();
        assert_eq!(walked, brute.len());
        assert_eq!(stats.classes_visited as usize, brute.len());
    }

    #[test]
    fn budget_marks_incomplete() {
        let budget = SearchBudget {
            max_classes: Some(3),
            ..SearchBudget::unlimited()
        };
        let e = enumerate_admissible_classes(8, 3, 1, None, budget).unwrap();
        assert!(!e.complete());
        assert!(e.stats.budget_hit.is_some());
        let capped = enumerate_admissible_classes(6, 2, 1, Some(2), unlimited()).unwrap();
        assert!(capped.stats.truncated);
    }
}
