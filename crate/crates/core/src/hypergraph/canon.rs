//! Canonical labelling of hypergraphs by individualisation and refinement.
//!
//! Vertex colours are refined until stable using, for every vertex, the
//! multiset of colour-multisets of the edges through it. Non-discrete
//! colourings branch on the first non-singleton cell; each discrete leaf gives
//! a relabelled sorted edge list and the smallest one is the canonical form.
//! Leaves that tie with the best give automorphisms, which are used to skip
//! branches lying in an already explored orbit.

use crate::error::{Error, Result};

/// Search-tree leaves allowed per canonicalisation before giving up.
pub const DEFAULT_LEAF_BUDGET: usize = 200_000;

#[derive(Clone, Debug)]
pub struct Canonical {
    /// Relabelled edges in ascending order.
    pub edges: Vec<u64>,
    /// `labeling[v]` is the canonical label of input vertex `v`.
    pub labeling: Vec<usize>,
    /// Automorphisms of the input found during the search, as `v -> perm[v]`.
    pub automorphisms: Vec<Vec<usize>>,
    pub leaves: usize,
}

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

pub fn permute_bits(bits: u64, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    let mut rest = bits;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= 1u64 << perm[v];
    }
    out
}

struct Ctx<'a> {
    d: usize,
    edges: &'a [u64],
    /// edges incident to each vertex
    incident: Vec<Vec<usize>>,
    best: Option<(Vec<u64>, Vec<usize>)>,
    automorphisms: Vec<Vec<usize>>,
    leaves: usize,
    budget: usize,
    // scratch
    edge_hash: Vec<u64>,
    buf: Vec<u64>,
}

impl Ctx<'_> {
    /// Refines `colors` (dense ranks) to an equitable-ish stable colouring.
    fn refine(&mut self, colors: &mut [usize]) {
        let d = self.d;
        let mut ncolors = count_colors(colors);
        loop {
            if ncolors == d {
                return;
            }
            for (k, &e) in self.edges.iter().enumerate() {
                self.buf.clear();
                let mut rest = e;
                while rest != 0 {
                    let v = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    self.buf.push(colors[v] as u64);
                }
                self.buf.sort_unstable();
                self.edge_hash[k] = self
                    .buf
                    .iter()
                    .fold(0x9e3779b97f4a7c15u64, |h, &c| mix(h ^ c));
            }
            let mut keyed: Vec<(usize, u64, usize)> = (0..d)
                .map(|v| {
                    self.buf.clear();
                    self.buf
                        .extend(self.incident[v].iter().map(|&k| self.edge_hash[k]));
                    self.buf.sort_unstable();
                    let h = self
                        .buf
                        .iter()
                        .fold(0x632be59bd9b4e019u64, |h, &c| mix(h.wrapping_add(c)));
                    (colors[v], h, v)
                })
                .collect();
            keyed.sort_unstable();
            let mut rank = 0;
            for i in 0..d {
                if i > 0 && (keyed[i].0, keyed[i].1) != (keyed[i - 1].0, keyed[i - 1].1) {
                    rank += 1;
                }
                colors[keyed[i].2] = rank;
            }
            let next = rank + 1;
            if next == ncolors {
                return;
            }
            ncolors = next;
        }
    }

    fn search(&mut self, colors: Vec<usize>, prefix: &mut Vec<usize>) -> Result<()> {
        let d = self.d;
        let ncolors = count_colors(&colors);
        if ncolors == d {
            return self.leaf(&colors);
        }
        // first non-singleton cell
        let mut sizes = vec![0usize; ncolors];
        for &c in &colors {
            sizes[c] += 1;
        }
        let target = (0..ncolors)
            .find(|&c| sizes[c] > 1)
            .expect("non-discrete colouring");
        let cell: Vec<usize> = (0..d).filter(|&v| colors[v] == target).collect();
        let mut explored: Vec<usize> = Vec::new();
        for &w in &cell {
            if !explored.is_empty() && self.same_orbit_as_explored(w, &explored, prefix) {
                continue;
            }
            let mut child = colors.clone();
            for (v, c) in child.iter_mut().enumerate() {
                if *c > target || (*c == target && v != w) {
                    *c += 1;
                }
            }
            self.refine(&mut child);
            prefix.push(w);
            self.search(child, prefix)?;
            prefix.pop();
            explored.push(w);
        }
        Ok(())
    }

    fn same_orbit_as_explored(&self, w: usize, explored: &[usize], prefix: &[usize]) -> bool {
        // orbits of the group generated by known automorphisms fixing the prefix
        let mut parent: Vec<usize> = (0..self.d).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut any = false;
        for g in &self.automorphisms {
            if prefix.iter().any(|&v| g[v] != v) {
                continue;
            }
            any = true;
            for v in 0..self.d {
                let (a, b) = (find(&mut parent, v), find(&mut parent, g[v]));
                if a != b {
                    parent[a] = b;
                }
            }
        }
        if !any {
            return false;
        }
        let rw = find(&mut parent, w);
        explored.iter().any(|&u| find(&mut parent, u) == rw)
    }

    fn leaf(&mut self, colors: &[usize]) -> Result<()> {
        self.leaves += 1;
        if self.leaves > self.budget {
            return Err(Error::ResourceExhausted(format!(
                "canonical labelling exceeded {} search leaves",
                self.budget
            )));
        }
        let mut cert: Vec<u64> = self
            .edges
            .iter()
            .map(|&e| permute_bits(e, colors))
            .collect();
        cert.sort_unstable();
        match &self.best {
            None => self.best = Some((cert, colors.to_vec())),
            Some((best, best_colors)) => match cert.cmp(best) {
                std::cmp::Ordering::Less => self.best = Some((cert, colors.to_vec())),
                std::cmp::Ordering::Equal => {
                    // v -> w with best_colors[w] == colors[v]
                    let mut inv = vec![0usize; self.d];
                    for (w, &c) in best_colors.iter().enumerate() {
                        inv[c] = w;
                    }
                    let g: Vec<usize> = (0..self.d).map(|v| inv[colors[v]]).collect();
                    if g.iter().enumerate().any(|(v, &x)| v != x) {
                        self.automorphisms.push(g);
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
        Ok(())
    }
}

fn count_colors(colors: &[usize]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m + 1)
}

/// Canonical relabelling of the edge set of a hypergraph on `d` vertices.
pub fn canonicalize(d: usize, edges: &[u64], leaf_budget: usize) -> Result<Canonical> {
    let mut incident = vec![Vec::new(); d];
    for (k, &e) in edges.iter().enumerate() {
        let mut rest = e;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            incident[v].push(k);
        }
    }
    let mut ctx = Ctx {
        d,
        edges,
        incident,
        best: None,
        automorphisms: Vec::new(),
        leaves: 0,
        budget: leaf_budget,
        edge_hash: vec![0; edges.len()],
        buf: Vec::with_capacity(64),
    };
    let mut colors = vec![0usize; d];
    ctx.refine(&mut colors);
    ctx.search(colors, &mut Vec::new())?;
    let (edges, labeling) = ctx.best.expect("at least one leaf");
    Ok(Canonical {
        edges,
        labeling,
        automorphisms: ctx.automorphisms,
        leaves: ctx.leaves,
    })
}

/// Serialises `(D, N, b, edges)`; each edge takes `ceil(D/8)` little-endian bytes.
pub fn key_bytes(d: usize, n: usize, canonical_edges: &[u64]) -> Vec<u8> {
    let width = d.div_ceil(8);
    let mut out = Vec::with_capacity(4 + width * canonical_edges.len());
    out.push(d as u8);
    out.push(n as u8);
    out.extend_from_slice(&(canonical_edges.len() as u16).to_le_bytes());
    for &e in canonical_edges {
        out.extend_from_slice(&e.to_le_bytes()[..width]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::subsets_lex;
    use crate::hypergraph::{projective_plane_order3, Hypergraph};
    use std::collections::HashSet;

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn relabelled_pairs_agree() {
        let a = Hypergraph::from_lists(4, 2, &[vec![1, 2], vec![3, 4]]).unwrap();
        let b = Hypergraph::from_lists(4, 2, &[vec![1, 3], vec![2, 4]]).unwrap();
        assert_eq!(a.canonical_form().unwrap(), b.canonical_form().unwrap());
        let c = Hypergraph::from_lists(4, 2, &[vec![1, 2], vec![1, 3]]).unwrap();
        assert_ne!(a.canonical_form().unwrap(), c.canonical_form().unwrap());
    }

    #[test]
    fn two_edge_graphs_on_four_vertices() {
        // brute force: the class of an edge pair is the orbit under all 24 relabellings
        let pairs = subsets_lex(4, 2);
        let perms = all_perms(4);
        let mut brute: HashSet<Vec<u64>> = HashSet::new();
        let mut keys = HashSet::new();
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                let orbit_min = perms
                    .iter()
                    .map(|p| {
                        let mut e = vec![permute_bits(pairs[i], p), permute_bits(pairs[j], p)];
                        e.sort_unstable();
                        e
                    })
                    .min()
                    .unwrap();
                brute.insert(orbit_min);
                let h = Hypergraph::from_bits(4, 2, vec![pairs[i], pairs[j]]).unwrap();
                keys.insert(h.canonical_form().unwrap());
            }
        }
        assert_eq!(brute.len(), 2);
        assert_eq!(keys.len(), 2);
    }

    #[test]
    fn brute_force_classes_of_three_triples_on_five_vertices() {
        let triples = subsets_lex(5, 3);
        let perms = all_perms(5);
        let mut brute = HashSet::new();
        let mut keys = HashSet::new();
        for i in 0..triples.len() {
            for j in i + 1..triples.len() {
                for k in j + 1..triples.len() {
                    let e = [triples[i], triples[j], triples[k]];
                    let orbit_min = perms
                        .iter()
                        .map(|p| {
                            let mut v: Vec<u64> = e.iter().map(|&x| permute_bits(x, p)).collect();
                            v.sort_unstable();
                            v
                        })
                        .min()
                        .unwrap();
                    brute.insert(orbit_min);
                    keys.insert(
                        Hypergraph::from_bits(5, 3, e.to_vec())
                            .unwrap()
                            .canonical_form()
                            .unwrap(),
                    );
                }
            }
        }
        assert_eq!(keys.len(), brute.len());
    }

    #[test]
    fn projective_plane_automorphisms_prune_the_tree() {
        let pp = projective_plane_order3();
        let c = canonicalize(13, pp.edges(), DEFAULT_LEAF_BUDGET).unwrap();
        assert!(!c.automorphisms.is_empty());
        for g in &c.automorphisms {
            let mut img: Vec<u64> = pp.edges().iter().map(|&e| permute_bits(e, g)).collect();
            img.sort_unstable();
            assert_eq!(img, pp.sorted_edges());
        }
        // a generous bound; the group has order 5616
        assert!(c.leaves < 5616, "{} leaves", c.leaves);
    }

    #[test]
    fn budget_is_enforced() {
        let k = Hypergraph::complete(8, 2).unwrap();
        assert!(matches!(
            canonicalize(8, k.edges(), 3),
            Err(Error::ResourceExhausted(_))
        ));
    }
}
