//! N-uniform hypergraphs over `D` vertices.
//!
//! A set of `b` Slater determinants with `N` particles is the same thing as an
//! N-uniform hypergraph with `b` edges: vertices are orbitals and each edge is
//! the occupied set of one determinant. Edges are stored as `u64` bitsets in
//! the same encoding as [`OrbitalSubset`].

mod canon;
mod io;

pub use canon::{
    canonicalize, key_bytes, permute_bits as permute_edge, Canonical, DEFAULT_LEAF_BUDGET,
};
pub use io::{parse_hypergraph, write_hypergraph};

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::fock::{
    binomial, for_each_subset_of, full_mask, rank_bits, subsets_lex, OrbitalSubset, MAX_ORBITALS,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    d: usize,
    n: usize,
    edges: Vec<u64>,
}

impl Hypergraph {
    /// Validates uniformity, range and distinctness of the edges.
    pub fn from_bits(d: usize, n: usize, edges: Vec<u64>) -> Result<Self> {
        if d == 0 || d > MAX_ORBITALS {
            return Err(Error::Validation(format!(
                "D = {d} outside 1..={MAX_ORBITALS}"
            )));
        }
        if n > d {
            return Err(Error::Validation(format!("edge size {n} exceeds D = {d}")));
        }
        let mask = full_mask(d);
        let mut seen = HashSet::with_capacity(edges.len());
        for &e in &edges {
            if e & !mask != 0 {
                return Err(Error::Validation(format!(
                    "edge {e:#x} uses vertices beyond {d}"
                )));
            }
            if e.count_ones() as usize != n {
                return Err(Error::Validation(format!(
                    "edge {:?} has {} vertices, expected {n}",
                    OrbitalSubset::from_bits_unchecked(e, d),
                    e.count_ones()
                )));
            }
            if !seen.insert(e) {
                return Err(Error::Validation(format!(
                    "edge {:?} repeated",
                    OrbitalSubset::from_bits_unchecked(e, d)
                )));
            }
        }
        Ok(Self { d, n, edges })
    }

    pub fn new(d: usize, n: usize, edges: &[OrbitalSubset]) -> Result<Self> {
        Self::from_bits(d, n, edges.iter().map(|e| e.bits()).collect())
    }

    /// Builds from 1-based vertex lists.
    pub fn from_lists(d: usize, n: usize, edges: &[Vec<usize>]) -> Result<Self> {
        let bits = edges
            .iter()
            .map(|e| OrbitalSubset::from_orbitals(e, d).map(|s| s.bits()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(d, n, bits)
    }

    pub(crate) fn from_bits_unchecked(d: usize, n: usize, edges: Vec<u64>) -> Self {
        Self { d, n, edges }
    }

    /// All `C(D, N)` possible edges.
    pub fn complete(d: usize, n: usize) -> Result<Self> {
        Self::from_bits(d, n, subsets_lex(d, n))
    }

    pub fn num_vertices(&self) -> usize {
        self.d
    }

    pub fn edge_size(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[u64] {
        &self.edges
    }

    pub fn edge_subsets(&self) -> Vec<OrbitalSubset> {
        self.edges
            .iter()
            .map(|&e| OrbitalSubset::from_bits_unchecked(e, self.d))
            .collect()
    }

    /// Number of edges containing each vertex.
    pub fn degrees(&self) -> Vec<usize> {
        (0..self.d)
            .map(|v| self.edges.iter().filter(|&&e| e >> v & 1 == 1).count())
            .collect()
    }

    pub fn incidence_matrix(&self, m: usize) -> Result<IncidenceMatrix> {
        if m == 0 || m > self.n {
            return Err(crate::error::invalid(format!(
                "M = {m} outside 1..={}",
                self.n
            )));
        }
        let rows = binomial(self.d, m) as usize;
        let cols = self.edges.len();
        let mut data = vec![0u8; rows * cols];
        for (k, &e) in self.edges.iter().enumerate() {
            for_each_subset_of(e, m, |beta| {
                data[rank_bits(beta, self.d, m) as usize * cols + k] = 1;
            });
        }
        Ok(IncidenceMatrix {
            rows,
            cols,
            m,
            data,
        })
    }

    /// Every pair of edges shares fewer than `N - M` vertices.
    pub fn satisfies_overlap(&self, m: usize) -> bool {
        let limit = self.n.saturating_sub(m) as u32;
        for (i, &a) in self.edges.iter().enumerate() {
            for &b in &self.edges[i + 1..] {
                if (a & b).count_ones() >= limit {
                    return false;
                }
            }
        }
        true
    }

    /// `Some(lambda)` if every t-subset of vertices lies in exactly `lambda` edges.
    pub fn is_t_design(&self, t: usize) -> Option<u64> {
        if t == 0 || t > self.n {
            return None;
        }
        let counts = self.t_subset_counts(t);
        let lambda = counts[0];
        counts.iter().all(|&c| c == lambda).then_some(lambda as u64)
    }

    pub fn is_steiner(&self, t: usize) -> bool {
        self.is_t_design(t) == Some(1)
    }

    /// Number of edges containing each t-subset, indexed by rank.
    pub fn t_subset_counts(&self, t: usize) -> Vec<u32> {
        let mut counts = vec![0u32; binomial(self.d, t) as usize];
        for &e in &self.edges {
            for_each_subset_of(e, t, |beta| {
                counts[rank_bits(beta, self.d, t) as usize] += 1
            });
        }
        counts
    }

    /// Replaces every edge by its vertex complement; the result is `(D - N)`-uniform.
    pub fn complement(&self) -> Self {
        let mask = full_mask(self.d);
        Self {
            d: self.d,
            n: self.d - self.n,
            edges: self.edges.iter().map(|&e| !e & mask).collect(),
        }
    }

    /// Byte key equal for two hypergraphs iff they are isomorphic.
    pub fn canonical_form(&self) -> Result<Vec<u8>> {
        let c = canonicalize(self.d, &self.edges, DEFAULT_LEAF_BUDGET)?;
        Ok(key_bytes(self.d, self.n, &c.edges))
    }

    /// Applies a vertex relabelling `v -> perm[v]` (0-based).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.d {
            return Err(crate::error::invalid("permutation length differs from D"));
        }
        let edges = self
            .edges
            .iter()
            .map(|&e| canon::permute_bits(e, perm))
            .collect();
        Self::from_bits(self.d, self.n, edges)
    }

    /// Edges sorted by rank, handy for comparisons that ignore edge order.
    pub fn sorted_edges(&self) -> Vec<u64> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }
}

/// Binary `C(D,M) x b` matrix with entry 1 iff the M-subset lies in the edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    m: usize,
    data: Vec<u8>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn subset_size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_sums(&self) -> Vec<u32> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|&x| x as u32).sum())
            .collect()
    }

    pub fn col_sums(&self) -> Vec<u32> {
        let mut s = vec![0u32; self.cols];
        for r in 0..self.rows {
            for (c, &x) in self.row(r).iter().enumerate() {
                s[c] += x as u32;
            }
        }
        s
    }
}

/// Lines of the projective plane over the 3-element field: 13 points, 13 lines,
/// every pair of points on exactly one line.
pub fn projective_plane_order3() -> Hypergraph {
    // points are 1-dimensional subspaces of GF(3)^3, normalised so the first
    // nonzero coordinate is 1
    let mut points: Vec<[u8; 3]> = Vec::with_capacity(13);
    for a in 0..3u8 {
        for b in 0..3u8 {
            for c in 0..3u8 {
                let v = [a, b, c];
                if let Some(&first) = v.iter().find(|&&x| x != 0) {
                    if first == 1 {
                        points.push(v);
                    }
                }
            }
        }
    }
    // lines are the same vectors read as normals: point p lies on line l iff p.l = 0
    let mut edges = Vec::with_capacity(13);
    for l in &points {
        let mut bits = 0u64;
        for (i, p) in points.iter().enumerate() {
            let dot = (p[0] * l[0] + p[1] * l[1] + p[2] * l[2]) % 3;
            if dot == 0 {
                bits |= 1 << i;
            }
        }
        edges.push(bits);
    }
    edges.sort_unstable();
    Hypergraph::from_bits_unchecked(13, 4, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hg(d: usize, n: usize, edges: &[&[usize]]) -> Hypergraph {
        Hypergraph::from_lists(d, n, &edges.iter().map(|e| e.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn incidence_examples() {
        let a = hg(4, 2, &[&[1, 2], &[3, 4]]).incidence_matrix(1).unwrap();
        assert_eq!((a.rows(), a.cols()), (4, 2));
        assert_eq!(a.row(0), &[1, 0]);
        assert_eq!(a.row(1), &[1, 0]);
        assert_eq!(a.row(2), &[0, 1]);
        assert_eq!(a.row(3), &[0, 1]);

        let complete = Hypergraph::complete(4, 2).unwrap();
        let a = complete.incidence_matrix(2).unwrap();
        for r in 0..6 {
            for c in 0..6 {
                assert_eq!(a.get(r, c), (r == c) as u8);
            }
        }

        let h = hg(6, 3, &[&[1, 2, 3], &[4, 5, 6], &[1, 4, 5]]);
        let a = h.incidence_matrix(2).unwrap();
        let r45 = rank_bits(0b11000, 6, 2) as usize;
        assert_eq!(a.row(r45), &[0, 1, 1]);
        assert!(a.col_sums().iter().all(|&s| s == 3));
    }

    #[test]
    fn overlap_examples() {
        assert!(!hg(4, 3, &[&[1, 2, 3], &[1, 2, 4]]).satisfies_overlap(1));
        assert!(hg(6, 2, &[&[1, 2], &[3, 4], &[5, 6]]).satisfies_overlap(1));
        assert!(hg(5, 3, &[&[1, 2, 3]]).satisfies_overlap(2));
    }

    #[test]
    fn designs() {
        let pp = projective_plane_order3();
        assert_eq!(pp.num_edges(), 13);
        assert!(pp.edges().iter().all(|e| e.count_ones() == 4));
        assert_eq!(pp.is_t_design(2), Some(1));
        assert!(pp.is_steiner(2));
        assert_eq!(pp.is_t_design(1), Some(4));

        let k = Hypergraph::complete(6, 3).unwrap();
        for t in 1..=3 {
            assert_eq!(k.is_t_design(t), Some(binomial(6 - t, 3 - t)));
        }
        assert!(k.is_steiner(3));
        assert_eq!(hg(5, 2, &[&[1, 2], &[3, 4]]).is_t_design(1), None);
        assert!(hg(4, 2, &[&[1, 2], &[3, 4]]).is_steiner(1));
    }

    #[test]
    fn complement_examples() {
        let h = hg(6, 2, &[&[1, 2], &[3, 4], &[5, 6]]);
        let c = h.complement();
        assert_eq!(c.edge_size(), 4);
        assert_eq!(c, hg(6, 4, &[&[3, 4, 5, 6], &[1, 2, 5, 6], &[1, 2, 3, 4]]));
        assert_eq!(c.complement(), h);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            Hypergraph::from_lists(4, 2, &[vec![1, 2, 3]]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Hypergraph::from_lists(4, 2, &[vec![1, 2], vec![2, 1]]),
            Err(Error::Validation(_))
        ));
    }
}
