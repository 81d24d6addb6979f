//! Orbitals, orbital subsets, Slater determinants and N-fermion states.
//!
//! Orbitals are labelled `1..=D` at every public boundary and stored as bit
//! `i - 1` of a `u64`, so `D` is capped at [`MAX_ORBITALS`].

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{invalid, Result};

pub const MAX_ORBITALS: usize = 64;

/// Normalisation tolerance for [`FermionState::new`].
pub const NORM_TOL: f64 = 1e-12;

fn binomial_table() -> &'static [[u64; MAX_ORBITALS + 1]; MAX_ORBITALS + 1] {
    static TABLE: OnceLock<Box<[[u64; MAX_ORBITALS + 1]; MAX_ORBITALS + 1]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([[0u64; MAX_ORBITALS + 1]; MAX_ORBITALS + 1]);
        for n in 0..=MAX_ORBITALS {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1].saturating_add(if k < n { t[n - 1][k] } else { 0 });
            }
        }
        t
    })
}

/// `C(n, k)`, zero when `k > n`. Exact for `n <= 64`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    if n <= MAX_ORBITALS {
        return binomial_table()[n][k];
    }
    // only reached by callers outside the orbital range
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// A set of orbitals out of `D`, stored as a bitset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitalSubset {
    bits: u64,
    d: u8,
}

impl OrbitalSubset {
    /// Builds a subset from raw bits; bit `i` is orbital `i + 1`.
    pub fn from_bits(bits: u64, d: usize) -> Result<Self> {
        if d > MAX_ORBITALS {
            return Err(invalid(format!("D = {d} exceeds {MAX_ORBITALS} orbitals")));
        }
        if d < MAX_ORBITALS && bits >> d != 0 {
            return Err(invalid(format!("bits {bits:#x} outside D = {d}")));
        }
        Ok(Self { bits, d: d as u8 })
    }

    pub(crate) fn from_bits_unchecked(bits: u64, d: usize) -> Self {
        debug_assert!(d <= MAX_ORBITALS && (d == MAX_ORBITALS || bits >> d == 0));
        Self { bits, d: d as u8 }
    }

    /// Builds a subset from 1-based orbital labels; duplicates are rejected.
    pub fn from_orbitals(orbitals: &[usize], d: usize) -> Result<Self> {
        if d > MAX_ORBITALS {
            return Err(invalid(format!("D = {d} exceeds {MAX_ORBITALS} orbitals")));
        }
        let mut bits = 0u64;
        for &o in orbitals {
            if o == 0 || o > d {
                return Err(invalid(format!("orbital {o} outside 1..={d}")));
            }
            let b = 1u64 << (o - 1);
            if bits & b != 0 {
                return Err(invalid(format!("orbital {o} repeated")));
            }
            bits |= b;
        }
        Ok(Self { bits, d: d as u8 })
    }

    pub fn empty(d: usize) -> Self {
        Self::from_bits_unchecked(0, d)
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn num_orbitals(&self) -> usize {
        self.d as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    /// Whether the 1-based orbital is in the set.
    pub fn contains(&self, orbital: usize) -> bool {
        orbital >= 1 && orbital <= self.d as usize && self.bits >> (orbital - 1) & 1 == 1
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn difference(&self, other: &Self) -> Self {
        Self::from_bits_unchecked(self.bits & !other.bits, self.d as usize)
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_bits_unchecked(self.bits | other.bits, self.d as usize)
    }

    /// Orbitals not in the set, within `1..=D`.
    pub fn complement(&self) -> Self {
        Self::from_bits_unchecked(!self.bits & full_mask(self.d as usize), self.d as usize)
    }

    /// Ascending 1-based orbital labels.
    pub fn orbitals(&self) -> Vec<usize> {
        self.indices().map(|i| i + 1).collect()
    }

    /// Ascending 0-based bit positions.
    pub fn indices(&self) -> BitIter {
        BitIter(self.bits)
    }
}

impl fmt::Debug for OrbitalSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, o) in self.orbitals().into_iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{o}")?;
        }
        write!(f, "}}/{}", self.d)
    }
}

/// Ascending positions of the set bits of a word.
pub struct BitIter(pub u64);

impl Iterator for BitIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

#[inline]
pub(crate) fn full_mask(d: usize) -> u64 {
    if d >= 64 {
        u64::MAX
    } else {
        (1u64 << d) - 1
    }
}

/// Lexicographic rank of an M-subset among all `C(D, M)` subsets.
pub fn rank_subset(subset: &OrbitalSubset, d: usize, m: usize) -> Result<u64> {
    if subset.len() != m {
        return Err(invalid(format!(
            "subset has {} orbitals, expected {m}",
            subset.len()
        )));
    }
    if d > MAX_ORBITALS || (d < 64 && subset.bits >> d != 0) {
        return Err(invalid(format!(
            "subset {subset:?} does not fit in D = {d}"
        )));
    }
    Ok(rank_bits(subset.bits, d, m))
}

/// Unchecked lexicographic rank; `bits` must have exactly `m` bits below `d`.
///
/// Uses `rank = C(D,M) - 1 - sum_i C(D-1-c_i, M-i)` over the sorted 0-based
/// elements `c_0 < ... < c_{M-1}`.
#[inline]
pub fn rank_bits(bits: u64, d: usize, m: usize) -> u64 {
    let t = binomial_table();
    let mut acc = 0u64;
    let mut rest = bits;
    let mut i = 0usize;
    while rest != 0 {
        let c = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        acc += t[d - 1 - c][m - i];
        i += 1;
    }
    t[d][m] - 1 - acc
}

/// Inverse of [`rank_subset`].
pub fn unrank_subset(rank: u64, d: usize, m: usize) -> Result<OrbitalSubset> {
    if d > MAX_ORBITALS || m > d {
        return Err(invalid(format!("no {m}-subsets of {d} orbitals")));
    }
    let total = binomial(d, m);
    if rank >= total {
        return Err(invalid(format!("rank {rank} outside 0..{total}")));
    }
    Ok(OrbitalSubset::from_bits_unchecked(
        unrank_bits(rank, d, m),
        d,
    ))
}

pub(crate) fn unrank_bits(mut rank: u64, d: usize, m: usize) -> u64 {
    let mut bits = 0u64;
    let mut start = 0usize;
    for i in 0..m {
        let remaining = m - i - 1;
        let mut c = start;
        loop {
            // subsets whose i-th element is c
            let block = binomial(d - 1 - c, remaining);
            if rank < block {
                break;
            }
            rank -= block;
            c += 1;
        }
        bits |= 1u64 << c;
        start = c + 1;
    }
    bits
}

/// All M-subsets of `0..d` as bitsets in lexicographic (rank) order.
pub fn subsets_lex(d: usize, m: usize) -> Vec<u64> {
    let total = binomial(d, m) as usize;
    let mut out = Vec::with_capacity(total);
    if m > d {
        return out;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        out.push(idx.iter().fold(0u64, |acc, &i| acc | 1u64 << i));
        // advance to the next combination in lexicographic order
        let mut k = m;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < d - m + k {
                break;
            }
            if k == 0 {
                return out;
            }
        }
        idx[k] += 1;
        for j in k + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Visits every `m`-subset of the set bits of `bits`, as a bitset.
pub fn for_each_subset_of(bits: u64, m: usize, mut f: impl FnMut(u64)) {
    let elems: Vec<u32> = BitIter(bits).map(|i| i as u32).collect();
    let n = elems.len();
    if m > n {
        return;
    }
    if m == 0 {
        f(0);
        return;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        f(idx.iter().fold(0u64, |acc, &i| acc | 1u64 << elems[i]));
        let mut k = m;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if idx[k] < n - m + k {
                break;
            }
            if k == 0 {
                return;
            }
        }
        idx[k] += 1;
        for j in k + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// One basis ket: the set of occupied orbitals.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlaterDeterminant {
    occupied: OrbitalSubset,
}

impl SlaterDeterminant {
    pub fn new(occupied: OrbitalSubset) -> Self {
        Self { occupied }
    }

    pub fn from_orbitals(orbitals: &[usize], d: usize) -> Result<Self> {
        OrbitalSubset::from_orbitals(orbitals, d).map(Self::new)
    }

    #[inline]
    pub fn occupied(&self) -> &OrbitalSubset {
        &self.occupied
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.occupied.bits
    }

    pub fn num_particles(&self) -> usize {
        self.occupied.len()
    }
}

impl fmt::Debug for SlaterDeterminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for o in self.occupied.orbitals() {
            write!(f, " {o}")?;
        }
        write!(f, " >")
    }
}

/// Sign of the permutation taking the sorted occupied list to
/// `(sorted alpha, sorted rest)`.
pub fn split_sign(sd: &SlaterDeterminant, alpha: &OrbitalSubset) -> Result<i8> {
    if !alpha.is_subset_of(sd.occupied()) {
        return Err(invalid(format!("{alpha:?} is not contained in {sd:?}")));
    }
    Ok(split_sign_bits(sd.bits(), alpha.bits()))
}

/// Unchecked [`split_sign`]: counts pairs `(a, b)` with `a` in alpha,
/// `b` in the remainder and `b < a`.
#[inline]
pub fn split_sign_bits(occupied: u64, alpha: u64) -> i8 {
    let beta = occupied & !alpha;
    let mut inversions = 0u32;
    let mut rest = alpha;
    while rest != 0 {
        let a = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (beta & ((1u64 << a) - 1)).count_ones();
    }
    if inversions & 1 == 0 {
        1
    } else {
        -1
    }
}

/// Number of orbitals the two determinants have in common.
#[inline]
pub fn overlap_count(a: &SlaterDeterminant, b: &SlaterDeterminant) -> usize {
    (a.bits() & b.bits()).count_ones() as usize
}

/// A normalised superposition of distinct N-particle Slater determinants.
///
/// Each amplitude is the antisymmetric coefficient tensor evaluated on the
/// ascending orbital tuple of its determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionState {
    d: usize,
    n: usize,
    terms: Vec<(SlaterDeterminant, Complex64)>,
}

impl FermionState {
    /// Validates and wraps the terms. Norm must be 1 within [`NORM_TOL`].
    pub fn new(d: usize, n: usize, terms: Vec<(SlaterDeterminant, Complex64)>) -> Result<Self> {
        Self::with_norm_tolerance(d, n, terms, NORM_TOL)
    }

    /// As [`FermionState::new`] with a caller-chosen norm tolerance; amplitudes are kept as given.
    pub fn with_norm_tolerance(
        d: usize,
        n: usize,
        terms: Vec<(SlaterDeterminant, Complex64)>,
        tol: f64,
    ) -> Result<Self> {
        let state = Self::unchecked(d, n, terms)?;
        let norm2 = state.norm_sqr();
        if (norm2 - 1.0).abs() > tol {
            return Err(invalid(format!("state norm^2 = {norm2}, expected 1")));
        }
        Ok(state)
    }

    /// Drops zero amplitudes and rescales to unit norm.
    pub fn normalized(
        d: usize,
        n: usize,
        terms: Vec<(SlaterDeterminant, Complex64)>,
    ) -> Result<Self> {
        let terms: Vec<_> = terms
            .into_iter()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .collect();
        let mut state = Self::unchecked(d, n, terms)?;
        let norm = state.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(invalid("state has zero or non-finite norm"));
        }
        for (_, a) in &mut state.terms {
            *a /= norm;
        }
        Ok(state)
    }

    /// Structural checks only (sizes, distinctness, nonzero amplitudes).
    fn unchecked(d: usize, n: usize, terms: Vec<(SlaterDeterminant, Complex64)>) -> Result<Self> {
        if d == 0 || d > MAX_ORBITALS {
            return Err(invalid(format!("D = {d} outside 1..={MAX_ORBITALS}")));
        }
        if n > d {
            return Err(invalid(format!("N = {n} exceeds D = {d}")));
        }
        if terms.is_empty() {
            return Err(invalid("state has no terms"));
        }
        let mut seen = std::collections::HashSet::with_capacity(terms.len());
        for (sd, a) in &terms {
            if sd.occupied.num_orbitals() != d || (d < 64 && sd.bits() >> d != 0) {
                return Err(invalid(format!("{sd:?} not over D = {d} orbitals")));
            }
            if sd.num_particles() != n {
                return Err(invalid(format!(
                    "{sd:?} has {} particles, expected {n}",
                    sd.num_particles()
                )));
            }
            if a.norm_sqr() == 0.0 || !a.re.is_finite() || !a.im.is_finite() {
                return Err(invalid(format!(
                    "amplitude of {sd:?} is zero or non-finite"
                )));
            }
            if !seen.insert(sd.bits()) {
                return Err(invalid(format!("{sd:?} appears twice")));
            }
        }
        Ok(Self { d, n, terms })
    }

    /// A single determinant with amplitude 1.
    pub fn slater(sd: SlaterDeterminant) -> Self {
        Self {
            d: sd.occupied.num_orbitals(),
            n: sd.num_particles(),
            terms: vec![(sd, Complex64::new(1.0, 0.0))],
        }
    }

    #[inline]
    pub fn num_orbitals(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn num_particles(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn terms(&self) -> &[(SlaterDeterminant, Complex64)] {
        &self.terms
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, sd: &SlaterDeterminant) -> Complex64 {
        self.terms
            .iter()
            .find(|(s, _)| s == sd)
            .map(|(_, a)| *a)
            .unwrap_or_default()
    }
}
