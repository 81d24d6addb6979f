//! M-body reduced density matrices and their entropies.
//!
//! For a state `sum_k a_k |SD_k>` the coefficient matrix `Gamma^(M)` has rows
//! indexed by M-subsets `alpha` and columns by (N-M)-subsets `beta`; the
//! entry at `(alpha, beta)` is the signed amplitude of the determinant
//! `alpha | beta`. The density matrix is `rho^(M) = Gamma Gamma^dagger` with
//! trace `C(N, M)`.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::{
    binomial, for_each_subset_of, rank_bits, split_sign_bits, subsets_lex, FermionState,
    OrbitalSubset, SlaterDeterminant,
};
use crate::linalg::{determinant, hermitian_eigenvalues, CMatrix};

/// Eigenvalues in `[-CLAMP_TOL, 0)` are reported as zero.
pub const CLAMP_TOL: f64 = 1e-10;
/// Entrywise hermiticity tolerance accepted by [`spectrum`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues above this count as nonzero in [`spectra_match`].
pub const NONZERO_EIG: f64 = 1e-9;
/// Amplitudes below this are dropped by [`rotate_basis`].
pub const ROTATE_DROP: f64 = 1e-14;

/// Sparse `C(D,M) x C(D,N-M)` coefficient matrix; each `(row, col)` appears once.
#[derive(Clone, Debug)]
pub struct GammaMatrix {
    d: usize,
    n: usize,
    m: usize,
    rows: usize,
    cols: usize,
    /// `(row, col, value)` grouped by column.
    entries: Vec<(u32, u32, Complex64)>,
}

impl GammaMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cut(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[(u32, u32, Complex64)] {
        &self.entries
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.entries.iter().map(|(_, _, z)| z.norm_sqr()).sum()
    }

    /// Checks `||Gamma||_F^2 = C(N, M)` within `tol`.
    pub fn check_norm(&self, tol: f64) -> Result<()> {
        let want = binomial(self.n, self.m) as f64;
        let got = self.frobenius_norm_sqr();
        if (got - want).abs() > tol {
            return Err(Error::Validation(format!(
                "||Gamma||_F^2 = {got}, expected {want}"
            )));
        }
        Ok(())
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows, self.cols);
        for &(r, c, z) in &self.entries {
            out[(r as usize, c as usize)] = z;
        }
        out
    }

    pub fn orbitals(&self) -> (usize, usize) {
        (self.d, self.n)
    }
}

/// Builds `Gamma^(M)` for `1 <= M <= N - 1`.
pub fn build_gamma(state: &FermionState, m: usize) -> Result<GammaMatrix> {
    let (d, n) = (state.num_orbitals(), state.num_particles());
    if m == 0 || m >= n {
        return Err(invalid(format!(
            "cut M = {m} outside 1..={}",
            n.saturating_sub(1)
        )));
    }
    let rows = binomial(d, m);
    let cols = binomial(d, n - m);
    if rows > u32::MAX as u64 || cols > u32::MAX as u64 {
        return Err(Error::ResourceExhausted(format!(
            "Gamma^({m}) is {rows}x{cols}"
        )));
    }
    let per_term = binomial(n, m) as usize;
    let mut entries = Vec::with_capacity(state.terms().len() * per_term);
    for (sd, amp) in state.terms() {
        let occ = sd.bits();
        for_each_subset_of(occ, m, |alpha| {
            let beta = occ & !alpha;
            let sign = split_sign_bits(occ, alpha) as f64;
            entries.push((
                rank_bits(alpha, d, m) as u32,
                rank_bits(beta, d, n - m) as u32,
                amp * sign,
            ));
        });
    }
    entries.sort_unstable_by_key(|&(r, c, _)| (c, r));
    Ok(GammaMatrix {
        d,
        n,
        m,
        rows: rows as usize,
        cols: cols as usize,
        entries,
    })
}

/// Hermitian PSD matrix `rho^(M)` with a lazily computed spectrum.
#[derive(Debug)]
pub struct DensityMatrix {
    d: usize,
    n: usize,
    m: usize,
    matrix: CMatrix,
    spectrum: OnceLock<Vec<f64>>,
}

impl Clone for DensityMatrix {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self {
            d: self.d,
            n: self.n,
            m: self.m,
            matrix: self.matrix.clone(),
            spectrum,
        }
    }
}

impl DensityMatrix {
    /// Wraps an arbitrary matrix as `rho^(M)` of an `(D, N)` system.
    pub fn from_matrix(d: usize, n: usize, m: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(invalid("density matrix must be square"));
        }
        Ok(Self {
            d,
            n,
            m,
            matrix,
            spectrum: OnceLock::new(),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cut(&self) -> usize {
        self.m
    }

    pub fn num_orbitals(&self) -> usize {
        self.d
    }

    pub fn num_particles(&self) -> usize {
        self.n
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Largest entrywise deviation from `c * I`.
    pub fn deviation_from_scaled_identity(&self, c: f64) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { c } else { 0.0 };
                worst = worst.max((self.matrix[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// `rho^(M) = Gamma Gamma^dagger`, accumulated column by column.
pub fn build_dm(state: &FermionState, m: usize) -> Result<DensityMatrix> {
    let gamma = build_gamma(state, m)?;
    Ok(dm_from_gamma(&gamma))
}

pub fn dm_from_gamma(gamma: &GammaMatrix) -> DensityMatrix {
    let n = gamma.rows;
    let mut rho = vec![Complex64::new(0.0, 0.0); n * n];
    let e = &gamma.entries;
    let mut start = 0;
    while start < e.len() {
        let col = e[start].1;
        let mut end = start;
        while end < e.len() && e[end].1 == col {
            end += 1;
        }
        let block = &e[start..end];
        for &(ri, _, vi) in block {
            let row = &mut rho[ri as usize * n..(ri as usize + 1) * n];
            for &(rj, _, vj) in block {
                row[rj as usize] += vi * vj.conj();
            }
        }
        start = end;
    }
    let matrix = CMatrix::from_vec(n, n, rho).expect("square by construction");
    DensityMatrix {
        d: gamma.d,
        n: gamma.n,
        m: gamma.m,
        matrix,
        spectrum: OnceLock::new(),
    }
}

/// Descending eigenvalues; entries in `[-1e-10, 0)` are clamped to zero.
pub fn spectrum(dm: &DensityMatrix) -> Result<&[f64]> {
    if let Some(s) = dm.spectrum.get() {
        return Ok(s);
    }
    let defect = dm.matrix.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(invalid(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }
    let mut ev = hermitian_eigenvalues(&dm.matrix)?;
    for x in &mut ev {
        if *x < 0.0 && *x >= -CLAMP_TOL {
            *x = 0.0;
        }
    }
    Ok(dm.spectrum.get_or_init(|| ev))
}

/// `-sum lambda ln lambda` with `0 ln 0 = 0`.
pub fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &x in eigenvalues {
        if x < -CLAMP_TOL {
            return Err(Error::NumericalFailure(format!(
                "negative eigenvalue {x:e}"
            )));
        }
        if x > 0.0 {
            s -= x * x.ln();
        }
    }
    Ok(s)
}

pub fn entropy(dm: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(spectrum(dm)?)
}

/// `C(N,M) ln(C(D,M) / C(N,M))`.
pub fn max_entropy(d: usize, n: usize, m: usize) -> f64 {
    let cn = binomial(n, m) as f64;
    cn * (binomial(d, m) as f64 / cn).ln()
}

/// Entropy of `rho^(M) / C(N,M)`, i.e. `S / C(N,M) + ln C(N,M)`.
pub fn normalized_entropy(dm: &DensityMatrix) -> Result<f64> {
    let cn = binomial(dm.n, dm.m) as f64;
    Ok(entropy(dm)? / cn + cn.ln())
}

/// Normalised entropy at any cut `0 <= m <= N`; the trivial cuts are pure.
pub fn normalized_entropy_at(state: &FermionState, m: usize) -> Result<f64> {
    let n = state.num_particles();
    if m == 0 || m == n {
        return Ok(0.0);
    }
    if m > n {
        return Err(invalid(format!("cut {m} exceeds N = {n}")));
    }
    normalized_entropy(&build_dm(state, m)?)
}

/// `r` disjoint consecutive blocks of `D / r` orbitals, amplitude `1/sqrt(r)` each.
pub fn build_ghz(d: usize, r: usize) -> Result<FermionState> {
    if r == 0 || d == 0 || !d.is_multiple_of(r) {
        return Err(invalid(format!("r = {r} does not divide D = {d}")));
    }
    let n = d / r;
    let amp = Complex64::new(1.0 / (r as f64).sqrt(), 0.0);
    let terms = (0..r)
        .map(|b| {
            let orbs: Vec<usize> = (b * n + 1..=(b + 1) * n).collect();
            SlaterDeterminant::from_orbitals(&orbs, d).map(|sd| (sd, amp))
        })
        .collect::<Result<Vec<_>>>()?;
    FermionState::new(d, n, terms)
}

/// `(A^dagger)^k |0>` with `A^dagger = sum_i c^dagger_{2i-1} c^dagger_{2i}`, normalised.
pub fn build_paired_state(d: usize, k: usize) -> Result<FermionState> {
    if !d.is_multiple_of(2) || d == 0 {
        return Err(invalid(format!("D = {d} must be even and positive")));
    }
    let pairs = d / 2;
    if k == 0 || k > pairs {
        return Err(invalid(format!("k = {k} outside 1..={pairs}")));
    }
    // pair operators are bosonic, so every placement appears with sign +1
    let amp = Complex64::new(1.0 / (binomial(pairs, k) as f64).sqrt(), 0.0);
    let terms = subsets_lex(pairs, k)
        .into_iter()
        .map(|chosen| {
            let bits = crate::fock::BitIter(chosen).fold(0u64, |acc, p| acc | 0b11 << (2 * p));
            (
                SlaterDeterminant::new(OrbitalSubset::from_bits_unchecked(bits, d)),
                amp,
            )
        })
        .collect();
    FermionState::new(d, 2 * k, terms)
}

/// Substitutes `c^dagger_i -> sum_k u_ik c~^dagger_k` and re-expands.
pub fn rotate_basis(state: &FermionState, u: &CMatrix) -> Result<FermionState> {
    let (d, n) = (state.num_orbitals(), state.num_particles());
    if u.rows() != d || u.cols() != d {
        return Err(invalid(format!(
            "unitary is {}x{}, expected {d}x{d}",
            u.rows(),
            u.cols()
        )));
    }
    let defect = u.unitarity_defect();
    if defect > 1e-10 {
        return Err(invalid(format!(
            "matrix is not unitary (defect {defect:e})"
        )));
    }
    let sources: Vec<(Vec<usize>, Complex64)> = state
        .terms()
        .iter()
        .map(|(sd, a)| (sd.occupied().indices().collect(), *a))
        .collect();
    let mut terms = Vec::new();
    for target in subsets_lex(d, n) {
        let cols: Vec<usize> = crate::fock::BitIter(target).collect();
        let mut amp = Complex64::new(0.0, 0.0);
        for (rows, a) in &sources {
            let sub = CMatrix::from_fn(n, n, |i, j| u[(rows[i], cols[j])]);
            amp += a * determinant(&sub)?;
        }
        if amp.norm() >= ROTATE_DROP {
            terms.push((
                SlaterDeterminant::new(OrbitalSubset::from_bits_unchecked(target, d)),
                amp,
            ));
        }
    }
    FermionState::normalized(d, n, terms)
}

/// Outcome of comparing the nonzero spectra of `rho^(M)` and `rho^(N-M)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SpectraMatch {
    pub matches: bool,
    pub max_deviation: f64,
}

pub fn spectra_match(state: &FermionState, m: usize) -> Result<SpectraMatch> {
    let n = state.num_particles();
    let a = build_dm(state, m)?;
    let b = build_dm(state, n - m)?;
    let nz = |s: &[f64]| {
        s.iter()
            .copied()
            .filter(|&x| x > NONZERO_EIG)
            .collect::<Vec<_>>()
    };
    let (sa, sb) = (nz(spectrum(&a)?), nz(spectrum(&b)?));
    if sa.len() != sb.len() {
        return Ok(SpectraMatch {
            matches: false,
            max_deviation: f64::INFINITY,
        });
    }
    let dev = sa
        .iter()
        .zip(&sb)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(SpectraMatch {
        matches: dev <= 1e-8,
        max_deviation: dev,
    })
}

/// Both entropy inequalities on normalised density matrices. Slacks are
/// `rhs - lhs`, so a nonnegative slack means the inequality holds.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Subadditivity {
    pub holds: bool,
    pub slack: f64,
    pub strong_holds: Option<bool>,
    pub strong_slack: Option<f64>,
}

/// `S(M1+M2) <= S(M1) + S(M2)` and, with `m3`, `S(M1+M2+M3) <= S(M1+M3) + S(M2+M3) - S(M3)`.
pub fn check_subadditivity(
    state: &FermionState,
    m1: usize,
    m2: usize,
    m3: Option<usize>,
) -> Result<Subadditivity> {
    let n = state.num_particles();
    let total = m1 + m2 + m3.unwrap_or(0);
    if m1 == 0 || m2 == 0 || m3 == Some(0) || total > n {
        return Err(invalid(format!(
            "cuts ({m1}, {m2}, {m3:?}) do not fit N = {n}"
        )));
    }
    let s = |m: usize| normalized_entropy_at(state, m);
    let slack = s(m1)? + s(m2)? - s(m1 + m2)?;
    let (strong_holds, strong_slack) = match m3 {
        Some(m3) => {
            let sl = s(m1 + m3)? + s(m2 + m3)? - s(m3)? - s(m1 + m2 + m3)?;
            (Some(sl >= -1e-12), Some(sl))
        }
        None => (None, None),
    };
    Ok(Subadditivity {
        holds: slack >= -1e-12,
        slack,
        strong_holds,
        strong_slack,
    })
}
