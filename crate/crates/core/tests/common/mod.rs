//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use fermi_ent::fock::{subsets_lex, FermionState};
use fermi_ent::Complex64;

/// `c_j` on an occupation bitstring: Jordan-Wigner sign from occupied orbitals below `j`.
pub fn annihilate(bits: u64, j: usize) -> Option<(u64, f64)> {
    if bits >> j & 1 == 0 {
        return None;
    }
    let below = (bits & ((1u64 << j) - 1)).count_ones();
    Some((
        bits & !(1u64 << j),
        if below.is_multiple_of(2) { 1.0 } else { -1.0 },
    ))
}

/// `c_{a_M} ... c_{a_1} |psi>` as a sparse vector, applying `c_{a_1}` first.
pub fn apply_annihilators(state: &[(u64, Complex64)], alpha: &[usize]) -> Vec<(u64, Complex64)> {
    let mut out = Vec::new();
    'terms: for &(bits, amp) in state {
        let (mut b, mut a) = (bits, amp);
        for &j in alpha {
            match annihilate(b, j) {
                Some((nb, s)) => {
                    b = nb;
                    a *= s;
                }
                None => continue 'terms,
            }
        }
        out.push((b, a));
    }
    out.sort_by_key(|t| t.0);
    out
}

fn inner(a: &[(u64, Complex64)], b: &[(u64, Complex64)]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for &(ka, va) in a {
        if let Ok(i) = b.binary_search_by_key(&ka, |t| t.0) {
            s += va.conj() * b[i].1;
        }
    }
    s
}

/// `rho_{alpha, alpha'} = <psi| c^dag_{alpha'} c_alpha |psi>` by direct operator action,
/// rows and columns in lexicographic subset order.
pub fn operator_action_dm(state: &FermionState, m: usize) -> Vec<Vec<Complex64>> {
    let d = state.num_orbitals();
    let psi: Vec<(u64, Complex64)> = state
        .terms()
        .iter()
        .map(|(sd, a)| (sd.bits(), *a))
        .collect();
    let subsets = subsets_lex(d, m);
    let images: Vec<Vec<(u64, Complex64)>> = subsets
        .iter()
        .map(|&s| {
            let idx: Vec<usize> = (0..d).filter(|&i| s >> i & 1 == 1).collect();
            apply_annihilators(&psi, &idx)
        })
        .collect();
    (0..subsets.len())
        .map(|i| {
            (0..subsets.len())
                .map(|j| inner(&images[j], &images[i]))
                .collect()
        })
        .collect()
}

/// Sign of bringing `c^dag` operators in the order `seq` to ascending order,
/// by counting inversions (each adjacent swap of two creators gives -1).
pub fn anticommutation_sign(seq: &[usize]) -> i8 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Deterministic small-state generator that does not use the library's RNG.
pub fn lcg_state(d: usize, n: usize, seed: u64) -> FermionState {
    use fermi_ent::fock::{OrbitalSubset, SlaterDeterminant};
    let mut x = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    let mut next = || {
        x = x
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let terms = subsets_lex(d, n)
        .into_iter()
        .map(|b| {
            let occ = OrbitalSubset::from_bits(b, d).unwrap();
            (SlaterDeterminant::new(occ), Complex64::new(next(), next()))
        })
        .collect();
    FermionState::normalized(d, n, terms).unwrap()
}
