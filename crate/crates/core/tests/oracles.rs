mod common;

use fermi_ent::dm::{build_dm, build_ghz, spectrum};
use fermi_ent::fock::{split_sign_bits, FermionState, SlaterDeterminant};
use fermi_ent::linalg::{hermitian_eigenvalues, CMatrix};
use fermi_ent::Complex64;

#[test]
fn operator_oracle_detects_transposition() {
    let s = common::lcg_state(5, 3, 4);
    let dm = build_dm(&s, 1).unwrap();
    let oracle = common::operator_action_dm(&s, 1);
    let mut worst_t = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            assert!((dm.matrix()[(i, j)] - oracle[i][j]).norm() < 1e-12);
            worst_t = worst_t.max((dm.matrix()[(i, j)] - oracle[j][i]).norm());
        }
    }
    assert!(worst_t > 1e-3);
}

#[test]
fn one_body_matrix_of_ghz_by_hand() {
    // <c^dag_j c_i> for (|12> + |34>)/sqrt 2 is diag(1/2, 1/2, 1/2, 1/2)
    let dm = build_dm(&build_ghz(4, 2).unwrap(), 1).unwrap();
    assert!(dm.deviation_from_scaled_identity(0.5) < 1e-15);
}

#[test]
fn split_sign_examples() {
    // |1 2 3>: moving orbital 3 in front of 1 and 2 is an even permutation
    assert_eq!(split_sign_bits(0b111, 0b100), 1);
    assert_eq!(split_sign_bits(0b111, 0b010), -1);
    assert_eq!(common::anticommutation_sign(&[2, 1, 3]), -1);
}

/// Roots of the characteristic polynomial by Durand-Kerner on a small Hermitian PSD matrix.
fn char_poly_roots(a: &CMatrix) -> Vec<f64> {
    let n = a.rows();
    // Faddeev-LeVerrier coefficients
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    let mut mk = CMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.matmul(&mk).unwrap();
        let c_prev = coeffs[k - 1];
        next = CMatrix::from_fn(n, n, |i, j| {
            next[(i, j)]
                + if i == j {
                    c_prev
                } else {
                    Complex64::new(0.0, 0.0)
                }
        });
        let am = a.matmul(&next).unwrap();
        coeffs.push(-am.trace() / k as f64);
        mk = next;
    }
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(0.4, 0.9).powu(k as u32))
        .collect();
    for _ in 0..2000 {
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
        }
    }
    let mut r: Vec<f64> = roots.iter().map(|z| z.re).collect();
    r.sort_by(|a, b| b.total_cmp(a));
    r
}

#[test]
fn eigenvalues_match_characteristic_polynomial() {
    for seed in 0..5u64 {
        let mut x = seed + 1;
        let mut next = || {
            x = x
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let g = CMatrix::from_fn(6, 6, |_, _| Complex64::new(next(), next()));
        let a = g.matmul(&g.adjoint()).unwrap();
        let ev = hermitian_eigenvalues(&a).unwrap();
        let roots = char_poly_roots(&a);
        for (e, r) in ev.iter().zip(&roots) {
            assert!((e - r).abs() < 1e-8, "{e} vs {r}");
        }
    }
}

#[test]
fn slater_determinant_has_integer_spectrum() {
    let s = FermionState::slater(SlaterDeterminant::from_orbitals(&[1, 3, 4], 6).unwrap());
    let dm = build_dm(&s, 2).unwrap();
    let ev = spectrum(&dm).unwrap();
    assert_eq!(ev.iter().filter(|&&x| (x - 1.0).abs() < 1e-15).count(), 3);
    assert_eq!(ev.iter().filter(|&&x| x == 0.0).count(), 12);
}
