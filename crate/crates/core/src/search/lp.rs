//! Exact feasibility of `A x = r 1, x >= 0` by a phase-1 simplex over
//! arbitrary-precision rationals with Bland's rule.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fock::binomial;
use crate::hypergraph::{Hypergraph, IncidenceMatrix};

/// `A^(M) x = (C(N,M) / C(D,M)) 1` with `x >= 0`.
#[derive(Clone, Debug)]
pub struct FeasibilityProblem {
    pub a: IncidenceMatrix,
    pub rhs: BigRational,
}

impl FeasibilityProblem {
    pub fn new(hg: &Hypergraph, m: usize) -> Result<Self> {
        let a = hg.incidence_matrix(m)?;
        let rhs = BigRational::new(
            BigInt::from(binomial(hg.edge_size(), m)),
            BigInt::from(binomial(hg.num_vertices(), m)),
        );
        Ok(Self { a, rhs })
    }

    pub fn num_unknowns(&self) -> usize {
        self.a.cols()
    }

    /// Exact check of `A x = rhs 1` and `x >= 0`.
    pub fn is_solution(&self, x: &[BigRational]) -> bool {
        if x.len() != self.a.cols() || x.iter().any(|v| v.is_negative()) {
            return false;
        }
        (0..self.a.rows()).all(|r| {
            let s: BigRational = self
                .a
                .row(r)
                .iter()
                .zip(x)
                .filter(|(&a, _)| a == 1)
                .map(|(_, v)| v.clone())
                .sum();
            s == self.rhs
        })
    }
}

/// Nonnegative exact solution; sums to one because every column of `A`
/// sums to `C(N,M)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeasibilitySolution {
    pub x: Vec<BigRational>,
}

impl FeasibilitySolution {
    pub fn sum(&self) -> BigRational {
        self.x.iter().cloned().sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.x.iter().map(ratio_to_f64).collect()
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Returns a basic feasible solution, or `None` when the system is infeasible.
pub fn lp_feasible(p: &FeasibilityProblem) -> Result<Option<FeasibilitySolution>> {
    let rows = p.a.rows();
    let cols = p.a.cols();
    if p.rhs.is_negative() {
        return Err(Error::InvalidArgument(
            "right-hand side must be nonnegative".into(),
        ));
    }
    if cols == 0 {
        return Ok(if p.rhs.is_zero() || rows == 0 {
            Some(FeasibilitySolution { x: vec![] })
        } else {
            None
        });
    }
    // Solve A y = 1 (y = x / rhs) so the tableau starts integral.
    let width = cols + 1;
    let mut t: Vec<BigRational> = Vec::with_capacity(rows * width);
    for r in 0..rows {
        for c in 0..cols {
            t.push(BigRational::from_integer(BigInt::from(p.a.get(r, c))));
        }
        t.push(BigRational::one());
    }
    // basis[r] is the variable basic in row r; artificials are cols + r and
    // never re-enter, so their columns are not stored.
    let mut basis: Vec<usize> = (0..rows).map(|r| cols + r).collect();
    // phase-1 reduced costs: -sum of rows with an artificial basic, and objective
    let mut cost: Vec<BigRational> = vec![BigRational::zero(); width];
    for r in 0..rows {
        for c in 0..width {
            cost[c] -= &t[r * width + c];
        }
    }
    loop {
        // Bland: lowest-index improving column
        let Some(enter) = (0..cols).find(|&c| cost[c].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for r in 0..rows {
            let a = &t[r * width + enter];
            if !a.is_positive() {
                continue;
            }
            let ratio = &t[r * width + cols] / a;
            leave = match leave {
                None => Some((r, ratio)),
                Some((lr, lratio)) => {
                    if ratio < lratio || (ratio == lratio && basis[r] < basis[lr]) {
                        Some((r, ratio))
                    } else {
                        Some((lr, lratio))
                    }
                }
            };
        }
        let Some((pr, _)) = leave else {
            // unbounded direction cannot occur in phase 1 (objective >= 0)
            return Err(Error::NumericalFailure(
                "phase-1 simplex became unbounded".into(),
            ));
        };
        pivot(&mut t, &mut cost, width, rows, pr, enter);
        basis[pr] = enter;
    }
    // objective value is -cost[rhs]
    if !cost[cols].is_zero() {
        return Ok(None);
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, &b) in basis.iter().enumerate() {
        if b < cols {
            x[b] = &t[r * width + cols] * &p.rhs;
        }
    }
    let sol = FeasibilitySolution { x };
    if !p.is_solution(&sol.x) {
        return Err(Error::NumericalFailure(
            "simplex returned a non-solution".into(),
        ));
    }
    Ok(Some(sol))
}

fn pivot(
    t: &mut [BigRational],
    cost: &mut [BigRational],
    width: usize,
    rows: usize,
    pr: usize,
    pc: usize,
) {
    let piv = t[pr * width + pc].clone();
    if !piv.is_one() {
        for c in 0..width {
            let v = &t[pr * width + c] / &piv;
            t[pr * width + c] = v;
        }
    }
    let prow: Vec<BigRational> = t[pr * width..(pr + 1) * width].to_vec();
    for r in 0..rows {
        if r == pr {
            continue;
        }
        let f = t[r * width + pc].clone();
        if f.is_zero() {
            continue;
        }
        for (c, pv) in prow.iter().enumerate() {
            if pv.is_zero() {
                continue;
            }
            let v = &t[r * width + c] - &f * pv;
            t[r * width + c] = v;
        }
    }
    let f = cost[pc].clone();
    if !f.is_zero() {
        for (c, pv) in prow.iter().enumerate() {
            if !pv.is_zero() {
                cost[c] = &cost[c] - &f * pv;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::projective_plane_order3;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ghz_edges_force_uniform_weights() {
        let h = Hypergraph::from_lists(6, 2, &[vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
        let sol = lp_feasible(&FeasibilityProblem::new(&h, 1).unwrap())
            .unwrap()
            .unwrap();
        assert_eq!(sol.x, vec![q(1, 3); 3]);
    }

    #[test]
    fn odd_dimension_pairs_are_infeasible() {
        let h = Hypergraph::from_lists(5, 2, &[vec![1, 2], vec![3, 4]]).unwrap();
        assert!(lp_feasible(&FeasibilityProblem::new(&h, 1).unwrap())
            .unwrap()
            .is_none());
    }

    #[test]
    fn projective_plane_uniform_solution() {
        let pp = projective_plane_order3();
        let p = FeasibilityProblem::new(&pp, 2).unwrap();
        let sol = lp_feasible(&p).unwrap().unwrap();
        assert_eq!(sol.x, vec![q(1, 13); 13]);
        assert_eq!(sol.sum(), q(1, 1));
    }

    #[test]
    fn rejects_wrong_vectors() {
        let h = Hypergraph::from_lists(4, 2, &[vec![1, 2], vec![3, 4]]).unwrap();
        let p = FeasibilityProblem::new(&h, 1).unwrap();
        assert!(p.is_solution(&[q(1, 2), q(1, 2)]));
        assert!(!p.is_solution(&[q(1, 4), q(3, 4)]));
        assert!(!p.is_solution(&[q(1, 2)]));
    }

    #[test]
    fn degenerate_feasible_with_redundant_rows() {
        // vertex-transitive cycle of triples on 6 points, each vertex in 3 edges
        let h = Hypergraph::from_lists(
            6,
            3,
            &[
                vec![1, 2, 3],
                vec![2, 3, 4],
                vec![3, 4, 5],
                vec![4, 5, 6],
                vec![1, 5, 6],
                vec![1, 2, 6],
            ],
        )
        .unwrap();
        let p = FeasibilityProblem::new(&h, 1).unwrap();
        let sol = lp_feasible(&p).unwrap().unwrap();
        assert!(p.is_solution(&sol.x));
        assert_eq!(sol.sum(), q(1, 1));
    }
}
