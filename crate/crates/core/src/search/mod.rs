//! Existence of maximally M-body entangled states for given `(D, N, M)`.
//!
//! A state `sum_k a_k |SD_k>` whose determinants pairwise share fewer than
//! `N - M` orbitals has a diagonal `rho^(M)`, and it is proportional to the
//! identity iff `x_k = |a_k|^2` solves `A^(M) x = (C(N,M)/C(D,M)) 1`. The
//! search therefore runs over isomorphism classes of admissible hypergraphs
//! and asks an exact LP whether the system has a nonnegative solution.

pub mod enumerate;
pub mod lp;
pub mod steiner;

pub use enumerate::{
    b_min, enumerate_admissible_classes, walk_classes, ClassView, Enumeration, Visit, WalkStats,
};
pub use lp::{lp_feasible, ratio_to_f64, FeasibilityProblem, FeasibilitySolution};
pub use steiner::{divisibility_failure, find_steiner_system, SteinerSearch};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dm::build_dm;
use crate::error::{invalid, Result};
use crate::fock::{
    binomial, for_each_subset_of, full_mask, rank_bits, FermionState, OrbitalSubset,
    SlaterDeterminant,
};
use crate::hypergraph::{Hypergraph, DEFAULT_LEAF_BUDGET};

/// Tolerance used when certifying a reconstructed state.
pub const VERIFY_TOL: f64 = 1e-10;

/// Systems with at most this many equations are also solved at non-maximal
/// classes, which finds solutions earlier; larger ones only at maximal classes.
pub const EAGER_LP_MAX_ROWS: u64 = 16;

/// Limits on a search. `None` means unlimited.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchBudget {
    pub max_classes: Option<u64>,
    pub max_seconds: Option<f64>,
    /// Leaves per canonical labelling.
    pub leaf_budget: usize,
    /// Nodes of the exact-cover search used for Steiner systems.
    pub steiner_nodes: u64,
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        Self {
            max_classes: None,
            max_seconds: None,
            leaf_budget: DEFAULT_LEAF_BUDGET,
            steiner_nodes: u64::MAX,
        }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_classes: Some(5_000_000),
            max_seconds: Some(3600.0),
            leaf_budget: DEFAULT_LEAF_BUDGET,
            steiner_nodes: 50_000_000,
        }
    }
}

/// Classification before any search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AprioriVerdict {
    NotExists {
        reason: String,
    },
    /// `N = 2M` or `N = D - 2M`: only Steiner systems (or their complements) work.
    SteinerRequired,
    NeedsSearch,
}

pub fn classify_existence(d: usize, n: usize, m: usize) -> Result<AprioriVerdict> {
    if m == 0 || n == 0 || n > d {
        return Err(invalid(format!(
            "need 1 <= M and 1 <= N <= D, got (D, N, M) = ({d}, {n}, {m})"
        )));
    }
    if n < 2 * m {
        return Ok(AprioriVerdict::NotExists {
            reason: format!("N = {n} < 2M = {}", 2 * m),
        });
    }
    if n + 2 * m > d {
        return Ok(AprioriVerdict::NotExists {
            reason: format!("N = {n} > D - 2M = {}", d as i64 - 2 * m as i64),
        });
    }
    if n == 2 * m || n + 2 * m == d {
        return Ok(AprioriVerdict::SteinerRequired);
    }
    Ok(AprioriVerdict::NeedsSearch)
}

/// A certified maximally entangled state together with its support.
#[derive(Clone, Debug)]
pub struct MaximalState {
    pub state: FermionState,
    pub hypergraph: Hypergraph,
    pub x: Vec<BigRational>,
    /// Largest entrywise deviation of `rho^(M)` from `mu I`.
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub enum ExistenceVerdict {
    NotExists {
        reason: String,
    },
    ExistsWithState(MaximalState),
    /// Found in the `N = 2M` / `N = D - 2M` regime, where every solution comes
    /// from a Steiner system or its complement.
    ExistsSteinerOnly(MaximalState),
    ExhaustedNoSolution {
        reason: String,
    },
    Unknown {
        budget: String,
    },
}

impl ExistenceVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            Self::NotExists { .. } => "NotExists",
            Self::ExistsWithState(_) => "ExistsWithState",
            Self::ExistsSteinerOnly(_) => "ExistsSteinerOnly",
            Self::ExhaustedNoSolution { .. } => "ExhaustedNoSolution",
            Self::Unknown { .. } => "Unknown",
        }
    }

    pub fn maximal_state(&self) -> Option<&MaximalState> {
        match self {
            Self::ExistsWithState(s) | Self::ExistsSteinerOnly(s) => Some(s),
            _ => None,
        }
    }

    /// `Some(true)` if a state exists, `Some(false)` if none does, `None` if undecided.
    pub fn exists(&self) -> Option<bool> {
        match self {
            Self::ExistsWithState(_) | Self::ExistsSteinerOnly(_) => Some(true),
            Self::NotExists { .. } | Self::ExhaustedNoSolution { .. } => Some(false),
            Self::Unknown { .. } => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub verdict: ExistenceVerdict,
    pub classes_visited: u64,
    pub edges_range: Option<(usize, usize)>,
    pub elapsed_seconds: f64,
    pub budget: SearchBudget,
    pub max_edges: Option<usize>,
    /// `"a-priori"`, `"steiner"` or `"class-enumeration"`.
    pub method: &'static str,
}

/// Decides existence for `(D, N, M)` within the budget.
pub fn search_maximal_state(
    d: usize,
    n: usize,
    m: usize,
    max_edges: Option<usize>,
    budget: SearchBudget,
) -> Result<SearchReport> {
    let start = std::time::Instant::now();
    let mut report = SearchReport {
        d,
        n,
        m,
        verdict: ExistenceVerdict::Unknown {
            budget: String::new(),
        },
        classes_visited: 0,
        edges_range: None,
        elapsed_seconds: 0.0,
        budget,
        max_edges,
        method: "a-priori",
    };
    match classify_existence(d, n, m)? {
        AprioriVerdict::NotExists { reason } => {
            report.verdict = ExistenceVerdict::NotExists { reason }
        }
        AprioriVerdict::SteinerRequired => {
            report.method = "steiner";
            report.verdict = steiner_verdict(d, n, m, budget)?;
        }
        AprioriVerdict::NeedsSearch => {
            report.method = "class-enumeration";
            let (verdict, stats) = enumeration_verdict(d, n, m, max_edges, budget)?;
            report.verdict = verdict;
            report.classes_visited = stats.classes_visited;
            report.edges_range = stats.edges_range;
        }
    }
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn steiner_verdict(d: usize, n: usize, m: usize, budget: SearchBudget) -> Result<ExistenceVerdict> {
    let k = 2 * m;
    Ok(match find_steiner_system(m, k, d, budget.steiner_nodes) {
        SteinerSearch::Found(blocks) => {
            let design = Hypergraph::from_bits(d, k, blocks)?;
            // for N = D - 2M the supporting hypergraph is the complement
            let hg = if n == k { design } else { design.complement() };
            let b = hg.num_edges();
            let x = vec![BigRational::new(BigInt::from(1), BigInt::from(b)); b];
            ExistenceVerdict::ExistsSteinerOnly(certify(&hg, m, x)?)
        }
        SteinerSearch::Indivisible { i } => ExistenceVerdict::ExhaustedNoSolution {
            reason: format!(
                "no S({m},{k},{d}): C({},{}) is not divisible by C({},{})",
                d - i,
                m - i,
                k - i,
                m - i
            ),
        },
        SteinerSearch::Exhausted { nodes } => ExistenceVerdict::ExhaustedNoSolution {
            reason: format!("exact-cover search for S({m},{k},{d}) exhausted after {nodes} nodes"),
        },
        SteinerSearch::Budget { nodes } => ExistenceVerdict::Unknown {
            budget: format!("exact-cover search for S({m},{k},{d}) stopped after {nodes} nodes"),
        },
    })
}

/// Bitset over M-subset ranks.
struct Coverage {
    words: Vec<u64>,
    total: usize,
}

impl Coverage {
    fn new(total: usize) -> Self {
        Self {
            words: vec![0; total.div_ceil(64)],
            total,
        }
    }

    fn add_edge(&mut self, e: u64, d: usize, m: usize) {
        for_each_subset_of(e, m, |s| {
            let r = rank_bits(s, d, m) as usize;
            self.words[r / 64] |= 1 << (r % 64);
        });
    }

    fn full(&self) -> bool {
        let full_words = self.total / 64;
        self.words[..full_words].iter().all(|&w| w == u64::MAX)
            && (self.total.is_multiple_of(64)
                || self.words[full_words] == (1u64 << (self.total % 64)) - 1)
    }
}

fn covers(edges: &[u64], d: usize, m: usize, total: usize) -> bool {
    if m == 1 {
        return edges.iter().fold(0u64, |a, &e| a | e) == full_mask(d);
    }
    let mut c = Coverage::new(total);
    for &e in edges {
        c.add_edge(e, d, m);
        if c.full() {
            return true;
        }
    }
    c.full()
}

fn enumeration_verdict(
    d: usize,
    n: usize,
    m: usize,
    max_edges: Option<usize>,
    budget: SearchBudget,
) -> Result<(ExistenceVerdict, WalkStats)> {
    let rows = binomial(d, m);
    let lo = b_min(d, n, m);
    let eager = rows <= EAGER_LP_MAX_ROWS;
    let mut found: Option<MaximalState> = None;
    let stats = walk_classes(d, n, m, max_edges, budget, |view| {
        let b = view.edges.len();
        let maximal = view.candidates.is_empty();
        if b >= lo && (maximal || eager) && covers(view.edges, d, m, rows as usize) {
            let hg = Hypergraph::from_bits_unchecked(d, n, view.edges.to_vec());
            if let Some(sol) = lp_feasible(&FeasibilityProblem::new(&hg, m)?)? {
                found = Some(state_from_solution(&hg, m, &sol)?);
                return Ok(Visit::Stop);
            }
        }
        if maximal {
            return Ok(Visit::Skip);
        }
        // no superset can cover an M-subset that neither edges nor candidates contain
        let mut all = view.edges.to_vec();
        all.extend_from_slice(view.candidates);
        if !covers(&all, d, m, rows as usize) {
            return Ok(Visit::Skip);
        }
        Ok(Visit::Descend)
    })?;
    let verdict = match found {
        Some(s) => ExistenceVerdict::ExistsWithState(s),
        None if stats.complete() => ExistenceVerdict::ExhaustedNoSolution {
            reason: format!(
                "no admissible class among {} admits a solution",
                stats.classes_visited
            ),
        },
        None => ExistenceVerdict::Unknown {
            budget: stats
                .budget_hit
                .clone()
                .unwrap_or_else(|| format!("edge cap {:?} truncated the search", max_edges)),
        },
    };
    Ok((verdict, stats))
}

/// Drops zero weights, sets `a_k = sqrt(x_k)` with phase +1 and certifies.
fn state_from_solution(
    hg: &Hypergraph,
    m: usize,
    sol: &FeasibilitySolution,
) -> Result<MaximalState> {
    let mut support = Vec::new();
    let mut x = Vec::new();
    for (&e, xk) in hg.edges().iter().zip(&sol.x) {
        if !xk.is_zero() {
            support.push(e);
            x.push(xk.clone());
        }
    }
    let hg = Hypergraph::from_bits(hg.num_vertices(), hg.edge_size(), support)?;
    certify(&hg, m, x)
}

fn certify(hg: &Hypergraph, m: usize, x: Vec<BigRational>) -> Result<MaximalState> {
    let p = FeasibilityProblem::new(hg, m)?;
    if !p.is_solution(&x) || x.iter().any(|v| v.is_negative()) {
        return Err(crate::Error::NumericalFailure(
            "weights do not solve the system exactly".into(),
        ));
    }
    let (d, n) = (hg.num_vertices(), hg.edge_size());
    let terms = hg
        .edges()
        .iter()
        .zip(&x)
        .map(|(&e, xk)| {
            let sd = SlaterDeterminant::new(OrbitalSubset::from_bits_unchecked(e, d));
            (sd, Complex64::new(ratio_to_f64(xk).sqrt(), 0.0))
        })
        .collect();
    let state = FermionState::normalized(d, n, terms)?;
    let check = verify_maximal(&state, m, VERIFY_TOL)?;
    if !check.maximal {
        return Err(crate::Error::NumericalFailure(format!(
            "reconstructed state deviates from mu I by {:e}",
            check.deviation
        )));
    }
    Ok(MaximalState {
        state,
        hypergraph: hg.clone(),
        x,
        deviation: check.deviation,
    })
}

/// Uniform superposition over the edges of an M-design that satisfies the
/// overlap criterion.
pub fn design_to_state(hg: &Hypergraph, m: usize) -> Result<FermionState> {
    if hg.num_edges() == 0 {
        return Err(invalid("empty hypergraph"));
    }
    if m == 0 || m >= hg.edge_size() {
        return Err(invalid(format!(
            "M = {m} outside 1..={}",
            hg.edge_size().saturating_sub(1)
        )));
    }
    if !hg.satisfies_overlap(m) {
        return Err(invalid(format!(
            "edges overlap in {} or more vertices",
            hg.edge_size() - m
        )));
    }
    if hg.is_t_design(m).is_none() {
        return Err(invalid(format!("hypergraph is not a {m}-design")));
    }
    let amp = Complex64::new(1.0 / (hg.num_edges() as f64).sqrt(), 0.0);
    let d = hg.num_vertices();
    let terms = hg
        .edges()
        .iter()
        .map(|&e| {
            (
                SlaterDeterminant::new(OrbitalSubset::from_bits_unchecked(e, d)),
                amp,
            )
        })
        .collect();
    FermionState::new(d, hg.edge_size(), terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MaximalityCheck {
    pub maximal: bool,
    pub deviation: f64,
}

/// Compares `rho^(M)` entrywise with `(C(N,M)/C(D,M)) I`.
pub fn verify_maximal(state: &FermionState, m: usize, tol: f64) -> Result<MaximalityCheck> {
    let (d, n) = (state.num_orbitals(), state.num_particles());
    let mu = binomial(n, m) as f64 / binomial(d, m) as f64;
    let dm = build_dm(state, m)?;
    let deviation = dm.deviation_from_scaled_identity(mu);
    Ok(MaximalityCheck {
        maximal: deviation < tol,
        deviation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NestingEntry {
    pub m: usize,
    pub maximal: bool,
    pub deviation: f64,
    /// `A^(m) x = (C(N,m)/C(D,m)) 1` in exact arithmetic, when weights are known.
    pub exact_identity: Option<bool>,
}

/// Maximality at every cut `1..=M`, plus the exact incidence identity when
/// the support and weights are supplied.
pub fn nesting_check(
    state: &FermionState,
    m: usize,
    weights: Option<(&Hypergraph, &[BigRational])>,
) -> Result<Vec<NestingEntry>> {
    (1..=m)
        .map(|mp| {
            let c = verify_maximal(state, mp, VERIFY_TOL)?;
            let exact_identity = match weights {
                Some((hg, x)) => Some(FeasibilityProblem::new(hg, mp)?.is_solution(x)),
                None => None,
            };
            Ok(NestingEntry {
                m: mp,
                maximal: c.maximal,
                deviation: c.deviation,
                exact_identity,
            })
        })
        .collect()
}

/// Replaces every determinant by its orbital complement, keeping amplitudes.
pub fn particle_hole_dual(state: &FermionState) -> Result<FermionState> {
    let d = state.num_orbitals();
    let terms = state
        .terms()
        .iter()
        .map(|(sd, a)| (SlaterDeterminant::new(sd.occupied().complement()), *a))
        .collect();
    FermionState::new(d, d - state.num_particles(), terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dm::build_ghz;
    use crate::hypergraph::projective_plane_order3;

    #[test]
    fn classification() {
        assert!(matches!(
            classify_existence(10, 1, 1).unwrap(),
            AprioriVerdict::NotExists { .. }
        ));
        assert_eq!(
            classify_existence(13, 4, 2).unwrap(),
            AprioriVerdict::SteinerRequired
        );
        assert_eq!(
            classify_existence(8, 4, 1).unwrap(),
            AprioriVerdict::NeedsSearch
        );
        assert_eq!(
            classify_existence(8, 6, 1).unwrap(),
            AprioriVerdict::SteinerRequired
        );
        assert!(matches!(
            classify_existence(8, 7, 1).unwrap(),
            AprioriVerdict::NotExists { .. }
        ));
    }

    #[test]
    fn small_searches() {
        let r = search_maximal_state(4, 2, 1, None, SearchBudget::default()).unwrap();
        let s = r.verdict.maximal_state().unwrap();
        assert_eq!(s.state.terms().len(), 2);
        let r = search_maximal_state(7, 2, 1, None, SearchBudget::default()).unwrap();
        assert!(matches!(
            r.verdict,
            ExistenceVerdict::ExhaustedNoSolution { .. }
        ));
        let r = search_maximal_state(6, 3, 1, None, SearchBudget::default()).unwrap();
        assert!(
            matches!(r.verdict, ExistenceVerdict::ExistsWithState(_)),
            "{:?}",
            r.verdict.name()
        );
    }

    #[test]
    fn design_state_and_duals() {
        let pp = projective_plane_order3();
        let s = design_to_state(&pp, 2).unwrap();
        let nest = nesting_check(
            &s,
            2,
            Some((&pp, &vec![BigRational::new(1.into(), 13.into()); 13])),
        )
        .unwrap();
        assert!(nest
            .iter()
            .all(|e| e.maximal && e.exact_identity == Some(true)));
        let dual = particle_hole_dual(&s).unwrap();
        assert_eq!(dual.num_particles(), 9);
        let c = verify_maximal(&dual, 2, 1e-10).unwrap();
        assert!(c.maximal, "{}", c.deviation);
        assert!(design_to_state(&Hypergraph::complete(4, 2).unwrap(), 1).is_err());
    }

    #[test]
    fn ghz_maximality() {
        assert!(
            verify_maximal(&build_ghz(4, 2).unwrap(), 1, 1e-12)
                .unwrap()
                .maximal
        );
        assert!(
            !verify_maximal(&build_ghz(8, 2).unwrap(), 2, 1e-10)
                .unwrap()
                .maximal
        );
        let dual = particle_hole_dual(&build_ghz(6, 3).unwrap()).unwrap();
        assert!(verify_maximal(&dual, 1, 1e-12).unwrap().maximal);
    }
}
