//! Serialisable reports shared by the CLI and the C bindings.

use num_rational::BigRational;
use serde::Serialize;

use crate::dm::{
    build_dm, entropy, max_entropy, normalized_entropy, spectra_match, spectrum, SpectraMatch,
};
use crate::error::Result;
use crate::fock::{binomial, FermionState};
use crate::hypergraph::Hypergraph;
use crate::random::EnsembleReport;
use crate::search::{
    nesting_check, particle_hole_dual, verify_maximal, ExistenceVerdict, NestingEntry, SearchReport,
};
use crate::statefile::StateFile;

/// Tolerance for the `maximal` flag of [`analyze`].
pub const ANALYZE_MAXIMAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct CutReport {
    #[serde(rename = "M")]
    pub m: usize,
    /// Descending eigenvalues of `rho^(M)`.
    pub spectrum: Vec<f64>,
    #[serde(rename = "S")]
    pub entropy: f64,
    #[serde(rename = "S_n")]
    pub normalized_entropy: f64,
    #[serde(rename = "S_max")]
    pub max_entropy: f64,
    pub maximal: bool,
    /// Largest entrywise deviation from `(C(N,M)/C(D,M)) I`.
    pub max_deviation: f64,
    /// Nonzero spectra of `rho^(M)` and `rho^(N-M)`.
    pub spectra_match: SpectraMatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub version: &'static str,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub num_terms: usize,
    pub cuts: Vec<CutReport>,
}

pub fn analyze(state: &FermionState, cuts: &[usize]) -> Result<AnalyzeReport> {
    let (d, n) = (state.num_orbitals(), state.num_particles());
    let cuts = cuts
        .iter()
        .map(|&m| {
            let dm = build_dm(state, m)?;
            let mu = binomial(n, m) as f64 / binomial(d, m) as f64;
            let max_deviation = dm.deviation_from_scaled_identity(mu);
            Ok(CutReport {
                m,
                spectrum: spectrum(&dm)?.to_vec(),
                entropy: entropy(&dm)?,
                normalized_entropy: normalized_entropy(&dm)?,
                max_entropy: max_entropy(d, n, m),
                maximal: max_deviation < ANALYZE_MAXIMAL_TOL,
                max_deviation,
                spectra_match: spectra_match(state, m)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(AnalyzeReport {
        version: crate::VERSION,
        d,
        n,
        num_terms: state.terms().len(),
        cuts,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DesignReport {
    pub version: &'static str,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub t: usize,
    pub num_edges: usize,
    pub is_design: bool,
    pub lambda: Option<u64>,
    pub is_steiner: bool,
    /// `b C(N,t) = lambda C(D,t)`, counted both ways over (t-subset, edge) pairs.
    pub lambda_relation_ok: bool,
}

pub fn design_report(hg: &Hypergraph, t: usize) -> DesignReport {
    let (d, n, b) = (hg.num_vertices(), hg.edge_size(), hg.num_edges());
    let lambda = hg.is_t_design(t);
    let lambda_relation_ok = lambda
        .is_some_and(|l| b as u128 * binomial(n, t) as u128 == l as u128 * binomial(d, t) as u128);
    DesignReport {
        version: crate::VERSION,
        d,
        n,
        t,
        num_edges: b,
        is_design: lambda.is_some(),
        lambda,
        is_steiner: lambda == Some(1),
        lambda_relation_ok,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParticleHoleReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub maximal: bool,
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchJson {
    pub version: &'static str,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub method: &'static str,
    pub classes_visited: u64,
    pub edges_range: Option<(usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateFile>,
    /// Edges as 1-based orbital lists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypergraph: Option<Vec<Vec<usize>>>,
    /// Exact weights `|alpha_k|^2` as `p/q` strings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nesting: Option<Vec<NestingEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub particle_hole: Option<ParticleHoleReport>,
    pub budget: crate::search::SearchBudget,
    pub max_edges: Option<usize>,
    pub elapsed_seconds: f64,
}

fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Flattens a search report; found states also get nesting and dual checks.
pub fn search_json(r: &SearchReport) -> Result<SearchJson> {
    let reason = match &r.verdict {
        ExistenceVerdict::NotExists { reason }
        | ExistenceVerdict::ExhaustedNoSolution { reason } => Some(reason.clone()),
        ExistenceVerdict::Unknown { budget } => Some(budget.clone()),
        _ => None,
    };
    let mut out = SearchJson {
        version: crate::VERSION,
        d: r.d,
        n: r.n,
        m: r.m,
        verdict: r.verdict.name(),
        reason,
        method: r.method,
        classes_visited: r.classes_visited,
        edges_range: r.edges_range,
        state: None,
        hypergraph: None,
        weights: None,
        deviation: None,
        nesting: None,
        particle_hole: None,
        budget: r.budget,
        max_edges: r.max_edges,
        elapsed_seconds: r.elapsed_seconds,
    };
    if let Some(s) = r.verdict.maximal_state() {
        out.state = Some(StateFile::from_state(&s.state));
        out.hypergraph = Some(
            s.hypergraph
                .edge_subsets()
                .iter()
                .map(|e| e.orbitals())
                .collect(),
        );
        out.weights = Some(s.x.iter().map(rational_string).collect());
        out.deviation = Some(s.deviation);
        out.nesting = Some(nesting_check(&s.state, r.m, Some((&s.hypergraph, &s.x)))?);
        let dual = particle_hole_dual(&s.state)?;
        if dual.num_particles() > r.m {
            let c = verify_maximal(&dual, r.m, 1e-9)?;
            out.particle_hole = Some(ParticleHoleReport {
                n: dual.num_particles(),
                maximal: c.maximal,
                deviation: c.deviation,
            });
        }
    }
    Ok(out)
}

/// Header row then one row per bin.
pub fn histogram_csv(report: &EnsembleReport) -> String {
    let mut s =
        String::from("bin_left,bin_right,empirical_density,analytic_semicircle,analytic_mp\n");
    for b in &report.histogram {
        s.push_str(&format!(
            "{:e},{:e},{:e},{:e},{:e}\n",
            b.bin_left, b.bin_right, b.empirical_density, b.analytic_semicircle, b.analytic_mp
        ));
    }
    s
}
