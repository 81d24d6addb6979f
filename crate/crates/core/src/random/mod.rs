//! Random N-fermion states and trace-fixed Wishart-Laguerre matrices, and
//! their spectral statistics against the analytic laws.
//!
//! Randomness comes from ChaCha8 with a 64-bit seed; realization `r` of an
//! ensemble reads stream `r` of the master seed, so a report depends only
//! on the configuration and never on thread scheduling.

pub mod density;

pub use density::{
    c1_density, compute_a1, compute_a2, effective_cut, integrate, integrate_unit, ks_distance,
    mean_entropy_prediction, mp_density, predicted_moments, semicircle_cdf, semicircle_density,
    twl_density, twl_density_with, AnalyticCurve, TwlCdf,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dm::{build_dm, entropy_of_spectrum, max_entropy, spectrum};
use crate::error::{invalid, Error, Result};
use crate::fock::{binomial, subsets_lex, FermionState, OrbitalSubset, SlaterDeterminant};
use crate::linalg::{hermitian_eigenvalues, CMatrix};

/// Standard normals by Box-Muller on top of a ChaCha8 stream.
pub struct Gaussian {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Gaussian {
    pub fn new(seed: u64) -> Self {
        Self::stream(seed, 0)
    }

    /// Independent stream `index` of `seed`.
    pub fn stream(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng, spare: None }
    }

    /// Uniform in `(0, 1]`.
    fn open_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(x) = self.spare.take() {
            return x;
        }
        let r = (-2.0 * self.open_uniform().ln()).sqrt();
        let phi = 2.0 * PI * self.open_uniform();
        self.spare = Some(r * phi.sin());
        r * phi.cos()
    }

    /// Real and imaginary parts independent `N(0, 1)`.
    pub fn complex_normal(&mut self) -> Complex64 {
        let re = self.normal();
        Complex64::new(re, self.normal())
    }
}

fn check_dims(d: usize, n: usize) -> Result<()> {
    if n == 0 || n > d || d > crate::fock::MAX_ORBITALS {
        return Err(invalid(format!(
            "need 1 <= N <= D <= 64, got D = {d}, N = {n}"
        )));
    }
    Ok(())
}

/// Gaussian amplitudes on every determinant, then normalised.
pub fn sample_random_state(d: usize, n: usize, seed: u64) -> Result<FermionState> {
    random_state_from(d, n, &mut Gaussian::new(seed))
}

pub fn random_state_from(d: usize, n: usize, g: &mut Gaussian) -> Result<FermionState> {
    check_dims(d, n)?;
    let terms = subsets_lex(d, n)
        .into_iter()
        .map(|b| {
            (
                SlaterDeterminant::new(OrbitalSubset::from_bits_unchecked(b, d)),
                g.complex_normal(),
            )
        })
        .collect();
    FermionState::normalized(d, n, terms)
}

/// `W = H H^dagger` for an `n x m` complex Gaussian `H`, rescaled to trace `trace`.
pub fn sample_trace_fixed_wl(n: usize, m: usize, trace: f64, seed: u64) -> Result<CMatrix> {
    trace_fixed_wl_from(n, m, trace, &mut Gaussian::new(seed))
}

pub fn trace_fixed_wl_from(n: usize, m: usize, trace: f64, g: &mut Gaussian) -> Result<CMatrix> {
    if n == 0 || n > m {
        return Err(invalid(format!("need 1 <= n <= m, got n = {n}, m = {m}")));
    }
    let h = CMatrix::from_fn(n, m, |_, _| g.complex_normal());
    let w = h.matmul(&h.adjoint())?;
    let scale = trace / w.trace().re;
    let mut data = w.as_slice().to_vec();
    for v in &mut data {
        *v *= scale;
    }
    // exact Hermitian symmetry after rounding
    for i in 0..n {
        data[i * n + i].im = 0.0;
        for j in 0..i {
            data[i * n + j] = data[j * n + i].conj();
        }
    }
    CMatrix::from_vec(n, n, data)
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian
/// matrix, with the phases of `R`'s diagonal absorbed.
pub fn random_unitary(d: usize, seed: u64) -> CMatrix {
    let mut g = Gaussian::new(seed);
    let mut cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| (0..d).map(|_| g.complex_normal()).collect())
        .collect();
    for k in 0..d {
        for j in 0..k {
            let (done, rest) = cols.split_at_mut(k);
            let q = &done[j];
            let proj: Complex64 = q
                .iter()
                .zip(rest[0].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            for (x, a) in rest[0].iter_mut().zip(q) {
                *x -= proj * a;
            }
        }
        let norm = cols[k].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut cols[k] {
            *x /= norm;
        }
    }
    CMatrix::from_fn(d, d, |i, j| cols[j][i])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    /// Spectra of `rho^(M)` of random states.
    State,
    /// Trace-fixed Wishart-Laguerre draws of the matching shape.
    Wl,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub realizations: usize,
    pub seed: u64,
    pub bins: usize,
    pub kind: EnsembleKind,
}

pub const DEFAULT_BINS: usize = 60;

/// `c` below which the semicircle is the reference law for the KS distance.
pub const SEMICIRCLE_C: f64 = 0.05;

impl EnsembleConfig {
    pub fn new(d: usize, n: usize, m: usize, realizations: usize, seed: u64) -> Self {
        Self {
            d,
            n,
            m,
            realizations,
            seed,
            bins: DEFAULT_BINS,
            kind: EnsembleKind::State,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dims(self.d, self.n)?;
        if self.m == 0 || self.m >= self.n {
            return Err(invalid(format!("need 1 <= M <= N - 1, got M = {}", self.m)));
        }
        if self.realizations == 0 {
            return Err(invalid("need at least one realization"));
        }
        if self.bins == 0 {
            return Err(invalid("need at least one histogram bin"));
        }
        Ok(())
    }
}

/// Eigenvalues (descending, nonzero block only) and entropy of one draw.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSample {
    pub eigenvalues: Vec<f64>,
    pub entropy: f64,
}

/// One realization of the ensemble.
pub fn sample_spectrum(cfg: &EnsembleConfig, realization: u64) -> Result<SpectralSample> {
    let mut g = Gaussian::stream(cfg.seed, realization);
    let (d, n, m) = (cfg.d, cfg.n, cfg.m);
    let mp = effective_cut(n, m);
    let block = binomial(d, mp) as usize;
    let trace = binomial(n, m) as f64;
    let mut ev = match cfg.kind {
        EnsembleKind::State => {
            let state = random_state_from(d, n, &mut g)?;
            spectrum(&build_dm(&state, m)?)?.to_vec()
        }
        EnsembleKind::Wl => {
            let w = trace_fixed_wl_from(block, binomial(d, n - mp) as usize, trace, &mut g)?;
            hermitian_eigenvalues(&w)?
        }
    };
    let sum: f64 = ev.iter().sum();
    if (sum - trace).abs() > 1e-8 {
        return Err(Error::NumericalFailure(format!(
            "realization {realization}: eigenvalues sum to {sum}, expected {trace}"
        )));
    }
    let entropy = entropy_of_spectrum(&ev).map_err(|e| match e {
        Error::NumericalFailure(msg) => {
            Error::NumericalFailure(format!("realization {realization}: {msg}"))
        }
        other => other,
    })?;
    // above N/2 the extra C(D,M) - C(D,N-M) eigenvalues vanish identically
    ev.truncate(block);
    Ok(SpectralSample {
        eigenvalues: ev,
        entropy,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_left: f64,
    pub bin_right: f64,
    pub empirical_density: f64,
    /// Bin averages of the analytic densities.
    pub analytic_semicircle: f64,
    pub analytic_mp: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub version: &'static str,
    pub config: EnsembleConfig,
    pub mu: f64,
    pub sigma: f64,
    pub c: f64,
    pub empirical_mean: f64,
    pub empirical_std: f64,
    pub mean_entropy: f64,
    #[serde(rename = "S_max")]
    pub s_max: f64,
    /// Absent for `M > N/2`, where the expansion is not stated.
    pub predicted_mean_entropy: Option<f64>,
    pub ks_semicircle: f64,
    pub ks_mp: f64,
    /// `"semicircle"` when `c < 0.05`, else `"mp"`.
    pub ks_reference: &'static str,
    pub eigenvalue_count: usize,
    /// Largest `|sum of eigenvalues - C(N,M)|` over realizations.
    pub max_trace_error: f64,
    #[serde(skip)]
    pub histogram: Vec<HistogramBin>,
}

impl EnsembleReport {
    /// KS distance against the reference law selected by `c`.
    pub fn ks(&self) -> f64 {
        if self.c < SEMICIRCLE_C {
            self.ks_semicircle
        } else {
            self.ks_mp
        }
    }
}

/// Runs all realizations (in parallel) and aggregates them in index order.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleReport> {
    cfg.validate()?;
    let samples: Vec<SpectralSample> = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|r| sample_spectrum(cfg, r))
        .collect::<Result<_>>()?;
    let curve = predicted_moments(cfg.d, cfg.n, cfg.m)?;
    let trace = binomial(cfg.n, cfg.m) as f64;

    let mut all: Vec<f64> = samples
        .iter()
        .flat_map(|s| s.eigenvalues.iter().copied())
        .collect();
    let count = all.len() as f64;
    let mean = all.iter().sum::<f64>() / count;
    let std = (all.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / count).sqrt();
    let mean_entropy = samples.iter().map(|s| s.entropy).sum::<f64>() / samples.len() as f64;
    let max_trace_error = samples
        .iter()
        .map(|s| (s.eigenvalues.iter().sum::<f64>() - trace).abs())
        .fold(0.0, f64::max);
    all.sort_by(f64::total_cmp);

    let twl = TwlCdf::new(curve.mu, curve.c);
    let sc = |z: f64| semicircle_cdf(z, curve.mu, curve.sigma);
    let ks_semicircle = ks_distance(&all, sc);
    let ks_mp = ks_distance(&all, |z| twl.eval(z));

    let (lo, hi) = if 2 * effective_cut(cfg.n, cfg.m) == cfg.n {
        (0.0, 4.0 * curve.mu * 1.05)
    } else {
        ((curve.mu - 3.0 * std).max(0.0), curve.mu + 3.0 * std)
    };
    let width = (hi - lo) / cfg.bins as f64;
    let mut counts = vec![0usize; cfg.bins];
    for &x in &all {
        if x >= lo && x < hi {
            counts[(((x - lo) / width) as usize).min(cfg.bins - 1)] += 1;
        }
    }
    let histogram = counts
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let (l, r) = (lo + i as f64 * width, lo + (i + 1) as f64 * width);
            HistogramBin {
                bin_left: l,
                bin_right: r,
                empirical_density: k as f64 / (count * width),
                analytic_semicircle: (sc(r) - sc(l)) / width,
                analytic_mp: (twl.eval(r) - twl.eval(l)) / width,
            }
        })
        .collect();

    Ok(EnsembleReport {
        version: crate::VERSION,
        config: cfg.clone(),
        mu: curve.mu,
        sigma: curve.sigma,
        c: curve.c,
        empirical_mean: mean,
        empirical_std: std,
        mean_entropy,
        s_max: max_entropy(cfg.d, cfg.n, cfg.m),
        predicted_mean_entropy: mean_entropy_prediction(cfg.d, cfg.n, cfg.m).ok(),
        ks_semicircle,
        ks_mp,
        ks_reference: if curve.c < SEMICIRCLE_C {
            "semicircle"
        } else {
            "mp"
        },
        eigenvalue_count: all.len(),
        max_trace_error,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normals_have_unit_variance() {
        let mut g = Gaussian::new(11);
        let xs: Vec<f64> = (0..200_000).map(|_| g.normal()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.01);
        assert!((var - 1.0).abs() < 0.01);
    }

    #[test]
    fn states_are_reproducible_and_normalised() {
        let a = sample_random_state(6, 3, 5).unwrap();
        let b = sample_random_state(6, 3, 5).unwrap();
        assert_eq!(a.terms().len(), 20);
        assert_eq!(a.terms(), b.terms());
        assert_abs_diff_eq!(a.norm_sqr(), 1.0, epsilon = 1e-12);
        assert_ne!(a.terms(), sample_random_state(6, 3, 6).unwrap().terms());
    }

    #[test]
    fn amplitude_weights_are_uniform_on_average() {
        let reps = 10_000;
        let mut acc = vec![0.0; 10];
        for r in 0..reps {
            let s = random_state_from(5, 2, &mut Gaussian::stream(99, r)).unwrap();
            for (a, (_, amp)) in acc.iter_mut().zip(s.terms()) {
                *a += amp.norm_sqr();
            }
        }
        for a in acc {
            assert!((a / reps as f64 - 0.1).abs() < 0.002, "{a}");
        }
    }

    #[test]
    fn wl_trace_is_fixed() {
        for seed in 0..100 {
            let w = sample_trace_fixed_wl(4, 9, 6.0, seed).unwrap();
            assert_abs_diff_eq!(w.trace().re, 6.0, epsilon = 1e-12);
            assert!(w.is_hermitian(0.0));
            assert!(hermitian_eigenvalues(&w)
                .unwrap()
                .iter()
                .all(|&x| x > -1e-12));
        }
        let w = sample_trace_fixed_wl(1, 3, 2.5, 1).unwrap();
        assert_abs_diff_eq!(w[(0, 0)].re, 2.5, epsilon = 1e-15);
        assert!(sample_trace_fixed_wl(3, 2, 1.0, 1).is_err());
    }

    #[test]
    fn unitaries_are_unitary() {
        for seed in 0..5 {
            assert!(random_unitary(7, seed).is_unitary(1e-12));
        }
    }

    #[test]
    fn ensemble_is_deterministic_and_trace_exact() {
        let mut cfg = EnsembleConfig::new(6, 3, 1, 10, 7);
        let a = run_ensemble(&cfg).unwrap();
        let b = run_ensemble(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.max_trace_error < 1e-8);
        assert_eq!(a.eigenvalue_count, 60);
        cfg.kind = EnsembleKind::Wl;
        let w = run_ensemble(&cfg).unwrap();
        assert!(w.max_trace_error < 1e-12);
        assert_eq!(w.histogram.len(), DEFAULT_BINS);
    }

    #[test]
    fn complementary_cuts_share_nonzero_spectra() {
        let lo = EnsembleConfig::new(7, 4, 1, 5, 3);
        let hi = EnsembleConfig { m: 3, ..lo.clone() };
        for r in 0..5 {
            let a = sample_spectrum(&lo, r).unwrap();
            let b = sample_spectrum(&hi, r).unwrap();
            assert_eq!(a.eigenvalues.len(), b.eigenvalues.len());
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-10);
            }
            assert_abs_diff_eq!(a.entropy, b.entropy, epsilon = 1e-9);
        }
    }
}
