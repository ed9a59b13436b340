//! Rayleigh MIMO channel simulation and Monte Carlo block-error-rate
//! measurement.
//!
//! SNR convention (documented, the reference text never fixes one):
//! Es/N0 per receive antenna, i.e. E||H X||_F^2 / E||V||_F^2. With the
//! catalog normalization (sum_i ||B_i||_F^2 = kappa * side) and unit-variance
//! channel entries this equals kappa * E[g^2] / N0, where N0 is the
//! per-entry complex noise variance.
//!
//! # Determinism
//!
//! The per-trial generator is ChaCha8 keyed by (seed, snr_index, trial) and
//! draws in a fixed order (symbols, channel, noise); per-point results fold
//! in trial-index order. Output is bit-identical for any worker count.

use crate::algebra::encode;
use crate::catalog::CodeSpec;
use crate::decode::{build_real_lattice, sphere_decode, vectorize, DecodeError};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
    #[error("trials_per_point must be >= 1")]
    NoTrials,
    #[error("snr grid must be nonempty and strictly increasing")]
    BadGrid,
    #[error("alphabet must be nonempty and symmetric about 0")]
    BadAlphabet,
    #[error("thread pool: {0}")]
    Pool(String),
}

/// One Monte Carlo configuration; `noiseless` models the infinite-SNR limit.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub code: CodeSpec,
    pub snr_db_grid: Vec<f64>,
    pub trials_per_point: u64,
    pub alphabet: Vec<i64>,
    pub seed: u64,
    pub workers: usize,
    pub noiseless: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimRow {
    pub snr_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bler: f64,
    pub mean_nodes: f64,
    pub ci95_halfwidth: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub rows: Vec<SimRow>,
    /// trials dropped because the sampled channel left the lattice rank
    /// deficient (counted separately from `trials`)
    pub skipped_rank_failures: u64,
}

/// i.i.d. CN(0,1) channel matrix.
pub fn sample_channel<R: Rng>(n_rx: usize, n_tx: usize, rng: &mut R) -> DMatrix<Complex64> {
    DMatrix::from_fn(n_rx, n_tx, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// i.i.d. CN(0, n0) noise matrix.
pub fn sample_noise<R: Rng>(
    n_rx: usize,
    n_tx: usize,
    n0: f64,
    rng: &mut R,
) -> DMatrix<Complex64> {
    let scale = (n0 / 2.0).sqrt();
    DMatrix::from_fn(n_rx, n_tx, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re * scale, im * scale)
    })
}

/// Per-entry noise variance realizing the requested SNR for this code and
/// alphabet: N0 = kappa * E[g^2] / snr_linear.
pub fn noise_variance_for(code: &CodeSpec, alphabet: &[i64], snr_db: f64) -> f64 {
    let e_g = alphabet.iter().map(|a| (a * a) as f64).sum::<f64>() / alphabet.len() as f64;
    let snr_lin = 10f64.powf(snr_db / 10.0);
    code.kappa as f64 * e_g / snr_lin
}

pub fn ci95_halfwidth(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

struct TrialOutcome {
    error: bool,
    nodes: u64,
    skipped: bool,
}

/// Monte Carlo BLER over the SNR grid: draw symbols uniformly, transmit
/// through a fresh Rayleigh channel, sphere-decode, count block errors.
pub fn run_bler(cfg: &SimConfig) -> Result<SimResult, SimError> {
    if cfg.trials_per_point == 0 {
        return Err(SimError::NoTrials);
    }
    if cfg.snr_db_grid.is_empty()
        || cfg.snr_db_grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(SimError::BadGrid);
    }
    let mut alphabet = cfg.alphabet.clone();
    alphabet.sort_unstable();
    alphabet.dedup();
    if alphabet.is_empty() || alphabet.iter().any(|a| !alphabet.contains(&-a)) {
        return Err(SimError::BadAlphabet);
    }
    let floats = cfg.code.float_basis();
    let side = cfg.code.side;
    let n_rx = (side / 2).max(1);
    let kappa = cfg.code.kappa;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))?;
    let mut rows = Vec::with_capacity(cfg.snr_db_grid.len());
    let mut skipped_total = 0u64;
    for (si, &snr_db) in cfg.snr_db_grid.iter().enumerate() {
        let n0 = if cfg.noiseless {
            0.0
        } else {
            noise_variance_for(&cfg.code, &alphabet, snr_db)
        };
        let outcomes: Vec<TrialOutcome> = pool.install(|| {
            (0..cfg.trials_per_point)
                .into_par_iter()
                .map(|trial| {
                    let key = crate::analysis::derive_stream(cfg.seed, si as u64, trial);
                    let mut rng = ChaCha8Rng::seed_from_u64(key);
                    let g: Vec<i64> = (0..kappa)
                        .map(|_| alphabet[rng.random_range(0..alphabet.len())])
                        .collect();
                    let h = sample_channel(n_rx, side, &mut rng);
                    let x = encode(&floats, &g).expect("lengths match");
                    let mut y_mat = &h * &x;
                    if n0 > 0.0 {
                        y_mat += sample_noise(n_rx, side, n0, &mut rng);
                    }
                    let y = vectorize(&y_mat);
                    let lattice = match build_real_lattice(&cfg.code, &h) {
                        Ok(l) if l.rank == kappa => l,
                        _ => {
                            return TrialOutcome {
                                error: false,
                                nodes: 0,
                                skipped: true,
                            }
                        }
                    };
                    match sphere_decode(&lattice, &y, &alphabet, None) {
                        Ok(out) => TrialOutcome {
                            error: out.g_hat != g,
                            nodes: out.nodes_visited,
                            skipped: false,
                        },
                        Err(_) => TrialOutcome {
                            error: false,
                            nodes: 0,
                            skipped: true,
                        },
                    }
                })
                .collect()
        });
        let mut errors = 0u64;
        let mut nodes = 0u64;
        let mut decoded = 0u64;
        for o in &outcomes {
            if o.skipped {
                skipped_total += 1;
            } else {
                decoded += 1;
                nodes += o.nodes;
                errors += o.error as u64;
            }
        }
        let bler = if decoded > 0 {
            errors as f64 / decoded as f64
        } else {
            0.0
        };
        rows.push(SimRow {
            snr_db,
            trials: decoded,
            block_errors: errors,
            bler,
            mean_nodes: if decoded > 0 {
                nodes as f64 / decoded as f64
            } else {
                0.0
            },
            ci95_halfwidth: ci95_halfwidth(bler, decoded),
        });
    }
    Ok(SimResult {
        rows,
        skipped_rank_failures: skipped_total,
    })
}
