//! Real-lattice construction, QR structure, sphere decoding with node
//! accounting, and a brute-force ML oracle.
//!
//! Vectorization convention: the lattice column for basis matrix B_i is
//! vec(H*B_i) with all real parts stacked above all imaginary parts, each
//! block in column-major order.
//!
//! # Determinism
//!
//! ML ties break toward the lexicographically smallest coefficient vector.
//! The oracle enumerates in lexicographic order and keeps strict
//! improvements only; the sphere decoder compares tied leaves explicitly.

use crate::analysis::GroupingResult;
use crate::catalog::CodeSpec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("channel must be {0}x{1}, got {2}x{3}")]
    ChannelShape(usize, usize, usize, usize),
    #[error("lattice is rank deficient (rank {0} of {1} columns)")]
    RankDeficient(usize, usize),
    #[error("vector length {0} does not match lattice rows {1}")]
    LengthMismatch(usize, usize),
    #[error("alphabet needs at least 2 distinct entries")]
    AlphabetTooSmall,
    #[error("enumeration needs {0} metric evaluations, budget is {1}")]
    BudgetExceeded(u128, u64),
    #[error("column order must be a permutation of 0..kappa")]
    BadOrder,
}

/// Real generator of the received lattice: columns are vectorized H*B_i.
#[derive(Debug, Clone)]
pub struct RealLattice {
    pub b: DMatrix<f64>,
    pub rank: usize,
    pub side: usize,
    pub kappa: usize,
}

/// Stack Re(m) over Im(m), both column-major.
pub fn vectorize(m: &DMatrix<Complex64>) -> DVector<f64> {
    let len = m.len();
    let mut v = DVector::zeros(2 * len);
    for (k, z) in m.iter().enumerate() {
        v[k] = z.re;
        v[k + len] = z.im;
    }
    v
}

const RANK_TOL: f64 = 1e-9;

/// Build the lattice for a code and channel H (side/2 x side).
pub fn build_real_lattice(
    code: &CodeSpec,
    h: &DMatrix<Complex64>,
) -> Result<RealLattice, DecodeError> {
    let side = code.side;
    let n_rx = side / 2;
    if h.nrows() != n_rx.max(1) || h.ncols() != side {
        return Err(DecodeError::ChannelShape(
            n_rx.max(1),
            side,
            h.nrows(),
            h.ncols(),
        ));
    }
    let cols: Vec<DVector<f64>> = code
        .float_basis()
        .iter()
        .map(|bi| vectorize(&(h * bi)))
        .collect();
    let rows = cols[0].len();
    let b = DMatrix::from_fn(rows, code.kappa, |r, c| cols[c][r]);
    let rank = rank_of(&b);
    Ok(RealLattice {
        b,
        rank,
        side,
        kappa: code.kappa,
    })
}

fn rank_of(b: &DMatrix<f64>) -> usize {
    if b.is_empty() {
        return 0;
    }
    let svd = b.clone().svd(false, false);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    svd.singular_values
        .iter()
        .filter(|s| **s > RANK_TOL * max)
        .count()
}

/// Upper-triangular factor of the lattice in its declared column order,
/// with the zero mask of |R_ij| <= 1e-9 * ||R||_F.
#[derive(Debug, Clone)]
pub struct QrStructure {
    pub r: DMatrix<f64>,
    pub zero_mask: Vec<bool>,
    pub rank_deficient: bool,
}

impl QrStructure {
    pub fn is_zero(&self, i: usize, j: usize) -> bool {
        self.zero_mask[i * self.r.ncols() + j]
    }
}

pub fn qr_structure(lattice: &RealLattice) -> QrStructure {
    let qr = lattice.b.clone().qr();
    let r = qr.r();
    let scale = r.norm();
    let kappa = r.ncols();
    let mut mask = vec![false; kappa * kappa];
    for i in 0..kappa.min(r.nrows()) {
        for j in 0..kappa {
            mask[i * kappa + j] = r[(i, j)].abs() <= 1e-9 * scale.max(1e-300);
        }
    }
    QrStructure {
        rank_deficient: lattice.rank < lattice.kappa,
        r,
        zero_mask: mask,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub g_hat: Vec<i64>,
    pub metric: f64,
    pub nodes_visited: u64,
}

fn residual_metric(b: &DMatrix<f64>, y: &DVector<f64>, g: &[i64]) -> f64 {
    let mut r = y.clone();
    for (j, &gj) in g.iter().enumerate() {
        if gj != 0 {
            r -= b.column(j) * (gj as f64);
        }
    }
    r.norm_squared()
}

fn validate_alphabet(alphabet: &[i64]) -> Result<Vec<i64>, DecodeError> {
    let mut a = alphabet.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.len() < 2 {
        return Err(DecodeError::AlphabetTooSmall);
    }
    Ok(a)
}

struct SphereSearch<'a> {
    r: &'a DMatrix<f64>,
    y_r: &'a DVector<f64>,
    alphabet: &'a [i64],
    order: &'a [usize],
    kappa: usize,
    g: Vec<i64>,
    best_metric: f64,
    best_g: Option<Vec<i64>>,
    nodes: u64,
}

impl SphereSearch<'_> {
    fn tie_eps(&self) -> f64 {
        1e-12 * (1.0 + self.best_metric.min(1e300))
    }

    /// Depth-first Schnorr-Euchner descent at level k with accumulated
    /// partial metric.
    fn descend(&mut self, k: usize, partial: f64) {
        // center of the interval at this level
        let mut proj = self.y_r[k];
        for j in k + 1..self.kappa {
            proj -= self.r[(k, j)] * self.g[j] as f64;
        }
        let rkk = self.r[(k, k)];
        let center = proj / rkk;
        // children ordered by distance from the center (ties: smaller value)
        let mut children: Vec<i64> = self.alphabet.to_vec();
        children.sort_by(|a, b| {
            let da = (*a as f64 - center).abs();
            let db = (*b as f64 - center).abs();
            da.partial_cmp(&db).unwrap().then(a.cmp(b))
        });
        for a in children {
            let inc = proj - rkk * a as f64;
            let child = partial + inc * inc;
            self.nodes += 1;
            if child > self.best_metric + self.tie_eps() {
                // siblings only get farther from the center
                break;
            }
            self.g[k] = a;
            if k == 0 {
                self.consider_leaf(child);
            } else {
                self.descend(k - 1, child);
            }
        }
    }

    fn consider_leaf(&mut self, metric: f64) {
        let candidate = unpermute(&self.g, self.order);
        match &self.best_g {
            Some(best) if metric > self.best_metric - self.tie_eps() => {
                // tie region: prefer the lexicographically smaller vector
                if metric < self.best_metric || candidate < *best {
                    self.best_metric = self.best_metric.min(metric);
                    self.best_g = Some(candidate);
                }
            }
            _ => {
                self.best_metric = metric;
                self.best_g = Some(candidate);
            }
        }
    }
}

fn unpermute(g: &[i64], order: &[usize]) -> Vec<i64> {
    let mut out = vec![0i64; g.len()];
    for (pos, &col) in order.iter().enumerate() {
        out[col] = g[pos];
    }
    out
}

/// Exact ML decoding by depth-first sphere search with best-first child
/// ordering and shrinking radius (initial radius infinite). `order`
/// permutes the columns before the QR factorization; nodes_visited counts
/// every node whose partial metric was computed.
pub fn sphere_decode(
    lattice: &RealLattice,
    y: &DVector<f64>,
    alphabet: &[i64],
    order: Option<&[usize]>,
) -> Result<DecodeResult, DecodeError> {
    let kappa = lattice.kappa;
    if y.len() != lattice.b.nrows() {
        return Err(DecodeError::LengthMismatch(y.len(), lattice.b.nrows()));
    }
    if lattice.rank < kappa {
        return Err(DecodeError::RankDeficient(lattice.rank, kappa));
    }
    let alphabet = validate_alphabet(alphabet)?;
    let identity: Vec<usize> = (0..kappa).collect();
    let order: Vec<usize> = match order {
        Some(o) => {
            let mut seen = vec![false; kappa];
            if o.len() != kappa || o.iter().any(|&c| c >= kappa || std::mem::replace(&mut seen[c], true)) {
                return Err(DecodeError::BadOrder);
            }
            o.to_vec()
        }
        None => identity,
    };
    let permuted = DMatrix::from_fn(lattice.b.nrows(), kappa, |r, c| lattice.b[(r, order[c])]);
    let qr = permuted.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let y_r = q.transpose() * y;
    let mut search = SphereSearch {
        r: &r,
        y_r: &y_r,
        alphabet: &alphabet,
        order: &order,
        kappa,
        g: vec![0; kappa],
        best_metric: f64::INFINITY,
        best_g: None,
        nodes: 0,
    };
    search.descend(kappa - 1, 0.0);
    let g_hat = search.best_g.expect("finite alphabet always yields a leaf");
    let metric = residual_metric(&lattice.b, y, &g_hat);
    Ok(DecodeResult {
        g_hat,
        metric,
        nodes_visited: search.nodes,
    })
}

/// Exhaustive-search ML oracle: enumerates alphabet^kappa in lexicographic
/// order (so ties keep the smallest vector) and reports |alphabet|^kappa as
/// its node count.
pub fn brute_force_ml(
    lattice: &RealLattice,
    y: &DVector<f64>,
    alphabet: &[i64],
    budget: u64,
) -> Result<DecodeResult, DecodeError> {
    let kappa = lattice.kappa;
    if y.len() != lattice.b.nrows() {
        return Err(DecodeError::LengthMismatch(y.len(), lattice.b.nrows()));
    }
    let alphabet = validate_alphabet(alphabet)?;
    let total = (alphabet.len() as u128).pow(kappa as u32);
    if total > budget as u128 {
        return Err(DecodeError::BudgetExceeded(total, budget));
    }
    let mut digits = vec![0usize; kappa];
    let mut g = vec![alphabet[0]; kappa];
    // residual maintained incrementally across the odometer
    let mut residual = y.clone();
    for (j, &gj) in g.iter().enumerate() {
        residual -= lattice.b.column(j) * gj as f64;
    }
    let mut best_metric = f64::INFINITY;
    let mut best_g = g.clone();
    loop {
        let metric = residual.norm_squared();
        if metric < best_metric {
            best_metric = metric;
            best_g = g.clone();
        }
        // lexicographic odometer, most significant digit first
        let mut pos = kappa;
        loop {
            if pos == 0 {
                let metric = residual_metric(&lattice.b, y, &best_g);
                return Ok(DecodeResult {
                    g_hat: best_g,
                    metric,
                    nodes_visited: total as u64,
                });
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < alphabet.len() {
                let new = alphabet[digits[pos]];
                residual -= lattice.b.column(pos) * (new - g[pos]) as f64;
                g[pos] = new;
                break;
            }
            digits[pos] = 0;
            let new = alphabet[0];
            residual -= lattice.b.column(pos) * (new - g[pos]) as f64;
            g[pos] = new;
        }
    }
}

/// Column order for conditional decoding: the detected groups first, the
/// conditioned set last (so the sphere decoder branches on it first).
/// Indices in the grouping are 1-based; the returned order is 0-based.
pub fn order_from_grouping(grouping: &GroupingResult, kappa: usize) -> Option<Vec<usize>> {
    let mut order = Vec::with_capacity(kappa);
    for g in &grouping.groups {
        for &idx in g {
            order.push(idx.checked_sub(1)?);
        }
    }
    for &idx in &grouping.conditioned {
        order.push(idx.checked_sub(1)?);
    }
    if order.len() != kappa {
        return None;
    }
    let mut seen = vec![false; kappa];
    for &c in &order {
        if c >= kappa || std::mem::replace(&mut seen[c], true) {
            return None;
        }
    }
    Some(order)
}
