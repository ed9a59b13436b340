//! Exact rational scalars and small dense linear algebra over them.
//!
//! Everything structural in this crate (zero tests, masks, diversity
//! counterexamples) is decided on `BigRational` coefficient vectors; floats
//! only appear at emission time.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use std::str::FromStr;

pub type Rat = BigRational;

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parse a rational written as `p` or `p/q`.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rat::new(p, q))
        }
        None => Some(Rat::from_integer(BigInt::from_str(s).ok()?)),
    }
}

/// Format a rational as `p` or `p/q` (lowest terms, canonical sign).
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    // Good enough for the coefficient sizes seen here; exact for small p/q.
    let p = x.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let q = x.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    p / q
}

/// Is `x` the square of a rational? Returns the nonnegative square root.
pub fn rat_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let p = x.numer().sqrt();
    let q = x.denom().sqrt();
    if &(&p * &p) == x.numer() && &(&q * &q) == x.denom() {
        Some(Rat::new(p, q))
    } else {
        None
    }
}

/// Solve A y = rhs by exact Gaussian elimination; `a` is given by columns.
/// Returns None when A is singular.
pub fn solve_columns(a: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let n = rhs.len();
    debug_assert!(a.len() == n && a.iter().all(|c| c.len() == n));
    // Row-major augmented matrix.
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|r| {
            let mut row: Vec<Rat> = (0..n).map(|c| a[c][r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let sub = &f * &m[col][c];
                    m[r][c] = &m[r][c] - &sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Rank of a set of rational vectors, by exact elimination.
pub fn rank_of_vectors(vecs: &[Vec<Rat>]) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    let width = vecs[0].len();
    let mut rows: Vec<Vec<Rat>> = vecs.to_vec();
    let mut rank = 0;
    for col in 0..width {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if !rows[r][col].is_zero() {
                let f = &rows[r][col] / &pivot;
                for c in col..width {
                    let sub = &f * &rows[rank][c];
                    rows[r][c] = &rows[r][c] - &sub;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Round to 12 significant digits, the precision used by all emitted reports.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.11e}", x).parse().unwrap_or(x)
}
