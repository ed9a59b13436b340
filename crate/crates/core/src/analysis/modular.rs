//! Coefficientwise mod-p reduction of an exact code basis, with a
//! division-free determinant in the structure-constant ring F_p[basis].
//!
//! A determinant that is nonzero mod p is certified nonzero exactly; zeros
//! mod p are confirmed with exact arithmetic by the caller. Two large
//! primes make a false double-zero practically impossible but the exact
//! confirmation keeps the count sound regardless.

use crate::algebra::MatrixOverField;
use num::bigint::BigInt;
use num::Integer;

/// Largest Mersenne prime below 2^62 and the largest 64-bit prime.
pub const SCREEN_PRIMES: [u64; 2] = [2_305_843_009_213_693_951, 18_446_744_073_709_551_557];

pub struct ModularCode {
    p: u64,
    deg: usize,
    side: usize,
    /// basis[i][entry] = dense coefficient vector mod p
    basis: Vec<Vec<Vec<u64>>>,
    /// table[i][j] = sparse structure constants mod p
    table: Vec<Vec<Vec<(usize, u64)>>>,
}

fn reduce_rat(x: &crate::rat::Rat, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = x.denom().mod_floor(&pb);
    if den.sign() == num::bigint::Sign::NoSign {
        return None;
    }
    let den_u: u64 = den.to_string().parse().ok()?;
    let num = x.numer().mod_floor(&pb);
    let num_u: u64 = num.to_string().parse().ok()?;
    Some(mulmod(num_u, inv_mod(den_u, p), p))
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn addmod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime: a^(p-2)
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        e >>= 1;
    }
    acc
}

impl ModularCode {
    /// None when a coefficient denominator vanishes mod p.
    pub fn new(basis: &[MatrixOverField], p: u64) -> Option<ModularCode> {
        let field = basis[0].field();
        let deg = field.degree();
        let side = basis[0].rows();
        let mut reduced = Vec::with_capacity(basis.len());
        for b in basis {
            let mut entries = Vec::with_capacity(side * side);
            for r in 0..side {
                for c in 0..side {
                    let coeffs = b.get(r, c).coeffs();
                    let mut v = Vec::with_capacity(deg);
                    for x in coeffs {
                        v.push(reduce_rat(x, p)?);
                    }
                    entries.push(v);
                }
            }
            reduced.push(entries);
        }
        let mut table = vec![vec![Vec::new(); deg]; deg];
        for i in 0..deg {
            for j in 0..deg {
                let mut row = Vec::new();
                for (k, c) in &field.mult_table()[i][j] {
                    row.push((*k, reduce_rat(c, p)?));
                }
                table[i][j] = row;
            }
        }
        Some(ModularCode {
            p,
            deg,
            side,
            basis: reduced,
            table,
        })
    }

    fn ring_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.deg];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let c = mulmod(ai, bj, self.p);
                for (k, t) in &self.table[i][j] {
                    out[*k] = addmod(out[*k], mulmod(c, *t, self.p), self.p);
                }
            }
        }
        out
    }

    /// Is det(sum_i g_i B_i) = 0 mod p?
    pub fn det_is_zero(&self, g: &[i64]) -> bool {
        let p = self.p;
        let n = self.side;
        // assemble X mod p
        let mut x = vec![vec![0u64; self.deg]; n * n];
        for (gi, b) in g.iter().zip(&self.basis) {
            if *gi == 0 {
                continue;
            }
            let gm = (gi.rem_euclid(p as i64)) as u64;
            for (slot, entry) in x.iter_mut().zip(b) {
                for (acc, coeff) in slot.iter_mut().zip(entry) {
                    *acc = addmod(*acc, mulmod(gm, *coeff, p), p);
                }
            }
        }
        // division-free determinant via column-subset minors
        let zero = vec![0u64; self.deg];
        let mut one = vec![0u64; self.deg];
        one[0] = 1;
        let mut dp: Vec<Vec<u64>> = vec![zero.clone(); 1 << n];
        dp[0] = one;
        for mask in 1usize..(1 << n) {
            let t = mask.count_ones() as usize;
            let mut acc = zero.clone();
            let mut j = 0usize;
            for c in 0..n {
                if mask & (1 << c) == 0 {
                    continue;
                }
                let entry = &x[(t - 1) * n + c];
                if entry.iter().any(|&v| v != 0) {
                    let term = self.ring_mul(&dp[mask & !(1 << c)], entry);
                    if (t - 1 + j).is_multiple_of(2) {
                        for (a, b) in acc.iter_mut().zip(&term) {
                            *a = addmod(*a, *b, p);
                        }
                    } else {
                        for (a, b) in acc.iter_mut().zip(&term) {
                            *a = addmod(*a, p - (*b % p), p);
                        }
                    }
                }
                j += 1;
            }
            dp[mask] = acc;
        }
        dp[(1 << n) - 1].iter().all(|&v| v == 0)
    }
}

/// Float |det| of sum g_i B_i over a complex basis (normalized view).
pub fn float_abs_det(basis: &[nalgebra::DMatrix<num_complex::Complex64>], g: &[i64]) -> f64 {
    let mut x = nalgebra::DMatrix::zeros(basis[0].nrows(), basis[0].ncols());
    for (b, gi) in basis.iter().zip(g) {
        if *gi != 0 {
            x += b * num_complex::Complex64::new(*gi as f64, 0.0);
        }
    }
    x.determinant().norm()
}

/// Exact linear combination of the basis with integer coefficients.
pub fn exact_combination(
    basis: &[MatrixOverField],
    g: &[i64],
) -> Result<MatrixOverField, crate::algebra::AlgebraError> {
    let field = basis[0].field().clone();
    let mut acc = MatrixOverField::zero(&field, basis[0].rows(), basis[0].cols());
    for (b, gi) in basis.iter().zip(g) {
        if *gi != 0 {
            acc = acc.add(&b.scale(&field.from_int(*gi))?)?;
        }
    }
    Ok(acc)
}
