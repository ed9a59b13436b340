//! Small finite fields F_p and F_{p^2}, Gaussian-integer residues, and the
//! brute-force anisotropy test over them.

use super::AnalysisError;
use crate::rat::Rat;
use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};

/// F_p (ext = None) or F_{p^2} = F_p[x]/(x^2 - r) with r a non-residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fq {
    pub p: u64,
    pub ext: Option<u64>,
}

/// Element a + b*x (b = 0 in the prime field).
pub type FqElem = (u64, u64);

impl Fq {
    pub fn prime(p: u64) -> Fq {
        Fq { p, ext: None }
    }

    pub fn quadratic(p: u64, r: u64) -> Fq {
        Fq { p, ext: Some(r % p) }
    }

    pub fn q(&self) -> u64 {
        match self.ext {
            None => self.p,
            Some(_) => self.p * self.p,
        }
    }

    pub fn zero(&self) -> FqElem {
        (0, 0)
    }
    pub fn one(&self) -> FqElem {
        (1, 0)
    }

    pub fn is_zero(&self, x: FqElem) -> bool {
        x.0 == 0 && x.1 == 0
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        ((a.0 + b.0) % self.p, (a.1 + b.1) % self.p)
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        ((self.p - a.0 % self.p) % self.p, (self.p - a.1 % self.p) % self.p)
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        let p = self.p as u128;
        match self.ext {
            None => ((a.0 as u128 * b.0 as u128 % p) as u64, 0),
            Some(r) => {
                // (a0 + a1 x)(b0 + b1 x) = a0b0 + r a1b1 + (a0b1 + a1b0) x
                let a0 = a.0 as u128;
                let a1 = a.1 as u128;
                let b0 = b.0 as u128;
                let b1 = b.1 as u128;
                let re = (a0 * b0 + (r as u128) * (a1 * b1 % p) % p) % p;
                let im = (a0 * b1 + a1 * b0) % p;
                (re as u64, im as u64)
            }
        }
    }

    pub fn pow(&self, mut a: FqElem, mut e: u64) -> FqElem {
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.q() - 2))
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: FqElem) -> Option<u64> {
        if self.is_zero(a) {
            return None;
        }
        let group = self.q() - 1;
        let mut best = group;
        // order divides q-1; scan divisors
        let mut d = 1u64;
        while d * d <= group {
            if group.is_multiple_of(d) {
                for cand in [d, group / d] {
                    if cand < best && self.pow(a, cand) == self.one() {
                        best = cand;
                    }
                }
            }
            d += 1;
        }
        Some(best)
    }

    pub fn is_square(&self, a: FqElem) -> bool {
        self.is_zero(a) || self.pow(a, (self.q() - 1) / 2) == self.one()
    }

    fn element_from_index(&self, idx: u64) -> FqElem {
        match self.ext {
            None => (idx, 0),
            Some(_) => (idx % self.p, idx / self.p),
        }
    }
}

/// Brute force over projective points: the diagonal form `<a_1,...,a_m>` is
/// anisotropic iff it has no nontrivial zero.
pub fn anisotropic_over_fq(fq: &Fq, coeffs: &[FqElem]) -> Result<bool, AnalysisError> {
    let m = coeffs.len();
    if m == 0 || m > 4 {
        return Err(AnalysisError::BadForm(format!("form has {m} coefficients")));
    }
    if fq.q() > 1_000_000 {
        return Err(AnalysisError::BadForm(format!("residue field too big: {}", fq.q())));
    }
    if coeffs.iter().any(|c| fq.is_zero(*c)) {
        return Err(AnalysisError::DegenerateResidueForm);
    }
    let q = fq.q();
    // representatives: leading coordinate 1, earlier coordinates 0
    for lead in 0..m {
        let free = m - lead - 1;
        let mut total = 1u64;
        for _ in 0..free {
            total = total.saturating_mul(q);
        }
        for idx in 0..total {
            let mut v = vec![fq.zero(); m];
            v[lead] = fq.one();
            let mut rem = idx;
            for slot in lead + 1..m {
                v[slot] = fq.element_from_index(rem % q);
                rem /= q;
            }
            let mut acc = fq.zero();
            for (c, x) in coeffs.iter().zip(&v) {
                acc = fq.add(acc, fq.mul(*c, fq.mul(*x, *x)));
            }
            if fq.is_zero(acc) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Gaussian integers and residue reduction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gint {
    pub re: BigInt,
    pub im: BigInt,
}

impl Gint {
    pub fn new(re: i64, im: i64) -> Gint {
        Gint {
            re: BigInt::from(re),
            im: BigInt::from(im),
        }
    }

    pub fn from_big(re: BigInt, im: BigInt) -> Gint {
        Gint { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn mul(&self, other: &Gint) -> Gint {
        Gint {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }

    pub fn conj(&self) -> Gint {
        Gint {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact division; None when `d` does not divide `self` in Z[i].
    pub fn divide_exact(&self, d: &Gint) -> Option<Gint> {
        let n = d.norm();
        if n.is_zero() {
            return None;
        }
        let prod = self.mul(&d.conj());
        let (qr, rr) = prod.re.div_rem(&n);
        let (qi, ri) = prod.im.div_rem(&n);
        if rr.is_zero() && ri.is_zero() {
            Some(Gint { re: qr, im: qi })
        } else {
            None
        }
    }

    /// Largest k with pi^k | self, together with self / pi^k.
    pub fn valuation(&self, pi: &Gint) -> (u32, Gint) {
        let mut v = 0;
        let mut cur = self.clone();
        if cur.is_zero() {
            return (u32::MAX, cur);
        }
        while let Some(next) = cur.divide_exact(pi) {
            v += 1;
            cur = next;
        }
        (v, cur)
    }
}

pub fn is_prime_u64_pub(n: u64) -> bool {
    is_prime_u64(n)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Residue field of a Gaussian prime, together with the image of i.
#[derive(Debug, Clone)]
pub struct GaussianResidue {
    pub fq: Fq,
    /// image of i in the residue field
    pub i_image: FqElem,
    pub description: String,
}

/// Classify `pi` as a Gaussian prime and build its residue field.
pub fn gaussian_residue_field(pi: &Gint) -> Result<GaussianResidue, AnalysisError> {
    let norm = pi.norm();
    let norm_u64: u64 = norm
        .to_string()
        .parse()
        .map_err(|_| AnalysisError::NotPrime(format!("norm {norm} too big")))?;
    if is_prime_u64(norm_u64) {
        // split or ramified: Z[i]/(pi) = F_p with p = N(pi)
        let p = norm_u64;
        // i maps to t with re + im*t = 0 mod p
        let re = pi.re.mod_floor(&BigInt::from(p));
        let im = pi.im.mod_floor(&BigInt::from(p));
        let re_u: u64 = re.to_string().parse().unwrap();
        let im_u: u64 = im.to_string().parse().unwrap();
        let fq = Fq::prime(p);
        let t = if im_u.is_multiple_of(p) {
            return Err(AnalysisError::NotPrime(format!("{:?} is not a Gaussian prime", pi)));
        } else {
            let inv = fq.inv((im_u % p, 0)).unwrap();
            fq.mul((p - re_u % p, 0), inv)
        };
        Ok(GaussianResidue {
            fq,
            i_image: t,
            description: format!("Z[i]/({}) = F_{}", describe_gint(pi), p),
        })
    } else {
        // inert: pi must be an associate of a rational prime q = 3 mod 4
        let assoc = [
            (pi.re.clone(), pi.im.clone()),
            (pi.im.clone(), -pi.re.clone()),
        ];
        let q = assoc
            .iter()
            .find(|(_, im)| im.is_zero())
            .map(|(re, _)| re.abs())
            .ok_or_else(|| AnalysisError::NotPrime(format!("{:?} is not a Gaussian prime", pi)))?;
        let q_u64: u64 = q
            .to_string()
            .parse()
            .map_err(|_| AnalysisError::NotPrime("prime too big".into()))?;
        if !is_prime_u64(q_u64) || q_u64 % 4 != 3 {
            return Err(AnalysisError::NotPrime(format!(
                "{} is not an inert Gaussian prime",
                describe_gint(pi)
            )));
        }
        // F_{q^2} = F_q[x]/(x^2 + 1); i -> x
        let fq = Fq::quadratic(q_u64, q_u64 - 1);
        Ok(GaussianResidue {
            fq,
            i_image: (0, 1),
            description: format!("Z[i]/({}) = F_{}", describe_gint(pi), q_u64 * q_u64),
        })
    }
}

pub fn describe_gint(g: &Gint) -> String {
    if g.im.is_zero() {
        format!("{}", g.re)
    } else if g.re.is_zero() {
        format!("{}i", g.im)
    } else if g.im.is_positive() {
        format!("{}+{}i", g.re, g.im)
    } else {
        format!("{}{}i", g.re, g.im)
    }
}

impl GaussianResidue {
    /// Reduce an integral Gaussian number mod pi.
    pub fn reduce_gint(&self, g: &Gint) -> FqElem {
        let p = BigInt::from(self.fq.p);
        let re: u64 = g.re.mod_floor(&p).to_string().parse().unwrap();
        let im: u64 = g.im.mod_floor(&p).to_string().parse().unwrap();
        self.fq
            .add((re, 0), self.fq.mul((im, 0), self.i_image))
    }

    /// Reduce a Gaussian rational `g / den` with den coprime to pi.
    pub fn reduce_fraction(&self, g: &Gint, den: &BigInt) -> Option<FqElem> {
        let p = BigInt::from(self.fq.p);
        let d: u64 = den.mod_floor(&p).to_string().parse().unwrap();
        let dinv = self.fq.inv((d, 0))?;
        Some(self.fq.mul(self.reduce_gint(g), dinv))
    }
}

/// Write a rational-coefficient element of Q or Q(i) as (gaussian integer,
/// positive denominator).
pub fn to_gaussian_fraction(coeffs: &[Rat]) -> Result<(Gint, BigInt), AnalysisError> {
    if coeffs.is_empty() || coeffs.len() > 2 {
        return Err(AnalysisError::BadForm(
            "springer residues need coefficients in Q or Q(i)".into(),
        ));
    }
    let re = coeffs[0].clone();
    let im = if coeffs.len() == 2 {
        coeffs[1].clone()
    } else {
        Rat::zero()
    };
    let den = re.denom().lcm(im.denom());
    let re_i = (&re * Rat::from_integer(den.clone())).to_integer();
    let im_i = (&im * Rat::from_integer(den.clone())).to_integer();
    Ok((Gint::from_big(re_i, im_i), den))
}

/// Gaussian primes of norm <= bound dividing g, up to units (first-quadrant
/// representatives). Used to find Springer candidate primes.
pub fn gaussian_prime_divisors(g: &Gint, norm_bound: u64) -> Vec<Gint> {
    let mut out = Vec::new();
    if g.is_zero() {
        return out;
    }
    let mut a = 0i64;
    while (a * a) as u64 <= norm_bound {
        let mut b = 0i64;
        while (a * a + b * b) as u64 <= norm_bound {
            if !(a == 0 && b == 0) {
                let cand = Gint::new(a, b);
                if gaussian_residue_field(&cand).is_ok() && g.divide_exact(&cand).is_some() {
                    let assoc = out.iter_mut().find(|p: &&mut Gint| {
                        p.divide_exact(&cand)
                            .map(|u| u.norm().is_one())
                            .unwrap_or(false)
                    });
                    match assoc {
                        // prefer the rational representative of an
                        // associate class when one exists
                        Some(existing) => {
                            if cand.im.is_zero() && !existing.im.is_zero() {
                                *existing = cand;
                            }
                        }
                        None => out.push(cand),
                    }
                }
            }
            b += 1;
        }
        a += 1;
    }
    out
}
