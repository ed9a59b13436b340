//! Exact square tests in the quadratic towers used by the quaternion
//! criteria: F is Q or a quadratic field, K = F(sqrt(a)) is handled as pairs
//! over F. Complete decision procedures, no numerics.

use super::AnalysisError;
use crate::numfield::{Field, FieldElement};
use crate::rat::{rat, rat_sqrt, Rat};
use num::Zero;

/// Square root of `w` inside F itself (degree 1 or 2 over Q).
pub fn sqrt_in_field(f: &Field, w: &FieldElement) -> Result<Option<FieldElement>, AnalysisError> {
    w.ensure_field(f).map_err(|_| AnalysisError::FieldMismatch)?;
    if w.is_zero() {
        return Ok(Some(f.zero()));
    }
    match f.degree() {
        1 => Ok(rat_sqrt(&w.coeffs()[0]).map(|r| f.from_rat(r))),
        2 => {
            let d = quadratic_disc(f)?;
            let w0 = &w.coeffs()[0];
            let w1 = &w.coeffs()[1];
            if w1.is_zero() {
                // x = p: p^2 = w0, or x = q*s: q^2 d = w0
                if let Some(p) = rat_sqrt(w0) {
                    return Ok(Some(f.from_rat(p)));
                }
                if let Some(q) = rat_sqrt(&(w0 / &d)) {
                    return Ok(Some(f.element(vec![Rat::zero(), q]).unwrap()));
                }
                return Ok(None);
            }
            // x = p + q*s: p^2 + d q^2 = w0, 2pq = w1
            let n = w0 * w0 - &d * w1 * w1;
            let Some(r) = rat_sqrt(&n) else {
                return Ok(None);
            };
            for root in [r.clone(), -r] {
                let cand = (w0 + &root) * rat(1, 2);
                if let Some(p) = rat_sqrt(&cand) {
                    if !p.is_zero() {
                        let q = w1 / (&p + &p);
                        let x = f.element(vec![p, q]).unwrap();
                        if &x.mul(&x).unwrap() == w {
                            return Ok(Some(x));
                        }
                    }
                }
            }
            Ok(None)
        }
        _ => Err(AnalysisError::BadTower(format!(
            "square test needs [F:Q] <= 2, got degree {}",
            f.degree()
        ))),
    }
}

/// d with s^2 = d for the quadratic field's non-unit basis element.
fn quadratic_disc(f: &Field) -> Result<Rat, AnalysisError> {
    let s = f.basis_element(1);
    let sq = s.mul(&s).unwrap();
    if !sq.coeffs()[1].is_zero() {
        return Err(AnalysisError::BadTower(format!(
            "{} is not a pure quadratic field",
            f.name()
        )));
    }
    Ok(sq.coeffs()[0].clone())
}

/// Element p + q*sqrt(a) of K = F(sqrt(a)) as a pair over F.
#[derive(Debug, Clone, PartialEq)]
pub struct KPair {
    pub p: FieldElement,
    pub q: FieldElement,
}

impl KPair {
    pub fn from_f(p: FieldElement, f: &Field) -> KPair {
        KPair {
            p,
            q: f.zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn mul(&self, other: &KPair, a: &FieldElement) -> KPair {
        let p = self
            .p
            .mul(&other.p)
            .unwrap()
            .add(&a.mul(&self.q.mul(&other.q).unwrap()).unwrap())
            .unwrap();
        let q = self
            .p
            .mul(&other.q)
            .unwrap()
            .add(&self.q.mul(&other.p).unwrap())
            .unwrap();
        KPair { p, q }
    }

    /// Galois conjugate over F: sqrt(a) -> -sqrt(a).
    pub fn sigma(&self) -> KPair {
        KPair {
            p: self.p.clone(),
            q: self.q.neg(),
        }
    }

    pub fn describe(&self) -> String {
        format!("({}) + ({})*sqrt(a)", self.p.describe(), self.q.describe())
    }
}

/// Square root of `w = w0 + w1*sqrt(a)` inside K = F(sqrt(a)).
/// Complete for [F:Q] <= 2 (recursion bottoms out in rational square tests).
pub fn sqrt_in_quadratic_ext(
    f: &Field,
    a: &FieldElement,
    w: &KPair,
) -> Result<Option<KPair>, AnalysisError> {
    if w.is_zero() {
        return Ok(Some(KPair::from_f(f.zero(), f)));
    }
    let (w0, w1) = (&w.p, &w.q);
    if w1.is_zero() {
        // x = p with p^2 = w0, or x = q*sqrt(a) with q^2 a = w0
        if let Some(p) = sqrt_in_field(f, w0)? {
            return Ok(Some(KPair::from_f(p, f)));
        }
        if !a.is_zero() {
            let target = w0.mul(&a.inv().map_err(|_| AnalysisError::FieldMismatch)?).unwrap();
            if let Some(q) = sqrt_in_field(f, &target)? {
                return Ok(Some(KPair {
                    p: f.zero(),
                    q,
                }));
            }
        }
        return Ok(None);
    }
    // x = p + q sqrt(a): p^2 + a q^2 = w0, 2pq = w1
    let n = w0
        .mul(w0)
        .unwrap()
        .sub(&a.mul(&w1.mul(w1).unwrap()).unwrap())
        .unwrap();
    let Some(r) = sqrt_in_field(f, &n)? else {
        return Ok(None);
    };
    let half = rat(1, 2);
    for root in [r.clone(), r.neg()] {
        let cand = w0.add(&root).unwrap().scale(&half);
        if let Some(p) = sqrt_in_field(f, &cand)? {
            if !p.is_zero() {
                let q = w1.scale(&half).mul(&p.inv().unwrap()).unwrap();
                let x = KPair { p, q };
                if &x.mul(&x, a) == w {
                    return Ok(Some(x));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::builtin_field;

    #[test]
    fn rational_and_quadratic_squares() {
        let q = builtin_field("Q").unwrap();
        assert!(sqrt_in_field(&q, &q.from_int(9)).unwrap().is_some());
        assert!(sqrt_in_field(&q, &q.from_int(17)).unwrap().is_none());

        let qi = builtin_field("Q(i)").unwrap();
        // 2i = (1+i)^2
        let w = qi.parse_element("2i").unwrap();
        let root = sqrt_in_field(&qi, &w).unwrap().unwrap();
        assert_eq!(root.mul(&root).unwrap(), w);
        // -1 = i^2
        let m1 = qi.from_int(-1);
        let r = sqrt_in_field(&qi, &m1).unwrap().unwrap();
        assert_eq!(r.mul(&r).unwrap(), m1);
        // 1+i is not a square in Q(i) (norm 2 is not a rational square)
        assert!(sqrt_in_field(&qi, &qi.parse_element("1+i").unwrap())
            .unwrap()
            .is_none());
    }

    #[test]
    fn golden_square_class_steps() {
        // theta/gamma = (1-i)/i = -1-i is not a square in K = Q(i)(sqrt5):
        // the inner obstruction is that 2 is not a rational square.
        let f = builtin_field("Q(i)").unwrap();
        let a = f.from_int(5);
        let w = KPair::from_f(f.parse_element("-1-i").unwrap(), &f);
        assert!(sqrt_in_quadratic_ext(&f, &a, &w).unwrap().is_none());
        // but 5 itself is a square in K
        let five = KPair::from_f(f.from_int(5), &f);
        let root = sqrt_in_quadratic_ext(&f, &a, &five).unwrap().unwrap();
        assert_eq!(&root.mul(&root, &a), &five);
    }

    #[test]
    fn silver_17_is_not_a_square() {
        // K = Q(sqrt-7)(i): x^2 = 17 has no solution
        let f = builtin_field("Q(sqrt-7)").unwrap();
        let a = f.from_int(-1);
        let w = KPair::from_f(f.from_int(17), &f);
        assert!(sqrt_in_quadratic_ext(&f, &a, &w).unwrap().is_none());
        // 1 is trivially a square, and so is -7 = sqrt(-7)^2 seen inside F
        let one = KPair::from_f(f.one(), &f);
        assert!(sqrt_in_quadratic_ext(&f, &a, &one).unwrap().is_some());
        let m7 = KPair::from_f(f.from_int(-7), &f);
        assert!(sqrt_in_quadratic_ext(&f, &a, &m7).unwrap().is_some());
    }

    #[test]
    fn gaussian_tower_square_class() {
        // theta/gamma = (1-i)/(1+i) = -i not a square in Q(i)(sqrt3)
        let f = builtin_field("Q(i)").unwrap();
        let a = f.from_int(3);
        let w = KPair::from_f(f.parse_element("-i").unwrap(), &f);
        assert!(sqrt_in_quadratic_ext(&f, &a, &w).unwrap().is_none());
        // gamma/theta = i likewise
        let wi = KPair::from_f(f.parse_element("i").unwrap(), &f);
        assert!(sqrt_in_quadratic_ext(&f, &a, &wi).unwrap().is_none());
    }
}
