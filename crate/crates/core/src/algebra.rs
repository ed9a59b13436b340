//! Cyclic algebras, their left-regular matrix representation, and the
//! iterated block construction
//!
//! ```text
//! alpha_theta : (X, Y) -> [ X          theta*tau(Y) ]
//!                         [ Y          tau(X)       ]
//! ```
//!
//! together with the determinant-preserving scaled variant that moves a
//! factor sqrt(theta') into the lower-left block. All entries stay exact
//! field elements; complex views are cached for emission.

use crate::numfield::{Automorphism, Field, FieldElement, FieldError};
use crate::rat::{rank_of_vectors, Rat};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::fmt;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("sigma must have order n={0}, found order {1}")]
    SigmaOrder(usize, usize),
    #[error("gamma must be nonzero and fixed by sigma")]
    BadGamma,
    #[error("element has {0} coordinates, algebra degree is {1}")]
    BadCoordinateCount(usize, usize),
    #[error("matrix sizes do not match: {0}x{1} vs {2}x{3}")]
    SizeMismatch(usize, usize, usize, usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("closure assumptions violated: {0}")]
    AssumptionsViolated(String),
    #[error("candidate nu/beta set is Q-linearly dependent (rank {0} of {1})")]
    DependentBasis(usize, usize),
    #[error("coefficient vector length {0} does not match basis size {1}")]
    LengthMismatch(usize, usize),
    #[error("theta is neither real nor totally imaginary under the embedding; cannot scale")]
    ThetaNotScalable,
    #[error("scaled map with zeta = +/-i needs i in the coefficient field {0}")]
    MissingI(String),
    #[error("theta' must embed to a positive real")]
    ThetaPrimeNotPositive,
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
}

struct AlgebraInner {
    name: String,
    k: Field,
    center: Option<Field>,
    sigma: Automorphism,
    gamma: FieldElement,
    n: usize,
    /// sigma powers 0..n-1, cached
    sigma_pows: Vec<Automorphism>,
}

/// Cyclic algebra `(K/F, sigma, gamma)` presented by its coordinate field K,
/// the Galois generator sigma (order n) and the nonzero gamma with
/// `sigma(gamma) = gamma`. The center F is the fixed field of sigma; an
/// explicit handle is attached when one of the built-ins matches.
#[derive(Clone)]
pub struct CyclicAlgebra(Arc<AlgebraInner>);

impl fmt::Debug for CyclicAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclicAlgebra({})", self.0.name)
    }
}

impl PartialEq for CyclicAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.name == other.0.name && self.0.k == other.0.k && self.0.n == other.0.n)
    }
}

impl CyclicAlgebra {
    pub fn new(
        name: &str,
        k: Field,
        center: Option<Field>,
        sigma: Automorphism,
        gamma: FieldElement,
        n: usize,
    ) -> Result<CyclicAlgebra, AlgebraError> {
        gamma.ensure_field(&k)?;
        if sigma.order() != n {
            return Err(AlgebraError::SigmaOrder(n, sigma.order()));
        }
        if gamma.is_zero() || sigma.apply(&gamma)? != gamma {
            return Err(AlgebraError::BadGamma);
        }
        let mut sigma_pows = Vec::with_capacity(n);
        let mut cur = k.aut("id")?;
        for _ in 0..n {
            sigma_pows.push(cur.clone());
            cur = sigma.compose(&cur)?;
        }
        Ok(CyclicAlgebra(Arc::new(AlgebraInner {
            name: name.into(),
            k,
            center,
            sigma,
            gamma,
            n,
            sigma_pows,
        })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }
    pub fn coordinate_field(&self) -> &Field {
        &self.0.k
    }
    pub fn center_field(&self) -> Option<&Field> {
        self.0.center.as_ref()
    }
    pub fn sigma(&self) -> &Automorphism {
        &self.0.sigma
    }
    pub fn gamma(&self) -> &FieldElement {
        &self.0.gamma
    }
    pub fn degree(&self) -> usize {
        self.0.n
    }
    pub fn sigma_pow(&self, k: usize) -> &Automorphism {
        &self.0.sigma_pows[k % self.0.n]
    }

    /// Is `x` in the center, i.e. fixed by sigma?
    pub fn center_contains(&self, x: &FieldElement) -> bool {
        self.0.sigma.apply(x).map(|y| y == *x).unwrap_or(false)
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement {
            alg: self.clone(),
            coords: vec![self.0.k.zero(); self.0.n],
        }
    }

    pub fn one(&self) -> AlgebraElement {
        self.from_scalar(self.0.k.one())
    }

    /// Embed a coordinate-field scalar as `x_0`.
    pub fn from_scalar(&self, l: FieldElement) -> AlgebraElement {
        let mut coords = vec![self.0.k.zero(); self.0.n];
        coords[0] = l;
        AlgebraElement {
            alg: self.clone(),
            coords,
        }
    }

    /// The generator e with `e^n = gamma`, `l e = e sigma(l)`.
    pub fn e(&self) -> AlgebraElement {
        let mut coords = vec![self.0.k.zero(); self.0.n];
        coords[1] = self.0.k.one();
        AlgebraElement {
            alg: self.clone(),
            coords,
        }
    }

    pub fn element(&self, coords: Vec<FieldElement>) -> Result<AlgebraElement, AlgebraError> {
        if coords.len() != self.0.n {
            return Err(AlgebraError::BadCoordinateCount(coords.len(), self.0.n));
        }
        for c in &coords {
            c.ensure_field(&self.0.k)?;
        }
        Ok(AlgebraElement {
            alg: self.clone(),
            coords,
        })
    }
}

/// Element `x_0 + e x_1 + ... + e^{n-1} x_{n-1}` with coordinates in K.
#[derive(Clone)]
pub struct AlgebraElement {
    alg: CyclicAlgebra,
    coords: Vec<FieldElement>,
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                if k == 0 {
                    c.describe()
                } else {
                    format!("e^{k}*({})", c.describe())
                }
            })
            .collect();
        write!(
            f,
            "{}",
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join(" + ")
            }
        )
    }
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.coords == other.coords
    }
}

impl AlgebraElement {
    pub fn algebra(&self) -> &CyclicAlgebra {
        &self.alg
    }
    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn ensure_same(&self, other: &AlgebraElement) -> Result<(), AlgebraError> {
        if self.alg == other.alg {
            Ok(())
        } else {
            Err(AlgebraError::AlgebraMismatch)
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.ensure_same(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_, _>>()?;
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coords,
        })
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.ensure_same(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_, _>>()?;
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coords,
        })
    }

    pub fn neg(&self) -> AlgebraElement {
        AlgebraElement {
            alg: self.alg.clone(),
            coords: self.coords.iter().map(|c| c.neg()).collect(),
        }
    }

    /// Product using `(e^i x)(e^j y) = e^{i+j} sigma^j(x) y` and `e^n = gamma`.
    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.ensure_same(other)?;
        let n = self.alg.degree();
        let k_field = self.alg.coordinate_field();
        let gamma = self.alg.gamma();
        let mut coords = vec![k_field.zero(); n];
        for (i, xi) in self.coords.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in other.coords.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let mut term = self.alg.sigma_pow(j).apply(xi)?.mul(yj)?;
                let idx = (i + j) % n;
                if i + j >= n {
                    term = term.mul(gamma)?;
                }
                coords[idx] = coords[idx].add(&term)?;
            }
        }
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coords,
        })
    }

    /// Left multiplication by a coordinate-field scalar:
    /// `l * e^k x_k = e^k sigma^k(l) x_k`.
    pub fn scalar_left(&self, l: &FieldElement) -> Result<AlgebraElement, AlgebraError> {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(k, x)| self.alg.sigma_pow(k).apply(l)?.mul(x).map_err(Into::into))
            .collect::<Result<_, AlgebraError>>()?;
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coords,
        })
    }

    /// Coordinatewise action of a K-automorphism (the extension of tau to
    /// the algebra; meaningful when tau fixes gamma and commutes with sigma).
    pub fn apply_aut(&self, tau: &Automorphism) -> Result<AlgebraElement, AlgebraError> {
        let coords = self
            .coords
            .iter()
            .map(|c| tau.apply(c))
            .collect::<Result<_, _>>()?;
        Ok(AlgebraElement {
            alg: self.alg.clone(),
            coords,
        })
    }

    pub fn pow(&self, e: u32) -> Result<AlgebraElement, AlgebraError> {
        let mut acc = self.alg.one();
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Flattened rational coordinates (n * degree entries), for rank checks.
    pub fn q_coordinates(&self) -> Vec<Rat> {
        self.coords
            .iter()
            .flat_map(|c| c.coeffs().to_vec())
            .collect()
    }
}

/// Rectangular matrix over a fixed number field with a cached complex view.
#[derive(Debug)]
pub struct MatrixOverField {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<FieldElement>,
    float_view: OnceLock<DMatrix<Complex64>>,
}

impl Clone for MatrixOverField {
    fn clone(&self) -> Self {
        MatrixOverField {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.clone(),
            float_view: OnceLock::new(),
        }
    }
}

impl PartialEq for MatrixOverField {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl MatrixOverField {
    pub fn new(
        field: Field,
        rows: usize,
        cols: usize,
        entries: Vec<FieldElement>,
    ) -> Result<MatrixOverField, AlgebraError> {
        if entries.len() != rows * cols {
            return Err(AlgebraError::LengthMismatch(entries.len(), rows * cols));
        }
        for e in &entries {
            e.ensure_field(&field)?;
        }
        Ok(MatrixOverField {
            field,
            rows,
            cols,
            entries,
            float_view: OnceLock::new(),
        })
    }

    pub fn zero(field: &Field, rows: usize, cols: usize) -> MatrixOverField {
        MatrixOverField {
            field: field.clone(),
            rows,
            cols,
            entries: vec![field.zero(); rows * cols],
            float_view: OnceLock::new(),
        }
    }

    pub fn identity(field: &Field, n: usize) -> MatrixOverField {
        let mut m = Self::zero(field, n, n);
        for k in 0..n {
            m.entries[k * n + k] = field.one();
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, r: usize, c: usize) -> &FieldElement {
        &self.entries[r * self.cols + c]
    }
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.entries[r * self.cols + c] = v;
        self.float_view = OnceLock::new();
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn add(&self, other: &MatrixOverField) -> Result<MatrixOverField, AlgebraError> {
        self.check_shape(other, true)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_, _>>()?;
        MatrixOverField::new(self.field.clone(), self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &MatrixOverField) -> Result<MatrixOverField, AlgebraError> {
        self.check_shape(other, true)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_, _>>()?;
        MatrixOverField::new(self.field.clone(), self.rows, self.cols, entries)
    }

    pub fn neg(&self) -> MatrixOverField {
        MatrixOverField {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.neg()).collect(),
            float_view: OnceLock::new(),
        }
    }

    fn check_shape(&self, other: &MatrixOverField, same: bool) -> Result<(), AlgebraError> {
        let ok = if same {
            self.rows == other.rows && self.cols == other.cols
        } else {
            self.cols == other.rows
        };
        if ok {
            Ok(())
        } else {
            Err(AlgebraError::SizeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ))
        }
    }

    pub fn mul(&self, other: &MatrixOverField) -> Result<MatrixOverField, AlgebraError> {
        self.check_shape(other, false)?;
        let mut out = MatrixOverField::zero(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * other.cols + j;
                    out.entries[idx] = out.entries[idx].add(&a.mul(b)?)?;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, l: &FieldElement) -> Result<MatrixOverField, AlgebraError> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.mul(l))
            .collect::<Result<_, _>>()?;
        MatrixOverField::new(self.field.clone(), self.rows, self.cols, entries)
    }

    pub fn apply_aut(&self, a: &Automorphism) -> Result<MatrixOverField, AlgebraError> {
        let entries = self
            .entries
            .iter()
            .map(|e| a.apply(e))
            .collect::<Result<_, _>>()?;
        MatrixOverField::new(self.field.clone(), self.rows, self.cols, entries)
    }

    pub fn transpose(&self) -> MatrixOverField {
        let mut entries = Vec::with_capacity(self.entries.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                entries.push(self.get(r, c).clone());
            }
        }
        MatrixOverField {
            field: self.field.clone(),
            rows: self.cols,
            cols: self.rows,
            entries,
            float_view: OnceLock::new(),
        }
    }

    /// Hermitian transpose: entrywise conjugation then transpose.
    pub fn hermitian(&self) -> MatrixOverField {
        let conj = self.field.conj();
        self.apply_aut(&conj)
            .expect("conjugation is total")
            .transpose()
    }

    /// Exact determinant by minor expansion with memoized column subsets.
    pub fn det(&self) -> Result<FieldElement, AlgebraError> {
        if self.rows != self.cols {
            return Err(AlgebraError::NotSquare);
        }
        let n = self.rows;
        let mut dp: Vec<FieldElement> = vec![self.field.zero(); 1 << n];
        dp[0] = self.field.one();
        for mask in 1usize..(1 << n) {
            let t = mask.count_ones() as usize;
            let mut acc = self.field.zero();
            let mut j = 0usize;
            for c in 0..n {
                if mask & (1 << c) == 0 {
                    continue;
                }
                let a = self.get(t - 1, c);
                if !a.is_zero() {
                    let term = dp[mask & !(1 << c)].mul(a)?;
                    acc = if (t - 1 + j).is_multiple_of(2) {
                        acc.add(&term)?
                    } else {
                        acc.sub(&term)?
                    };
                }
                j += 1;
            }
            dp[mask] = acc;
        }
        Ok(dp[(1 << n) - 1].clone())
    }

    /// Cached complex view under the distinguished embedding.
    pub fn embed(&self) -> &DMatrix<Complex64> {
        self.float_view.get_or_init(|| {
            DMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c).embed())
        })
    }

    /// Lift all entries into an extension field via coefficient padding.
    pub fn lift_to(&self, target: &Field) -> Result<MatrixOverField, AlgebraError> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.lift_to(target))
            .collect::<Result<_, _>>()?;
        MatrixOverField::new(target.clone(), self.rows, self.cols, entries)
    }

    /// Assemble `[[a, b], [c, d]]` from equally sized square blocks.
    pub fn block2(
        a: &MatrixOverField,
        b: &MatrixOverField,
        c: &MatrixOverField,
        d: &MatrixOverField,
    ) -> Result<MatrixOverField, AlgebraError> {
        let n = a.rows;
        for m in [a, b, c, d] {
            if m.rows != n || m.cols != n {
                return Err(AlgebraError::SizeMismatch(m.rows, m.cols, n, n));
            }
        }
        let mut out = MatrixOverField::zero(&a.field, 2 * n, 2 * n);
        for r in 0..n {
            for cidx in 0..n {
                out.entries[r * 2 * n + cidx] = a.get(r, cidx).clone();
                out.entries[r * 2 * n + n + cidx] = b.get(r, cidx).clone();
                out.entries[(n + r) * 2 * n + cidx] = c.get(r, cidx).clone();
                out.entries[(n + r) * 2 * n + n + cidx] = d.get(r, cidx).clone();
            }
        }
        Ok(out)
    }
}

/// Left-regular representation: diagonal `diag(l, sigma(l), ...)` for
/// scalars and the companion-style matrix with gamma in the corner for e.
pub fn lambda_repr(alg: &CyclicAlgebra, x: &AlgebraElement) -> MatrixOverField {
    let n = alg.degree();
    let field = alg.coordinate_field();
    let gamma = alg.gamma();
    let mut m = MatrixOverField::zero(field, n, n);
    for r in 0..n {
        for c in 0..n {
            let k = (r + n - c) % n;
            let coord = &x.coords()[k];
            if coord.is_zero() {
                continue;
            }
            let mut val = alg.sigma_pow(c).apply(coord).expect("same field");
            if r < c {
                val = val.mul(gamma).expect("same field");
            }
            m.set(r, c, val);
        }
    }
    m
}

/// How theta = zeta * theta' factors for the scaled map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zeta {
    One,
    MinusOne,
    I,
    MinusI,
}

impl Zeta {
    pub fn label(&self) -> &'static str {
        match self {
            Zeta::One => "1",
            Zeta::MinusOne => "-1",
            Zeta::I => "i",
            Zeta::MinusI => "-i",
        }
    }
}

/// Parameters of one application of the iterated map.
#[derive(Debug, Clone)]
pub struct IterationParams {
    theta: FieldElement,
    tau: Automorphism,
    scaled: bool,
    zeta: Option<Zeta>,
    theta_prime: Option<FieldElement>,
    /// Field the iterated matrices live in (K itself, or K with sqrt(theta')
    /// adjoined) and sqrt(theta') inside it.
    working_field: Field,
    sqrt_theta_prime: Option<FieldElement>,
}

impl IterationParams {
    /// Plain alpha_theta.
    pub fn unscaled(theta: FieldElement, tau: Automorphism) -> Result<Self, AlgebraError> {
        theta.ensure_field(tau.field())?;
        Ok(IterationParams {
            working_field: tau.field().clone(),
            theta,
            tau,
            scaled: false,
            zeta: None,
            theta_prime: None,
            sqrt_theta_prime: None,
        })
    }

    /// Scaled variant: factor theta = zeta*theta' with theta' > 0 and move
    /// sqrt(theta') into the lower block. Requires theta real or totally
    /// imaginary; adjoins sqrt(theta') when it is not already visible.
    pub fn scaled(theta: FieldElement, tau: Automorphism) -> Result<Self, AlgebraError> {
        theta.ensure_field(tau.field())?;
        let k = tau.field().clone();
        let e = theta.embed();
        let tol = 1e-12 * (1.0 + e.norm());
        let (zeta, theta_prime) = if e.im.abs() <= tol && e.re > 0.0 {
            (Zeta::One, theta.clone())
        } else if e.im.abs() <= tol && e.re < 0.0 {
            (Zeta::MinusOne, theta.neg())
        } else if e.re.abs() <= tol && e.im != 0.0 {
            let i_elem = k
                .constant("i")
                .ok_or_else(|| AlgebraError::MissingI(k.name().to_string()))?;
            if e.im > 0.0 {
                // theta' = -i * theta
                (Zeta::I, theta.mul(&i_elem.neg())?)
            } else {
                (Zeta::MinusI, theta.mul(&i_elem)?)
            }
        } else {
            return Err(AlgebraError::ThetaNotScalable);
        };
        let ep = theta_prime.embed();
        if !(ep.re > 0.0 && ep.im.abs() <= 1e-9 * (1.0 + ep.re)) {
            return Err(AlgebraError::ThetaPrimeNotPositive);
        }
        let (working_field, sqrt_tp) = match k.simple_sqrt(&theta_prime) {
            Some(root) => (k.clone(), root),
            None => {
                let ext = k.adjoin_sqrt(&theta_prime, "sqrt_tp")?;
                let root = ext.constant("sqrt_tp").expect("adjoined symbol");
                (ext, root)
            }
        };
        Ok(IterationParams {
            theta,
            tau,
            scaled: true,
            zeta: Some(zeta),
            theta_prime: Some(theta_prime),
            working_field,
            sqrt_theta_prime: Some(sqrt_tp),
        })
    }

    pub fn theta(&self) -> &FieldElement {
        &self.theta
    }
    pub fn tau(&self) -> &Automorphism {
        &self.tau
    }
    pub fn is_scaled(&self) -> bool {
        self.scaled
    }
    pub fn zeta(&self) -> Option<Zeta> {
        self.zeta
    }
    pub fn theta_prime(&self) -> Option<&FieldElement> {
        self.theta_prime.as_ref()
    }
    /// Field the iterated basis matrices live in.
    pub fn working_field(&self) -> &Field {
        &self.working_field
    }
    pub fn sqrt_theta_prime(&self) -> Option<&FieldElement> {
        self.sqrt_theta_prime.as_ref()
    }

    fn zeta_element(&self) -> Result<FieldElement, AlgebraError> {
        let w = &self.working_field;
        Ok(match self.zeta.expect("scaled") {
            Zeta::One => w.one(),
            Zeta::MinusOne => w.one().neg(),
            Zeta::I => w
                .constant("i")
                .ok_or_else(|| AlgebraError::MissingI(w.name().to_string()))?,
            Zeta::MinusI => w
                .constant("i")
                .ok_or_else(|| AlgebraError::MissingI(w.name().to_string()))?
                .neg(),
        })
    }
}

/// The iterated block map. Unscaled: `[[X, theta*tau(Y)], [Y, tau(X)]]`;
/// scaled: `[[X, zeta*sqrt(theta')*tau(Y)], [sqrt(theta')*Y, tau(X)]]`.
pub fn alpha(
    x: &MatrixOverField,
    y: &MatrixOverField,
    p: &IterationParams,
) -> Result<MatrixOverField, AlgebraError> {
    if x.rows() != x.cols() || y.rows() != y.cols() {
        return Err(AlgebraError::NotSquare);
    }
    if x.rows() != y.rows() {
        return Err(AlgebraError::SizeMismatch(x.rows(), x.cols(), y.rows(), y.cols()));
    }
    let tau_y = y.apply_aut(p.tau())?;
    let tau_x = x.apply_aut(p.tau())?;
    if !p.is_scaled() {
        let upper_right = tau_y.scale(p.theta())?;
        return MatrixOverField::block2(x, &upper_right, y, &tau_x);
    }
    let w = p.working_field();
    let sqrt_tp = p.sqrt_theta_prime().expect("scaled");
    let zeta = p.zeta_element()?;
    let scale_ur = zeta.mul(sqrt_tp).map_err(AlgebraError::Field)?;
    let x_l = x.lift_to(w)?;
    let y_l = y.lift_to(w)?;
    let tau_x_l = tau_x.lift_to(w)?;
    let tau_y_l = tau_y.lift_to(w)?;
    MatrixOverField::block2(
        &x_l,
        &tau_y_l.scale(&scale_ur)?,
        &y_l.scale(sqrt_tp)?,
        &tau_x_l,
    )
}

/// Report of the closure assumptions behind the iterated construction.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AssumptionReport {
    pub tau_fixes_gamma: bool,
    pub tau_commutes_sigma: bool,
    pub tau_order_2: bool,
    /// theta fixed by both sigma and tau: lies in the subfield over which
    /// the image of the map closes into an algebra.
    pub theta_in_f: bool,
    pub theta_fixed_by_tau: bool,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.tau_fixes_gamma && self.tau_commutes_sigma && self.tau_order_2 && self.theta_in_f
    }

    pub fn describe(&self) -> String {
        format!(
            "tau_fixes_gamma={} tau_commutes_sigma={} tau_order_2={} theta_in_f={} theta_fixed_by_tau={}",
            self.tau_fixes_gamma,
            self.tau_commutes_sigma,
            self.tau_order_2,
            self.theta_in_f,
            self.theta_fixed_by_tau
        )
    }
}

/// Check the iterated-construction assumptions exactly on a field basis.
pub fn check_assumptions(
    alg: &CyclicAlgebra,
    tau: &Automorphism,
    theta: &FieldElement,
) -> Result<AssumptionReport, AlgebraError> {
    let k = alg.coordinate_field();
    theta.ensure_field(k)?;
    let tau_fixes_gamma = tau.apply(alg.gamma())? == *alg.gamma();
    let mut tau_commutes_sigma = true;
    for b in 0..k.degree() {
        let x = k.basis_element(b);
        let ts = tau.apply(&alg.sigma().apply(&x)?)?;
        let st = alg.sigma().apply(&tau.apply(&x)?)?;
        if ts != st {
            tau_commutes_sigma = false;
            break;
        }
    }
    let tau_order_2 = tau.order() == 2;
    let sigma_fixes_theta = alg.sigma().apply(theta)? == *theta;
    let theta_fixed_by_tau = tau.apply(theta)? == *theta;
    Ok(AssumptionReport {
        tau_fixes_gamma,
        tau_commutes_sigma,
        tau_order_2,
        theta_in_f: sigma_fixes_theta && theta_fixed_by_tau,
        theta_fixed_by_tau,
    })
}

/// Multiplicative closure of the image: the product of two iterated blocks
/// is the iterated block of `(xu + theta*tau(y)v, yu + tau(x)v)`.
pub fn algebra_mul_via_alpha(
    x: &AlgebraElement,
    y: &AlgebraElement,
    u: &AlgebraElement,
    v: &AlgebraElement,
    p: &IterationParams,
) -> Result<(AlgebraElement, AlgebraElement), AlgebraError> {
    let alg = x.algebra().clone();
    let report = check_assumptions(&alg, p.tau(), p.theta())?;
    if !report.all_hold() {
        return Err(AlgebraError::AssumptionsViolated(report.describe()));
    }
    let tau_y = y.apply_aut(p.tau())?;
    let tau_x = x.apply_aut(p.tau())?;
    let first = x
        .mul(u)?
        .add(&tau_y.mul(v)?.scalar_left(p.theta())?)?;
    let second = y.mul(u)?.add(&tau_x.mul(v)?)?;
    Ok((first, second))
}

/// Basis ordering conventions appearing in the constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QBasisOrder {
    /// `nu1 b1, ..., e^{n-1} nu_n b1, nu1 b2, ..., e^{n-1} nu_n b2`.
    BetaMajor,
    /// Degree-3 order: `mu_b nu_j e^k` grouped by e-power, with the
    /// e-powers multiplied on the right (matches `V_j Gamma^k`).
    PowerMajor,
    /// Interleaved: `nu1 b1, nu1 b2, nu2 b1, nu2 b2, e nu1 b1, ...`
    /// (the totally-real iterated Alamouti layout).
    BetaMinor,
}

/// Q-basis of the cyclic algebra from a K/F basis `nu` and Q-independent
/// `beta` scalars, as lambda-representations in the declared order.
pub fn build_q_basis(
    alg: &CyclicAlgebra,
    nu: &[FieldElement],
    betas: &[FieldElement],
    order: QBasisOrder,
) -> Result<Vec<MatrixOverField>, AlgebraError> {
    let n = alg.degree();
    let mut elements: Vec<AlgebraElement> = Vec::with_capacity(betas.len() * n * nu.len());
    let e = alg.e();
    match order {
        QBasisOrder::BetaMajor => {
            for beta in betas {
                for k in 0..n {
                    for nu_j in nu {
                        let scalar = nu_j.mul(beta)?;
                        let elem = e.pow(k as u32)?.mul(&alg.from_scalar(scalar))?;
                        elements.push(elem);
                    }
                }
            }
        }
        QBasisOrder::PowerMajor => {
            for k in 0..n {
                for beta in betas {
                    for nu_j in nu {
                        let scalar = beta.mul(nu_j)?;
                        let elem = alg.from_scalar(scalar).mul(&e.pow(k as u32)?)?;
                        elements.push(elem);
                    }
                }
            }
        }
        QBasisOrder::BetaMinor => {
            for k in 0..n {
                for nu_j in nu {
                    for beta in betas {
                        let scalar = nu_j.mul(beta)?;
                        let elem = e.pow(k as u32)?.mul(&alg.from_scalar(scalar))?;
                        elements.push(elem);
                    }
                }
            }
        }
    }
    let coords: Vec<Vec<Rat>> = elements.iter().map(|x| x.q_coordinates()).collect();
    let rank = rank_of_vectors(&coords);
    if rank != elements.len() {
        return Err(AlgebraError::DependentBasis(rank, elements.len()));
    }
    Ok(elements.iter().map(|x| lambda_repr(alg, x)).collect())
}

/// Iterated basis `B_i = alpha(D_i, 0)`, `B_{|D|+i} = alpha(0, D_i)`.
pub fn build_iterated_basis(
    d_basis: &[MatrixOverField],
    p: &IterationParams,
) -> Result<Vec<MatrixOverField>, AlgebraError> {
    let mut out = Vec::with_capacity(2 * d_basis.len());
    for d in d_basis {
        let zero = MatrixOverField::zero(d.field(), d.rows(), d.cols());
        out.push(alpha(d, &zero, p)?);
    }
    for d in d_basis {
        let zero = MatrixOverField::zero(d.field(), d.rows(), d.cols());
        out.push(alpha(&zero, d, p)?);
    }
    Ok(out)
}

/// `X = sum g_i B_i` in the complex view.
pub fn encode(basis: &[DMatrix<Complex64>], g: &[i64]) -> Result<DMatrix<Complex64>, AlgebraError> {
    if basis.len() != g.len() {
        return Err(AlgebraError::LengthMismatch(g.len(), basis.len()));
    }
    let mut acc = DMatrix::<Complex64>::zeros(basis[0].nrows(), basis[0].ncols());
    for (b, gi) in basis.iter().zip(g) {
        acc += b * Complex64::new(*gi as f64, 0.0);
    }
    Ok(acc)
}

/// Do all candidates commute exactly with every basis matrix?
pub fn commutant_check(
    basis: &[MatrixOverField],
    candidates: &[MatrixOverField],
) -> Result<bool, AlgebraError> {
    for c in candidates {
        for b in basis {
            if c.mul(b)? != b.mul(c)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
