//! Exact arithmetic in the concrete number fields used by the code
//! constructions, with their automorphisms and a distinguished complex
//! embedding.
//!
//! Elements are rational coefficient vectors over an explicit Q-basis; the
//! multiplication table expands products of basis elements back onto the
//! basis. All zero decisions downstream (orthogonality masks, determinant
//! vanishing) reduce to exact vector comparisons here.
//!
//! Distinguished embedding convention: `i -> +i`, `sqrt(d) -> +sqrt(d)` for
//! d > 0, `sqrt(d) -> +i*sqrt(|d|)` for d < 0, `zeta7 -> exp(2*pi*i/7)`.

mod builtin;
mod json;

pub use builtin::{builtin_field, BUILTIN_NAMES};
pub use json::FieldSpecJson;

use crate::rat::{format_rat, rat_sqrt, rat_to_f64, solve_columns, Rat};
use num::{One, Zero};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Sparse coefficient vector: sorted `(index, coeff)` pairs, no zeros.
pub type SparseRow = Vec<(usize, Rat)>;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("basis 0 of {0} is not the unit")]
    BadUnit(String),
    #[error("mult table of {0} not commutative at pair ({1},{2})")]
    NonCommutative(String, usize, usize),
    #[error("mult table of {0} not associative at triple ({1},{2},{3})")]
    NonAssociative(String, usize, usize, usize),
    #[error("automorphism {0} of {1} does not fix 1")]
    DoesNotFixOne(String, String),
    #[error("automorphism {0} of {1} is not invertible")]
    SingularAutomorphism(String, String),
    #[error("automorphism {0} of {1} is not a ring homomorphism")]
    NotRingMap(String, String),
    #[error("automorphisms of {0} are not closed under composition ({1} o {2})")]
    NotClosed(String, String, String),
    #[error("embedding of {0} breaks multiplicativity at basis pair ({1},{2})")]
    EmbeddingMismatch(String, usize, usize),
    #[error("conjugation automorphism {0} of {1} does not match complex conjugation")]
    BadConjugation(String, String),
    #[error("elements of {0} and {1} mixed in one operation")]
    FieldMismatch(String, String),
    #[error("coefficient vector has length {0}, field degree is {1}")]
    BadLength(usize, usize),
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("element is a zero divisor (table is not a field)")]
    NotInvertible,
    #[error("{0} has no automorphism named {1}")]
    UnknownAutomorphism(String, String),
    #[error("unknown built-in field {0}")]
    UnknownField(String),
    #[error("cannot parse {0:?} as an element of {1}")]
    Parse(String, String),
    #[error("sqrt adjunction needs a positive real embedding, got {0}")]
    AdjoinNotPositive(Complex64),
    #[error("bad field spec: {0}")]
    BadSpec(String),
}

/// Declarative description of a number field; validated by [`Field::make`].
#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub name: String,
    pub degree: usize,
    pub basis_symbols: Vec<String>,
    /// `mult_table[i][j]` = coefficients of `basis_i * basis_j`.
    pub mult_table: Vec<Vec<SparseRow>>,
    /// Distinguished complex embedding of each basis element.
    pub embeddings: Vec<Complex64>,
    /// Named automorphisms; `matrix[j]` is the coefficient vector of the
    /// image of `basis_j` (matrices act on coefficient columns).
    pub automorphisms: Vec<(String, Vec<Vec<Rat>>)>,
    /// Name of the automorphism realizing complex conjugation under the
    /// distinguished embedding (hermitian transposes depend on it).
    pub conj_name: String,
    /// Named constants usable in `parse_element` (e.g. `phi`, `sqrtm7`).
    pub constants: BTreeMap<String, Vec<Rat>>,
}

struct AutData {
    name: String,
    columns: Vec<Vec<Rat>>,
    order: usize,
}

struct FieldInner {
    name: String,
    degree: usize,
    basis_symbols: Vec<String>,
    mult_table: Vec<Vec<SparseRow>>,
    embeddings: Vec<Complex64>,
    auts: Vec<AutData>,
    aut_index: BTreeMap<String, usize>,
    conj_idx: usize,
    constants: BTreeMap<String, Vec<Rat>>,
    /// Provenance for JSON round trips: built-in name or sqrt extension.
    origin: FieldOrigin,
}

#[derive(Debug, Clone)]
pub enum FieldOrigin {
    Builtin(String),
    AdjoinedSqrt { base: String, radicand: Vec<Rat> },
    Custom,
}

/// Validated handle to a number field. Cheap to clone, immutable, `Sync`.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.0.name)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.name == other.0.name
    }
}
impl Eq for Field {}

const EMBED_TOL: f64 = 1e-12;

pub(crate) fn table_mul(table: &[Vec<SparseRow>], x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    let d = x.len();
    let mut acc = vec![Rat::zero(); d];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let c = xi * yj;
            for (k, t) in &table[i][j] {
                acc[*k] = &acc[*k] + &(&c * t);
            }
        }
    }
    acc
}

fn to_sparse(dense: &[Rat]) -> SparseRow {
    dense
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, c.clone()))
        .collect()
}

fn apply_columns(columns: &[Vec<Rat>], x: &[Rat]) -> Vec<Rat> {
    let d = x.len();
    let mut out = vec![Rat::zero(); d];
    for (j, xj) in x.iter().enumerate() {
        if xj.is_zero() {
            continue;
        }
        for (k, c) in columns[j].iter().enumerate() {
            if !c.is_zero() {
                out[k] = &out[k] + &(xj * c);
            }
        }
    }
    out
}

fn unit_vec(degree: usize, k: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); degree];
    v[k] = Rat::one();
    v
}

impl Field {
    /// Validate a spec and build a field handle.
    ///
    /// All invariants are checked exhaustively up to degree 12; larger
    /// fields (sqrt adjunctions of the degree-12 cyclotomic) check
    /// associativity on a deterministic sample of triples.
    pub fn make(spec: FieldSpec) -> Result<Field, FieldError> {
        Self::make_with_origin(spec, FieldOrigin::Custom)
    }

    pub(crate) fn make_with_origin(
        spec: FieldSpec,
        origin: FieldOrigin,
    ) -> Result<Field, FieldError> {
        let d = spec.degree;
        let name = spec.name.clone();
        if spec.basis_symbols.len() != d
            || spec.mult_table.len() != d
            || spec.mult_table.iter().any(|r| r.len() != d)
            || spec.embeddings.len() != d
        {
            return Err(FieldError::BadSpec(name));
        }
        let table = &spec.mult_table;
        // basis 0 must be the multiplicative unit
        for j in 0..d {
            let prod = table_mul(table, &unit_vec(d, 0), &unit_vec(d, j));
            if prod != unit_vec(d, j) {
                return Err(FieldError::BadUnit(name.clone()));
            }
        }
        // commutativity
        for i in 0..d {
            for j in i + 1..d {
                if table[i][j] != table[j][i] {
                    return Err(FieldError::NonCommutative(name.clone(), i, j));
                }
            }
        }
        // associativity: exhaustive for small degree, sampled above 12
        let triples: Vec<(usize, usize, usize)> = if d <= 12 {
            (0..d)
                .flat_map(|i| (0..d).flat_map(move |j| (0..d).map(move |k| (i, j, k))))
                .collect()
        } else {
            let mut s = 0x9e3779b97f4a7c15u64;
            (0..400)
                .map(|_| {
                    let mut next = || {
                        s ^= s << 13;
                        s ^= s >> 7;
                        s ^= s << 17;
                        (s % d as u64) as usize
                    };
                    (next(), next(), next())
                })
                .collect()
        };
        for (i, j, k) in triples {
            let ij = table_mul(table, &unit_vec(d, i), &unit_vec(d, j));
            let jk = table_mul(table, &unit_vec(d, j), &unit_vec(d, k));
            let left = table_mul(table, &ij, &unit_vec(d, k));
            let right = table_mul(table, &unit_vec(d, i), &jk);
            if left != right {
                return Err(FieldError::NonAssociative(name.clone(), i, j, k));
            }
        }
        // embedding multiplicativity on all basis pairs
        for i in 0..d {
            for j in 0..d {
                let prod = table_mul(table, &unit_vec(d, i), &unit_vec(d, j));
                let via_table: Complex64 = prod
                    .iter()
                    .zip(&spec.embeddings)
                    .map(|(c, e)| e * rat_to_f64(c))
                    .sum();
                let direct = spec.embeddings[i] * spec.embeddings[j];
                let scale = 1f64.max(direct.norm());
                if (via_table - direct).norm() > EMBED_TOL * scale {
                    return Err(FieldError::EmbeddingMismatch(name.clone(), i, j));
                }
            }
        }
        // automorphisms: fix 1, invertible, ring maps, known orders
        let mut auts = Vec::new();
        let mut aut_index = BTreeMap::new();
        for (aname, cols) in &spec.automorphisms {
            if cols.len() != d || cols.iter().any(|c| c.len() != d) {
                return Err(FieldError::BadSpec(name.clone()));
            }
            if cols[0] != unit_vec(d, 0) {
                return Err(FieldError::DoesNotFixOne(aname.clone(), name.clone()));
            }
            if solve_columns(cols, &unit_vec(d, 0)).is_none() {
                return Err(FieldError::SingularAutomorphism(aname.clone(), name.clone()));
            }
            for i in 0..d {
                for j in i..d {
                    let prod = table_mul(table, &unit_vec(d, i), &unit_vec(d, j));
                    let img_prod = apply_columns(cols, &prod);
                    let prod_img = table_mul(table, &cols[i], &cols[j]);
                    if img_prod != prod_img {
                        return Err(FieldError::NotRingMap(aname.clone(), name.clone()));
                    }
                }
            }
            let order = aut_order(cols, d)
                .ok_or_else(|| FieldError::SingularAutomorphism(aname.clone(), name.clone()))?;
            aut_index.insert(aname.clone(), auts.len());
            auts.push(AutData {
                name: aname.clone(),
                columns: cols.clone(),
                order,
            });
        }
        // composition closure of the declared group
        for a in &auts {
            for b in &auts {
                let comp: Vec<Vec<Rat>> = (0..d)
                    .map(|j| apply_columns(&a.columns, &b.columns[j]))
                    .collect();
                if !auts.iter().any(|c| c.columns == comp) {
                    return Err(FieldError::NotClosed(
                        name.clone(),
                        a.name.clone(),
                        b.name.clone(),
                    ));
                }
            }
        }
        let conj_idx = *aut_index
            .get(&spec.conj_name)
            .ok_or_else(|| FieldError::UnknownAutomorphism(name.clone(), spec.conj_name.clone()))?;
        // conjugation must agree with complex conjugation of the embedding
        for j in 0..d {
            let img: Complex64 = auts[conj_idx].columns[j]
                .iter()
                .zip(&spec.embeddings)
                .map(|(c, e)| e * rat_to_f64(c))
                .sum();
            if (img - spec.embeddings[j].conj()).norm() > EMBED_TOL * 1f64.max(img.norm()) {
                return Err(FieldError::BadConjugation(spec.conj_name.clone(), name.clone()));
            }
        }
        Ok(Field(Arc::new(FieldInner {
            name: spec.name,
            degree: d,
            basis_symbols: spec.basis_symbols,
            mult_table: spec.mult_table,
            embeddings: spec.embeddings,
            auts,
            aut_index,
            conj_idx,
            constants: spec.constants,
            origin,
        })))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }
    pub fn degree(&self) -> usize {
        self.0.degree
    }
    pub fn basis_symbols(&self) -> &[String] {
        &self.0.basis_symbols
    }
    pub fn origin(&self) -> &FieldOrigin {
        &self.0.origin
    }
    pub(crate) fn mult_table(&self) -> &[Vec<SparseRow>] {
        &self.0.mult_table
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coeffs: vec![Rat::zero(); self.0.degree],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.basis_element(0)
    }

    pub fn basis_element(&self, k: usize) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coeffs: unit_vec(self.0.degree, k),
        }
    }

    pub fn from_rat(&self, r: Rat) -> FieldElement {
        let mut coeffs = vec![Rat::zero(); self.0.degree];
        coeffs[0] = r;
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_rat(crate::rat::rat_i(n))
    }

    pub fn element(&self, coeffs: Vec<Rat>) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.0.degree {
            return Err(FieldError::BadLength(coeffs.len(), self.0.degree));
        }
        Ok(FieldElement {
            field: self.clone(),
            coeffs,
        })
    }

    /// Look up a named constant (`phi`, `sqrtm7`, ...) or basis symbol.
    pub fn constant(&self, name: &str) -> Option<FieldElement> {
        if let Some(k) = self.0.basis_symbols.iter().position(|s| s == name) {
            return Some(self.basis_element(k));
        }
        self.0.constants.get(name).map(|v| FieldElement {
            field: self.clone(),
            coeffs: v.clone(),
        })
    }

    pub fn automorphism_names(&self) -> Vec<String> {
        self.0.auts.iter().map(|a| a.name.clone()).collect()
    }

    pub fn aut(&self, name: &str) -> Result<Automorphism, FieldError> {
        let idx = *self
            .0
            .aut_index
            .get(name)
            .ok_or_else(|| FieldError::UnknownAutomorphism(self.0.name.clone(), name.into()))?;
        Ok(Automorphism {
            field: self.clone(),
            idx,
        })
    }

    /// The automorphism realizing complex conjugation.
    pub fn conj(&self) -> Automorphism {
        Automorphism {
            field: self.clone(),
            idx: self.0.conj_idx,
        }
    }

    pub fn embed_basis(&self, k: usize) -> Complex64 {
        self.0.embeddings[k]
    }

    /// Parse `a+b*sym-...` against basis symbols and named constants.
    /// Accepts forms like `-17`, `1-i`, `3/2`, `2i`, `sqrtm7`.
    pub fn parse_element(&self, input: &str) -> Result<FieldElement, FieldError> {
        let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(FieldError::Parse(input.into(), self.0.name.clone()));
        }
        let mut acc = self.zero();
        let mut term = String::new();
        let chars = compact.chars();
        let mut terms: Vec<String> = Vec::new();
        for c in chars {
            if (c == '+' || c == '-') && !term.is_empty() && !term.ends_with('/') {
                terms.push(term.clone());
                term.clear();
            }
            if c != '+' || term.is_empty() {
                term.push(c);
            }
        }
        if !term.is_empty() {
            terms.push(term);
        }
        for t in &terms {
            let parsed = self
                .parse_term(t)
                .ok_or_else(|| FieldError::Parse(input.into(), self.0.name.clone()))?;
            acc = acc.add(&parsed)?;
        }
        Ok(acc)
    }

    fn parse_term(&self, t: &str) -> Option<FieldElement> {
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        if let Some(elem) = self.constant(body) {
            return Some(if neg { elem.neg() } else { elem });
        }
        let (coef_str, sym_str) = match body.split_once('*') {
            Some((c, s)) => (c.to_string(), s.to_string()),
            None => {
                let split = body
                    .char_indices()
                    .find(|(_, c)| c.is_alphabetic())
                    .map(|(k, _)| k)
                    .unwrap_or(body.len());
                (body[..split].to_string(), body[split..].to_string())
            }
        };
        let coef = if coef_str.is_empty() {
            Rat::one()
        } else {
            crate::rat::parse_rat(&coef_str)?
        };
        let base = if sym_str.is_empty() {
            self.one()
        } else {
            self.constant(&sym_str)?
        };
        let signed = if neg { -coef } else { coef };
        Some(base.scale(&signed))
    }

    /// Adjoin an exact square root of `t` (positive real under the
    /// embedding, not already a square -- see crate notes): basis doubles to
    /// `{b_i} U {s*b_i}` with `s^2 = t`. Only the identity and conjugation
    /// automorphisms extend.
    pub fn adjoin_sqrt(&self, t: &FieldElement, symbol: &str) -> Result<Field, FieldError> {
        t.ensure_field(self)?;
        let et = t.embed();
        if !(et.re > 0.0 && et.im.abs() <= EMBED_TOL * (1.0 + et.re.abs())) {
            return Err(FieldError::AdjoinNotPositive(et));
        }
        let d = self.0.degree;
        let d2 = 2 * d;
        // t_mul[k] = t * basis_k
        let t_mul: Vec<Vec<Rat>> = (0..d)
            .map(|k| table_mul(&self.0.mult_table, &t.coeffs, &unit_vec(d, k)))
            .collect();
        let mut table = vec![vec![SparseRow::new(); d2]; d2];
        for i in 0..d {
            for j in 0..d {
                let base: &SparseRow = &self.0.mult_table[i][j];
                table[i][j] = base.clone();
                table[i][d + j] = base.iter().map(|(k, c)| (k + d, c.clone())).collect();
                table[d + i][j] = table[i][d + j].clone();
                // (s b_i)(s b_j) = t * (b_i b_j)
                let mut dense = vec![Rat::zero(); d];
                for (k, c) in base {
                    for (m, tm) in t_mul[*k].iter().enumerate() {
                        if !tm.is_zero() {
                            dense[m] = &dense[m] + &(c * tm);
                        }
                    }
                }
                table[d + i][d + j] = to_sparse(&dense);
            }
        }
        let s_val = Complex64::new(et.re.sqrt(), 0.0);
        let mut embeddings = self.0.embeddings.clone();
        embeddings.extend(self.0.embeddings.iter().map(|e| e * s_val));
        let mut symbols = self.0.basis_symbols.clone();
        symbols.extend(
            self.0
                .basis_symbols
                .iter()
                .map(|b| format!("{symbol}*{b}")),
        );
        let old_conj = &self.0.auts[self.0.conj_idx];
        let mut conj_cols: Vec<Vec<Rat>> = Vec::with_capacity(d2);
        let extend = |col: &Vec<Rat>, shift: usize| {
            let mut v = vec![Rat::zero(); d2];
            for (k, c) in col.iter().enumerate() {
                v[k + shift] = c.clone();
            }
            v
        };
        for j in 0..d {
            conj_cols.push(extend(&old_conj.columns[j], 0));
        }
        for j in 0..d {
            conj_cols.push(extend(&old_conj.columns[j], d));
        }
        let id_cols: Vec<Vec<Rat>> = (0..d2).map(|j| unit_vec(d2, j)).collect();
        let mut constants = BTreeMap::new();
        for (k, v) in &self.0.constants {
            let mut padded = v.clone();
            padded.resize(d2, Rat::zero());
            constants.insert(k.clone(), padded);
        }
        constants.insert(symbol.to_string(), unit_vec(d2, d));
        let spec = FieldSpec {
            name: format!("{}[{}]", self.0.name, symbol),
            degree: d2,
            basis_symbols: symbols,
            mult_table: table,
            embeddings,
            automorphisms: vec![("id".into(), id_cols), ("conj".into(), conj_cols)],
            conj_name: "conj".into(),
            constants,
        };
        Field::make_with_origin(
            spec,
            FieldOrigin::AdjoinedSqrt {
                base: self.0.name.clone(),
                radicand: t.coeffs.clone(),
            },
        )
    }

    /// Exact square root of `t` when one is visible without a general
    /// norm-equation solver: rational squares and rational multiples of
    /// basis-monomial squares. Decides every radicand used by the catalog.
    pub fn simple_sqrt(&self, t: &FieldElement) -> Option<FieldElement> {
        if t.is_zero() {
            return Some(self.zero());
        }
        if t.is_rational() {
            if let Some(r) = rat_sqrt(&t.coeffs[0]) {
                return Some(self.from_rat(r));
            }
        }
        let d = self.0.degree;
        for j in 0..d {
            let sq = table_mul(&self.0.mult_table, &unit_vec(d, j), &unit_vec(d, j));
            // t = c * b_j^2 with c a rational square?
            let mut ratio: Option<Rat> = None;
            let mut ok = true;
            for k in 0..d {
                match (sq[k].is_zero(), t.coeffs[k].is_zero()) {
                    (true, true) => {}
                    (true, false) | (false, true) => {
                        ok = false;
                        break;
                    }
                    (false, false) => {
                        let r = &t.coeffs[k] / &sq[k];
                        match &ratio {
                            None => ratio = Some(r),
                            Some(prev) if *prev == r => {}
                            _ => {
                                ok = false;
                                break;
                            }
                        }
                    }
                }
            }
            if ok {
                if let Some(r) = ratio.and_then(|r| rat_sqrt(&r)) {
                    let root = self.basis_element(j).scale(&r);
                    let check = root.mul(&root).unwrap();
                    if check == *t {
                        return Some(root);
                    }
                }
            }
        }
        None
    }
}

fn aut_order(cols: &[Vec<Rat>], degree: usize) -> Option<usize> {
    let identity: Vec<Vec<Rat>> = (0..degree).map(|j| unit_vec(degree, j)).collect();
    let mut current = cols.to_vec();
    for order in 1..=4 * degree {
        if current == identity {
            return Some(order);
        }
        current = (0..degree)
            .map(|j| apply_columns(cols, &current[j]))
            .collect();
    }
    None
}

/// One element of the declared Galois group, acting on coefficient vectors.
#[derive(Clone)]
pub struct Automorphism {
    field: Field,
    idx: usize,
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Aut({} of {})", self.name(), self.field.name())
    }
}

impl PartialEq for Automorphism {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.idx == other.idx
    }
}

impl Automorphism {
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn name(&self) -> &str {
        &self.field.0.auts[self.idx].name
    }
    pub fn order(&self) -> usize {
        self.field.0.auts[self.idx].order
    }
    pub fn matrix_columns(&self) -> &[Vec<Rat>] {
        &self.field.0.auts[self.idx].columns
    }

    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement, FieldError> {
        x.ensure_field(&self.field)?;
        Ok(FieldElement {
            field: self.field.clone(),
            coeffs: apply_columns(self.matrix_columns(), &x.coeffs),
        })
    }

    /// Composition `self o other` must be in the declared group.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism, FieldError> {
        let d = self.field.degree();
        let comp: Vec<Vec<Rat>> = (0..d)
            .map(|j| apply_columns(self.matrix_columns(), &other.matrix_columns()[j]))
            .collect();
        for (idx, a) in self.field.0.auts.iter().enumerate() {
            if a.columns == comp {
                return Ok(Automorphism {
                    field: self.field.clone(),
                    idx,
                });
            }
        }
        Err(FieldError::NotClosed(
            self.field.name().into(),
            self.name().into(),
            other.name().into(),
        ))
    }

    pub fn is_identity(&self) -> bool {
        self.order() == 1
    }
}

/// Element of a fixed number field: exact rational coordinates over its basis.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    coeffs: Vec<Rat>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}
impl Eq for FieldElement {}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub(crate) fn ensure_field(&self, f: &Field) -> Result<(), FieldError> {
        if self.field == *f {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch(
                self.field.name().into(),
                f.name().into(),
            ))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        other.ensure_field(&self.field)?;
        Ok(FieldElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        other.ensure_field(&self.field)?;
        Ok(FieldElement {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, r: &Rat) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        other.ensure_field(&self.field)?;
        Ok(FieldElement {
            field: self.field.clone(),
            coeffs: table_mul(self.field.mult_table(), &self.coeffs, &other.coeffs),
        })
    }

    /// Exact inverse, by solving the multiplication-by-self linear system.
    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let d = self.field.degree();
        let cols: Vec<Vec<Rat>> = (0..d)
            .map(|j| table_mul(self.field.mult_table(), &self.coeffs, &unit_vec(d, j)))
            .collect();
        let sol = solve_columns(&cols, &unit_vec(d, 0)).ok_or(FieldError::NotInvertible)?;
        Ok(FieldElement {
            field: self.field.clone(),
            coeffs: sol,
        })
    }

    pub fn pow(&self, e: u32) -> FieldElement {
        let mut acc = self.field.one();
        for _ in 0..e {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Distinguished complex embedding.
    pub fn embed(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| self.field.embed_basis(k) * rat_to_f64(c))
            .sum()
    }

    pub fn apply(&self, a: &Automorphism) -> Result<FieldElement, FieldError> {
        a.apply(self)
    }

    pub fn conj(&self) -> FieldElement {
        self.field.conj().apply(self).expect("same field")
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sym = &self.field.basis_symbols()[k];
            if k == 0 {
                parts.push(format_rat(c));
            } else if c.is_one() {
                parts.push(sym.clone());
            } else {
                parts.push(format!("{}*{}", format_rat(c), sym));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }

    /// Coefficients as `p/q` strings (serialization form).
    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(format_rat).collect()
    }

    /// Lift along a coefficient-padding inclusion into a larger field whose
    /// basis starts with this field's basis (e.g. `Q(zeta7)` into
    /// `Q(zeta7,i)`, or any field into its sqrt extension).
    pub fn lift_to(&self, target: &Field) -> Result<FieldElement, FieldError> {
        if target.degree() < self.field.degree() {
            return Err(FieldError::BadLength(self.field.degree(), target.degree()));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(target.degree(), Rat::zero());
        let lifted = target.element(coeffs)?;
        let (a, b) = (self.embed(), lifted.embed());
        if (a - b).norm() > EMBED_TOL * (1.0 + a.norm()) {
            return Err(FieldError::FieldMismatch(
                self.field.name().into(),
                target.name().into(),
            ));
        }
        Ok(lifted)
    }

    /// Rational-vector view over the Q-basis, used for exact rank checks.
    pub fn q_coordinates(&self) -> Vec<Rat> {
        self.coeffs.clone()
    }
}

#[cfg(test)]
mod tests;
