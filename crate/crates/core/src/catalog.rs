//! Ready-made code instances: the Alamouti, Jafarkhani, Golden and Silver
//! codes, their iterated MIDO versions, and the two degree-3 constructions
//! over the seventh cyclotomic field, each with its exact basis frozen in
//! the order the complexity claims depend on.

use crate::algebra::{
    build_iterated_basis, build_q_basis, lambda_repr, AlgebraElement, AlgebraError, CyclicAlgebra,
    IterationParams, MatrixOverField, QBasisOrder,
};
use crate::numfield::{builtin_field, Automorphism, Field, FieldElement, FieldError, FieldOrigin};
use crate::rat::{format_rat, parse_rat, rat_i, sig12, Rat};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("unknown code name {0:?}")]
    UnknownName(String),
    #[error("override {0} is not valid for {1}")]
    BadOverride(String, String),
    #[error("bad code JSON: {0}")]
    BadJson(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeName {
    Alamouti,
    Jafarkhani,
    Golden,
    Silver,
    IterSilver,
    IterGolden,
    IterAlamouti,
    Deg3Ex1,
    Deg3Ex2,
    IterDeg3Ex1,
    IterDeg3Ex2,
}

impl CodeName {
    pub const ALL: [CodeName; 11] = [
        CodeName::Alamouti,
        CodeName::Jafarkhani,
        CodeName::Golden,
        CodeName::Silver,
        CodeName::IterSilver,
        CodeName::IterGolden,
        CodeName::IterAlamouti,
        CodeName::Deg3Ex1,
        CodeName::Deg3Ex2,
        CodeName::IterDeg3Ex1,
        CodeName::IterDeg3Ex2,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CodeName::Alamouti => "alamouti",
            CodeName::Jafarkhani => "jafarkhani",
            CodeName::Golden => "golden",
            CodeName::Silver => "silver",
            CodeName::IterSilver => "iter_silver",
            CodeName::IterGolden => "iter_golden",
            CodeName::IterAlamouti => "iter_alamouti",
            CodeName::Deg3Ex1 => "deg3_ex1",
            CodeName::Deg3Ex2 => "deg3_ex2",
            CodeName::IterDeg3Ex1 => "iter_deg3_ex1",
            CodeName::IterDeg3Ex2 => "iter_deg3_ex2",
        }
    }

    pub fn parse(s: &str) -> Option<CodeName> {
        CodeName::ALL.iter().copied().find(|n| n.as_str() == s)
    }

    pub fn summary(&self) -> &'static str {
        match self {
            CodeName::Alamouti => "2x2 quaternion code over (-1,-1)_Q, kappa=4",
            CodeName::Jafarkhani => "4x4 iterated Alamouti (quasi-orthogonal), default theta=-1, kappa=8",
            CodeName::Golden => "2x2 code over (5,i)_Q(i) with the golden twist, kappa=8",
            CodeName::Silver => "2x2 code over (-1,-1)_Q(sqrt-7), mixing-matrix basis, kappa=8",
            CodeName::IterSilver => "4x4 iterated silver, default theta=-17, kappa=16",
            CodeName::IterGolden => "4x4 iterated golden, default theta=1-i, kappa=16",
            CodeName::IterAlamouti => "4x4 iterated Alamouti, default theta=-3 (base Q), kappa=8",
            CodeName::Deg3Ex1 => "3x3 degree-3 code over Q(zeta7,i)/Q(i,sqrt7), gamma=1+i, kappa=18",
            CodeName::Deg3Ex2 => "3x3 degree-3 code over Q(zeta7)/Q(sqrt-7), gamma=3, kappa=18",
            CodeName::IterDeg3Ex1 => "6x6 iterated degree-3 (example 1), default theta=i*sqrt7 scaled, kappa=36",
            CodeName::IterDeg3Ex2 => "6x6 iterated degree-3 (example 2), default theta=i*sqrt7 scaled, kappa=36",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Yes,
    No,
    Unknown,
}

/// Index partition in 1-based form, matching the basis numbering used in
/// reports and hint files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionHint {
    pub groups: Vec<Vec<usize>>,
    #[serde(default)]
    pub conditioned: Vec<usize>,
}

/// Optional knobs of [`make_code`]; unset fields take the per-code defaults.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// Element expression parsed in the coordinate field, e.g. "-17", "1-i",
    /// "i", "sqrtm7".
    pub theta: Option<String>,
    pub scaled: Option<bool>,
    /// Base field for iter_alamouti: "Q" (default) or "Q(sqrt2)".
    pub base: Option<String>,
    /// Degree-3 mu pair, e.g. ("1", "sqrtm7") or ("sqrt7", "i").
    pub mu: Option<(String, String)>,
}

/// A fully constructed code: exact basis in the frozen order plus metadata.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub name: CodeName,
    pub label: String,
    /// Codeword side length (2n for iterated codes, n for base codes).
    pub side: usize,
    pub kappa: usize,
    /// Field the basis entries live in (coordinate field, possibly with
    /// sqrt(theta') adjoined for scaled maps).
    pub field: Field,
    /// Exact basis, unnormalized; masks and determinant zero-tests use this.
    pub basis: Vec<MatrixOverField>,
    pub params: Option<IterationParams>,
    pub algebra: Option<CyclicAlgebra>,
    pub theta_label: Option<String>,
    pub claimed_exponent: Option<usize>,
    pub fully_diverse_claim: Claim,
    /// Scale s with sum_i ||s B_i||_F^2 = kappa * side.
    pub normalization: f64,
    pub paper_hint: Option<PartitionHint>,
    /// The overrides this spec was built with (for rebuilding twins).
    pub overrides: Overrides,
}

impl CodeSpec {
    /// Complex basis matrices scaled by the energy normalization.
    pub fn float_basis(&self) -> Vec<DMatrix<Complex64>> {
        let s = Complex64::new(self.normalization, 0.0);
        self.basis.iter().map(|b| b.embed() * s).collect()
    }

    /// Integral generating set of the underlying base algebra, for bounded
    /// norm-equation searches (None when no algebra handle is attached).
    pub fn norm_search_setup(
        &self,
    ) -> Option<(CyclicAlgebra, Automorphism, FieldElement, Vec<AlgebraElement>)> {
        let alg = self.algebra.clone()?;
        let params = self.params.as_ref()?;
        let gens = integral_generators(&alg).ok()?;
        Some((alg, params.tau().clone(), params.theta().clone(), gens))
    }
}

fn normalization_for(basis: &[MatrixOverField], side: usize) -> f64 {
    let total: f64 = basis.iter().map(|b| b.embed().norm_squared()).sum();
    ((basis.len() * side) as f64 / total).sqrt()
}

fn gaussian_elem(k: &Field, re: i64, im: i64) -> Result<FieldElement, CatalogError> {
    let i = k
        .constant("i")
        .ok_or_else(|| CatalogError::BadOverride("i".into(), k.name().into()))?;
    Ok(k.from_int(re).add(&i.scale(&rat_i(im)))?)
}

/// The quaternion algebra behind each 2x2 family.
fn quaternion_algebra(name: CodeName, base: &str) -> Result<CyclicAlgebra, CatalogError> {
    match (name, base) {
        (CodeName::Alamouti | CodeName::Jafarkhani, _) | (CodeName::IterAlamouti, "Q") => {
            let k = builtin_field("Q(i)")?;
            let sigma = k.aut("conj")?;
            let gamma = k.from_int(-1);
            Ok(CyclicAlgebra::new(
                "(-1,-1)_Q",
                k,
                Some(builtin_field("Q")?),
                sigma,
                gamma,
                2,
            )?)
        }
        (CodeName::IterAlamouti, "Q(sqrt2)") => {
            let k = builtin_field("Q(i,sqrt2)")?;
            let sigma = k.aut("sigma")?;
            let gamma = k.from_int(-1);
            Ok(CyclicAlgebra::new(
                "(-1,-1)_Q(sqrt2)",
                k,
                Some(builtin_field("Q(sqrt2)")?),
                sigma,
                gamma,
                2,
            )?)
        }
        (CodeName::IterAlamouti, other) => {
            Err(CatalogError::BadOverride(format!("base={other}"), "iter_alamouti".into()))
        }
        (CodeName::Silver | CodeName::IterSilver, _) => {
            let k = builtin_field("Q(i,sqrt-7)")?;
            let sigma = k.aut("sigma")?;
            let gamma = k.from_int(-1);
            Ok(CyclicAlgebra::new(
                "(-1,-1)_Q(sqrt-7)",
                k,
                Some(builtin_field("Q(sqrt-7)")?),
                sigma,
                gamma,
                2,
            )?)
        }
        (CodeName::Golden | CodeName::IterGolden, _) => {
            let k = builtin_field("Q(i,sqrt5)")?;
            let sigma = k.aut("sigma")?;
            let gamma = k.constant("i").expect("i in Q(i,sqrt5)");
            Ok(CyclicAlgebra::new(
                "(5,i)_Q(i)",
                k,
                Some(builtin_field("Q(i)")?),
                sigma,
                gamma,
                2,
            )?)
        }
        _ => Err(CatalogError::UnknownName(name.as_str().into())),
    }
}

fn degree3_algebra(name: CodeName) -> Result<CyclicAlgebra, CatalogError> {
    match name {
        CodeName::Deg3Ex1 | CodeName::IterDeg3Ex1 => {
            let l = builtin_field("Q(zeta7,i)")?;
            let sigma2 = l.aut("sigma2")?;
            let gamma = l.parse_element("1+i")?;
            Ok(CyclicAlgebra::new("(Q(zeta7,i)/Q(i,sqrt7), sigma2, 1+i)", l, None, sigma2, gamma, 3)?)
        }
        CodeName::Deg3Ex2 | CodeName::IterDeg3Ex2 => {
            let l = builtin_field("Q(zeta7)")?;
            let sigma2 = l.aut("sigma2")?;
            let gamma = l.from_int(3);
            Ok(CyclicAlgebra::new("(Q(zeta7)/Q(sqrt-7), sigma2, 3)", l, None, sigma2, gamma, 3)?)
        }
        _ => Err(CatalogError::UnknownName(name.as_str().into())),
    }
}

/// Alamouti basis {lambda(1), lambda(i), lambda(e), lambda(e i)}.
fn alamouti_d_basis(alg: &CyclicAlgebra) -> Result<Vec<MatrixOverField>, CatalogError> {
    let k = alg.coordinate_field();
    let nu = vec![k.one(), k.constant("i").expect("i in K")];
    Ok(build_q_basis(alg, &nu, &[k.one()], QBasisOrder::BetaMajor)?)
}

/// Silver basis in the frozen order: the four Alamouti-style matrices, then
/// the four mixing-matrix images with the 1/sqrt(7) scale.
fn silver_d_basis(alg: &CyclicAlgebra) -> Result<Vec<MatrixOverField>, CatalogError> {
    let k = alg.coordinate_field();
    let mut basis = alamouti_d_basis(alg)?;
    let r7 = k.constant("sqrt7").expect("sqrt7 in K").inv()?;
    // lambda coordinates (c, d) of the images of the four unit symbols
    // through the unitary mixing matrix [[1+i, -1+2i], [1+2i, 1-i]]/sqrt7.
    let coords: [((i64, i64), (i64, i64)); 4] = [
        ((1, 1), (-1, -2)),
        ((-1, 1), (2, -1)),
        ((-1, 2), (-1, 1)),
        ((-2, -1), (-1, -1)),
    ];
    for ((cre, cim), (dre, dim)) in coords {
        let c = gaussian_elem(k, cre, cim)?.mul(&r7)?;
        let d = gaussian_elem(k, dre, dim)?.mul(&r7)?;
        let elem = alg.element(vec![c, d])?;
        basis.push(lambda_repr(alg, &elem));
    }
    Ok(basis)
}

/// Golden basis: nu = {beta, beta*phi} with beta = 1 + i*sigma(phi),
/// beta-major over {1, i}, globally scaled by 1/sqrt5.
fn golden_d_basis(alg: &CyclicAlgebra) -> Result<Vec<MatrixOverField>, CatalogError> {
    let k = alg.coordinate_field();
    let phi = k.constant("phi").expect("phi");
    let sigma_phi = k.constant("sigma_phi").expect("sigma_phi");
    let i = k.constant("i").expect("i");
    let beta = k.one().add(&i.mul(&sigma_phi)?)?;
    let nu = vec![beta.clone(), beta.mul(&phi)?];
    let betas = vec![k.one(), i];
    let raw = build_q_basis(alg, &nu, &betas, QBasisOrder::BetaMajor)?;
    let r5 = k.constant("sqrt5").expect("sqrt5").inv()?;
    Ok(raw
        .iter()
        .map(|m| m.scale(&r5))
        .collect::<Result<_, _>>()?)
}

/// Totally-real-base Alamouti basis (D1=1, D2=sqrt2, D3=i, ...), beta-minor.
fn alamouti_sqrt2_d_basis(alg: &CyclicAlgebra) -> Result<Vec<MatrixOverField>, CatalogError> {
    let k = alg.coordinate_field();
    let nu = vec![k.one(), k.constant("i").expect("i")];
    let betas = vec![k.one(), k.constant("sqrt2").expect("sqrt2")];
    Ok(build_q_basis(alg, &nu, &betas, QBasisOrder::BetaMinor)?)
}

/// Degree-3 basis D_j = mu1 V_j Gamma^k pattern, power-major.
fn degree3_d_basis(
    alg: &CyclicAlgebra,
    mu: &(String, String),
) -> Result<Vec<MatrixOverField>, CatalogError> {
    let l = alg.coordinate_field();
    let nu = vec![
        l.one(),
        l.constant("nu2").expect("nu2"),
        l.constant("nu3").expect("nu3"),
    ];
    let mu1 = l
        .parse_element(&mu.0)
        .map_err(|_| CatalogError::BadOverride(format!("mu1={}", mu.0), l.name().into()))?;
    let mu2 = l
        .parse_element(&mu.1)
        .map_err(|_| CatalogError::BadOverride(format!("mu2={}", mu.1), l.name().into()))?;
    // mu1 must embed real, mu2 totally imaginary (the orthogonality proof
    // needs mu2* = -mu2).
    let (e1, e2) = (mu1.embed(), mu2.embed());
    if e1.im.abs() > 1e-12 * (1.0 + e1.norm()) || e2.re.abs() > 1e-12 * (1.0 + e2.norm()) {
        return Err(CatalogError::BadOverride(
            format!("mu=({},{})", mu.0, mu.1),
            "degree3".into(),
        ));
    }
    Ok(build_q_basis(alg, &nu, &[mu1, mu2], QBasisOrder::PowerMajor)?)
}

fn silver_partition_hint() -> PartitionHint {
    PartitionHint {
        groups: vec![vec![1, 11], vec![3, 9], vec![4, 10], vec![2, 12]],
        conditioned: vec![5, 6, 7, 8, 13, 14, 15, 16],
    }
}

fn deg3_partition_hint() -> PartitionHint {
    // Conditioning on the 24 symbols outside the Gamma^0 blocks leaves two
    // groups of six, giving the stated 24 + 6 = 30 exponent.
    PartitionHint {
        groups: vec![
            vec![1, 2, 3, 19, 20, 21],
            vec![4, 5, 6, 22, 23, 24],
        ],
        conditioned: (7..=18).chain(25..=36).collect(),
    }
}

fn theta_matches(k: &Field, theta: &FieldElement, s: &str) -> bool {
    k.parse_element(s).map(|e| e == *theta).unwrap_or(false)
}

/// Build a catalog code. Defaults: jafarkhani theta=-1; iter_alamouti
/// theta=-3 over Q; iter_silver theta=-17 unscaled (theta=-1 implies the
/// scaled complexity-study variant unless overridden); iter_golden
/// theta=1-i unscaled; iterated degree-3 theta=i*sqrt7 with the scaled map.
pub fn make_code(name: CodeName, overrides: &Overrides) -> Result<CodeSpec, CatalogError> {
    match name {
        CodeName::Alamouti => base_code(name, overrides),
        CodeName::Silver => base_code(name, overrides),
        CodeName::Golden => base_code(name, overrides),
        CodeName::Deg3Ex1 | CodeName::Deg3Ex2 => base_code(name, overrides),
        CodeName::Jafarkhani | CodeName::IterAlamouti | CodeName::IterSilver
        | CodeName::IterGolden => iterated_quaternion_code(name, overrides),
        CodeName::IterDeg3Ex1 | CodeName::IterDeg3Ex2 => iterated_degree3_code(name, overrides),
    }
}

pub fn make_code_by_name(name: &str, overrides: &Overrides) -> Result<CodeSpec, CatalogError> {
    let parsed = CodeName::parse(name).ok_or_else(|| CatalogError::UnknownName(name.into()))?;
    make_code(parsed, overrides)
}

fn base_code(name: CodeName, overrides: &Overrides) -> Result<CodeSpec, CatalogError> {
    if overrides.theta.is_some() || overrides.scaled.is_some() {
        return Err(CatalogError::BadOverride(
            "theta/scaled".into(),
            format!("base code {}", name.as_str()),
        ));
    }
    let (alg, basis, label) = match name {
        CodeName::Alamouti => {
            let alg = quaternion_algebra(name, "Q")?;
            let basis = alamouti_d_basis(&alg)?;
            (alg, basis, "alamouti".to_string())
        }
        CodeName::Silver => {
            let alg = quaternion_algebra(name, "Q")?;
            let basis = silver_d_basis(&alg)?;
            (alg, basis, "silver".to_string())
        }
        CodeName::Golden => {
            let alg = quaternion_algebra(name, "Q")?;
            let basis = golden_d_basis(&alg)?;
            (alg, basis, "golden".to_string())
        }
        CodeName::Deg3Ex1 | CodeName::Deg3Ex2 => {
            let alg = degree3_algebra(name)?;
            let mu = overrides
                .mu
                .clone()
                .unwrap_or(("1".to_string(), "sqrtm7".to_string()));
            let basis = degree3_d_basis(&alg, &mu)?;
            (alg, basis, name.as_str().to_string())
        }
        _ => unreachable!(),
    };
    let side = alg.degree();
    let kappa = basis.len();
    let normalization = normalization_for(&basis, side);
    Ok(CodeSpec {
        name,
        label,
        side,
        kappa,
        field: alg.coordinate_field().clone(),
        basis,
        params: None,
        algebra: Some(alg),
        theta_label: None,
        claimed_exponent: None,
        fully_diverse_claim: Claim::Yes,
        normalization,
        paper_hint: None,
        overrides: overrides.clone(),
    })
}

fn iterated_quaternion_code(
    name: CodeName,
    overrides: &Overrides,
) -> Result<CodeSpec, CatalogError> {
    let base = overrides.base.clone().unwrap_or_else(|| "Q".to_string());
    if name != CodeName::IterAlamouti && overrides.base.is_some() {
        return Err(CatalogError::BadOverride("base".into(), name.as_str().into()));
    }
    let alg = quaternion_algebra(name, &base)?;
    let k = alg.coordinate_field().clone();
    let default_theta = match name {
        CodeName::Jafarkhani => "-1",
        CodeName::IterAlamouti => "-3",
        CodeName::IterSilver => "-17",
        CodeName::IterGolden => "1-i",
        _ => unreachable!(),
    };
    let theta_str = overrides.theta.clone().unwrap_or_else(|| default_theta.into());
    let theta = k
        .parse_element(&theta_str)
        .map_err(|_| CatalogError::BadOverride(format!("theta={theta_str}"), k.name().into()))?;
    // iter_silver theta=-1 is the scaled complexity-study variant by default
    let scaled = overrides.scaled.unwrap_or(
        name == CodeName::IterSilver && theta_matches(&k, &theta, "-1"),
    );
    let tau = alg.sigma().clone();
    let params = if scaled {
        IterationParams::scaled(theta.clone(), tau)?
    } else {
        IterationParams::unscaled(theta.clone(), tau)?
    };
    let d_basis = match name {
        CodeName::Jafarkhani => alamouti_d_basis(&alg)?,
        CodeName::IterAlamouti if base == "Q" => alamouti_d_basis(&alg)?,
        CodeName::IterAlamouti => alamouti_sqrt2_d_basis(&alg)?,
        CodeName::IterSilver => silver_d_basis(&alg)?,
        CodeName::IterGolden => golden_d_basis(&alg)?,
        _ => unreachable!(),
    };
    let basis = build_iterated_basis(&d_basis, &params)?;
    let side = 2 * alg.degree();
    let kappa = basis.len();
    let (claimed_exponent, fully_diverse_claim, paper_hint) = match name {
        CodeName::IterSilver => {
            if scaled && theta_matches(&k, &theta, "-1") {
                (Some(10), Claim::No, Some(silver_partition_hint()))
            } else if theta_matches(&k, &theta, "-17") {
                (Some(13), Claim::Yes, None)
            } else if theta_matches(&k, &theta, "i") || theta_matches(&k, &theta, "-1") {
                (Some(13), Claim::No, None)
            } else {
                (Some(13), Claim::Unknown, None)
            }
        }
        CodeName::IterGolden => (
            None,
            if theta_matches(&k, &theta, "1-i") {
                Claim::Yes
            } else {
                Claim::Unknown
            },
            None,
        ),
        CodeName::Jafarkhani | CodeName::IterAlamouti => {
            let claim = if base != "Q" {
                Claim::Unknown
            } else if theta_matches(&k, &theta, "-1") {
                Claim::No
            } else if theta_matches(&k, &theta, "-3") {
                Claim::Yes
            } else {
                Claim::Unknown
            };
            (None, claim, None)
        }
        _ => unreachable!(),
    };
    let mut label = format!("{}(theta={theta_str}", name.as_str());
    if scaled {
        label.push_str(",scaled");
    }
    if base != "Q" {
        label.push_str(&format!(",base={base}"));
    }
    label.push(')');
    let field = params.working_field().clone();
    let normalization = normalization_for(&basis, side);
    Ok(CodeSpec {
        name,
        label,
        side,
        kappa,
        field,
        basis,
        params: Some(params),
        algebra: Some(alg),
        theta_label: Some(theta_str),
        claimed_exponent,
        fully_diverse_claim,
        normalization,
        paper_hint,
        overrides: overrides.clone(),
    })
}

fn iterated_degree3_code(name: CodeName, overrides: &Overrides) -> Result<CodeSpec, CatalogError> {
    let alg = degree3_algebra(name)?;
    let l = alg.coordinate_field().clone();
    let mu = overrides
        .mu
        .clone()
        .unwrap_or(("1".to_string(), "sqrtm7".to_string()));
    let d_basis = degree3_d_basis(&alg, &mu)?;
    let theta_str = overrides
        .theta
        .clone()
        .unwrap_or_else(|| "sqrtm7".to_string());
    let theta = l
        .parse_element(&theta_str)
        .map_err(|_| CatalogError::BadOverride(format!("theta={theta_str}"), l.name().into()))?;
    // The iterated degree-3 codes use the scaled map throughout.
    let scaled = overrides.scaled.unwrap_or(true);
    // A totally imaginary theta needs zeta = i in the coefficient field;
    // Q(zeta7) lacks it, so lift through Q(zeta7,i) first.
    let needs_i = theta.embed().re.abs() <= 1e-12 * (1.0 + theta.embed().norm())
        && theta.embed().im.abs() > 1e-12;
    let (params, d_used) = if scaled && needs_i && l.constant("i").is_none() {
        let big = builtin_field("Q(zeta7,i)")?;
        let theta_l = theta.lift_to(&big)?;
        let tau_l = big.aut("tau")?;
        let lifted: Vec<MatrixOverField> = d_basis
            .iter()
            .map(|m| m.lift_to(&big))
            .collect::<Result<_, _>>()?;
        (IterationParams::scaled(theta_l, tau_l)?, lifted)
    } else {
        let tau = l.aut("tau")?;
        let p = if scaled {
            IterationParams::scaled(theta.clone(), tau)?
        } else {
            IterationParams::unscaled(theta.clone(), tau)?
        };
        (p, d_basis)
    };
    let basis = build_iterated_basis(&d_used, &params)?;
    let side = 2 * alg.degree();
    let kappa = basis.len();
    let theta_is_minus_one = theta == l.from_int(-1);
    let default_theta = theta == l.constant("sqrtm7").expect("sqrtm7");
    let (claimed_exponent, claim, hint) = if theta_is_minus_one {
        (
            if name == CodeName::IterDeg3Ex1 { Some(30) } else { None },
            Claim::No,
            Some(deg3_partition_hint()),
        )
    } else if default_theta {
        (None, Claim::Yes, None)
    } else {
        (None, Claim::Unknown, None)
    };
    let mut label = format!("{}(theta={theta_str}", name.as_str());
    if scaled {
        label.push_str(",scaled");
    }
    label.push(')');
    let field = params.working_field().clone();
    let normalization = normalization_for(&basis, side);
    Ok(CodeSpec {
        name,
        label,
        side,
        kappa,
        field,
        basis,
        params: Some(params),
        algebra: Some(alg),
        theta_label: Some(theta_str),
        claimed_exponent,
        fully_diverse_claim: claim,
        normalization,
        paper_hint: hint,
        overrides: overrides.clone(),
    })
}

/// Integral generating set of the order used for norm-equation searches:
/// ring-of-integers basis of the maximal subfield crossed with {1, e, ...}.
pub fn integral_generators(alg: &CyclicAlgebra) -> Result<Vec<AlgebraElement>, CatalogError> {
    let k = alg.coordinate_field();
    let field_gens: Vec<FieldElement> = match k.name() {
        "Q(i)" => vec![k.one(), k.constant("i").unwrap()],
        "Q(i,sqrt-7)" => {
            let i = k.constant("i").unwrap();
            let omega = k.constant("omega").unwrap();
            vec![k.one(), i.clone(), omega.clone(), i.mul(&omega)?]
        }
        "Q(i,sqrt5)" => {
            let i = k.constant("i").unwrap();
            let phi = k.constant("phi").unwrap();
            vec![k.one(), i.clone(), phi.clone(), i.mul(&phi)?]
        }
        "Q(i,sqrt2)" => {
            let i = k.constant("i").unwrap();
            let s2 = k.constant("sqrt2").unwrap();
            vec![k.one(), i.clone(), s2.clone(), i.mul(&s2)?]
        }
        // cyclotomic cases: the power basis is integral
        _ => (0..k.degree()).map(|b| k.basis_element(b)).collect(),
    };
    let mut gens = Vec::new();
    for p in 0..alg.degree() {
        let ep = alg.e().pow(p as u32)?;
        for g in &field_gens {
            gens.push(ep.mul(&alg.from_scalar(g.clone()))?);
        }
    }
    Ok(gens)
}

/// Silver order-view generators lambda(c + e d) for c, d in the Z[i]-basis
/// of O = Z[i] + Z[i]*omega; used to cross-check the mixing-matrix view.
pub fn silver_order_view_basis() -> Result<(CyclicAlgebra, Vec<MatrixOverField>), CatalogError> {
    let alg = quaternion_algebra(CodeName::Silver, "Q")?;
    let k = alg.coordinate_field();
    let i = k.constant("i").unwrap();
    let omega = k.constant("omega").unwrap();
    let coords = [k.one(), i.clone(), omega.clone(), i.mul(&omega)?];
    let mut out = Vec::new();
    for c in &coords {
        out.push(lambda_repr(&alg, &alg.element(vec![c.clone(), k.zero()])?));
    }
    for d in &coords {
        out.push(lambda_repr(&alg, &alg.element(vec![k.zero(), d.clone()])?));
    }
    Ok((alg, out))
}

// ---------------------------------------------------------------------------
// JSON export/import
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldRefJson {
    Builtin(String),
    AdjoinSqrt { base: String, radicand: Vec<String> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeSpecJson {
    pub name: String,
    pub label: String,
    pub side: usize,
    pub kappa: usize,
    pub field: FieldRefJson,
    /// basis[m][r][c] = exact coefficient vector (p/q strings).
    pub basis: Vec<Vec<Vec<Vec<String>>>>,
    /// basis_float[m][r][c] = [re, im] at 12 significant digits.
    pub basis_float: Vec<Vec<Vec<[f64; 2]>>>,
    pub theta: Option<String>,
    pub scaled: bool,
    pub claimed_exponent: Option<usize>,
    pub fully_diverse_claim: Claim,
    pub normalization: f64,
    pub paper_hint: Option<PartitionHint>,
}

impl CodeSpecJson {
    pub fn from_spec(spec: &CodeSpec) -> CodeSpecJson {
        let field = match spec.field.origin() {
            FieldOrigin::Builtin(n) => FieldRefJson::Builtin(n.clone()),
            FieldOrigin::AdjoinedSqrt { base, radicand } => FieldRefJson::AdjoinSqrt {
                base: base.clone(),
                radicand: radicand.iter().map(format_rat).collect(),
            },
            FieldOrigin::Custom => FieldRefJson::Builtin(spec.field.name().to_string()),
        };
        let basis = spec
            .basis
            .iter()
            .map(|m| {
                (0..m.rows())
                    .map(|r| {
                        (0..m.cols())
                            .map(|c| m.get(r, c).coeff_strings())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let basis_float = spec
            .basis
            .iter()
            .map(|m| {
                let e = m.embed();
                (0..m.rows())
                    .map(|r| {
                        (0..m.cols())
                            .map(|c| [sig12(e[(r, c)].re), sig12(e[(r, c)].im)])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        CodeSpecJson {
            name: spec.name.as_str().to_string(),
            label: spec.label.clone(),
            side: spec.side,
            kappa: spec.kappa,
            field,
            basis,
            basis_float,
            theta: spec.theta_label.clone(),
            scaled: spec.params.as_ref().map(|p| p.is_scaled()).unwrap_or(false),
            claimed_exponent: spec.claimed_exponent,
            fully_diverse_claim: spec.fully_diverse_claim,
            normalization: spec.normalization,
            paper_hint: spec.paper_hint.clone(),
        }
    }

    /// Rebuild a spec with the exact basis; the algebra/params handles are
    /// not reconstructed (use `make_code` for those).
    pub fn into_spec(self) -> Result<CodeSpec, CatalogError> {
        let field = match &self.field {
            FieldRefJson::Builtin(n) => builtin_field(n)?,
            FieldRefJson::AdjoinSqrt { base, radicand } => {
                let b = builtin_field(base)?;
                let coeffs: Option<Vec<Rat>> = radicand.iter().map(|s| parse_rat(s)).collect();
                let coeffs =
                    coeffs.ok_or_else(|| CatalogError::BadJson("bad radicand".into()))?;
                let t = b.element(coeffs)?;
                b.adjoin_sqrt(&t, "sqrt_tp")?
            }
        };
        let name = CodeName::parse(&self.name)
            .ok_or_else(|| CatalogError::UnknownName(self.name.clone()))?;
        let mut basis = Vec::with_capacity(self.basis.len());
        for m in &self.basis {
            let rows = m.len();
            let cols = m.first().map(|r| r.len()).unwrap_or(0);
            let mut entries = Vec::with_capacity(rows * cols);
            for row in m {
                if row.len() != cols {
                    return Err(CatalogError::BadJson("ragged matrix".into()));
                }
                for entry in row {
                    let coeffs: Option<Vec<Rat>> = entry.iter().map(|s| parse_rat(s)).collect();
                    let coeffs =
                        coeffs.ok_or_else(|| CatalogError::BadJson("bad coefficient".into()))?;
                    entries.push(field.element(coeffs)?);
                }
            }
            basis.push(MatrixOverField::new(field.clone(), rows, cols, entries)?);
        }
        if basis.len() != self.kappa {
            return Err(CatalogError::BadJson("kappa mismatch".into()));
        }
        Ok(CodeSpec {
            name,
            label: self.label,
            side: self.side,
            kappa: self.kappa,
            field,
            basis,
            params: None,
            algebra: None,
            theta_label: self.theta,
            claimed_exponent: self.claimed_exponent,
            fully_diverse_claim: self.fully_diverse_claim,
            normalization: self.normalization,
            paper_hint: self.paper_hint,
            overrides: Overrides::default(),
        })
    }
}

#[cfg(test)]
mod tests;
