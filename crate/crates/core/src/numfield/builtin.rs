//! Constructors for the concrete fields the catalog uses.
//!
//! Each field carries its full declared Galois group (closure is validated),
//! the distinguished embedding, and a few named constants (`phi`, `sqrtm7`,
//! `omega`, ...) used by the catalog and the element parser.

use super::{table_mul, Field, FieldError, FieldOrigin, FieldSpec, SparseRow};
use crate::rat::{rat, rat_i, Rat};
use num::{One, Zero};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::OnceLock;

struct Proto {
    name: String,
    symbols: Vec<String>,
    table: Vec<Vec<SparseRow>>,
    embeddings: Vec<Complex64>,
    /// exponents of each generator in each basis monomial
    monomials: Vec<Vec<u32>>,
}

fn unit(d: usize, k: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); d];
    v[k] = Rat::one();
    v
}

fn to_sparse(dense: &[Rat]) -> SparseRow {
    dense
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, c.clone()))
        .collect()
}

impl Proto {
    /// Power basis `1, x, ..., x^{d-1}` with `x^d = sum reduction[k] x^k`.
    fn power_basis(name: &str, sym: &str, reduction: Vec<Rat>, root: Complex64) -> Proto {
        let d = reduction.len();
        let mut powers: Vec<Vec<Rat>> = (0..d).map(|k| unit(d, k)).collect();
        for _ in d..(2 * d - 1) {
            let prev = powers.last().unwrap().clone();
            // multiply by x: shift, then reduce the overflow coefficient
            let mut next = vec![Rat::zero(); d];
            for k in 0..d - 1 {
                next[k + 1] = prev[k].clone();
            }
            let top = prev[d - 1].clone();
            if !top.is_zero() {
                for k in 0..d {
                    next[k] = &next[k] + &(&top * &reduction[k]);
                }
            }
            powers.push(next);
        }
        let table = (0..d)
            .map(|i| (0..d).map(|j| to_sparse(&powers[i + j])).collect())
            .collect();
        let symbols = (0..d)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => sym.to_string(),
                _ => format!("{sym}^{k}"),
            })
            .collect();
        let embeddings = (0..d).map(|k| root.powi(k as i32)).collect();
        Proto {
            name: name.into(),
            symbols,
            table,
            embeddings,
            monomials: (0..d).map(|k| vec![k as u32]).collect(),
        }
    }

    /// Compositum of two linearly disjoint protos; basis `(a_i b_j)` with
    /// index `j*deg(a) + i`, so `a`'s basis is a coefficient prefix.
    fn tensor(a: &Proto, b: &Proto, name: &str) -> Proto {
        let (da, db) = (a.symbols.len(), b.symbols.len());
        let d = da * db;
        let idx = |i: usize, j: usize| j * da + i;
        let mut table = vec![vec![SparseRow::new(); d]; d];
        for i1 in 0..da {
            for j1 in 0..db {
                for i2 in 0..da {
                    for j2 in 0..db {
                        let pa = &a.table[i1][i2];
                        let pb = &b.table[j1][j2];
                        let mut row = Vec::with_capacity(pa.len() * pb.len());
                        for (ka, ca) in pa {
                            for (kb, cb) in pb {
                                row.push((idx(*ka, *kb), ca * cb));
                            }
                        }
                        row.sort_by_key(|(k, _)| *k);
                        table[idx(i1, j1)][idx(i2, j2)] = row;
                    }
                }
            }
        }
        let mut symbols = vec![String::new(); d];
        let mut embeddings = vec![Complex64::new(0.0, 0.0); d];
        let mut monomials = vec![Vec::new(); d];
        for i in 0..da {
            for j in 0..db {
                let s = match (a.symbols[i].as_str(), b.symbols[j].as_str()) {
                    ("1", "1") => "1".into(),
                    (x, "1") => x.to_string(),
                    ("1", y) => y.to_string(),
                    (x, y) => format!("{x}*{y}"),
                };
                symbols[idx(i, j)] = s;
                embeddings[idx(i, j)] = a.embeddings[i] * b.embeddings[j];
                let mut m = a.monomials[i].clone();
                m.extend(&b.monomials[j]);
                monomials[idx(i, j)] = m;
            }
        }
        Proto {
            name: name.into(),
            symbols,
            table,
            embeddings,
            monomials,
        }
    }

    /// Automorphism matrix (columns) from the images of the generators.
    fn aut_columns(&self, gen_images: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
        let d = self.symbols.len();
        self.monomials
            .iter()
            .map(|expos| {
                let mut acc = unit(d, 0);
                for (g, &e) in expos.iter().enumerate() {
                    for _ in 0..e {
                        acc = table_mul(&self.table, &acc, &gen_images[g]);
                    }
                }
                acc
            })
            .collect()
    }

    fn identity_columns(&self) -> Vec<Vec<Rat>> {
        (0..self.symbols.len())
            .map(|k| unit(self.symbols.len(), k))
            .collect()
    }

    fn symbol_index(&self, sym: &str) -> usize {
        self.symbols.iter().position(|s| s == sym).unwrap()
    }

    fn finish(
        self,
        automorphisms: Vec<(String, Vec<Vec<Rat>>)>,
        conj_name: &str,
        constants: BTreeMap<String, Vec<Rat>>,
    ) -> Result<Field, FieldError> {
        let name = self.name.clone();
        Field::make_with_origin(
            FieldSpec {
                name: self.name,
                degree: self.symbols.len(),
                basis_symbols: self.symbols,
                mult_table: self.table,
                embeddings: self.embeddings,
                automorphisms,
                conj_name: conj_name.into(),
                constants,
            },
            FieldOrigin::Builtin(name),
        )
    }
}

fn proto_q() -> Proto {
    Proto {
        name: "Q".into(),
        symbols: vec!["1".into()],
        table: vec![vec![vec![(0, Rat::one())]]],
        embeddings: vec![Complex64::new(1.0, 0.0)],
        monomials: vec![vec![]],
    }
}

fn proto_gaussian() -> Proto {
    Proto::power_basis("Q(i)", "i", vec![rat_i(-1), rat_i(0)], Complex64::new(0.0, 1.0))
}

fn proto_quadratic(name: &str, sym: &str, d: i64) -> Proto {
    let root = if d >= 0 {
        Complex64::new((d as f64).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, ((-d) as f64).sqrt())
    };
    Proto::power_basis(name, sym, vec![rat_i(d), rat_i(0)], root)
}

fn proto_zeta7() -> Proto {
    Proto::power_basis(
        "Q(zeta7)",
        "zeta7",
        vec![rat_i(-1); 6],
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 7.0),
    )
}

fn make_q() -> Result<Field, FieldError> {
    let p = proto_q();
    let id = p.identity_columns();
    p.finish(vec![("id".into(), id)], "id", BTreeMap::new())
}

fn make_gaussian() -> Result<Field, FieldError> {
    let p = proto_gaussian();
    let id = p.identity_columns();
    let conj = p.aut_columns(&[vec![rat_i(0), rat_i(-1)]]);
    p.finish(
        vec![("id".into(), id), ("conj".into(), conj)],
        "conj",
        BTreeMap::new(),
    )
}

fn make_quadratic(name: &str, sym: &str, d: i64) -> Result<Field, FieldError> {
    let p = proto_quadratic(name, sym, d);
    let id = p.identity_columns();
    let sigma = p.aut_columns(&[vec![rat_i(0), rat_i(-1)]]);
    let conj_name = if d >= 0 { "id" } else { "sigma" };
    let mut constants = BTreeMap::new();
    if d == 5 {
        constants.insert("phi".into(), vec![rat(1, 2), rat(1, 2)]);
    }
    if d == -7 {
        constants.insert("omega".into(), vec![rat(1, 2), rat(1, 2)]);
    }
    p.finish(
        vec![("id".into(), id), ("sigma".into(), sigma)],
        conj_name,
        constants,
    )
}

/// Q(i, sqrt(d)) with basis {1, i, sqrt(d), i*sqrt(d)}.
fn make_gaussian_quadratic(name: &str, sym: &str, d: i64) -> Result<Field, FieldError> {
    let p = Proto::tensor(&proto_gaussian(), &proto_quadratic("tmp", sym, d), name);
    let deg = 4;
    let i_idx = p.symbol_index("i");
    let s_idx = p.symbol_index(sym);
    let img = |i_sign: i64, s_sign: i64| {
        let mut gi = unit(deg, i_idx);
        gi[i_idx] = rat_i(i_sign);
        let mut gs = unit(deg, s_idx);
        gs[s_idx] = rat_i(s_sign);
        vec![gi, gs]
    };
    let id = p.identity_columns();
    let iflip = p.aut_columns(&img(-1, 1)); // i -> -i, fixes sqrt(d)
    let sflip = p.aut_columns(&img(1, -1)); // sqrt(d) -> -sqrt(d), fixes i
    let both = p.aut_columns(&img(-1, -1));
    // "sigma" is the Galois generator of the tower actually used by the
    // codes: for Q(i,sqrt5) it flips sqrt5 (center Q(i)); for the silver and
    // alamouti towers it flips i (center Q(sqrt(d))). Complex conjugation
    // flips i, and also sqrt(d) when d < 0.
    let (conj_name, auts) = if d == 5 {
        (
            "conj",
            vec![
                ("id".into(), id),
                ("sigma".into(), sflip),
                ("conj".into(), iflip),
                ("sigma_conj".into(), both),
            ],
        )
    } else if d < 0 {
        (
            "conj",
            vec![
                ("id".into(), id),
                ("sigma".into(), iflip),
                ("rho".into(), sflip),
                ("conj".into(), both),
            ],
        )
    } else {
        (
            "sigma",
            vec![
                ("id".into(), id),
                ("sigma".into(), iflip),
                ("rho".into(), sflip),
                ("sigma_rho".into(), both),
            ],
        )
    };
    let mut constants = BTreeMap::new();
    if d == 5 {
        // phi = (1+sqrt5)/2 and its sigma-conjugate
        constants.insert(
            "phi".into(),
            vec![rat(1, 2), rat_i(0), rat(1, 2), rat_i(0)],
        );
        constants.insert(
            "sigma_phi".into(),
            vec![rat(1, 2), rat_i(0), rat(-1, 2), rat_i(0)],
        );
    }
    if d == -7 {
        constants.insert(
            "omega".into(),
            vec![rat(1, 2), rat_i(0), rat(1, 2), rat_i(0)],
        );
        // sqrt7 = -i*sqrt(-7) embeds to +sqrt(7)
        constants.insert(
            "sqrt7".into(),
            vec![rat_i(0), rat_i(0), rat_i(0), rat_i(-1)],
        );
    }
    p.finish(auts, conj_name, constants)
}

fn zeta7_constants(pad_to: usize) -> BTreeMap<String, Vec<Rat>> {
    let mut constants = BTreeMap::new();
    let mut put = |name: &str, coeffs: Vec<i64>| {
        let mut v: Vec<Rat> = coeffs.into_iter().map(rat_i).collect();
        v.resize(pad_to, Rat::zero());
        constants.insert(name.to_string(), v);
    };
    // Gauss sum: sqrt(-7) = 1 + 2z + 2z^2 + 2z^4
    put("sqrtm7", vec![1, 2, 2, 0, 2, 0]);
    // nu basis of the real cyclotomic subfield
    put("nu2", vec![-1, 0, -1, -1, -1, -1]); // z + z^-1
    put("nu3", vec![0, 0, 1, 0, 0, 1]); // z^2 + z^-2
    constants
}

fn make_zeta7() -> Result<Field, FieldError> {
    let p = proto_zeta7();
    let zeta_pow = |k: usize| -> Vec<Rat> {
        if k < 6 {
            unit(6, k)
        } else {
            vec![rat_i(-1); 6]
        }
    };
    let mut auts = vec![("id".into(), p.identity_columns())];
    for k in 2..=6usize {
        let name = if k == 6 { "tau".into() } else { format!("sigma{k}") };
        auts.push((name, p.aut_columns(&[zeta_pow(k)])));
    }
    p.finish(auts, "tau", zeta7_constants(6))
}

fn make_zeta7_i() -> Result<Field, FieldError> {
    let p = Proto::tensor(&proto_zeta7(), &proto_gaussian(), "Q(zeta7,i)");
    let deg = 12;
    let i_idx = p.symbol_index("i");
    let zeta_pow = |k: usize| -> Vec<Rat> {
        let mut v = vec![Rat::zero(); deg];
        if k < 6 {
            v[k] = Rat::one();
        } else {
            for item in v.iter_mut().take(6) {
                *item = rat_i(-1);
            }
        }
        v
    };
    let i_img = |sign: i64| {
        let mut v = vec![Rat::zero(); deg];
        v[i_idx] = rat_i(sign);
        v
    };
    let mut auts = Vec::new();
    for k in 1..=6usize {
        for flip in [false, true] {
            let name = match (k, flip) {
                (1, false) => "id".to_string(),
                (1, true) => "iconj".to_string(),
                (6, false) => "tau".to_string(),
                (6, true) => "conj".to_string(),
                (_, false) => format!("sigma{k}"),
                (_, true) => format!("sigma{k}_iconj"),
            };
            let cols = p.aut_columns(&[zeta_pow(k), i_img(if flip { -1 } else { 1 })]);
            auts.push((name, cols));
        }
    }
    let mut constants = zeta7_constants(12);
    // sqrt7 = -i * sqrt(-7)
    let sqrtm7 = constants["sqrtm7"].clone();
    let mut sqrt7 = vec![Rat::zero(); 12];
    for (k, c) in sqrtm7.iter().enumerate().take(6) {
        sqrt7[6 + k] = -c;
    }
    constants.insert("sqrt7".into(), sqrt7);
    p.finish(auts, "conj", constants)
}

static REGISTRY: OnceLock<BTreeMap<&'static str, Field>> = OnceLock::new();

pub const BUILTIN_NAMES: &[&str] = &[
    "Q",
    "Q(i)",
    "Q(sqrt5)",
    "Q(sqrt-7)",
    "Q(sqrt2)",
    "Q(i,sqrt5)",
    "Q(i,sqrt-7)",
    "Q(i,sqrt2)",
    "Q(zeta7)",
    "Q(zeta7,i)",
];

/// Fetch a built-in field by name (cached; handles are shared).
pub fn builtin_field(name: &str) -> Result<Field, FieldError> {
    let reg = REGISTRY.get_or_init(|| {
        let mut m = BTreeMap::new();
        m.insert("Q", make_q().expect("builtin Q"));
        m.insert("Q(i)", make_gaussian().expect("builtin Q(i)"));
        m.insert(
            "Q(sqrt5)",
            make_quadratic("Q(sqrt5)", "sqrt5", 5).expect("builtin Q(sqrt5)"),
        );
        m.insert(
            "Q(sqrt-7)",
            make_quadratic("Q(sqrt-7)", "sqrtm7", -7).expect("builtin Q(sqrt-7)"),
        );
        m.insert(
            "Q(sqrt2)",
            make_quadratic("Q(sqrt2)", "sqrt2", 2).expect("builtin Q(sqrt2)"),
        );
        m.insert(
            "Q(i,sqrt5)",
            make_gaussian_quadratic("Q(i,sqrt5)", "sqrt5", 5).expect("builtin Q(i,sqrt5)"),
        );
        m.insert(
            "Q(i,sqrt-7)",
            make_gaussian_quadratic("Q(i,sqrt-7)", "sqrtm7", -7).expect("builtin Q(i,sqrt-7)"),
        );
        m.insert(
            "Q(i,sqrt2)",
            make_gaussian_quadratic("Q(i,sqrt2)", "sqrt2", 2).expect("builtin Q(i,sqrt2)"),
        );
        m.insert("Q(zeta7)", make_zeta7().expect("builtin Q(zeta7)"));
        m.insert("Q(zeta7,i)", make_zeta7_i().expect("builtin Q(zeta7,i)"));
        m
    });
    reg.get(name)
        .cloned()
        .ok_or_else(|| FieldError::UnknownField(name.into()))
}
