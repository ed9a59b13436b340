//! JSON form of a field spec: rationals as `p/q` strings, embeddings as
//! decimal `[re, im]` string pairs. A spec either carries the full
//! multiplication table or a monic minimal polynomial for a power basis.

use super::{Field, FieldError, FieldSpec, SparseRow};
use crate::rat::{format_rat, parse_rat, Rat};
use num::Zero;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSpecJson {
    pub name: String,
    pub degree: usize,
    pub basis: Vec<String>,
    /// Coefficients `c_0..c_{d-1}` of `x^d = sum c_k x^k` (power basis).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_poly: Option<Vec<String>>,
    /// Dense table: `mult_table[i][j][k]` = coefficient of `b_k` in `b_i b_j`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mult_table: Option<Vec<Vec<Vec<String>>>>,
    /// Automorphism name -> matrix columns (image of each basis element).
    pub automorphisms: BTreeMap<String, Vec<Vec<String>>>,
    pub conj: String,
    /// `[re, im]` decimal strings per basis element.
    pub embedding: Vec<[String; 2]>,
}

fn dense(row: &SparseRow, degree: usize) -> Vec<String> {
    let mut v = vec![Rat::zero(); degree];
    for (k, c) in row {
        v[*k] = c.clone();
    }
    v.iter().map(format_rat).collect()
}

fn parse_vec(strings: &[String], what: &str) -> Result<Vec<Rat>, FieldError> {
    strings
        .iter()
        .map(|s| parse_rat(s).ok_or_else(|| FieldError::BadSpec(format!("bad rational in {what}"))))
        .collect()
}

impl FieldSpecJson {
    pub fn from_field(field: &Field) -> FieldSpecJson {
        let d = field.degree();
        let mult_table = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| dense(&field.mult_table()[i][j], d))
                    .collect()
            })
            .collect();
        let mut automorphisms = BTreeMap::new();
        for name in field.automorphism_names() {
            let aut = field.aut(&name).expect("listed automorphism");
            automorphisms.insert(
                name,
                aut.matrix_columns()
                    .iter()
                    .map(|col| col.iter().map(format_rat).collect())
                    .collect(),
            );
        }
        FieldSpecJson {
            name: field.name().to_string(),
            degree: d,
            basis: field.basis_symbols().to_vec(),
            min_poly: None,
            mult_table: Some(mult_table),
            automorphisms,
            conj: field.conj().name().to_string(),
            embedding: (0..d)
                .map(|k| {
                    let e = field.embed_basis(k);
                    [format!("{:.17e}", e.re), format!("{:.17e}", e.im)]
                })
                .collect(),
        }
    }

    pub fn into_field(self) -> Result<Field, FieldError> {
        let d = self.degree;
        let embeddings: Vec<Complex64> = self
            .embedding
            .iter()
            .map(|[re, im]| {
                let re = re.parse::<f64>();
                let im = im.parse::<f64>();
                match (re, im) {
                    (Ok(re), Ok(im)) => Ok(Complex64::new(re, im)),
                    _ => Err(FieldError::BadSpec("bad embedding value".into())),
                }
            })
            .collect::<Result<_, _>>()?;
        let mult_table: Vec<Vec<SparseRow>> = if let Some(tbl) = &self.mult_table {
            if tbl.len() != d || tbl.iter().any(|r| r.len() != d) {
                return Err(FieldError::BadSpec("mult_table shape".into()));
            }
            tbl.iter()
                .map(|row| {
                    row.iter()
                        .map(|entry| {
                            let v = parse_vec(entry, "mult_table")?;
                            if v.len() != d {
                                return Err(FieldError::BadSpec("mult_table width".into()));
                            }
                            Ok(v.iter()
                                .enumerate()
                                .filter(|(_, c)| !c.is_zero())
                                .map(|(k, c)| (k, c.clone()))
                                .collect())
                        })
                        .collect::<Result<_, _>>()
                })
                .collect::<Result<_, _>>()?
        } else if let Some(mp) = &self.min_poly {
            let reduction = parse_vec(mp, "min_poly")?;
            if reduction.len() != d {
                return Err(FieldError::BadSpec("min_poly degree".into()));
            }
            power_basis_table(&reduction)
        } else {
            return Err(FieldError::BadSpec(
                "spec needs min_poly or mult_table".into(),
            ));
        };
        let automorphisms = self
            .automorphisms
            .iter()
            .map(|(name, cols)| {
                let parsed: Result<Vec<Vec<Rat>>, _> =
                    cols.iter().map(|c| parse_vec(c, "automorphism")).collect();
                Ok((name.clone(), parsed?))
            })
            .collect::<Result<Vec<_>, FieldError>>()?;
        Field::make(FieldSpec {
            name: self.name,
            degree: d,
            basis_symbols: self.basis,
            mult_table,
            embeddings,
            automorphisms,
            conj_name: self.conj,
            constants: BTreeMap::new(),
        })
    }
}

fn power_basis_table(reduction: &[Rat]) -> Vec<Vec<SparseRow>> {
    let d = reduction.len();
    let mut powers: Vec<Vec<Rat>> = (0..d)
        .map(|k| {
            let mut v = vec![Rat::zero(); d];
            v[k] = num::One::one();
            v
        })
        .collect();
    for _ in d..(2 * d).saturating_sub(1) {
        let prev = powers.last().unwrap().clone();
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
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    powers[i + j]
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(k, c)| (k, c.clone()))
                        .collect()
                })
                .collect()
        })
        .collect()
}
