//! JSON descriptors for fields, forms, vectors, matrices and curves, and JSON views of results.
//!
//! Exact elements are written as their four rational coordinates in the basis
//! `(1, ω, √α, ω√α)`; each coordinate is an integer or a string such as `"-3/2"`.

use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::cmfield::{CmField, CmFieldError, Embedding, FieldElement, FieldMatrix, FieldVector, KElement};
use crate::hermitian::{FormError, HermitianForm};
use crate::isometry::{Eigenframe, FixedLocus, IsometryClass, TraceInvariant};
use crate::lattice::{RepulsionCertificate, TorsionDatum};
use crate::numeric::{Mat3, Vec3, C64};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad rational coordinate {0:?}")]
    BadCoordinate(String),
    #[error("exact entries need a field descriptor")]
    NeedField,
    #[error(transparent)]
    Field(#[from] CmFieldError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// `F = Q(√D)(√α)` with `α = a + b·ω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDesc {
    pub d: i64,
    pub alpha: [i64; 2],
}

impl FieldDesc {
    pub fn build(&self) -> Result<Arc<CmField>, IoError> {
        Ok(CmField::from_ints(self.d, self.alpha[0], self.alpha[1])?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Int(i64),
    Text(String),
}

impl Coord {
    fn value(&self) -> Result<BigRational, IoError> {
        match self {
            Coord::Int(n) => Ok(BigRational::from_integer((*n).into())),
            Coord::Text(s) => BigRational::from_str(s.trim()).map_err(|_| IoError::BadCoordinate(s.clone())),
        }
    }
}

pub type ElementDesc = [Coord; 4];

pub fn element(field: &Arc<CmField>, e: &ElementDesc) -> Result<FieldElement, IoError> {
    Ok(FieldElement::from_quad(
        field,
        [e[0].value()?, e[1].value()?, e[2].value()?, e[3].value()?],
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixDesc {
    /// Rational integers.
    Ints {
        entries: [[i64; 3]; 3],
    },
    Exact {
        entries: [[ElementDesc; 3]; 3],
    },
    Numeric {
        entries: [[[f64; 2]; 3]; 3],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VectorDesc {
    Ints { entries: [i64; 3] },
    Exact { entries: [ElementDesc; 3] },
    Numeric { entries: [[f64; 2]; 3] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormDesc {
    /// `diag(1, 1, −1)`.
    Standard,
    /// `diag(1, 1, −√D)`.
    DiagonalSqrtD,
    Matrix {
        matrix: MatrixDesc,
    },
}

#[derive(Clone, Debug)]
pub enum Matrix {
    Exact(FieldMatrix),
    Numeric(Mat3),
}

impl Matrix {
    pub fn numeric(&self) -> Mat3 {
        match self {
            Matrix::Exact(m) => m.embed(Embedding::Sigma1),
            Matrix::Numeric(m) => *m,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Vector {
    Exact(FieldVector),
    Numeric(Vec3),
}

impl Vector {
    pub fn numeric(&self) -> Vec3 {
        match self {
            Vector::Exact(v) => v.embed(Embedding::Sigma1),
            Vector::Numeric(v) => *v,
        }
    }
}

pub fn matrix(field: Option<&Arc<CmField>>, desc: &MatrixDesc) -> Result<Matrix, IoError> {
    match desc {
        MatrixDesc::Numeric { entries } => Ok(Matrix::Numeric(Mat3::from_fn(|r, c| {
            C64::new(entries[r][c][0], entries[r][c][1])
        }))),
        MatrixDesc::Ints { entries } => match field {
            Some(f) => Ok(Matrix::Exact(FieldMatrix::from_ints(f, *entries))),
            None => Ok(Matrix::Numeric(Mat3::from_fn(|r, c| {
                C64::new(entries[r][c] as f64, 0.0)
            }))),
        },
        MatrixDesc::Exact { entries } => {
            let f = field.ok_or(IoError::NeedField)?;
            let mut rows = Vec::with_capacity(3);
            for row in entries {
                rows.push([element(f, &row[0])?, element(f, &row[1])?, element(f, &row[2])?]);
            }
            Ok(Matrix::Exact(FieldMatrix::from_fn(|r, c| rows[r][c].clone())))
        }
    }
}

pub fn vector(field: Option<&Arc<CmField>>, desc: &VectorDesc) -> Result<Vector, IoError> {
    match desc {
        VectorDesc::Numeric { entries } => Ok(Vector::Numeric(Vec3::from_fn(|r, _| {
            C64::new(entries[r][0], entries[r][1])
        }))),
        VectorDesc::Ints { entries } => match field {
            Some(f) => Ok(Vector::Exact(FieldVector::from_ints(f, *entries))),
            None => Ok(Vector::Numeric(Vec3::from_fn(|r, _| C64::new(entries[r] as f64, 0.0)))),
        },
        VectorDesc::Exact { entries } => {
            let f = field.ok_or(IoError::NeedField)?;
            Ok(Vector::Exact(FieldVector([
                element(f, &entries[0])?,
                element(f, &entries[1])?,
                element(f, &entries[2])?,
            ])))
        }
    }
}

pub fn form(field: Option<&Arc<CmField>>, desc: &FormDesc) -> Result<HermitianForm, IoError> {
    match desc {
        FormDesc::Standard => match field {
            Some(f) => Ok(HermitianForm::exact(FieldMatrix::from_ints(
                f,
                [[1, 0, 0], [0, 1, 0], [0, 0, -1]],
            ))?),
            None => Ok(HermitianForm::standard()),
        },
        FormDesc::DiagonalSqrtD => Ok(HermitianForm::diagonal_sqrt_d(field.ok_or(IoError::NeedField)?)),
        FormDesc::Matrix { matrix: m } => match matrix(field, m)? {
            Matrix::Exact(m) => Ok(HermitianForm::exact(m)?),
            Matrix::Numeric(m) => Ok(HermitianForm::numeric(m)?),
        },
    }
}

pub fn c64(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn vec3(v: &Vec3) -> [[f64; 2]; 3] {
    [c64(v[0]), c64(v[1]), c64(v[2])]
}

pub fn mat3(m: &Mat3) -> [[[f64; 2]; 3]; 3] {
    let row = |r: usize| [c64(m[(r, 0)]), c64(m[(r, 1)]), c64(m[(r, 2)])];
    [row(0), row(1), row(2)]
}

pub fn k_view(x: &KElement) -> Value {
    json!({ "text": x.to_string(), "a": x.a.to_string(), "b": x.b.to_string() })
}

pub fn element_view(x: &FieldElement) -> Value {
    let q = x.quad();
    json!({
        "text": x.to_string(),
        "quad": q.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "sigma1": c64(x.embed(Embedding::Sigma1)),
    })
}

pub fn field_matrix_view(m: &FieldMatrix) -> Value {
    let rows: Vec<Vec<Vec<String>>> = (0..3)
        .map(|r| {
            (0..3)
                .map(|c| m.get(r, c).quad().iter().map(|x| x.to_string()).collect())
                .collect()
        })
        .collect();
    json!(rows)
}

pub fn field_vector_view(v: &FieldVector) -> Value {
    let rows: Vec<Vec<String>> =
        v.0.iter()
            .map(|e| e.quad().iter().map(|x| x.to_string()).collect())
            .collect();
    json!(rows)
}

fn locus_view(l: &FixedLocus) -> Value {
    match l {
        FixedLocus::Whole => json!({ "type": "whole" }),
        FixedLocus::Point(p) => json!({ "type": "point", "point": vec3(p) }),
        FixedLocus::Line { polar } => json!({ "type": "line", "polar": vec3(polar) }),
        FixedLocus::BoundaryPair(a, b) => json!({ "type": "boundary_pair", "points": [vec3(a), vec3(b)] }),
        FixedLocus::BoundaryPoint(p) => json!({ "type": "boundary_point", "point": vec3(p) }),
    }
}

fn trace_view(t: &TraceInvariant) -> Value {
    match t {
        TraceInvariant::Exact { t, f } => json!({ "mode": "exact", "trace": element_view(t), "f": k_view(f) }),
        TraceInvariant::Numeric { t, f } => json!({ "mode": "numeric", "trace": c64(*t), "f": f }),
    }
}

pub fn frame_view(f: &Eigenframe) -> Value {
    json!({
        "vectors": f.vectors.iter().map(vec3).collect::<Vec<_>>(),
        "eigenvalues": f.eigenvalues.iter().map(|z| c64(*z)).collect::<Vec<_>>(),
        "pattern_ok": f.pattern_ok,
    })
}

pub fn class_view(c: &IsometryClass) -> Value {
    json!({
        "label": c.label,
        "eigenvalues": c.eigenvalues.iter().map(|z| c64(*z)).collect::<Vec<_>>(),
        "fixed_locus": locus_view(&c.fixed_locus),
        "trace": trace_view(&c.trace),
        "eigenframe": c.eigenframe.as_ref().map(frame_view),
    })
}

pub fn datum_view(d: &TorsionDatum) -> Value {
    json!({
        "label": d.label,
        "order": d.order,
        "triple": d.triple,
        "matrix": field_matrix_view(d.matrix()),
        "eigenvalues": d.eigenvalues.iter().map(|z| c64(*z)).collect::<Vec<_>>(),
        "locus": d.locus(),
    })
}

pub fn certificate_view(c: &RepulsionCertificate) -> Value {
    json!({
        "labels": c.labels,
        "trace_product": element_view(&c.trace_product),
        "trace_inverse_product": element_view(&c.trace_inverse_product),
        "trace_norm": k_view(&c.trace_norm),
        "trace_class": c.trace_class,
        "product_label": c.product_label,
        "involution_tance": c.involution_tance.as_ref().map(k_view),
        "exact_tance_consistent": c.exact_tance_consistent,
        "witness": c.witness.as_ref().map(|w| json!({
            "eight_tance": k_view(&w.eight_tance),
            "sigma1": w.sigma1,
            "sigma2": w.sigma2,
            "gap": k_view(&w.gap),
            "gap_at_least_sqrt_d": w.gap_at_least_sqrt_d,
            "rational": w.rational,
        })),
        "verdict": c.verdict,
        "trace_sum_error": c.trace_sum_error,
        "expansion_error": c.expansion_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_descriptors() {
        let f: FieldDesc = serde_json::from_str(r#"{"d":5,"alpha":[-11,0]}"#).unwrap();
        let field = f.build().unwrap();
        let m: MatrixDesc = serde_json::from_str(
            r#"{"kind":"exact","entries":[[[1,0,0,0],[0,0,0,0],[0,0,0,0]],[[0,0,0,0],["-1",0,0,0],[0,0,0,0]],[[0,0,0,0],[0,0,0,0],[-1,0,0,0]]]}"#,
        )
        .unwrap();
        let Matrix::Exact(m) = matrix(Some(&field), &m).unwrap() else {
            panic!()
        };
        assert_eq!(m, FieldMatrix::from_ints(&field, [[1, 0, 0], [0, -1, 0], [0, 0, -1]]));
        let j: FormDesc = serde_json::from_str(r#"{"kind":"diagonal_sqrt_d"}"#).unwrap();
        assert!(form(Some(&field), &j).unwrap().is_admissible().unwrap());
        let e = element(
            &field,
            &[Coord::Text("1/2".into()), Coord::Int(0), Coord::Int(0), Coord::Int(1)],
        )
        .unwrap();
        assert_eq!(e.quad()[0], BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(serde_json::from_str::<FieldDesc>("{\"d\":5").is_err());
        let bad = [Coord::Text("x/y".into()), Coord::Int(0), Coord::Int(0), Coord::Int(0)];
        let field = CmField::from_ints(5, -11, 0).unwrap();
        assert!(matches!(element(&field, &bad), Err(IoError::BadCoordinate(_))));
        let v = VectorDesc::Exact {
            entries: [bad.clone(), bad.clone(), bad],
        };
        assert!(matches!(vector(None, &v), Err(IoError::NeedField)));
    }
}
