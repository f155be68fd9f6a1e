//! JSON algebra documents. Complex numbers are `[re, im]` pairs, keys are
//! written sorted and floats with 17 significant digits, so that emitting a
//! parsed document reproduces it byte for byte.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{check_axioms, Element, ItoAlgebra};
use crate::error::{Error, Result};
use crate::forms::{ThermalForm, ThermalPair, VacuumForm, VacuumTriple};
use crate::linalg::{c, CMat, CRow, CVec, C64};

use super::json;

pub const SCHEMA_VERSION: u32 = 1;

pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub schema_version: u32,
    pub dim: usize,
    pub basis: Vec<String>,
    pub mul: Vec<Vec<Vec<Pair>>>,
    pub star: Vec<Vec<Pair>>,
    pub death: Vec<Pair>,
    pub state: Vec<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tags: Option<Tags>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Tags {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vacuum: Option<VacuumTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermal: Option<ThermalTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VacuumTag {
    pub k_dim: usize,
    pub elements: Vec<VacuumTagElement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VacuumTagElement {
    pub alpha: Pair,
    pub zeta: Vec<Pair>,
    pub eta: Vec<Pair>,
    pub a: Vec<Vec<Pair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalTag {
    pub d_dim: usize,
    pub mul: Vec<Vec<Vec<Pair>>>,
    pub star: Vec<Vec<Pair>>,
    pub plus_metric: Vec<Vec<Pair>>,
    pub elements: Vec<ThermalTagElement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalTagElement {
    pub alpha: Pair,
    pub xi: Vec<Pair>,
}

fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

fn complex(p: &Pair) -> C64 {
    c(p[0], p[1])
}

fn shape(field: &str, message: String) -> Error {
    Error::Shape {
        field: field.into(),
        message,
    }
}

fn vector(field: &str, v: &[Pair], n: usize) -> Result<CVec> {
    if v.len() != n {
        return Err(shape(field, format!("expected length {n}, found {}", v.len())));
    }
    Ok(CVec::from_iterator(n, v.iter().map(complex)))
}

fn matrix(field: &str, rows: &[Vec<Pair>], n: usize) -> Result<CMat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(shape(field, format!("expected n×n with n = {n}")));
    }
    Ok(CMat::from_fn(n, n, |i, j| complex(&rows[i][j])))
}

fn tensor(field: &str, t: &[Vec<Vec<Pair>>], n: usize) -> Result<Vec<C64>> {
    if t.len() != n || t.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
        return Err(shape(field, format!("expected n×n×n with n = {n}")));
    }
    Ok(t.iter().flatten().flatten().map(complex).collect())
}

fn matrix_rows(m: &CMat) -> Vec<Vec<Pair>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect())
        .collect()
}

fn tensor_rows(t: &[C64], n: usize) -> Vec<Vec<Vec<Pair>>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| pair(t[(i * n + j) * n + k])).collect())
                .collect()
        })
        .collect()
}

impl AlgebraDocument {
    pub fn from_algebra(alg: &ItoAlgebra, vacuum: Option<&VacuumForm>, thermal: Option<&ThermalForm>) -> Self {
        let n = alg.dim();
        let tags = (vacuum.is_some() || thermal.is_some()).then(|| Tags {
            vacuum: vacuum.map(VacuumTag::from_form),
            thermal: thermal.map(ThermalTag::from_form),
        });
        AlgebraDocument {
            schema_version: SCHEMA_VERSION,
            dim: n,
            basis: alg.labels().to_vec(),
            mul: tensor_rows(alg.structure_constants(), n),
            star: matrix_rows(alg.star_matrix()),
            death: alg.death().0.iter().map(|z| pair(*z)).collect(),
            state: alg.state().iter().map(|z| pair(*z)).collect(),
            tags,
        }
    }

    pub fn to_algebra(&self, tol: f64) -> Result<ItoAlgebra> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(shape(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, found {}", self.schema_version),
            ));
        }
        let n = self.dim;
        if n == 0 {
            return Err(shape("dim", "expected a positive dimension".into()));
        }
        if self.basis.len() != n {
            return Err(shape(
                "basis",
                format!("expected {n} labels, found {}", self.basis.len()),
            ));
        }
        let mul = tensor("mul", &self.mul, n)?;
        let star = matrix("star", &self.star, n)?;
        let death = vector("death", &self.death, n)?;
        let state = vector("state", &self.state, n)?;
        Ok(ItoAlgebra::new(self.basis.clone(), mul, star, Element(death), state)?.with_tol(tol))
    }

    pub fn emit(&self) -> String {
        let value = serde_json::to_value(self).expect("documents serialize");
        json::to_canonical_string(&value)
    }
}

impl VacuumTag {
    pub fn from_form(form: &VacuumForm) -> Self {
        VacuumTag {
            k_dim: form.k_dim,
            elements: form
                .elements
                .iter()
                .map(|t| VacuumTagElement {
                    alpha: pair(t.alpha),
                    zeta: t.zeta.iter().map(|z| pair(*z)).collect(),
                    eta: t.eta.iter().map(|z| pair(*z)).collect(),
                    a: matrix_rows(&t.a),
                })
                .collect(),
        }
    }

    pub fn to_form(&self, dim: usize) -> Result<VacuumForm> {
        let p = self.k_dim;
        if self.elements.len() != dim {
            return Err(shape("tags.vacuum.elements", format!("expected {dim} elements")));
        }
        let elements = self
            .elements
            .iter()
            .map(|e| {
                Ok(VacuumTriple {
                    alpha: complex(&e.alpha),
                    zeta: vector("tags.vacuum.elements.zeta", &e.zeta, p)?,
                    eta: CRow::from_iterator(p, vector("tags.vacuum.elements.eta", &e.eta, p)?.iter().copied()),
                    a: matrix("tags.vacuum.elements.a", &e.a, p)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(VacuumForm { k_dim: p, elements })
    }
}

impl ThermalTag {
    pub fn from_form(form: &ThermalForm) -> Self {
        ThermalTag {
            d_dim: form.d_dim,
            mul: tensor_rows(&form.mul, form.d_dim),
            star: matrix_rows(&form.star),
            plus_metric: matrix_rows(&form.plus_metric),
            elements: form
                .elements
                .iter()
                .map(|e| ThermalTagElement {
                    alpha: pair(e.alpha),
                    xi: e.xi.iter().map(|z| pair(*z)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_form(&self, dim: usize) -> Result<ThermalForm> {
        let q = self.d_dim;
        if self.elements.len() != dim {
            return Err(shape("tags.thermal.elements", format!("expected {dim} elements")));
        }
        Ok(ThermalForm {
            d_dim: q,
            mul: tensor("tags.thermal.mul", &self.mul, q)?,
            star: matrix("tags.thermal.star", &self.star, q)?,
            plus_metric: matrix("tags.thermal.plus_metric", &self.plus_metric, q)?,
            elements: self
                .elements
                .iter()
                .map(|e| {
                    Ok(ThermalPair {
                        alpha: complex(&e.alpha),
                        xi: vector("tags.thermal.elements.xi", &e.xi, q)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        })
    }
}

/// A parsed document: the algebra, any presentations it carries, and axiom
/// warnings (parsing never fails on axioms).
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedAlgebra {
    pub algebra: ItoAlgebra,
    pub vacuum: Option<VacuumForm>,
    pub thermal: Option<ThermalForm>,
    pub warnings: Vec<String>,
}

pub fn parse_document(text: &str) -> Result<AlgebraDocument> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    serde_json::from_value(value).map_err(|e| shape("document", e.to_string()))
}

pub fn parse_algebra(text: &str, tol: f64) -> Result<ParsedAlgebra> {
    let doc = parse_document(text)?;
    let algebra = doc.to_algebra(tol)?;
    let tags = doc.tags.clone().unwrap_or_default();
    let vacuum = tags.vacuum.map(|t| t.to_form(doc.dim)).transpose()?;
    let thermal = tags.thermal.map(|t| t.to_form(doc.dim)).transpose()?;
    let report = check_axioms(&algebra);
    let warnings = report
        .violations
        .iter()
        .map(|v| {
            format!(
                "axiom `{}` violated (residual {:e}, witness {:?})",
                v.axiom, v.residual, v.witness
            )
        })
        .collect();
    Ok(ParsedAlgebra {
        algebra,
        vacuum,
        thermal,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn round_trip_is_byte_exact() {
        let h = catalog::hp();
        let doc = AlgebraDocument::from_algebra(&h, Some(&catalog::hp_vacuum_form()), None);
        let text = doc.emit();
        let again = parse_document(&text).unwrap();
        assert_eq!(again, doc);
        assert_eq!(again.emit(), text);
        let parsed = parse_algebra(&text, 1e-9).unwrap();
        assert_eq!(parsed.algebra, h);
        assert!(parsed.warnings.is_empty());
        assert_eq!(parsed.vacuum, Some(catalog::hp_vacuum_form()));
    }

    #[test]
    fn awkward_floats_survive() {
        let mut doc = AlgebraDocument::from_algebra(&catalog::poisson(), None, None);
        doc.mul[1][1][0] = [0.1 + 0.2, -1e-300];
        doc.state[1] = [-0.0, 5e-324];
        let text = doc.emit();
        let back = parse_document(&text).unwrap();
        assert_eq!(back.mul[1][1][0][0].to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(back.state[1][0].to_bits(), (-0.0f64).to_bits());
        assert_eq!(back.state[1][1], 5e-324);
        assert_eq!(back.emit(), text);
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_document("{\n  \"dim\": 2,\n  oops\n}") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_mul_shape_names_field() {
        let mut doc = AlgebraDocument::from_algebra(&catalog::wiener(), None, None);
        doc.mul[1].pop();
        let err = parse_algebra(&doc.emit(), 1e-9).unwrap_err();
        assert!(err.to_string().starts_with("mul: expected n×n×n"), "{err}");
    }

    #[test]
    fn broken_involution_parses_with_warning() {
        let mut doc = AlgebraDocument::from_algebra(&catalog::wiener(), None, None);
        doc.star[1][1][0] += 1e-3;
        let parsed = parse_algebra(&doc.emit(), 1e-9).unwrap();
        assert!(parsed.warnings.iter().any(|w| w.contains("involution")));
        assert!(check_axioms(&parsed.algebra).violated("involution"));
    }

    #[test]
    fn missing_field_is_schema_error() {
        let err = parse_document("{\"schema_version\": 1}").unwrap_err();
        assert!(
            matches!(err, Error::Shape { ref field, .. } if field == "document"),
            "{err}"
        );
    }
}
