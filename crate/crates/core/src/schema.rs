//! JSON interchange for coefficient data.
//!
//! Forms and polynomials share one layout; `kind` tells them apart and
//! omitted entries are zero:
//!
//! ```json
//! {"m": 2, "n": 2, "kind": "full", "entries": [{"index": [1, 2], "re": 1.0, "im": 0.0}]}
//! ```
//!
//! Dirichlet series use `{"m": 2, "entries": [{"n": 6, "re": 1.0, "im": 0.0}]}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dirichlet::{DirichletCoefficients, PrimeTable};
use crate::error::{Error, Result};
use crate::forms::PolynomialCoefficients;
use crate::mixed::CoefficientTensor;
use crate::multiindex::{IndexKind, IndexSetSpec, MultiIndex};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexedEntry {
    pub index: Vec<usize>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFile {
    pub m: usize,
    pub n: usize,
    pub kind: IndexKind,
    pub entries: Vec<IndexedEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletEntry {
    pub n: u64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletFile {
    pub m: usize,
    pub entries: Vec<DirichletEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Form(CoefficientTensor),
    Polynomial(PolynomialCoefficients),
}

fn nonzero_entries<'a>(items: impl Iterator<Item = (&'a [usize], Complex64)>) -> Vec<IndexedEntry> {
    items
        .filter(|(_, v)| *v != Complex64::default())
        .map(|(i, v)| IndexedEntry { index: i.to_vec(), re: v.re, im: v.im })
        .collect()
}

pub fn tensor_to_json(a: &CoefficientTensor) -> Result<String> {
    let indices = a.spec().enumerate()?;
    let entries = nonzero_entries(indices.iter().map(|i| (i.entries(), a.get(i.entries()))));
    Ok(serde_json::to_string(&CoefficientFile { m: a.m(), n: a.n(), kind: IndexKind::Full, entries })?)
}

pub fn poly_to_json(c: &PolynomialCoefficients) -> Result<String> {
    let entries = nonzero_entries(c.iter().map(|(j, v)| (j.entries(), *v)));
    Ok(serde_json::to_string(&CoefficientFile { m: c.m(), n: c.n(), kind: IndexKind::Nondecreasing, entries })?)
}

pub fn coefficients_from_json(text: &str) -> Result<Coefficients> {
    let file: CoefficientFile = serde_json::from_str(text)?;
    let spec = IndexSetSpec { m: file.m, n: file.n, kind: file.kind };
    let mut seen = std::collections::BTreeSet::new();
    let mut parsed = Vec::with_capacity(file.entries.len());
    for e in &file.entries {
        if e.index.len() != file.m {
            return Err(Error::DimensionMismatch { expected: file.m, found: e.index.len() });
        }
        let i = MultiIndex::new(e.index.clone(), file.n)?;
        if file.kind == IndexKind::Nondecreasing && !i.is_nondecreasing() {
            return Err(Error::BadParams(format!("{:?} is not nondecreasing", e.index)));
        }
        if spec.offset(&i).is_none() {
            return Err(Error::BadParams(format!("{:?} is outside the index set", e.index)));
        }
        if !seen.insert(i.clone()) {
            return Err(Error::BadParams(format!("{:?} appears twice", e.index)));
        }
        parsed.push((i, Complex64::new(e.re, e.im)));
    }
    match file.kind {
        IndexKind::Full => {
            let mut a = CoefficientTensor::zeros(file.m, file.n)?;
            for (i, v) in parsed {
                a.set(i.entries(), v);
            }
            Ok(Coefficients::Form(a))
        }
        IndexKind::Nondecreasing => {
            let mut c = PolynomialCoefficients::zeros(file.m, file.n)?;
            for (i, v) in parsed {
                c.set(&i, v)?;
            }
            Ok(Coefficients::Polynomial(c))
        }
    }
}

pub fn dirichlet_to_json(d: &DirichletCoefficients) -> Result<String> {
    let entries = d
        .entries()
        .iter()
        .filter(|(_, v)| **v != Complex64::default())
        .map(|(&n, v)| DirichletEntry { n, re: v.re, im: v.im })
        .collect();
    Ok(serde_json::to_string(&DirichletFile { m: d.m(), entries })?)
}

pub fn dirichlet_from_json(text: &str, table: &PrimeTable) -> Result<DirichletCoefficients> {
    let file: DirichletFile = serde_json::from_str(text)?;
    let mut entries = BTreeMap::new();
    for e in file.entries {
        if entries.insert(e.n, Complex64::new(e.re, e.im)).is_some() {
            return Err(Error::BadParams(format!("n = {} appears twice", e.n)));
        }
    }
    DirichletCoefficients::new(file.m, entries, table)
}
