//! JSON files for chains and tensor chains. Rationals are `"p/q"` strings
//! throughout; decimal strings are accepted on input and read exactly.

use serde::{Deserialize, Serialize};

use crate::chains::{Chain, ChainError};
use crate::coeff::{CoeffError, CoefficientGroup, CoefficientValue};
use crate::exact::{format_rational, parse_rational, Q};
use crate::geometry::{GeometryError, RationalPoint, SimplexCell};
use crate::slicing::TypeIndex;
use crate::tensor::{TensorChain, TensorError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("bad rational {0:?}")]
    Rational(String),
    #[error("cell {index}: {message}")]
    Cell { index: usize, message: String },
}

/// A coefficient given either as a bare rational string (in the file's
/// group) or as a full coefficient object.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffField {
    Bare(String),
    Full(CoefficientValue),
}

impl CoeffField {
    fn resolve(&self, group: CoefficientGroup) -> Result<Q, IoError> {
        match self {
            CoeffField::Bare(s) => {
                let v = parse_rational(s).map_err(|_| IoError::Rational(s.clone()))?;
                Ok(CoefficientValue::new(group, v)?.value().clone())
            }
            CoeffField::Full(v) => {
                group.check_same(&v.group())?;
                Ok(v.value().clone())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellEntry {
    pub vertices: Vec<RationalPoint>,
    pub coeff: CoeffField,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainFile {
    pub version: u32,
    pub ambient: usize,
    pub dim: usize,
    pub group: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u64>,
    pub cells: Vec<CellEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorTermEntry {
    pub cell1: Vec<RationalPoint>,
    pub cell2: Vec<RationalPoint>,
    pub coeff: CoeffField,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorFile {
    #[serde(default = "default_version")]
    pub version: u32,
    pub split: [usize; 2],
    #[serde(rename = "type")]
    pub ty: [usize; 2],
    #[serde(default = "default_group")]
    pub group: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u64>,
    pub terms: Vec<TensorTermEntry>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

fn default_group() -> String {
    "Z".into()
}

fn full(group: CoefficientGroup, g: &Q) -> CoeffField {
    CoeffField::Full(CoefficientValue::new(group, g.clone()).expect("stored coefficients are reduced"))
}

pub fn chain_to_file(c: &Chain) -> ChainFile {
    ChainFile {
        version: FORMAT_VERSION,
        ambient: c.ambient(),
        dim: c.dim(),
        group: c.group().tag().into(),
        m: c.group().modulus(),
        cells: c.terms().map(|(cell, g)| CellEntry { vertices: cell.vertices().to_vec(), coeff: full(c.group(), g) }).collect(),
    }
}

pub fn chain_from_file(f: &ChainFile) -> Result<Chain, IoError> {
    if f.version != FORMAT_VERSION {
        return Err(IoError::Version(f.version));
    }
    let group = CoefficientGroup::from_tag(&f.group, f.m)?;
    let mut c = Chain::new(f.ambient, f.dim, group);
    for (index, e) in f.cells.iter().enumerate() {
        let cell = SimplexCell::new(e.vertices.clone()).map_err(|err| IoError::Cell { index, message: err.to_string() })?;
        let g = e.coeff.resolve(group)?;
        c.add_cell(cell, &g).map_err(|err| IoError::Cell { index, message: err.to_string() })?;
    }
    Ok(c)
}

pub fn tensor_to_file(t: &TensorChain) -> TensorFile {
    let (n1, n2) = t.split();
    let ty = t.type_index();
    TensorFile {
        version: FORMAT_VERSION,
        split: [n1, n2],
        ty: [ty.k1, ty.k2],
        group: t.group().tag().into(),
        m: t.group().modulus(),
        terms: t
            .terms()
            .map(|(a, b, g)| TensorTermEntry { cell1: a.vertices().to_vec(), cell2: b.vertices().to_vec(), coeff: full(t.group(), g) })
            .collect(),
    }
}

pub fn tensor_from_file(f: &TensorFile) -> Result<TensorChain, IoError> {
    if f.version != FORMAT_VERSION {
        return Err(IoError::Version(f.version));
    }
    let group = CoefficientGroup::from_tag(&f.group, f.m)?;
    let mut t = TensorChain::new((f.split[0], f.split[1]), TypeIndex::new(f.ty[0], f.ty[1]), group);
    for (index, e) in f.terms.iter().enumerate() {
        let bad = |err: String| IoError::Cell { index, message: err };
        let a = SimplexCell::new(e.cell1.clone()).map_err(|err| bad(err.to_string()))?;
        let b = SimplexCell::new(e.cell2.clone()).map_err(|err| bad(err.to_string()))?;
        t.add_term(a, b, &e.coeff.resolve(group)?).map_err(|err| bad(err.to_string()))?;
    }
    Ok(t)
}

pub fn parse_chain(json: &str) -> Result<Chain, IoError> {
    chain_from_file(&serde_json::from_str(json)?)
}

pub fn parse_tensor(json: &str) -> Result<TensorChain, IoError> {
    tensor_from_file(&serde_json::from_str(json)?)
}

pub fn chain_json(c: &Chain) -> String {
    serde_json::to_string_pretty(&chain_to_file(c)).expect("serialisable")
}

pub fn tensor_json(t: &TensorChain) -> String {
    serde_json::to_string_pretty(&tensor_to_file(t)).expect("serialisable")
}

/// `"a,b,c"` as rationals.
pub fn parse_rational_list(s: &str) -> Result<Vec<Q>, IoError> {
    s.split(',')
        .map(|x| x.trim())
        .filter(|x| !x.is_empty())
        .map(|x| parse_rational(x).map_err(|_| IoError::Rational(x.to_string())))
        .collect()
}

pub fn rational_strings(v: &[Q]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, q2};

    #[test]
    fn chain_round_trip() {
        let json = r#"{"version":1,"ambient":2,"dim":1,"group":"Z","cells":[
            {"vertices":[["0","0"],["1/2","0.25"]],"coeff":"3"},
            {"vertices":[["1","1"],["0","1"]],"coeff":{"group":"Z","value":"-2"}}]}"#;
        let c = parse_chain(json).unwrap();
        assert_eq!(c.len(), 2);
        let out = chain_json(&c);
        let back = parse_chain(&out).unwrap();
        assert_eq!(back, c);
        assert_eq!(chain_json(&back), out);
        assert!(out.contains("\"1/4\""));
    }

    #[test]
    fn modular_and_errors() {
        let json = r#"{"version":1,"ambient":1,"dim":0,"group":"ZmodM","m":3,"cells":[{"vertices":[["1"]],"coeff":"5"}]}"#;
        let c = parse_chain(json).unwrap();
        assert_eq!(c.terms().next().unwrap().1, &q(2));
        let bad = r#"{"version":1,"ambient":1,"dim":0,"group":"Z","cells":[{"vertices":[["1"]],"coeff":"1/2"}]}"#;
        assert!(parse_chain(bad).is_err());
        let mismatch = r#"{"version":1,"ambient":1,"dim":0,"group":"Z","cells":[{"vertices":[["1"]],"coeff":{"group":"Q","value":"1"}}]}"#;
        assert!(parse_chain(mismatch).is_err());
        let degenerate = r#"{"version":1,"ambient":2,"dim":1,"group":"Z","cells":[{"vertices":[["1","1"],["1","1"]],"coeff":"1"}]}"#;
        assert!(matches!(parse_chain(degenerate), Err(IoError::Cell { index: 0, .. })));
        assert!(parse_chain(r#"{"version":2,"ambient":1,"dim":0,"group":"Z","cells":[]}"#).is_err());
    }

    #[test]
    fn tensor_round_trip() {
        let json = r#"{"split":[1,1],"type":[1,0],"terms":[{"cell1":[["0"],["1"]],"cell2":[["1/3"]],"coeff":"2"}]}"#;
        let t = parse_tensor(json).unwrap();
        assert_eq!(t.len(), 1);
        let back = parse_tensor(&tensor_json(&t)).unwrap();
        assert_eq!(back, t);
        assert_eq!(parse_rational_list("0.3, 7/10").unwrap(), vec![q2(3, 10), q2(7, 10)]);
    }
}
