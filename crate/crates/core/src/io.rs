//! JSON file formats.
//!
//! * table: `{"signature":[2,2],"rows":[{"v":["0",""],"u":["1",""]}, ...]}`
//! * generator set: `{"name":..., "provenance":..., "elements":[<table>, ...]}`
//! * embedding: `{"source":[2],"target":[2,2],"map":{"0":0}}`
//!
//! Words are strings in the text encoding of [`crate::words`]; `""` is the
//! empty word.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::GeneratorSet;
use crate::embedding::EmbeddingSpec;
use crate::error::{Error, Result};
use crate::table::{Element, Row, Table};
use crate::words::{Signature, Word, WordTuple};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowFile {
    pub v: Vec<String>,
    pub u: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableFile {
    pub signature: Vec<u32>,
    pub rows: Vec<RowFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    pub elements: Vec<TableFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingFile {
    pub source: Vec<u32>,
    pub target: Vec<u32>,
    pub map: BTreeMap<String, usize>,
}

fn parse_words(words: &[String], sig: &Signature, row: usize, column: &str) -> Result<WordTuple> {
    if words.len() != sig.dims() {
        return Err(Error::SignatureMismatch {
            expected: format!("{} words per cell", sig.dims()),
            found: format!("{} words in row {row}, column {column}", words.len()),
        });
    }
    words
        .iter()
        .zip(sig.sizes())
        .enumerate()
        .map(|(i, (w, &k))| {
            Word::parse(w, k).map_err(|e| match e {
                Error::Parse(msg) => Error::Parse(format!("row {row}, {column}[{i}]: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map(WordTuple::new)
}

impl TableFile {
    /// Converts to a [`Table`] without checking the partition conditions.
    pub fn to_table(&self) -> Result<Table> {
        let sig = Signature::new(self.signature.clone())?;
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(j, r)| {
                Ok(Row::new(
                    parse_words(&r.v, &sig, j, "v")?,
                    parse_words(&r.u, &sig, j, "u")?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Table::new(sig, rows))
    }

    pub fn to_element(&self) -> Result<Element> {
        Element::new(self.to_table()?)
    }

    pub fn from_table(t: &Table) -> Self {
        let sig = t.signature();
        let render = |w: &WordTuple| -> Vec<String> {
            w.words()
                .iter()
                .zip(sig.sizes())
                .map(|(w, &k)| w.render(k))
                .collect()
        };
        TableFile {
            signature: sig.sizes().to_vec(),
            rows: t
                .rows()
                .iter()
                .map(|r| RowFile {
                    v: render(&r.v),
                    u: render(&r.u),
                })
                .collect(),
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

pub fn parse_table(json: &str) -> Result<Table> {
    serde_json::from_str::<TableFile>(json)
        .map_err(json_error)?
        .to_table()
}

pub fn parse_element(json: &str) -> Result<Element> {
    Element::new(parse_table(json)?)
}

pub fn element_file(e: &Element) -> TableFile {
    TableFile::from_table(e.table())
}

pub fn parse_generators(json: &str) -> Result<GeneratorSet> {
    let file: GeneratorFile = serde_json::from_str(json).map_err(json_error)?;
    let elements = file
        .elements
        .iter()
        .enumerate()
        .map(|(i, t)| {
            t.to_element().map_err(|e| match e {
                Error::Parse(msg) => Error::Parse(format!("element {i}: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GeneratorSet::new(file.name, elements)
}

pub fn generator_file(gens: &GeneratorSet, provenance: Option<&str>) -> GeneratorFile {
    GeneratorFile {
        name: gens.name().to_string(),
        provenance: provenance.map(str::to_string),
        elements: gens
            .elements()
            .iter()
            .map(|e| TableFile::from_table(e.table()))
            .collect(),
    }
}

pub fn parse_embedding(json: &str) -> Result<EmbeddingSpec> {
    let file: EmbeddingFile = serde_json::from_str(json).map_err(json_error)?;
    let source = Signature::new(file.source)?;
    let target = Signature::new(file.target)?;
    let mut map = vec![None; source.dims()];
    for (key, &t) in &file.map {
        let i: usize = key
            .parse()
            .map_err(|_| Error::Parse(format!("map key {key:?} is not a coordinate index")))?;
        let slot = map.get_mut(i).ok_or_else(|| {
            Error::InvalidEmbedding(format!("source coordinate {i} does not exist"))
        })?;
        *slot = Some(t);
    }
    let map = map
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.ok_or_else(|| Error::InvalidEmbedding(format!("source coordinate {i} unmapped"))))
        .collect::<Result<Vec<_>>>()?;
    EmbeddingSpec::new(source, target, map)
}

pub fn embedding_file(spec: &EmbeddingSpec) -> EmbeddingFile {
    EmbeddingFile {
        source: spec.source().sizes().to_vec(),
        target: spec.target().sizes().to_vec(),
        map: spec
            .map()
            .iter()
            .enumerate()
            .map(|(i, &t)| (i.to_string(), t))
            .collect(),
    }
}
