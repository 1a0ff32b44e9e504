//! Named test functions used by the validation suites and the `corpus` command.

use std::path::Path;

use crate::linalg::c;
use crate::schur::{make_conservative, ConservativeNode, StateSpaceSchur};
use crate::{CMatrix, Result};

/// Seed of the random conservative members; fixed so the corpus is canonical.
pub const CORPUS_SEED: u64 = 7;

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub phi: StateSpaceSchur,
    /// Present when the realization is conservative.
    pub node: Option<ConservativeNode>,
}

impl CorpusEntry {
    fn new(name: &'static str, phi: StateSpaceSchur) -> Self {
        let node = ConservativeNode::certify(phi.clone()).ok();
        CorpusEntry { name, phi, node }
    }
}

pub fn blaschke() -> CorpusEntry {
    CorpusEntry::new("blaschke", StateSpaceSchur::blaschke())
}

pub fn half_blaschke() -> CorpusEntry {
    CorpusEntry::new(
        "half_blaschke",
        StateSpaceSchur::blaschke().scale_outputs(0.5),
    )
}

pub fn zero() -> CorpusEntry {
    CorpusEntry::new("zero", StateSpaceSchur::constant(CMatrix::zeros(1, 1)))
}

pub fn constant_03() -> CorpusEntry {
    CorpusEntry::new(
        "constant_0.3",
        StateSpaceSchur::constant(CMatrix::from_element(1, 1, c(0.3, 0.0))),
    )
}

/// Random conservative node with `n = 3`, `m = p = 2`.
pub fn conservative3() -> Result<CorpusEntry> {
    let node = make_conservative(3, 2, CORPUS_SEED)?;
    Ok(CorpusEntry {
        name: "conservative_n3",
        phi: node.schur().clone(),
        node: Some(node),
    })
}

/// `diag(b, 0.5ψ)` with `ψ` a random conservative scalar function of degree two.
pub fn direct_sum() -> Result<CorpusEntry> {
    let psi = make_conservative(2, 1, CORPUS_SEED + 1)?;
    let phi = StateSpaceSchur::blaschke().direct_sum(&psi.schur().scale_outputs(0.5));
    Ok(CorpusEntry::new("direct_sum_2x2", phi))
}

/// `b` with a decoupled state `0.7i` that is neither reachable nor observable.
pub fn padded() -> Result<CorpusEntry> {
    let r2 = 2f64.sqrt();
    let a = CMatrix::from_row_slice(2, 2, &[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.7)]);
    let b = CMatrix::from_column_slice(2, 1, &[c(r2, 0.0), c(0.0, 0.0)]);
    let cm = CMatrix::from_row_slice(1, 2, &[c(-r2, 0.0), c(0.0, 0.0)]);
    let d = CMatrix::from_element(1, 1, c(1.0, 0.0));
    Ok(CorpusEntry::new(
        "padded_blaschke",
        StateSpaceSchur::new(a, b, cm, d)?,
    ))
}

/// The six functions every corpus-wide check runs over.
pub fn standard() -> Result<Vec<CorpusEntry>> {
    Ok(vec![
        blaschke(),
        half_blaschke(),
        zero(),
        constant_03(),
        conservative3()?,
        direct_sum()?,
    ])
}

/// [`standard`] plus the padded non-simple node.
pub fn full() -> Result<Vec<CorpusEntry>> {
    let mut all = standard()?;
    all.push(padded()?);
    Ok(all)
}

/// Writes `<name>.json` for every member of [`full`] into `dir`; returns the paths.
pub fn write_corpus(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for e in full()? {
        let path = dir.join(format!("{}.json", e.name));
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&e.phi.to_json())? + "\n",
        )?;
        paths.push(path);
    }
    Ok(paths)
}
