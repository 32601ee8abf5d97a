//! On-disk dataset layout.
//!
//! A dataset is a directory holding `meta.json` plus five little-endian
//! binary arrays: `indptr.bin` (u64), `indices.bin` (u32), `feats.bin`
//! (f32, row-major), `labels.bin` (u8 indicator matrix) and `split.bin`
//! (u8 per node, 0 = train, 1 = val, 2 = test).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Csr, Graph, Split};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub feat_dim: usize,
    pub num_classes: usize,
    pub multilabel: bool,
}

const META: &str = "meta.json";
const INDPTR: &str = "indptr.bin";
const INDICES: &str = "indices.bin";
const FEATS: &str = "feats.bin";
const LABELS: &str = "labels.bin";
const SPLIT: &str = "split.bin";

fn read(dir: &Path, name: &str) -> Result<Vec<u8>> {
    let path = dir.join(name);
    fs::read(&path).map_err(|e| Error::io(path, e))
}

fn bad(dir: &Path, reason: impl Into<String>) -> Error {
    Error::Dataset {
        path: dir.to_path_buf(),
        reason: reason.into(),
    }
}

fn expect_len(dir: &Path, name: &str, bytes: &[u8], count: usize, width: usize) -> Result<()> {
    if bytes.len() != count * width {
        return Err(bad(
            dir,
            format!(
                "{name} holds {} bytes, expected {count} entries of {width} bytes",
                bytes.len()
            ),
        ));
    }
    Ok(())
}

/// Loads a dataset directory.
///
/// Unsorted neighbor lists are sorted; duplicate edges, self-loops,
/// out-of-range ids and asymmetric adjacency are rejected.
pub fn load_graph(dir: impl AsRef<Path>) -> Result<Graph> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(bad(dir, "dataset directory does not exist"));
    }
    let meta: Meta = serde_json::from_slice(&read(dir, META)?)
        .map_err(|e| bad(dir, format!("{META}: {e}")))?;

    let n = meta.num_nodes;
    let raw = read(dir, INDPTR)?;
    expect_len(dir, INDPTR, &raw, n + 1, 8)?;
    let indptr: Vec<usize> = raw
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect();

    let raw = read(dir, INDICES)?;
    expect_len(dir, INDICES, &raw, meta.num_edges, 4)?;
    let mut indices: Vec<u32> = raw
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
        .collect();

    if indptr[0] != 0 || indptr[n] != meta.num_edges {
        return Err(bad(
            dir,
            format!(
                "indptr spans [{}, {}] but meta declares {} edges",
                indptr[0], indptr[n], meta.num_edges
            ),
        ));
    }
    for v in 0..n {
        if indptr[v] > indptr[v + 1] {
            return Err(bad(dir, format!("indptr decreases at node {v}")));
        }
        indices[indptr[v]..indptr[v + 1]].sort_unstable();
    }

    let raw = read(dir, FEATS)?;
    expect_len(dir, FEATS, &raw, n * meta.feat_dim, 4)?;
    let features: Vec<f32> = raw
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();

    let labels = read(dir, LABELS)?;
    expect_len(dir, LABELS, &labels, n * meta.num_classes, 1)?;

    let raw = read(dir, SPLIT)?;
    expect_len(dir, SPLIT, &raw, n, 1)?;
    let split = raw
        .iter()
        .enumerate()
        .map(|(v, &t)| Split::from_u8(t).ok_or_else(|| bad(dir, format!("node {v} has split tag {t}"))))
        .collect::<Result<Vec<_>>>()?;

    Graph::new(
        Csr { indptr, indices },
        meta.feat_dim,
        features,
        meta.num_classes,
        labels,
        split,
        meta.multilabel,
    )
    .map_err(|e| bad(dir, e.to_string()))
}

/// Writes `g` to `dir`. An existing destination is an error unless `force`.
pub fn write_graph(g: &Graph, dir: impl AsRef<Path>, force: bool) -> Result<()> {
    let dir = dir.as_ref();
    if dir.exists() {
        if !force {
            return Err(Error::AlreadyExists(dir.to_path_buf()));
        }
    } else {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let meta = Meta {
        num_nodes: g.num_nodes(),
        num_edges: g.num_edges(),
        feat_dim: g.feat_dim(),
        num_classes: g.num_classes(),
        multilabel: g.multilabel(),
    };
    let write = |name: &str, bytes: &[u8]| -> Result<()> {
        let path: PathBuf = dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::io(path, e))
    };
    write(META, &serde_json::to_vec_pretty(&meta)?)?;
    write(
        INDPTR,
        &g.indptr()
            .iter()
            .flat_map(|&p| (p as u64).to_le_bytes())
            .collect::<Vec<_>>(),
    )?;
    write(
        INDICES,
        &g.indices().iter().flat_map(|i| i.to_le_bytes()).collect::<Vec<_>>(),
    )?;
    write(
        FEATS,
        &g.features().iter().flat_map(|x| x.to_le_bytes()).collect::<Vec<_>>(),
    )?;
    write(LABELS, g.labels())?;
    write(SPLIT, &g.split().iter().map(|&s| s as u8).collect::<Vec<_>>())?;
    Ok(())
}
