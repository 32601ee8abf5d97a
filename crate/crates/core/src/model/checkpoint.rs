use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ModelSpec, Params};
use crate::kernels::DenseMatrix;
use crate::{Error, Result};

const MANIFEST: &str = "manifest.json";
const PARAMS: &str = "params.bin";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

/// Checkpoint description. `params.bin` holds the listed tensors back to
/// back as little-endian f64 in column-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: ModelSpec,
    pub tensors: Vec<TensorEntry>,
}

pub fn save_checkpoint(dir: impl AsRef<Path>, spec: &ModelSpec, params: &Params) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut bytes = Vec::with_capacity(params.num_scalars() * 8);
    let mut tensors = Vec::new();
    for (name, t) in params.named_tensors() {
        tensors.push(TensorEntry {
            name,
            rows: t.rows(),
            cols: t.cols(),
        });
        bytes.extend(t.as_slice().iter().flat_map(|v| v.to_le_bytes()));
    }
    let manifest = Manifest {
        spec: spec.clone(),
        tensors,
    };
    let mpath = dir.join(MANIFEST);
    fs::write(&mpath, serde_json::to_vec_pretty(&manifest)?).map_err(|e| Error::io(&mpath, e))?;
    let ppath = dir.join(PARAMS);
    fs::write(&ppath, bytes).map_err(|e| Error::io(&ppath, e))
}

pub fn load_checkpoint(dir: impl AsRef<Path>) -> Result<(ModelSpec, Params)> {
    let dir = dir.as_ref();
    let mpath = dir.join(MANIFEST);
    let raw = fs::read(&mpath).map_err(|e| Error::io(&mpath, e))?;
    let manifest: Manifest = serde_json::from_slice(&raw)?;
    let mut params = Params::init(&manifest.spec, 0)?;
    let expected: Vec<TensorEntry> = params
        .named_tensors()
        .into_iter()
        .map(|(name, t)| TensorEntry {
            name,
            rows: t.rows(),
            cols: t.cols(),
        })
        .collect();
    if expected != manifest.tensors {
        return Err(Error::Dataset {
            path: mpath,
            reason: "tensor list does not match the model spec".into(),
        });
    }
    let ppath = dir.join(PARAMS);
    let bytes = fs::read(&ppath).map_err(|e| Error::io(&ppath, e))?;
    if bytes.len() != params.num_scalars() * 8 {
        return Err(Error::Dataset {
            path: ppath,
            reason: format!("holds {} bytes, expected {}", bytes.len(), params.num_scalars() * 8),
        });
    }
    let mut values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    for t in params.tensors_mut() {
        let filled = DenseMatrix::from_col_major(t.rows(), t.cols(), values.by_ref().take(t.rows() * t.cols()).collect())?;
        *t = filled;
    }
    Ok((manifest.spec, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Arch;

    #[test]
    fn round_trip() {
        let spec = ModelSpec {
            arch: Arch::Mixhop,
            in_dim: 3,
            hidden: vec![2, 2],
            num_classes: 4,
            multilabel: true,
            mixhop_k: 1,
        };
        let p = Params::init(&spec, 42).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_checkpoint(dir.path(), &spec, &p).unwrap();
        let (s2, p2) = load_checkpoint(dir.path()).unwrap();
        assert_eq!(s2, spec);
        assert_eq!(p2, p);
    }

    #[test]
    fn truncated_params_are_rejected() {
        let spec = ModelSpec {
            arch: Arch::Gcn,
            in_dim: 3,
            hidden: vec![2],
            num_classes: 2,
            multilabel: false,
            mixhop_k: 0,
        };
        let dir = tempfile::tempdir().unwrap();
        save_checkpoint(dir.path(), &spec, &Params::init(&spec, 1).unwrap()).unwrap();
        fs::write(dir.path().join(PARAMS), [0u8; 8]).unwrap();
        assert!(load_checkpoint(dir.path()).is_err());
    }
}
