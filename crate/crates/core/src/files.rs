//! JSON interchange formats for instances (line sum arrays) and tensors.

use serde::{Deserialize, Serialize};

use crate::linesum::LineSumArray;
use crate::tensor::{Shape, Tensor};
use crate::{Error, Result};

/// One axis block of an instance file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisSums {
    pub axis: usize,
    pub sums: Vec<u64>,
}

/// A line sum instance: shape, alphabet size, and per-axis sums in
/// lexicographic order of the reduced index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub shape: Vec<usize>,
    pub q: u32,
    pub line_sums: Vec<AxisSums>,
}

impl InstanceFile {
    pub fn from_array(s: &LineSumArray) -> Self {
        let shape = s.shape();
        InstanceFile {
            shape: shape.dims().to_vec(),
            q: shape.q(),
            line_sums: (1..=shape.d())
                .map(|axis| AxisSums {
                    axis,
                    sums: s.axis_sums(axis).to_vec(),
                })
                .collect(),
        }
    }

    /// Validate and convert: every axis in `[1, d]` exactly once, lengths
    /// matching the shape.
    pub fn into_array(self) -> Result<LineSumArray> {
        let shape = Shape::new(self.shape, self.q)?;
        let d = shape.d();
        if self.line_sums.len() != d {
            return Err(Error::Input(format!(
                "expected {d} axis blocks, found {}",
                self.line_sums.len()
            )));
        }
        let mut sums: Vec<Option<Vec<u64>>> = vec![None; d];
        for block in self.line_sums {
            if block.axis < 1 || block.axis > d {
                return Err(Error::Input(format!(
                    "axis {} outside [1, {d}]",
                    block.axis
                )));
            }
            if sums[block.axis - 1].replace(block.sums).is_some() {
                return Err(Error::Input(format!("duplicate axis {}", block.axis)));
            }
        }
        let sums = sums.into_iter().map(|s| s.unwrap()).collect();
        LineSumArray::new(shape, sums)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("instance JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("serialization cannot fail");
        out.push('\n');
        out
    }
}

/// A concrete tensor: shape, alphabet size, entries in flat order (first
/// axis outermost, last axis fastest).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorFile {
    pub shape: Vec<usize>,
    pub q: u32,
    pub entries: Vec<u32>,
}

impl TensorFile {
    pub fn from_tensor(m: &Tensor) -> Self {
        TensorFile {
            shape: m.shape().dims().to_vec(),
            q: m.shape().q(),
            entries: m.entries().to_vec(),
        }
    }

    pub fn into_tensor(self) -> Result<Tensor> {
        let shape = Shape::new(self.shape, self.q)?;
        Tensor::from_entries(shape, self.entries)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("tensor JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("serialization cannot fail");
        out.push('\n');
        out
    }
}
