//! Index geometry and dense q-ary tensors.
//!
//! Coordinates are 1-based throughout the public API, matching the usual
//! convention `[n] = {1, …, n}`. Flat storage is row-major with axis 1
//! outermost; that order is also the canonical serialization order.

use crate::{Error, Result};

/// Maximum number of cells a dense tensor may hold.
const MAX_CELLS: usize = 1 << 31;

/// The index box `[n_1] × … × [n_d]` together with the alphabet size q.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
    q: u32,
}

impl Shape {
    pub fn new(dims: Vec<usize>, q: u32) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::Shape(format!(
                "need d >= 2 axes, got {}",
                dims.len()
            )));
        }
        if q < 2 {
            return Err(Error::Shape(format!("need q >= 2, got {q}")));
        }
        let mut cells: usize = 1;
        for (j, &n) in dims.iter().enumerate() {
            if n == 0 {
                return Err(Error::Shape(format!("axis {} has extent 0", j + 1)));
            }
            cells = cells
                .checked_mul(n)
                .filter(|&c| c <= MAX_CELLS)
                .ok_or_else(|| Error::Shape("shape exceeds dense storage guard".into()))?;
        }
        Ok(Shape { dims, q })
    }

    pub fn d(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn extent(&self, axis: usize) -> usize {
        self.dims[axis - 1]
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Number of cells in the box.
    pub fn cells(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of lines along `axis`, i.e. the product of the other extents.
    pub fn line_count(&self, axis: usize) -> usize {
        self.dims
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != axis - 1)
            .map(|(_, &n)| n)
            .product()
    }

    /// Total number of lines over all axes.
    pub fn total_lines(&self) -> usize {
        (1..=self.d()).map(|j| self.line_count(j)).sum()
    }

    /// The extents of the reduced index for `axis`, in ascending axis order.
    pub fn reduced_dims(&self, axis: usize) -> Vec<usize> {
        self.dims
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != axis - 1)
            .map(|(_, &n)| n)
            .collect()
    }

    /// Flat offset of a 1-based multi-index.
    pub fn flat(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.d());
        let mut idx = 0;
        for (k, &c) in coords.iter().enumerate() {
            debug_assert!(c >= 1 && c <= self.dims[k]);
            idx = idx * self.dims[k] + (c - 1);
        }
        idx
    }

    /// Inverse of [`Shape::flat`].
    pub fn coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.d()];
        for k in (0..self.d()).rev() {
            out[k] = flat % self.dims[k] + 1;
            flat /= self.dims[k];
        }
        out
    }

    pub fn check_coords(&self, coords: &[usize]) -> Result<()> {
        if coords.len() != self.d() {
            return Err(Error::Bounds(format!(
                "index has {} coordinates, shape has {}",
                coords.len(),
                self.d()
            )));
        }
        for (k, &c) in coords.iter().enumerate() {
            if c < 1 || c > self.dims[k] {
                return Err(Error::Bounds(format!(
                    "coordinate {} = {} outside [1, {}]",
                    k + 1,
                    c,
                    self.dims[k]
                )));
            }
        }
        Ok(())
    }

    /// Iterate all multi-indices in lexicographic (row-major) order.
    pub fn iter_coords(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.cells()).map(move |f| self.coords(f))
    }
}

/// Flat offset of a 1-based index within a box of the given extents.
pub(crate) fn flat_in(dims: &[usize], coords: &[usize]) -> usize {
    let mut idx = 0;
    for (k, &c) in coords.iter().enumerate() {
        idx = idx * dims[k] + (c - 1);
    }
    idx
}

/// Inverse of [`flat_in`].
pub(crate) fn coords_in(dims: &[usize], mut flat: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = flat % dims[k] + 1;
        flat /= dims[k];
    }
    out
}

/// A line of the box: the axis that varies plus the d-1 fixed coordinates
/// (all coordinates except the axis position, in ascending axis order).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LineId {
    pub axis: usize,
    pub reduced: Vec<usize>,
}

impl LineId {
    pub fn new(axis: usize, reduced: Vec<usize>) -> Self {
        LineId { axis, reduced }
    }

    pub fn check(&self, shape: &Shape) -> Result<()> {
        if self.axis < 1 || self.axis > shape.d() {
            return Err(Error::Bounds(format!(
                "axis {} outside [1, {}]",
                self.axis,
                shape.d()
            )));
        }
        let rd = shape.reduced_dims(self.axis);
        if self.reduced.len() != rd.len() {
            return Err(Error::Bounds(format!(
                "reduced index has {} coordinates, expected {}",
                self.reduced.len(),
                rd.len()
            )));
        }
        for (k, (&c, &n)) in self.reduced.iter().zip(&rd).enumerate() {
            if c < 1 || c > n {
                return Err(Error::Bounds(format!(
                    "reduced coordinate {} = {c} outside [1, {n}]",
                    k + 1
                )));
            }
        }
        Ok(())
    }

    /// Flat position of this line among all axis-`self.axis` lines.
    pub fn reduced_flat(&self, shape: &Shape) -> usize {
        flat_in(&shape.reduced_dims(self.axis), &self.reduced)
    }

    /// The full multi-index with coordinate `self.axis` set to `pos`.
    pub fn cell(&self, pos: usize) -> Vec<usize> {
        let mut coords = Vec::with_capacity(self.reduced.len() + 1);
        coords.extend_from_slice(&self.reduced[..self.axis - 1]);
        coords.push(pos);
        coords.extend_from_slice(&self.reduced[self.axis - 1..]);
        coords
    }
}

impl std::fmt::Display for LineId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "axis {} at (", self.axis)?;
        for (k, c) in self.reduced.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All lines of the box, axis-major, lexicographic in the reduced index.
pub fn iter_lines(shape: &Shape) -> impl Iterator<Item = LineId> + '_ {
    (1..=shape.d()).flat_map(move |axis| {
        let rd = shape.reduced_dims(axis);
        let count = shape.line_count(axis);
        (0..count).map(move |f| LineId::new(axis, coords_in(&rd, f)))
    })
}

/// The cells of a line, in ascending order of the varying coordinate.
pub fn line_entries(shape: &Shape, line: &LineId) -> Result<Vec<Vec<usize>>> {
    line.check(shape)?;
    Ok((1..=shape.extent(line.axis))
        .map(|p| line.cell(p))
        .collect())
}

/// A dense q-ary d-dimensional matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor {
    shape: Shape,
    entries: Vec<u32>,
}

impl Tensor {
    pub fn zeros(shape: Shape) -> Self {
        let n = shape.cells();
        Tensor {
            shape,
            entries: vec![0; n],
        }
    }

    pub fn from_entries(shape: Shape, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != shape.cells() {
            return Err(Error::Input(format!(
                "expected {} entries, got {}",
                shape.cells(),
                entries.len()
            )));
        }
        if let Some(&e) = entries.iter().find(|&&e| e >= shape.q()) {
            return Err(Error::Input(format!(
                "entry {e} outside alphabet {{0, …, {}}}",
                shape.q() - 1
            )));
        }
        Ok(Tensor { shape, entries })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, coords: &[usize]) -> u32 {
        self.entries[self.shape.flat(coords)]
    }

    pub fn set(&mut self, coords: &[usize], value: u32) {
        debug_assert!(value < self.shape.q());
        let idx = self.shape.flat(coords);
        self.entries[idx] = value;
    }

    /// Sum of the entries along one line.
    pub fn line_sum(&self, line: &LineId) -> Result<u32> {
        line.check(&self.shape)?;
        let mut sum = 0;
        for pos in 1..=self.shape.extent(line.axis) {
            sum += self.get(&line.cell(pos));
        }
        Ok(sum)
    }
}

/// The 0/1 unrolling of a q-ary matrix over an extra level axis: level v
/// flags entries `>= v`, so levels are non-increasing per base cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryRep {
    base: Shape,
    levels: Vec<u8>,
}

impl BinaryRep {
    pub fn base_shape(&self) -> &Shape {
        &self.base
    }

    fn idx(&self, coords: &[usize], level: u32) -> usize {
        let q1 = (self.base.q() - 1) as usize;
        self.base.flat(coords) * q1 + (level as usize - 1)
    }

    pub fn get(&self, coords: &[usize], level: u32) -> u8 {
        self.levels[self.idx(coords, level)]
    }
}

/// Unroll a tensor into its binary representation.
pub fn binary_representation(m: &Tensor) -> BinaryRep {
    let base = m.shape().clone();
    let q1 = base.q() - 1;
    let mut levels = Vec::with_capacity(base.cells() * q1 as usize);
    for &e in m.entries() {
        for v in 1..=q1 {
            levels.push(u8::from(e >= v));
        }
    }
    BinaryRep { base, levels }
}

/// Collapse a level-monotone binary representation back into a tensor.
pub fn from_binary_representation(b: &BinaryRep) -> Result<Tensor> {
    let q1 = b.base.q() - 1;
    let mut entries = Vec::with_capacity(b.base.cells());
    for cell in b.levels.chunks(q1 as usize) {
        let mut count = 0;
        let mut prev = 1u8;
        for &bit in cell {
            if bit > prev {
                return Err(Error::Input(
                    "binary representation is not level-monotone".into(),
                ));
            }
            prev = bit;
            count += bit as u32;
        }
        entries.push(count);
    }
    Tensor::from_entries(b.base.clone(), entries)
}
