//! Independent ground truth: a complete backtracking solver and exhaustive
//! enumerators for desk-scale instances.
//!
//! `solve` assigns cells in lexicographic order (innermost axis fastest) and
//! prunes a branch as soon as some line's residual demand goes negative or
//! exceeds what its unassigned cells can still carry. `None` means proven
//! nonexistence; running out of nodes is a distinct `BudgetExceeded` error,
//! never silently converted.

use std::collections::HashSet;

use crate::linesum::LineSumArray;
use crate::tensor::{Shape, Tensor};
use crate::{Error, Result};

/// Caps and modes for the complete search.
#[derive(Debug, Clone)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub symmetric: bool,
    /// Per-cell inclusive [lo, hi] bounds, flat order.
    pub entry_bounds: Option<Vec<(u32, u32)>>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 100_000_000,
            symmetric: false,
            entry_bounds: None,
        }
    }
}

struct Solver {
    q1: u32,
    /// line index per (cell, axis): offset into the flattened residual array
    cell_lines: Vec<Vec<usize>>,
    residual: Vec<i64>,
    /// unassigned cells per line
    open: Vec<i64>,
    entries: Vec<u32>,
    bounds: Vec<(u32, u32)>,
    /// cell groups assigned together (orbits in symmetric mode)
    groups: Vec<Vec<usize>>,
    nodes: u64,
    max_nodes: u64,
}

impl Solver {
    fn search(&mut self, g: usize) -> Result<bool> {
        if g == self.groups.len() {
            return Ok(true);
        }
        let group = self.groups[g].clone();
        let (mut lo, mut hi) = (0u32, self.q1);
        for &f in &group {
            lo = lo.max(self.bounds[f].0);
            hi = hi.min(self.bounds[f].1);
        }
        'values: for v in lo..=hi {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(Error::BudgetExceeded(self.nodes));
            }
            // tentatively place v on every cell of the group
            for &f in &group {
                for &l in &self.cell_lines[f] {
                    self.residual[l] -= v as i64;
                    self.open[l] -= 1;
                }
                self.entries[f] = v;
            }
            let mut feasible = true;
            for &f in &group {
                for &l in &self.cell_lines[f] {
                    let r = self.residual[l];
                    if r < 0 || r > self.q1 as i64 * self.open[l] {
                        feasible = false;
                        break;
                    }
                }
                if !feasible {
                    break;
                }
            }
            if feasible && self.search(g + 1)? {
                return Ok(true);
            }
            for &f in &group {
                for &l in &self.cell_lines[f] {
                    self.residual[l] += v as i64;
                    self.open[l] += 1;
                }
            }
            if !feasible {
                continue 'values;
            }
        }
        Ok(false)
    }
}

/// Find a tensor realizing `s`, or prove none exists within the budget's
/// modes (symmetric realizations only, per-entry bounds).
pub fn solve(s: &LineSumArray, budget: &SearchBudget) -> Result<Option<Tensor>> {
    let shape = s.shape();
    let d = shape.d();
    let cells = shape.cells();
    if budget.max_nodes == 0 {
        return Err(Error::Input("max_nodes must be at least 1".into()));
    }
    if let Some(b) = &budget.entry_bounds {
        if b.len() != cells {
            return Err(Error::Input(
                "entry bounds must match the cell count".into(),
            ));
        }
    }
    if budget.symmetric && shape.dims().windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Input("symmetric search requires a cube".into()));
    }

    // flatten all lines: axis-major, reduced-lex
    let mut line_offset = vec![0usize; d + 1];
    for j in 1..=d {
        line_offset[j] = line_offset[j - 1] + shape.line_count(j);
    }
    let total_lines = line_offset[d];
    let mut residual = vec![0i64; total_lines];
    let mut open = vec![0i64; total_lines];
    let mut cell_lines = vec![Vec::with_capacity(d); cells];
    for (f, coords) in shape.iter_coords().enumerate() {
        for j in 1..=d {
            let line = crate::linesum::line_through(j, &coords);
            let l = line_offset[j - 1] + line.reduced_flat(shape);
            cell_lines[f].push(l);
            open[l] += 1;
        }
    }
    for j in 1..=d {
        for (k, &v) in s.axis_sums(j).iter().enumerate() {
            residual[line_offset[j - 1] + k] = v as i64;
        }
    }

    let groups: Vec<Vec<usize>> = if budget.symmetric {
        // orbit groups keyed by the sorted coordinate multiset, in order of
        // first appearance
        let mut seen: std::collections::HashMap<Vec<usize>, usize> =
            std::collections::HashMap::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (f, coords) in shape.iter_coords().enumerate() {
            let mut key = coords;
            key.sort_unstable();
            let idx = *seen.entry(key).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[idx].push(f);
        }
        groups
    } else {
        (0..cells).map(|f| vec![f]).collect()
    };

    let mut solver = Solver {
        q1: shape.q() - 1,
        cell_lines,
        residual,
        open,
        entries: vec![0; cells],
        bounds: budget
            .entry_bounds
            .clone()
            .unwrap_or_else(|| vec![(0, shape.q() - 1); cells]),
        groups,
        nodes: 0,
        max_nodes: budget.max_nodes,
    };
    if solver.search(0)? {
        let entries = std::mem::take(&mut solver.entries);
        Ok(Some(Tensor::from_entries(shape.clone(), entries)?))
    } else {
        Ok(None)
    }
}

/// The exact set of line sum arrays achievable by any tensor of the shape,
/// by exhausting all q^cells tensors. Guarded.
pub fn enumerate_valid(shape: &Shape) -> Result<Vec<LineSumArray>> {
    let cells = shape.cells();
    let total = (shape.q() as u128).checked_pow(cells as u32);
    match total {
        Some(t) if t <= 1 << 24 => {}
        _ => {
            return Err(Error::Input(format!(
                "q^cells = {}^{cells} exceeds the enumeration guard",
                shape.q()
            )))
        }
    }
    let q = shape.q();
    let mut seen: HashSet<Vec<Vec<u64>>> = HashSet::new();
    let mut out = Vec::new();
    let mut digits = vec![0u32; cells];
    loop {
        let m = Tensor::from_entries(shape.clone(), digits.clone())?;
        let s = LineSumArray::from_tensor(&m);
        let key: Vec<Vec<u64>> = (1..=shape.d()).map(|j| s.axis_sums(j).to_vec()).collect();
        if seen.insert(key) {
            out.push(s);
        }
        // increment the base-q counter, innermost axis fastest
        let mut k = cells;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < q {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Visit every array satisfying the structural conditions (per-line bounds
/// and the cross-direction identities), generated by nested ranges with
/// early interval pruning. Guarded by the size of the free first-axis block.
pub fn for_each_structural(shape: &Shape, mut f: impl FnMut(&LineSumArray)) -> Result<u64> {
    let d = shape.d();
    let q1 = (shape.q() - 1) as u64;
    let counts: Vec<usize> = (1..=d).map(|j| shape.line_count(j)).collect();
    let caps: Vec<u64> = (1..=d).map(|j| shape.extent(j) as u64 * q1).collect();
    let free = (caps[0] + 1).checked_pow(counts[0] as u32);
    match free {
        Some(n) if n <= 1 << 24 => {}
        _ => {
            return Err(Error::Input(
                "first-axis search space exceeds the enumeration guard".into(),
            ))
        }
    }

    // global entry layout: axis arrays concatenated
    let mut offset = vec![0usize; d + 1];
    for j in 0..d {
        offset[j + 1] = offset[j] + counts[j];
    }
    let total = offset[d];
    let entry_cap: Vec<u64> = (0..d)
        .flat_map(|j| std::iter::repeat_n(caps[j], counts[j]))
        .collect();

    // cross-direction constraints: per axis pair and slice, the two sides
    // must total the same
    struct Constraint {
        lhs: Vec<usize>,
        rhs: Vec<usize>,
    }
    let mut constraints = Vec::new();
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); total];
    for j1 in 1..=d {
        for j2 in (j1 + 1)..=d {
            let others: Vec<usize> = (1..=d).filter(|&k| k != j1 && k != j2).collect();
            let other_dims: Vec<usize> = others.iter().map(|&k| shape.extent(k)).collect();
            let slices: usize = other_dims.iter().product();
            for sf in 0..slices {
                let fixed = crate::tensor::coords_in(&other_dims, sf);
                let mut full = vec![0usize; d];
                for (&axis, &c) in others.iter().zip(&fixed) {
                    full[axis - 1] = c;
                }
                let mut lhs = Vec::new();
                for i in 1..=shape.extent(j2) {
                    full[j2 - 1] = i;
                    let line = crate::linesum::line_through(j1, &full);
                    lhs.push(offset[j1 - 1] + line.reduced_flat(shape));
                }
                let mut rhs = Vec::new();
                for i in 1..=shape.extent(j1) {
                    full[j1 - 1] = i;
                    let line = crate::linesum::line_through(j2, &full);
                    rhs.push(offset[j2 - 1] + line.reduced_flat(shape));
                }
                let c = constraints.len();
                for &e in lhs.iter().chain(&rhs) {
                    touching[e].push(c);
                }
                constraints.push(Constraint { lhs, rhs });
            }
        }
    }

    // interval feasibility of a constraint under a partial assignment
    let feasible = |values: &[Option<u64>], c: &Constraint| -> bool {
        let side = |idxs: &[usize]| -> (u64, u64) {
            let mut min = 0;
            let mut max = 0;
            for &e in idxs {
                match values[e] {
                    Some(v) => {
                        min += v;
                        max += v;
                    }
                    None => max += entry_cap[e],
                }
            }
            (min, max)
        };
        let (lmin, lmax) = side(&c.lhs);
        let (rmin, rmax) = side(&c.rhs);
        lmin <= rmax && rmin <= lmax
    };

    let mut values: Vec<Option<u64>> = vec![None; total];
    let mut emitted = 0u64;
    let mut stack: Vec<u64> = vec![0];
    // iterative depth-first enumeration over entry values
    while let Some(v) = stack.last().copied() {
        let pos = stack.len() - 1;
        if v > entry_cap[pos] {
            stack.pop();
            values[pos] = None;
            if let Some(last) = stack.last_mut() {
                *last += 1;
            }
            continue;
        }
        values[pos] = Some(v);
        let ok = touching[pos]
            .iter()
            .all(|&c| feasible(&values, &constraints[c]));
        if !ok {
            values[pos] = None;
            *stack.last_mut().unwrap() += 1;
            continue;
        }
        if stack.len() == total {
            let sums: Vec<Vec<u64>> = (0..d)
                .map(|j| {
                    values[offset[j]..offset[j + 1]]
                        .iter()
                        .map(|v| v.unwrap())
                        .collect()
                })
                .collect();
            let s = LineSumArray::new(shape.clone(), sums)?;
            debug_assert!(s.check_structure().is_compatible());
            f(&s);
            emitted += 1;
            values[pos] = None;
            *stack.last_mut().unwrap() += 1;
        } else {
            stack.push(0);
        }
    }
    Ok(emitted)
}

/// Collect every structurally valid array of the shape.
pub fn enumerate_structural(shape: &Shape) -> Result<Vec<LineSumArray>> {
    let mut out = Vec::new();
    for_each_structural(shape, |s| out.push(s.clone()))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::verify;
    use crate::linesum::{compatible, compatible_2d, Verdict};

    fn shape(dims: &[usize], q: u32) -> Shape {
        Shape::new(dims.to_vec(), q).unwrap()
    }

    fn lsa_2d(r: &[u64], c: &[u64], q: u32) -> LineSumArray {
        let shape = shape(&[r.len(), c.len()], q);
        LineSumArray::new(shape, vec![c.to_vec(), r.to_vec()]).unwrap()
    }

    #[test]
    fn solve_zero_and_counterexample() {
        let s = lsa_2d(&[0, 0], &[0, 0], 2);
        let m = solve(&s, &SearchBudget::default()).unwrap().unwrap();
        assert_eq!(m.entries(), &[0, 0, 0, 0]);

        let s = lsa_2d(&[3, 3, 1, 1], &[4, 4, 0, 0], 2);
        assert_eq!(solve(&s, &SearchBudget::default()).unwrap(), None);
    }

    #[test]
    fn solve_verifies_its_output() {
        let m = Tensor::from_entries(shape(&[3, 3], 3), vec![2, 1, 0, 0, 2, 1, 1, 0, 2]).unwrap();
        let s = LineSumArray::from_tensor(&m);
        let found = solve(&s, &SearchBudget::default()).unwrap().unwrap();
        assert!(verify(&found, &s).unwrap());
    }

    #[test]
    fn budget_exhaustion_is_distinct() {
        let s = lsa_2d(&[2, 2, 2, 2], &[2, 2, 2, 2], 2);
        let budget = SearchBudget {
            max_nodes: 3,
            ..SearchBudget::default()
        };
        assert!(matches!(solve(&s, &budget), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn solve_respects_entry_bounds() {
        let s = lsa_2d(&[1, 1], &[1, 1], 2);
        // force the realization away from the identity pattern
        let budget = SearchBudget {
            entry_bounds: Some(vec![(0, 0), (0, 1), (0, 1), (0, 1)]),
            ..SearchBudget::default()
        };
        let m = solve(&s, &budget).unwrap().unwrap();
        assert_eq!(m.entries(), &[0, 1, 1, 0]);
    }

    #[test]
    fn symmetric_solve_output_is_symmetric() {
        let s = lsa_2d(&[2, 2, 2], &[2, 2, 2], 2);
        let budget = SearchBudget {
            symmetric: true,
            ..SearchBudget::default()
        };
        let m = solve(&s, &budget).unwrap().unwrap();
        for i in 1..=3 {
            for j in 1..=3 {
                assert_eq!(m.get(&[i, j]), m.get(&[j, i]));
            }
        }
        assert!(verify(&m, &s).unwrap());
    }

    #[test]
    fn enumerate_valid_small_shapes() {
        // 2x2 binary: 16 tensors collapse to the achievable margin pairs
        let arrays = enumerate_valid(&shape(&[2, 2], 2)).unwrap();
        assert!(arrays.len() < 16);
        // regression pin computed by this enumerator
        assert_eq!(arrays.len(), 15);
        for s in &arrays {
            assert!(compatible(s).is_compatible());
        }
        let arrays = enumerate_valid(&shape(&[2, 2, 2], 2)).unwrap();
        assert!(!arrays.is_empty());
    }

    #[test]
    fn structural_enumeration_counts() {
        // (2,1) binary arrays obey c_1 = r_1 + r_2; count by direct loops
        let mut expected = 0;
        for r1 in 0..=1u64 {
            for r2 in 0..=1u64 {
                for c1 in 0..=2u64 {
                    if r1 + r2 == c1 {
                        expected += 1;
                    }
                }
            }
        }
        let got = for_each_structural(&shape(&[2, 1], 2), |s| {
            assert!(s.check_structure().is_compatible());
        })
        .unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn referee_property() {
        // solve and enumerate_valid agree on every structural array; the
        // planar criterion agrees too in 2D and is necessary in 3D
        for (dims, q) in [
            (vec![2, 2], 2u32),
            (vec![2, 2], 3),
            (vec![3, 3], 2),
            (vec![3, 3], 3),
            (vec![2, 2, 2], 2),
        ] {
            let sh = shape(&dims, q);
            let valid: HashSet<Vec<Vec<u64>>> = enumerate_valid(&sh)
                .unwrap()
                .into_iter()
                .map(|s| (1..=sh.d()).map(|j| s.axis_sums(j).to_vec()).collect())
                .collect();
            for_each_structural(&sh, |s| {
                let key: Vec<Vec<u64>> = (1..=sh.d()).map(|j| s.axis_sums(j).to_vec()).collect();
                let realizable = solve(s, &SearchBudget::default()).unwrap().is_some();
                assert_eq!(realizable, valid.contains(&key));
                if sh.d() == 2 {
                    assert_eq!(realizable, compatible(s).is_compatible());
                    let verdict_2d = compatible_2d(s.axis_sums(2), s.axis_sums(1), q);
                    assert_eq!(realizable, matches!(verdict_2d, Verdict::Compatible));
                } else if realizable {
                    assert!(compatible(s).is_compatible());
                }
            })
            .unwrap();
        }
    }

    #[test]
    fn enumerate_valid_single_cell() {
        let arrays = enumerate_valid(&shape(&[1, 1], 2)).unwrap();
        assert_eq!(arrays.len(), 2);
    }
}
