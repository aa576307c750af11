//! Symmetric variant: realizations invariant under every permutation of the
//! coordinates, for cubes `[n]^d`.
//!
//! For a symmetric tensor all d axes carry the same sums and a line's sum
//! depends only on the multiset of its reduced index, so a symmetric
//! instance collapses to one value per sorted index. Construction peels the
//! border `{cells with max coordinate = n}`: a symmetric slice realization
//! `M1` over `[n]^(d-1)` determines every border cell (drop one occurrence
//! of n from the coordinates), and subtracting `M1` uniformly from the sums
//! leaves a symmetric instance on the core cube `[n-1]^d`.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::construct::{slice_target, verify};
use crate::linesum::{compatible, compatible_2d, LineSumArray};
use crate::oracle::{solve, SearchBudget};
use crate::tensor::{Shape, Tensor};
use crate::{Error, Result};

/// A symmetric line sum array reduced to one value per sorted reduced index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricProfile {
    shape: Shape,
    values: BTreeMap<Vec<usize>, u64>,
}

impl SymmetricProfile {
    /// Collapse `s`, failing if the shape is not a cube or the sums are not
    /// a function of the sorted reduced index.
    pub fn from_array(s: &LineSumArray) -> Result<Self> {
        let shape = s.shape();
        if shape.dims().windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Input(
                "symmetric instances require all extents equal".into(),
            ));
        }
        let mut values: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for line in crate::tensor::iter_lines(shape) {
            let v = s.sum(&line);
            let mut key = line.reduced.clone();
            key.sort_unstable();
            match values.insert(key, v) {
                Some(prev) if prev != v => {
                    return Err(Error::Input(format!(
                        "sums disagree on the orbit of {line}: {prev} vs {v}"
                    )))
                }
                _ => {}
            }
        }
        Ok(SymmetricProfile {
            shape: shape.clone(),
            values,
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Sum of any line whose reduced index has this multiset.
    pub fn get(&self, reduced: &[usize]) -> u64 {
        let mut key = reduced.to_vec();
        key.sort_unstable();
        self.values[&key]
    }

    /// Rebuild the full per-axis array.
    pub fn expand(&self) -> LineSumArray {
        let d = self.shape.d();
        let mut sums = Vec::with_capacity(d);
        for j in 1..=d {
            let dims = self.shape.reduced_dims(j);
            let count = self.shape.line_count(j);
            let axis = (0..count)
                .map(|f| self.get(&crate::tensor::coords_in(&dims, f)))
                .collect();
            sums.push(axis);
        }
        LineSumArray::new(self.shape.clone(), sums)
            .expect("profile values are complete by construction")
    }
}

/// Whether the array is a cube whose sums depend only on the sorted reduced
/// index.
pub fn check_symmetric(s: &LineSumArray) -> bool {
    SymmetricProfile::from_array(s).is_ok()
}

/// Whether the tensor is invariant under every coordinate permutation.
pub fn is_symmetric(m: &Tensor) -> bool {
    let shape = m.shape();
    if shape.dims().windows(2).any(|w| w[0] != w[1]) {
        return false;
    }
    shape.iter_coords().all(|coords| {
        let mut sorted = coords.clone();
        sorted.sort_unstable();
        m.get(&coords) == m.get(&sorted)
    })
}

/// Symmetric realization of the 2-dimensional instance with row sums `r`
/// (columns carry the same sums by symmetry).
pub fn build_symmetric_2d(r: &[u64], q: u32) -> Result<Tensor> {
    match compatible_2d(r, r, q) {
        crate::linesum::Verdict::Compatible => {}
        v => return Err(Error::NotRealizable(Box::new(v))),
    }
    if let Ok(m) = greedy_2d(r, q) {
        return Ok(m);
    }
    let s = two_dim_instance(r, q)?;
    let budget = SearchBudget {
        symmetric: true,
        ..SearchBudget::default()
    };
    match solve(&s, &budget)? {
        Some(m) => Ok(m),
        None => Err(Error::SymmetricUnrealizable(format!(
            "row sums {r:?} admit no symmetric {0}x{0} realization",
            r.len()
        ))),
    }
}

fn two_dim_instance(r: &[u64], q: u32) -> Result<LineSumArray> {
    let shape = Shape::new(vec![r.len(), r.len()], q)?;
    LineSumArray::new(shape, vec![r.to_vec(), r.to_vec()])
}

/// Peel the last row and column: hand border units to the rows with the
/// largest remaining sums (ties to the smaller index), corner last.
fn greedy_2d(r: &[u64], q: u32) -> Result<Tensor> {
    let n = r.len();
    let q1 = (q - 1) as u64;
    let shape = Shape::new(vec![n, n], q)?;
    if n == 1 {
        return Tensor::from_entries(shape, vec![r[0] as u32]);
    }
    let mut b = vec![0u64; n];
    let mut t = r[n - 1];
    while t > 0 {
        let mut best: Option<usize> = None;
        for i in 0..n - 1 {
            if b[i] < q1.min(r[i]) && best.is_none_or(|j| r[i] - b[i] > r[j] - b[j]) {
                best = Some(i);
            }
        }
        match best {
            Some(i) => b[i] += 1,
            None if b[n - 1] < q1 => b[n - 1] += 1,
            None => {
                return Err(Error::Internal {
                    code: "border-overflow",
                    msg: format!("cannot place the border sum {} for rows {r:?}", r[n - 1]),
                })
            }
        }
        t -= 1;
    }
    let reduced: Vec<u64> = (0..n - 1).map(|i| r[i] - b[i]).collect();
    if !compatible_2d(&reduced, &reduced, q).is_compatible() {
        return Err(Error::Internal {
            code: "reduced-incompatible",
            msg: format!("border {b:?} leaves incompatible rows {reduced:?}"),
        });
    }
    let core = greedy_2d(&reduced, q)?;
    let mut m = Tensor::zeros(shape);
    for i in 1..n {
        for j in 1..n {
            m.set(&[i, j], core.get(&[i, j]));
        }
    }
    for i in 1..=n {
        m.set(&[i, n], b[i - 1] as u32);
        m.set(&[n, i], b[i - 1] as u32);
    }
    Ok(m)
}

/// Symmetric realization of a symmetric instance, or an error if none
/// exists (decided by the symmetric-mode oracle when the greedy peel and
/// repair chain fails).
pub fn build_symmetric(s: &LineSumArray) -> Result<Tensor> {
    SymmetricProfile::from_array(s)?;
    match compatible(s) {
        crate::linesum::Verdict::Compatible => {}
        v => return Err(Error::NotRealizable(Box::new(v))),
    }
    if s.shape().d() == 2 {
        return build_symmetric_2d(s.axis_sums(1), s.shape().q());
    }
    if let Ok(m) = greedy_peel(s) {
        debug_assert!(verify(&m, s).unwrap_or(false));
        debug_assert!(is_symmetric(&m));
        return Ok(m);
    }
    let budget = SearchBudget {
        symmetric: true,
        ..SearchBudget::default()
    };
    match solve(s, &budget)? {
        Some(m) => Ok(m),
        None => Err(Error::SymmetricUnrealizable(format!(
            "no symmetric realization on the cube [{}]^{}",
            s.shape().extent(1),
            s.shape().d()
        ))),
    }
}

fn greedy_peel(s: &LineSumArray) -> Result<Tensor> {
    let shape = s.shape().clone();
    let d = shape.d();
    let q = shape.q();
    let n = shape.extent(1);
    if n == 1 {
        return Tensor::from_entries(shape, vec![s.axis_sums(1)[0] as u32]);
    }

    let (target, lo, hi) = slice_target(s)?;
    let m1 = slice_realization(&target, &lo, &hi)?;

    // uniform reduction on the core cube: every interior line loses exactly
    // its one border cell, whose value the orbit rule pins to M1
    let core_shape = Shape::new(vec![n - 1; d], q)?;
    let mut core_sums = Vec::with_capacity(d);
    for j in 1..=d {
        let dims = core_shape.reduced_dims(j);
        let count = core_shape.line_count(j);
        let axis: Vec<u64> = (0..count)
            .map(|f| {
                let reduced = crate::tensor::coords_in(&dims, f);
                let line = crate::tensor::LineId::new(j, reduced.clone());
                let border = m1.get(&reduced) as u64;
                s.sum(&line) - border
            })
            .collect();
        core_sums.push(axis);
    }
    let core_s = LineSumArray::new(core_shape, core_sums)?;
    if !compatible(&core_s).is_compatible() {
        return Err(Error::Internal {
            code: "reduced-incompatible",
            msg: "uniform border reduction left an incompatible core".into(),
        });
    }
    let core = build_symmetric(&core_s)?;

    // assemble: core cells verbatim, border cells by dropping one n
    let mut entries = vec![0u32; shape.cells()];
    for (f, coords) in shape.iter_coords().enumerate() {
        entries[f] = if coords.iter().all(|&c| c < n) {
            core.get(&coords)
        } else {
            let pos = coords.iter().position(|&c| c == n).unwrap();
            let mut rest = coords.clone();
            rest.remove(pos);
            m1.get(&rest)
        };
    }
    let m = Tensor::from_entries(shape, entries)?;
    // lines inside the border are not controlled by the reduction; check them
    if !verify(&m, s)? {
        return Err(Error::Internal {
            code: "border-consistency",
            msg: "assembled border does not meet the prescribed sums".into(),
        });
    }
    Ok(m)
}

fn within_box(m: &Tensor, lo: &[u32], hi: &[u32]) -> bool {
    m.entries()
        .iter()
        .zip(lo.iter().zip(hi))
        .all(|(&e, (&l, &h))| l <= e && e <= h)
}

/// Symmetric realization of the border slice, forced into the per-cell box
/// that keeps the core lines feasible.
fn slice_realization(target: &LineSumArray, lo: &[u32], hi: &[u32]) -> Result<Tensor> {
    if check_symmetric(target) && compatible(target).is_compatible() {
        if let Ok(m) = build_symmetric(target) {
            if within_box(&m, lo, hi) {
                return Ok(m);
            }
            if let Ok(m) = symmetric_switch_repair(&m, lo, hi) {
                return Ok(m);
            }
        }
    }
    let budget = SearchBudget {
        symmetric: true,
        entry_bounds: Some(lo.iter().copied().zip(hi.iter().copied()).collect()),
        ..SearchBudget::default()
    };
    match solve(target, &budget)? {
        Some(m) => Ok(m),
        None => Err(Error::Internal {
            code: "border-slice",
            msg: "no symmetric slice realization fits the core box".into(),
        }),
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..k).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(k, &mut items, &mut out);
    out
}

/// Move a symmetric tensor into the per-cell box `[lo, hi]` without changing
/// any line sum or breaking symmetry, by applying whole orbits of
/// alternating-sign hypercube switches. Fails with `RepairExhausted` when no
/// orbit move strictly reduces the total box violation.
pub fn symmetric_switch_repair(m1: &Tensor, lo: &[u32], hi: &[u32]) -> Result<Tensor> {
    let shape = m1.shape().clone();
    let k = shape.d();
    let cells = shape.cells();
    if lo.len() != cells || hi.len() != cells {
        return Err(Error::Input("box bounds must match the cell count".into()));
    }
    let q1 = shape.q() - 1;
    let perms = permutations(k);
    let violation = |entries: &[u32]| -> u64 {
        entries
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(&e, (&l, &h))| (l.saturating_sub(e) + e.saturating_sub(h)) as u64)
            .sum()
    };

    let mut entries = m1.entries().to_vec();
    let mut current = violation(&entries);
    let max_iter = cells * shape.q() as usize;
    for _ in 0..max_iter {
        if current == 0 {
            return Tensor::from_entries(shape, entries);
        }
        let mut applied = false;
        'pairs: for x in 0..cells {
            let xc = shape.coords(x);
            for y in 0..cells {
                let yc = shape.coords(y);
                if xc.iter().zip(&yc).any(|(a, b)| a == b) {
                    continue;
                }
                for dir in [1i64, -1i64] {
                    // orbit of the switch on (x, y): distinct permuted corner
                    // pairs, their corner deltas merged per cell
                    let mut deltas: HashMap<usize, i64> = HashMap::new();
                    let mut seen: HashSet<(Vec<usize>, Vec<usize>)> = HashSet::new();
                    for p in &perms {
                        let px: Vec<usize> = p.iter().map(|&a| xc[a]).collect();
                        let py: Vec<usize> = p.iter().map(|&a| yc[a]).collect();
                        if !seen.insert((px.clone(), py.clone())) {
                            continue;
                        }
                        for mask in 0u32..(1 << k) {
                            let corner: Vec<usize> = (0..k)
                                .map(|a| if mask >> a & 1 == 1 { py[a] } else { px[a] })
                                .collect();
                            let sign = if mask.count_ones() % 2 == 0 {
                                dir
                            } else {
                                -dir
                            };
                            *deltas.entry(shape.flat(&corner)).or_insert(0) += sign;
                        }
                    }
                    let ok = deltas.iter().all(|(&f, &dl)| {
                        let v = entries[f] as i64 + dl;
                        (0..=q1 as i64).contains(&v)
                    });
                    if !ok {
                        continue;
                    }
                    let mut trial = entries.clone();
                    for (&f, &dl) in &deltas {
                        trial[f] = (trial[f] as i64 + dl) as u32;
                    }
                    let after = violation(&trial);
                    if after < current {
                        entries = trial;
                        current = after;
                        applied = true;
                        break 'pairs;
                    }
                }
            }
        }
        if !applied {
            break;
        }
    }
    if current == 0 {
        Tensor::from_entries(shape, entries)
    } else {
        Err(Error::RepairExhausted(max_iter))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(n: usize, d: usize, q: u32) -> Shape {
        Shape::new(vec![n; d], q).unwrap()
    }

    fn sym_tensor(shape: Shape, rep: impl Fn(&[usize]) -> u32) -> Tensor {
        let entries = shape
            .iter_coords()
            .map(|c| {
                let mut s = c.clone();
                s.sort_unstable();
                rep(&s)
            })
            .collect();
        Tensor::from_entries(shape, entries).unwrap()
    }

    #[test]
    fn profile_round_trip() {
        let m = sym_tensor(cube(3, 3, 2), |s| (s[0] == s[2]) as u32);
        assert!(is_symmetric(&m));
        let s = LineSumArray::from_tensor(&m);
        assert!(check_symmetric(&s));
        let p = SymmetricProfile::from_array(&s).unwrap();
        assert_eq!(p.expand(), s);
    }

    #[test]
    fn asymmetric_arrays_are_rejected() {
        let shape = cube(2, 2, 2);
        let s = LineSumArray::new(shape, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert!(!check_symmetric(&s));
        assert!(matches!(build_symmetric(&s), Err(Error::Input(_))));
        // non-cube
        let shape = Shape::new(vec![2, 3], 2).unwrap();
        let s = LineSumArray::new(shape, vec![vec![1, 1, 0], vec![1, 1]]).unwrap();
        assert!(!check_symmetric(&s));
    }

    #[test]
    fn two_dim_examples() {
        let m = build_symmetric_2d(&[2, 2, 2], 2).unwrap();
        assert!(is_symmetric(&m));
        let s = two_dim_instance(&[2, 2, 2], 2).unwrap();
        assert!(verify(&m, &s).unwrap());

        let m = build_symmetric_2d(&[3, 2, 1], 3).unwrap();
        assert!(is_symmetric(&m));
        assert!(verify(&m, &two_dim_instance(&[3, 2, 1], 3).unwrap()).unwrap());

        // single cell carries its sum directly
        let m = build_symmetric_2d(&[2], 3).unwrap();
        assert_eq!(m.entries(), &[2]);

        // a + b = 3 and b + c = 1 with b <= 2 pins the matrix
        let m = build_symmetric_2d(&[3, 1], 3).unwrap();
        assert_eq!(m.entries(), &[2, 1, 1, 0]);

        // incompatible row sums surface the witness
        assert!(matches!(
            build_symmetric_2d(&[2, 0], 2),
            Err(Error::NotRealizable(_))
        ));
    }

    #[test]
    fn greedy_prefers_largest_rows() {
        // peeling r=(2,1,1): the border unit for row 3 goes to row 1
        let m = greedy_2d(&[2, 1, 1], 2).unwrap();
        assert_eq!(m.get(&[1, 3]), 1);
        assert_eq!(m.get(&[3, 1]), 1);
        assert_eq!(m.get(&[2, 3]), 0);
    }

    #[test]
    fn three_dim_round_trips() {
        for (n, q) in [(2usize, 2u32), (2, 3), (3, 2)] {
            let m = sym_tensor(cube(n, 3, q), |s| ((s[0] + 2 * s[1] + s[2]) as u32) % q);
            let s = LineSumArray::from_tensor(&m);
            let built = build_symmetric(&s).unwrap();
            assert!(is_symmetric(&built), "n={n} q={q}");
            assert!(verify(&built, &s).unwrap(), "n={n} q={q}");
        }
    }

    #[test]
    fn four_dim_round_trip() {
        let m = sym_tensor(cube(2, 4, 2), |s| (s.iter().sum::<usize>() % 2) as u32);
        let s = LineSumArray::from_tensor(&m);
        let built = build_symmetric(&s).unwrap();
        assert!(is_symmetric(&built));
        assert!(verify(&built, &s).unwrap());
    }

    #[test]
    fn repair_moves_into_the_box() {
        // symmetric 2x2 matrix [[1,0],[0,1]]; box demands the antidiagonal
        let m = sym_tensor(cube(2, 2, 2), |s| (s[0] == s[1]) as u32);
        let lo = vec![0, 0, 0, 0];
        let hi = vec![0, 1, 1, 1];
        let fixed = symmetric_switch_repair(&m, &lo, &hi).unwrap();
        assert_eq!(fixed.entries(), &[0, 1, 1, 0]);
        assert!(is_symmetric(&fixed));

        // already inside: untouched
        let same = symmetric_switch_repair(&fixed, &lo, &hi).unwrap();
        assert_eq!(same.entries(), fixed.entries());

        // impossible box: exhausts
        let lo_bad = vec![1, 1, 1, 1];
        let hi_bad = vec![1, 0, 0, 1];
        assert!(matches!(
            symmetric_switch_repair(&m, &lo_bad, &hi_bad),
            Err(Error::RepairExhausted(_))
        ));
    }

    #[test]
    fn build_agrees_with_symmetric_oracle() {
        // exhaustive referee at n=2, d=3, q=2 over all symmetric structural
        // arrays
        let shape = cube(2, 3, 2);
        crate::oracle::for_each_structural(&shape, |s| {
            if !check_symmetric(s) {
                return;
            }
            let budget = SearchBudget {
                symmetric: true,
                ..SearchBudget::default()
            };
            let oracle_says = solve(s, &budget).unwrap().is_some();
            match build_symmetric(s) {
                Ok(m) => {
                    assert!(oracle_says);
                    assert!(is_symmetric(&m));
                    assert!(verify(&m, s).unwrap());
                }
                Err(Error::NotRealizable(_)) | Err(Error::SymmetricUnrealizable(_)) => {
                    assert!(!oracle_says)
                }
                Err(e) => panic!("unexpected error: {e}"),
            }
        })
        .unwrap();
    }
}
