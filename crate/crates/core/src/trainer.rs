//! Information-form training over grid-placed finite-support basis functions.
//!
//! The trained system is the information vector `iota = Phi(x) y` and the
//! information matrix `I = Phi(x) Phi(x)^T` summed over all measurements.
//! Each measurement contributes only to the basis functions whose support
//! covers it, so one update costs `O(|S|^2)` regardless of grid size.
//! Both quantities are plain sums, which makes states from disjoint shards
//! of a dataset mergeable by entrywise addition.

use nalgebra::{DMatrix, DVector};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::kernel::{basis_normalized, HyperParams};

#[inline]
fn pair_key(i: usize, j: usize) -> u64 {
    debug_assert!(i <= j);
    ((i as u64) << 32) | j as u64
}

#[inline]
fn unpack(key: u64) -> (usize, usize) {
    ((key >> 32) as usize, (key & 0xFFFF_FFFF) as usize)
}

/// Read access to a trained (or empty) information system.
pub trait InformationView: Sync {
    fn grid(&self) -> &UniformGrid;
    fn hyper(&self) -> &HyperParams;
    /// Dataset mean that was subtracted from the targets before training.
    fn y_mean(&self) -> f64;
    fn n_measurements(&self) -> u64;
    /// Entry `j` of the information vector; 0 when never touched.
    fn iota_at(&self, j: usize) -> f64;
    /// Entry `(i, j)` of the symmetric information matrix; 0 when never touched.
    fn imat_at(&self, i: usize, j: usize) -> f64;

    /// Writes the information matrix restricted to the ascending index list
    /// `subset` into `out` (resized to `|subset| x |subset|`).
    fn gather_imat(&self, subset: &[usize], out: &mut DMatrix<f64>) {
        let n = subset.len();
        *out = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in a..n {
                let v = self.imat_at(subset[a], subset[b]);
                out[(a, b)] = v;
                out[(b, a)] = v;
            }
        }
    }

    fn gather_iota(&self, subset: &[usize]) -> DVector<f64> {
        DVector::from_iterator(subset.len(), subset.iter().map(|&j| self.iota_at(j)))
    }
}

#[derive(Debug, Clone, Default)]
struct Compensation {
    iota: FxHashMap<u32, f64>,
    imat: FxHashMap<u64, f64>,
}

#[derive(Debug, Clone, Default)]
struct Scratch {
    xn: Vec<f64>,
    support: Vec<usize>,
    axes: Vec<(usize, usize)>,
    phi: Vec<f64>,
    center: Vec<f64>,
}

/// Neumaier-compensated `sum += v`.
#[inline]
fn add_compensated(sum: &mut f64, comp: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *comp += (*sum - t) + v;
    } else {
        *comp += (v - t) + *sum;
    }
    *sum = t;
}

/// Sparse information vector and upper-triangular information matrix,
/// accumulated one measurement at a time.
#[derive(Debug, Clone)]
pub struct InformationState {
    grid: UniformGrid,
    hp: HyperParams,
    y_mean: f64,
    n_measurements: u64,
    iota: FxHashMap<u32, f64>,
    imat: FxHashMap<u64, f64>,
    comp: Option<Compensation>,
    scratch: Scratch,
}

impl InformationState {
    /// Zero-information state. Targets passed to [`update`](Self::update)
    /// must already have `y_mean` subtracted.
    pub fn new(grid: UniformGrid, hp: HyperParams, y_mean: f64) -> Self {
        assert_eq!(grid.dim(), hp.dim(), "grid and hyperparameters disagree on dimension");
        InformationState {
            grid,
            hp,
            y_mean,
            n_measurements: 0,
            iota: FxHashMap::default(),
            imat: FxHashMap::default(),
            comp: None,
            scratch: Scratch::default(),
        }
    }

    /// Like [`new`](Self::new), with compensated (Neumaier) summation of every entry.
    pub fn with_compensation(grid: UniformGrid, hp: HyperParams, y_mean: f64) -> Self {
        let mut s = Self::new(grid, hp, y_mean);
        s.comp = Some(Compensation::default());
        s
    }

    pub fn is_compensated(&self) -> bool {
        self.comp.is_some()
    }

    /// Adds one measurement `(x, y)` with `x` in raw input coordinates.
    pub fn update(&mut self, x: &[f64], y: f64) -> Result<()> {
        self.hp.check_dim(x)?;
        if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("measurement contains non-finite values".into()));
        }
        let sc = &mut self.scratch;
        self.hp.normalize_into(x, &mut sc.xn);
        self.grid.support_set_into(&sc.xn, self.hp.r(), &mut sc.support, &mut sc.axes);
        if sc.support.is_empty() {
            return Err(Error::OutsideGrid { row: 0 });
        }
        sc.center.resize(self.grid.dim(), 0.0);
        sc.phi.clear();
        for &j in &sc.support {
            self.grid.center_into(j, &mut sc.center);
            sc.phi.push(basis_normalized(&sc.center, &sc.xn, &self.hp));
        }

        let s = &sc.support;
        let phi = &sc.phi;
        match &mut self.comp {
            None => {
                for (a, &ja) in s.iter().enumerate() {
                    let pa = phi[a];
                    let v = pa * y;
                    if v != 0.0 {
                        *self.iota.entry(ja as u32).or_insert(0.0) += v;
                    }
                    for b in a..s.len() {
                        let v = pa * phi[b];
                        if v != 0.0 {
                            *self.imat.entry(pair_key(ja, s[b])).or_insert(0.0) += v;
                        }
                    }
                }
            }
            Some(c) => {
                for (a, &ja) in s.iter().enumerate() {
                    let pa = phi[a];
                    let v = pa * y;
                    if v != 0.0 {
                        add_compensated(
                            self.iota.entry(ja as u32).or_insert(0.0),
                            c.iota.entry(ja as u32).or_insert(0.0),
                            v,
                        );
                    }
                    for b in a..s.len() {
                        let v = pa * phi[b];
                        if v != 0.0 {
                            let k = pair_key(ja, s[b]);
                            add_compensated(self.imat.entry(k).or_insert(0.0), c.imat.entry(k).or_insert(0.0), v);
                        }
                    }
                }
            }
        }
        self.n_measurements += 1;
        Ok(())
    }

    /// Sequential updates over `(x, y)` pairs. On error the rows before the
    /// offending one remain applied; the error carries its zero-based row.
    pub fn train_iter<'a, I>(&mut self, rows: I) -> Result<()>
    where
        I: IntoIterator<Item = (&'a [f64], f64)>,
    {
        for (row, (x, y)) in rows.into_iter().enumerate() {
            self.update(x, y).map_err(|e| match e {
                Error::OutsideGrid { .. } => Error::OutsideGrid { row },
                Error::InvalidArgument(msg) => Error::InvalidArgument(format!("row {row}: {msg}")),
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn train_batch<P: AsRef<[f64]>>(&mut self, xs: &[P], ys: &[f64]) -> Result<()> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidArgument(format!("{} inputs but {} targets", xs.len(), ys.len())));
        }
        self.train_iter(xs.iter().map(|x| x.as_ref()).zip(ys.iter().copied()))
    }

    /// Entrywise sum of two states trained on disjoint data with the same
    /// grid, hyperparameters and subtracted mean.
    pub fn merge(mut self, other: &InformationState) -> Result<InformationState> {
        if self.grid != other.grid {
            return Err(Error::IncompatibleState("grids differ".into()));
        }
        if self.hp != other.hp {
            return Err(Error::IncompatibleState("hyperparameters differ".into()));
        }
        if self.y_mean.to_bits() != other.y_mean.to_bits() {
            return Err(Error::IncompatibleState(format!(
                "subtracted means differ ({} vs {})",
                self.y_mean, other.y_mean
            )));
        }
        match &mut self.comp {
            None => {
                for &k in other.iota.keys() {
                    *self.iota.entry(k).or_insert(0.0) += other.iota_folded(k);
                }
                for &k in other.imat.keys() {
                    *self.imat.entry(k).or_insert(0.0) += other.imat_folded(k);
                }
            }
            Some(c) => {
                for &k in other.iota.keys() {
                    let v = other.iota_folded(k);
                    add_compensated(self.iota.entry(k).or_insert(0.0), c.iota.entry(k).or_insert(0.0), v);
                }
                for &k in other.imat.keys() {
                    let v = other.imat_folded(k);
                    add_compensated(self.imat.entry(k).or_insert(0.0), c.imat.entry(k).or_insert(0.0), v);
                }
            }
        }
        self.n_measurements += other.n_measurements;
        Ok(self)
    }

    #[inline]
    fn iota_folded(&self, k: u32) -> f64 {
        let v = self.iota.get(&k).copied().unwrap_or(0.0);
        match &self.comp {
            Some(c) => v + c.iota.get(&k).copied().unwrap_or(0.0),
            None => v,
        }
    }

    #[inline]
    fn imat_folded(&self, k: u64) -> f64 {
        let v = self.imat.get(&k).copied().unwrap_or(0.0);
        match &self.comp {
            Some(c) => v + c.imat.get(&k).copied().unwrap_or(0.0),
            None => v,
        }
    }

    pub fn iota_nnz(&self) -> usize {
        self.iota.len()
    }

    /// Stored upper-triangular entries of the information matrix.
    pub fn imat_nnz(&self) -> usize {
        self.imat.len()
    }

    /// `(index, value)` pairs sorted by index.
    pub fn iota_entries(&self) -> Vec<(usize, f64)> {
        let mut v: Vec<(usize, f64)> = self.iota.keys().map(|&k| (k as usize, self.iota_folded(k))).collect();
        v.sort_unstable_by_key(|e| e.0);
        v
    }

    /// Upper-triangular `(i, j, value)` triples with `i <= j`, sorted lexicographically.
    pub fn imat_entries(&self) -> Vec<(usize, usize, f64)> {
        let mut keys: Vec<u64> = self.imat.keys().copied().collect();
        keys.sort_unstable();
        keys.into_iter()
            .map(|k| {
                let (i, j) = unpack(k);
                (i, j, self.imat_folded(k))
            })
            .collect()
    }

    /// Rebuilds a state from stored entries, validating indices and ordering.
    pub fn from_parts(
        grid: UniformGrid,
        hp: HyperParams,
        y_mean: f64,
        n_measurements: u64,
        iota: &[(usize, f64)],
        imat: &[(usize, usize, f64)],
    ) -> Result<Self> {
        if grid.dim() != hp.dim() {
            return Err(Error::Format("grid and hyperparameters disagree on dimension".into()));
        }
        let m = grid.len();
        let mut s = Self::new(grid, hp, y_mean);
        s.n_measurements = n_measurements;
        s.iota.reserve(iota.len());
        for &(j, v) in iota {
            if j >= m {
                return Err(Error::Format(format!("iota index {j} out of range ({m} centers)")));
            }
            if s.iota.insert(j as u32, v).is_some() {
                return Err(Error::Format(format!("duplicate iota index {j}")));
            }
        }
        s.imat.reserve(imat.len());
        for &(i, j, v) in imat {
            if i > j || j >= m {
                return Err(Error::Format(format!("invalid information-matrix entry ({i}, {j})")));
            }
            if s.imat.insert(pair_key(i, j), v).is_some() {
                return Err(Error::Format(format!("duplicate information-matrix entry ({i}, {j})")));
            }
        }
        Ok(s)
    }

    /// Dense information vector over all `m` centers. Test and oracle use only.
    pub fn dense_iota(&self) -> DVector<f64> {
        DVector::from_fn(self.grid.len(), |j, _| self.iota_at(j))
    }

    /// Dense symmetric information matrix over all `m` centers. Test and oracle use only.
    pub fn dense_imat(&self) -> DMatrix<f64> {
        let m = self.grid.len();
        let mut out = DMatrix::zeros(m, m);
        for (i, j, v) in self.imat_entries() {
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
        out
    }

    /// Freezes the state into sorted per-row adjacency for faster subset extraction.
    pub fn compact(&self) -> CompactInformation {
        let m = self.grid.len();
        let mut iota = vec![0.0; m];
        for (j, v) in self.iota_entries() {
            iota[j] = v;
        }
        let entries = self.imat_entries();
        let mut row_ptr = vec![0usize; m + 1];
        for &(i, _, _) in &entries {
            row_ptr[i + 1] += 1;
        }
        for i in 0..m {
            row_ptr[i + 1] += row_ptr[i];
        }
        let cols = entries.iter().map(|e| e.1 as u32).collect();
        let vals = entries.iter().map(|e| e.2).collect();
        CompactInformation {
            grid: self.grid.clone(),
            hp: self.hp.clone(),
            y_mean: self.y_mean,
            n_measurements: self.n_measurements,
            iota,
            row_ptr,
            cols,
            vals,
        }
    }
}

impl InformationView for InformationState {
    fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    fn hyper(&self) -> &HyperParams {
        &self.hp
    }

    fn y_mean(&self) -> f64 {
        self.y_mean
    }

    fn n_measurements(&self) -> u64 {
        self.n_measurements
    }

    fn iota_at(&self, j: usize) -> f64 {
        self.iota_folded(j as u32)
    }

    fn imat_at(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.imat_folded(pair_key(a, b))
    }
}

/// Immutable, row-compressed copy of a trained state. Each row keeps its
/// upper-triangular columns in ascending order.
#[derive(Debug, Clone)]
pub struct CompactInformation {
    grid: UniformGrid,
    hp: HyperParams,
    y_mean: f64,
    n_measurements: u64,
    iota: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl CompactInformation {
    pub fn imat_nnz(&self) -> usize {
        self.vals.len()
    }

    fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.cols[s..e], &self.vals[s..e])
    }
}

impl InformationView for CompactInformation {
    fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    fn hyper(&self) -> &HyperParams {
        &self.hp
    }

    fn y_mean(&self) -> f64 {
        self.y_mean
    }

    fn n_measurements(&self) -> u64 {
        self.n_measurements
    }

    fn iota_at(&self, j: usize) -> f64 {
        self.iota[j]
    }

    fn imat_at(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        let (cols, vals) = self.row(a);
        match cols.binary_search(&(b as u32)) {
            Ok(p) => vals[p],
            Err(_) => 0.0,
        }
    }

    fn gather_imat(&self, subset: &[usize], out: &mut DMatrix<f64>) {
        let n = subset.len();
        *out = DMatrix::zeros(n, n);
        for a in 0..n {
            let (cols, vals) = self.row(subset[a]);
            // merge-join the sorted row with the sorted subset tail, skipping ahead by bisection
            let mut p = cols.partition_point(|&c| (c as usize) < subset[a]);
            let mut b = a;
            while p < cols.len() && b < n {
                let c = cols[p] as usize;
                match c.cmp(&subset[b]) {
                    std::cmp::Ordering::Less => p += cols[p..].partition_point(|&c| (c as usize) < subset[b]),
                    std::cmp::Ordering::Greater => b += 1,
                    std::cmp::Ordering::Equal => {
                        out[(a, b)] = vals[p];
                        out[(b, a)] = vals[p];
                        p += 1;
                        b += 1;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::basis_eval;
    use proptest::prelude::*;

    fn line_state(n_centers: usize, r: f64) -> InformationState {
        let hp = HyperParams::new(1.0, vec![1.0], 0.1, r, r / 2.0).unwrap();
        let grid = UniformGrid::new(vec![0.0], 1.0, vec![n_centers]).unwrap();
        InformationState::new(grid, hp, 0.0)
    }

    /// Dense `Phi(x) y` and `Phi(x) Phi(x)^T` built from every basis function.
    fn dense_oracle(state: &InformationState, xs: &[Vec<f64>], ys: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let m = state.grid().len();
        let phi = DMatrix::from_fn(m, xs.len(), |j, t| basis_eval(j, &xs[t], state.grid(), state.hyper()).unwrap());
        let y = DVector::from_column_slice(ys);
        (&phi * y, &phi * phi.transpose())
    }

    fn assert_close_rel(a: f64, b: f64, tol: f64) {
        let scale = a.abs().max(b.abs());
        assert!((a - b).abs() <= tol * scale.max(f64::MIN_POSITIVE), "{a} vs {b}");
    }

    #[test]
    fn single_update_example() {
        let mut s = line_state(4, 1.0);
        s.update(&[1.5], 2.0).unwrap();
        let phi = (-0.125f64).exp();
        assert!((phi - 0.882_497).abs() < 1e-6);
        assert_eq!(s.iota_entries().iter().map(|e| e.0).collect::<Vec<_>>(), vec![1, 2]);
        assert_close_rel(s.iota_at(1), 2.0 * phi, 1e-15);
        assert_close_rel(s.iota_at(2), 1.764_994, 1e-6);
        for (i, j) in [(1, 1), (1, 2), (2, 2)] {
            assert_close_rel(s.imat_at(i, j), 0.778_801, 1e-6);
        }
        assert_eq!(s.imat_at(2, 1), s.imat_at(1, 2));
        assert_eq!(s.imat_nnz(), 3);
        assert_eq!(s.imat_at(0, 0), 0.0);
        assert_eq!(s.imat_at(0, 3), 0.0);
        assert_eq!(s.n_measurements(), 1);
    }

    #[test]
    fn zero_target_leaves_iota_alone() {
        let mut s = line_state(4, 1.0);
        s.update(&[1.5], 2.0).unwrap();
        let before = s.iota_entries();
        let imat_before = s.imat_at(1, 2);
        s.update(&[1.5], 0.0).unwrap();
        assert_eq!(s.iota_entries(), before);
        assert_eq!(s.imat_at(1, 2), 2.0 * imat_before);
    }

    #[test]
    fn outside_grid_is_an_error() {
        let mut s = line_state(4, 1.0);
        assert!(matches!(s.update(&[10.0], 1.0), Err(Error::OutsideGrid { row: 0 })));
        let err = s.train_batch(&[[1.0], [2.0], [-5.0]], &[1.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::OutsideGrid { row: 2 }));
        assert_eq!(s.n_measurements(), 2);
        assert!(s.train_batch(&[[1.0]], &[]).is_err());
        assert!(s.update(&[f64::NAN], 1.0).is_err());
        assert!(s.update(&[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn sparse_matches_dense_oracle() {
        use rand::{rngs::StdRng, Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        let mut s = line_state(20, 2.5);
        let xs: Vec<Vec<f64>> = (0..100).map(|_| vec![rng.random_range(0.0..19.0)]).collect();
        let ys: Vec<f64> = (0..100).map(|_| rng.random_range(-2.0..2.0)).collect();
        s.train_batch(&xs, &ys).unwrap();
        let (iota, imat) = dense_oracle(&s, &xs, &ys);
        let scale_i = iota.amax();
        let scale_m = imat.amax();
        assert!((s.dense_iota() - iota).amax() <= 1e-10 * scale_i);
        assert!((s.dense_imat() - &imat).amax() <= 1e-10 * scale_m);
        // band structure: centers further than 2r apart never interact
        for (i, j, _) in s.imat_entries() {
            assert!((j - i) as f64 <= 5.0);
        }
        let eig = s.dense_imat().symmetric_eigenvalues();
        assert!(eig.min() >= -1e-10 * scale_m);
    }

    #[test]
    fn batch_equals_sequential_and_doubles() {
        let xs = [[0.3], [1.7], [2.2], [2.9]];
        let ys = [1.0, -0.5, 0.25, 2.0];
        let mut a = line_state(5, 1.0);
        a.train_batch(&xs, &ys).unwrap();
        let mut b = line_state(5, 1.0);
        for (x, y) in xs.iter().zip(ys) {
            b.update(x, y).unwrap();
        }
        assert_eq!(a.iota_entries(), b.iota_entries());
        assert_eq!(a.imat_entries(), b.imat_entries());

        a.train_batch(&xs, &ys).unwrap();
        for ((i, v2), (_, v1)) in a.iota_entries().into_iter().zip(b.iota_entries()) {
            assert_close_rel(v2, 2.0 * v1, 1e-12);
            let _ = i;
        }
        for ((_, _, v2), (_, _, v1)) in a.imat_entries().into_iter().zip(b.imat_entries()) {
            assert_close_rel(v2, 2.0 * v1, 1e-12);
        }
    }

    #[test]
    fn merge_identity_and_errors() {
        let mut a = line_state(6, 1.0);
        a.train_batch(&[[1.2], [3.3]], &[1.0, 2.0]).unwrap();
        let empty = line_state(6, 1.0);
        let merged = a.clone().merge(&empty).unwrap();
        assert_eq!(merged.iota_entries(), a.iota_entries());
        assert_eq!(merged.imat_entries(), a.imat_entries());
        assert_eq!(empty.clone().merge(&empty).unwrap().imat_nnz(), 0);

        assert!(matches!(a.clone().merge(&line_state(7, 1.0)), Err(Error::IncompatibleState(_))));
        assert!(matches!(a.clone().merge(&line_state(6, 2.0)), Err(Error::IncompatibleState(_))));
        let shifted = InformationState::new(a.grid().clone(), a.hyper().clone(), 0.5);
        assert!(matches!(a.merge(&shifted), Err(Error::IncompatibleState(_))));
    }

    #[test]
    fn compensated_accumulation_agrees() {
        let xs: Vec<[f64; 1]> = (0..200).map(|i| [0.05 * i as f64]).collect();
        let ys: Vec<f64> = (0..200).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut plain = line_state(12, 1.0);
        plain.train_batch(&xs, &ys).unwrap();
        let mut comp = InformationState::with_compensation(plain.grid().clone(), plain.hyper().clone(), 0.0);
        comp.train_batch(&xs, &ys).unwrap();
        assert!(comp.is_compensated());
        for ((i, j, a), (_, _, b)) in plain.imat_entries().into_iter().zip(comp.imat_entries()) {
            assert!((a - b).abs() <= 1e-12 * a.abs(), "({i},{j})");
        }
        let merged = comp.clone().merge(&plain).unwrap();
        assert!((merged.imat_at(3, 4) - 2.0 * plain.imat_at(3, 4)).abs() < 1e-12);
    }

    #[test]
    fn compact_view_matches() {
        let hp = HyperParams::new(1.0, vec![1.0, 2.0], 0.1, 1.5, 0.75).unwrap();
        let grid = UniformGrid::new(vec![0.0, 0.0], 0.5, vec![9, 7]).unwrap();
        let mut s = InformationState::new(grid, hp, 0.0);
        for t in 0..60 {
            let x = [0.07 * t as f64, 0.11 * t as f64];
            s.update(&x, (t as f64).cos()).unwrap();
        }
        let c = s.compact();
        assert_eq!(c.imat_nnz(), s.imat_nnz());
        let subset: Vec<usize> = (0..s.grid().len()).step_by(3).collect();
        let mut a = DMatrix::zeros(0, 0);
        let mut b = DMatrix::zeros(0, 0);
        s.gather_imat(&subset, &mut a);
        c.gather_imat(&subset, &mut b);
        assert_eq!(a, b);
        for &j in &subset {
            assert_eq!(s.iota_at(j), c.iota_at(j));
            assert_eq!(s.imat_at(j, j), c.imat_at(j, j));
        }
    }

    proptest! {
        #[test]
        fn merge_equals_concatenated_training(
            pts in prop::collection::vec((0.0..9.0f64, -3.0..3.0f64), 2..60),
            split in 0usize..60,
        ) {
            let split = split % pts.len();
            let xs: Vec<[f64; 1]> = pts.iter().map(|p| [p.0]).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let mut whole = line_state(10, 2.0);
            whole.train_batch(&xs, &ys).unwrap();
            let mut a = line_state(10, 2.0);
            a.train_batch(&xs[..split], &ys[..split]).unwrap();
            let mut b = line_state(10, 2.0);
            b.train_batch(&xs[split..], &ys[split..]).unwrap();
            let ab = a.clone().merge(&b).unwrap();
            let ba = b.merge(&a).unwrap();
            prop_assert_eq!(ab.n_measurements(), whole.n_measurements());
            prop_assert_eq!(ab.iota_entries(), ba.iota_entries());
            prop_assert_eq!(ab.imat_entries(), ba.imat_entries());
            let scale = whole.dense_imat().amax().max(1e-300);
            prop_assert!((ab.dense_imat() - whole.dense_imat()).amax() <= 1e-10 * scale);
            let scale = whole.dense_iota().amax().max(1e-300);
            prop_assert!((ab.dense_iota() - whole.dense_iota()).amax() <= 1e-10 * scale);
        }
    }
}
