//! Uniform grid of basis-function centers in normalized coordinates.
//!
//! Linear indices are row-major (the last axis varies fastest). Support-set
//! queries intersect per-axis integer ranges, so their cost is proportional
//! to the size of the result rather than to the number of centers.

use crate::error::{Error, Result};

/// Largest grid the trainer can address: pair keys pack two indices into 64 bits.
pub const MAX_GRID_LEN: usize = u32::MAX as usize;

#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    lower: Vec<f64>,
    spacing: f64,
    counts: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

/// Work done by one support-set query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SupportStats {
    /// Per-axis center coordinates tested against the radius.
    pub axis_checks: usize,
    /// Grid centers enumerated while assembling the result.
    pub centers_visited: usize,
}

impl UniformGrid {
    pub fn new(lower: Vec<f64>, spacing: f64, counts: Vec<usize>) -> Result<Self> {
        if lower.is_empty() || lower.len() != counts.len() {
            return Err(Error::GridSize(format!(
                "lower corner has {} axes, counts has {}",
                lower.len(),
                counts.len()
            )));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::GridSize(format!("spacing must be positive, got {spacing}")));
        }
        if lower.iter().any(|v| !v.is_finite()) {
            return Err(Error::GridSize("lower corner must be finite".into()));
        }
        let mut len = 1usize;
        for &c in &counts {
            if c == 0 {
                return Err(Error::GridSize("every axis needs at least one center".into()));
            }
            len = len
                .checked_mul(c)
                .filter(|&l| l <= MAX_GRID_LEN)
                .ok_or_else(|| Error::GridSize(format!("grid with counts {counts:?} exceeds {MAX_GRID_LEN} centers")))?;
        }
        let mut strides = vec![1usize; counts.len()];
        for k in (0..counts.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * counts[k + 1];
        }
        Ok(UniformGrid { lower, spacing, counts, strides, len })
    }

    /// Smallest-corner-anchored grid covering `[min - margin, max + margin]`
    /// on every axis, with `floor(span / spacing) + 1` centers per axis.
    /// Bounds, spacing and margin are in normalized coordinates.
    pub fn covering(bounds: &[(f64, f64)], spacing: f64, margin: f64, max_len: usize) -> Result<Self> {
        if !(margin.is_finite() && margin >= 0.0) {
            return Err(Error::GridSize(format!("margin must be non-negative, got {margin}")));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::GridSize(format!("spacing must be positive, got {spacing}")));
        }
        let mut lower = Vec::with_capacity(bounds.len());
        let mut counts = Vec::with_capacity(bounds.len());
        let mut total = 1f64;
        for (k, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::GridSize(format!("axis {k}: bounds [{lo}, {hi}] must satisfy max > min")));
            }
            let span = (hi + margin) - (lo - margin);
            // tolerate spans that are an exact multiple of the spacing up to rounding
            let n = (span / spacing + 1e-9).floor() + 1.0;
            total *= n;
            lower.push(lo - margin);
            counts.push(n as usize);
        }
        let cap = max_len.min(MAX_GRID_LEN);
        if total > cap as f64 {
            return Err(Error::GridSize(format!(
                "grid would hold {total:.0} centers (counts {counts:?}), cap is {cap}"
            )));
        }
        Self::new(lower, spacing, counts)
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Total number of centers `m`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Largest extent of the grid along any axis.
    pub fn extent(&self) -> f64 {
        self.counts.iter().map(|&c| (c - 1) as f64 * self.spacing).fold(0.0, f64::max)
    }

    /// Coordinate of center `i` along `axis`. Every center coordinate in the
    /// crate is computed through this one expression.
    #[inline]
    pub fn axis_center(&self, axis: usize, i: usize) -> f64 {
        self.lower[axis] + i as f64 * self.spacing
    }

    pub fn coords_of(&self, j: usize) -> Result<Vec<usize>> {
        if j >= self.len {
            return Err(Error::InvalidArgument(format!("index {j} out of range for grid of {} centers", self.len)));
        }
        Ok(self.strides.iter().zip(&self.counts).map(|(&s, &c)| (j / s) % c).collect())
    }

    pub fn index_of(&self, coords: &[usize]) -> Result<usize> {
        if coords.len() != self.dim() || coords.iter().zip(&self.counts).any(|(&i, &c)| i >= c) {
            return Err(Error::InvalidArgument(format!("coords {coords:?} out of range for counts {:?}", self.counts)));
        }
        Ok(coords.iter().zip(&self.strides).map(|(i, s)| i * s).sum())
    }

    /// Normalized position of center `j`.
    pub fn center_of(&self, j: usize) -> Result<Vec<f64>> {
        let c = self.coords_of(j)?;
        Ok(c.iter().enumerate().map(|(k, &i)| self.axis_center(k, i)).collect())
    }

    pub(crate) fn center_into(&self, j: usize, out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate().take(self.dim()) {
            *o = self.axis_center(k, (j / self.strides[k]) % self.counts[k]);
        }
    }

    /// Upper bound `(2 radius / spacing + 1)^d` on the size of any support set.
    pub fn support_bound(&self, radius: f64) -> f64 {
        (2.0 * radius / self.spacing + 1.0).powi(self.dim() as i32)
    }

    /// Ascending indices of all centers within sup-norm distance `radius` of
    /// the normalized point `x`. Empty when `x` is far outside the grid.
    pub fn support_set(&self, x: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.support_set_into(x, radius, &mut out, &mut Vec::new());
        out
    }

    /// [`support_set`](Self::support_set) together with its work counters.
    pub fn support_set_counted(&self, x: &[f64], radius: f64) -> (Vec<usize>, SupportStats) {
        let mut out = Vec::new();
        let stats = self.support_set_into(x, radius, &mut out, &mut Vec::new());
        (out, stats)
    }

    /// Allocation-free variant. `axes` is scratch space.
    pub(crate) fn support_set_into(
        &self,
        x: &[f64],
        radius: f64,
        out: &mut Vec<usize>,
        axes: &mut Vec<(usize, usize)>,
    ) -> SupportStats {
        debug_assert_eq!(x.len(), self.dim());
        out.clear();
        axes.clear();
        let mut stats = SupportStats::default();
        if !(radius >= 0.0) {
            return stats;
        }
        for (k, &xk) in x.iter().enumerate() {
            let last = self.counts[k] - 1;
            // candidate range padded by one on each side, then filtered with
            // the exact predicate so rounding cannot change membership
            let lo_f = ((xk - radius - self.lower[k]) / self.spacing).ceil() - 1.0;
            let hi_f = ((xk + radius - self.lower[k]) / self.spacing).floor() + 1.0;
            if !(hi_f >= 0.0 && lo_f <= last as f64) {
                return stats;
            }
            let lo = lo_f.max(0.0) as usize;
            let hi = (hi_f as usize).min(last);
            let mut first = None;
            let mut end = lo;
            for i in lo..=hi {
                stats.axis_checks += 1;
                if (self.axis_center(k, i) - xk).abs() <= radius {
                    first.get_or_insert(i);
                    end = i + 1;
                }
            }
            match first {
                Some(f) => axes.push((f, end)),
                None => return stats,
            }
        }

        // odometer over the per-axis ranges, last axis fastest => ascending order
        let d = self.dim();
        let mut cursor: Vec<usize> = axes.iter().map(|r| r.0).collect();
        loop {
            stats.centers_visited += 1;
            out.push(cursor.iter().zip(&self.strides).map(|(i, s)| i * s).sum());
            let mut k = d;
            loop {
                if k == 0 {
                    return stats;
                }
                k -= 1;
                cursor[k] += 1;
                if cursor[k] < axes[k].1 {
                    break;
                }
                cursor[k] = axes[k].0;
            }
        }
    }
}
