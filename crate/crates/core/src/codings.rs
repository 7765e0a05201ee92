//! Plane trees and their codings: Lukasiewicz path, height process and
//! contour function.
//!
//! Trees are stored as preorder degree sequences. All conversions are `O(ζ)`.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A finite plane tree given by the number of children of each vertex in
/// depth-first (lexicographic) order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    child_counts: Vec<usize>,
}

impl Tree {
    pub fn from_child_counts(child_counts: Vec<usize>) -> Result<Self> {
        if child_counts.is_empty() {
            return Err(Error::InvalidCoding("empty degree sequence".into()));
        }
        let mut w: i64 = 0;
        let last = child_counts.len() - 1;
        for (i, &k) in child_counts.iter().enumerate() {
            w += k as i64 - 1;
            if i < last && w < 0 {
                return Err(Error::InvalidCoding(format!(
                    "degree sequence exhausts the tree after {} of {} vertices",
                    i + 1,
                    child_counts.len()
                )));
            }
        }
        if w != -1 {
            return Err(Error::InvalidCoding(format!(
                "degree sequence leaves {} unvisited children",
                w + 1
            )));
        }
        Ok(Self { child_counts })
    }

    pub fn single_vertex() -> Self {
        Self { child_counts: vec![0] }
    }

    pub fn child_counts(&self) -> &[usize] {
        &self.child_counts
    }

    pub fn size(&self) -> usize {
        self.child_counts.len()
    }

    pub fn root_degree(&self) -> usize {
        self.child_counts[0]
    }

    pub fn into_child_counts(self) -> Vec<usize> {
        self.child_counts
    }
}

/// `W_0 = 0, ..., W_ζ = -1` with increments `k_i - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LukasiewiczPath {
    values: Vec<i64>,
}

impl LukasiewiczPath {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        if values.len() < 2 || values[0] != 0 {
            return Err(Error::InvalidCoding("path must start at 0 and have length >= 2".into()));
        }
        let last = values.len() - 1;
        if values[last] != -1 {
            return Err(Error::InvalidCoding(format!("path ends at {} instead of -1", values[last])));
        }
        for i in 0..last {
            if values[i + 1] - values[i] < -1 {
                return Err(Error::InvalidCoding(format!("increment below -1 at step {i}")));
            }
            if values[i] < 0 {
                return Err(Error::InvalidCoding(format!("path negative at time {i} < ζ")));
            }
        }
        Ok(Self { values })
    }

    /// Builds the path from increments without revalidating; callers
    /// guarantee the excursion property.
    pub(crate) fn from_increments_unchecked(increments: &[i64]) -> Self {
        let mut values = Vec::with_capacity(increments.len() + 1);
        let mut w = 0;
        values.push(0);
        for &x in increments {
            w += x;
            values.push(w);
        }
        Self { values }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Tree size ζ.
    pub fn size(&self) -> usize {
        self.values.len() - 1
    }

    /// `W_k`, padded with 0 for `k > ζ`.
    pub fn at(&self, k: usize) -> i64 {
        self.values.get(k).copied().unwrap_or(0)
    }
}

/// `H_0..H_{ζ-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightSeq {
    values: Vec<usize>,
}

impl HeightSeq {
    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `H_k`, padded with 0 for `k >= ζ`.
    pub fn at(&self, k: usize) -> usize {
        self.values.get(k).copied().unwrap_or(0)
    }

    /// Linear interpolation `(1-{t}) H_{⌊t⌋} + {t} H_{⌊t⌋+1}`.
    pub fn interpolate<T: Real>(&self, t: T) -> T {
        interpolate(t, |k| T::from_count(self.at(k)))
    }

    pub fn max(&self) -> usize {
        self.values.iter().copied().max().unwrap_or(0)
    }
}

/// `C_0..C_{2(ζ-1)}` at integer times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContourSeq {
    values: Vec<usize>,
}

impl ContourSeq {
    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// `2(ζ-1)`, the end of the non-trivial part of the contour.
    pub fn duration(&self) -> usize {
        self.values.len() - 1
    }

    /// `C_t` at integer times, with `C = 0` after `2(ζ-1)`.
    pub fn at(&self, t: usize) -> usize {
        self.values.get(t).copied().unwrap_or(0)
    }

    pub fn interpolate<T: Real>(&self, s: T) -> T {
        interpolate(s, |k| T::from_count(self.at(k)))
    }

    pub fn max(&self) -> usize {
        self.values.iter().copied().max().unwrap_or(0)
    }

    /// Number of returns to 0 strictly inside `(0, 2(ζ-1)]`, which equals
    /// the root degree.
    pub fn returns_to_zero(&self) -> usize {
        self.values.iter().skip(1).filter(|&&c| c == 0).count()
    }
}

fn interpolate<T: Real>(t: T, f: impl Fn(usize) -> T) -> T {
    if !(t > T::zero()) {
        return f(0);
    }
    let fl = t.floor();
    let k = fl.to_usize().unwrap_or(usize::MAX - 1);
    let frac = t - fl;
    if frac == T::zero() {
        f(k)
    } else {
        (T::one() - frac) * f(k) + frac * f(k + 1)
    }
}

pub fn walk_from_tree(tree: &Tree) -> LukasiewiczPath {
    let mut values = Vec::with_capacity(tree.size() + 1);
    let mut w = 0i64;
    values.push(0);
    for &k in tree.child_counts() {
        w += k as i64 - 1;
        values.push(w);
    }
    LukasiewiczPath { values }
}

pub fn tree_from_walk(walk: &LukasiewiczPath) -> Tree {
    let child_counts = walk.values.windows(2).map(|p| (p[1] - p[0] + 1) as usize).collect();
    Tree { child_counts }
}

/// `H_n = #{k < n : W_k = min_{k <= j <= n} W_j}` with an ancestor stack.
pub fn height_from_walk(walk: &LukasiewiczPath) -> HeightSeq {
    let w = &walk.values;
    let zeta = walk.size();
    let mut stack: Vec<i64> = Vec::new();
    let mut values = Vec::with_capacity(zeta);
    for &wk in &w[..zeta] {
        while stack.last().is_some_and(|&top| top > wk) {
            stack.pop();
        }
        values.push(stack.len());
        stack.push(wk);
    }
    HeightSeq { values }
}

/// Depths by direct depth-first traversal.
pub fn height_from_tree(tree: &Tree) -> HeightSeq {
    let mut pending: Vec<usize> = Vec::new();
    let mut values = Vec::with_capacity(tree.size());
    for &k in tree.child_counts() {
        values.push(pending.len());
        pending.push(k);
        while pending.last() == Some(&0) {
            pending.pop();
        }
        if let Some(top) = pending.last_mut() {
            *top -= 1;
        }
    }
    HeightSeq { values }
}

pub fn contour_from_heights(heights: &HeightSeq) -> ContourSeq {
    let h = heights.values();
    let zeta = h.len();
    let mut values = Vec::with_capacity(2 * zeta - 1);
    values.push(0);
    let mut c = 0usize;
    for p in 0..zeta {
        let next = if p + 1 < zeta { h[p + 1] } else { 0 };
        let bottom = if p + 1 < zeta { next - 1 } else { 0 };
        while c > bottom {
            c -= 1;
            values.push(c);
        }
        if p + 1 < zeta {
            c += 1;
            values.push(c);
        }
    }
    ContourSeq { values }
}

pub fn contour_from_tree(tree: &Tree) -> ContourSeq {
    contour_from_heights(&height_from_tree(tree))
}

/// `b_p = 2p - H_p` for `p < ζ` and `b_ζ = 2(ζ-1)`; `C_{b_p} = H_p`.
pub fn visit_times_from_heights(heights: &HeightSeq) -> Vec<usize> {
    let h = heights.values();
    let zeta = h.len();
    let mut b: Vec<usize> = h.iter().enumerate().map(|(p, &hp)| 2 * p - hp).collect();
    b.push(2 * (zeta - 1));
    b
}

pub fn visit_times(tree: &Tree) -> Vec<usize> {
    visit_times_from_heights(&height_from_tree(tree))
}

/// Borrowed view of one coding, for rescaling.
#[derive(Clone, Copy, Debug)]
pub enum PathRef<'a> {
    Walk(&'a LukasiewiczPath),
    Height(&'a HeightSeq),
    Contour(&'a ContourSeq),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodingKind {
    Walk,
    Height,
    Contour,
}

#[derive(Clone, Debug, Serialize)]
pub struct RescaledPath<T> {
    pub coding: CodingKind,
    pub n: usize,
    pub bn: T,
    /// Factor multiplying the raw values: `1/B_n` for the walk, `B_n/n` otherwise.
    pub scale: T,
    pub times: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> RescaledPath<T> {
    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn sup_distance(&self, other: &Self) -> Result<T> {
        if self.times.len() != other.times.len() {
            return Err(Error::InvalidParameter("paths on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["t", "value"])?;
        for (t, v) in self.times.iter().zip(&self.values) {
            w.write_record([t.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Walk `W_{⌊nt⌋} / B_n`, height `(B_n/n) H_{nt}` and contour
/// `(B_n/n) C_{2nt}` on a uniform grid of `grid_points` times in `[0,1]`.
pub fn rescale<T: Real>(path: PathRef<'_>, n: usize, bn: T, grid_points: usize) -> Result<RescaledPath<T>> {
    if grid_points < 2 {
        return Err(Error::InvalidParameter(format!("grid_points = {grid_points} < 2")));
    }
    if n == 0 || !(bn > T::zero()) {
        return Err(Error::InvalidParameter("rescaling needs n >= 1 and B_n > 0".into()));
    }
    let nn = T::from_count(n);
    let last = T::from_count(grid_points - 1);
    let times: Vec<T> = (0..grid_points).map(|i| T::from_count(i) / last).collect();
    let (coding, scale) = match path {
        PathRef::Walk(_) => (CodingKind::Walk, T::one() / bn),
        PathRef::Height(_) => (CodingKind::Height, bn / nn),
        PathRef::Contour(_) => (CodingKind::Contour, bn / nn),
    };
    let values = times
        .iter()
        .map(|&t| {
            let raw = match path {
                PathRef::Walk(w) => {
                    let k = (nn * t).floor().to_usize().unwrap_or(0);
                    T::from_int(w.at(k))
                }
                PathRef::Height(h) => h.interpolate(nn * t),
                PathRef::Contour(c) => c.interpolate(T::lit(2.0) * nn * t),
            };
            raw * scale
        })
        .collect();
    Ok(RescaledPath { coding, n, bn, scale, times, values })
}

/// CSV with columns `(index, W, H)`; `H` is empty at index ζ.
pub fn write_walk_height_csv(walk: &LukasiewiczPath, heights: &HeightSeq, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["index", "W", "H"])?;
    for (i, wv) in walk.values().iter().enumerate() {
        let h = heights.values().get(i).map(|h| h.to_string()).unwrap_or_default();
        w.write_record([i.to_string(), wv.to_string(), h])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV with columns `(time, C)`.
pub fn write_contour_csv(contour: &ContourSeq, path: &Path) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "time,C")?;
    for (t, c) in contour.values().iter().enumerate() {
        writeln!(file, "{t},{c}")?;
    }
    file.flush()?;
    Ok(())
}

/// All plane trees with `n` vertices, in lexicographic order of degree sequences.
pub fn all_trees(n: usize) -> Vec<Tree> {
    fn rec(n: usize, open: usize, seq: &mut Vec<usize>, out: &mut Vec<Tree>) {
        let placed = seq.len();
        if placed == n {
            if open == 0 {
                out.push(Tree { child_counts: seq.clone() });
            }
            return;
        }
        // `open` vertices still owed; the current vertex consumes one.
        let remaining_after = n - placed - 1;
        for k in 0..=remaining_after {
            let new_open = open - 1 + k;
            if new_open > remaining_after || (new_open == 0 && remaining_after > 0) {
                continue;
            }
            seq.push(k);
            rec(n, new_open, seq, out);
            seq.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(n, 1, &mut Vec::with_capacity(n), &mut out);
    }
    out
}
