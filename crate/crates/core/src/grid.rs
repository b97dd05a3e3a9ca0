//! Uniform tensor grids carrying extended-real samples.
//!
//! A `GridFunction` is implicitly `+∞` outside its box; that convention makes
//! indicator conjugates exact and is relied on by every transform here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// One uniform axis: `count` nodes from `min` to `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Axis> {
        if count < 2 {
            return Err(Error::BadAxis(count));
        }
        if !(min < max) {
            return Err(Error::Spec(format!(
                "axis needs min < max, got [{min}, {max}]"
            )));
        }
        Ok(Axis { min, max, count })
    }

    /// Symmetric axis `[-half, half]`.
    pub fn symmetric(half: f64, count: usize) -> Result<Axis> {
        Axis::new(-half, half, count)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i < self.count);
        // affine blend: exactly mirror-symmetric on symmetric axes, so even
        // inputs produce bit-exact even samples and conjugates
        let c = (self.count - 1) as f64;
        (self.min * (c - i as f64) + self.max * i as f64) / c
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        (self.min + self.max).abs() <= 1e-12 * self.max.abs().max(1.0)
    }
}

/// Grid file layout: header plus a flat row-major value array.
#[derive(Serialize, Deserialize)]
pub struct GridFile {
    pub dims: usize,
    pub axes: Vec<Axis>,
    pub values: Vec<ExtReal>,
}

/// Samples of an extended-real function on a uniform tensor grid,
/// row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    axes: Vec<Axis>,
    values: Vec<ExtReal>,
}

impl GridFunction {
    pub fn new(axes: Vec<Axis>, values: Vec<ExtReal>) -> Result<GridFunction> {
        let expect: usize = axes.iter().map(|a| a.count).product();
        for a in &axes {
            if a.count < 2 {
                return Err(Error::BadAxis(a.count));
            }
        }
        if values.len() != expect {
            return Err(Error::Spec(format!(
                "value array has {} entries, grid needs {expect}",
                values.len()
            )));
        }
        Ok(GridFunction { axes, values })
    }

    pub fn from_fn(axes: Vec<Axis>, f: impl Fn(&[f64]) -> ExtReal) -> Result<GridFunction> {
        let total: usize = axes.iter().map(|a| a.count).product();
        let mut values = Vec::with_capacity(total);
        let mut coords = vec![0.0; axes.len()];
        let mut idx = vec![0usize; axes.len()];
        for _ in 0..total {
            for (k, a) in axes.iter().enumerate() {
                coords[k] = a.node(idx[k]);
            }
            values.push(f(&coords));
            // odometer increment, last axis fastest
            for k in (0..axes.len()).rev() {
                idx[k] += 1;
                if idx[k] < axes[k].count {
                    break;
                }
                idx[k] = 0;
            }
        }
        GridFunction::new(axes, values)
    }

    /// Pointwise samples of a convex function, `+∞` preserved as the
    /// distinguished element. Rejects improper input (infinite at the
    /// origin, so infinite on at least a half-space by evenness).
    pub fn sample(
        f: &dyn crate::convex::ConvexFunction,
        axes: Vec<Axis>,
    ) -> Result<GridFunction> {
        if axes.len() != f.dim() {
            return Err(Error::Spec(format!(
                "sampling a dimension-{} function on a {}-axis grid",
                f.dim(),
                axes.len()
            )));
        }
        let origin = vec![0.0; f.dim()];
        if !f.eval(&origin).is_finite() {
            return Err(Error::InfiniteAtOrigin);
        }
        GridFunction::from_fn(axes, |x| f.eval(x))
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn values(&self) -> &[ExtReal] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, flat: usize) -> ExtReal {
        self.values[flat]
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (k, a) in self.axes.iter().enumerate() {
            debug_assert!(idx[k] < a.count);
            flat = flat * a.count + idx[k];
        }
        flat
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.dim()];
        for k in (0..self.dim()).rev() {
            idx[k] = flat % self.axes[k].count;
            flat /= self.axes[k].count;
        }
        idx
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.node(i))
            .collect()
    }

    pub fn has_finite_value(&self) -> bool {
        self.values.iter().any(|v| v.is_finite())
    }

    pub fn min_finite(&self) -> Option<f64> {
        self.values
            .iter()
            .filter_map(|v| v.value())
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
    }

    /// Multilinear interpolation; `+∞` outside the box or when any
    /// surrounding corner is `+∞`.
    pub fn eval_linear(&self, x: &[f64]) -> ExtReal {
        debug_assert_eq!(x.len(), self.dim());
        let n = self.dim();
        let mut base = vec![0usize; n];
        let mut frac = vec![0.0; n];
        for k in 0..n {
            let a = &self.axes[k];
            if x[k] < a.min - 1e-12 || x[k] > a.max + 1e-12 {
                return ExtReal::Inf;
            }
            let t = ((x[k] - a.min) / a.step()).clamp(0.0, (a.count - 1) as f64);
            let i = (t.floor() as usize).min(a.count - 2);
            base[k] = i;
            frac[k] = t - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = base.clone();
            for k in 0..n {
                if corner >> k & 1 == 1 {
                    idx[k] += 1;
                    w *= frac[k];
                } else {
                    w *= 1.0 - frac[k];
                }
            }
            if w == 0.0 {
                continue;
            }
            match self.values[self.flat_index(&idx)] {
                ExtReal::Finite(v) => acc += w * v,
                ExtReal::Inf => return ExtReal::Inf,
            }
        }
        ExtReal::finite(acc)
    }

    /// Extract the 1D line along `axis` through the point with the other
    /// indices fixed by `fixed` (which has `dim` entries; entry at `axis` is
    /// ignored).
    pub fn line(&self, axis: usize, fixed: &[usize]) -> Vec<ExtReal> {
        let mut idx = fixed.to_vec();
        (0..self.axes[axis].count)
            .map(|i| {
                idx[axis] = i;
                self.values[self.flat_index(&idx)]
            })
            .collect()
    }

    pub fn set_line(&mut self, axis: usize, fixed: &[usize], line: &[ExtReal]) {
        let mut idx = fixed.to_vec();
        for (i, &v) in line.iter().enumerate() {
            idx[axis] = i;
            let flat = self.flat_index(&idx);
            self.values[flat] = v;
        }
    }

    /// Max pointwise violation of discrete convexity along axis-parallel and
    /// diagonal directions (0 means convex; +∞ neighbours impose nothing
    /// in the middle, and a finite value flanked by +∞ is fine).
    pub fn convexity_violation(&self) -> f64 {
        let n = self.dim();
        let mut dirs: Vec<Vec<isize>> = Vec::new();
        for k in 0..n {
            let mut d = vec![0isize; n];
            d[k] = 1;
            dirs.push(d);
        }
        for k in 0..n {
            for l in (k + 1)..n {
                let mut d = vec![0isize; n];
                d[k] = 1;
                d[l] = 1;
                dirs.push(d.clone());
                d[l] = -1;
                dirs.push(d);
            }
        }
        let mut worst: f64 = 0.0;
        for flat in 0..self.len() {
            let idx = self.multi_index(flat);
            'dir: for d in &dirs {
                let mut plus = Vec::with_capacity(n);
                let mut minus = Vec::with_capacity(n);
                for k in 0..n {
                    let ip = idx[k] as isize + d[k];
                    let im = idx[k] as isize - d[k];
                    if ip < 0
                        || im < 0
                        || ip >= self.axes[k].count as isize
                        || im >= self.axes[k].count as isize
                    {
                        continue 'dir;
                    }
                    plus.push(ip as usize);
                    minus.push(im as usize);
                }
                let c = self.values[flat];
                let p = self.values[self.flat_index(&plus)];
                let m = self.values[self.flat_index(&minus)];
                if let ExtReal::Finite(c) = c {
                    match (p, m) {
                        (ExtReal::Finite(p), ExtReal::Finite(m)) => {
                            let defect = c - 0.5 * (p + m);
                            if defect > worst {
                                worst = defect;
                            }
                        }
                        // convexity forbids a finite dip between one finite and
                        // one infinite neighbour only in the continuum; on the
                        // grid it imposes nothing
                        _ => {}
                    }
                } else if p.is_finite() && m.is_finite() {
                    worst = f64::INFINITY; // +∞ strictly between finite values
                }
            }
        }
        worst
    }

    /// `f(x) == f(-x)` on a symmetric grid, exactly.
    pub fn is_even(&self) -> bool {
        if !self.axes.iter().all(|a| a.is_symmetric()) {
            return false;
        }
        for flat in 0..self.len() {
            let idx = self.multi_index(flat);
            let mirrored: Vec<usize> = idx
                .iter()
                .zip(&self.axes)
                .map(|(&i, a)| a.count - 1 - i)
                .collect();
            let a = self.values[flat];
            let b = self.values[self.flat_index(&mirrored)];
            match (a, b) {
                (ExtReal::Finite(x), ExtReal::Finite(y)) if x == y => {}
                (ExtReal::Inf, ExtReal::Inf) => {}
                _ => return false,
            }
        }
        true
    }

    pub fn to_file(&self) -> GridFile {
        GridFile {
            dims: self.dim(),
            axes: self.axes.clone(),
            values: self.values.clone(),
        }
    }

    pub fn from_file(file: GridFile) -> Result<GridFunction> {
        if file.dims != file.axes.len() {
            return Err(Error::Spec(format!(
                "grid header says dims = {}, but {} axes given",
                file.dims,
                file.axes.len()
            )));
        }
        GridFunction::new(file.axes, file.values)
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        let text = serde_json::to_string(&self.to_file())?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read_json(path: &std::path::Path) -> Result<GridFunction> {
        let text = std::fs::read_to_string(path)?;
        GridFunction::from_file(serde_json::from_str(&text)?)
    }
}
