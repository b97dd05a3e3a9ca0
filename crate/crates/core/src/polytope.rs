//! Origin-symmetric polytopes: polar duality, exact and Monte-Carlo volume,
//! Mahler volumes, and seeded random test bodies.
//!
//! A body is stored as unsigned generators. In V-representation the body is
//! `conv{±v_i}`; in H-representation it is `{x : |a_i·x| ≤ 1 for all i}`.
//! Polarity simply swaps the two readings of the same generator list.

use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::estimate::IntegralEstimate;
use crate::linalg::{self, Mat};
use crate::rng;

/// Exact V-representation volume goes through facet enumeration, which is
/// brute force over generator subsets; keep it to desk scale.
pub const VREP_ENUM_DIM_CAP: usize = 6;
/// Cap for the recursive exact volume in any representation.
pub const EXACT_VOLUME_DIM_CAP: usize = 6;
/// Cap on generator-subset solves in the facet enumeration.
const FACET_ENUM_WORK_CAP: usize = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rep {
    #[serde(rename = "V")]
    Vertices,
    #[serde(rename = "H")]
    Halfspaces,
}

/// On-disk body format: generators listed without sign duplication.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BodyFile {
    pub n: usize,
    pub rep: Rep,
    pub generators: Vec<Vec<f64>>,
}

#[derive(Debug)]
pub struct SymmetricPolytope {
    n: usize,
    rep: Rep,
    generators: Vec<Vec<f64>>,
    facet_cache: OnceLock<Option<Vec<Vec<f64>>>>,
}

impl Clone for SymmetricPolytope {
    fn clone(&self) -> Self {
        SymmetricPolytope {
            n: self.n,
            rep: self.rep,
            generators: self.generators.clone(),
            facet_cache: OnceLock::new(),
        }
    }
}

impl SymmetricPolytope {
    pub fn new(n: usize, rep: Rep, generators: Vec<Vec<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateBody(0));
        }
        for g in &generators {
            if g.len() != n {
                return Err(Error::Spec(format!(
                    "generator has {} coordinates, body lives in R^{n}",
                    g.len()
                )));
            }
        }
        // drop duplicates up to sign
        let mut gens: Vec<Vec<f64>> = Vec::new();
        'outer: for g in generators {
            for h in &gens {
                let same = g.iter().zip(h).all(|(a, b)| (a - b).abs() <= 1e-12);
                let neg = g.iter().zip(h).all(|(a, b)| (a + b).abs() <= 1e-12);
                if same || neg {
                    continue 'outer;
                }
            }
            gens.push(g);
        }
        if linalg::rank(&gens, n, 1e-10) < n {
            return Err(Error::DegenerateBody(n));
        }
        Ok(SymmetricPolytope {
            n,
            rep,
            generators: gens,
            facet_cache: OnceLock::new(),
        })
    }

    pub fn vertices_rep(n: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(n, Rep::Vertices, generators)
    }

    pub fn halfspaces_rep(n: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(n, Rep::Halfspaces, generators)
    }

    /// The cube `[-1,1]^n` in H-representation.
    pub fn cube(n: usize) -> Self {
        let gens = (0..n)
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                e
            })
            .collect();
        Self::halfspaces_rep(n, gens).expect("cube is valid")
    }

    /// The cross-polytope `conv{±e_i}` in V-representation.
    pub fn cross_polytope(n: usize) -> Self {
        let gens = (0..n)
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                e
            })
            .collect();
        Self::vertices_rep(n, gens).expect("cross-polytope is valid")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rep(&self) -> Rep {
        self.rep
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// Polar body. For symmetric bodies containing the origin the generator
    /// list carries over with the representation flipped.
    pub fn polar(&self) -> SymmetricPolytope {
        SymmetricPolytope {
            n: self.n,
            rep: match self.rep {
                Rep::Vertices => Rep::Halfspaces,
                Rep::Halfspaces => Rep::Vertices,
            },
            generators: self.generators.clone(),
            facet_cache: OnceLock::new(),
        }
    }

    /// Image under an invertible linear map: vertices map by `T`, facet
    /// normals by `T^{-T}`.
    pub fn apply_linear(&self, t: &Mat) -> Result<SymmetricPolytope> {
        let gens: Vec<Vec<f64>> = match self.rep {
            Rep::Vertices => self.generators.iter().map(|v| t.mul_vec(v)).collect(),
            Rep::Halfspaces => {
                let inv_t = linalg::inverse(t)
                    .ok_or(Error::DegenerateBody(self.n))?
                    .transpose();
                self.generators.iter().map(|a| inv_t.mul_vec(a)).collect()
            }
        };
        SymmetricPolytope::new(self.n, self.rep, gens)
    }

    /// Facet normals `u` with the body inside `{|u·x| ≤ 1}`. For H-bodies
    /// these are the generators themselves; for V-bodies they are enumerated
    /// over generator subsets (desk scale, n ≤ 4).
    pub fn facet_normals(&self) -> Result<Vec<Vec<f64>>> {
        match self.rep {
            Rep::Halfspaces => Ok(self.generators.clone()),
            Rep::Vertices => {
                if self.n > VREP_ENUM_DIM_CAP {
                    return Err(Error::DimensionCap {
                        n: self.n,
                        cap: VREP_ENUM_DIM_CAP,
                        what: "V-representation facet enumeration",
                    });
                }
                let cached = self
                    .facet_cache
                    .get_or_init(|| enumerate_facets_f64(&self.generators, self.n).ok());
                cached.clone().ok_or(Error::DegenerateBody(self.n))
            }
        }
    }

    /// Minkowski gauge value μ_K(x) (1 on the boundary).
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        let normals = self.facet_normals()?;
        Ok(normals
            .iter()
            .map(|u| linalg::dot(u, x).abs())
            .fold(0.0, f64::max))
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        Ok(self.gauge(x)? <= 1.0)
    }

    /// Distance from the origin to the nearest facet plane; a crude inradius
    /// used for thin-body warnings.
    pub fn inradius(&self) -> Result<f64> {
        let normals = self.facet_normals()?;
        Ok(normals
            .iter()
            .map(|u| 1.0 / linalg::norm(u))
            .fold(f64::INFINITY, f64::min))
    }

    /// Axis-aligned bounding half-widths.
    pub fn bounding_half_widths(&self) -> Result<Vec<f64>> {
        match self.rep {
            Rep::Vertices => Ok((0..self.n)
                .map(|k| {
                    self.generators
                        .iter()
                        .map(|v| v[k].abs())
                        .fold(0.0, f64::max)
                })
                .collect()),
            Rep::Halfspaces => {
                // |x| ≤ sqrt(λmax((AᵀA)^{-1}) m) whenever max_i |a_i·x| ≤ 1
                let m = self.generators.len();
                let mut ata = Mat::zeros(self.n, self.n);
                for a in &self.generators {
                    for i in 0..self.n {
                        for j in 0..self.n {
                            ata[(i, j)] += a[i] * a[j];
                        }
                    }
                }
                let inv = linalg::inverse(&ata).ok_or(Error::DegenerateBody(self.n))?;
                let mut v = vec![1.0; self.n];
                let mut lambda = 0.0;
                for _ in 0..200 {
                    let w = inv.mul_vec(&v);
                    lambda = linalg::norm(&w);
                    if lambda == 0.0 {
                        break;
                    }
                    v = linalg::scale(&w, 1.0 / lambda);
                }
                let r = (lambda * m as f64).sqrt() * (1.0 + 1e-9);
                Ok(vec![r; self.n])
            }
        }
    }

    /// Exact volume (float arithmetic): recursive facet decomposition for
    /// H-bodies, vertex-cone triangulation for V-bodies.
    pub fn volume_exact(&self) -> Result<f64> {
        if self.n > EXACT_VOLUME_DIM_CAP {
            return Err(Error::DimensionCap {
                n: self.n,
                cap: EXACT_VOLUME_DIM_CAP,
                what: "exact volume",
            });
        }
        match self.rep {
            Rep::Halfspaces => {
                let constraints = self.signed_constraints_f64()?;
                Ok(hrep_volume(&constraints, self.n))
            }
            Rep::Vertices => {
                let verts = self.signed_vertices_f64();
                vrep_volume(&verts, self.n, &1e-9).ok_or(Error::DegenerateBody(self.n))
            }
        }
    }

    fn signed_vertices_f64(&self) -> Vec<Vec<f64>> {
        let mut verts = Vec::with_capacity(2 * self.generators.len());
        for g in &self.generators {
            verts.push(g.clone());
            verts.push(linalg::scale(g, -1.0));
        }
        verts
    }

    /// Exact volume in rational arithmetic. Generators are converted from
    /// their f64 bit patterns, which is exact.
    pub fn volume_exact_rational(&self) -> Result<BigRational> {
        if self.n > EXACT_VOLUME_DIM_CAP {
            return Err(Error::DimensionCap {
                n: self.n,
                cap: EXACT_VOLUME_DIM_CAP,
                what: "exact volume",
            });
        }
        match self.rep {
            Rep::Halfspaces => {
                let one = BigRational::from_f64(1.0).unwrap();
                let mut cons: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
                for a in &self.generators {
                    let aq: Vec<BigRational> = a
                        .iter()
                        .map(|&v| BigRational::from_f64(v).unwrap())
                        .collect();
                    let neg: Vec<BigRational> = aq.iter().map(|v| -v.clone()).collect();
                    cons.push((aq, one.clone()));
                    cons.push((neg, one.clone()));
                }
                Ok(hrep_volume_generic(&cons, self.n))
            }
            Rep::Vertices => {
                let mut verts: Vec<Vec<BigRational>> = Vec::new();
                for g in &self.generators {
                    let v: Vec<BigRational> = g
                        .iter()
                        .map(|&x| BigRational::from_f64(x).unwrap())
                        .collect();
                    let neg = v.iter().map(|x| -x.clone()).collect();
                    verts.push(v);
                    verts.push(neg);
                }
                vrep_volume(&verts, self.n, &BigRational::zero())
                    .ok_or(Error::DegenerateBody(self.n))
            }
        }
    }

    fn signed_constraints_f64(&self) -> Result<Vec<(Vec<f64>, f64)>> {
        let normals = self.facet_normals()?;
        let mut cons = Vec::with_capacity(2 * normals.len());
        for a in &normals {
            cons.push((a.clone(), 1.0));
            cons.push((linalg::scale(a, -1.0), 1.0));
        }
        Ok(cons)
    }

    /// Hit-or-miss Monte-Carlo volume with a deterministic shard layout, so
    /// the estimate does not depend on the worker count.
    pub fn volume_mc(&self, samples: u64, seed: u64) -> Result<IntegralEstimate> {
        let half = self.bounding_half_widths()?;
        let lo: Vec<f64> = half.iter().map(|h| -h).collect();
        let box_vol: f64 = half.iter().map(|h| 2.0 * h).product();
        // precompute facets once so shards don't race on the cache
        let normals = self.facet_normals()?;
        const SHARDS: u64 = 64;
        let per = samples / SHARDS;
        let rem = samples % SHARDS;
        let hits: u64 = (0..SHARDS)
            .into_par_iter()
            .map(|shard| {
                let mut rng = rng::stream_rng(seed, shard);
                let count = per + if shard == SHARDS - 1 { rem } else { 0 };
                let mut h = 0u64;
                let mut x = vec![0.0; self.n];
                for _ in 0..count {
                    for k in 0..self.n {
                        x[k] = rng.random_range(lo[k]..half[k]);
                    }
                    let inside = normals.iter().all(|u| linalg::dot(u, &x).abs() <= 1.0);
                    if inside {
                        h += 1;
                    }
                }
                h
            })
            .sum();
        let p = hits as f64 / samples as f64;
        let value = box_vol * p;
        let stderr = box_vol * (p * (1.0 - p) / samples as f64).sqrt();
        Ok(IntegralEstimate::real(value, stderr, samples).with_seed(seed))
    }

    pub fn mahler(&self, method: &VolumeMethod, tol: &Tolerances) -> Result<MahlerResult> {
        let polar = self.polar();
        let (vol_k, vol_p, err, label) = match method {
            VolumeMethod::Exact => {
                let a = self.volume_exact()?;
                let b = polar.volume_exact()?;
                (a, b, 0.0, "exact".to_string())
            }
            VolumeMethod::MonteCarlo { samples, seed } => {
                let a = self.volume_mc(*samples, *seed)?;
                let b = polar.volume_mc(*samples, seed.wrapping_add(1))?;
                let prod = a.re * b.re;
                let rel = (a.error / a.re).hypot(b.error / b.re);
                (a.re, b.re, prod * rel, "monte-carlo".to_string())
            }
        };
        let n = self.n as i32;
        let product = vol_k * vol_p;
        let nf: f64 = (1..=self.n).map(|k| k as f64).product();
        let mut warnings = Vec::new();
        if let Ok(r) = self.inradius() {
            if r < tol.thin_body_warning {
                warnings.push(format!("thin body: inradius {r:.3e}"));
            }
        }
        Ok(MahlerResult {
            n: self.n,
            volume_body: vol_k,
            volume_polar: vol_p,
            product,
            method: label,
            error: err,
            ratio_vs_pi: product / (std::f64::consts::PI.powi(n) / nf),
            ratio_vs_four: product / (4f64.powi(n) / nf),
            warnings,
        })
    }

    /// Seed-deterministic random symmetric polytope: `pairs` directions
    /// uniform on the sphere with radii in `[0.5, 2]`.
    pub fn random(n: usize, pairs: usize, rep: Rep, seed: u64) -> Self {
        let mut stream = 0;
        loop {
            let mut rng = rng::stream_rng(seed, stream);
            let gens: Vec<Vec<f64>> = (0..pairs)
                .map(|_| {
                    let dir = rng::unit_direction(&mut rng, n);
                    let r: f64 = rng.random_range(0.5..2.0);
                    linalg::scale(&dir, r)
                })
                .collect();
            if let Ok(body) = SymmetricPolytope::new(n, rep, gens) {
                return body;
            }
            stream += 1;
        }
    }

    pub fn to_file(&self) -> BodyFile {
        BodyFile {
            n: self.n,
            rep: self.rep,
            generators: self.generators.clone(),
        }
    }

    pub fn from_file(file: BodyFile) -> Result<Self> {
        SymmetricPolytope::new(file.n, file.rep, file.generators)
    }
}

#[derive(Clone, Debug)]
pub enum VolumeMethod {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MahlerResult {
    pub n: usize,
    pub volume_body: f64,
    pub volume_polar: f64,
    pub product: f64,
    pub method: String,
    pub error: f64,
    /// `M(K) / (π^n/n!)`
    pub ratio_vs_pi: f64,
    /// `M(K) / (4^n/n!)`
    pub ratio_vs_four: f64,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

// ---------------------------------------------------------------------------
// volume recursion, generic over f64 / BigRational
// ---------------------------------------------------------------------------

pub trait VolScalar:
    Clone
    + PartialOrd
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
    + Zero
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
{
}

impl VolScalar for f64 {}
impl VolScalar for BigRational {}

/// Scale-normalize constraints and merge those describing the same halfspace,
/// keeping the tighter bound. Distinct facet planes of a parent polytope can
/// project onto the same chart halfplane (symmetric bodies do this
/// systematically), and a duplicate would be counted as a facet twice.
fn dedupe_constraints<T: VolScalar>(constraints: &[(Vec<T>, T)]) -> Vec<(Vec<T>, T)> {
    let tol = T::from_f64(1e-12).unwrap();
    let mut out: Vec<(Vec<T>, T)> = Vec::new();
    'outer: for (a, c) in constraints {
        let mut best = T::zero();
        for v in a {
            let av = v.abs();
            if av > best {
                best = av;
            }
        }
        let (na, nc) = if best.is_zero() {
            (a.clone(), c.clone())
        } else {
            (
                a.iter().map(|v| v.clone() / best.clone()).collect(),
                c.clone() / best.clone(),
            )
        };
        for (ea, ec) in out.iter_mut() {
            let same = ea
                .iter()
                .zip(&na)
                .all(|(x, y)| (x.clone() - y.clone()).abs() <= tol);
            if same {
                if nc < *ec {
                    *ec = nc;
                }
                continue 'outer;
            }
        }
        out.push((na, nc));
    }
    out
}

/// Volume of `{x : a_i·x ≤ c_i}` by the signed facet-pyramid decomposition
/// `d·vol = Σ_i (c_i/|a_i|)·vol_{d-1}(F_i)`, evaluated in a rational
/// coordinate-drop chart so no square roots appear: the chart that drops
/// coordinate k scales (d−1)-volume by `|a|/|a_k|`, and the factors cancel to
/// `c_i/|a_{i,k}|` per facet.
fn hrep_volume_generic<T: VolScalar>(raw: &[(Vec<T>, T)], d: usize) -> T {
    let constraints = dedupe_constraints(raw);
    let constraints = &constraints[..];
    debug_assert!(d >= 1);
    if d == 1 {
        let mut lo: Option<T> = None;
        let mut hi: Option<T> = None;
        for (a, c) in constraints {
            let w = &a[0];
            if w.is_zero() {
                if *c < T::zero() {
                    return T::zero(); // 0 ≤ c < 0: empty
                }
                continue;
            }
            let bound = c.clone() / w.clone();
            if *w > T::zero() {
                hi = Some(match hi {
                    Some(h) if h <= bound => h,
                    _ => bound,
                });
            } else {
                lo = Some(match lo {
                    Some(l) if l >= bound => l,
                    _ => bound,
                });
            }
        }
        return match (lo, hi) {
            (Some(l), Some(h)) if h > l => h - l,
            _ => T::zero(),
        };
    }
    let mut total = T::zero();
    for (i, (a, c)) in constraints.iter().enumerate() {
        // drop the best-conditioned coordinate
        let mut k = 0;
        let mut best = a[0].abs();
        for (j, v) in a.iter().enumerate().skip(1) {
            let av = v.abs();
            if av > best {
                best = av;
                k = j;
            }
        }
        if best.is_zero() {
            if *c < T::zero() {
                return T::zero();
            }
            continue;
        }
        let ak = a[k].clone();
        let mut chart: Vec<(Vec<T>, T)> = Vec::with_capacity(constraints.len() - 1);
        for (j, (b, e)) in constraints.iter().enumerate() {
            if j == i {
                continue;
            }
            let factor = b[k].clone() / ak.clone();
            let mut row = Vec::with_capacity(d - 1);
            for l in 0..d {
                if l == k {
                    continue;
                }
                row.push(b[l].clone() - factor.clone() * a[l].clone());
            }
            let rhs = e.clone() - factor * c.clone();
            chart.push((row, rhs));
        }
        let face = hrep_volume_generic(&chart, d - 1);
        total = total + c.clone() * face / ak.abs();
    }
    total / T::from_usize(d).unwrap()
}

pub(crate) fn hrep_volume(constraints: &[(Vec<f64>, f64)], d: usize) -> f64 {
    hrep_volume_generic(constraints, d)
}

#[doc(hidden)]
pub fn debug_hrep_volume(constraints: &[(Vec<f64>, f64)], d: usize) -> f64 {
    hrep_volume_generic(constraints, d)
}

/// Gaussian elimination, generic so the rational path stays exact.
fn solve_generic<T: VolScalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let mut p = None;
        let mut best = T::zero();
        for (i, row) in a.iter().enumerate().skip(col) {
            let v = row[col].abs();
            if v > best {
                best = v;
                p = Some(i);
            }
        }
        let p = p?;
        a.swap(col, p);
        b.swap(col, p);
        for i in (col + 1)..n {
            if a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone() / a[col][col].clone();
            for j in col..n {
                let v = a[col][j].clone();
                a[i][j] = a[i][j].clone() - f.clone() * v;
            }
            let v = b[col].clone();
            b[i] = b[i].clone() - f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for j in (i + 1)..n {
            s = s - a[i][j].clone() * x[j].clone();
        }
        x[i] = s / a[i][i].clone();
    }
    Some(x)
}

/// Iterate over all k-subsets of `0..m` in lexicographic order.
fn for_each_combination(m: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k == 0 || k > m {
        return;
    }
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&combo) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if combo[i] + 1 <= m - (k - i) {
                combo[i] += 1;
                for j in (i + 1)..k {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Volume of `conv(vertices)` by coning from `vertices[0]` over the facets
/// that do not contain it. Facets come from brute force over d-subsets: the
/// affine hull of d affinely independent vertices is a facet plane when every
/// vertex lies on one side. The chart again drops a coordinate, so the
/// arithmetic stays rational.
fn vrep_volume<T: VolScalar>(vertices: &[Vec<T>], d: usize, tol: &T) -> Option<T> {
    if vertices.is_empty() {
        return None;
    }
    if d == 1 {
        let mut lo = vertices[0][0].clone();
        let mut hi = lo.clone();
        for v in vertices {
            if v[0] < lo {
                lo = v[0].clone();
            }
            if v[0] > hi {
                hi = v[0].clone();
            }
        }
        return Some(hi - lo);
    }
    let m = vertices.len();
    if m <= d {
        return Some(T::zero()); // at most a simplex's boundary: flat
    }
    let combos: usize = (0..d).map(|i| m - i).product::<usize>() / (1..=d).product::<usize>();
    if combos > FACET_ENUM_WORK_CAP {
        return None;
    }
    // (inequality u·x ≤ c, member indices)
    let mut facets: Vec<(Vec<T>, T, Vec<usize>)> = Vec::new();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    for_each_combination(m, d, |combo| {
        let base = &vertices[combo[0]];
        let edges: Vec<Vec<T>> = combo[1..]
            .iter()
            .map(|&i| {
                vertices[i]
                    .iter()
                    .zip(base)
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect()
            })
            .collect();
        let Some(u) = hyperplane_normal(&edges, d, tol) else {
            return true;
        };
        let mut c = T::zero();
        for (a, b) in u.iter().zip(base) {
            c = c + a.clone() * b.clone();
        }
        let scale = {
            let mut s = c.abs();
            for v in &u {
                let av = v.abs();
                if av > s {
                    s = av;
                }
            }
            s
        };
        let slack = tol.clone() * scale + tol.clone();
        let mut above = false;
        let mut below = false;
        let mut members: Vec<usize> = Vec::new();
        for (i, v) in vertices.iter().enumerate() {
            let mut dot = T::zero();
            for (a, b) in u.iter().zip(v) {
                dot = dot + a.clone() * b.clone();
            }
            let gap = dot - c.clone();
            if gap > slack {
                above = true;
            } else if gap < -slack.clone() {
                below = true;
            } else {
                members.push(i);
            }
            if above && below {
                return true; // cuts through the hull: not a facet
            }
        }
        members.sort_unstable();
        if seen.contains(&members) {
            return true;
        }
        seen.push(members.clone());
        // orient as u·x ≤ c
        if above {
            let nu: Vec<T> = u.iter().map(|v| -v.clone()).collect();
            facets.push((nu, -c, members));
        } else {
            facets.push((u, c, members));
        }
        true
    });
    if facets.is_empty() {
        return None;
    }
    let apex = &vertices[0];
    let mut total = T::zero();
    for (u, c, members) in facets {
        if members.contains(&0) {
            continue;
        }
        let mut dot = T::zero();
        for (a, b) in u.iter().zip(apex) {
            dot = dot + a.clone() * b.clone();
        }
        let height = (c - dot).abs();
        let mut k = 0;
        let mut best = u[0].abs();
        for (j, v) in u.iter().enumerate().skip(1) {
            let av = v.abs();
            if av > best {
                best = av;
                k = j;
            }
        }
        if best.is_zero() {
            continue;
        }
        let chart: Vec<Vec<T>> = members
            .iter()
            .map(|&i| {
                vertices[i]
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| *l != k)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let face = vrep_volume(&chart, d - 1, tol)?;
        total = total + height * face / u[k].abs();
    }
    Some(total / T::from_usize(d).unwrap())
}

/// A nonzero vector orthogonal to the given (d−1) edge rows, or `None` when
/// the rows are dependent.
fn hyperplane_normal<T: VolScalar>(edges: &[Vec<T>], d: usize, tol: &T) -> Option<Vec<T>> {
    for pivot in 0..d {
        // fix u_pivot = 1, solve for the rest
        let a: Vec<Vec<T>> = edges
            .iter()
            .map(|e| {
                e.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != pivot)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let b: Vec<T> = edges.iter().map(|e| -e[pivot].clone()).collect();
        if let Some(x) = solve_generic(a, b) {
            let mut u = Vec::with_capacity(d);
            let mut xi = x.into_iter();
            for j in 0..d {
                if j == pivot {
                    u.push(T::from_f64(1.0).unwrap());
                } else {
                    u.push(xi.next().unwrap());
                }
            }
            // residual check (meaningful for the float path)
            let ok = edges.iter().all(|e| {
                let mut dot = T::zero();
                let mut scale = T::zero();
                for (a, b) in e.iter().zip(&u) {
                    dot = dot + a.clone() * b.clone();
                    let av = a.abs() * b.abs();
                    if av > scale {
                        scale = av;
                    }
                }
                dot.abs() <= tol.clone() * (scale + T::from_f64(1.0).unwrap()) + tol.clone()
            });
            if ok {
                return Some(u);
            }
        }
    }
    None
}

/// Facet normals of `conv{±g_i}` by brute force over generator subsets and
/// sign patterns: a subset whose affine hull supports the whole generator set
/// defines a facet.
fn enumerate_facets<T: VolScalar>(gens: &[Vec<T>], n: usize, tol: &T) -> Result<Vec<Vec<T>>> {
    let m = gens.len();
    if m < n {
        return Err(Error::DegenerateBody(n));
    }
    let combos: usize = (0..n).map(|i| m - i).product::<usize>() / (1..=n).product::<usize>();
    if combos.saturating_mul(1 << (n - 1)) > FACET_ENUM_WORK_CAP {
        return Err(Error::DimensionCap {
            n,
            cap: VREP_ENUM_DIM_CAP,
            what: "facet enumeration",
        });
    }
    let mut facets: Vec<Vec<T>> = Vec::new();
    let mut combo: Vec<usize> = (0..n).collect();
    let one = T::from_f64(1.0).unwrap();
    loop {
        // 2^{n-1} sign patterns, first generator fixed positive (u and -u
        // describe the same unsigned facet pair)
        for signs in 0..(1usize << (n - 1)) {
            let rows: Vec<Vec<T>> = combo
                .iter()
                .enumerate()
                .map(|(pos, &gi)| {
                    let flip = pos > 0 && (signs >> (pos - 1)) & 1 == 1;
                    gens[gi]
                        .iter()
                        .map(|v| if flip { -v.clone() } else { v.clone() })
                        .collect()
                })
                .collect();
            let rhs = vec![one.clone(); n];
            let Some(u) = solve_generic(rows, rhs) else {
                continue;
            };
            // supporting: every signed generator satisfies |u·g| ≤ 1
            let supporting = gens.iter().all(|g| {
                let mut dot = T::zero();
                for (a, b) in u.iter().zip(g) {
                    dot = dot + a.clone() * b.clone();
                }
                dot.abs() <= one.clone() + tol.clone()
            });
            if !supporting {
                continue;
            }
            // dedupe up to sign
            let dup = facets.iter().any(|f| {
                let same = f.iter().zip(&u).all(|(a, b)| {
                    (a.clone() - b.clone()).abs() <= tol.clone() + T::from_f64(1e-12).unwrap()
                });
                let neg = f.iter().zip(&u).all(|(a, b)| {
                    (a.clone() + b.clone()).abs() <= tol.clone() + T::from_f64(1e-12).unwrap()
                });
                same || neg
            });
            if !dup {
                facets.push(u);
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                if facets.is_empty() {
                    return Err(Error::DegenerateBody(n));
                }
                return Ok(facets);
            }
            i -= 1;
            if combo[i] + 1 <= m - (n - i) {
                combo[i] += 1;
                for j in (i + 1)..n {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn enumerate_facets_f64(gens: &[Vec<f64>], n: usize) -> Result<Vec<Vec<f64>>> {
    enumerate_facets(gens, n, &1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// Shoelace area of a 2D V-body, an independent oracle for tests:
    /// monotone-chain hull first, then the shoelace sum.
    fn shoelace_area(body: &SymmetricPolytope) -> f64 {
        assert_eq!(body.dim(), 2);
        assert_eq!(body.rep(), Rep::Vertices);
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for g in body.generators() {
            pts.push(g.clone());
            pts.push(linalg::scale(g, -1.0));
        }
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        let cross = |o: &[f64], a: &[f64], b: &[f64]| {
            (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        };
        let chain = |iter: &mut dyn Iterator<Item = &Vec<f64>>| {
            let mut h: Vec<Vec<f64>> = Vec::new();
            for p in iter {
                while h.len() >= 2 && cross(&h[h.len() - 2], &h[h.len() - 1], p) <= 0.0 {
                    h.pop();
                }
                h.push(p.clone());
            }
            h.pop();
            h
        };
        let mut hull = chain(&mut pts.iter());
        hull.extend(chain(&mut pts.iter().rev()));
        let mut area = 0.0;
        for i in 0..hull.len() {
            let j = (i + 1) % hull.len();
            area += hull[i][0] * hull[j][1] - hull[j][0] * hull[i][1];
        }
        area.abs() / 2.0
    }

    #[test]
    fn cube_and_cross_volumes() {
        for n in 1..=4 {
            let cube = SymmetricPolytope::cube(n);
            assert!((cube.volume_exact().unwrap() - 2f64.powi(n as i32)).abs() < 1e-10);
            let cross = SymmetricPolytope::cross_polytope(n);
            let expect = 2f64.powi(n as i32) / factorial(n);
            assert!((cross.volume_exact().unwrap() - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn cube_polar_is_cross_polytope() {
        let cube = SymmetricPolytope::cube(3);
        let polar = cube.polar();
        assert_eq!(polar.rep(), Rep::Vertices);
        assert!((polar.volume_exact().unwrap() - 8.0 / 6.0).abs() < 1e-12);
        // segment in n=1 is self-dual
        let seg = SymmetricPolytope::cube(1);
        assert!((seg.polar().volume_exact().unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hexagon_volume_and_bipolar() {
        let deg = |d: f64| d.to_radians();
        let gens = vec![
            vec![deg(0.0).cos(), deg(0.0).sin()],
            vec![deg(60.0).cos(), deg(60.0).sin()],
            vec![deg(120.0).cos(), deg(120.0).sin()],
        ];
        let hex = SymmetricPolytope::vertices_rep(2, gens.clone()).unwrap();
        let expect = 3.0 * 3f64.sqrt() / 2.0;
        assert!((hex.volume_exact().unwrap() - expect).abs() < 1e-10);
        assert!((shoelace_area(&hex) - expect).abs() < 1e-12);

        // polar of the polar reproduces the original vertices
        let back = hex.polar().polar();
        assert_eq!(back.rep(), Rep::Vertices);
        for g in gens {
            assert!(back
                .generators()
                .iter()
                .any(|h| h.iter().zip(&g).all(|(a, b)| (a - b).abs() < 1e-9)));
        }
        // and the polar's vertex set is recoverable via facet enumeration
        let polar_vertices = hex.polar().polar().facet_normals().unwrap();
        assert_eq!(polar_vertices.len(), 3);
    }

    #[test]
    fn vrep_volume_matches_hrep_route() {
        // random 2D body: exact volume via facets vs shoelace
        for seed in 0..5 {
            let body = SymmetricPolytope::random(2, 4, Rep::Vertices, seed);
            let v = body.volume_exact().unwrap();
            assert!(
                (v - shoelace_area(&body)).abs() < 1e-9 * v.max(1.0),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn random_octagon_bound_and_engine_agreement() {
        // 8-generator 2D bodies: the product clears π²/2 and the two volume
        // engines agree within the sampling error
        let tol = Tolerances::default();
        for seed in 0..4 {
            let body = SymmetricPolytope::random(2, 8, Rep::Vertices, 900 + seed);
            let exact = body.mahler(&VolumeMethod::Exact, &tol).unwrap();
            assert!(
                exact.product >= std::f64::consts::PI.powi(2) / 2.0 - 1e-9,
                "seed {seed}: {exact:?}"
            );
            let mc = body
                .mahler(&VolumeMethod::MonteCarlo { samples: 400_000, seed }, &tol)
                .unwrap();
            assert!(
                (mc.product - exact.product).abs() <= 3.5 * mc.error,
                "seed {seed}: exact {} vs mc {} ± {}",
                exact.product,
                mc.product,
                mc.error
            );
        }
    }

    #[test]
    fn mc_agrees_with_exact() {
        let cross = SymmetricPolytope::cross_polytope(3);
        let est = cross.volume_mc(400_000, 42).unwrap();
        let exact = 8.0 / 6.0;
        assert!(
            (est.re - exact).abs() < 3.5 * est.error,
            "mc {} vs exact {exact} (σ {})",
            est.re,
            est.error
        );

        let body = SymmetricPolytope::random(3, 5, Rep::Halfspaces, 7);
        let est = body.volume_mc(400_000, 11).unwrap();
        let exact = body.volume_exact().unwrap();
        assert!((est.re - exact).abs() < 3.5 * est.error);
    }

    #[test]
    fn rational_volume_is_exact_for_cube_family() {
        for n in 1..=4usize {
            let vol = SymmetricPolytope::cube(n).volume_exact_rational().unwrap();
            assert_eq!(vol.to_f64().unwrap(), 2f64.powi(n as i32));
            let cross = SymmetricPolytope::cross_polytope(n)
                .volume_exact_rational()
                .unwrap();
            let expect = BigRational::from_f64((1u64 << n) as f64).unwrap()
                / BigRational::from_f64((1..=n as u64).product::<u64>() as f64).unwrap();
            assert_eq!(cross, expect);
        }
    }

    #[test]
    fn mahler_cube3_is_32_over_3() {
        let tol = Tolerances::default();
        let res = SymmetricPolytope::cube(3)
            .mahler(&VolumeMethod::Exact, &tol)
            .unwrap();
        assert!((res.product - 32.0 / 3.0).abs() < 1e-12);
        assert!((res.ratio_vs_four - 1.0).abs() < 1e-12);
        // segment: M = 4
        let seg = SymmetricPolytope::cube(1)
            .mahler(&VolumeMethod::Exact, &tol)
            .unwrap();
        assert!((seg.product - 4.0).abs() < 1e-14);
    }

    #[test]
    fn linear_invariance_of_volume_and_mahler() {
        let tol = Tolerances::default();
        let t = Mat::from_rows(&[
            vec![1.3, 0.4, 0.0],
            vec![-0.2, 0.9, 0.1],
            vec![0.0, 0.3, 1.1],
        ]);
        let dt = linalg::det(&t).abs();
        for rep in [Rep::Halfspaces, Rep::Vertices] {
            let body = SymmetricPolytope::random(3, 5, rep, 3);
            let mapped = body.apply_linear(&t).unwrap();
            let v = body.volume_exact().unwrap();
            let vm = mapped.volume_exact().unwrap();
            assert!((vm - dt * v).abs() < 1e-6 * vm, "{rep:?}");
            let m0 = body.mahler(&VolumeMethod::Exact, &tol).unwrap().product;
            let m1 = mapped.mahler(&VolumeMethod::Exact, &tol).unwrap().product;
            assert!((m1 - m0).abs() < 1e-6 * m0, "{rep:?}");
        }
    }

    #[test]
    fn polar_monotone_under_inclusion() {
        // K ⊆ L ⟹ L° ⊆ K°, by membership sampling
        let k = SymmetricPolytope::random(3, 5, Rep::Halfspaces, 19);
        let scale_up = Mat::identity(3).scaled(1.25);
        let l = k.apply_linear(&scale_up).unwrap();
        let (kp, lp) = (k.polar(), l.polar());
        let mut rng = rng::stream_rng(5, 0);
        let half = lp.bounding_half_widths().unwrap();
        for _ in 0..500 {
            let x: Vec<f64> = half.iter().map(|&h| rng.random_range(-h..h)).collect();
            if lp.contains(&x).unwrap() {
                assert!(kp.contains(&x).unwrap());
            }
        }
    }

    #[test]
    fn degenerate_generators_rejected() {
        let res =
            SymmetricPolytope::vertices_rep(3, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        assert!(matches!(res, Err(Error::DegenerateBody(3))));
    }

    #[test]
    fn kuperberg_bound_on_random_bodies() {
        let tol = Tolerances::default();
        for seed in 0..20 {
            let n = 2 + (seed as usize % 3);
            let body = SymmetricPolytope::random(n, 4 + seed as usize % 3, Rep::Halfspaces, seed);
            let m = body.mahler(&VolumeMethod::Exact, &tol).unwrap();
            assert!(m.ratio_vs_pi >= 1.0 - 1e-9, "seed {seed}: {:?}", m);
        }
    }
}
