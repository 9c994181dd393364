//! Reference implementations shared by the integration tests. Everything
//! here works on dense arrays or raw field arithmetic and is deliberately
//! slow.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ndooc::field::FieldTable;
use ndooc::ooc::{Code, CodeShape, Codeword};
use rand::Rng;
use rayon::prelude::*;

/// Dense 0/1 array, indexed `[cell][time]` with cells in row-major order.
pub fn dense(word: &Codeword) -> Vec<Vec<bool>> {
    let shape = word.shape();
    let t = shape.time_len() as usize;
    let mut a = vec![vec![false; t]; shape.cells() as usize];
    for c in word.coords() {
        let (space, time) = c.split_at(c.len() - 1);
        let mut flat = 0usize;
        for (x, d) in space.iter().zip(shape.spatial()) {
            flat = flat * *d as usize + *x as usize;
        }
        a[flat][time[0] as usize] = true;
    }
    a
}

fn dense_profile_of(da: &[Vec<bool>], db: &[Vec<bool>], t: usize) -> Vec<u32> {
    (0..t)
        .map(|s| {
            let mut sum = 0;
            for (ra, rb) in da.iter().zip(db) {
                for j in 0..t {
                    if ra[j] && rb[(j + t - s) % t] {
                        sum += 1;
                    }
                }
            }
            sum
        })
        .collect()
}

/// `out[s] = Σ a[c][t] · b[c][t - s]`, the overlap of `a` with `b` shifted by `s`.
pub fn dense_profile(a: &Codeword, b: &Codeword) -> Vec<u32> {
    dense_profile_of(&dense(a), &dense(b), a.shape().time_len() as usize)
}

/// Measured `(λa, λc)` by exhaustive dense correlation.
pub fn dense_lambdas(code: &Code) -> (u32, u32) {
    let t = code.shape().time_len() as usize;
    let arrays: Vec<Vec<Vec<bool>>> = code.words().iter().map(dense).collect();
    (0..arrays.len())
        .into_par_iter()
        .map(|i| {
            let auto = dense_profile_of(&arrays[i], &arrays[i], t);
            let la = auto[1..].iter().copied().max().unwrap_or(0);
            let lc = arrays[i + 1..]
                .iter()
                .flat_map(|b| dense_profile_of(&arrays[i], b, t))
                .max()
                .unwrap_or(0);
            (la, lc)
        })
        .reduce(|| (0, 0), |x, y| (x.0.max(y.0), x.1.max(y.1)))
}

pub fn random_word<R: Rng>(rng: &mut R, shape: &CodeShape, w: usize) -> Codeword {
    let dims = shape.dims().to_vec();
    let mut seen = BTreeSet::new();
    while seen.len() < w {
        let c: Vec<u32> = dims.iter().map(|&d| rng.gen_range(0..d)).collect();
        seen.insert(c);
    }
    Codeword::from_coords(shape.clone(), seen).unwrap()
}

/// A random shape with total length at most `max_total`.
pub fn random_shape<R: Rng>(rng: &mut R, max_total: u64) -> CodeShape {
    loop {
        let arity = rng.gen_range(1..=4);
        let dims: Vec<u32> = (0..arity).map(|_| rng.gen_range(1..=24)).collect();
        let total: u64 = dims.iter().map(|&d| d as u64).product();
        if (4..=max_total).contains(&total) {
            return CodeShape::new(dims).unwrap();
        }
    }
}

/// Projective points of PG(k, q) as exponents of a primitive element of
/// GF(q^{k+1}), computed with plain field arithmetic.
pub struct BruteGeometry {
    pub field: FieldTable,
    pub q: u32,
    pub n: u32,
    /// GF(q) inside the big field.
    pub scalars: Vec<u32>,
}

impl BruteGeometry {
    pub fn new(p: u32, m: u32, k: u32) -> Self {
        let field = FieldTable::new(p, m * (k + 1)).unwrap();
        let q = p.pow(m);
        let n = (field.group_order()) / (q - 1);
        let mut scalars: Vec<u32> = (0..q - 1).map(|j| field.exp((n * j) as i64)).collect();
        scalars.push(0);
        Self {
            field,
            q,
            n,
            scalars,
        }
    }

    pub fn point(&self, x: u32) -> u32 {
        self.field.log(x).unwrap() % self.n
    }

    /// Every `λβ^a + μβ^b` with `(λ, μ) ≠ (0, 0)`, projected.
    pub fn line(&self, a: u32, b: u32) -> Vec<u32> {
        let (xa, xb) = (self.field.exp(a as i64), self.field.exp(b as i64));
        let mut pts = BTreeSet::new();
        for &l in &self.scalars {
            for &m in &self.scalars {
                let v = self.field.add(self.field.mul(l, xa), self.field.mul(m, xb));
                if v != 0 {
                    pts.insert(self.point(v));
                }
            }
        }
        pts.into_iter().collect()
    }

    pub fn all_lines(&self) -> BTreeSet<Vec<u32>> {
        let mut out = BTreeSet::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                out.insert(self.line(a, b));
            }
        }
        out
    }

    /// Least member of the orbit of `set` under `e ↦ e + step`.
    pub fn orbit_min(&self, set: &[u32], step: u32) -> Vec<u32> {
        (0..self.n / step)
            .map(|i| {
                let mut s: Vec<u32> = set.iter().map(|&e| (e + i * step) % self.n).collect();
                s.sort_unstable();
                s
            })
            .min()
            .unwrap()
    }
}
