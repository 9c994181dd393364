//! The Singer-cycle model of PG(k, q).
//!
//! Points of PG(k, q) are the exponents `0..θ(k)` of a primitive element β of
//! GF(q^{k+1}); exponents congruent modulo θ(k) name the same point because
//! β^θ(k) generates GF(q)*. Multiplication by β is the Singer cycle φ, which
//! acts on point indices as `e ↦ e + 1 (mod θ(k))`.

use std::collections::HashSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{prime_power, Element, FieldError, FieldTable, DEFAULT_TABLE_LIMIT};
use crate::ooc::{CodeShape, Codeword, OocError};

/// Largest point count for which the Zech logarithm table is precomputed.
const ZECH_POINT_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("projective dimension must be at least 2, got {0}")]
    DimensionTooSmall(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("points {0} and {1} coincide")]
    Degenerate(u32, u32),
    #[error("point {point} out of range for {n} points")]
    PointOutOfRange { point: u32, n: u32 },
    #[error("spread dimension {d} invalid for PG({k}, q): need 1 <= d < k and (d+1) | (k+1)")]
    SpreadDimension { d: u32, k: u32 },
    #[error("{lambda} does not divide the point count {n}")]
    NotDivisor { lambda: u32, n: u32 },
    #[error("array shape {lambda}x{t} does not cover {n} points")]
    ShapeMismatch { lambda: u32, t: u32, n: u32 },
    #[error("point {0} lies on the given line")]
    PointOnLine(u32),
    #[error("operation requires PG(3, q), got PG({0}, q)")]
    NeedsThreeSpace(u32),
    #[error("point set is not a line")]
    NotALine,
    #[error("spread element {index} is not a {d}-flat")]
    SpreadElementNotFlat { index: u32, d: u32 },
    #[error(transparent)]
    Code(#[from] OocError),
}

/// θ(k, q) = (q^{k+1} - 1) / (q - 1), the number of points of PG(k, q).
pub fn theta(k: u32, q: u64) -> u64 {
    (0..=k).map(|i| q.pow(i)).sum()
}

/// Sorted set of point indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointSet(Vec<u32>);

impl PointSet {
    pub fn new(points: impl IntoIterator<Item = u32>) -> Self {
        let mut v: Vec<u32> = points.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn points(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: u32) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.0.iter().all(|&p| other.contains(p))
    }

    pub fn intersection_len(&self, other: &PointSet) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// Image under `e ↦ (e + by) mod n`.
    pub fn shifted(&self, by: u32, n: u32) -> PointSet {
        let by = by % n;
        PointSet::new(
            self.0
                .iter()
                .map(|&e| ((e as u64 + by as u64) % n as u64) as u32),
        )
    }
}

/// A d-spread realized as the short Singer orbit of a d-flat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spread {
    pub d: u32,
    /// Number of spread elements, θ(k)/θ(d).
    pub lambda: u32,
    pub elements: Vec<PointSet>,
}

impl Spread {
    /// Points per element, θ(d).
    pub fn element_size(&self) -> u32 {
        self.elements.first().map_or(0, |e| e.len() as u32)
    }

    /// Index of the element containing `point`.
    pub fn element_of(&self, point: u32) -> u32 {
        point % self.lambda
    }

    /// True if every point of `set` lies in one spread element.
    pub fn contains_set(&self, set: &PointSet) -> bool {
        let mut it = set.points().iter().map(|&p| p % self.lambda);
        match it.next() {
            None => true,
            Some(first) => it.all(|r| r == first),
        }
    }
}

/// An orbit under `⟨φ^Λ⟩`, members in generation order starting from the seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub members: Vec<PointSet>,
    pub full: bool,
}

impl Orbit {
    /// Lexicographically least member.
    pub fn representative(&self) -> &PointSet {
        self.members.iter().min().expect("orbits are nonempty")
    }
}

/// Binary Λ×T array with `a[i][j] = 1` iff point `i + Λ j` is in the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceArray {
    rows: u32,
    cols: u32,
    bits: Vec<bool>,
}

impl IncidenceArray {
    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn get(&self, i: u32, j: u32) -> bool {
        self.bits[(i * self.cols + j) as usize]
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Shift every column right by one, wrapping.
    pub fn column_shifted(&self) -> IncidenceArray {
        let mut bits = vec![false; self.bits.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                bits[(i * self.cols + (j + 1) % self.cols) as usize] = self.get(i, j);
            }
        }
        IncidenceArray {
            rows: self.rows,
            cols: self.cols,
            bits,
        }
    }

    /// The array as a 2-D codeword with rows as the spatial axis.
    pub fn to_codeword(&self) -> Result<Codeword, OocError> {
        let shape = CodeShape::new(vec![self.rows, self.cols])?;
        let coords = (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .filter(|&(i, j)| self.get(i, j))
            .map(|(i, j)| vec![i, j]);
        Codeword::from_coords(shape, coords)
    }
}

#[derive(Debug, Clone)]
pub struct SingerGeometry {
    q: u32,
    k: u32,
    n: u32,
    field: FieldTable,
    /// `zech[e] = log(1 + β^e)`, `u32::MAX` where `1 + β^e = 0`.
    zech: Option<Vec<u32>>,
}

impl SingerGeometry {
    pub fn new(q: u32, k: u32) -> Result<Self, GeometryError> {
        Self::with_limit(q, k, DEFAULT_TABLE_LIMIT)
    }

    pub fn with_limit(q: u32, k: u32, table_limit: u64) -> Result<Self, GeometryError> {
        let (p, m) = prime_power(q as u64).ok_or(GeometryError::NotPrimePower(q as u64))?;
        if k < 2 {
            return Err(GeometryError::DimensionTooSmall(k));
        }
        let field = FieldTable::with_limit(p, m * (k + 1), table_limit)?;
        let n = theta(k, q as u64) as u32;
        let zech = (n as u64 <= ZECH_POINT_LIMIT).then(|| {
            let g = field.group_order();
            (0..g)
                .map(|e| {
                    let s = field.add(1, field.exp(e as i64));
                    field.log(s).unwrap_or(u32::MAX)
                })
                .collect()
        });
        log::debug!(
            "built PG({k},{q}) with {n} points over GF({})",
            field.order()
        );
        Ok(Self {
            q,
            k,
            n,
            field,
            zech,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of points θ(k, q).
    pub fn num_points(&self) -> u32 {
        self.n
    }

    pub fn field(&self) -> &FieldTable {
        &self.field
    }

    /// Field exponents of the nonzero elements of the subfield GF(q).
    pub fn subfield_exponents(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.q - 1).map(move |j| j * self.n)
    }

    /// The subfield GF(q) as field elements, zero first, then β^{nj}.
    pub fn subfield_elements(&self) -> Vec<Element> {
        std::iter::once(0)
            .chain(self.subfield_exponents().map(|e| self.field.exp(e as i64)))
            .collect()
    }

    /// Projective point of a nonzero field element.
    pub fn point_of(&self, x: Element) -> Result<u32, GeometryError> {
        Ok(self.field.log(x)? % self.n)
    }

    /// log(β^a + β^b), or `None` if the sum vanishes.
    pub fn log_sum(&self, a: u32, b: u32) -> Option<u32> {
        let g = self.field.group_order();
        match &self.zech {
            Some(z) => {
                let diff = ((b as u64 + g as u64 - (a % g) as u64) % g as u64) as usize;
                let zd = z[diff];
                (zd != u32::MAX).then(|| ((a as u64 + zd as u64) % g as u64) as u32)
            }
            None => {
                let s = self
                    .field
                    .add(self.field.exp(a as i64), self.field.exp(b as i64));
                self.field.log(s).ok()
            }
        }
    }

    fn check_point(&self, p: u32) -> Result<u32, GeometryError> {
        if p < self.n {
            Ok(p)
        } else {
            Err(GeometryError::PointOutOfRange {
                point: p,
                n: self.n,
            })
        }
    }

    /// The unique line through two distinct points (given as exponents).
    pub fn line_through(&self, a: u32, b: u32) -> Result<PointSet, GeometryError> {
        let (a, b) = (a % self.n, b % self.n);
        if a == b {
            return Err(GeometryError::Degenerate(a, b));
        }
        Ok(PointSet::new(self.line_points(a, b)))
    }

    fn line_points(&self, a: u32, b: u32) -> impl Iterator<Item = u32> + '_ {
        let n = self.n;
        [a, b]
            .into_iter()
            .chain(self.subfield_exponents().map(move |c| {
                self.log_sum(a, b + c)
                    .expect("independent vectors never sum to zero")
                    % n
            }))
    }

    /// All lines in canonical (sorted) form, in ascending order.
    pub fn enumerate_lines(&self) -> Vec<PointSet> {
        let n = self.n;
        let mut lines: Vec<PointSet> = (0..n)
            .into_par_iter()
            .flat_map_iter(|a| {
                (a + 1..n).filter_map(move |b| {
                    let line = PointSet::new(self.line_points(a, b));
                    // keep each line once: at its two smallest points
                    (line.0[0] == a && line.0[1] == b).then_some(line)
                })
            })
            .collect();
        lines.sort_unstable();
        lines
    }

    /// Closure test: every line through two members stays inside the set.
    pub fn is_subspace(&self, set: &PointSet) -> bool {
        let mut member = vec![false; self.n as usize];
        for &p in set.points() {
            member[p as usize] = true;
        }
        let pts = set.points();
        pts.iter().enumerate().all(|(i, &a)| {
            pts[i + 1..]
                .iter()
                .all(|&b| self.line_points(a, b).all(|x| member[x as usize]))
        })
    }

    /// True if `set` is a d-flat.
    pub fn is_flat(&self, set: &PointSet, d: u32) -> bool {
        set.len() as u64 == theta(d, self.q as u64) && self.is_subspace(set)
    }

    /// The d-spread fixed by `⟨φ^Λ⟩`, Λ = θ(k)/θ(d).
    pub fn singer_spread(&self, d: u32) -> Result<Spread, GeometryError> {
        if d < 1 || d >= self.k || !(self.k + 1).is_multiple_of(d + 1) {
            return Err(GeometryError::SpreadDimension { d, k: self.k });
        }
        let t = theta(d, self.q as u64) as u32;
        let lambda = self.n / t;
        let elements: Vec<PointSet> = (0..lambda)
            .map(|j| PointSet::new((0..t).map(|i| j + lambda * i)))
            .collect();
        if let Some(bad) = elements.iter().position(|e| !self.is_flat(e, d)) {
            return Err(GeometryError::SpreadElementNotFlat {
                index: bad as u32,
                d,
            });
        }
        Ok(Spread {
            d,
            lambda,
            elements,
        })
    }

    /// Orbit of `set` under `e ↦ e + Λ`.
    pub fn h_orbit(&self, set: &PointSet, lambda: u32) -> Result<Orbit, GeometryError> {
        if lambda == 0 || !self.n.is_multiple_of(lambda) {
            return Err(GeometryError::NotDivisor { lambda, n: self.n });
        }
        let mut members = vec![set.clone()];
        loop {
            let next = members.last().unwrap().shifted(lambda, self.n);
            if &next == set {
                break;
            }
            members.push(next);
        }
        let full = members.len() as u32 == self.n / lambda;
        Ok(Orbit { members, full })
    }

    pub fn incidence_array(
        &self,
        set: &PointSet,
        lambda: u32,
        t: u32,
    ) -> Result<IncidenceArray, GeometryError> {
        if lambda as u64 * t as u64 != self.n as u64 {
            return Err(GeometryError::ShapeMismatch {
                lambda,
                t,
                n: self.n,
            });
        }
        let mut bits = vec![false; self.n as usize];
        for &p in set.points() {
            self.check_point(p)?;
            let (i, j) = (p % lambda, p / lambda);
            bits[(i * t + j) as usize] = true;
        }
        Ok(IncidenceArray {
            rows: lambda,
            cols: t,
            bits,
        })
    }

    /// Plane spanned by a line and a point off it (PG(3, q) only).
    pub fn plane_through_line(
        &self,
        ell: &PointSet,
        third: u32,
    ) -> Result<PointSet, GeometryError> {
        if self.k != 3 {
            return Err(GeometryError::NeedsThreeSpace(self.k));
        }
        let third = self.check_point(third)?;
        if ell.len() as u32 != self.q + 1 || !self.is_subspace(ell) {
            return Err(GeometryError::NotALine);
        }
        if ell.contains(third) {
            return Err(GeometryError::PointOnLine(third));
        }
        let mut pts: HashSet<u32> = ell.points().iter().copied().collect();
        for &x in ell.points() {
            pts.extend(self.line_points(third, x));
        }
        Ok(PointSet::new(pts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_counts() {
        assert_eq!(SingerGeometry::new(2, 3).unwrap().num_points(), 15);
        assert_eq!(SingerGeometry::new(3, 3).unwrap().num_points(), 40);
        assert_eq!(SingerGeometry::new(2, 5).unwrap().num_points(), 63);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            SingerGeometry::new(6, 3).unwrap_err(),
            GeometryError::NotPrimePower(6)
        );
        assert_eq!(
            SingerGeometry::new(2, 1).unwrap_err(),
            GeometryError::DimensionTooSmall(1)
        );
        assert!(matches!(
            SingerGeometry::with_limit(3, 5, 100),
            Err(GeometryError::Field(FieldError::TooLarge { .. }))
        ));
    }

    #[test]
    fn lines_have_q_plus_one_points_and_are_symmetric() {
        let g = SingerGeometry::new(3, 3).unwrap();
        for a in 0..g.num_points() {
            for b in 0..g.num_points() {
                if a == b {
                    assert!(g.line_through(a, b).is_err());
                    continue;
                }
                let l = g.line_through(a, b).unwrap();
                assert_eq!(l.len(), 4);
                assert_eq!(l, g.line_through(b, a).unwrap());
                // representatives differing by the subfield give the same line
                assert_eq!(l, g.line_through(a + 40, b + 80).unwrap());
            }
        }
    }

    #[test]
    fn every_pair_on_exactly_one_line() {
        for (q, k) in [(2, 3), (3, 3), (2, 5), (4, 2), (2, 2)] {
            let g = SingerGeometry::new(q, k).unwrap();
            let n = g.num_points() as usize;
            let lines = g.enumerate_lines();
            let mut count = vec![0u32; n * n];
            for l in &lines {
                for &a in l.points() {
                    for &b in l.points() {
                        if a != b {
                            count[a as usize * n + b as usize] += 1;
                        }
                    }
                }
            }
            for a in 0..n {
                for b in 0..n {
                    if a != b {
                        assert_eq!(count[a * n + b], 1, "PG({k},{q}) pair ({a},{b})");
                    }
                }
            }
        }
    }

    #[test]
    fn line_counts() {
        assert_eq!(
            SingerGeometry::new(2, 3).unwrap().enumerate_lines().len(),
            35
        );
        assert_eq!(
            SingerGeometry::new(3, 3).unwrap().enumerate_lines().len(),
            130
        );
        assert_eq!(
            SingerGeometry::new(2, 5).unwrap().enumerate_lines().len(),
            651
        );
    }

    #[test]
    fn spreads() {
        let g = SingerGeometry::new(2, 3).unwrap();
        let s = g.singer_spread(1).unwrap();
        assert_eq!(s.lambda, 5);
        assert_eq!(s.elements.len(), 5);
        assert_eq!(s.elements[0].points(), &[0, 5, 10]);
        for e in &s.elements {
            assert_eq!(&g.line_through(e.points()[0], e.points()[1]).unwrap(), e);
        }

        let g = SingerGeometry::new(2, 5).unwrap();
        let s = g.singer_spread(2).unwrap();
        assert_eq!(s.lambda, 9);
        assert!(s.elements.iter().all(|e| e.len() == 7 && g.is_flat(e, 2)));
        let mut all: Vec<u32> = s
            .elements
            .iter()
            .flat_map(|e| e.points().to_vec())
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..63).collect::<Vec<_>>());

        let g = SingerGeometry::new(3, 3).unwrap();
        let s = g.singer_spread(1).unwrap();
        assert_eq!((s.lambda, s.element_size()), (10, 4));

        assert!(matches!(
            SingerGeometry::new(2, 4).unwrap().singer_spread(1),
            Err(GeometryError::SpreadDimension { .. })
        ));
        assert!(matches!(
            g.singer_spread(3),
            Err(GeometryError::SpreadDimension { .. })
        ));
    }

    #[test]
    fn orbits() {
        let g = SingerGeometry::new(2, 3).unwrap();
        let s = g.singer_spread(1).unwrap();
        for e in &s.elements {
            assert_eq!(g.h_orbit(e, 5).unwrap().members.len(), 1);
        }
        let non_spread: Vec<_> = g
            .enumerate_lines()
            .into_iter()
            .filter(|l| !s.contains_set(l))
            .collect();
        assert_eq!(non_spread.len(), 30);
        for l in &non_spread {
            let o = g.h_orbit(l, 5).unwrap();
            assert_eq!(o.members.len(), 3);
            assert!(o.full);
        }
        let single = g.h_orbit(&PointSet::new([3, 7]), 15).unwrap();
        assert_eq!(single.members.len(), 1);
        assert!(g.h_orbit(&PointSet::new([0]), 4).is_err());
    }

    #[test]
    fn incidence_arrays() {
        let g = SingerGeometry::new(2, 3).unwrap();
        let a = g.incidence_array(&PointSet::new([0]), 5, 3).unwrap();
        assert_eq!(a.weight(), 1);
        assert!(a.get(0, 0));

        let a = g.incidence_array(&PointSet::new([0, 5, 10]), 5, 3).unwrap();
        for j in 0..3 {
            assert!(a.get(0, j));
            for i in 1..5 {
                assert!(!a.get(i, j));
            }
        }

        let l = g.line_through(1, 2).unwrap();
        let a = g.incidence_array(&l, 5, 3).unwrap();
        let b = g.incidence_array(&l.shifted(5, 15), 5, 3).unwrap();
        assert_eq!(a.column_shifted(), b);
        assert_eq!(a.weight(), 3);

        assert!(matches!(
            g.incidence_array(&l, 4, 3),
            Err(GeometryError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn plane_through_spread_line() {
        let g = SingerGeometry::new(2, 3).unwrap();
        let s = g.singer_spread(1).unwrap();
        let ell = &s.elements[0];
        let plane = g.plane_through_line(ell, 1).unwrap();
        assert_eq!(plane.len(), 7);
        assert!(ell.is_subset(&plane));
        assert!(g.is_flat(&plane, 2));
        let mut meets: Vec<usize> = s
            .elements
            .iter()
            .map(|e| e.intersection_len(&plane))
            .collect();
        meets.sort_unstable();
        assert_eq!(meets, vec![1, 1, 1, 1, 3]);
        assert_eq!(
            g.plane_through_line(ell, 5).unwrap_err(),
            GeometryError::PointOnLine(5)
        );
    }

    #[test]
    fn non_spread_lines_meet_spread_elements_at_most_once() {
        for (q, k, d) in [(2, 3, 1), (3, 3, 1), (2, 5, 1), (2, 5, 2)] {
            let g = SingerGeometry::new(q, k).unwrap();
            let s = g.singer_spread(d).unwrap();
            for l in g.enumerate_lines().iter().filter(|l| !s.contains_set(l)) {
                let mut seen = HashSet::new();
                for &p in l.points() {
                    assert!(seen.insert(s.element_of(p)));
                }
            }
        }
    }

    #[test]
    fn on_demand_sums_match_zech() {
        let g = SingerGeometry::new(3, 3).unwrap();
        let mut h = g.clone();
        h.zech = None;
        for a in 0..80 {
            for b in 0..80 {
                assert_eq!(g.log_sum(a, b), h.log_sum(a, b));
            }
        }
    }
}
