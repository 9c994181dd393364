//! Conic families in a plane of PG(3, q).
//!
//! A plane through a line ℓ is given affine coordinates with ℓ at infinity.
//! The family consists of the level sets `Q(P − v) = s` of one anisotropic
//! binary quadratic form `Q`, over every translation `v ∈ GF(q)²` and level
//! `s ∈ GF(q)*`. Each level set is a conic with no point at infinity, two
//! level sets with the same centre are disjoint, and two with distinct
//! centres meet only on the line where their polar forms agree.

use rayon::prelude::*;
use thiserror::Error;

use crate::field::Element;
use crate::geometry::{GeometryError, PointSet, SingerGeometry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConicError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("line is not contained in the plane")]
    LineNotInPlane,
    #[error("plane has {got} points, expected {want}")]
    NotAPlane { got: usize, want: usize },
    #[error("chart covers {got} affine points, expected {want}")]
    BadChart { got: usize, want: usize },
    #[error("no anisotropic binary quadratic form over GF({0})")]
    NoAnisotropicForm(u32),
    #[error("member {index} has {got} points, expected {want}")]
    MemberSize {
        index: usize,
        got: usize,
        want: usize,
    },
    #[error("members {0} and {1} share {2} points")]
    PairwiseExcess(usize, usize, usize),
    #[error("family has {got} members, expected {want}")]
    FamilySize { got: usize, want: usize },
    #[error("member {0} meets the distinguished line")]
    MeetsLine(usize),
}

/// GF(q) realized inside the ambient field of a Singer geometry.
///
/// Elements are indices: 0 is zero, `j + 1` is `β^{θ(k)·j}`.
#[derive(Debug, Clone)]
pub struct Subfield {
    q: usize,
    elements: Vec<Element>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
}

impl Subfield {
    pub fn of(geom: &SingerGeometry) -> Self {
        let f = geom.field();
        let elements = geom.subfield_elements();
        let q = elements.len();
        let index = |x: Element| {
            elements
                .iter()
                .position(|&e| e == x)
                .expect("subfield is closed") as u16
        };
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for i in 0..q {
            for j in 0..q {
                add[i * q + j] = index(f.add(elements[i], elements[j]));
                mul[i * q + j] = index(f.mul(elements[i], elements[j]));
            }
        }
        let neg = (0..q).map(|i| index(f.neg(elements[i]))).collect();
        Self {
            q,
            elements,
            add,
            mul,
            neg,
        }
    }

    pub fn order(&self) -> usize {
        self.q
    }

    /// Ambient field element for an index.
    pub fn element(&self, i: usize) -> Element {
        self.elements[i]
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b] as usize
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b] as usize
    }

    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }
}

/// `Q(x, y) = a x² + b xy + c y²`, coefficients as subfield indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticForm {
    pub a: usize,
    pub b: usize,
    pub c: usize,
}

impl QuadraticForm {
    pub fn eval(&self, k: &Subfield, x: usize, y: usize) -> usize {
        let xx = k.mul(x, x);
        let xy = k.mul(x, y);
        let yy = k.mul(y, y);
        k.add(
            k.add(k.mul(self.a, xx), k.mul(self.b, xy)),
            k.mul(self.c, yy),
        )
    }

    pub fn is_anisotropic(&self, k: &Subfield) -> bool {
        let q = k.order();
        (0..q)
            .flat_map(|x| (0..q).map(move |y| (x, y)))
            .all(|(x, y)| (x == 0 && y == 0) || self.eval(k, x, y) != 0)
    }
}

/// Least anisotropic form in lexicographic order of `(a, b, c)`.
pub fn anisotropic_form(k: &Subfield) -> Result<QuadraticForm, ConicError> {
    let q = k.order();
    (0..q)
        .flat_map(|a| (0..q).flat_map(move |b| (0..q).map(move |c| QuadraticForm { a, b, c })))
        .find(|f| f.is_anisotropic(k))
        .ok_or(ConicError::NoAnisotropicForm(q as u32))
}

/// Affine coordinates on a plane with a distinguished line at infinity.
#[derive(Debug, Clone)]
pub struct PlaneChart {
    pub plane: PointSet,
    pub ell: PointSet,
    pub origin: u32,
    pub basis: (u32, u32),
    q: usize,
    /// `points[x * q + y]` is the point with coordinates `(x, y)`.
    points: Vec<u32>,
}

impl PlaneChart {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn point(&self, x: usize, y: usize) -> u32 {
        self.points[x * self.q + y]
    }

    pub fn image(&self) -> PointSet {
        PointSet::new(self.points.iter().copied())
    }
}

pub fn build_chart(
    geom: &SingerGeometry,
    sub: &Subfield,
    plane: &PointSet,
    ell: &PointSet,
) -> Result<PlaneChart, ConicError> {
    let q = sub.order();
    let want = q * q + q + 1;
    if plane.len() != want || !geom.is_subspace(plane) {
        return Err(ConicError::NotAPlane {
            got: plane.len(),
            want,
        });
    }
    if ell.len() != q + 1 || !geom.is_subspace(ell) {
        return Err(GeometryError::NotALine.into());
    }
    if !ell.is_subset(plane) {
        return Err(ConicError::LineNotInPlane);
    }
    let origin = *plane
        .points()
        .iter()
        .find(|&&p| !ell.contains(p))
        .expect("plane strictly contains the line");
    let (b1, b2) = (ell.points()[0], ell.points()[1]);
    let f = geom.field();
    let (vo, v1, v2) = (f.exp(origin as i64), f.exp(b1 as i64), f.exp(b2 as i64));
    let mut points = Vec::with_capacity(q * q);
    for x in 0..q {
        for y in 0..q {
            let s = f.add(
                vo,
                f.add(f.mul(sub.element(x), v1), f.mul(sub.element(y), v2)),
            );
            points.push(geom.point_of(s)?);
        }
    }
    let chart = PlaneChart {
        plane: plane.clone(),
        ell: ell.clone(),
        origin,
        basis: (b1, b2),
        q,
        points,
    };
    let image = chart.image();
    if image.len() != q * q || image.intersection_len(ell) != 0 || !image.is_subset(plane) {
        return Err(ConicError::BadChart {
            got: image.len(),
            want: q * q,
        });
    }
    Ok(chart)
}

/// Translation and level of one family member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConicParams {
    pub centre: (usize, usize),
    pub level: usize,
}

#[derive(Debug, Clone)]
pub struct ConicFamily {
    pub form: QuadraticForm,
    pub members: Vec<PointSet>,
    pub params: Vec<ConicParams>,
}

/// Builds every level set `Q(P − v) = s` and checks the family invariants.
pub fn conic_family(
    sub: &Subfield,
    chart: &PlaneChart,
    form: QuadraticForm,
) -> Result<ConicFamily, ConicError> {
    let q = sub.order();
    let mut members = Vec::with_capacity(q * q * (q - 1));
    let mut params = Vec::with_capacity(members.capacity());
    for vx in 0..q {
        for vy in 0..q {
            let mut by_level: Vec<Vec<u32>> = vec![Vec::new(); q];
            for x in 0..q {
                for y in 0..q {
                    let dx = sub.add(x, sub.neg(vx));
                    let dy = sub.add(y, sub.neg(vy));
                    by_level[form.eval(sub, dx, dy)].push(chart.point(x, y));
                }
            }
            for (level, pts) in by_level.into_iter().enumerate().skip(1) {
                members.push(PointSet::new(pts));
                params.push(ConicParams {
                    centre: (vx, vy),
                    level,
                });
            }
        }
    }
    let family = ConicFamily {
        form,
        members,
        params,
    };
    verify_family(&family, &chart.ell, q)?;
    Ok(family)
}

/// Size, disjointness from ℓ, and pairwise intersections ≤ 2.
pub fn verify_family(family: &ConicFamily, ell: &PointSet, q: usize) -> Result<(), ConicError> {
    let want = q * q * q - q * q;
    if family.members.len() != want {
        return Err(ConicError::FamilySize {
            got: family.members.len(),
            want,
        });
    }
    for (index, m) in family.members.iter().enumerate() {
        if m.len() != q + 1 {
            return Err(ConicError::MemberSize {
                index,
                got: m.len(),
                want: q + 1,
            });
        }
        if m.intersection_len(ell) != 0 {
            return Err(ConicError::MeetsLine(index));
        }
    }
    let members = &family.members;
    let excess = (0..members.len()).into_par_iter().find_map_first(|i| {
        (i + 1..members.len()).find_map(|j| {
            let c = members[i].intersection_len(&members[j]);
            (c > 2).then_some(ConicError::PairwiseExcess(i, j, c))
        })
    });
    match excess {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
