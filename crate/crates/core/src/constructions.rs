//! Ideal 2-D codes from line and conic orbits of a Singer spread.

use std::collections::HashSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::conics::{anisotropic_form, build_chart, conic_family, ConicError, Subfield};
use crate::field::DEFAULT_TABLE_LIMIT;
use crate::geometry::{theta, GeometryError, PointSet, SingerGeometry, Spread};
use crate::ooc::{Code, CodeShape, Codeword, OocError};

/// Default largest `q` for the conic construction.
pub const DEFAULT_MAX_CONIC_Q: u32 = 13;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Conic(#[from] ConicError),
    #[error(transparent)]
    Code(#[from] OocError),
    #[error("point set {0:?} has a short orbit of length {1}")]
    ShortOrbit(Vec<u32>, usize),
    #[error("built {got} codewords, expected {want}")]
    SizeMismatch { got: usize, want: u64 },
    #[error("q = {q} exceeds the conic construction limit {limit}")]
    QTooLarge { q: u32, limit: u32 },
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_field_size: u64,
    pub max_conic_q: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_field_size: DEFAULT_TABLE_LIMIT,
            max_conic_q: DEFAULT_MAX_CONIC_Q,
        }
    }
}

/// `θ(k)/(θ(d)(q+1)) · [θ(k−1) − θ(d−1)]`, with θ(0) = 1 and θ(−1) = 0.
pub fn spread_line_code_size(q: u64, k: u32, d: u32) -> u64 {
    let th = |i: i64| if i < 0 { 0 } else { theta(i as u32, q) };
    th(k as i64) * (th(k as i64 - 1) - th(d as i64 - 1)) / (th(d as i64) * (q + 1))
}

/// `q(q²+1)(q²−q+1)`.
pub fn conic_line_code_size(q: u64) -> u64 {
    q * (q * q + 1) * (q * q - q + 1)
}

/// Groups point sets into full `⟨φ^Λ⟩`-orbits and returns one codeword per
/// orbit, in input order of first appearance.
fn orbit_words<'a, I>(
    geom: &SingerGeometry,
    spread: &Spread,
    sets: I,
) -> Result<Vec<Codeword>, ConstructionError>
where
    I: IntoIterator<Item = &'a PointSet>,
{
    let n = geom.num_points();
    let lambda = spread.lambda;
    let t = n / lambda;
    let mut seen: HashSet<PointSet> = HashSet::new();
    let mut reps = Vec::new();
    for set in sets {
        if seen.contains(set) {
            continue;
        }
        let orbit = geom.h_orbit(set, lambda)?;
        if !orbit.full {
            return Err(ConstructionError::ShortOrbit(
                set.points().to_vec(),
                orbit.members.len(),
            ));
        }
        reps.push(orbit.representative().clone());
        seen.extend(orbit.members);
    }
    reps.par_iter()
        .map(|s| Ok(geom.incidence_array(s, lambda, t)?.to_codeword()?))
        .collect()
}

/// Lines of `geom` not inside any spread element.
fn non_spread_lines(geom: &SingerGeometry, spread: &Spread) -> Vec<PointSet> {
    geom.enumerate_lines()
        .into_iter()
        .filter(|l| !spread.contains_set(l))
        .collect()
}

/// The ideal `(θ(k)/θ(d) × θ(d), q+1, 0, 1)` code whose words are the
/// orbits of lines not contained in a spread element.
pub fn construct_spread_line_code(q: u32, k: u32, d: u32) -> Result<Code, ConstructionError> {
    construct_spread_line_code_with(q, k, d, &Limits::default())
}

pub fn construct_spread_line_code_with(
    q: u32,
    k: u32,
    d: u32,
    limits: &Limits,
) -> Result<Code, ConstructionError> {
    let geom = SingerGeometry::with_limit(q, k, limits.max_field_size)?;
    let spread = geom.singer_spread(d)?;
    let lines = non_spread_lines(&geom, &spread);
    let words = orbit_words(&geom, &spread, &lines)?;
    let want = spread_line_code_size(q as u64, k, d);
    if words.len() as u64 != want {
        return Err(ConstructionError::SizeMismatch {
            got: words.len(),
            want,
        });
    }
    let shape = CodeShape::new(vec![spread.lambda, geom.num_points() / spread.lambda])?;
    log::info!(
        "spread-line code PG({k},{q}) d={d}: {} words of shape {shape}",
        words.len()
    );
    Ok(Code::new(shape, q + 1, 0, 1, words))
}

/// Conic and line orbits in PG(3, q): an ideal `(q²+1 × q+1, q+1, 0, 2)` code.
///
/// Through each spread line ℓ the plane spanned with the least point off ℓ
/// is coordinatized with ℓ at infinity and contributes its whole conic
/// family; the non-spread line orbits are added on top.
pub fn construct_conic_line_code(q: u32) -> Result<Code, ConstructionError> {
    construct_conic_line_code_with(q, &Limits::default())
}

pub fn construct_conic_line_code_with(q: u32, limits: &Limits) -> Result<Code, ConstructionError> {
    if q > limits.max_conic_q {
        return Err(ConstructionError::QTooLarge {
            q,
            limit: limits.max_conic_q,
        });
    }
    let geom = SingerGeometry::with_limit(q, 3, limits.max_field_size)?;
    let spread = geom.singer_spread(1)?;
    let sub = Subfield::of(&geom);
    let form = anisotropic_form(&sub)?;
    let n = geom.num_points();

    let families: Vec<Vec<PointSet>> = spread
        .elements
        .par_iter()
        .map(|ell| -> Result<Vec<PointSet>, ConstructionError> {
            let third = (0..n)
                .find(|&p| !ell.contains(p))
                .expect("ℓ is not everything");
            let plane = geom.plane_through_line(ell, third)?;
            let chart = build_chart(&geom, &sub, &plane, ell)?;
            Ok(conic_family(&sub, &chart, form)?.members)
        })
        .collect::<Result<_, _>>()?;
    let conics: Vec<PointSet> = families.into_iter().flatten().collect();
    let mut words = orbit_words(&geom, &spread, &conics)?;
    let lines = non_spread_lines(&geom, &spread);
    words.extend(orbit_words(&geom, &spread, &lines)?);

    let want = conic_line_code_size(q as u64);
    if words.len() as u64 != want {
        return Err(ConstructionError::SizeMismatch {
            got: words.len(),
            want,
        });
    }
    let shape = CodeShape::new(vec![spread.lambda, q + 1])?;
    log::info!(
        "conic-line code q={q}: {} words of shape {shape}",
        words.len()
    );
    Ok(Code::new(shape, q + 1, 0, 2, words))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ooc::validate_code;

    #[test]
    fn size_formulas() {
        assert_eq!(spread_line_code_size(2, 3, 1), 10);
        assert_eq!(spread_line_code_size(3, 3, 1), 30);
        assert_eq!(spread_line_code_size(2, 5, 2), 84);
        assert_eq!(conic_line_code_size(2), 30);
        assert_eq!(conic_line_code_size(4), 884);
    }

    #[test]
    fn smallest_spread_line_code() {
        let c = construct_spread_line_code(2, 3, 1).unwrap();
        assert_eq!(c.shape().dims(), &[5, 3]);
        assert_eq!(c.len(), 10);
        let r = validate_code(&c).unwrap();
        assert_eq!((r.max_offpeak_auto, r.max_cross), (0, 1));
        assert!(r.is_ideal && r.passes);
        let f = r.sections.get(&[1]).unwrap();
        assert!(f.amops && !f.sps);
    }

    #[test]
    fn smallest_conic_line_code() {
        let c = construct_conic_line_code(2).unwrap();
        assert_eq!(c.len(), 30);
        let r = validate_code(&c).unwrap();
        assert_eq!((r.max_offpeak_auto, r.max_cross), (0, 2));
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(
            construct_spread_line_code(2, 4, 1),
            Err(ConstructionError::Geometry(
                GeometryError::SpreadDimension { .. }
            ))
        ));
        assert!(matches!(
            construct_conic_line_code(16),
            Err(ConstructionError::QTooLarge { q: 16, limit: 13 })
        ));
        let tight = Limits {
            max_field_size: 50,
            ..Limits::default()
        };
        assert!(construct_spread_line_code_with(3, 3, 1, &tight).is_err());
    }
}
