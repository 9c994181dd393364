//! Shape-changing code transformations.
//!
//! `reshape` refactors the spatial axes without touching time, so every
//! correlation value is preserved. `fold_time` trades a factor `T1` of the
//! time axis for a factor of the first spatial axis and multiplies the code
//! size by `T1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::bounds::{self, BoundError, BoundKind};
use crate::ooc::{Code, CodeShape, Codeword, OocError, Pulse, VerifiedCode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("spatial product {new} does not match {old}")]
    ProductMismatch { old: u64, new: u64 },
    #[error("T1 = {t1} does not divide T = {t}")]
    NotDivisor { t1: u32, t: u32 },
    #[error("folding produced {got} distinct words, expected {want}: some source word has a short orbit")]
    Collision { got: usize, want: usize },
    #[error(transparent)]
    Shape(#[from] OocError),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

/// Flat spatial index `i1 + Λ1·i2 + Λ1Λ2·i3 + …` (first axis fastest).
fn flat_index(coords: &[u32], dims: &[u32]) -> u64 {
    coords
        .iter()
        .zip(dims)
        .rev()
        .fold(0u64, |acc, (&c, &d)| acc * d as u64 + c as u64)
}

fn unflatten(mut flat: u64, dims: &[u32]) -> Vec<u32> {
    dims.iter()
        .map(|&d| {
            let c = (flat % d as u64) as u32;
            flat /= d as u64;
            c
        })
        .collect()
}

/// The word re-expressed over `target`, pulse for pulse, without
/// canonicalization.
pub fn reshape_word(word: &Codeword, target: &CodeShape) -> Codeword {
    let src = word.shape();
    let pulses = word
        .pulses()
        .iter()
        .map(|p| {
            let coords = src.cell_coords(p.cell);
            let flat = flat_index(&coords, src.spatial());
            Pulse {
                cell: target.cell_key(&unflatten(flat, target.spatial())),
                time: p.time,
            }
        })
        .collect();
    Codeword::from_parts(target.clone(), pulses)
}

pub fn reshape(code: &Code, new_spatial: &[u32]) -> Result<Code, TransformError> {
    let old = code.shape().cells();
    let new: u64 = new_spatial.iter().map(|&d| d as u64).product();
    if old != new {
        return Err(TransformError::ProductMismatch { old, new });
    }
    let target = CodeShape::with_time(new_spatial, code.shape().time_len())?;
    let words = code
        .words()
        .iter()
        .map(|w| reshape_word(w, &target))
        .collect();
    Ok(Code::new(
        target,
        code.weight(),
        code.lambda_a(),
        code.lambda_c(),
        words,
    ))
}

/// Target shape of `fold_time`: `T1·Λ1 × Λ2 × … × T/T1`.
pub fn folded_shape(shape: &CodeShape, t1: u32) -> Result<CodeShape, TransformError> {
    let t = shape.time_len();
    if t1 == 0 || !t.is_multiple_of(t1) {
        return Err(TransformError::NotDivisor { t1, t });
    }
    let mut spatial = shape.spatial().to_vec();
    if spatial.is_empty() {
        spatial.push(t1);
    } else {
        spatial[0] *= t1;
    }
    Ok(CodeShape::with_time(&spatial, t / t1)?)
}

/// Folds one word: time `j = t1 + T1·t2` moves to row `i1 + Λ1·t1`, time `t2`.
pub fn fold_word(word: &Codeword, t1: u32) -> Result<Codeword, TransformError> {
    let src = word.shape();
    let target = folded_shape(src, t1)?;
    let lambda1 = src.spatial().first().copied().unwrap_or(1);
    let pulses = word
        .pulses()
        .iter()
        .map(|p| {
            let mut coords = src.cell_coords(p.cell);
            let (slot, t2) = (p.time % t1, p.time / t1);
            if coords.is_empty() {
                coords.push(slot);
            } else {
                coords[0] += lambda1 * slot;
            }
            Pulse {
                cell: target.cell_key(&coords),
                time: t2,
            }
        })
        .collect();
    Ok(Codeword::from_parts(target, pulses))
}

/// Each word contributes its folded time shifts by `0..T1`; the result
/// claims `λa' = λa` and `λc' = max(λa, λc)`.
pub fn fold_time(code: &Code, t1: u32) -> Result<Code, TransformError> {
    let target = folded_shape(code.shape(), t1)?;
    let mut words = Vec::with_capacity(code.len() * t1 as usize);
    for w in code.words() {
        for r in 0..t1 {
            words.push(fold_word(&w.time_shift(r as i64), t1)?);
        }
    }
    let folded = Code::new(
        target,
        code.weight(),
        code.lambda_a(),
        code.lambda_a().max(code.lambda_c()),
        words,
    );
    let mut distinct = folded.words().to_vec();
    distinct.dedup();
    if distinct.len() != folded.len() {
        return Err(TransformError::Collision {
            got: distinct.len(),
            want: folded.len(),
        });
    }
    Ok(folded)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transform {
    Reshape(Vec<u32>),
    Fold(u32),
}

/// Whether J-optimality is guaranteed to survive a transform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferReport {
    pub transform: Transform,
    pub source_bound: BigInt,
    pub source_j_optimal: bool,
    pub target_shape: CodeShape,
    pub target_size: u64,
    pub target_bound: BigInt,
    /// `(f − J, threshold, f − J < threshold)` when a gap condition applies.
    pub gap: Option<(BigRational, BigRational, bool)>,
    pub guaranteed: bool,
    /// The transformed code would meet the target bound.
    pub achieves_target: bool,
}

/// Evaluates the transfer conditions for `transform` against bound `kind`.
///
/// A false `guaranteed` only means the sufficient condition failed; it says
/// nothing about non-optimality.
pub fn optimality_transfer(
    code: &VerifiedCode,
    transform: &Transform,
    kind: &BoundKind,
) -> Result<TransferReport, TransformError> {
    let c = code.code();
    let source = bounds::optimality_report(code, kind)?;
    let w = c.weight() as u64;
    let lambda_nd = c.lambda_a().max(c.lambda_c()) as u64;
    let (target_shape, target_size, target_bound, gap, guaranteed) = match transform {
        Transform::Reshape(dims) => {
            let cells: u64 = dims.iter().map(|&d| d as u64).product();
            if cells != c.shape().cells() {
                return Err(TransformError::ProductMismatch {
                    old: c.shape().cells(),
                    new: cells,
                });
            }
            let shape = CodeShape::with_time(dims, c.shape().time_len())?;
            match kind {
                // these bounds see only N and T
                BoundKind::Nd | BoundKind::Ideal => (
                    shape,
                    source.size,
                    source.bound.clone(),
                    None,
                    source.j_optimal,
                ),
                BoundKind::Amops(axes) => {
                    let b = bounds::johnson_amops(&shape, w, c.lambda_c() as u64, axes)
                        .map(|b| b.nested.value)
                        .unwrap_or_else(|_| source.bound.clone());
                    (shape, source.size, b, None, false)
                }
            }
        }
        Transform::Fold(t1) => {
            let shape = folded_shape(c.shape(), *t1)?;
            let size = source.size * *t1 as u64;
            match kind {
                BoundKind::Nd => {
                    let nd = bounds::johnson_nd(c.shape(), w, lambda_nd)?;
                    let diff =
                        &nd.nested.f_exact - BigRational::from_integer(nd.nested.value.clone());
                    let threshold = BigRational::new(BigInt::one(), BigInt::from(*t1));
                    let holds = diff < threshold;
                    let target = bounds::johnson_nd(&shape, w, lambda_nd)?;
                    // the gap identity is about the nested branch
                    let nested_binding = nd.best() == &nd.nested.value;
                    let ok = source.j_optimal && holds && nested_binding;
                    (
                        shape,
                        size,
                        target.best().clone(),
                        Some((diff, threshold, holds)),
                        ok,
                    )
                }
                BoundKind::Ideal => {
                    let b = bounds::johnson_ideal(&shape, w, lambda_nd)?.nested.value;
                    (shape, size, b, None, false)
                }
                BoundKind::Amops(_) => (shape, size, source.bound.clone(), None, false),
            }
        }
    };
    Ok(TransferReport {
        transform: transform.clone(),
        source_bound: source.bound,
        source_j_optimal: source.j_optimal,
        achieves_target: BigInt::from(target_size) == target_bound,
        target_shape,
        target_size,
        target_bound,
        gap,
        guaranteed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ooc::correlation_profile;

    fn sample() -> Code {
        let shape = CodeShape::new(vec![6, 4]).unwrap();
        let words = [
            vec![vec![0, 0], vec![3, 1], vec![5, 3]],
            vec![vec![1, 0], vec![2, 2], vec![4, 1]],
        ]
        .into_iter()
        .map(|c| Codeword::from_coords(shape.clone(), c).unwrap())
        .collect();
        Code::new(shape, 3, 1, 1, words)
    }

    #[test]
    fn flat_index_first_axis_fastest() {
        assert_eq!(flat_index(&[1, 2], &[5, 3]), 11);
        assert_eq!(unflatten(11, &[5, 3]), vec![1, 2]);
    }

    #[test]
    fn reshape_identity_and_round_trip() {
        let c = sample();
        assert_eq!(reshape(&c, &[6]).unwrap(), c);
        let r = reshape(&c, &[2, 3]).unwrap();
        assert_eq!(r.shape().dims(), &[2, 3, 4]);
        assert_eq!(reshape(&r, &[6]).unwrap(), c);
        assert!(matches!(
            reshape(&c, &[4]),
            Err(TransformError::ProductMismatch { old: 6, new: 4 })
        ));
    }

    #[test]
    fn reshape_keeps_profiles() {
        let c = sample();
        let target = CodeShape::new(vec![3, 2, 4]).unwrap();
        for a in c.words() {
            for b in c.words() {
                assert_eq!(
                    correlation_profile(a, b).unwrap(),
                    correlation_profile(&reshape_word(a, &target), &reshape_word(b, &target))
                        .unwrap()
                );
            }
        }
    }

    #[test]
    fn fold_identity() {
        let c = sample();
        assert_eq!(fold_time(&c, 1).unwrap(), c);
        assert!(matches!(
            fold_time(&c, 3),
            Err(TransformError::NotDivisor { t1: 3, t: 4 })
        ));
    }

    #[test]
    fn fold_shift_correspondence() {
        let c = sample();
        let w = &c.words()[0];
        for t1 in [2, 4] {
            let a = fold_word(&w.time_shift(t1 as i64), t1).unwrap();
            let b = fold_word(w, t1).unwrap().time_shift(1);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn fold_one_d() {
        let shape = CodeShape::new(vec![6]).unwrap();
        let w = Codeword::from_coords(shape.clone(), [vec![0], vec![1], vec![3]]).unwrap();
        let code = Code::new(shape, 3, 1, 1, vec![w]);
        let f = fold_time(&code, 3).unwrap();
        assert_eq!(f.shape().dims(), &[3, 2]);
        assert_eq!(f.len(), 3);
    }

    #[test]
    fn fold_collision_detected() {
        let shape = CodeShape::new(vec![1, 4]).unwrap();
        // period-2 word: shifting by 2 maps it to itself
        let w = Codeword::from_coords(shape.clone(), [vec![0, 0], vec![0, 2]]).unwrap();
        let code = Code::new(shape, 2, 2, 2, vec![w]);
        assert!(matches!(
            fold_time(&code, 4),
            Err(TransformError::Collision { .. })
        ));
    }
}
