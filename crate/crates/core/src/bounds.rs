//! Johnson-type capacity bounds, evaluated exactly.
//!
//! Every bound here is a nest of floors
//! `⌊outer · ⌊r_1 · ⌊r_2 ⋯ ⌊r_λ⌋ ⋯⌋⌋⌋` with rational factors. The value inside
//! the outermost floor is kept as an exact rational (`f_exact`) so gap
//! predicates such as `f - J < T/N` are decided without rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ooc::{CodeShape, VerifiedCode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundError {
    #[error("weight {w} must exceed lambda {lambda}")]
    WeightNotAboveLambda { w: u64, lambda: u64 },
    #[error("weight {w} exceeds code length {n}")]
    WeightExceedsLength { w: u64, n: u64 },
    #[error("an ideal code has at most {cells} pulses (one per spatial cell), got weight {w}")]
    IdealOverweight { w: u64, cells: u64 },
    #[error("AMOPS needs M >= w, got M = {m} and w = {w}")]
    AmopsTooSmall { m: u64, w: u64 },
    #[error("section axis {axis} is not a spatial axis of a shape with {spatial} spatial axes")]
    SectionAxis { axis: usize, spatial: usize },
    #[error("no section axes given")]
    NoSectionAxes,
    #[error("alphabet parameter m must be at least 1")]
    ZeroAlphabet,
    #[error("time length {t} does not divide {n}")]
    NotDivisor { n: u64, t: u64 },
    #[error("code was measured with lambda_a = {0}, not ideal")]
    NotIdeal(u32),
    #[error("code is not AMOPS on axes {0:?}")]
    NotAmops(Vec<usize>),
}

/// Which formula produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    NonbinaryNested,
    NonbinaryQuadratic,
    NdNested,
    NdQuadratic,
    IdealNested,
    /// `w = N/T`, value `T^λ`.
    IdealExtremal,
    AmopsNested,
    /// `w = M`, value `N^{λ+1} / (T M^{λ+1})`.
    AmopsExtremal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundResult {
    pub branch: Branch,
    /// Value inside the outermost floor, inner floors applied.
    pub f_exact: BigRational,
    /// `⌊f_exact⌋`.
    pub value: BigInt,
    pub applicable: bool,
}

/// All branches of one bound for one query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound {
    pub nested: BoundResult,
    /// The `w² > Nλ` branch, when the bound has one.
    pub quadratic: Option<BoundResult>,
}

impl Bound {
    /// Minimum over applicable branches.
    pub fn best(&self) -> &BigInt {
        match &self.quadratic {
            Some(q) if q.applicable && q.value < self.nested.value => &q.value,
            _ => &self.nested.value,
        }
    }

    pub fn nested_value(&self) -> &BigInt {
        &self.nested.value
    }
}

fn int(x: u64) -> BigInt {
    BigInt::from(x)
}

fn ratio(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

fn floor_int(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// `outer · ⌊r_1 · ⌊r_2 ⋯ ⌊r_λ⌋⌋⌋` with inner floors applied; the caller
/// floors the result.
fn nest(outer: BigRational, ratios: &[BigRational]) -> BigRational {
    let inner = ratios.iter().rev().fold(BigInt::one(), |acc, r| {
        floor_int(&(r * BigRational::from_integer(acc)))
    });
    outer * BigRational::from_integer(inner)
}

fn result(branch: Branch, f_exact: BigRational, applicable: bool) -> BoundResult {
    let value = floor_int(&f_exact);
    BoundResult {
        branch,
        f_exact,
        value,
        applicable,
    }
}

fn check_weight(n: u64, w: u64, lambda: u64) -> Result<(), BoundError> {
    if w <= lambda {
        return Err(BoundError::WeightNotAboveLambda { w, lambda });
    }
    if w > n {
        return Err(BoundError::WeightExceedsLength { w, n });
    }
    Ok(())
}

/// `min{A, ⌊A(w-λ)/(w² - Nλ)⌋}` when `w² > Nλ`.
fn quadratic(branch: Branch, a: u64, n: u64, w: u64, lambda: u64) -> BoundResult {
    let w2 = int(w) * int(w);
    let nl = int(n) * int(lambda);
    if w2 > nl {
        let r = ratio(int(a) * int(w - lambda), w2 - nl);
        let capped = r.min(BigRational::from_integer(int(a)));
        result(branch, capped, true)
    } else {
        result(branch, BigRational::from_integer(int(a)), false)
    }
}

/// θ(k, q) = (q^{k+1} − 1)/(q − 1).
pub fn theta(k: u32, q: u64) -> BigInt {
    (0..=k).map(|i| int(q).pow(i)).sum()
}

/// Gaussian coefficient `[a choose b]_q`, the number of (b−1)-flats of PG(a−1, q).
pub fn gaussian(a: u32, b: u32, q: u64) -> BigInt {
    assert!(b <= a, "gaussian coefficient needs b <= a");
    let qa = int(q).pow(a);
    let qb = int(q).pow(b);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..b {
        let qi = int(q).pow(i);
        num *= &qa - &qi;
        den *= &qb - &qi;
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

pub fn num_lines(k: u32, q: u64) -> BigInt {
    gaussian(k + 1, 2, q)
}

/// Johnson bound for constant-weight codes of length `N` over an alphabet
/// of size `m + 1` containing zero.
pub fn johnson_nonbinary(n: u64, w: u64, lambda: u64, m: u64) -> Result<Bound, BoundError> {
    if m == 0 {
        return Err(BoundError::ZeroAlphabet);
    }
    check_weight(n, w, lambda)?;
    let ratios: Vec<BigRational> = (1..=lambda)
        .map(|i| ratio(int(m) * int(n - i), int(w - i)))
        .collect();
    let f = nest(ratio(int(m) * int(n), int(w)), &ratios);
    Ok(Bound {
        nested: result(Branch::NonbinaryNested, f, true),
        quadratic: Some(quadratic(
            Branch::NonbinaryQuadratic,
            m * n,
            m * n,
            w,
            lambda,
        )),
    })
}

fn nd_from(n: u64, t: u64, w: u64, lambda: u64) -> Result<Bound, BoundError> {
    if t == 0 || !n.is_multiple_of(t) {
        return Err(BoundError::NotDivisor { n, t });
    }
    check_weight(n, w, lambda)?;
    let ratios: Vec<BigRational> = (1..=lambda)
        .map(|i| ratio(int(n - i), int(w - i)))
        .collect();
    let f = nest(ratio(int(n), int(t) * int(w)), &ratios);
    Ok(Bound {
        nested: result(Branch::NdNested, f, true),
        quadratic: Some(quadratic(Branch::NdQuadratic, n / t, n, w, lambda)),
    })
}

/// Johnson bound for `n`-D OOCs; depends on the shape only through `N` and `T`.
pub fn johnson_nd(shape: &CodeShape, w: u64, lambda: u64) -> Result<Bound, BoundError> {
    nd_from(shape.total(), shape.time_len() as u64, w, lambda)
}

/// The 1-D OOC Johnson bound `J(N, w, λ)`.
pub fn johnson_1d(n: u64, w: u64, lambda: u64) -> Result<Bound, BoundError> {
    nd_from(n, n, w, lambda)
}

/// Johnson bound for ideal (`λa = 0`) codes.
pub fn johnson_ideal(shape: &CodeShape, w: u64, lambda_c: u64) -> Result<Bound, BoundError> {
    let n = shape.total();
    let t = shape.time_len() as u64;
    let cells = shape.cells();
    check_weight(n, w, lambda_c)?;
    if w > cells {
        return Err(BoundError::IdealOverweight { w, cells });
    }
    let ratios: Vec<BigRational> = (1..=lambda_c)
        .map(|i| ratio(int(n - i * t), int(w - i)))
        .collect();
    let f = nest(ratio(int(n), int(t) * int(w)), &ratios);
    let mut nested = result(Branch::IdealNested, f, true);
    if w == cells {
        let extremal = int(t).pow(lambda_c as u32);
        assert_eq!(
            nested.value, extremal,
            "T^λ shortcut disagrees with the nest"
        );
        nested.branch = Branch::IdealExtremal;
    }
    Ok(Bound {
        nested,
        quadratic: None,
    })
}

/// Johnson bound for AMOPS codes; `section_axes` are 1-based spatial axes
/// whose product is `M`.
pub fn johnson_amops(
    shape: &CodeShape,
    w: u64,
    lambda: u64,
    section_axes: &[usize],
) -> Result<Bound, BoundError> {
    if section_axes.is_empty() {
        return Err(BoundError::NoSectionAxes);
    }
    let spatial = shape.spatial();
    let mut m = 1u64;
    for &axis in section_axes {
        if axis == 0 || axis > spatial.len() {
            return Err(BoundError::SectionAxis {
                axis,
                spatial: spatial.len(),
            });
        }
        m *= spatial[axis - 1] as u64;
    }
    let n = shape.total();
    let t = shape.time_len() as u64;
    check_weight(n, w, lambda)?;
    if m < w {
        return Err(BoundError::AmopsTooSmall { m, w });
    }
    let ratios: Vec<BigRational> = (1..=lambda)
        .map(|i| ratio(int(n) * int(m - i), int(m) * int(w - i)))
        .collect();
    let f = nest(ratio(int(n), int(t) * int(w)), &ratios);
    let mut nested = result(Branch::AmopsNested, f, true);
    if w == m {
        let e = lambda as u32 + 1;
        let extremal = ratio(int(n).pow(e), int(t) * int(m).pow(e));
        assert_eq!(
            nested.f_exact, extremal,
            "extremal AMOPS shortcut disagrees"
        );
        if section_axes.len() == 1 {
            let i = section_axes[0] - 1;
            let others: BigInt = spatial
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &d)| int(d as u64).pow(e))
                .product();
            assert_eq!(nested.value, int(t).pow(lambda as u32) * others);
        }
        nested.branch = Branch::AmopsExtremal;
    }
    if let Ok(ideal) = johnson_ideal(shape, w, lambda) {
        assert!(
            nested.value <= ideal.nested.value,
            "AMOPS bound above ideal bound"
        );
    }
    Ok(Bound {
        nested,
        quadratic: None,
    })
}

/// The sandwich `(N/T)·J(N) ≤ J_nd ≤ (N/T)·J(N) + N/T − 1` and the gap
/// predicates that force its equalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relationships {
    pub lower: BigInt,
    pub nd: BigInt,
    pub upper: BigInt,
    pub chain_holds: bool,
    /// `f(N,w,λ) − J(N,w,λ)` for the 1-D bound.
    pub gap_1d: BigRational,
    /// `gap_1d < T/N`.
    pub gap_below_threshold: bool,
    /// When the gap is small, `lower == nd` (always true if the algebra holds).
    pub forced_equality_holds: bool,
    /// One entry per divisor `s > 1` of `T`, for the split `T = s · T'`.
    pub splits: Vec<SplitCheck>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitCheck {
    pub factor: u64,
    /// `f_nd − J_nd < 1/s`.
    pub predicate: bool,
    /// `s · J(… × T)`.
    pub scaled: BigInt,
    /// `J(… × s × T/s)`.
    pub refined: BigInt,
}

pub fn bound_relationships(
    n: u64,
    t: u64,
    w: u64,
    lambda: u64,
) -> Result<Relationships, BoundError> {
    if t == 0 || !n.is_multiple_of(t) {
        return Err(BoundError::NotDivisor { n, t });
    }
    let per_slot = int(n / t);
    let one_d = johnson_1d(n, w, lambda)?;
    let nd = nd_from(n, t, w, lambda)?;
    let j1 = one_d.nested.value.clone();
    let jnd = nd.nested.value.clone();
    let lower = &per_slot * &j1;
    let upper = &lower + &per_slot - 1;
    let gap_1d = &one_d.nested.f_exact - BigRational::from_integer(j1.clone());
    let gap_below_threshold = gap_1d < ratio(int(t), int(n));
    let splits = (2..=t)
        .filter(|s| t.is_multiple_of(*s))
        .map(|s| {
            let gap = &nd.nested.f_exact - BigRational::from_integer(jnd.clone());
            let refined = nd_from(n, t / s, w, lambda).map(|b| b.nested.value);
            Ok(SplitCheck {
                factor: s,
                predicate: gap < ratio(BigInt::one(), int(s)),
                scaled: int(s) * &jnd,
                refined: refined?,
            })
        })
        .collect::<Result<Vec<_>, BoundError>>()?;
    Ok(Relationships {
        chain_holds: lower <= jnd && jnd <= upper,
        forced_equality_holds: !gap_below_threshold || lower == jnd,
        lower,
        nd: jnd,
        upper,
        gap_1d,
        gap_below_threshold,
        splits,
    })
}

/// Bound family used to judge a code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundKind {
    /// General n-D bound at `λ = max(λa, λc)`, tightest branch.
    Nd,
    /// Ideal bound at `λc`; requires a measured ideal code.
    Ideal,
    /// AMOPS bound on the given 1-based axes at `λc`.
    Amops(Vec<usize>),
}

impl BoundKind {
    pub fn label(&self) -> String {
        match self {
            BoundKind::Nd => "nd".into(),
            BoundKind::Ideal => "ideal".into(),
            BoundKind::Amops(axes) => {
                let a: Vec<String> = axes.iter().map(|a| a.to_string()).collect();
                format!("amops({})", a.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalityReport {
    pub kind: BoundKind,
    pub size: u64,
    pub bound: BigInt,
    pub j_optimal: bool,
    /// `|C| > J`: the code contradicts the bound, so something upstream is wrong.
    pub violation: bool,
    /// `|C| / J`, for tracking asymptotic families.
    pub ratio: BigRational,
}

/// Evaluates `kind` for a verified code's shape and claimed parameters.
pub fn bound_for(code: &VerifiedCode, kind: &BoundKind) -> Result<BigInt, BoundError> {
    let c = code.code();
    let w = c.weight() as u64;
    match kind {
        BoundKind::Nd => {
            let lambda = c.lambda_a().max(c.lambda_c()) as u64;
            Ok(johnson_nd(c.shape(), w, lambda)?.best().clone())
        }
        BoundKind::Ideal => {
            let measured = code.report().max_offpeak_auto;
            if measured != 0 {
                return Err(BoundError::NotIdeal(measured));
            }
            Ok(johnson_ideal(c.shape(), w, c.lambda_c() as u64)?
                .nested
                .value)
        }
        BoundKind::Amops(axes) => {
            let ok = code.report().sections.get(axes).is_some_and(|f| f.amops);
            if !ok {
                return Err(BoundError::NotAmops(axes.clone()));
            }
            Ok(johnson_amops(c.shape(), w, c.lambda_c() as u64, axes)?
                .nested
                .value)
        }
    }
}

pub fn optimality_report(
    code: &VerifiedCode,
    kind: &BoundKind,
) -> Result<OptimalityReport, BoundError> {
    let bound = bound_for(code, kind)?;
    Ok(optimality_against(code, kind.clone(), bound))
}

/// Compares a verified code's size against an already evaluated bound.
pub fn optimality_against(code: &VerifiedCode, kind: BoundKind, bound: BigInt) -> OptimalityReport {
    let size = code.code().len() as u64;
    let ratio = if bound.is_positive() {
        BigRational::new(int(size), bound.clone())
    } else {
        BigRational::zero()
    };
    OptimalityReport {
        kind,
        size,
        j_optimal: int(size) == bound,
        violation: int(size) > bound,
        bound,
        ratio,
    }
}

/// Exact `|C| / J_ideal` for the conic-plus-line family at `q`.
pub fn conic_family_ratio(q: u64) -> Result<BigRational, BoundError> {
    let size = int(q) * int(q * q + 1) * int(q * q - q + 1);
    let shape =
        CodeShape::new(vec![(q * q + 1) as u32, (q + 1) as u32]).expect("nonzero dimensions");
    let j = johnson_ideal(&shape, q + 1, 2)?.nested.value;
    Ok(BigRational::new(size, j))
}

/// Renders a rational as `num/den` (or just `num` when integral).
pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy view for logs.
pub fn approx(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}
