//! Codewords, codes and the cyclic correlation engine.
//!
//! A codeword of shape `Λ1 × … × Λ_{n-1} × T` is stored sparsely as its
//! sorted pulse list. Correlation is cyclic along the time axis only.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OocError {
    #[error("shape must have at least a time axis and all dimensions must be >= 1")]
    InvalidShape,
    #[error("shape size overflows")]
    ShapeOverflow,
    #[error("coordinate {coord:?} out of range for shape {dims:?}")]
    OutOfRange { coord: Vec<u32>, dims: Vec<u32> },
    #[error("coordinate {coord:?} has {got} entries, shape has {want} axes")]
    Arity {
        coord: Vec<u32>,
        got: usize,
        want: usize,
    },
    #[error("duplicate pulse at {0:?}")]
    DuplicatePulse(Vec<u32>),
    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<u32>, Vec<u32>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("code has no words")]
    Empty,
    #[error("word {index} has weight {got}, code weight is {want}")]
    Weight { index: usize, got: usize, want: u32 },
    #[error("word {index} has shape {got:?}, code shape is {want:?}")]
    Shape {
        index: usize,
        got: Vec<u32>,
        want: Vec<u32>,
    },
    #[error("words {first} and {second} are time shifts of each other")]
    Duplicate { first: usize, second: usize },
}

/// Dimensions `(Λ1, …, Λ_{n-1}, T)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CodeShape {
    dims: Vec<u32>,
}

impl CodeShape {
    pub fn new(dims: Vec<u32>) -> Result<Self, OocError> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(OocError::InvalidShape);
        }
        dims.iter()
            .try_fold(1u64, |acc, &d| acc.checked_mul(d as u64))
            .ok_or(OocError::ShapeOverflow)?;
        Ok(Self { dims })
    }

    /// Shape with the given spatial dims and time length.
    pub fn with_time(spatial: &[u32], t: u32) -> Result<Self, OocError> {
        let mut dims = spatial.to_vec();
        dims.push(t);
        Self::new(dims)
    }

    pub fn dims(&self) -> &[u32] {
        &self.dims
    }

    pub fn spatial(&self) -> &[u32] {
        &self.dims[..self.dims.len() - 1]
    }

    pub fn time_len(&self) -> u32 {
        *self.dims.last().unwrap()
    }

    /// Number of axes n.
    pub fn arity(&self) -> usize {
        self.dims.len()
    }

    /// Number of spatial cells Λ1⋯Λ_{n-1}.
    pub fn cells(&self) -> u64 {
        self.spatial().iter().map(|&d| d as u64).product()
    }

    /// Total size N.
    pub fn total(&self) -> u64 {
        self.cells() * self.time_len() as u64
    }

    /// Row-major cell key: the first spatial coordinate is most significant,
    /// so key order equals lexicographic order of spatial coordinates.
    pub fn cell_key(&self, spatial: &[u32]) -> u64 {
        spatial
            .iter()
            .zip(self.spatial())
            .fold(0u64, |acc, (&c, &d)| acc * d as u64 + c as u64)
    }

    pub fn cell_coords(&self, mut key: u64) -> Vec<u32> {
        let mut out = vec![0; self.spatial().len()];
        for (slot, &d) in out.iter_mut().zip(self.spatial()).rev() {
            *slot = (key % d as u64) as u32;
            key /= d as u64;
        }
        out
    }

    fn check(&self, coord: &[u32]) -> Result<(), OocError> {
        if coord.len() != self.dims.len() {
            return Err(OocError::Arity {
                coord: coord.to_vec(),
                got: coord.len(),
                want: self.dims.len(),
            });
        }
        if coord.iter().zip(&self.dims).any(|(&c, &d)| c >= d) {
            return Err(OocError::OutOfRange {
                coord: coord.to_vec(),
                dims: self.dims.clone(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for CodeShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// One pulse: a spatial cell (see [`CodeShape::cell_key`]) and a time slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pulse {
    pub cell: u64,
    pub time: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    shape: CodeShape,
    pulses: Vec<Pulse>,
}

impl PartialOrd for Codeword {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Codeword {
    fn cmp(&self, other: &Self) -> Ordering {
        self.pulses
            .cmp(&other.pulses)
            .then_with(|| self.shape.dims.cmp(&other.shape.dims))
    }
}

impl Codeword {
    pub fn from_coords<I>(shape: CodeShape, coords: I) -> Result<Self, OocError>
    where
        I: IntoIterator<Item = Vec<u32>>,
    {
        let mut pulses = Vec::new();
        for c in coords {
            shape.check(&c)?;
            let (space, t) = c.split_at(c.len() - 1);
            pulses.push(Pulse {
                cell: shape.cell_key(space),
                time: t[0],
            });
        }
        pulses.sort_unstable();
        if let Some(w) = pulses.windows(2).find(|w| w[0] == w[1]) {
            let mut c = shape.cell_coords(w[0].cell);
            c.push(w[0].time);
            return Err(OocError::DuplicatePulse(c));
        }
        Ok(Self { shape, pulses })
    }

    pub fn shape(&self) -> &CodeShape {
        &self.shape
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn weight(&self) -> usize {
        self.pulses.len()
    }

    /// Pulse coordinates `(i1, …, i_{n-1}, t)` in lexicographic order.
    pub fn coords(&self) -> Vec<Vec<u32>> {
        self.pulses
            .iter()
            .map(|p| {
                let mut c = self.shape.cell_coords(p.cell);
                c.push(p.time);
                c
            })
            .collect()
    }

    /// Cyclic shift of the time axis by `t`.
    pub fn time_shift(&self, t: i64) -> Codeword {
        let big_t = self.shape.time_len() as i64;
        let by = t.rem_euclid(big_t) as u32;
        let mut pulses: Vec<Pulse> = self
            .pulses
            .iter()
            .map(|p| Pulse {
                cell: p.cell,
                time: ((p.time as u64 + by as u64) % big_t as u64) as u32,
            })
            .collect();
        pulses.sort_unstable();
        Codeword {
            shape: self.shape.clone(),
            pulses,
        }
    }

    /// Lexicographically least time shift.
    pub fn canonical(&self) -> Codeword {
        (0..self.shape.time_len() as i64)
            .map(|t| self.time_shift(t))
            .min()
            .unwrap_or_else(|| self.clone())
    }

    /// Shape change with identical pulse set semantics; used by transforms.
    pub(crate) fn from_parts(shape: CodeShape, mut pulses: Vec<Pulse>) -> Self {
        pulses.sort_unstable();
        Self { shape, pulses }
    }
}

fn same_shape(a: &Codeword, b: &Codeword) -> Result<(), OocError> {
    if a.shape != b.shape {
        return Err(OocError::ShapeMismatch(
            a.shape.dims.clone(),
            b.shape.dims.clone(),
        ));
    }
    Ok(())
}

/// `profile[t] = |a ∩ shift(b, t)|` for every `t in 0..T`, written into `out`.
fn fill_profile(a: &[Pulse], b: &[Pulse], big_t: u32, out: &mut Vec<u32>) {
    out.clear();
    out.resize(big_t as usize, 0);
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cell.cmp(&b[j].cell) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                let cell = a[i].cell;
                let ie = a[i..].iter().take_while(|p| p.cell == cell).count() + i;
                let je = b[j..].iter().take_while(|p| p.cell == cell).count() + j;
                for pa in &a[i..ie] {
                    for pb in &b[j..je] {
                        let d = (pa.time + big_t - pb.time) % big_t;
                        out[d as usize] += 1;
                    }
                }
                i = ie;
                j = je;
            }
        }
    }
}

/// Correlation values of `a` against every time shift of `b`.
pub fn correlation_profile(a: &Codeword, b: &Codeword) -> Result<Vec<u32>, OocError> {
    same_shape(a, b)?;
    let mut out = Vec::new();
    fill_profile(&a.pulses, &b.pulses, a.shape.time_len(), &mut out);
    Ok(out)
}

/// `|pulses(a) ∩ pulses(time_shift(b, t))|`.
pub fn cross_correlation(a: &Codeword, b: &Codeword, t: i64) -> Result<u32, OocError> {
    let profile = correlation_profile(a, b)?;
    let big_t = a.shape.time_len() as i64;
    Ok(profile[t.rem_euclid(big_t) as usize])
}

/// A maximum with the shift that attains it (least such shift).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Peak {
    pub value: u32,
    pub shift: Option<u32>,
}

fn peak_of(profile: &[u32], skip_zero: bool) -> Peak {
    let start = usize::from(skip_zero);
    let mut best = Peak {
        value: 0,
        shift: None,
    };
    for (t, &v) in profile.iter().enumerate().skip(start) {
        if best.shift.is_none() || v > best.value {
            best = Peak {
                value: v,
                shift: Some(t as u32),
            };
        }
    }
    best
}

/// Largest off-peak autocorrelation over shifts `1..T`; 0 with no witness
/// when `T = 1`.
pub fn max_offpeak_auto(cw: &Codeword) -> Peak {
    let mut out = Vec::new();
    fill_profile(&cw.pulses, &cw.pulses, cw.shape.time_len(), &mut out);
    peak_of(&out, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CrossPeak {
    pub value: u32,
    pub shift: u32,
    /// `b` is a time shift of `a`; the value is then an autocorrelation.
    pub same_orbit: bool,
}

pub fn max_cross(a: &Codeword, b: &Codeword) -> Result<CrossPeak, OocError> {
    let profile = correlation_profile(a, b)?;
    let p = peak_of(&profile, false);
    Ok(CrossPeak {
        value: p.value,
        shift: p.shift.unwrap_or(0),
        same_orbit: a.canonical() == b.canonical(),
    })
}

/// A set of codewords sharing shape and weight, with claimed parameters.
///
/// Words are stored as canonical orbit representatives in sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    shape: CodeShape,
    weight: u32,
    lambda_a: u32,
    lambda_c: u32,
    words: Vec<Codeword>,
}

impl Code {
    pub fn new(
        shape: CodeShape,
        weight: u32,
        lambda_a: u32,
        lambda_c: u32,
        words: Vec<Codeword>,
    ) -> Self {
        let mut words: Vec<Codeword> = words.iter().map(Codeword::canonical).collect();
        words.sort();
        Self {
            shape,
            weight,
            lambda_a,
            lambda_c,
            words,
        }
    }

    pub fn shape(&self) -> &CodeShape {
        &self.shape
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn lambda_a(&self) -> u32 {
        self.lambda_a
    }

    pub fn lambda_c(&self) -> u32 {
        self.lambda_c
    }

    pub fn words(&self) -> &[Codeword] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn with_claims(mut self, lambda_a: u32, lambda_c: u32) -> Self {
        self.lambda_a = lambda_a;
        self.lambda_c = lambda_c;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AutoWitness {
    pub word: usize,
    pub shift: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossWitness {
    pub first: usize,
    pub second: usize,
    pub shift: u32,
}

/// AMOPS/SPS status for one index set of spatial axes (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionFlag {
    pub axes: Vec<usize>,
    pub amops: bool,
    pub sps: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionReport {
    pub flags: Vec<SectionFlag>,
    /// AMOPS over all spatial axes, which forces an ideal code.
    pub amops_all: bool,
}

impl SectionReport {
    pub fn get(&self, axes: &[usize]) -> Option<&SectionFlag> {
        self.flags.iter().find(|f| f.axes == axes)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrelationReport {
    pub max_offpeak_auto: u32,
    pub auto_witness: Option<AutoWitness>,
    pub max_cross: u32,
    pub cross_witness: Option<CrossWitness>,
    pub is_ideal: bool,
    pub sections: SectionReport,
    /// Measured maxima within the claimed (λa, λc).
    pub passes: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("measured (lambda_a, lambda_c) = ({auto}, {cross}) exceeds claimed ({claimed_a}, {claimed_c})")]
    Exceeds {
        auto: u32,
        cross: u32,
        claimed_a: u32,
        claimed_c: u32,
    },
}

/// A code together with a passing correlation report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifiedCode {
    code: Code,
    report: CorrelationReport,
}

impl VerifiedCode {
    pub fn verify(code: Code) -> Result<Self, VerifyError> {
        let report = validate_code(&code)?;
        if !report.passes {
            return Err(VerifyError::Exceeds {
                auto: report.max_offpeak_auto,
                cross: report.max_cross,
                claimed_a: code.lambda_a,
                claimed_c: code.lambda_c,
            });
        }
        Ok(Self { code, report })
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn report(&self) -> &CorrelationReport {
        &self.report
    }

    pub fn into_code(self) -> Code {
        self.code
    }
}

fn pick<T: Ord + Clone>(a: (u32, Option<T>), b: (u32, Option<T>)) -> (u32, Option<T>) {
    // larger value wins; ties go to the smaller witness
    match a.0.cmp(&b.0) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => match (&a.1, &b.1) {
            (Some(x), Some(y)) if y < x => b,
            (None, Some(_)) => b,
            _ => a,
        },
    }
}

pub fn validate_code(code: &Code) -> Result<CorrelationReport, ValidationError> {
    if code.words.is_empty() {
        return Err(ValidationError::Empty);
    }
    for (index, w) in code.words.iter().enumerate() {
        if w.shape != code.shape {
            return Err(ValidationError::Shape {
                index,
                got: w.shape.dims.clone(),
                want: code.shape.dims.clone(),
            });
        }
        if w.weight() != code.weight as usize {
            return Err(ValidationError::Weight {
                index,
                got: w.weight(),
                want: code.weight,
            });
        }
    }
    let canon: Vec<Codeword> = code.words.iter().map(Codeword::canonical).collect();
    let mut order: Vec<usize> = (0..canon.len()).collect();
    order.sort_by(|&i, &j| canon[i].cmp(&canon[j]).then(i.cmp(&j)));
    if let Some(w) = order.windows(2).find(|w| canon[w[0]] == canon[w[1]]) {
        return Err(ValidationError::Duplicate {
            first: w[0].min(w[1]),
            second: w[0].max(w[1]),
        });
    }

    let big_t = code.shape.time_len();
    let words = &code.words;

    let auto = words
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let p = max_offpeak_auto(w);
            (p.value, p.shift.map(|s| (i, s)))
        })
        .reduce(|| (0, None), pick);

    let cross = (0..words.len())
        .into_par_iter()
        .map(|i| {
            let mut buf = Vec::with_capacity(big_t as usize);
            let mut best: (u32, Option<(usize, usize, u32)>) = (0, None);
            for j in i + 1..words.len() {
                fill_profile(&words[i].pulses, &words[j].pulses, big_t, &mut buf);
                for (t, &v) in buf.iter().enumerate() {
                    best = pick(best, (v, Some((i, j, t as u32))));
                }
            }
            best
        })
        .reduce(|| (0, None), pick);

    let sections = classify_sections(code);
    let passes = auto.0 <= code.lambda_a && cross.0 <= code.lambda_c;
    Ok(CorrelationReport {
        max_offpeak_auto: auto.0,
        auto_witness: auto.1.map(|(word, shift)| AutoWitness { word, shift }),
        max_cross: cross.0,
        cross_witness: cross.1.map(|(first, second, shift)| CrossWitness {
            first,
            second,
            shift,
        }),
        is_ideal: auto.0 == 0,
        sections,
        passes,
    })
}

/// AMOPS/SPS flags for every nonempty set of spatial axes.
pub fn classify_sections(code: &Code) -> SectionReport {
    let spatial = code.shape.spatial().to_vec();
    let s = spatial.len();
    let mut flags = Vec::new();
    // subsets ordered by size, then lexicographically
    let mut subsets: Vec<Vec<usize>> = (1u64..(1u64 << s))
        .map(|mask| (0..s).filter(|&i| mask >> i & 1 == 1).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let coords: Vec<Vec<Vec<u32>>> = code.words.iter().map(|w| w.coords()).collect();
    for axes in subsets {
        let sections: u64 = axes.iter().map(|&i| spatial[i] as u64).product();
        let mut amops = true;
        let mut sps = true;
        for word in &coords {
            let mut keys: Vec<Vec<u32>> = word
                .iter()
                .map(|c| axes.iter().map(|&i| c[i]).collect())
                .collect();
            keys.sort_unstable();
            let distinct = keys.windows(2).all(|w| w[0] != w[1]);
            amops &= distinct;
            sps &= distinct && keys.len() as u64 == sections;
        }
        flags.push(SectionFlag {
            axes: axes.iter().map(|i| i + 1).collect(),
            amops,
            sps: sps && !code.words.is_empty(),
        });
    }
    let amops_all = if s == 0 {
        // 1-D: the whole word is one section
        code.words.iter().all(|w| w.weight() <= 1)
    } else {
        flags.last().is_none_or(|f| f.amops)
    };
    SectionReport { flags, amops_all }
}
