//! JSON views of bounds and verification results.
//!
//! Field order is fixed by the struct definitions, and big numbers are
//! rendered as decimal strings so the schema does not depend on their size.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::bounds::{
    self, johnson_amops, johnson_ideal, johnson_nd, Bound, BoundKind, BoundResult, Branch,
};
use crate::ooc::{AutoWitness, CorrelationReport, CrossWitness, SectionFlag, VerifiedCode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&BigRational> for RationalJson {
    fn from(r: &BigRational) -> Self {
        Self {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundJson {
    pub name: String,
    pub branch: Branch,
    pub value: String,
    pub f_exact: RationalJson,
    pub applicable: bool,
}

impl BoundJson {
    pub fn new(name: &str, r: &BoundResult) -> Self {
        Self {
            name: name.to_string(),
            branch: r.branch,
            value: r.value.to_string(),
            f_exact: (&r.f_exact).into(),
            applicable: r.applicable,
        }
    }

    /// One entry per branch of `bound`.
    pub fn all(name: &str, bound: &Bound) -> Vec<Self> {
        let mut v = vec![Self::new(name, &bound.nested)];
        if let Some(q) = &bound.quadratic {
            v.push(Self::new(name, q));
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lambdas {
    pub lambda_a: u32,
    pub lambda_c: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OptimalityJson {
    pub bound_name: String,
    pub bound: String,
    pub j_optimal: bool,
    pub violation: bool,
    pub ratio: RationalJson,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyJson {
    pub shape: Vec<u32>,
    pub w: u32,
    pub count: usize,
    pub claimed: Lambdas,
    pub measured: Lambdas,
    pub ideal: bool,
    pub passes: bool,
    pub auto_witness: Option<AutoWitness>,
    pub cross_witness: Option<CrossWitness>,
    pub sections: Vec<SectionFlag>,
}

impl VerifyJson {
    pub fn new(
        shape: &[u32],
        w: u32,
        count: usize,
        claimed: Lambdas,
        r: &CorrelationReport,
    ) -> Self {
        Self {
            shape: shape.to_vec(),
            w,
            count,
            claimed,
            measured: Lambdas {
                lambda_a: r.max_offpeak_auto,
                lambda_c: r.max_cross,
            },
            ideal: r.is_ideal,
            passes: r.passes,
            auto_witness: r.auto_witness.clone(),
            cross_witness: r.cross_witness.clone(),
            sections: r.sections.flags.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeReportJson {
    #[serde(flatten)]
    pub verification: VerifyJson,
    pub bounds: Vec<BoundJson>,
    pub optimality: Vec<OptimalityJson>,
    /// Tightest applicable bound and the code's standing against it.
    pub best: Option<OptimalityJson>,
    pub notes: Vec<String>,
}

/// Bound kinds that apply to a verified code, loosest assumptions first.
pub fn applicable_kinds(code: &VerifiedCode) -> Vec<BoundKind> {
    let mut kinds = vec![BoundKind::Nd];
    let r = code.report();
    if r.is_ideal {
        kinds.push(BoundKind::Ideal);
    }
    let spatial = code.code().shape().spatial();
    for flag in r.sections.flags.iter().filter(|f| f.amops) {
        let m: u64 = flag.axes.iter().map(|&a| spatial[a - 1] as u64).product();
        if m >= code.code().weight() as u64 {
            kinds.push(BoundKind::Amops(flag.axes.clone()));
        }
    }
    kinds
}

pub fn code_report(code: &VerifiedCode, notes: Vec<String>) -> CodeReportJson {
    let c = code.code();
    let w = c.weight() as u64;
    let verification = VerifyJson::new(
        c.shape().dims(),
        c.weight(),
        c.len(),
        Lambdas {
            lambda_a: c.lambda_a(),
            lambda_c: c.lambda_c(),
        },
        code.report(),
    );
    let mut bound_list = Vec::new();
    let mut optimality = Vec::new();
    for kind in applicable_kinds(code) {
        let name = kind.label();
        let evaluated = match &kind {
            BoundKind::Nd => johnson_nd(c.shape(), w, c.lambda_a().max(c.lambda_c()) as u64),
            BoundKind::Ideal => johnson_ideal(c.shape(), w, c.lambda_c() as u64),
            BoundKind::Amops(axes) => johnson_amops(c.shape(), w, c.lambda_c() as u64, axes),
        };
        if let Ok(b) = evaluated {
            bound_list.extend(BoundJson::all(&name, &b));
        }
        if let Ok(o) = bounds::optimality_report(code, &kind) {
            optimality.push(OptimalityJson {
                bound_name: name,
                bound: o.bound.to_string(),
                j_optimal: o.j_optimal,
                violation: o.violation,
                ratio: (&o.ratio).into(),
            });
        }
    }
    let best = optimality
        .iter()
        .min_by_key(|o| o.bound.parse::<BigInt>().unwrap_or_default())
        .cloned();
    CodeReportJson {
        verification,
        bounds: bound_list,
        optimality,
        best,
        notes,
    }
}
