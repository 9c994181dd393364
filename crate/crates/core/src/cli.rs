//! Command-line front end. `run` is the whole program minus process exit.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::bounds::{self, johnson_amops, johnson_ideal, johnson_nd, johnson_nonbinary, Bound};
use crate::constructions::{
    construct_conic_line_code_with, construct_spread_line_code_with, Limits, DEFAULT_MAX_CONIC_Q,
};
use crate::field::DEFAULT_TABLE_LIMIT;
use crate::ooc::{validate_code, Code, CodeShape, VerifiedCode};
use crate::oocx;
use crate::report::{code_report, BoundJson, Lambdas, VerifyJson};
use crate::transforms::{fold_time, reshape};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const CONIC_NOTE: &str =
    "conic-line codes are emitted with lambda_c = 2: two conics in one plane can share two points";
const FOLD_NOTE: &str = "folded time axis has length T/T1, so the total length N is unchanged";

#[derive(Debug, Parser)]
#[command(
    name = "ndooc",
    version,
    about = "Multidimensional optical orthogonal codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a code from projective geometry.
    #[command(subcommand)]
    Construct(Construction),
    /// Validate a code file against its claimed correlation parameters.
    Verify(VerifyArgs),
    /// Evaluate upper bounds on code size.
    Bound(BoundArgs),
    /// Refactor the spatial axes of a code.
    Reshape(ReshapeArgs),
    /// Fold part of the time axis into the first spatial axis.
    Fold(FoldArgs),
    /// Verify a code and compare it with every applicable bound.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the code here instead of printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print a JSON report instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Construction {
    /// Lines outside a Singer spread of PG(k, q).
    SpreadLines {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = DEFAULT_TABLE_LIMIT)]
        max_field_size: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Conics and lines in PG(3, q).
    ConicLines {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_CONIC_Q)]
        max_q: u32,
        #[arg(long, default_value_t = DEFAULT_TABLE_LIMIT)]
        max_field_size: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub file: PathBuf,
    /// Override the claimed lambda_a.
    #[arg(long)]
    pub lambda_a: Option<u32>,
    /// Override the claimed lambda_c.
    #[arg(long)]
    pub lambda_c: Option<u32>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Shape as `A x B x ... x T`, e.g. `5x5x5`.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Dims,
    #[arg(long)]
    pub w: u64,
    #[arg(long)]
    pub lambda: u64,
    /// Only the AMOPS bound on these 1-based spatial axes, e.g. `1,2`.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["ideal", "nonbinary"])]
    pub amops: Option<Vec<usize>>,
    /// Only the ideal-code bound.
    #[arg(long, conflicts_with = "nonbinary")]
    pub ideal: bool,
    /// Only the nonbinary bound with alphabet {0..m} over the spatial cells.
    #[arg(long)]
    pub nonbinary: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ReshapeArgs {
    pub file: PathBuf,
    /// Target shape including the unchanged time axis.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Dims,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FoldArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub t1: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub json: bool,
}

/// An `AxBx...xT` shape argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dims(pub Vec<u32>);

fn parse_dims(s: &str) -> Result<Dims, String> {
    let dims: Vec<u32> = s
        .split(['x', 'X'])
        .map(|d| d.trim().parse::<u32>().map_err(|e| format!("`{d}`: {e}")))
        .collect::<Result<_, _>>()?;
    if dims.contains(&0) {
        return Err("dimensions must be positive".into());
    }
    Ok(Dims(dims))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Invalid(_) => EXIT_INVALID,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Construct(c) => construct(c, out),
        Command::Verify(a) => verify(a, out),
        Command::Bound(a) => bound(a, out),
        Command::Reshape(a) => {
            let code = load(&a.file)?;
            let (spatial, t) = a.dims.0.split_at(a.dims.0.len() - 1);
            if t[0] != code.shape().time_len() {
                return Err(usage(format!(
                    "time length {} must stay {}",
                    t[0],
                    code.shape().time_len()
                )));
            }
            let reshaped = reshape(&code, spatial).map_err(usage)?;
            emit_code(&reshaped, a.out.as_deref(), out)?;
            Ok(EXIT_OK)
        }
        Command::Fold(a) => {
            let code = load(&a.file)?;
            let folded = fold_time(&code, a.t1).map_err(usage)?;
            emit_code(&folded, a.out.as_deref(), out)?;
            if a.out.is_some() {
                writeln!(out, "note: {FOLD_NOTE}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Report(a) => report(a, out),
    }
}

fn load(path: &Path) -> Result<Code, CliError> {
    oocx::read_oocx(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn emit_code(code: &Code, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => {
            oocx::write_oocx(code, p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            writeln!(
                out,
                "wrote {} words of shape {} (w={}, lambda_a={}, lambda_c={}) to {}",
                code.len(),
                code.shape(),
                code.weight(),
                code.lambda_a(),
                code.lambda_c(),
                p.display()
            )?;
        }
        None => write!(out, "{}", oocx::to_string(code))?,
    }
    Ok(())
}

fn print_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Invalid(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn construct(c: Construction, out: &mut dyn Write) -> Result<i32, CliError> {
    let (result, output, notes) = match c {
        Construction::SpreadLines {
            q,
            k,
            d,
            max_field_size,
            output,
        } => {
            let limits = Limits {
                max_field_size,
                ..Limits::default()
            };
            (
                construct_spread_line_code_with(q, k, d, &limits),
                output,
                vec![],
            )
        }
        Construction::ConicLines {
            q,
            max_q,
            max_field_size,
            output,
        } => {
            let limits = Limits {
                max_field_size,
                max_conic_q: max_q,
            };
            (
                construct_conic_line_code_with(q, &limits),
                output,
                vec![CONIC_NOTE.to_string()],
            )
        }
    };
    let code = result.map_err(usage)?;
    if output.json {
        if let Some(p) = &output.out {
            oocx::write_oocx(&code, p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        }
        let verified = VerifiedCode::verify(code).map_err(|e| CliError::Invalid(e.to_string()))?;
        print_json(&code_report(&verified, notes), out)?;
    } else {
        emit_code(&code, output.out.as_deref(), out)?;
        if output.out.is_some() {
            for n in notes {
                writeln!(out, "note: {n}")?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut code = load(&a.file)?;
    let la = a.lambda_a.unwrap_or(code.lambda_a());
    let lc = a.lambda_c.unwrap_or(code.lambda_c());
    code = code.with_claims(la, lc);
    let report = validate_code(&code).map_err(|e| CliError::Invalid(e.to_string()))?;
    if a.json {
        let claimed = Lambdas {
            lambda_a: la,
            lambda_c: lc,
        };
        let j = VerifyJson::new(
            code.shape().dims(),
            code.weight(),
            code.len(),
            claimed,
            &report,
        );
        print_json(&j, out)?;
    } else {
        writeln!(
            out,
            "shape {}  w={}  words={}",
            code.shape(),
            code.weight(),
            code.len()
        )?;
        writeln!(
            out,
            "measured lambda_a={} lambda_c={}  claimed lambda_a={la} lambda_c={lc}",
            report.max_offpeak_auto, report.max_cross
        )?;
        if report.max_offpeak_auto > la {
            if let Some(wit) = &report.auto_witness {
                writeln!(
                    out,
                    "auto-correlation witness: word {} at shift {} reaches {}",
                    wit.word, wit.shift, report.max_offpeak_auto
                )?;
            }
        }
        if report.max_cross > lc {
            if let Some(wit) = &report.cross_witness {
                writeln!(
                    out,
                    "cross-correlation witness: words {} and {} at shift {} reach {}",
                    wit.first, wit.second, wit.shift, report.max_cross
                )?;
            }
        }
        writeln!(out, "{}", if report.passes { "PASS" } else { "FAIL" })?;
    }
    Ok(if report.passes { EXIT_OK } else { EXIT_INVALID })
}

#[derive(Serialize)]
struct BoundOutput {
    dims: Vec<u32>,
    w: u64,
    lambda: u64,
    bounds: Vec<BoundJson>,
    min: Option<String>,
}

fn bound(a: BoundArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let shape = CodeShape::new(a.dims.0.clone()).map_err(usage)?;
    let mut entries: Vec<(String, Bound)> = Vec::new();
    if let Some(axes) = &a.amops {
        let b = johnson_amops(&shape, a.w, a.lambda, axes).map_err(usage)?;
        entries.push((format!("amops({})", join(axes)), b));
    } else if a.ideal {
        entries.push((
            "ideal".into(),
            johnson_ideal(&shape, a.w, a.lambda).map_err(usage)?,
        ));
    } else if let Some(m) = a.nonbinary {
        let b = johnson_nonbinary(shape.cells(), a.w, a.lambda, m).map_err(usage)?;
        entries.push((format!("nonbinary(m={m})"), b));
    } else {
        entries.push((
            "nd".into(),
            johnson_nd(&shape, a.w, a.lambda).map_err(usage)?,
        ));
        if let Ok(b) = johnson_ideal(&shape, a.w, a.lambda) {
            entries.push(("ideal".into(), b));
        }
        for axes in axis_subsets(shape.spatial().len()) {
            if let Ok(b) = johnson_amops(&shape, a.w, a.lambda, &axes) {
                entries.push((format!("amops({})", join(&axes)), b));
            }
        }
    }
    let min = entries.iter().map(|(_, b)| b.best().clone()).min();

    if a.json {
        let bounds = entries
            .iter()
            .flat_map(|(name, b)| BoundJson::all(name, b))
            .collect();
        let j = BoundOutput {
            dims: a.dims.0,
            w: a.w,
            lambda: a.lambda,
            bounds,
            min: min.map(|m| m.to_string()),
        };
        print_json(&j, out)?;
        return Ok(EXIT_OK);
    }
    if entries.len() == 1 {
        let (name, b) = &entries[0];
        writeln!(out, "{}", b.best())?;
        if let Some(m) = a.nonbinary {
            let t = shape.time_len() as u64;
            if t > 1 && m == t {
                writeln!(out, "per time slot: {}", b.best() / t)?;
            }
        }
        log::debug!(
            "{name}: nested f = {}",
            bounds::fmt_rational(&b.nested.f_exact)
        );
        return Ok(EXIT_OK);
    }
    for (name, b) in &entries {
        writeln!(
            out,
            "{name:<14} nested {}  (f = {})",
            b.nested.value,
            bounds::fmt_rational(&b.nested.f_exact)
        )?;
        if let Some(qd) = &b.quadratic {
            if qd.applicable {
                writeln!(out, "{name:<14} quadratic {}", qd.value)?;
            } else {
                writeln!(out, "{name:<14} quadratic n/a")?;
            }
        }
    }
    if let Some(m) = min {
        writeln!(out, "min {m}")?;
    }
    Ok(EXIT_OK)
}

fn join(axes: &[usize]) -> String {
    axes.iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn axis_subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .map(|mask| {
            (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| i + 1)
                .collect()
        })
        .collect()
}

fn report(a: ReportArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let code = load(&a.file)?;
    let verified = match VerifiedCode::verify(code) {
        Ok(v) => v,
        Err(e) => return Err(CliError::Invalid(e.to_string())),
    };
    let r = code_report(&verified, vec![]);
    if a.json {
        print_json(&r, out)?;
        return Ok(EXIT_OK);
    }
    let v = &r.verification;
    writeln!(
        out,
        "shape {}  w={}  words={}",
        verified.code().shape(),
        v.w,
        v.count
    )?;
    writeln!(
        out,
        "measured lambda_a={} lambda_c={}{}",
        v.measured.lambda_a,
        v.measured.lambda_c,
        if v.ideal { "  (ideal)" } else { "" }
    )?;
    for f in &v.sections {
        writeln!(
            out,
            "axes {{{}}}: amops={} sps={}",
            join(&f.axes),
            f.amops,
            f.sps
        )?;
    }
    for o in &r.optimality {
        writeln!(
            out,
            "{:<14} bound {}  ratio {}/{}{}{}",
            o.bound_name,
            o.bound,
            o.ratio.num,
            o.ratio.den,
            if o.j_optimal { "  J-optimal" } else { "" },
            if o.violation { "  VIOLATION" } else { "" }
        )?;
    }
    Ok(EXIT_OK)
}
