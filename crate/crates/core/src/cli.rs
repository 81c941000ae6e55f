//! Command-line front end. The binary only forwards its arguments to [`main_with_args`].

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::float_unitary::{float_regularize, from_grid, FloatConfig, FloatMode, ReducedForm, TolPolicy};
use crate::format::{parse_float_matrix, parse_float_matrix_json, parse_matrix, parse_matrix_json, render_matrix, MatrixJson};
use crate::matrix::Matrix;
use crate::pencil::{pencil_regularize, KroneckerBlock, PencilBlock, SelfadjointPencil};
use crate::regularize::{regularize, BlockSum};
use crate::scalar::{Field, FieldSpec, Involution};
use crate::sparse_form::{canonical_sparse_form, full_decomposition};
use crate::verify::{check_transform, invariance_suite, round_trip_suite, SuiteReport};

pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Debug, Parser)]
#[command(name = "congru", version, about = "Regularizing decompositions under *congruence")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,

    /// rational, gaussian-rational or prime:<p>
    #[arg(long, global = true, default_value = "rational")]
    pub field: String,

    /// identity or conjugate
    #[arg(long, global = true, default_value = "identity")]
    pub involution: String,

    /// Read the JSON matrix format and write JSON.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Print ν, ζ, κ and ρ.
    Invariants { input: Option<PathBuf> },
    /// Print τ, the m-sequence and the regular part.
    Regularize { input: Option<PathBuf> },
    /// Print the regular part, the sparse nilpotent part N and the transform.
    SparseForm { input: Option<PathBuf> },
    /// Print the regular part and the Jordan block multiplicities.
    Decompose {
        input: Option<PathBuf>,
        /// Also print X with X·A·X* equal to the decomposition.
        #[arg(long)]
        emit_transform: bool,
    },
    /// Regularize the *selfadjoint pencil A + λA*.
    Pencil { input: Option<PathBuf> },
    /// Unitary or orthogonal staircase reduction of a float matrix.
    FloatRegularize {
        input: Option<PathBuf>,
        /// Defaults from --field and --involution.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Absolute threshold on singular values.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run the seeded round-trip suite, and the invariance suite on INPUT if given.
    Verify {
        input: Option<PathBuf>,
        #[arg(long, env = "CONGRU_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    ComplexConjugation,
    ComplexIdentity,
    RealIdentity,
}

impl From<ModeArg> for FloatMode {
    fn from(m: ModeArg) -> FloatMode {
        match m {
            ModeArg::ComplexConjugation => FloatMode::ComplexConjugation,
            ModeArg::ComplexIdentity => FloatMode::ComplexIdentity,
            ModeArg::RealIdentity => FloatMode::RealIdentity,
        }
    }
}

/// Exit status plus what to write on stdout and stderr.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { status: 0, stdout, stderr: String::new() }
    }

    fn fail(status: i32, msg: impl Into<String>) -> Outcome {
        Outcome { status, stdout: String::new(), stderr: format!("error: {}\n", msg.into()) }
    }
}

/// Errors a user can fix by changing the input or flags.
fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse { .. }
            | Error::Json(_)
            | Error::InvalidField(_)
            | Error::FieldMismatch { .. }
            | Error::NotSquare { .. }
            | Error::DimensionMismatch(_)
            | Error::NonFinite { .. }
    )
}

fn error_outcome(e: Error) -> Outcome {
    Outcome::fail(if is_input_error(&e) { 1 } else { 2 }, e.to_string())
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = std::fs::read_to_string(p).map_err(|e| Error::Parse {
                line: 0,
                col: 0,
                msg: format!("cannot read {}: {e}", p.display()),
            })?
        }
        None => {
            std::io::stdin().read_to_string(&mut text).map_err(|e| Error::Parse {
                line: 0,
                col: 0,
                msg: format!("cannot read stdin: {e}"),
            })?;
        }
    }
    Ok(text)
}

fn input_path(cmd: &Command) -> &Option<PathBuf> {
    match cmd {
        Command::Invariants { input }
        | Command::Regularize { input }
        | Command::SparseForm { input }
        | Command::Decompose { input, .. }
        | Command::Pencil { input }
        | Command::FloatRegularize { input, .. }
        | Command::Verify { input, .. } => input,
    }
}

/// Runs the command, reading the matrix from the given path or stdin.
pub fn run(config: &CliConfig) -> Outcome {
    if let Command::Verify { input: None, .. } = config.command {
        return run_with_input(config, "");
    }
    match read_input(input_path(&config.command)) {
        Ok(text) => run_with_input(config, &text),
        Err(e) => error_outcome(e),
    }
}

/// Runs the command on matrix text already in memory.
pub fn run_with_input(config: &CliConfig, text: &str) -> Outcome {
    match dispatch(config, text) {
        Ok(out) => out,
        Err(e) => error_outcome(e),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let out = run(&config);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    out.status
}

fn field_spec(config: &CliConfig) -> Result<FieldSpec> {
    FieldSpec::new(config.field.parse::<Field>()?, config.involution.parse::<Involution>()?)
}

fn read_exact(config: &CliConfig, text: &str, field: Field) -> Result<Matrix> {
    if config.json { parse_matrix_json(text, field) } else { parse_matrix(text, field) }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn subscript(k: usize) -> String {
    k.to_string().chars().map(|c| char::from_u32('₀' as u32 + c.to_digit(10).unwrap()).unwrap()).collect()
}

fn m_text(m: &[usize]) -> String {
    let parts: Vec<String> = m.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

/// One line such as `regular 1×1; J₁ ×1`; a 0×0 regular part is omitted.
pub fn block_sum_summary(bs: &BlockSum) -> String {
    let mut parts = Vec::new();
    let r = bs.regular_part.rows();
    if r > 0 || bs.jordan_multiplicities.is_empty() {
        parts.push(format!("regular {r}×{r}"));
    }
    for (&k, &c) in &bs.jordan_multiplicities {
        parts.push(format!("J{} ×{c}", subscript(k)));
    }
    parts.join("; ")
}

fn pencil_block_text(b: PencilBlock) -> String {
    match b {
        PencilBlock::JordanPair(k) => {
            let s = subscript(k);
            format!("J{s}+λJ{s}ᵀ")
        }
        PencilBlock::FG(l) => {
            let s = subscript(l);
            format!("(F{s}+λG{s})⊕(G{s}ᵀ+λF{s}ᵀ)")
        }
        PencilBlock::JI(l) => {
            let s = subscript(l);
            format!("(J{s}+λI{s})⊕(I{s}+λJ{s})")
        }
    }
}

fn pencil_summary(regular: usize, blocks: &[KroneckerBlock]) -> String {
    let mut parts = Vec::new();
    if regular > 0 || blocks.is_empty() {
        parts.push(format!("regular {regular}×{regular}"));
    }
    parts.extend(blocks.iter().map(|b| format!("{} ×{}", pencil_block_text(b.block), b.multiplicity)));
    parts.join("; ")
}

fn mj(m: &Matrix) -> MatrixJson {
    MatrixJson::from_matrix(m)
}

fn dispatch(config: &CliConfig, text: &str) -> Result<Outcome> {
    match &config.command {
        Command::FloatRegularize { mode, tol, .. } => return float_command(config, text, *mode, *tol),
        Command::Verify { seed, trials, input } => return verify_command(config, text, *seed, *trials, input.is_some()),
        _ => {}
    }
    let spec = field_spec(config)?;
    let inv = spec.involution;
    let a = read_exact(config, text, spec.field)?;
    a.require_square()?;
    let out = match &config.command {
        Command::Invariants { .. } => {
            let v = a.invariants(inv)?;
            if config.json {
                to_json(&v)
            } else {
                format!("ν={} ζ={} κ={} ρ={}\n", v.nu, v.zeta, v.kappa, v.rho)
            }
        }
        Command::Regularize { .. } => {
            let r = regularize(&a, inv)?;
            if config.json {
                to_json(&json!({"tau": r.tau, "m": r.m, "regular_part": mj(&r.regular_part)}))
            } else {
                format!("τ={}\nm={}\nregular part:\n{}", r.tau, m_text(&r.m), render_matrix(&r.regular_part))
            }
        }
        Command::SparseForm { .. } => {
            let sf = canonical_sparse_form(&a, inv)?;
            assert_exact(&a, &sf.global_transform, &sf.combined(), inv)?;
            if config.json {
                to_json(&json!({
                    "tau": sf.tau(),
                    "m": sf.m,
                    "regular_part": mj(&sf.regular_part),
                    "n": mj(&sf.n),
                    "transform": mj(&sf.global_transform),
                }))
            } else {
                format!(
                    "τ={}\nm={}\nregular part:\n{}N:\n{}transform:\n{}",
                    sf.tau(),
                    m_text(&sf.m),
                    render_matrix(&sf.regular_part),
                    render_matrix(&sf.n),
                    render_matrix(&sf.global_transform)
                )
            }
        }
        Command::Decompose { emit_transform, .. } => {
            let d = full_decomposition(&a, inv)?;
            assert_exact(&a, &d.transform, &d.target(), inv)?;
            let bs = &d.block_sum;
            if config.json {
                let blocks: Vec<_> =
                    bs.jordan_multiplicities.iter().map(|(k, c)| json!({"size": k, "multiplicity": c})).collect();
                let mut v = json!({"regular_part": mj(&bs.regular_part), "jordan_blocks": blocks, "m": d.m});
                if *emit_transform {
                    v["transform"] = serde_json::to_value(mj(&d.transform)).expect("serializable");
                }
                to_json(&v)
            } else {
                let mut s = format!("{}\n", block_sum_summary(bs));
                if bs.regular_part.rows() > 0 {
                    s.push_str(&format!("regular part:\n{}", render_matrix(&bs.regular_part)));
                }
                if *emit_transform {
                    s.push_str(&format!("transform:\n{}", render_matrix(&d.transform)));
                }
                s
            }
        }
        Command::Pencil { .. } => {
            let p = pencil_regularize(&SelfadjointPencil { a: a.clone(), spec })?;
            let reduced = p.reduced_pencil();
            let star = p.transform.conj_transpose(inv);
            let moved = crate::pencil::Pencil::new(a.clone(), a.conj_transpose(inv)).transform(&p.transform, &star);
            if moved != reduced {
                return Err(Error::Internal("pencil transform does not reproduce the reduced pencil".to_string()));
            }
            let replaced = p.replaced_blocks();
            if config.json {
                to_json(&json!({
                    "regular": mj(&p.regular),
                    "kronecker_blocks": p.kronecker_blocks,
                    "replacement_blocks": replaced,
                    "transform": mj(&p.transform),
                }))
            } else {
                format!(
                    "{}\nreplaced: {}\nregular part:\n{}transform:\n{}",
                    pencil_summary(p.regular.rows(), &p.kronecker_blocks),
                    pencil_summary(p.regular.rows(), &replaced),
                    render_matrix(&p.regular),
                    render_matrix(&p.transform)
                )
            }
        }
        Command::FloatRegularize { .. } | Command::Verify { .. } => unreachable!(),
    };
    Ok(Outcome::ok(out))
}

/// Internal self-check; a mismatch is reported with exit status 2.
fn assert_exact(a: &Matrix, x: &Matrix, target: &Matrix, inv: Involution) -> Result<()> {
    match check_transform(a, x, target, inv)?.reason {
        None => Ok(()),
        Some(reason) => Err(Error::Internal(reason)),
    }
}

fn default_mode(config: &CliConfig) -> Result<FloatMode> {
    let spec = field_spec(config)?;
    Ok(match (spec.field, spec.involution) {
        (_, Involution::Conjugation) => FloatMode::ComplexConjugation,
        (Field::GaussianRational, Involution::Identity) => FloatMode::ComplexIdentity,
        _ => FloatMode::RealIdentity,
    })
}

fn render_float(z: Complex64, real: bool) -> String {
    if real || z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}*i", z.re, -z.im)
    } else {
        format!("{}+{}*i", z.re, z.im)
    }
}

fn float_json(m: &DMatrix<Complex64>, real: bool) -> MatrixJson {
    MatrixJson {
        rows: m.nrows(),
        cols: m.ncols(),
        entries: (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| render_float(m[(i, j)], real))
            .collect(),
    }
}

/// Float matrix in the text format.
pub fn render_float_matrix(m: &DMatrix<Complex64>, real: bool) -> String {
    let mut out = format!("{} {}\n", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| render_float(m[(i, j)], real)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn float_command(config: &CliConfig, text: &str, mode: Option<ModeArg>, tol: Option<f64>) -> Result<Outcome> {
    let mode = match mode {
        Some(m) => m.into(),
        None => default_mode(config)?,
    };
    let grid = if config.json { parse_float_matrix_json(text)? } else { parse_float_matrix(text)? };
    let a = from_grid(&grid);
    let tol_policy = match tol {
        Some(t) => TolPolicy::Fixed(t),
        None => TolPolicy::RelativeMaxDim,
    };
    let r: ReducedForm = float_regularize(&a, FloatConfig { mode, tol_policy })?;
    let real = mode == FloatMode::RealIdentity;
    let mut stderr = String::new();
    for w in &r.warnings {
        stderr.push_str(&format!(
            "warning: stage {} {} decision: singular value {:e} is within a factor of 10 of tol {:e}\n",
            w.stage, w.decision, w.sigma, w.tol
        ));
    }
    let stdout = if config.json {
        to_json(&json!({
            "mode": mode,
            "tol": r.tol,
            "m": r.m,
            "regular_block": float_json(&r.regular_block, real),
            "reduced": float_json(&r.reduced, real),
            "transform": float_json(&r.transform, real),
            "pattern_residual": r.pattern_residual,
            "unitarity_residual": r.unitarity_residual,
            "reconstruction_residual": r.reconstruction_residual,
            "warnings": r.warnings,
        }))
    } else {
        format!(
            "m={}\ntol={:e}\npattern residual={:e}\nunitarity residual={:e}\nreconstruction residual={:e}\nregular block:\n{}",
            m_text(&r.m),
            r.tol,
            r.pattern_residual,
            r.unitarity_residual,
            r.reconstruction_residual,
            render_float_matrix(&r.regular_block, real)
        )
    };
    Ok(Outcome { status: 0, stdout, stderr })
}

fn verify_command(config: &CliConfig, text: &str, seed: u64, trials: usize, has_input: bool) -> Result<Outcome> {
    let spec = field_spec(config)?;
    let mut reports: Vec<SuiteReport> = vec![round_trip_suite(spec, trials, seed, 4, 10)];
    if has_input {
        let a = read_exact(config, text, spec.field)?;
        reports.push(invariance_suite(&a, spec.involution, trials, seed)?);
    }
    let passed = reports.iter().all(SuiteReport::passed);
    let stdout = if config.json {
        to_json(&json!({"seed": seed, "passed": passed, "suites": reports}))
    } else {
        let mut s = format!("seed {seed}\n");
        for r in &reports {
            s.push_str(&r.summary());
            s.push('\n');
            for f in &r.failures {
                s.push_str(&format!("  seed {}: {}\n", f.seed, f.reason));
            }
        }
        s
    };
    Ok(Outcome { status: if passed { 0 } else { 2 }, stdout, stderr: String::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> CliConfig {
        CliConfig::try_parse_from(std::iter::once("congru").chain(args.iter().copied())).unwrap()
    }

    const EXAMPLE: &str = "2 2\n1 -i\ni 1\n";

    #[test]
    fn decompose_worked_example() {
        let c = cfg(&["decompose", "--field", "gaussian-rational", "--involution", "conjugate"]);
        let out = run_with_input(&c, EXAMPLE);
        assert_eq!(out.status, 0);
        assert_eq!(out.stdout.lines().next(), Some("regular 1×1; J₁ ×1"));
        let c = cfg(&["decompose", "--field", "gaussian-rational", "--involution", "identity"]);
        assert_eq!(run_with_input(&c, EXAMPLE).stdout, "J₂ ×1\n");
    }

    #[test]
    fn invariants_of_zero() {
        let out = run_with_input(&cfg(&["invariants"]), "3 3\n0 0 0\n0 0 0\n0 0 0\n");
        assert_eq!(out.stdout, "ν=3 ζ=3 κ=0 ρ=0\n");
    }

    #[test]
    fn input_errors_exit_one() {
        let out = run_with_input(&cfg(&["invariants"]), "2 2\n1 x\n0 1\n");
        assert_eq!(out.status, 1);
        assert!(out.stderr.contains("line 2, column 3"), "{}", out.stderr);
        let out = run_with_input(&cfg(&["invariants", "--involution", "conjugate"]), "1 1\n0\n");
        assert_eq!(out.status, 1);
        let out = run_with_input(&cfg(&["regularize"]), "1 2\n0 0\n");
        assert_eq!(out.status, 1);
    }

    #[test]
    fn subscripts() {
        assert_eq!(subscript(12), "₁₂");
    }
}
