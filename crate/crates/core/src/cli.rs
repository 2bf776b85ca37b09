//! Command-line front end. [`run`] is the whole program; the `povm` binary
//! only forwards process arguments and streams.
//!
//! Exit codes: 0 success, 1 failed `--assert` (or a refused decomposition of
//! an extremal input), 2 usage, I/O or parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::covariant::{
    build_covariant, canonical_position, covariance_residual, covariant_extremality, CovariantPovm, CyclicRep,
};
use crate::dilation::{coherent_family, constant_rank, minimal_dilation};
use crate::error::{Error, Result};
use crate::extremality::{
    convex_decompose, effect_span_dim, extremality_test, informational_completeness, quick_reject,
};
use crate::io::{self, encode_matrix, encode_vector, OperatorFile, PovmFile};
use crate::phase_space::{
    char_function, discretize_covariant_povm, extremality_scan, q_function, verify_h1_decomposition, NamedState,
    PhaseGrid, QSamples, ScanConfig, StatePreparation,
};
use crate::povm::{born_probabilities, sample_outcomes, validate_povm, ToleranceConfig};

#[derive(Debug, Parser)]
#[command(name = "povm", version, about = "Finite POVM and phase-space observable toolkit")]
struct Cli {
    /// Sets both the PSD and the normalization tolerance [default: 1e-9]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Smallest eigenvalue accepted as non-negative [default: 1e-9]
    #[arg(long, global = true)]
    psd_tol: Option<f64>,
    /// Allowed spectral-norm deviation of Σ M_i from I [default: 1e-9]
    #[arg(long, global = true)]
    norm_tol: Option<f64>,
    /// Rank threshold relative to the largest effect eigenvalue [default: 1e-10]
    #[arg(long, global = true)]
    rank_rel_tol: Option<f64>,
    /// Write the primary output here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Exit with status 1 unless the verdict holds
    #[arg(long = "assert", global = true, value_name = "VERDICT")]
    assertion: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check positivity, hermiticity and normalization [assert: valid]
    Validate { povm: PathBuf },
    /// Minimal Naimark dilation and coherent vectors
    Dilate { povm: PathBuf },
    /// Extremality verdict [assert: extremal, non-extremal]
    Extremal { povm: PathBuf },
    /// Split a non-extremal POVM as (M_plus + M_minus)/2
    Decompose {
        povm: PathBuf,
        #[arg(long)]
        plus: Option<PathBuf>,
        #[arg(long)]
        minus: Option<PathBuf>,
    },
    /// Informational completeness [assert: ic, not-ic]
    Ic { povm: PathBuf },
    /// Draw Born-rule samples and report outcome counts
    Sample {
        povm: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 1000)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Husimi Q-function on a grid (CSV)
    PhaseQ(PhaseArgs),
    /// Characteristic function ⟨ψ|D(z)ψ⟩ on a grid (CSV)
    PhaseChar(PhaseArgs),
    /// Zero scan of the characteristic function [assert: extremal, non-extremal]
    PhaseScan {
        #[command(flatten)]
        phase: PhaseArgs,
        #[arg(long, default_value_t = crate::phase_space::scan::DEFAULT_ZERO_TOL)]
        zero_tol: f64,
    },
    /// Fourier transform of the Q-function (CSV over the w grid)
    PhaseFourier {
        #[command(flatten)]
        phase: PhaseArgs,
        #[arg(long, default_value_t = 2.0)]
        w_extent: f64,
        #[arg(long, default_value_t = 0.1)]
        w_step: f64,
    },
    /// Quadrature check of the h_1 decomposition integral (CSV) [assert: pass]
    PhaseVerifyH1 {
        #[arg(long, default_value_t = 10.0)]
        extent: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Test points `re,im;re,im;…`
        #[arg(long, default_value = "0,0;1,0;0,1;1,1;-2,0")]
        points: String,
        #[arg(long, default_value_t = 1e-6)]
        residual_tol: f64,
    },
    /// Finite POVM approximating the covariant observable of a state
    PhaseDiscretize {
        #[arg(long, default_value = "h0")]
        state: NamedState,
        #[arg(long, default_value_t = 12)]
        cutoff: usize,
        #[arg(long, default_value_t = 6.0)]
        extent: f64,
        #[arg(long, default_value_t = 0.5)]
        step: f64,
    },
    /// Covariant POVM of ℤ_N from a seed file, or the canonical position observable
    CovariantBuild {
        #[arg(long)]
        group_order: usize,
        /// Character of each basis vector, `λ_0,…,λ_{d−1}`
        #[arg(long, value_delimiter = ',', required_unless_present = "position")]
        labels: Vec<usize>,
        /// Seed operator file `{"dim", "matrix"}`
        #[arg(long, required_unless_present = "position", conflicts_with = "position")]
        seed: Option<PathBuf>,
        /// Build the canonical position observable with this multiplicity
        #[arg(long, value_name = "MULTIPLICITY")]
        position: Option<usize>,
    },
    /// Covariance residual of a POVM indexed by ℤ_N [assert: covariant]
    CovariantCheck {
        povm: PathBuf,
        #[arg(long)]
        group_order: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<usize>,
    },
    /// Structured extremality test of a covariant POVM [assert: extremal, non-extremal]
    CovariantExtremal {
        povm: PathBuf,
        #[arg(long)]
        group_order: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        labels: Vec<usize>,
    },
}

#[derive(Debug, Args)]
struct PhaseArgs {
    /// `h<n>`, `coherent:<re>,<im>` or `squeezed:<r>,<theta>,<re>,<im>`
    #[arg(long)]
    state: NamedState,
    #[arg(long, default_value_t = 32)]
    cutoff: usize,
    #[arg(long, default_value_t = 4.0)]
    extent: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
}

impl PhaseArgs {
    fn grid(&self) -> Result<PhaseGrid> {
        PhaseGrid::new(self.extent, self.step)
    }
}

enum Failure {
    Usage(String),
    Verdict(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ExtremalInput => Failure::Verdict(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Context<'a> {
    cfg: ToleranceConfig,
    output: Option<PathBuf>,
    assertion: Option<String>,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Context<'_> {
    fn emit(&mut self, text: &str) -> std::result::Result<(), Failure> {
        match &self.output {
            Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
            None => self.stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) -> std::result::Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).map_err(Error::from)?;
        text.push('\n');
        self.emit(&text)
    }

    fn emit_csv(&mut self, rows: &[(Complex64, Complex64)]) -> std::result::Result<(), Failure> {
        let mut buf = Vec::new();
        io::write_csv(&mut buf, rows)?;
        self.emit(&String::from_utf8(buf).expect("CSV is ASCII"))
    }

    /// Checks `--assert` against the verdicts a command can produce.
    fn check(&mut self, verdicts: &[(&str, bool)]) -> std::result::Result<(), Failure> {
        let Some(wanted) = self.assertion.clone() else {
            return Ok(());
        };
        match verdicts.iter().find(|(name, _)| *name == wanted) {
            Some((_, true)) => Ok(()),
            Some((_, false)) => Failure::verdict(format!("assertion failed: {wanted}")),
            None => {
                let names: Vec<&str> = verdicts.iter().map(|(n, _)| *n).collect();
                let allowed = if names.is_empty() {
                    "none".to_string()
                } else {
                    names.join(", ")
                };
                Err(Failure::Usage(format!(
                    "unsupported --assert {wanted:?} for this command (supported: {allowed})"
                )))
            }
        }
    }
}

impl Failure {
    fn verdict(msg: String) -> std::result::Result<(), Failure> {
        Err(Failure::Verdict(msg))
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_povm_file(path: &Path) -> Result<PovmFile> {
    io::parse_json(&read_text(path)?).map_err(|e| with_path(e, path))
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Json(j) => Error::Parse(format!("{}: {j}", path.display())),
        other => other,
    }
}

fn load_povm(path: &Path, cfg: &ToleranceConfig) -> Result<crate::povm::DiscretePovm> {
    read_povm_file(path)?.into_povm(cfg)
}

fn tolerance(cli: &Cli) -> Result<ToleranceConfig> {
    let base = ToleranceConfig::default();
    let psd = cli.psd_tol.or(cli.tol).unwrap_or(base.psd_tol);
    let norm = cli.norm_tol.or(cli.tol).unwrap_or(base.norm_tol);
    let rank = cli.rank_rel_tol.unwrap_or(base.rank_rel_tol);
    ToleranceConfig::new(psd, norm, rank)
}

fn parse_points(spec: &str) -> Result<Vec<Complex64>> {
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|p| {
            let parts: Vec<&str> = p.split(',').collect();
            if parts.len() != 2 {
                return Err(Error::Parse(format!("point {p:?} is not `re,im`")));
            }
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("point {p:?}: {e}")))
            };
            Ok(Complex64::new(num(parts[0])?, num(parts[1])?))
        })
        .collect()
}

fn covariant_from_file(
    path: &Path,
    group_order: usize,
    labels: &[usize],
    cfg: &ToleranceConfig,
) -> Result<(CyclicRep, crate::povm::DiscretePovm)> {
    let rep = CyclicRep::new(group_order, labels.to_vec())?;
    let povm = load_povm(path, cfg)?;
    if povm.dim() != rep.dim() {
        return Err(Error::DimensionMismatch {
            expected: rep.dim(),
            found: povm.dim(),
        });
    }
    if povm.num_outcomes() != group_order {
        return Err(Error::DimensionMismatch {
            expected: group_order,
            found: povm.num_outcomes(),
        });
    }
    Ok((rep, povm))
}

fn execute(cmd: &Command, ctx: &mut Context<'_>) -> std::result::Result<(), Failure> {
    let cfg = ctx.cfg;
    match cmd {
        Command::Validate { povm } => {
            let file = read_povm_file(povm)?;
            let report = validate_povm(&file.effects()?, &cfg)?;
            ctx.emit_json(&report)?;
            ctx.check(&[("valid", report.ok)])
        }
        Command::Dilate { povm } => {
            let m = load_povm(povm, &cfg)?;
            let dil = minimal_dilation(&m, &cfg);
            let fam = coherent_family(&dil);
            let vectors: Vec<Vec<Vec<[f64; 2]>>> = fam
                .all()
                .iter()
                .map(|vs| vs.iter().map(encode_vector).collect())
                .collect();
            ctx.emit_json(&json!({
                "fiber_dims": dil.fiber_dims(),
                "total_dim": dil.total_dim(),
                "Y": encode_matrix(dil.isometry()),
                "coherent_vectors": vectors,
                "isometry_defect": dil.isometry_defect(),
                "reconstruction_residual": dil.reconstruction_residual(&m),
            }))?;
            ctx.check(&[])
        }
        Command::Extremal { povm } => {
            let m = load_povm(povm, &cfg)?;
            let v = extremality_test(&m, &cfg);
            ctx.emit_json(&json!({
                "extremal": v.extremal,
                "kernel_dim": v.kernel_dim,
                "min_singular_value": v.min_singular_value,
                "max_singular_value": v.max_singular_value,
                "quick_reject": quick_reject(&m, &cfg),
            }))?;
            ctx.check(&[("extremal", v.extremal), ("non-extremal", !v.extremal)])
        }
        Command::Decompose { povm, plus, minus } => {
            let m = load_povm(povm, &cfg)?;
            let v = extremality_test(&m, &cfg);
            let dec = convex_decompose(&m, &v, &cfg)?;
            let mut summary = json!({
                "weight": dec.weight,
                "epsilon": dec.epsilon,
                "average_residual": dec.average_residual(&m),
                "separation": dec.separation(),
            });
            for (key, path, part) in [("M_plus", plus, &dec.plus), ("M_minus", minus, &dec.minus)] {
                match path {
                    Some(p) => fs::write(p, io::povm_to_json(part)? + "\n")
                        .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
                    None => summary[key] = serde_json::to_value(PovmFile::from_povm(part)).map_err(Error::from)?,
                }
            }
            ctx.emit_json(&summary)?;
            ctx.check(&[])
        }
        Command::Ic { povm } => {
            let m = load_povm(povm, &cfg)?;
            let ic = informational_completeness(&m, &cfg);
            ctx.emit_json(&json!({
                "informationally_complete": ic,
                "effect_span_dim": effect_span_dim(&m, &cfg),
                "required_dim": m.dim() * m.dim(),
            }))?;
            ctx.check(&[("ic", ic), ("not-ic", !ic)])
        }
        Command::Sample {
            povm,
            state,
            shots,
            seed,
        } => {
            let m = load_povm(povm, &cfg)?;
            let rho = io::read_state(&read_text(state)?, &cfg).map_err(|e| with_path(e, state))?;
            let probs = born_probabilities(&rho, &m, &cfg)?;
            let counts = sample_outcomes(&rho, &m, *shots, *seed, &cfg)?;
            ctx.emit_json(&json!({
                "shots": shots,
                "seed": seed,
                "labels": m.labels(),
                "probabilities": probs,
                "counts": counts,
            }))?;
            ctx.check(&[])
        }
        Command::PhaseQ(args) => {
            let psi = args.state.prepare(args.cutoff)?;
            let rows: Vec<(Complex64, Complex64)> = args
                .grid()?
                .points()
                .into_iter()
                .map(|z| (z, Complex64::from(q_function(&psi, z))))
                .collect();
            ctx.emit_csv(&rows)?;
            ctx.check(&[])
        }
        Command::PhaseChar(args) => {
            let psi = args.state.prepare(args.cutoff)?;
            let rows: Vec<(Complex64, Complex64)> = args
                .grid()?
                .points()
                .into_iter()
                .map(|z| (z, char_function(&psi, z)))
                .collect();
            ctx.emit_csv(&rows)?;
            ctx.check(&[])
        }
        Command::PhaseScan { phase, zero_tol } => {
            let v = extremality_scan(&phase.state, phase.cutoff, &phase.grid()?, &ScanConfig::with_zero_tol(*zero_tol))?;
            ctx.emit_json(&v)?;
            ctx.check(&[
                ("extremal", v.consistent_with_extremal),
                ("non-extremal", !v.consistent_with_extremal),
            ])
        }
        Command::PhaseFourier {
            phase,
            w_extent,
            w_step,
        } => {
            let psi = phase.state.prepare(phase.cutoff)?;
            let samples = QSamples::new(&psi, &phase.grid()?)?;
            let rows: Vec<(Complex64, Complex64)> = PhaseGrid::new(*w_extent, *w_step)?
                .points()
                .into_iter()
                .map(|w| (w, samples.fourier(w)))
                .collect();
            ctx.emit_csv(&rows)?;
            ctx.check(&[])
        }
        Command::PhaseVerifyH1 {
            extent,
            step,
            points,
            residual_tol,
        } => {
            let pts = parse_points(points)?;
            let report = verify_h1_decomposition(&PhaseGrid::new(*extent, *step)?, &pts)?;
            let rows: Vec<(Complex64, Complex64)> = report
                .residuals
                .iter()
                .map(|r| (Complex64::new(r.z[0], r.z[1]), Complex64::from(r.integral)))
                .collect();
            ctx.emit_csv(&rows)?;
            writeln!(
                ctx.stderr,
                "max_residual={:.3e} densities_in_range={} average_error={:.3e}",
                report.max_residual, report.densities_in_range, report.average_error
            )?;
            ctx.check(&[("pass", report.passes(*residual_tol))])
        }
        Command::PhaseDiscretize {
            state,
            cutoff,
            extent,
            step,
        } => {
            let psi = state.prepare(*cutoff)?;
            let obs = discretize_covariant_povm(&psi, &PhaseGrid::new(*extent, *step)?, *cutoff, &cfg)?;
            let s = obs.summary();
            writeln!(
                ctx.stderr,
                "outcomes={} scale={} remainder_trace={:.6e} boundary_trace={:.6e}",
                s.outcomes, s.scale, s.remainder_trace, s.boundary_trace
            )?;
            ctx.emit(&(io::povm_to_json(&obs.povm)? + "\n"))?;
            ctx.check(&[])
        }
        Command::CovariantBuild {
            group_order,
            labels,
            seed,
            position,
        } => {
            let m: CovariantPovm = match (seed, position) {
                (_, Some(s)) => canonical_position(*group_order, *s, &cfg)?,
                (Some(path), None) => {
                    let op: OperatorFile = io::parse_json(&read_text(path)?).map_err(|e| with_path(e, path))?;
                    let rep = CyclicRep::new(*group_order, labels.clone())?;
                    build_covariant(&rep, &op.matrix()?, &cfg)?
                }
                (None, None) => return Err(Failure::Usage("either --seed or --position is required".into())),
            };
            ctx.emit(&(io::povm_to_json(m.povm())? + "\n"))?;
            ctx.check(&[])
        }
        Command::CovariantCheck {
            povm,
            group_order,
            labels,
        } => {
            let (rep, m) = covariant_from_file(povm, *group_order, labels, &cfg)?;
            let residual = covariance_residual(&rep, m.effects())?;
            let covariant = residual < 1e-12;
            ctx.emit_json(&json!({
                "covariance_residual": residual,
                "covariant": covariant,
                "constant_rank": constant_rank(&m, &cfg),
            }))?;
            ctx.check(&[("covariant", covariant)])
        }
        Command::CovariantExtremal {
            povm,
            group_order,
            labels,
        } => {
            let (rep, m) = covariant_from_file(povm, *group_order, labels, &cfg)?;
            let residual = covariance_residual(&rep, m.effects())?;
            if residual > cfg.norm_tol {
                return Err(Failure::Usage(format!(
                    "POVM is not covariant (residual {residual:.3e})"
                )));
            }
            let built = build_covariant(&rep, &m.effects()[0], &cfg)?;
            let structured = covariant_extremality(&built, &cfg);
            let generic = extremality_test(&m, &cfg);
            ctx.emit_json(&json!({
                "extremal": structured.extremal,
                "kernel_dim": structured.kernel_dim,
                "min_singular_value": structured.min_singular_value,
                "generic_extremal": generic.extremal,
                "agree": structured.extremal == generic.extremal,
            }))?;
            ctx.check(&[("extremal", structured.extremal), ("non-extremal", !structured.extremal)])
        }
    }
}

/// Parses `argv` (including the program name) and executes the command.
/// Returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let cfg = match tolerance(&cli) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
    };
    let mut ctx = Context {
        cfg,
        output: cli.output.clone(),
        assertion: cli.assertion.clone(),
        stdout,
        stderr,
    };
    match execute(&cli.command, &mut ctx) {
        Ok(()) => 0,
        Err(Failure::Verdict(msg)) => {
            let _ = writeln!(ctx.stderr, "{msg}");
            1
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(ctx.stderr, "error: {msg}");
            2
        }
    }
}
