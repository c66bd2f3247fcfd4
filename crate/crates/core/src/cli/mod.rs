//! Batch interface over problem files: `expand`, `eval`, `solve` and `validate`.
//!
//! Exit codes: 0 on success, 2 when the input fails validation, 3 on numeric failure
//! (including failed oracle checks).

mod file;
mod validate;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::kernel::{eval_kernel, residual, KernelFamily};
use crate::recursion::{expand, ExpansionCoeffs, WarpMode};
use crate::solvers::{burgers_demo, solve_cauchy, solve_ibvp2, BoundaryConfig, ProblemKind};

pub use file::{
    CoefficientSpec, DomainSection, DriftEntry, ExpansionSection, OutputSection, Overrides, PotentialEntry,
    ProblemFile, ProblemSection, QuadratureSection, SpatialTerms,
};
pub use validate::{validate, Check, Fault, ValidateOptions, ValidationReport};

#[derive(Debug, Parser)]
#[command(
    name = "parakernel",
    version,
    about = "Expansion kernels for drift-coupled parabolic problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the log-correction coefficients about a center.
    Expand {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
        /// Expansion center, comma separated (default: domain midpoint).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<f64>>,
        /// Write the expansion JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate kernel values, gradients and residuals as CSV.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        center: Option<Vec<f64>>,
        /// CSV of evaluation points, one per line (default: the output grid).
        #[arg(long)]
        points: Option<PathBuf>,
        /// Times, comma separated (default: the horizon).
        #[arg(long = "t", value_delimiter = ',')]
        times: Option<Vec<f64>>,
        /// Reuse a saved expansion instead of recomputing.
        #[arg(long)]
        expansion: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the file's problem on its output grid.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
        /// Solution CSV path; boundary densities go to `<out>.density.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the oracle checks relevant to the file and print a JSON report.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
        /// Tolerance of the closed-form kernel checks.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

#[derive(Debug, Default, Args)]
pub struct CommonOpts {
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub mode: Option<WarpMode>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub c_target: Option<f64>,
    #[arg(long)]
    pub gh_order: Option<usize>,
    #[arg(long)]
    pub gl_order: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
}

impl CommonOpts {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            order: self.order,
            degree: self.degree,
            mode: self.mode,
            beta: self.beta,
            c_target: self.c_target,
            gh_order: self.gh_order,
            gl_order: self.gl_order,
            steps: self.steps,
        }
    }
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Accuracy(_) | Error::Conditioning(_) | Error::Scaling(_) | Error::Sequencing(_) => 3,
        _ => 2,
    }
}

/// Runs a parsed command, writing primary output to `stdout` and notes to `stderr`.
/// Returns the exit code.
pub fn run(cli: &Cli, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32 {
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command, stdout, stderr)),
            Err(e) => Err(Error::Config(e.to_string())),
        },
        None => dispatch(&cli.command, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> Result<i32> {
    match cmd {
        Command::Expand {
            file,
            opts,
            center,
            out,
        } => {
            cmd_expand(
                file,
                &opts.overrides(),
                center.as_deref(),
                out.as_deref(),
                stdout,
                stderr,
            )?;
            Ok(0)
        }
        Command::Eval {
            file,
            opts,
            center,
            points,
            times,
            expansion,
            out,
        } => {
            let f = ProblemFile::load(file)?;
            let pts = match points {
                Some(p) => read_points(p, f.dimension)?,
                None => f.output()?.grid.points(),
            };
            let ts = times.clone().unwrap_or_else(|| vec![f.horizon]);
            let saved = expansion
                .as_ref()
                .map(|p| -> Result<ExpansionCoeffs> {
                    ExpansionCoeffs::from_record(&serde_json::from_str(&std::fs::read_to_string(p)?)?)
                })
                .transpose()?;
            let mut buf = Vec::new();
            cmd_eval(&f, &opts.overrides(), center.as_deref(), saved, &pts, &ts, &mut buf)?;
            emit(out.as_deref(), &buf, stdout)?;
            Ok(0)
        }
        Command::Solve { file, opts, out } => {
            cmd_solve(
                &ProblemFile::load(file)?,
                &opts.overrides(),
                out.as_deref(),
                stdout,
                stderr,
            )?;
            Ok(0)
        }
        Command::Validate {
            file,
            opts,
            tol,
            out,
            inject_fault,
        } => {
            let fault = match inject_fault.as_deref() {
                None => None,
                Some("ray_weight") | Some("ray_weight_E4") => Some(Fault::RayWeight),
                Some(other) => return Err(Error::Parameter(format!("unknown fault '{other}'"))),
            };
            let report = cmd_validate(
                &ProblemFile::load(file)?,
                &opts.overrides(),
                &ValidateOptions { tol: *tol, fault },
            )?;
            let json = serde_json::to_string_pretty(&report)?;
            emit(out.as_deref(), format!("{json}\n").as_bytes(), stdout)?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                writeln!(
                    stderr,
                    "FAIL {}: deviation {:e} > {:e}",
                    c.name, c.max_deviation, c.tolerance
                )?;
            }
            Ok(if report.passed { 0 } else { 3 })
        }
    }
}

fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut (dyn Write + Send)) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn resolve_center(file: &ProblemFile, center: Option<&[f64]>) -> Result<Vec<f64>> {
    match center {
        Some(c) if c.len() != file.dimension => Err(Error::Parameter(format!(
            "center has {} coordinates, dimension is {}",
            c.len(),
            file.dimension
        ))),
        Some(c) => Ok(c.to_vec()),
        None => Ok(file
            .domain
            .lower
            .iter()
            .zip(&file.domain.upper)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()),
    }
}

/// Writes the expansion record as JSON (to `out` or `stdout`) and the diagnostics table
/// `k, sup|c_k|, sup|c_k| s^k` (to `stdout` when `out` is set, else to `stderr`).
pub fn cmd_expand(
    path: &Path,
    ov: &Overrides,
    center: Option<&[f64]>,
    out: Option<&Path>,
    stdout: &mut (dyn Write + Send),
    stderr: &mut (dyn Write + Send),
) -> Result<ExpansionCoeffs> {
    let f = ProblemFile::load(path)?;
    let pc = f.coefficients()?;
    let (cfg, note) = f.expansion_config(&pc, ov)?;
    if let Some(n) = note {
        writeln!(stderr, "note: {n}")?;
    }
    let y = resolve_center(&f, center)?;
    let e = expand(&pc, &y, &cfg)?;
    let json = serde_json::to_string_pretty(&e.to_record())?;
    emit(out, format!("{json}\n").as_bytes(), stdout)?;
    let table: &mut (dyn Write + Send) = if out.is_some() { stdout } else { stderr };
    write!(table, "{}", diagnostics_table(&e))?;
    Ok(e)
}

pub fn diagnostics_table(e: &ExpansionCoeffs) -> String {
    let d = &e.diagnostics;
    let mut s = format!("# s = {:.15e}\nk,c_up,c_up_scaled\n", d.reference_time);
    for k in 0..d.sup_norms.len() {
        s += &format!("{k},{:.15e},{:.15e}\n", d.sup_norms[k], d.scaled[k]);
    }
    s
}

fn read_points(path: &Path, dim: usize) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut pts = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
        match parsed {
            Ok(p) if p.len() == dim => pts.push(p),
            Ok(p) => {
                return Err(Error::Parameter(format!(
                    "{}:{}: expected {dim} coordinates, got {}",
                    path.display(),
                    line_no + 1,
                    p.len()
                )))
            }
            // A header row.
            Err(_) if pts.is_empty() && line_no == 0 => continue,
            Err(e) => return Err(Error::Parameter(format!("{}:{}: {e}", path.display(), line_no + 1))),
        }
    }
    Ok(pts)
}

/// CSV `t, x1..xn, component, value, log_value, grad_1..grad_n, residual` with the pole at
/// the center; rows ordered by time, point, component.
pub fn cmd_eval(
    f: &ProblemFile,
    ov: &Overrides,
    center: Option<&[f64]>,
    saved: Option<ExpansionCoeffs>,
    points: &[Vec<f64>],
    times: &[f64],
    w: &mut (dyn Write + Send),
) -> Result<()> {
    let pc = f.coefficients()?;
    let e = match saved {
        Some(e) => {
            if e.components() != pc.components() || e.center().len() != pc.dim() {
                return Err(Error::Structural("saved expansion does not match the problem".into()));
            }
            e
        }
        None => {
            let (cfg, _) = f.expansion_config(&pc, ov)?;
            expand(&pc, &resolve_center(f, center)?, &cfg)?
        }
    };
    let y = e.center().to_vec();
    let n = f.dimension;
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend(["component".into(), "value".into(), "log_value".into()]);
    header.extend((1..=n).map(|i| format!("grad{i}")));
    header.push("residual".into());
    writeln!(w, "{}", header.join(","))?;
    for &t in times {
        for x in points {
            let r = residual(&e, &pc, t, x, &y)?;
            for j in 0..pc.components() {
                let k = eval_kernel(&e, t, x, &y, j)?;
                let mut row = vec![format!("{t:e}")];
                row.extend(x.iter().map(|v| format!("{v:e}")));
                row.push(j.to_string());
                row.push(format!("{:.17e}", k.value));
                row.push(format!("{:.17e}", k.log_value));
                row.extend(k.gradient.iter().map(|g| format!("{g:.17e}")));
                row.push(format!("{:.17e}", r.relative[j]));
                writeln!(w, "{}", row.join(","))?;
            }
        }
    }
    Ok(())
}

pub fn cmd_solve(
    f: &ProblemFile,
    ov: &Overrides,
    out: Option<&Path>,
    stdout: &mut (dyn Write + Send),
    stderr: &mut (dyn Write + Send),
) -> Result<()> {
    let ps = f.spec()?;
    let pc = ps.coefficients.clone();
    let (mut cfg, note) = f.expansion_config(&pc, ov)?;
    if let Some(n) = note {
        writeln!(stderr, "note: {n}")?;
    }
    cfg.sample_diagnostics = false;
    let quad = f.quad_config(ov);
    let mut sol_csv = Vec::new();
    let mut density_csv = None;
    match ps.kind {
        ProblemKind::Cauchy => {
            let fam = KernelFamily::new(pc, cfg)?;
            solve_cauchy(&ps, &fam, &quad)?.write_csv(&mut sol_csv)?;
        }
        ProblemKind::Ibvp2 => {
            let fam = KernelFamily::new(pc, cfg)?;
            let (sol, dens) = solve_ibvp2(&ps, &fam, &BoundaryConfig::new(f.steps(ov)), &quad)?;
            sol.write_csv(&mut sol_csv)?;
            let mut d = Vec::new();
            dens.write_csv(&mut d)?;
            density_csv = Some(d);
        }
        ProblemKind::Burgers => burgers_demo(&ps, &cfg, &quad)?.write_csv(&mut sol_csv)?,
    }
    match out {
        Some(p) => {
            std::fs::write(p, &sol_csv)?;
            if let Some(d) = density_csv {
                let mut dp = p.as_os_str().to_owned();
                dp.push(".density.csv");
                std::fs::write(PathBuf::from(dp), d)?;
            }
        }
        None => {
            stdout.write_all(&sol_csv)?;
            if let Some(d) = density_csv {
                stdout.write_all(b"\n")?;
                stdout.write_all(&d)?;
            }
        }
    }
    Ok(())
}

pub fn cmd_validate(f: &ProblemFile, ov: &Overrides, opts: &ValidateOptions) -> Result<ValidationReport> {
    validate(f, ov, opts)
}
