//! Command-line front end for the zakframe library.
//!
//! Subcommands mirror the library modules: `theta`, `zak`, `verify-identity`,
//! `frame-bounds`, `dual`, `tight`, `limits`. Every run is deterministic for
//! a fixed configuration and build; the environment variable `GSL_THREADS`
//! caps compute parallelism without changing any output byte.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use zakframe::critical::{
    grid_with_exclusions, limit_profiles, sample_dual_profile, sample_tight_profile,
    standard_profile_grid, tight_window, QuadParams, DEFAULT_EPS_HALF, DEFAULT_N_QUAD,
};
use zakframe::factorization::verify_factorization;
use zakframe::framebounds::{analytic_lower_bound, frame_bounds_estimate, FrameBoundsConfig};
use zakframe::theta::{theta_eval, ThetaKind, ThetaNome};
use zakframe::windows::{LatticeParams, WindowKind, WindowSpec};
use zakframe::zak::{zak_grid, GridOffsets, ZakMethod};
use zakframe::{fmt_f64, Error};

#[derive(Parser)]
#[command(
    name = "zakframe",
    version,
    about = "Gabor frame analysis: theta functions, Zak transforms, frame bounds, dual/tight windows"
)]
struct Cli {
    /// Emit computation errors as machine-readable JSON on stderr.
    #[arg(long, global = true)]
    json_errors: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Gauss,
    Sech,
}

impl WindowArg {
    fn spec(self, gamma: f64) -> Result<WindowSpec, Error> {
        match self {
            WindowArg::Gauss => WindowSpec::gaussian(gamma),
            WindowArg::Sech => WindowSpec::hyperbolic_secant(gamma),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Direct,
    Closed,
}

#[derive(Clone, Copy, ValueEnum)]
enum OffsetArg {
    Zero,
    Half,
}

#[derive(Args)]
struct OutputArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Artifact format.
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

fn parse_rational(s: &str) -> Result<num_rational::Rational64, String> {
    let parse_int = |p: &str| p.trim().parse::<i64>().map_err(|e| format!("bad integer `{p}`: {e}"));
    let r = match s.split_once('/') {
        Some((num, den)) => {
            let den = parse_int(den)?;
            if den == 0 {
                return Err("denominator must be nonzero".into());
            }
            num_rational::Rational64::new(parse_int(num)?, den)
        }
        None => num_rational::Rational64::from_integer(parse_int(s)?),
    };
    if r <= num_rational::Rational64::from_integer(0) {
        return Err(format!("`{s}` must be positive"));
    }
    Ok(r)
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one Jacobi theta function at a complex point.
    #[command(allow_negative_numbers = true)]
    Theta {
        /// Which theta function (1-4).
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        kind: u8,

        /// Nome q in (0, 1); exclusive with --gamma.
        #[arg(long, conflicts_with = "gamma")]
        q: Option<f64>,

        /// Scale parameter: nome e^(-pi*gamma).
        #[arg(long)]
        gamma: Option<f64>,

        #[arg(long, default_value_t = 0.0)]
        z_re: f64,

        #[arg(long, default_value_t = 0.0)]
        z_im: f64,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Compute a Zak-transform field on the unit cell.
    Zak {
        #[arg(long, value_enum)]
        window: WindowArg,

        #[arg(long)]
        gamma: f64,

        /// Square grid resolution (shorthand for --grid-t and --grid-nu).
        #[arg(long, default_value_t = 64)]
        grid: usize,

        #[arg(long)]
        grid_t: Option<usize>,

        #[arg(long)]
        grid_nu: Option<usize>,

        #[arg(long, value_enum, default_value = "closed")]
        method: MethodArg,

        /// Grid offsets: zero or half-cell (1/(2n)).
        #[arg(long, value_enum, default_value = "zero")]
        offset: OffsetArg,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Verify the Zak-domain factorization identity and report residuals.
    VerifyIdentity {
        #[arg(long)]
        gamma: f64,

        #[arg(long, default_value_t = 64)]
        grid: usize,

        /// Pass threshold for the relative residual.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Estimate Gabor frame bounds by the Ron-Shen criterion.
    FrameBounds {
        #[arg(long, value_enum, default_value = "sech")]
        window: WindowArg,

        #[arg(long)]
        gamma: f64,

        /// Lattice constant a as a rational "p/q".
        #[arg(long, value_parser = parse_rational)]
        a: num_rational::Rational64,

        /// Lattice constant b as a rational "p/q".
        #[arg(long, value_parser = parse_rational)]
        b: num_rational::Rational64,

        /// Time samples per structural period.
        #[arg(long, default_value_t = 64)]
        grid_t: usize,

        /// Row/column half-width override for the truncated matrices.
        #[arg(long)]
        trunc: Option<usize>,

        /// Convergence tolerance for the truncation-doubling diagnostic.
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Canonical dual window at critical density (a = b = 1).
    #[command(allow_negative_numbers = true)]
    Dual {
        #[arg(long, value_enum)]
        window: WindowArg,

        #[arg(long)]
        gamma: f64,

        /// Single evaluation point; exclusive with the profile flags.
        #[arg(long, conflicts_with_all = ["t_min", "t_max", "t_count"])]
        t: Option<f64>,

        #[arg(long, default_value_t = -3.0)]
        t_min: f64,

        #[arg(long, default_value_t = 3.0)]
        t_max: f64,

        #[arg(long, default_value_t = 200)]
        t_count: usize,

        /// Periodic-trapezoid node count.
        #[arg(long, default_value_t = DEFAULT_N_QUAD)]
        quad: usize,

        /// Exclusion radius around half-integers.
        #[arg(long, default_value_t = DEFAULT_EPS_HALF)]
        eps_half: f64,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Canonical tight window at critical density (a = b = 1).
    #[command(allow_negative_numbers = true)]
    Tight {
        #[arg(long, value_enum, default_value = "gauss")]
        window: WindowArg,

        #[arg(long)]
        gamma: f64,

        #[arg(long, conflicts_with_all = ["t_min", "t_max", "t_count"])]
        t: Option<f64>,

        #[arg(long, default_value_t = -3.0)]
        t_min: f64,

        #[arg(long, default_value_t = 3.0)]
        t_max: f64,

        #[arg(long, default_value_t = 200)]
        t_count: usize,

        #[arg(long, default_value_t = DEFAULT_N_QUAD)]
        quad: usize,

        #[arg(long, default_value_t = DEFAULT_EPS_HALF)]
        eps_half: f64,

        #[command(flatten)]
        output: OutputArgs,
    },

    /// Distances of the tight-window family to its two limit shapes.
    Limits {
        /// Comma-separated list of gamma values.
        #[arg(long, value_delimiter = ',', required = true)]
        gammas: Vec<f64>,

        #[arg(long, default_value_t = DEFAULT_N_QUAD)]
        quad: usize,

        #[arg(long, default_value_t = DEFAULT_EPS_HALF)]
        eps_half: f64,

        #[command(flatten)]
        output: OutputArgs,
    },
}

fn configure_threads() {
    if let Ok(v) = std::env::var("GSL_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn emit(output: &OutputArgs, content: &str) -> Result<(), Error> {
    match &output.out {
        Some(path) => {
            fs::write(path, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Theta { kind, q, gamma, z_re, z_im, output } => {
            let nome = match (q, gamma) {
                (Some(q), None) => ThetaNome::new(*q)?,
                (None, Some(g)) => ThetaNome::from_gamma(*g)?,
                _ => return Err(Error::DomainError("provide exactly one of --q, --gamma".into())),
            };
            let kind = match kind {
                1 => ThetaKind::Theta1,
                2 => ThetaKind::Theta2,
                3 => ThetaKind::Theta3,
                _ => ThetaKind::Theta4,
            };
            let value = theta_eval(kind, Complex64::new(*z_re, *z_im), &nome)?;
            let content = match output.format {
                FormatArg::Json => {
                    let mut s = String::from("{\n");
                    let _ = writeln!(s, "  \"kind\": {:?},", kind as u8 + 1);
                    let _ = writeln!(s, "  \"q\": {},", fmt_f64(nome.q()));
                    let _ = writeln!(s, "  \"n_max\": {},", nome.n_max());
                    let _ = writeln!(s, "  \"z_re\": {},", fmt_f64(*z_re));
                    let _ = writeln!(s, "  \"z_im\": {},", fmt_f64(*z_im));
                    let _ = writeln!(s, "  \"value_re\": {},", fmt_f64(value.re));
                    let _ = writeln!(s, "  \"value_im\": {}", fmt_f64(value.im));
                    s.push_str("}\n");
                    s
                }
                FormatArg::Csv => {
                    format!(
                        "q,z_re,z_im,value_re,value_im\n{},{},{},{},{}\n",
                        fmt_f64(nome.q()),
                        fmt_f64(*z_re),
                        fmt_f64(*z_im),
                        fmt_f64(value.re),
                        fmt_f64(value.im)
                    )
                }
            };
            emit(output, &content)
        }

        Command::Zak { window, gamma, grid, grid_t, grid_nu, method, offset, output } => {
            let w = window.spec(*gamma)?;
            let n_t = grid_t.unwrap_or(*grid);
            let n_nu = grid_nu.unwrap_or(*grid);
            let offsets = match offset {
                OffsetArg::Zero => GridOffsets::zero(),
                OffsetArg::Half => GridOffsets::half_cell(n_t, n_nu),
            };
            let method = match method {
                MethodArg::Direct => ZakMethod::Direct,
                MethodArg::Closed => ZakMethod::Closed,
            };
            let field = zak_grid(&w, n_t, n_nu, offsets, method)?;
            let content = match output.format {
                FormatArg::Json => field.to_json()? + "\n",
                FormatArg::Csv => {
                    let mut buf = Vec::new();
                    field.write_csv(&mut buf)?;
                    String::from_utf8(buf).expect("csv is utf8")
                }
            };
            emit(output, &content)
        }

        Command::VerifyIdentity { gamma, grid, tol, output } => {
            let report = verify_factorization(*gamma, *grid, *grid)?;
            let passed = report.max_rel_residual < *tol;
            let content = match output.format {
                FormatArg::Json => report.to_json()? + "\n",
                FormatArg::Csv => format!(
                    "gamma,e_claimed,max_abs_residual,max_rel_residual,rank1_defect,max_phase\n{},{},{},{},{},{}\n",
                    fmt_f64(*gamma),
                    fmt_f64(report.e_claimed),
                    fmt_f64(report.max_abs_residual),
                    fmt_f64(report.max_rel_residual),
                    fmt_f64(report.rank1_defect),
                    fmt_f64(report.max_phase),
                ),
            };
            emit(output, &content)?;
            println!(
                "{}: gamma={} max_rel_residual={:.3e} max_abs_residual={:.3e} (threshold {:.1e})",
                if passed { "PASS" } else { "FAIL" },
                gamma,
                report.max_rel_residual,
                report.max_abs_residual,
                tol
            );
            Ok(())
        }

        Command::FrameBounds { window, gamma, a, b, grid_t, trunc, tol, output } => {
            let w = window.spec(*gamma)?;
            let lat = LatticeParams::new(*a, *b)?;
            let config = FrameBoundsConfig {
                t_grid: *grid_t,
                l_row: *trunc,
                n_col: None,
                convergence_tol: *tol,
            };
            let mut report = frame_bounds_estimate(&w, &lat, &config)?;
            if w.kind() == WindowKind::HyperbolicSecant && lat.is_undersampled() {
                report.a_analytic = Some(analytic_lower_bound(*gamma, &lat, &config)?);
            }
            let content = match output.format {
                FormatArg::Json => report.to_json()? + "\n",
                FormatArg::Csv => format!(
                    "gamma,a,b,a_est,b_est,a_analytic,converged\n{},{},{},{},{},{},{}\n",
                    fmt_f64(*gamma),
                    a,
                    b,
                    fmt_f64(report.a_est),
                    fmt_f64(report.b_est),
                    report.a_analytic.map(fmt_f64).unwrap_or_default(),
                    report.converged,
                ),
            };
            emit(output, &content)?;
            println!(
                "gamma={:<8} a={:<6} b={:<6} A_est={:<12.6e} B_est={:<12.6e} A_analytic={} converged={}",
                gamma,
                a.to_string(),
                b.to_string(),
                report.a_est,
                report.b_est,
                report
                    .a_analytic
                    .map(|v| format!("{v:.6e}"))
                    .unwrap_or_else(|| "-".into()),
                report.converged
            );
            if lat.is_critical() {
                println!("note: a*b = 1; not a frame at critical density (A degenerates under refinement)");
            }
            Ok(())
        }

        Command::Dual { window, gamma, t, t_min, t_max, t_count, quad, eps_half, output } => {
            let w = window.spec(*gamma)?;
            let params = QuadParams { n_quad: *quad, eps_half: *eps_half };
            match t {
                Some(t) => {
                    let v = zakframe::critical::dual_numeric(&w, *t, &params)?;
                    println!("{}", fmt_f64(v.value));
                    if output.out.is_some() {
                        let profile = sample_dual_profile(&w, &[*t], &params)?;
                        emit_profile(&profile, output)?;
                    }
                    Ok(())
                }
                None => {
                    let grid = grid_with_exclusions(*t_min, *t_max, *t_count, *eps_half);
                    let profile = sample_dual_profile(&w, &grid, &params)?;
                    emit_profile(&profile, output)
                }
            }
        }

        Command::Tight { window, gamma, t, t_min, t_max, t_count, quad, eps_half, output } => {
            let w = window.spec(*gamma)?;
            let params = QuadParams { n_quad: *quad, eps_half: *eps_half };
            match t {
                Some(t) => {
                    let v = tight_window(&w, *t, &params)?;
                    println!("{}", fmt_f64(v.value));
                    if output.out.is_some() {
                        let profile = sample_tight_profile(&w, &[*t], &params)?;
                        emit_profile(&profile, output)?;
                    }
                    Ok(())
                }
                None => {
                    let grid = grid_with_exclusions(*t_min, *t_max, *t_count, *eps_half);
                    let profile = sample_tight_profile(&w, &grid, &params)?;
                    emit_profile(&profile, output)
                }
            }
        }

        Command::Limits { gammas, quad, eps_half, output } => {
            let params = QuadParams { n_quad: *quad, eps_half: *eps_half };
            let grid = standard_profile_grid();
            let distances = limit_profiles(gammas, &grid, &params)?;
            let content = match output.format {
                FormatArg::Json => serde_json::to_string_pretty(&distances)? + "\n",
                FormatArg::Csv => {
                    let mut s = String::from("gamma,dist_sinc,dist_indicator\n");
                    for d in &distances {
                        let _ = writeln!(
                            s,
                            "{},{},{}",
                            fmt_f64(d.gamma),
                            fmt_f64(d.dist_sinc),
                            fmt_f64(d.dist_indicator)
                        );
                    }
                    s
                }
            };
            emit(output, &content)
        }
    }
}

fn emit_profile(
    profile: &zakframe::critical::SampledProfile,
    output: &OutputArgs,
) -> Result<(), Error> {
    let content = match output.format {
        FormatArg::Json => profile.to_json()? + "\n",
        FormatArg::Csv => {
            let mut buf = Vec::new();
            profile.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("csv is utf8")
        }
    };
    emit(output, &content)
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.json_errors {
                eprintln!(
                    "{}",
                    serde_json::json!({ "error": e.to_string(), "kind": error_kind(&e) })
                );
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::FAILURE
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NomeOutOfRange(_) => "nome_out_of_range",
        Error::ArgumentOutOfStrip { .. } => "argument_out_of_strip",
        Error::UnsupportedKind(_) => "unsupported_kind",
        Error::InvalidGamma(_) => "invalid_gamma",
        Error::NonpositiveDilation(_) => "nonpositive_dilation",
        Error::InvalidLattice { .. } => "invalid_lattice",
        Error::DensityTooHigh(_) => "density_too_high",
        Error::TruncationTooSmall { .. } => "truncation_too_small",
        Error::NotReduced(_) => "not_reduced",
        Error::NumericalFailure(_) => "numerical_failure",
        Error::ZeroDivision(_) => "zero_division",
        Error::TooCloseToHalfInteger { .. } => "too_close_to_half_integer",
        Error::QuadratureNotConverged { .. } => "quadrature_not_converged",
        Error::DomainError(_) => "domain_error",
        Error::GridTooSmall(_, _) => "grid_too_small",
        Error::Serialization(_) => "serialization",
    }
}
