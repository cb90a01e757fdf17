//! `echcap` — command-line front end for the ECH capacity calculator.
//!
//! One subcommand per library module, machine-readable CSV or JSON on
//! stdout (or `--out`), byte-deterministic for a given invocation. Exit
//! codes: 0 success (for `embed`: no violation found), 2 an embedding
//! obstruction was found (`embed` only), 1 usage or domain errors, which
//! are reported on stderr.

use clap::{Parser, Subcommand, ValueEnum};
use echcap_core::{
    check_embedding, convergence_report, packing_asymptotic_check, packing_lower_bound,
    packing_volume_floor, parse_domain_spec, parse_j_grid, parse_radii, parse_rational,
    rational_to_f64, render_rational, sequence_of, upper_bound_points, Convention, DomainSpec,
    PackingProblem, SwParams, Verdict, VolumeReport, DEFAULT_K_MAX,
};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "echcap",
    version,
    about = "ECH capacity sequences of model four-dimensional symplectic domains",
    long_about = "Computes ECH capacity tables of balls, ellipsoids, scalings, and disjoint \
                  unions in exact rational arithmetic, plus volume asymptotics, ball-packing \
                  lower bounds, embedding obstructions, and the capacity-growth upper-bound \
                  curve of a contact form.\n\nDomain specs: ball:<r>, ellipsoid:<a>,<b>, \
                  scale:<s>:(<spec>), union:(<spec>;<spec>;...), with <r>,<a>,<b>,<s> decimal \
                  or p/q rationals; whitespace is insignificant."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    /// c_k²/(4k) → volume of the domain.
    Liouville,
    /// c_k²/(2k) → volume of the boundary contact manifold.
    Contact,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Convention {
        match c {
            ConventionArg::Liouville => Convention::Liouville,
            ConventionArg::Contact => Convention::Contact,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Capacity table c_0..c_K of one domain.
    Caps {
        /// Domain spec, e.g. "ball:1" or "ellipsoid:3/2,4".
        #[arg(long)]
        domain: String,
        /// Largest index K of the table.
        #[arg(long)]
        kmax: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Append a decimal column with this many digits.
        #[arg(long)]
        decimal: Option<usize>,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Capacity table of the disjoint union of several domains.
    Union {
        /// Domain spec; repeat the flag once per part.
        #[arg(long = "domain", required = true)]
        domains: Vec<String>,
        /// Largest index of the table (the union convolution is O(K²)).
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        kmax: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Append a decimal column with this many digits.
        #[arg(long)]
        decimal: Option<usize>,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Windowed volume estimator c_k²/(2dk) with convergence diagnostics.
    Volume {
        /// Domain spec.
        #[arg(long)]
        domain: String,
        /// Window start (k ≥ 1).
        #[arg(long)]
        klo: u64,
        /// Window end (inclusive).
        #[arg(long)]
        khi: u64,
        #[arg(long, value_enum, default_value = "liouville")]
        convention: ConventionArg,
        /// Reference volume; enables the deviation column.
        #[arg(long)]
        target: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ball-packing lower bound: pointwise, windowed, or volume floor.
    Pack {
        /// Text file with one ball radius per line (# comments allowed).
        #[arg(long)]
        radii: PathBuf,
        /// Pointwise mode: the bound at this index (k ≥ 1).
        #[arg(long)]
        k: Option<u64>,
        /// Window mode: start of the k-window.
        #[arg(long)]
        klo: Option<u64>,
        /// Window mode: end of the k-window (inclusive).
        #[arg(long)]
        khi: Option<u64>,
        /// Floor mode: cobordism depth a > 0.
        #[arg(long)]
        a: Option<f64>,
        /// Floor mode: uncovered-volume allowance ε > 0.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Floor mode: contact volume vol(Y,λ) > 0.
        #[arg(long)]
        vol: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan c_k(from) ≤ c_k(into) for an embedding obstruction.
    Embed {
        /// Domain spec of the source.
        #[arg(long)]
        from: String,
        /// Domain spec of the target.
        #[arg(long)]
        into: String,
        /// Scan k = 0..=K.
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        kmax: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upper-bound curve for capacity growth of a contact form.
    Swbound {
        /// Contact volume V > 0.
        #[arg(long)]
        vol: f64,
        /// Root-problem exponent offset δ (decimal or p/q), 0 < δ < 1/16.
        #[arg(long)]
        delta: String,
        /// Correction-factor exponent γ (decimal or p/q), 0 < γ < 1/4·δ.
        #[arg(long)]
        gamma: String,
        /// Correction-factor constant κ ≥ 0.
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        /// Spectral-flow constant (recorded in the parameter set).
        #[arg(long = "k-sf", default_value_t = 1.0)]
        k_sf: f64,
        /// Energy-bound additive constant C.
        #[arg(long = "c-energy", default_value_t = 1.0)]
        c_energy: f64,
        /// Radius-comparison constant C₄ in r̄ = C₄·r^(1/(1−2γ)).
        #[arg(long, default_value_t = 1.0)]
        c4: f64,
        /// Auxiliary constant (recorded in the parameter set).
        #[arg(long, default_value_t = 1.0)]
        c10: f64,
        /// Additive error constant C₁₁ in the bound numerator.
        #[arg(long, default_value_t = 1.0)]
        c11: f64,
        /// Denominator constant C₁₂ in the bound.
        #[arg(long, default_value_t = 1.0)]
        c12: f64,
        /// Geometric grid "start:end:logstepB", e.g. "1e20:1e300:logstep10".
        #[arg(long = "j-grid")]
        j_grid: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

/// Runs `emit` against the chosen sink (file or stdout) with buffering.
fn with_output(
    out: Option<&Path>,
    emit: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), String> {
    let io_err = |e: io::Error| e.to_string();
    match out {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
            let mut w = BufWriter::new(file);
            emit(&mut w).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            emit(&mut w).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
    }
}

fn emit_json<T: serde::Serialize>(
    value: &T,
    out: Option<&Path>,
) -> Result<(), String> {
    let doc = serde_json::to_string(value).map_err(|e| e.to_string())?;
    with_output(out, |w| writeln!(w, "{doc}"))
}

fn parse_domain(text: &str) -> Result<DomainSpec, String> {
    parse_domain_spec(text).map_err(|e| e.to_string())
}

fn dispatch(cmd: Command) -> Result<i32, String> {
    match cmd {
        Command::Caps { domain, kmax, format, decimal, out } => {
            let spec = parse_domain(&domain)?;
            let seq = sequence_of(&spec, kmax);
            match format {
                Format::Csv => {
                    with_output(out.as_deref(), |w| seq.write_csv(w, decimal))?
                }
                Format::Json => emit_json(&seq.records(decimal), out.as_deref())?,
            }
            Ok(0)
        }
        Command::Union { domains, kmax, format, decimal, out } => {
            let parts = domains
                .iter()
                .map(|d| parse_domain(d))
                .collect::<Result<Vec<_>, _>>()?;
            let spec = DomainSpec::union(parts).map_err(|e| e.to_string())?;
            let seq = sequence_of(&spec, kmax);
            match format {
                Format::Csv => {
                    with_output(out.as_deref(), |w| seq.write_csv(w, decimal))?
                }
                Format::Json => emit_json(&seq.records(decimal), out.as_deref())?,
            }
            Ok(0)
        }
        Command::Volume { domain, klo, khi, convention, target, format, out } => {
            let spec = parse_domain(&domain)?;
            if klo > khi {
                return Err(format!("--klo {klo} exceeds --khi {khi}"));
            }
            let seq = sequence_of(&spec, khi);
            let report = convergence_report(&seq, klo, khi, convention.into(), target)
                .map_err(|e| e.to_string())?;
            match format {
                Format::Csv => with_output(out.as_deref(), |w| {
                    writeln!(w, "{}", VolumeReport::csv_header())?;
                    writeln!(w, "{}", report.csv_row())
                })?,
                Format::Json => emit_json(&report, out.as_deref())?,
            }
            Ok(0)
        }
        Command::Pack { radii, k, klo, khi, a, epsilon, vol, format, out } => {
            let text = fs::read_to_string(&radii)
                .map_err(|e| format!("cannot read {}: {e}", radii.display()))?;
            let radii = parse_radii(&text).map_err(|e| e.to_string())?;
            run_pack(&radii, k, klo, khi, a, epsilon, vol, format, out.as_deref())
        }
        Command::Embed { from, into, kmax, format, out } => {
            let from = parse_domain(&from)?;
            let into = parse_domain(&into)?;
            let report = check_embedding(&from, &into, kmax);
            match format {
                Format::Csv => with_output(out.as_deref(), |w| {
                    writeln!(
                        w,
                        "kind,index,from_value,into_value,k_max_checked,\
                         from_volume,into_volume,precheck_pass"
                    )?;
                    let (kind, index, fv, iv) = match &report.verdict {
                        Verdict::Violation { index, from_value, into_value } => (
                            "violation",
                            index.to_string(),
                            from_value.clone(),
                            into_value.clone(),
                        ),
                        Verdict::NoViolationUpTo { .. } => {
                            ("no_violation_up_to", String::new(), String::new(), String::new())
                        }
                    };
                    writeln!(
                        w,
                        "{kind},{index},{fv},{iv},{},{},{},{}",
                        report.k_max_checked,
                        report.volume_precheck.from_volume,
                        report.volume_precheck.into_volume,
                        report.volume_precheck.pass
                    )
                })?,
                Format::Json => emit_json(&report, out.as_deref())?,
            }
            Ok(if report.is_violation() { 2 } else { 0 })
        }
        Command::Swbound {
            vol,
            delta,
            gamma,
            kappa,
            k_sf,
            c_energy,
            c4,
            c10,
            c11,
            c12,
            j_grid,
            format,
            out,
        } => {
            let delta = parse_small_rational("--delta", &delta)?;
            let gamma = parse_small_rational("--gamma", &gamma)?;
            let params = SwParams {
                v: vol,
                delta,
                gamma,
                kappa,
                k_sf,
                c_energy,
                c4,
                c10,
                c11,
                c12,
            };
            let grid = parse_j_grid(&j_grid).map_err(|e| e.to_string())?;
            let points = upper_bound_points(&params, &grid).map_err(|e| e.to_string())?;
            match format {
                Format::Csv => with_output(out.as_deref(), |w| {
                    writeln!(w, "j,r_j,r_bar,g,nu,bound,heuristic")?;
                    for p in &points {
                        writeln!(
                            w,
                            "{},{},{},{},{},{},{}",
                            fnum(p.j),
                            fnum(p.r_j),
                            fnum(p.r_bar),
                            fnum(p.g_value),
                            fnum(p.nu),
                            fnum(p.bound_value),
                            fnum(p.heuristic_value)
                        )?;
                    }
                    Ok(())
                })?,
                Format::Json => emit_json(&points, out.as_deref())?,
            }
            Ok(0)
        }
    }
}

/// Shortest round-trip rendering of a float for CSV cells whose values
/// span hundreds of orders of magnitude, matching the JSON emitter.
fn fnum(x: f64) -> String {
    if x.is_finite() {
        serde_json::to_string(&x).expect("finite float serializes")
    } else {
        format!("{x}")
    }
}

/// δ and γ arrive as exact text ("1/32" or "0.03125") and are used as
/// floats; parse through the rational grammar so both spellings hit the
/// same value.
fn parse_small_rational(flag: &str, text: &str) -> Result<f64, String> {
    let r = parse_rational(text).map_err(|e| format!("{flag}: {e}"))?;
    Ok(rational_to_f64(&r))
}

#[allow(clippy::too_many_arguments)]
fn run_pack(
    radii: &[echcap_core::Rational],
    k: Option<u64>,
    klo: Option<u64>,
    khi: Option<u64>,
    a: Option<f64>,
    epsilon: Option<f64>,
    vol: Option<f64>,
    format: Format,
    out: Option<&Path>,
) -> Result<i32, String> {
    let window_flags = klo.is_some() || khi.is_some();
    let floor_flags = a.is_some() || epsilon.is_some() || vol.is_some();
    let modes = usize::from(k.is_some()) + usize::from(window_flags) + usize::from(floor_flags);
    if modes != 1 {
        return Err(
            "pack needs exactly one mode: --k K, or --klo K --khi K, or --a X --epsilon X --vol X"
                .to_string(),
        );
    }

    if let Some(k) = k {
        if k == 0 {
            return Err("--k must be at least 1 (the bound uses index k−1)".to_string());
        }
        let bound = packing_lower_bound(radii, k);
        match format {
            Format::Csv => with_output(out, |w| {
                writeln!(w, "k,bound")?;
                writeln!(w, "{k},{}", render_rational(&bound))
            })?,
            Format::Json => emit_json(
                &serde_json::json!({ "k": k, "bound": render_rational(&bound) }),
                out,
            )?,
        }
        return Ok(0);
    }

    if window_flags {
        let (Some(klo), Some(khi)) = (klo, khi) else {
            return Err("window mode needs both --klo and --khi".to_string());
        };
        let report = packing_asymptotic_check(radii, klo, khi).map_err(|e| e.to_string())?;
        match format {
            Format::Csv => with_output(out, |w| {
                writeln!(w, "k_lo,k_hi,min_ratio,argmin_k,asymptotic_target,gap")?;
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    report.k_lo,
                    report.k_hi,
                    report.min_ratio,
                    report.argmin_k,
                    report.asymptotic_target,
                    report.gap
                )
            })?,
            Format::Json => emit_json(&report, out)?,
        }
        return Ok(0);
    }

    let (Some(a), Some(epsilon), Some(vol)) = (a, epsilon, vol) else {
        return Err("floor mode needs --a, --epsilon, and --vol together".to_string());
    };
    let problem =
        PackingProblem::new(radii.to_vec(), a, epsilon, vol).map_err(|e| e.to_string())?;
    let report = packing_volume_floor(&problem);
    match format {
        Format::Csv => with_output(out, |w| {
            writeln!(w, "floor,ball_side,infeasible_claim")?;
            writeln!(w, "{},{},{}", report.floor, report.ball_side, report.infeasible_claim)
        })?,
        Format::Json => emit_json(&report, out)?,
    }
    Ok(0)
}
