//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input error, 2 empty feasible set, 3 failed check.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::actuator::{motor_side_speed, peak_output_torque, reflected_inertia, ActuatorSpec};
use crate::error::Error;
use crate::gear_model::{
    carrier_clearance, gear_ratio, pitch_diameters, validate, ConstraintReport, GearboxDesign, SynthesisSpec,
    ToothCounts,
};
use crate::specfile::{parse_actuators, read_actuator_file, read_spec_file, BUNDLED_ACTUATORS};
use crate::synthesizer::{default_workers, sweep, synthesize_with_workers, Solution, SolutionSet, SweepParam};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

const SPEC_FORMAT_HELP: &str = "\
SPEC FILE FORMAT
  One `key = value` per line; `#` starts a comment.
  Required: target_ratio (\"p\" or \"p/q\"), rotor_bore_mm, module_mm.
  Optional (default): n_planets (4), min_teeth_sun (17),
    min_teeth_planet_in (17), min_teeth_planet_out (17),
    alpha_min_rad (0.1), ratio_tolerance (0), top_k (10).
  Unknown keys are rejected.

EXIT CODES
  0 success, 1 input error, 2 empty feasible set, 3 failed check";

pub const SYNTH_CSV_HEADER: [&str; 16] = [
    "rank",
    "z_sun",
    "z_planet_in",
    "z_planet_out",
    "z_ring_fixed",
    "z_ring_out",
    "n_planets",
    "cost",
    "ratio",
    "clearance_rad",
    "clearance_deg",
    "d_sun_mm",
    "d_planet_in_mm",
    "d_planet_out_mm",
    "d_ring_fixed_mm",
    "d_ring_out_mm",
];

pub const SWEEP_CSV_HEADER: [&str; 12] = [
    "param",
    "value",
    "status",
    "feasible_count",
    "z_sun",
    "z_planet_in",
    "z_planet_out",
    "z_ring_fixed",
    "z_ring_out",
    "cost",
    "ratio",
    "message",
];

pub const ENVELOPE_CSV_HEADER: [&str; 5] = [
    "actuator",
    "gear_ratio",
    "peak_output_torque_nm",
    "motor_side_speed_rad_s",
    "reflected_inertia_kg_m2",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Jsonl,
}

#[derive(Debug, Parser)]
#[command(
    name = "gearsynth",
    version,
    about = "Tooth-count synthesis for 3K compound planetary gearboxes",
    after_long_help = SPEC_FORMAT_HELP
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Spec file (synth, check, sweep) or actuator fixture (envelope).
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,

    /// Suppress summary lines on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank all feasible tooth-count combinations.
    Synth {
        /// Search threads; output is identical for any value.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Evaluate every constraint for one design.
    Check {
        #[arg(long)]
        zs: u32,
        #[arg(long)]
        zp1: u32,
        #[arg(long)]
        zp2: u32,
        #[arg(long)]
        zf: u32,
        #[arg(long)]
        zo: u32,
    },
    /// Re-run synthesis for each value of one spec parameter.
    Sweep {
        /// target_ratio, module_mm or n_planets.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Output torque, motor speed and reflected inertia per actuator.
    Envelope,
}

/// One JSONL line of `synth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub rank: usize,
    pub design: DesignRecord,
    pub cost: f64,
    pub ratio: String,
    pub clearance_rad: f64,
    pub clearance_deg: f64,
    pub pitch_diameters_mm: [f64; 5],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub z_sun: u32,
    pub z_planet_in: u32,
    pub z_planet_out: u32,
    pub z_ring_fixed: u32,
    pub z_ring_out: u32,
    pub n_planets: u32,
    pub module_mm: String,
    pub rotor_bore_mm: String,
}

impl SolutionRecord {
    pub fn new(rank: usize, s: &Solution) -> Self {
        let t = s.design.teeth();
        Self {
            rank,
            design: DesignRecord {
                z_sun: t.sun,
                z_planet_in: t.planet_in,
                z_planet_out: t.planet_out,
                z_ring_fixed: t.ring_fixed,
                z_ring_out: t.ring_out,
                n_planets: s.design.n_planets(),
                module_mm: s.design.module_mm().to_string(),
                rotor_bore_mm: s.design.rotor_bore_mm().to_string(),
            },
            cost: s.cost,
            ratio: s.ratio.to_string(),
            clearance_rad: s.clearance_rad,
            clearance_deg: s.clearance_rad.to_degrees(),
            pitch_diameters_mm: pitch_diameters(&s.design),
        }
    }

    pub fn teeth(&self) -> ToothCounts {
        let d = &self.design;
        ToothCounts::new(d.z_sun, d.z_planet_in, d.z_planet_out, d.z_ring_fixed, d.z_ring_out)
    }
}

fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

/// Failure that maps to a non-zero exit code.
struct Exit(i32, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        Exit(EXIT_INPUT, e.to_string())
    }
}

impl From<io::Error> for Exit {
    fn from(e: io::Error) -> Self {
        Exit(EXIT_INPUT, e.to_string())
    }
}

impl From<csv::Error> for Exit {
    fn from(e: csv::Error) -> Self {
        Exit(EXIT_INPUT, e.to_string())
    }
}

impl From<serde_json::Error> for Exit {
    fn from(e: serde_json::Error) -> Self {
        Exit(EXIT_INPUT, e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    run_cli(&cli, out, err)
}

pub fn run_cli(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Synth { workers } => cmd_synth(cli, *workers, out, err),
        Command::Check { zs, zp1, zp2, zf, zo } => cmd_check(cli, ToothCounts::new(*zs, *zp1, *zp2, *zf, *zo), out),
        Command::Sweep { param, values, workers } => cmd_sweep(cli, param, values, *workers, out),
        Command::Envelope => cmd_envelope(cli, out),
    };
    match result {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn spec_path(cli: &Cli) -> Result<&Path, Exit> {
    cli.spec
        .as_deref()
        .ok_or_else(|| Exit(EXIT_INPUT, "--spec <path> is required".into()))
}

fn load_spec(cli: &Cli) -> Result<SynthesisSpec, Exit> {
    let path = spec_path(cli)?;
    read_spec_file(path).map_err(|e| Exit(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn workers_or_default(workers: Option<usize>) -> Result<usize, Exit> {
    match workers {
        Some(0) => Err(Exit(EXIT_INPUT, "workers must be at least 1".into())),
        Some(n) => Ok(n),
        None => Ok(default_workers()),
    }
}

fn cmd_synth(cli: &Cli, workers: Option<usize>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Exit> {
    let spec = load_spec(cli)?;
    let set = synthesize_with_workers(&spec, workers_or_default(workers)?)?;
    write_solutions(&set, cli.format, out)?;

    if set.is_empty() {
        writeln!(err, "{}", prune_summary(&set))?;
        return Ok(EXIT_EMPTY);
    }
    if !cli.quiet {
        writeln!(
            err,
            "{} feasible of {} candidates; showing {}",
            set.feasible_count,
            set.candidates_examined,
            set.solutions.len()
        )?;
    }
    Ok(EXIT_OK)
}

/// One-line explanation of an empty result.
pub fn prune_summary(set: &SolutionSet) -> String {
    if set.candidates_examined == 0 {
        return format!(
            "no feasible design: search domain is empty (floor(D/M) = {} is below the minimum tooth counts)",
            set.spec.ring_cap()
        );
    }
    let mut msg = format!(
        "no feasible design among {} candidates; eliminated by",
        set.candidates_examined
    );
    for (id, n) in set.prune_counts.iter() {
        msg.push_str(&format!(" {id}={n}"));
    }
    if let Some((id, _)) = set.prune_counts.dominant() {
        msg.push_str(&format!("; most pruned by {id}"));
    }
    msg
}

pub fn write_solutions(set: &SolutionSet, format: Format, out: &mut dyn Write) -> Result<(), io::Error> {
    let records: Vec<SolutionRecord> = set
        .solutions
        .iter()
        .enumerate()
        .map(|(i, s)| SolutionRecord::new(i + 1, s))
        .collect();
    match format {
        Format::Table => {
            writeln!(
                out,
                "{:>4} {:>5} {:>5} {:>5} {:>5} {:>5} {:>6} {:>14} {:>12} {:>12}  pitch diameters (mm)",
                "rank", "Z_S", "Z_P1", "Z_P2", "Z_F", "Z_O", "ratio", "cost", "alpha (rad)", "alpha (deg)"
            )?;
            for r in &records {
                let d = &r.design;
                let diameters: Vec<String> = r.pitch_diameters_mm.iter().map(|x| format!("{x:.3}")).collect();
                writeln!(
                    out,
                    "{:>4} {:>5} {:>5} {:>5} {:>5} {:>5} {:>6} {:>14} {:>12} {:>12}  {}",
                    r.rank,
                    d.z_sun,
                    d.z_planet_in,
                    d.z_planet_out,
                    d.z_ring_fixed,
                    d.z_ring_out,
                    r.ratio,
                    fixed(r.cost),
                    fixed(r.clearance_rad),
                    fixed(r.clearance_deg),
                    diameters.join(" ")
                )?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(SYNTH_CSV_HEADER)?;
            for r in &records {
                let d = &r.design;
                let mut row = vec![
                    r.rank.to_string(),
                    d.z_sun.to_string(),
                    d.z_planet_in.to_string(),
                    d.z_planet_out.to_string(),
                    d.z_ring_fixed.to_string(),
                    d.z_ring_out.to_string(),
                    d.n_planets.to_string(),
                    fixed(r.cost),
                    r.ratio.clone(),
                    fixed(r.clearance_rad),
                    fixed(r.clearance_deg),
                ];
                row.extend(r.pitch_diameters_mm.iter().map(|x| fixed(*x)));
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for r in &records {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn cmd_check(cli: &Cli, teeth: ToothCounts, out: &mut dyn Write) -> Result<i32, Exit> {
    let spec = load_spec(cli)?;
    let design = GearboxDesign::for_spec(teeth, &spec)?;
    let report = validate(&design, &spec);
    write_report(&design, &report, cli.format, out)?;
    Ok(if report.overall_feasible() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

pub fn write_report(
    design: &GearboxDesign,
    report: &ConstraintReport,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), io::Error> {
    let status = |ok: bool| if ok { "pass" } else { "FAIL" };
    match format {
        Format::Table => {
            let ratio = gear_ratio(design).map_or_else(|_| "degenerate-denominator".to_string(), |g| g.to_string());
            let alpha = carrier_clearance(design);
            writeln!(
                out,
                "design      {} (n_planets = {})",
                design.teeth(),
                design.n_planets()
            )?;
            writeln!(out, "gear ratio  {ratio}")?;
            writeln!(
                out,
                "clearance   {} rad ({} deg)",
                fixed(alpha),
                fixed(alpha.to_degrees())
            )?;
            writeln!(out)?;
            writeln!(out, "{:<24} {:<6} residual", "constraint", "status")?;
            for e in report.entries() {
                writeln!(out, "{:<24} {:<6} {}", e.id.name(), status(e.satisfied), e.residual)?;
            }
            writeln!(
                out,
                "\noverall: {}",
                if report.overall_feasible() {
                    "feasible"
                } else {
                    "infeasible"
                }
            )?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["constraint", "satisfied", "residual"])?;
            for e in report.entries() {
                w.write_record([e.id.name(), &e.satisfied.to_string(), &e.residual.to_string()])?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for e in report.entries() {
                let line = serde_json::json!({
                    "constraint": e.id.name(),
                    "satisfied": e.satisfied,
                    "residual": e.residual.to_string(),
                });
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(())
}

fn cmd_sweep(cli: &Cli, param: &str, values: &str, workers: Option<usize>, out: &mut dyn Write) -> Result<i32, Exit> {
    let param: SweepParam = param.parse()?;
    let values: Vec<String> = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(String::from)
        .collect();
    if values.is_empty() {
        return Err(Exit(EXIT_INPUT, "values must be non-empty".into()));
    }
    let spec = load_spec(cli)?;
    let rows = sweep(&spec, param, &values, workers_or_default(workers)?)?;

    if cli.format == Format::Jsonl {
        for row in &rows {
            let best = row.best().map(|s| SolutionRecord::new(1, s));
            let line = serde_json::json!({
                "param": param.name(),
                "value": row.value,
                "status": sweep_status(row.outcome.as_ref().map(|s| s.is_empty())),
                "feasible_count": row.feasible_count(),
                "best": best,
                "message": row.outcome.as_ref().err().map(|e| e.to_string()),
            });
            writeln!(out, "{line}")?;
        }
        return Ok(EXIT_OK);
    }

    let mut w = csv::Writer::from_writer(&mut *out);
    w.write_record(SWEEP_CSV_HEADER)?;
    for row in &rows {
        let status = sweep_status(row.outcome.as_ref().map(|s| s.is_empty()));
        let mut record = vec![
            param.name().to_string(),
            row.value.clone(),
            status.to_string(),
            row.feasible_count().to_string(),
        ];
        match row.best() {
            Some(s) => {
                record.extend(s.design.teeth().as_array().map(|z| z.to_string()));
                record.push(fixed(s.cost));
                record.push(s.ratio.to_string());
            }
            None => record.extend(std::iter::repeat_n(String::new(), 7)),
        }
        record.push(row.outcome.as_ref().err().map(|e| e.to_string()).unwrap_or_default());
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}

fn sweep_status<E>(empty: Result<bool, E>) -> &'static str {
    match empty {
        Ok(false) => "ok",
        Ok(true) => "empty",
        Err(_) => "error",
    }
}

fn cmd_envelope(cli: &Cli, out: &mut dyn Write) -> Result<i32, Exit> {
    let actuators: Vec<ActuatorSpec> = match &cli.spec {
        Some(path) => read_actuator_file(path).map_err(|e| Exit(EXIT_INPUT, format!("{}: {e}", path.display())))?,
        None => parse_actuators(BUNDLED_ACTUATORS)?,
    };
    match cli.format {
        Format::Table => {
            writeln!(
                out,
                "{:<10} {:>8} {:>16} {:>18} {:>22}",
                "actuator", "ratio", "peak torque (Nm)", "motor speed (rad/s)", "reflected J (kg m^2)"
            )?;
            for a in &actuators {
                writeln!(
                    out,
                    "{:<10} {:>8} {:>16} {:>18} {:>22}",
                    a.name(),
                    fixed(a.gear_ratio()),
                    fixed(peak_output_torque(a)),
                    fixed(motor_side_speed(a)),
                    fixed(reflected_inertia(a))
                )?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(ENVELOPE_CSV_HEADER)?;
            for a in &actuators {
                w.write_record([
                    a.name().to_string(),
                    fixed(a.gear_ratio()),
                    fixed(peak_output_torque(a)),
                    fixed(motor_side_speed(a)),
                    fixed(reflected_inertia(a)),
                ])?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            for a in &actuators {
                let line = serde_json::json!({
                    "actuator": a.name(),
                    "gear_ratio": a.gear_ratio(),
                    "peak_output_torque_nm": peak_output_torque(a),
                    "motor_side_speed_rad_s": motor_side_speed(a),
                    "reflected_inertia_kg_m2": reflected_inertia(a),
                });
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(EXIT_OK)
}
