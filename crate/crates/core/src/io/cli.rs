//! Command-line front end. Each command renders its terminal report and
//! optional CSV/JSON documents into a [`CommandOutput`]; `main` only writes
//! them out and maps errors to exit codes.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::design::{
    calibrate_loss, optimize, plausibility, required_fingertip_force, rom_check, sweep, Axis,
    CalibrationSettings, CountRange, Digit,
};
use crate::error::ModelError;
use crate::geometry::GraspScenario;
use crate::io::config::{parse_angle, Angle, RawConfig, RunConfig};
use crate::io::fixtures::{
    load_calibration, load_finger_forces, parse_calibration, parse_finger_forces,
    BUNDLED_FINGER_FORCES, BUNDLED_TRANSMISSION,
};
use crate::io::format::{aligned, key_value_table, opt_sig9, sig9, CsvTable};
use crate::io::ConfigError;
use crate::oracle::{
    solve_equilibrium, whole_chain_moment_check, LoadedChain, OracleOptions, TerminalReading,
};
use crate::statics::{fingertip_force, StaticsSolution};

#[derive(Debug, Parser)]
#[command(
    name = "finray",
    version,
    about = "Static force transmission of a cable-driven segmented finger orthosis"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

/// Overrides shared by every command; flags win over the configuration file.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// JSON configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Number of segments in the phalange chain.
    #[arg(long, global = true)]
    pub segments: Option<usize>,
    /// Segment pin-to-pin length (mm).
    #[arg(long, global = true)]
    pub length: Option<f64>,
    /// Cable passage depth below the pin line (mm).
    #[arg(long, global = true)]
    pub depth: Option<f64>,
    /// Loss coefficient c in (0, 1].
    #[arg(long, global = true)]
    pub loss: Option<f64>,
    /// Tip length beyond the distal pin (mm).
    #[arg(long, global = true)]
    pub tip_length: Option<f64>,
    /// Tip inclination, e.g. "5 deg" or "0.1 rad".
    #[arg(long, global = true, value_parser = parse_angle, allow_hyphen_values = true)]
    pub tip_inclination: Option<f64>,
    /// Object radius of curvature (mm).
    #[arg(long, global = true, conflicts_with = "flat")]
    pub radius: Option<f64>,
    /// Open hand: straight chain.
    #[arg(long, global = true)]
    pub flat: bool,
    /// Input cable tension (N).
    #[arg(long, global = true)]
    pub tension: Option<f64>,
    /// Terminal anchor offset from the last passage along the distal segment (mm).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub anchor_offset: Option<f64>,
    /// Write the CSV table here.
    #[arg(long, global = true, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Write the JSON report here.
    #[arg(long, global = true, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DigitArg {
    Finger,
    Thumb,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the statics of one design and scenario.
    Simulate {
        /// Cross-check against the per-segment equilibrium solve.
        #[arg(long)]
        verify: bool,
        /// Also report the equilibrium solve with the terminal tension along the cable.
        #[arg(long, requires = "verify")]
        along_cable: bool,
        /// Print the signed moment of each load family.
        #[arg(long)]
        signed: bool,
    },
    /// Evaluate the fingertip force on a design grid.
    Sweep(RangeArgs),
    /// Maximize the fingertip force over the continuous design axes.
    Optimize(RangeArgs),
    /// Fit the loss coefficient to tension/force data.
    Calibrate {
        /// CSV with a `T_o,P_tip` header; defaults to the bundled 2:1 data.
        #[arg(long, value_name = "FILE")]
        data: Option<PathBuf>,
        #[arg(long)]
        label: Option<String>,
        /// CSV with a `finger,P_tip` header for the plausibility check.
        #[arg(long, value_name = "FILE")]
        finger_forces: Option<PathBuf>,
    },
    /// Compare conformal joint angles with anatomical range of motion.
    RomCheck {
        #[arg(long, value_enum)]
        digit: Option<DigitArg>,
        /// Widen each flexion limit by this many standard deviations.
        #[arg(long)]
        sd_multiplier: Option<f64>,
    },
    /// Fingertip force needed to hold a mass by friction.
    RequiredForce {
        #[arg(long)]
        mass: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        sf: Option<f64>,
        #[arg(long)]
        contacts: Option<u32>,
    },
}

/// Grid axes given as `min:max:steps` (or a single value).
#[derive(Debug, Default, Clone, Args)]
pub struct RangeArgs {
    /// Segment counts `min:max`.
    #[arg(long, value_name = "MIN:MAX")]
    pub segments_range: Option<String>,
    #[arg(long, value_name = "MIN:MAX:STEPS")]
    pub length_range: Option<String>,
    #[arg(long, value_name = "MIN:MAX:STEPS")]
    pub depth_range: Option<String>,
    #[arg(long, value_name = "MIN:MAX:STEPS")]
    pub loss_range: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("model error: {0}")]
    Model(#[from] ModelError),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    /// 2 for configuration problems, 1 for model or output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) | CliError::Output(_) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandOutput {
    pub stdout: String,
    pub csv: Option<String>,
    pub json: Option<String>,
    pub csv_path: Option<PathBuf>,
    pub json_path: Option<PathBuf>,
}

impl CommandOutput {
    /// Writes the CSV/JSON documents to their configured paths.
    pub fn write_files(&self) -> Result<(), CliError> {
        for (path, body) in [(&self.csv_path, &self.csv), (&self.json_path, &self.json)] {
            if let (Some(path), Some(body)) = (path, body) {
                std::fs::write(path, body)
                    .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
            }
        }
        Ok(())
    }
}

fn parse_axis(text: &str, field: &str) -> Result<Axis, ConfigError> {
    let bad = || ConfigError::Invalid {
        field: field.to_string(),
        message: format!("expected MIN:MAX:STEPS or a single value, got {text:?}"),
    };
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [v] => Ok(Axis::point(num(v)?)),
        [a, b, n] => Ok(Axis::range(
            num(a)?,
            num(b)?,
            n.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn parse_count(text: &str) -> Result<CountRange, ConfigError> {
    let bad = || ConfigError::Invalid {
        field: "--segments-range".into(),
        message: format!("expected MIN:MAX or a single count, got {text:?}"),
    };
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    match text.split(':').collect::<Vec<_>>().as_slice() {
        [v] => Ok(CountRange::point(num(v)?)),
        [a, b] => Ok(CountRange {
            min: num(a)?,
            max: num(b)?,
        }),
        _ => Err(bad()),
    }
}

fn build_config(common: &CommonArgs, ranges: Option<&RangeArgs>) -> Result<RunConfig, ConfigError> {
    let mut raw = match &common.config {
        Some(p) => RawConfig::from_file(p)?,
        None => RawConfig::default(),
    };
    let d = &mut raw.design;
    if let Some(v) = common.segments {
        d.segments = Some(v);
    }
    if let Some(v) = common.length {
        d.length_mm = Some(v);
    }
    if let Some(v) = common.depth {
        d.depth_mm = Some(v);
    }
    if let Some(v) = common.loss {
        d.loss = Some(v);
    }
    if let Some(v) = common.tip_length {
        d.tip_length_mm = Some(v);
    }
    if let Some(v) = common.tip_inclination {
        d.tip_inclination = Some(Angle(v));
    }
    let s = &mut raw.scenario;
    if common.flat {
        s.flat = true;
    }
    if let Some(r) = common.radius {
        s.radius_mm = Some(r);
        s.flat = false;
    }
    if let Some(t) = common.tension {
        s.tension_n = Some(t);
    }
    if let Some(a) = common.anchor_offset {
        raw.anchor_offset_mm = Some(a);
    }
    if let Some(p) = &common.csv {
        raw.output.csv = Some(p.clone());
    }
    if let Some(p) = &common.json {
        raw.output.json = Some(p.clone());
    }
    if let Some(r) = ranges {
        if let Some(t) = &r.segments_range {
            raw.space.segments = Some(parse_count(t)?);
        }
        if let Some(t) = &r.length_range {
            raw.space.length_mm = Some(parse_axis(t, "--length-range")?);
        }
        if let Some(t) = &r.depth_range {
            raw.space.depth_mm = Some(parse_axis(t, "--depth-range")?);
        }
        if let Some(t) = &r.loss_range {
            raw.space.loss = Some(parse_axis(t, "--loss-range")?);
        }
    }
    RunConfig::validate(raw)
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Output(e.to_string()))
}

fn radius_cell(scenario: &GraspScenario) -> String {
    scenario.radius().map(sig9).unwrap_or_default()
}

fn scenario_line(scenario: &GraspScenario) -> String {
    match scenario.radius() {
        Some(r) => format!(
            "R = {} mm, T_o = {} N",
            sig9(r),
            sig9(scenario.input_tension())
        ),
        None => format!("flat, T_o = {} N", sig9(scenario.input_tension())),
    }
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> Result<CommandOutput, CliError> {
    let ranges = match &cli.command {
        Command::Sweep(r) | Command::Optimize(r) => Some(r),
        _ => None,
    };
    let cfg = build_config(&cli.common, ranges)?;
    let mut out = match &cli.command {
        Command::Simulate {
            verify,
            along_cable,
            signed,
        } => cmd_simulate(&cfg, *verify, *along_cable, *signed)?,
        Command::Sweep(_) => cmd_sweep(&cfg)?,
        Command::Optimize(_) => cmd_optimize(&cfg)?,
        Command::Calibrate {
            data,
            label,
            finger_forces,
        } => cmd_calibrate(
            &cfg,
            data.as_deref(),
            label.as_deref(),
            finger_forces.as_deref(),
        )?,
        Command::RomCheck {
            digit,
            sd_multiplier,
        } => cmd_rom_check(&cfg, *digit, *sd_multiplier)?,
        Command::RequiredForce {
            mass,
            mu,
            sf,
            contacts,
        } => cmd_required_force(&cfg, *mass, *mu, *sf, *contacts)?,
    };
    out.csv_path = cfg.csv.clone();
    out.json_path = cfg.json.clone();
    Ok(out)
}

/// Per-segment rows plus one summary row.
pub fn simulate_table(sol: &StaticsSolution) -> CsvTable {
    let mut t = CsvTable::new([
        "kind",
        "segment",
        "theta_rad",
        "phi_rad",
        "tension_n",
        "friction_n",
        "kink_force_n",
        "hole_x_mm",
        "hole_y_mm",
        "moment_kink_nmm",
        "moment_friction_nmm",
        "moment_tension_nmm",
        "beta_rad",
        "p_tip_n",
        "transmission",
    ]);
    let cfg = &sol.configuration;
    let n = cfg.segments();
    for i in 0..n {
        t.push(vec![
            "segment".into(),
            (i + 1).to_string(),
            sig9(cfg.theta[i]),
            sig9(cfg.phi[i]),
            sig9(sol.tensions.segment_tensions[i]),
            sig9(sol.tensions.frictions[i]),
            sig9(sol.kink_forces[i]),
            sig9(cfg.holes[i].x),
            sig9(cfg.holes[i].y),
            sig9(sol.segment_moments[i].kink),
            sig9(sol.segment_moments[i].friction),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    t.push(vec![
        "summary".into(),
        (n + 1).to_string(),
        sig9(cfg.theta[n]),
        String::new(),
        sig9(sol.tensions.terminal_tension),
        sig9(sol.tensions.frictions.iter().sum()),
        String::new(),
        sig9(cfg.tip.x),
        sig9(cfg.tip.y),
        sig9(sol.moment_kinks),
        sig9(sol.moment_friction),
        sig9(sol.moment_tension),
        sig9(sol.beta),
        sig9(sol.p_tip),
        opt_sig9(sol.transmission()),
    ]);
    t
}

fn ratio_line(sol: &StaticsSolution) -> String {
    if sol.p_tip > 0.0 {
        format!("{} : 1", sig9(sol.tensions.input_tension() / sol.p_tip))
    } else {
        "undefined (zero fingertip force)".into()
    }
}

pub fn cmd_simulate(
    cfg: &RunConfig,
    verify: bool,
    along_cable: bool,
    signed: bool,
) -> Result<CommandOutput, CliError> {
    let sol = fingertip_force(&cfg.design, &cfg.scenario, &cfg.statics)?;
    let d = &cfg.design;
    let seg = d.segment();
    let mut stdout = String::new();
    stdout += &aligned(&[
        (
            "design",
            format!(
                "n = {}, L = {} mm, H2 = {} mm, c = {}, tip = {} mm at {} rad",
                d.segments(),
                sig9(seg.length()),
                sig9(seg.passage_depth()),
                sig9(d.loss()),
                sig9(seg.tip_length()),
                sig9(seg.tip_inclination())
            ),
        ),
        ("scenario", scenario_line(&cfg.scenario)),
        ("delta", format!("{} rad", sig9(seg.delta()))),
    ]);
    stdout += "\nsegment  theta_rad  phi_rad  tension_n  friction_n  kink_force_n\n";
    let c = &sol.configuration;
    for i in 0..d.segments() {
        stdout += &format!(
            "{:>7}  {}  {}  {}  {}  {}\n",
            i + 1,
            sig9(c.theta[i]),
            sig9(c.phi[i]),
            sig9(sol.tensions.segment_tensions[i]),
            sig9(sol.tensions.frictions[i]),
            sig9(sol.kink_forces[i])
        );
    }
    stdout += "\n";
    let mut lines = vec![
        (
            "terminal tension T_n",
            format!("{} N", sig9(sol.tensions.terminal_tension)),
        ),
        ("|M_Tn|", format!("{} N*mm", sig9(sol.moment_tension))),
        ("|M_Fi|", format!("{} N*mm", sig9(sol.moment_kinks))),
        ("|M_fi|", format!("{} N*mm", sig9(sol.moment_friction))),
        ("beta", format!("{} rad", sig9(sol.beta))),
        ("lever arm", format!("{} mm", sig9(sol.lever_arm))),
        ("P_tip", format!("{} N", sig9(sol.p_tip))),
        ("T_o : P_tip", ratio_line(&sol)),
    ];
    if !signed && !sol.signed_moments.is_consistent(1e-12) {
        lines.push((
            "warning",
            "a moment family opposes flexion; rerun with --signed".into(),
        ));
    }
    if signed {
        let s = sol.signed_moments;
        lines.push(("signed M_Tn", sig9(s.tension)));
        lines.push(("signed M_Fi", sig9(s.kinks)));
        lines.push(("signed M_fi", sig9(s.friction)));
        lines.push((
            "sign convention",
            if s.is_consistent(1e-12) {
                "all families in flexion".into()
            } else {
                "VIOLATED: a family opposes flexion".into()
            },
        ));
    }

    let mut verification = serde_json::Value::Null;
    if verify {
        let chain = LoadedChain::from_model(
            d,
            &sol.configuration,
            &sol.tensions,
            &sol.kink_forces,
            cfg.statics.anchor_offset,
            TerminalReading::TipDirection,
        )?;
        let oracle = solve_equilibrium(&chain, &OracleOptions::default())?;
        let moment_residual = whole_chain_moment_check(&chain, &oracle);
        let rel = if sol.p_tip != 0.0 {
            (oracle.p_tip - sol.p_tip).abs() / sol.p_tip.abs()
        } else {
            oracle.p_tip.abs()
        };
        lines.push(("P_tip (equilibrium)", format!("{} N", sig9(oracle.p_tip))));
        lines.push(("relative difference", sig9(rel)));
        lines.push(("moment residual", format!("{} N*mm", sig9(moment_residual))));
        let mut along = serde_json::Value::Null;
        if along_cable {
            let chain_ac = LoadedChain::from_model(
                d,
                &sol.configuration,
                &sol.tensions,
                &sol.kink_forces,
                cfg.statics.anchor_offset,
                TerminalReading::AlongCable,
            )?;
            let o = solve_equilibrium(&chain_ac, &OracleOptions::default())?;
            lines.push(("P_tip (along-cable T_n)", format!("{} N", sig9(o.p_tip))));
            along = json!({ "p_tip": o.p_tip, "joint_couples": o.joint_couples });
        }
        verification = json!({
            "p_tip": oracle.p_tip,
            "relative_difference": rel,
            "moment_residual": moment_residual,
            "pin_reactions": oracle.pin_reactions,
            "joint_couples": oracle.joint_couples,
            "residual": oracle.residual,
            "along_cable": along,
        });
    }
    stdout += &aligned(&lines);

    let json = to_json(&json!({
        "design": cfg.design,
        "scenario": cfg.scenario,
        "solution": sol,
        "transmission": sol.transmission(),
        "verification": verification,
    }))?;
    Ok(CommandOutput {
        stdout,
        csv: Some(simulate_table(&sol).to_csv_string()),
        json: Some(json),
        ..Default::default()
    })
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let table = sweep(&cfg.space, &cfg.statics)?;
    let mut t = CsvTable::new([
        "index",
        "segments",
        "length_mm",
        "depth_mm",
        "loss",
        "tip_length_mm",
        "radius_mm",
        "tension_n",
        "p_tip_n",
        "transmission",
        "feasible",
        "sign_consistent",
        "error",
    ]);
    for r in &table.rows {
        let p = r.point;
        t.push(vec![
            r.index.to_string(),
            p.segments.to_string(),
            sig9(p.length),
            sig9(p.depth),
            sig9(p.loss),
            sig9(cfg.space.tip_length.unwrap_or(p.length / 2.0)),
            radius_cell(&table.scenario),
            sig9(table.scenario.input_tension()),
            opt_sig9(r.p_tip),
            opt_sig9(r.transmission),
            r.feasible().to_string(),
            r.sign_consistent.to_string(),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    let feasible = table.rows.iter().filter(|r| r.feasible()).count();
    let mut lines = vec![
        ("scenario", scenario_line(&table.scenario)),
        ("grid points", table.rows.len().to_string()),
        ("feasible", feasible.to_string()),
    ];
    if let Some(b) = table.best() {
        lines.push((
            "best",
            format!(
                "#{}: n = {}, L = {} mm, H2 = {} mm, c = {} -> P_tip = {} N",
                b.index,
                b.point.segments,
                sig9(b.point.length),
                sig9(b.point.depth),
                sig9(b.point.loss),
                opt_sig9(b.p_tip)
            ),
        ));
    }
    Ok(CommandOutput {
        stdout: aligned(&lines),
        csv: Some(t.to_csv_string()),
        json: Some(to_json(&table)?),
        ..Default::default()
    })
}

pub fn cmd_optimize(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let r = optimize(&cfg.space, &cfg.statics, &cfg.optimizer)?;
    let s = &r.settings;
    let entries = [
        ("segments", r.best.segments.to_string()),
        ("length_mm", sig9(r.best.length)),
        ("depth_mm", sig9(r.best.depth)),
        ("loss", sig9(r.best.loss)),
        ("p_tip_n", sig9(r.p_tip)),
        ("transmission", sig9(r.transmission)),
        ("seed_length_mm", sig9(r.seed.length)),
        ("seed_depth_mm", sig9(r.seed.depth)),
        ("seed_loss", sig9(r.seed.loss)),
        ("seed_transmission", sig9(r.seed_transmission)),
        ("free_parameters", r.free_parameters.join(" ")),
        ("grid_evaluations", r.grid_evaluations.to_string()),
        ("simplex_evaluations", r.simplex_evaluations.to_string()),
        ("converged", r.converged.to_string()),
        ("restarts_used", r.restarts_used.to_string()),
        ("reflection", sig9(s.reflection)),
        ("expansion", sig9(s.expansion)),
        ("contraction", sig9(s.contraction)),
        ("shrink", sig9(s.shrink)),
        ("initial_step", sig9(s.initial_step)),
        ("diameter_tol", sig9(s.diameter_tol)),
        ("max_evaluations", s.max_evaluations.to_string()),
    ];
    let mut stdout = format!("scenario  {}\n", scenario_line(&cfg.space.scenario));
    stdout += &aligned(&entries);
    Ok(CommandOutput {
        stdout,
        csv: Some(key_value_table(&entries).to_csv_string()),
        json: Some(to_json(&r)?),
        ..Default::default()
    })
}

pub fn cmd_calibrate(
    cfg: &RunConfig,
    data: Option<&Path>,
    label: Option<&str>,
    finger_forces: Option<&Path>,
) -> Result<CommandOutput, CliError> {
    let label = label.unwrap_or(&cfg.calibration_label);
    let dataset = match data.or(cfg.calibration_file.as_deref()) {
        Some(p) => load_calibration(p, label)?,
        None => parse_calibration(BUNDLED_TRANSMISSION, label, "bundled transmission data")?,
    };
    let targets = match finger_forces.or(cfg.finger_forces_file.as_deref()) {
        Some(p) => load_finger_forces(p)?,
        None => parse_finger_forces(BUNDLED_FINGER_FORCES, "bundled finger forces")?,
    };
    let settings = CalibrationSettings::default();
    let report = calibrate_loss(
        &cfg.design,
        &cfg.scenario,
        &dataset,
        &cfg.statics,
        &settings,
    )?;
    let rows = plausibility(
        &cfg.design,
        &cfg.scenario,
        report.loss,
        &targets,
        &cfg.statics,
    )?;

    let mut t = CsvTable::new(["T_o", "P_measured", "P_model", "residual"]);
    for p in &dataset.points {
        let model = p.tension * report.transmission;
        t.push(vec![
            sig9(p.tension),
            sig9(p.force),
            sig9(model),
            sig9(model - p.force),
        ]);
    }

    let mut lines = vec![
        (
            "data",
            format!("{} ({} points)", report.label, report.points),
        ),
        ("scenario", scenario_line(&cfg.scenario)),
        ("fitted loss c", sig9(report.loss)),
        ("transmission P_tip/T_o", sig9(report.transmission)),
        ("rms residual", format!("{} N", sig9(report.rms_residual))),
        ("evaluations", report.evaluations.to_string()),
        ("method", report.method.to_string()),
    ];
    if report.at_upper_bound {
        lines.push((
            "warning",
            "best fit at c = 1; geometry cannot reach the measured ratio".into(),
        ));
    }
    if report.single_point {
        lines.push((
            "note",
            "single informative point; fit interpolates it".into(),
        ));
    }
    for r in &rows {
        lines.push((
            "plausibility",
            format!(
                "{}: {} N needs T_o = {} N ({})",
                r.label,
                sig9(r.force),
                sig9(r.required_tension),
                if r.plausible {
                    "plausible"
                } else {
                    "not reproducible"
                }
            ),
        ));
    }
    Ok(CommandOutput {
        stdout: aligned(&lines),
        csv: Some(t.to_csv_string()),
        json: Some(to_json(&json!({ "report": report, "plausibility": rows }))?),
        ..Default::default()
    })
}

pub fn cmd_rom_check(
    cfg: &RunConfig,
    digit: Option<DigitArg>,
    sd_multiplier: Option<f64>,
) -> Result<CommandOutput, CliError> {
    let digit = match digit {
        Some(DigitArg::Finger) => Digit::Finger,
        Some(DigitArg::Thumb) => Digit::Thumb,
        None => cfg.rom.digit,
    };
    let k = sd_multiplier.unwrap_or(cfg.rom.sd_multiplier);
    if !(k.is_finite() && k >= 0.0) {
        return Err(ConfigError::Invalid {
            field: "--sd-multiplier".into(),
            message: format!("must be >= 0, got {k}"),
        }
        .into());
    }
    let report = rom_check(
        &cfg.design,
        &cfg.scenario,
        &cfg.rom.limits,
        digit,
        k,
        &cfg.statics.tolerances,
    )?;
    let mut t = CsvTable::new(["joint", "angle_deg", "limit_deg", "margin_deg", "pass"]);
    let mut stdout = format!(
        "scenario  {}\nmapping   {:?}\n",
        scenario_line(&cfg.scenario),
        report.mapping
    );
    for j in &report.joints {
        t.push(vec![
            j.name.clone(),
            sig9(j.angle_deg),
            sig9(j.limit_deg),
            sig9(j.margin_deg),
            j.pass.to_string(),
        ]);
        stdout += &format!(
            "{:<4} {} deg of {} deg  margin {}  {}\n",
            j.name,
            sig9(j.angle_deg),
            sig9(j.limit_deg),
            sig9(j.margin_deg),
            if j.pass { "pass" } else { "FAIL" }
        );
    }
    if let Some(r) = &report.reason {
        stdout += &format!("infeasible conformation: {r}\n");
    }
    stdout += if report.pass {
        "admissible\n"
    } else {
        "NOT admissible\n"
    };
    Ok(CommandOutput {
        stdout,
        csv: Some(t.to_csv_string()),
        json: Some(to_json(&report)?),
        ..Default::default()
    })
}

pub fn cmd_required_force(
    cfg: &RunConfig,
    mass: Option<f64>,
    mu: Option<f64>,
    sf: Option<f64>,
    contacts: Option<u32>,
) -> Result<CommandOutput, CliError> {
    let mut req = cfg.requirement;
    if let Some(v) = mass {
        req.mass_kg = v;
    }
    if let Some(v) = mu {
        req.mu = v;
    }
    if let Some(v) = sf {
        req.safety_factor = v;
    }
    if let Some(v) = contacts {
        req.contacts = v;
    }
    let force = required_fingertip_force(req.mass_kg, req.mu, req.safety_factor, req.contacts)
        .map_err(|e| match e {
            ModelError::Domain { field, message } => CliError::Config(ConfigError::Invalid {
                field: format!("--{}", field.replace('_', "-")),
                message,
            }),
            other => other.into(),
        })?;
    let entries = [
        ("mass_kg", sig9(req.mass_kg)),
        ("mu", sig9(req.mu)),
        ("safety_factor", sig9(req.safety_factor)),
        ("contacts", req.contacts.to_string()),
        ("gravity_m_s2", sig9(crate::design::GRAVITY)),
        ("force_n", sig9(force)),
    ];
    Ok(CommandOutput {
        stdout: format!("required fingertip force {} N\n", sig9(force)),
        csv: Some(key_value_table(&entries).to_csv_string()),
        json: Some(to_json(&json!({ "requirement": req, "force_n": force }))?),
        ..Default::default()
    })
}
