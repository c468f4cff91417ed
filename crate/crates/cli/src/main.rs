//! `chopstick`: solve, simulate and analyze the dual-chopstick end effector
//! from the command line.

mod commands;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "chopstick",
    version,
    about = "Kinematics, workspace, sensing and grasp tools for a dual-chopstick end effector"
)]
pub struct Cli {
    /// Mechanism configuration (TOML). Defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report domain errors as JSON on stdout instead of text on stderr.
    #[arg(long, global = true)]
    pub json_errors: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
pub enum SideArg {
    #[default]
    Left,
    Right,
}

#[derive(Args, Debug)]
pub struct Target {
    /// mm
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    /// mm
    #[arg(long, allow_negative_numbers = true)]
    pub y: f64,
    /// mm, along the platform axis from the pivot
    #[arg(long, allow_negative_numbers = true)]
    pub z: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ReportFormatArg {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Servo command for a tip position (JSON).
    Ik {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t)]
        side: SideArg,
    },
    /// Tip position for a servo command (JSON).
    Fk {
        #[arg(long, allow_negative_numbers = true)]
        pitch: f64,
        #[arg(long, allow_negative_numbers = true)]
        yaw: f64,
        #[arg(long, allow_negative_numbers = true)]
        travel: f64,
        #[arg(long, value_enum, default_value_t)]
        side: SideArg,
    },
    /// Seeded reachability samples over a box (CSV).
    Workspace {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Half width of the box in x and y, mm.
        #[arg(long, default_value_t = 40.0)]
        half_width: f64,
        /// Defaults to the lowest tip height of the travel range.
        #[arg(long, allow_negative_numbers = true)]
        z_min: Option<f64>,
        /// Defaults to `z_min` plus the travel width.
        #[arg(long, allow_negative_numbers = true)]
        z_max: Option<f64>,
        /// Sample CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write commanded/observed pairs for the reachable samples
        /// under servo slop.
        #[arg(long)]
        pairs: Option<PathBuf>,
        /// Servo slop for `--pairs`, degrees.
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
    },
    /// Convex hull of the reachable samples in a sample CSV.
    Hull {
        #[arg(long)]
        input: PathBuf,
        /// Mesh file; the mesh goes to stdout when omitted, otherwise a
        /// JSON summary does.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error statistics for a commanded/observed pose CSV.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormatArg::Text)]
        format: ReportFormatArg,
    },
    /// Simulated force/torque stream for grip cycles on one material (CSV).
    FtSim {
        /// Material name from the fixture.
        #[arg(long)]
        material: String,
        /// Material fixture CSV; the built-in set when omitted.
        #[arg(long)]
        materials: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        cycles: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Commanded tip separation per sample (`t,separation`), as
        /// consumed by `stiffness --closure`.
        #[arg(long)]
        closure_out: Option<PathBuf>,
    },
    /// Contact stiffness from a sensor stream (JSON).
    Stiffness {
        #[arg(long)]
        input: PathBuf,
        /// Commanded tip separation CSV (`t,separation`), one row per sample.
        #[arg(long)]
        closure: PathBuf,
        /// One estimate per contact event.
        #[arg(long)]
        per_event: bool,
    },
    /// Slip predictions for a food-item set over the trial trajectory.
    GraspSim {
        /// Item fixture CSV; the built-in set when omitted.
        #[arg(long)]
        items: Option<PathBuf>,
        /// Grip force per contact, N.
        #[arg(long, default_value_t = 2.0)]
        grip: f64,
        /// Linear acceleration limit, m/s².
        #[arg(long, default_value_t = 1.0)]
        accel: f64,
        #[arg(long, default_value_t = 3)]
        cycles: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Drive the simulated servo bus to a target and report where it settles.
    BusDemo {
        #[command(flatten)]
        target: Target,
        /// Servo time constant, s.
        #[arg(long, default_value_t = 0.05)]
        tau: f64,
        /// Servo deadband, degrees.
        #[arg(long, default_value_t = 0.25)]
        deadband: f64,
        /// Idle time before reading back, s.
        #[arg(long, default_value_t = 0.5)]
        settle: f64,
        /// JSON report instead of the annotated frame dump.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match commands::run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&cli, &mut out, &e);
            ExitCode::from(1)
        }
    }
}

fn report(cli: &Cli, out: &mut impl Write, e: &CliError) {
    if cli.json_errors {
        let _ = writeln!(out, "{}", serde_json::to_string(e).unwrap_or_default());
    } else {
        eprintln!("error: {e}");
    }
}
