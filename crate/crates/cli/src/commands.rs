use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use chopstick_core::bus::{run_bus_demo, BusDemoOptions, HexDump};
use chopstick_core::grasp::{
    build_trial_trajectory, read_items_csv, reference_items, render_trial_csv, run_trial_suite,
    GripParams, TrialProtocol,
};
use chopstick_core::sensing::{
    estimate_stiffness, estimate_stiffness_per_event, read_materials_csv, reference_materials,
    simulate_grip_cycle, SensorModel, StiffnessOptions,
};
use chopstick_core::validation::{
    error_report, ingest_csv, render_report, write_pairs_csv, PosePairRecord, ReportFormat,
};
use chopstick_core::workspace::{
    convex_hull, count_reachable, read_samples_csv, sample_workspace, simulate_observed,
    write_samples_csv, BacklashModel, BoxRegion,
};
use chopstick_core::{
    forward_kinematics, inverse_kinematics, load_config_file, DualConfig, MechanismParams,
    PlatformCommand, TipPose, Vec3,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Context};
use crate::{Cli, Command, ReportFormatArg, SideArg, TableFormat, Target};

pub fn run(cli: &Cli, out: &mut impl Write) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(p) => load_config_file(p).kind("config")?,
        None => DualConfig::default(),
    };
    let side = |s: SideArg| match s {
        SideArg::Left => &config.left,
        SideArg::Right => &config.right,
    };
    match &cli.command {
        Command::Ik { target, side: s } => ik(side(*s), target, out),
        Command::Fk {
            pitch,
            yaw,
            travel,
            side: s,
        } => fk(side(*s), PlatformCommand::new(*pitch, *yaw, *travel), out),
        Command::Workspace {
            n,
            half_width,
            z_min,
            z_max,
            out: path,
            pairs,
            epsilon,
        } => {
            let p = &config.left;
            let base = BoxRegion::default_for(p);
            let lo = z_min.unwrap_or(base.min.z);
            let hi = z_max.unwrap_or(lo + p.travel.width());
            let region = BoxRegion::new(
                Vec3::new(-half_width, -half_width, lo),
                Vec3::new(*half_width, *half_width, hi),
            );
            workspace(
                p,
                *n,
                &region,
                cli.seed,
                path.as_deref(),
                pairs.as_deref(),
                *epsilon,
                out,
            )
        }
        Command::Hull { input, out: path } => hull(input, path.as_deref(), out),
        Command::Validate { input, format } => validate(input, *format, out),
        Command::FtSim {
            material,
            materials,
            cycles,
            out: path,
            closure_out,
        } => ft_sim(
            material,
            materials.as_deref(),
            *cycles,
            cli.seed,
            path.as_deref(),
            closure_out.as_deref(),
            out,
        ),
        Command::Stiffness {
            input,
            closure,
            per_event,
        } => stiffness(input, closure, *per_event, out),
        Command::GraspSim {
            items,
            grip,
            accel,
            cycles,
            format,
        } => grasp_sim(
            &config,
            items.as_deref(),
            *grip,
            *accel,
            *cycles,
            *format,
            out,
        ),
        Command::BusDemo {
            target,
            tau,
            deadband,
            settle,
            json,
        } => {
            let opts = BusDemoOptions {
                tau: *tau,
                deadband_deg: *deadband,
                settle_time: *settle,
            };
            bus_demo(&config.left, target, &opts, *json, out)
        }
    }
}

fn json_line(out: &mut impl Write, v: &impl Serialize) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).kind("serialize")?;
    writeln!(out, "{s}")?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct IkOut {
    pitch_deg: f64,
    yaw_deg: f64,
    travel_mm: f64,
    phi_deg: f64,
    psi_deg: f64,
    z_calc: f64,
}

fn ik(p: &MechanismParams, t: &Target, out: &mut impl Write) -> Result<(), CliError> {
    let s = inverse_kinematics(p, TipPose::new(t.x, t.y, t.z))?;
    json_line(
        out,
        &IkOut {
            pitch_deg: s.command.pitch_deg,
            yaw_deg: s.command.yaw_deg,
            travel_mm: s.command.travel_mm,
            phi_deg: s.dir.phi.to_degrees(),
            psi_deg: s.dir.psi.to_degrees(),
            z_calc: s.z_calc,
        },
    )
}

fn fk(p: &MechanismParams, c: PlatformCommand, out: &mut impl Write) -> Result<(), CliError> {
    if !c.within(p) {
        return Err(CliError::new(
            "command_out_of_range",
            "command outside servo range or travel",
        ));
    }
    let pose = forward_kinematics(p, c).kind("fk_failed")?;
    json_line(out, &pose)
}

#[allow(clippy::too_many_arguments)]
fn workspace(
    p: &MechanismParams,
    n: usize,
    region: &BoxRegion,
    seed: u64,
    path: Option<&Path>,
    pairs: Option<&Path>,
    epsilon: f64,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let samples = sample_workspace(p, n, region, seed).kind("invalid_request")?;
    match path {
        Some(path) => {
            let mut w = create(path)?;
            write_samples_csv(&samples, &mut w).kind("io")?;
            w.flush()?;
        }
        None => write_samples_csv(&samples, &mut *out).kind("io")?,
    }
    let (ok, bad) = count_reachable(&samples);
    eprintln!("{n} samples: {ok} reachable, {bad} unreachable");
    if let Some(pairs) = pairs {
        let targets: Vec<TipPose> = samples
            .iter()
            .filter(|s| s.reachable)
            .map(|s| s.target)
            .collect();
        let model = BacklashModel {
            epsilon_servo: epsilon,
            seed,
            ..BacklashModel::default()
        };
        let records: Vec<PosePairRecord> = simulate_observed(p, &targets, &model)
            .kind("simulation")?
            .into_iter()
            .map(PosePairRecord::from)
            .collect();
        let mut w = create(pairs)?;
        write_pairs_csv(&records, &mut w).kind("io")?;
        w.flush()?;
    }
    Ok(())
}

#[derive(Serialize)]
struct HullOut {
    points: usize,
    vertices: usize,
    faces: usize,
    volume_mm3: f64,
}

fn hull(input: &Path, path: Option<&Path>, out: &mut impl Write) -> Result<(), CliError> {
    let samples = read_samples_csv(open(input)?).kind("bad_input")?;
    let points: Vec<Vec3<f64>> = samples
        .iter()
        .filter(|s| s.reachable)
        .map(|s| Vec3::new(s.target.x, s.target.y, s.target.z))
        .collect();
    let h = convex_hull(&points).kind("degenerate_hull")?;
    match path {
        Some(path) => {
            let mut w = create(path)?;
            h.write_mesh(&mut w)?;
            w.flush()?;
            json_line(
                out,
                &HullOut {
                    points: points.len(),
                    vertices: h.vertices.len(),
                    faces: h.faces.len(),
                    volume_mm3: h.volume,
                },
            )
        }
        None => Ok(h.write_mesh(out)?),
    }
}

fn validate(input: &Path, format: ReportFormatArg, out: &mut impl Write) -> Result<(), CliError> {
    let records = ingest_csv(input).kind("bad_input")?;
    let report = error_report(&records).kind("insufficient_data")?;
    let format = match format {
        ReportFormatArg::Text => ReportFormat::Text,
        ReportFormatArg::Json => ReportFormat::Json,
        ReportFormatArg::Csv => ReportFormat::Csv,
    };
    let text = render_report(&report, format);
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct ClosureRow {
    t: f64,
    separation: f64,
}

fn ft_sim(
    name: &str,
    fixture: Option<&Path>,
    cycles: usize,
    seed: u64,
    path: Option<&Path>,
    closure_out: Option<&Path>,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let materials = match fixture {
        Some(p) => read_materials_csv(open(p)?).kind("bad_input")?,
        None => reference_materials(),
    };
    let m = materials
        .iter()
        .find(|m| m.name == name)
        .ok_or_else(|| CliError::new("unknown_material", format!("no material named {name:?}")))?;
    let model = SensorModel::default();
    let cycle = m.cycle(model.rate, cycles);
    let stream = simulate_grip_cycle(&model, &cycle, seed).kind("simulation")?;
    match path {
        Some(path) => {
            let mut w = create(path)?;
            chopstick_core::sensing::write_samples_csv(&stream, &mut w).kind("io")?;
            w.flush()?;
        }
        None => chopstick_core::sensing::write_samples_csv(&stream, &mut *out).kind("io")?,
    }
    if let Some(path) = closure_out {
        let mut w = csv::Writer::from_writer(create(path)?);
        for (s, sep) in stream.iter().zip(&cycle.separation) {
            w.serialize(ClosureRow {
                t: s.t,
                separation: *sep,
            })
            .kind("io")?;
        }
        w.flush()?;
    }
    Ok(())
}

fn stiffness(
    input: &Path,
    closure: &Path,
    per_event: bool,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let stream = chopstick_core::sensing::read_samples_csv(open(input)?).kind("bad_input")?;
    let closure: Vec<f64> = csv::Reader::from_reader(open(closure)?)
        .deserialize::<ClosureRow>()
        .map(|r| r.map(|r| r.separation))
        .collect::<Result<_, _>>()
        .kind("bad_input")?;
    if per_event {
        let est = estimate_stiffness_per_event(&stream, &closure, &StiffnessOptions::default())
            .kind("sensing")?;
        json_line(out, &est)
    } else {
        let est = estimate_stiffness(&stream, &closure).kind("sensing")?;
        json_line(out, &est)
    }
}

fn grasp_sim(
    config: &DualConfig,
    fixture: Option<&Path>,
    grip: f64,
    accel: f64,
    cycles: usize,
    format: TableFormat,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let items = match fixture {
        Some(p) => read_items_csv(open(p)?).kind("bad_input")?,
        None => reference_items(),
    };
    let protocol = TrialProtocol {
        cycles,
        ..TrialProtocol::default()
    };
    let traj = build_trial_trajectory(&protocol, accel).kind("infeasible_profile")?;
    let grips = vec![
        GripParams {
            grip_force: grip,
            center: None,
        };
        items.len()
    ];
    let rows = run_trial_suite(config, &items, &grips, &traj);
    match format {
        TableFormat::Csv => Ok(out.write_all(render_trial_csv(&rows).as_bytes())?),
        TableFormat::Json => json_line(out, &rows),
    }
}

fn bus_demo(
    p: &MechanismParams,
    t: &Target,
    opts: &BusDemoOptions,
    json: bool,
    out: &mut impl Write,
) -> Result<(), CliError> {
    let report = run_bus_demo(p, TipPose::new(t.x, t.y, t.z), opts).map_err(|e| match e {
        chopstick_core::bus::BusDemoError::Ik(e) => CliError::from(e),
        e => CliError::new("bus", e),
    })?;
    if json {
        return json_line(out, &report);
    }
    writeln!(out, "# requests")?;
    write!(out, "{}", HexDump(&report.requests))?;
    writeln!(out, "# replies")?;
    write!(out, "{}", HexDump(&report.replies))?;
    let c = report.command;
    writeln!(
        out,
        "# target {} {} {}",
        report.target.x, report.target.y, report.target.z
    )?;
    writeln!(
        out,
        "# command pitch {} yaw {} travel {}",
        c.pitch_deg, c.yaw_deg, c.travel_mm
    )?;
    for (label, s, pose, err) in [
        (
            "left",
            report.settled_left,
            report.pose_left,
            report.error_left,
        ),
        (
            "right",
            report.settled_right,
            report.pose_right,
            report.error_right,
        ),
    ] {
        writeln!(
            out,
            "# {label} settled pitch {} yaw {} travel {} -> tip {} {} {} error_mm {}",
            s.pitch_deg, s.yaw_deg, s.travel_mm, pose.x, pose.y, pose.z, err
        )?;
    }
    writeln!(
        out,
        "# bound_mm {} within_bound {}",
        report.bound,
        report.within_bound()
    )?;
    Ok(())
}
