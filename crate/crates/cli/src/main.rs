//! `flagflow`: curvature, positivity regions and the projected Ricci flow on
//! `SU(3)/T²` from the command line.

// `!(a >= b)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod output;
mod svg;

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use flagflow::verify::{distance_to_segment, Triangle, MEDIANS};
use flagflow::{
    assemble_portrait, escape_sweep, is_member, region_report, ricci_components, scalar_curvature, verify_invariance,
    ClaimedRegion, CrossCurvatures, Direction, Family, Flow, Membership, Metric, RegionSpec, Table, Theorem,
    Tolerances,
};

use output::{csv_num, emit_json};

#[derive(Parser)]
#[command(name = "flagflow", version, about = "Curvature, positivity regions and the projected Ricci flow on SU(3)/T²")]
#[command(after_help = "Exit status: 0 on success or membership, 1 for a non-member or a runtime failure, 2 for invalid input.")]
struct Cli {
    /// Seed for every sampling step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Relative tolerance of the adaptive integrator.
    #[arg(long, global = true, env = "FLAGFLOW_RTOL", default_value_t = 1e-10)]
    rtol: f64,

    /// Distance at which a trajectory counts as having reached an equilibrium.
    #[arg(long, global = true, env = "FLAGFLOW_CAPTURE_RADIUS", default_value_t = 1e-8)]
    capture_radius: f64,

    /// Distance to the triangle's edge at which integration stops.
    #[arg(long, global = true, env = "FLAGFLOW_BOUNDARY_MARGIN", default_value_t = 1e-12)]
    boundary_margin: f64,

    /// Output format; svg is accepted by `region` and `portrait` only.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Args)]
struct Point {
    #[arg(long, allow_negative_numbers = true)]
    x: f64,
    #[arg(long, allow_negative_numbers = true)]
    y: f64,
}

#[derive(Args)]
struct SpecArgs {
    /// sec-ric or ric-scal.
    #[arg(long)]
    family: Family,
    /// Level: 1..=5 for sec-ric, 1..=6 for ric-scal.
    #[arg(long)]
    d: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Sectional table, Ricci eigenvalues and scalar curvature at a metric.
    Curvature {
        #[command(flatten)]
        point: Point,
        /// Relative spread of the Ricci eigenvalues below which the metric is flagged Einstein.
        #[arg(long, default_value_t = 1e-9)]
        einstein_tol: f64,
    },
    /// Membership in a positivity region, with the tightest failing constraint.
    Classify {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Integrate the projected flow from a point.
    Flow {
        #[command(flatten)]
        point: Point,
        /// Third weight; switches to the unnormalized flow in (x, y, z).
        #[arg(long)]
        z: Option<f64>,
        #[arg(long, default_value_t = 200.0)]
        t_max: f64,
        #[arg(long, default_value = "forward")]
        direction: Direction,
        /// Keep every n-th accepted step (the last point is always kept).
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// The ten equilibria with eigenvalues and stability class.
    Equilibria,
    /// Grid classification of a region, its boundary, and which cells the flow preserves.
    Region {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        /// Time horizon, in both directions, for the preserved check.
        #[arg(long, default_value_t = 50.0)]
        horizon: f64,
        /// Emit the boundary polylines instead of the cell grid (csv only).
        #[arg(long)]
        boundary: bool,
    },
    /// Equilibria, heteroclinic segments and trajectories from a seed grid.
    Portrait {
        /// Seeds sit at (i/k, j/k).
        #[arg(long, default_value_t = 10)]
        resolution: usize,
        #[arg(long, default_value_t = 100.0)]
        t_max: f64,
        #[arg(long, default_value_t = 5)]
        stride: usize,
        /// Overlay this region in the svg.
        #[arg(long, requires = "d")]
        family: Option<Family>,
        #[arg(long, requires = "family")]
        d: Option<u32>,
        /// Cell resolution of the overlay.
        #[arg(long, default_value_t = 48)]
        region_resolution: usize,
    },
    /// Invariance and escape checks for one level of a theorem.
    Verify {
        #[arg(long)]
        theorem: Theorem,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 50.0)]
        horizon: f64,
        #[arg(long, default_value_t = 20)]
        escape_samples: usize,
        #[arg(long, default_value_t = 200.0)]
        escape_horizon: f64,
    },
}

/// Invalid input: exits with status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn is_input_error(e: &flagflow::Error) -> bool {
    use flagflow::Error::*;
    matches!(
        e,
        OutOfDomain { .. } | NonPositiveState { .. } | Level { .. } | Triple { .. } | Resolution { .. } | NotInRegion(_) | Tolerance(_)
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(&cli, &mut out).and_then(|code| {
        out.flush()?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            let input = e.downcast_ref::<Usage>().is_some()
                || e.chain().any(|c| c.downcast_ref::<flagflow::Error>().is_some_and(is_input_error));
            ExitCode::from(if input { 2 } else { 1 })
        }
    }
}

fn format_for(cli: &Cli, default: Format, allowed: &[Format]) -> anyhow::Result<Format> {
    let f = cli.format.unwrap_or(default);
    if !allowed.contains(&f) {
        let name = f.to_possible_value().unwrap().get_name().to_string();
        return Err(usage(format!("format {name} is not available for this command")));
    }
    Ok(f)
}

fn flow(cli: &Cli) -> anyhow::Result<Flow> {
    let tol = Tolerances {
        rtol: cli.rtol,
        capture_radius: cli.capture_radius,
        boundary_margin: cli.boundary_margin,
        ..Tolerances::default()
    };
    Ok(Flow::with_tolerances(tol)?)
}

fn metric(p: &Point) -> anyhow::Result<Metric> {
    Ok(Metric::new(p.x, p.y)?)
}

fn spec_of(s: &SpecArgs) -> anyhow::Result<RegionSpec> {
    Ok(RegionSpec::new(s.family, s.d)?)
}

fn run(cli: &Cli, out: &mut impl Write) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Curvature { point, einstein_tol } => curvature(cli, out, point, *einstein_tol),
        Command::Classify { point, spec } => classify(cli, out, point, spec),
        Command::Flow { point, z, t_max, direction, stride } => trajectory(cli, out, point, *z, *t_max, *direction, *stride),
        Command::Equilibria => equilibria(cli, out),
        Command::Region { spec, resolution, horizon, boundary } => region(cli, out, spec, *resolution, *horizon, *boundary),
        Command::Portrait { resolution, t_max, stride, family, d, region_resolution } => {
            let overlay = match (family, d) {
                (Some(family), Some(d)) => Some(RegionSpec::new(*family, *d)?),
                _ => None,
            };
            portrait(cli, out, *resolution, *t_max, *stride, overlay, *region_resolution)
        }
        Command::Verify { theorem, d, samples, horizon, escape_samples, escape_horizon } => {
            verify(cli, out, *theorem, *d, *samples, *horizon, *escape_samples, *escape_horizon)
        }
    }
}

fn curvature(cli: &Cli, out: &mut impl Write, point: &Point, einstein_tol: f64) -> anyhow::Result<ExitCode> {
    let format = format_for(cli, Format::Json, &[Format::Json, Format::Csv])?;
    let m = metric(point)?;
    let table = Table::at(&m);
    let cross = CrossCurvatures::at(&m);
    let r = ricci_components(&m);
    let scal = scalar_curvature(&m);
    let einstein = r.is_einstein(einstein_tol);
    match format {
        Format::Csv => {
            writeln!(out, "i,j,k")?;
            for (i, row) in table.sectional.iter().enumerate() {
                for (j, k) in row.iter().enumerate().filter(|&(j, _)| j != i) {
                    writeln!(out, "{},{},{}", i + 1, j + 1, csv_num(*k))?;
                }
            }
        }
        _ => emit_json(
            out,
            json!({
                "metric": { "x": m.x(), "y": m.y(), "z": m.z() },
                "sectional": table.sectional,
                "cross": { "xy": cross.xy, "xz": cross.xz, "yz": cross.yz },
                "ricci": { "r_x": r.r_x, "r_y": r.r_y, "r_z": r.r_z },
                "scalar_curvature": scal,
                "einstein": einstein,
            }),
        )?,
    }
    Ok(ExitCode::SUCCESS)
}

fn classify(cli: &Cli, out: &mut impl Write, point: &Point, spec: &SpecArgs) -> anyhow::Result<ExitCode> {
    let format = format_for(cli, Format::Json, &[Format::Json, Format::Csv])?;
    let spec = spec_of(spec)?;
    let m = metric(point)?;
    let membership = is_member(&m, spec);
    let witness = match membership {
        Membership::Member => None,
        Membership::NonMember(w) => Some(w),
    };
    match format {
        Format::Csv => {
            writeln!(out, "x,y,family,d,member,block,a,b,c,value")?;
            let tail = match witness {
                Some(w) => {
                    let t = w.constraint.triple;
                    let block = w.constraint.block.map_or(String::new(), |b| b.label().to_string());
                    format!("{block},{},{},{},{}", t.a, t.b, t.c, csv_num(w.value))
                }
                None => ",,,,".to_string(),
            };
            writeln!(out, "{},{},{},{},{},{tail}", csv_num(m.x()), csv_num(m.y()), spec.family, spec.d, witness.is_none())?;
        }
        _ => {
            let witness = witness.map(|w| {
                let t = w.constraint.triple;
                json!({
                    "block": w.constraint.block.map(|b| b.label()),
                    "triple": [t.a, t.b, t.c],
                    "value": w.value,
                })
            });
            emit_json(
                out,
                json!({
                    "x": m.x(),
                    "y": m.y(),
                    "family": spec.family.to_string(),
                    "d": spec.d,
                    "member": witness.is_none(),
                    "witness": witness,
                }),
            )?;
        }
    }
    Ok(if membership.is_member() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn trajectory(
    cli: &Cli,
    out: &mut impl Write,
    point: &Point,
    z: Option<f64>,
    t_max: f64,
    direction: Direction,
    stride: usize,
) -> anyhow::Result<ExitCode> {
    let format = format_for(cli, Format::Csv, &[Format::Csv, Format::Json])?;
    if stride == 0 {
        return Err(usage("--stride must be at least 1"));
    }
    if !(t_max >= 0.0) {
        return Err(usage("--t-max must be non-negative"));
    }
    let f = flow(cli)?;
    match z {
        None => {
            let traj = f.integrate(&metric(point)?, direction, t_max, stride)?;
            match format {
                Format::Csv => {
                    writeln!(out, "t,x,y")?;
                    for s in &traj.samples {
                        writeln!(out, "{},{},{}", csv_num(s.t), csv_num(s.x), csv_num(s.y))?;
                    }
                    writeln!(out, "# termination: {}", traj.termination)?;
                }
                _ => emit_json(
                    out,
                    json!({
                        "direction": direction.to_string(),
                        "termination": traj.termination.to_string(),
                        "samples": traj.samples.iter().map(|s| [s.t, s.x, s.y]).collect::<Vec<_>>(),
                    }),
                )?,
            }
        }
        Some(z) => {
            let traj = f.integrate_full([point.x, point.y, z], direction, t_max, stride)?;
            match format {
                Format::Csv => {
                    writeln!(out, "t,x,y,z")?;
                    for s in &traj.samples {
                        writeln!(out, "{},{},{},{}", csv_num(s.t), csv_num(s.x), csv_num(s.y), csv_num(s.z))?;
                    }
                    writeln!(out, "# termination: {}", traj.termination)?;
                }
                _ => emit_json(
                    out,
                    json!({
                        "direction": direction.to_string(),
                        "termination": traj.termination.to_string(),
                        "samples": traj.samples.iter().map(|s| [s.t, s.x, s.y, s.z]).collect::<Vec<_>>(),
                    }),
                )?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn equilibria(cli: &Cli, out: &mut impl Write) -> anyhow::Result<ExitCode> {
    let format = format_for(cli, Format::Json, &[Format::Json, Format::Csv])?;
    let f = flow(cli)?;
    match format {
        Format::Csv => {
            writeln!(out, "label,x,y,lambda_1,lambda_2,class")?;
            for e in f.equilibria() {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    e.label,
                    csv_num(e.position[0]),
                    csv_num(e.position[1]),
                    csv_num(e.eigenvalues[0]),
                    csv_num(e.eigenvalues[1]),
                    e.class.name()
                )?;
            }
        }
        _ => {
            let list: Vec<Value> = f
                .equilibria()
                .iter()
                .map(|e| {
                    json!({
                        "label": e.label.to_string(),
                        "position": e.position,
                        "eigenvalues": e.eigenvalues,
                        "class": e.class.name(),
                    })
                })
                .collect();
            emit_json(out, Value::Array(list))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn region(
    cli: &Cli,
    out: &mut impl Write,
    spec: &SpecArgs,
    resolution: usize,
    horizon: f64,
    boundary: bool,
) -> anyhow::Result<ExitCode> {
    let format = format_for(cli, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let spec = spec_of(spec)?;
    if boundary && format != Format::Csv {
        return Err(usage("--boundary is only available with --format csv"));
    }
    let f = flow(cli)?;
    let rep = region_report(&f, spec, resolution, horizon)?;
    match format {
        Format::Csv if boundary => {
            writeln!(out, "curve_id,block,a,b,c,x,y")?;
            for (id, line) in rep.boundary.iter().enumerate() {
                let c = line.constraint;
                let block = c.block.map_or(String::new(), |b| b.label().to_string());
                for p in &line.points {
                    writeln!(
                        out,
                        "{id},{block},{},{},{},{},{}",
                        c.triple.a,
                        c.triple.b,
                        c.triple.c,
                        csv_num(p[0]),
                        csv_num(p[1])
                    )?;
                }
            }
        }
        Format::Csv => {
            writeln!(out, "x,y,member,preserved")?;
            for c in &rep.cells {
                writeln!(out, "{},{},{},{}", csv_num(c.x), csv_num(c.y), c.member, c.preserved)?;
            }
        }
        Format::Json => {
            let tc = Triangle::CENTRAL;
            let central = rep.cells.iter().filter(|c| tc.contains_interior([c.x, c.y])).count();
            let central_members = rep.cells.iter().filter(|c| c.member && tc.contains_interior([c.x, c.y])).count();
            emit_json(
                out,
                json!({
                    "family": spec.family.to_string(),
                    "d": spec.d,
                    "resolution": resolution,
                    "horizon": horizon,
                    "cells": rep.summary.cells,
                    "members": rep.summary.members,
                    "preserved": rep.summary.preserved,
                    "central_triangle_cells": central,
                    "central_triangle_members": central_members,
                    "boundary_polylines": rep.boundary.len(),
                }),
            )?;
        }
        Format::Svg => {
            let mut canvas = svg::Canvas::new(format!("{spec}"));
            canvas.cells(&rep.cells, resolution);
            canvas.boundaries(&rep.boundary);
            canvas.equilibria(f.equilibria());
            out.write_all(canvas.finish().as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn portrait(
    cli: &Cli,
    out: &mut impl Write,
    resolution: usize,
    t_max: f64,
    stride: usize,
    overlay: Option<RegionSpec>,
    region_resolution: usize,
) -> anyhow::Result<ExitCode> {
    let format = format_for(cli, Format::Svg, &[Format::Csv, Format::Json, Format::Svg])?;
    if resolution < 3 {
        return Err(usage("--resolution must be at least 3"));
    }
    if stride == 0 {
        return Err(usage("--stride must be at least 1"));
    }
    let f = flow(cli)?;
    let p = assemble_portrait(&f, resolution, t_max, stride)?;
    match format {
        Format::Csv => {
            writeln!(out, "trajectory,direction,termination,t,x,y")?;
            for (id, traj) in p.trajectories.iter().enumerate() {
                for s in &traj.samples {
                    writeln!(
                        out,
                        "{id},{},{},{},{},{}",
                        traj.direction,
                        traj.termination,
                        csv_num(s.t),
                        csv_num(s.x),
                        csv_num(s.y)
                    )?;
                }
            }
        }
        Format::Json => {
            let trajectories: Vec<Value> = p
                .trajectories
                .iter()
                .map(|t| {
                    json!({
                        "direction": t.direction.to_string(),
                        "termination": t.termination.to_string(),
                        "start": [t.samples[0].x, t.samples[0].y],
                        "end": [t.last().x, t.last().y],
                        "samples": t.samples.len(),
                    })
                })
                .collect();
            emit_json(
                out,
                json!({
                    "equilibria": p.equilibria.iter().map(|e| json!({
                        "label": e.label.to_string(),
                        "position": e.position,
                        "class": e.class.name(),
                    })).collect::<Vec<_>>(),
                    "segments": p.segments.iter().map(|(a, b)| format!("{a}{b}")).collect::<Vec<_>>(),
                    "trajectories": trajectories,
                }),
            )?;
        }
        Format::Svg => {
            let title = match overlay {
                Some(spec) => format!("projected Ricci flow with {spec}"),
                None => "projected Ricci flow".to_string(),
            };
            let mut canvas = svg::Canvas::new(title);
            if let Some(spec) = overlay {
                let rep = region_report(&f, spec, region_resolution, 50.0)?;
                canvas.cells(&rep.cells, region_resolution);
                canvas.boundaries(&rep.boundary);
            }
            canvas.trajectories(&p.trajectories);
            canvas.segments(&p.segments);
            canvas.equilibria(&p.equilibria);
            out.write_all(canvas.finish().as_bytes())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// Whether `p` lies in the set claimed invariant for `spec`.
fn claimed_invariant(spec: RegionSpec, p: [f64; 2]) -> bool {
    match ClaimedRegion::for_spec(spec) {
        ClaimedRegion::Medians => MEDIANS.iter().any(|&(a, b)| distance_to_segment(a, b, p) < 1e-4),
        _ => Triangle::CENTRAL.contains(p, flagflow::verify::TRIANGLE_MARGIN),
    }
}

#[allow(clippy::too_many_arguments)]
fn verify(
    cli: &Cli,
    out: &mut impl Write,
    theorem: Theorem,
    d: u32,
    samples: usize,
    horizon: f64,
    escape_samples: usize,
    escape_horizon: f64,
) -> anyhow::Result<ExitCode> {
    format_for(cli, Format::Json, &[Format::Json])?;
    let spec = RegionSpec::new(theorem.family(), d).map_err(|e| usage(format!("theorem {theorem}: {e}")))?;
    if !(horizon >= 0.0) || !(escape_horizon >= 0.0) {
        return Err(usage("horizons must be non-negative"));
    }
    let f = flow(cli)?;
    let claimed = ClaimedRegion::for_spec(spec);
    let inv = verify_invariance(&f, spec, claimed, samples, horizon, cli.seed).context("invariance check")?;

    // sec-ric d = 4 is exactly the central triangle, so nothing can escape
    let expects_escapes = !(spec.family == Family::SecRic && d == 4);
    let escape = if expects_escapes && escape_samples > 0 {
        let rep = escape_sweep(&f, spec, escape_samples, escape_horizon, cli.seed).context("escape sweep")?;
        let escapes: Vec<Value> = rep
            .escapes
            .iter()
            .map(|e| -> anyhow::Result<Value> {
                let t = e.violated.triple;
                Ok(json!({
                    "start": e.start,
                    "direction": e.direction.to_string(),
                    "t_star": e.t_star,
                    "violated": { "block": e.violated.block.map(|b| b.label()), "triple": [t.a, t.b, t.c] },
                    "value_before": e.value_before,
                    "value_after": e.value_after,
                    "neighborhood_confirmed": e.neighborhood_confirmed,
                    "reproduced": e.reproduce(&f)?,
                    "inside_claimed_invariant_set": claimed_invariant(spec, e.start),
                }))
            })
            .collect::<anyhow::Result<_>>()?;
        let unexpected = rep.non_escaping.iter().filter(|&&p| !claimed_invariant(spec, p)).count();
        Some(json!({
            "samples": rep.samples,
            "horizon": escape_horizon,
            "reproduced": rep.passes,
            "escapes": escapes,
            "non_escaping": rep.non_escaping,
            "non_escaping_outside_claimed_set": unexpected,
        }))
    } else {
        None
    };

    let failures: Vec<Value> = inv.failures.iter().map(|fl| {
        json!({
            "start": fl.start,
            "direction": fl.direction.to_string(),
            "t": fl.t,
            "point": fl.point,
            "kind": serde_json::to_value(fl.kind).unwrap_or(Value::Null),
            "confirmed": fl.confirm(),
        })
    }).collect();
    emit_json(
        out,
        json!({
            "theorem": theorem.to_string(),
            "family": spec.family.to_string(),
            "d": d,
            "seed": cli.seed,
            "invariance": {
                "claimed": serde_json::to_value(claimed)?,
                "samples": inv.samples,
                "horizon": horizon,
                "passes": inv.passes,
                "failures": failures,
            },
            "escape": escape,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}
