//! `rgwb`: derive RG flows, evaluate geometric curvature, and run the
//! loop-phase experiments from the command line.
//!
//! Exit codes: 0 success, 1 a check failed (golden diff, validation,
//! failed sweep entries), 2 usage or input error.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rgwb_core::derivation::derive;
use rgwb_core::geometry::{Geometry, Mode, DEFAULT_H};
use rgwb_core::golden;
use rgwb_core::manifest::{Command, ExperimentManifest, OrientationChoice};
use rgwb_core::model::{ModelError, ModelSpec};
use rgwb_core::polar::polar_form;
use rgwb_core::printer::render_series;
use rgwb_core::protocol::{CycleProtocol, Orientation};
use rgwb_core::schedule::Schedule;
use rgwb_core::simulator::{csv_row, Experiment, PhaseMeasurement, CSV_HEADER, DEFAULT_AGREEMENT};

#[derive(Parser)]
#[command(name = "rgwb", version, about = "RG flows and geometric phases of weakly nonlinear oscillators")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the amplitude flow and its polar form.
    Derive(DeriveArgs),
    /// Connection and curvature at a parameter point, as JSON.
    Curvature(CurvatureArgs),
    /// Run the two-orientation loop protocol; CSV out.
    Simulate(SimulateArgs),
    /// Compare simulated, flow and predicted phases.
    Validate(ValidateArgs),
    /// Execute a TOML experiment manifest.
    Run { manifest: PathBuf },
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long)]
    model: PathBuf,
    /// Diff against the built-in VdP/VdPD tables.
    #[arg(long)]
    golden: bool,
    #[arg(long)]
    json: bool,
    /// Also print the perturbative solution.
    #[arg(long)]
    solution: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[arg(long)]
    model: PathBuf,
    /// `name=value` pairs; the first two name the plane.
    #[arg(long, value_delimiter = ',', value_parser = parse_assignment, required = true)]
    at: Vec<(String, f64)>,
    #[arg(long, default_value_t = DEFAULT_H)]
    h: f64,
    #[arg(long)]
    singular_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    protocol: PathBuf,
    /// Overrides the protocol tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Which run is labelled plus; `both` emits a row for each labelling.
    #[arg(long, value_enum)]
    orientation: Option<OrientationArg>,
    #[arg(long)]
    singular_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Two-column `T theta` data for plotting.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    protocol: PathBuf,
    #[arg(long)]
    tol: Option<f64>,
    /// Largest accepted relative disagreement between any two phases.
    #[arg(long, default_value_t = DEFAULT_AGREEMENT)]
    agreement: f64,
    #[arg(long)]
    singular_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Ccw,
    Cw,
    Both,
}

impl From<OrientationChoice> for OrientationArg {
    fn from(o: OrientationChoice) -> Self {
        match o {
            OrientationChoice::Ccw => OrientationArg::Ccw,
            OrientationChoice::Cw => OrientationArg::Cw,
            OrientationChoice::Both => OrientationArg::Both,
        }
    }
}

fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("`{v}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok((k.trim().to_string(), v))
}

/// Command result: text to emit and whether its checks passed.
struct Outcome {
    text: String,
    pass: bool,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_model(path: &Path) -> Result<ModelSpec> {
    ModelSpec::parse(&read(path)?).map_err(|e| match e {
        ModelError::Parse(p) => anyhow!("{}:{p}", path.display()),
        other => anyhow!("{}: {other}", path.display()),
    })
}

fn load_protocol(path: &Path, tol: Option<f64>) -> Result<CycleProtocol> {
    let mut p = CycleProtocol::parse(&read(path)?).map_err(|e| anyhow!("{}:{e}", path.display()))?;
    if let Some(t) = tol {
        p.tol = t;
        p.check().map_err(|e| anyhow!("{e}"))?;
    }
    Ok(p)
}

fn mode(singular_only: bool) -> Mode {
    if singular_only {
        Mode::SingularOnly
    } else {
        Mode::Full
    }
}

fn cmd_derive(model: &Path, golden_diff: bool, json: bool, solution: bool) -> Result<Outcome> {
    let spec = load_model(model)?;
    let d = derive(&spec)?;
    let polar = polar_form(&d.flow)?;
    let mut pass = true;
    let mut diffs = Vec::new();
    let mut golden_name = None;
    if golden_diff {
        let case = golden::lookup(&spec).ok_or_else(|| anyhow!("no built-in table matches this model"))?;
        diffs = golden::diff(&case, &d);
        pass = diffs.is_empty();
        golden_name = Some(case.name);
    }
    let text = if json {
        let mut v = serde_json::json!({
            "flow": d.flow.render(),
            "polar": polar.render(),
            "solution": render_series(&d.solution),
        });
        if let Some(name) = golden_name {
            v["golden"] = serde_json::json!({ "table": name, "match": pass, "diff": diffs });
        }
        serde_json::to_string_pretty(&v)? + "\n"
    } else {
        let mut s = format!("{}\n{}\n", d.flow.render(), polar.render());
        if solution {
            s += &format!("y = {}\n", render_series(&d.solution));
        }
        if let Some(name) = golden_name {
            if pass {
                let _ = writeln!(s, "golden: matches the {name} table");
            } else {
                let _ = writeln!(s, "golden: differs from the {name} table");
                for line in &diffs {
                    let _ = writeln!(s, "  {line}");
                }
            }
        }
        s
    };
    Ok(Outcome { text, pass })
}

fn cmd_curvature(model: &Path, at: &[(String, f64)], h: f64, singular_only: bool) -> Result<Outcome> {
    if at.len() < 2 {
        bail!("--at needs at least two name=value pairs");
    }
    let spec = load_model(model)?;
    let sys = polar_form(&derive(&spec)?.flow)?;
    let lookup: std::collections::BTreeMap<_, _> = at.iter().cloned().collect();
    let base = Schedule::constant_with(&spec, |n| lookup.get(n).copied())?.values_at(0.0);
    let names = [at[0].0.clone(), at[1].0.clone()];
    for n in &names {
        if !base.contains_key(n) {
            bail!("`{n}` is not a parameter of the model");
        }
    }
    let geo = Geometry::new(&sys, names, base).with_mode(mode(singular_only));
    let sample = geo.curvature([at[0].1, at[1].1], h)?;
    Ok(Outcome { text: serde_json::to_string(&sample)? + "\n", pass: true })
}

fn negated(m: &PhaseMeasurement) -> PhaseMeasurement {
    PhaseMeasurement { t_plus: m.t_minus, t_minus: m.t_plus, theta: -m.theta, ..m.clone() }
}

struct SimOutput {
    csv: String,
    plot: String,
    pass: bool,
}

fn simulate(
    model: &Path,
    protocol: &Path,
    tol: Option<f64>,
    orientation: Option<OrientationArg>,
    singular_only: bool,
) -> Result<SimOutput> {
    let spec = load_model(model)?;
    let mut proto = load_protocol(protocol, tol)?;
    let both = matches!(orientation, Some(OrientationArg::Both));
    match orientation {
        Some(OrientationArg::Ccw) | Some(OrientationArg::Both) => proto.orientation = Orientation::Ccw,
        Some(OrientationArg::Cw) => proto.orientation = Orientation::Cw,
        None => {}
    }
    let exp = Experiment::new(&spec, &proto)?.with_mode(mode(singular_only));
    let pred = exp.predicted_phase()?;
    let mut durations = vec![proto.duration];
    durations.extend(proto.sweep.iter().copied());
    let mut seen = BTreeSet::new();
    durations.retain(|d| seen.insert(exp.period(*d).to_bits()));
    let mut csv = format!("{CSV_HEADER}\n");
    let mut plot = String::new();
    let mut pass = true;
    for (period, result) in exp.sweep(&durations) {
        match result {
            Ok(m) => {
                let _ = writeln!(csv, "{}", csv_row(&m, pred));
                let _ = writeln!(plot, "{:.16e} {:.16e}", m.period, m.theta);
                if both {
                    let _ = writeln!(csv, "{}", csv_row(&negated(&m), -pred));
                }
            }
            Err(e) => {
                eprintln!("error: T = {period:e}: {e}");
                pass = false;
            }
        }
    }
    Ok(SimOutput { csv, plot, pass })
}

fn cmd_validate(
    model: &Path,
    protocol: &Path,
    tol: Option<f64>,
    agreement: f64,
    singular_only: bool,
) -> Result<Outcome> {
    if !(agreement.is_finite() && agreement > 0.0) {
        bail!("--agreement must be positive");
    }
    let spec = load_model(model)?;
    let proto = load_protocol(protocol, tol)?;
    let exp = Experiment::new(&spec, &proto)?.with_mode(mode(singular_only));
    let report = exp.validate(agreement)?;
    Ok(Outcome { text: report.render(), pass: report.pass() })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_outcome(out: Option<&Path>, o: Outcome) -> Result<bool> {
    emit(out, &o.text)?;
    Ok(o.pass)
}

fn run_simulate(a: &SimulateArgs) -> Result<bool> {
    let s = simulate(&a.model, &a.protocol, a.tol, a.orientation, a.singular_only)?;
    emit(a.out.as_deref(), &s.csv)?;
    if let Some(p) = &a.plot {
        emit(Some(p), &s.plot)?;
    }
    Ok(s.pass)
}

/// Paths in a manifest are relative to the manifest's directory.
fn run_manifest(path: &Path) -> Result<bool> {
    let m = ExperimentManifest::parse(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let resolve = |p: &str| dir.join(p);
    let model = resolve(&m.model);
    let out = m.out.as_deref().map(resolve);
    let protocol = m.protocol.as_deref().map(resolve);
    let o = &m.options;
    match m.command {
        Command::Derive => emit_outcome(out.as_deref(), cmd_derive(&model, o.golden, false, false)?),
        Command::Curvature => {
            emit_outcome(out.as_deref(), cmd_curvature(&model, &o.at, o.h.unwrap_or(DEFAULT_H), o.singular_only)?)
        }
        Command::Simulate => {
            let protocol = protocol.expect("checked by the manifest parser");
            let args = SimulateArgs {
                model,
                protocol,
                tol: o.tol,
                orientation: o.orientation.map(Into::into),
                singular_only: o.singular_only,
                out,
                plot: None,
            };
            run_simulate(&args)
        }
        Command::Validate => {
            let protocol = protocol.expect("checked by the manifest parser");
            let agreement = o.agreement.unwrap_or(DEFAULT_AGREEMENT);
            emit_outcome(out.as_deref(), cmd_validate(&model, &protocol, o.tol, agreement, o.singular_only)?)
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Derive(a) => emit_outcome(a.out.as_deref(), cmd_derive(&a.model, a.golden, a.json, a.solution)?),
        Cmd::Curvature(a) => emit_outcome(a.out.as_deref(), cmd_curvature(&a.model, &a.at, a.h, a.singular_only)?),
        Cmd::Simulate(a) => run_simulate(&a),
        Cmd::Validate(a) => {
            emit_outcome(a.out.as_deref(), cmd_validate(&a.model, &a.protocol, a.tol, a.agreement, a.singular_only)?)
        }
        Cmd::Run { manifest } => run_manifest(&manifest),
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("RGWB_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("RGWB_THREADS=`{v}` is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|_| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
