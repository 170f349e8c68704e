//! Command-line front end.
//!
//! [`dispatch`] parses arguments, runs one subcommand and returns the process
//! exit code: 0 on success, 1 on usage errors, 2 when a solver fails.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::elliptic::Elliptic;
use crate::error::{Error, Result};
use crate::exact_states::{self, ExactState, Family};
use crate::grid_oracle::{self, GridConfig, Seed};
use crate::io::{self, Cell, RunRecord, Table};
use crate::linear_modes::{self, Parity};
use crate::stability::{self, BdgOptions, StabilityPoint};
use crate::two_mode::{self, TwoModeModel};

#[derive(Debug, Parser)]
#[command(name = "boxdelta", version, about = "Stationary states of the GPE in a box with a delta barrier")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Write the result here instead of standard output; a run record is
    /// written next to it as `<out>.run.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format [default: json for single states, csv for sweeps].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweeps [default: all cores].
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Jacobi elliptic functions.
    #[command(subcommand)]
    Elliptic(EllipticCommand),
    /// Linear modes of the box with a delta barrier.
    Modes {
        #[arg(long, default_value_t = 10.0)]
        gamma: f64,
        #[arg(long, default_value_t = 8)]
        count: usize,
    },
    /// One exact stationary state.
    Solve {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 10.0)]
        gamma: f64,
        #[arg(long = "etaN", allow_negative_numbers = true)]
        eta_n: f64,
        #[arg(long, default_value_t = 1)]
        branch: usize,
    },
    /// Continuation along etaN.
    Sweep {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 10.0)]
        gamma: f64,
        #[arg(long = "etaN-range", num_args = 2, value_names = ["FROM", "TO"], allow_negative_numbers = true)]
        eta_range: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 1)]
        branch: usize,
    },
    /// Two-mode model at one etaN.
    Twomode {
        #[arg(long, default_value_t = 10.0)]
        gamma: f64,
        #[arg(long = "etaN", allow_negative_numbers = true)]
        eta_n: f64,
    },
    /// Exact and approximate symmetry-breaking thresholds versus gamma.
    Critical {
        #[arg(long = "gamma-range", num_args = 2, value_names = ["FROM", "TO"])]
        gamma_range: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
    },
    /// Bogoliubov spectrum along a branch.
    Stability {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 10.0)]
        gamma: f64,
        #[arg(long = "etaN-range", num_args = 2, value_names = ["FROM", "TO"], allow_negative_numbers = true)]
        eta_range: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = stability::DEFAULT_BASIS)]
        basis: usize,
        #[arg(long, default_value_t = 1)]
        branch: usize,
    },
    /// Imaginary-time ground states with a Gaussian barrier.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Regenerate the data behind one figure.
    Reproduce {
        #[arg(value_enum)]
        target: Target,
        /// Barrier strength for single-gamma targets.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = stability::DEFAULT_BASIS)]
        basis: usize,
        /// Noise seed for the imaginary-time target.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EllipticCommand {
    /// sn, cn, dn, K, E and the epsilon function at (u, m).
    Eval {
        #[arg(allow_negative_numbers = true)]
        u: f64,
        #[arg(allow_negative_numbers = true)]
        m: f64,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleCommand {
    /// Relax one ground state from a noisy symmetric seed.
    Ground {
        #[arg(long, default_value_t = 10.0)]
        gamma: f64,
        #[arg(long = "etaN", allow_negative_numbers = true)]
        eta_n: f64,
        /// Long-format (t, x, density) CSV of the relaxation.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        /// Steps between trajectory frames.
        #[arg(long, default_value_t = 64)]
        record_every: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 256)]
        points: usize,
    },
    /// Scan E/N over etaN and locate its kink.
    Kink {
        #[arg(long, default_value_t = 10.0)]
        gamma: f64,
        #[arg(long, num_args = 2, value_names = ["FROM", "TO"], allow_negative_numbers = true)]
        range: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// E/N of every exact branch over etaN in [-6, 10].
    FigAllEnergy,
    /// Attractive thresholds versus gamma: exact, variational, strong- and weak-barrier estimates.
    FigCritAttractive,
    /// Repulsive thresholds versus gamma: exact, variational, semiclassical.
    FigCritRepulsive,
    /// Exact versus semiclassical imbalance along the repulsive asymmetric branch.
    FigZ,
    /// Two-mode variational energies on the attractive side.
    FigVariational,
    /// Bogoliubov frequencies along the symmetric attractive branch.
    FigRag1,
    /// Bogoliubov frequencies along the antisymmetric repulsive branch.
    FigRag2,
    /// Bogoliubov frequencies along the antisymmetric branch at gamma = 1.
    FigRag3,
    /// Density during imaginary-time relaxation at gamma = 10, etaN = -5.
    FigEvol,
}

impl Target {
    fn describe(self) -> &'static str {
        match self {
            Target::FigAllEnergy => "energy per particle of all exact branches",
            Target::FigCritAttractive => "attractive critical etaN versus gamma",
            Target::FigCritRepulsive => "repulsive critical etaN versus gamma",
            Target::FigZ => "asymmetry of the repulsive asymmetric branch",
            Target::FigVariational => "variational two-mode energies",
            Target::FigRag1 => "stability of the symmetric attractive branch",
            Target::FigRag2 => "stability of the antisymmetric repulsive branch",
            Target::FigRag3 => "stability of the antisymmetric branch at gamma = 1",
            Target::FigEvol => "imaginary-time density evolution",
        }
    }
}

enum Data {
    Table(Table),
    Json(Value),
}

struct Outcome {
    data: Data,
    summary: Vec<(String, String)>,
    /// Additional files requested by the command itself.
    extra: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn new(data: Data) -> Self {
        Outcome {
            data,
            summary: Vec::new(),
            extra: Vec::new(),
        }
    }

    fn note(mut self, key: &str, value: impl ToString) -> Self {
        self.summary.push((key.to_owned(), value.to_string()));
        self
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(Error::InvalidArgument(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Runs a parsed command, honouring `--threads`.
pub fn run(cli: &Cli) -> Result<()> {
    match cli.global.threads {
        Some(0) => Err(Error::InvalidArgument("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(|| execute(cli)),
        None => execute(cli),
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let outcome = match &cli.command {
        Command::Elliptic(EllipticCommand::Eval { u, m }) => elliptic_eval(*u, *m)?,
        Command::Modes { gamma, count } => modes(*gamma, *count)?,
        Command::Solve {
            family,
            gamma,
            eta_n,
            branch,
        } => solve(*family, *gamma, *eta_n, *branch)?,
        Command::Sweep {
            family,
            gamma,
            eta_range,
            step,
            branch,
        } => sweep(*family, *gamma, eta_range[0], eta_range[1], *step, *branch)?,
        Command::Twomode { gamma, eta_n } => twomode(*gamma, *eta_n)?,
        Command::Critical { gamma_range, step } => {
            Outcome::new(Data::Table(critical_table(gamma_range[0], gamma_range[1], *step, &ALL_CRITICAL)?))
        }
        Command::Stability {
            family,
            gamma,
            eta_range,
            step,
            basis,
            branch,
        } => {
            let opts = bdg_options(*basis)?;
            let points = stability::stability_sweep(*family, *gamma, eta_range[0], eta_range[1], *step, *branch, &opts)?;
            let mut table = stability_table(false);
            push_stability_rows(&mut table, *family, &points);
            let thresholds = stability::instability_thresholds(
                *family,
                *gamma,
                eta_range[0],
                eta_range[1],
                *step,
                *branch,
                &opts,
                1e-3,
            )?;
            thresholds.iter().fold(Outcome::new(Data::Table(table)), |o, t| {
                o.note(
                    "threshold",
                    format!("{} ({} -> {})", io::format_number(t.eta_n), t.before.name(), t.after.name()),
                )
            })
        }
        Command::Oracle(OracleCommand::Ground {
            gamma,
            eta_n,
            trajectory,
            record_every,
            seed,
            points,
        }) => {
            let config = GridConfig {
                n_points: *points,
                seed: seed.unwrap_or(GridConfig::new(*gamma, *eta_n).seed),
                ..GridConfig::new(*gamma, *eta_n)
            };
            oracle_ground(&config, trajectory.as_deref(), *record_every)?
        }
        Command::Oracle(OracleCommand::Kink { gamma, range, step, seed }) => {
            let mut base = GridConfig::new(*gamma, range[0]);
            if let Some(s) = seed {
                base.seed = *s;
            }
            let scan = grid_oracle::kink_scan(&base, range[0], range[1], *step)?;
            let mut table = Table::new(["eta_n", "energy_per_particle"]);
            for (eta, e) in scan.eta_n.iter().zip(&scan.energy_per_particle) {
                table.push(vec![Cell::from(*eta), Cell::from(*e)]);
            }
            let kink = scan.kink.map(io::format_number).unwrap_or_else(|| "none".into());
            Outcome::new(Data::Table(table)).note("kink", kink).note("seed", base.seed)
        }
        Command::Reproduce {
            target,
            gamma,
            basis,
            seed,
        } => reproduce(*target, *gamma, *basis, *seed)?,
    };
    emit(cli, outcome)
}

fn emit(cli: &Cli, outcome: Outcome) -> Result<()> {
    let format = cli.global.format.unwrap_or(match outcome.data {
        Data::Table(_) => Format::Csv,
        Data::Json(_) => Format::Json,
    });
    let text = match (&outcome.data, format) {
        (Data::Table(t), Format::Csv) => t.to_csv(),
        (Data::Table(t), Format::Json) => io::json_text(&t.to_json()),
        (Data::Json(v), Format::Json) => io::json_text(v),
        (Data::Json(v), Format::Csv) => io::object_to_table(v).to_csv(),
    };
    for (path, contents) in &outcome.extra {
        io::write_file(path, contents)?;
    }
    let Some(out) = &cli.global.out else {
        print!("{text}");
        for (k, v) in &outcome.summary {
            eprintln!("{k}: {v}");
        }
        return Ok(());
    };
    io::write_file(out, &text)?;
    let mut record = RunRecord::new(command_name(&cli.command), parameters(&cli.command)?);
    record.outputs.push(out.clone());
    record.outputs.extend(outcome.extra.iter().map(|(p, _)| p.clone()));
    record.summary = outcome.summary.iter().cloned().collect();
    let sidecar = RunRecord::sidecar(out);
    io::write_file(&sidecar, &io::json_text(&io::to_json_value(&record)?))?;
    for (k, v) in &outcome.summary {
        println!("{k}: {v}");
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn command_name(command: &Command) -> String {
    match command {
        Command::Elliptic(_) => "elliptic eval".into(),
        Command::Modes { .. } => "modes".into(),
        Command::Solve { .. } => "solve".into(),
        Command::Sweep { .. } => "sweep".into(),
        Command::Twomode { .. } => "twomode".into(),
        Command::Critical { .. } => "critical".into(),
        Command::Stability { .. } => "stability".into(),
        Command::Oracle(OracleCommand::Ground { .. }) => "oracle ground".into(),
        Command::Oracle(OracleCommand::Kink { .. }) => "oracle kink".into(),
        Command::Reproduce { target, .. } => format!("reproduce {}", target.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default()),
    }
}

/// Flattened `key -> value` view of the parsed arguments.
fn parameters(command: &Command) -> Result<BTreeMap<String, String>> {
    fn flatten(prefix: &str, v: &Value, out: &mut BTreeMap<String, String>) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    flatten(&key, v, out);
                }
            }
            Value::Array(items) => {
                let parts: Vec<String> = items.iter().map(scalar_text).collect();
                out.insert(prefix.to_owned(), parts.join(" "));
            }
            other => {
                out.insert(prefix.to_owned(), scalar_text(other));
            }
        }
    }
    fn scalar_text(v: &Value) -> String {
        match v {
            Value::Number(n) if n.is_f64() => io::format_number(n.as_f64().unwrap_or(f64::NAN)),
            Value::String(s) => s.clone(),
            Value::Null => "none".into(),
            other => other.to_string(),
        }
    }
    let value = serde_json::to_value(command).map_err(|e| Error::Io(e.to_string()))?;
    let mut out = BTreeMap::new();
    flatten("", &value, &mut out);
    Ok(out)
}

fn elliptic_eval(u: f64, m: f64) -> Result<Outcome> {
    let table = Elliptic::new(m)?;
    let v = table.eval(u);
    let mut t = Table::new(["name", "value"]);
    for (name, x) in [
        ("sn", v.sn),
        ("cn", v.cn),
        ("dn", v.dn),
        ("K", table.k()),
        ("E", table.e()),
        ("epsilon", v.epsilon),
    ] {
        t.push(vec![Cell::from(name), Cell::from(x)]);
    }
    Ok(Outcome::new(Data::Table(t)))
}

fn modes(gamma: f64, count: usize) -> Result<Outcome> {
    let basis = linear_modes::basis(gamma, count)?;
    let mut t = Table::new(["index", "parity", "k", "energy"]);
    for mode in &basis {
        let parity = match mode.parity {
            Parity::Symmetric => "symmetric",
            Parity::Antisymmetric => "antisymmetric",
        };
        t.push(vec![Cell::from(mode.index), Cell::from(parity), Cell::from(mode.k), Cell::from(mode.energy)]);
    }
    Ok(Outcome::new(Data::Table(t)))
}

fn solve(family: Family, gamma: f64, eta_n: f64, branch: usize) -> Result<Outcome> {
    let state = exact_states::solve(family, gamma, eta_n, branch)?;
    let mut value = io::to_json_value(&state)?;
    value["max_residual"] = io::to_json_value(&state.max_residual())?;
    Ok(Outcome::new(Data::Json(value))
        .note("mu", io::format_number(state.mu))
        .note("energy_per_particle", io::format_number(state.energy_per_particle)))
}

fn sweep(family: Family, gamma: f64, from: f64, to: f64, step: f64, branch: usize) -> Result<Outcome> {
    let model = TwoModeModel::new(gamma)?;
    let points = exact_states::continuation_sweep(family, gamma, from, to, step, branch)?;
    let mut t = Table::new(["eta_n", "mu", "energy_per_particle", "z_exact", "node_count", "converged"]);
    let mut failures = 0;
    for p in &points {
        match &p.state {
            Ok(s) => {
                let z = two_mode::z_exact(s, &model)?.z.abs();
                t.push(vec![
                    Cell::from(p.eta_n),
                    Cell::from(s.mu),
                    Cell::from(s.energy_per_particle),
                    Cell::from(z),
                    Cell::from(s.node_count),
                    Cell::from(true),
                ]);
            }
            Err(_) => {
                failures += 1;
                let nan = Cell::from(f64::NAN);
                t.push(vec![Cell::from(p.eta_n), nan.clone(), nan.clone(), nan, Cell::from(0usize), Cell::from(false)]);
            }
        }
    }
    Ok(Outcome::new(Data::Table(t)).note("points", points.len()).note("not converged", failures))
}

fn twomode(gamma: f64, eta_n: f64) -> Result<Outcome> {
    let model = TwoModeModel::new(gamma)?;
    let asym = model.asymmetric_state(eta_n);
    let zeta = model.zeta(eta_n);
    let value = json!({
        "model": io::to_json_value(&model)?,
        "eta_n": eta_n,
        "u2": model.variational_u2(eta_n),
        "asymmetric": io::to_json_value(&asym)?,
        "symmetric": io::to_json_value(&model.pure_state(true, eta_n))?,
        "antisymmetric": io::to_json_value(&model.pure_state(false, eta_n))?,
        "zeta": zeta,
        "sacchetti_z": two_mode::sacchetti_z(zeta),
        "critical": {
            "attractive_variational": model.critical_attractive_variational(),
            "repulsive_variational": model.critical_repulsive_variational(),
            "sacchetti": model.sacchetti_critical(),
            "malomed_large": two_mode::malomed_large(gamma),
            "malomed_small": two_mode::malomed_small(gamma),
        },
    });
    Ok(Outcome::new(Data::Json(io::to_json_value(&value)?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CriticalColumn {
    ExactAttractive,
    ExactRepulsive,
    VariationalAttractive,
    VariationalRepulsive,
    Sacchetti,
    MalomedLarge,
    MalomedSmall,
}

const ALL_CRITICAL: [CriticalColumn; 7] = [
    CriticalColumn::ExactAttractive,
    CriticalColumn::ExactRepulsive,
    CriticalColumn::VariationalAttractive,
    CriticalColumn::VariationalRepulsive,
    CriticalColumn::Sacchetti,
    CriticalColumn::MalomedLarge,
    CriticalColumn::MalomedSmall,
];

impl CriticalColumn {
    fn name(self) -> &'static str {
        match self {
            CriticalColumn::ExactAttractive => "exact_attractive",
            CriticalColumn::ExactRepulsive => "exact_repulsive",
            CriticalColumn::VariationalAttractive => "variational_attractive",
            CriticalColumn::VariationalRepulsive => "variational_repulsive",
            CriticalColumn::Sacchetti => "sacchetti",
            CriticalColumn::MalomedLarge => "malomed_large",
            CriticalColumn::MalomedSmall => "malomed_small",
        }
    }

    fn value(self, gamma: f64, model: &TwoModeModel<f64>) -> f64 {
        // A missing bifurcation is written as nan so the table stays rectangular.
        let exact = |parent| exact_states::bifurcation(parent, gamma, 1).map(|b| b.eta_n).unwrap_or(f64::NAN);
        match self {
            CriticalColumn::ExactAttractive => exact(Family::SymAtt),
            CriticalColumn::ExactRepulsive => exact(Family::AntisymRep),
            CriticalColumn::VariationalAttractive => model.critical_attractive_variational(),
            CriticalColumn::VariationalRepulsive => model.critical_repulsive_variational(),
            CriticalColumn::Sacchetti => model.sacchetti_critical(),
            CriticalColumn::MalomedLarge => -two_mode::malomed_large(gamma),
            CriticalColumn::MalomedSmall => -two_mode::malomed_small(gamma),
        }
    }
}

fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidArgument("range needs finite ends and a positive step".into()));
    }
    let count = ((to - from).abs() / step + 1e-9).floor() as usize + 1;
    let dir = if to >= from { 1.0 } else { -1.0 };
    Ok((0..count).map(|i| from + dir * step * i as f64).collect())
}

fn critical_table(from: f64, to: f64, step: f64, columns: &[CriticalColumn]) -> Result<Table> {
    let gammas = grid(from, to, step)?;
    if gammas.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::InvalidArgument("gamma must be positive".into()));
    }
    let rows = gammas
        .par_iter()
        .map(|&g| {
            let model = TwoModeModel::new(g)?;
            let mut row = vec![Cell::from(g)];
            row.extend(columns.iter().map(|c| Cell::from(c.value(g, &model))));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(std::iter::once("gamma").chain(columns.iter().map(|c| c.name())));
    for row in rows {
        t.push(row);
    }
    Ok(t)
}

fn bdg_options(basis: usize) -> Result<BdgOptions> {
    if basis < 2 {
        return Err(Error::InvalidArgument("--basis must be at least 2".into()));
    }
    Ok(BdgOptions {
        basis_size: basis,
        ..BdgOptions::default()
    })
}

fn stability_table(with_family: bool) -> Table {
    let mut header = Vec::new();
    if with_family {
        header.push("family");
    }
    header.extend(["eta_n", "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2", "classification"]);
    Table::new(header)
}

fn push_stability_rows(table: &mut Table, family: Family, points: &[StabilityPoint]) {
    let with_family = table.header.first().map(String::as_str) == Some("family");
    for p in points {
        let mut row = Vec::new();
        if with_family {
            row.push(Cell::from(family.name()));
        }
        row.push(Cell::from(p.eta_n));
        match &p.spectrum {
            Ok(s) => {
                let f = s.frequencies();
                for i in 0..2 {
                    let l = f.get(i).copied().unwrap_or(num_complex::Complex::new(f64::NAN, f64::NAN));
                    row.push(Cell::from(l.re));
                    row.push(Cell::from(l.im));
                }
                row.push(Cell::from(s.classification.name()));
            }
            Err(_) => {
                row.extend(std::iter::repeat_n(Cell::from(f64::NAN), 4));
                row.push(Cell::from("failed"));
            }
        }
        table.push(row);
    }
}

fn oracle_ground(config: &GridConfig, trajectory: Option<&Path>, record_every: usize) -> Result<Outcome> {
    let record = trajectory.map(|_| record_every.max(1));
    let run = grid_oracle::imaginary_time_ground(config, Seed::Noisy, record)?;
    let profile = run.state.box_profile();
    let value = json!({
        "config": io::to_json_value(config)?,
        "mu": run.state.mu,
        "energy_per_particle": run.state.energy_per_particle,
        "z_asym": run.state.z_asym,
        "dominant_side": run.state.dominant_side,
        "steps": run.steps,
        "converged": run.converged,
        "x": profile.iter().map(|p| p.0).collect::<Vec<_>>(),
        "psi": profile.iter().map(|p| p.1).collect::<Vec<_>>(),
    });
    let mut outcome = Outcome::new(Data::Json(io::to_json_value(&value)?))
        .note("energy_per_particle", io::format_number(run.state.energy_per_particle))
        .note("z_asym", io::format_number(run.state.z_asym))
        .note("converged", run.converged)
        .note("seed", config.seed);
    if let Some(path) = trajectory {
        outcome.extra.push((path.to_owned(), trajectory_table(&run).to_csv()));
    }
    Ok(outcome)
}

/// Long-format `(t, x, density)` in box units.
fn trajectory_table(run: &grid_oracle::GroundRun) -> Table {
    let mut t = Table::new(["t", "x", "density"]);
    for frame in &run.trajectory {
        for (y, d) in run.state.y.iter().zip(&frame.density) {
            t.push(vec![Cell::from(2.0 * frame.t), Cell::from(2.0 * y), Cell::from(0.5 * d)]);
        }
    }
    t
}

const ENERGY_STEP: f64 = 0.05;

fn reproduce(target: Target, gamma: Option<f64>, basis: usize, seed: Option<u64>) -> Result<Outcome> {
    let opts = bdg_options(basis)?;
    let outcome = match target {
        Target::FigAllEnergy => {
            let gamma = gamma.unwrap_or(10.0);
            let plan = [
                (Family::SymAtt, -ENERGY_STEP, -6.0),
                (Family::AntisymAtt, -ENERGY_STEP, -6.0),
                (Family::AsymAtt, -ENERGY_STEP, -6.0),
                (Family::SymRep, ENERGY_STEP, 10.0),
                (Family::AntisymRep, ENERGY_STEP, 10.0),
                (Family::AsymRep, ENERGY_STEP, 10.0),
            ];
            let sweeps = plan
                .par_iter()
                .map(|&(f, from, to)| exact_states::continuation_sweep(f, gamma, from, to, ENERGY_STEP, 1).map(|s| (f, s)))
                .collect::<Result<Vec<_>>>()?;
            let mut t = Table::new(["family", "eta_n", "energy_per_particle", "mu"]);
            for (family, points) in sweeps {
                let mut solved: Vec<&ExactState> = points.iter().filter_map(|p| p.state.as_ref().ok()).collect();
                solved.sort_by(|a, b| a.eta_n.total_cmp(&b.eta_n));
                for s in solved {
                    t.push(vec![Cell::from(family.name()), Cell::from(s.eta_n), Cell::from(s.energy_per_particle), Cell::from(s.mu)]);
                }
            }
            Outcome::new(Data::Table(t))
        }
        Target::FigCritAttractive => Outcome::new(Data::Table(critical_table(
            1.0,
            30.0,
            1.0,
            &[
                CriticalColumn::ExactAttractive,
                CriticalColumn::VariationalAttractive,
                CriticalColumn::MalomedLarge,
                CriticalColumn::MalomedSmall,
            ],
        )?)),
        Target::FigCritRepulsive => Outcome::new(Data::Table(critical_table(
            1.0,
            30.0,
            1.0,
            &[CriticalColumn::ExactRepulsive, CriticalColumn::VariationalRepulsive, CriticalColumn::Sacchetti],
        )?)),
        Target::FigZ => {
            let gamma = gamma.unwrap_or(10.0);
            let model = TwoModeModel::new(gamma)?;
            let points = exact_states::continuation_sweep(Family::AsymRep, gamma, ENERGY_STEP, 10.0, ENERGY_STEP, 1)?;
            let mut t = Table::new(["eta_n", "z_exact", "captured", "zeta", "z_sacchetti"]);
            let mut least_captured = f64::INFINITY;
            for p in &points {
                let zeta = model.zeta(p.eta_n);
                let z_s = two_mode::sacchetti_z(zeta).unwrap_or(f64::NAN);
                let (z, captured) = match &p.state {
                    Ok(s) => {
                        let proj = two_mode::z_exact(s, &model)?;
                        least_captured = least_captured.min(proj.captured);
                        (proj.z.abs(), proj.captured)
                    }
                    Err(_) => (f64::NAN, f64::NAN),
                };
                t.push(vec![Cell::from(p.eta_n), Cell::from(z), Cell::from(captured), Cell::from(zeta), Cell::from(z_s)]);
            }
            Outcome::new(Data::Table(t)).note("least captured weight", io::format_number(least_captured))
        }
        Target::FigVariational => {
            let model = TwoModeModel::new(gamma.unwrap_or(10.0))?;
            let mut t = Table::new(["eta_n", "energy_symmetric", "energy_antisymmetric", "energy_asymmetric", "u2"]);
            for eta in grid(-6.0, 0.0, ENERGY_STEP)? {
                let asym = model.asymmetric_state(eta);
                t.push(vec![
                    Cell::from(eta),
                    Cell::from(model.pure_state(true, eta).energy),
                    Cell::from(model.pure_state(false, eta).energy),
                    Cell::from(asym.map_or(f64::NAN, |s| s.energy)),
                    Cell::from(model.variational_u2(eta).unwrap_or(f64::NAN)),
                ]);
            }
            Outcome::new(Data::Table(t))
        }
        Target::FigRag1 | Target::FigRag2 | Target::FigRag3 => {
            let plan: &[(Family, f64, f64)] = match target {
                Target::FigRag1 => &[(Family::SymAtt, -ENERGY_STEP, -6.0)],
                Target::FigRag2 => &[(Family::AntisymRep, ENERGY_STEP, 10.0)],
                _ => &[(Family::AntisymAtt, -ENERGY_STEP, -12.0), (Family::AntisymRep, ENERGY_STEP, 16.0)],
            };
            let gamma = gamma.unwrap_or(if target == Target::FigRag3 { 1.0 } else { 10.0 });
            let mut t = stability_table(true);
            let mut outcome_notes = Vec::new();
            for &(family, from, to) in plan {
                let points = stability::stability_sweep(family, gamma, from, to, ENERGY_STEP, 1, &opts)?;
                push_stability_rows(&mut t, family, &points);
                let thresholds = stability::instability_thresholds(family, gamma, from, to, ENERGY_STEP, 1, &opts, 1e-3)?;
                for th in thresholds {
                    outcome_notes.push((
                        format!("{} threshold", family.name()),
                        format!("{} ({} -> {})", io::format_number(th.eta_n), th.before.name(), th.after.name()),
                    ));
                }
            }
            let mut o = Outcome::new(Data::Table(t));
            o.summary = outcome_notes;
            o
        }
        Target::FigEvol => {
            let gamma = gamma.unwrap_or(10.0);
            let mut config = GridConfig::new(gamma, -5.0);
            if let Some(s) = seed {
                config.seed = s;
            }
            let run = grid_oracle::imaginary_time_ground(&config, Seed::Noisy, Some(64))?;
            Outcome::new(Data::Table(trajectory_table(&run)))
                .note("energy_per_particle", io::format_number(run.state.energy_per_particle))
                .note("z_asym", io::format_number(run.state.z_asym))
                .note("seed", config.seed)
        }
    };
    Ok(outcome.note("figure", target.describe()))
}
