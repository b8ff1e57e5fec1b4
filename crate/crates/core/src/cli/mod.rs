//! The `gup-dosc` command line: configuration layering, dispatch and report
//! emission.

mod format;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

pub use format::{fmt_g, fmt_opt, table, to_json};

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::model::{landau_level, spinor_level, Branch, ModelParams};
use crate::perturbation::{
    field_scan_with_window, interior_spectrum, landau_cluster, replicate_paper, ClusterState,
    OracleSlopes, PTReport, Perturbation, ReplicationReport, ScanResult, DEFAULT_ALPHA_STEPS,
    DEFAULT_ENERGY_WINDOW,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Correct,
    Degenerate,
    Scan,
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum BranchSel {
    #[serde(rename = "+")]
    #[value(name = "+", alias = "plus")]
    Plus,
    #[serde(rename = "-")]
    #[value(name = "-", alias = "minus")]
    Minus,
    #[serde(rename = "both")]
    #[value(name = "both")]
    Both,
}

impl BranchSel {
    fn branches(self) -> Vec<Branch> {
        match self {
            BranchSel::Plus => vec![Branch::Plus],
            BranchSel::Minus => vec![Branch::Minus],
            BranchSel::Both => vec![Branch::Plus, Branch::Minus],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Fully resolved run configuration; also the flat config-file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub omega: f64,
    #[serde(rename = "B")]
    pub field: f64,
    pub gup_a: f64,
    pub m: f64,
    pub c: f64,
    pub hbar: f64,
    pub charge: f64,
    pub cutoff: usize,
    pub levels: usize,
    pub branch: BranchSel,
    #[serde(rename = "B_min")]
    pub field_min: f64,
    #[serde(rename = "B_max")]
    pub field_max: f64,
    pub steps: usize,
    pub level: usize,
    pub cluster_size: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// Clustering window for the scan's degeneracy counts, × mc².
    pub energy_window: f64,
    /// Relative tolerance of the spectrum comparison.
    pub spectrum_rel_tol: f64,
}

/// Same keys as [`RunConfig`], all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    omega: Option<f64>,
    #[serde(rename = "B")]
    field: Option<f64>,
    gup_a: Option<f64>,
    m: Option<f64>,
    c: Option<f64>,
    hbar: Option<f64>,
    charge: Option<f64>,
    cutoff: Option<usize>,
    levels: Option<usize>,
    branch: Option<BranchSel>,
    #[serde(rename = "B_min")]
    field_min: Option<f64>,
    #[serde(rename = "B_max")]
    field_max: Option<f64>,
    steps: Option<usize>,
    level: Option<usize>,
    cluster_size: Option<usize>,
    format: Option<Format>,
    output: Option<PathBuf>,
    energy_window: Option<f64>,
    spectrum_rel_tol: Option<f64>,
}

#[derive(Debug, Parser)]
#[command(
    name = "gup-dosc",
    version,
    about = "Dirac oscillator in a magnetic field with first-order GUP corrections"
)]
struct Args {
    /// spectrum | correct | degenerate | scan | validate
    #[arg(value_enum)]
    command: Option<Command>,
    #[arg(long)]
    omega: Option<f64>,
    /// Magnetic field.
    #[arg(long = "B", allow_negative_numbers = true)]
    field: Option<f64>,
    #[arg(long = "gup-a")]
    gup_a: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    hbar: Option<f64>,
    /// |e|.
    #[arg(long)]
    charge: Option<f64>,
    /// Fock cutoff per mode.
    #[arg(long)]
    cutoff: Option<usize>,
    /// Highest level reported by `spectrum`.
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long, value_enum)]
    branch: Option<BranchSel>,
    #[arg(long = "B-min", allow_negative_numbers = true)]
    field_min: Option<f64>,
    #[arg(long = "B-max", allow_negative_numbers = true)]
    field_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// Level for `correct` and `degenerate`.
    #[arg(long)]
    level: Option<usize>,
    /// Number of spectator states in the `degenerate` cluster.
    #[arg(long = "cluster-size")]
    cluster_size: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Flat JSON file with any of the keys above.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Tolerance override, `energy_window=1e-9` or `spectrum_rel_tol=1e-8`.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tol: Vec<String>,
}

const DEFAULT_CUTOFF: usize = 40;
const DEFAULT_LEVELS: usize = 8;

/// Resolves flags over config file over defaults and checks constraints.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv)
        .map_err(|e| Error::Usage(e.to_string().trim_end().to_string()))?;
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str::<ConfigFile>(&text)
                .map_err(|e| Error::Usage(format!("config {}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let command = args.command.or(file.command).ok_or_else(|| {
        Error::Usage("missing command (spectrum, correct, degenerate, scan, validate)".into())
    })?;
    let default_level = if command == Command::Degenerate { 2 } else { 0 };
    let mut cfg = RunConfig {
        command,
        omega: args.omega.or(file.omega).unwrap_or(1.0),
        field: args.field.or(file.field).unwrap_or(0.0),
        gup_a: args.gup_a.or(file.gup_a).unwrap_or(1e-4),
        m: args.m.or(file.m).unwrap_or(1.0),
        c: args.c.or(file.c).unwrap_or(1.0),
        hbar: args.hbar.or(file.hbar).unwrap_or(1.0),
        charge: args.charge.or(file.charge).unwrap_or(1.0),
        cutoff: args.cutoff.or(file.cutoff).unwrap_or(DEFAULT_CUTOFF),
        levels: args.levels.or(file.levels).unwrap_or(DEFAULT_LEVELS),
        branch: args.branch.or(file.branch).unwrap_or(BranchSel::Plus),
        field_min: args.field_min.or(file.field_min).unwrap_or(0.0),
        field_max: args.field_max.or(file.field_max).unwrap_or(3.0),
        steps: args.steps.or(file.steps).unwrap_or(4),
        level: args.level.or(file.level).unwrap_or(default_level),
        cluster_size: args.cluster_size.or(file.cluster_size).unwrap_or(4),
        format: args.format.or(file.format).unwrap_or(Format::Text),
        output: args.output.or(file.output),
        energy_window: file.energy_window.unwrap_or(DEFAULT_ENERGY_WINDOW),
        spectrum_rel_tol: file.spectrum_rel_tol.unwrap_or(1e-8),
    };
    for item in &args.tol {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("--tol expects KEY=VALUE, got {item:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("--tol {key}: malformed number {value:?}")))?;
        match key.trim() {
            "energy_window" => cfg.energy_window = value,
            "spectrum_rel_tol" => cfg.spectrum_rel_tol = value,
            other => {
                return Err(Error::Usage(format!(
                    "unknown tolerance {other:?} (known: energy_window, spectrum_rel_tol)"
                )))
            }
        }
    }
    cfg.check()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            mass: self.m,
            light_speed: self.c,
            hbar: self.hbar,
            omega: self.omega,
            field: self.field,
            charge: self.charge,
            gup_a: self.gup_a,
        }
    }

    fn check(&self) -> Result<()> {
        self.params().validate()?;
        if self.cutoff == 0 {
            return Err(Error::Usage("cutoff must be positive".into()));
        }
        if self.cutoff < self.levels + 4 {
            return Err(Error::Usage(format!(
                "cutoff {} leaves no interior headroom for {} levels: need cutoff >= levels + 4, use --cutoff {} or lower --levels",
                self.cutoff,
                self.levels,
                self.levels + 4
            )));
        }
        if self.command == Command::Scan {
            if self.steps < 2 {
                return Err(Error::Usage(format!(
                    "scan needs --steps >= 2, got {}",
                    self.steps
                )));
            }
            if !(self.field_min.is_finite()
                && self.field_max.is_finite()
                && self.field_min <= self.field_max)
            {
                return Err(Error::Usage("scan needs finite B_min <= B_max".into()));
            }
        }
        if self.command == Command::Degenerate && self.cluster_size == 0 {
            return Err(Error::Usage("cluster size must be positive".into()));
        }
        if !(self.energy_window > 0.0 && self.spectrum_rel_tol > 0.0) {
            return Err(Error::Usage("tolerances must be positive".into()));
        }
        Ok(())
    }

    fn space(&self) -> Result<FockSpace> {
        FockSpace::new(self.cutoff, true)
    }

    /// Evenly spaced scan fields, endpoints exact.
    pub fn scan_fields(&self) -> Vec<f64> {
        let n = self.steps;
        let span = self.field_max - self.field_min;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.field_max
                } else {
                    self.field_min + span * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub branch: Branch,
    /// Closed-form level, natural units.
    pub energy: Option<f64>,
    /// Same, in units of mc².
    pub energy_mc2: Option<f64>,
    /// Nearest eigenvalue of the interior-projected H₀.
    pub exact: Option<f64>,
    pub rel_error: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub omega_tilde: f64,
    pub lambda: f64,
    pub rows: Vec<SpectrumRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Spectrum(SpectrumReport),
    Corrections(Vec<PTReport>),
    Scan(ScanResult),
    Validate(ReplicationReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub result: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ErrorReport {
    config: Option<RunConfig>,
    error: ErrorBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ErrorBody {
    kind: String,
    message: String,
}

fn spectrum(cfg: &RunConfig) -> Result<SpectrumReport> {
    let params = cfg.params();
    let exact = interior_spectrum(&cfg.space()?, &params.with_gup_a(0.0))?;
    let mut rows = Vec::new();
    for n in 0..=cfg.levels {
        for &branch in &cfg.branch.branches() {
            let mut row = SpectrumRow {
                n,
                branch,
                energy: None,
                energy_mc2: None,
                exact: None,
                rel_error: None,
                status: String::new(),
            };
            match landau_level(&params, n, branch) {
                Ok(e) => {
                    let nearest = exact
                        .iter()
                        .cloned()
                        .min_by(|x, y| (x - e).abs().total_cmp(&(y - e).abs()));
                    let rel = nearest.map(|x| (x - e).abs() / e.abs());
                    row.energy = Some(e);
                    row.energy_mc2 = Some(e / params.rest_energy());
                    row.exact = nearest;
                    row.rel_error = rel;
                    row.status = match rel {
                        Some(r) if r <= cfg.spectrum_rel_tol => "MATCH".into(),
                        Some(r) => format!("DISCREPANCY(relative error {r:.3e})"),
                        None => "DISCREPANCY(empty interior spectrum)".into(),
                    };
                }
                Err(e) => row.status = format!("ERROR({e})"),
            }
            rows.push(row);
        }
    }
    Ok(SpectrumReport {
        omega_tilde: params.omega_tilde(),
        lambda: params.lambda(),
        rows,
    })
}

fn corrections(cfg: &RunConfig) -> Result<Vec<PTReport>> {
    let params = cfg.params();
    let space = cfg.space()?;
    let pt = Perturbation::new(&space, &params)?;
    let oracle = OracleSlopes::compute(&space, &params, DEFAULT_ALPHA_STEPS)?;
    let mut out = Vec::new();
    for branch in cfg.branch.branches() {
        // With both branches requested, a zero mode that does not exist on
        // one of them is skipped rather than reported as an error.
        if cfg.branch == BranchSel::Both
            && cfg.level == 0
            && spinor_level(&params, 0, branch).is_err()
        {
            continue;
        }
        let report = match cfg.command {
            Command::Correct => {
                pt.first_order(ClusterState::new(cfg.level, branch, 0), Some(&oracle))?
            }
            _ => pt.degenerate(
                &landau_cluster(cfg.level, branch, cfg.cluster_size),
                Some(&oracle),
            )?,
        };
        out.push(report);
    }
    Ok(out)
}

fn scan(cfg: &RunConfig) -> Result<ScanResult> {
    let space = cfg.space()?;
    let params = cfg.params();
    let fields = cfg.scan_fields();
    let threads = match std::env::var("GUP_DOSC_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Some(n),
            _ => {
                return Err(Error::Usage(format!(
                    "GUP_DOSC_THREADS must be a positive integer, got {v:?}"
                )))
            }
        },
        Err(_) => None,
    };
    let result = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Usage(format!("thread pool: {e}")))?
            .install(|| field_scan_with_window(&space, &params, &fields, cfg.energy_window))?,
        None => field_scan_with_window(&space, &params, &fields, cfg.energy_window)?,
    };
    Ok(result)
}

/// Executes the configured command.
pub fn execute(cfg: &RunConfig) -> Result<Report> {
    let result = match cfg.command {
        Command::Spectrum => Outcome::Spectrum(spectrum(cfg)?),
        Command::Correct | Command::Degenerate => Outcome::Corrections(corrections(cfg)?),
        Command::Scan => Outcome::Scan(scan(cfg)?),
        Command::Validate => Outcome::Validate(replicate_paper(&cfg.space()?, &cfg.params())),
    };
    Ok(Report {
        config: cfg.clone(),
        result,
    })
}

fn config_line(cfg: &RunConfig) -> String {
    let value = serde_json::to_value(cfg).expect("config serializes");
    let mut out = String::from("#");
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            let v = match v {
                serde_json::Value::Number(n) if n.is_f64() => fmt_g(n.as_f64().unwrap_or(f64::NAN)),
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            let _ = write!(out, " {k}={v}");
        }
    }
    out.push('\n');
    out
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 input")
}

/// CSV cells keep full precision.
fn full(x: f64) -> String {
    format!("{x:.16e}")
}

fn full_opt(x: Option<f64>) -> String {
    x.map(full).unwrap_or_default()
}

fn pt_rows(reports: &[PTReport], cell: fn(f64) -> String) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for r in reports {
        for (i, s) in r.shifts.iter().enumerate() {
            rows.push(vec![
                r.cluster_label.clone(),
                format!("{:?}", r.method).to_lowercase(),
                r.unperturbed_energy.map(cell).unwrap_or_default(),
                i.to_string(),
                cell(*s),
                cell(r.shifts_natural.get(i).copied().unwrap_or(f64::NAN)),
                r.oracle_slopes.get(i).map(|&x| cell(x)).unwrap_or_default(),
                r.discrepancy_flags.join("; "),
            ]);
        }
    }
    rows
}

const PT_HEADER: [&str; 8] = [
    "cluster",
    "method",
    "E0",
    "index",
    "shift",
    "shift_natural",
    "oracle_slope",
    "flags",
];
const SCAN_HEADER: [&str; 12] = [
    "B",
    "omega_tilde",
    "ground_shift",
    "first_shift",
    "n2_shift_1",
    "n2_shift_2",
    "n2_shift_3",
    "n2_shift_4",
    "degeneracy_counts_before",
    "degeneracy_counts_after",
    "flags",
    "error",
];

fn scan_rows(s: &ScanResult, cell: fn(Option<f64>) -> String) -> Vec<Vec<String>> {
    s.points
        .iter()
        .map(|p| {
            let n2 = |i: usize| cell(p.n2_shifts.map(|v| v[i]));
            let count = |c: Option<usize>| c.map(|c| c.to_string()).unwrap_or_default();
            vec![
                cell(Some(p.field)),
                cell(Some(p.omega_tilde)),
                cell(p.ground_shift),
                cell(p.first_shift),
                n2(0),
                n2(1),
                n2(2),
                n2(3),
                count(p.degeneracy_counts_before),
                count(p.degeneracy_counts_after),
                p.flags.join("; "),
                p.error.clone().unwrap_or_default(),
            ]
        })
        .collect()
}

/// Renders a report in the configured format.
pub fn render(report: &Report) -> String {
    let cfg = &report.config;
    match cfg.format {
        Format::Json => to_json(report),
        Format::Csv => match &report.result {
            Outcome::Spectrum(s) => csv_string(
                &[
                    "n",
                    "branch",
                    "energy",
                    "energy_mc2",
                    "exact",
                    "rel_error",
                    "status",
                ],
                &s.rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.n.to_string(),
                            r.branch.to_string(),
                            full_opt(r.energy),
                            full_opt(r.energy_mc2),
                            full_opt(r.exact),
                            full_opt(r.rel_error),
                            r.status.clone(),
                        ]
                    })
                    .collect::<Vec<_>>(),
            ),
            Outcome::Corrections(rs) => csv_string(&PT_HEADER, &pt_rows(rs, full)),
            Outcome::Scan(s) => csv_string(&SCAN_HEADER, &scan_rows(s, full_opt)),
            Outcome::Validate(v) => csv_string(
                &[
                    "group",
                    "id",
                    "computed",
                    "reference",
                    "units",
                    "tolerance",
                    "status",
                    "allowlisted",
                ],
                &validate_rows(v, full),
            ),
        },
        Format::Text => {
            let mut out = config_line(cfg);
            match &report.result {
                Outcome::Spectrum(s) => {
                    let _ = writeln!(
                        out,
                        "omega_tilde = {}  lambda = {}",
                        fmt_g(s.omega_tilde),
                        fmt_g(s.lambda)
                    );
                    let rows: Vec<Vec<String>> = s
                        .rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.n.to_string(),
                                r.branch.to_string(),
                                fmt_opt(r.energy),
                                fmt_opt(r.energy_mc2),
                                fmt_opt(r.exact),
                                fmt_opt(r.rel_error),
                                r.status.clone(),
                            ]
                        })
                        .collect();
                    out.push_str(&table(
                        &["n", "branch", "E", "E/mc^2", "exact", "rel_err", "status"],
                        &rows,
                    ));
                }
                Outcome::Corrections(rs) => {
                    let _ = writeln!(out, "shift units: a·c·m·ħ·ω̃");
                    out.push_str(&table(&PT_HEADER, &pt_rows(rs, fmt_g)));
                    for r in rs {
                        if let Some(b) = r.breakdown {
                            let _ = writeln!(
                                out,
                                "{}: <4 pz pzbar>/(m ħ |ω̃|) = {} (ladder) + {} (z zbar) + {} (Lz) = {}",
                                r.cluster_label,
                                fmt_g(b.ladder),
                                fmt_g(b.zzbar),
                                fmt_g(b.lz),
                                fmt_g(b.total)
                            );
                        }
                    }
                }
                Outcome::Scan(s) => {
                    let _ = writeln!(out, "critical_B = {}", fmt_opt(s.critical_field));
                    out.push_str(&table(&SCAN_HEADER, &scan_rows(s, fmt_opt)));
                }
                Outcome::Validate(v) => {
                    for r in &v.rows {
                        let _ = writeln!(out, "{} : {}", r.id, r.status);
                    }
                    out.push('\n');
                    out.push_str(&table(
                        &[
                            "group",
                            "id",
                            "computed",
                            "reference",
                            "units",
                            "tolerance",
                            "status",
                            "allowlisted",
                        ],
                        &validate_rows(v, fmt_g),
                    ));
                }
            }
            out
        }
    }
}

fn validate_rows(v: &ReplicationReport, cell: fn(f64) -> String) -> Vec<Vec<String>> {
    let list = |xs: &[f64]| xs.iter().map(|&x| cell(x)).collect::<Vec<_>>().join(" ");
    v.rows
        .iter()
        .map(|r| {
            vec![
                r.group.to_string(),
                r.id.clone(),
                list(&r.computed),
                list(&r.reference),
                r.units.clone(),
                cell(r.tolerance),
                r.status.to_string(),
                r.allowlisted.to_string(),
            ]
        })
        .collect()
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) => 2,
        _ => 3,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Usage(_) => "usage",
        Error::CriticalField => "critical_field",
        Error::BranchCollapse { .. } => "branch_collapse",
        Error::LevelAbsent { .. } => "level_absent",
        Error::OutsideInterior { .. } => "outside_interior",
        Error::DegenerateLevel { .. } => "degenerate_level",
        Error::NotDegenerate { .. } => "not_degenerate",
        Error::NonConvergence { .. } => "non_convergence",
        _ => "computation",
    }
}

fn emit(cfg: Option<&RunConfig>, text: &str) -> std::io::Result<()> {
    match cfg.and_then(|c| c.output.as_ref()) {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Entry point; returns the process exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let help = argv
        .iter()
        .skip(1)
        .any(|a| a == "--help" || a == "-h" || a == "--version" || a == "-V");
    if help {
        return match Args::try_parse_from(&argv) {
            Err(e) if !e.use_stderr() => {
                let _ = e.print();
                0
            }
            _ => 2,
        };
    }
    let cfg = match parse_config(&argv) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("gup-dosc: {e}");
            return exit_code(&e);
        }
    };
    match execute(&cfg) {
        Ok(report) => {
            if let Err(e) = emit(Some(&cfg), &render(&report)) {
                eprintln!("gup-dosc: cannot write report: {e}");
                return 3;
            }
            match &report.result {
                Outcome::Validate(v) if !v.unexpected_discrepancies().is_empty() => 1,
                _ => 0,
            }
        }
        Err(e) => {
            eprintln!("gup-dosc: {e}");
            if cfg.format == Format::Json {
                let body = ErrorReport {
                    config: Some(cfg.clone()),
                    error: ErrorBody {
                        kind: error_kind(&e).into(),
                        message: e.to_string(),
                    },
                };
                let _ = emit(Some(&cfg), &to_json(&body));
            }
            exit_code(&e)
        }
    }
}
