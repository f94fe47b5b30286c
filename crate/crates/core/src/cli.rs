//! Command-line front end: describe, bin, fit, sweep, generate, validate
//! and export.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or model error, 3 failed
//! validation.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::Utc;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arma::{self, diagnose, identify, EstimateOptions, Standardization};
use crate::climdata::{
    bin_data, describe, ingest_csv, select, select_rows, ClimateSeries, CsvSchema, Dataset,
    Predicate, SelectionCriteria, SiteMeta, Variable, WeatherTable,
};
use crate::corrfit::{fit_correlation, Template};
use crate::distfit::{chi2_gof, gaussian_fit, saunier_fit, weibull_fit, DistModel};
use crate::genseq::{
    export, generate, generate_gated, table_plotdata, table_to_csv, ExportFormat, FittedModel,
    GenerationPlan, ModelRegistry, Provenance, RegistryEntry, RegistryKey, REGISTRY_ENV,
};
use crate::neuralfit::{default_inputs, fit_neural, sweep_hidden, TrainOptions};
use crate::solargeo::{clearness_index, solar_height_series};
use crate::synthetic::SyntheticWorld;
use crate::validate::{full_report, ValidateOptions};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// Seed used by stochastic commands when `--seed` is omitted.
pub const DEFAULT_SEED: u64 = 20_011_015;

#[derive(Debug, Parser)]
#[command(
    name = "weathergen",
    version,
    about = "Weather data modelling and synthetic sequence generation"
)]
pub struct Cli {
    /// Model registry directory [env: WEATHERGEN_REGISTRY, default: ./registry]
    #[arg(long, global = true)]
    pub registry: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summary statistics of one variable, with histogram plot data.
    Describe(DescribeArgs),
    /// Bin data (hours per value interval) as CSV.
    Bins(BinsArgs),
    /// Fit a model and store it in the registry.
    #[command(subcommand)]
    Fit(FitCommand),
    /// Compare network sizes and store the best one.
    #[command(subcommand)]
    Sweep(SweepCommand),
    /// Inspect the registry.
    #[command(subcommand)]
    Models(ModelsCommand),
    /// List the correlation templates.
    Templates,
    /// Generate a sequence from a JSON plan.
    Generate(GenerateArgs),
    /// Validate generated data against reference data.
    Validate(ValidateArgs),
    /// Re-emit a generated CSV as CSV or per-variable plot data.
    Export(ExportArgs),
    /// Write daily data from the built-in synthetic climate.
    World(WorldArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Measured weather CSV.
    pub data: PathBuf,
    /// Site JSON; overrides the `# site:` line of the data file.
    #[arg(long)]
    pub site: Option<PathBuf>,
    #[arg(long)]
    pub var: Variable,
    /// Months such as `8`, `6-8` or `1,2,12`.
    #[arg(long, default_value = "all")]
    pub months: String,
    /// Inclusive hour window `H0-H1`.
    #[arg(long)]
    pub hours: Option<String>,
    /// Value bin `variable:lower:upper`, repeatable.
    #[arg(long = "where")]
    pub predicates: Vec<String>,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Histogram bin width [default: per variable].
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// Directory for histogram plot data.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BinsArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub width: f64,
    /// Output file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Law {
    Weibull,
    Saunier,
    Gaussian,
}

#[derive(Debug, Subcommand)]
pub enum FitCommand {
    /// Weibull, Saunier or Gaussian law with a chi-square check.
    Dist {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum)]
        law: Law,
        /// Upper clearness index of the Saunier law [default: 98th percentile].
        #[arg(long)]
        kt_max: Option<f64>,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Correlation function fitted by least squares.
    Corr {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated predictor variables.
        #[arg(long, value_delimiter = ',', required = true)]
        predictors: Vec<Variable>,
        #[arg(long, default_value = "poly1")]
        template: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Directory for observed/predicted plot data.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Box-Jenkins ARMA model; orders are identified unless given.
    Arma {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long, default_value_t = 20)]
        max_lag: usize,
        #[arg(long, value_enum)]
        standardization: Option<StandardizationArg>,
        /// Directory for correlogram plot data.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// One-hidden-layer network trained by Levenberg-Marquardt.
    Nn {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated input variables [default: per response].
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<Variable>,
        #[arg(long, default_value_t = 3)]
        hidden: usize,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StandardizationArg {
    Raw,
    HourOfDay,
    DayOfYear,
}

impl From<StandardizationArg> for Standardization {
    fn from(s: StandardizationArg) -> Self {
        match s {
            StandardizationArg::Raw => Standardization::Raw,
            StandardizationArg::HourOfDay => Standardization::HourOfDay,
            StandardizationArg::DayOfYear => Standardization::DayOfYear,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum SweepCommand {
    Nn {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<Variable>,
        /// Hidden sizes `A..B` (inclusive).
        #[arg(long, default_value = "1..8")]
        hidden: String,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ModelsCommand {
    List,
    Show { name: String },
    Remove { name: String },
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub plan: PathBuf,
    /// Overrides the plan seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "generated.csv")]
    pub out: PathBuf,
    /// Also write per-variable plot data into this directory.
    #[arg(long)]
    pub plotdata: Option<PathBuf>,
    /// Regenerate until every variable passes a KS test against this CSV.
    #[arg(long)]
    pub ks_gate: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 20)]
    pub max_attempts: usize,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub generated: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Write the machine-readable report here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Compare only these months of the reference.
    #[arg(long)]
    pub months: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// A CSV written by `generate`.
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: FormatArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Plotdata,
}

#[derive(Debug, Args)]
pub struct WorldArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2001)]
    pub first_year: i32,
    #[arg(long, default_value_t = 3)]
    pub years: usize,
    /// Months written for each year, such as `8` or `6-8`.
    #[arg(long, default_value = "all")]
    pub months: String,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Parses `args` (program name first) and runs the command, writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let Error::Unresolved(items) = &e {
                for u in items {
                    let _ = writeln!(
                        err,
                        "  missing {} ({}): {}",
                        u.variable, u.period, u.suggestion
                    );
                }
            }
            EXIT_DATA
        }
    }
}

fn registry_path(cli: &Option<PathBuf>) -> PathBuf {
    cli.clone()
        .or_else(|| std::env::var_os(REGISTRY_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("registry"))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let registry = registry_path(&cli.registry);
    match cli.command {
        Command::Describe(a) => cmd_describe(a, out),
        Command::Bins(a) => cmd_bins(a, out),
        Command::Fit(f) => cmd_fit(f, &registry, out),
        Command::Sweep(s) => cmd_sweep(s, &registry, out),
        Command::Models(m) => cmd_models(m, &registry, out),
        Command::Templates => {
            for (name, desc) in Template::catalog() {
                w(out, format!("{name:<16} {desc}"))?;
            }
            Ok(EXIT_OK)
        }
        Command::Generate(a) => cmd_generate(a, &registry, out),
        Command::Validate(a) => cmd_validate(a, out),
        Command::Export(a) => cmd_export(a, out),
        Command::World(a) => {
            let seed = announce_seed(a.seed, out)?;
            let world = SyntheticWorld::standard()?;
            let months = SelectionCriteria::parse_months(&a.months)?;
            let blocks: Vec<(i32, u32)> = (a.first_year..a.first_year + a.years as i32)
                .flat_map(|y| months.iter().map(move |m| (y, *m)))
                .collect();
            let table = world.months(&blocks, seed)?;
            write_file(&a.out, world.to_csv(&table)?)?;
            w(
                out,
                format!("wrote {} rows to {}", table.len(), a.out.display()),
            )?;
            Ok(EXIT_OK)
        }
    }
}

fn w(out: &mut dyn Write, line: impl AsRef<str>) -> Result<()> {
    writeln!(out, "{}", line.as_ref()).map_err(|e| Error::io("<stdout>", e))
}

fn write_file(path: &Path, content: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn announce_seed(seed: Option<u64>, out: &mut dyn Write) -> Result<u64> {
    let s = seed.unwrap_or(DEFAULT_SEED);
    w(out, format!("seed: {s}"))?;
    Ok(s)
}

/// Loaded data plus the series the CLI can derive from it.
struct Loaded {
    dataset: Dataset,
    site: Option<SiteMeta>,
}

impl Loaded {
    fn open(path: &Path, site: Option<&Path>) -> Result<Self> {
        let mut schema = CsvSchema::default();
        if let Some(p) = site {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            schema.site = Some(serde_json::from_str(&text)?);
        }
        let dataset = ingest_csv(path, &schema)?;
        let site = dataset.site.clone();
        Ok(Loaded { dataset, site })
    }

    /// Measured series, or a clearness index / solar height derived from
    /// the global irradiance and the site.
    fn series(&self, v: Variable) -> Result<ClimateSeries> {
        if let Some(s) = self.dataset.get(v) {
            return Ok(s.clone());
        }
        let need_site = || {
            self.site.as_ref().ok_or_else(|| {
                Error::invalid(format!(
                    "{v} is not in the data and no site is known to derive it"
                ))
            })
        };
        match v {
            Variable::ClearnessIndex => {
                clearness_index(self.dataset.require(Variable::GlobalRad)?, need_site()?)
            }
            Variable::SolarHeight => {
                let like = self.dataset.series.first().ok_or(Error::NoData)?;
                solar_height_series(like, need_site()?)
            }
            _ => Err(Error::invalid(format!("dataset has no {v} column"))),
        }
    }

    /// Every series usable as a predicate companion.
    fn companions(&self) -> Vec<ClimateSeries> {
        let mut all = self.dataset.series.clone();
        for v in [Variable::ClearnessIndex, Variable::SolarHeight] {
            if self.dataset.get(v).is_none() {
                if let Ok(s) = self.series(v) {
                    all.push(s);
                }
            }
        }
        all
    }
}

fn criteria(a: &DataArgs) -> Result<SelectionCriteria> {
    let mut c = SelectionCriteria::months(SelectionCriteria::parse_months(&a.months)?)?;
    if let Some(h) = &a.hours {
        let (s, e) = h
            .split_once('-')
            .ok_or_else(|| Error::invalid(format!("bad hour window '{h}', expected H0-H1")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<u32>()
                .map_err(|_| Error::invalid(format!("bad hour '{x}'")))
        };
        c = c.with_hours(parse(s)?, parse(e)?)?;
    }
    for p in &a.predicates {
        c.predicates.push(parse_predicate(p)?);
    }
    c.validate()?;
    Ok(c)
}

fn parse_predicate(s: &str) -> Result<Predicate> {
    let parts: Vec<&str> = s.split(':').collect();
    let [v, lo, hi] = parts[..] else {
        return Err(Error::invalid(format!(
            "bad predicate '{s}', expected variable:lower:upper"
        )));
    };
    let num = |x: &str| {
        x.parse::<f64>()
            .map_err(|_| Error::invalid(format!("bad bound '{x}'")))
    };
    Predicate::new(v.parse()?, num(lo)?, num(hi)?)
}

fn cmd_describe(a: DescribeArgs, out: &mut dyn Write) -> Result<i32> {
    let data = Loaded::open(&a.data.data, a.data.site.as_deref())?;
    let c = criteria(&a.data)?;
    let s = select(&data.series(a.data.var)?, &c, &data.companions())?;
    let d = describe(&s)?;
    w(
        out,
        format!("variable: {} [{}]", a.data.var, a.data.var.unit()),
    )?;
    w(out, format!("count: {}", d.count))?;
    w(out, format!("missing: {}", d.missing_count))?;
    w(out, format!("mean: {:.4}", d.mean))?;
    w(
        out,
        format!(
            "std: {:.4}{}",
            d.std,
            if d.degenerate {
                " (fewer than 2 values)"
            } else {
                ""
            }
        ),
    )?;
    w(out, format!("min: {:.4}", d.min))?;
    w(out, format!("max: {:.4}", d.max))?;
    if let Some(dir) = a.plot_dir {
        let width = a
            .bin_width
            .unwrap_or_else(|| crate::validate::default_bin_width(a.data.var));
        let bins = bin_data(&s, width)?;
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let path = dir.join(format!("{}_histogram.csv", a.data.var));
        write_file(&path, bins.to_csv())?;
        w(out, format!("histogram: {}", path.display()))?;
    }
    Ok(EXIT_OK)
}

fn cmd_bins(a: BinsArgs, out: &mut dyn Write) -> Result<i32> {
    let data = Loaded::open(&a.data.data, a.data.site.as_deref())?;
    let c = criteria(&a.data)?;
    let s = select(&data.series(a.data.var)?, &c, &data.companions())?;
    let csv = bin_data(&s, a.width)?.to_csv();
    match a.out {
        Some(p) => write_file(&p, csv)?,
        None => out
            .write_all(csv.as_bytes())
            .map_err(|e| Error::io("<stdout>", e))?,
    }
    Ok(EXIT_OK)
}

fn store(
    registry: &Path,
    data: &Loaded,
    args: &DataArgs,
    criteria: SelectionCriteria,
    model: FittedModel,
    n: usize,
    diagnostics: serde_json::Value,
    out: &mut dyn Write,
) -> Result<()> {
    let reg = ModelRegistry::open(registry)?;
    let response = data.series(args.var)?;
    let provenance = Provenance {
        fitted_at: Utc::now().naive_utc(),
        data_start: response.timestamps().first().copied(),
        data_end: response.timestamps().last().copied(),
        n,
        diagnostics,
        software_version: crate::VERSION.into(),
        notes: vec![format!("data: {}", args.data.display())],
    };
    let entry = RegistryEntry::new(args.var, response.cadence(), criteria, model, provenance);
    let replaced = reg.get(&entry.key)?.is_some();
    let path = reg.put(&entry)?;
    w(
        out,
        format!(
            "{} {}",
            if replaced { "replaced" } else { "stored" },
            path.display()
        ),
    )
}

fn cmd_fit(f: FitCommand, registry: &Path, out: &mut dyn Write) -> Result<i32> {
    match f {
        FitCommand::Dist {
            data: a,
            law,
            kt_max,
            bins,
            alpha,
        } => {
            let data = Loaded::open(&a.data, a.site.as_deref())?;
            let c = criteria(&a)?;
            let s = select(&data.series(a.var)?, &c, &data.companions())?;
            let (dist, model, n) = match law {
                Law::Weibull => {
                    let fit = weibull_fit(&s)?;
                    w(
                        out,
                        format!(
                            "weibull k = {:.6} c = {:.6} (zeros excluded: {})",
                            fit.params.k, fit.params.c, fit.zeros
                        ),
                    )?;
                    if fit.small_sample {
                        w(out, "warning: fewer than 30 positive values")?;
                    }
                    (
                        DistModel::Weibull(fit.params),
                        FittedModel::Weibull(fit.params),
                        fit.n,
                    )
                }
                Law::Saunier => {
                    let p = saunier_fit(&s, kt_max)?;
                    w(
                        out,
                        format!(
                            "saunier gamma1 = {:.6} C1 = {:.6e} kt_moy = {:.6} kt_max = {:.6}",
                            p.gamma1, p.c1, p.kt_moy, p.kt_max
                        ),
                    )?;
                    (
                        DistModel::Saunier(p),
                        FittedModel::Saunier(p),
                        s.present().len(),
                    )
                }
                Law::Gaussian => {
                    let p = gaussian_fit(&s)?;
                    w(
                        out,
                        format!("gaussian mu = {:.6} sigma = {:.6}", p.mu, p.sigma),
                    )?;
                    (
                        DistModel::Gaussian(p),
                        FittedModel::Gaussian(p),
                        s.present().len(),
                    )
                }
            };
            let gof = chi2_gof(&s.present(), &dist, bins, alpha);
            let diag = match &gof {
                Ok(g) => {
                    w(
                        out,
                        format!(
                            "chi2 = {:.4} dof = {} p = {:.4} -> {}",
                            g.statistic,
                            g.dof,
                            g.p_value,
                            if g.pass { "accepted" } else { "rejected" }
                        ),
                    )?;
                    serde_json::to_value(g)?
                }
                Err(e) => {
                    w(out, format!("chi2 test skipped: {e}"))?;
                    serde_json::Value::Null
                }
            };
            store(registry, &data, &a, c, model, n, diag, out)?;
        }
        FitCommand::Corr {
            data: a,
            predictors,
            template,
            alpha,
            plot_dir,
        } => {
            let data = Loaded::open(&a.data, a.site.as_deref())?;
            let c = criteria(&a)?;
            let t = Template::builtin(&template, predictors.len())?;
            let preds = predictors
                .iter()
                .map(|v| data.series(*v))
                .collect::<Result<Vec<_>>>()?;
            let m = fit_correlation(&t, &data.series(a.var)?, &preds, &c, &data.companions())?;
            let sig = m.significance(alpha)?;
            w(
                out,
                format!("template {} on {} rows", m.template.id, m.diagnostics.n),
            )?;
            for (((label, coef), t), se) in m
                .term_labels()
                .iter()
                .zip(&m.coefficients)
                .zip(&m.diagnostics.t_statistics)
                .zip(&m.diagnostics.std_errors)
            {
                w(
                    out,
                    format!("  {label:<24} {coef:>14.6e}  se {se:.3e}  t {t:.3}"),
                )?;
            }
            w(
                out,
                format!(
                    "r2 = {:.5}  F = {:.4} (p = {:.4e}) -> {}",
                    m.diagnostics.r2,
                    m.diagnostics.f_statistic,
                    sig.f_p_value,
                    if sig.f_pass {
                        "significant"
                    } else {
                        "not significant"
                    }
                ),
            )?;
            w(
                out,
                format!("residual std = {:.5}", m.diagnostics.residual_std),
            )?;
            if let Some(dir) = plot_dir {
                std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                let mut csv = String::from("observed,predicted\n");
                for (x, y) in m.inputs.iter().zip(&m.observed) {
                    csv.push_str(&format!("{y},{}\n", m.evaluate(x)?));
                }
                let path = dir.join(format!("{}_fit.csv", a.var));
                write_file(&path, csv)?;
                w(out, format!("plot data: {}", path.display()))?;
            }
            let n = m.diagnostics.n;
            let diag = serde_json::json!({ "diagnostics": m.diagnostics, "significance": sig });
            store(
                registry,
                &data,
                &a,
                c,
                FittedModel::Correlation(m),
                n,
                diag,
                out,
            )?;
        }
        FitCommand::Arma {
            data: a,
            p,
            q,
            max_lag,
            standardization,
            plot_dir,
        } => {
            let data = Loaded::open(&a.data, a.site.as_deref())?;
            let c = criteria(&a)?;
            let s = select(&data.series(a.var)?, &c, &data.companions())?;
            let opts = EstimateOptions {
                standardization: standardization.map(Into::into),
            };
            let kind = opts
                .standardization
                .unwrap_or(Standardization::default_for(s.cadence()));
            let z = arma::Deseasonal::fit(&s, kind)?.standardize_series(&s);
            let acf = arma::acf_pacf_values(&z, max_lag)?;
            let (p, q) = match (p, q) {
                (Some(p), Some(q)) => (p, q),
                (p, q) => {
                    let id = identify(&acf)?;
                    w(
                        out,
                        format!(
                            "identified {:?}({}, {}){}",
                            id.kind,
                            id.p,
                            id.q,
                            if id.white_noise {
                                " - no significant lag, white noise"
                            } else {
                                ""
                            }
                        ),
                    )?;
                    (p.unwrap_or(id.p), q.unwrap_or(id.q))
                }
            };
            let m = arma::estimate_with(&s, p, q, opts)?;
            w(
                out,
                format!(
                    "ARMA({p}, {q}) phi = {:?} theta = {:?} sigma = {:.6}",
                    m.phi, m.theta, m.noise_sigma
                ),
            )?;
            if m.projected {
                w(
                    out,
                    "warning: estimate projected back into the stationary region",
                )?;
            }
            let report = diagnose(&m, &s)?;
            w(out, format!(
                "residuals: {} of 20 lags outside the band (allowed {}), Ljung-Box Q = {:.3} p = {:.4} -> {}",
                report.exceedances, report.allowed, report.ljung_box, report.ljung_box_p,
                if report.pass { "white" } else { "not white" }
            ))?;
            if let Some(dir) = plot_dir {
                std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
                let mut csv = String::from("lag,acf,pacf,bartlett,quenouille\n");
                for k in 1..=acf.max_lag {
                    csv.push_str(&format!(
                        "{k},{},{},{},{}\n",
                        acf.r[k], acf.pacf[k], acf.bartlett_bounds[k], acf.quenouille_bound
                    ));
                }
                let path = dir.join(format!("{}_correlogram.csv", a.var));
                write_file(&path, csv)?;
                w(out, format!("plot data: {}", path.display()))?;
            }
            let n = m.n;
            let diag = serde_json::to_value(&report)?;
            store(registry, &data, &a, c, FittedModel::Arma(m), n, diag, out)?;
        }
        FitCommand::Nn {
            data: a,
            inputs,
            hidden,
            max_iter,
            seed,
        } => {
            let seed = announce_seed(seed, out)?;
            let data = Loaded::open(&a.data, a.site.as_deref())?;
            let c = criteria(&a)?;
            let inputs = if inputs.is_empty() {
                default_inputs(a.var)
            } else {
                inputs
            };
            let preds = inputs
                .iter()
                .map(|v| data.series(*v))
                .collect::<Result<Vec<_>>>()?;
            let opts = TrainOptions {
                n_hidden: hidden,
                seed,
                max_iter,
                ..TrainOptions::default()
            };
            let m = fit_neural(&data.series(a.var)?, &preds, &c, &data.companions(), opts)?;
            let rep = m.report.clone().expect("trained network carries a report");
            w(out, format!(
                "network {} -> {} hidden -> {}: eqm {:.6} -> {:.6} after {} iteration(s), stop {:?}",
                inputs.iter().map(|v| v.name()).collect::<Vec<_>>().join(","),
                hidden, a.var, rep.eqm_history[0], rep.eqm_history.last().unwrap(), rep.iterations, rep.stop
            ))?;
            if rep.small_sample {
                w(out, "warning: fewer than 10 samples per parameter")?;
            }
            let (_, targets) = select_rows(&data.series(a.var)?, &preds, &c, &data.companions())?;
            let diag = serde_json::to_value(&rep)?;
            store(
                registry,
                &data,
                &a,
                c,
                FittedModel::Neural(m),
                targets.len(),
                diag,
                out,
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let (a, b) = s
        .split_once("..")
        .or_else(|| s.split_once('-'))
        .ok_or_else(|| Error::invalid(format!("bad range '{s}', expected A..B")))?;
    let parse = |x: &str| {
        x.trim()
            .trim_start_matches('=')
            .parse::<usize>()
            .map_err(|_| Error::invalid(format!("bad range '{s}'")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a > b {
        return Err(Error::invalid(format!("empty range '{s}'")));
    }
    Ok(a..=b)
}

fn cmd_sweep(s: SweepCommand, registry: &Path, out: &mut dyn Write) -> Result<i32> {
    let SweepCommand::Nn {
        data: a,
        inputs,
        hidden,
        max_iter,
        seed,
    } = s;
    let seed = announce_seed(seed, out)?;
    let data = Loaded::open(&a.data, a.site.as_deref())?;
    let c = criteria(&a)?;
    let inputs = if inputs.is_empty() {
        default_inputs(a.var)
    } else {
        inputs
    };
    let preds = inputs
        .iter()
        .map(|v| data.series(*v))
        .collect::<Result<Vec<_>>>()?;
    let (x, y) = select_rows(&data.series(a.var)?, &preds, &c, &data.companions())?;
    let opts = TrainOptions {
        seed,
        max_iter,
        ..TrainOptions::default()
    };
    let mut r = sweep_hidden(&x, &y, parse_range(&hidden)?, opts)?;
    w(out, "hidden,train_eqm,validation_eqm")?;
    for row in &r.rows {
        w(
            out,
            format!(
                "{},{:.6},{:.6}",
                row.n_hidden, row.train_eqm, row.validation_eqm
            ),
        )?;
    }
    w(out, format!("best: {} hidden unit(s)", r.best))?;
    r.model.inputs = inputs;
    r.model.response = Some(a.var);
    let diag = serde_json::to_value(&r.rows)?;
    store(
        registry,
        &data,
        &a,
        c,
        FittedModel::Neural(r.model),
        y.len(),
        diag,
        out,
    )?;
    Ok(EXIT_OK)
}

fn cmd_models(m: ModelsCommand, registry: &Path, out: &mut dyn Write) -> Result<i32> {
    let reg = ModelRegistry::open(registry)?;
    match m {
        ModelsCommand::List => {
            for e in reg.snapshot()?.entries {
                w(
                    out,
                    format!(
                        "{}  {:?}  n={}  fitted {}",
                        e.key.file_name(),
                        e.cadence,
                        e.provenance.n,
                        e.provenance.fitted_at.format("%Y-%m-%d %H:%M:%S")
                    ),
                )?;
            }
        }
        ModelsCommand::Show { name } => {
            let key = RegistryKey::parse_file_name(&name)?;
            let e = reg
                .get(&key)?
                .ok_or_else(|| Error::invalid(format!("no model '{name}'")))?;
            w(out, serde_json::to_string_pretty(&e)?)?;
        }
        ModelsCommand::Remove { name } => {
            let key = RegistryKey::parse_file_name(&name)?;
            if !reg.remove(&key)? {
                return Err(Error::invalid(format!("no model '{name}'")));
            }
            w(out, format!("removed {name}"))?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_generate(a: GenerateArgs, registry: &Path, out: &mut dyn Write) -> Result<i32> {
    let mut plan = GenerationPlan::load(&a.plan)?;
    if let Some(s) = a.seed {
        plan.seed = s;
    }
    w(out, format!("seed: {}", plan.seed))?;
    let snapshot = ModelRegistry::open(registry)?.snapshot()?;
    let seq = match &a.ks_gate {
        Some(reference) => {
            let table = read_table(reference)?.0;
            generate_gated(&plan, &snapshot, &table, a.alpha, a.max_attempts)?
        }
        None => generate(&plan, &snapshot)?,
    };
    export(&seq, ExportFormat::Csv, &a.out)?;
    w(
        out,
        format!("wrote {} rows to {}", seq.table.len(), a.out.display()),
    )?;
    for m in &seq.provenance.models {
        w(out, format!("  {} <- {}", m.variable, m.source))?;
    }
    for d in &seq.provenance.decisions {
        w(out, format!("  decision: {d}"))?;
    }
    w(
        out,
        format!(
            "coherence: {} repair(s) on {} of {} rows",
            seq.provenance.coherence.total(),
            seq.provenance.coherence.rows_repaired,
            seq.provenance.coherence.rows
        ),
    )?;
    if let Some(dir) = &a.plotdata {
        let files = export(&seq, ExportFormat::Plotdata, dir)?;
        w(
            out,
            format!("plot data: {} file(s) in {}", files.len(), dir.display()),
        )?;
    }
    Ok(EXIT_OK)
}

fn read_table(path: &Path) -> Result<(WeatherTable, Option<SiteMeta>)> {
    let ds = ingest_csv(path, &CsvSchema::default())?;
    Ok((WeatherTable::from_series(&ds.series)?, ds.site))
}

fn cmd_validate(a: ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    let (generated, gsite) = read_table(&a.generated)?;
    let (mut reference, rsite) = read_table(&a.reference)?;
    if let Some(m) = &a.months {
        let months: BTreeSet<u32> = SelectionCriteria::parse_months(m)?;
        let keep: Vec<bool> = reference
            .timestamps
            .iter()
            .map(|t| months.contains(&chrono::Datelike::month(t)))
            .collect();
        reference = reference.filter_rows(&keep);
    }
    let options = ValidateOptions {
        alpha: a.alpha,
        site: gsite.or(rsite),
        ..ValidateOptions::default()
    };
    let report = full_report(&generated, &reference, &options)?;
    out.write_all(report.to_text().as_bytes())
        .map_err(|e| Error::io("<stdout>", e))?;
    if let Some(p) = &a.json {
        write_file(p, report.to_json()?)?;
    }
    Ok(if report.pass {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    })
}

fn cmd_export(a: ExportArgs, out: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| Error::io(&a.input, e))?;
    let (table, _) = read_table(&a.input)?;
    match a.format {
        FormatArg::Csv => {
            // comment lines are carried over unchanged
            let comments: Vec<String> = text
                .lines()
                .filter_map(|l| l.strip_prefix("# ").or_else(|| l.strip_prefix('#')))
                .map(str::to_string)
                .collect();
            write_file(&a.out, table_to_csv(&table, &comments))?;
            w(out, format!("wrote {}", a.out.display()))?;
        }
        FormatArg::Plotdata => {
            let files = table_plotdata(&table, &a.out)?;
            w(
                out,
                format!("wrote {} file(s) to {}", files.len(), a.out.display()),
            )?;
        }
    }
    Ok(EXIT_OK)
}
