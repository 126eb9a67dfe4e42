//! Command-line interface.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use uoh_core::econometrics::adf::{AdfTable, Deterministic, DEFAULT_BUCKETS, DEFAULT_REPS};
use uoh_core::indices::{all_indices, IndexName, IndexOptions, IndexSeries, IndexTable, IndexValue};
use uoh_core::league::LeagueSeason;
use uoh_core::panel::{average_attendance, build_panel, MacroObservation, PanelConfig, PanelDataset};
use uoh_core::sim::{simulate_dgp, simulate_league, DgpParams, LeagueParams, TABLE1_COVERAGE};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::io;
use crate::manifest::{file_digest, sha256_hex, versions, Digest256, OutDir, RunManifest};
use crate::parallel::Pool;
use crate::pipeline::{self, FitSettings, IndexFit, UnitRootRow};
use crate::report;

#[derive(Debug, Parser)]
#[command(name = "uoh", version, about = "Competitive balance indices and attendance demand models")]
pub struct Cli {
    /// JSON configuration (level structure, G window, trend degree, countries).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 2010)]
    pub seed: u64,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    /// Monte Carlo replications for the expected number of distinct top-K teams.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub mc_reps: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute all 17 balance indices from league tables.
    Indices {
        #[arg(long)]
        leagues: PathBuf,
    },
    /// ADF-Fisher panel unit-root tests.
    UnitRoot {
        #[arg(long = "macro")]
        macro_csv: PathBuf,
        /// Index CSV; its series are tested in logs next to the covariates.
        #[arg(long)]
        indices: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        index: String,
        #[command(flatten)]
        adf: AdfArgs,
    },
    /// Fit the attendance model for one index or all of them.
    Fit {
        #[arg(long = "macro")]
        macro_csv: PathBuf,
        #[arg(long)]
        indices: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        adf: AdfArgs,
    },
    /// Attendance effect of each country's worst-to-best balance swing.
    Effects {
        #[arg(long)]
        indices: PathBuf,
        #[arg(long = "macro")]
        macro_csv: PathBuf,
        #[arg(long, default_value = "sdc_ki")]
        index: String,
        /// long_run.csv written by `fit`.
        #[arg(long, conflicts_with = "elasticity", required_unless_present = "elasticity")]
        long_run: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        elasticity: Option<f64>,
    },
    /// Generate synthetic inputs.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Indices, unit-root tests, all fits and the effect table in one run.
    Report {
        #[arg(long)]
        leagues: PathBuf,
        #[arg(long = "macro")]
        macro_csv: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Index whose elasticity drives the effect table.
        #[arg(long, default_value = "sdc_ki")]
        effects_index: String,
        #[command(flatten)]
        adf: AdfArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// League tables from a Bradley-Terry strength model.
    League {
        #[arg(long, default_value = "SIM")]
        country: String,
        #[arg(long, default_value_t = 18)]
        teams: usize,
        #[arg(long, default_value_t = 30)]
        seasons: usize,
        #[arg(long, default_value_t = 2000)]
        first_season: i32,
        /// 0 draws every game; `inf` lets the stronger team always win.
        #[arg(long, default_value_t = 1.0)]
        dispersion: f64,
        #[arg(long, default_value_t = 3)]
        relegated: usize,
        /// One league per historical country with its season coverage.
        #[arg(long)]
        table1: bool,
    },
    /// Attendance panel from the error-correction model with known coefficients.
    Dgp {
        #[arg(long, default_value_t = 8)]
        countries: usize,
        #[arg(long, default_value_t = 50)]
        seasons: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = -1.0)]
        elasticity: f64,
        #[arg(long, default_value_t = 0.2)]
        adjustment: f64,
        #[arg(long, default_value_t = 0.4)]
        rho: f64,
        #[arg(long, default_value_t = 0.05)]
        sigma: f64,
        #[arg(long, default_value = "sdc_ki")]
        index: String,
        #[arg(long)]
        table1: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Index name or `all`.
    #[arg(long, default_value = "all")]
    pub index: String,
    #[arg(long, default_value_t = 2)]
    pub adl_order: usize,
    #[arg(long)]
    pub no_d97: bool,
    /// Iterate the SUR covariance to convergence.
    #[arg(long)]
    pub iterate_sur: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AdfArgs {
    /// Cached Dickey-Fuller quantile table; simulated and written when absent.
    #[arg(long)]
    pub adf_table: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub adf_reps: u64,
}

struct Context {
    config: Config,
    config_sha256: Option<String>,
    seed: u64,
    mc_reps: u64,
    pool: Pool,
    out: OutDir,
    out_root: PathBuf,
    inputs: Vec<Digest256>,
    warnings: Vec<String>,
}

impl Context {
    fn new(cli: &Cli) -> Result<Self> {
        let (config, config_sha256) = match &cli.config {
            Some(p) => {
                let bytes = std::fs::read(p).map_err(|e| Error::io(p, e))?;
                (Config::load(p)?, Some(sha256_hex(&bytes)))
            }
            None => (Config::default(), None),
        };
        let workers = cli
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        Ok(Context {
            config,
            config_sha256,
            seed: cli.seed,
            mc_reps: cli.mc_reps,
            pool: Pool::new(workers)?,
            out: OutDir::create(&cli.out_dir)?,
            out_root: cli.out_dir.clone(),
            inputs: Vec::new(),
            warnings: Vec::new(),
        })
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(file_digest(path)?);
        Ok(())
    }

    fn warn(&mut self, message: String) {
        eprintln!("warning: {message}");
        self.warnings.push(message);
    }

    fn finish(mut self, command: &str, parameters: serde_json::Value) -> Result<()> {
        if !self.warnings.is_empty() {
            let mut text = self.warnings.join("\n");
            text.push('\n');
            self.out.write("warnings.txt", text.as_bytes())?;
        }
        self.out.finish(RunManifest {
            command: command.into(),
            parameters,
            config_sha256: self.config_sha256,
            inputs: self.inputs,
            seed: Some(self.seed),
            versions: versions(),
            artifacts: Vec::new(),
        })?;
        Ok(())
    }

    fn index_options(&self) -> IndexOptions {
        IndexOptions { g_window: self.config.g_window, mc_reps: self.mc_reps, seed: self.seed }
    }

    fn fit_settings(&self, model: &ModelArgs) -> FitSettings {
        FitSettings {
            adl_order: model.adl_order,
            trend_degree: self.config.trend_degree,
            include_d97: !model.no_d97,
            iterate: model.iterate_sur,
            countries: self.config.countries.clone(),
        }
    }

    /// Load the quantile table from the cache, or simulate it and write
    /// the cache. The table enters the manifest as an input either way.
    fn adf_table(&mut self, args: &AdfArgs) -> Result<AdfTable> {
        let path = args.adf_table.clone().unwrap_or_else(|| self.out_root.join("adf_quantiles.csv"));
        let table = if path.exists() {
            io::read_adf_table(&path)?
        } else {
            if args.adf_reps == 0 {
                return Err(Error::Usage("--adf-reps must be positive".into()));
            }
            let t = AdfTable::simulate(args.adf_reps, &DEFAULT_BUCKETS, self.seed, &self.pool);
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            std::fs::write(&path, io::adf_table_csv(&t)).map_err(|e| Error::io(&path, e))?;
            t
        };
        self.input(&path)?;
        Ok(table)
    }

    fn read_macro(&mut self, path: &Path) -> Result<Vec<MacroObservation>> {
        self.input(path)?;
        io::read_macro_csv(path, &self.config)
    }

    fn panel(&self, observations: &[MacroObservation], leagues: &[LeagueSeason]) -> Result<PanelDataset> {
        let config = PanelConfig { trend_degree: self.config.trend_degree };
        Ok(build_panel(leagues, observations, &config)?)
    }
}

fn parse_index(name: &str) -> Result<IndexName> {
    name.parse::<IndexName>().map_err(|e| Error::Usage(e.to_string()))
}

/// Indices named by `selection` (`all` = every index with values, in
/// canonical order).
fn select_indices(selection: &str, values: &[IndexValue]) -> Result<Vec<IndexName>> {
    if selection.eq_ignore_ascii_case("all") {
        Ok(IndexName::ALL.into_iter().filter(|n| values.iter().any(|v| v.name == *n)).collect())
    } else {
        Ok(vec![parse_index(selection)?])
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut ctx = Context::new(cli)?;
    match &cli.command {
        Command::Indices { leagues } => {
            let table = compute_indices(&mut ctx, leagues)?;
            write_indices(&mut ctx, &table)?;
            let params = json!({ "mc_reps": cli.mc_reps, "g_window": ctx.config.g_window });
            ctx.finish("indices", params)
        }
        Command::UnitRoot { macro_csv, indices, index, adf } => {
            let obs = ctx.read_macro(macro_csv)?;
            let panel = ctx.panel(&obs, &[])?;
            let values = match indices {
                Some(p) => {
                    ctx.input(p)?;
                    io::read_index_csv(p, &ctx.config)?
                }
                None => Vec::new(),
            };
            let names = if indices.is_some() { select_indices(index, &values)? } else { Vec::new() };
            let table = ctx.adf_table(adf)?;
            let rows = unit_root(&mut ctx, &panel, &values, &names, &table)?;
            write_unit_root(&mut ctx, &rows)?;
            let params = json!({ "index": index, "adf_reps": adf.adf_reps });
            ctx.finish("unit-root", params)
        }
        Command::Fit { macro_csv, indices, model, adf } => {
            let obs = ctx.read_macro(macro_csv)?;
            let panel = ctx.panel(&obs, &[])?;
            ctx.input(indices)?;
            let values = io::read_index_csv(indices, &ctx.config)?;
            let table = ctx.adf_table(adf)?;
            let fits = fit_all(&mut ctx, &panel, &values, model, &table)?;
            write_fits(&mut ctx, &fits)?;
            let params = model_params(model, adf);
            ctx.finish("fit", params)
        }
        Command::Effects { indices, macro_csv, index, long_run, elasticity } => {
            let name = parse_index(index)?;
            let eps = match (long_run, elasticity) {
                (Some(p), _) => {
                    ctx.input(p)?;
                    io::read_long_run_elasticity(p, name)?
                }
                (None, Some(e)) => *e,
                (None, None) => return Err(Error::Usage("give --long-run or --elasticity".into())),
            };
            let obs = ctx.read_macro(macro_csv)?;
            ctx.input(indices)?;
            let values = io::read_index_csv(indices, &ctx.config)?;
            write_effects(&mut ctx, name, eps, &values, &obs)?;
            let params = json!({ "index": name.code(), "elasticity": elasticity });
            ctx.finish("effects", params)
        }
        Command::Simulate(sim) => simulate(ctx, sim),
        Command::Report { leagues, macro_csv, model, effects_index, adf } => {
            let effects_name = parse_index(effects_index)?;
            let table = compute_indices(&mut ctx, leagues)?;
            write_indices(&mut ctx, &table)?;
            let obs = ctx.read_macro(macro_csv)?;
            let panel = ctx.panel(&obs, &[])?;
            let adf_table = ctx.adf_table(adf)?;
            let names = select_indices(&model.index, &table.values)?;
            let rows = unit_root(&mut ctx, &panel, &table.values, &names, &adf_table)?;
            write_unit_root(&mut ctx, &rows)?;
            let fits = fit_all(&mut ctx, &panel, &table.values, model, &adf_table)?;
            write_fits(&mut ctx, &fits)?;
            match fits.iter().find(|f| f.index == effects_name).and_then(IndexFit::elasticity) {
                Some(eps) => write_effects(&mut ctx, effects_name, eps, &table.values, &obs)?,
                None => ctx.warn(format!("no fitted elasticity for {}; effect table skipped", effects_name.code())),
            }
            let mut params = model_params(model, adf);
            params["effects_index"] = json!(effects_name.code());
            params["mc_reps"] = json!(cli.mc_reps);
            ctx.finish("report", params)
        }
    }
}

fn model_params(model: &ModelArgs, adf: &AdfArgs) -> serde_json::Value {
    json!({
        "index": model.index,
        "adl_order": model.adl_order,
        "d97": !model.no_d97,
        "iterate_sur": model.iterate_sur,
        "adf_reps": adf.adf_reps,
    })
}

fn compute_indices(ctx: &mut Context, leagues: &Path) -> Result<IndexTable> {
    ctx.input(leagues)?;
    let by_country = io::read_league_csv(leagues, &ctx.config)?;
    let table = all_indices(&by_country, &ctx.index_options(), &ctx.pool)?;
    for w in &table.warnings {
        ctx.warn(w.clone());
    }
    for v in table.values.iter().filter(|v| v.flagged) {
        ctx.warn(format!("{} {} {}: value clamped to [0, 1]", v.country, v.season, v.name.code()));
    }
    Ok(table)
}

fn write_indices(ctx: &mut Context, table: &IndexTable) -> Result<()> {
    ctx.out.write("indices.csv", &io::index_csv(&table.values))?;
    ctx.out.write("g_diagnostics.csv", &io::g_diagnostics_csv(&table.g_diagnostics))?;
    Ok(())
}

fn unit_root(
    ctx: &mut Context,
    panel: &PanelDataset,
    values: &[IndexValue],
    names: &[IndexName],
    table: &AdfTable,
) -> Result<Vec<UnitRootRow>> {
    let mut variables: Vec<(String, pipeline::CountrySeries)> =
        pipeline::panel_variables(panel).into_iter().map(|(n, s)| (n.to_string(), s)).collect();
    for name in names {
        let series = IndexSeries::from_values(*name, values);
        match pipeline::log_index_series(panel, &series) {
            Some(s) if !s.is_empty() => variables.push((format!("ln_{}", name.code()), s)),
            _ => ctx.warn(format!("{}: series has non-positive values or no panel overlap; not tested", name.code())),
        }
    }
    let tasks: Vec<(usize, Deterministic)> =
        (0..variables.len()).flat_map(|v| Deterministic::ALL.map(|d| (v, d))).collect();
    let results = ctx.pool.map_items(&tasks, |(v, d)| {
        let (name, series) = &variables[*v];
        pipeline::fisher_adf(name, series, *d, table)
    });
    let mut rows = Vec::with_capacity(results.len());
    for ((v, _), r) in tasks.iter().zip(results) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) if *v >= 4 => ctx.warn(format!("{}: {e}", variables[*v].0)),
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

fn write_unit_root(ctx: &mut Context, rows: &[UnitRootRow]) -> Result<()> {
    ctx.out.write("unit_root.csv", &report::unit_root_csv(rows))?;
    ctx.out.write("unit_root.txt", report::unit_root_text(rows).as_bytes())?;
    Ok(())
}

/// Per-index fits in parallel. With `all`, an index whose model cannot be
/// estimated is reported as a warning and skipped.
fn fit_all(
    ctx: &mut Context,
    panel: &PanelDataset,
    values: &[IndexValue],
    model: &ModelArgs,
    table: &AdfTable,
) -> Result<Vec<IndexFit>> {
    let names = select_indices(&model.index, values)?;
    if names.is_empty() {
        return Err(Error::Core(uoh_core::Error::Degenerate("no index series to fit".into())));
    }
    let settings = ctx.fit_settings(model);
    let results = ctx.pool.map_items(&names, |name| {
        let series = IndexSeries::from_values(*name, values);
        pipeline::fit_index(panel, &series, &settings, table)
    });
    let single = names.len() == 1 && !model.index.eq_ignore_ascii_case("all");
    let mut fits = Vec::new();
    let mut failures = Vec::new();
    for (name, r) in names.iter().zip(results) {
        match r {
            Ok(f) => fits.push(f),
            Err(e) if !single => failures.push((*name, e)),
            Err(e) => return Err(e),
        }
    }
    for (name, e) in &failures {
        ctx.warn(format!("{}: model not estimated: {e}", name.code()));
    }
    if fits.is_empty() {
        return Err(failures.into_iter().next().map(|(_, e)| e).expect("at least one index"));
    }
    for f in &fits {
        for n in &f.fit.notes {
            ctx.warn(format!("{}: {n}", f.index.code()));
        }
    }
    Ok(fits)
}

fn write_fits(ctx: &mut Context, fits: &[IndexFit]) -> Result<()> {
    ctx.out.write("coefficients.csv", &report::coefficients_csv(fits))?;
    ctx.out.write("coefficients.txt", report::coefficients_text(fits).as_bytes())?;
    ctx.out.write("diagnostics.csv", &report::diagnostics_csv(fits))?;
    ctx.out.write("fit_summary.csv", &report::fit_summary_csv(fits))?;
    ctx.out.write("long_run.csv", &report::long_run_csv(fits))?;
    ctx.out.write("long_run.txt", report::long_run_text(fits).as_bytes())?;
    Ok(())
}

fn write_effects(
    ctx: &mut Context,
    name: IndexName,
    elasticity: f64,
    values: &[IndexValue],
    observations: &[MacroObservation],
) -> Result<()> {
    let series = IndexSeries::from_values(name, values);
    if series.values.is_empty() {
        return Err(Error::Core(uoh_core::Error::Alignment(format!("no {} values", name.code()))));
    }
    let rows = pipeline::effects(&series, elasticity, &average_attendance(observations))?;
    ctx.out.write("effects.csv", &report::effects_csv(&rows))?;
    ctx.out.write("effects.txt", report::effects_text(name, elasticity, &rows).as_bytes())?;
    Ok(())
}

fn simulate(mut ctx: Context, command: &SimulateCommand) -> Result<()> {
    match command {
        SimulateCommand::League { country, teams, seasons, first_season, dispersion, relegated, table1 } => {
            let specs: Vec<(String, i32, usize)> = if *table1 {
                TABLE1_COVERAGE.iter().map(|(c, a, b)| (c.to_string(), *a, (b - a + 1) as usize)).collect()
            } else {
                vec![(country.clone(), *first_season, *seasons)]
            };
            let levels = ctx.config.level_table();
            let mut all = Vec::new();
            for (c, first, n) in specs {
                if !ctx.config.includes(&c) {
                    continue;
                }
                let mut p = LeagueParams::new(c.clone(), *teams, n);
                p.first_season = first;
                p.dispersion = *dispersion;
                p.relegated = *relegated;
                p.levels = levels.levels_for(&c, first);
                p.seed = ctx.seed;
                all.extend(simulate_league(&p)?);
            }
            ctx.out.write("leagues.csv", &io::league_csv(&all))?;
            let params = json!({
                "kind": "league", "teams": teams, "seasons": seasons, "first_season": first_season,
                "dispersion": dispersion.to_string(), "relegated": relegated, "table1": table1,
                "country": country,
            });
            ctx.finish("simulate", params)
        }
        SimulateCommand::Dgp { countries, seasons, elasticity, adjustment, rho, sigma, index, table1 } => {
            let mut p = DgpParams::balanced(*countries, *seasons);
            if *table1 {
                p.countries = TABLE1_COVERAGE.iter().map(|(c, a, b)| (c.to_string(), *a, *b)).collect();
            }
            p.countries.retain(|(c, _, _)| ctx.config.includes(c));
            p.index = parse_index(index)?;
            p.long_run[0] = *elasticity;
            p.adjustment = *adjustment;
            p.rho = *rho;
            p.sigma = *sigma;
            p.trend.resize(ctx.config.trend_degree, 0.0);
            p.seed = ctx.seed;
            let panel = simulate_dgp(&p)?;
            ctx.out.write("macro.csv", &io::macro_csv(&panel.observations))?;
            let values: Vec<IndexValue> = panel
                .index
                .values
                .iter()
                .map(|((c, s), v)| IndexValue { name: p.index, country: c.clone(), season: *s, value: *v, flagged: false })
                .collect();
            ctx.out.write("indices.csv", &io::index_csv(&values))?;
            let mut truth: Vec<Vec<String>> = p
                .coefficients()
                .into_iter()
                .map(|(t, v)| vec![t.name(p.index.code()), io::fmt_num(v)])
                .collect();
            let labels = ["long_run_cb", "long_run_pop", "long_run_rgni", "long_run_un"];
            truth.extend(labels.iter().zip(p.long_run).map(|(l, v)| vec![l.to_string(), io::fmt_num(v)]));
            let intercepts: BTreeMap<_, _> = panel.intercepts.clone();
            truth.extend(intercepts.into_iter().map(|(c, v)| vec![format!("C_{c}"), io::fmt_num(v)]));
            ctx.out.write("dgp_truth.csv", &io::csv_bytes(&["parameter", "value"], truth))?;
            let params = json!({
                "kind": "dgp", "countries": countries, "seasons": seasons, "elasticity": elasticity,
                "adjustment": adjustment, "rho": rho, "sigma": sigma, "index": p.index.code(), "table1": table1,
            });
            ctx.finish("simulate", params)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn value(name: IndexName) -> IndexValue {
        IndexValue { name, country: "A".into(), season: 2000, value: 0.5, flagged: false }
    }

    #[test]
    fn selection_keeps_canonical_order() {
        let values = [value(IndexName::SdcKI), value(IndexName::Namsi)];
        assert_eq!(select_indices("all", &values).unwrap(), vec![IndexName::Namsi, IndexName::SdcKI]);
        assert_eq!(select_indices("g", &values).unwrap(), vec![IndexName::G]);
        assert_eq!(select_indices("bogus", &values).unwrap_err().exit_code(), 4);
    }

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
