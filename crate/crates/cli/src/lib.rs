//! `ctmc`: classify, simulate and cross-check one-dimensional chains from
//! model files, and regenerate the worked experiments.
//!
//! Every output begins with the full run configuration (a `# config` line in
//! CSV files, a `config` field in JSON), so a file together with its seed is
//! enough to regenerate it byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctmc_core::analysis::{hp, indices, j, moments, LaurentIndices};
use ctmc_core::bd_oracle::{bd_classify, bd_positive_recurrence, karlin_recurrence, BirthDeathModel};
use ctmc_core::classifier::{
    classify_model, haldane_table, mm_table, EnzymePair, Recurrence, TableVerdict, Verdict,
};
use ctmc_core::master_eq::{stationary_truncated, Distribution};
use ctmc_core::model::{bd_network, haldane_rate, mm_rate, model_from_json, model_to_json, CtmcModel, JumpRate};
use ctmc_core::rates::{int, Rational};
use ctmc_core::reduction::{compare_moments, example_network, reduce, NetworkFile};
use ctmc_core::ssa::{ensemble, tv_decay, uniform_grid, DEFAULT_JUMP_CAP};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_UNRESOLVED: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug, Serialize)]
#[command(name = "ctmc", version, about = "Long-term behaviour of one-dimensional CTMCs with rational rates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Seed for every random stream; recorded in all outputs.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write results into this directory instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 when any verdict is unresolved.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Explosivity, recurrence and ergodicity verdict with provenance.
    Classify { model: PathBuf },
    /// Drift, variance, H1 and J on a geometric grid of states.
    Analyze {
        model: PathBuf,
        #[arg(long, default_value_t = 1 << 20)]
        x_max: u64,
    },
    /// Ensemble mean and variance over time.
    Simulate {
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        x0: u64,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[arg(long, default_value_t = 0.5)]
        dt: f64,
        #[arg(long, default_value_t = 1000)]
        n_traj: usize,
        #[arg(long, default_value_t = DEFAULT_JUMP_CAP)]
        jump_cap: u64,
    },
    /// Stationary law of the chain truncated to `0..=N`.
    Stationary {
        model: PathBuf,
        #[arg(long, default_value_t = 200)]
        truncation: u64,
    },
    /// Total-variation distance to the limit law from several initial states.
    Tvdecay {
        model: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [2u64, 5, 10])]
        x0: Vec<u64>,
        #[arg(long, default_value_t = 100.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
        #[arg(long, default_value_t = 50_000)]
        n_traj: usize,
        #[arg(long, default_value_t = 400)]
        truncation: u64,
    },
    /// Independent classical criteria.
    Oracle {
        #[command(subcommand)]
        which: OracleKind,
    },
    /// Quasi-steady-state reduction of a fast/slow two-species network.
    Reduce { network: PathBuf },
    /// Regenerate the worked experiments.
    Reproduce {
        #[arg(long, value_enum)]
        figure: Experiment,
        #[arg(long)]
        n_traj: Option<usize>,
        #[arg(long)]
        t_end: Option<f64>,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "oracle", rename_all = "lowercase")]
pub enum OracleKind {
    /// Karlin-McGregor series tests for a unit birth-death model.
    Bd { model: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
    Tables,
}

#[derive(Debug)]
pub enum CliError {
    Validation(ctmc_core::Error),
    Io(String),
}

impl From<ctmc_core::Error> for CliError {
    fn from(e: ctmc_core::Error) -> Self {
        Self::Validation(e)
    }
}

type CliResult<T> = Result<T, CliError>;

/// Exit status for a set of verdicts.
pub fn verdict_status<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>, strict: bool) -> i32 {
    if strict && verdicts.into_iter().any(Verdict::is_unresolved) {
        EXIT_UNRESOLVED
    } else {
        EXIT_OK
    }
}

struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    fn emit(&self, name: &str, body: &str) -> CliResult<()> {
        match &self.out {
            None => {
                print!("{body}");
                Ok(())
            }
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
                let path = dir.join(name);
                fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
            }
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> CliResult<CtmcModel> {
    let m = model_from_json(&read(path)?)?;
    let report = m.validate()?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(m)
}

fn csv(config: &str, header: &str, rows: &[String]) -> String {
    let mut s = format!("# config {config}\n{header}\n");
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("outputs always serialize");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Classified<'a, C: Serialize> {
    config: &'a C,
    indices: LaurentIndices,
    verdict: Verdict,
}

fn limit_law(m: &CtmcModel, truncation: u64) -> CliResult<Distribution> {
    // A chain with no way out of 0 is eventually absorbed there.
    if m.rates_at_f64(0).iter().all(|r| *r == 0.0) {
        return Ok(Distribution::point(0));
    }
    let s = stationary_truncated(m, truncation)?;
    for w in &s.warnings {
        eprintln!("warning: {w}");
    }
    Ok(s.distribution)
}

fn enzyme_model(
    rate: fn(u32, &Rational, &Rational, i64) -> ctmc_core::Result<JumpRate>,
    p: &EnzymePair,
) -> ctmc_core::Result<CtmcModel> {
    bd_network(
        rate(p.n1, &p.v1, &p.k1, -(p.c1 as i64))?,
        rate(p.n2, &p.v2, &p.k2, p.c2 as i64)?,
    )
}

fn pair(vk: [i64; 4], nc: [u32; 4]) -> EnzymePair {
    let [v1, k1, v2, k2] = vk.map(int);
    let [n1, c1, n2, c2] = nc;
    EnzymePair { v1, k1, v2, k2, n1, c1, n2, c2 }
}

/// The two Michaelis-Menten models whose TV decay is compared.
pub fn figure1_models() -> ctmc_core::Result<[(char, CtmcModel); 2]> {
    Ok([
        ('a', enzyme_model(mm_rate, &pair([1, 1, 1, 1], [3, 2, 2, 1]))?),
        ('b', enzyme_model(mm_rate, &pair([3, 1, 2, 3], [4, 2, 1, 1]))?),
    ])
}

fn run_command(cli: &Cli) -> CliResult<i32> {
    let config = serde_json::to_string(cli).expect("config serializes");
    let sink = Sink { out: cli.common.out.clone() };
    let seed = cli.common.seed;
    match &cli.command {
        Command::Classify { model } => {
            let m = load_model(model)?;
            let verdict = classify_model(&m)?;
            let status = verdict_status([&verdict], cli.common.strict);
            let body = Classified { config: cli, indices: indices(&m)?, verdict };
            sink.emit("verdict.json", &json(&body))?;
            Ok(status)
        }
        Command::Analyze { model, x_max } => {
            let m = load_model(model)?;
            let mf = moments(&m);
            let ix = indices(&m)?;
            let mut rows = Vec::new();
            let mut x = 1u64;
            while x <= *x_max {
                let h1 = hp(&m, 1.0, x).map(|v| v.to_string()).unwrap_or_else(|_| "nan".into());
                let jv = j(&m, x).map(|v| v.to_string()).unwrap_or_else(|_| "nan".into());
                rows.push(format!(
                    "{x},{},{},{h1},{jv}",
                    ctmc_core::rates::to_f64(&mf.m_at(x)),
                    ctmc_core::rates::to_f64(&mf.v_at(x))
                ));
                x = x.saturating_mul(2);
            }
            let head = format!("{config} indices {}", serde_json::to_string(&ix).expect("indices serialize"));
            sink.emit("analysis.csv", &csv(&head, "x,drift,variance,h1,j", &rows))?;
            Ok(EXIT_OK)
        }
        Command::Simulate { model, x0, t_end, dt, n_traj, jump_cap } => {
            let m = load_model(model)?;
            let times = uniform_grid(*t_end, *dt);
            let s = ensemble(&m, *x0, &times, *n_traj, seed, *jump_cap)?;
            if s.excluded > 0 {
                eprintln!("warning: {} of {} runs hit the jump cap and were excluded", s.excluded, s.n_traj);
            }
            let rows: Vec<String> = (0..times.len())
                .map(|k| format!("{},{},{}", times[k], s.mean[k], s.variance[k]))
                .collect();
            sink.emit("simulation.csv", &csv(&config, "t,mean,variance", &rows))?;
            Ok(EXIT_OK)
        }
        Command::Stationary { model, truncation } => {
            let m = load_model(model)?;
            let s = stationary_truncated(&m, *truncation)?;
            for w in &s.warnings {
                eprintln!("warning: {w}");
            }
            let rows: Vec<String> = s.distribution.mass.iter().enumerate().map(|(x, p)| format!("{x},{p}")).collect();
            let head = format!("{config} boundary_mass {} residual {}", s.boundary_mass, s.residual);
            sink.emit("stationary.csv", &csv(&head, "x,pi", &rows))?;
            Ok(EXIT_OK)
        }
        Command::Tvdecay { model, x0, t_end, dt, n_traj, truncation } => {
            let m = load_model(model)?;
            let reference = limit_law(&m, *truncation)?;
            let d = tv_decay(&m, x0, &uniform_grid(*t_end, *dt), *n_traj, &reference, seed)?;
            let rows: Vec<String> = d.rows.iter().map(|r| format!("{},{},{},{}", r.x0, r.t, r.tv, r.log_tv)).collect();
            let head = format!("{config} noise_floor {}", d.noise_floor);
            sink.emit("tvdecay.csv", &csv(&head, "x0,t,tv,log_tv", &rows))?;
            #[derive(Serialize)]
            struct Fits<'a, C: Serialize> {
                config: &'a C,
                noise_floor: f64,
                fits: &'a [ctmc_core::ssa::SlopeFit],
                relative_spread: Option<f64>,
            }
            let fits = Fits { config: cli, noise_floor: d.noise_floor, fits: &d.fits, relative_spread: d.relative_spread };
            sink.emit("tvdecay_fits.json", &json(&fits))?;
            Ok(EXIT_OK)
        }
        Command::Oracle { which: OracleKind::Bd { model } } => {
            let m = load_model(model)?;
            let bd = BirthDeathModel::from_model(&m)?;
            let verdict = classify_model(&m)?;
            #[derive(Serialize)]
            struct OracleOut<'a, C: Serialize> {
                config: &'a C,
                recurrence: ctmc_core::bd_oracle::RecurrenceOracle,
                positivity: ctmc_core::bd_oracle::PositivityOracle,
                oracle: ctmc_core::bd_oracle::BdVerdict,
                classifier: Recurrence,
            }
            let out = OracleOut {
                config: cli,
                recurrence: karlin_recurrence(&bd)?,
                positivity: bd_positive_recurrence(&bd)?,
                oracle: bd_classify(&bd)?,
                classifier: verdict.recurrence,
            };
            sink.emit("oracle.json", &json(&out))?;
            Ok(EXIT_OK)
        }
        Command::Reduce { network } => {
            let (net, q) = NetworkFile::parse(&read(network)?)?;
            let m = reduce(&net, &q)?;
            let verdict = classify_model(&m)?;
            let status = verdict_status([&verdict], cli.common.strict);
            sink.emit("reduced.json", &format!("{}\n", model_to_json(&m)))?;
            let body = Classified { config: cli, indices: indices(&m)?, verdict };
            if cli.common.out.is_some() {
                sink.emit("reduced_verdict.json", &json(&body))?;
            }
            Ok(status)
        }
        Command::Reproduce { figure, n_traj, t_end } => match figure {
            Experiment::One => {
                let n = n_traj.unwrap_or(50_000);
                let times = uniform_grid(t_end.unwrap_or(100.0), 1.0);
                let mut rows = Vec::new();
                let mut fits = Vec::new();
                for (i, (panel, m)) in figure1_models()?.iter().enumerate() {
                    let reference = limit_law(m, 400)?;
                    let d = tv_decay(m, &[2, 5, 10], &times, n, &reference, seed.wrapping_add(100 * i as u64))?;
                    rows.extend(d.rows.iter().map(|r| format!("{panel},{},{},{}", r.x0, r.t, r.log_tv)));
                    fits.push(serde_json::json!({
                        "panel": panel.to_string(),
                        "verdict": classify_model(m)?,
                        "fits": d.fits,
                        "noise_floor": d.noise_floor,
                        "relative_spread": d.relative_spread,
                    }));
                }
                sink.emit("figure1.csv", &csv(&config, "panel,x0,t,log_tv", &rows))?;
                sink.emit("figure1_fits.json", &json(&serde_json::json!({ "config": cli, "panels": fits })))?;
                Ok(EXIT_OK)
            }
            Experiment::Two => {
                let n = n_traj.unwrap_or(10_000);
                let end = t_end.unwrap_or(4.0);
                let (net, q) = example_network(int(100), int(1000))?;
                let m = reduce(&net, &q)?;
                let times: Vec<f64> = uniform_grid(end, 0.5).into_iter().skip(1).collect();
                let c = compare_moments(&net, &m, (1, 1000), &times, n, seed)?;
                let rows: Vec<String> = c
                    .rows
                    .iter()
                    .map(|r| format!("{},{},{},{},{}", r.t, r.mean_full, r.mean_reduced, r.var_full, r.var_reduced))
                    .collect();
                let head = format!("{config} max_rel_mean {} max_rel_var {}", c.max_rel_mean, c.max_rel_var);
                sink.emit("figure2.csv", &csv(&head, "t,mean_full,mean_reduced,var_full,var_reduced", &rows))?;
                Ok(EXIT_OK)
            }
            Experiment::Tables => reproduce_tables(cli, &config, &sink),
        },
    }
}

fn reproduce_tables(cli: &Cli, config: &str, sink: &Sink) -> CliResult<i32> {
    type Rate = fn(u32, &Rational, &Rational, i64) -> ctmc_core::Result<JumpRate>;
    type Table = fn(&EnzymePair) -> TableVerdict;
    let cases: [(&str, Rate, Table, [i64; 4], [u32; 4]); 4] = [
        ("michaelis_menten", mm_rate, mm_table, [1, 1, 1, 1], [3, 2, 2, 1]),
        ("michaelis_menten", mm_rate, mm_table, [3, 1, 2, 3], [4, 2, 1, 1]),
        ("haldane", haldane_rate, haldane_table, [16, 1, 1, 4], [1, 1, 1, 1]),
        ("haldane", haldane_rate, haldane_table, [1, 2, 4, 1], [1, 1, 1, 1]),
    ];
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    let mut all = Vec::new();
    for (name, rate, table, vk, nc) in cases {
        let p = pair(vk, nc);
        let m = enzyme_model(rate, &p)?;
        let v = classify_model(&m)?;
        let got = TableVerdict::of(&v).map(|t| format!("{t:?}")).unwrap_or_else(|| "Unresolved".into());
        let [v1, k1, v2, k2] = vk;
        let [n1, c1, n2, c2] = nc;
        rows.push(format!("{name},{v1},{k1},{v2},{k2},{n1},{c1},{n2},{c2},{:?},{got}", table(&p)));
        verdicts.push(serde_json::json!({
            "table": name,
            "V1_K1_V2_K2": vk,
            "n1_c1_n2_c2": nc,
            "indices": indices(&m)?,
            "verdict": &v,
        }));
        all.push(v);
    }
    let status = verdict_status(&all, cli.common.strict);
    sink.emit("tables.csv", &csv(config, "table,V1,K1,V2,K2,n1,c1,n2,c2,closed_form,classifier", &rows))?;
    sink.emit("tables.json", &json(&serde_json::json!({ "config": cli, "cases": verdicts })))?;
    Ok(status)
}

/// Parse `argv` (including the program name) and run; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match run_command(&cli) {
        Ok(code) => code,
        Err(CliError::Validation(e)) => {
            eprintln!("error: {e}");
            EXIT_VALIDATION
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
