use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use treespin_core::census::{self, CensusOptions, DEFAULT_BUDGET};
use treespin_core::dot::export_dot;
use treespin_core::io::{parse_coupling, ColoringFile, ConfigFile, SpecFile};
use treespin_core::{
    ball, build_a_sets, gamma_check, generalize_a_sets, hamiltonian, interior_ball_family,
    is_ground_state, periodic_config, CosetLabel, CouplingSign, ModelParams, SpinConfiguration,
    SubgroupSpec, TreeParams, Word,
};

const EXIT_OK: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_FAILED: u8 = 2;
const EXIT_FORMULA: u8 = 3;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "treespin",
    version,
    about = "Ground states of the generalized Potts model on Cayley trees"
)]
struct Cli {
    /// Write the main JSON (or DOT) document here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Largest search space a census may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    #[serde(serialize_with = "as_string")]
    budget: u128,

    /// Census worker threads; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Build a parity subgroup spec and run the unit-ball label check.
    Subgroup(SubgroupArgs),
    /// Verify a configuration against the per-ball ground-state condition.
    Check(CheckArgs),
    /// Exhaustive or periodic ground-state census.
    Census(CensusArgs),
    /// Export V_n as a DOT graph colored by spin.
    Export(ExportArgs),
    /// List the words in a ball.
    Ball(BallArgs),
    /// Evaluate the Hamiltonian of a configuration.
    Energy(EnergyArgs),
}

#[derive(Debug, Args, Serialize)]
struct SubgroupArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    m: u32,
    /// Comma-separated generator vectors, e.g. 100,010,001,111.
    #[arg(long, value_delimiter = ',')]
    vectors: Option<Vec<String>>,
    /// Radius of the region scanned by the label check.
    #[arg(long, default_value_t = 4)]
    radius: usize,
}

/// A configuration given directly, or built from a spec and a coset coloring.
#[derive(Debug, Args, Serialize)]
struct ConfigSource {
    /// Spin configuration JSON.
    #[arg(long, conflicts_with_all = ["spec", "coloring"])]
    config: Option<PathBuf>,
    /// Subgroup spec JSON (with --coloring).
    #[arg(long, requires = "coloring")]
    spec: Option<PathBuf>,
    /// Coset coloring JSON (with --spec).
    #[arg(long, requires = "spec")]
    coloring: Option<PathBuf>,
    /// Spin count for spec/coloring input.
    #[arg(long)]
    q: Option<u32>,
    /// Interaction range for spec/coloring input.
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// Volume radius; overrides the config file's value.
    #[arg(long)]
    n: Option<usize>,
    /// Coupling as a rational string; overrides the config file's value.
    #[arg(long = "J", allow_hyphen_values = true)]
    j: Option<String>,
}

#[derive(Debug, Args, Serialize)]
struct CheckArgs {
    #[command(flatten)]
    source: ConfigSource,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CensusKind {
    Exhaustive,
    Periodic,
}

#[derive(Debug, Args, Serialize)]
struct CensusArgs {
    #[arg(value_enum)]
    mode: CensusKind,
    #[arg(long)]
    k: Option<u32>,
    /// Number of parity constraints (periodic mode without --spec).
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, default_value_t = 2)]
    r: u32,
    #[arg(long)]
    q: u32,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long = "J", allow_hyphen_values = true)]
    j: String,
    /// Subgroup spec JSON (periodic mode).
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ExportArgs {
    #[command(flatten)]
    source: ConfigSource,
}

#[derive(Debug, Args, Serialize)]
struct BallArgs {
    #[arg(long)]
    k: u32,
    /// Center word, e.g. "1 2" or "e".
    #[arg(long, default_value = "e")]
    center: String,
    #[arg(long)]
    radius: usize,
}

#[derive(Debug, Args, Serialize)]
struct EnergyArgs {
    #[command(flatten)]
    source: ConfigSource,
}

#[derive(Debug, Serialize)]
struct RunManifest<'a> {
    subcommand: &'static str,
    parameters: &'a Cli,
    inputs: Vec<String>,
    output: Option<String>,
    deterministic: bool,
}

#[derive(Debug, Serialize)]
struct Envelope<'a, T: Serialize> {
    manifest: RunManifest<'a>,
    result: T,
}

fn as_string<S: serde::Serializer>(v: &u128, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}").context("writing stdout")
        }
    }
}

impl Cli {
    fn subcommand(&self) -> &'static str {
        match self.command {
            Command::Subgroup(_) => "subgroup",
            Command::Check(_) => "check",
            Command::Census(_) => "census",
            Command::Export(_) => "export",
            Command::Ball(_) => "ball",
            Command::Energy(_) => "energy",
        }
    }

    fn inputs(&self) -> Vec<String> {
        let paths: Vec<&PathBuf> = match &self.command {
            Command::Check(CheckArgs { source })
            | Command::Export(ExportArgs { source })
            | Command::Energy(EnergyArgs { source }) => {
                [&source.config, &source.spec, &source.coloring]
                    .into_iter()
                    .flatten()
                    .collect()
            }
            Command::Census(c) => c.spec.iter().collect(),
            _ => Vec::new(),
        };
        paths.into_iter().map(|p| p.display().to_string()).collect()
    }

    fn emit<T: Serialize>(&self, result: T) -> Result<()> {
        let envelope = Envelope {
            manifest: RunManifest {
                subcommand: self.subcommand(),
                parameters: self,
                inputs: self.inputs(),
                output: self.output.as_ref().map(|p| p.display().to_string()),
                deterministic: true,
            },
            result,
        };
        write_output(
            self.output.as_deref(),
            &serde_json::to_string_pretty(&envelope)?,
        )
    }

    fn options(&self) -> Result<CensusOptions> {
        if self.workers == 0 {
            bail!("--workers must be at least 1");
        }
        Ok(CensusOptions::default()
            .with_budget(self.budget)
            .with_workers(self.workers))
    }
}

struct LoadedConfig {
    params: ModelParams,
    n: usize,
    config: SpinConfiguration,
}

impl ConfigSource {
    fn load(&self) -> Result<LoadedConfig> {
        if let Some(path) = &self.config {
            let file: ConfigFile = read_json(path)?;
            if let Some(q) = self.q {
                if q != file.q {
                    bail!(
                        "--q {q} disagrees with q = {} in {}",
                        file.q,
                        path.display()
                    );
                }
            }
            let j = match &self.j {
                Some(j) => parse_coupling(j)?,
                None => parse_coupling(&file.j)?,
            };
            let params = ModelParams::new(file.k, file.r, file.q, j)?;
            return Ok(LoadedConfig {
                params,
                n: self.n.unwrap_or(file.n),
                config: file.configuration()?,
            });
        }
        let (Some(spec_path), Some(coloring_path)) = (&self.spec, &self.coloring) else {
            bail!("give either --config or both --spec and --coloring");
        };
        let spec = read_json::<SpecFile>(spec_path)?.spec()?;
        let coloring = read_json::<ColoringFile>(coloring_path)?.coloring()?;
        let Some(q) = self.q else {
            bail!("--q is required with --spec/--coloring")
        };
        let Some(n) = self.n else {
            bail!("--n is required with --spec/--coloring")
        };
        let Some(j) = &self.j else {
            bail!("--J is required with --spec/--coloring")
        };
        let j = parse_coupling(j)?;
        let params = ModelParams::new(spec.k(), self.r, q, j)?;
        let config = periodic_config(&coloring, &spec, n, q)?;
        Ok(LoadedConfig { params, n, config })
    }
}

#[derive(Serialize)]
struct SubgroupReport {
    spec: SpecFile,
    construction: &'static str,
    generator_vectors: Vec<String>,
    valid: bool,
    full_index: bool,
    rank: u32,
    index: String,
    gamma: treespin_core::periodic_subgroups::GammaReport,
}

fn run_subgroup(cli: &Cli, args: &SubgroupArgs) -> Result<u8> {
    let literal = match args.vectors {
        None => build_a_sets(args.k, args.m).ok(),
        Some(_) => None,
    };
    let (spec, construction) = if let Some(spec) = literal {
        (spec, "literal")
    } else {
        let vectors = args
            .vectors
            .as_ref()
            .map(|vs| {
                vs.iter()
                    .map(|v| CosetLabel::parse(v))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        (
            generalize_a_sets(args.k, args.m, vectors.as_deref())?,
            "generalized",
        )
    };
    let gamma = gamma_check(&spec, args.radius);
    let report = SubgroupReport {
        spec: SpecFile::from(&spec),
        construction,
        generator_vectors: spec
            .generator_vectors()
            .iter()
            .map(|v| v.to_string())
            .collect(),
        valid: spec.is_valid(),
        full_index: spec.is_full_index(),
        rank: spec.rank(),
        index: (1u128 << spec.rank()).to_string(),
        gamma,
    };
    let ok = report.valid && report.gamma.pass;
    if let Some(path) = &cli.output {
        fs::write(path, serde_json::to_string_pretty(&report.spec)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let envelope = Envelope {
        manifest: RunManifest {
            subcommand: "subgroup",
            parameters: cli,
            inputs: Vec::new(),
            output: cli.output.as_ref().map(|p| p.display().to_string()),
            deterministic: true,
        },
        result: report,
    };
    write_output(None, &serde_json::to_string_pretty(&envelope)?)?;
    Ok(if ok { EXIT_OK } else { EXIT_ERROR })
}

#[derive(Serialize)]
struct CheckReport {
    pass: bool,
    n: usize,
    balls: usize,
    failing: usize,
    reports: Vec<treespin_core::spin_config::BallReport>,
}

fn run_check(cli: &Cli, args: &CheckArgs) -> Result<u8> {
    let loaded = args.source.load()?;
    let report = is_ground_state(&loaded.config, &loaded.params, loaded.n)?;
    let failing = report.reports.iter().filter(|r| !r.pass).count();
    let pass = report.pass;
    cli.emit(CheckReport {
        pass,
        n: loaded.n,
        balls: report.reports.len(),
        failing,
        reports: report.reports,
    })?;
    Ok(if pass { EXIT_OK } else { EXIT_FAILED })
}

fn census_spec(args: &CensusArgs) -> Result<SubgroupSpec> {
    if let Some(path) = &args.spec {
        return Ok(read_json::<SpecFile>(path)?.spec()?);
    }
    let (Some(k), Some(m)) = (args.k, args.m) else {
        bail!("periodic census needs --spec or both --k and --m");
    };
    match build_a_sets(k, m) {
        Ok(spec) => Ok(spec),
        Err(_) => Ok(generalize_a_sets(k, m, None)?),
    }
}

fn run_census(cli: &Cli, args: &CensusArgs) -> Result<u8> {
    let options = cli.options()?;
    let j = parse_coupling(&args.j)?;
    let result = match args.mode {
        CensusKind::Exhaustive => {
            let Some(k) = args.k else {
                bail!("--k is required for an exhaustive census")
            };
            let Some(n) = args.n else {
                bail!("--n is required for an exhaustive census")
            };
            let params = ModelParams::new(k, args.r, args.q, j)?;
            census::exhaustive_min_energy(&params, n, &options)?
        }
        CensusKind::Periodic => {
            if args.r != 2 {
                bail!("periodic census is defined for r = 2 only");
            }
            let spec = census_spec(args)?;
            census::count_periodic_ground_states(&spec, args.q, CouplingSign::of(&j)?, &options)?
        }
    };
    let code = if !result.oracles_agree() {
        EXIT_FAILED
    } else if !result.formula_agrees() {
        EXIT_FORMULA
    } else {
        EXIT_OK
    };
    cli.emit(result)?;
    Ok(code)
}

fn run_export(cli: &Cli, args: &ExportArgs) -> Result<u8> {
    let loaded = args.source.load()?;
    write_output(
        cli.output.as_deref(),
        &export_dot(&loaded.config, loaded.n)?,
    )?;
    Ok(EXIT_OK)
}

fn run_ball(cli: &Cli, args: &BallArgs) -> Result<u8> {
    let tree = TreeParams::new(args.k)?;
    let center = Word::parse(&args.center, tree)?;
    let words = ball(&center, args.radius);
    cli.emit(words)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EnergyReport {
    energy: String,
    n: usize,
    balls: usize,
}

fn run_energy(cli: &Cli, args: &EnergyArgs) -> Result<u8> {
    let loaded = args.source.load()?;
    let energy = hamiltonian(&loaded.config, &loaded.params, loaded.n)?;
    cli.emit(EnergyReport {
        energy: energy.to_string(),
        n: loaded.n,
        balls: interior_ball_family(loaded.n, &loaded.params).balls.len(),
    })?;
    Ok(EXIT_OK)
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Subgroup(a) => run_subgroup(cli, a),
        Command::Check(a) => run_check(cli, a),
        Command::Census(a) => run_census(cli, a),
        Command::Export(a) => run_export(cli, a),
        Command::Ball(a) => run_ball(cli, a),
        Command::Energy(a) => run_energy(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
