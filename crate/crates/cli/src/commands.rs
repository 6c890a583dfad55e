use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use log::{info, warn};

use mwrc::export::{format_sig, write_batches, write_phase, write_regions};
use mwrc::field::Field;
use mwrc::regions::{
    binary_capacity_region, cdf_region, common_rate_capacity, fdf_separate_region, phase_diagram, DEFAULT_BETA_STEPS,
};
use mwrc::selfcheck::{default_fields, run_selfcheck, FieldSpec};
use mwrc::sim::{run_batch, CdfScheme, FdfScheme, MwrcConfig, Scheme};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::Cli;

#[derive(Debug, Args)]
pub struct RegionArgs {
    /// Relay crossover probability.
    #[arg(long, default_value_t = 0.1)]
    pub rho0: f64,
    /// Crossover probability at user 1.
    #[arg(long, default_value_t = 0.05)]
    pub rho1: f64,
    /// Crossover probability at user 2.
    #[arg(long, default_value_t = 0.2)]
    pub rho2: f64,
    /// Points of the superposition-parameter grid.
    #[arg(long, default_value_t = DEFAULT_BETA_STEPS)]
    pub beta_steps: usize,
    /// Take the crossovers from the channel of an experiment file instead.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long, default_value_t = 0.25)]
    pub rho0: f64,
    /// Points per axis of the (ρ₁, ρ₂) grid over [0, 1/2].
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Experiment file (TOML).
    pub config: PathBuf,
    /// Replaces the trial count of the file.
    #[arg(long)]
    pub trials: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CommonRateArgs {
    /// Experiment file whose channel is used.
    #[arg(long, conflicts_with_all = ["crossover", "field"])]
    pub config: Option<PathBuf>,
    /// Binary channel: crossovers of the relay and then every user.
    #[arg(long, value_delimiter = ',')]
    pub crossover: Option<Vec<f64>>,
    /// Noiseless channel over this field, e.g. `3` or `2^2`.
    #[arg(long, requires = "users", conflicts_with = "crossover")]
    pub field: Option<String>,
    /// Number of users of the noiseless channel.
    #[arg(long)]
    pub users: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SelfcheckArgs {
    /// Fields to check, separated by `;`. Each is `p`, `p^z`, or
    /// `p^z:c0,c1,…,cz` with an explicit modulus. Defaults to 2;3;2^2;5;2^3.
    #[arg(long)]
    pub fields: Option<String>,
}

fn write_output(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let io = |path: &Path, source| CliError::Io { path: path.display().to_string(), source };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| io(&path, e))?;
    info!("wrote {}", path.display());
    Ok(path)
}

fn read_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    ExperimentConfig::parse(&text)
}

/// Writes `region_capacity.csv`, `region_fdf_separate.csv` and `region_cdf.csv`.
pub fn region(args: &RegionArgs, cli: &Cli) -> Result<(), CliError> {
    let (r0, r1, r2) = match &args.config {
        Some(p) => read_config(p)?.channel.binary_two_user()?,
        None => (args.rho0, args.rho1, args.rho2),
    };
    let capacity = binary_capacity_region(r0, r1, r2)?;
    let fdf = fdf_separate_region(r0, r1, r2, args.beta_steps)?;
    let cdf = cdf_region(r0, r1, r2)?;
    for region in [&capacity, &fdf, &cdf] {
        let mut buf = Vec::new();
        write_regions(&mut buf, &[region])?;
        let name = format!("region_{}.csv", region.name().replace('-', "_"));
        let path = write_output(&cli.out, &name, &buf)?;
        println!("{}", path.display());
    }
    Ok(())
}

/// Writes `phase.csv`.
pub fn phase(args: &PhaseArgs, cli: &Cli) -> Result<(), CliError> {
    let cells = phase_diagram(args.rho0, args.grid)?;
    let mut buf = Vec::new();
    write_phase(&mut buf, &cells)?;
    let path = write_output(&cli.out, "phase.csv", &buf)?;
    println!("{}", path.display());
    Ok(())
}

/// Runs one batch per blocklength and writes one row per batch. Every
/// blocklength is checked against the decoding budget before any trial runs.
pub fn simulate(args: &SimulateArgs, cli: &Cli) -> Result<(), CliError> {
    let cfg = read_config(&args.config)?;
    let scheme = cfg.scheme()?;
    let channel = cfg.channel.build()?;
    let rates = cfg.rates()?;
    let decoder = cfg.decoder()?;
    let trials = args.trials.unwrap_or(cfg.trials);
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    for &n in &cfg.n_list {
        let context = format!("{scheme} at n = {n}");
        match scheme {
            Scheme::Fdf => FdfScheme::new(&channel, &rates, n, &decoder).map(drop),
            Scheme::Cdf => CdfScheme::new(&channel, &rates, n, &decoder).map(drop),
        }
        .map_err(|e| CliError::from_sim(e, &context))?;
    }
    let mut batches = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let b = run_batch(scheme, &channel, &rates, n, trials, seed, &decoder)
            .map_err(|e| CliError::from_sim(e, &format!("{scheme} at n = {n}")))?;
        info!("{scheme} n={n}: {} errors in {} trials", b.errors, b.trials);
        batches.push(b);
    }
    let mut buf = Vec::new();
    write_batches(&mut buf, &batches)?;
    let name = cfg.output.as_deref().unwrap_or("simulate.csv");
    let path = write_output(&cli.out, name, &buf)?;
    println!("{}", path.display());
    Ok(())
}

/// Parses `p`, `p^z` or `p^z:c0,…,cz`.
pub fn parse_field_spec(text: &str) -> Result<FieldSpec, CliError> {
    let bad = || CliError::Argument(format!("cannot parse field {text:?}"));
    let (order, modulus) = match text.trim().split_once(':') {
        Some((o, m)) => {
            let coeffs = m.split(',').map(|c| c.trim().parse::<u32>()).collect::<Result<Vec<_>, _>>();
            (o, Some(coeffs.map_err(|_| bad())?))
        }
        None => (text.trim(), None),
    };
    let (p, z) = match order.split_once('^') {
        Some((p, z)) => (p.trim().parse().map_err(|_| bad())?, z.trim().parse().map_err(|_| bad())?),
        None => (order.parse().map_err(|_| bad())?, 1),
    };
    Ok(FieldSpec { characteristic: p, degree: z, modulus })
}

/// Prints the common-rate capacity and writes `common_rate.csv`.
pub fn common_rate(args: &CommonRateArgs, cli: &Cli) -> Result<(), CliError> {
    let channel = if let Some(p) = &args.config {
        read_config(p)?.channel.build()?
    } else if let Some(rho) = &args.crossover {
        MwrcConfig::binary(rho).map_err(|e| CliError::Argument(e.to_string()))?
    } else if let (Some(f), Some(users)) = (&args.field, args.users) {
        let field: Field = parse_field_spec(f)?.build().map_err(|e| CliError::Argument(e.to_string()))?;
        MwrcConfig::noiseless(&field, users).map_err(|e| CliError::Argument(e.to_string()))?
    } else {
        return Err(CliError::Argument("give --config, --crossover, or --field with --users".to_string()));
    };
    let c = common_rate_capacity(&channel);
    println!("{}", format_sig(c));
    let csv = format!("L,field,common_rate\n{},{},{}\n", channel.num_users(), channel.field(), format_sig(c));
    write_output(&cli.out, "common_rate.csv", csv.as_bytes())?;
    Ok(())
}

/// Prints one line per suite; fails if any suite does.
pub fn selfcheck(args: &SelfcheckArgs, cli: &Cli) -> Result<(), CliError> {
    let fields = match &args.fields {
        None => default_fields(),
        Some(list) => {
            list.split(';').filter(|s| !s.trim().is_empty()).map(parse_field_spec).collect::<Result<Vec<_>, _>>()?
        }
    };
    let report = run_selfcheck(&fields, cli.seed.unwrap_or(0));
    for w in &report.warnings {
        warn!("{w}");
    }
    for s in &report.suites {
        let status = if s.ok() { "PASS" } else { "FAIL" };
        println!("{status} {} ({}/{})", s.name, s.passed, s.total);
        if let Some(c) = &s.counterexample {
            println!("     counterexample: {c}");
        }
    }
    let passed = report.suites.iter().filter(|s| s.ok()).count();
    println!("{passed}/{} suites passed", report.suites.len());
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::SelfCheckFailed)
    }
}
