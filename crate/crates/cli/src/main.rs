//! `cloudburst` command-line tool.
//!
//! Exit status: 0 success, 1 usage or input error, 2 no feasible placement,
//! 3 I/O error, 4 model-domain error.

mod args;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::Parser;

use args::{AdviseArgs, Cli, Command, FitCostArgs, FitProfileArgs, LogAppendArgs, RefitArgs, SensitivityArgs, SweepArgs};
use cloudburst::advisor::{advise, AdviceRequest, Environment, Policy, RecommendationDoc};
use cloudburst::assets::MemoryConfig;
use cloudburst::cost::{fit_alpha, CostModel};
use cloudburst::formats::{read_observations, read_price_table, ProfileDoc};
use cloudburst::logstore::{parse_timestamp, ExecutionRecord, LogStore};
use cloudburst::profile::{fit_profile_in, TimeUnit};
use cloudburst::sweep::{
    aggregate_by_ratio, crossover_ratio, run_sensitivity, run_sweep, sensitivity_table, write_sensitivity,
    write_sweep, Decider, ModelSetup, SweepConfig, DEFAULT_ERRORS,
};

const EXIT_USAGE: u8 = 1;
const EXIT_NONE_FEASIBLE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_MODEL: u8 = 4;

#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

enum Status {
    Done,
    NoneFeasible,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return EXIT_USAGE;
    }
    if let Some(e) = err.downcast_ref::<cloudburst::Error>() {
        return if e.is_io() {
            EXIT_IO
        } else if e.is_model_domain() {
            EXIT_MODEL
        } else {
            EXIT_USAGE
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return EXIT_IO;
    }
    EXIT_USAGE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let verbose = cli.verbose;
    let result = match cli.command {
        Command::FitProfile(a) => fit_profile_cmd(a),
        Command::FitCost(a) => fit_cost_cmd(a),
        Command::Advise(a) => advise_cmd(a, verbose),
        Command::Sweep(a) => sweep_cmd(a, verbose),
        Command::Sensitivity(a) => sensitivity_cmd(a, verbose),
        Command::LogAppend(a) => log_append_cmd(a),
        Command::Refit(a) => refit_cmd(a),
    };
    match result {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::NoneFeasible) => ExitCode::from(EXIT_NONE_FEASIBLE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Prints `text` and, if asked, writes it to `output` too.
fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
        _ => {}
    }
    if let Some(path) = output {
        fs::write(path, text).map_err(|e| cloudburst::Error::Io { path: path.into(), source: e })?;
    }
    Ok(())
}

fn fit_profile_cmd(a: FitProfileArgs) -> Result<Status> {
    let observations = read_observations(&a.observations, a.unit.unwrap_or(TimeUnit::Hours))?;
    let unit = a.unit.or_else(|| observations.first().map(|o| o.unit)).unwrap_or(TimeUnit::Hours);
    let report = fit_profile_in(&observations, unit)?;
    let doc = ProfileDoc::from_profile(&report.profile, Some(report.rms_residual));
    emit(&doc.to_toml(), a.output.as_deref())?;
    Ok(Status::Done)
}

fn price_table(prices: Option<&Path>, memory: Option<args::Memory>) -> Result<cloudburst::cost::PriceTable<f64>> {
    Ok(match (prices, memory) {
        (Some(path), _) => read_price_table(path)?,
        (None, Some(m)) => MemoryConfig::from(m).price_table(),
        (None, None) => MemoryConfig::FourGb.price_table(),
    })
}

fn fit_cost_cmd(a: FitCostArgs) -> Result<Status> {
    let table = price_table(a.prices.as_deref(), a.memory)?;
    let fit = fit_alpha(&table)?;
    let text = format!(
        "memory_per_core = {:?}\nalpha = {}\nmax_relative_residual = {}\nfree_slope = {}\nfree_intercept = {}\n",
        table.memory_per_core(),
        fit.alpha,
        fit.max_relative_residual,
        fit.free_slope,
        fit.free_intercept
    );
    emit(&text, a.output.as_deref())?;
    Ok(Status::Done)
}

fn advise_cmd(a: AdviseArgs, verbose: u8) -> Result<Status> {
    let request = match a.policy {
        Policy::DeadlineAware => {
            if a.budget.is_some() {
                return Err(usage("--budget does not apply to the deadline policy"));
            }
            let deadline = a.deadline.ok_or_else(|| usage("--policy deadline requires --deadline"))?;
            AdviceRequest::deadline(a.unit.convert(deadline, TimeUnit::Hours))
        }
        Policy::BudgetAware => {
            if a.deadline.is_some() {
                return Err(usage("--deadline does not apply to the budget policy"));
            }
            AdviceRequest::budget(a.budget.ok_or_else(|| usage("--policy budget requires --budget"))?)
        }
    };
    request.constraint().map_err(|e| usage(e.to_string()))?;
    for (name, v) in [("--queue-time", a.queue_time), ("--setup-time", a.setup_time)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(usage(format!("{name} must be non-negative")));
        }
    }
    if !(a.price_ratio.is_finite() && a.price_ratio > 0.0) {
        return Err(usage("--price-ratio must be positive"));
    }

    let mut setup = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| cloudburst::Error::Io { path: path.clone(), source: e })?;
            toml::from_str::<ModelSetup>(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => ModelSetup::default(),
    };
    if let Some(p) = &a.local_profile {
        setup.local_profile = ProfileDoc::read(p)?;
    }
    if let Some(p) = &a.cloud_profile {
        setup.cloud_profile = ProfileDoc::read(p)?;
    }
    if a.prices.is_some() || a.memory.is_some() {
        setup.alpha = fit_alpha(&price_table(a.prices.as_deref(), a.memory)?)?.alpha;
    }
    if let Some(n) = a.local_nodes {
        setup.local_sizes = n;
    }
    if let Some(n) = a.cloud_nodes {
        setup.cloud_sizes = n;
    }

    let cloud_cost = CostModel::new(setup.alpha)?.with_billing(a.billing.into());
    let envs = [
        Environment::local(
            setup.local_sizes.clone(),
            setup.local_profile.to_profile()?,
            cloud_cost.scaled(a.price_ratio)?,
            a.unit.convert(a.queue_time, TimeUnit::Hours),
        )?
        .bill_overhead(setup.bill_queue),
        Environment::cloud(
            setup.cloud_sizes.clone(),
            setup.cloud_profile.to_profile()?,
            cloud_cost,
            a.unit.convert(a.setup_time, TimeUnit::Hours),
        )?
        .bill_overhead(setup.bill_setup),
    ];
    let rec = advise(&request, &envs)?;
    let doc = RecommendationDoc::from_recommendation(&rec);
    emit(&doc.to_toml(), a.output.as_deref())?;
    if verbose > 0 {
        for p in &rec.plans {
            eprintln!(
                "{}: {:?} = {} processors, turnaround {:.4} h, cost {:.4}, {}",
                p.environment,
                p.proc_per_node,
                p.total_processors,
                p.turnaround_hours,
                p.total_cost,
                if p.feasible { "feasible" } else { "infeasible" }
            );
        }
    }
    Ok(if rec.chosen.is_some() { Status::Done } else { Status::NoneFeasible })
}

fn load_config(a: &SweepArgs) -> Result<SweepConfig> {
    let mut config = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| cloudburst::Error::Io { path: path.clone(), source: e })?;
            toml::from_str::<SweepConfig>(&text)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => SweepConfig::default(),
    };
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    config.allow_out_of_range |= a.allow_out_of_range;
    config.validate()?;
    Ok(config)
}

fn sweep_cmd(a: SweepArgs, verbose: u8) -> Result<Status> {
    let config = load_config(&a)?;
    let start = Instant::now();
    let results = run_sweep(&config)?;
    let files = write_sweep(&a.output, &config.fingerprint(), &results)?;
    fs::write(a.output.join("config.toml"), config.to_toml())
        .map_err(|e| cloudburst::Error::Io { path: a.output.join("config.toml"), source: e })?;

    println!("points per policy: {}", results.len());
    println!("config sha256: {}", config.fingerprint());
    for policy in [Policy::DeadlineAware, Policy::BudgetAware] {
        let rows = aggregate_by_ratio(&results, policy)?;
        let what = match policy {
            Policy::DeadlineAware => "local cheapest",
            Policy::BudgetAware => "local faster",
        };
        println!("{policy}-aware advisor, share of feasible points where {what}:");
        for r in rows.iter().filter(|r| r.decider == Decider::Advisor) {
            let share = r.local_fraction().map_or("n/a".to_string(), |f| format!("{f:.3}"));
            println!(
                "  K = {:<5} {share} ({} of {} feasible, {} excluded from the relative metric)",
                r.price_ratio, r.local_chosen, r.feasible, r.excluded
            );
        }
        match crossover_ratio(&rows) {
            Some(k) => println!("  cloud wins a majority from K = {k}"),
            None => println!("  cloud never wins a majority"),
        }
    }
    for f in &files {
        println!("wrote {}", f.display());
    }
    if verbose > 0 {
        eprintln!("sweep took {:.2}s", start.elapsed().as_secs_f64());
    }
    Ok(Status::Done)
}

fn sensitivity_cmd(a: SensitivityArgs, verbose: u8) -> Result<Status> {
    let config = load_config(&a.sweep)?;
    let errors = a.errors.unwrap_or_else(|| DEFAULT_ERRORS.to_vec());
    for &e in &errors {
        cloudburst::sweep::check_error(e).map_err(|e| usage(e.to_string()))?;
    }
    let start = Instant::now();
    let records = run_sensitivity(&config, &errors)?;
    let table = sensitivity_table(&records)?;
    let errors_text = errors.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
    let fingerprint = config.fingerprint_with(&format!("\nerrors = [{errors_text}]\n"));
    let files = write_sensitivity(&a.sweep.output, &fingerprint, &records, &table)?;
    fs::write(a.sweep.output.join("config.toml"), config.to_toml())
        .map_err(|e| cloudburst::Error::Io { path: a.sweep.output.join("config.toml"), source: e })?;

    println!("points per policy and error: {}", config.total_points());
    println!("{:>6} {:>9} | {:>10} {:>10} {:>7} {:>6} | {:>10} {:>10} {:>7} {:>6}", "error", "decision", "deadline", "std", "size", "%", "budget", "std", "size", "%");
    for r in &table {
        let (d, b) = (&r.deadline, &r.budget);
        println!(
            "{:>6} {:>9} | {:>10.4} {:>10.4} {:>7} {:>6.1} | {:>10.4} {:>10.4} {:>7} {:>6.1}",
            r.error,
            if r.same_decision { "same" } else { "different" },
            d.avg,
            d.std,
            d.size,
            100.0 * d.fraction,
            b.avg,
            b.std,
            b.size,
            100.0 * b.fraction
        );
    }
    for f in &files {
        println!("wrote {}", f.display());
    }
    if verbose > 0 {
        eprintln!("sensitivity took {:.2}s", start.elapsed().as_secs_f64());
    }
    Ok(Status::Done)
}

fn log_append_cmd(a: LogAppendArgs) -> Result<Status> {
    let mut record = ExecutionRecord::new(a.environment, a.processors, a.elapsed, a.unit)
        .map_err(|e| usage(e.to_string()))?;
    if let Some(t) = &a.timestamp {
        record = record.with_timestamp(parse_timestamp(t).map_err(|e| usage(e.to_string()))?);
    }
    if let Some(tag) = a.tag {
        record = record.with_tag(tag);
    }
    let store = LogStore::new(&a.log.log);
    store.append(&record)?;
    println!("{} records in {}", store.count()?, store.path().display());
    Ok(Status::Done)
}

fn refit_cmd(a: RefitArgs) -> Result<Status> {
    let store = LogStore::new(&a.log.log);
    if !store.path().exists() {
        return Err(cloudburst::Error::Io {
            path: store.path().into(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "log file does not exist"),
        }
        .into());
    }
    let report = store.refit(&a.environment)?;
    let profile = report.profile.in_unit(a.unit);
    let residual = TimeUnit::Hours.convert(report.rms_residual, a.unit);
    emit(&ProfileDoc::from_profile(&profile, Some(residual)).to_toml(), a.output.as_deref())?;
    Ok(Status::Done)
}
