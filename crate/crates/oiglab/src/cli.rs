//! Command-line entry point: `vt`, `orient`, `verify`, `simulate`, `exact`.
//!
//! Every run with identical arguments and environment produces byte-identical
//! primary output. Exit codes: 0 success, 1 failed check or runtime error,
//! 2 configuration/usage error, 3 capacity exceeded.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::adversarial::{
    find_matching_seed, AdversarialParams, AdversarialRule, VerifyMode,
};
use crate::bits::{all_vectors, random_k_subset, BitVector};
use crate::class::ProjectedClass;
use crate::error::{Error, Result};
use crate::experiment::{
    emit, parse_ratio, summary_json, EmitFormat, Experiment, ExperimentConfig, RuleKind,
};
use crate::graph::{closure_orientation, orient_min_max_outdegree, OneInclusionGraph};
use crate::mix::{tag, SplitMix};
use crate::vt::{count_by_residue, covered_codewords, residue, VtParams};

#[derive(Debug, Parser)]
#[command(
    name = "oiglab",
    version,
    about = "One-inclusion graph orientation laboratory",
    after_help = "Relative --out paths are resolved against $OIGLAB_OUT_DIR when set."
)]
struct Cli {
    /// Print progress notes to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Varshamov-Tenengolts code utilities.
    Vt {
        #[command(subcommand)]
        command: VtCommand,
    },
    /// Orient the one-inclusion graph of a class file.
    Orient(OrientArgs),
    /// Structural verifications, reported as JSON records.
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
    /// Monte Carlo prediction experiment on the star support.
    Simulate(SimulateArgs),
    /// Exact small-n error law (the sampler's oracle).
    Exact(ExactArgs),
}

#[derive(Debug, Subcommand)]
enum VtCommand {
    /// Print the weighted-sum residue of a bit string.
    Residue { bits: String },
    /// Print |VT_a(m) ∩ S_k| for every residue a, as one CSV line.
    Counts {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
    },
    /// Exhaustively check the unique-neighborhood and partition properties.
    CheckUnique {
        #[arg(long)]
        m: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrientMode {
    Flow,
    Closure,
}

#[derive(Debug, Args)]
struct OrientArgs {
    /// Class file: header "m h", then h rows of m bits ('#' comments).
    #[arg(long)]
    class: PathBuf,
    /// Subset to project onto (bit string; default: the full domain).
    #[arg(long)]
    subset: Option<String>,
    #[arg(long, value_enum)]
    mode: OrientMode,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VerifyModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Realize the coordinated-selection construction by seed rejection and
    /// verify its conclusions for every training size.
    Matching {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: VerifyModeArg,
        #[arg(long, default_value_t = 64)]
        max_attempts: u64,
        /// Samples per training size in sampled mode.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Sample extensions and check the coded rule's max out-degree bound.
    Validity {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Exhaustive unique-neighborhood check at one code length.
    Unique {
        #[arg(long)]
        m: usize,
    },
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    delta: String,
    #[arg(long)]
    rule: String,
    #[arg(long)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write per-trial CSV or summary JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
    /// Tail thresholds (rationals); default d/(16*delta*n).
    #[arg(long = "threshold")]
    thresholds: Vec<String>,
    /// Worker threads for the trial loop.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    rule: String,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value = "0.2")]
    delta: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses arguments and dispatches; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

/// Testable entry point over explicit arguments.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Input(_) | Error::Parse { .. } => 2,
                Error::Capacity(_) => 3,
                _ => 1,
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Vt { command } => run_vt(command),
        Command::Orient(args) => run_orient(args),
        Command::Verify { command } => run_verify(command, cli.verbose),
        Command::Simulate(args) => run_simulate(args, cli.verbose),
        Command::Exact(args) => run_exact(args),
    }
}

fn run_vt(command: &VtCommand) -> Result<i32> {
    match command {
        VtCommand::Residue { bits } => {
            let v = BitVector::parse(bits)?;
            println!("{}", residue(&v));
            Ok(0)
        }
        VtCommand::Counts { m, k } => {
            let profile = count_by_residue(*m, *k)?;
            let line: Vec<String> = profile.counts().iter().map(|c| c.to_string()).collect();
            println!("{}", line.join(","));
            Ok(0)
        }
        VtCommand::CheckUnique { m } => {
            let stats = unique_neighborhood_check(*m)?;
            println!(
                "ok: m={m}, {} vectors, {} residues, partition verified",
                stats.vectors, stats.residues
            );
            Ok(0)
        }
    }
}

struct UniqueStats {
    vectors: u64,
    residues: usize,
}

/// Checks, for every vector and residue, that at most one covered codeword
/// exists, and that the per-residue counts partition each weight slice.
fn unique_neighborhood_check(m: usize) -> Result<UniqueStats> {
    if m == 0 {
        return Err(Error::Input("code length must be at least 1".into()));
    }
    let mut per_k_counts: Vec<Vec<u64>> = vec![vec![0; m + 1]; m + 1];
    let mut vectors = 0u64;
    for s in all_vectors(m)? {
        vectors += 1;
        per_k_counts[s.ones_count()][residue(&s)] += 1;
        for a in 0..=m {
            // errors out (Internal) if uniqueness ever fails
            covered_codewords(&s, VtParams::new(m, a)?)?;
        }
    }
    for (k, brute_counts) in per_k_counts.iter().enumerate() {
        let profile = count_by_residue(m, k)?;
        for (a, &brute) in brute_counts.iter().enumerate() {
            if profile.counts()[a] != num_bigint::BigUint::from(brute) {
                return Err(Error::Internal(format!(
                    "count mismatch at m={m} k={k} a={a}: dp={} brute={brute}",
                    profile.counts()[a]
                )));
            }
        }
        let total: u64 = brute_counts.iter().sum();
        let choose: u64 = binomial_u64(m, k);
        if total != choose {
            return Err(Error::Internal(format!(
                "partition broken at m={m} k={k}: {total} != C({m},{k})={choose}"
            )));
        }
    }
    Ok(UniqueStats {
        vectors,
        residues: m + 1,
    })
}

fn binomial_u64(m: usize, k: usize) -> u64 {
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

fn run_orient(args: &OrientArgs) -> Result<i32> {
    let class = ProjectedClass::load_file(&args.class)?;
    let subset = match &args.subset {
        Some(bits) => BitVector::parse(bits)?,
        None => {
            let mut s = BitVector::zeros(class.domain_size());
            for p in 0..class.domain_size() {
                s.set(p, true);
            }
            s
        }
    };
    let projected = class.project(&subset)?;
    let graph = OneInclusionGraph::build(projected);
    let orientation = match args.mode {
        OrientMode::Flow => orient_min_max_outdegree(&graph),
        OrientMode::Closure => {
            let center = BitVector::zeros(graph.class().domain_size());
            closure_orientation(&graph, &center)?
        }
    };
    let hypotheses = orientation.graph().class().hypotheses();
    for (id, e) in orientation.graph().edges().iter().enumerate() {
        println!(
            "edge({},{},{}) -> {}",
            hypotheses[e.u],
            hypotheses[e.v],
            e.coord + 1, // positions are displayed 1-based
            hypotheses[orientation.head(id)]
        );
    }
    println!("max out-degree: {}", orientation.max_out_degree());
    Ok(0)
}

fn run_verify(command: &VerifyCommand, verbose: u8) -> Result<i32> {
    match command {
        VerifyCommand::Matching {
            n,
            delta,
            d,
            seed,
            mode,
            max_attempts,
            samples,
        } => {
            let delta = parse_ratio(delta)?;
            let base = AdversarialParams::new(*n, *d, delta, *seed)?;
            for w in base.admissibility_warnings() {
                eprintln!("warning: {w}");
            }
            let mode_value = match mode {
                VerifyModeArg::Exhaustive => VerifyMode::Exhaustive,
                VerifyModeArg::Sampled => VerifyMode::Sampled { samples: *samples },
            };
            if verbose > 0 {
                eprintln!("rejection from seed {seed}, budget {max_attempts}");
            }
            let search = find_matching_seed(&base, mode_value, *max_attempts)?;
            let record = json!({
                "check": "matching",
                "params": {
                    "n": n,
                    "d": d,
                    "delta": format!("{}/{}", delta.numer(), delta.denom()),
                    "seed": seed,
                    "mode": match mode { VerifyModeArg::Exhaustive => "exhaustive", VerifyModeArg::Sampled => "sampled" },
                    "max_attempts": max_attempts,
                    "residue_budget": base.effective_budget(),
                },
                "result": {
                    "attempts": search.attempts,
                    "all_ok": search.accepted_seed.is_some(),
                    "per_k": search.reports,
                },
                "accepted_seed": search.accepted_seed,
            });
            println!("{}", serde_json::to_string_pretty(&record).expect("json"));
            Ok(if search.accepted_seed.is_some() { 0 } else { 1 })
        }
        VerifyCommand::Validity {
            n,
            delta,
            d,
            seed,
            samples,
        } => {
            let delta = parse_ratio(delta)?;
            let params = AdversarialParams::new(*n, *d, delta, *seed)?;
            for w in params.admissibility_warnings() {
                eprintln!("warning: {w}");
            }
            let rule = AdversarialRule::new(params);
            let class = ProjectedClass::indicators(2 * n);
            let mut stream = SplitMix::keyed(*seed, tag::VALIDITY, [*n as u64]);
            let mut max_seen = 0usize;
            let mut violations = 0u64;
            for _ in 0..*samples {
                let k = 1 + stream.uniform(*n as u64) as usize;
                let s_prime = random_k_subset(&mut stream, 2 * n, k + 1);
                let orientation = rule.orient_extension(&class, &s_prime)?;
                let out = orientation.max_out_degree();
                max_seen = max_seen.max(out);
                if out > d + 1 {
                    violations += 1;
                }
            }
            let record = json!({
                "check": "validity",
                "params": {
                    "n": n,
                    "d": d,
                    "delta": format!("{}/{}", delta.numer(), delta.denom()),
                    "seed": seed,
                    "samples": samples,
                },
                "result": {
                    "max_out_degree": max_seen,
                    "bound": d + 1,
                    "violations": violations,
                },
                "accepted_seed": seed,
            });
            println!("{}", serde_json::to_string_pretty(&record).expect("json"));
            Ok(if violations == 0 { 0 } else { 1 })
        }
        VerifyCommand::Unique { m } => {
            let stats = unique_neighborhood_check(*m)?;
            let record = json!({
                "check": "unique",
                "params": { "m": m },
                "result": {
                    "vectors": stats.vectors,
                    "residues": stats.residues,
                    "ok": true,
                },
                "accepted_seed": null,
            });
            println!("{}", serde_json::to_string_pretty(&record).expect("json"));
            Ok(0)
        }
    }
}

fn resolve_out(path: &std::path::Path) -> PathBuf {
    if path.is_relative() {
        if let Some(dir) = std::env::var_os("OIGLAB_OUT_DIR") {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn run_simulate(args: &SimulateArgs, verbose: u8) -> Result<i32> {
    let delta = parse_ratio(&args.delta)?;
    let rule: RuleKind = args.rule.parse()?;
    let mut config = ExperimentConfig::new(args.n, args.d, delta, rule, args.trials, args.seed)?;
    if !args.thresholds.is_empty() {
        config.thresholds = args
            .thresholds
            .iter()
            .map(|t| parse_ratio(t))
            .collect::<Result<Vec<_>>>()?;
        config.validate()?;
    }
    config.jobs = args.jobs;
    let format: EmitFormat = args.format.parse()?;

    let experiment = Experiment::new(config)?;
    for w in experiment.warnings() {
        eprintln!("warning: {w}");
    }
    if verbose > 0 {
        eprintln!(
            "running {} trials of rule {} at n={}",
            args.trials, args.rule, args.n
        );
    }
    let (summary, records) = experiment.monte_carlo()?;
    if let Some(out) = &args.out {
        let out = resolve_out(out);
        emit(&summary, &records, &out, format)?;
        if verbose > 0 {
            eprintln!("wrote {}", out.display());
        }
    }
    print!("{}", summary_json(&summary)?);
    Ok(0)
}

fn run_exact(args: &ExactArgs) -> Result<i32> {
    let delta = parse_ratio(&args.delta)?;
    let rule: RuleKind = args.rule.parse()?;
    let config = ExperimentConfig::new(args.n, args.d, delta, rule, 1, args.seed)?;
    let experiment = Experiment::new(config)?;
    for w in experiment.warnings() {
        eprintln!("warning: {w}");
    }
    let law = experiment.exact_distribution()?;
    let report = law.to_report(experiment.config());
    let payload = serde_json::to_string_pretty(&report).expect("json");
    if let Some(out) = &args.out {
        let out = resolve_out(out);
        std::fs::write(&out, format!("{payload}\n")).map_err(|e| Error::Io {
            path: out.display().to_string(),
            msg: e.to_string(),
        })?;
    }
    println!("{payload}");
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_helper() {
        assert_eq!(binomial_u64(14, 7), 3432);
        assert_eq!(binomial_u64(8, 0), 1);
    }

    #[test]
    fn unique_check_small() {
        let stats = unique_neighborhood_check(6).unwrap();
        assert_eq!(stats.vectors, 64);
        assert_eq!(stats.residues, 7);
    }
}
