//! The prediction experiment: uniform draws over a `2n`-point star support,
//! all-zeros target, exact per-trial errors, and both Monte Carlo and exact
//! small-`n` distributions.
//!
//! Per-trial randomness comes from streams keyed by `(seed, trial index)`,
//! so parallel and serial execution agree and re-runs are byte-identical.
//! Errors are exact rationals with denominator `2n` end to end; floating
//! point appears only in summary statistics.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::adversarial::{AdversarialParams, AdversarialRule};
use crate::bits::{k_subsets, BitVector};
use crate::class::ProjectedClass;
use crate::error::{Error, Result};
use crate::mix::{tag, SplitMix};
use crate::rule::{exact_error, ClosureRule, FlowRule, OrientationRule, RandomFlipRule};

/// Largest sample size the exact enumeration oracle accepts.
pub const EXACT_MAX_N: usize = 6;

/// Which orientation rule drives the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    Closure,
    Flow,
    RandomFlip,
    Adversarial,
}

impl RuleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleKind::Closure => "closure",
            RuleKind::Flow => "flow",
            RuleKind::RandomFlip => "random_flip",
            RuleKind::Adversarial => "adversarial",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<RuleKind> {
        match s {
            "closure" => Ok(RuleKind::Closure),
            "flow" => Ok(RuleKind::Flow),
            "random_flip" => Ok(RuleKind::RandomFlip),
            "adversarial" => Ok(RuleKind::Adversarial),
            other => Err(Error::Config(format!(
                "unknown rule {other:?}; expected closure|flow|random_flip|adversarial"
            ))),
        }
    }
}

/// Parses an exact rational from a decimal string (`0.25`) or a fraction
/// (`1/4`).
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>> {
    let s = s.trim();
    let bad = |()| Error::Config(format!("cannot parse {s:?} as a rational"));
    if let Some((num, den)) = s.split_once('/') {
        let num: u64 = num.trim().parse().map_err(|_| bad(()))?;
        let den: u64 = den.trim().parse().map_err(|_| bad(()))?;
        if den == 0 {
            return Err(Error::Config(format!("zero denominator in {s:?}")));
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let int_part = if int_part.is_empty() { "0" } else { int_part };
        if frac_part.is_empty() || frac_part.len() > 12 {
            return Err(bad(()));
        }
        let int: u64 = int_part.parse().map_err(|_| bad(()))?;
        let frac: u64 = frac_part.parse().map_err(|_| bad(()))?;
        let scale = 10u64.pow(frac_part.len() as u32);
        return Ok(Ratio::new(int * scale + frac, scale));
    }
    let int: u64 = s.parse().map_err(|_| bad(()))?;
    Ok(Ratio::from_integer(int))
}

/// Full configuration of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub d: usize,
    pub delta: Ratio<u64>,
    pub rule: RuleKind,
    pub trials: u64,
    pub seed: u64,
    /// Error levels for tail reporting; defaults to `[d/(16·delta·n)]`.
    pub thresholds: Vec<Ratio<u64>>,
    pub jobs: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(
        n: usize,
        d: usize,
        delta: Ratio<u64>,
        rule: RuleKind,
        trials: u64,
        seed: u64,
    ) -> Result<ExperimentConfig> {
        let config = ExperimentConfig {
            n,
            d,
            delta,
            rule,
            trials,
            seed,
            thresholds: vec![default_threshold(n, d, delta)?],
            jobs: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("sample size n must be at least 1".into()));
        }
        if self.d == 0 {
            return Err(Error::Config("out-degree budget d must be at least 1".into()));
        }
        if self.delta <= Ratio::zero() || self.delta >= Ratio::one() {
            return Err(Error::Config(format!(
                "confidence delta must lie strictly inside (0,1), got {}",
                self.delta
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("at least one trial is required".into()));
        }
        for t in &self.thresholds {
            if *t <= Ratio::zero() || *t > Ratio::one() {
                return Err(Error::Config(format!(
                    "tail threshold {t} must lie in (0,1]"
                )));
            }
        }
        Ok(())
    }

    /// Domain size of the star support.
    pub fn domain_size(&self) -> usize {
        2 * self.n
    }
}

/// The canonical tail threshold `d/(16·delta·n)`.
pub fn default_threshold(n: usize, d: usize, delta: Ratio<u64>) -> Result<Ratio<u64>> {
    let num = (d as u64)
        .checked_mul(*delta.denom())
        .ok_or_else(|| Error::Config("threshold overflow".into()))?;
    let den = 16u64
        .checked_mul(*delta.numer())
        .and_then(|x| x.checked_mul(n as u64))
        .ok_or_else(|| Error::Config("threshold overflow".into()))?;
    Ok(Ratio::new(num, den).min(Ratio::one()))
}

/// One simulated draw of the training sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    /// The n draws in order, possibly with repeats.
    pub draws: Vec<u16>,
    /// Unique training-set size.
    pub k: usize,
    /// Exact error against the all-zeros target.
    pub error: Ratio<u64>,
    /// Heavy-family membership; present only for the coded rule.
    pub in_w1: Option<bool>,
}

/// A configured experiment with its rule instantiated.
pub struct Experiment {
    config: ExperimentConfig,
    class: Arc<ProjectedClass>,
    rule: Arc<dyn OrientationRule>,
    adversarial: Option<Arc<AdversarialRule>>,
}

impl Experiment {
    pub fn new(mut config: ExperimentConfig) -> Result<Experiment> {
        config.validate()?;
        // ascending thresholds keep tail frequencies monotone in the report
        config.thresholds.sort();
        config.thresholds.dedup();
        let class = Arc::new(ProjectedClass::indicators(config.domain_size()));
        let (rule, adversarial): (Arc<dyn OrientationRule>, Option<Arc<AdversarialRule>>) =
            match config.rule {
                RuleKind::Closure => (Arc::new(ClosureRule), None),
                RuleKind::Flow => (Arc::new(FlowRule), None),
                RuleKind::RandomFlip => (Arc::new(RandomFlipRule::new(config.seed)), None),
                RuleKind::Adversarial => {
                    let params =
                        AdversarialParams::new(config.n, config.d, config.delta, config.seed)?;
                    let rule = AdversarialRule::new(params);
                    (rule.clone(), Some(rule))
                }
            };
        Ok(Experiment {
            config,
            class,
            rule,
            adversarial,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn class(&self) -> &ProjectedClass {
        &self.class
    }

    /// Configuration notes worth surfacing before a run.
    pub fn warnings(&self) -> Vec<String> {
        self.adversarial
            .as_ref()
            .map(|rule| rule.params().admissibility_warnings())
            .unwrap_or_default()
    }

    /// Runs one trial; deterministic in `(config, trial_index)`.
    pub fn run_trial(&self, trial: u64) -> Result<TrialRecord> {
        let m = self.config.domain_size();
        let mut stream = SplitMix::keyed(self.config.seed, tag::TRIAL, [trial]);
        let mut draws = Vec::with_capacity(self.config.n);
        let mut train_set = BitVector::zeros(m);
        for _ in 0..self.config.n {
            let x = stream.uniform(m as u64) as usize;
            draws.push(x as u16);
            train_set.set(x, true);
        }
        let k = train_set.ones_count();
        let hypothesis = self.rule.realize(&self.class, &train_set)?;
        let error = exact_error(&hypothesis, &BitVector::zeros(m))?;
        let in_w1 = match &self.adversarial {
            Some(rule) => Some(rule.view(k)?.is_in_w1(&train_set)?),
            None => None,
        };
        Ok(TrialRecord {
            trial,
            draws,
            k,
            error,
            in_w1,
        })
    }

    /// Runs all trials (in parallel when a worker pool is available) and
    /// aggregates. Trial streams are per-index, so the records are identical
    /// regardless of scheduling.
    pub fn monte_carlo(&self) -> Result<(Summary, Vec<TrialRecord>)> {
        let run = || -> Result<Vec<TrialRecord>> {
            (0..self.config.trials)
                .into_par_iter()
                .map(|t| self.run_trial(t))
                .collect()
        };
        let records = match self.config.jobs {
            Some(jobs) => rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?
                .install(run),
            None => run(),
        }?;
        let summary = Summary::from_records(&self.config, &records)?;
        Ok((summary, records))
    }

    /// Exact distribution of the error (and of heavy-family membership) by
    /// full enumeration; the independent oracle for the sampler.
    pub fn exact_distribution(&self) -> Result<ExactLaw> {
        let n = self.config.n;
        if n > EXACT_MAX_N {
            return Err(Error::Capacity(format!(
                "exact enumeration is limited to n <= {EXACT_MAX_N}, got {n}"
            )));
        }
        let m = self.config.domain_size();
        let zeros = BitVector::zeros(m);
        let total_sequences = BigInt::from(m).pow(n as u32);

        let mut law: Vec<(Ratio<u64>, BigRational)> = Vec::new();
        let mut pr_in_w1 = BigRational::zero();
        let mut total_mass = BigRational::zero();
        let mut mean = BigRational::zero();

        for k in 1..=n {
            // number of n-sequences whose value set is a fixed k-set
            let onto = surjection_count(n, k);
            if onto.is_zero() {
                continue;
            }
            let p_per_set = BigRational::new(onto.clone(), total_sequences.clone());
            for s in k_subsets(m, k) {
                let hypothesis = self.rule.realize(&self.class, &s)?;
                let error = exact_error(&hypothesis, &zeros)?;
                match law.binary_search_by(|(e, _)| e.cmp(&error)) {
                    Ok(i) => {
                        let mass = law[i].1.clone() + &p_per_set;
                        law[i].1 = mass;
                    }
                    Err(i) => law.insert(i, (error, p_per_set.clone())),
                }
                if let Some(rule) = &self.adversarial {
                    if rule.view(k)?.is_in_w1(&s)? {
                        pr_in_w1 += &p_per_set;
                    }
                }
                total_mass += &p_per_set;
                mean += ratio_to_big(error) * &p_per_set;
            }
        }

        if total_mass != BigRational::one() {
            return Err(Error::Internal(format!(
                "exact law mass {total_mass} is not 1; enumeration is broken"
            )));
        }
        Ok(ExactLaw {
            support: law,
            mean,
            pr_in_w1: self.adversarial.as_ref().map(|_| pr_in_w1),
        })
    }
}

/// Number of maps from an `n`-sequence onto a fixed `k`-set (inclusion-
/// exclusion over missed elements).
fn surjection_count(n: usize, k: usize) -> BigInt {
    let mut total = BigInt::zero();
    let mut choose = BigInt::one(); // C(k, j)
    for j in 0..=k {
        let ways = BigInt::from(k - j).pow(n as u32);
        let term = choose.clone() * ways;
        if j % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        choose = choose * BigInt::from(k - j) / BigInt::from(j + 1);
    }
    // onto maps cannot be negative; a negative value means a bug
    debug_assert!(!total.is_negative());
    total
}

fn ratio_to_big(r: Ratio<u64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn ratio_str(r: &Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// The exact error law produced by [`Experiment::exact_distribution`].
#[derive(Debug, Clone)]
pub struct ExactLaw {
    /// `(error value, probability)` pairs, ascending in error.
    pub support: Vec<(Ratio<u64>, BigRational)>,
    pub mean: BigRational,
    pub pr_in_w1: Option<BigRational>,
}

impl ExactLaw {
    pub fn mean_f64(&self) -> f64 {
        self.mean.to_f64().unwrap_or(f64::NAN)
    }

    pub fn pr_in_w1_f64(&self) -> Option<f64> {
        self.pr_in_w1
            .as_ref()
            .map(|p| p.to_f64().unwrap_or(f64::NAN))
    }

    /// Probability that the error is at least `t`, exactly.
    pub fn tail_mass(&self, t: Ratio<u64>) -> BigRational {
        self.support
            .iter()
            .filter(|(e, _)| *e >= t)
            .map(|(_, p)| p.clone())
            .sum()
    }

    pub fn to_report(&self, config: &ExperimentConfig) -> ExactReport {
        ExactReport {
            config: ConfigEcho::new(config),
            support: self
                .support
                .iter()
                .map(|(e, p)| ExactEntry {
                    error: ratio_str(e),
                    probability: format!("{p}"),
                    probability_f64: p.to_f64().unwrap_or(f64::NAN),
                })
                .collect(),
            mean: format!("{}", self.mean),
            mean_f64: self.mean_f64(),
            pr_in_w1: self.pr_in_w1_f64(),
        }
    }
}

/// Serializable echo of the configuration, embedded in every artifact.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub delta: String,
    pub rule: String,
    pub trials: u64,
    pub seed: u64,
    pub thresholds: Vec<String>,
}

impl ConfigEcho {
    fn new(config: &ExperimentConfig) -> ConfigEcho {
        ConfigEcho {
            n: config.n,
            m: config.domain_size(),
            d: config.d,
            delta: ratio_str(&config.delta),
            rule: config.rule.as_str().into(),
            trials: config.trials,
            seed: config.seed,
            thresholds: config.thresholds.iter().map(ratio_str).collect(),
        }
    }
}

/// One tail threshold's empirical frequency.
#[derive(Debug, Clone, Serialize)]
pub struct TailReport {
    pub threshold: String,
    pub count: u64,
    pub frequency: f64,
    pub std_error: f64,
}

/// Aggregated Monte Carlo results.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub config: ConfigEcho,
    /// The construction seed this run used (echoed for reproduction).
    pub accepted_seed: u64,
    pub mean_error: f64,
    pub std_error: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tails: Vec<TailReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pr_in_w1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w1_count: Option<u64>,
    /// Heavy-family trials whose error fell below `d/(16·delta·n)`; the
    /// per-set error bound demands this stays zero.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w1_bound_violations: Option<u64>,
}

impl Summary {
    /// Order-independent aggregation over trial records.
    pub fn from_records(config: &ExperimentConfig, records: &[TrialRecord]) -> Result<Summary> {
        if records.is_empty() {
            return Err(Error::Config("cannot summarize zero trials".into()));
        }
        let trials = records.len() as u64;
        let m = config.domain_size() as u128;
        let mut sum_num: u128 = 0;
        let mut sum_num_sq: u128 = 0;
        let mut tail_counts = vec![0u64; config.thresholds.len()];
        let mut w1_count: u64 = 0;
        let mut w1_violations: u64 = 0;
        let mut any_w1 = false;
        let guarantee = default_threshold(config.n, config.d, config.delta)?;

        for r in records {
            // errors carry denominator 2n; normalize the numerator exactly
            let num =
                *r.error.numer() as u128 * (m / *r.error.denom() as u128);
            sum_num += num;
            sum_num_sq += num * num;
            for (i, t) in config.thresholds.iter().enumerate() {
                // error >= t  <=>  num * t_den >= t_num * m
                if num * *t.denom() as u128 >= *t.numer() as u128 * m {
                    tail_counts[i] += 1;
                }
            }
            if let Some(in_w1) = r.in_w1 {
                any_w1 = true;
                if in_w1 {
                    w1_count += 1;
                    if r.error < guarantee {
                        w1_violations += 1;
                    }
                }
            }
        }

        let t = trials as f64;
        let mean = sum_num as f64 / (m as f64 * t);
        let mean_sq = sum_num_sq as f64 / ((m * m) as f64 * t);
        let variance = if trials > 1 {
            ((mean_sq - mean * mean) * t / (t - 1.0)).max(0.0)
        } else {
            0.0
        };
        let std_error = (variance / t).sqrt();

        let tails = config
            .thresholds
            .iter()
            .zip(&tail_counts)
            .map(|(threshold, &count)| {
                let frequency = count as f64 / t;
                TailReport {
                    threshold: ratio_str(threshold),
                    count,
                    frequency,
                    std_error: (frequency * (1.0 - frequency) / t).sqrt(),
                }
            })
            .collect();

        Ok(Summary {
            config: ConfigEcho::new(config),
            accepted_seed: config.seed,
            mean_error: mean,
            std_error,
            tails,
            pr_in_w1: any_w1.then(|| w1_count as f64 / t),
            w1_count: any_w1.then_some(w1_count),
            w1_bound_violations: any_w1.then_some(w1_violations),
        })
    }
}

/// Exact-law report for serialization.
#[derive(Debug, Clone, Serialize)]
pub struct ExactReport {
    pub config: ConfigEcho,
    pub support: Vec<ExactEntry>,
    pub mean: String,
    pub mean_f64: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pr_in_w1: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactEntry {
    pub error: String,
    pub probability: String,
    pub probability_f64: f64,
}

/// Output formats for [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

impl FromStr for EmitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<EmitFormat> {
        match s {
            "csv" => Ok(EmitFormat::Csv),
            "json" => Ok(EmitFormat::Json),
            other => Err(Error::Config(format!(
                "unknown format {other:?}; expected csv|json"
            ))),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    }
}

/// Renders the per-trial table: `trial,k,error_num,error_den,in_w1`, one row
/// per trial. The `in_w1` column is empty for rules without a heavy family.
pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("trial,k,error_num,error_den,in_w1\n");
    for r in records {
        let w1 = match r.in_w1 {
            Some(true) => "1",
            Some(false) => "0",
            None => "",
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.trial,
            r.k,
            r.error.numer(),
            r.error.denom(),
            w1
        ));
    }
    out
}

/// Writes the summary (JSON) or the trial table (CSV) to `path`; byte-stable
/// for a fixed configuration.
pub fn emit(
    summary: &Summary,
    records: &[TrialRecord],
    path: impl AsRef<Path>,
    format: EmitFormat,
) -> Result<()> {
    let path = path.as_ref();
    let payload = match format {
        EmitFormat::Csv => trials_csv(records),
        EmitFormat::Json => summary_json(summary)?,
    };
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(payload.as_bytes())
        .map_err(|e| io_err(path, e))?;
    Ok(())
}

pub fn summary_json(summary: &Summary) -> Result<String> {
    serde_json::to_string_pretty(summary)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Internal(format!("summary serialization failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(rule: RuleKind, n: usize, trials: u64, seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(n, 1, Ratio::new(1, 5), rule, trials, seed).unwrap()
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("0.1").unwrap(), Ratio::new(1, 10));
        assert_eq!(parse_ratio("0.25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("1/4").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("2").unwrap(), Ratio::from_integer(2));
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1/0").is_err());
    }

    #[test]
    fn default_threshold_value() {
        // d/(16*delta*n) at n=50, delta=1/10, d=1 is 1/80
        assert_eq!(
            default_threshold(50, 1, Ratio::new(1, 10)).unwrap(),
            Ratio::new(1, 80)
        );
    }

    #[test]
    fn closure_trials_have_zero_error() {
        let exp = Experiment::new(config(RuleKind::Closure, 5, 200, 7)).unwrap();
        let (summary, records) = exp.monte_carlo().unwrap();
        assert_eq!(summary.mean_error, 0.0);
        assert!(records.iter().all(|r| r.error == Ratio::new(0, 1)));
        assert!(summary.tails.iter().all(|t| t.count == 0));
        assert!(summary.pr_in_w1.is_none());
    }

    #[test]
    fn trials_are_reproducible() {
        let exp = Experiment::new(config(RuleKind::Adversarial, 4, 50, 3)).unwrap();
        let a = exp.run_trial(17).unwrap();
        let b = exp.run_trial(17).unwrap();
        assert_eq!(a, b);
        let (s1, r1) = exp.monte_carlo().unwrap();
        let (s2, r2) = exp.monte_carlo().unwrap();
        assert_eq!(r1, r2);
        assert_eq!(summary_json(&s1).unwrap(), summary_json(&s2).unwrap());
    }

    #[test]
    fn draw_dedup_matches_k() {
        let exp = Experiment::new(config(RuleKind::Closure, 6, 100, 9)).unwrap();
        let (_, records) = exp.monte_carlo().unwrap();
        for r in records {
            let unique: std::collections::BTreeSet<u16> = r.draws.iter().copied().collect();
            assert_eq!(unique.len(), r.k);
            assert_eq!(r.draws.len(), 6);
        }
    }

    #[test]
    fn aggregation_is_order_independent() {
        let exp = Experiment::new(config(RuleKind::Adversarial, 4, 300, 2)).unwrap();
        let (summary, mut records) = exp.monte_carlo().unwrap();
        records.reverse();
        let resummed = Summary::from_records(exp.config(), &records).unwrap();
        assert_eq!(summary_json(&summary).unwrap(), summary_json(&resummed).unwrap());
    }

    #[test]
    fn exact_distribution_small_n() {
        // n=2, m=4: Pr[k=1] = 4/16, Pr[k=2] = 12/16
        let exp = Experiment::new(config(RuleKind::Closure, 2, 1, 0)).unwrap();
        let law = exp.exact_distribution().unwrap();
        // closure: all the mass sits at error zero
        assert_eq!(law.support.len(), 1);
        assert_eq!(law.support[0].0, Ratio::new(0, 1));
        assert!(law.support[0].1.is_one());
        assert!(law.mean.is_zero());

        // surjection counts drive the k-distribution
        assert_eq!(surjection_count(2, 1), BigInt::from(1));
        assert_eq!(surjection_count(2, 2), BigInt::from(2));
        // Pr[k=1] = C(4,1)*1/16
        let pk1 = BigRational::new(BigInt::from(4), BigInt::from(16));
        assert_eq!(pk1, BigRational::new(BigInt::from(1), BigInt::from(4)));
    }

    #[test]
    fn exact_distribution_rejects_large_n() {
        let exp = Experiment::new(config(RuleKind::Closure, 7, 1, 0)).unwrap();
        assert!(matches!(
            exp.exact_distribution(),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn sampler_agrees_with_oracle_at_small_n() {
        let cfg = config(RuleKind::Adversarial, 3, 20_000, 1);
        let exp = Experiment::new(cfg).unwrap();
        let law = exp.exact_distribution().unwrap();
        let (summary, _) = exp.monte_carlo().unwrap();
        let diff = (summary.mean_error - law.mean_f64()).abs();
        assert!(
            diff <= 3.0 * summary.std_error.max(1e-9),
            "mean {} vs exact {} (3se = {})",
            summary.mean_error,
            law.mean_f64(),
            3.0 * summary.std_error
        );
    }

    #[test]
    fn sampler_matches_the_whole_exact_tail() {
        let cfg = config(RuleKind::Adversarial, 4, 50_000, 3);
        let exp = Experiment::new(cfg).unwrap();
        let law = exp.exact_distribution().unwrap();
        let (_, records) = exp.monte_carlo().unwrap();
        let t = records.len() as f64;
        for (level, _) in &law.support {
            if *level == Ratio::new(0, 1) {
                continue;
            }
            let exact = law.tail_mass(*level).to_f64().unwrap();
            let empirical =
                records.iter().filter(|r| r.error >= *level).count() as f64 / t;
            let se = (exact * (1.0 - exact) / t).sqrt();
            assert!(
                (empirical - exact).abs() <= 4.0 * se + 1e-9,
                "tail at {level}: empirical {empirical} vs exact {exact}"
            );
        }
    }

    #[test]
    fn w1_trials_respect_the_error_bound() {
        let exp = Experiment::new(config(RuleKind::Adversarial, 4, 2_000, 0)).unwrap();
        let (summary, _) = exp.monte_carlo().unwrap();
        assert_eq!(summary.w1_bound_violations, Some(0));
    }

    #[test]
    fn csv_shape() {
        let exp = Experiment::new(config(RuleKind::Adversarial, 3, 25, 4)).unwrap();
        let (_, records) = exp.monte_carlo().unwrap();
        let csv = trials_csv(&records);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 26, "header plus one row per trial");
        assert_eq!(lines[0], "trial,k,error_num,error_den,in_w1");
        assert!(lines[1].split(',').count() == 5);

        let closure = Experiment::new(config(RuleKind::Closure, 3, 5, 4)).unwrap();
        let (_, records) = closure.monte_carlo().unwrap();
        assert!(trials_csv(&records).lines().nth(1).unwrap().ends_with(','));
    }

    #[test]
    fn mean_dominates_threshold_times_tail() {
        // the Markov direction holds empirically, as an internal sanity check
        let mut cfg = config(RuleKind::Adversarial, 6, 3_000, 11);
        cfg.thresholds = vec![
            Ratio::new(1, 12),
            Ratio::new(1, 6),
            Ratio::new(1, 3),
        ];
        let exp = Experiment::new(cfg).unwrap();
        let (summary, _) = exp.monte_carlo().unwrap();
        for tail in &summary.tails {
            let parts: Vec<u64> = tail
                .threshold
                .split('/')
                .map(|p| p.parse().unwrap())
                .collect();
            let t = parts[0] as f64 / parts[1] as f64;
            assert!(summary.mean_error >= t * tail.frequency - 1e-12);
        }
        // tail frequencies are monotone non-increasing in the threshold
        for pair in summary.tails.windows(2) {
            assert!(pair[0].frequency >= pair[1].frequency);
        }
    }

    #[test]
    fn empty_threshold_config_omits_tails() {
        let mut cfg = config(RuleKind::Closure, 3, 5, 0);
        cfg.thresholds.clear();
        let exp = Experiment::new(cfg).unwrap();
        let (summary, _) = exp.monte_carlo().unwrap();
        let json = summary_json(&summary).unwrap();
        assert!(!json.contains("\"tails\""));
    }
}
