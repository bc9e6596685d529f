//! Command drivers: parse user input, run a computation, return a [`Table`].
//!
//! Every table carries the [`RunConfig`] that produced it in its metadata
//! block, so a file can be regenerated from its own header with
//! [`RunConfig::from_output`] and [`run`].

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{cutoff_k, ell_approx, ell_from_linf, regime_prediction, Regime};
use crate::distances::{distance_report, linf_partition, sep_partition, spectrum, sst_tail_mc, ClosedForm};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::report::{Cell, Format, Table};
use crate::scalar::{factorial, Backend, Scalar};
use crate::shuffle::{
    convolve_power, empirical_law, exact_law, sample_counts, BiasVector, Direction, DEFAULT_SST_KMAX,
};
use crate::{validation, Caps};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Trials used by stochastic commands when none are given.
pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Distances,
    Simulate,
    Sst,
    Cutoff,
    Spectrum,
    Asym,
    Validate,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Distances => "distances",
            Command::Simulate => "simulate",
            Command::Sst => "sst",
            Command::Cutoff => "cutoff",
            Command::Spectrum => "spectrum",
            Command::Asym => "asym",
            Command::Validate => "validate",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Command::Simulate | Command::Sst)
    }
}

/// Everything needed to reproduce one output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub version: String,
    pub n: usize,
    /// θ as typed: `p/q`, a decimal, or a comma-separated bias vector.
    pub theta: String,
    pub k: Vec<u32>,
    pub c: Vec<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub backend: Backend,
    pub sampler: Direction,
    pub caps: Caps,
    pub format: Format,
    /// Destination file. Not embedded in the header, so the same run written
    /// to two places gives identical bytes.
    #[serde(skip)]
    pub out: Option<String>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            version: VERSION.to_string(),
            n: 0,
            theta: "1/2".into(),
            k: Vec::new(),
            c: Vec::new(),
            trials: None,
            seed: None,
            backend: Backend::Float,
            sampler: Direction::Forward,
            caps: Caps::default(),
            format: Format::Csv,
            out: None,
        }
    }

    pub fn to_header(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Recovers the configuration embedded in a CSV or JSON output file.
    pub fn from_output(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(text)
                .map_err(|e| Error::invalid(format!("not a JSON output file: {e}")))?;
            let cfg = v
                .get("meta")
                .and_then(|m| m.get("config"))
                .ok_or_else(|| Error::invalid("JSON output has no meta.config"))?;
            return serde_json::from_value(cfg.clone())
                .map_err(|e| Error::invalid(format!("bad config: {e}")));
        }
        let line = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix("# config: "))
            .ok_or_else(|| Error::invalid("CSV output has no `# config:` header line"))?;
        serde_json::from_str(line).map_err(|e| Error::invalid(format!("bad config: {e}")))
    }

    fn validate(&self) -> Result<()> {
        if self.command != Command::Validate && self.n == 0 {
            return Err(Error::invalid("--n is required and must be at least 1"));
        }
        if self.command.is_stochastic() {
            if self.seed.is_none() {
                return Err(Error::invalid(format!(
                    "`{}` needs --seed",
                    self.command.as_str()
                )));
            }
            if self.trials == Some(0) {
                return Err(Error::invalid("--trials must be at least 1"));
            }
        }
        Ok(())
    }

    fn trials(&self) -> u64 {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    fn ks_or(&self, default: &[u32]) -> Vec<u32> {
        if self.k.is_empty() {
            default.to_vec()
        } else {
            self.k.clone()
        }
    }

    fn table(&self, kind: &str, columns: &[&str]) -> Table {
        let mut t = Table::new(kind, columns);
        t.meta("version", &self.version);
        t.meta("config", self.to_header());
        t
    }
}

/// Parses a non-negative exact rational: `p/q`, an integer, or a decimal with
/// optional exponent (`0.35`, `35e-2`).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("`{s}` is not an exact rational (use p/q or a decimal)"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::invalid(format!("`{s}` has a zero denominator")));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int}{frac}");
    if digits.is_empty()
        || !digits
            .trim_start_matches(['-', '+'])
            .chars()
            .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-shift) as usize))
    })
}

fn parse_float(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad number `{s}`")))?;
        let q: f64 = q
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad number `{s}`")))?;
        return Ok(p / q);
    }
    s.parse().map_err(|_| Error::invalid(format!("bad number `{s}`")))
}

/// A single value `θ` means the two-pile vector `(θ, 1-θ)`; a comma list is
/// taken as the full bias vector and must sum to 1.
pub fn parse_theta_exact(s: &str) -> Result<BiasVector<BigRational>> {
    let parts: Vec<BigRational> = s.split(',').map(parse_rational).collect::<Result<_>>()?;
    if parts.len() == 1 {
        BiasVector::two_pile(parts.into_iter().next().expect("one entry"))
    } else {
        BiasVector::new(parts)
    }
}

pub fn parse_theta_float(s: &str) -> Result<BiasVector<f64>> {
    let parts: Vec<f64> = s.split(',').map(parse_float).collect::<Result<_>>()?;
    if parts.len() == 1 {
        BiasVector::two_pile(parts[0])
    } else {
        BiasVector::new(parts)
    }
}

/// `θ` of a two-pile vector.
fn two_pile_theta(theta: &BiasVector<f64>) -> Result<f64> {
    match theta.weights() {
        [t, _] => Ok(*t),
        _ => Err(Error::invalid("this command needs a two-pile θ (a single value)")),
    }
}

/// `7`, `1,2,5`, `1..30` (inclusive) or `2..30:4`.
pub fn parse_k_range(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::invalid(format!("bad k range `{s}` (examples: 7, 1,2,5, 1..30, 2..30:4)"));
    let s = s.trim();
    let ks: Vec<u32> = if let Some((a, rest)) = s.split_once("..") {
        let rest = rest.strip_prefix('=').unwrap_or(rest);
        let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let a: u32 = a.trim().parse().map_err(|_| bad())?;
        let b: u32 = b.trim().parse().map_err(|_| bad())?;
        let step: usize = step.trim().parse().map_err(|_| bad())?;
        if step == 0 {
            return Err(bad());
        }
        (a..=b).step_by(step).collect()
    } else {
        s.split(',')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if ks.is_empty() {
        return Err(Error::invalid(format!("k range `{s}` is empty")));
    }
    Ok(ks)
}

/// `-4..4` (unit steps, inclusive), `-1..1:0.25`, or a comma list.
pub fn parse_c_range(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::invalid(format!("bad c range `{s}` (examples: 0, -4..4, -1..1:0.25)"));
    let s = s.trim();
    let num = |x: &str| x.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    let cs: Vec<f64> = match s.split_once("..") {
        Some((a, rest)) => {
            let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
            let (a, b, step) = (
                num(a).ok_or_else(bad)?,
                num(b).ok_or_else(bad)?,
                num(step).ok_or_else(bad)?,
            );
            if step <= 0.0 {
                return Err(bad());
            }
            let count = ((b - a) / step + 1e-9).floor();
            if count < 0.0 {
                Vec::new()
            } else {
                (0..=count as usize).map(|i| a + i as f64 * step).collect()
            }
        }
        None => s
            .split(',')
            .map(|p| num(p).ok_or_else(bad))
            .collect::<Result<_>>()?,
    };
    if cs.is_empty() {
        return Err(Error::invalid(format!("c range `{s}` is empty")));
    }
    Ok(cs)
}

/// Runs one command.
pub fn run(cfg: &RunConfig) -> Result<Table> {
    cfg.validate()?;
    match cfg.command {
        Command::Distances => match cfg.backend {
            Backend::Exact => distances::<BigRational>(cfg, &parse_theta_exact(&cfg.theta)?),
            Backend::Float => distances::<f64>(cfg, &parse_theta_float(&cfg.theta)?),
        },
        Command::Simulate => simulate(cfg),
        Command::Sst => sst(cfg),
        Command::Cutoff => match cfg.backend {
            Backend::Exact => cutoff::<BigRational>(cfg, &parse_theta_exact(&cfg.theta)?),
            Backend::Float => cutoff::<f64>(cfg, &parse_theta_float(&cfg.theta)?),
        },
        Command::Spectrum => match cfg.backend {
            Backend::Exact => spectrum_table::<BigRational>(cfg, &parse_theta_exact(&cfg.theta)?),
            Backend::Float => spectrum_table::<f64>(cfg, &parse_theta_float(&cfg.theta)?),
        },
        Command::Asym => asym(cfg),
        Command::Validate => Ok(validate(cfg)),
    }
}

fn distances<S: ClosedForm>(cfg: &RunConfig, theta: &BiasVector<S>) -> Result<Table> {
    let report = distance_report(cfg.n, theta, &cfg.ks_or(&(1..=10).collect::<Vec<_>>()), &cfg.caps)?;
    let mut t = report.to_table(&cfg.theta);
    let body = std::mem::take(&mut t.meta);
    t.meta("version", &cfg.version);
    t.meta("config", cfg.to_header());
    t.meta.extend(body);
    Ok(t)
}

/// Exact law of `k` shuffles as floats, or `None` when `a^k` is over the cap.
fn exact_law_f64(cfg: &RunConfig, k: u32) -> Result<Option<Vec<f64>>> {
    fn go<S: Scalar>(n: usize, theta: &BiasVector<S>, k: u32, caps: &Caps) -> Result<Option<Vec<f64>>> {
        match convolve_power(theta, k, caps) {
            Ok(tk) => Ok(Some(
                exact_law(n, &tk, caps)?
                    .dense()
                    .iter()
                    .map(Scalar::to_f64)
                    .collect(),
            )),
            Err(Error::Capacity { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }
    match cfg.backend {
        Backend::Exact => go(cfg.n, &parse_theta_exact(&cfg.theta)?, k, &cfg.caps),
        Backend::Float => go(cfg.n, &parse_theta_float(&cfg.theta)?, k, &cfg.caps),
    }
}

fn simulate(cfg: &RunConfig) -> Result<Table> {
    let theta = parse_theta_float(&cfg.theta)?;
    let trials = cfg.trials();
    let seed = cfg.seed.expect("validated");
    let mut t = cfg.table("simulate", &["k", "word", "count", "freq", "stderr", "exact"]);
    for k in cfg.ks_or(&[1]) {
        let counts = sample_counts(cfg.n, &theta, k, trials, seed, cfg.sampler, &cfg.caps)?;
        let exact = exact_law_f64(cfg, k)?;
        let empirical = empirical_law(cfg.n, &counts)?;
        if let Some(exact) = &exact {
            let tv = 0.5
                * empirical
                    .dense()
                    .iter()
                    .zip(exact)
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>();
            t.meta(&format!("tv_empirical_k{k}"), crate::report::format_float(tv));
        }
        for (rank, (&count, &freq)) in counts.iter().zip(empirical.dense()).enumerate() {
            let word = Permutation::from_lex_rank(cfg.n, rank);
            t.push(vec![
                Some(k.into()),
                Some(word.to_string().into()),
                Some(Cell::Int(count as i64)),
                Some(freq.into()),
                Some((freq * (1.0 - freq) / trials as f64).sqrt().into()),
                exact.as_ref().map(|e| e[rank].into()),
            ]);
        }
    }
    Ok(t)
}

fn sep_exact_f64(cfg: &RunConfig, k: u32) -> Result<Option<f64>> {
    if cfg.n > cfg.caps.partitions {
        return Ok(None);
    }
    Ok(Some(match cfg.backend {
        Backend::Exact => sep_partition(cfg.n, &parse_theta_exact(&cfg.theta)?, k, &cfg.caps)?.to_f64(),
        Backend::Float => sep_partition(cfg.n, &parse_theta_float(&cfg.theta)?, k, &cfg.caps)?,
    }))
}

fn sst(cfg: &RunConfig) -> Result<Table> {
    let theta = parse_theta_float(&cfg.theta)?;
    let k_max = cfg.k.iter().copied().max().unwrap_or(DEFAULT_SST_KMAX);
    let tail = sst_tail_mc(cfg.n, &theta, k_max, cfg.trials(), cfg.seed.expect("validated"))?;
    let mut t = cfg.table("sst", &["k", "tail", "stderr", "sep_exact", "gap"]);
    t.meta("trials", tail.trials);
    t.meta("censored", tail.censored);
    let mut max_gap: Option<f64> = None;
    for k in 0..=k_max {
        let sep = sep_exact_f64(cfg, k)?;
        let gap = sep.map(|s| (tail.tail[k as usize] - s).abs());
        if let Some(g) = gap {
            max_gap = Some(max_gap.map_or(g, |m| m.max(g)));
        }
        t.push(vec![
            Some(k.into()),
            Some(tail.tail[k as usize].into()),
            Some(tail.stderr[k as usize].into()),
            sep.map(Cell::from),
            gap.map(Cell::from),
        ]);
    }
    if let Some(g) = max_gap {
        t.meta("max_gap", crate::report::format_float(g));
    }
    Ok(t)
}

fn cutoff<S: ClosedForm>(cfg: &RunConfig, theta: &BiasVector<S>) -> Result<Table> {
    let th = two_pile_theta(&theta.to_f64())?;
    let cs = if cfg.c.is_empty() {
        parse_c_range("-4..4")?
    } else {
        cfg.c.clone()
    };
    let mut t = cfg.table(
        "cutoff",
        &[
            "c",
            "k",
            "sep_exact",
            "sep_limit",
            "sep_gap",
            "linf_exact",
            "linf_limit",
            "linf_gap",
        ],
    );
    for c in cs {
        let k = cutoff_k(cfg.n, th, c)?;
        let k: u32 = k
            .try_into()
            .map_err(|_| Error::invalid(format!("c = {c} gives k = {k} < 0; raise c")))?;
        let limit = regime_prediction(Regime::Fixed { c })?;
        let sep_limit = limit.sep.expect("fixed regime predicts separation");
        let sep = sep_partition(cfg.n, theta, k, &cfg.caps)?.to_f64();
        let linf = linf_partition(cfg.n, theta, k, &cfg.caps)?.to_f64();
        t.push(vec![
            Some(c.into()),
            Some(k.into()),
            Some(sep.into()),
            Some(sep_limit.into()),
            Some((sep - sep_limit).into()),
            Some(linf.into()),
            Some(limit.linf.into()),
            Some((linf - limit.linf).into()),
        ]);
    }
    Ok(t)
}

fn spectrum_table<S: Scalar + std::fmt::Display>(cfg: &RunConfig, theta: &BiasVector<S>) -> Result<Table> {
    let entries = spectrum(cfg.n, theta, &cfg.caps)?;
    let mut t = cfg.table(
        "spectrum",
        &["shape", "eigenvalue", "eigenvalue_exact", "multiplicity"],
    );
    let mut checksum = num_bigint::BigUint::zero();
    let mut trace = S::zero();
    for e in &entries {
        checksum += &e.multiplicity;
        trace += &(e.eigenvalue.clone() * S::from_biguint(&e.multiplicity));
        t.push(vec![
            Some(e.shape.to_string().into()),
            Some(e.eigenvalue.to_f64().into()),
            (S::BACKEND == Backend::Exact).then(|| e.eigenvalue.to_string().into()),
            Some(e.multiplicity.to_string().into()),
        ]);
    }
    t.meta("classes", entries.len());
    t.meta("multiplicity_sum", &checksum);
    t.meta("n_factorial", factorial(cfg.n as u64));
    t.meta("checksum_ok", checksum == factorial(cfg.n as u64));
    t.meta(
        "trace",
        if S::BACKEND == Backend::Exact {
            trace.to_string()
        } else {
            crate::report::format_float(trace.to_f64())
        },
    );
    Ok(t)
}

fn asym(cfg: &RunConfig) -> Result<Table> {
    let theta = two_pile_theta(&parse_theta_float(&cfg.theta)?)?;
    let mut t = cfg.table(
        "asym",
        &[
            "k",
            "M",
            "ell_approx",
            "threshold",
            "valid",
            "last_j",
            "tail_bound",
            "error_scale",
            "ell_exact",
            "rel_error",
        ],
    );
    for k in cfg.ks_or(&[1]) {
        let est = ell_approx(cfg.n, theta, k as f64)?;
        let exact = if cfg.n <= cfg.caps.partitions {
            let linf = match cfg.backend {
                Backend::Exact => {
                    linf_partition(cfg.n, &parse_theta_exact(&cfg.theta)?, k, &cfg.caps)?.to_f64()
                }
                Backend::Float => linf_partition(cfg.n, &parse_theta_float(&cfg.theta)?, k, &cfg.caps)?,
            };
            Some(ell_from_linf(linf))
        } else {
            None
        };
        t.push(vec![
            Some(k.into()),
            Some(est.m.into()),
            Some(est.ell_approx.into()),
            Some(est.threshold.into()),
            Some(est.valid.into()),
            Some(est.last_j.into()),
            Some(est.tail_bound.into()),
            Some(est.error_scale().into()),
            exact.map(Cell::from),
            exact.map(|e| Cell::from((e / est.ell_approx - 1.0).abs())),
        ]);
    }
    Ok(t)
}

fn validate(cfg: &RunConfig) -> Table {
    let results = validation::run_all(&cfg.caps);
    let mut t = cfg.table("validate", &["id", "name", "passed", "seconds", "detail"]);
    t.meta("passed", results.iter().filter(|r| r.passed).count());
    t.meta("total", results.len());
    for r in results {
        t.push(vec![
            Some(r.id.into()),
            Some(r.name.into()),
            Some(r.passed.into()),
            Some(((r.elapsed.as_secs_f64() * 1000.0).round() / 1000.0).into()),
            Some(r.detail.into()),
        ]);
    }
    t
}

/// `true` when every row of a `validate` table passed.
pub fn all_passed(t: &Table) -> bool {
    let col = t.column("passed").expect("validate table");
    t.rows.iter().all(|r| matches!(r[col], Some(Cell::Bool(true))))
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::from(s))
            .map_err(|_| Error::invalid(format!("unknown command `{s}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn rationals_parse_exactly() {
        assert_eq!(parse_rational("7/20").unwrap(), q(7, 20));
        assert_eq!(parse_rational("0.35").unwrap(), q(7, 20));
        assert_eq!(parse_rational("35e-2").unwrap(), q(7, 20));
        assert_eq!(parse_rational("1").unwrap(), q(1, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("pi").is_err());
        assert!(parse_rational("nan").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_theta_exact("1.5").is_err());
        assert_eq!(parse_theta_exact("0.3").unwrap().weights(), &[q(3, 10), q(7, 10)]);
        assert_eq!(
            parse_theta_float("1/4,1/4,1/2").unwrap().weights(),
            &[0.25, 0.25, 0.5]
        );
        assert!(parse_theta_exact("1/4,1/4").is_err());
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_k_range("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_k_range("1..=3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_k_range("2..10:4").unwrap(), vec![2, 6, 10]);
        assert_eq!(parse_k_range("5, 7").unwrap(), vec![5, 7]);
        assert!(parse_k_range("3..1").is_err());
        assert!(parse_k_range("").is_err());
        assert_eq!(parse_c_range("-1..1").unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(
            parse_c_range("0..1:0.25").unwrap(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(parse_c_range("2").unwrap(), vec![2.0]);
        assert!(parse_c_range("1..0").is_err());
    }

    fn cfg(command: Command, n: usize, theta: &str) -> RunConfig {
        RunConfig {
            n,
            theta: theta.into(),
            ..RunConfig::new(command)
        }
    }

    #[test]
    fn distances_small_rows() {
        let mut c = cfg(Command::Distances, 2, "0.3");
        c.k = vec![1];
        c.backend = Backend::Exact;
        let t = run(&c).unwrap();
        let csv = t.to_csv();
        assert!(csv.contains("2,0.3,1,sep_partition,0.58,\n"), "{csv}");
        assert!(csv.contains("2,0.3,1,linf_partition,0.58,\n"));
    }

    #[test]
    fn stochastic_commands_need_a_seed() {
        let c = cfg(Command::Sst, 3, "1/2");
        assert!(matches!(run(&c), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn header_round_trip() {
        let mut c = cfg(Command::Simulate, 3, "1/2");
        c.seed = Some(9);
        c.trials = Some(10);
        c.k = vec![1, 2];
        let out = run(&c).unwrap();
        for format in [Format::Csv, Format::Json] {
            let text = out.render(format);
            let back = RunConfig::from_output(&text).unwrap();
            assert_eq!(back, c);
            assert_eq!(run(&back).unwrap().render(format), text);
        }
    }

    #[test]
    fn cutoff_limits() {
        let mut c = cfg(Command::Cutoff, 52, "0.5");
        c.c = vec![0.0, 4.0, -2.0];
        let t = run(&c).unwrap();
        assert_eq!(t.value(0, "k"), Some(10.0));
        assert!((t.value(0, "sep_limit").unwrap() - 0.63212).abs() < 1e-5);
        assert!((t.value(0, "linf_limit").unwrap() - 1.71828).abs() < 1e-5);
        assert!((t.value(1, "sep_limit").unwrap() - 0.01815).abs() < 1e-5);
        assert!((t.value(2, "sep_limit").unwrap() - 0.99938).abs() < 1e-5);
    }

    #[test]
    fn spectrum_checksum() {
        let mut c = cfg(Command::Spectrum, 3, "1/2");
        c.backend = Backend::Exact;
        let t = run(&c).unwrap();
        assert_eq!(t.rows.len(), 3);
        let csv = t.to_csv();
        assert!(csv.contains("# multiplicity_sum: 6\n"));
        assert!(csv.contains("# trace: 3\n"));
    }

    #[test]
    fn asym_values_and_divergence() {
        let mut c = cfg(Command::Asym, 52, "0.5");
        c.k = vec![15];
        let t = run(&c).unwrap();
        assert!((t.value(0, "M").unwrap() - 0.0826).abs() < 1e-4);
        assert!(matches!(t.rows[0][4], Some(Cell::Bool(true))));
        c.k = vec![1];
        assert!(matches!(run(&c), Err(Error::Divergence(_))));
    }
}
