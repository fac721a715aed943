//! `cographon`: exact moments, samplers and numerical checks from the command
//! line. Tables go to stdout as CSV (default) or JSON; diagnostics go to
//! stderr.

use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Zero};
use serde_json::{json, Value};

use cographon::divisor::{self, DivisorSumSpec, WeightFunction};
use cographon::intervals::{max_independent_set, poisson_greedy_chain, sample_intervals};
use cographon::matching::{self, EvalMode};
use cographon::moments::{self, MomentPoly};
use cographon::montecarlo::{run_replicates, SummaryStats};
use cographon::rational::{format_rational, is_probability, parse_rational, to_f64};
use cographon::tree::{bruteforce_sk_distribution, coupled_sample, sample_sk};
use cographon::{BigRat, Error};

#[derive(Parser)]
#[command(name = "cographon", version, about = "Exact moments and simulations for distinct LCA counts in the Brownian CRT")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Seed for stochastic commands; replicate i uses stream i of this seed.
    #[arg(long, env = "COGRAPHON_SEED", default_value_t = 1, global = true)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Moment polynomials a_0..a_kmax, or their values at --p.
    Moments {
        #[arg(long = "kmax")]
        k_max: u64,
        /// Evaluation point as "num/den" in [0, 1].
        #[arg(long, value_parser = parse_probability)]
        p: Option<BigRat>,
    },
    /// Exact law of S_k.
    Distribution {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        /// Count over every tree instead (k <= 3).
        #[arg(long)]
        bruteforce: bool,
    },
    /// Draws of S_k from uniform random trees.
    SampleSk {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[command(flatten)]
        run: RunArgs,
        /// Also summarise p^{S_k} for this "num/den".
        #[arg(long, value_parser = parse_probability)]
        p: Option<BigRat>,
    },
    /// E S_k from the matching-probability sum.
    ExpectedSk {
        /// One or more k, comma separated.
        #[arg(long, value_delimiter = ',', required = true, value_parser = clap::value_parser!(u64).range(1..))]
        k: Vec<u64>,
        #[arg(long, default_value = "truncated", value_parser = parse_mode)]
        mode: EvalMode,
    },
    /// Independence number of random interval graphs, scaled by sqrt(k).
    Alpha {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Coupled excursion/interval draws; checks alpha <= s_disc.
    Coupled {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        /// Excursion half-length; defaults to 100 k.
        #[arg(long)]
        n: Option<u64>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Greedy chains of a unit Poisson process on [0, R]^2.
    PoissonChain {
        #[arg(long = "R", alias = "r")]
        window: f64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Divisor-weighted Riemann sums against their predictions.
    Divisor {
        /// One or more scales K, comma separated.
        #[arg(long = "K", alias = "kscale", value_delimiter = ',', required = true)]
        k: Vec<u64>,
        /// lca, lca-kernel, or a positive constant.
        #[arg(long, default_value = "lca", value_parser = parse_weight)]
        g: WeightFunction,
        /// Lower factor cutoff (default 1).
        #[arg(long)]
        a: Option<u64>,
        /// Upper factor cutoff (default K / ln K).
        #[arg(long)]
        b: Option<u64>,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, default_value_t = 100.0)]
        lambda: f64,
        /// Count every divisor pair (A = 1, B = lambda K); enables the
        /// second-order prediction.
        #[arg(long, conflicts_with_all = ["a", "b"])]
        unrestricted: bool,
    },
    /// Run the oracle cross-checks at small sizes.
    Validate,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
    /// Print only the summary, not one row per replicate.
    #[arg(long)]
    summary_only: bool,
}

fn parse_probability(s: &str) -> Result<BigRat, String> {
    let p = parse_rational(s).map_err(|e| e.to_string())?;
    if !is_probability(&p) {
        return Err(format!("{s} is not in [0, 1]"));
    }
    Ok(p)
}

fn parse_mode(s: &str) -> Result<EvalMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_weight(s: &str) -> Result<WeightFunction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Rows with a header, rendered as CSV or as a JSON array of objects.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write_csv(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::String(s) => s.clone(),
                    Value::Null => String::new(),
                    other => other.to_string(),
                })
                .collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| Value::Object(self.header.iter().map(|h| h.to_string()).zip(row.iter().cloned()).collect()))
                .collect(),
        )
    }
}

/// Everything a command prints: an optional seed line, a table and an
/// optional summary.
struct Report {
    seed: Option<u64>,
    table: Table,
    summary: Option<Value>,
}

impl Report {
    fn exact(table: Table) -> Self {
        Self {
            seed: None,
            table,
            summary: None,
        }
    }

    fn write(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Csv => {
                if let Some(seed) = self.seed {
                    writeln!(out, "# seed={seed}")?;
                }
                self.table.write_csv(out)?;
                if let Some(Value::Object(summary)) = &self.summary {
                    for (key, value) in summary {
                        writeln!(out, "# {key}={value}")?;
                    }
                }
            }
            Format::Json => {
                let mut doc = serde_json::Map::new();
                if let Some(seed) = self.seed {
                    doc.insert("seed".into(), json!(seed));
                }
                doc.insert("rows".into(), self.table.to_json());
                if let Some(summary) = &self.summary {
                    doc.insert("summary".into(), summary.clone());
                }
                serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

fn rat(r: &BigRat) -> Value {
    Value::String(format_rational(r))
}

fn stats_json(s: &SummaryStats) -> Value {
    serde_json::to_value(s).expect("plain struct")
}

fn cmd_moments(k_max: u64, p: Option<BigRat>) -> Report {
    match p {
        Some(p) => {
            let mut t = Table::new(&["k", "value"]);
            for (k, v) in moments::moments_at(k_max, &p).iter().enumerate() {
                t.push(vec![json!(k), rat(v)]);
            }
            Report::exact(t)
        }
        None => {
            let mut t = Table::new(&["k", "s", "num", "den"]);
            for poly in moments::moment_polys(k_max) {
                for (k, s, num, den) in poly.csv_rows() {
                    t.push(vec![json!(k), json!(s), Value::String(num.to_string()), Value::String(den.to_string())]);
                }
            }
            Report::exact(t)
        }
    }
}

fn moments_json(k_max: u64) -> Value {
    let polys: Vec<MomentPoly> = moments::moment_polys(k_max);
    serde_json::to_value(polys).expect("polynomials serialise")
}

fn cmd_distribution(k: u64, bruteforce: bool) -> anyhow::Result<Report> {
    let law = if bruteforce {
        bruteforce_sk_distribution(k as usize)?
    } else {
        moments::sk_distribution(k)?
    };
    let mut t = Table::new(&["k", "s", "probability", "probability_f64"]);
    for (i, pr) in law.iter().enumerate() {
        t.push(vec![json!(k), json!(i + 1), rat(pr), json!(to_f64(pr))]);
    }
    Ok(Report::exact(t))
}

fn cmd_sample_sk(k: u64, run: &RunArgs, p: Option<BigRat>, seed: u64) -> anyhow::Result<Report> {
    let draws = run_replicates(run.reps, seed, |_, rng| sample_sk(k as usize, rng))?;
    let mut t = Table::new(&["k", "replicate", "S_k"]);
    if !run.summary_only {
        for (i, s) in draws.iter().enumerate() {
            t.push(vec![json!(k), json!(i), json!(s)]);
        }
    }
    let values: Vec<f64> = draws.iter().map(|&s| s as f64).collect();
    let mut summary = json!({ "S_k": stats_json(&SummaryStats::from_values(&values, seed)?) });
    if let Some(p) = p {
        let pf = to_f64(&p);
        let pgf: Vec<f64> = draws.iter().map(|&s| pf.powi(s as i32)).collect();
        let stats = SummaryStats::from_values(&pgf, seed)?;
        let exact = moments::moments_at(k, &p).pop().expect("k + 1 values");
        summary["pgf"] = json!({
            "p": format_rational(&p),
            "stats": stats_json(&stats),
            "exact": format_rational(&exact),
            "z": stats.z_score(to_f64(&exact)),
        });
    }
    Ok(Report {
        seed: Some(seed),
        table: t,
        summary: Some(summary),
    })
}

fn cmd_expected_sk(ks: &[u64], mode: EvalMode) -> anyhow::Result<Report> {
    let mut t = Table::new(&["k", "ESk_exact", "ESk_float", "error_bound", "ratio_to_asymptote"]);
    for &k in ks {
        let k = k as usize;
        let (exact, float, bound) = match mode {
            EvalMode::Exact => {
                let e = matching::expected_sk_exact(k)?;
                let f = to_f64(&e);
                (rat(&e), f, json!(0.0))
            }
            EvalMode::Truncated => {
                let b = matching::expected_sk_truncated(k)?;
                (Value::Null, b.value, json!(b.error_bound))
            }
            EvalMode::Approx => (Value::Null, matching::expected_sk_approx(k)?, Value::Null),
        };
        let ratio = float / matching::expected_sk_asymptote(k);
        t.push(vec![json!(k), exact, json!(float), bound, json_f64(ratio)]);
    }
    Ok(Report::exact(t))
}

/// JSON has no infinities; those become null.
fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn cmd_alpha(k: u64, run: &RunArgs, seed: u64) -> anyhow::Result<Report> {
    let alphas = run_replicates(run.reps, seed, |_, rng| sample_intervals(k as usize, rng).map(|s| max_independent_set(&s)))?;
    let mut t = Table::new(&["k", "replicate", "alpha"]);
    if !run.summary_only {
        for (i, a) in alphas.iter().enumerate() {
            t.push(vec![json!(k), json!(i), json!(a)]);
        }
    }
    let scaled: Vec<f64> = alphas.iter().map(|&a| a as f64 / (k as f64).sqrt()).collect();
    let stats = SummaryStats::from_values(&scaled, seed)?;
    Ok(Report {
        seed: Some(seed),
        table: t,
        summary: Some(json!({ "alpha_over_sqrt_k": stats_json(&stats), "target": 2.0 / std::f64::consts::PI.sqrt() })),
    })
}

fn cmd_coupled(k: u64, n: Option<u64>, run: &RunArgs, seed: u64) -> anyhow::Result<Report> {
    let n = n.unwrap_or(100 * k);
    let draws = run_replicates(run.reps, seed, |_, rng| coupled_sample(k as usize, n as usize, rng))?;
    let mut t = Table::new(&["k", "replicate", "s_disc", "alpha"]);
    if !run.summary_only {
        for (i, d) in draws.iter().enumerate() {
            t.push(vec![json!(k), json!(i), json!(d.s_disc), json!(d.alpha)]);
        }
    }
    let violations = draws.iter().filter(|d| d.alpha > d.s_disc).count();
    let s: Vec<f64> = draws.iter().map(|d| d.s_disc as f64).collect();
    let a: Vec<f64> = draws.iter().map(|d| d.alpha as f64).collect();
    Ok(Report {
        seed: Some(seed),
        table: t,
        summary: Some(json!({
            "n": n,
            "violations": violations,
            "s_disc": stats_json(&SummaryStats::from_values(&s, seed)?),
            "alpha": stats_json(&SummaryStats::from_values(&a, seed)?),
        })),
    })
}

fn cmd_poisson_chain(window: f64, run: &RunArgs, seed: u64) -> anyhow::Result<Report> {
    let chains = run_replicates(run.reps, seed, |_, rng| poisson_greedy_chain(window, rng))?;
    let mut t = Table::new(&["R", "replicate", "F_R", "mean_gap"]);
    let mut all_gaps = Vec::new();
    let mut f_over_r = Vec::new();
    for (i, c) in chains.iter().enumerate() {
        let gaps = c.gaps();
        let mean = gaps.iter().sum::<f64>() / gaps.len().max(1) as f64;
        if !run.summary_only {
            t.push(vec![json!(window), json!(i), json!(c.f_r()), json_f64(if gaps.is_empty() { f64::NAN } else { mean })]);
        }
        f_over_r.push(c.f_r() as f64 / window);
        all_gaps.extend(gaps);
    }
    let mut summary = json!({
        "F_R_over_R": stats_json(&SummaryStats::from_values(&f_over_r, seed)?),
        "gap_target": std::f64::consts::PI.sqrt() / 2.0,
    });
    if !all_gaps.is_empty() {
        summary["gaps"] = stats_json(&SummaryStats::from_values(&all_gaps, seed)?);
    }
    Ok(Report {
        seed: Some(seed),
        table: t,
        summary: Some(summary),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_divisor(
    ks: &[u64],
    g: WeightFunction,
    a: Option<u64>,
    b: Option<u64>,
    eps: f64,
    lambda: f64,
    unrestricted: bool,
) -> anyhow::Result<Report> {
    let mut t = Table::new(&["K", "sum", "leading_prediction", "second_order_prediction", "ratio"]);
    for &k in ks {
        let spec = if unrestricted {
            DivisorSumSpec::unrestricted(k, eps, lambda)?
        } else {
            let mut spec = DivisorSumSpec::with_defaults(k)?;
            spec.eps = eps;
            spec.lambda = lambda;
            if let Some(a) = a {
                spec.a = a;
            }
            if let Some(b) = b {
                spec.b = b;
            }
            spec.validate()?;
            spec
        };
        let row = divisor::divisor_row(&spec, &g)?;
        t.push(vec![
            json!(row.k),
            json!(row.sum),
            json!(row.leading),
            row.second_order.map_or(Value::Null, |v| json!(v)),
            json!(row.ratio),
        ]);
    }
    Ok(Report::exact(t))
}

/// Small-size oracle checks; one row per check.
fn cmd_validate() -> anyhow::Result<(Report, bool)> {
    let mut checks: Vec<(&'static str, bool)> = Vec::new();

    let half = BigRat::new(1.into(), 2.into());
    let expected = ["1", "1/2", "17/60", "7/40", "6361/55440", "1741/22176", "154917299/2793510720"];
    let got: Vec<String> = moments::moments_at(6, &half).iter().map(format_rational).collect();
    checks.push(("moments at p = 1/2 for k <= 6", got == expected));

    let oracle = (1..=3).all(|k| bruteforce_sk_distribution(k).ok() == moments::sk_distribution(k as u64).ok());
    checks.push(("recurrence law equals tree enumeration for k <= 3", oracle));

    let cross = (1..=6).all(|k| matching::expected_sk_exact(k).ok() == moments::factorial_moment_at_one(k as u64, 1).ok());
    checks.push(("matching sum equals recurrence E S_k for k <= 6", cross));

    let mut matches = true;
    let mut bound = true;
    for kt in (2..=8).step_by(2) {
        for p in 1..kt {
            for q in 1..=kt - p {
                let c = matching::match_prob_exact(p, q, kt)?;
                matches &= c == matching::bruteforce_match_prob(&[(p, q)], kt)?;
                bound &= c <= BigRat::new(((p * q) as i64).into(), (kt as i64 - 1).into());
            }
        }
    }
    checks.push(("matching probability equals enumeration for K <= 8", matches));
    checks.push(("matching probability at most pq/(K-1)", bound));

    let law_ok = (2..=30).step_by(2).all(|kt| {
        let mut total = BigRat::zero();
        for p in 1..kt {
            for q in 1..=kt - p {
                total += matching::subtree_law(p, q, kt).expect("admissible");
            }
        }
        total.is_one()
    });
    checks.push(("subtree-size law sums to one for K <= 30", law_ok));

    let d_ok = divisor::divisor_summatory(10)? == 27 && divisor::restricted_divisor_count(12, 1, 12)? == 6;
    checks.push(("divisor counts", d_ok));

    let mut t = Table::new(&["check", "result"]);
    let mut all = true;
    for (name, ok) in checks {
        all &= ok;
        t.push(vec![json!(name), json!(if ok { "PASS" } else { "FAIL" })]);
    }
    Ok((Report::exact(t), all))
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let seed = cli.seed;
    let mut ok = true;
    let report = match &cli.command {
        Command::Moments { k_max, p } => {
            if cli.format == Format::Json && p.is_none() {
                serde_json::to_writer_pretty(&mut out, &moments_json(*k_max))?;
                writeln!(out)?;
                out.flush()?;
                return Ok(true);
            }
            cmd_moments(*k_max, p.clone())
        }
        Command::Distribution { k, bruteforce } => cmd_distribution(*k, *bruteforce)?,
        Command::SampleSk { k, run, p } => cmd_sample_sk(*k, run, p.clone(), seed)?,
        Command::ExpectedSk { k, mode } => cmd_expected_sk(k, *mode)?,
        Command::Alpha { k, run } => cmd_alpha(*k, run, seed)?,
        Command::Coupled { k, n, run } => {
            let report = cmd_coupled(*k, *n, run, seed)?;
            ok = report.summary.as_ref().is_some_and(|s| s["violations"] == 0);
            report
        }
        Command::PoissonChain { window, run } => cmd_poisson_chain(*window, run, seed)?,
        Command::Divisor {
            k,
            g,
            a,
            b,
            eps,
            lambda,
            unrestricted,
        } => cmd_divisor(k, *g, *a, *b, *eps, *lambda, *unrestricted)?,
        Command::Validate => {
            let (report, all) = cmd_validate()?;
            ok = all;
            report
        }
    };
    report.write(cli.format, &mut out)?;
    out.flush()?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("cographon: one or more checks failed");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("cographon: {err:#}");
            let usage = matches!(
                err.downcast_ref::<Error>(),
                Some(Error::InvalidArgument(_) | Error::MalformedRational(_))
            );
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
