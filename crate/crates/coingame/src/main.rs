//! Experiment runner: `coin` plays strategies against bit sources, `asset`
//! drives the continuous-time embedding pipeline, `verify` runs the
//! invariant battery. Runs are reproducible: same config and seed give
//! byte-identical outputs, and every output file embeds the resolved
//! config and library version.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use coingame::analysis::{growth_report, markov_rate_target, GrowthReport};
use coingame::asset::{
    asset_growth_report, brownian_crossing_game, embed, fbm_path, LevelReport, PricePath,
};
use coingame::error::{Error, Result};
use coingame::sources::BitSource;
use coingame::strategies::StrategySpec;
use coingame::VERSION;

const OUT_DIR_ENV: &str = "COINGAME_OUT";

#[derive(Parser)]
#[command(name = "coingame", version, about = "Betting-game growth-rate experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run strategies against a bit source and report growth rates.
    Coin(CoinArgs),
    /// Embed a price path onto dyadic log-price grids and report per-level rates.
    Asset(AssetArgs),
    /// Run the invariant battery.
    Verify,
}

#[derive(Args)]
struct CoinArgs {
    /// TOML config file; command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Source spec: bernoulli(p), markov(k,p...), periodic(pattern), bits(pattern).
    #[arg(long)]
    source: Option<String>,
    /// Strategy spec (repeatable): beta(a,b), block(k,shift|all,c), markov(k,a,b), universal(kmax).
    #[arg(long = "strategy")]
    strategies: Vec<String>,
    #[arg(long)]
    rho: Option<f64>,
    /// Number of rounds.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Independent replications (seeds seed, seed+1, ...).
    #[arg(long)]
    reps: Option<usize>,
    /// Output directory (default: $COINGAME_OUT or the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct AssetArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Hölder (Hurst) exponent of the synthesized path.
    #[arg(long = "H")]
    hurst: Option<f64>,
    /// Time horizon.
    #[arg(long)]
    t_max: Option<f64>,
    /// Grid level range, e.g. 4..12 (inclusive).
    #[arg(long)]
    k: Option<String>,
    /// Samples of the synthesized path (power of two).
    #[arg(long)]
    n_grid: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV file of (time, price) rows to embed instead of synthesizing.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct CoinConfig {
    source: String,
    strategies: Vec<String>,
    rho: f64,
    n: Option<usize>,
    seed: u64,
    reps: usize,
    format: String,
}

impl Default for CoinConfig {
    fn default() -> Self {
        Self {
            source: "bernoulli(0.5)".into(),
            strategies: vec!["beta(1,1)".into()],
            rho: 0.5,
            n: None,
            seed: 1,
            reps: 1,
            format: "csv".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct AssetConfig {
    hurst: f64,
    t_max: f64,
    k_min: u32,
    k_max: u32,
    n_grid: usize,
    reps: usize,
    seed: u64,
    input: Option<PathBuf>,
    format: String,
}

impl Default for AssetConfig {
    fn default() -> Self {
        Self {
            hurst: 0.5,
            t_max: 1.0,
            k_min: 4,
            k_max: 10,
            n_grid: 1 << 20,
            reps: 1,
            seed: 1,
            input: None,
            format: "csv".into(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Coin(args) => report_errors(cmd_coin(args)),
        Cmd::Asset(args) => report_errors(cmd_asset(args)),
        Cmd::Verify => cmd_verify(),
    };
    std::process::exit(code);
}

fn report_errors(result: Result<()>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load_config<T: Default + for<'de> Deserialize<'de>>(path: &Option<PathBuf>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn out_dir(flag: &Option<PathBuf>) -> PathBuf {
    flag.clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Resolved config + version as comment lines for embedding in outputs.
fn config_banner<T: Serialize>(config: &T) -> String {
    let toml = toml::to_string(config).expect("config serializes");
    let mut banner = format!("# coingame {VERSION}\n");
    for line in toml.lines() {
        let _ = writeln!(banner, "# {line}");
    }
    banner
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn parse_k_range(text: &str) -> Result<(u32, u32)> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| Error::Config(format!("expected a range like 4..12, got `{text}`")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<u32>()
            .map_err(|_| Error::Config(format!("bad grid level `{s}` in `{text}`")))
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo > hi || lo == 0 {
        return Err(Error::Config(format!("empty or invalid level range `{text}`")));
    }
    Ok((lo, hi))
}

/// Analytic rate target in nats per round, when the source admits one.
fn target_for(spec: &StrategySpec, source: &BitSource, rho: f64) -> Option<f64> {
    match *spec {
        StrategySpec::Beta { .. } => markov_rate_target(source, 0, rho).ok(),
        StrategySpec::Markov { k, .. } => markov_rate_target(source, k, rho).ok(),
        // under shift homogeneity the block-k rate is the average of the
        // Markov rates of orders 0..k
        StrategySpec::Block { k, .. } => {
            let rates: Option<Vec<f64>> = (0..k)
                .map(|order| markov_rate_target(source, order, rho).ok())
                .collect();
            rates.map(|r| r.iter().sum::<f64>() / k as f64)
        }
        StrategySpec::Universal { .. } => {
            if rho == 0.5 {
                source
                    .entropy_rate()
                    .ok()
                    .map(|h| (1.0 - h) * std::f64::consts::LN_2)
            } else {
                None
            }
        }
    }
}

fn cmd_coin(args: CoinArgs) -> Result<()> {
    let mut config: CoinConfig = load_config(&args.config)?;
    if let Some(v) = args.source {
        config.source = v;
    }
    if !args.strategies.is_empty() {
        config.strategies = args.strategies;
    }
    if let Some(v) = args.rho {
        config.rho = v;
    }
    if let Some(v) = args.n {
        config.n = Some(v);
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.reps {
        config.reps = v;
    }
    if let Some(v) = args.format {
        config.format = v;
    }
    let n = config
        .n
        .ok_or_else(|| Error::Config("missing --n (rounds to play)".into()))?;

    let source: BitSource = config.source.parse()?;
    let specs: Vec<StrategySpec> = config
        .strategies
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_>>()?;
    if specs.is_empty() {
        return Err(Error::Config("no strategies given".into()));
    }

    let reports: Vec<(usize, Vec<GrowthReport>)> = (0..config.reps)
        .into_par_iter()
        .map(|rep| -> Result<(usize, Vec<GrowthReport>)> {
            let bits = source.generate(config.seed + rep as u64, n)?;
            let per_strategy = specs
                .iter()
                .map(|spec| {
                    growth_report(spec, &bits, config.rho, target_for(spec, &source, config.rho))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((rep, per_strategy))
        })
        .collect::<Result<_>>()?;

    let dir = out_dir(&args.out);
    let written = match config.format.as_str() {
        "csv" => {
            let mut csv = config_banner(&config);
            csv.push_str("experiment_id,strategy,n,log_capital,target_rate,residual,diagnostic_rate\n");
            for (rep, per_strategy) in &reports {
                for report in per_strategy {
                    for c in &report.checkpoints {
                        let target = report
                            .target_rate
                            .map_or(String::new(), |t| t.to_string());
                        let _ = writeln!(
                            csv,
                            "{rep},{},{},{},{target},{},{}",
                            report.strategy,
                            c.n,
                            c.log_capital,
                            c.residual,
                            c.log_capital / c.n as f64
                        );
                    }
                }
            }
            write_output(&dir, "coin_growth.csv", &csv)?
        }
        "json" => {
            let rows: Vec<serde_json::Value> = reports
                .iter()
                .flat_map(|(rep, per_strategy)| {
                    per_strategy.iter().flat_map(move |report| {
                        report.checkpoints.iter().map(move |c| {
                            serde_json::json!({
                                "experiment_id": rep,
                                "strategy": report.strategy.to_string(),
                                "n": c.n,
                                "log_capital": c.log_capital,
                                "target_rate": report.target_rate,
                                "residual": c.residual,
                                "diagnostic_rate": c.log_capital / c.n as f64,
                            })
                        })
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "version": VERSION,
                "config": serde_json::to_value(&config).expect("config serializes"),
                "rows": rows,
            });
            write_output(
                &dir,
                "coin_growth.json",
                &format!("{:#}\n", doc),
            )?
        }
        other => return Err(Error::Config(format!("unknown format `{other}`"))),
    };
    write_output(
        &dir,
        "coin_config.toml",
        &format!(
            "# coingame {VERSION}\n{}",
            toml::to_string(&config).expect("config serializes")
        ),
    )?;

    println!("wrote {}", written.display());
    println!("{:<20} {:>14} {:>14}", "strategy", "rate (nats)", "target");
    for (i, spec) in specs.iter().enumerate() {
        let mean_rate: f64 = reports
            .iter()
            .map(|(_, per_strategy)| per_strategy[i].main_rate)
            .sum::<f64>()
            / config.reps as f64;
        let target = reports[0].1[i]
            .target_rate
            .map_or("-".into(), |t| format!("{t:.6}"));
        println!("{:<20} {:>14.6} {:>14}", spec.to_string(), mean_rate, target);
    }
    Ok(())
}

fn cmd_asset(args: AssetArgs) -> Result<()> {
    let mut config: AssetConfig = load_config(&args.config)?;
    if let Some(v) = args.hurst {
        config.hurst = v;
    }
    if let Some(v) = args.t_max {
        config.t_max = v;
    }
    if let Some(v) = &args.k {
        let (lo, hi) = parse_k_range(v)?;
        config.k_min = lo;
        config.k_max = hi;
    }
    if let Some(v) = args.n_grid {
        config.n_grid = v;
    }
    if let Some(v) = args.reps {
        config.reps = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.input {
        config.input = Some(v);
    }
    if let Some(v) = args.format {
        config.format = v;
    }

    let reports: Vec<(usize, Vec<LevelReport>)> = match &config.input {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let price_path = PricePath::from_csv(&text)?;
            let finest = embed(&price_path, config.k_max)?;
            vec![(0, asset_growth_report(&finest, config.k_min, None)?)]
        }
        None => (0..config.reps)
            .into_par_iter()
            .map(|rep| -> Result<(usize, Vec<LevelReport>)> {
                let seed = config.seed + rep as u64;
                // Brownian motion's embedded game is exactly an i.i.d. fair
                // coin, so at H = 1/2 the finest game is built directly;
                // sampling a path would under-resolve the finest grid.
                let finest = if config.hurst == 0.5 {
                    brownian_crossing_game(config.k_max, config.n_grid, seed)
                } else {
                    let path = fbm_path(config.hurst, config.t_max, config.n_grid, seed)?;
                    embed(&path, config.k_max)?
                };
                Ok((rep, asset_growth_report(&finest, config.k_min, Some(config.hurst))?))
            })
            .collect::<Result<_>>()?,
    };

    let dir = out_dir(&args.out);
    let written = match config.format.as_str() {
        "csv" => {
            let mut csv = config_banner(&config);
            csv.push_str(
                "experiment_id,k,n,rho_delta,markov1_rate,block2_rate,target_markov,target_block,\
                 growth_ratio,pair_ratio_00,pair_ratio_01,pair_ratio_10,pair_ratio_11,r1,tv,l\n",
            );
            for (rep, levels) in &reports {
                for r in levels {
                    let _ = writeln!(
                        csv,
                        "{rep},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                        r.k,
                        r.n,
                        r.rho_delta,
                        r.markov1_rate,
                        r.block2_rate,
                        r.target_markov,
                        r.target_block,
                        r.growth_ratio,
                        r.pair_ratios[0],
                        r.pair_ratios[1],
                        r.pair_ratios[2],
                        r.pair_ratios[3],
                        r.r1,
                        r.tv,
                        r.l
                    );
                }
            }
            write_output(&dir, "asset_levels.csv", &csv)?
        }
        "json" => {
            let rows: Vec<serde_json::Value> = reports
                .iter()
                .flat_map(|(rep, levels)| {
                    levels.iter().map(move |r| {
                        serde_json::json!({
                            "experiment_id": rep,
                            "k": r.k,
                            "n": r.n,
                            "rho_delta": r.rho_delta,
                            "markov1_rate": r.markov1_rate,
                            "block2_rate": r.block2_rate,
                            "target_markov": r.target_markov,
                            "target_block": r.target_block,
                            "growth_ratio": r.growth_ratio,
                            "pair_ratios": r.pair_ratios,
                            "r1": r.r1,
                            "tv": r.tv,
                            "l": r.l,
                        })
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "version": VERSION,
                "config": serde_json::to_value(&config).expect("config serializes"),
                "rows": rows,
            });
            write_output(&dir, "asset_levels.json", &format!("{:#}\n", doc))?
        }
        other => return Err(Error::Config(format!("unknown format `{other}`"))),
    };
    write_output(
        &dir,
        "asset_config.toml",
        &format!(
            "# coingame {VERSION}\n{}",
            toml::to_string(&config).expect("config serializes")
        ),
    )?;

    println!("wrote {}", written.display());
    println!(
        "{:>3} {:>12} {:>14} {:>14} {:>14} {:>14}",
        "k", "mean n", "markov1 rate", "block2 rate", "target m1", "target b2"
    );
    for k in config.k_min..=config.k_max {
        let levels: Vec<&LevelReport> = reports
            .iter()
            .flat_map(|(_, ls)| ls.iter().filter(|r| r.k == k))
            .collect();
        if levels.is_empty() {
            continue;
        }
        let count = levels.len() as f64;
        let mean = |f: fn(&LevelReport) -> f64| levels.iter().map(|r| f(r)).sum::<f64>() / count;
        println!(
            "{:>3} {:>12.0} {:>14.6} {:>14.6} {:>14.6} {:>14.6}",
            k,
            mean(|r| r.n as f64),
            mean(|r| r.markov1_rate),
            mean(|r| r.block2_rate),
            levels[0].target_markov,
            levels[0].target_block
        );
    }
    Ok(())
}

fn cmd_verify() -> i32 {
    let results = coingame::verify::run_all();
    let mut failures = 0;
    for check in &results {
        let status = if check.pass { "PASS" } else { "FAIL" };
        println!("{status} {:<24} {}", check.name, check.detail);
        if !check.pass {
            failures += 1;
        }
    }
    if failures == 0 {
        println!("all {} checks passed", results.len());
        0
    } else {
        println!("{failures} of {} checks failed", results.len());
        1
    }
}
