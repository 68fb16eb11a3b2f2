//! Textual strategy specifications for the CLI:
//! `beta(a,b)`, `block(k,shift|all,c)`, `markov(k,a,b)`, `universal(kmax)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::Predictor;
use crate::strategies::{
    beta_binomial_log_capital, block_log_capital, log_sum_exp, markov_log_capital, BetaBinomial,
    BlockParams, BlockPredictor, MarkovParams, MarkovPredictor, Mixture,
};

/// A parsed strategy description; `block` with `shift: None` means the
/// shift-combined variant (equal capital split across all k shifts).
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    Beta { a: f64, b: f64 },
    Block { k: usize, shift: Option<usize>, c: f64 },
    Markov { k: usize, a: f64, b: f64 },
    Universal { k_max: usize },
}

impl StrategySpec {
    /// Instantiate a fresh predictor for one game run.
    pub fn build(&self, rho: f64) -> Result<Box<dyn Predictor>> {
        Ok(match *self {
            StrategySpec::Beta { a, b } => Box::new(BetaBinomial::new(a, b)?),
            StrategySpec::Block { k, shift: Some(shift), c } => {
                Box::new(BlockPredictor::new(BlockParams::uniform(k, shift, c)?, rho))
            }
            StrategySpec::Block { k, shift: None, c } => {
                let parts = (0..k)
                    .map(|shift| {
                        let params = BlockParams::uniform(k, shift, c)?;
                        Ok((
                            1.0 / k as f64,
                            Box::new(BlockPredictor::new(params, rho)) as Box<dyn Predictor>,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Box::new(Mixture::new(rho, parts)?)
            }
            StrategySpec::Markov { k, a, b } => {
                Box::new(MarkovPredictor::new(MarkovParams::new(k, a, b)?, rho))
            }
            StrategySpec::Universal { k_max } => Box::new(Mixture::universal(k_max, rho)?),
        })
    }

    /// Closed-form log-capital on a whole path. Much faster than replaying
    /// the game for the count-based families; mixtures combine their
    /// components' closed forms by linearity.
    pub fn log_capital(&self, bits: &[u8], rho: f64) -> Result<f64> {
        Ok(match *self {
            StrategySpec::Beta { a, b } => beta_binomial_log_capital(a, b, bits, rho),
            StrategySpec::Block { k, shift: Some(shift), c } => {
                block_log_capital(&BlockParams::uniform(k, shift, c)?, bits, rho)
            }
            StrategySpec::Block { k, shift: None, c } => {
                let logs: Vec<f64> = (0..k)
                    .map(|shift| {
                        Ok(block_log_capital(&BlockParams::uniform(k, shift, c)?, bits, rho))
                    })
                    .collect::<Result<Vec<_>>>()?;
                log_sum_exp(&logs) - (k as f64).ln()
            }
            StrategySpec::Markov { k, a, b } => {
                markov_log_capital(&MarkovParams::new(k, a, b)?, bits, rho)
            }
            StrategySpec::Universal { k_max } => {
                let mut terms = Vec::with_capacity(2 * k_max + 1);
                for k in 1..=k_max {
                    let log_w = -((k as f64 + 1.0) * std::f64::consts::LN_2);
                    terms.push(
                        log_w + StrategySpec::Block { k, shift: None, c: 1.0 }
                            .log_capital(bits, rho)?,
                    );
                    terms.push(
                        log_w + StrategySpec::Markov { k, a: 1.0, b: 1.0 }
                            .log_capital(bits, rho)?,
                    );
                }
                // uninvested tail mass of the truncated weight series
                terms.push((2.0 * 0.5f64.powi(k_max as i32 + 1)).ln());
                log_sum_exp(&terms)
            }
        })
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            StrategySpec::Beta { a, b } => write!(f, "beta({a},{b})"),
            StrategySpec::Block { k, shift: Some(s), c } => write!(f, "block({k},{s},{c})"),
            StrategySpec::Block { k, shift: None, c } => write!(f, "block({k},all,{c})"),
            StrategySpec::Markov { k, a, b } => write!(f, "markov({k},{a},{b})"),
            StrategySpec::Universal { k_max } => write!(f, "universal({k_max})"),
        }
    }
}

fn parse_err(pos: usize, spec: &str, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: format!("{} in `{spec}`", msg.into()) }
}

/// Byte offset of a sub-slice `part` within its parent `spec`.
fn offset(spec: &str, part: &str) -> usize {
    part.as_ptr() as usize - spec.as_ptr() as usize
}

fn split_call<'a>(spec: &'a str) -> Result<(&'a str, Vec<&'a str>)> {
    let open = spec
        .find('(')
        .ok_or_else(|| parse_err(0, spec, "expected `name(args)`"))?;
    if !spec.ends_with(')') {
        return Err(parse_err(spec.len(), spec, "missing closing parenthesis"));
    }
    let name = spec[..open].trim();
    let inner = &spec[open + 1..spec.len() - 1];
    let args = if inner.trim().is_empty() {
        vec![]
    } else {
        inner.split(',').map(str::trim).collect()
    };
    Ok((name, args))
}

fn num(spec: &str, arg: &str, what: &str) -> Result<f64> {
    arg.parse::<f64>().map_err(|_| {
        parse_err(offset(spec, arg), spec, format!("{what}: expected a number, got `{arg}`"))
    })
}

fn uint(spec: &str, arg: &str, what: &str) -> Result<usize> {
    arg.parse::<usize>().map_err(|_| {
        parse_err(
            offset(spec, arg),
            spec,
            format!("{what}: expected a non-negative integer, got `{arg}`"),
        )
    })
}

impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (name, args) = split_call(spec)?;
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(parse_err(
                    name.len(),
                    spec,
                    format!("{name} takes {n} argument(s), got {}", args.len()),
                ))
            }
        };
        match name {
            "beta" => {
                arity(2)?;
                Ok(StrategySpec::Beta {
                    a: num(spec, args[0], "a")?,
                    b: num(spec, args[1], "b")?,
                })
            }
            "block" => {
                arity(3)?;
                let k = uint(spec, args[0], "k")?;
                let shift = if args[1] == "all" {
                    None
                } else {
                    Some(uint(spec, args[1], "shift")?)
                };
                Ok(StrategySpec::Block { k, shift, c: num(spec, args[2], "c")? })
            }
            "markov" => {
                arity(3)?;
                Ok(StrategySpec::Markov {
                    k: uint(spec, args[0], "k")?,
                    a: num(spec, args[1], "a")?,
                    b: num(spec, args[2], "b")?,
                })
            }
            "universal" => {
                arity(1)?;
                Ok(StrategySpec::Universal { k_max: uint(spec, args[0], "kmax")? })
            }
            other => Err(parse_err(0, spec, format!("unknown strategy `{other}`"))),
        }
    }
}
