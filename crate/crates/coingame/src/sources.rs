//! Bit-sequence generators with known ground-truth statistics.
//!
//! Sources are specified textually (`bernoulli(p)`, `markov(k, p1|ctx...)`,
//! `periodic(pattern)`, `bits(pattern)`), generate reproducibly from a 64-bit
//! seed via ChaCha12 (a documented, counter-based stream cipher RNG, so runs
//! are bit-reproducible across machines), and expose their analytic entropy
//! rate and stationary block distributions.

use std::fmt;
use std::str::FromStr;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::kl::binary_entropy_bits;

/// A distribution over bit sequences. Markov transition rows are indexed by
/// context with the oldest bit as the most significant bit; `p_one[ctx]` is
/// the probability that the next bit is one.
#[derive(Debug, Clone, PartialEq)]
pub enum BitSource {
    Bernoulli { p: f64 },
    MarkovChain { k: usize, p_one: Vec<f64> },
    Periodic { pattern: Vec<u8> },
    FromBits { bits: Vec<u8> },
}

impl BitSource {
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("bernoulli needs p in [0,1], got {p}")));
        }
        Ok(BitSource::Bernoulli { p })
    }

    pub fn markov(k: usize, p_one: Vec<f64>) -> Result<Self> {
        if k == 0 || k > 16 {
            return Err(Error::InvalidTransitions(format!("order {k} outside 1..=16")));
        }
        if p_one.len() != 1 << k {
            return Err(Error::InvalidTransitions(format!(
                "order {k} needs {} transition probabilities, got {}",
                1usize << k,
                p_one.len()
            )));
        }
        if p_one.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidTransitions("probabilities must lie in [0,1]".into()));
        }
        let source = BitSource::MarkovChain { k, p_one };
        source.stationary_contexts()?; // ergodicity check
        Ok(source)
    }

    pub fn periodic(pattern: Vec<u8>) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::InvalidParameter("periodic pattern must be non-empty".into()));
        }
        Ok(BitSource::Periodic { pattern })
    }

    /// Generate `n` bits deterministically from `seed`. Markov sources draw
    /// their initial context from the stationary distribution, so the output
    /// process is stationary from the first bit.
    pub fn generate(&self, seed: u64, n: usize) -> Result<Vec<u8>> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        match self {
            BitSource::Bernoulli { p } => {
                Ok((0..n).map(|_| u8::from(rng.gen_bool(*p))).collect())
            }
            BitSource::MarkovChain { k, p_one } => {
                let pi = self.stationary_contexts()?;
                let mut bits = Vec::with_capacity(n);
                // initial context by CDF inversion of the stationary law
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut ctx = pi.len() - 1;
                for (i, &w) in pi.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        ctx = i;
                        break;
                    }
                }
                for i in (0..*k).rev() {
                    if bits.len() < n {
                        bits.push(((ctx >> i) & 1) as u8);
                    }
                }
                let mask = (1usize << k) - 1;
                while bits.len() < n {
                    let x = u8::from(rng.gen_bool(p_one[ctx]));
                    bits.push(x);
                    ctx = (ctx << 1 | x as usize) & mask;
                }
                Ok(bits)
            }
            BitSource::Periodic { pattern } => {
                Ok((0..n).map(|i| pattern[i % pattern.len()]).collect())
            }
            BitSource::FromBits { bits } => {
                if n > bits.len() {
                    return Err(Error::InvalidParameter(format!(
                        "bits(...) holds {} bits, {n} requested",
                        bits.len()
                    )));
                }
                Ok(bits[..n].to_vec())
            }
        }
    }

    /// Stationary distribution over the 2^k contexts of a Markov source,
    /// computed by power iteration on the lazy chain (same stationary law,
    /// always aperiodic). Errors if the transition graph has more than one
    /// recurrent class.
    pub fn stationary_contexts(&self) -> Result<Vec<f64>> {
        let (k, p_one) = match self {
            BitSource::MarkovChain { k, p_one } => (*k, p_one),
            _ => return Err(Error::EntropyUnavailable),
        };
        let size = 1usize << k;
        let mask = size - 1;

        let mut graph = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..size).map(|_| graph.add_node(())).collect();
        for ctx in 0..size {
            for (x, prob) in [(0usize, 1.0 - p_one[ctx]), (1, p_one[ctx])] {
                if prob > 0.0 {
                    graph.add_edge(nodes[ctx], nodes[(ctx << 1 | x) & mask], ());
                }
            }
        }
        let sccs = tarjan_scc(&graph);
        let recurrent = sccs
            .iter()
            .filter(|scc| {
                scc.iter().all(|&v| {
                    graph.neighbors(v).all(|w| scc.contains(&w))
                })
            })
            .count();
        if recurrent != 1 {
            return Err(Error::NonErgodic(recurrent));
        }

        let mut pi = vec![1.0 / size as f64; size];
        let mut next = vec![0.0; size];
        for _ in 0..200_000 {
            next.iter_mut().for_each(|x| *x = 0.0);
            for ctx in 0..size {
                let w = pi[ctx];
                if w == 0.0 {
                    continue;
                }
                // lazy step: stay with probability 1/2
                next[ctx] += 0.5 * w;
                next[(ctx << 1 | 1) & mask] += 0.5 * w * p_one[ctx];
                next[(ctx << 1) & mask] += 0.5 * w * (1.0 - p_one[ctx]);
            }
            let delta: f64 = pi.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
            std::mem::swap(&mut pi, &mut next);
            if delta < 1e-15 {
                break;
            }
        }
        Ok(pi)
    }

    /// Entropy rate in bits per symbol, when analytically known.
    pub fn entropy_rate(&self) -> Result<f64> {
        match self {
            BitSource::Bernoulli { p } => Ok(binary_entropy_bits(*p)),
            BitSource::MarkovChain { p_one, .. } => {
                let pi = self.stationary_contexts()?;
                Ok(pi
                    .iter()
                    .zip(p_one)
                    .map(|(&w, &p)| w * binary_entropy_bits(p))
                    .sum())
            }
            BitSource::Periodic { .. } => Ok(0.0),
            BitSource::FromBits { .. } => Err(Error::EntropyUnavailable),
        }
    }

    /// Stationary probability of every length-`j` block (indexed with the
    /// first bit as the most significant bit).
    pub fn block_distribution(&self, j: usize) -> Result<Vec<f64>> {
        match self {
            BitSource::Bernoulli { p } => Ok((0..1usize << j)
                .map(|idx| {
                    let ones = idx.count_ones() as f64;
                    p.powf(ones) * (1.0 - p).powf(j as f64 - ones)
                })
                .collect()),
            BitSource::MarkovChain { k, p_one } => {
                let pi = self.stationary_contexts()?;
                if j <= *k {
                    // marginal of the context law over its first j bits
                    let mut dist = vec![0.0; 1 << j];
                    for (ctx, &w) in pi.iter().enumerate() {
                        dist[ctx >> (k - j)] += w;
                    }
                    return Ok(dist);
                }
                // extend bit by bit; a length-m block (m >= k) determines
                // its final context as its low k bits
                let mask = (1usize << k) - 1;
                let mut dist = pi.clone();
                for _ in *k..j {
                    let mut next = vec![0.0; dist.len() * 2];
                    for (block, &w) in dist.iter().enumerate() {
                        let ctx = block & mask;
                        next[block << 1 | 1] += w * p_one[ctx];
                        next[block << 1] += w * (1.0 - p_one[ctx]);
                    }
                    dist = next;
                }
                Ok(dist)
            }
            BitSource::Periodic { pattern } => {
                // stationary version: uniform over the starting phase
                let len = pattern.len();
                let mut dist = vec![0.0; 1 << j];
                for phase in 0..len {
                    let mut idx = 0usize;
                    for i in 0..j {
                        idx = idx << 1 | pattern[(phase + i) % len] as usize;
                    }
                    dist[idx] += 1.0 / len as f64;
                }
                Ok(dist)
            }
            BitSource::FromBits { bits } => {
                if bits.len() < j {
                    return Err(Error::InvalidParameter(format!(
                        "bits(...) too short for {j}-blocks"
                    )));
                }
                let mut dist = vec![0.0; 1 << j];
                let windows = bits.len() - j + 1;
                for w in bits.windows(j) {
                    dist[crate::dist::prefix_index(w)] += 1.0 / windows as f64;
                }
                Ok(dist)
            }
        }
    }

    /// `P(next = 1 | last j bits)` under the stationary law, from the
    /// (j+1)-block distribution.
    pub fn conditional_one(&self, ctx: usize, j: usize) -> Result<f64> {
        let dist = self.block_distribution(j + 1)?;
        let one = dist[ctx << 1 | 1];
        let total = one + dist[ctx << 1];
        Ok(one / total)
    }
}

fn pattern_bits(spec: &str, arg: &str) -> Result<Vec<u8>> {
    if arg.is_empty() {
        return Err(src_err(spec, arg, "pattern must be non-empty"));
    }
    arg.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(src_err(spec, arg, format!("pattern must be 0/1, got `{c}`"))),
        })
        .collect()
}

fn src_err(spec: &str, at: &str, msg: impl Into<String>) -> Error {
    let pos = at.as_ptr() as usize - spec.as_ptr() as usize;
    Error::Parse { pos, msg: format!("{} in `{spec}`", msg.into()) }
}

impl FromStr for BitSource {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let open = spec
            .find('(')
            .ok_or_else(|| src_err(spec, spec, "expected `name(args)`"))?;
        if !spec.ends_with(')') {
            return Err(src_err(spec, &spec[spec.len()..], "missing closing parenthesis"));
        }
        let name = spec[..open].trim();
        let inner = &spec[open + 1..spec.len() - 1];
        let args: Vec<&str> = if inner.trim().is_empty() {
            vec![]
        } else {
            inner.split(',').map(str::trim).collect()
        };
        let num = |arg: &str| -> Result<f64> {
            arg.parse::<f64>()
                .map_err(|_| src_err(spec, arg, format!("expected a number, got `{arg}`")))
        };
        match name {
            "bernoulli" => {
                if args.len() != 1 {
                    return Err(src_err(spec, inner, "bernoulli takes one argument"));
                }
                BitSource::bernoulli(num(args[0])?)
            }
            "markov" => {
                if args.len() < 2 {
                    return Err(src_err(spec, inner, "markov takes k and 2^k probabilities"));
                }
                let k = args[0].parse::<usize>().map_err(|_| {
                    src_err(spec, args[0], format!("expected the order k, got `{}`", args[0]))
                })?;
                let p_one = args[1..].iter().map(|a| num(a)).collect::<Result<Vec<_>>>()?;
                BitSource::markov(k, p_one)
            }
            "periodic" => {
                if args.len() != 1 {
                    return Err(src_err(spec, inner, "periodic takes one pattern"));
                }
                BitSource::periodic(pattern_bits(spec, args[0])?)
            }
            "bits" => {
                if args.len() != 1 {
                    return Err(src_err(spec, inner, "bits takes one pattern"));
                }
                Ok(BitSource::FromBits { bits: pattern_bits(spec, args[0])? })
            }
            other => Err(src_err(spec, name, format!("unknown source `{other}`"))),
        }
    }
}

impl fmt::Display for BitSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BitSource::Bernoulli { p } => write!(f, "bernoulli({p})"),
            BitSource::MarkovChain { k, p_one } => {
                write!(f, "markov({k}")?;
                for p in p_one {
                    write!(f, ",{p}")?;
                }
                write!(f, ")")
            }
            BitSource::Periodic { pattern } => {
                write!(f, "periodic(")?;
                for b in pattern {
                    write!(f, "{b}")?;
                }
                write!(f, ")")
            }
            BitSource::FromBits { bits } => {
                write!(f, "bits(")?;
                for b in bits {
                    write!(f, "{b}")?;
                }
                write!(f, ")")
            }
        }
    }
}
