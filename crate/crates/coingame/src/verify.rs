//! Self-contained invariant battery behind the `verify` subcommand: quick,
//! deterministic spot checks of the core identities, printable as one
//! pass/fail line each.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::asset::{brownian_crossing_game, coarsen, nesting_holds};
use crate::dist::{
    bets_of_distribution, distribution_from_strategy, expected_log_capital, index_bits,
    FiniteDistribution,
};
use crate::game::{run_game, PathPrefix};
use crate::kl::kl;
use crate::sources::BitSource;
use crate::strategies::StrategySpec;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn measured(name: &'static str, pass: bool, detail: String) -> Self {
        Self { name, pass, detail }
    }
}

/// Run every check; all should pass on a healthy build.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check_oracle_equality(),
        check_bijection(),
        check_optimality(),
        check_kl_identity(),
        check_level_nesting(),
        check_source_determinism(),
    ]
}

/// Incremental game capital equals the closed-form likelihood ratio.
fn check_oracle_equality() -> CheckResult {
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    let specs = ["beta(1,1)", "block(3,1,1)", "block(3,all,1)", "markov(2,1,1)", "universal(3)"];
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let bits: Vec<u8> = (0..500).map(|_| rng.gen_range(0..=1)).collect();
        let path = PathPrefix::from_bits(bits.clone());
        for s in specs {
            let spec: StrategySpec = s.parse().unwrap();
            for rho in [0.5, 0.45] {
                let mut pred = spec.build(rho).unwrap();
                let cp = run_game(pred.as_mut(), &path, rho).unwrap();
                let closed = spec.log_capital(&bits, rho).unwrap();
                worst = worst.max((cp.final_log() - closed).abs());
            }
        }
    }
    CheckResult::measured(
        "oracle-equality",
        worst <= 1e-9,
        format!("max |incremental - closed form| = {worst:.3e}"),
    )
}

/// Distribution -> betting rule -> distribution is the identity.
fn check_bijection() -> CheckResult {
    let horizon = 6;
    let rho = 0.45;
    let q = FiniteDistribution::from_conditionals(horizon, |bits| {
        let s = bits.iter().filter(|&&x| x == 1).count() as f64;
        (1.0 + s) / (2.0 + bits.len() as f64)
    })
    .unwrap();
    let bets = bets_of_distribution(&q, rho);
    let recovered = distribution_from_strategy(&bets, rho, horizon).unwrap();
    let mut worst = 0.0f64;
    for m in 0..=horizon {
        for idx in 0..1usize << m {
            worst = worst.max((q.prob_at(m, idx) - recovered.prob_at(m, idx)).abs());
        }
    }
    CheckResult::measured(
        "distribution-bijection",
        worst <= 1e-12,
        format!("max round-trip defect = {worst:.3e}"),
    )
}

/// The betting rule built from Q maximizes E_Q[log K_N].
fn check_optimality() -> CheckResult {
    let horizon = 6;
    let rho = 0.5;
    let q = FiniteDistribution::from_conditionals(horizon, |bits| {
        let s = bits.iter().filter(|&&x| x == 1).count() as f64;
        (1.0 + s) / (2.0 + bits.len() as f64)
    })
    .unwrap();
    let own = expected_log_capital(&q, horizon, |idx| {
        q.log_capital(&PathPrefix::from_bits(index_bits(idx, horizon)), rho)
    });
    let mut rng = ChaCha12Rng::seed_from_u64(202);
    let mut margin = f64::INFINITY;
    for _ in 0..20 {
        let alt = FiniteDistribution::from_conditionals(horizon, |_| rng.gen_range(0.05..0.95))
            .unwrap();
        let value = expected_log_capital(&q, horizon, |idx| {
            alt.log_capital(&PathPrefix::from_bits(index_bits(idx, horizon)), rho)
        });
        margin = margin.min(own - value);
    }
    CheckResult::measured(
        "bayes-optimality",
        margin >= -1e-12,
        format!("worst advantage over alternatives = {margin:.3e}"),
    )
}

/// Both routes through the divergence convexity identity agree.
fn check_kl_identity() -> CheckResult {
    let mut rng = ChaCha12Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (p1, p2) = (rng.gen_range(0.001..0.999), rng.gen_range(0.001..0.999));
        let q = rng.gen_range(0.001..0.999);
        let lam: f64 = rng.gen_range(0.0..1.0);
        let pbar = lam * p1 + (1.0 - lam) * p2;
        let lhs = lam * kl(p1, q).unwrap() + (1.0 - lam) * kl(p2, q).unwrap()
            - kl(pbar, q).unwrap();
        let rhs = lam * kl(p1, pbar).unwrap() + (1.0 - lam) * kl(p2, pbar).unwrap();
        worst = worst.max((lhs - rhs).abs());
    }
    CheckResult::measured(
        "kl-convexity-identity",
        worst <= 1e-12,
        format!("max |lhs - rhs| = {worst:.3e}"),
    )
}

/// Exact nesting identities between adjacent grid levels on random walks.
fn check_level_nesting() -> CheckResult {
    let mut violations = 0usize;
    for seed in 0..20u64 {
        let mut game = brownian_crossing_game(8, 4096, seed);
        for _ in 0..3 {
            let coarse = coarsen(&game).unwrap();
            if !nesting_holds(&game, &coarse) {
                violations += 1;
            }
            game = coarse;
        }
    }
    CheckResult::measured(
        "level-nesting",
        violations == 0,
        format!("{violations} violations over 20 walks x 3 levels"),
    )
}

/// Same seed reproduces the same bits for every source family.
fn check_source_determinism() -> CheckResult {
    let sources = ["bernoulli(0.3)", "markov(1,0.1,0.9)", "periodic(011)"];
    let pass = sources.iter().all(|s| {
        let src: BitSource = s.parse().unwrap();
        src.generate(99, 2000).unwrap() == src.generate(99, 2000).unwrap()
    });
    CheckResult::measured("source-determinism", pass, format!("{} sources", sources.len()))
}
