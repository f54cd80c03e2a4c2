//! Hash-based price estimation for clause securities.
//!
//! The price of a security S splits into two weighted counts,
//! `sum_{w in S} w(omega)` and the same over the complement, with
//! `w(omega) = 1/(C - q_omega)`. Each count is estimated WISH-style: for
//! every constraint level i, draw random parity hashes, ask a k-MAP oracle
//! for the k-th largest weight among outcomes satisfying both the hash and
//! the side predicate, take medians across repetitions, and recombine the
//! levels as `M_0 + sum_i M_{i+1} 2^i`. The returned price is N/(N + N').
//!
//! Guarantees hold for securities that are disjunctions of two events, with
//! c >= 2, k = 12 and alpha <= ALPHA_STAR. The enumeration oracle here is a
//! desk-scale stand-in; the trait boundary is where an industrial MAP
//! solver would plug in.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::{solve_cost, CostSolution, SolveConfig};
use crate::market::{MarketState, Security};

/// Largest rate constant with the median concentration argument intact.
pub const ALPHA_STAR: f64 = 0.000762;

/// Largest event count the enumeration k-MAP oracle will accept.
pub const ENUMERATION_EVENT_LIMIT: u32 = 20;

#[derive(Debug, Clone, Copy)]
pub struct WishConfig {
    pub delta: f64,
    /// Concentration rate; values above ALPHA_STAR shrink T below what the
    /// formal guarantee needs and are meant for desk-scale runs only.
    pub alpha: f64,
    pub c: u32,
    pub k: u32,
}

impl Default for WishConfig {
    fn default() -> Self {
        WishConfig { delta: 0.05, alpha: ALPHA_STAR, c: 2, k: 12 }
    }
}

impl WishConfig {
    fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a positive real, got {}",
                self.alpha
            )));
        }
        if self.c < 2 || self.k == 0 {
            return Err(Error::InvalidParameter(format!(
                "need c >= 2 and k >= 1, got c={} k={}",
                self.c, self.k
            )));
        }
        Ok(())
    }

    /// Repetitions per constraint level: T = ceil(ln(n/delta) / alpha).
    pub fn rounds(&self, n: u32) -> Result<u32> {
        self.validate()?;
        let t = ((n as f64 / self.delta).ln() / self.alpha).ceil();
        if !(t < 2u64.pow(31) as f64) {
            return Err(Error::Capacity {
                what: "WISH repetition count T",
                requested: t as u64,
                limit: 1 << 31,
            });
        }
        Ok((t as u32).max(1))
    }
}

/// Random parity constraints A omega = b (mod 2): one (mask, bit) per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityHash {
    n: u32,
    rows: Vec<(u64, bool)>,
}

impl ParityHash {
    pub fn empty(n: u32) -> Self {
        ParityHash { n, rows: Vec::new() }
    }

    /// Uniform i.i.d. entries for an i x n matrix and an i-bit vector.
    pub fn sample(n: u32, i: u32, rng: &mut dyn RngCore) -> Self {
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let rows = (0..i).map(|_| (rng.gen::<u64>() & full, rng.gen::<bool>())).collect();
        ParityHash { n, rows }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn satisfied_by(&self, outcome: u64) -> bool {
        self.rows
            .iter()
            .all(|&(mask, bit)| ((outcome & mask).count_ones() & 1 == 1) == bit)
    }
}

/// Which half of the outcome space a k-MAP query ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Satisfying,
    Falsifying,
}

/// k-th largest weight among outcomes meeting the parity constraints and
/// the side predicate; 0 when fewer than k such outcomes exist.
pub trait KMapOracle {
    fn n_events(&self) -> u32;
    fn k_map(&self, hash: &ParityHash, side: Side, k: u32) -> Result<f64>;
}

/// Exhaustive k-MAP oracle over explicit weights.
pub struct EnumerationOracle {
    n: u32,
    weights: Vec<f64>,
    security: Security,
}

impl EnumerationOracle {
    pub fn new(n: u32, weights: Vec<f64>, security: Security) -> Result<Self> {
        if n == 0 || n > ENUMERATION_EVENT_LIMIT {
            return Err(Error::Capacity {
                what: "enumeration k-MAP oracle (2^n outcomes)",
                requested: n as u64,
                limit: ENUMERATION_EVENT_LIMIT as u64,
            });
        }
        let n_outcomes = 1u64 << n;
        if weights.len() as u64 != n_outcomes {
            return Err(Error::InvalidParameter(format!(
                "need 2^{n} weights, got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter(
                "weights must be positive finite reals".into(),
            ));
        }
        security.validate(n_outcomes, Some(n))?;
        Ok(EnumerationOracle { n, weights, security })
    }

    /// Weights 1/(C - q_omega) from an exact solve of a Boolean market.
    pub fn from_market(
        state: &MarketState,
        security: Security,
        cfg: &SolveConfig,
    ) -> Result<(Self, CostSolution)> {
        let n = state.n_events().ok_or_else(|| {
            Error::InvalidMarket("WISH pricing needs a Boolean market (n_events set)".into())
        })?;
        let sol = solve_cost(&state.share_vector(), state.c0(), cfg)?;
        if sol.offset == 0.0 {
            // The reserve at the max outcome underflowed; its weight has no
            // f64 representation.
            return Err(Error::SingularCost { c: sol.cost, q_max: sol.q_max });
        }
        let payouts = state.materialize_payouts(crate::market::BRUTE_FORCE_LIMIT)?;
        let weights = payouts
            .iter()
            .map(|&qj| 1.0 / (sol.offset + (sol.q_max - qj as f64)))
            .collect();
        Ok((Self::new(n, weights, security)?, sol))
    }

    fn on_side(&self, outcome: u64, side: Side) -> bool {
        self.security.pays_out(outcome) == (side == Side::Satisfying)
    }

    /// Side weights sorted descending, for ground truth and bound checks.
    pub fn sorted_weights(&self, side: Side) -> Vec<f64> {
        let mut w: Vec<f64> = (0..self.weights.len() as u64)
            .filter(|&j| self.on_side(j, side))
            .map(|j| self.weights[j as usize])
            .collect();
        w.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
        w
    }

    /// True price of the satisfying side under these weights.
    pub fn exact_price(&self) -> f64 {
        let total: f64 = self.weights.iter().sum();
        let sat: f64 = (0..self.weights.len() as u64)
            .filter(|&j| self.on_side(j, Side::Satisfying))
            .map(|j| self.weights[j as usize])
            .sum();
        sat / total
    }
}

impl KMapOracle for EnumerationOracle {
    fn n_events(&self) -> u32 {
        self.n
    }

    fn k_map(&self, hash: &ParityHash, side: Side, k: u32) -> Result<f64> {
        if k == 0 {
            return Err(Error::InvalidParameter("k-MAP needs k >= 1".into()));
        }
        let k = k as usize;
        // Bounded pool of the k heaviest feasible outcomes; k is small, so
        // a linear min-scan beats a heap.
        let mut best: Vec<f64> = Vec::with_capacity(k);
        for outcome in 0..self.weights.len() as u64 {
            if !self.on_side(outcome, side) || !hash.satisfied_by(outcome) {
                continue;
            }
            let w = self.weights[outcome as usize];
            if best.len() < k {
                best.push(w);
            } else {
                let (mi, &mv) = best
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .unwrap();
                if w > mv {
                    best[mi] = w;
                }
            }
        }
        if best.len() < k {
            return Ok(0.0);
        }
        Ok(best.iter().copied().fold(f64::INFINITY, f64::min))
    }
}

#[derive(Debug, Clone)]
pub struct WishOutcome {
    pub price: f64,
    /// Aggregate for the satisfying side: M_0 + sum_i M_{i+1} 2^i.
    pub n_aggregate: f64,
    pub n_prime_aggregate: f64,
    pub rounds: u32,
    pub kmap_queries: u64,
    /// Set when a degenerate side made sampling unnecessary.
    pub degenerate: bool,
}

fn lower_median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    values[(values.len() - 1) / 2]
}

/// Estimate the price of the oracle's security. Deterministic given the
/// seed: the (level, repetition) grid uses keyed RNG substreams.
pub fn wish_price<O: KMapOracle + ?Sized>(
    oracle: &O,
    cfg: &WishConfig,
    seed: u64,
) -> Result<WishOutcome> {
    cfg.validate()?;
    let n = oracle.n_events();
    if n == 0 || n > 62 {
        return Err(Error::InvalidParameter(format!("event count must be in 1..=62, got {n}")));
    }
    let t_rounds = cfg.rounds(n)?;
    let mut queries = 0u64;

    // Degenerate sides (tautology or contradiction over the space) price
    // exactly without any hashing.
    let unconstrained = ParityHash::empty(n);
    let has_sat = oracle.k_map(&unconstrained, Side::Satisfying, 1)?;
    let has_unsat = oracle.k_map(&unconstrained, Side::Falsifying, 1)?;
    queries += 2;
    if has_sat == 0.0 || has_unsat == 0.0 {
        let price = if has_sat == 0.0 { 0.0 } else { 1.0 };
        return Ok(WishOutcome {
            price,
            n_aggregate: has_sat,
            n_prime_aggregate: has_unsat,
            rounds: 0,
            kmap_queries: queries,
            degenerate: true,
        });
    }

    let mut medians = Vec::with_capacity(n as usize + 1);
    let mut medians_prime = Vec::with_capacity(n as usize + 1);
    for i in 0..=n {
        let mut sat = Vec::with_capacity(t_rounds as usize);
        let mut unsat = Vec::with_capacity(t_rounds as usize);
        for t in 1..=t_rounds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((i as u64) << 32) | t as u64);
            let hash = ParityHash::sample(n, i, &mut rng);
            sat.push(oracle.k_map(&hash, Side::Satisfying, cfg.k)?);
            unsat.push(oracle.k_map(&hash, Side::Falsifying, cfg.k)?);
            queries += 2;
        }
        medians.push(lower_median(&mut sat));
        medians_prime.push(lower_median(&mut unsat));
    }

    let aggregate = |m: &[f64]| -> f64 {
        m[0] + (0..n).map(|i| m[i as usize + 1] * (2.0f64).powi(i as i32)).sum::<f64>()
    };
    let n_aggregate = aggregate(&medians);
    let n_prime_aggregate = aggregate(&medians_prime);
    let total = n_aggregate + n_prime_aggregate;
    if !(total > 0.0) {
        return Err(Error::InvalidParameter(
            "all WISH medians are zero; sides too small for this k".into(),
        ));
    }
    Ok(WishOutcome {
        price: n_aggregate / total,
        n_aggregate,
        n_prime_aggregate,
        rounds: t_rounds,
        kmap_queries: queries,
        degenerate: false,
    })
}

/// Level quantiles and the deterministic sandwich they induce: with
/// `b_i` the 2^i-th largest weight (0 once ranks run out),
///
/// ```text
/// L' = b_0 + sum_{i<n} b_{min(i+c+1, n)} 2^i
/// U' = b_0 + sum_{i<n} b_i 2^i
/// ```
///
/// satisfy `L' <= sum(w) <= U'` and `U' <= 2^(c+1) L'` for any
/// nonincreasing weights.
pub fn quantile_sandwich(sorted_desc: &[f64], n: u32, c: u32) -> (f64, f64) {
    let b = |i: u32| -> f64 {
        let rank = 1u64 << i;
        sorted_desc.get(rank as usize - 1).copied().unwrap_or(0.0)
    };
    let mut lower = b(0);
    let mut upper = b(0);
    for i in 0..n {
        let scale = (2.0f64).powi(i as i32);
        lower += b((i + c + 1).min(n)) * scale;
        upper += b(i) * scale;
    }
    (lower, upper)
}
