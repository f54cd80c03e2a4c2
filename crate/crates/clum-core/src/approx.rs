//! Sampling-based cost approximation.
//!
//! Instead of solving the invariant over all N outcomes, binary-search the
//! bracket `[max{q_max, C0}, q_max + C0]` and test each midpoint c by
//! estimating the mean log reserve
//!
//! ```text
//! U(c) = (1/N) sum_j ln(c - q_j) = U1(c) + U2(c)
//! ```
//!
//! where U1 covers the outcomes at q_max (known exactly from the oracle's
//! max stats) and U2 is a Monte Carlo mean over the rest, drawn by rejection
//! from a uniform outcome sampler. The returned estimate lands within a
//! multiplicative (1 + 2 epsilon) of the true cost with probability at
//! least 1 - delta.
//!
//! The search runs in the offset variable `c - q_max`, which keeps U1 free
//! of cancellation; the bracket is held as (offset, width) so the width
//! halves exactly on every non-breaking round.

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::market::BRUTE_FORCE_LIMIT;

/// Maximum payout over all outcomes, and how many outcomes attain it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxStats {
    pub q_max: u64,
    pub s_qmax: u64,
}

/// What the solver needs from a market too large to enumerate: its size,
/// its max stats, and uniform outcome draws.
pub trait CostOracle {
    fn n_outcomes(&self) -> u64;
    fn max_stats(&self) -> MaxStats;
    /// Uniform over all N outcomes; returns (index, payout at index).
    fn sample_outcome(&self, rng: &mut dyn RngCore) -> (u64, u64);
}

/// Oracle over an explicit payout slice.
pub struct SliceOracle<'a> {
    q: &'a [u64],
    stats: MaxStats,
}

impl<'a> SliceOracle<'a> {
    pub fn new(q: &'a [u64]) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidMarket("outcome count N must be positive".into()));
        }
        let q_max = *q.iter().max().unwrap();
        let s_qmax = q.iter().filter(|&&x| x == q_max).count() as u64;
        Ok(SliceOracle { q, stats: MaxStats { q_max, s_qmax } })
    }
}

impl CostOracle for SliceOracle<'_> {
    fn n_outcomes(&self) -> u64 {
        self.q.len() as u64
    }

    fn max_stats(&self) -> MaxStats {
        self.stats
    }

    fn sample_outcome(&self, rng: &mut dyn RngCore) -> (u64, u64) {
        let j = rng.gen_range(0..self.q.len());
        (j as u64, self.q[j])
    }
}

/// One binary-search round: bracket before the update and the estimated
/// mean log reserve at its midpoint.
#[derive(Debug, Clone, Copy)]
pub struct RoundTrace {
    pub round: u32,
    pub a: f64,
    pub b: f64,
    pub width: f64,
    pub u_hat: f64,
}

#[derive(Debug, Clone)]
pub struct CostEstimate {
    pub c_hat: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub iterations: u32,
    pub trace: Vec<RoundTrace>,
    /// True when a round's estimate landed inside ln C0 +- epsilon and the
    /// search stopped at that midpoint.
    pub terminated_early: bool,
    pub initial_bracket: (f64, f64),
    /// Total outcome draws, including rejected ones.
    pub samples_drawn: u64,
}

/// Number of binary-search rounds.
pub fn round_cap(epsilon: f64) -> u32 {
    (1.0 / epsilon).log2().ceil() as u32
}

/// Exact contribution of the q_max outcomes: (s_qmax / N) ln(c - q_max).
pub fn u1(c: f64, stats: &MaxStats, n: u64) -> Result<f64> {
    let offset = c - stats.q_max as f64;
    if offset <= 0.0 {
        return Err(Error::SingularCost { c, q_max: stats.q_max as f64 });
    }
    Ok(stats.s_qmax as f64 / n as f64 * offset.ln())
}

fn check_epsilon_delta(epsilon: f64, delta: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be in (0, 1/2], got {epsilon}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must be in (0, 1), got {delta}")));
    }
    Ok(())
}

/// Hoeffding sample size: the mean of T estimates, each of a variable
/// ranged in [0, L], must sit within epsilon with probability 1 - delta.
fn sample_size(t_rounds: u32, l_bound: f64, epsilon: f64, delta: f64) -> u64 {
    let m = (t_rounds as f64 * l_bound * l_bound * (2.0 / delta).ln()
        / (2.0 * epsilon * epsilon))
        .ceil();
    (m as u64).max(1)
}

struct U2Estimate {
    value: f64,
    attempts: u64,
}

/// Monte Carlo estimate of the non-max outcomes' mean log reserve at
/// offset `c - q_max`. Draws are rejected while they hit q_max.
fn estimate_u2_at_offset<O: CostOracle + ?Sized>(
    offset: f64,
    stats: &MaxStats,
    n: u64,
    oracle: &O,
    m: u64,
    rejection_cap: u64,
    rng: &mut dyn RngCore,
) -> Result<U2Estimate> {
    debug_assert!(stats.s_qmax < n);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut accepted = 0u64;
    let mut attempts = 0u64;
    while accepted < m {
        if attempts >= rejection_cap {
            return Err(Error::SamplingBudget { attempts, accepted, needed: m });
        }
        attempts += 1;
        let (_, q_j) = oracle.sample_outcome(rng);
        if q_j == stats.q_max {
            continue;
        }
        accepted += 1;
        let d = (stats.q_max - q_j) as f64;
        let x = (offset + d).ln();
        let y = x - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let mean = sum / m as f64;
    let frac = (n - stats.s_qmax) as f64 / n as f64;
    Ok(U2Estimate { value: frac * mean, attempts })
}

/// Estimate U2(c_hat) alone, sized for a single round at confidence delta.
pub fn estimate_u2<O: CostOracle + ?Sized>(
    c_hat: f64,
    stats: &MaxStats,
    oracle: &O,
    epsilon: f64,
    delta: f64,
    c0: f64,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    check_epsilon_delta(epsilon, delta)?;
    let n = oracle.n_outcomes();
    if stats.s_qmax >= n {
        return Ok(0.0);
    }
    let offset = c_hat - stats.q_max as f64;
    if offset <= 0.0 {
        return Err(Error::SingularCost { c: c_hat, q_max: stats.q_max as f64 });
    }
    let l_bound = (c0 + stats.q_max as f64).ln().max(0.0);
    if l_bound == 0.0 {
        // q_max = 0 and C0 <= 1: every non-max draw is impossible anyway
        // (integral payouts force s_qmax = N); nothing to estimate.
        return Ok(0.0);
    }
    let t_rounds = round_cap(epsilon);
    let m = sample_size(t_rounds, l_bound, epsilon, delta);
    let cap = rejection_cap(m, n, stats.s_qmax);
    Ok(estimate_u2_at_offset(offset, stats, n, oracle, m, cap, rng)?.value)
}

/// Expected attempts per accepted draw is N / (N - s_qmax); allow 64x that.
fn rejection_cap(m: u64, n: u64, s_qmax: u64) -> u64 {
    let cap = 64u128 * m as u128 * n as u128 / (n - s_qmax) as u128;
    u64::try_from(cap).unwrap_or(u64::MAX).max(64 * m)
}

/// Approximate the cost to multiplicative (1 + 2 epsilon), confidence
/// 1 - delta, using only oracle queries and uniform samples.
pub fn approximate_cost<O: CostOracle + ?Sized, R: Rng>(
    oracle: &O,
    c0: f64,
    epsilon: f64,
    delta: f64,
    rng: &mut R,
) -> Result<CostEstimate> {
    check_epsilon_delta(epsilon, delta)?;
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::InvalidParameter(format!("C0 must be a positive real, got {c0}")));
    }
    let n = oracle.n_outcomes();
    if n == 0 {
        return Err(Error::InvalidMarket("outcome count N must be positive".into()));
    }
    let stats = oracle.max_stats();
    let q_max = stats.q_max as f64;

    // Every outcome at the max: the invariant pins C = q_max + C0 exactly.
    if stats.s_qmax >= n {
        let c = q_max + c0;
        return Ok(CostEstimate {
            c_hat: c,
            epsilon,
            delta,
            iterations: 0,
            trace: Vec::new(),
            terminated_early: false,
            initial_bracket: (c, c),
            samples_drawn: 0,
        });
    }

    // Bracket in offset space: a = max{q_max, C0} and b = q_max + C0
    // become [max{C0 - q_max, 0}, C0].
    let mut a_off = (c0 - q_max).max(0.0);
    let mut width = c0 - a_off;
    let initial_bracket = (q_max + a_off, q_max + a_off + width);
    debug_assert!(initial_bracket.1 / initial_bracket.0 <= 2.0 + 1e-12);

    let t_rounds = round_cap(epsilon);
    let l_bound = (c0 + q_max).ln().max(0.0);
    let m = sample_size(t_rounds, l_bound, epsilon, delta);
    let cap = rejection_cap(m, n, stats.s_qmax);
    let ln_c0 = c0.ln();
    let ratio_guard = epsilon.exp();

    let mut trace = Vec::with_capacity(t_rounds as usize);
    let mut samples_drawn = 0u64;
    let mut terminated_early = false;
    let mut c_hat = None;
    let mut iterations = 0u32;

    for round in 1..=t_rounds {
        let a = q_max + a_off;
        let b = q_max + (a_off + width);
        if b / a <= ratio_guard {
            break;
        }
        let mid_off = a_off + 0.5 * width;
        let u_1 = stats.s_qmax as f64 / n as f64 * mid_off.ln();
        let u_2 = if l_bound == 0.0 {
            0.0
        } else {
            let est =
                estimate_u2_at_offset(mid_off, &stats, n, oracle, m, cap, &mut *rng)?;
            samples_drawn += est.attempts;
            est.value
        };
        let u_hat = u_1 + u_2;
        iterations += 1;
        trace.push(RoundTrace { round, a, b, width, u_hat });

        if u_hat > ln_c0 + epsilon {
            // Midpoint reserve runs high: the root is below.
            width *= 0.5;
        } else if u_hat < ln_c0 - epsilon {
            a_off = mid_off;
            width *= 0.5;
        } else {
            terminated_early = true;
            c_hat = Some(q_max + mid_off);
            break;
        }
    }

    let c_hat = c_hat.unwrap_or(q_max + (a_off + 0.5 * width));
    debug_assert!(iterations <= t_rounds);
    Ok(CostEstimate {
        c_hat,
        epsilon,
        delta,
        iterations,
        trace,
        terminated_early,
        initial_bracket,
        samples_drawn,
    })
}

/// Convenience wrapper for explicit payout vectors.
pub fn approximate_cost_explicit<R: Rng>(
    q: &[u64],
    c0: f64,
    epsilon: f64,
    delta: f64,
    rng: &mut R,
) -> Result<CostEstimate> {
    if q.len() as u64 > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity {
            what: "explicit payout vector",
            requested: q.len() as u64,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let oracle = SliceOracle::new(q)?;
    approximate_cost(&oracle, c0, epsilon, delta, rng)
}
