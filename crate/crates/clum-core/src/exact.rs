//! Exact cost recovery: solve the invariant for `C` given a share vector.
//!
//! The solve runs in the offset variable `t = C - q_max`, and internally in
//! `u = ln t`. This matters: for ledgers with a unique maximum and large
//! payouts elsewhere, the true offset can be far below the smallest positive
//! f64 (`ln t` on the order of -10^4 is routine), so neither `C` nor `t`
//! carries the answer in floating point. The log offset always does.
//!
//! In `u`-space the residual
//!
//! ```text
//! g(u) = (1/N) * [ s*u + sum_{d_j > 0} ln(e^u + d_j) ] - ln C0
//! ```
//!
//! (with `d_j = q_max - q_j` and `s` the multiplicity of `d = 0`) is strictly
//! increasing and convex, so safeguarded Newton from the upper bracket
//! converges monotonically and never escapes the bisection bracket.

use crate::error::{Error, Result};
use crate::market::{MarketState, Security, ShareVector, BRUTE_FORCE_LIMIT};

/// Root-finder knobs. The tolerance is on the invariant residual itself
/// (log domain), which makes it scale-free.
#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    pub abs_tol: f64,
    pub max_iter: u32,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { abs_tol: 1e-12, max_iter: 200 }
    }
}

impl SolveConfig {
    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidParameter(format!(
                "solver config needs abs_tol > 0 and max_iter >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Solved cost. `cost = q_max + offset` may round to `q_max` when the offset
/// underflows; `log_offset` is always finite and is the faithful answer.
#[derive(Debug, Clone, Copy)]
pub struct CostSolution {
    pub cost: f64,
    pub q_max: f64,
    pub offset: f64,
    pub log_offset: f64,
    pub residual: f64,
    pub iterations: u32,
}

/// One run of equal deficits: `(q_max - q_j, multiplicity)`.
pub type DeficitGroup = (f64, u64);

/// Collapse a payout vector into sorted deficit groups. Grouping makes the
/// residual evaluation O(#distinct values) per iteration instead of O(N).
pub fn payout_groups(q: &[u64]) -> (u64, Vec<DeficitGroup>) {
    let q_max = q.iter().copied().max().unwrap_or(0);
    let mut sorted: Vec<u64> = q.to_vec();
    sorted.sort_unstable();
    let mut groups: Vec<DeficitGroup> = Vec::new();
    for &v in sorted.iter().rev() {
        let d = (q_max - v) as f64;
        match groups.last_mut() {
            Some((last, count)) if *last == d => *count += 1,
            _ => groups.push((d, 1)),
        }
    }
    (q_max, groups)
}

struct Residual {
    // (deficit, ln deficit, multiplicity) for d > 0 groups.
    terms: Vec<(f64, f64, f64)>,
    s: f64,
    n: f64,
    ln_c0: f64,
}

fn kahan_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let y = x - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

/// ln(e^u + d) for d > 0, stable across the full range of u.
fn log_offset_plus(u: f64, ln_d: f64) -> f64 {
    let (hi, lo) = if u >= ln_d { (u, ln_d) } else { (ln_d, u) };
    hi + (lo - hi).exp().ln_1p()
}

impl Residual {
    fn new(groups: &[DeficitGroup], c0: f64) -> Result<Self> {
        let mut s = 0u64;
        let mut n = 0u64;
        let mut terms = Vec::with_capacity(groups.len());
        for &(d, mult) in groups {
            if mult == 0 {
                continue;
            }
            if !(d >= 0.0) || !d.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "deficits must be finite and nonnegative, got {d}"
                )));
            }
            n += mult;
            if d == 0.0 {
                s += mult;
            } else {
                terms.push((d, d.ln(), mult as f64));
            }
        }
        if s == 0 {
            return Err(Error::InvalidParameter(
                "deficit groups must include the zero deficit (the argmax outcomes)".into(),
            ));
        }
        Ok(Residual { terms, s: s as f64, n: n as f64, ln_c0: c0.ln() })
    }

    /// g(u) and g'(u).
    fn eval(&self, u: f64) -> (f64, f64) {
        let mut sum = self.s * u;
        let mut comp = 0.0;
        let mut slope = self.s;
        for &(_, ln_d, mult) in &self.terms {
            kahan_add(&mut sum, &mut comp, mult * log_offset_plus(u, ln_d));
            // sigma = t / (t + d), written to avoid overflow for ln_d - u large.
            let sigma = 1.0 / (1.0 + (ln_d - u).exp());
            slope += mult * sigma;
        }
        (sum / self.n - self.ln_c0, slope / self.n)
    }

    /// Analytic lower bracket: for u <= ln C0,
    /// g(u) <= (s*u + sum mult*ln(C0 + d)) / N - ln C0, and the right side
    /// hits zero at the value below; backing off by 1 makes g strictly
    /// negative there.
    fn lower_bracket(&self, c0: f64) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for &(d, _, mult) in &self.terms {
            kahan_add(&mut sum, &mut comp, mult * (c0 + d).ln());
        }
        (self.n * self.ln_c0 - sum) / self.s - 1.0
    }
}

/// Solve the invariant over deficit groups. `q_max` is only echoed into the
/// solution; the groups fully determine the offset.
pub fn solve_deficit_groups(
    groups: &[DeficitGroup],
    q_max: f64,
    c0: f64,
    cfg: &SolveConfig,
) -> Result<CostSolution> {
    cfg.validate()?;
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::InvalidParameter(format!("C0 must be a positive real, got {c0}")));
    }
    let r = Residual::new(groups, c0)?;

    // All outcomes at the max: the invariant collapses to ln t = ln C0.
    if r.terms.is_empty() {
        return Ok(CostSolution {
            cost: q_max + c0,
            q_max,
            offset: c0,
            log_offset: c0.ln(),
            residual: 0.0,
            iterations: 0,
        });
    }

    let mut hi = c0.ln();
    let mut lo = r.lower_bracket(c0);
    debug_assert!(lo < hi);

    let mut u = hi;
    let mut iterations = 0u32;
    let (mut g, mut dg) = r.eval(u);
    while g.abs() > cfg.abs_tol {
        if iterations >= cfg.max_iter {
            return Err(Error::NonConvergence {
                lower: q_max + lo.exp(),
                upper: q_max + hi.exp(),
                residual: g,
                iterations,
            });
        }
        iterations += 1;
        if g > 0.0 {
            hi = u;
        } else {
            lo = u;
        }
        let newton = u - g / dg;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if next == u {
            // Bracket exhausted at this precision; accept the closest point.
            break;
        }
        u = next;
        (g, dg) = r.eval(u);
    }

    let offset = u.exp();
    Ok(CostSolution {
        cost: q_max + offset,
        q_max,
        offset,
        log_offset: u,
        residual: g,
        iterations,
    })
}

/// Solve for the full cost details of a share vector.
pub fn solve_cost(q: &ShareVector<'_>, c0: f64, cfg: &SolveConfig) -> Result<CostSolution> {
    let payouts = q.materialize(BRUTE_FORCE_LIMIT)?;
    if payouts.is_empty() {
        return Err(Error::InvalidMarket("outcome count N must be positive".into()));
    }
    let (q_max, groups) = payout_groups(&payouts);
    solve_deficit_groups(&groups, q_max as f64, c0, cfg)
}

/// Solve for `C` alone.
pub fn solve_cost_exact(q: &ShareVector<'_>, c0: f64, cfg: &SolveConfig) -> Result<f64> {
    Ok(solve_cost(q, c0, cfg)?.cost)
}

/// Re-evaluate the invariant residual at a given log offset, from scratch.
pub fn invariant_residual(q: &ShareVector<'_>, c0: f64, log_offset: f64) -> Result<f64> {
    let payouts = q.materialize(BRUTE_FORCE_LIMIT)?;
    let (_, groups) = payout_groups(&payouts);
    let r = Residual::new(&groups, c0)?;
    Ok(r.eval(log_offset).0)
}

/// `1/p_omega` for an outcome attaining `q_max`, evaluated directly in the
/// log offset: `1/p = sum_j t/(t + d_j) = sum_j 1/(1 + e^(ln d_j - u))`.
pub fn inverse_max_outcome_price(groups: &[DeficitGroup], log_offset: f64) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &(d, mult) in groups {
        let sigma =
            if d == 0.0 { 1.0 } else { 1.0 / (1.0 + (d.ln() - log_offset).exp()) };
        kahan_add(&mut sum, &mut comp, mult as f64 * sigma);
    }
    sum
}

/// Price of a trade: the cost-function increase from buying `qty` shares of
/// `security` on top of the current ledger.
pub fn trade_cost(
    state: &MarketState,
    security: Security,
    qty: u64,
    cfg: &SolveConfig,
) -> Result<f64> {
    security.validate(state.n_outcomes(), state.n_events())?;
    if qty == 0 {
        return Ok(0.0);
    }
    let before = state.materialize_payouts(BRUTE_FORCE_LIMIT)?;
    let mut after = before.clone();
    for (j, slot) in after.iter_mut().enumerate() {
        if security.pays_out(j as u64) {
            *slot += qty;
        }
    }
    let (qm_b, groups_b) = payout_groups(&before);
    let (qm_a, groups_a) = payout_groups(&after);
    let sol_b = solve_deficit_groups(&groups_b, qm_b as f64, state.c0(), cfg)?;
    let sol_a = solve_deficit_groups(&groups_a, qm_a as f64, state.c0(), cfg)?;
    // Difference the components to dodge the q_max + offset rounding; a
    // positive purchase cannot cost less than zero, so clamp solver noise.
    let cost = (sol_a.q_max - sol_b.q_max) + (sol_a.offset - sol_b.offset);
    Ok(cost.max(0.0))
}
