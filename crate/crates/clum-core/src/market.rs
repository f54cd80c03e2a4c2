//! Market state, securities, payouts and instantaneous prices.
//!
//! A market over `N` outcomes collects an initial subsidy `C0` and sells
//! securities, each a payout predicate over outcomes. The cost function
//! `C(q)` is pinned by keeping the mean log reserve constant:
//!
//! ```text
//! (1/N) * sum_j ln(C - q_j) = ln(C0)
//! ```
//!
//! where `q_j` is the total payout owed if outcome `j` occurs. Prices are
//! normalized reciprocals of the per-outcome reserves `C - q_j`. The price
//! functions here are exact reference implementations that walk all `N`
//! outcomes; they are guarded by [`BRUTE_FORCE_LIMIT`] and large markets
//! should go through the approximation path instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest outcome count the exact O(N) paths will materialize or walk.
pub const BRUTE_FORCE_LIMIT: u64 = 1 << 20;

/// One event (1-based) or its negation. Event `i` occupies bit `i - 1` of an
/// outcome index, so event 1 is the least-significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(u32, bool)", into = "(u32, bool)")]
pub struct Literal {
    pub event: u32,
    pub positive: bool,
}

impl Literal {
    pub fn new(event: u32, positive: bool) -> Self {
        Literal { event, positive }
    }

    /// Truth value of this literal under the outcome's bit assignment.
    #[inline]
    pub fn satisfied_by(&self, outcome: u64) -> bool {
        debug_assert!(self.event >= 1);
        ((outcome >> (self.event - 1)) & 1 == 1) == self.positive
    }

    pub fn negated(&self) -> Self {
        Literal { event: self.event, positive: !self.positive }
    }
}

impl From<(u32, bool)> for Literal {
    fn from((event, positive): (u32, bool)) -> Self {
        Literal { event, positive }
    }
}

impl From<Literal> for (u32, bool) {
    fn from(l: Literal) -> Self {
        (l.event, l.positive)
    }
}

/// A payout predicate over outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Security {
    /// Disjunction of two literals over distinct events; pays 1 on outcomes
    /// that make it true.
    Clause2(Literal, Literal),
    /// Pays 1 on a single outcome.
    Indicator(u64),
    /// Pays 1 on every outcome index in `lo..=hi`.
    Interval { lo: u64, hi: u64 },
}

impl Security {
    #[inline]
    pub fn pays_out(&self, outcome: u64) -> bool {
        match self {
            Security::Clause2(a, b) => a.satisfied_by(outcome) || b.satisfied_by(outcome),
            Security::Indicator(j) => outcome == *j,
            Security::Interval { lo, hi } => *lo <= outcome && outcome <= *hi,
        }
    }

    /// Structural checks against the market's dimensions.
    pub fn validate(&self, n_outcomes: u64, n_events: Option<u32>) -> Result<()> {
        match *self {
            Security::Clause2(a, b) => {
                let n = n_events.ok_or_else(|| {
                    Error::InvalidSecurity(
                        "clause securities need a Boolean market (n_events set)".into(),
                    )
                })?;
                for lit in [a, b] {
                    if lit.event == 0 || lit.event > n {
                        return Err(Error::InvalidSecurity(format!(
                            "literal event {} outside 1..={n}",
                            lit.event
                        )));
                    }
                }
                if a.event == b.event {
                    return Err(Error::InvalidSecurity(format!(
                        "clause literals must reference distinct events (got {})",
                        a.event
                    )));
                }
                Ok(())
            }
            Security::Indicator(j) => {
                if j >= n_outcomes {
                    Err(Error::OutcomeOutOfRange { index: j, n_outcomes })
                } else {
                    Ok(())
                }
            }
            Security::Interval { lo, hi } => {
                if lo > hi || hi >= n_outcomes {
                    Err(Error::IntervalOutOfRange { lo, hi, n_outcomes })
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// A purchased position: a security and the (integral) quantity held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LedgerEntry {
    pub security: Security,
    pub quantity: u64,
}

/// Full market state: subsidy, outcome space and the ledger of purchases.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketState {
    c0: f64,
    n_events: Option<u32>,
    n_outcomes: u64,
    ledger: Vec<LedgerEntry>,
}

impl MarketState {
    /// Boolean market over `n_events` binary events, `N = 2^n_events`.
    pub fn boolean(c0: f64, n_events: u32) -> Result<Self> {
        if n_events >= 63 {
            return Err(Error::Capacity {
                what: "boolean outcome space",
                requested: n_events as u64,
                limit: 62,
            });
        }
        Self::validated(c0, Some(n_events), 1u64 << n_events, Vec::new())
    }

    /// Interval market over `n_outcomes` ordered outcomes.
    pub fn interval(c0: f64, n_outcomes: u64) -> Result<Self> {
        Self::validated(c0, None, n_outcomes, Vec::new())
    }

    pub fn with_ledger(
        c0: f64,
        n_events: Option<u32>,
        n_outcomes: u64,
        ledger: Vec<LedgerEntry>,
    ) -> Result<Self> {
        Self::validated(c0, n_events, n_outcomes, ledger)
    }

    fn validated(
        c0: f64,
        n_events: Option<u32>,
        n_outcomes: u64,
        ledger: Vec<LedgerEntry>,
    ) -> Result<Self> {
        if !(c0 > 0.0) || !c0.is_finite() {
            return Err(Error::InvalidMarket(format!(
                "initial subsidy C0 must be a positive real, got {c0}"
            )));
        }
        if n_outcomes == 0 {
            return Err(Error::InvalidMarket("outcome count N must be positive".into()));
        }
        if let Some(n) = n_events {
            if n >= 63 || (1u64 << n) != n_outcomes {
                return Err(Error::InvalidMarket(format!(
                    "boolean market with {n} events must have N = 2^{n}, got {n_outcomes}"
                )));
            }
        }
        for entry in &ledger {
            entry.security.validate(n_outcomes, n_events)?;
        }
        Ok(MarketState { c0, n_events, n_outcomes, ledger })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn n_events(&self) -> Option<u32> {
        self.n_events
    }

    pub fn n_outcomes(&self) -> u64 {
        self.n_outcomes
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    /// Record a purchase of `quantity` shares of `security`.
    pub fn buy(&mut self, security: Security, quantity: u64) -> Result<()> {
        security.validate(self.n_outcomes, self.n_events)?;
        self.ledger.push(LedgerEntry { security, quantity });
        Ok(())
    }

    /// Total payout owed if `outcome` occurs: the sum of quantities over
    /// ledger entries whose predicate is true at the outcome.
    pub fn payout_for_outcome(&self, outcome: u64) -> Result<u64> {
        if outcome >= self.n_outcomes {
            return Err(Error::OutcomeOutOfRange { index: outcome, n_outcomes: self.n_outcomes });
        }
        Ok(self
            .ledger
            .iter()
            .filter(|e| e.security.pays_out(outcome))
            .map(|e| e.quantity)
            .sum())
    }

    pub fn share_vector(&self) -> ShareVector<'_> {
        ShareVector::Implicit(self)
    }

    /// Materialize the full payout vector. Guarded so callers cannot
    /// accidentally walk a combinatorially large outcome space.
    pub fn materialize_payouts(&self, limit: u64) -> Result<Vec<u64>> {
        if self.n_outcomes > limit {
            return Err(Error::Capacity {
                what: "explicit payout vector",
                requested: self.n_outcomes,
                limit,
            });
        }
        let n = self.n_outcomes as usize;
        let mut q = vec![0u64; n];
        for entry in &self.ledger {
            match entry.security {
                Security::Indicator(j) => q[j as usize] += entry.quantity,
                Security::Interval { lo, hi } => {
                    for slot in &mut q[lo as usize..=hi as usize] {
                        *slot += entry.quantity;
                    }
                }
                Security::Clause2(a, b) => {
                    for (j, slot) in q.iter_mut().enumerate() {
                        if a.satisfied_by(j as u64) || b.satisfied_by(j as u64) {
                            *slot += entry.quantity;
                        }
                    }
                }
            }
        }
        Ok(q)
    }
}

/// Payout vector view: either an explicit array or the ledger it is implied by.
#[derive(Debug, Clone, Copy)]
pub enum ShareVector<'a> {
    Explicit(&'a [u64]),
    Implicit(&'a MarketState),
}

impl<'a> ShareVector<'a> {
    pub fn n_outcomes(&self) -> u64 {
        match self {
            ShareVector::Explicit(q) => q.len() as u64,
            ShareVector::Implicit(state) => state.n_outcomes(),
        }
    }

    pub fn payout(&self, outcome: u64) -> Result<u64> {
        match self {
            ShareVector::Explicit(q) => {
                q.get(outcome as usize).copied().ok_or(Error::OutcomeOutOfRange {
                    index: outcome,
                    n_outcomes: q.len() as u64,
                })
            }
            ShareVector::Implicit(state) => state.payout_for_outcome(outcome),
        }
    }

    pub fn materialize(&self, limit: u64) -> Result<Vec<u64>> {
        match self {
            ShareVector::Explicit(q) => {
                if q.len() as u64 > limit {
                    return Err(Error::Capacity {
                        what: "explicit payout vector",
                        requested: q.len() as u64,
                        limit,
                    });
                }
                Ok(q.to_vec())
            }
            ShareVector::Implicit(state) => state.materialize_payouts(limit),
        }
    }
}

fn reciprocal_sums(
    q: &ShareVector<'_>,
    c: f64,
    mut in_set: impl FnMut(u64) -> bool,
) -> Result<(f64, f64)> {
    let n = q.n_outcomes();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity {
            what: "exact price sum over outcomes",
            requested: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut denom = 0.0f64;
    let mut numer = 0.0f64;
    for j in 0..n {
        let reserve = c - q.payout(j)? as f64;
        if reserve <= 0.0 {
            return Err(Error::SingularCost { c, q_max: q.payout(j)? as f64 });
        }
        let term = 1.0 / reserve;
        denom += term;
        if in_set(j) {
            numer += term;
        }
    }
    Ok((numer, denom))
}

/// Instantaneous price of the single-outcome (Arrow-Debreu) security for
/// outcome `j`, given the cost value `c`:
/// `p_j = (1/(c - q_j)) / sum_i 1/(c - q_i)`.
pub fn outcome_price(q: &ShareVector<'_>, c: f64, j: u64) -> Result<f64> {
    if j >= q.n_outcomes() {
        return Err(Error::OutcomeOutOfRange { index: j, n_outcomes: q.n_outcomes() });
    }
    let (numer, denom) = reciprocal_sums(q, c, |i| i == j)?;
    Ok(numer / denom)
}

/// The same price evaluated from `u = ln(C - q_max)`. Dividing every
/// reciprocal by the largest one turns the terms into
/// `sigma_i = (C - q_max)/(C - q_i) = 1/(1 + e^{ln d_i - u})` with
/// `d_i = q_max - q_i`, which stays exact arbitrarily deep into the regime
/// where `C - q_i` would cancel to zero in f64.
pub fn outcome_price_log(q: &ShareVector<'_>, log_offset: f64, j: u64) -> Result<f64> {
    let n = q.n_outcomes();
    if j >= n {
        return Err(Error::OutcomeOutOfRange { index: j, n_outcomes: n });
    }
    let mut q_max = 0u64;
    for i in 0..n {
        q_max = q_max.max(q.payout(i)?);
    }
    let sigma = |d: u64| -> f64 {
        if d == 0 {
            1.0
        } else {
            1.0 / (1.0 + ((d as f64).ln() - log_offset).exp())
        }
    };
    let mut denom = 0.0;
    for i in 0..n {
        denom += sigma(q_max - q.payout(i)?);
    }
    Ok(sigma(q_max - q.payout(j)?) / denom)
}

/// Price of a security: the sum of outcome prices over its satisfying set.
pub fn security_price(q: &ShareVector<'_>, c: f64, s: &Security) -> Result<f64> {
    let n = q.n_outcomes();
    match *s {
        Security::Indicator(j) => outcome_price(q, c, j),
        Security::Interval { lo, hi } => {
            if lo > hi || hi >= n {
                return Err(Error::IntervalOutOfRange { lo, hi, n_outcomes: n });
            }
            let (numer, denom) = reciprocal_sums(q, c, |i| lo <= i && i <= hi)?;
            Ok(numer / denom)
        }
        Security::Clause2(a, b) => {
            let (numer, denom) =
                reciprocal_sums(q, c, |i| a.satisfied_by(i) || b.satisfied_by(i))?;
            Ok(numer / denom)
        }
    }
}

// ---------------------------------------------------------------------------
// JSON ledger document
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum WireSecurity {
    Clause2 { lits: [Literal; 2], qty: u64 },
    Indicator { outcome: u64, qty: u64 },
    Interval { lo: u64, hi: u64, qty: u64 },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireLedger {
    #[serde(rename = "C0")]
    c0: f64,
    #[serde(default)]
    n_events: Option<u32>,
    #[serde(rename = "N")]
    n: u64,
    securities: Vec<WireSecurity>,
}

impl MarketState {
    /// Parse the JSON ledger document. Unknown fields are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let wire: WireLedger =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let ledger = wire
            .securities
            .into_iter()
            .map(|s| match s {
                WireSecurity::Clause2 { lits, qty } => LedgerEntry {
                    security: Security::Clause2(lits[0], lits[1]),
                    quantity: qty,
                },
                WireSecurity::Indicator { outcome, qty } => {
                    LedgerEntry { security: Security::Indicator(outcome), quantity: qty }
                }
                WireSecurity::Interval { lo, hi, qty } => {
                    LedgerEntry { security: Security::Interval { lo, hi }, quantity: qty }
                }
            })
            .collect();
        Self::validated(wire.c0, wire.n_events, wire.n, ledger)
    }

    pub fn to_json(&self) -> String {
        let securities = self
            .ledger
            .iter()
            .map(|e| match e.security {
                Security::Clause2(a, b) => {
                    WireSecurity::Clause2 { lits: [a, b], qty: e.quantity }
                }
                Security::Indicator(j) => {
                    WireSecurity::Indicator { outcome: j, qty: e.quantity }
                }
                Security::Interval { lo, hi } => {
                    WireSecurity::Interval { lo, hi, qty: e.quantity }
                }
            })
            .collect();
        let wire = WireLedger {
            c0: self.c0,
            n_events: self.n_events,
            n: self.n_outcomes,
            securities,
        };
        serde_json::to_string_pretty(&wire).expect("ledger serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(event: u32, positive: bool) -> Literal {
        Literal::new(event, positive)
    }

    /// Flat-array oracle for payouts: apply every entry to a dense vector.
    fn payout_oracle(entries: &[LedgerEntry], n: u64) -> Vec<u64> {
        let mut q = vec![0u64; n as usize];
        for e in entries {
            for (j, slot) in q.iter_mut().enumerate() {
                if e.security.pays_out(j as u64) {
                    *slot += e.quantity;
                }
            }
        }
        q
    }

    #[test]
    fn empty_ledger_pays_nothing() {
        let state = MarketState::interval(7.0, 10).unwrap();
        for j in 0..10 {
            assert_eq!(state.payout_for_outcome(j).unwrap(), 0);
        }
    }

    #[test]
    fn clause_truth_table_payout() {
        let mut state = MarketState::boolean(1.0, 2).unwrap();
        state.buy(Security::Clause2(lit(1, true), lit(2, true)), 5).unwrap();
        // Outcome bits: event 1 is bit 0, event 2 is bit 1.
        assert_eq!(state.payout_for_outcome(0b00).unwrap(), 0);
        assert_eq!(state.payout_for_outcome(0b01).unwrap(), 5);
        assert_eq!(state.payout_for_outcome(0b10).unwrap(), 5);
        assert_eq!(state.payout_for_outcome(0b11).unwrap(), 5);
    }

    #[test]
    fn overlapping_intervals_payout() {
        let mut state = MarketState::interval(1.0, 10).unwrap();
        state.buy(Security::Interval { lo: 0, hi: 4 }, 1).unwrap();
        state.buy(Security::Interval { lo: 2, hi: 6 }, 2).unwrap();
        let oracle = payout_oracle(state.ledger(), 10);
        assert_eq!(oracle[3], 3);
        for j in 0..10 {
            assert_eq!(state.payout_for_outcome(j).unwrap(), oracle[j as usize]);
        }
    }

    #[test]
    fn payout_rejects_out_of_range() {
        let state = MarketState::interval(1.0, 4).unwrap();
        assert!(matches!(
            state.payout_for_outcome(4),
            Err(Error::OutcomeOutOfRange { .. })
        ));
    }

    #[test]
    fn symmetric_prices_are_uniform() {
        let q = vec![0u64; 4];
        let v = ShareVector::Explicit(&q);
        for j in 0..4 {
            let p = outcome_price(&v, 3.0, j).unwrap();
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_shift_keeps_prices_uniform() {
        let q = vec![9u64; 5];
        let v = ShareVector::Explicit(&q);
        for j in 0..5 {
            let p = outcome_price(&v, 11.5, j).unwrap();
            assert!((p - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_ratio_two_outcome_price() {
        // q = (1, 0) and C = (1+sqrt(5))/2 solves the invariant for C0 = 1;
        // p_0 = C / (C + (C - 1)) = phi / sqrt(5).
        let q = vec![1u64, 0u64];
        let v = ShareVector::Explicit(&q);
        let c = (1.0 + 5.0f64.sqrt()) / 2.0;
        let p = outcome_price(&v, c, 0).unwrap();
        assert!((p - c / (2.0 * c - 1.0)).abs() < 1e-12);
        assert!((p - 0.723_606_797_749_979).abs() < 1e-12);
    }

    #[test]
    fn singular_cost_is_rejected() {
        let q = vec![3u64, 1u64];
        let v = ShareVector::Explicit(&q);
        assert!(matches!(outcome_price(&v, 3.0, 0), Err(Error::SingularCost { .. })));
    }

    #[test]
    fn indicator_price_matches_outcome_price() {
        let q = vec![2u64, 0, 1, 4];
        let v = ShareVector::Explicit(&q);
        let c = 5.5;
        for j in 0..4 {
            let a = security_price(&v, c, &Security::Indicator(j)).unwrap();
            let b = outcome_price(&v, c, j).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn log_price_matches_plain_price_when_reserves_are_fat() {
        let q = vec![7u64, 0, 3, 5, 5];
        let v = ShareVector::Explicit(&q);
        let sol = crate::exact::solve_cost(&v, 2.0, &Default::default()).unwrap();
        let mut total = 0.0;
        for j in 0..5 {
            let a = outcome_price(&v, sol.cost, j).unwrap();
            let b = outcome_price_log(&v, sol.log_offset, j).unwrap();
            assert!((a - b).abs() < 1e-12, "j={j}: {a} vs {b}");
            total += b;
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn log_price_survives_offset_underflow() {
        // One outcome so far ahead that C rounds to q_max in f64 and the
        // plain formula hits SingularCost; the sigma form still prices it.
        let mut q = vec![0u64; 8];
        q[3] = 1_000_000;
        let v = ShareVector::Explicit(&q);
        let sol = crate::exact::solve_cost(&v, 0.5, &Default::default()).unwrap();
        assert_eq!(sol.cost, 1_000_000.0);
        assert!(matches!(outcome_price(&v, sol.cost, 3), Err(Error::SingularCost { .. })));

        let total: f64 = (0..8).map(|j| outcome_price_log(&v, sol.log_offset, j).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let p_max = outcome_price_log(&v, sol.log_offset, 3).unwrap();
        assert!(p_max > 1.0 - 1e-9);
        for j in 0..8u64 {
            if j != 3 {
                let p = outcome_price_log(&v, sol.log_offset, j).unwrap();
                assert!(p > 0.0 && p < 1e-9);
            }
        }
    }

    #[test]
    fn full_cover_prices_to_one() {
        let q = vec![2u64, 0, 1, 4, 3, 3];
        let v = ShareVector::Explicit(&q);
        let p = security_price(&v, 6.25, &Security::Interval { lo: 0, hi: 5 }).unwrap();
        assert!((p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn clause_price_on_fresh_market_is_three_quarters() {
        let q = vec![0u64; 4];
        let v = ShareVector::Explicit(&q);
        let s = Security::Clause2(lit(1, true), lit(2, true));
        let p = security_price(&v, 1.0, &s).unwrap();
        assert!((p - 0.75).abs() < 1e-12);
    }

    #[test]
    fn ledger_json_round_trip_and_rejects_unknown_fields() {
        let text = r#"{
            "C0": 2.5,
            "n_events": 2,
            "N": 4,
            "securities": [
                {"type": "clause2", "lits": [[1, true], [2, false]], "qty": 3},
                {"type": "indicator", "outcome": 1, "qty": 2},
                {"type": "interval", "lo": 0, "hi": 3, "qty": 1}
            ]
        }"#;
        let state = MarketState::from_json(text).unwrap();
        assert_eq!(state.n_outcomes(), 4);
        assert_eq!(state.ledger().len(), 3);
        let round = MarketState::from_json(&state.to_json()).unwrap();
        assert_eq!(round, state);

        let bad = r#"{"C0": 1.0, "N": 2, "securities": [], "extra": 1}"#;
        assert!(matches!(MarketState::from_json(bad), Err(Error::Parse(_))));
    }

    #[test]
    fn validation_rejects_bad_securities() {
        let mut boolean = MarketState::boolean(1.0, 3).unwrap();
        assert!(boolean
            .buy(Security::Clause2(lit(1, true), lit(1, false)), 1)
            .is_err());
        assert!(boolean.buy(Security::Clause2(lit(1, true), lit(4, false)), 1).is_err());
        let mut interval = MarketState::interval(1.0, 8).unwrap();
        assert!(interval.buy(Security::Interval { lo: 3, hi: 2 }, 1).is_err());
        assert!(interval.buy(Security::Interval { lo: 0, hi: 8 }, 1).is_err());
        assert!(interval
            .buy(Security::Clause2(lit(1, true), lit(2, true)), 1)
            .is_err());
        assert!(MarketState::interval(0.0, 4).is_err());
        assert!(MarketState::with_ledger(1.0, Some(2), 5, Vec::new()).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_entry(n_events: u32) -> impl Strategy<Value = LedgerEntry> {
            let n = 1u64 << n_events;
            let clause = (1..=n_events, any::<bool>(), 1..=n_events, any::<bool>())
                .prop_filter("distinct events", |(a, _, b, _)| a != b)
                .prop_map(|(a, ap, b, bp)| Security::Clause2(lit(a, ap), lit(b, bp)));
            let indicator = (0..n).prop_map(Security::Indicator);
            let interval = (0..n, 0..n).prop_map(move |(a, b)| Security::Interval {
                lo: a.min(b),
                hi: a.max(b),
            });
            (prop_oneof![clause, indicator, interval], 0u64..50)
                .prop_map(|(security, quantity)| LedgerEntry { security, quantity })
        }

        proptest! {
            #[test]
            fn implicit_and_explicit_payouts_agree(
                n_events in 1u32..=6,
                entries_seed in prop::collection::vec(arb_entry(6), 0..12),
            ) {
                let n = 1u64 << n_events;
                let entries: Vec<_> = entries_seed
                    .into_iter()
                    .filter(|e| e.security.validate(n, Some(n_events)).is_ok())
                    .collect();
                let state =
                    MarketState::with_ledger(1.0, Some(n_events), n, entries).unwrap();
                let explicit = state.materialize_payouts(BRUTE_FORCE_LIMIT).unwrap();
                for j in 0..n {
                    prop_assert_eq!(
                        state.payout_for_outcome(j).unwrap(),
                        explicit[j as usize]
                    );
                }
            }

            #[test]
            fn prices_normalize_and_respond_monotonically(
                q in prop::collection::vec(0u64..1000, 2..40),
                bump in 1u64..20,
                margin in 0.25f64..10.0,
            ) {
                let q_max = *q.iter().max().unwrap();
                let c = (q_max + bump) as f64 + margin;
                let v = ShareVector::Explicit(&q);
                let n = q.len();

                let prices: Vec<f64> =
                    (0..n).map(|j| outcome_price(&v, c, j as u64).unwrap()).collect();
                let total: f64 = prices.iter().sum();
                prop_assert!((total - 1.0).abs() <= 1e-9);

                // Bump one coordinate, holding c fixed: its price strictly
                // rises, every other price strictly falls.
                let target = n / 2;
                let mut bumped = q.clone();
                bumped[target] += bump;
                let vb = ShareVector::Explicit(&bumped);
                for j in 0..n {
                    let before = prices[j];
                    let after = outcome_price(&vb, c, j as u64).unwrap();
                    if j == target {
                        prop_assert!(after > before);
                    } else {
                        prop_assert!(after < before);
                    }
                }
            }
        }
    }
}
