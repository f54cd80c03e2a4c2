//! 2-SAT formulas: satisfiability via implication-graph SCCs, DIMACS I/O.

use crate::error::{Error, Result};
use crate::market::{Literal, Security};

/// Conjunction of 2-literal clauses over `n` Boolean events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSatFormula {
    n: u32,
    clauses: Vec<(Literal, Literal)>,
}

impl TwoSatFormula {
    /// Requires 1 <= n <= 62, well-formed clauses over distinct events, and
    /// strictly fewer clauses than outcomes (k < 2^n).
    pub fn new(n: u32, clauses: Vec<(Literal, Literal)>) -> Result<Self> {
        if n == 0 || n > 62 {
            return Err(Error::InvalidParameter(format!(
                "event count must be in 1..=62, got {n}"
            )));
        }
        let n_outcomes = 1u64 << n;
        for &(a, b) in &clauses {
            Security::Clause2(a, b).validate(n_outcomes, Some(n))?;
        }
        if clauses.len() as u64 >= n_outcomes {
            return Err(Error::InvalidParameter(format!(
                "need fewer clauses than outcomes: {} clauses over 2^{n} outcomes",
                clauses.len()
            )));
        }
        Ok(TwoSatFormula { n, clauses })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.clauses.len()
    }

    pub fn n_outcomes(&self) -> u64 {
        1u64 << self.n
    }

    pub fn clauses(&self) -> &[(Literal, Literal)] {
        &self.clauses
    }

    pub fn securities(&self) -> impl Iterator<Item = Security> + '_ {
        self.clauses.iter().map(|&(a, b)| Security::Clause2(a, b))
    }

    /// True when the outcome's bit assignment satisfies every clause.
    pub fn satisfied_by(&self, outcome: u64) -> bool {
        self.clauses
            .iter()
            .all(|&(a, b)| a.satisfied_by(outcome) || b.satisfied_by(outcome))
    }

    /// Number of clauses the outcome falsifies.
    pub fn falsified_count(&self, outcome: u64) -> usize {
        self.clauses
            .iter()
            .filter(|&&(a, b)| !a.satisfied_by(outcome) && !b.satisfied_by(outcome))
            .count()
    }

    /// A satisfying assignment as an outcome bitmask (event i at bit i-1),
    /// or `None` when unsatisfiable. Implication graph + SCC, linear time.
    pub fn find_assignment(&self) -> Option<u64> {
        // Literal node: 2*(event-1), negation at +1; xor 1 negates.
        let node = |l: Literal| (2 * (l.event - 1) + if l.positive { 0 } else { 1 }) as usize;
        let n_nodes = 2 * self.n as usize;
        let mut adj = vec![Vec::new(); n_nodes];
        for &(a, b) in &self.clauses {
            adj[node(a.negated())].push(node(b) as u32);
            adj[node(b.negated())].push(node(a) as u32);
        }
        let comp = tarjan_scc(&adj);
        let mut assignment = 0u64;
        for v in 0..self.n as usize {
            let pos = comp[2 * v];
            let neg = comp[2 * v + 1];
            if pos == neg {
                return None;
            }
            // Components are numbered in reverse topological order, so the
            // literal whose component is closer to a sink wins.
            if pos < neg {
                assignment |= 1u64 << v;
            }
        }
        debug_assert!(self.satisfied_by(assignment));
        Some(assignment)
    }

    /// Parse DIMACS CNF restricted to width-2 clauses.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(u32, usize)> = None;
        let mut clauses = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                if header.is_some() {
                    return Err(Error::Parse("duplicate DIMACS header".into()));
                }
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() != 3 || fields[0] != "cnf" {
                    return Err(Error::Parse(format!("bad DIMACS header: {line:?}")));
                }
                let n: u32 = fields[1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad event count: {:?}", fields[1])))?;
                let k: usize = fields[2]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad clause count: {:?}", fields[2])))?;
                header = Some((n, k));
                continue;
            }
            let (n, _) =
                header.ok_or_else(|| Error::Parse("clause before DIMACS header".into()))?;
            let mut lits = Vec::new();
            let mut terminated = false;
            for tok in line.split_whitespace() {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad literal token: {tok:?}")))?;
                if v == 0 {
                    terminated = true;
                    break;
                }
                if v.unsigned_abs() > n as u64 {
                    return Err(Error::Parse(format!("literal {v} outside 1..={n}")));
                }
                lits.push(Literal::new(v.unsigned_abs() as u32, v > 0));
            }
            if !terminated {
                return Err(Error::Parse(format!("clause not 0-terminated: {line:?}")));
            }
            if lits.len() != 2 {
                return Err(Error::Parse(format!(
                    "expected exactly 2 literals per clause, got {}: {line:?}",
                    lits.len()
                )));
            }
            clauses.push((lits[0], lits[1]));
        }
        let (n, k) = header.ok_or_else(|| Error::Parse("missing DIMACS header".into()))?;
        if clauses.len() != k {
            return Err(Error::Parse(format!(
                "header declares {k} clauses, found {}",
                clauses.len()
            )));
        }
        Self::new(n, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(out, "p cnf {} {}", self.n, self.clauses.len()).unwrap();
        for &(a, b) in &self.clauses {
            let enc = |l: Literal| if l.positive { l.event as i64 } else { -(l.event as i64) };
            writeln!(out, "{} {} 0", enc(a), enc(b)).unwrap();
        }
        out
    }
}

/// Iterative Tarjan; returns component ids in reverse topological order
/// (sinks numbered first).
fn tarjan_scc(adj: &[Vec<u32>]) -> Vec<u32> {
    const UNSET: u32 = u32::MAX;
    let n = adj.len();
    let mut index = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut n_comps = 0u32;
    let mut frames: Vec<(u32, usize)> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNSET {
            continue;
        }
        frames.push((root, 0));
        while let Some(&mut (v, ref mut edge)) = frames.last_mut() {
            let vi = v as usize;
            if *edge == 0 {
                index[vi] = next_index;
                low[vi] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[vi] = true;
            }
            if let Some(&w) = adj[vi].get(*edge) {
                *edge += 1;
                let wi = w as usize;
                if index[wi] == UNSET {
                    frames.push((w, 0));
                } else if on_stack[wi] {
                    low[vi] = low[vi].min(index[wi]);
                }
            } else {
                if low[vi] == index[vi] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w as usize] = false;
                        comp[w as usize] = n_comps;
                        if w == v {
                            break;
                        }
                    }
                    n_comps += 1;
                }
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    let pi = parent as usize;
                    low[pi] = low[pi].min(low[vi]);
                }
            }
        }
    }
    comp
}
