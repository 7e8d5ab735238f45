//! Arithmetic circuits over small prime fields, their exact expansion,
//! homogeneous degree filtering, and the monomial-testing circuits built from
//! list multicoloring and Carry-Less Subset Sum.

mod filter;
mod graph_poly;
mod poly;
mod subset_sum;

pub use filter::degree_filter;
pub use graph_poly::{build_p_g, build_q_g, GraphPolyVars};
pub use poly::{expand_circuit, has_r_monomial, Monomial, SparsePolynomial, DEFAULT_TERM_CAP};
pub use subset_sum::{
    block_ratio, build_p_s, build_q_s, choose_block_t, sat_to_carryless, solve_carryless, CarryLessInstance,
    SubsetSumCircuit, DEFAULT_SUBSET_CAP,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    Input(usize),
    Const(u64),
    Add(usize, usize),
    Mul(usize, usize),
}

/// Circuit with gates in topological order; every gate refers only to
/// earlier gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    modulus: u64,
    gates: Vec<Gate>,
    output: usize,
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Incremental construction of a [`Circuit`].
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    modulus: u64,
    gates: Vec<Gate>,
    inputs: BTreeMap<usize, usize>,
    consts: BTreeMap<u64, usize>,
}

impl CircuitBuilder {
    pub fn new(modulus: u64) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::params(format!("field modulus {modulus} is not prime")));
        }
        Ok(CircuitBuilder {
            modulus,
            gates: Vec::new(),
            inputs: BTreeMap::new(),
            consts: BTreeMap::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Input gate for `var`; repeated requests share one gate.
    pub fn input(&mut self, var: usize) -> usize {
        if let Some(&g) = self.inputs.get(&var) {
            return g;
        }
        let g = self.push(Gate::Input(var));
        self.inputs.insert(var, g);
        g
    }

    /// Constant gate, reduced modulo the field size; shared per value.
    pub fn constant(&mut self, c: u64) -> usize {
        let c = c % self.modulus;
        if let Some(&g) = self.consts.get(&c) {
            return g;
        }
        let g = self.push(Gate::Const(c));
        self.consts.insert(c, g);
        g
    }

    pub fn add(&mut self, x: usize, y: usize) -> usize {
        self.check(x);
        self.check(y);
        self.push(Gate::Add(x, y))
    }

    pub fn mul(&mut self, x: usize, y: usize) -> usize {
        self.check(x);
        self.check(y);
        self.push(Gate::Mul(x, y))
    }

    /// Sum of all `terms` as a chain of additions; the constant 0 when empty.
    pub fn sum(&mut self, terms: &[usize]) -> usize {
        match terms.split_first() {
            None => self.constant(0),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &t| self.add(acc, t)),
        }
    }

    /// Product of all `factors`; the constant 1 when empty.
    pub fn product(&mut self, factors: &[usize]) -> usize {
        match factors.split_first() {
            None => self.constant(1),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &t| self.mul(acc, t)),
        }
    }

    /// `x^e` by repeated squaring.
    pub fn pow(&mut self, x: usize, mut e: u64) -> usize {
        let mut result = None;
        let mut base = x;
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base,
                    Some(r) => self.mul(r, base),
                });
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        result.unwrap_or_else(|| self.constant(1))
    }

    fn check(&self, g: usize) {
        assert!(g < self.gates.len(), "gate reference g{g} points forward");
    }

    fn push(&mut self, gate: Gate) -> usize {
        self.gates.push(gate);
        self.gates.len() - 1
    }

    pub fn finish(self, output: usize) -> Result<Circuit> {
        Circuit::new(self.modulus, self.gates, output)
    }
}

impl Circuit {
    pub fn new(modulus: u64, gates: Vec<Gate>, output: usize) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::params(format!("field modulus {modulus} is not prime")));
        }
        for (i, g) in gates.iter().enumerate() {
            let ok = match *g {
                Gate::Input(_) | Gate::Const(_) => true,
                Gate::Add(x, y) | Gate::Mul(x, y) => x < i && y < i,
            };
            if !ok {
                return Err(Error::params(format!("gate g{i} refers to a later gate")));
            }
        }
        if output >= gates.len() {
            return Err(Error::params(format!(
                "output g{output} out of range for {} gates",
                gates.len()
            )));
        }
        let gates = gates
            .into_iter()
            .map(|g| match g {
                Gate::Const(c) => Gate::Const(c % modulus),
                other => other,
            })
            .collect();
        Ok(Circuit { modulus, gates, output })
    }

    /// Single-gate circuit for a constant.
    pub fn constant(modulus: u64, c: u64) -> Result<Self> {
        Self::new(modulus, vec![Gate::Const(c)], 0)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn output(&self) -> usize {
        self.output
    }

    /// Input variables, sorted.
    pub fn variables(&self) -> Vec<usize> {
        let mut vs: Vec<usize> = self
            .gates
            .iter()
            .filter_map(|g| match g {
                Gate::Input(v) => Some(*v),
                _ => None,
            })
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Copy keeping only gates the output depends on.
    pub fn pruned(&self) -> Circuit {
        let mut live = vec![false; self.gates.len()];
        live[self.output] = true;
        for i in (0..self.gates.len()).rev() {
            if live[i] {
                if let Gate::Add(x, y) | Gate::Mul(x, y) = self.gates[i] {
                    live[x] = true;
                    live[y] = true;
                }
            }
        }
        let mut new_id = vec![usize::MAX; self.gates.len()];
        let mut gates = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            if !live[i] {
                continue;
            }
            new_id[i] = gates.len();
            gates.push(match *g {
                Gate::Add(x, y) => Gate::Add(new_id[x], new_id[y]),
                Gate::Mul(x, y) => Gate::Mul(new_id[x], new_id[y]),
                other => other,
            });
        }
        Circuit {
            modulus: self.modulus,
            gates,
            output: new_id[self.output],
        }
    }

    /// One gate per line (`in v3`, `const 1`, `add g4 g7`, `mul g2 g2`),
    /// then `out gN`. A leading `mod p` line is written when `p ≠ 2`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.modulus != 2 {
            out.push_str(&format!("mod {}\n", self.modulus));
        }
        for g in &self.gates {
            let line = match g {
                Gate::Input(v) => format!("in v{v}"),
                Gate::Const(c) => format!("const {c}"),
                Gate::Add(x, y) => format!("add g{x} g{y}"),
                Gate::Mul(x, y) => format!("mul g{x} g{y}"),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(&format!("out g{}\n", self.output));
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut modulus = 2;
        let mut gates = Vec::new();
        let mut output = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| Error::Parse { line: line_no, message };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if output.is_some() {
                return Err(err("content after the output line".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |tok: &str, prefix: &str| -> Result<usize> {
                tok.strip_prefix(prefix)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(format!("expected {prefix}<number>, found '{tok}'")))
            };
            match parts.as_slice() {
                ["mod", p] if gates.is_empty() => {
                    modulus = p.parse().map_err(|_| err(format!("bad modulus '{p}'")))?;
                }
                ["in", v] => gates.push(Gate::Input(num(v, "v")?)),
                ["const", c] => gates.push(Gate::Const(c.parse().map_err(|_| err(format!("bad constant '{c}'")))?)),
                ["add", x, y] => gates.push(Gate::Add(num(x, "g")?, num(y, "g")?)),
                ["mul", x, y] => gates.push(Gate::Mul(num(x, "g")?, num(y, "g")?)),
                ["out", g] => output = Some(num(g, "g")?),
                _ => return Err(err(format!("unrecognized line '{line}'"))),
            }
        }
        let output = output.ok_or(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing output line".into(),
        })?;
        Circuit::new(modulus, gates, output)
    }
}

/// Value of the circuit at `point` (variable → field element).
pub fn eval_circuit(c: &Circuit, point: &BTreeMap<usize, u64>) -> Result<u64> {
    let p = c.modulus;
    let mut vals = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        let v = match *g {
            Gate::Input(var) => {
                *point
                    .get(&var)
                    .ok_or_else(|| Error::Evaluation(format!("variable {var} has no value")))?
                    % p
            }
            Gate::Const(k) => k,
            Gate::Add(x, y) => (vals[x] + vals[y]) % p,
            Gate::Mul(x, y) => ((vals[x] as u128 * vals[y] as u128) % p as u128) as u64,
        };
        vals.push(v);
    }
    Ok(vals[c.output])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(pairs: &[(usize, u64)]) -> BTreeMap<usize, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn eval_examples() {
        let mut b = CircuitBuilder::new(2).unwrap();
        let x = b.input(0);
        let y = b.input(1);
        let m = b.mul(x, y);
        let c = b.finish(m).unwrap();
        assert_eq!(eval_circuit(&c, &point(&[(0, 1), (1, 1)])).unwrap(), 1);
        assert!(matches!(eval_circuit(&c, &point(&[(0, 1)])), Err(Error::Evaluation(_))));

        let mut b = CircuitBuilder::new(2).unwrap();
        let x = b.input(0);
        let s = b.add(x, x);
        let c = b.finish(s).unwrap();
        for v in 0..4 {
            assert_eq!(eval_circuit(&c, &point(&[(0, v)])).unwrap(), 0);
        }
    }

    #[test]
    fn pow_by_squaring() {
        let mut b = CircuitBuilder::new(7).unwrap();
        let x = b.input(0);
        let p = b.pow(x, 13);
        let c = b.finish(p).unwrap();
        assert!(c.gate_count() <= 1 + 2 * 4);
        for v in 0..7u64 {
            assert_eq!(eval_circuit(&c, &point(&[(0, v)])).unwrap(), v.pow(13) % 7);
        }
    }

    #[test]
    fn validation() {
        assert!(CircuitBuilder::new(4).is_err());
        assert!(Circuit::new(2, vec![Gate::Add(0, 1)], 0).is_err());
        assert!(Circuit::new(2, vec![Gate::Input(0)], 1).is_err());
        assert_eq!(
            Circuit::new(3, vec![Gate::Const(7)], 0).unwrap().gates()[0],
            Gate::Const(1)
        );
    }

    #[test]
    fn text_round_trip() {
        let text = "in v0\nin v3\nadd g0 g1\nmul g2 g2\nout g3\n";
        let c = Circuit::from_text(text).unwrap();
        assert_eq!(c.to_text(), text);
        let c5 = Circuit::from_text("mod 5\nconst 7\nout g0\n").unwrap();
        assert_eq!(c5.modulus(), 5);
        assert_eq!(c5.to_text(), "mod 5\nconst 2\nout g0\n");
        assert!(matches!(
            Circuit::from_text("in v0\nfoo\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(Circuit::from_text("in v0\n").is_err());
    }

    #[test]
    fn pruning_drops_dead_gates() {
        let c = Circuit::new(2, vec![Gate::Input(0), Gate::Input(1), Gate::Mul(0, 0)], 2).unwrap();
        let p = c.pruned();
        assert_eq!(p.gates(), &[Gate::Input(0), Gate::Mul(0, 0)]);
        assert_eq!(p.output(), 1);
    }
}
