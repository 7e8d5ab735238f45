use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{is_prime, Circuit, Gate};
use crate::error::{Error, Result};

/// Default bound on the number of terms of any intermediate polynomial.
pub const DEFAULT_TERM_CAP: usize = 1 << 20;

/// Exponent vector as `(variable, exponent)` pairs sorted by variable, with
/// every exponent positive. The empty vector is the constant monomial.
pub type Monomial = Vec<(usize, u32)>;

pub fn monomial_degree(m: &Monomial) -> u64 {
    m.iter().map(|&(_, e)| u64::from(e)).sum()
}

fn monomial_mul(x: &Monomial, y: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].0.cmp(&y[j].0) {
            std::cmp::Ordering::Less => {
                out.push(x[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(y[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((x[i].0, x[i].1 + y[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    out
}

/// Polynomial over `F_p` with only nonzero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct SparsePolynomial {
    modulus: u64,
    terms: BTreeMap<Monomial, u64>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    modulus: u64,
    terms: Vec<(Monomial, u64)>,
}

impl From<SparsePolynomial> for PolyRepr {
    fn from(p: SparsePolynomial) -> Self {
        PolyRepr {
            modulus: p.modulus,
            terms: p.terms.into_iter().collect(),
        }
    }
}

impl TryFrom<PolyRepr> for SparsePolynomial {
    type Error = Error;

    fn try_from(r: PolyRepr) -> Result<Self> {
        SparsePolynomial::from_terms(r.modulus, r.terms)
    }
}

impl SparsePolynomial {
    pub fn zero(modulus: u64) -> Self {
        SparsePolynomial {
            modulus,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(modulus: u64, c: u64) -> Self {
        let mut p = Self::zero(modulus);
        p.accumulate(Vec::new(), c);
        p
    }

    pub fn variable(modulus: u64, var: usize) -> Self {
        let mut p = Self::zero(modulus);
        p.accumulate(vec![(var, 1)], 1);
        p
    }

    /// Sums the given terms; exponent vectors may be unsorted and contain
    /// repeated variables or zero exponents.
    pub fn from_terms(modulus: u64, terms: impl IntoIterator<Item = (Monomial, u64)>) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::params(format!("field modulus {modulus} is not prime")));
        }
        let mut p = Self::zero(modulus);
        for (m, c) in terms {
            let mut canon: BTreeMap<usize, u32> = BTreeMap::new();
            for (v, e) in m {
                *canon.entry(v).or_default() += e;
            }
            p.accumulate(canon.into_iter().filter(|&(_, e)| e > 0).collect(), c);
        }
        Ok(p)
    }

    fn accumulate(&mut self, m: Monomial, c: u64) {
        let c = c % self.modulus;
        if c == 0 {
            return;
        }
        let p = self.modulus;
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = (*o.get() + c) % p;
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, u64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.accumulate(m.clone(), c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.mul_capped(other, usize::MAX).expect("uncapped product")
    }

    fn mul_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        let mut out = Self::zero(self.modulus);
        let p = self.modulus as u128;
        for (mx, &cx) in &self.terms {
            for (my, &cy) in &other.terms {
                let c = ((cx as u128 * cy as u128) % p) as u64;
                out.accumulate(monomial_mul(mx, my), c);
            }
            if out.terms.len() > cap {
                return Err(Error::capacity(format!("expansion exceeds {cap} terms")));
            }
        }
        Ok(out)
    }

    /// Largest total degree of a stored term.
    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().map(monomial_degree).max()
    }

    /// Terms of total degree exactly `k`.
    pub fn homogeneous_part(&self, k: u64) -> Self {
        SparsePolynomial {
            modulus: self.modulus,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| monomial_degree(m) == k)
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
        }
    }

    pub fn eval(&self, point: &BTreeMap<usize, u64>) -> Result<u64> {
        let p = self.modulus as u128;
        let mut total: u128 = 0;
        for (m, &c) in &self.terms {
            let mut acc = c as u128;
            for &(v, e) in m {
                let x = *point
                    .get(&v)
                    .ok_or_else(|| Error::Evaluation(format!("variable {v} has no value")))?
                    as u128
                    % p;
                let mut pw: u128 = 1;
                let (mut base, mut e) = (x, e);
                while e > 0 {
                    if e & 1 == 1 {
                        pw = pw * base % p;
                    }
                    base = base * base % p;
                    e >>= 1;
                }
                acc = acc * pw % p;
            }
            total = (total + acc) % p;
        }
        Ok(total as u64)
    }
}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let vars: Vec<String> = m
                .iter()
                .map(|&(v, e)| if e == 1 { format!("x{v}") } else { format!("x{v}^{e}") })
                .collect();
            match (vars.is_empty(), *c) {
                (true, c) => write!(f, "{c}")?,
                (false, 1) => write!(f, "{}", vars.join("*"))?,
                (false, c) => write!(f, "{c}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Exact expansion modulo the field size. Intermediate results are dropped
/// after their last use.
pub fn expand_circuit(c: &Circuit, term_cap: usize) -> Result<SparsePolynomial> {
    let gates = c.gates();
    let p = c.modulus();
    let mut last_use = vec![0usize; gates.len()];
    for (i, g) in gates.iter().enumerate() {
        if let Gate::Add(x, y) | Gate::Mul(x, y) = *g {
            last_use[x] = i;
            last_use[y] = i;
        }
    }
    last_use[c.output()] = usize::MAX;
    let mut vals: Vec<Option<SparsePolynomial>> = vec![None; gates.len()];
    for (i, g) in gates.iter().enumerate() {
        let poly = match *g {
            Gate::Input(v) => SparsePolynomial::variable(p, v),
            Gate::Const(k) => SparsePolynomial::constant(p, k),
            Gate::Add(x, y) => {
                let (px, py) = (vals[x].as_ref().expect("live"), vals[y].as_ref().expect("live"));
                px.add(py)
            }
            Gate::Mul(x, y) => {
                let (px, py) = (vals[x].as_ref().expect("live"), vals[y].as_ref().expect("live"));
                px.mul_capped(py, term_cap)?
            }
        };
        if poly.len() > term_cap {
            return Err(Error::capacity(format!("expansion exceeds {term_cap} terms")));
        }
        vals[i] = Some(poly);
        if let Gate::Add(x, y) | Gate::Mul(x, y) = *g {
            for z in [x, y] {
                if last_use[z] == i {
                    vals[z] = None;
                }
            }
        }
    }
    Ok(vals[c.output()].take().expect("output computed"))
}

/// Whether some term has every individual exponent at most `r`.
pub fn has_r_monomial(poly: &SparsePolynomial, r: u32) -> bool {
    poly.terms.keys().any(|m| m.iter().all(|&(_, e)| e <= r))
}
