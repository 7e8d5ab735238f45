use serde::{Deserialize, Serialize};

use super::{degree_filter, Circuit, CircuitBuilder};
use crate::error::{Error, Result};
use crate::sat::CnfFormula;

/// Default bound on `2^n` for [`solve_carryless`].
pub const DEFAULT_SUBSET_CAP: u64 = 1 << 26;

/// Subset sum over decimal digit vectors whose column sums stay below 10, so
/// adding any subset never carries. JSON form: `{"s": "...", "a": [...]}`
/// with digit strings written most significant digit first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CarryLessRepr", into = "CarryLessRepr")]
pub struct CarryLessInstance {
    // digits least significant first
    target: Vec<u8>,
    numbers: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
struct CarryLessRepr {
    s: String,
    a: Vec<String>,
}

impl TryFrom<CarryLessRepr> for CarryLessInstance {
    type Error = Error;

    fn try_from(r: CarryLessRepr) -> Result<Self> {
        let a: Vec<&str> = r.a.iter().map(String::as_str).collect();
        CarryLessInstance::from_strings(&r.s, &a)
    }
}

impl From<CarryLessInstance> for CarryLessRepr {
    fn from(inst: CarryLessInstance) -> Self {
        CarryLessRepr {
            s: inst.target_string(),
            a: (0..inst.numbers.len()).map(|i| inst.number_string(i)).collect(),
        }
    }
}

fn parse_digits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .rev()
        .map(|ch| {
            ch.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| Error::params(format!("'{s}' is not a digit string")))
        })
        .collect()
}

fn render_digits(d: &[u8]) -> String {
    d.iter().rev().map(|&x| char::from(b'0' + x)).collect()
}

impl CarryLessInstance {
    /// Digit strings, most significant first, all of the same length.
    pub fn from_strings(s: &str, a: &[&str]) -> Result<Self> {
        let target = parse_digits(s)?;
        let numbers = a.iter().map(|x| parse_digits(x)).collect::<Result<Vec<_>>>()?;
        Self::from_digits(target, numbers)
    }

    /// Digits least significant first.
    pub fn from_digits(target: Vec<u8>, numbers: Vec<Vec<u8>>) -> Result<Self> {
        let len = target.len();
        if target.iter().chain(numbers.iter().flatten()).any(|&d| d > 9) {
            return Err(Error::params("digits must lie in 0..=9"));
        }
        if let Some(x) = numbers.iter().find(|x| x.len() != len) {
            return Err(Error::params(format!(
                "number has {} digits, target has {len}",
                x.len()
            )));
        }
        for j in 0..len {
            let col: u32 = numbers.iter().map(|x| u32::from(x[j])).sum();
            if col >= 10 {
                return Err(Error::params(format!("digit column {j} sums to {col}, which carries")));
            }
        }
        Ok(CarryLessInstance { target, numbers })
    }

    pub fn count(&self) -> usize {
        self.numbers.len()
    }

    pub fn digit_len(&self) -> usize {
        self.target.len()
    }

    /// Digit `j` (least significant first) of number `i`.
    pub fn digit(&self, i: usize, j: usize) -> u8 {
        self.numbers[i][j]
    }

    pub fn target_digit(&self, j: usize) -> u8 {
        self.target[j]
    }

    pub fn target_string(&self) -> String {
        render_digits(&self.target)
    }

    pub fn number_string(&self, i: usize) -> String {
        render_digits(&self.numbers[i])
    }

    pub fn column_sums(&self) -> Vec<u32> {
        (0..self.digit_len())
            .map(|j| self.numbers.iter().map(|x| u32::from(x[j])).sum())
            .collect()
    }

    /// Whether the indices (0-based) sum to the target.
    pub fn is_solution(&self, subset: &[usize]) -> bool {
        (0..self.digit_len())
            .all(|j| subset.iter().map(|&i| u32::from(self.numbers[i][j])).sum::<u32>() == u32::from(self.target[j]))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instance serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Value of the `j`-th block of `q` digits (block 0 least significant).
    fn block(digits: &[u8], j: usize, q: usize) -> u64 {
        (0..q).rev().fold(0u64, |acc, t| {
            let d = digits.get(j * q + t).copied().unwrap_or(0);
            acc * 10 + u64::from(d)
        })
    }
}

/// Lexicographically least solution as sorted 0-based indices. Depth-first
/// search in lexicographic order; a branch stops as soon as some digit of
/// the partial sum exceeds the target, since digits never carry.
pub fn solve_carryless(inst: &CarryLessInstance, cap: u64) -> Result<Option<Vec<usize>>> {
    let m = inst.count();
    if m >= 64 || 1u64 << m > cap {
        return Err(Error::capacity(format!("2^{m} subsets exceed the cap of {cap}")));
    }
    let mut sum = vec![0u8; inst.digit_len()];
    let mut chosen = Vec::new();
    if dfs(inst, 0, &mut sum, &mut chosen) {
        Ok(Some(chosen))
    } else {
        Ok(None)
    }
}

fn dfs(inst: &CarryLessInstance, start: usize, sum: &mut [u8], chosen: &mut Vec<usize>) -> bool {
    if sum == inst.target.as_slice() {
        return true;
    }
    for i in start..inst.count() {
        let x = &inst.numbers[i];
        if (0..sum.len()).any(|j| sum[j] + x[j] > inst.target[j]) {
            continue;
        }
        for j in 0..sum.len() {
            sum[j] += x[j];
        }
        chosen.push(i);
        if dfs(inst, i + 1, sum, chosen) {
            return true;
        }
        chosen.pop();
        for j in 0..sum.len() {
            sum[j] -= x[j];
        }
    }
    false
}

/// Subset sum instance that is solvable exactly when `f` is satisfiable.
///
/// One digit per variable (target 1) and one per clause (target 4). Each
/// variable contributes a "true" and a "false" number carrying 1 in its own
/// digit and 1 in the digit of every clause the literal occurs in; each clause
/// gets slack numbers 1 and 2. Column sums are at most 6. The digit strings
/// are padded with leading zeros to the number count.
pub fn sat_to_carryless(f: &CnfFormula) -> Result<CarryLessInstance> {
    let n = f.variable_count();
    let clauses: Vec<Vec<crate::sat::Lit>> = f
        .clauses()
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort();
            c.dedup();
            c
        })
        .collect();
    if let Some(c) = clauses.iter().find(|c| c.len() > 3) {
        return Err(Error::params(format!(
            "clause with {} literals, expected at most 3",
            c.len()
        )));
    }
    let m = clauses.len();
    let count = 2 * n + 2 * m;
    let len = count.max(n + m);
    let mut numbers = Vec::with_capacity(count);
    for v in 0..n {
        for positive in [true, false] {
            let mut x = vec![0u8; len];
            x[v] = 1;
            for (j, c) in clauses.iter().enumerate() {
                if c.iter().any(|l| l.var == v && l.positive == positive) {
                    x[n + j] = 1;
                }
            }
            numbers.push(x);
        }
    }
    for j in 0..m {
        for slack in [1u8, 2] {
            let mut x = vec![0u8; len];
            x[n + j] = slack;
            numbers.push(x);
        }
    }
    let mut target = vec![0u8; len];
    target[..n].fill(1);
    target[n..n + m].fill(4);
    CarryLessInstance::from_digits(target, numbers)
}

/// Monomial circuit for a carry-less instance with the parameters used to
/// build it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumCircuit {
    pub circuit: Circuit,
    pub t: usize,
    pub q: usize,
    pub r: u64,
    pub k: u64,
}

impl SubsetSumCircuit {
    /// Variable of block `j` (0-based, least significant block first).
    pub fn x(&self, j: usize) -> usize {
        j
    }

    pub fn y(&self, i: usize) -> usize {
        self.t + i
    }

    pub fn z(&self, i: usize, count: usize) -> usize {
        self.t + count + i
    }
}

fn block_params(inst: &CarryLessInstance, t: usize) -> Result<(usize, u64)> {
    let n = inst.digit_len();
    if t == 0 || t > n.max(1) {
        return Err(Error::params(format!("block count {t} outside 1..={}", n.max(1))));
    }
    let q = n.div_ceil(t).max(1);
    if q > 18 {
        return Err(Error::capacity(format!(
            "blocks of {q} digits overflow 64-bit exponents"
        )));
    }
    Ok((q, 10u64.pow(q as u32) - 1))
}

/// `q_S = ∏_i (y_i + z_i ∏_j x_j^{a_i^{[j]}}) · ∏_j x_j^{r − s^{[j]}}` over
/// `F_2`, with digits split into `t` blocks of `q = ⌈n/t⌉` digits (zero padded)
/// and `r = 10^q − 1`. Variables: `x_j = j`, `y_i = t + i`, `z_i = t + m + i`
/// for `m` numbers.
pub fn build_q_s(inst: &CarryLessInstance, t: usize) -> Result<SubsetSumCircuit> {
    let (q, r) = block_params(inst, t)?;
    let m = inst.count();
    let mut b = CircuitBuilder::new(2)?;
    let x: Vec<usize> = (0..t).map(|j| b.input(j)).collect();
    let mut factors = Vec::with_capacity(m + t);
    for i in 0..m {
        let powers: Vec<usize> = (0..t)
            .map(|j| {
                let e = CarryLessInstance::block(&inst.numbers[i], j, q);
                b.pow(x[j], e)
            })
            .collect();
        let mono = b.product(&powers);
        let y = b.input(t + i);
        let z = b.input(t + m + i);
        let zm = b.mul(z, mono);
        factors.push(b.add(y, zm));
    }
    for (j, &xj) in x.iter().enumerate() {
        let s = CarryLessInstance::block(&inst.target, j, q);
        factors.push(b.pow(xj, r - s));
    }
    let out = b.product(&factors);
    Ok(SubsetSumCircuit {
        circuit: b.finish(out)?,
        t,
        q,
        r,
        k: t as u64 * r + m as u64,
    })
}

/// Degree-`k` part of [`build_q_s`] with `k = t·r + m`.
pub fn build_p_s(inst: &CarryLessInstance, t: usize) -> Result<SubsetSumCircuit> {
    let qs = build_q_s(inst, t)?;
    let k = usize::try_from(qs.k).map_err(|_| Error::capacity("degree does not fit in memory"))?;
    Ok(SubsetSumCircuit {
        circuit: degree_filter(&qs.circuit, k, k)?,
        ..qs
    })
}

/// `(10^q − 1) / (t·(10^q − 1) + n)^σ` with `q = ⌈n/t⌉`, computed in log
/// space.
pub fn block_ratio(n: usize, t: usize, sigma: f64) -> f64 {
    let q = n.div_ceil(t) as f64;
    let ln10 = std::f64::consts::LN_10;
    // ln(10^q − 1) = q·ln 10 + ln(1 − 10^{−q})
    let ln_r = q * ln10 + (-(-q * ln10).exp()).ln_1p();
    let ln_k = ln_r + (t as f64 + n as f64 * (-ln_r).exp()).ln();
    (ln_r - sigma * ln_k).exp()
}

/// Smallest `t ∈ 1..=n` with `1/2 ≤ block_ratio(n, t, σ) ≤ 2`.
pub fn choose_block_t(n: usize, sigma: f64) -> Option<usize> {
    (1..=n).find(|&t| {
        let ratio = block_ratio(n, t, sigma);
        (0.5..=2.0).contains(&ratio)
    })
}
