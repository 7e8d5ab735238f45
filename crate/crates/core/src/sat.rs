//! CNF formulas, DIMACS I/O, an exhaustive satisfiability oracle and
//! regularization to (3,4)-form.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default variable cap for [`brute_force_sat`].
pub const DEFAULT_SAT_VAR_CAP: usize = 24;

/// A literal over a 0-based variable index. DIMACS form is `±(var + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit { var, positive: true }
    }

    pub fn neg(var: usize) -> Self {
        Lit { var, positive: false }
    }

    pub fn from_dimacs(x: i64) -> Self {
        assert!(x != 0, "0 is not a literal");
        Lit {
            var: x.unsigned_abs() as usize - 1,
            positive: x > 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn negated(self) -> Self {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }

    pub fn is_true_under(self, values: &[bool]) -> bool {
        values[self.var] == self.positive
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Truth values, one per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    /// Assignment whose bit `i` (least significant first) is variable `i`.
    pub fn from_bits(bits: u64, n: usize) -> Self {
        Assignment {
            values: (0..n).map(|i| bits >> i & 1 == 1).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    variable_count: usize,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new(variable_count: usize, clauses: Vec<Vec<Lit>>) -> Result<Self> {
        if let Some(l) = clauses.iter().flatten().find(|l| l.var >= variable_count) {
            return Err(Error::params(format!(
                "literal {l} out of range for {variable_count} variables"
            )));
        }
        Ok(CnfFormula {
            variable_count,
            clauses,
        })
    }

    /// Builds a formula from DIMACS-style integer clauses, sizing the variable
    /// count to the largest variable mentioned (at least `min_vars`).
    pub fn from_dimacs_clauses(min_vars: usize, clauses: &[&[i64]]) -> Self {
        let clauses: Vec<Vec<Lit>> = clauses
            .iter()
            .map(|c| c.iter().map(|&x| Lit::from_dimacs(x)).collect())
            .collect();
        let n = clauses
            .iter()
            .flatten()
            .map(|l| l.var + 1)
            .max()
            .unwrap_or(0)
            .max(min_vars);
        CnfFormula {
            variable_count: n,
            clauses,
        }
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        a.values.len() == self.variable_count
            && self
                .clauses
                .iter()
                .all(|c| c.iter().any(|l| l.is_true_under(&a.values)))
    }

    /// Number of clauses each variable occurs in.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut occ = vec![0; self.variable_count];
        for c in &self.clauses {
            let mut vars: Vec<usize> = c.iter().map(|l| l.var).collect();
            vars.sort_unstable();
            vars.dedup();
            for v in vars {
                occ[v] += 1;
            }
        }
        occ
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.variable_count, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&l.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }
}

/// Parses DIMACS CNF. Comment lines (`c ...`) are skipped; clauses may span
/// lines and each must end with `0`.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut last_line = 0;
    let err = |line: usize, message: String| Error::Parse { line, message };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        last_line = line_no;
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "duplicate header".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(err(line_no, format!("malformed header '{line}'")));
            }
            let vars = parts[2]
                .parse()
                .map_err(|_| err(line_no, format!("bad variable count '{}'", parts[2])))?;
            let count = parts[3]
                .parse()
                .map_err(|_| err(line_no, format!("bad clause count '{}'", parts[3])))?;
            header = Some((vars, count));
            continue;
        }
        let (vars, _) = header.ok_or_else(|| err(line_no, "clause before header".into()))?;
        for tok in line.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| err(line_no, format!("bad literal '{tok}'")))?;
            if x == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if x.unsigned_abs() as usize > vars {
                return Err(err(line_no, format!("literal {x} out of range 1..={vars}")));
            } else {
                current.push(Lit::from_dimacs(x));
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| err(last_line.max(1), "missing header".into()))?;
    if !current.is_empty() {
        return Err(err(last_line, "clause missing terminating 0".into()));
    }
    if clauses.len() != count {
        return Err(err(
            last_line.max(1),
            format!("header declares {count} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(vars, clauses)
}

/// Least satisfying assignment, ordering assignments as binary numbers with
/// variable 0 as the least significant bit.
///
/// Variables are fixed from the most significant one down. Each is set to
/// `false` whenever some model extends the current prefix, which is decided
/// by an exhaustive search with unit propagation that branches inside the
/// shortest open clause. Propagated values are forced in every extension of
/// the prefix, so the result is the numerically least model.
pub fn brute_force_sat(f: &CnfFormula, var_cap: usize) -> Result<Option<Assignment>> {
    if f.variable_count > var_cap {
        return Err(Error::capacity(format!(
            "{} variables exceed the oracle cap of {var_cap}",
            f.variable_count
        )));
    }
    let mut search = Search::new(f);
    Ok(search.run().map(Assignment::new))
}

struct Search<'a> {
    clauses: &'a [Vec<Lit>],
    // clause indices containing the literal that becomes false when `var` takes the keyed value
    watch_false: Vec<[Vec<usize>; 2]>,
    value: Vec<Option<bool>>,
    trail: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(f: &'a CnfFormula) -> Self {
        let mut watch_false = vec![[Vec::new(), Vec::new()]; f.variable_count];
        for (ci, c) in f.clauses.iter().enumerate() {
            for l in c {
                // literal l is false when var = !positive
                watch_false[l.var][usize::from(!l.positive)].push(ci);
            }
        }
        Search {
            clauses: &f.clauses,
            watch_false,
            value: vec![None; f.variable_count],
            trail: Vec::new(),
        }
    }

    fn run(&mut self) -> Option<Vec<bool>> {
        if self.clauses.iter().any(Vec::is_empty) {
            return None;
        }
        // unit clauses up front
        for ci in 0..self.clauses.len() {
            if !self.settle(ci) {
                return None;
            }
        }
        if !self.propagate(0) {
            return None;
        }
        if !self.extendable() {
            return None;
        }
        for var in (0..self.value.len()).rev() {
            if self.value[var].is_some() {
                continue;
            }
            let mark = self.trail.len();
            self.assign(var, false);
            if self.propagate(mark) && self.extendable() {
                continue;
            }
            self.undo(mark);
            self.assign(var, true);
            let ok = self.propagate(mark);
            debug_assert!(ok, "prefix was extendable");
        }
        Some(self.value.iter().map(|v| v.unwrap_or(false)).collect())
    }

    /// Whether some model extends the current partial assignment. Leaves the
    /// assignment unchanged.
    fn extendable(&mut self) -> bool {
        let all: Vec<usize> = (0..self.clauses.len()).collect();
        self.extendable_in(&all)
    }

    /// Same as [`Self::extendable`] for the clauses `ids`. Open clauses are
    /// split into groups that share no unassigned variable, and each group
    /// is decided on its own.
    fn extendable_in(&mut self, ids: &[usize]) -> bool {
        let open: Vec<usize> = ids
            .iter()
            .copied()
            .filter(|&ci| !self.clauses[ci].iter().any(|l| self.value[l.var] == Some(l.positive)))
            .collect();
        if open.is_empty() {
            return true;
        }
        for group in self.split(&open) {
            if !self.branch(&group) {
                return false;
            }
        }
        true
    }

    fn split(&self, open: &[usize]) -> Vec<Vec<usize>> {
        let n = self.value.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut anchor = Vec::with_capacity(open.len());
        for &ci in open {
            let mut first = None;
            for l in &self.clauses[ci] {
                if self.value[l.var].is_some() {
                    continue;
                }
                match first {
                    None => first = Some(l.var),
                    Some(f) => {
                        let (x, y) = (find(&mut parent, f), find(&mut parent, l.var));
                        parent[x] = y;
                    }
                }
            }
            anchor.push(first);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for (&ci, a) in open.iter().zip(anchor) {
            // an open clause without unassigned variables is a conflict
            let Some(a) = a else {
                return vec![vec![ci]];
            };
            let root = find(&mut parent, a);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(ci);
        }
        groups
    }

    /// Branches on the first open literal of the shortest clause in `group`.
    fn branch(&mut self, group: &[usize]) -> bool {
        let Some(l) = self.shortest_open_literal(group) else {
            return false;
        };
        let mark = self.trail.len();
        self.assign(l.var, l.positive);
        let found = self.propagate(mark) && self.extendable_in(group);
        self.undo(mark);
        if found {
            return true;
        }
        // otherwise the literal is false in every model
        self.assign(l.var, !l.positive);
        let found = self.propagate(mark) && self.extendable_in(group);
        self.undo(mark);
        found
    }

    fn shortest_open_literal(&self, group: &[usize]) -> Option<Lit> {
        let mut best: Option<(usize, Lit)> = None;
        for &ci in group {
            let c = &self.clauses[ci];
            let mut open = c.iter().filter(|l| self.value[l.var].is_none());
            let &first = open.clone().next()?;
            let len = open.by_ref().count();
            if best.is_none_or(|(b, _)| len < b) {
                best = Some((len, first));
            }
        }
        best.map(|(_, l)| l)
    }

    fn assign(&mut self, var: usize, val: bool) {
        self.value[var] = Some(val);
        self.trail.push(var);
    }

    fn undo(&mut self, mark: usize) {
        for v in self.trail.drain(mark..) {
            self.value[v] = None;
        }
    }

    /// Checks clause `ci`; assigns its last literal if it became unit.
    /// Returns false on conflict.
    fn settle(&mut self, ci: usize) -> bool {
        let mut open = None;
        let mut open_count = 0;
        for &l in &self.clauses[ci] {
            match self.value[l.var] {
                Some(v) if v == l.positive => return true,
                Some(_) => {}
                None => {
                    open_count += 1;
                    open = Some(l);
                }
            }
        }
        match open_count {
            0 => false,
            1 => {
                let l = open.expect("one open literal");
                self.assign(l.var, l.positive);
                true
            }
            _ => true,
        }
    }

    fn propagate(&mut self, from: usize) -> bool {
        let mut head = from;
        while head < self.trail.len() {
            let var = self.trail[head];
            head += 1;
            let val = self.value[var].expect("trail holds assigned vars");
            let idx = usize::from(val);
            for k in 0..self.watch_false[var][idx].len() {
                let ci = self.watch_false[var][idx][k];
                if !self.settle(ci) {
                    return false;
                }
            }
        }
        true
    }
}

/// Every clause has exactly three distinct variables and every variable
/// occurs in at most four clauses.
pub fn is_34_form(f: &CnfFormula) -> bool {
    let three_distinct = f
        .clauses
        .iter()
        .all(|c| c.len() == 3 && c[0].var != c[1].var && c[0].var != c[2].var && c[1].var != c[2].var);
    three_distinct && f.occurrences().iter().all(|&k| k <= 4)
}

/// Clauses of a satisfiable (3,4) formula on eight local variables whose
/// every model sets local variable 7 to false; that variable occurs twice,
/// leaving two free occurrences.
const FORCING_GADGET: [[(usize, bool); 3]; 8] = [
    [(0, true), (1, true), (7, false)],
    [(0, true), (1, false), (2, true)],
    [(1, false), (2, false), (3, true)],
    [(1, false), (2, false), (3, false)],
    [(0, false), (4, true), (7, false)],
    [(0, false), (4, false), (5, true)],
    [(4, false), (5, false), (6, true)],
    [(4, false), (5, false), (6, false)],
];
const GADGET_VARS: usize = 8;
const GADGET_FORCED: usize = 7;

/// Supply of variables forced false, each with a number of unused occurrences.
struct FalseSupply {
    entries: VecDeque<(usize, usize)>,
    clauses: Vec<Vec<Lit>>,
}

impl FalseSupply {
    fn new() -> Self {
        FalseSupply {
            entries: VecDeque::new(),
            clauses: Vec::new(),
        }
    }

    fn add_gadget(&mut self, next_var: &mut usize) {
        let base = *next_var;
        *next_var += GADGET_VARS;
        for clause in FORCING_GADGET {
            self.clauses.push(
                clause
                    .iter()
                    .map(|&(v, positive)| Lit {
                        var: base + v,
                        positive,
                    })
                    .collect(),
            );
        }
        self.entries.push_back((base + GADGET_FORCED, 2));
    }

    /// New forced-false `g` via `(¬g ∨ a ∨ b)` with `a`, `b` already forced false.
    fn grow(&mut self, next_var: &mut usize) {
        let mut picks: Vec<usize> = (0..self.entries.len()).collect();
        picks.sort_by_key(|&i| std::cmp::Reverse(self.entries[i].1));
        let (i, j) = (picks[0].min(picks[1]), picks[0].max(picks[1]));
        let g = *next_var;
        *next_var += 1;
        let (a, b) = (self.entries[i].0, self.entries[j].0);
        self.clauses.push(vec![Lit::neg(g), Lit::pos(a), Lit::pos(b)]);
        self.entries[i].1 -= 1;
        self.entries[j].1 -= 1;
        self.entries.retain(|&(_, spare)| spare > 0);
        self.entries.push_back((g, 3));
    }

    /// `k` distinct forced-false variables, one occurrence of each consumed.
    fn take(&mut self, k: usize, next_var: &mut usize) -> Vec<usize> {
        while self.entries.len() < k {
            if self.entries.len() < 2 {
                self.add_gadget(next_var);
            } else {
                self.grow(next_var);
            }
        }
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let (v, spare) = self.entries.pop_front().expect("ensured above");
            out.push(v);
            if spare > 1 {
                self.entries.push_back((v, spare - 1));
            }
        }
        out
    }
}

/// Equisatisfiable (3,4)-form of an arbitrary CNF formula.
///
/// Original variables keep their indices, and the restriction of any model of
/// the output to those variables satisfies the input. Steps: duplicate
/// literals are merged and tautologies dropped; an empty clause becomes the
/// pair `(p), (¬p)`; clauses longer than three are chained with auxiliary
/// variables; a variable occurring in more than four clauses is replaced by
/// one copy per occurrence, tied together by the implication cycle
/// `(¬x_i ∨ x_{i+1})`; clauses still shorter than three are padded with
/// variables forced false by auxiliary (3,4) clauses.
pub fn tovey_regularize(f: &CnfFormula) -> CnfFormula {
    let mut next_var = f.variable_count;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();

    for c in &f.clauses {
        let mut lits: Vec<Lit> = Vec::with_capacity(c.len());
        for &l in c {
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        if lits.iter().any(|l| lits.contains(&l.negated())) {
            continue;
        }
        match lits.len() {
            0 => {
                let p = next_var;
                next_var += 1;
                clauses.push(vec![Lit::pos(p)]);
                clauses.push(vec![Lit::neg(p)]);
            }
            1..=3 => clauses.push(lits),
            len => {
                // (l0 ∨ l1 ∨ y0), (¬y0 ∨ l2 ∨ y1), ..., (¬y_{k} ∨ l_{len-2} ∨ l_{len-1})
                let mut prev = next_var;
                next_var += 1;
                clauses.push(vec![lits[0], lits[1], Lit::pos(prev)]);
                for &l in &lits[2..len - 2] {
                    let y = next_var;
                    next_var += 1;
                    clauses.push(vec![Lit::neg(prev), l, Lit::pos(y)]);
                    prev = y;
                }
                clauses.push(vec![Lit::neg(prev), lits[len - 2], lits[len - 1]]);
            }
        }
    }

    let mut occ = vec![0usize; next_var];
    for c in &clauses {
        for l in c {
            occ[l.var] += 1;
        }
    }
    let mut cycles = Vec::new();
    let mut seen = vec![0usize; next_var];
    let mut copies: Vec<Vec<usize>> = vec![Vec::new(); next_var];
    for (v, &k) in occ.iter().enumerate() {
        if k > 4 {
            let mut cs = vec![v];
            for _ in 1..k {
                cs.push(next_var);
                next_var += 1;
            }
            for i in 0..k {
                cycles.push(vec![Lit::neg(cs[i]), Lit::pos(cs[(i + 1) % k])]);
            }
            copies[v] = cs;
        }
    }
    for c in &mut clauses {
        for l in c.iter_mut() {
            if !copies[l.var].is_empty() {
                let i = seen[l.var];
                seen[l.var] += 1;
                l.var = copies[l.var][i];
            }
        }
    }
    clauses.extend(cycles);

    let mut supply = FalseSupply::new();
    for c in &mut clauses {
        if c.len() < 3 {
            let pads = supply.take(3 - c.len(), &mut next_var);
            c.extend(pads.into_iter().map(Lit::pos));
        }
    }
    clauses.extend(supply.clauses);

    CnfFormula {
        variable_count: next_var.max(1),
        clauses,
    }
}
