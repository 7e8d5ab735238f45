//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use multicolor::circuits::{CarryLessInstance, Circuit, CircuitBuilder};
use multicolor::detecting::DetectingFamily;
use multicolor::{CnfFormula, Graph, MulticolorInstance};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|_| rng.gen_bool(p))
        .collect();
    Graph::new(n, edges).unwrap()
}

/// Clauses of 1 to `max_len` literals over `n` variables; repeated and
/// complementary literals are allowed.
pub fn random_cnf(rng: &mut impl Rng, n: usize, m: usize, max_len: usize) -> CnfFormula {
    let clauses: Vec<Vec<i64>> = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len)
                .map(|_| {
                    let v = rng.gen_range(1..=n as i64);
                    if rng.gen() {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    let refs: Vec<&[i64]> = clauses.iter().map(Vec::as_slice).collect();
    CnfFormula::from_dimacs_clauses(n, &refs)
}

/// Random (3,4) formula on `n ≥ 3` variables: up to `⌊4n/3⌋` clauses of three
/// distinct variables, drawn while every variable has fewer than four
/// occurrences.
pub fn random_34(rng: &mut impl Rng, n: usize) -> CnfFormula {
    let m = rng.gen_range(1..=(4 * n) / 3);
    let mut occ = vec![0usize; n];
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    for _ in 0..m {
        let mut free: Vec<usize> = (0..n).filter(|&v| occ[v] < 4).collect();
        if free.len() < 3 {
            break;
        }
        free.shuffle(rng);
        let clause = free[..3]
            .iter()
            .map(|&v| {
                occ[v] += 1;
                let lit = v as i64 + 1;
                if rng.gen() {
                    lit
                } else {
                    -lit
                }
            })
            .collect();
        clauses.push(clause);
    }
    let refs: Vec<&[i64]> = clauses.iter().map(Vec::as_slice).collect();
    CnfFormula::from_dimacs_clauses(n, &refs)
}

pub fn random_plain(rng: &mut impl Rng, max_n: usize, max_a: usize, max_b: usize) -> MulticolorInstance {
    let n = rng.gen_range(1..=max_n);
    let b = rng.gen_range(1..=max_b);
    let a = rng.gen_range(b..=max_a.max(b));
    let p = rng.gen_range(0.2..0.8);
    MulticolorInstance::plain(random_graph(rng, n, p), a, b).unwrap()
}

/// Random list of colors from `0..a`, each kept with probability `p`.
pub fn random_list(rng: &mut impl Rng, a: usize, p: f64) -> Vec<usize> {
    (0..a).filter(|_| rng.gen_bool(p)).collect()
}

/// List instance with per-vertex demands in `1..=b`, or uniform demand `b`.
pub fn random_list_instance(rng: &mut impl Rng, n: usize, a: usize, b: usize, uniform: bool) -> MulticolorInstance {
    let p = rng.gen_range(0.2..0.7);
    let g = random_graph(rng, n, p);
    let lists: Vec<Vec<usize>> = (0..n).map(|_| random_list(rng, a, 0.7)).collect();
    let demands = if uniform {
        None
    } else {
        Some((0..n).map(|_| rng.gen_range(1..=b)).collect())
    };
    MulticolorInstance::new(g, a, b, Some(lists), demands).unwrap()
}

/// Random circuit over F_p with at most `max_gates` gates whose output has
/// degree at most `max_degree`.
pub fn random_circuit(rng: &mut impl Rng, p: u64, vars: usize, max_gates: usize, max_degree: usize) -> Circuit {
    let mut b = CircuitBuilder::new(p).unwrap();
    let mut nodes: Vec<(usize, usize)> = Vec::new(); // (gate, degree bound)
    for v in 0..vars {
        nodes.push((b.input(v), 1));
    }
    nodes.push((b.constant(rng.gen_range(1..p)), 0));
    while b.len() < max_gates {
        let (x, dx) = *nodes.choose(rng).unwrap();
        let (y, dy) = *nodes.choose(rng).unwrap();
        if rng.gen_bool(0.5) && dx + dy <= max_degree {
            nodes.push((b.mul(x, y), dx + dy));
        } else {
            nodes.push((b.add(x, y), dx.max(dy)));
        }
    }
    let out = nodes.last().unwrap().0;
    b.finish(out).unwrap()
}

/// Literal definition: any two distinct functions `U → {0,…,d−1}` differ in
/// the sum over some set of the family.
pub fn detects_pairwise(fam: &DetectingFamily) -> bool {
    let u = fam.universe_size();
    let d = fam.d();
    let total = d.pow(u as u32);
    let func = |mut idx: usize| -> Vec<usize> {
        (0..u)
            .map(|_| {
                let v = idx % d;
                idx /= d;
                v
            })
            .collect()
    };
    let sums = |f: &[usize]| -> Vec<usize> { fam.sets().iter().map(|s| s.iter().map(|&x| f[x]).sum()).collect() };
    let signatures: Vec<Vec<usize>> = (0..total).map(|i| sums(&func(i))).collect();
    let mut sorted = signatures.clone();
    sorted.sort();
    sorted.dedup();
    sorted.len() == signatures.len()
}

/// Carry-less instance with `m ≤ 9` numbers of `len` digits; the target is the
/// sum of a random subset about half the time.
pub fn random_carryless(rng: &mut impl Rng, m: usize, len: usize) -> CarryLessInstance {
    // keep every column sum at most 9
    let top = (9 / m.max(1)).min(3) as u8;
    let numbers: Vec<Vec<u8>> = (0..m)
        .map(|_| (0..len).map(|_| rng.gen_range(0..=top)).collect())
        .collect();
    let target: Vec<u8> = if rng.gen() {
        let pick: Vec<bool> = (0..m).map(|_| rng.gen()).collect();
        (0..len)
            .map(|j| (0..m).filter(|&i| pick[i]).map(|i| numbers[i][j]).sum())
            .collect()
    } else {
        (0..len).map(|_| rng.gen_range(0..=9)).collect()
    };
    CarryLessInstance::from_digits(target, numbers).unwrap()
}
