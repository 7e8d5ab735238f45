//! Acceptance suite: one PASS/FAIL line per criterion, fixed seeds.
//! Run with `cargo test -p multicolor --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use multicolor::circuits::{
    block_ratio, build_p_g, build_p_s, build_q_g, build_q_s, choose_block_t, expand_circuit, has_r_monomial,
    solve_carryless, CarryLessInstance, DEFAULT_SUBSET_CAP, DEFAULT_TERM_CAP,
};
use multicolor::detecting::{build_family, greedy_family, verify_family, DetectingFamily, DEFAULT_VERIFY_CAP};
use multicolor::graph::{greedy_color_natural, kneser_graph, DEFAULT_INDEPENDENT_SET_CAP};
use multicolor::reduction::{
    build_nonuniform, decode_witness, encode_witness, group_formula, remove_lists, uniformize, GadgetOptions,
    DEFAULT_KNESER_CAP,
};
use multicolor::sat::brute_force_sat;
use multicolor::solvers::{check_multicoloring, min_colors, solve_backtracking, solve_dp, SolverCaps};
use multicolor::{Graph, MultiColoring, MulticolorInstance};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fmt_err(e: multicolor::Error) -> String {
    e.to_string()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn reduction_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(1);
    let (mut sat, mut unsat) = (0, 0);
    for case in 0..100 {
        let n = rng.gen_range(6..=9);
        let f = common::random_34(&mut rng, n);
        let g = group_formula(&f, 2).map_err(fmt_err)?;
        let (inst, art) = build_nonuniform(&g, 2, GadgetOptions::default()).map_err(fmt_err)?;
        let model = brute_force_sat(&f, 24).map_err(fmt_err)?;
        let col = solve_backtracking(&inst).map_err(fmt_err)?;
        ensure(model.is_some() == col.is_some(), || {
            format!("case {case}: oracle and solver disagree")
        })?;
        if let (Some(model), Some(col)) = (model, col) {
            sat += 1;
            let enc = encode_witness(&model, &art).map_err(fmt_err)?;
            ensure(check_multicoloring(&inst, &enc).map_err(fmt_err)?.is_valid(), || {
                format!("case {case}: encoded model is not a valid coloring")
            })?;
            let dec = decode_witness(&col, &art).map_err(fmt_err)?;
            ensure(f.satisfied_by(&dec), || {
                format!("case {case}: decoded coloring does not satisfy")
            })?;
        } else {
            unsat += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "100/100 agree ({sat} sat, {unsat} unsat), round-trips ok, {elapsed:.2?}"
    ))
}

fn uniformization() -> Outcome {
    let mut rng = common::rng(2);
    let mut yes = 0;
    for case in 0..30 {
        let (n, a, b) = (rng.gen_range(1..=6), rng.gen_range(1..=6), rng.gen_range(1..=3));
        let inst = common::random_list_instance(&mut rng, n, a, b, false);
        let coloring = greedy_color_natural(inst.graph());
        let out = uniformize(&inst, &coloring, inst.max_demand().max(b)).map_err(fmt_err)?;
        let before = solve_backtracking(&inst).map_err(fmt_err)?.is_some();
        let after = solve_backtracking(&out).map_err(fmt_err)?.is_some();
        ensure(before == after, || {
            format!("case {case}: {before} before, {after} after")
        })?;
        yes += usize::from(before);
    }
    Ok(format!("30/30 preserved ({yes} colorable)"))
}

fn list_removal() -> Outcome {
    let mut rng = common::rng(3);
    let mut yes = 0;
    for case in 0..30 {
        let b = rng.gen_range(1..=2);
        let a = rng.gen_range(b + 1..=4);
        let n = rng.gen_range(1..=5);
        let inst = common::random_list_instance(&mut rng, n, a, b, true);
        let out = remove_lists(&inst, DEFAULT_KNESER_CAP).map_err(fmt_err)?;
        let expected = n + binomial(a + b, b);
        ensure(out.vertex_count() == expected, || {
            format!("case {case}: {} vertices, expected {expected}", out.vertex_count())
        })?;
        let before = solve_backtracking(&inst).map_err(fmt_err)?.is_some();
        let after = solve_backtracking(&out).map_err(fmt_err)?.is_some();
        ensure(before == after, || {
            format!("case {case}: {before} before, {after} after")
        })?;
        yes += usize::from(before);
    }
    Ok(format!("30/30 exact vertex count and preserved ({yes} colorable)"))
}

fn detecting_families() -> Outcome {
    let cap = DEFAULT_VERIFY_CAP;
    let mut checked = 0;
    for u in 1..=8 {
        let greedy = greedy_family(u, 4, cap).map_err(fmt_err)?;
        let bound = 2.0 * u as f64 * 4f64.log2() + 1.0;
        ensure(greedy.len() as f64 <= bound, || {
            format!("greedy u={u}: {} sets > {bound}", greedy.len())
        })?;
        let mut families = vec![greedy, DetectingFamily::singletons(u, 4).map_err(fmt_err)?];
        for seed in 0..10 {
            families.push(build_family(u, 4, seed, 0, 8, cap).map_err(fmt_err)?);
        }
        for fam in &families {
            ensure(verify_family(fam, cap).map_err(fmt_err)?, || {
                format!("u={u}: {fam:?} fails")
            })?;
            checked += 1;
        }
    }
    let mut compared = 0;
    let mut agree = |fam: &DetectingFamily| -> Result<(), String> {
        compared += 1;
        ensure(
            verify_family(fam, cap).map_err(fmt_err)? == common::detects_pairwise(fam),
            || format!("verifier disagrees on {fam:?}"),
        )
    };
    for u in 1..=4 {
        let candidates: Vec<Vec<usize>> = (1u32..1 << u)
            .map(|m| (0..u).filter(|&x| m >> x & 1 == 1).collect())
            .collect();
        for choice in 0u32..1 << candidates.len() {
            let sets: Vec<Vec<usize>> = (0..candidates.len())
                .filter(|&i| choice >> i & 1 == 1)
                .map(|i| candidates[i].clone())
                .collect();
            for d in 2..=3 {
                agree(&DetectingFamily::new(u, d, sets.clone()).map_err(fmt_err)?)?;
            }
        }
    }
    Ok(format!(
        "{checked} families verified, {compared} families match the pairwise definition"
    ))
}

fn dp_agreement() -> Outcome {
    let mut rng = common::rng(5);
    let mut yes = 0;
    for case in 0..100 {
        let inst = common::random_plain(&mut rng, 7, 6, 3);
        let dp = solve_dp(&inst).map_err(fmt_err)?;
        let bt = solve_backtracking(&inst).map_err(fmt_err)?.is_some();
        ensure(dp == bt, || format!("case {case}: dp {dp}, backtracking {bt}"))?;
        yes += usize::from(dp);
    }
    let caps = SolverCaps::default();
    for (name, g, b, want) in [
        ("K3", Graph::complete(3), 2, 6),
        ("C5", Graph::cycle(5), 2, 5),
        ("C5", Graph::cycle(5), 1, 3),
    ] {
        let got = min_colors(&g, b, caps).map_err(fmt_err)?.a;
        ensure(got == want, || {
            format!("min_colors({name}, {b}) = {got}, expected {want}")
        })?;
    }
    Ok(format!(
        "100/100 agree ({yes} colorable), min_colors K3/2=6 C5/2=5 C5/1=3"
    ))
}

fn graph_polynomial_cases() -> Result<usize, String> {
    let mut rng = common::rng(6);
    let mut cases = 0;
    for n in 1..=4usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges = (0..pairs.len()).filter(|&i| mask >> i & 1 == 1).map(|i| pairs[i]);
            let g = Graph::new(n, edges).map_err(fmt_err)?;
            for a in 1..=3 {
                for b in 1..=2 {
                    for _ in 0..20 {
                        let lists = (0..n).map(|_| common::random_list(&mut rng, a, 0.7)).collect();
                        let inst = MulticolorInstance::new(g.clone(), a, b, Some(lists), None).map_err(fmt_err)?;
                        let q = build_q_g(&inst, DEFAULT_INDEPENDENT_SET_CAP).map_err(fmt_err)?;
                        let p = build_p_g(&inst, DEFAULT_INDEPENDENT_SET_CAP).map_err(fmt_err)?;
                        let bound = (4 * b * n + 1).pow(2) * q.gate_count();
                        ensure(p.gate_count() <= bound, || {
                            format!("p_G has {} gates, bound {bound}", p.gate_count())
                        })?;
                        let poly = expand_circuit(&p, DEFAULT_TERM_CAP).map_err(fmt_err)?;
                        let detected = has_r_monomial(&poly, b as u32);
                        let colorable = solve_backtracking(&inst).map_err(fmt_err)?.is_some();
                        ensure(detected == colorable, || {
                            format!("p_G says {detected}, solver says {colorable} on {}", inst.to_json())
                        })?;
                        cases += 1;
                    }
                }
            }
        }
    }
    Ok(cases)
}

fn subset_sum_case(inst: &CarryLessInstance, t: usize) -> Result<(), String> {
    let q = build_q_s(inst, t).map_err(fmt_err)?;
    let p = build_p_s(inst, t).map_err(fmt_err)?;
    let bound = (2 * p.k as usize + 1).pow(2) * q.circuit.gate_count();
    ensure(p.circuit.gate_count() <= bound, || {
        format!("p_S has {} gates, bound {bound}", p.circuit.gate_count())
    })?;
    let poly = expand_circuit(&p.circuit, DEFAULT_TERM_CAP).map_err(fmt_err)?;
    let detected = has_r_monomial(&poly, u32::try_from(p.r).map_err(|e| e.to_string())?);
    let solvable = solve_carryless(inst, DEFAULT_SUBSET_CAP).map_err(fmt_err)?.is_some();
    ensure(detected == solvable, || {
        format!(
            "p_S says {detected}, solver says {solvable} on {}, t={t}",
            inst.to_json()
        )
    })
}

fn subset_sum_cases() -> Result<usize, String> {
    const GRID: [&str; 6] = ["00", "01", "10", "11", "12", "21"];
    const TARGETS: [&str; 8] = ["00", "01", "11", "12", "22", "23", "33", "35"];
    let mut instances = Vec::new();
    for m in 1..=3 {
        // multisets of grid strings of size m
        let mut idx = vec![0usize; m];
        loop {
            for s in TARGETS {
                let numbers: Vec<&str> = idx.iter().map(|&i| GRID[i]).collect();
                instances.push(CarryLessInstance::from_strings(s, &numbers).map_err(fmt_err)?);
            }
            let Some(pos) = (0..m).rev().find(|&p| idx[p] + 1 < GRID.len()) else {
                break;
            };
            let next = idx[pos] + 1;
            idx[pos..].fill(next);
        }
    }
    let mut rng = common::rng(7);
    for _ in 0..20 {
        let (m, len) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        instances.push(common::random_carryless(&mut rng, m, len));
    }
    let mut cases = 0;
    for inst in &instances {
        let len = inst.digit_len();
        let ts: &[usize] = if len == 1 { &[1] } else { &[1, len] };
        for &t in ts {
            subset_sum_case(inst, t)?;
            cases += 1;
        }
    }
    Ok(cases)
}

fn monomial_propositions() -> Outcome {
    let g = graph_polynomial_cases()?;
    let s = subset_sum_cases()?;
    Ok(format!(
        "p_G {g}/{g} agree, p_S {s}/{s} agree, all filter gate counts within bound"
    ))
}

fn kneser_facts() -> Outcome {
    let (g, _) = kneser_graph(5, 2).map_err(fmt_err)?;
    ensure(g.vertex_count() == 10 && g.edge_count() == 15, || {
        format!("{} vertices, {} edges", g.vertex_count(), g.edge_count())
    })?;
    ensure((0..10).all(|v| g.degree(v) == 3), || "not 3-regular".into())?;
    let inst = MulticolorInstance::plain(Graph::cycle(5), 5, 2).map_err(fmt_err)?;
    let col = MultiColoring::new(vec![vec![0, 1], vec![2, 3], vec![4, 0], vec![1, 2], vec![3, 4]]);
    ensure(check_multicoloring(&inst, &col).map_err(fmt_err)?.is_valid(), || {
        "C5 (5:2)-coloring rejected".into()
    })?;
    Ok("K(5,2) is 3-regular on 10 vertices and 15 edges; C5 (5:2)-coloring valid".into())
}

fn parameter_search() -> Outcome {
    let within = |n, t, sigma| (0.5..=2.0).contains(&block_ratio(n, t, sigma));
    let t = choose_block_t(100, 0.5);
    ensure(t == Some(50), || format!("choose_block_t(100, 0.5) = {t:?}"))?;
    ensure(within(100, 50, 0.5) && (1..50).all(|t| !within(100, t, 0.5)), || {
        "direct evaluation disagrees for n=100".into()
    })?;
    let t = choose_block_t(10, 0.0);
    ensure(t.is_none(), || format!("choose_block_t(10, 0) = {t:?}"))?;
    ensure((1..=10).all(|t| !within(10, t, 0.0)), || {
        "direct evaluation disagrees for n=10".into()
    })?;
    Ok(format!(
        "choose_block_t(100, 0.5) = 50 (ratio {:.3}), choose_block_t(10, 0) = none",
        block_ratio(100, 50, 0.5)
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("reduction round trip", reduction_round_trip),
        ("uniformization", uniformization),
        ("list removal", list_removal),
        ("detecting families", detecting_families),
        ("dp vs backtracking", dp_agreement),
        ("monomial propositions", monomial_propositions),
        ("kneser facts", kneser_facts),
        ("parameter search", parameter_search),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
