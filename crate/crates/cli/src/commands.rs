use std::fs;
use std::path::{Path, PathBuf};

use multicolor::circuits::{
    build_p_g, build_p_s, build_q_g, build_q_s, choose_block_t, degree_filter, expand_circuit, has_r_monomial,
    CarryLessInstance, Circuit,
};
use multicolor::detecting::{build_family, greedy_family, verify_family, DetectingFamily};
use multicolor::error::Stage;
use multicolor::graph::kneser_graph;
use multicolor::reduction::{decode_witness, encode_witness, full_pipeline, GadgetOptions, PipelineOptions};
use multicolor::sat::{brute_force_sat, parse_dimacs};
use multicolor::solvers::{check_multicoloring, decide, Engine, SolverCaps};
use multicolor::{CnfFormula, MulticolorInstance};
use serde::Serialize;
use thiserror::Error;

use crate::report::{Outcome, RunReport};
use crate::{Caps, CircuitCommand, Command, DetectCommand, EngineArg, StageArg};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: multicolor::Error,
    },
    #[error(transparent)]
    Lib(#[from] multicolor::Error),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T>(path: &Path, f: impl FnOnce(&str) -> multicolor::Result<T>) -> Result<T> {
    let text = read(path)?;
    f(&text).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str, report: &mut RunReport) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    report.outputs.push(path.display().to_string());
    Ok(())
}

/// Writes `text` to `out`, or keeps it for stdout.
fn emit(out: Option<&PathBuf>, text: String, report: &mut RunReport) -> Result<()> {
    match out {
        Some(path) => write(path, &text, report),
        None => {
            report.artifact = Some(text);
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn pretty(value: &impl Serialize) -> String {
    with_newline(serde_json::to_string_pretty(value).expect("serializable"))
}

pub fn run(cmd: &Command, seed: u64, caps: &Caps, report: &mut RunReport) -> Result<()> {
    let solver_caps = SolverCaps {
        node_budget: caps.cap_nodes,
        dp_cap: caps.cap_dp,
    };
    match cmd {
        Command::Solve {
            instance,
            engine,
            witness,
        } => {
            report.input("instance", instance);
            let inst = parse(instance, MulticolorInstance::from_json)?;
            let engine = match engine {
                EngineArg::Backtracking => Engine::Backtracking,
                EngineArg::Dp => Engine::Dp,
            };
            report.input("engine", engine);
            if witness.is_some() && engine == Engine::Dp {
                return Err(CliError::Usage("--witness needs the backtracking engine".into()));
            }
            report.stat("vertices", inst.vertex_count());
            report.stat("a", inst.a());
            report.stat("b", inst.b());
            let (yes, col) = decide(&inst, engine, solver_caps)?;
            if let (Some(path), Some(col)) = (witness, col) {
                write(path, &with_newline(col.to_json()), report)?;
                report.witness = Some(path.display().to_string());
            }
            report.result = Outcome::from_bool(yes);
        }
        Command::Reduce {
            cnf,
            b,
            stage,
            out,
            stats,
        } => {
            report.input("cnf", cnf);
            report.input("b", b);
            report.input("seed", seed);
            let f = parse(cnf, parse_dimacs)?;
            let stop_after = match stage {
                StageArg::Nonuniform => Stage::Nonuniform,
                StageArg::Uniform => Stage::Uniform,
                StageArg::Plain => Stage::Plain,
            };
            report.input("stage", stop_after);
            let opts = PipelineOptions {
                gadget: gadget_options(seed, caps),
                stop_after,
                kneser_cap: caps.cap_kneser,
            };
            let res = full_pipeline(&f, *b, opts)?;
            let st = serde_json::to_value(&res.stats).expect("serializable");
            if let serde_json::Value::Object(map) = st {
                report.stats.extend(map);
            }
            if let Some(path) = stats {
                write(path, &pretty(&res.stats), report)?;
            }
            emit(out.as_ref(), with_newline(res.final_instance().to_json()), report)?;
            report.result = Outcome::Yes;
        }
        Command::Verify { cnf, b } => {
            report.input("cnf", cnf);
            report.input("b", b);
            report.input("seed", seed);
            let f = parse(cnf, parse_dimacs)?;
            let agree = verify(&f, *b, seed, caps, solver_caps, report)?;
            report.result = Outcome::from_bool(agree);
        }
        Command::Detect(DetectCommand::Build {
            universe,
            d,
            size,
            attempts,
            out,
        }) => {
            report.input("universe", universe);
            report.input("d", d);
            let fam = match size {
                Some(size) => {
                    report.input("size", size);
                    report.input("seed", seed);
                    build_family(*universe, *d, seed, *size, *attempts, caps.cap_verify)?
                }
                None => greedy_family(*universe, *d, caps.cap_verify)?,
            };
            report.stat("sets", fam.len());
            emit(out.as_ref(), fam.to_text(), report)?;
            report.result = Outcome::Yes;
        }
        Command::Detect(DetectCommand::Verify { family }) => {
            report.input("family", family);
            let fam = parse(family, DetectingFamily::from_text)?;
            report.stat("sets", fam.len());
            report.result = Outcome::from_bool(verify_family(&fam, caps.cap_verify)?);
        }
        Command::Kneser { a, b, out } => {
            report.input("a", a);
            report.input("b", b);
            let (g, labels) = kneser_graph(*a, *b)?;
            report.stat("vertices", g.vertex_count());
            report.stat("edges", g.edge_count());
            #[derive(Serialize)]
            struct KneserOut {
                n: usize,
                edges: Vec<(usize, usize)>,
                labels: Vec<Vec<usize>>,
            }
            let body = KneserOut {
                n: g.vertex_count(),
                edges: g.edges().collect(),
                labels: labels.iter().map(|l| l.elements().to_vec()).collect(),
            };
            emit(
                out.as_ref(),
                with_newline(serde_json::to_string(&body).expect("serializable")),
                report,
            )?;
            report.result = Outcome::Yes;
        }
        Command::Circuit(c) => circuit(c, caps, report)?,
    }
    Ok(())
}

fn gadget_options(seed: u64, caps: &Caps) -> GadgetOptions {
    GadgetOptions {
        seed,
        verify_cap: caps.cap_verify,
        ..GadgetOptions::default()
    }
}

/// Brute force on the formula against backtracking on its nonuniform
/// instance, with both witness translations checked when satisfiable.
fn verify(
    f: &CnfFormula,
    b: usize,
    seed: u64,
    caps: &Caps,
    solver_caps: SolverCaps,
    report: &mut RunReport,
) -> Result<bool> {
    let oracle = brute_force_sat(f, caps.cap_sat_vars)?;
    let opts = PipelineOptions {
        gadget: gadget_options(seed, caps),
        stop_after: Stage::Nonuniform,
        kneser_cap: caps.cap_kneser,
    };
    let res = full_pipeline(f, b, opts)?;
    report.stat("formula_satisfiable", oracle.is_some());
    report.stat("vertices", res.nonuniform.vertex_count());
    let (colorable, col) = decide(&res.nonuniform, Engine::Backtracking, solver_caps)?;
    report.stat("instance_colorable", colorable);
    if oracle.is_some() != colorable {
        return Ok(false);
    }
    let Some(col) = col else {
        return Ok(true);
    };
    let decoded = decode_witness(&col, &res.artifacts)?;
    let restricted = multicolor::Assignment::new(decoded.values[..f.variable_count()].to_vec());
    let decode_ok = res.regularized.satisfied_by(&decoded) && f.satisfied_by(&restricted);
    let encoded = encode_witness(&decoded, &res.artifacts)?;
    let encode_ok = check_multicoloring(&res.nonuniform, &encoded)?.is_valid();
    report.stat("decode_round_trip", decode_ok);
    report.stat("encode_round_trip", encode_ok);
    Ok(decode_ok && encode_ok)
}

fn circuit(cmd: &CircuitCommand, caps: &Caps, report: &mut RunReport) -> Result<()> {
    let describe = |c: &Circuit, report: &mut RunReport| {
        report.stat("gates", c.gate_count());
        report.stat("modulus", c.modulus());
    };
    match cmd {
        CircuitCommand::Graph {
            instance,
            filtered,
            out,
        } => {
            report.input("instance", instance);
            report.input("filtered", filtered);
            let inst = parse(instance, MulticolorInstance::from_json)?;
            let c = if *filtered {
                build_p_g(&inst, caps.cap_sets)?
            } else {
                build_q_g(&inst, caps.cap_sets)?
            };
            describe(&c, report);
            emit(out.as_ref(), c.to_text(), report)?;
        }
        CircuitCommand::SubsetSum {
            instance,
            t,
            sigma,
            filtered,
            out,
        } => {
            report.input("instance", instance);
            report.input("filtered", filtered);
            let inst = parse(instance, CarryLessInstance::from_json)?;
            let t = match (t, sigma) {
                (Some(t), _) => *t,
                (None, None) => 1,
                (None, Some(sigma)) => {
                    report.input("sigma", sigma);
                    choose_block_t(inst.count(), *sigma).ok_or_else(|| {
                        CliError::Usage(format!("no block count satisfies the ratio bound for sigma {sigma}"))
                    })?
                }
            };
            report.input("t", t);
            let sc = if *filtered {
                build_p_s(&inst, t)?
            } else {
                build_q_s(&inst, t)?
            };
            report.stat("q", sc.q);
            report.stat("r", sc.r);
            report.stat("k", sc.k);
            describe(&sc.circuit, report);
            emit(out.as_ref(), sc.circuit.to_text(), report)?;
        }
        CircuitCommand::Expand { circuit, out } => {
            report.input("circuit", circuit);
            let c = parse(circuit, Circuit::from_text)?;
            let p = expand_circuit(&c, caps.cap_terms)?;
            report.stat("terms", p.len());
            report.stat("degree", p.degree());
            emit(out.as_ref(), with_newline(p.to_string()), report)?;
        }
        CircuitCommand::Filter {
            circuit,
            k,
            max_degree,
            out,
        } => {
            report.input("circuit", circuit);
            report.input("k", k);
            let max_degree = max_degree.unwrap_or(*k);
            report.input("max_degree", max_degree);
            let c = parse(circuit, Circuit::from_text)?;
            let f = degree_filter(&c, *k, max_degree)?;
            report.stat("source_gates", c.gate_count());
            describe(&f, report);
            emit(out.as_ref(), f.to_text(), report)?;
        }
        CircuitCommand::Monomial { circuit, r } => {
            report.input("circuit", circuit);
            report.input("r", r);
            let c = parse(circuit, Circuit::from_text)?;
            let p = expand_circuit(&c, caps.cap_terms)?;
            report.stat("terms", p.len());
            report.result = Outcome::from_bool(has_r_monomial(&p, *r));
            return Ok(());
        }
    }
    report.result = Outcome::Yes;
    Ok(())
}
