//! The reduction chain from CNF satisfiability to plain (a:b)-coloring.

mod gadget;
mod grouping;
mod lists;

pub use gadget::{
    build_nonuniform, build_nonuniform_with_families, decode_witness, encode_witness, GadgetOptions,
    ReductionArtifacts, VertexRole,
};
pub use grouping::{check_maltese, group_formula, max_group_parameter, GroupedFormula};
pub use lists::{remove_lists, uniformize, DEFAULT_KNESER_CAP, MAX_LIST_REMOVAL_EDGES};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage};
use crate::sat::{tovey_regularize, CnfFormula};
use crate::solvers::MulticolorInstance;

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub gadget: GadgetOptions,
    /// Last stage to run: `Nonuniform`, `Uniform` or `Plain`.
    pub stop_after: Stage,
    pub kneser_cap: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            gadget: GadgetOptions::default(),
            stop_after: Stage::Plain,
            kneser_cap: DEFAULT_KNESER_CAP,
        }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageStats {
    pub n_V: usize,
    pub n_C: usize,
    pub n_F: usize,
    pub sigma_range: usize,
    pub a: usize,
    /// Vertex counts of the nonuniform, uniform and plain instances, as far
    /// as the pipeline ran.
    pub vertices_per_stage: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub regularized: CnfFormula,
    pub artifacts: ReductionArtifacts,
    pub nonuniform: MulticolorInstance,
    pub uniform: Option<MulticolorInstance>,
    pub plain: Option<MulticolorInstance>,
    pub stats: StageStats,
}

impl PipelineOutput {
    /// Instance of the last stage that ran.
    pub fn final_instance(&self) -> &MulticolorInstance {
        self.plain
            .as_ref()
            .or(self.uniform.as_ref())
            .unwrap_or(&self.nonuniform)
    }
}

/// Regularization, grouping, the nonuniform construction, uniformization with
/// the role 3-coloring to the largest demand present, and list removal.
/// Errors carry the stage that raised them.
pub fn full_pipeline(f: &CnfFormula, b: usize, opts: PipelineOptions) -> Result<PipelineOutput> {
    if !matches!(opts.stop_after, Stage::Nonuniform | Stage::Uniform | Stage::Plain) {
        return Err(Error::params(format!(
            "the pipeline can stop after nonuniform, uniform or plain, not {}",
            opts.stop_after
        )));
    }
    let regularized = tovey_regularize(f);
    let grouped = group_formula(&regularized, b).map_err(|e| e.at_stage(Stage::Group))?;
    let (nonuniform, artifacts) =
        build_nonuniform(&grouped, b, opts.gadget).map_err(|e| e.at_stage(Stage::Nonuniform))?;
    let mut stats = StageStats {
        n_V: grouped.variable_groups.len(),
        n_C: grouped.clause_groups.len(),
        n_F: artifacts.n_f,
        sigma_range: grouped.sigma_range,
        a: artifacts.a,
        vertices_per_stage: vec![nonuniform.vertex_count()],
    };
    let mut out = PipelineOutput {
        regularized,
        artifacts,
        nonuniform,
        uniform: None,
        plain: None,
        stats: stats.clone(),
    };
    if opts.stop_after == Stage::Nonuniform {
        return Ok(out);
    }

    let target = out.nonuniform.max_demand().max(1);
    let uniform =
        uniformize(&out.nonuniform, &out.artifacts.three_coloring, target).map_err(|e| e.at_stage(Stage::Uniform))?;
    stats.vertices_per_stage.push(uniform.vertex_count());
    out.uniform = Some(uniform);
    if opts.stop_after == Stage::Uniform {
        out.stats = stats;
        return Ok(out);
    }

    let plain = remove_lists(out.uniform.as_ref().expect("set above"), opts.kneser_cap)
        .map_err(|e| e.at_stage(Stage::Plain))?;
    stats.vertices_per_stage.push(plain.vertex_count());
    out.plain = Some(plain);
    out.stats = stats;
    Ok(out)
}
