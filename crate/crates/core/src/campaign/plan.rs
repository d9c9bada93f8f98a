//! Turning a stream of graphs into solver tasks and reconstruction entries.
//!
//! Every distinct input graph gets a reduction trace. Core and small-part
//! terminals become tasks, canonically keyed and deduplicated across all
//! inputs; everything else is rebuilt from terminal colorings afterwards.

use crate::campaign::CampaignError;
use crate::canon::{canonical_form_with_limit, CanonicalForm};
use crate::graph::BipartiteGraph;
use crate::reductions::{reduce, ProblemId, ReductionTrace};
use std::collections::HashMap;

/// Keys can exceed the default 16-vertex cap only in permutation work, which
/// stays bounded by the smaller part; campaigns accept graphs up to graph6
/// size.
const PLAN_KEY_VERTEX_LIMIT: usize = 62;

#[derive(Debug)]
pub struct PlanTerminal {
    pub problem_id: ProblemId,
    pub task_key: String,
    /// Relabeling from the terminal subproblem to the canonical task graph.
    pub form: CanonicalForm,
}

#[derive(Debug)]
pub struct PlanInput {
    pub key: String,
    pub graph6: String,
    pub n_left: usize,
    pub n_right: usize,
    pub trace: ReductionTrace,
    pub terminals: Vec<PlanTerminal>,
}

#[derive(Debug, Clone)]
pub struct PlanTask {
    pub key: String,
    pub g6: String,
    pub graph: BipartiteGraph,
}

#[derive(Debug, Default)]
pub struct CampaignPlan {
    pub inputs: Vec<PlanInput>,
    pub tasks: Vec<PlanTask>,
    pub input_index: HashMap<String, usize>,
    pub task_index: HashMap<String, usize>,
    /// task key -> indices of inputs waiting on it
    pub dependents: HashMap<String, Vec<usize>>,
    pub duplicate_inputs: usize,
}

impl CampaignPlan {
    pub fn task(&self, key: &str) -> Option<&PlanTask> {
        self.task_index.get(key).map(|&i| &self.tasks[i])
    }

    pub fn input(&self, key: &str) -> Option<&PlanInput> {
        self.input_index.get(key).map(|&i| &self.inputs[i])
    }
}

/// Classifies and reduces a stream of graphs into a deduplicated plan.
pub fn plan(
    graphs: impl IntoIterator<Item = BipartiteGraph>,
) -> Result<CampaignPlan, CampaignError> {
    let mut plan = CampaignPlan::default();
    for graph in graphs {
        let form = canonical_form_with_limit(&graph, PLAN_KEY_VERTEX_LIMIT)
            .map_err(CampaignError::Key)?;
        let key = form.key.0;
        if plan.input_index.contains_key(&key) {
            plan.duplicate_inputs += 1;
            continue;
        }
        let graph6 = graph.to_graph6().map_err(CampaignError::Graph6)?;
        let trace = reduce(&graph);
        let mut terminals = Vec::new();
        for terminal in trace.terminals() {
            let tgraph = trace.problem(terminal.id);
            let tform = canonical_form_with_limit(tgraph, PLAN_KEY_VERTEX_LIMIT)
                .map_err(CampaignError::Key)?;
            let task_key = tform.key.0.clone();
            if !plan.task_index.contains_key(&task_key) {
                plan.task_index.insert(task_key.clone(), plan.tasks.len());
                plan.tasks.push(PlanTask {
                    key: task_key.clone(),
                    g6: tform
                        .graph
                        .to_graph6()
                        .map_err(CampaignError::Graph6)?,
                    graph: tform.graph.clone(),
                });
            }
            terminals.push(PlanTerminal {
                problem_id: terminal.id,
                task_key,
                form: tform,
            });
        }
        let input_idx = plan.inputs.len();
        for terminal in &terminals {
            plan.dependents
                .entry(terminal.task_key.clone())
                .or_default()
                .push(input_idx);
        }
        plan.input_index.insert(key.clone(), input_idx);
        plan.inputs.push(PlanInput {
            key,
            graph6,
            n_left: graph.n_left(),
            n_right: graph.n_right(),
            trace,
            terminals,
        });
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::complete_bipartite;

    #[test]
    fn duplicates_are_dropped() {
        // 10 graphs, 2 of them repeats of earlier ones, all core/small-part
        let mut graphs = Vec::new();
        for n in 4..=11 {
            graphs.push(complete_bipartite(4, n).unwrap());
        }
        graphs.push(complete_bipartite(4, 4).unwrap());
        graphs.push(complete_bipartite(4, 5).unwrap());
        assert_eq!(graphs.len(), 10);
        let plan = plan(graphs).unwrap();
        assert_eq!(plan.inputs.len(), 8);
        assert_eq!(plan.tasks.len(), 8);
        assert_eq!(plan.duplicate_inputs, 2);
    }

    #[test]
    fn trees_produce_no_tasks() {
        let graphs = (0..5).map(|seed| crate::generator::random_tree(8, seed).unwrap());
        let plan = plan(graphs).unwrap();
        assert!(plan.tasks.is_empty());
        assert!(!plan.inputs.is_empty());
        for input in &plan.inputs {
            assert!(input.terminals.is_empty());
        }
    }

    #[test]
    fn connected_2x2_enumeration_plans_one_task() {
        let spec = crate::generator::EnumSpec {
            connected_only: true,
            ..crate::generator::EnumSpec::all(2, 2)
        };
        let graphs = crate::generator::enumerate_bipartite(spec).unwrap();
        let plan = plan(graphs).unwrap();
        assert_eq!(plan.inputs.len(), 2);
        // P_4 strips to nothing; C_4 stays as a small-part task
        assert_eq!(plan.tasks.len(), 1);
        assert_eq!(plan.tasks[0].graph.edge_count(), 4);
    }

    #[test]
    fn shared_terminals_are_planned_once() {
        // K_{4,4} alone, and K_{4,4} plus a pendant vertex: both reduce to
        // the same core task
        let k44 = complete_bipartite(4, 4).unwrap();
        let mut edges = k44.edges().to_vec();
        edges.push((0, 4));
        let with_pendant = BipartiteGraph::new(4, 5, edges);
        let plan = plan(vec![k44, with_pendant]).unwrap();
        assert_eq!(plan.inputs.len(), 2);
        assert_eq!(plan.tasks.len(), 1);
        assert_eq!(plan.dependents[&plan.tasks[0].key].len(), 2);
    }
}
