//! Recursive choice among the naive transform and the three reductions, and
//! execution of the resulting plan tree with operation counting.
//!
//! A node of order at most `base_order` is a naive leaf. Above that, a
//! proper subgroup `H` with `|H| ≥ |G|^{1−ε/2}` selects the single-subgroup
//! reduction over the largest such `H`; otherwise [`find_triple`] decides
//! between the prime-index and triple-subgroup reductions.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::counter::{OpCounter, OpCounts};
use crate::dft::{naive_dft, BlockDiagonal, GroupAlgebraElement};
use crate::error::{GdftError, Result};
use crate::group::{
    all_subgroups, find_forced_triple, find_triple, is_prime, normal_subgroups, FiniteGroup, Subgroup, Triple,
    TripleSearch,
};
use crate::reductions::{prime_index_dft, single_subgroup_dft, triple_subgroup_dft, PrimePlan, SinglePlan, TriplePlan};
use crate::repr::{compute_irreps, restriction_plan, IrrepOptions, IrrepSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Auto,
    Naive,
    Single,
    Prime,
    Triple,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Auto => "auto",
            Strategy::Naive => "naive",
            Strategy::Single => "single",
            Strategy::Prime => "prime",
            Strategy::Triple => "triple",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = GdftError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Strategy::Auto,
            "naive" => Strategy::Naive,
            "single" => Strategy::Single,
            "prime" => Strategy::Prime,
            "triple" => Strategy::Triple,
            other => return Err(GdftError::Parse(format!("unknown strategy `{other}`"))),
        })
    }
}

#[derive(Debug, Clone)]
pub struct PlanConfig {
    /// Groups of at most this order are transformed naively.
    pub base_order: usize,
    pub epsilon: f64,
    /// Strategy forced at the root; children always use `Auto`.
    pub strategy: Strategy,
    pub irreps: IrrepOptions,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            base_order: 24,
            epsilon: 0.3,
            strategy: Strategy::Auto,
            irreps: IrrepOptions::default(),
        }
    }
}

/// Estimated counts for a node: the naive transform and the chosen plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostEstimate {
    pub strategy: Strategy,
    pub naive: OpCounts,
    pub planned: OpCounts,
}

#[derive(Debug)]
pub enum NodeKind {
    Naive,
    Single {
        plan: SinglePlan,
        child: Box<PlanNode>,
    },
    PrimeIndex {
        plan: PrimePlan,
        child: Box<PlanNode>,
    },
    Triple {
        plan: Box<TriplePlan>,
        child_h: Box<PlanNode>,
        child_k: Box<PlanNode>,
    },
}

#[derive(Debug)]
pub struct PlanNode {
    pub irreps: Arc<IrrepSet>,
    pub depth: usize,
    pub estimate: CostEstimate,
    pub kind: NodeKind,
}

impl PlanNode {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.irreps.group()
    }

    pub fn strategy(&self) -> Strategy {
        match self.kind {
            NodeKind::Naive => Strategy::Naive,
            NodeKind::Single { .. } => Strategy::Single,
            NodeKind::PrimeIndex { .. } => Strategy::Prime,
            NodeKind::Triple { .. } => Strategy::Triple,
        }
    }

    pub fn children(&self) -> Vec<&PlanNode> {
        match &self.kind {
            NodeKind::Naive => vec![],
            NodeKind::Single { child, .. } | NodeKind::PrimeIndex { child, .. } => vec![child],
            NodeKind::Triple { child_h, child_k, .. } => vec![child_h, child_k],
        }
    }

    /// Depth of the subtree below this node.
    pub fn height(&self) -> usize {
        self.children().iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    pub fn spec(&self) -> PlanSpec {
        let g = self.group();
        let (subgroup, triple) = match &self.kind {
            NodeKind::Naive => (None, None),
            NodeKind::Single { plan, .. } => (Some(plan.restriction.subgroup.elements().to_vec()), None),
            NodeKind::PrimeIndex { plan, .. } => (Some(plan.restriction.subgroup.elements().to_vec()), None),
            NodeKind::Triple { plan, .. } => (
                None,
                Some(TripleSpec {
                    n: plan.triple.n.elements().to_vec(),
                    h: plan.triple.h.elements().to_vec(),
                    k: plan.triple.k.elements().to_vec(),
                }),
            ),
        };
        PlanSpec {
            strategy: self.strategy(),
            group: g.label().to_string(),
            order: g.order(),
            subgroup,
            triple,
            estimate: Some(self.estimate),
            children: self.children().iter().map(|c| c.spec()).collect(),
        }
    }
}

#[derive(Debug)]
pub struct Plan {
    pub root: PlanNode,
}

impl Plan {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.root.group()
    }

    pub fn irreps(&self) -> &Arc<IrrepSet> {
        &self.root.irreps
    }

    pub fn strategy(&self) -> Strategy {
        self.root.strategy()
    }

    pub fn estimate(&self) -> CostEstimate {
        self.root.estimate
    }

    /// Per-block residual tolerance for this plan: `1e-9` loosened one decade
    /// per recursion level, never below `1e-6`.
    pub fn tolerance(&self) -> f64 {
        tolerance_for_depth(self.root.height())
    }

    pub fn spec(&self) -> PlanSpec {
        self.root.spec()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.spec())?)
    }
}

pub fn tolerance_for_depth(depth: usize) -> f64 {
    (1e-9 * 10f64.powi(depth as i32)).max(1e-6)
}

/// Subgroups as sorted element lists in the node's group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleSpec {
    pub n: Vec<usize>,
    pub h: Vec<usize>,
    pub k: Vec<usize>,
}

/// Serializable plan tree. `subgroup` is `H` for single nodes and `N` for
/// prime-index nodes; children are expressed in their own groups' indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSpec {
    pub strategy: Strategy,
    #[serde(default)]
    pub group: String,
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<TripleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<CostEstimate>,
    #[serde(default)]
    pub children: Vec<PlanSpec>,
}

impl PlanSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Builds plans, caching canonical irreps by multiplication table.
#[derive(Debug)]
pub struct Planner {
    pub config: PlanConfig,
    cache: Arc<Mutex<HashMap<String, Arc<IrrepSet>>>>,
}

impl Planner {
    pub fn new(config: PlanConfig) -> Self {
        Planner {
            config,
            cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    /// A planner forcing `strategy` at the root, sharing this planner's irreps.
    pub fn with_strategy(&self, strategy: Strategy) -> Planner {
        Planner {
            config: PlanConfig {
                strategy,
                ..self.config.clone()
            },
            cache: Arc::clone(&self.cache),
        }
    }

    /// Irreps of `g`, cached by multiplication table and label.
    pub fn irreps(&self, g: &Arc<FiniteGroup>) -> Result<Arc<IrrepSet>> {
        let key = format!("{}:{}", g.table_hash(), g.label());
        if let Some(hit) = self.cache.lock().expect("irrep cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let set = Arc::new(compute_irreps(g, &self.config.irreps)?);
        self.cache
            .lock()
            .expect("irrep cache poisoned")
            .insert(key, Arc::clone(&set));
        Ok(set)
    }

    pub fn plan(&self, g: &Arc<FiniteGroup>) -> Result<Plan> {
        let irreps = self.irreps(g)?;
        self.plan_for(&irreps)
    }

    /// A plan over a given irrep set of the root group.
    pub fn plan_for(&self, irreps: &Arc<IrrepSet>) -> Result<Plan> {
        let root = self.node(irreps, 0, self.config.strategy)?;
        Ok(Plan { root })
    }

    /// Rebuilds a plan from its serialized tree.
    pub fn plan_from_spec(&self, g: &Arc<FiniteGroup>, spec: &PlanSpec) -> Result<Plan> {
        let irreps = self.irreps(g)?;
        let root = self.node_from_spec(&irreps, 0, spec)?;
        Ok(Plan { root })
    }

    fn choose(&self, g: &Arc<FiniteGroup>, strategy: Strategy) -> Result<Choice> {
        let n = g.order();
        let not_applicable = |reason: &str| GdftError::NotApplicable {
            strategy: strategy.name().into(),
            group: g.label().into(),
            reason: reason.into(),
        };
        match strategy {
            Strategy::Naive => Ok(Choice::Naive),
            Strategy::Single => {
                let h = largest_proper_subgroup(g, None)?.ok_or_else(|| not_applicable("no proper subgroup"))?;
                Ok(Choice::Single(h))
            }
            Strategy::Prime => {
                let n = normal_subgroups(g)
                    .into_iter()
                    .rev()
                    .find(|s| s.is_proper() && is_prime(s.index()))
                    .ok_or_else(|| not_applicable("no normal subgroup of prime index"))?;
                Ok(Choice::Prime(n))
            }
            Strategy::Triple => match find_forced_triple(g) {
                Ok(t) => Ok(Choice::Triple(t)),
                Err(GdftError::NoTriple { .. }) => Err(not_applicable("no subgroup triple")),
                Err(e) => Err(e),
            },
            Strategy::Auto => {
                if n <= self.config.base_order {
                    return Ok(Choice::Naive);
                }
                let threshold = (n as f64).powf(1.0 - self.config.epsilon / 2.0);
                let max_index = (n as f64 / threshold).floor() as usize;
                if max_index >= 2 {
                    match largest_proper_subgroup(g, Some(max_index)) {
                        Ok(Some(h)) if h.order() as f64 >= threshold => return Ok(Choice::Single(h)),
                        Ok(_) | Err(GdftError::GroupTooLarge { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
                match find_triple(g) {
                    Ok(TripleSearch::BaseCase) => Ok(Choice::Naive),
                    Ok(TripleSearch::PrimeIndexCase { n }) => Ok(Choice::Prime(n)),
                    Ok(TripleSearch::TripleCase(t)) => Ok(Choice::Triple(t)),
                    Err(GdftError::NoTriple { .. }) | Err(GdftError::GroupTooLarge { .. }) => {
                        log::debug!("{}: no reduction found, using the naive transform", g.label());
                        Ok(Choice::Naive)
                    }
                    Err(e) => Err(e),
                }
            }
        }
    }

    fn node(&self, irreps: &Arc<IrrepSet>, depth: usize, strategy: Strategy) -> Result<PlanNode> {
        let g = irreps.group();
        let choice = self.choose(g, strategy)?;
        self.build(irreps, depth, choice, |planner, child_irreps, _| {
            planner.node(child_irreps, depth + 1, Strategy::Auto)
        })
        .map_err(|e| e.context(format!("planning {} (order {})", g.label(), g.order())))
    }

    fn node_from_spec(&self, irreps: &Arc<IrrepSet>, depth: usize, spec: &PlanSpec) -> Result<PlanNode> {
        let g = irreps.group();
        if spec.order != g.order() {
            return Err(GdftError::Parse(format!(
                "plan node of order {} applied to a group of order {}",
                spec.order,
                g.order()
            )));
        }
        let missing = |what: &str| GdftError::Parse(format!("{} node without {what}", spec.strategy));
        let choice = match spec.strategy {
            Strategy::Auto => return self.node(irreps, depth, Strategy::Auto),
            Strategy::Naive => Choice::Naive,
            Strategy::Single => Choice::Single(Subgroup::new(g, spec.subgroup.clone().ok_or_else(|| missing("subgroup"))?)?),
            Strategy::Prime => Choice::Prime(Subgroup::new(g, spec.subgroup.clone().ok_or_else(|| missing("subgroup"))?)?),
            Strategy::Triple => {
                let t = spec.triple.as_ref().ok_or_else(|| missing("triple"))?;
                Choice::Triple(Triple {
                    n: Subgroup::new(g, t.n.clone())?,
                    h: Subgroup::new(g, t.h.clone())?,
                    k: Subgroup::new(g, t.k.clone())?,
                })
            }
        };
        let expected = match choice {
            Choice::Naive => 0,
            Choice::Single(_) | Choice::Prime(_) => 1,
            Choice::Triple(_) => 2,
        };
        if spec.children.len() != expected && !spec.children.is_empty() {
            return Err(GdftError::Parse(format!(
                "{} node with {} children",
                spec.strategy,
                spec.children.len()
            )));
        }
        self.build(irreps, depth, choice, |planner, child_irreps, i| match spec.children.get(i) {
            Some(c) => planner.node_from_spec(child_irreps, depth + 1, c),
            None => planner.node(child_irreps, depth + 1, Strategy::Auto),
        })
    }

    fn build(
        &self,
        irreps: &Arc<IrrepSet>,
        depth: usize,
        choice: Choice,
        child: impl Fn(&Self, &Arc<IrrepSet>, usize) -> Result<PlanNode>,
    ) -> Result<PlanNode> {
        let g = irreps.group();
        let naive = naive_estimate(irreps);
        let (kind, planned) = match choice {
            Choice::Naive => (NodeKind::Naive, naive),
            Choice::Single(h) => {
                if !h.is_proper() {
                    return Err(GdftError::NotApplicable {
                        strategy: "single".into(),
                        group: g.label().into(),
                        reason: "subgroup is not proper".into(),
                    });
                }
                let small = self.irreps(&Arc::new(h.to_group()))?;
                let plan = SinglePlan::new(restriction_plan(irreps, &h, &small)?);
                let c = child(self, &small, 0)?;
                let est = single_estimate(&plan, c.estimate.planned);
                (NodeKind::Single { plan, child: Box::new(c) }, est)
            }
            Choice::Prime(n) => {
                let small = self.irreps(&Arc::new(n.to_group()))?;
                let plan = PrimePlan::new(restriction_plan(irreps, &n, &small)?)?;
                let c = child(self, &small, 0)?;
                let est = prime_estimate(&plan, c.estimate.planned);
                (NodeKind::PrimeIndex { plan, child: Box::new(c) }, est)
            }
            Choice::Triple(t) => {
                let plan = TriplePlan::build(irreps, &t, &|x| self.irreps(x))?;
                let ch = child(self, &plan.irr_h, 0)?;
                let ck = child(self, &plan.irr_k, 1)?;
                let est = triple_estimate(&plan, ch.estimate.planned, ck.estimate.planned);
                (
                    NodeKind::Triple {
                        plan: Box::new(plan),
                        child_h: Box::new(ch),
                        child_k: Box::new(ck),
                    },
                    est,
                )
            }
        };
        let node = PlanNode {
            irreps: Arc::clone(irreps),
            depth,
            estimate: CostEstimate {
                strategy: Strategy::Naive,
                naive,
                planned,
            },
            kind,
        };
        let strategy = node.strategy();
        Ok(PlanNode {
            estimate: CostEstimate { strategy, ..node.estimate },
            ..node
        })
    }
}

enum Choice {
    Naive,
    Single(Subgroup),
    Prime(Subgroup),
    Triple(Triple),
}

/// Largest proper subgroup, first by element list among equals.
fn largest_proper_subgroup(g: &Arc<FiniteGroup>, max_index: Option<usize>) -> Result<Option<Subgroup>> {
    let subs = all_subgroups(g, max_index)?;
    let best = subs
        .into_iter()
        .filter(|s| s.is_proper())
        .fold(None::<Subgroup>, |best, s| match best {
            Some(b) if b.order() >= s.order() => Some(b),
            _ => Some(s),
        });
    Ok(best)
}

pub fn make_plan(g: &Arc<FiniteGroup>, config: &PlanConfig) -> Result<Plan> {
    Planner::new(config.clone()).plan(g)
}

/// The estimate of the plan `strategy` would produce at the root of `g`.
pub fn estimate_cost(g: &Arc<FiniteGroup>, strategy: Strategy, config: &PlanConfig) -> Result<CostEstimate> {
    let config = PlanConfig {
        strategy,
        ..config.clone()
    };
    Ok(make_plan(g, &config)?.estimate())
}

/// Counts of [`naive_dft`] on a dense input.
pub fn naive_estimate(irreps: &IrrepSet) -> OpCounts {
    let t = irreps.group().order() as u64;
    if t == 1 {
        return OpCounts::default();
    }
    let e = irreps.sum_dim_squares() as u64;
    OpCounts {
        mults: t * e,
        adds: (t - 1) * e,
    }
}

fn product(n: u64, k: u64, m: u64) -> OpCounts {
    OpCounts {
        mults: n * k * m,
        adds: n * k.saturating_sub(1) * m,
    }
}

fn outer(blocks: &[crate::repr::BlockPlan]) -> OpCounts {
    blocks
        .iter()
        .filter(|b| !b.identity)
        .map(|b| {
            let d = b.basis_change.nrows() as u64;
            product(d, d, d) * 2
        })
        .fold(OpCounts::default(), |a, b| a + b)
}

fn single_estimate(plan: &SinglePlan, child: OpCounts) -> OpCounts {
    let rp = &plan.restriction;
    let idx = plan.index() as u64;
    let mut twist = OpCounts::default();
    for (r, bp) in rp.blocks.iter().enumerate() {
        let d = rp.big.get(r).dim() as u64;
        for e in &bp.layout {
            twist = twist + product(e.dim as u64, e.dim as u64, d);
        }
    }
    let acc = OpCounts {
        mults: 0,
        adds: (idx - 1) * rp.big.sum_dim_squares() as u64,
    };
    child * idx + twist * (idx - 1) + acc + outer(&rp.blocks)
}

fn prime_estimate(plan: &PrimePlan, child: OpCounts) -> OpCounts {
    let rp = &plan.restriction;
    let p = plan.p() as u64;
    let mut horner = OpCounts::default();
    for (r, bp) in rp.blocks.iter().enumerate() {
        let d = rp.big.get(r).dim() as u64;
        let nz: u64 = bp.layout.iter().map(|e| (e.dim * e.dim) as u64).sum();
        horner = horner + product(d, d, d) * (p - 1);
        horner.adds += nz * (p - 1);
    }
    child * p + horner + outer(&rp.blocks)
}

fn triple_estimate(plan: &TriplePlan, child_h: OpCounts, child_k: OpCounts) -> OpCounts {
    let n = plan.irr_n.group().order() as u64;
    let mut sparse = OpCounts::default();
    if n > 1 {
        for sources in &plan.labeling.sources {
            let e: u64 = sources
                .iter()
                .map(|&(sigma, _, _)| {
                    let sc = plan.clifford.sigma[sigma];
                    (plan.clifford.orbits[sc.orbit].len() * sc.d * sc.d) as u64
                })
                .sum();
            sparse.mults += e + n * e;
            sparse.adds += n * e.saturating_sub(1);
        }
    }
    let y = plan.y_reps.len() as u64;
    let occupied = plan.occupied() as u64;
    let (lm, la) = plan.lift.estimated_ops();
    let per_rep = child_h * y + sparse * y + child_k * occupied + OpCounts { mults: lm, adds: la };
    let c = plan.cover.len() as u64;
    let mut translate = OpCounts::default();
    for &d in &plan.irr_g.dims() {
        translate = translate + product(d as u64, d as u64, d as u64);
    }
    let translates = plan.cover.iter().filter(|&&t| t != 0).count() as u64;
    let acc = OpCounts {
        mults: 0,
        adds: (c - 1) * plan.irr_g.sum_dim_squares() as u64,
    };
    per_rep * c + translate * translates + acc
}

/// One executed node: inclusive counts, with the per-stage breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub path: String,
    pub group: String,
    pub order: usize,
    pub strategy: Strategy,
    /// Recursive transforms requested by this node.
    pub calls: usize,
    pub cmul: u64,
    pub cadd: u64,
    pub stages: BTreeMap<String, OpCounts>,
    /// Triple-subgroup nodes: repetitions, transform counts and format sizes.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub counts: BTreeMap<String, usize>,
    pub micros: u128,
}

type Tracer = Mutex<Vec<TraceEvent>>;

pub fn execute_plan(plan: &Plan, alpha: &GroupAlgebraElement, ops: &OpCounter) -> Result<BlockDiagonal> {
    check_root(plan, alpha)?;
    execute_node(&plan.root, alpha, ops, None, "root")
}

/// [`execute_plan`] that also returns one event per executed node, in
/// completion order.
pub fn execute_plan_traced(
    plan: &Plan,
    alpha: &GroupAlgebraElement,
    ops: &OpCounter,
) -> Result<(BlockDiagonal, Vec<TraceEvent>)> {
    check_root(plan, alpha)?;
    let tracer = Mutex::new(Vec::new());
    let out = execute_node(&plan.root, alpha, ops, Some(&tracer), "root")?;
    Ok((out, tracer.into_inner().expect("trace poisoned")))
}

fn check_root(plan: &Plan, alpha: &GroupAlgebraElement) -> Result<()> {
    let (a, g) = (alpha.group(), plan.group());
    if !Arc::ptr_eq(a, g) && (a.order() != g.order() || a.table_hash() != g.table_hash()) {
        return Err(GdftError::GroupMismatch(format!(
            "input over {} but plan over {}",
            a.label(),
            g.label()
        )));
    }
    Ok(())
}

fn recursion<'a>(
    child: &'a PlanNode,
    tracer: Option<&'a Tracer>,
    path: String,
) -> impl Fn(&GroupAlgebraElement, &OpCounter) -> Result<BlockDiagonal> + Sync + 'a {
    move |beta, ops| execute_node(child, beta, ops, tracer, &path)
}

fn execute_node(
    node: &PlanNode,
    alpha: &GroupAlgebraElement,
    parent: &OpCounter,
    tracer: Option<&Tracer>,
    path: &str,
) -> Result<BlockDiagonal> {
    let start = Instant::now();
    let local = OpCounter::new();
    let recurse = |child, tag| recursion(child, tracer, format!("{path}/{tag}"));
    let mut counts = BTreeMap::new();
    let (out, calls) = match &node.kind {
        NodeKind::Naive => (naive_dft(alpha, &node.irreps, &local.tagged("naive"))?, 0),
        NodeKind::Single { plan, child } => {
            single_subgroup_dft(alpha, plan, &recurse(child, "h"), &local.tagged("single"))?
        }
        NodeKind::PrimeIndex { plan, child } => {
            prime_index_dft(alpha, plan, &recurse(child, "n"), &local.tagged("prime"))?
        }
        NodeKind::Triple { plan, child_h, child_k } => {
            let (f, stats) = triple_subgroup_dft(
                alpha,
                plan,
                &recurse(child_h, "h"),
                &recurse(child_k, "k"),
                &local.tagged("triple"),
            )?;
            let (reps, h, inv_n, k) = stats.get();
            counts = BTreeMap::from([
                ("repetitions".to_string(), reps),
                ("h_dfts".to_string(), h),
                ("inverse_n_dfts".to_string(), inv_n),
                ("k_dfts".to_string(), k),
                ("y".to_string(), plan.y_reps.len()),
                ("r".to_string(), plan.r()),
                ("occupied".to_string(), plan.occupied()),
            ]);
            (f, h + k)
        }
    };
    let g = node.group();
    let out_err = |e: GdftError| e.context(format!("{path}: {} on {}", node.strategy(), g.label()));
    out.check_dims(&node.irreps).map_err(out_err)?;
    let stages: BTreeMap<String, OpCounts> = local.by_tag().into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    for (tag, c) in local.by_tag() {
        parent.tagged(tag).record(c.mults, c.adds);
    }
    if let Some(t) = tracer {
        let total = local.snapshot();
        t.lock().expect("trace poisoned").push(TraceEvent {
            path: path.to_string(),
            group: g.label().to_string(),
            order: g.order(),
            strategy: node.strategy(),
            calls,
            cmul: total.mults,
            cadd: total.adds,
            stages,
            counts,
            micros: start.elapsed().as_micros(),
        });
    }
    Ok(out)
}
