//! Math corpus structuring: three-axis tagging, the domain x conceptual x
//! reasoning grid, and gap-filling synthesis planning.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Role, Sample};

/// Coarse mathematical domain (seven-way).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Domain {
    Algebra,
    GeometryTopology,
    Analysis,
    ProbabilityStatistics,
    AppliedMathematics,
    DiscreteMathematics,
    Others,
}

impl Domain {
    pub const ALL: [Domain; 7] = [
        Domain::Algebra,
        Domain::GeometryTopology,
        Domain::Analysis,
        Domain::ProbabilityStatistics,
        Domain::AppliedMathematics,
        Domain::DiscreteMathematics,
        Domain::Others,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Domain::Algebra => "Algebra",
            Domain::GeometryTopology => "GeometryTopology",
            Domain::Analysis => "Analysis",
            Domain::ProbabilityStatistics => "ProbabilityStatistics",
            Domain::AppliedMathematics => "AppliedMathematics",
            Domain::DiscreteMathematics => "DiscreteMathematics",
            Domain::Others => "Others",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|d| d.name() == text)
    }
}

/// Conceptual level: the knowledge tier a problem assumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Conceptual {
    Elementary,
    MiddleSchool,
    HighSchool,
    Undergraduate,
    Graduate,
    AdvancedResearch,
}

impl Conceptual {
    pub const ALL: [Conceptual; 6] = [
        Conceptual::Elementary,
        Conceptual::MiddleSchool,
        Conceptual::HighSchool,
        Conceptual::Undergraduate,
        Conceptual::Graduate,
        Conceptual::AdvancedResearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Conceptual::Elementary => "Elementary",
            Conceptual::MiddleSchool => "MiddleSchool",
            Conceptual::HighSchool => "HighSchool",
            Conceptual::Undergraduate => "Undergraduate",
            Conceptual::Graduate => "Graduate",
            Conceptual::AdvancedResearch => "AdvancedResearch",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == text)
    }
}

/// Reasoning depth: structural complexity of the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Reasoning {
    Shallow,
    Moderate,
    Deep,
    ExtremelyHard,
}

impl Reasoning {
    pub const ALL: [Reasoning; 4] = [
        Reasoning::Shallow,
        Reasoning::Moderate,
        Reasoning::Deep,
        Reasoning::ExtremelyHard,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Reasoning::Shallow => "Shallow",
            Reasoning::Moderate => "Moderate",
            Reasoning::Deep => "Deep",
            Reasoning::ExtremelyHard => "ExtremelyHard",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|r| r.name() == text)
    }
}

/// The three tags, always set together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MathMeta {
    pub domain: Domain,
    pub conceptual: Conceptual,
    pub reasoning: Reasoning,
}

/// One cell of the tagging grid.
pub type Cell = (Domain, Conceptual, Reasoning);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MathError {
    #[error("sample `{0}` is flagged as non-math")]
    WrongDomain(String),
    #[error("sample `{0}` is missing math tags")]
    Untagged(String),
    #[error("tagger failed on `{id}`: {detail}")]
    TaggerFailure { id: String, detail: String },
}

/// Pluggable tagger; the default is deterministic keyword/structure rules.
pub trait MathTagger {
    fn tag(&self, sample: &Sample) -> Result<MathMeta, MathError>;
}

impl<F: Fn(&Sample) -> Result<MathMeta, MathError>> MathTagger for F {
    fn tag(&self, sample: &Sample) -> Result<MathMeta, MathError> {
        self(sample)
    }
}

/// Tags one sample with the supplied tagger.
pub fn tag_math(sample: &Sample, tagger: &dyn MathTagger) -> Result<MathMeta, MathError> {
    tagger.tag(sample)
}

/// Default deterministic tagger.
///
/// Domain comes from weighted keyword scoring (ties resolved by the domain
/// declaration order); conceptual level likewise. Reasoning depth counts
/// step markers in the solution text: <=2 Shallow, 3-5 Moderate, 6-9 Deep,
/// >=10 ExtremelyHard, and Moderate when no step-marked solution exists.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleTagger;

impl MathTagger for RuleTagger {
    fn tag(&self, sample: &Sample) -> Result<MathMeta, MathError> {
        if sample.meta.get("math").and_then(|v| v.as_bool()) == Some(false) {
            return Err(MathError::WrongDomain(sample.id.clone()));
        }
        let problem = problem_text(sample);
        let solution = solution_text(sample);
        Ok(MathMeta {
            domain: classify_domain(&problem),
            conceptual: classify_conceptual(&problem),
            reasoning: classify_reasoning(&solution),
        })
    }
}

fn problem_text(sample: &Sample) -> String {
    let user = sample.role_text(Role::User);
    if user.is_empty() {
        sample.full_text()
    } else {
        user
    }
}

fn solution_text(sample: &Sample) -> String {
    if let Some(sol) = sample.meta_str("solution") {
        return sol.to_string();
    }
    sample.role_text(Role::Assistant)
}

const DOMAIN_KEYWORDS: [(Domain, &[&str]); 6] = [
    (
        Domain::Algebra,
        &[
            "polynomial", "equation", "matrix", "matrices", "determinant", "eigen", "group",
            "ring", "field extension", "linear system", "quadratic", "factor", "algebra",
        ],
    ),
    (
        Domain::GeometryTopology,
        &[
            "triangle", "circle", "angle", "polygon", "geometry", "topolog", "manifold",
            "perimeter", "area of", "volume of", "sphere", "congruent", "tangent line",
        ],
    ),
    (
        Domain::Analysis,
        &[
            "integral", "derivative", "limit", "continuity", "converge", "series", "differentiable",
            "epsilon", "sup", "infimum", "measure", "fourier",
        ],
    ),
    (
        Domain::ProbabilityStatistics,
        &[
            "probability", "random", "dice", "expected value", "variance", "distribution",
            "statistic", "sample mean", "bayes", "coin", "drawn", "drawing",
        ],
    ),
    (
        Domain::AppliedMathematics,
        &[
            "differential equation", "optimize", "optimization", "model", "physics", "velocity",
            "numerical", "interest rate", "population growth", "engineering",
        ],
    ),
    (
        Domain::DiscreteMathematics,
        &[
            "graph", "combinator", "permutation", "subset", "counting", "modular", "recurrence",
            "pigeonhole", "boolean", "lattice", "tournament", "induction",
        ],
    ),
];

fn classify_domain(problem: &str) -> Domain {
    let lower = lowercase(problem);
    let mut best = Domain::Others;
    let mut best_score = 0usize;
    for (domain, keywords) in DOMAIN_KEYWORDS {
        let score = keywords.iter().filter(|k| lower.contains(*k)).count();
        if score > best_score {
            best = domain;
            best_score = score;
        }
    }
    best
}

const CONCEPTUAL_KEYWORDS: [(Conceptual, &[&str]); 6] = [
    (
        Conceptual::AdvancedResearch,
        &["conjecture", "open problem", "research", "novel proof"],
    ),
    (
        Conceptual::Graduate,
        &[
            "cohomology", "banach", "hilbert space", "measure-theoretic", "galois", "functor",
            "stochastic process", "manifold",
        ],
    ),
    (
        Conceptual::Undergraduate,
        &[
            "eigenvalue", "vector space", "epsilon-delta", "real analysis", "abstract algebra",
            "linear algebra", "multivariable", "proof by induction", "integral", "derivative",
        ],
    ),
    (
        Conceptual::HighSchool,
        &[
            "quadratic", "trigonometry", "logarithm", "polynomial", "probability", "function",
            "geometry proof", "sine", "cosine",
        ],
    ),
    (
        Conceptual::MiddleSchool,
        &["fraction", "percent", "ratio", "negative number", "proportion", "decimal"],
    ),
    (
        Conceptual::Elementary,
        &["add", "subtract", "apples", "candies", "how many in total", "count the"],
    ),
];

fn classify_conceptual(problem: &str) -> Conceptual {
    let lower = lowercase(problem);
    // Highest tier with a hit wins; tiers are checked from the top down.
    for (level, keywords) in CONCEPTUAL_KEYWORDS {
        if keywords.iter().any(|k| lower.contains(*k)) {
            return level;
        }
    }
    Conceptual::HighSchool
}

fn classify_reasoning(solution: &str) -> Reasoning {
    match count_steps(solution) {
        None => Reasoning::Moderate,
        Some(n) if n <= 2 => Reasoning::Shallow,
        Some(n) if n <= 5 => Reasoning::Moderate,
        Some(n) if n <= 9 => Reasoning::Deep,
        Some(_) => Reasoning::ExtremelyHard,
    }
}

/// Counts explicit step markers: lines opening with `Step N` or an `N.`/`N)`
/// ordinal. Returns `None` when the solution carries no markers at all.
fn count_steps(solution: &str) -> Option<usize> {
    let mut count = 0usize;
    for line in solution.lines() {
        let t = line.trim_start();
        let lower = lowercase(t);
        if lower.starts_with("step ") || lower.starts_with("step:") {
            count += 1;
            continue;
        }
        let digits = t.chars().take_while(|c| c.is_ascii_digit()).count();
        if digits > 0 {
            let rest = &t[digits..];
            if rest.starts_with('.') || rest.starts_with(')') {
                count += 1;
            }
        }
    }
    if count == 0 {
        None
    } else {
        Some(count)
    }
}

fn lowercase(text: &str) -> String {
    text.chars().flat_map(|c| c.to_lowercase()).collect()
}

/// Exact cell counts plus derived marginals.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GridDistribution {
    pub cells: BTreeMap<Cell, usize>,
    pub total: usize,
}

impl GridDistribution {
    pub fn cell(&self, cell: Cell) -> usize {
        self.cells.get(&cell).copied().unwrap_or(0)
    }

    pub fn domain_marginal(&self, domain: Domain) -> usize {
        self.cells
            .iter()
            .filter(|((d, _, _), _)| *d == domain)
            .map(|(_, &c)| c)
            .sum()
    }

    pub fn conceptual_marginal(&self, level: Conceptual) -> usize {
        self.cells
            .iter()
            .filter(|((_, c, _), _)| *c == level)
            .map(|(_, &c)| c)
            .sum()
    }

    pub fn reasoning_marginal(&self, depth: Reasoning) -> usize {
        self.cells
            .iter()
            .filter(|((_, _, r), _)| *r == depth)
            .map(|(_, &c)| c)
            .sum()
    }

    pub fn pair_marginal(&self, domain: Domain, level: Conceptual) -> usize {
        self.cells
            .iter()
            .filter(|((d, c, _), _)| *d == domain && *c == level)
            .map(|(_, &c)| c)
            .sum()
    }
}

/// Builds the grid from `(id, MathMeta)` pairs produced by tagging.
pub fn grid_distribution(tagged: &[(String, MathMeta)]) -> GridDistribution {
    let mut grid = GridDistribution::default();
    for (_, meta) in tagged {
        *grid
            .cells
            .entry((meta.domain, meta.conceptual, meta.reasoning))
            .or_insert(0) += 1;
        grid.total += 1;
    }
    grid
}

/// Reads `MathMeta` back out of sample metadata, erroring on untagged ids.
pub fn require_tags(samples: &[Sample]) -> Result<Vec<(String, MathMeta)>, MathError> {
    samples
        .iter()
        .map(|s| {
            let get = |key: &str| {
                s.meta_str(key)
                    .ok_or_else(|| MathError::Untagged(s.id.clone()))
            };
            let domain = Domain::parse(get("math_domain")?)
                .ok_or_else(|| MathError::Untagged(s.id.clone()))?;
            let conceptual = Conceptual::parse(get("math_conceptual")?)
                .ok_or_else(|| MathError::Untagged(s.id.clone()))?;
            let reasoning = Reasoning::parse(get("math_reasoning")?)
                .ok_or_else(|| MathError::Untagged(s.id.clone()))?;
            Ok((
                s.id.clone(),
                MathMeta {
                    domain,
                    conceptual,
                    reasoning,
                },
            ))
        })
        .collect()
}

/// Target counts for planning: per cell, or per bucket of a single axis.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    PerCell(BTreeMap<Cell, usize>),
    PerDomain(BTreeMap<Domain, usize>),
    PerConceptual(BTreeMap<Conceptual, usize>),
    PerReasoning(BTreeMap<Reasoning, usize>),
}

/// One planned synthesis quota.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanEntry {
    pub cell: Cell,
    pub current: usize,
    pub target: usize,
    pub quota: usize,
    /// Generation stub: the cell plus required concepts and reasoning depth,
    /// ready for an external generator.
    pub prompt_stub: String,
}

/// Quotas ordered by priority then deficit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SynthesisPlan {
    pub entries: Vec<PlanEntry>,
}

/// Domains boosted by default when planning.
pub const PRIORITY_DOMAINS: [Domain; 3] = [
    Domain::GeometryTopology,
    Domain::AppliedMathematics,
    Domain::DiscreteMathematics,
];

fn prompt_stub(cell: Cell, quota: usize) -> String {
    let (domain, conceptual, reasoning) = cell;
    alloc::format!(
        "generate {quota} problem-solution pairs | domain={} | concepts at {} level | {} multi-step reasoning, step-by-step solution required",
        domain.name(),
        conceptual.name(),
        reasoning.name()
    )
}

/// Expands a target spec into per-cell targets.
///
/// Axis-level targets spread each bucket's count uniformly over the bucket's
/// cells (largest-remainder, cells in enum order), so executing the plan
/// meets the axis marginal exactly.
fn per_cell_targets(spec: &TargetSpec) -> BTreeMap<Cell, usize> {
    fn spread(cells: Vec<Cell>, total: usize, out: &mut BTreeMap<Cell, usize>) {
        let n = cells.len();
        let base = total / n;
        let extra = total % n;
        for (i, cell) in cells.into_iter().enumerate() {
            out.insert(cell, base + usize::from(i < extra));
        }
    }
    let mut targets = BTreeMap::new();
    match spec {
        TargetSpec::PerCell(map) => {
            targets = map.clone();
        }
        TargetSpec::PerDomain(map) => {
            for (&domain, &total) in map {
                let cells = Conceptual::ALL
                    .iter()
                    .flat_map(|&c| Reasoning::ALL.iter().map(move |&r| (domain, c, r)))
                    .collect();
                spread(cells, total, &mut targets);
            }
        }
        TargetSpec::PerConceptual(map) => {
            for (&level, &total) in map {
                let cells = Domain::ALL
                    .iter()
                    .flat_map(|&d| Reasoning::ALL.iter().map(move |&r| (d, level, r)))
                    .collect();
                spread(cells, total, &mut targets);
            }
        }
        TargetSpec::PerReasoning(map) => {
            for (&depth, &total) in map {
                let cells = Domain::ALL
                    .iter()
                    .flat_map(|&d| Conceptual::ALL.iter().map(move |&c| (d, c, depth)))
                    .collect();
                spread(cells, total, &mut targets);
            }
        }
    }
    targets
}

/// Plans gap-filling quotas: positive deficits only, ranked by (priority
/// domain, conceptual >= Undergraduate, reasoning >= Deep, deficit fraction
/// descending, cell enum order).
pub fn plan_gap_fill(
    grid: &GridDistribution,
    targets: &TargetSpec,
    priority_domains: &[Domain],
) -> SynthesisPlan {
    let per_cell = per_cell_targets(targets);
    let mut entries: Vec<PlanEntry> = per_cell
        .into_iter()
        .filter_map(|(cell, target)| {
            let current = grid.cell(cell);
            let quota = target.saturating_sub(current);
            if quota == 0 {
                return None;
            }
            Some(PlanEntry {
                cell,
                current,
                target,
                quota,
                prompt_stub: prompt_stub(cell, quota),
            })
        })
        .collect();

    let rank = |e: &PlanEntry| {
        let (domain, conceptual, reasoning) = e.cell;
        (
            priority_domains.contains(&domain),
            conceptual >= Conceptual::Undergraduate,
            reasoning >= Reasoning::Deep,
        )
    };
    entries.sort_by(|a, b| {
        let (pa, ua, da) = rank(a);
        let (pb, ub, db) = rank(b);
        pb.cmp(&pa)
            .then(ub.cmp(&ua))
            .then(db.cmp(&da))
            // Deficit fraction quota/target descending, compared as exact
            // cross products to avoid float ties.
            .then_with(|| (b.quota * a.target).cmp(&(a.quota * b.target)))
            .then_with(|| a.cell.cmp(&b.cell))
    });
    SynthesisPlan { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DefaultLength, Message, MetaMap};
    use alloc::format;
    use alloc::vec;

    fn math_sample(problem: &str, solution: &str) -> Sample {
        Sample::new(
            "m1",
            "src",
            vec![
                Message::new(Role::User, problem),
                Message::new(Role::Assistant, solution),
            ],
            MetaMap::new(),
            &DefaultLength,
        )
    }

    #[test]
    fn probability_two_step_is_shallow() {
        let s = math_sample(
            "What is the probability of drawing two aces from a deck?",
            "1. Compute the chance of the first ace.\n2. Multiply by the second draw.",
        );
        let meta = tag_math(&s, &RuleTagger).unwrap();
        assert_eq!(meta.domain, Domain::ProbabilityStatistics);
        assert_eq!(meta.reasoning, Reasoning::Shallow);
    }

    #[test]
    fn no_solution_defaults_to_moderate() {
        let s = math_sample("Solve the quadratic equation x^2 - 4 = 0.", "");
        let meta = tag_math(&s, &RuleTagger).unwrap();
        assert_eq!(meta.reasoning, Reasoning::Moderate);
    }

    #[test]
    fn twelve_steps_is_extremely_hard() {
        let steps: String = (1..=12).map(|i| format!("{i}. do part {i}\n")).collect();
        let s = math_sample("Prove the identity by induction on subsets.", &steps);
        let meta = tag_math(&s, &RuleTagger).unwrap();
        assert_eq!(meta.reasoning, Reasoning::ExtremelyHard);
    }

    #[test]
    fn non_math_flag_errors() {
        let mut s = math_sample("some code question", "");
        s.meta.insert("math".to_string(), serde_json::Value::Bool(false));
        assert_eq!(
            tag_math(&s, &RuleTagger),
            Err(MathError::WrongDomain("m1".to_string()))
        );
    }

    #[test]
    fn tagger_is_deterministic() {
        let s = math_sample("Evaluate the integral of x^2 over [0,1].", "Step 1: antiderivative.\nStep 2: evaluate.\nStep 3: done.");
        let a = tag_math(&s, &RuleTagger).unwrap();
        let b = tag_math(&s, &RuleTagger).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.domain, Domain::Analysis);
        assert_eq!(a.reasoning, Reasoning::Moderate);
    }

    fn meta(d: Domain, c: Conceptual, r: Reasoning) -> MathMeta {
        MathMeta {
            domain: d,
            conceptual: c,
            reasoning: r,
        }
    }

    #[test]
    fn empty_grid() {
        let grid = grid_distribution(&[]);
        assert_eq!(grid.total, 0);
        assert_eq!(grid.domain_marginal(Domain::Algebra), 0);
    }

    #[test]
    fn one_per_domain_marginals() {
        let tagged: Vec<(String, MathMeta)> = Domain::ALL
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                (
                    format!("s{i}"),
                    meta(d, Conceptual::HighSchool, Reasoning::Moderate),
                )
            })
            .collect();
        let grid = grid_distribution(&tagged);
        assert_eq!(grid.total, 7);
        for d in Domain::ALL {
            assert_eq!(grid.domain_marginal(d), 1);
        }
        assert_eq!(grid.conceptual_marginal(Conceptual::HighSchool), 7);
    }

    #[test]
    fn grid_conservation_and_hand_tally() {
        let mut tagged = Vec::new();
        for i in 0..60 {
            tagged.push((
                format!("a{i}"),
                meta(Domain::Algebra, Conceptual::HighSchool, Reasoning::Shallow),
            ));
        }
        for i in 0..30 {
            tagged.push((
                format!("g{i}"),
                meta(
                    Domain::GeometryTopology,
                    Conceptual::Undergraduate,
                    Reasoning::Deep,
                ),
            ));
        }
        for i in 0..10 {
            tagged.push((
                format!("d{i}"),
                meta(
                    Domain::DiscreteMathematics,
                    Conceptual::Graduate,
                    Reasoning::ExtremelyHard,
                ),
            ));
        }
        let grid = grid_distribution(&tagged);
        assert_eq!(grid.total, 100);
        assert_eq!(
            grid.cell((Domain::Algebra, Conceptual::HighSchool, Reasoning::Shallow)),
            60
        );
        assert_eq!(grid.domain_marginal(Domain::GeometryTopology), 30);
        assert_eq!(grid.reasoning_marginal(Reasoning::ExtremelyHard), 10);
        assert_eq!(
            grid.pair_marginal(Domain::GeometryTopology, Conceptual::Undergraduate),
            30
        );
        let cell_sum: usize = grid.cells.values().sum();
        assert_eq!(cell_sum, grid.total);
    }

    #[test]
    fn untagged_sample_errors_with_id() {
        let s = math_sample("x", "y");
        assert_eq!(require_tags(&[s]), Err(MathError::Untagged("m1".to_string())));
    }

    #[test]
    fn met_targets_yield_empty_plan() {
        let cell = (Domain::Algebra, Conceptual::HighSchool, Reasoning::Shallow);
        let tagged: Vec<(String, MathMeta)> = (0..5)
            .map(|i| (format!("s{i}"), meta(cell.0, cell.1, cell.2)))
            .collect();
        let grid = grid_distribution(&tagged);
        let targets = TargetSpec::PerCell([(cell, 5)].into_iter().collect());
        let plan = plan_gap_fill(&grid, &targets, &PRIORITY_DOMAINS);
        assert!(plan.entries.is_empty());
    }

    #[test]
    fn priority_domain_ranks_first_on_equal_deficit() {
        let geometry = (
            Domain::GeometryTopology,
            Conceptual::Undergraduate,
            Reasoning::Deep,
        );
        let algebra = (Domain::Algebra, Conceptual::Undergraduate, Reasoning::Deep);
        let mut tagged = Vec::new();
        for i in 0..10 {
            tagged.push((format!("g{i}"), meta(geometry.0, geometry.1, geometry.2)));
            tagged.push((format!("a{i}"), meta(algebra.0, algebra.1, algebra.2)));
        }
        let grid = grid_distribution(&tagged);
        let targets =
            TargetSpec::PerCell([(geometry, 50), (algebra, 50)].into_iter().collect());
        let plan = plan_gap_fill(&grid, &targets, &PRIORITY_DOMAINS);
        assert_eq!(plan.entries.len(), 2);
        assert_eq!(plan.entries[0].cell, geometry);
        assert_eq!(plan.entries[0].quota, 40);
        assert_eq!(plan.entries[1].cell, algebra);
    }

    #[test]
    fn equal_priority_ties_break_by_enum_order() {
        let c1 = (Domain::Algebra, Conceptual::Elementary, Reasoning::Shallow);
        let c2 = (Domain::Analysis, Conceptual::Elementary, Reasoning::Shallow);
        let grid = GridDistribution::default();
        let targets = TargetSpec::PerCell([(c1, 10), (c2, 10)].into_iter().collect());
        let plan = plan_gap_fill(&grid, &targets, &PRIORITY_DOMAINS);
        assert_eq!(plan.entries[0].cell, c1);
        assert_eq!(plan.entries[1].cell, c2);
    }

    #[test]
    fn plan_completeness_per_cell() {
        let cell = (
            Domain::AppliedMathematics,
            Conceptual::Graduate,
            Reasoning::Deep,
        );
        let tagged: Vec<(String, MathMeta)> = (0..3)
            .map(|i| (format!("s{i}"), meta(cell.0, cell.1, cell.2)))
            .collect();
        let mut grid = grid_distribution(&tagged);
        let targets = TargetSpec::PerCell([(cell, 9)].into_iter().collect());
        let plan = plan_gap_fill(&grid, &targets, &PRIORITY_DOMAINS);
        // Execute the plan: add quota placeholders, then re-check targets.
        for entry in &plan.entries {
            *grid.cells.entry(entry.cell).or_insert(0) += entry.quota;
            grid.total += entry.quota;
        }
        assert_eq!(grid.cell(cell), 9);
    }

    #[test]
    fn axis_target_spreads_and_meets_marginal() {
        let grid = GridDistribution::default();
        let targets =
            TargetSpec::PerDomain([(Domain::DiscreteMathematics, 50)].into_iter().collect());
        let plan = plan_gap_fill(&grid, &targets, &PRIORITY_DOMAINS);
        let planned: usize = plan.entries.iter().map(|e| e.quota).sum();
        assert_eq!(planned, 50);
        assert!(plan
            .entries
            .iter()
            .all(|e| e.cell.0 == Domain::DiscreteMathematics));
    }

    #[test]
    fn stub_names_cell_and_depth() {
        let grid = GridDistribution::default();
        let cell = (
            Domain::GeometryTopology,
            Conceptual::Undergraduate,
            Reasoning::Deep,
        );
        let targets = TargetSpec::PerCell([(cell, 3)].into_iter().collect());
        let plan = plan_gap_fill(&grid, &targets, &PRIORITY_DOMAINS);
        let stub = &plan.entries[0].prompt_stub;
        assert!(stub.contains("GeometryTopology"));
        assert!(stub.contains("Undergraduate"));
        assert!(stub.contains("Deep"));
        assert!(stub.contains("3"));
    }
}
