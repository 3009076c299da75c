//! Named constructions: the forced-last gadget, coded chains of it, the
//! c(n) join-meet towers and complete binary tree digraphs.

use std::collections::BTreeSet;

use crate::digraph::{digraph_from_ordering, r_distance, HfDigraph};
use crate::error::{PlaneError, Result};
use crate::openness::{count_hf_orderings, count_hf_prefixes, validate_hf_ordering, HfOrdering};
use crate::plane::{ElementId, PartialPlane, PlaneBuilder, Sort};
use crate::DEFAULT_ELEMENT_BUDGET;

/// Longest supported coded chain.
pub const MAX_CHAIN_LENGTH: usize = 64;

/// Largest supported parameter of [`build_c_gadget`].
pub const MAX_C_GADGET_N: u32 = 6;

/// A constructed gadget: its plane, the base it extends, the construction
/// ordering, a printable incidence table and named self-checks.
#[derive(Debug, Clone)]
pub struct GadgetResult {
    pub plane: PartialPlane,
    pub base: BTreeSet<ElementId>,
    pub ordering: HfOrdering,
    pub table: String,
    pub certificates: Vec<(String, bool)>,
}

fn join(b: &mut PlaneBuilder, x: ElementId, y: ElementId, label: &str) -> Result<ElementId> {
    if let Some(l) = b.plane_view().joining_line(x, y) {
        return Err(PlaneError::BaseNotIndependent(format!(
            "{:?} and {:?} are already joined by {:?}",
            b.label(x),
            b.label(y),
            b.label(l)
        )));
    }
    let l = b.add_line(label)?;
    b.add_incidence_unchecked(x, l);
    b.add_incidence_unchecked(y, l);
    Ok(l)
}

fn meet(b: &mut PlaneBuilder, k: ElementId, l: ElementId, label: &str) -> Result<ElementId> {
    if let Some(p) = b.plane_view().meet_point(k, l) {
        return Err(PlaneError::BaseNotIndependent(format!(
            "{:?} and {:?} already meet in {:?}",
            b.label(k),
            b.label(l),
            b.label(p)
        )));
    }
    let p = b.add_point(label)?;
    b.add_incidence_unchecked(p, k);
    b.add_incidence_unchecked(p, l);
    Ok(p)
}

struct Block {
    points: [ElementId; 4],
    lines: [ElementId; 4],
}

struct StageLabels {
    lines: [String; 12],
    bs: [String; 4],
    cs: [String; 3],
    a_out: String,
}

/// Runs one forced-last stage over a block, seeded by a point.
///
/// Adds 20 elements: four lines joining the seed to the block points, four
/// b-points meeting those on the block lines, six lines pairing the
/// b-points, three c-points on those, and two lines whose meet is the
/// output point.
fn run_stage(
    b: &mut PlaneBuilder,
    block: &Block,
    seed: ElementId,
    labels: &StageLabels,
) -> Result<(Vec<ElementId>, ElementId)> {
    let mut order = Vec::with_capacity(20);
    let mut bs = [seed; 4];
    for i in 0..4 {
        let l = join(b, block.points[i], seed, &labels.lines[i])?;
        order.push(l);
        let p = meet(b, block.lines[i], l, &labels.bs[i])?;
        order.push(p);
        bs[i] = p;
    }
    let pairs = [(0, 1), (2, 3), (0, 2), (1, 3), (1, 2), (0, 3)];
    let mut rails = [seed; 6];
    let mut cs = [seed; 3];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let l = join(b, bs[i], bs[j], &labels.lines[4 + k])?;
        order.push(l);
        rails[k] = l;
        if k % 2 == 1 {
            let c = meet(b, rails[k - 1], rails[k], &labels.cs[k / 2])?;
            order.push(c);
            cs[k / 2] = c;
        }
    }
    let l14 = join(b, seed, cs[0], &labels.lines[10])?;
    order.push(l14);
    let l15 = join(b, cs[1], cs[2], &labels.lines[11])?;
    order.push(l15);
    let a_out = meet(b, l14, l15, &labels.a_out)?;
    order.push(a_out);
    Ok((order, a_out))
}

/// The 21-element gadget over four points and four lines in general
/// position whose final point is last in every hyper-free ordering.
pub fn build_superstability_gadget() -> GadgetResult {
    let mut b = PlaneBuilder::new();
    let points = std::array::from_fn(|i| {
        b.add_point(&format!("p'{i}")).expect("fresh base point")
    });
    let lines = std::array::from_fn(|i| {
        b.add_line(&format!("l'{i}")).expect("fresh base line")
    });
    let block = Block { points, lines };
    let seed = b.add_point("a1").expect("fresh seed");
    let labels = StageLabels {
        lines: std::array::from_fn(|i| format!("l'{}", i + 4)),
        bs: std::array::from_fn(|i| format!("b{i}")),
        cs: std::array::from_fn(|i| format!("c{i}")),
        a_out: "a0".to_string(),
    };
    let (stage_order, a0) = run_stage(&mut b, &block, seed, &labels).expect("stage over a free block");
    let plane = b.finish_unchecked();
    let base: BTreeSet<ElementId> = block.points.iter().chain(&block.lines).copied().collect();
    let mut sequence = vec![seed];
    sequence.extend(stage_order);
    let ordering =
        validate_hf_ordering(&plane, &base, &sequence).expect("construction order is hyper-free");
    let mut rows: Vec<ElementId> = block.points.to_vec();
    rows.push(seed);
    for &e in &ordering.sequence {
        if e.sort == Sort::Point && e != seed {
            rows.push(e);
        }
    }
    let cols: Vec<ElementId> = plane.lines().collect();
    let table = plane.incidence_table(&rows, &cols).expect("table over own elements");
    let forced = verify_forced_last(&plane, &base, a0);
    let certificates = vec![
        ("valid_hf_ordering".to_string(), true),
        ("forced_last".to_string(), forced),
    ];
    GadgetResult { plane, base, ordering, table, certificates }
}

/// Degree certificate that `last` must close every hyper-free ordering of
/// the plane over the base: every other non-base element is incident with
/// at least three elements, so none of them can be final.
///
/// Vacuous single-element extensions report false.
pub fn verify_forced_last(
    plane: &PartialPlane,
    base: &BTreeSet<ElementId>,
    last: ElementId,
) -> bool {
    if !plane.contains(last) || base.contains(&last) {
        return false;
    }
    let others: Vec<ElementId> = plane
        .elements()
        .filter(|e| !base.contains(e) && *e != last)
        .collect();
    !others.is_empty() && others.iter().all(|&e| plane.degree(e) >= 3)
}

/// Exhaustive version of the forced-last check via ordering counts: the
/// number of hyper-free orderings equals the number that end with `last`
/// exactly when no ordering puts `last` anywhere else.
pub fn forced_last_exhaustive(
    plane: &PartialPlane,
    base: &BTreeSet<ElementId>,
    last: ElementId,
) -> Result<bool> {
    if !plane.contains(last) || base.contains(&last) || plane.degree(last) > 2 {
        return Ok(false);
    }
    let all = count_hf_orderings(plane, base)?;
    let without: BTreeSet<ElementId> = plane
        .elements()
        .filter(|e| !base.contains(e) && *e != last)
        .collect();
    let ending_with_last = count_hf_prefixes(plane, base, &without)?;
    Ok(all > 0 && all == ending_with_last)
}

/// A coded chain specification: one forced-last stage per bit, each run
/// over one of two fixed disjoint blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedChainSpec {
    pub eta: Vec<bool>,
}

impl CodedChainSpec {
    /// Parses a bit string such as "0110".
    pub fn parse(bits: &str) -> Result<CodedChainSpec> {
        if bits.is_empty() {
            return Err(PlaneError::InvalidGadget("empty code".to_string()));
        }
        if bits.len() > MAX_CHAIN_LENGTH {
            return Err(PlaneError::InvalidGadget(format!(
                "codes longer than {MAX_CHAIN_LENGTH} bits are not supported"
            )));
        }
        let eta = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(PlaneError::InvalidGadget(format!(
                    "code may only contain 0 and 1, found {other:?}"
                ))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(CodedChainSpec { eta })
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    /// The labels shared by every chain: both blocks and the final point.
    pub fn pinned_labels() -> Vec<String> {
        let mut out = Vec::new();
        for z in 0..2 {
            for i in 0..4 {
                out.push(format!("P{z}_{i}"));
            }
            for i in 0..4 {
                out.push(format!("L{z}_{i}"));
            }
        }
        out.push("a0".to_string());
        out
    }
}

/// Builds the chain of forced-last stages coded by `spec`.
///
/// Stage `s` reads bit `s - 1` to select the block and turns the previous
/// output point into its seed, so the chain adds `20 * len + 1` elements
/// over the 16 block elements, ending in the point `a0`.
pub fn build_coded_chain(spec: &CodedChainSpec) -> Result<GadgetResult> {
    if spec.eta.is_empty() {
        return Err(PlaneError::InvalidGadget("empty code".to_string()));
    }
    if spec.eta.len() > MAX_CHAIN_LENGTH {
        return Err(PlaneError::InvalidGadget(format!(
            "codes longer than {MAX_CHAIN_LENGTH} bits are not supported"
        )));
    }
    let n = spec.eta.len();
    let mut b = PlaneBuilder::new();
    let mut blocks = Vec::with_capacity(2);
    for z in 0..2 {
        let points = std::array::from_fn(|i| {
            b.add_point(&format!("P{z}_{i}")).expect("fresh block point")
        });
        let lines = std::array::from_fn(|i| {
            b.add_line(&format!("L{z}_{i}")).expect("fresh block line")
        });
        blocks.push(Block { points, lines });
    }
    let mut seed = b.add_point(&format!("a{n}")).expect("fresh seed");
    let mut sequence = vec![seed];
    for (s, &bit) in spec.eta.iter().enumerate() {
        let stage = s + 1;
        let labels = StageLabels {
            lines: std::array::from_fn(|i| format!("l{stage}_{}", i + 4)),
            bs: std::array::from_fn(|i| format!("b{stage}_{i}")),
            cs: std::array::from_fn(|i| format!("c{stage}_{i}")),
            a_out: format!("a{}", n - stage),
        };
        let block = &blocks[bit as usize];
        let (order, a_out) = run_stage(&mut b, block, seed, &labels)?;
        sequence.extend(order);
        seed = a_out;
    }
    let plane = b.finish_unchecked();
    let base: BTreeSet<ElementId> = blocks
        .iter()
        .flat_map(|bl| bl.points.iter().chain(&bl.lines))
        .copied()
        .collect();
    let ordering =
        validate_hf_ordering(&plane, &base, &sequence).expect("construction order is hyper-free");
    let rows: Vec<ElementId> = plane.points().collect();
    let cols: Vec<ElementId> = plane.lines().collect();
    let table = plane.incidence_table(&rows, &cols).expect("table over own elements");
    let forced = verify_forced_last(&plane, &base, seed);
    let certificates = vec![
        ("valid_hf_ordering".to_string(), true),
        ("forced_last".to_string(), forced),
    ];
    Ok(GadgetResult { plane, base, ordering, table, certificates })
}

/// Builds the join-meet tower over `2^(2n)` free points: pairs of points
/// are joined, pairs of the joining lines are met, and so on for `2n`
/// levels down to the single apex `c{n}`.
pub fn build_c_gadget_with_budget(n: u32, budget: usize) -> Result<GadgetResult> {
    if n == 0 {
        return Err(PlaneError::InvalidGadget("n must be at least 1".to_string()));
    }
    if n > MAX_C_GADGET_N {
        return Err(PlaneError::InvalidGadget(format!(
            "n larger than {MAX_C_GADGET_N} is not supported"
        )));
    }
    let total: usize = (1usize << (2 * n + 1)) - 1;
    if total > budget {
        return Err(PlaneError::BudgetExceeded { limit: budget, needed: total });
    }
    let mut b = PlaneBuilder::new();
    let width = 1usize << (2 * n);
    let mut level: Vec<ElementId> = (0..width)
        .map(|i| b.add_point(&format!("x{i}")).expect("fresh base point"))
        .collect();
    let base: BTreeSet<ElementId> = level.iter().copied().collect();
    let mut sequence = Vec::with_capacity(total - width);
    for k in 1..=2 * n {
        let count = width >> k;
        let mut next = Vec::with_capacity(count);
        for i in 0..count {
            let label = if k == 2 * n {
                format!("c{n}")
            } else {
                format!("g{k}_{i}")
            };
            let e = if k % 2 == 1 {
                join(&mut b, level[2 * i], level[2 * i + 1], &label)
            } else {
                meet(&mut b, level[2 * i], level[2 * i + 1], &label)
            }
            .expect("tower levels are disjoint");
            next.push(e);
            sequence.push(e);
        }
        level = next;
    }
    let apex = level[0];
    let plane = b.finish_unchecked();
    let ordering =
        validate_hf_ordering(&plane, &base, &sequence).expect("construction order is hyper-free");
    let rows: Vec<ElementId> = plane.points().collect();
    let cols: Vec<ElementId> = plane.lines().collect();
    let table = plane.incidence_table(&rows, &cols).expect("table over own elements");
    let digraph = digraph_from_ordering(&plane, &ordering).expect("ordering just validated");
    let x0 = plane.require("x0").expect("base point");
    let apex_distance = r_distance(&digraph, x0, apex).expect("elements exist");
    let certificates = vec![
        ("f_ordering_over_base".to_string(), ordering.is_f_ordering()),
        (
            "apex_distance_is_2n".to_string(),
            apex_distance == Some(2 * n as usize),
        ),
    ];
    Ok(GadgetResult { plane, base, ordering, table, certificates })
}

/// Builds the tower with the default element budget.
pub fn build_c_gadget(n: u32) -> Result<GadgetResult> {
    build_c_gadget_with_budget(n, DEFAULT_ELEMENT_BUDGET)
}

/// The hyper-free digraph of the complete binary tree of the given depth:
/// nodes are points at even depth and lines at odd depth, incident with
/// their parent, every edge directed from parent to child.
pub fn build_tree_digraph_with_budget(depth: u32, budget: usize) -> Result<HfDigraph> {
    if depth > 30 {
        return Err(PlaneError::InvalidGadget(
            "depths larger than 30 are not supported".to_string(),
        ));
    }
    let total = (1usize << (depth + 1)) - 1;
    if total > budget {
        return Err(PlaneError::BudgetExceeded { limit: budget, needed: total });
    }
    let mut b = PlaneBuilder::new();
    let mut edges = BTreeSet::new();
    let mut level = vec![("z".to_string(), b.add_point("z").expect("fresh root"))];
    for d in 1..=depth {
        let sort = if d % 2 == 0 { Sort::Point } else { Sort::Line };
        let mut next = Vec::with_capacity(level.len() * 2);
        for (name, parent) in &level {
            for bit in 0..2 {
                let label = format!("{name}{bit}");
                let child = match sort {
                    Sort::Point => b.add_point(&label).expect("fresh node"),
                    Sort::Line => b.add_line(&label).expect("fresh node"),
                };
                let (p, l) = match sort {
                    Sort::Point => (child, *parent),
                    Sort::Line => (*parent, child),
                };
                b.add_incidence_unchecked(p, l);
                edges.insert((*parent, child));
                next.push((label, child));
            }
        }
        level = next;
    }
    HfDigraph::new(b.finish_unchecked(), BTreeSet::new(), edges)
}

/// Builds the tree digraph with the default element budget.
pub fn build_tree_digraph(depth: u32) -> Result<HfDigraph> {
    build_tree_digraph_with_budget(depth, DEFAULT_ELEMENT_BUDGET)
}
