//! Hyper-free digraphs.
//!
//! A hyper-free digraph orients every incidence of a plane away from the
//! base so that no non-base element depends on more than two others. An
//! edge u -> v reads "u must be available before v"; the in-edges of v are
//! exactly the incidences counted by its t-type. Acyclic digraphs are the
//! ones that come from orderings.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{PlaneError, Result};
use crate::openness::{validate_hf_ordering, HfOrdering};
use crate::plane::{ElementId, PartialPlane};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HfDigraph {
    plane: PartialPlane,
    base: BTreeSet<ElementId>,
    edges: BTreeSet<(ElementId, ElementId)>,
    preds: BTreeMap<ElementId, Vec<ElementId>>,
    succs: BTreeMap<ElementId, Vec<ElementId>>,
}

/// Result of searching a digraph for a compatible ordering.
#[derive(Debug, Clone)]
pub enum Compat {
    Ordering(HfOrdering),
    /// A directed cycle listed in edge direction, smallest element first.
    Cycle(Vec<ElementId>),
}

impl HfDigraph {
    /// Validates and wraps a digraph over `plane` with the given base.
    ///
    /// Every edge must orient an incidence, never point into the base, and
    /// every incidence outside the base must be oriented exactly one way;
    /// non-base elements take at most two in-edges.
    pub fn new(
        plane: PartialPlane,
        base: BTreeSet<ElementId>,
        edges: BTreeSet<(ElementId, ElementId)>,
    ) -> Result<HfDigraph> {
        for &e in &base {
            if !plane.contains(e) {
                return Err(PlaneError::UnknownElement(format!("{e:?}")));
            }
        }
        for &(u, v) in &edges {
            for e in [u, v] {
                if !plane.contains(e) {
                    return Err(PlaneError::UnknownElement(format!("{e:?}")));
                }
            }
            if !plane.incident(u, v) {
                return Err(PlaneError::CoverageMismatch {
                    label: plane.label(u).to_string(),
                    detail: format!("edge to non-incident {:?}", plane.label(v)),
                });
            }
            if base.contains(&v) {
                return Err(PlaneError::EdgeIntoBase {
                    from: plane.label(u).to_string(),
                    to: plane.label(v).to_string(),
                });
            }
            if edges.contains(&(v, u)) {
                return Err(PlaneError::AntisymmetryViolation(
                    plane.label(u).to_string(),
                    plane.label(v).to_string(),
                ));
            }
        }
        for (p, l) in plane.incidences() {
            if base.contains(&p) && base.contains(&l) {
                continue;
            }
            if !edges.contains(&(p, l)) && !edges.contains(&(l, p)) {
                return Err(PlaneError::CoverageMismatch {
                    label: plane.label(p).to_string(),
                    detail: format!("incidence with {:?} has no edge", plane.label(l)),
                });
            }
        }
        let mut preds: BTreeMap<ElementId, Vec<ElementId>> = BTreeMap::new();
        let mut succs: BTreeMap<ElementId, Vec<ElementId>> = BTreeMap::new();
        for &(u, v) in &edges {
            preds.entry(v).or_default().push(u);
            succs.entry(u).or_default().push(v);
        }
        for (v, ps) in &preds {
            if ps.len() > 2 {
                return Err(PlaneError::InDegreeExceeded {
                    label: plane.label(*v).to_string(),
                    count: ps.len(),
                });
            }
        }
        Ok(HfDigraph { plane, base, edges, preds, succs })
    }

    pub fn plane(&self) -> &PartialPlane {
        &self.plane
    }

    pub fn base(&self) -> &BTreeSet<ElementId> {
        &self.base
    }

    pub fn edges(&self) -> &BTreeSet<(ElementId, ElementId)> {
        &self.edges
    }

    pub fn preds(&self, e: ElementId) -> &[ElementId] {
        self.preds.get(&e).map_or(&[], Vec::as_slice)
    }

    pub fn succs(&self, e: ElementId) -> &[ElementId] {
        self.succs.get(&e).map_or(&[], Vec::as_slice)
    }

    pub fn in_degree(&self, e: ElementId) -> usize {
        self.preds(e).len()
    }
}

/// Orients every incidence of the plane along the given ordering: base
/// before sequence, earlier before later.
pub fn digraph_from_ordering(plane: &PartialPlane, ordering: &HfOrdering) -> Result<HfDigraph> {
    let checked = validate_hf_ordering(plane, &ordering.base, &ordering.sequence)?;
    let mut position: BTreeMap<ElementId, usize> = BTreeMap::new();
    for (i, &e) in checked.sequence.iter().enumerate() {
        position.insert(e, i + 1);
    }
    let rank = |e: ElementId| position.get(&e).copied().unwrap_or(0);
    let mut edges = BTreeSet::new();
    for (p, l) in plane.incidences() {
        let (rp, rl) = (rank(p), rank(l));
        if rp == 0 && rl == 0 {
            continue;
        }
        if rp < rl {
            edges.insert((p, l));
        } else {
            edges.insert((l, p));
        }
    }
    HfDigraph::new(plane.clone(), checked.base, edges)
}

/// Finds an ordering compatible with the digraph, or returns a directed
/// cycle witnessing that none exists.
pub fn compatible_ordering(d: &HfDigraph) -> Compat {
    let mut blocked: BTreeMap<ElementId, usize> = BTreeMap::new();
    for e in d.plane.elements() {
        if d.base.contains(&e) {
            continue;
        }
        let k = d.preds(e).iter().filter(|p| !d.base.contains(p)).count();
        blocked.insert(e, k);
    }
    let mut frontier: BTreeSet<ElementId> = blocked
        .iter()
        .filter_map(|(&e, &k)| (k == 0).then_some(e))
        .collect();
    let mut sequence = Vec::new();
    let mut placed: BTreeSet<ElementId> = BTreeSet::new();
    while let Some(e) = frontier.pop_first() {
        sequence.push(e);
        placed.insert(e);
        for &s in d.succs(e) {
            let k = blocked.get_mut(&s).expect("non-base successor");
            *k -= 1;
            if *k == 0 {
                frontier.insert(s);
            }
        }
    }
    if sequence.len() == blocked.len() {
        let t_types = sequence.iter().map(|&e| d.in_degree(e) as u8).collect();
        return Compat::Ordering(HfOrdering {
            base: d.base.clone(),
            sequence,
            t_types,
        });
    }
    let remaining: BTreeSet<ElementId> = blocked
        .keys()
        .filter(|e| !placed.contains(e))
        .copied()
        .collect();
    let start = *remaining.first().expect("nonempty remainder");
    let mut path = vec![start];
    let mut seen: BTreeMap<ElementId, usize> = BTreeMap::new();
    seen.insert(start, 0);
    loop {
        let cur = *path.last().expect("nonempty path");
        let back = *d
            .preds(cur)
            .iter()
            .filter(|p| remaining.contains(p))
            .min()
            .expect("remaining element has a remaining predecessor");
        if let Some(&j) = seen.get(&back) {
            let mut cycle: Vec<ElementId> = path[j..].iter().rev().copied().collect();
            let min = cycle
                .iter()
                .enumerate()
                .min_by_key(|(_, e)| **e)
                .map(|(i, _)| i)
                .expect("nonempty cycle");
            cycle.rotate_left(min);
            return Compat::Cycle(cycle);
        }
        seen.insert(back, path.len());
        path.push(back);
    }
}

/// The smallest superset of `set` closed under predecessors, restricted to
/// the non-base elements.
pub fn cl_closure(d: &HfDigraph, set: &BTreeSet<ElementId>) -> Result<BTreeSet<ElementId>> {
    for &e in set {
        if !d.plane.contains(e) {
            return Err(PlaneError::UnknownElement(format!("{e:?}")));
        }
        if d.base.contains(&e) {
            return Err(PlaneError::BaseElementInSet(d.plane.label(e).to_string()));
        }
    }
    let mut closure = set.clone();
    let mut queue: Vec<ElementId> = set.iter().copied().collect();
    while let Some(e) = queue.pop() {
        for &p in d.preds(e) {
            if !d.base.contains(&p) && closure.insert(p) {
                queue.push(p);
            }
        }
    }
    Ok(closure)
}

/// Length of the shortest directed path from `a` to `b`, with
/// `r_distance(d, a, a) == Some(0)` and `None` for unreachable pairs.
pub fn r_distance(d: &HfDigraph, a: ElementId, b: ElementId) -> Result<Option<usize>> {
    for e in [a, b] {
        if !d.plane.contains(e) {
            return Err(PlaneError::UnknownElement(format!("{e:?}")));
        }
    }
    let mut dist: BTreeMap<ElementId, usize> = BTreeMap::new();
    dist.insert(a, 0);
    let mut queue = std::collections::VecDeque::from([a]);
    while let Some(e) = queue.pop_front() {
        if e == b {
            return Ok(Some(dist[&e]));
        }
        let next = dist[&e] + 1;
        for &s in d.succs(e) {
            if let std::collections::btree_map::Entry::Vacant(slot) = dist.entry(s) {
                slot.insert(next);
                queue.push_back(s);
            }
        }
    }
    Ok(None)
}

/// Moves a predecessor-closed set `closed` to the front of an ordering.
///
/// Returns the reordered full ordering over the same base, with the
/// relative order of `closed` and of its complement preserved, and the
/// tail as an ordering over base plus `closed`.
pub fn initial_segment_reorder(
    plane: &PartialPlane,
    ordering: &HfOrdering,
    closed: &BTreeSet<ElementId>,
) -> Result<(HfOrdering, HfOrdering)> {
    let d = digraph_from_ordering(plane, ordering)?;
    let closure = cl_closure(&d, closed)?;
    if &closure != closed {
        let witness = closure
            .difference(closed)
            .next()
            .map(|&e| plane.label(e).to_string())
            .unwrap_or_default();
        return Err(PlaneError::NotClosed(format!(
            "predecessor {witness:?} is missing from the set"
        )));
    }
    let front: Vec<ElementId> = ordering
        .sequence
        .iter()
        .copied()
        .filter(|e| closed.contains(e))
        .collect();
    let tail: Vec<ElementId> = ordering
        .sequence
        .iter()
        .copied()
        .filter(|e| !closed.contains(e))
        .collect();
    let mut sequence = front;
    sequence.extend(&tail);
    let reordered = validate_hf_ordering(plane, &ordering.base, &sequence)?;
    let mut tail_base = ordering.base.clone();
    tail_base.extend(closed.iter().copied());
    let tail_ordering = validate_hf_ordering(plane, &tail_base, &tail)?;
    Ok((reordered, tail_ordering))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::triangle;
    use crate::completion::pi_base;
    use crate::openness::extract_hf_ordering;

    fn pi4_digraph() -> HfDigraph {
        let p = pi_base(4).unwrap();
        let o = extract_hf_ordering(&p, &BTreeSet::new()).unwrap().unwrap();
        digraph_from_ordering(&p, &o).unwrap()
    }

    #[test]
    fn ordering_digraph_roundtrip() {
        let p = pi_base(4).unwrap();
        let o = extract_hf_ordering(&p, &BTreeSet::new()).unwrap().unwrap();
        let d = digraph_from_ordering(&p, &o).unwrap();
        assert_eq!(d.edges().len(), p.n_incidences());
        match compatible_ordering(&d) {
            Compat::Ordering(back) => {
                let d2 = digraph_from_ordering(&p, &back).unwrap();
                assert_eq!(d2.edges(), d.edges());
            }
            Compat::Cycle(_) => panic!("acyclic digraph"),
        }
    }

    #[test]
    fn base_edges_count_toward_in_degree() {
        let p = pi_base(4).unwrap();
        let base: BTreeSet<ElementId> = [p.require("l").unwrap()].into_iter().collect();
        let o = extract_hf_ordering(&p, &base).unwrap().unwrap();
        let d = digraph_from_ordering(&p, &o).unwrap();
        let p1 = p.require("p1").unwrap();
        assert_eq!(d.in_degree(p1), 1);
        assert_eq!(d.preds(p1), [p.require("l").unwrap()]);
    }

    #[test]
    fn validation_rejects_bad_digraphs() {
        let p = pi_base(4).unwrap();
        let (p1, l) = (p.require("p1").unwrap(), p.require("l").unwrap());
        let p2 = p.require("p2").unwrap();
        let q1 = p.require("q1").unwrap();
        let err = HfDigraph::new(
            p.clone(),
            BTreeSet::new(),
            [(p1, l), (l, p1), (p2, l)].into_iter().collect(),
        );
        assert!(matches!(err, Err(PlaneError::AntisymmetryViolation(_, _))));
        let err = HfDigraph::new(
            p.clone(),
            [l].into_iter().collect(),
            [(p1, l), (p2, l)].into_iter().collect(),
        );
        assert!(matches!(err, Err(PlaneError::EdgeIntoBase { .. })));
        let err = HfDigraph::new(
            p.clone(),
            BTreeSet::new(),
            [(p1, l)].into_iter().collect(),
        );
        assert!(matches!(err, Err(PlaneError::CoverageMismatch { .. })));
        let err = HfDigraph::new(
            p.clone(),
            BTreeSet::new(),
            [(q1, l)].into_iter().collect(),
        );
        assert!(matches!(err, Err(PlaneError::CoverageMismatch { .. })));
    }

    #[test]
    fn in_degree_cap_is_enforced() {
        let t = triangle();
        let ids = |s: &str| t.require(s).unwrap();
        let edges: BTreeSet<(ElementId, ElementId)> = [
            (ids("a"), ids("ab")),
            (ids("b"), ids("ab")),
            (ids("b"), ids("bc")),
            (ids("c"), ids("bc")),
            (ids("ca"), ids("c")),
            (ids("ca"), ids("a")),
        ]
        .into_iter()
        .collect();
        let d = HfDigraph::new(t.clone(), BTreeSet::new(), edges).unwrap();
        assert_eq!(d.in_degree(ids("ab")), 2);
        let pencil = crate::plane::PartialPlane::build(
            &["x"],
            &["l1", "l2", "l3"],
            &[("x", "l1"), ("x", "l2"), ("x", "l3")],
        )
        .unwrap();
        let x = pencil.require("x").unwrap();
        let edges: BTreeSet<(ElementId, ElementId)> = pencil
            .lines()
            .map(|l| (l, x))
            .collect();
        let err = HfDigraph::new(pencil, BTreeSet::new(), edges);
        assert!(matches!(err, Err(PlaneError::InDegreeExceeded { count: 3, .. })));
    }

    #[test]
    fn cyclic_digraph_reports_cycle() {
        let t = triangle();
        let ids = |s: &str| t.require(s).unwrap();
        let cycle_edges: BTreeSet<(ElementId, ElementId)> = [
            (ids("a"), ids("ab")),
            (ids("ab"), ids("b")),
            (ids("b"), ids("bc")),
            (ids("bc"), ids("c")),
            (ids("c"), ids("ca")),
            (ids("ca"), ids("a")),
        ]
        .into_iter()
        .collect();
        let d = HfDigraph::new(t.clone(), BTreeSet::new(), cycle_edges).unwrap();
        match compatible_ordering(&d) {
            Compat::Ordering(_) => panic!("digraph is cyclic"),
            Compat::Cycle(c) => {
                assert_eq!(c.len(), 6);
                assert_eq!(c[0], *c.iter().min().unwrap());
                for i in 0..c.len() {
                    assert!(d.edges().contains(&(c[i], c[(i + 1) % c.len()])));
                }
            }
        }
    }

    #[test]
    fn closure_follows_predecessors() {
        let d = pi4_digraph();
        let p = d.plane().clone();
        let p1 = p.require("p1").unwrap();
        let l = p.require("l").unwrap();
        let c = cl_closure(&d, &[p1].into_iter().collect()).unwrap();
        assert!(c.contains(&p1));
        assert!(c.contains(&l));
        let c2 = cl_closure(&d, &c).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn closure_rejects_base_elements() {
        let p = pi_base(4).unwrap();
        let base: BTreeSet<ElementId> = [p.require("l").unwrap()].into_iter().collect();
        let o = extract_hf_ordering(&p, &base).unwrap().unwrap();
        let d = digraph_from_ordering(&p, &o).unwrap();
        let err = cl_closure(&d, &base);
        assert!(matches!(err, Err(PlaneError::BaseElementInSet(_))));
    }

    #[test]
    fn distances_in_pi4() {
        let d = pi4_digraph();
        let p = d.plane().clone();
        let p1 = p.require("p1").unwrap();
        let l = p.require("l").unwrap();
        let q1 = p.require("q1").unwrap();
        assert_eq!(r_distance(&d, p1, p1).unwrap(), Some(0));
        assert_eq!(r_distance(&d, l, p1).unwrap(), Some(1));
        assert_eq!(r_distance(&d, p1, l).unwrap(), None);
        assert_eq!(r_distance(&d, q1, p1).unwrap(), None);
    }

    #[test]
    fn reorder_moves_closed_set_to_front() {
        let p = pi_base(4).unwrap();
        let o = extract_hf_ordering(&p, &BTreeSet::new()).unwrap().unwrap();
        let d = digraph_from_ordering(&p, &o).unwrap();
        let p1 = p.require("p1").unwrap();
        let closed = cl_closure(&d, &[p1].into_iter().collect()).unwrap();
        let (reordered, tail) = initial_segment_reorder(&p, &o, &closed).unwrap();
        assert_eq!(reordered.sequence[..closed.len()].iter().copied().collect::<BTreeSet<_>>(), closed);
        let d2 = digraph_from_ordering(&p, &reordered).unwrap();
        assert_eq!(d2.edges(), d.edges());
        assert_eq!(tail.len() + closed.len(), o.len());
        let not_closed: BTreeSet<ElementId> = [p1].into_iter().collect();
        let err = initial_segment_reorder(&p, &o, &not_closed);
        assert!(matches!(err, Err(PlaneError::NotClosed(_))));
    }
}
