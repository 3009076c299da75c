//! Stagewise free projective completion.
//!
//! Odd stages adjoin a joining line for every unjoined pair of points, even
//! stages adjoin a meet point for every pair of lines without a common
//! point. New elements are incident with exactly the pair that created
//! them, so each stage preserves the axioms.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{PlaneError, Result};
use crate::plane::{ElementId, PartialPlane, PlaneBuilder, Sort};
use crate::DEFAULT_ELEMENT_BUDGET;

/// How an element of a staged plane came into being.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Base,
    Join(ElementId, ElementId),
    Meet(ElementId, ElementId),
}

/// A partial plane together with the stages of its free completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StagedPlane {
    plane: PartialPlane,
    stages: Vec<Vec<ElementId>>,
    provenance: BTreeMap<ElementId, Provenance>,
}

impl StagedPlane {
    /// Wraps a plane as stage 0 of its own completion.
    pub fn stage0(plane: PartialPlane) -> StagedPlane {
        let base: Vec<ElementId> = plane.elements().collect();
        let provenance = base.iter().map(|&e| (e, Provenance::Base)).collect();
        StagedPlane { plane, stages: vec![base], provenance }
    }

    pub(crate) fn from_parts(
        plane: PartialPlane,
        stages: Vec<Vec<ElementId>>,
        provenance: BTreeMap<ElementId, Provenance>,
    ) -> StagedPlane {
        StagedPlane { plane, stages, provenance }
    }

    pub fn plane(&self) -> &PartialPlane {
        &self.plane
    }

    /// Number of extension stages applied after the base.
    pub fn stage_count(&self) -> usize {
        self.stages.len() - 1
    }

    /// Elements added at stage `k`, with `stages()[0]` the base.
    pub fn stages(&self) -> &[Vec<ElementId>] {
        &self.stages
    }

    pub fn provenance(&self, e: ElementId) -> Option<Provenance> {
        self.provenance.get(&e).copied()
    }

    /// The stage at which `e` appeared.
    pub fn stage_of(&self, e: ElementId) -> Option<usize> {
        self.stages.iter().position(|layer| layer.contains(&e))
    }

    /// The plane induced on the elements of stages up to `k`.
    pub fn plane_at(&self, k: usize) -> Result<PartialPlane> {
        let subset: BTreeSet<ElementId> = self
            .stages
            .iter()
            .take(k + 1)
            .flatten()
            .copied()
            .collect();
        self.plane.induced(&subset)
    }
}

fn compound(label: &str) -> bool {
    label.contains('\u{2228}') || label.contains('\u{2227}')
}

fn term_label(plane: &PartialPlane, op: char, a: ElementId, b: ElementId) -> String {
    let mut out = String::new();
    for (i, e) in [a, b].into_iter().enumerate() {
        if i > 0 {
            out.push(op);
        }
        let l = plane.label(e);
        if compound(l) {
            out.push('(');
            out.push_str(l);
            out.push(')');
        } else {
            out.push_str(l);
        }
    }
    out
}

/// Applies the next stage of the free completion under an element budget.
///
/// Stage numbers alternate starting from stage 1, which adjoins lines.
pub fn free_extension_stage_with_budget(
    staged: &StagedPlane,
    budget: usize,
) -> Result<StagedPlane> {
    let plane = &staged.plane;
    let next = staged.stage_count() + 1;
    let sort = if next % 2 == 1 { Sort::Line } else { Sort::Point };
    let pairs: Vec<(ElementId, ElementId)> = match sort {
        Sort::Line => {
            let pts: Vec<ElementId> = plane.points().collect();
            let mut out = Vec::new();
            for (i, &p) in pts.iter().enumerate() {
                for &q in &pts[i + 1..] {
                    if plane.joining_line(p, q).is_none() {
                        out.push((p, q));
                    }
                }
            }
            out
        }
        Sort::Point => {
            let ls: Vec<ElementId> = plane.lines().collect();
            let mut out = Vec::new();
            for (i, &k) in ls.iter().enumerate() {
                for &l in &ls[i + 1..] {
                    if plane.meet_point(k, l).is_none() {
                        out.push((k, l));
                    }
                }
            }
            out
        }
    };
    let needed = plane.n_elements() + pairs.len();
    if needed > budget {
        return Err(PlaneError::BudgetExceeded { limit: budget, needed });
    }
    let mut builder = PlaneBuilder::from_plane(plane);
    let mut stages = staged.stages.clone();
    let mut provenance = staged.provenance.clone();
    let mut layer = Vec::with_capacity(pairs.len());
    let op = if sort == Sort::Line { '\u{2228}' } else { '\u{2227}' };
    for &(a, b) in &pairs {
        let label = term_label(plane, op, a, b);
        let e = builder.add_fresh(sort, &label);
        match sort {
            Sort::Line => {
                builder.add_incidence_unchecked(a, e);
                builder.add_incidence_unchecked(b, e);
                provenance.insert(e, Provenance::Join(a, b));
            }
            Sort::Point => {
                builder.add_incidence_unchecked(e, a);
                builder.add_incidence_unchecked(e, b);
                provenance.insert(e, Provenance::Meet(a, b));
            }
        }
        layer.push(e);
    }
    stages.push(layer);
    Ok(StagedPlane { plane: builder.finish_unchecked(), stages, provenance })
}

/// Applies the next stage with the default budget.
pub fn free_extension_stage(staged: &StagedPlane) -> Result<StagedPlane> {
    free_extension_stage_with_budget(staged, DEFAULT_ELEMENT_BUDGET)
}

/// Runs `k` stages of the free completion of `plane` under a budget.
pub fn free_complete_with_budget(
    plane: &PartialPlane,
    k: usize,
    budget: usize,
) -> Result<StagedPlane> {
    if plane.n_elements() > budget {
        return Err(PlaneError::BudgetExceeded {
            limit: budget,
            needed: plane.n_elements(),
        });
    }
    let mut staged = StagedPlane::stage0(plane.clone());
    for _ in 0..k {
        staged = free_extension_stage_with_budget(&staged, budget)?;
    }
    Ok(staged)
}

/// Runs `k` stages of the free completion with the default budget.
pub fn free_complete(plane: &PartialPlane, k: usize) -> Result<StagedPlane> {
    free_complete_with_budget(plane, k, DEFAULT_ELEMENT_BUDGET)
}

/// The partial plane with one line, `n - 2` points on it and two points
/// off it. Its free completion is the free projective plane of rank `n`,
/// defined for `n >= 4`.
pub fn pi_base(n: u32) -> Result<PartialPlane> {
    if n < 4 {
        return Err(PlaneError::InvalidRank(n));
    }
    let mut on: Vec<String> = (1..=n - 2).map(|i| format!("p{i}")).collect();
    let off: Vec<String> = (1..=2).map(|i| format!("q{i}")).collect();
    let incidences: Vec<(String, String)> =
        on.iter().map(|p| (p.clone(), "l".to_string())).collect();
    on.extend(off);
    PartialPlane::build(&on, &["l"], &incidences)
}

/// The subplane generated by a subset inside a finite completion stage.
#[derive(Debug, Clone)]
pub struct GeneratedClosure {
    pub elements: BTreeSet<ElementId>,
    pub plane: PartialPlane,
    /// True when the closure is join-meet complete within the ambient
    /// plane, so no later completion stage could enlarge it.
    pub exact: bool,
}

/// Closes `subset` in the ambient plane under existing joins and meets.
///
/// The result is the generated subplane as far as the ambient stage can
/// see; `exact` reports whether it is already generation complete.
pub fn generated_closure(
    ambient: &PartialPlane,
    subset: &BTreeSet<ElementId>,
    budget: usize,
) -> Result<GeneratedClosure> {
    for &e in subset {
        if !ambient.contains(e) {
            return Err(PlaneError::UnknownElement(format!("{e:?}")));
        }
    }
    let mut closure = subset.clone();
    loop {
        if closure.len() > budget {
            return Err(PlaneError::BudgetExceeded { limit: budget, needed: closure.len() });
        }
        let points: Vec<ElementId> =
            closure.iter().copied().filter(|e| e.sort == Sort::Point).collect();
        let lines: Vec<ElementId> =
            closure.iter().copied().filter(|e| e.sort == Sort::Line).collect();
        let mut grew = false;
        for (i, &p) in points.iter().enumerate() {
            for &q in &points[i + 1..] {
                if let Some(l) = ambient.joining_line(p, q) {
                    grew |= closure.insert(l);
                }
            }
        }
        for (i, &k) in lines.iter().enumerate() {
            for &l in &lines[i + 1..] {
                if let Some(p) = ambient.meet_point(k, l) {
                    grew |= closure.insert(p);
                }
            }
        }
        if !grew {
            break;
        }
    }
    let plane = ambient.induced(&closure)?;
    let exact = plane.is_projective();
    Ok(GeneratedClosure { elements: closure, plane, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::triangle;
    use crate::openness::rank;

    #[test]
    fn pi_base_shapes() {
        assert!(matches!(pi_base(3), Err(PlaneError::InvalidRank(3))));
        for n in 4..=8 {
            let p = pi_base(n).unwrap();
            assert_eq!(p.n_points() as u32, n);
            assert_eq!(p.n_lines(), 1);
            assert_eq!(p.n_incidences() as u32, n - 2);
            assert_eq!(rank(&p).unwrap() as u32, n);
        }
    }

    #[test]
    fn pi4_first_stages() {
        let staged = free_complete(&pi_base(4).unwrap(), 2).unwrap();
        assert_eq!(staged.stage_count(), 2);
        assert_eq!(staged.stages()[1].len(), 5);
        let p = staged.plane();
        assert_eq!(p.n_points(), 7);
        assert_eq!(p.n_lines(), 6);
        assert_eq!(p.n_incidences(), 18);
        assert_eq!(rank(p).unwrap(), 4);
    }

    #[test]
    fn stage_parity_and_provenance() {
        let staged = free_complete(&pi_base(4).unwrap(), 2).unwrap();
        for &e in &staged.stages()[1] {
            assert_eq!(e.sort, Sort::Line);
            assert!(matches!(staged.provenance(e), Some(Provenance::Join(_, _))));
        }
        for &e in &staged.stages()[2] {
            assert_eq!(e.sort, Sort::Point);
            assert!(matches!(staged.provenance(e), Some(Provenance::Meet(_, _))));
        }
        let q1 = staged.plane().require("q1").unwrap();
        assert_eq!(staged.provenance(q1), Some(Provenance::Base));
        assert_eq!(staged.stage_of(q1), Some(0));
    }

    #[test]
    fn join_labels_read_as_terms() {
        let staged = free_complete(&pi_base(4).unwrap(), 3).unwrap();
        let p = staged.plane();
        assert!(p.by_label("p1\u{2228}q1").is_some());
        let meets: Vec<&str> = staged.stages()[2]
            .iter()
            .map(|&e| p.label(e))
            .collect();
        assert!(meets.iter().all(|l| l.contains('\u{2227}')));
        assert!(meets.iter().any(|l| l.starts_with('(')));
    }

    #[test]
    fn closed_plane_completion_is_stationary() {
        let staged = free_complete(&triangle(), 4).unwrap();
        for layer in &staged.stages()[1..] {
            assert!(layer.is_empty());
        }
        assert_eq!(staged.plane().n_elements(), 6);
    }

    #[test]
    fn stages_only_extend_unjoined_pairs() {
        let segments = PartialPlane::build(
            &["a", "b", "c", "d"],
            &["ab", "cd"],
            &[("a", "ab"), ("b", "ab"), ("c", "cd"), ("d", "cd")],
        )
        .unwrap();
        let staged = free_complete(&segments, 3).unwrap();
        assert_eq!(staged.stages()[1].len(), 4);
        assert_eq!(staged.stages()[2].len(), 3);
        assert_eq!(staged.stages()[3].len(), 3);
    }

    #[test]
    fn budget_stops_completion() {
        let err = free_complete_with_budget(&pi_base(7).unwrap(), 4, 1000);
        assert!(matches!(err, Err(PlaneError::BudgetExceeded { .. })));
        let ok = free_complete_with_budget(&pi_base(7).unwrap(), 2, 1000);
        assert!(ok.is_ok());
    }

    #[test]
    fn plane_at_recovers_stage_prefixes() {
        let staged = free_complete(&pi_base(4).unwrap(), 2).unwrap();
        let s0 = staged.plane_at(0).unwrap();
        assert_eq!(s0, pi_base(4).unwrap());
        let s1 = staged.plane_at(1).unwrap();
        assert_eq!(s1.n_elements(), 10);
    }

    #[test]
    fn closure_of_two_points_is_exact() {
        let staged = free_complete(&pi_base(4).unwrap(), 2).unwrap();
        let p = staged.plane();
        let subset: BTreeSet<ElementId> =
            [p.require("p1").unwrap(), p.require("q1").unwrap()].into_iter().collect();
        let c = generated_closure(p, &subset, 1000).unwrap();
        assert_eq!(c.elements.len(), 3);
        assert!(c.exact);
    }

    #[test]
    fn closure_of_a_quadrangle_is_inexact_at_finite_stage() {
        let staged = free_complete(&pi_base(4).unwrap(), 2).unwrap();
        let p = staged.plane();
        let quad = p.find_quadrangle().unwrap();
        let subset: BTreeSet<ElementId> = quad.into_iter().collect();
        let c = generated_closure(p, &subset, 1000).unwrap();
        assert!(!c.exact);
        assert!(c.elements.len() > 4);
    }

    #[test]
    fn closure_respects_budget() {
        let staged = free_complete(&pi_base(5).unwrap(), 4).unwrap();
        let p = staged.plane();
        let quad = p.find_quadrangle().unwrap();
        let subset: BTreeSet<ElementId> = quad.into_iter().collect();
        let err = generated_closure(p, &subset, 5);
        assert!(matches!(err, Err(PlaneError::BudgetExceeded { .. })));
    }
}
