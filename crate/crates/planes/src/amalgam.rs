//! Amalgams of partial planes over a shared subplane.
//!
//! The free relational amalgam glues two planes along a shared part and
//! adds no incidences; it fails when the glued structure violates the
//! axioms. The canonical amalgam is its stagewise free completion.

use std::collections::{BTreeMap, BTreeSet};

use crate::completion::{free_complete_with_budget, StagedPlane};
use crate::error::{PlaneError, Result};
use crate::openness::is_hf_constructible_over;
use crate::plane::{ElementId, PartialPlane, PlaneBuilder, Sort};
use crate::DEFAULT_ELEMENT_BUDGET;

/// Two planes and the bijection between their shared parts.
#[derive(Debug, Clone)]
pub struct AmalgamSpec {
    pub left: PartialPlane,
    pub right: PartialPlane,
    /// Pairs of (left label, right label) identified with each other.
    pub shared: Vec<(String, String)>,
}

impl AmalgamSpec {
    /// Shares the elements carrying the same label on both sides.
    pub fn by_labels<S: AsRef<str>>(
        left: PartialPlane,
        right: PartialPlane,
        labels: &[S],
    ) -> AmalgamSpec {
        let shared = labels
            .iter()
            .map(|s| (s.as_ref().to_string(), s.as_ref().to_string()))
            .collect();
        AmalgamSpec { left, right, shared }
    }

    fn resolve(&self) -> Result<Vec<(ElementId, ElementId)>> {
        let mut pairs = Vec::with_capacity(self.shared.len());
        let mut seen_left = BTreeSet::new();
        let mut seen_right = BTreeSet::new();
        for (lb, rb) in &self.shared {
            let l = self.left.require(lb)?;
            let r = self.right.require(rb)?;
            if l.sort != r.sort {
                return Err(PlaneError::OverlapMismatch(format!(
                    "{lb:?} and {rb:?} have different sorts"
                )));
            }
            if !seen_left.insert(l) || !seen_right.insert(r) {
                return Err(PlaneError::OverlapMismatch(format!(
                    "{lb:?} is shared more than once"
                )));
            }
            pairs.push((l, r));
        }
        for (i, &(l1, r1)) in pairs.iter().enumerate() {
            for &(l2, r2) in &pairs[i + 1..] {
                if self.left.incident(l1, l2) != self.right.incident(r1, r2) {
                    return Err(PlaneError::OverlapMismatch(format!(
                        "incidence of {:?} and {:?} differs between the sides",
                        self.left.label(l1),
                        self.left.label(l2)
                    )));
                }
            }
        }
        Ok(pairs)
    }
}

/// Glues the two planes along the shared part without new incidences.
///
/// Right-hand labels that collide with left-hand ones are primed. Fails if
/// the union violates an axiom, for instance when both sides join the same
/// two shared points by different lines.
pub fn free_amalgam(spec: &AmalgamSpec) -> Result<PartialPlane> {
    let pairs = spec.resolve()?;
    let mut builder = PlaneBuilder::new();
    for e in spec.left.elements() {
        match e.sort {
            Sort::Point => builder.add_point(spec.left.label(e))?,
            Sort::Line => builder.add_line(spec.left.label(e))?,
        };
    }
    let mut right_map: BTreeMap<ElementId, ElementId> = BTreeMap::new();
    for &(l, r) in &pairs {
        right_map.insert(r, l);
    }
    for e in spec.right.elements() {
        if right_map.contains_key(&e) {
            continue;
        }
        let id = builder.add_fresh(e.sort, spec.right.label(e));
        right_map.insert(e, id);
    }
    for (p, l) in spec.left.incidences() {
        builder.add_incidence_unchecked(p, l);
    }
    for (p, l) in spec.right.incidences() {
        builder.add_incidence_unchecked(right_map[&p], right_map[&l]);
    }
    builder.finish()
}

/// A canonically completed amalgam with precondition warnings.
#[derive(Debug, Clone)]
pub struct CanonicalAmalgam {
    pub staged: StagedPlane,
    pub warnings: Vec<String>,
}

/// Frees the amalgam and completes it for `k` stages.
///
/// Warns when a side is not hyper-free over the shared part; the amalgam
/// is still formed, but the completion is then not the canonical one of
/// the underlying extension classes.
pub fn canonical_amalgam_with_budget(
    spec: &AmalgamSpec,
    k: usize,
    budget: usize,
) -> Result<CanonicalAmalgam> {
    let pairs = spec.resolve()?;
    let mut warnings = Vec::new();
    let left_base: BTreeSet<ElementId> = pairs.iter().map(|&(l, _)| l).collect();
    let right_base: BTreeSet<ElementId> = pairs.iter().map(|&(_, r)| r).collect();
    if !is_hf_constructible_over(&spec.left, &left_base)? {
        warnings.push("left side is not hyper-free over the shared part".to_string());
    }
    if !is_hf_constructible_over(&spec.right, &right_base)? {
        warnings.push("right side is not hyper-free over the shared part".to_string());
    }
    let glued = free_amalgam(spec)?;
    let staged = free_complete_with_budget(&glued, k, budget)?;
    Ok(CanonicalAmalgam { staged, warnings })
}

/// Frees and completes with the default budget.
pub fn canonical_amalgam(spec: &AmalgamSpec, k: usize) -> Result<CanonicalAmalgam> {
    canonical_amalgam_with_budget(spec, k, DEFAULT_ELEMENT_BUDGET)
}

/// Outcome of amalgamating a primitive extension with another extension.
#[derive(Debug, Clone)]
pub enum PrimitiveOutcome {
    /// The new element already has a realization, so the extension embeds.
    Embedding { element: String, image: String },
    /// The free amalgam, which here never violates the axioms.
    Amalgam(PartialPlane),
}

fn embed_check(small: &PartialPlane, big: &PartialPlane) -> Result<Vec<ElementId>> {
    let mut images = Vec::new();
    for e in small.elements() {
        let img = big.require(small.label(e))?;
        if img.sort != e.sort {
            return Err(PlaneError::OverlapMismatch(format!(
                "{:?} has different sorts on the two sides",
                small.label(e)
            )));
        }
        images.push(img);
    }
    let elems: Vec<ElementId> = small.elements().collect();
    for (i, &e) in elems.iter().enumerate() {
        for (j, &f) in elems.iter().enumerate().skip(i + 1) {
            if small.incident(e, f) != big.incident(images[i], images[j]) {
                return Err(PlaneError::OverlapMismatch(format!(
                    "incidence of {:?} and {:?} differs from the shared part",
                    small.label(e),
                    small.label(f)
                )));
            }
        }
    }
    Ok(images)
}

/// Amalgamates the primitive extension `b` of `a` with an extension `c`.
///
/// `b` must add exactly one element to `a`, incident only with elements of
/// `a`. When that element joins or meets a pair already joined or met in
/// `c`, the extension embeds into `c` and the witness is returned;
/// otherwise the free amalgam is formed.
pub fn amalgamate_primitive(
    a: &PartialPlane,
    b: &PartialPlane,
    c: &PartialPlane,
) -> Result<PrimitiveOutcome> {
    embed_check(a, b)?;
    let images = embed_check(a, c)?;
    if !is_hf_constructible_over(c, &images.iter().copied().collect())? {
        return Err(PlaneError::NotHfOver(
            "the companion extension is not hyper-free over the shared part".to_string(),
        ));
    }
    let shared: BTreeSet<&str> = a.elements().map(|e| a.label(e)).collect();
    let new: Vec<ElementId> = b
        .elements()
        .filter(|&e| !shared.contains(b.label(e)))
        .collect();
    if new.len() != 1 {
        return Err(PlaneError::NotPrimitive(format!(
            "expected exactly one new element, found {}",
            new.len()
        )));
    }
    let x = new[0];
    let supports: Vec<ElementId> = b.neighbors(x).collect();
    if supports.len() > 2 {
        return Err(PlaneError::NotPrimitive(format!(
            "new element {:?} has {} incidences",
            b.label(x),
            supports.len()
        )));
    }
    if let [s1, s2] = supports[..] {
        let c1 = c.require(b.label(s1))?;
        let c2 = c.require(b.label(s2))?;
        let witness = match x.sort {
            Sort::Point => c.meet_point(c1, c2),
            Sort::Line => c.joining_line(c1, c2),
        };
        if let Some(w) = witness {
            return Ok(PrimitiveOutcome::Embedding {
                element: b.label(x).to_string(),
                image: c.label(w).to_string(),
            });
        }
    }
    let labels: Vec<&str> = a.elements().map(|e| a.label(e)).collect();
    let spec = AmalgamSpec::by_labels(b.clone(), c.clone(), &labels);
    Ok(PrimitiveOutcome::Amalgam(free_amalgam(&spec)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{fano, triangle};

    fn two_triangles_spec() -> AmalgamSpec {
        let left = triangle();
        let right = PartialPlane::build(
            &["a", "b", "d"],
            &["ab", "bd", "da"],
            &[
                ("a", "ab"),
                ("b", "ab"),
                ("b", "bd"),
                ("d", "bd"),
                ("d", "da"),
                ("a", "da"),
            ],
        )
        .unwrap();
        AmalgamSpec::by_labels(left, right, &["a", "b", "ab"])
    }

    #[test]
    fn glues_along_shared_segment() {
        let am = free_amalgam(&two_triangles_spec()).unwrap();
        assert_eq!(am.n_points(), 4);
        assert_eq!(am.n_lines(), 5);
        assert_eq!(am.n_incidences(), 10);
        let a = am.require("a").unwrap();
        let d = am.require("d").unwrap();
        assert!(am.joining_line(a, d).is_some());
    }

    #[test]
    fn colliding_labels_are_primed() {
        let left = triangle();
        let right = PartialPlane::build(
            &["a", "b", "c"],
            &["ab", "m"],
            &[("a", "ab"), ("b", "ab"), ("c", "m")],
        )
        .unwrap();
        let spec = AmalgamSpec::by_labels(left, right, &["a", "b", "ab"]);
        let am = free_amalgam(&spec).unwrap();
        assert_eq!(am.n_points(), 4);
        assert_eq!(am.n_lines(), 4);
        let primed = am.require("c'").unwrap();
        assert_eq!(primed.sort, Sort::Point);
        assert_eq!(am.degree(primed), 1);
        assert_eq!(am.degree(am.require("c").unwrap()), 2);
    }

    #[test]
    fn conflicting_joins_violate_axiom_a() {
        let left = PartialPlane::build(
            &["x", "y"],
            &["l1"],
            &[("x", "l1"), ("y", "l1")],
        )
        .unwrap();
        let right = PartialPlane::build(
            &["x", "y"],
            &["l2"],
            &[("x", "l2"), ("y", "l2")],
        )
        .unwrap();
        let spec = AmalgamSpec::by_labels(left, right, &["x", "y"]);
        assert!(matches!(
            free_amalgam(&spec),
            Err(PlaneError::AxiomViolation { .. })
        ));
    }

    #[test]
    fn shared_part_must_agree() {
        let left = PartialPlane::build(&["x"], &["l"], &[("x", "l")]).unwrap();
        let right = PartialPlane::build(&["x"], &["l"], &[] as &[(&str, &str)]).unwrap();
        let spec = AmalgamSpec::by_labels(left.clone(), right, &["x", "l"]);
        assert!(matches!(
            free_amalgam(&spec),
            Err(PlaneError::OverlapMismatch(_))
        ));
        let spec = AmalgamSpec::by_labels(left.clone(), left.dual(), &["x", "l"]);
        assert!(matches!(
            free_amalgam(&spec),
            Err(PlaneError::OverlapMismatch(_))
        ));
    }

    #[test]
    fn canonical_amalgam_completes_and_warns() {
        let spec = two_triangles_spec();
        let got = canonical_amalgam(&spec, 2).unwrap();
        assert!(got.warnings.is_empty());
        assert!(got.staged.stage_count() == 2);
        assert!(got.staged.plane().n_elements() > 9);

        let bad = AmalgamSpec::by_labels(fano(), triangle_with_fano_labels(), &["p0"]);
        let got = canonical_amalgam(&bad, 1).unwrap();
        assert_eq!(
            got.warnings,
            ["left side is not hyper-free over the shared part"]
        );
    }

    fn triangle_with_fano_labels() -> PartialPlane {
        PartialPlane::build(
            &["p0", "p1", "p2"],
            &["m0", "m1", "m2"],
            &[
                ("p0", "m0"),
                ("p1", "m0"),
                ("p1", "m1"),
                ("p2", "m1"),
                ("p2", "m2"),
                ("p0", "m2"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn primitive_meet_embeds_when_realized() {
        let a = PartialPlane::build(&[] as &[&str], &["l1", "l2"], &[] as &[(&str, &str)]).unwrap();
        let b = PartialPlane::build(&["x"], &["l1", "l2"], &[("x", "l1"), ("x", "l2")]).unwrap();
        let c = PartialPlane::build(
            &["y", "z"],
            &["l1", "l2"],
            &[("y", "l1"), ("y", "l2"), ("z", "l1")],
        )
        .unwrap();
        match amalgamate_primitive(&a, &b, &c).unwrap() {
            PrimitiveOutcome::Embedding { element, image } => {
                assert_eq!(element, "x");
                assert_eq!(image, "y");
            }
            PrimitiveOutcome::Amalgam(_) => panic!("expected embedding"),
        }
    }

    #[test]
    fn primitive_meet_amalgamates_when_free() {
        let a = PartialPlane::build(&[] as &[&str], &["l1", "l2"], &[] as &[(&str, &str)]).unwrap();
        let b = PartialPlane::build(&["x"], &["l1", "l2"], &[("x", "l1"), ("x", "l2")]).unwrap();
        let c = PartialPlane::build(
            &["z"],
            &["l1", "l2"],
            &[("z", "l1")],
        )
        .unwrap();
        match amalgamate_primitive(&a, &b, &c).unwrap() {
            PrimitiveOutcome::Amalgam(am) => {
                assert_eq!(am.n_points(), 2);
                let x = am.require("x").unwrap();
                assert_eq!(am.degree(x), 2);
            }
            PrimitiveOutcome::Embedding { .. } => panic!("expected amalgam"),
        }
    }

    #[test]
    fn primitive_requires_companion_hyper_free() {
        let f = fano();
        let p0 = f.require("p0").unwrap();
        let a = f.induced(&[p0].into_iter().collect()).unwrap();
        let b = PartialPlane::build(&["p0"], &["m"], &[("p0", "m")]).unwrap();
        assert!(matches!(
            amalgamate_primitive(&a, &b, &f),
            Err(PlaneError::NotHfOver(_))
        ));
    }

    #[test]
    fn primitive_extension_shape_is_checked() {
        let a = PartialPlane::build(&[] as &[&str], &["l1", "l2"], &[] as &[(&str, &str)]).unwrap();
        let b2 = PartialPlane::build(
            &["x", "w"],
            &["l1", "l2"],
            &[("x", "l1")],
        )
        .unwrap();
        assert!(matches!(
            amalgamate_primitive(&a, &b2, &a),
            Err(PlaneError::NotPrimitive(_))
        ));
        let chained = PartialPlane::build(
            &["x"],
            &["l1", "l2", "m"],
            &[("x", "l1"), ("x", "m")],
        )
        .unwrap();
        assert!(matches!(
            amalgamate_primitive(&a, &chained, &a),
            Err(PlaneError::NotPrimitive(_))
        ));
        let a3 = PartialPlane::build(
            &[] as &[&str],
            &["l1", "l2", "l3"],
            &[] as &[(&str, &str)],
        )
        .unwrap();
        let bundle = PartialPlane::build(
            &["x"],
            &["l1", "l2", "l3"],
            &[("x", "l1"), ("x", "l2"), ("x", "l3")],
        )
        .unwrap();
        assert!(matches!(
            amalgamate_primitive(&a3, &bundle, &a3),
            Err(PlaneError::NotPrimitive(_))
        ));
    }
}
