//! JSON documents for planes, completions, orderings and digraphs.
//!
//! Serialization is canonical: elements in index order, incidences by
//! point then line, pretty printed with a trailing newline, so equal
//! structures serialize to equal bytes.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::completion::{Provenance, StagedPlane};
use crate::digraph::HfDigraph;
use crate::error::{PlaneError, Result};
use crate::gadgets::GadgetResult;
use crate::openness::{validate_hf_ordering, HfOrdering};
use crate::plane::{ElementId, PartialPlane, Sort};

#[derive(Serialize, Deserialize)]
struct PlaneDoc {
    points: Vec<String>,
    lines: Vec<String>,
    incidences: Vec<[String; 2]>,
}

fn doc_of(plane: &PartialPlane) -> PlaneDoc {
    PlaneDoc {
        points: plane.points().map(|e| plane.label(e).to_string()).collect(),
        lines: plane.lines().map(|e| plane.label(e).to_string()).collect(),
        incidences: plane
            .incidences()
            .map(|(p, l)| [plane.label(p).to_string(), plane.label(l).to_string()])
            .collect(),
    }
}

fn plane_of(doc: &PlaneDoc) -> Result<PartialPlane> {
    let incidences: Vec<(String, String)> = doc
        .incidences
        .iter()
        .map(|[p, l]| (p.clone(), l.clone()))
        .collect();
    PartialPlane::build(&doc.points, &doc.lines, &incidences)
}

fn pretty<T: Serialize>(doc: &T) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("serializable document");
    out.push('\n');
    out
}

pub fn plane_to_json(plane: &PartialPlane) -> String {
    pretty(&doc_of(plane))
}

/// Parses and validates a plane document.
pub fn plane_from_json(s: &str) -> Result<PartialPlane> {
    plane_of(&serde_json::from_str(s)?)
}

#[derive(Serialize, Deserialize)]
struct StagedDoc {
    points: Vec<String>,
    lines: Vec<String>,
    incidences: Vec<[String; 2]>,
    stages: Vec<Vec<String>>,
    provenance: BTreeMap<String, String>,
}

fn term_of(plane: &PartialPlane, p: Provenance) -> String {
    match p {
        Provenance::Base => "base".to_string(),
        Provenance::Join(a, b) => format!("join({},{})", plane.label(a), plane.label(b)),
        Provenance::Meet(a, b) => format!("meet({},{})", plane.label(a), plane.label(b)),
    }
}

fn parse_term(
    term: &str,
    plane: &PartialPlane,
    earlier: &BTreeSet<ElementId>,
) -> Result<Provenance> {
    if term == "base" {
        return Ok(Provenance::Base);
    }
    let (op, join) = if let Some(inner) = term.strip_prefix("join(") {
        (inner, true)
    } else if let Some(inner) = term.strip_prefix("meet(") {
        (inner, false)
    } else {
        return Err(PlaneError::InvalidDocument(format!(
            "unreadable provenance term {term:?}"
        )));
    };
    let Some(inner) = op.strip_suffix(')') else {
        return Err(PlaneError::InvalidDocument(format!(
            "unreadable provenance term {term:?}"
        )));
    };
    let mut found = None;
    for (idx, _) in inner.match_indices(',') {
        let (left, right) = (&inner[..idx], &inner[idx + 1..]);
        let (Some(a), Some(b)) = (plane.by_label(left), plane.by_label(right)) else {
            continue;
        };
        if !earlier.contains(&a) || !earlier.contains(&b) {
            continue;
        }
        if found.replace((a, b)).is_some() {
            return Err(PlaneError::InvalidDocument(format!(
                "ambiguous provenance term {term:?}"
            )));
        }
    }
    let Some((a, b)) = found else {
        return Err(PlaneError::InvalidDocument(format!(
            "provenance term {term:?} does not name two earlier elements"
        )));
    };
    Ok(if join { Provenance::Join(a, b) } else { Provenance::Meet(a, b) })
}

pub fn staged_to_json(staged: &StagedPlane) -> String {
    let plane = staged.plane();
    let base = doc_of(plane);
    let stages = staged
        .stages()
        .iter()
        .map(|layer| layer.iter().map(|&e| plane.label(e).to_string()).collect())
        .collect();
    let provenance = plane
        .elements()
        .map(|e| {
            let p = staged.provenance(e).expect("every element has provenance");
            (plane.label(e).to_string(), term_of(plane, p))
        })
        .collect();
    pretty(&StagedDoc {
        points: base.points,
        lines: base.lines,
        incidences: base.incidences,
        stages,
        provenance,
    })
}

/// Parses a staged completion document, revalidating the stage structure.
pub fn staged_from_json(s: &str) -> Result<StagedPlane> {
    let doc: StagedDoc = serde_json::from_str(s)?;
    let plane = plane_of(&PlaneDoc {
        points: doc.points,
        lines: doc.lines,
        incidences: doc.incidences,
    })?;
    let mut stages: Vec<Vec<ElementId>> = Vec::with_capacity(doc.stages.len());
    let mut seen: BTreeSet<ElementId> = BTreeSet::new();
    for layer in &doc.stages {
        let mut ids = Vec::with_capacity(layer.len());
        for label in layer {
            let e = plane.require(label)?;
            if !seen.insert(e) {
                return Err(PlaneError::InvalidDocument(format!(
                    "element {label:?} appears in two stages"
                )));
            }
            ids.push(e);
        }
        stages.push(ids);
    }
    if seen.len() != plane.n_elements() {
        return Err(PlaneError::InvalidDocument(
            "stages do not cover every element".to_string(),
        ));
    }
    if stages.is_empty() {
        return Err(PlaneError::InvalidDocument("no stages".to_string()));
    }
    let mut provenance = BTreeMap::new();
    let mut earlier: BTreeSet<ElementId> = BTreeSet::new();
    for (k, layer) in stages.iter().enumerate() {
        for &e in layer {
            let label = plane.label(e);
            let term = doc.provenance.get(label).ok_or_else(|| {
                PlaneError::InvalidDocument(format!("no provenance for {label:?}"))
            })?;
            let p = parse_term(term, &plane, &earlier)?;
            let ok = match (k, p, e.sort) {
                (0, Provenance::Base, _) => true,
                (_, Provenance::Join(a, b), Sort::Line) => {
                    k % 2 == 1 && plane.incident(a, e) && plane.incident(b, e)
                }
                (_, Provenance::Meet(a, b), Sort::Point) => {
                    k % 2 == 0 && k > 0 && plane.incident(e, a) && plane.incident(e, b)
                }
                _ => false,
            };
            if !ok {
                return Err(PlaneError::InvalidDocument(format!(
                    "provenance {term:?} does not fit {label:?} at stage {k}"
                )));
            }
            provenance.insert(e, p);
        }
        earlier.extend(layer.iter().copied());
    }
    Ok(StagedPlane::from_parts(plane, stages, provenance))
}

/// Reads either a bare plane document or the plane of a staged document.
pub fn plane_or_staged_from_json(s: &str) -> Result<PartialPlane> {
    let value: serde_json::Value = serde_json::from_str(s)?;
    if value.get("stages").is_some() {
        Ok(staged_from_json(s)?.plane().clone())
    } else {
        plane_from_json(s)
    }
}

#[derive(Serialize, Deserialize)]
struct OrderingDoc {
    base: Vec<String>,
    sequence: Vec<String>,
    #[serde(default)]
    t_types: Vec<u8>,
}

pub fn ordering_to_json(plane: &PartialPlane, ordering: &HfOrdering) -> String {
    pretty(&OrderingDoc {
        base: ordering.base.iter().map(|&e| plane.label(e).to_string()).collect(),
        sequence: ordering
            .sequence
            .iter()
            .map(|&e| plane.label(e).to_string())
            .collect(),
        t_types: ordering.t_types.clone(),
    })
}

/// Parses an ordering document against its plane and revalidates it.
pub fn ordering_from_json(plane: &PartialPlane, s: &str) -> Result<HfOrdering> {
    let doc: OrderingDoc = serde_json::from_str(s)?;
    let base: BTreeSet<ElementId> = doc
        .base
        .iter()
        .map(|l| plane.require(l))
        .collect::<Result<_>>()?;
    let sequence: Vec<ElementId> = doc
        .sequence
        .iter()
        .map(|l| plane.require(l))
        .collect::<Result<_>>()?;
    let ordering = validate_hf_ordering(plane, &base, &sequence)?;
    if !doc.t_types.is_empty() && doc.t_types != ordering.t_types {
        return Err(PlaneError::InvalidDocument(
            "stored t-types disagree with the sequence".to_string(),
        ));
    }
    Ok(ordering)
}

#[derive(Serialize, Deserialize)]
struct DigraphDoc {
    points: Vec<String>,
    lines: Vec<String>,
    incidences: Vec<[String; 2]>,
    base: Vec<String>,
    edges: Vec<[String; 2]>,
}

pub fn digraph_to_json(d: &HfDigraph) -> String {
    let plane = d.plane();
    let doc = doc_of(plane);
    pretty(&DigraphDoc {
        points: doc.points,
        lines: doc.lines,
        incidences: doc.incidences,
        base: d.base().iter().map(|&e| plane.label(e).to_string()).collect(),
        edges: d
            .edges()
            .iter()
            .map(|&(u, v)| [plane.label(u).to_string(), plane.label(v).to_string()])
            .collect(),
    })
}

/// Parses and validates a digraph document.
pub fn digraph_from_json(s: &str) -> Result<HfDigraph> {
    let doc: DigraphDoc = serde_json::from_str(s)?;
    let plane = plane_of(&PlaneDoc {
        points: doc.points,
        lines: doc.lines,
        incidences: doc.incidences,
    })?;
    let base: BTreeSet<ElementId> = doc
        .base
        .iter()
        .map(|l| plane.require(l))
        .collect::<Result<_>>()?;
    let edges: BTreeSet<(ElementId, ElementId)> = doc
        .edges
        .iter()
        .map(|[u, v]| Ok((plane.require(u)?, plane.require(v)?)))
        .collect::<Result<_>>()?;
    HfDigraph::new(plane, base, edges)
}

#[derive(Serialize)]
struct GadgetDoc {
    points: Vec<String>,
    lines: Vec<String>,
    incidences: Vec<[String; 2]>,
    base: Vec<String>,
    ordering: Vec<String>,
    t_types: Vec<u8>,
    certificates: BTreeMap<String, bool>,
}

pub fn gadget_to_json(g: &GadgetResult) -> String {
    let plane = &g.plane;
    let doc = doc_of(plane);
    pretty(&GadgetDoc {
        points: doc.points,
        lines: doc.lines,
        incidences: doc.incidences,
        base: g.base.iter().map(|&e| plane.label(e).to_string()).collect(),
        ordering: g
            .ordering
            .sequence
            .iter()
            .map(|&e| plane.label(e).to_string())
            .collect(),
        t_types: g.ordering.t_types.clone(),
        certificates: g
            .certificates
            .iter()
            .map(|(k, v)| (k.clone(), *v))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::fano;
    use crate::completion::{free_complete, pi_base};
    use crate::digraph::digraph_from_ordering;
    use crate::openness::extract_hf_ordering;

    #[test]
    fn plane_roundtrip_is_exact() {
        let f = fano();
        let json = plane_to_json(&f);
        let back = plane_from_json(&json).unwrap();
        assert_eq!(back, f);
        assert_eq!(plane_to_json(&back), json);
    }

    #[test]
    fn loader_rejects_invalid_documents() {
        assert!(plane_from_json("{").is_err());
        let bad = r#"{"points":["a","b"],"lines":["l","m"],
            "incidences":[["a","l"],["b","l"],["a","m"],["b","m"]]}"#;
        assert!(matches!(
            plane_from_json(bad),
            Err(PlaneError::AxiomViolation { .. })
        ));
        let unknown = r#"{"points":["a"],"lines":["l"],"incidences":[["b","l"]]}"#;
        assert!(matches!(
            plane_from_json(unknown),
            Err(PlaneError::UnknownEndpoint(_))
        ));
    }

    #[test]
    fn staged_roundtrip_preserves_provenance() {
        let staged = free_complete(&pi_base(4).unwrap(), 2).unwrap();
        let json = staged_to_json(&staged);
        let back = staged_from_json(&json).unwrap();
        assert_eq!(&back, &staged);
        assert_eq!(staged_to_json(&back), json);
    }

    #[test]
    fn staged_parser_rejects_tampering() {
        let staged = free_complete(&pi_base(4).unwrap(), 1).unwrap();
        let json = staged_to_json(&staged);
        let moved = json.replace(
            "\"stages\": [\n    [\n      \"p1\",",
            "\"stages\": [\n    [",
        );
        assert!(staged_from_json(&moved).is_err());
        let renamed = json.replace("join(p1,q1)", "join(p1,q2)");
        assert!(staged_from_json(&renamed).is_err());
    }

    #[test]
    fn ambiguous_provenance_terms_are_rejected() {
        let plane = PartialPlane::build(
            &["a", "b,c", "a,b", "c"],
            &["j"],
            &[("a", "j"), ("c", "j")],
        )
        .unwrap();
        let earlier: BTreeSet<ElementId> = plane.points().collect();
        let err = parse_term("join(a,b,c)", &plane, &earlier);
        assert!(matches!(err, Err(PlaneError::InvalidDocument(msg)) if msg.contains("ambiguous")));
        let ok = parse_term("join(a,c)", &plane, &earlier).unwrap();
        assert!(matches!(ok, Provenance::Join(_, _)));
    }

    #[test]
    fn plane_or_staged_accepts_both() {
        let staged = free_complete(&pi_base(4).unwrap(), 1).unwrap();
        let via_staged = plane_or_staged_from_json(&staged_to_json(&staged)).unwrap();
        assert_eq!(&via_staged, staged.plane());
        let bare = plane_or_staged_from_json(&plane_to_json(&fano())).unwrap();
        assert_eq!(bare, fano());
    }

    #[test]
    fn ordering_roundtrip_checks_t_types() {
        let p = pi_base(4).unwrap();
        let o = extract_hf_ordering(&p, &BTreeSet::new()).unwrap().unwrap();
        let json = ordering_to_json(&p, &o);
        let back = ordering_from_json(&p, &json).unwrap();
        assert_eq!(back, o);
        let tampered = json.replace(
            "\"t_types\": [\n    0,",
            "\"t_types\": [\n    2,",
        );
        assert!(matches!(
            ordering_from_json(&p, &tampered),
            Err(PlaneError::InvalidDocument(_))
        ));
    }

    #[test]
    fn digraph_roundtrip_revalidates() {
        let p = pi_base(4).unwrap();
        let o = extract_hf_ordering(&p, &BTreeSet::new()).unwrap().unwrap();
        let d = digraph_from_ordering(&p, &o).unwrap();
        let json = digraph_to_json(&d);
        let back = digraph_from_json(&json).unwrap();
        assert_eq!(back.edges(), d.edges());
        assert_eq!(digraph_to_json(&back), json);
        let rebased = json.replace("\"base\": []", "\"base\": [\"p1\"]");
        assert!(matches!(
            digraph_from_json(&rebased),
            Err(PlaneError::EdgeIntoBase { .. })
        ));
        let uncovered = json.replace(
            "    [\n      \"l\",\n      \"p2\"\n    ]\n  ]\n}",
            "    [\n      \"l\",\n      \"p1\"\n    ]\n  ]\n}",
        );
        assert_ne!(uncovered, json);
        assert!(matches!(
            digraph_from_json(&uncovered),
            Err(PlaneError::CoverageMismatch { .. })
        ));
    }

    #[test]
    fn gadget_doc_reads_back_as_plane() {
        let g = crate::gadgets::build_superstability_gadget();
        let json = gadget_to_json(&g);
        let back = plane_or_staged_from_json(&json).unwrap();
        assert_eq!(back, g.plane);
    }
}
