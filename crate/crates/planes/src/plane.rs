//! Finite partial planes.
//!
//! A partial plane is a two-sorted incidence structure of points and lines
//! in which two distinct points lie on at most one common line and two
//! distinct lines meet in at most one common point.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Axiom, PlaneError, Result};

/// The two sorts of elements of a partial plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sort {
    Point,
    Line,
}

impl Sort {
    pub fn dual(self) -> Sort {
        match self {
            Sort::Point => Sort::Line,
            Sort::Line => Sort::Point,
        }
    }
}

/// A sorted index into a [`PartialPlane`].
///
/// Ids order points before lines and are stable under extension: adding
/// elements never renumbers existing ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ElementId {
    pub sort: Sort,
    pub index: u32,
}

impl ElementId {
    pub fn point(index: u32) -> ElementId {
        ElementId { sort: Sort::Point, index }
    }

    pub fn line(index: u32) -> ElementId {
        ElementId { sort: Sort::Line, index }
    }

    /// The same index in the opposite sort.
    pub fn dual(self) -> ElementId {
        ElementId { sort: self.sort.dual(), index: self.index }
    }
}

/// A finite partial plane with labelled elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialPlane {
    point_labels: Vec<String>,
    line_labels: Vec<String>,
    point_lines: Vec<Vec<u32>>,
    line_points: Vec<Vec<u32>>,
    by_label: BTreeMap<String, ElementId>,
}

impl PartialPlane {
    /// The empty partial plane.
    pub fn empty() -> PartialPlane {
        PartialPlane {
            point_labels: Vec::new(),
            line_labels: Vec::new(),
            point_lines: Vec::new(),
            line_points: Vec::new(),
            by_label: BTreeMap::new(),
        }
    }

    /// Builds a partial plane from labels and labelled incidences.
    ///
    /// Labels must be globally unique across both sorts. Fails with
    /// [`PlaneError::AxiomViolation`] if the incidences violate axiom A or B.
    pub fn build<P, L, IP, IL>(
        points: &[P],
        lines: &[L],
        incidences: &[(IP, IL)],
    ) -> Result<PartialPlane>
    where
        P: AsRef<str>,
        L: AsRef<str>,
        IP: AsRef<str>,
        IL: AsRef<str>,
    {
        let mut builder = PlaneBuilder::new();
        for p in points {
            builder.add_point(p.as_ref())?;
        }
        for l in lines {
            builder.add_line(l.as_ref())?;
        }
        for (p, l) in incidences {
            let p = builder
                .id_of(p.as_ref())
                .ok_or_else(|| PlaneError::UnknownEndpoint(p.as_ref().to_string()))?;
            let l = builder
                .id_of(l.as_ref())
                .ok_or_else(|| PlaneError::UnknownEndpoint(l.as_ref().to_string()))?;
            if p.sort != Sort::Point {
                return Err(PlaneError::WrongSort {
                    label: builder.label(p).to_string(),
                    expected: Sort::Point,
                });
            }
            if l.sort != Sort::Line {
                return Err(PlaneError::WrongSort {
                    label: builder.label(l).to_string(),
                    expected: Sort::Line,
                });
            }
            builder.add_incidence_unchecked(p, l);
        }
        builder.finish()
    }

    pub fn n_points(&self) -> usize {
        self.point_labels.len()
    }

    pub fn n_lines(&self) -> usize {
        self.line_labels.len()
    }

    pub fn n_elements(&self) -> usize {
        self.n_points() + self.n_lines()
    }

    pub fn n_incidences(&self) -> usize {
        self.point_lines.iter().map(Vec::len).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.point_labels.len() as u32).map(ElementId::point)
    }

    pub fn lines(&self) -> impl Iterator<Item = ElementId> + '_ {
        (0..self.line_labels.len() as u32).map(ElementId::line)
    }

    /// All elements, points first, each sort in index order.
    pub fn elements(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.points().chain(self.lines())
    }

    pub fn contains(&self, e: ElementId) -> bool {
        let n = match e.sort {
            Sort::Point => self.n_points(),
            Sort::Line => self.n_lines(),
        };
        (e.index as usize) < n
    }

    pub fn label(&self, e: ElementId) -> &str {
        match e.sort {
            Sort::Point => &self.point_labels[e.index as usize],
            Sort::Line => &self.line_labels[e.index as usize],
        }
    }

    pub fn labels<'a>(&'a self, es: impl IntoIterator<Item = &'a ElementId>) -> Vec<String> {
        es.into_iter().map(|&e| self.label(e).to_string()).collect()
    }

    pub fn by_label(&self, label: &str) -> Option<ElementId> {
        self.by_label.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<ElementId> {
        self.by_label(label)
            .ok_or_else(|| PlaneError::UnknownElement(label.to_string()))
    }

    /// Elements of the opposite sort incident with `e`, in index order.
    pub fn neighbors(&self, e: ElementId) -> impl Iterator<Item = ElementId> + '_ {
        let (list, sort) = match e.sort {
            Sort::Point => (&self.point_lines[e.index as usize], Sort::Line),
            Sort::Line => (&self.line_points[e.index as usize], Sort::Point),
        };
        list.iter().map(move |&i| ElementId { sort, index: i })
    }

    pub fn degree(&self, e: ElementId) -> usize {
        match e.sort {
            Sort::Point => self.point_lines[e.index as usize].len(),
            Sort::Line => self.line_points[e.index as usize].len(),
        }
    }

    pub fn incident(&self, a: ElementId, b: ElementId) -> bool {
        let (p, l) = match (a.sort, b.sort) {
            (Sort::Point, Sort::Line) => (a, b),
            (Sort::Line, Sort::Point) => (b, a),
            _ => return false,
        };
        self.point_lines[p.index as usize].binary_search(&l.index).is_ok()
    }

    /// All incidences as (point, line) pairs, ordered by point then line.
    pub fn incidences(&self) -> impl Iterator<Item = (ElementId, ElementId)> + '_ {
        self.point_lines.iter().enumerate().flat_map(|(p, ls)| {
            ls.iter()
                .map(move |&l| (ElementId::point(p as u32), ElementId::line(l)))
        })
    }

    /// The line through two distinct points, if any.
    pub fn joining_line(&self, p: ElementId, q: ElementId) -> Option<ElementId> {
        debug_assert!(p.sort == Sort::Point && q.sort == Sort::Point && p != q);
        first_common(
            &self.point_lines[p.index as usize],
            &self.point_lines[q.index as usize],
        )
        .map(ElementId::line)
    }

    /// The point on two distinct lines, if any.
    pub fn meet_point(&self, k: ElementId, l: ElementId) -> Option<ElementId> {
        debug_assert!(k.sort == Sort::Line && l.sort == Sort::Line && k != l);
        first_common(
            &self.line_points[k.index as usize],
            &self.line_points[l.index as usize],
        )
        .map(ElementId::point)
    }

    /// The dual plane: sorts swapped, labels and indices kept.
    pub fn dual(&self) -> PartialPlane {
        let mut by_label = BTreeMap::new();
        for (label, id) in &self.by_label {
            by_label.insert(label.clone(), id.dual());
        }
        PartialPlane {
            point_labels: self.line_labels.clone(),
            line_labels: self.point_labels.clone(),
            point_lines: self.line_points.clone(),
            line_points: self.point_lines.clone(),
            by_label,
        }
    }

    /// The subconfiguration induced on `subset`, keeping labels.
    ///
    /// Keeps exactly the incidences with both endpoints in the subset.
    pub fn induced(&self, subset: &BTreeSet<ElementId>) -> Result<PartialPlane> {
        for &e in subset {
            if !self.contains(e) {
                return Err(PlaneError::UnknownElement(format!("{e:?}")));
            }
        }
        let mut builder = PlaneBuilder::new();
        let mut map = BTreeMap::new();
        for &e in subset {
            let id = match e.sort {
                Sort::Point => builder.add_point(self.label(e))?,
                Sort::Line => builder.add_line(self.label(e))?,
            };
            map.insert(e, id);
        }
        for &e in subset {
            if e.sort != Sort::Point {
                continue;
            }
            for l in self.neighbors(e) {
                if let Some(&nl) = map.get(&l) {
                    builder.add_incidence_unchecked(map[&e], nl);
                }
            }
        }
        Ok(builder.finish_unchecked())
    }

    /// The lexicographically first quadrangle: four points, no three collinear.
    pub fn find_quadrangle(&self) -> Option<[ElementId; 4]> {
        let n = self.n_points() as u32;
        let pt = ElementId::point;
        let coll = |a: ElementId, b: ElementId, c: ElementId| {
            self.joining_line(a, b)
                .map_or(false, |l| self.incident(c, l))
        };
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if coll(pt(a), pt(b), pt(c)) {
                        continue;
                    }
                    for d in c + 1..n {
                        if coll(pt(a), pt(b), pt(d))
                            || coll(pt(a), pt(c), pt(d))
                            || coll(pt(b), pt(c), pt(d))
                        {
                            continue;
                        }
                        return Some([pt(a), pt(b), pt(c), pt(d)]);
                    }
                }
            }
        }
        None
    }

    /// Renders the incidence matrix with `1` for incident pairs and `.`
    /// otherwise, rows labelled by points and columns by lines.
    pub fn incidence_table(&self, rows: &[ElementId], cols: &[ElementId]) -> Result<String> {
        for &r in rows {
            if !self.contains(r) {
                return Err(PlaneError::UnknownElement(format!("{r:?}")));
            }
            if r.sort != Sort::Point {
                return Err(PlaneError::WrongSort {
                    label: self.label(r).to_string(),
                    expected: Sort::Point,
                });
            }
        }
        for &c in cols {
            if !self.contains(c) {
                return Err(PlaneError::UnknownElement(format!("{c:?}")));
            }
            if c.sort != Sort::Line {
                return Err(PlaneError::WrongSort {
                    label: self.label(c).to_string(),
                    expected: Sort::Line,
                });
            }
        }
        if rows.is_empty() || cols.is_empty() {
            return Ok(String::new());
        }
        let row_width = rows
            .iter()
            .map(|&r| self.label(r).chars().count())
            .max()
            .unwrap_or(0);
        let col_widths: Vec<usize> = cols
            .iter()
            .map(|&c| self.label(c).chars().count())
            .collect();
        let mut out = String::new();
        let cell = |out: &mut String, text: &str, w: usize| {
            out.push_str("| ");
            out.push_str(&pad(text, w));
            out.push(' ');
        };
        cell(&mut out, "", row_width);
        for (&c, w) in cols.iter().zip(&col_widths) {
            cell(&mut out, self.label(c), *w);
        }
        out.push_str("|\n");
        for &r in rows {
            cell(&mut out, self.label(r), row_width);
            for (&c, w) in cols.iter().zip(&col_widths) {
                let mark = if self.incident(r, c) { "1" } else { "" };
                cell(&mut out, mark, *w);
            }
            out.push_str("|\n");
        }
        Ok(out)
    }

    /// Checks axioms A and B, reporting a violating quadruple if any.
    pub fn validate_axioms(&self) -> Result<()> {
        let mut seen: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for (l, ps) in self.line_points.iter().enumerate() {
            for i in 0..ps.len() {
                for j in i + 1..ps.len() {
                    let key = (ps[i], ps[j]);
                    if let Some(&other) = seen.get(&key) {
                        return Err(PlaneError::AxiomViolation {
                            axiom: Axiom::A,
                            first: self.point_labels[key.0 as usize].clone(),
                            second: self.point_labels[key.1 as usize].clone(),
                            third: self.line_labels[other as usize].clone(),
                            fourth: self.line_labels[l].clone(),
                        });
                    }
                    seen.insert(key, l as u32);
                }
            }
        }
        let mut seen: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for (p, ls) in self.point_lines.iter().enumerate() {
            for i in 0..ls.len() {
                for j in i + 1..ls.len() {
                    let key = (ls[i], ls[j]);
                    if let Some(&other) = seen.get(&key) {
                        return Err(PlaneError::AxiomViolation {
                            axiom: Axiom::B,
                            first: self.line_labels[key.0 as usize].clone(),
                            second: self.line_labels[key.1 as usize].clone(),
                            third: self.point_labels[other as usize].clone(),
                            fourth: self.point_labels[p].clone(),
                        });
                    }
                    seen.insert(key, p as u32);
                }
            }
        }
        Ok(())
    }

    /// True if every two points are joined and every two lines meet.
    pub fn is_projective(&self) -> bool {
        let pts: Vec<ElementId> = self.points().collect();
        for (i, &p) in pts.iter().enumerate() {
            for &q in &pts[i + 1..] {
                if self.joining_line(p, q).is_none() {
                    return false;
                }
            }
        }
        let ls: Vec<ElementId> = self.lines().collect();
        for (i, &k) in ls.iter().enumerate() {
            for &l in &ls[i + 1..] {
                if self.meet_point(k, l).is_none() {
                    return false;
                }
            }
        }
        true
    }
}

fn first_common(a: &[u32], b: &[u32]) -> Option<u32> {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(a[i]),
        }
    }
    None
}

fn pad(s: &str, width: usize) -> String {
    let len = s.chars().count();
    let mut out = String::from(s);
    for _ in len..width {
        out.push(' ');
    }
    out
}

/// Incremental construction of a partial plane.
#[derive(Debug, Clone)]
pub struct PlaneBuilder {
    plane: PartialPlane,
}

impl PlaneBuilder {
    pub fn new() -> PlaneBuilder {
        PlaneBuilder { plane: PartialPlane::empty() }
    }

    pub fn from_plane(plane: &PartialPlane) -> PlaneBuilder {
        PlaneBuilder { plane: plane.clone() }
    }

    pub fn id_of(&self, label: &str) -> Option<ElementId> {
        self.plane.by_label(label)
    }

    /// The plane built so far.
    pub fn plane_view(&self) -> &PartialPlane {
        &self.plane
    }

    pub fn label(&self, e: ElementId) -> &str {
        self.plane.label(e)
    }

    pub fn n_elements(&self) -> usize {
        self.plane.n_elements()
    }

    pub fn add_point(&mut self, label: &str) -> Result<ElementId> {
        self.add_element(Sort::Point, label)
    }

    pub fn add_line(&mut self, label: &str) -> Result<ElementId> {
        self.add_element(Sort::Line, label)
    }

    fn add_element(&mut self, sort: Sort, label: &str) -> Result<ElementId> {
        if self.plane.by_label.contains_key(label) {
            return Err(PlaneError::DuplicateLabel(label.to_string()));
        }
        let id = match sort {
            Sort::Point => {
                self.plane.point_labels.push(label.to_string());
                self.plane.point_lines.push(Vec::new());
                ElementId::point(self.plane.point_labels.len() as u32 - 1)
            }
            Sort::Line => {
                self.plane.line_labels.push(label.to_string());
                self.plane.line_points.push(Vec::new());
                ElementId::line(self.plane.line_labels.len() as u32 - 1)
            }
        };
        self.plane.by_label.insert(label.to_string(), id);
        Ok(id)
    }

    /// Adds `label`, extending it with primes until it is fresh.
    pub fn add_fresh(&mut self, sort: Sort, label: &str) -> ElementId {
        let mut candidate = label.to_string();
        while self.plane.by_label.contains_key(&candidate) {
            candidate.push('\'');
        }
        self.add_element(sort, &candidate).expect("fresh label")
    }

    /// Records an incidence without checking the axioms. Idempotent.
    pub fn add_incidence_unchecked(&mut self, p: ElementId, l: ElementId) {
        debug_assert!(p.sort == Sort::Point && l.sort == Sort::Line);
        let ls = &mut self.plane.point_lines[p.index as usize];
        if let Err(pos) = ls.binary_search(&l.index) {
            ls.insert(pos, l.index);
        }
        let ps = &mut self.plane.line_points[l.index as usize];
        if let Err(pos) = ps.binary_search(&p.index) {
            ps.insert(pos, p.index);
        }
    }

    /// Adds an incidence, failing if it would violate axiom A or B.
    pub fn add_incidence(&mut self, p: ElementId, l: ElementId) -> Result<()> {
        debug_assert!(p.sort == Sort::Point && l.sort == Sort::Line);
        if self.plane.incident(p, l) {
            return Ok(());
        }
        for q in self.plane.neighbors(l).collect::<Vec<_>>() {
            if let Some(other) = self.plane.joining_line(p, q) {
                return Err(PlaneError::AxiomViolation {
                    axiom: Axiom::A,
                    first: self.plane.label(p).to_string(),
                    second: self.plane.label(q).to_string(),
                    third: self.plane.label(other).to_string(),
                    fourth: self.plane.label(l).to_string(),
                });
            }
        }
        for k in self.plane.neighbors(p).collect::<Vec<_>>() {
            if let Some(other) = self.plane.meet_point(k, l) {
                return Err(PlaneError::AxiomViolation {
                    axiom: Axiom::B,
                    first: self.plane.label(k).to_string(),
                    second: self.plane.label(l).to_string(),
                    third: self.plane.label(other).to_string(),
                    fourth: self.plane.label(p).to_string(),
                });
            }
        }
        self.add_incidence_unchecked(p, l);
        Ok(())
    }

    /// Finishes, validating the axioms.
    pub fn finish(self) -> Result<PartialPlane> {
        self.plane.validate_axioms()?;
        Ok(self.plane)
    }

    /// Finishes without validating; for structures valid by construction.
    pub fn finish_unchecked(self) -> PartialPlane {
        debug_assert!(self.plane.validate_axioms().is_ok());
        self.plane
    }
}

impl Default for PlaneBuilder {
    fn default() -> Self {
        PlaneBuilder::new()
    }
}
