//! Isomorphism of labelled planes up to relabelling.
//!
//! The search refines an exact colouring shared between both planes, then
//! backtracks over colour classes. Pinned pairs receive private colours,
//! so they constrain the search instead of being checked afterwards.

use std::collections::BTreeMap;

use crate::error::{PlaneError, Result};
use crate::plane::{ElementId, PartialPlane, Sort};
use crate::DEFAULT_ISO_BUDGET;

/// A sort-preserving bijection between the elements of two planes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoMap {
    point_map: Vec<u32>,
    line_map: Vec<u32>,
}

impl IsoMap {
    pub fn apply(&self, e: ElementId) -> ElementId {
        match e.sort {
            Sort::Point => ElementId::point(self.point_map[e.index as usize]),
            Sort::Line => ElementId::line(self.line_map[e.index as usize]),
        }
    }

    /// All (source, image) pairs, points first.
    pub fn pairs(&self) -> Vec<(ElementId, ElementId)> {
        let pts = self
            .point_map
            .iter()
            .enumerate()
            .map(|(i, &j)| (ElementId::point(i as u32), ElementId::point(j)));
        let lns = self
            .line_map
            .iter()
            .enumerate()
            .map(|(i, &j)| (ElementId::line(i as u32), ElementId::line(j)));
        pts.chain(lns).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.pairs().iter().all(|(a, b)| a == b)
    }
}

fn check_pins(
    p1: &PartialPlane,
    p2: &PartialPlane,
    pinned: &[(ElementId, ElementId)],
) -> Result<()> {
    let mut sources = BTreeMap::new();
    let mut targets = BTreeMap::new();
    for &(a, b) in pinned {
        if !p1.contains(a) {
            return Err(PlaneError::InvalidPinned(format!(
                "{a:?} is not an element of the first plane"
            )));
        }
        if !p2.contains(b) {
            return Err(PlaneError::InvalidPinned(format!(
                "{b:?} is not an element of the second plane"
            )));
        }
        if a.sort != b.sort {
            return Err(PlaneError::InvalidPinned(format!(
                "{:?} and {:?} have different sorts",
                p1.label(a),
                p2.label(b)
            )));
        }
        if *sources.entry(a).or_insert(b) != b || *targets.entry(b).or_insert(a) != a {
            return Err(PlaneError::InvalidPinned(format!(
                "{:?} is pinned twice",
                p1.label(a)
            )));
        }
    }
    Ok(())
}

struct Coloring {
    points: Vec<u32>,
    lines: Vec<u32>,
}

impl Coloring {
    fn get(&self, e: ElementId) -> u32 {
        match e.sort {
            Sort::Point => self.points[e.index as usize],
            Sort::Line => self.lines[e.index as usize],
        }
    }
}

fn refine(p1: &PartialPlane, p2: &PartialPlane, c1: &mut Coloring, c2: &mut Coloring) {
    let mut n_colors = {
        let mut all: Vec<u32> = c1.points.iter().chain(&c1.lines).copied().collect();
        all.extend(c2.points.iter().chain(&c2.lines));
        all.sort_unstable();
        all.dedup();
        all.len()
    };
    loop {
        let mut table: BTreeMap<(u32, Vec<u32>), u32> = BTreeMap::new();
        let mut next = |key: (u32, Vec<u32>)| {
            let fresh = table.len() as u32;
            *table.entry(key).or_insert(fresh)
        };
        let recolor = |plane: &PartialPlane,
                       c: &Coloring,
                       next: &mut dyn FnMut((u32, Vec<u32>)) -> u32|
         -> Coloring {
            let key = |e: ElementId| {
                let mut around: Vec<u32> = plane.neighbors(e).map(|f| c.get(f)).collect();
                around.sort_unstable();
                (c.get(e), around)
            };
            Coloring {
                points: plane.points().map(|e| next(key(e))).collect(),
                lines: plane.lines().map(|e| next(key(e))).collect(),
            }
        };
        let new1 = recolor(p1, c1, &mut next);
        let new2 = recolor(p2, c2, &mut next);
        let grown = table.len() > n_colors;
        n_colors = table.len();
        *c1 = new1;
        *c2 = new2;
        if !grown {
            return;
        }
    }
}

/// Searches for an isomorphism extending `pinned`, deterministically.
///
/// Planes larger than `budget` elements in either sort are rejected with
/// [`PlaneError::BudgetExceeded`].
pub fn isomorphism_search_with_budget(
    p1: &PartialPlane,
    p2: &PartialPlane,
    pinned: &[(ElementId, ElementId)],
    budget: usize,
) -> Result<Option<IsoMap>> {
    check_pins(p1, p2, pinned)?;
    let largest = p1
        .n_points()
        .max(p1.n_lines())
        .max(p2.n_points())
        .max(p2.n_lines());
    if largest > budget {
        return Err(PlaneError::BudgetExceeded { limit: budget, needed: largest });
    }
    if p1.n_points() != p2.n_points()
        || p1.n_lines() != p2.n_lines()
        || p1.n_incidences() != p2.n_incidences()
    {
        return Ok(None);
    }

    let mut init: BTreeMap<(Sort, usize, Option<usize>), u32> = BTreeMap::new();
    let pin_tag = |e: ElementId, side: usize| {
        pinned
            .iter()
            .position(|&(a, b)| if side == 0 { a == e } else { b == e })
    };
    let mut assign = |plane: &PartialPlane, side: usize| -> Coloring {
        let mut color = |e: ElementId| {
            let key = (e.sort, plane.degree(e), pin_tag(e, side));
            let fresh = init.len() as u32;
            *init.entry(key).or_insert(fresh)
        };
        Coloring {
            points: plane.points().map(&mut color).collect(),
            lines: plane.lines().map(&mut color).collect(),
        }
    };
    let mut c1 = assign(p1, 0);
    let mut c2 = assign(p2, 1);
    refine(p1, p2, &mut c1, &mut c2);

    let mut sizes1: BTreeMap<u32, usize> = BTreeMap::new();
    let mut sizes2: BTreeMap<u32, usize> = BTreeMap::new();
    for e in p1.elements() {
        *sizes1.entry(c1.get(e)).or_insert(0) += 1;
    }
    for e in p2.elements() {
        *sizes2.entry(c2.get(e)).or_insert(0) += 1;
    }
    if sizes1 != sizes2 {
        return Ok(None);
    }

    let mut order: Vec<ElementId> = p1.elements().collect();
    order.sort_by_key(|&e| (sizes1[&c1.get(e)], c1.get(e), e));

    struct Search<'a> {
        p1: &'a PartialPlane,
        p2: &'a PartialPlane,
        c1: &'a Coloring,
        order: &'a [ElementId],
        by_color2: BTreeMap<u32, Vec<ElementId>>,
        fwd_pts: Vec<u32>,
        fwd_lns: Vec<u32>,
        bwd_pts: Vec<u32>,
        bwd_lns: Vec<u32>,
    }
    const FREE: u32 = u32::MAX;
    impl Search<'_> {
        fn fwd(&self, e: ElementId) -> u32 {
            match e.sort {
                Sort::Point => self.fwd_pts[e.index as usize],
                Sort::Line => self.fwd_lns[e.index as usize],
            }
        }
        fn bwd(&self, e: ElementId) -> u32 {
            match e.sort {
                Sort::Point => self.bwd_pts[e.index as usize],
                Sort::Line => self.bwd_lns[e.index as usize],
            }
        }
        fn bind(&mut self, e: ElementId, t: ElementId, on: bool) {
            let (f, b) = (if on { t.index } else { FREE }, if on { e.index } else { FREE });
            match e.sort {
                Sort::Point => {
                    self.fwd_pts[e.index as usize] = f;
                    self.bwd_pts[t.index as usize] = b;
                }
                Sort::Line => {
                    self.fwd_lns[e.index as usize] = f;
                    self.bwd_lns[t.index as usize] = b;
                }
            }
        }
        fn consistent(&self, e: ElementId, t: ElementId) -> bool {
            for n in self.p1.neighbors(e) {
                let m = self.fwd(n);
                if m != FREE && !self.p2.incident(t, ElementId { sort: n.sort, index: m }) {
                    return false;
                }
            }
            for m in self.p2.neighbors(t) {
                let n = self.bwd(m);
                if n != FREE && !self.p1.incident(e, ElementId { sort: m.sort, index: n }) {
                    return false;
                }
            }
            true
        }
        fn go(&mut self, depth: usize) -> bool {
            let Some(&e) = self.order.get(depth) else {
                return true;
            };
            let targets = self.by_color2[&self.c1.get(e)].clone();
            for t in targets {
                if self.bwd(t) != FREE || !self.consistent(e, t) {
                    continue;
                }
                self.bind(e, t, true);
                if self.go(depth + 1) {
                    return true;
                }
                self.bind(e, t, false);
            }
            false
        }
    }
    let mut by_color2: BTreeMap<u32, Vec<ElementId>> = BTreeMap::new();
    for e in p2.elements() {
        by_color2.entry(c2.get(e)).or_default().push(e);
    }
    let mut search = Search {
        p1,
        p2,
        c1: &c1,
        order: &order,
        by_color2,
        fwd_pts: vec![FREE; p1.n_points()],
        fwd_lns: vec![FREE; p1.n_lines()],
        bwd_pts: vec![FREE; p2.n_points()],
        bwd_lns: vec![FREE; p2.n_lines()],
    };
    if search.go(0) {
        Ok(Some(IsoMap {
            point_map: search.fwd_pts,
            line_map: search.fwd_lns,
        }))
    } else {
        Ok(None)
    }
}

/// Searches with the default per-sort budget of 64 elements.
pub fn isomorphism_search(
    p1: &PartialPlane,
    p2: &PartialPlane,
    pinned: &[(ElementId, ElementId)],
) -> Result<Option<IsoMap>> {
    isomorphism_search_with_budget(p1, p2, pinned, DEFAULT_ISO_BUDGET)
}

/// Largest point count accepted by [`isomorphic_brute_force`].
pub const MAX_BRUTE_FORCE_POINTS: usize = 8;

/// Decides isomorphism by enumerating point permutations.
///
/// The line mapping is forced: a line on at least two points is determined
/// by its point set, and low-degree lines are matched by multiplicity.
/// This is a reference check for [`isomorphism_search`] and is limited to
/// eight points.
pub fn isomorphic_brute_force(
    p1: &PartialPlane,
    p2: &PartialPlane,
    pinned: &[(ElementId, ElementId)],
) -> Result<bool> {
    check_pins(p1, p2, pinned)?;
    if p1.n_points().max(p2.n_points()) > MAX_BRUTE_FORCE_POINTS {
        return Err(PlaneError::BudgetExceeded {
            limit: MAX_BRUTE_FORCE_POINTS,
            needed: p1.n_points().max(p2.n_points()),
        });
    }
    if p1.n_points() != p2.n_points()
        || p1.n_lines() != p2.n_lines()
        || p1.n_incidences() != p2.n_incidences()
    {
        return Ok(false);
    }
    let n = p1.n_points();
    let line_key = |plane: &PartialPlane, l: ElementId| -> Vec<u32> {
        plane.neighbors(l).map(|p| p.index).collect()
    };
    let mut groups2: BTreeMap<Vec<u32>, Vec<u32>> = BTreeMap::new();
    for l in p2.lines() {
        groups2.entry(line_key(p2, l)).or_default().push(l.index);
    }
    let point_pins: Vec<(u32, u32)> = pinned
        .iter()
        .filter(|(a, _)| a.sort == Sort::Point)
        .map(|&(a, b)| (a.index, b.index))
        .collect();
    let line_pins: Vec<(ElementId, ElementId)> = pinned
        .iter()
        .filter(|(a, _)| a.sort == Sort::Line)
        .copied()
        .collect();

    let admits = |perm: &[u32]| -> bool {
        let mut mapped: BTreeMap<Vec<u32>, Vec<u32>> = BTreeMap::new();
        for l in p1.lines() {
            let mut key: Vec<u32> = line_key(p1, l)
                .into_iter()
                .map(|i| perm[i as usize])
                .collect();
            key.sort_unstable();
            mapped.entry(key).or_default().push(l.index);
        }
        for (key, ls) in &mapped {
            match groups2.get(key) {
                Some(ms) if ms.len() == ls.len() => {}
                _ => return false,
            }
        }
        for &(l1, l2) in &line_pins {
            let mut key: Vec<u32> = line_key(p1, l1)
                .into_iter()
                .map(|i| perm[i as usize])
                .collect();
            key.sort_unstable();
            if key.len() >= 2 {
                if groups2[&key] != [l2.index] {
                    return false;
                }
            } else if line_key(p2, l2) != key {
                return false;
            }
        }
        true
    };

    fn perms(slots: &mut Vec<u32>, used: &mut Vec<bool>, n: usize, check: &impl Fn(&[u32]) -> bool, pins: &[(u32, u32)]) -> bool {
        if slots.len() == n {
            return check(slots);
        }
        let i = slots.len() as u32;
        if let Some(&(_, forced)) = pins.iter().find(|&&(a, _)| a == i) {
            if used[forced as usize] {
                return false;
            }
            slots.push(forced);
            used[forced as usize] = true;
            let ok = perms(slots, used, n, check, pins);
            used[forced as usize] = false;
            slots.pop();
            return ok;
        }
        for j in 0..n as u32 {
            if used[j as usize] || pins.iter().any(|&(_, b)| b == j) {
                continue;
            }
            slots.push(j);
            used[j as usize] = true;
            if perms(slots, used, n, check, pins) {
                used[j as usize] = false;
                slots.pop();
                return true;
            }
            used[j as usize] = false;
            slots.pop();
        }
        false
    }

    let mut slots = Vec::with_capacity(n);
    let mut used = vec![false; n];
    Ok(perms(&mut slots, &mut used, n, &admits, &point_pins))
}
