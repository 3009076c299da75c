//! Openness, confined cores and hyper-free orderings.
//!
//! A configuration is confined relative to a base when each of its elements
//! is incident with at least three elements of the configuration or the
//! base. Peeling removes elements of degree at most two until only a
//! maximal confined core remains; the reversed removal order is a
//! hyper-free ordering exactly when the core is empty.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{PlaneError, Result};
use crate::plane::{ElementId, PartialPlane, Sort};

/// Largest non-base element count accepted by [`count_hf_orderings`].
pub const MAX_COUNT_ELEMENTS: usize = 22;

/// Outcome of peeling a plane down to its confined core.
#[derive(Debug, Clone)]
pub struct PeelReport {
    /// Removed elements in removal order.
    pub order: Vec<ElementId>,
    /// Degree of each removed element at the moment of removal, counted
    /// against the base and the elements still present.
    pub degrees_at_removal: Vec<usize>,
    /// Non-base elements that could not be removed.
    pub residual_core: BTreeSet<ElementId>,
}

/// A linear ordering of the non-base elements in which every element is
/// incident with at most two elements of the base and its predecessors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HfOrdering {
    pub base: BTreeSet<ElementId>,
    pub sequence: Vec<ElementId>,
    pub t_types: Vec<u8>,
}

impl HfOrdering {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// True if every element has t-type exactly 2.
    pub fn is_f_ordering(&self) -> bool {
        self.t_types.iter().all(|&t| t == 2)
    }

    /// The sum of 2 - t over the sequence.
    pub fn weight(&self) -> i64 {
        self.t_types.iter().map(|&t| 2 - t as i64).sum()
    }

    /// The same ordering read in the dual plane.
    pub fn dual(&self) -> HfOrdering {
        HfOrdering {
            base: self.base.iter().map(|e| e.dual()).collect(),
            sequence: self.sequence.iter().map(|e| e.dual()).collect(),
            t_types: self.t_types.clone(),
        }
    }
}

fn check_base(plane: &PartialPlane, base: &BTreeSet<ElementId>) -> Result<()> {
    for &e in base {
        if !plane.contains(e) {
            return Err(PlaneError::UnknownElement(format!("{e:?}")));
        }
    }
    Ok(())
}

struct Marks {
    points: Vec<bool>,
    lines: Vec<bool>,
}

impl Marks {
    fn new(plane: &PartialPlane) -> Marks {
        Marks {
            points: vec![false; plane.n_points()],
            lines: vec![false; plane.n_lines()],
        }
    }

    fn get(&self, e: ElementId) -> bool {
        match e.sort {
            Sort::Point => self.points[e.index as usize],
            Sort::Line => self.lines[e.index as usize],
        }
    }

    fn set(&mut self, e: ElementId, v: bool) {
        match e.sort {
            Sort::Point => self.points[e.index as usize] = v,
            Sort::Line => self.lines[e.index as usize] = v,
        }
    }
}

struct Counts {
    points: Vec<usize>,
    lines: Vec<usize>,
}

impl Counts {
    fn zero(plane: &PartialPlane) -> Counts {
        Counts {
            points: vec![0; plane.n_points()],
            lines: vec![0; plane.n_lines()],
        }
    }

    fn get(&self, e: ElementId) -> usize {
        match e.sort {
            Sort::Point => self.points[e.index as usize],
            Sort::Line => self.lines[e.index as usize],
        }
    }

    fn add(&mut self, e: ElementId, d: isize) {
        let slot = match e.sort {
            Sort::Point => &mut self.points[e.index as usize],
            Sort::Line => &mut self.lines[e.index as usize],
        };
        *slot = slot.checked_add_signed(d).expect("count underflow");
    }
}

fn peel(
    plane: &PartialPlane,
    base: &BTreeSet<ElementId>,
    mut choose: impl FnMut(&BTreeSet<ElementId>) -> ElementId,
) -> PeelReport {
    let mut live = Counts::zero(plane);
    for e in plane.elements() {
        live.add(e, plane.degree(e) as isize);
    }
    let mut removed = Marks::new(plane);
    let mut candidates: BTreeSet<ElementId> = plane
        .elements()
        .filter(|e| !base.contains(e) && live.get(*e) <= 2)
        .collect();
    let mut order = Vec::new();
    let mut degrees = Vec::new();
    while !candidates.is_empty() {
        let e = choose(&candidates);
        candidates.remove(&e);
        order.push(e);
        degrees.push(live.get(e));
        removed.set(e, true);
        for f in plane.neighbors(e) {
            if removed.get(f) {
                continue;
            }
            live.add(f, -1);
            if !base.contains(&f) && live.get(f) == 2 {
                candidates.insert(f);
            }
        }
    }
    let residual_core = plane
        .elements()
        .filter(|e| !base.contains(e) && !removed.get(*e))
        .collect();
    PeelReport { order, degrees_at_removal: degrees, residual_core }
}

/// Peels the plane over the base, removing the smallest removable element
/// first, and reports the removal order and the remaining confined core.
///
/// Every element of the residual core is incident with at least three
/// elements of the residual core and the base.
pub fn confined_core(plane: &PartialPlane, base: &BTreeSet<ElementId>) -> Result<PeelReport> {
    check_base(plane, base)?;
    Ok(peel(plane, base, |c| *c.first().expect("nonempty")))
}

/// True if no subconfiguration is confined, equivalently if the plane has a
/// hyper-free ordering over the empty base.
pub fn is_open(plane: &PartialPlane) -> bool {
    peel(plane, &BTreeSet::new(), |c| *c.first().expect("nonempty"))
        .residual_core
        .is_empty()
}

fn ordering_from_report(base: &BTreeSet<ElementId>, report: &PeelReport) -> Option<HfOrdering> {
    if !report.residual_core.is_empty() {
        return None;
    }
    let sequence: Vec<ElementId> = report.order.iter().rev().copied().collect();
    let t_types: Vec<u8> = report
        .degrees_at_removal
        .iter()
        .rev()
        .map(|&d| d as u8)
        .collect();
    Some(HfOrdering { base: base.clone(), sequence, t_types })
}

/// Extracts a hyper-free ordering over the base by reversing the peel
/// order, or returns `None` if the plane is not hyper-free over the base.
pub fn extract_hf_ordering(
    plane: &PartialPlane,
    base: &BTreeSet<ElementId>,
) -> Result<Option<HfOrdering>> {
    let report = confined_core(plane, base)?;
    Ok(ordering_from_report(base, &report))
}

/// True if the non-base part admits a hyper-free ordering over the base.
pub fn is_hf_constructible_over(plane: &PartialPlane, base: &BTreeSet<ElementId>) -> Result<bool> {
    Ok(confined_core(plane, base)?.residual_core.is_empty())
}

/// Samples a hyper-free ordering by peeling with seeded random choices.
///
/// Different seeds explore different orderings; the result is `None`
/// exactly when no ordering exists.
pub fn sample_hf_ordering(
    plane: &PartialPlane,
    base: &BTreeSet<ElementId>,
    seed: u64,
) -> Result<Option<HfOrdering>> {
    check_base(plane, base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let report = peel(plane, base, |c| {
        let k = rng.gen_range(0..c.len());
        *c.iter().nth(k).expect("in range")
    });
    Ok(ordering_from_report(base, &report))
}

/// Checks that `sequence` is a hyper-free ordering of the non-base elements
/// and computes its t-types.
pub fn validate_hf_ordering(
    plane: &PartialPlane,
    base: &BTreeSet<ElementId>,
    sequence: &[ElementId],
) -> Result<HfOrdering> {
    check_base(plane, base)?;
    let mut placed = Marks::new(plane);
    for &e in base {
        placed.set(e, true);
    }
    let mut t_types = Vec::with_capacity(sequence.len());
    for (position, &e) in sequence.iter().enumerate() {
        if !plane.contains(e) {
            return Err(PlaneError::UnknownElement(format!("{e:?}")));
        }
        if base.contains(&e) {
            return Err(PlaneError::NotPermutation(format!(
                "base element {:?} occurs in the sequence",
                plane.label(e)
            )));
        }
        if placed.get(e) {
            return Err(PlaneError::NotPermutation(format!(
                "element {:?} occurs twice",
                plane.label(e)
            )));
        }
        let t = plane.neighbors(e).filter(|f| placed.get(*f)).count();
        if t > 2 {
            return Err(PlaneError::HfViolation {
                label: plane.label(e).to_string(),
                position,
                count: t,
            });
        }
        t_types.push(t as u8);
        placed.set(e, true);
    }
    if sequence.len() + base.len() != plane.n_elements() {
        let missing = plane
            .elements()
            .find(|e| !placed.get(*e))
            .map(|e| plane.label(e).to_string())
            .unwrap_or_default();
        return Err(PlaneError::NotPermutation(format!(
            "element {missing:?} is missing from the sequence"
        )));
    }
    Ok(HfOrdering { base: base.clone(), sequence: sequence.to_vec(), t_types })
}

/// The rank of an open plane: the sum of 2 - t over any hyper-free
/// ordering from the empty base, minus 4. In closed form this is
/// 2 * elements - incidences - 4 and does not depend on the ordering.
pub fn rank(plane: &PartialPlane) -> Result<i64> {
    let report = confined_core(plane, &BTreeSet::new())?;
    if !report.residual_core.is_empty() {
        return Err(PlaneError::NotOpen { core_size: report.residual_core.len() });
    }
    Ok(2 * plane.n_elements() as i64 - plane.n_incidences() as i64 - 4)
}

/// Enumerates every hyper-free ordering over the base by backtracking,
/// calling `visit` with each complete sequence and its t-types. Returns the
/// number of orderings visited; `visit` returning false stops early.
///
/// The number of orderings grows superexponentially, so this is only
/// suitable for small planes; see [`count_hf_orderings`] for counting.
pub fn enumerate_hf_orderings(
    plane: &PartialPlane,
    base: &BTreeSet<ElementId>,
    mut visit: impl FnMut(&[ElementId], &[u8]) -> bool,
) -> Result<u128> {
    check_base(plane, base)?;
    let free: Vec<ElementId> = plane.elements().filter(|e| !base.contains(e)).collect();
    let mut placed = Marks::new(plane);
    let mut marked_neighbors = Counts::zero(plane);
    for &e in base {
        placed.set(e, true);
        for f in plane.neighbors(e) {
            marked_neighbors.add(f, 1);
        }
    }
    struct Dfs<'a, F> {
        plane: &'a PartialPlane,
        free: &'a [ElementId],
        placed: Marks,
        marked_neighbors: Counts,
        sequence: Vec<ElementId>,
        t_types: Vec<u8>,
        count: u128,
        stop: bool,
        visit: F,
    }
    impl<F: FnMut(&[ElementId], &[u8]) -> bool> Dfs<'_, F> {
        fn go(&mut self) {
            if self.stop {
                return;
            }
            if self.sequence.len() == self.free.len() {
                self.count += 1;
                if !(self.visit)(&self.sequence, &self.t_types) {
                    self.stop = true;
                }
                return;
            }
            for i in 0..self.free.len() {
                let e = self.free[i];
                if self.placed.get(e) || self.marked_neighbors.get(e) > 2 {
                    continue;
                }
                self.placed.set(e, true);
                for f in self.plane.neighbors(e) {
                    self.marked_neighbors.add(f, 1);
                }
                self.sequence.push(e);
                self.t_types.push(self.marked_neighbors.get(e) as u8);
                self.go();
                self.t_types.pop();
                self.sequence.pop();
                for f in self.plane.neighbors(e) {
                    self.marked_neighbors.add(f, -1);
                }
                self.placed.set(e, false);
                if self.stop {
                    return;
                }
            }
        }
    }
    let mut dfs = Dfs {
        plane,
        free: &free,
        placed,
        marked_neighbors,
        sequence: Vec::new(),
        t_types: Vec::new(),
        count: 0,
        stop: false,
        visit: &mut visit,
    };
    dfs.go();
    Ok(dfs.count)
}

/// Counts sequences that place exactly the elements of `targets`, in any
/// order in which each element has t-type at most 2 when placed. With
/// `targets` equal to all non-base elements this counts the hyper-free
/// orderings over the base.
///
/// Runs a dynamic program over subsets of `targets`, so every ordering is
/// accounted for without materializing it.
pub fn count_hf_prefixes(
    plane: &PartialPlane,
    base: &BTreeSet<ElementId>,
    targets: &BTreeSet<ElementId>,
) -> Result<u128> {
    check_base(plane, base)?;
    for e in targets {
        if !plane.contains(*e) {
            return Err(PlaneError::UnknownElement(format!("{e:?}")));
        }
        if base.contains(e) {
            return Err(PlaneError::NotPermutation(format!(
                "base element {:?} cannot be placed",
                plane.label(*e)
            )));
        }
    }
    let n = targets.len();
    if n > MAX_COUNT_ELEMENTS {
        return Err(PlaneError::BudgetExceeded { limit: MAX_COUNT_ELEMENTS, needed: n });
    }
    let elems: Vec<ElementId> = targets.iter().copied().collect();
    let mut base_deg = vec![0u32; n];
    let mut nbr = vec![0u32; n];
    for (i, &e) in elems.iter().enumerate() {
        for f in plane.neighbors(e) {
            if base.contains(&f) {
                base_deg[i] += 1;
            } else if let Ok(j) = elems.binary_search(&f) {
                nbr[i] |= 1 << j;
            }
        }
    }
    let full: usize = (1usize << n) - 1;
    let mut dp = vec![0u128; full + 1];
    dp[0] = 1;
    for s in 1..=full {
        let mut acc = 0u128;
        let mut bits = s;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << i);
            if dp[rest] != 0 && base_deg[i] + (nbr[i] & rest as u32).count_ones() <= 2 {
                acc += dp[rest];
            }
        }
        dp[s] = acc;
    }
    Ok(dp[full])
}

/// Counts all hyper-free orderings over the base.
pub fn count_hf_orderings(plane: &PartialPlane, base: &BTreeSet<ElementId>) -> Result<u128> {
    let targets: BTreeSet<ElementId> =
        plane.elements().filter(|e| !base.contains(e)).collect();
    count_hf_prefixes(plane, base, &targets)
}
