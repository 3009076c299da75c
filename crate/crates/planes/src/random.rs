//! Seeded random generation of test planes.
//!
//! Open planes are grown by random hyper-free construction steps, so they
//! are open by construction; arbitrary partial planes are grown by
//! rejection and may or may not be open.

use std::collections::BTreeSet;

use rand::Rng;

use crate::plane::{ElementId, PartialPlane, PlaneBuilder, Sort};

/// A partial plane with up to the given number of points and lines and
/// `attempts` random incidence insertions, dropping violating ones.
pub fn random_partial_plane(
    rng: &mut impl Rng,
    max_points: usize,
    max_lines: usize,
    attempts: usize,
) -> PartialPlane {
    let n_points = rng.gen_range(0..=max_points);
    let n_lines = rng.gen_range(0..=max_lines);
    let mut b = PlaneBuilder::new();
    for i in 0..n_points {
        b.add_point(&format!("p{i}")).expect("fresh label");
    }
    for i in 0..n_lines {
        b.add_line(&format!("l{i}")).expect("fresh label");
    }
    if n_points > 0 && n_lines > 0 {
        for _ in 0..attempts {
            let p = ElementId::point(rng.gen_range(0..n_points) as u32);
            let l = ElementId::line(rng.gen_range(0..n_lines) as u32);
            let _ = b.add_incidence(p, l);
        }
    }
    b.finish_unchecked()
}

fn attach(
    b: &mut PlaneBuilder,
    rng: &mut impl Rng,
    e: ElementId,
    hosts: &[ElementId],
    want: usize,
) {
    for _ in 0..8 {
        let t = want.min(hosts.len());
        match t {
            0 => return,
            1 => {
                let h = hosts[rng.gen_range(0..hosts.len())];
                let (p, l) = if e.sort == Sort::Point { (e, h) } else { (h, e) };
                b.add_incidence_unchecked(p, l);
                return;
            }
            _ => {
                let h1 = hosts[rng.gen_range(0..hosts.len())];
                let h2 = hosts[rng.gen_range(0..hosts.len())];
                if h1 == h2 {
                    continue;
                }
                let compatible = match e.sort {
                    Sort::Point => b.plane_view().meet_point(h1, h2).is_none(),
                    Sort::Line => b.plane_view().joining_line(h1, h2).is_none(),
                };
                if !compatible {
                    continue;
                }
                for h in [h1, h2] {
                    let (p, l) = if e.sort == Sort::Point { (e, h) } else { (h, e) };
                    b.add_incidence_unchecked(p, l);
                }
                return;
            }
        }
    }
    // Fall back to a free element when no compatible pair turned up.
}

fn grow(
    b: &mut PlaneBuilder,
    rng: &mut impl Rng,
    steps: usize,
    label_prefix: &str,
) {
    let mut points: Vec<ElementId> = b.plane_view().points().collect();
    let mut lines: Vec<ElementId> = b.plane_view().lines().collect();
    for _ in 0..steps {
        let sort = if rng.gen_bool(0.5) { Sort::Point } else { Sort::Line };
        let i = b.n_elements();
        let label = match sort {
            Sort::Point => format!("{label_prefix}p{i}"),
            Sort::Line => format!("{label_prefix}l{i}"),
        };
        let e = b.add_fresh(sort, &label);
        let want = rng.gen_range(0..=2);
        let hosts = match sort {
            Sort::Point => &lines,
            Sort::Line => &points,
        };
        attach(b, rng, e, hosts, want);
        match sort {
            Sort::Point => points.push(e),
            Sort::Line => lines.push(e),
        }
    }
}

/// An open plane with `n_elements` elements, built by hyper-free steps.
pub fn random_open_plane(rng: &mut impl Rng, n_elements: usize) -> PartialPlane {
    let mut b = PlaneBuilder::new();
    grow(&mut b, rng, n_elements, "");
    b.finish_unchecked()
}

/// Extends `base` by `steps` hyper-free steps; the result is hyper-free
/// over the returned base element set.
pub fn random_hf_extension(
    rng: &mut impl Rng,
    base: &PartialPlane,
    steps: usize,
) -> (PartialPlane, BTreeSet<ElementId>) {
    let mut b = PlaneBuilder::from_plane(base);
    grow(&mut b, rng, steps, "x");
    (b.finish_unchecked(), base.elements().collect())
}
