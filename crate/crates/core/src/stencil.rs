//! Stencil selection on the Cartesian lattice: 2D quadratic, 3D quadratic,
//! and the 2D cubic extension, all under arbitrary availability masks with a
//! deterministic search order.
//!
//! The 2D quadratic selection takes the center, two consecutive first-layer
//! ring points, and three points from one second-layer directional line. The
//! first two steps guarantee a non-collinear triple; restricting step 3 to a
//! single directional line is what rules out the singular configurations the
//! unrestricted ring-consecutive rule admits (see the `oracle` module, which
//! enumerates both and rediscovers the failure).
//!
//! The 3D quadratic selection reduces to 2D twice: the first two 2D steps
//! inside one first-layer face give a non-collinear triple off the step-3
//! plane; the full 2D selection inside one second-layer directional plane
//! gives the remaining six nodes.
//!
//! Search order (fixed for reproducibility): directions start from the
//! caller's preference and continue in canonical order (−x, +x, −y, +y, −z,
//! +z); ring pairs in ring order; line subsets in lexicographic order. The
//! result therefore depends only on the availability of candidates inspected
//! before the returned one.

use crate::error::NoStencil;
use crate::grid::{
    consecutive_runs, directional_subset, layer_members, Direction, GridIndex, PlaneEmbedding,
};

/// Availability predicate. Must be pure and stable during one selection call.
pub trait AvailabilityMask<const D: usize> {
    fn is_available(&self, idx: GridIndex<D>) -> bool;
}

impl<const D: usize, F: Fn(GridIndex<D>) -> bool> AvailabilityMask<D> for F {
    fn is_available(&self, idx: GridIndex<D>) -> bool {
        self(idx)
    }
}

/// Everything available.
pub struct FullMask;

impl<const D: usize> AvailabilityMask<D> for FullMask {
    fn is_available(&self, _: GridIndex<D>) -> bool {
        true
    }
}

/// Whitelist mask over an explicit index set.
pub struct SetMask<const D: usize>(pub std::collections::HashSet<GridIndex<D>>);

impl<const D: usize> AvailabilityMask<D> for SetMask<D> {
    fn is_available(&self, idx: GridIndex<D>) -> bool {
        self.0.contains(&idx)
    }
}

/// The choices that produced a 2D quadratic selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quad2Choices {
    /// Ring position of the first pair member on the 8-ring.
    pub pair_start: usize,
    /// Direction of the second-layer line.
    pub line_dir: Direction,
    /// Positions (ascending) of the three chosen points on the 5-point line.
    pub line_subset: [usize; 3],
}

/// The choices that produced a 3D quadratic selection. The in-plane choices
/// are recorded in the plane's own 2D coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quad3Choices {
    pub face_dir: Direction,
    /// Ring position of the first pair member on the face's 8-ring.
    pub face_pair_start: usize,
    pub plane_dir: Direction,
    pub in_plane: Quad2Choices,
}

/// The choices that produced a 2D cubic selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cubic2Choices {
    pub quad: Quad2Choices,
    /// Direction of the third-layer line.
    pub cubic_dir: Direction,
    /// Positions (ascending) of the four chosen points on the 7-point line.
    pub cubic_subset: [usize; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionChoices {
    Quad2(Quad2Choices),
    Quad3(Quad3Choices),
    Cubic2(Cubic2Choices),
}

/// An ordered list of interpolation nodes plus the choices that produced it.
///
/// Node order is structural: `[center, pair…]` then line/plane nodes. The
/// node count always equals the number of monomials of the target
/// degree/dimension (6, 10, or 10).
#[derive(Clone, Debug)]
pub struct StencilSelection<const D: usize> {
    pub degree: u32,
    pub nodes: Vec<GridIndex<D>>,
    pub choices: SelectionChoices,
    /// The proof's coordinate origin; fits center their local frame here.
    pub local_origin: GridIndex<D>,
}

impl<const D: usize> StencilSelection<D> {
    /// Structural sanity: correct node count, pairwise distinct nodes.
    pub fn validate(&self) {
        let expect = match (D, self.degree) {
            (2, 2) => 6,
            (3, 2) => 10,
            (2, 3) => 10,
            _ => panic!("unsupported degree {} in dim {}", self.degree, D),
        };
        assert_eq!(self.nodes.len(), expect, "node count");
        for (i, a) in self.nodes.iter().enumerate() {
            for b in &self.nodes[i + 1..] {
                assert_ne!(a, b, "duplicate node {a}");
            }
        }
    }
}

/// Directions to try: `preferred` first, then the canonical order minus it.
fn direction_order(dim: usize, preferred: Option<Direction>) -> Vec<Direction> {
    let mut order = Vec::with_capacity(2 * dim);
    if let Some(p) = preferred {
        assert!(p.axis < dim);
        order.push(p);
    }
    for d in Direction::canonical(dim) {
        if Some(d) != preferred {
            order.push(d);
        }
    }
    order
}

/// Ascending k-subsets of `0..n` in lexicographic order.
pub fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Nodes of the 2D quadratic configuration described by a choice tuple,
/// independent of any mask. Shared by the selector and the exhaustive
/// enumeration so both emit exactly the same configurations.
pub fn quad2_nodes(center: GridIndex<2>, c: &Quad2Choices) -> Vec<GridIndex<2>> {
    let ring1 = layer_members(center, 1);
    let line = directional_subset(&layer_members(center, 2), c.line_dir);
    let n = ring1.members.len();
    let mut nodes = vec![
        center,
        ring1.members[c.pair_start % n],
        ring1.members[(c.pair_start + 1) % n],
    ];
    nodes.extend(c.line_subset.iter().map(|&s| line[s]));
    nodes
}

/// Nodes of the 3D quadratic configuration described by a choice tuple.
pub fn quad3_nodes(center: GridIndex<3>, c: &Quad3Choices) -> Vec<GridIndex<3>> {
    let face_origin = center.step(c.face_dir.axis, c.face_dir.sign as i64);
    let face = PlaneEmbedding::orthogonal_to(c.face_dir.axis, face_origin);
    let ring = layer_members(GridIndex([0i64, 0]), 1);
    let n = ring.members.len();
    let mut nodes = vec![
        center,
        face_origin,
        face.to3(ring.members[c.face_pair_start % n]),
        face.to3(ring.members[(c.face_pair_start + 1) % n]),
    ];
    let plane_origin = center.step(c.plane_dir.axis, 2 * c.plane_dir.sign as i64);
    let plane = PlaneEmbedding::orthogonal_to(c.plane_dir.axis, plane_origin);
    nodes.extend(
        quad2_nodes(GridIndex([0i64, 0]), &c.in_plane)
            .into_iter()
            .map(|p| plane.to3(p)),
    );
    nodes
}

/// Nodes of the 2D cubic configuration described by a choice tuple.
pub fn cubic2_nodes(center: GridIndex<2>, c: &Cubic2Choices) -> Vec<GridIndex<2>> {
    let mut nodes = quad2_nodes(center, &c.quad);
    let line = directional_subset(&layer_members(center, 3), c.cubic_dir);
    nodes.extend(c.cubic_subset.iter().map(|&s| line[s]));
    nodes
}

/// 2D quadratic selection: center, one consecutive first-layer pair, three
/// points from one second-layer directional line. Returns the first valid
/// configuration in the documented search order.
pub fn select_2d_quadratic(
    center: GridIndex<2>,
    mask: &impl AvailabilityMask<2>,
    preferred: Option<Direction>,
) -> Result<StencilSelection<2>, NoStencil> {
    if !mask.is_available(center) {
        return Err(NoStencil);
    }
    let ring1 = layer_members(center, 1);
    let pairs = consecutive_runs(&ring1, 2);
    let layer2 = layer_members(center, 2);
    for line_dir in direction_order(2, preferred) {
        let line = directional_subset(&layer2, line_dir);
        for (pair_start, pair) in pairs.iter().enumerate() {
            if !pair.iter().all(|p| mask.is_available(*p)) {
                continue;
            }
            for subset in k_subsets(line.len(), 3) {
                if subset.iter().all(|&s| mask.is_available(line[s])) {
                    let choices = Quad2Choices {
                        pair_start,
                        line_dir,
                        line_subset: [subset[0], subset[1], subset[2]],
                    };
                    let sel = StencilSelection {
                        degree: 2,
                        nodes: quad2_nodes(center, &choices),
                        choices: SelectionChoices::Quad2(choices),
                        local_origin: center,
                    };
                    sel.validate();
                    return Ok(sel);
                }
            }
        }
    }
    Err(NoStencil)
}

/// 3D quadratic selection: center; face center plus one consecutive pair of
/// the face's 8-ring (the first two 2D steps inside the chosen first-layer
/// face); then a full 2D quadratic selection inside the chosen second-layer
/// directional plane. Any face/plane axis combination is permitted — the
/// face triple always sits strictly off the plane.
pub fn select_3d_quadratic(
    center: GridIndex<3>,
    mask: &impl AvailabilityMask<3>,
    preferred_face: Option<Direction>,
    preferred_plane: Option<Direction>,
) -> Result<StencilSelection<3>, NoStencil> {
    if !mask.is_available(center) {
        return Err(NoStencil);
    }
    let ring = layer_members(GridIndex([0i64, 0]), 1);
    let ring_pairs = consecutive_runs(&ring, 2);
    for face_dir in direction_order(3, preferred_face) {
        let face_origin = center.step(face_dir.axis, face_dir.sign as i64);
        if !mask.is_available(face_origin) {
            continue;
        }
        let face = PlaneEmbedding::orthogonal_to(face_dir.axis, face_origin);
        for (face_pair_start, pair) in ring_pairs.iter().enumerate() {
            if !pair.iter().all(|p| mask.is_available(face.to3(*p))) {
                continue;
            }
            for plane_dir in direction_order(3, preferred_plane) {
                let plane_origin = center.step(plane_dir.axis, 2 * plane_dir.sign as i64);
                let plane = PlaneEmbedding::orthogonal_to(plane_dir.axis, plane_origin);
                let plane_mask = |q: GridIndex<2>| mask.is_available(plane.to3(q));
                if let Ok(sel2) = select_2d_quadratic(GridIndex([0i64, 0]), &plane_mask, None) {
                    let in_plane = match sel2.choices {
                        SelectionChoices::Quad2(c) => c,
                        _ => unreachable!(),
                    };
                    let choices = Quad3Choices {
                        face_dir,
                        face_pair_start,
                        plane_dir,
                        in_plane,
                    };
                    let sel = StencilSelection {
                        degree: 2,
                        nodes: quad3_nodes(center, &choices),
                        choices: SelectionChoices::Quad3(choices),
                        local_origin: center,
                    };
                    sel.validate();
                    return Ok(sel);
                }
            }
        }
    }
    Err(NoStencil)
}

/// 2D cubic selection: a full quadratic selection (layers 0–2) plus four
/// points from one third-layer directional line. The two parts are
/// independent (they draw from disjoint layers), so the search runs the
/// quadratic selection first, then scans cubic-line directions in preference
/// order and 4-subsets of the 7-point line lexicographically.
pub fn select_2d_cubic(
    center: GridIndex<2>,
    mask: &impl AvailabilityMask<2>,
    preferred: Option<Direction>,
) -> Result<StencilSelection<2>, NoStencil> {
    let quad = select_2d_quadratic(center, mask, preferred)?;
    let quad_choices = match quad.choices {
        SelectionChoices::Quad2(c) => c,
        _ => unreachable!(),
    };
    let layer3 = layer_members(center, 3);
    for cubic_dir in direction_order(2, preferred) {
        let line = directional_subset(&layer3, cubic_dir);
        for subset in k_subsets(line.len(), 4) {
            if subset.iter().all(|&s| mask.is_available(line[s])) {
                let choices = Cubic2Choices {
                    quad: quad_choices,
                    cubic_dir,
                    cubic_subset: [subset[0], subset[1], subset[2], subset[3]],
                };
                let sel = StencilSelection {
                    degree: 3,
                    nodes: cubic2_nodes(center, &choices),
                    choices: SelectionChoices::Cubic2(choices),
                    local_origin: center,
                };
                sel.validate();
                return Ok(sel);
            }
        }
    }
    Err(NoStencil)
}
