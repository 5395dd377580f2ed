//! Exhaustive unisolvence properties of the selection algorithms, with the
//! enumeration as ground truth, plus the search-order properties
//! (determinism, mask monotonicity) that make selections reproducible.

use cutstencil::grid::{Direction, GridIndex};
use cutstencil::interp::{assemble_vandermonde, LocalFrame, MonomialBasis, Point};
use cutstencil::oracle::{
    cross_check, enumerate_improved_2d, enumerate_improved_3d, enumerate_original_2d,
    int_det_for_nodes, summarize,
};
use cutstencil::stencil::{
    cubic2_nodes, k_subsets, select_2d_quadratic, select_3d_quadratic, AvailabilityMask,
    Cubic2Choices, FullMask, Quad2Choices,
};
use proptest::prelude::*;
use std::cell::RefCell;
use std::collections::HashSet;

fn points_of(nodes: &[[i64; 3]]) -> Vec<Point> {
    nodes
        .iter()
        .map(|n| [n[0] as f64, n[1] as f64, n[2] as f64])
        .collect()
}

#[test]
fn improved_2d_all_nonsingular_with_condition_ceiling() {
    let reports = enumerate_improved_2d();
    let s = summarize(&reports);
    assert_eq!(s.count, 320);
    assert_eq!(s.singular, 0);
    assert!(s.min_abs_det >= 1.0, "integer determinants are at least 1");
    // measured maximum is 112; 10⁴ is the regression ceiling
    assert!(s.max_condition <= 1e4, "max condition {}", s.max_condition);
    for r in &reports {
        assert!(cross_check(r), "config {}", r.id);
    }
}

#[test]
fn improved_3d_all_nonsingular_with_condition_ceiling() {
    let reports = enumerate_improved_3d();
    let s = summarize(&reports);
    assert_eq!(s.count, 92160);
    assert_eq!(s.singular, 0);
    assert!(s.min_abs_det >= 1.0);
    // measured maximum is 648
    assert!(s.max_condition <= 1e4, "max condition {}", s.max_condition);
    // the independent subset-DP determinant agrees on a systematic sample
    for r in reports.iter().step_by(257) {
        assert!(cross_check(r), "config {}", r.id);
    }
}

#[test]
fn same_axis_face_plane_combinations_nonsingular() {
    let reports = enumerate_improved_3d();
    let mut seen = 0;
    for r in &reports {
        // choice string starts "face=<dir>;...;plane=<dir>;"
        let face = r.choice.split(';').next().unwrap();
        let plane = r
            .choice
            .split(';')
            .find(|f| f.starts_with("plane="))
            .unwrap();
        if face.trim_start_matches("face=") == plane.trim_start_matches("plane=") {
            assert!(!r.singular, "config {}", r.id);
            seen += 1;
        }
    }
    assert_eq!(seen, 92160 / 6);
}

#[test]
fn cubic_2d_exhaustive_sweep_nonsingular() {
    // 4 cubic directions × C(7,4) subsets × 320 quadratic configurations
    let center = GridIndex([0i64, 0]);
    let basis = MonomialBasis::new(2, 3);
    let frame = LocalFrame::new([0.0; 3], 1.0);
    let mut count = 0usize;
    let mut min_det = i128::MAX;
    let mut max_cond = 0.0f64;
    for cubic_dir in Direction::canonical(2) {
        for subset4 in k_subsets(7, 4) {
            for quad_dir in Direction::canonical(2) {
                for pair_start in 0..8 {
                    for subset3 in k_subsets(5, 3) {
                        let c = Cubic2Choices {
                            quad: Quad2Choices {
                                pair_start,
                                line_dir: quad_dir,
                                line_subset: [subset3[0], subset3[1], subset3[2]],
                            },
                            cubic_dir,
                            cubic_subset: [subset4[0], subset4[1], subset4[2], subset4[3]],
                        };
                        let nodes = cubic2_nodes(center, &c);
                        let d = int_det_for_nodes(&nodes, &basis);
                        assert_ne!(d, 0, "singular cubic configuration {c:?}");
                        min_det = min_det.min(d.abs());
                        let pts: Vec<Point> = nodes
                            .iter()
                            .map(|n| [n.0[0] as f64, n.0[1] as f64, 0.0])
                            .collect();
                        let v = assemble_vandermonde(&pts, &basis, &frame);
                        max_cond = max_cond.max(cutstencil::dense::condition_1(&v));
                        count += 1;
                    }
                }
            }
        }
    }
    assert_eq!(count, 4 * 35 * 320);
    assert!(min_det >= 1);
    // measured maximum is ~4.3e3
    assert!(max_cond <= 1e4, "max condition {max_cond}");
}

#[test]
fn original_2d_singular_class_closed_under_dihedral_symmetry() {
    let reports = enumerate_original_2d();
    let singular: Vec<HashSet<(i64, i64)>> = reports
        .iter()
        .filter(|r| r.singular)
        .map(|r| r.nodes.iter().map(|n| (n[0], n[1])).collect())
        .collect();
    assert!(!singular.is_empty());
    type LatticeMap = fn((i64, i64)) -> (i64, i64);
    let transforms: [LatticeMap; 8] = [
        |(x, y)| (x, y),
        |(x, y)| (-x, y),
        |(x, y)| (x, -y),
        |(x, y)| (-x, -y),
        |(x, y)| (y, x),
        |(x, y)| (-y, x),
        |(x, y)| (y, -x),
        |(x, y)| (-y, -x),
    ];
    for set in &singular {
        for t in &transforms {
            let image: HashSet<(i64, i64)> = set.iter().map(|&p| t(p)).collect();
            assert!(
                singular.contains(&image),
                "dihedral image {image:?} missing from the singular class"
            );
        }
    }
}

#[test]
fn leading_nodes_affinely_independent() {
    // 2D: nodes 0..3 non-collinear; 3D: nodes 0..4 non-coplanar
    for r in enumerate_improved_2d() {
        let [a, b, c] = [r.nodes[0], r.nodes[1], r.nodes[2]];
        let cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        assert_ne!(cross, 0, "collinear triple in config {}", r.id);
    }
    for r in enumerate_improved_3d().iter().step_by(97) {
        let pts = points_of(&r.nodes);
        let (a, b, c, d) = (pts[0], pts[1], pts[2], pts[3]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let w = [d[0] - a[0], d[1] - a[1], d[2] - a[2]];
        let det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
            + u[2] * (v[0] * w[1] - v[1] * w[0]);
        assert!(det.abs() > 1e-12, "coplanar quadruple in config {}", r.id);
    }
}

/// Availability mask that records every queried index.
struct Recording<F> {
    inner: F,
    queried: RefCell<HashSet<GridIndex<2>>>,
}

impl<F: Fn(GridIndex<2>) -> bool> AvailabilityMask<2> for Recording<F> {
    fn is_available(&self, idx: GridIndex<2>) -> bool {
        self.queried.borrow_mut().insert(idx);
        (self.inner)(idx)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn selection_respects_mask_and_structure(seed in any::<u64>(), cx in -20i64..20, cy in -20i64..20) {
        let center = GridIndex([cx, cy]);
        // pseudo-random but pure mask; force the center available
        let mask = move |i: GridIndex<2>| {
            i == center || (i.0[0].wrapping_mul(0x9e37).wrapping_add(i.0[1].wrapping_mul(0x79b9)) ^ seed as i64).rem_euclid(10) < 8
        };
        if let Ok(sel) = select_2d_quadratic(center, &mask, None) {
            prop_assert_eq!(sel.nodes.len(), 6);
            prop_assert!(sel.nodes.iter().all(|n| mask(*n)));
            prop_assert_eq!(sel.nodes[0], center);
            // node count = monomial count and the system is unisolvent
            let d = int_det_for_nodes(&sel.nodes.iter().map(|n| GridIndex([n.0[0] - cx, n.0[1] - cy])).collect::<Vec<_>>(), &MonomialBasis::new(2, 2));
            prop_assert!(d != 0);
        }
    }

    #[test]
    fn selection_is_deterministic_under_any_mask(seed in any::<u64>()) {
        let center = GridIndex([0i64, 0]);
        let mask = move |i: GridIndex<2>| {
            i == center || (i.0[0].wrapping_mul(31).wrapping_add(i.0[1].wrapping_mul(57)) ^ seed as i64).rem_euclid(7) < 5
        };
        let first = select_2d_quadratic(center, &mask, Some(Direction::EAST));
        let second = select_2d_quadratic(center, &mask, Some(Direction::EAST));
        match (first, second) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.nodes, b.nodes),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "non-deterministic outcome"),
        }
    }

    #[test]
    fn mask_monotone_outside_inspected_prefix(seed in any::<u64>(), extra in proptest::collection::vec((-3i64..=3, -3i64..=3), 0..10)) {
        // enlarging availability at indices the search never inspected
        // cannot change the selection
        let center = GridIndex([0i64, 0]);
        let base = move |i: GridIndex<2>| {
            i == center || (i.0[0].wrapping_mul(7).wrapping_add(i.0[1].wrapping_mul(13)) ^ seed as i64).rem_euclid(5) < 3
        };
        let recording = Recording { inner: base, queried: RefCell::new(HashSet::new()) };
        let Ok(sel) = select_2d_quadratic(center, &recording, Some(Direction::SOUTH)) else {
            return Ok(());
        };
        let queried = recording.queried.into_inner();
        let added: HashSet<GridIndex<2>> = extra
            .into_iter()
            .map(|(x, y)| GridIndex([x, y]))
            .filter(|i| !queried.contains(i))
            .collect();
        let enlarged = move |i: GridIndex<2>| base(i) || added.contains(&i);
        let again = select_2d_quadratic(center, &enlarged, Some(Direction::SOUTH)).unwrap();
        prop_assert_eq!(again.nodes, sel.nodes);
    }

    #[test]
    fn selection_3d_respects_mask(seed in any::<u64>()) {
        let center = GridIndex([0i64, 0, 0]);
        let mask = move |i: GridIndex<3>| {
            i == center
                || (i.0[0].wrapping_mul(3).wrapping_add(i.0[1].wrapping_mul(17)).wrapping_add(i.0[2].wrapping_mul(29)) ^ seed as i64).rem_euclid(6) < 5
        };
        if let Ok(sel) = select_3d_quadratic(center, &mask, None, None) {
            prop_assert_eq!(sel.nodes.len(), 10);
            prop_assert!(sel.nodes.iter().all(|n| mask(*n)));
            let d = int_det_for_nodes(&sel.nodes, &MonomialBasis::new(3, 2));
            prop_assert!(d != 0);
        }
    }
}

#[test]
fn full_mask_selections_match_enumerated_first_configs() {
    // with everything available, the selector returns the very first
    // configuration of the enumeration order for the same direction
    let sel = select_2d_quadratic(GridIndex([0i64, 0]), &FullMask, None).unwrap();
    let first = &enumerate_improved_2d()[0];
    let got: Vec<[i64; 3]> = sel.nodes.iter().map(|n| [n.0[0], n.0[1], 0]).collect();
    assert_eq!(got, first.nodes);
}
