//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line. Run with `cargo test --test acceptance`
//! (add `-- --nocapture` to see the lines for passing criteria too).

#![allow(clippy::needless_range_loop)] // explicit indices read better here

use cutstencil::ebm::{
    classify, compute_geometry, manufactured_case, no_interface_case, observed_orders,
    solve_and_measure, Component, UnknownMap,
};
use cutstencil::grid::GridIndex;
use cutstencil::interp::{evaluate, fit, LocalFrame, MonomialBasis, Point};
use cutstencil::linsolve::SparseSystem;
use cutstencil::oracle::{
    enumerate_improved_2d, enumerate_improved_3d, enumerate_original_2d, summarize,
};
use cutstencil::stencil::{select_2d_cubic, select_2d_quadratic, select_3d_quadratic, SetMask};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::HashSet;
use std::time::Instant;

const H: f64 = 0.43;

fn phys<const D: usize>(n: GridIndex<D>) -> Point {
    let mut p = [0.0; 3];
    for a in 0..D {
        p[a] = n.0[a] as f64 * H;
    }
    p
}

fn poly(basis: &MonomialBasis, coeffs: &[f64], p: Point) -> f64 {
    basis.row(p).iter().zip(coeffs).map(|(m, c)| m * c).sum()
}

/// Random availability mask over the Chebyshev-`radius` box, center forced.
fn random_mask<const D: usize>(
    rng: &mut StdRng,
    center: GridIndex<D>,
    radius: i64,
    density: f64,
) -> SetMask<D> {
    let mut set = HashSet::new();
    let mut offsets = vec![[0i64; D]];
    for a in 0..D {
        let mut next = Vec::new();
        for base in offsets {
            for d in -radius..=radius {
                let mut o = base;
                o[a] = d;
                next.push(o);
            }
        }
        offsets = next;
    }
    for o in offsets {
        if rng.random::<f64>() < density {
            set.insert(center.offset(o));
        }
    }
    set.insert(center);
    SetMask(set)
}

#[test]
fn criterion_1_quadratic_exactness_under_random_masks() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xC0FFEE);
    let basis2 = MonomialBasis::new(2, 2);
    let basis3 = MonomialBasis::new(3, 2);
    let mut worst = 0.0f64;

    let mut done2 = 0;
    while done2 < 200 {
        let center: GridIndex<2> =
            GridIndex([rng.random_range(-10i64..10), rng.random_range(-10i64..10)]);
        let mask = random_mask(&mut rng, center, 3, 0.75);
        let Ok(sel) = select_2d_quadratic(center, &mask, None) else {
            continue;
        };
        let coeffs: Vec<f64> = (0..6).map(|_| rng.random_range(-2.0..2.0)).collect();
        let nodes: Vec<Point> = sel.nodes.iter().map(|n| phys(*n)).collect();
        let values: Vec<f64> = nodes.iter().map(|p| poly(&basis2, &coeffs, *p)).collect();
        let frame = LocalFrame::new(phys(sel.local_origin), H);
        let f = fit(&nodes, &values, &basis2, &frame).unwrap();
        let c = phys(center);
        for _ in 0..20 {
            let at = [
                c[0] + rng.random_range(-3.0..3.0) * H,
                c[1] + rng.random_range(-3.0..3.0) * H,
                0.0,
            ];
            let want = poly(&basis2, &coeffs, at);
            let rel = (evaluate(&f, at) - want).abs() / (1.0 + want.abs());
            worst = worst.max(rel);
            assert!(rel <= 1e-9, "2D mask {done2}: relative error {rel:e}");
        }
        done2 += 1;
    }

    let mut done3 = 0;
    while done3 < 200 {
        let center: GridIndex<3> = GridIndex([
            rng.random_range(-10i64..10),
            rng.random_range(-10i64..10),
            rng.random_range(-10i64..10),
        ]);
        let mask = random_mask(&mut rng, center, 3, 0.85);
        let Ok(sel) = select_3d_quadratic(center, &mask, None, None) else {
            continue;
        };
        let coeffs: Vec<f64> = (0..10).map(|_| rng.random_range(-2.0..2.0)).collect();
        let nodes: Vec<Point> = sel.nodes.iter().map(|n| phys(*n)).collect();
        let values: Vec<f64> = nodes.iter().map(|p| poly(&basis3, &coeffs, *p)).collect();
        let frame = LocalFrame::new(phys(sel.local_origin), H);
        let f = fit(&nodes, &values, &basis3, &frame).unwrap();
        let c = phys(center);
        for _ in 0..20 {
            let at = [
                c[0] + rng.random_range(-3.0..3.0) * H,
                c[1] + rng.random_range(-3.0..3.0) * H,
                c[2] + rng.random_range(-3.0..3.0) * H,
            ];
            let want = poly(&basis3, &coeffs, at);
            let rel = (evaluate(&f, at) - want).abs() / (1.0 + want.abs());
            worst = worst.max(rel);
            assert!(rel <= 1e-9, "3D mask {done3}: relative error {rel:e}");
        }
        done3 += 1;
    }

    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 5.0, "criterion 1 runtime {dt:.2}s exceeds 5s");
    println!(
        "ACCEPTANCE 1 PASS: 200 masked 2D + 200 masked 3D quadratic fits reproduce random \
         degree-2 polynomials at 20 points each (worst relative error {worst:.2e}, {dt:.2}s)"
    );
}

#[test]
fn criterion_2_exhaustive_unisolvence() {
    let start = Instant::now();
    let r2 = enumerate_improved_2d();
    let s2 = summarize(&r2);
    assert_eq!(s2.count, 320, "2D sweep must cover 4·8·C(5,3) configs");
    assert_eq!(s2.singular, 0, "no singular improved-2D configuration");
    assert!(r2.iter().all(|r| r.det_exact != 0));
    let r3 = enumerate_improved_3d();
    let s3 = summarize(&r3);
    assert_eq!(s3.count, 92160, "3D sweep must cover 6·8·6·320 configs");
    assert_eq!(s3.singular, 0, "no singular 3D configuration");
    assert!(r3.iter().all(|r| r.det_exact != 0));
    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 60.0, "criterion 2 runtime {dt:.2}s exceeds 60s");
    println!(
        "ACCEPTANCE 2 PASS: improved-2D 320/320 and 3D 92160/92160 non-singular by exact \
         integer determinant (min |det| {} / {}, {dt:.2}s)",
        s2.min_abs_det, s3.min_abs_det
    );
}

#[test]
fn criterion_3_counterexample_recovery() {
    let reports = enumerate_original_2d();
    assert_eq!(reports.len(), 128);
    let singular: Vec<HashSet<(i64, i64)>> = reports
        .iter()
        .filter(|r| r.singular)
        .map(|r| r.nodes.iter().map(|n| (n[0], n[1])).collect())
        .collect();
    assert!(
        !singular.is_empty(),
        "the superseded algorithm must exhibit a singular configuration"
    );
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
                "singular class not closed under dihedral symmetry"
            );
        }
    }
    println!(
        "ACCEPTANCE 3 PASS: original-algorithm sweep finds {} singular of 128 configurations, \
         closed under the dihedral symmetry group",
        singular.len()
    );
}

#[test]
fn criterion_4_cubic_extension_exactness() {
    let mut rng = StdRng::seed_from_u64(0xC0B1C);
    let basis = MonomialBasis::new(2, 3);
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 200 {
        let center: GridIndex<2> =
            GridIndex([rng.random_range(-10i64..10), rng.random_range(-10i64..10)]);
        let mask = random_mask(&mut rng, center, 4, 0.8);
        let Ok(sel) = select_2d_cubic(center, &mask, None) else {
            continue;
        };
        let coeffs: Vec<f64> = (0..10).map(|_| rng.random_range(-2.0..2.0)).collect();
        let nodes: Vec<Point> = sel.nodes.iter().map(|n| phys(*n)).collect();
        let values: Vec<f64> = nodes.iter().map(|p| poly(&basis, &coeffs, *p)).collect();
        let frame = LocalFrame::new(phys(sel.local_origin), H);
        let f = fit(&nodes, &values, &basis, &frame).unwrap();
        let c = phys(center);
        for _ in 0..20 {
            let at = [
                c[0] + rng.random_range(-3.0..3.0) * H,
                c[1] + rng.random_range(-3.0..3.0) * H,
                0.0,
            ];
            let want = poly(&basis, &coeffs, at);
            let rel = (evaluate(&f, at) - want).abs() / (1.0 + want.abs());
            worst = worst.max(rel);
            assert!(rel <= 1e-9, "cubic mask {done}: relative error {rel:e}");
        }
        done += 1;
    }
    println!(
        "ACCEPTANCE 4 PASS: 200 masked 2D cubic selections reproduce random degree-3 \
         polynomials (worst relative error {worst:.2e})"
    );
}

/// Mat-vec written from scratch for the residual contract.
fn independent_residual(sys: &SparseSystem, x: &[f64]) -> f64 {
    let mut rr = 0.0f64;
    let mut bb = 0.0f64;
    for r in 0..sys.n_unknowns {
        let mut ax = 0.0;
        for e in sys.row_ptr[r]..sys.row_ptr[r + 1] {
            ax += sys.values[e] * x[sys.col_idx[e]];
        }
        rr += (ax - sys.rhs[r]) * (ax - sys.rhs[r]);
        bb += sys.rhs[r] * sys.rhs[r];
    }
    if bb > 0.0 {
        (rr / bb).sqrt()
    } else {
        rr.sqrt()
    }
}

#[test]
fn criterion_5_convergence_reproduction() {
    let start = Instant::now();
    let mut errors = Vec::new();
    for n in [10usize, 20, 40] {
        let case = manufactured_case(n);
        let run = solve_and_measure(&case, 1e-10, 50_000).unwrap();
        // fold criterion 8's contract over these solves as well
        assert!((run.residual - independent_residual(&run.system, &run.solution)).abs() <= 1e-14);
        assert!(run.residual <= 1e-10);
        println!(
            "  mesh {n}³: L∞ = {:.8}, {} iterations, {:.2}s",
            run.linf_error, run.iterations, run.seconds
        );
        errors.push(run.linf_error);
    }
    let orders = observed_orders(&errors);
    let avg = orders.iter().sum::<f64>() / orders.len() as f64;
    for (k, o) in orders.iter().enumerate() {
        assert!(
            *o >= 1.5,
            "order between meshes {} and {} is {o:.3} < 1.5",
            [10, 20][k],
            [20, 40][k]
        );
    }
    assert!(avg >= 1.8, "average order {avg:.3} < 1.8");
    let ratio = errors[0] / 0.19727211;
    let dt = start.elapsed().as_secs_f64();
    assert!(dt < 300.0, "criterion 5 runtime {dt:.1}s exceeds 5 min");
    println!(
        "ACCEPTANCE 5 PASS: L∞ orders {:.3?} (average {avg:.3}); 10³ error {:.5} is {ratio:.2}× \
         the 0.19727 reference value (reported, not gated); total {dt:.1}s",
        orders, errors[0]
    );
}

#[test]
fn criterion_6_flux_row_sparsity() {
    let case = manufactured_case(20);
    let mut records = classify(&case.grid, &case.level);
    compute_geometry(&case.grid, &case.level, &mut records);
    let map = UnknownMap::build(&case.grid, &records);
    // a fixed quadratic for the in-situ degree-2 exactness re-check with
    // the interface-centroid node replacement
    let q = |x: Point| {
        0.7 - 0.4 * x[0] + 0.9 * x[2] + 0.35 * x[0] * x[1] - 0.2 * x[1] * x[2] + 0.15 * x[0] * x[0]
    };
    let grad_q = |x: Point| {
        [
            -0.4 + 0.35 * x[1] + 0.3 * x[0],
            0.35 * x[0] - 0.2 * x[2],
            0.9 - 0.2 * x[1],
        ]
    };
    let mut rows = 0usize;
    let mut worst = 0usize;
    let mut log = cutstencil::ebm::AssemblyLog::default();
    for rec in records.iter().filter(|r| r.is_partial()) {
        for comp in [Component::A, Component::B] {
            let rho = case.problem.rho(comp);
            let stencil = cutstencil::ebm::build_flux_stencil(
                &case.grid, &records, &map, rec.index, comp, &mut log,
            )
            .unwrap();
            let row = stencil.flux_row(rho).unwrap();
            assert!(
                row.len() <= 10,
                "cell {:?} comp {}: {} weights",
                rec.index,
                comp.name(),
                row.len()
            );
            assert_eq!(stencil.degree, 2, "no degraded stencils at 20³");
            // quadratics are reproduced exactly through the functional
            let cut = rec.cut.as_ref().unwrap();
            let got: f64 = stencil
                .nodes
                .iter()
                .zip(&row)
                .map(|(p, (_, w))| w * q(*p))
                .sum();
            let g = grad_q(cut.centroid);
            let want = (g[0] * cut.normal[0] + g[1] * cut.normal[1] + g[2] * cut.normal[2]) / rho;
            assert!(
                (got - want).abs() <= 1e-8 * (1.0 + want.abs()),
                "cell {:?} comp {}: flux {got} vs analytic {want}",
                rec.index,
                comp.name()
            );
            worst = worst.max(row.len());
            rows += 1;
        }
    }
    println!(
        "ACCEPTANCE 6 PASS: all {rows} partial-cell flux functionals at 20³ have ≤ 10 nonzero \
         weights (max {worst}) and reproduce quadratic fluxes to 1e-8, beating the 19-point \
         baseline"
    );
}

#[test]
fn criterion_7_no_interface_sanity() {
    let mut errors = Vec::new();
    for n in [10usize, 20, 40] {
        let case = no_interface_case(n);
        let run = solve_and_measure(&case, 1e-10, 50_000).unwrap();
        assert!((run.residual - independent_residual(&run.system, &run.solution)).abs() <= 1e-14);
        errors.push(run.linf_error);
    }
    let orders = observed_orders(&errors);
    for o in &orders {
        assert!(*o >= 1.9, "no-interface order {o:.3} < 1.9");
    }
    println!(
        "ACCEPTANCE 7 PASS: smooth ρ≡1 Poisson orders {:.3?} over 10/20/40 (≥ 1.9 each)",
        orders
    );
}

#[test]
fn criterion_8_residual_contract() {
    let mut checked = 0;
    let mut worst = 0.0f64;
    for (case, tol) in [
        (manufactured_case(10), 1e-10),
        (no_interface_case(8), 1e-11),
    ] {
        let run = solve_and_measure(&case, tol, 50_000).unwrap();
        let diff = (run.residual - independent_residual(&run.system, &run.solution)).abs();
        assert!(diff <= 1e-14, "residual mismatch {diff:e}");
        worst = worst.max(diff);
        checked += 1;
    }
    // and a hand-built system
    let sys = SparseSystem::from_triplets(
        3,
        &[
            (0, 0, 4.0),
            (0, 1, -1.0),
            (1, 0, -1.0),
            (1, 1, 4.0),
            (1, 2, -1.0),
            (2, 1, -1.0),
            (2, 2, 4.0),
        ],
        vec![1.0, -2.0, 0.5],
    )
    .unwrap();
    let (x, stats) = cutstencil::linsolve::solve(&sys, 1e-12, 100).unwrap();
    let diff = (stats.residual - independent_residual(&sys, &x)).abs();
    assert!(diff <= 1e-14);
    worst = worst.max(diff);
    checked += 1;
    println!(
        "ACCEPTANCE 8 PASS: {checked} reported residuals re-verified by an independent mat-vec \
         (worst disagreement {worst:.2e} ≤ 1e-14)"
    );
}
