//! System assembly: one equation per unknown.
//!
//! Full cells get the standard 7-point finite-volume divergence with
//! two-point face fluxes; faces on the domain box close with Dirichlet data
//! through a one-sided cubic ghost elimination. A partial cell contributes four
//! equations: a finite-volume balance over each component's cut volume
//! (aperture-weighted face fluxes plus the interface flux functional), the
//! value jump `p_a − p_b = J₁` at the interface centroid, and the flux jump
//! `(1/ρ_a)∂p/∂n|_a − (1/ρ_b)∂p/∂n|_b = J₂`.
//!
//! Interface fluxes come from 3D quadratic stencil selections restricted to
//! cells carrying the component, with the selection's zeroth node replaced
//! by the interface centroid so the interface unknown itself enters the
//! functional. The replacement keeps the selection unisolvent — the proof
//! only needs the zeroth node strictly off the step-3 plane, which holds for
//! any point inside the cell — and a runtime condition check (retrying other
//! directions, then degrading to a degree-1 fit) guards the numerics.

use super::classify::{CellClass, CellRecord};
use super::unknowns::{Component, Location, UnknownMap};
use super::{FLUX_CONDITION_LIMIT, SMALL_CELL_FRACTION};
use crate::error::{EbmError, InterpError, NoStencil};
use crate::grid::{layer_members, Direction, GridIndex, GridSpec};
use crate::interp::{
    assemble_vandermonde, normal_flux_functional, point_value_functional, LocalFrame,
    MonomialBasis, Point,
};
use crate::linsolve::SparseSystem;
use crate::stencil::select_3d_quadratic;
use std::collections::HashMap;

/// Problem data for the elliptic interface problem.
pub struct ProblemSpec {
    pub rho_a: f64,
    pub rho_b: f64,
    /// Right-hand side f of ∇·(∇p/ρ) = f.
    pub source: Box<dyn Fn(Point) -> f64 + Send + Sync>,
    /// J₁: jump \[p\] = p_a − p_b on the interface.
    pub jump_value: Box<dyn Fn(Point) -> f64 + Send + Sync>,
    /// J₂: jump [(1/ρ)∂p/∂n] with n pointing from a to b.
    pub jump_flux: Box<dyn Fn(Point) -> f64 + Send + Sync>,
    /// Dirichlet data on the domain box faces.
    pub dirichlet: Box<dyn Fn(Point) -> f64 + Send + Sync>,
}

impl ProblemSpec {
    pub fn rho(&self, comp: Component) -> f64 {
        match comp {
            Component::A => self.rho_a,
            Component::B => self.rho_b,
        }
    }
}

/// Assembly diagnostics.
#[derive(Clone, Debug, Default)]
pub struct AssemblyLog {
    /// Flux stencils that fell back to a degree-1 fit.
    pub degraded: Vec<([i64; 3], &'static str)>,
    /// Selections rejected by the condition check before one was accepted.
    pub direction_retries: usize,
    /// Aperture face fluxes dropped because the neighbor lacks the unknown.
    pub dropped_face_fluxes: usize,
    /// Component volumes slaved to their interface stencil.
    pub slaved_small_cells: usize,
    /// Largest flux-functional row (nonzero stencil weights).
    pub max_flux_entries: usize,
}

/// A component-restricted interpolation stencil anchored at the interface
/// centroid of a partial cell: node 0 is x_Γ carrying the interface unknown,
/// the rest are cell-center unknowns of the same component.
pub struct FluxStencil {
    pub cell: GridIndex<3>,
    pub comp: Component,
    pub degree: u32,
    pub nodes: Vec<Point>,
    pub unknowns: Vec<usize>,
    pub basis: MonomialBasis,
    pub frame: LocalFrame,
    pub condition: f64,
    /// Interface centroid (evaluation point) and unit normal a→b.
    pub at: Point,
    pub normal: [f64; 3],
}

impl FluxStencil {
    /// Row entries for `(1/ρ)·n·∇p` at the interface centroid.
    pub fn flux_row(&self, rho: f64) -> Result<Vec<(usize, f64)>, InterpError> {
        let w = normal_flux_functional(
            &self.nodes,
            &self.basis,
            &self.frame,
            self.at,
            self.normal,
            rho,
        )?;
        Ok(self.unknowns.iter().copied().zip(w).collect())
    }

    /// Row entries for the fitted polynomial's value at a point.
    pub fn value_row(&self, at: Point) -> Result<Vec<(usize, f64)>, InterpError> {
        let w = point_value_functional(&self.nodes, &self.basis, &self.frame, at)?;
        Ok(self.unknowns.iter().copied().zip(w).collect())
    }
}

/// Whether a cell's `comp` center unknown is determined by a finite-volume
/// balance (internal cells and majority fragments of partial cells). Slaved
/// minority fragments are excluded from stencil availability so that slaved
/// values form a one-way dependency on the balance-determined field instead
/// of a mutually-referencing web.
fn robust_carrier<const D: usize>(rec: &CellRecord<D>, comp: Component, h: f64) -> bool {
    match rec.class {
        CellClass::Partial => {
            let cut = rec.cut.as_ref().expect("partial cell has geometry");
            cut.vol(comp) >= SMALL_CELL_FRACTION * h * h * h
        }
        _ => rec.component == Some(comp),
    }
}

fn component_mask<'a, const D: usize>(
    grid: &'a GridSpec<D>,
    records: &'a [CellRecord<D>],
    comp: Component,
) -> impl Fn(GridIndex<D>) -> bool + 'a {
    move |idx: GridIndex<D>| {
        grid.contains(idx) && robust_carrier(&records[grid.linear(idx)], comp, grid.h)
    }
}

/// Axis direction pointing most deeply into `comp` from the interface
/// (the normal points a→b, so it is negated for component a).
fn preferred_direction(normal: [f64; 3], comp: Component) -> Direction {
    let into = match comp {
        Component::A => [-normal[0], -normal[1], -normal[2]],
        Component::B => normal,
    };
    let axis = (0..3)
        .max_by(|&i, &j| into[i].abs().partial_cmp(&into[j].abs()).unwrap())
        .unwrap();
    Direction {
        axis,
        sign: if into[axis] >= 0.0 { 1 } else { -1 },
    }
}

/// Builds the interface stencil for one (partial cell, component): a 3D
/// quadratic selection with the zeroth node replaced by x_Γ, retried across
/// direction preferences under the condition ceiling, degrading to a
/// degree-1 fit on four affinely independent nodes when no quadratic
/// stencil exists.
pub fn build_flux_stencil(
    grid: &GridSpec<3>,
    records: &[CellRecord<3>],
    map: &UnknownMap,
    cell: GridIndex<3>,
    comp: Component,
    log: &mut AssemblyLog,
) -> Result<FluxStencil, EbmError> {
    let lin = grid.linear(cell);
    let rec = &records[lin];
    let cut = rec.cut.as_ref().expect("flux stencil needs cut geometry");
    // two availability tiers: balance-determined unknowns first; all
    // carriers (including slaved minority centers) only when the robust
    // field alone cannot support a quadratic selection. The anchor cell is
    // admitted in both: its center only seeds the shell search and is
    // replaced by x_Γ in the node list.
    let robust = component_mask(grid, records, comp);
    let robust_mask = |idx: GridIndex<3>| idx == cell || robust(idx);
    let carrier_mask =
        |idx: GridIndex<3>| grid.contains(idx) && records[grid.linear(idx)].carries(comp);
    let x_gamma = cut.centroid;
    let frame = LocalFrame::new(x_gamma, grid.h);
    let iface_unknown = map
        .index(lin, comp, Location::Interface)
        .expect("partial cell has interface unknowns");

    let mut prefs = vec![preferred_direction(cut.normal, comp)];
    for d in Direction::canonical(3) {
        if d != prefs[0] {
            prefs.push(d);
        }
    }

    let basis2 = MonomialBasis::new(3, 2);
    for tier in 0..2 {
        for &pref in &prefs {
            let sel = {
                let result = if tier == 0 {
                    select_3d_quadratic(cell, &robust_mask, Some(pref), Some(pref))
                } else {
                    select_3d_quadratic(cell, &carrier_mask, Some(pref), Some(pref))
                };
                match result {
                    Ok(sel) => sel,
                    // preference only reorders the search; if one order
                    // finds nothing, none will
                    Err(NoStencil) => break,
                }
            };
            let mut nodes: Vec<Point> = Vec::with_capacity(10);
            let mut unknowns: Vec<usize> = Vec::with_capacity(10);
            nodes.push(x_gamma);
            unknowns.push(iface_unknown);
            for &n in &sel.nodes[1..] {
                nodes.push(grid.cell_center(n));
                unknowns.push(
                    map.index_of(grid, n, comp, Location::Center)
                        .expect("mask guarantees the unknown exists"),
                );
            }
            let v = assemble_vandermonde(&nodes, &basis2, &frame);
            let condition = crate::dense::condition_1(&v);
            if condition <= FLUX_CONDITION_LIMIT {
                return Ok(FluxStencil {
                    cell,
                    comp,
                    degree: 2,
                    nodes,
                    unknowns,
                    basis: basis2,
                    frame,
                    condition,
                    at: x_gamma,
                    normal: cut.normal,
                });
            }
            log.direction_retries += 1;
        }
    }

    // degrade: degree-1 fit on x_Γ plus three affinely independent centers
    log.degraded.push((cell.0, comp.name()));
    let mut nodes: Vec<Point> = vec![x_gamma];
    let mut unknowns: Vec<usize> = vec![iface_unknown];
    let mut dirs: Vec<[f64; 3]> = Vec::new();
    'scan: for layer in 1..=3u32 {
        for m in layer_members(cell, layer).members {
            if !carrier_mask(m) {
                continue;
            }
            let p = grid.cell_center(m);
            let mut d = [
                (p[0] - x_gamma[0]) / grid.h,
                (p[1] - x_gamma[1]) / grid.h,
                (p[2] - x_gamma[2]) / grid.h,
            ];
            // Gram-Schmidt against accepted directions
            for e in &dirs {
                let proj = d[0] * e[0] + d[1] * e[1] + d[2] * e[2];
                for a in 0..3 {
                    d[a] -= proj * e[a];
                }
            }
            let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if len < 1e-8 {
                continue;
            }
            for v in &mut d {
                *v /= len;
            }
            dirs.push(d);
            nodes.push(p);
            unknowns.push(
                map.index_of(grid, m, comp, Location::Center)
                    .expect("mask guarantees the unknown exists"),
            );
            if nodes.len() == 4 {
                break 'scan;
            }
        }
    }
    if nodes.len() < 4 {
        return Err(EbmError::NoFallback {
            cell: cell.0,
            component: comp.name(),
        });
    }
    let basis1 = MonomialBasis::new(3, 1);
    let v = assemble_vandermonde(&nodes, &basis1, &frame);
    let condition = crate::dense::condition_1(&v);
    Ok(FluxStencil {
        cell,
        comp,
        degree: 1,
        nodes,
        unknowns,
        basis: basis1,
        frame,
        condition,
        at: x_gamma,
        normal: cut.normal,
    })
}

/// The normal-flux functional of one partial cell and component as row
/// entries over unknown indices: for nodal values v, Σ wᵢ·vᵢ approximates
/// `(1/ρ)∂p/∂n` at the interface centroid (n pointing a→b).
pub fn build_flux_row(
    grid: &GridSpec<3>,
    records: &[CellRecord<3>],
    map: &UnknownMap,
    cell: GridIndex<3>,
    comp: Component,
    rho: f64,
) -> Result<Vec<(usize, f64)>, EbmError> {
    let mut log = AssemblyLog::default();
    let stencil = build_flux_stencil(grid, records, map, cell, comp, &mut log)?;
    Ok(stencil.flux_row(rho)?)
}

/// Interface stencil plus its flux-functional row, keyed by (cell, comp).
type FluxRowMap = HashMap<(usize, Component), (FluxStencil, Vec<(usize, f64)>)>;

struct RowBuilder {
    triplets: Vec<(usize, usize, f64)>,
    rhs: Vec<f64>,
}

impl RowBuilder {
    fn add(&mut self, row: usize, col: usize, v: f64) {
        self.triplets.push((row, col, v));
    }
}

/// Row taxonomy, used by diagnostics and the truncation probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RowClass {
    /// Finite-volume balance of a full (internal or boundary) cell.
    FullCell,
    /// Finite-volume balance of one component of a partial cell.
    PartialBalance,
    /// Small-cut center unknown slaved to its interface stencil.
    SlavedCenter,
    /// Interface value jump row.
    JumpValue,
    /// Interface flux jump row.
    JumpFlux,
}

/// Classifies each assembled row (row index = unknown index).
pub fn row_classes(records: &[CellRecord<3>], map: &UnknownMap, h: f64) -> Vec<RowClass> {
    (0..map.n_unknowns())
        .map(|u| {
            let (lin, comp, loc) = map.unknown_info(u);
            let rec = &records[lin];
            match (rec.class, loc) {
                (CellClass::Partial, Location::Interface) => match comp {
                    Component::A => RowClass::JumpValue,
                    Component::B => RowClass::JumpFlux,
                },
                (CellClass::Partial, Location::Center) => {
                    let cut = rec.cut.as_ref().expect("partial cell has geometry");
                    if cut.vol(comp) < SMALL_CELL_FRACTION * h * h * h {
                        RowClass::SlavedCenter
                    } else {
                        RowClass::PartialBalance
                    }
                }
                _ => RowClass::FullCell,
            }
        })
        .collect()
}

/// Assembles the sparse system: one row per unknown.
pub fn assemble(
    grid: &GridSpec<3>,
    records: &[CellRecord<3>],
    spec: &ProblemSpec,
    map: &UnknownMap,
) -> Result<(SparseSystem, AssemblyLog), EbmError> {
    assemble_threaded(grid, records, spec, map, 1)
}

/// Like [`assemble`], with the per-cell interface-stencil construction
/// partitioned across `threads` workers. Results are merged in cell order,
/// so the assembled system is identical for any thread count.
pub fn assemble_threaded(
    grid: &GridSpec<3>,
    records: &[CellRecord<3>],
    spec: &ProblemSpec,
    map: &UnknownMap,
    threads: usize,
) -> Result<(SparseSystem, AssemblyLog), EbmError> {
    let h = grid.h;
    let h3 = h * h * h;
    let mut log = AssemblyLog::default();
    let mut b = RowBuilder {
        triplets: Vec::new(),
        rhs: vec![0.0; map.n_unknowns()],
    };

    // interface stencils and their flux rows, one per (partial cell, comp)
    let tasks: Vec<(usize, Component)> = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.class == CellClass::Partial)
        .flat_map(|(lin, _)| [(lin, Component::A), (lin, Component::B)])
        .collect();
    let build_one = |&(lin, comp): &(usize, Component)| {
        let mut local = AssemblyLog::default();
        let stencil = build_flux_stencil(grid, records, map, records[lin].index, comp, &mut local)?;
        let row = stencil.flux_row(spec.rho(comp))?;
        Ok::<_, EbmError>(((lin, comp), stencil, row, local))
    };
    let mut built = Vec::with_capacity(tasks.len());
    if threads <= 1 {
        for t in &tasks {
            built.push(build_one(t)?);
        }
    } else {
        let chunk = tasks.len().div_ceil(threads).max(1);
        let mut partials: Vec<Result<Vec<_>, EbmError>> = Vec::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = tasks
                .chunks(chunk)
                .map(|slice| scope.spawn(move || slice.iter().map(build_one).collect()))
                .collect();
            for handle in handles {
                partials.push(handle.join().expect("assembly worker panicked"));
            }
        });
        for part in partials {
            built.extend(part?);
        }
    }
    let mut flux_rows: FluxRowMap = HashMap::new();
    for (key, stencil, row, local) in built {
        log.degraded.extend(local.degraded);
        log.direction_retries += local.direction_retries;
        log.max_flux_entries = log.max_flux_entries.max(row.len());
        flux_rows.insert(key, (stencil, row));
    }

    // aperture-weighted two-point face flux into the balance at `row`;
    // `alpha` is 1 for full cells
    let face_flux = |b: &mut RowBuilder,
                     row: usize,
                     self_unknown: usize,
                     idx: GridIndex<3>,
                     comp: Component,
                     rho: f64,
                     axis: usize,
                     side: i64,
                     alpha: f64,
                     log: &mut AssemblyLog| {
        if alpha <= 1e-12 {
            return;
        }
        let nb = idx.step(axis, side);
        let coeff = alpha * h / rho;
        if grid.contains(nb) {
            if let Some(u_nb) = map.index_of(grid, nb, comp, Location::Center) {
                b.add(row, u_nb, coeff);
                b.add(row, self_unknown, -coeff);
            } else {
                // geometry says this face touches `comp` but the neighbor
                // carries only the other component (grazing-cut mismatch);
                // the aperture is O(h) small — drop the flux and log it
                log.dropped_face_fluxes += 1;
            }
            return;
        }
        // domain box face: Dirichlet closure
        let mut x_f = grid.cell_center(idx);
        x_f[axis] += side as f64 * 0.5 * h;
        let g = (spec.dirichlet)(x_f);
        let inner = idx.step(axis, -side);
        let inner2 = idx.step(axis, -2 * side);
        let u1 = map.index_of(grid, inner, comp, Location::Center);
        let u2 = map.index_of(grid, inner2, comp, Location::Center);
        if alpha >= 1.0 - 1e-12 {
            if let (Some(u1), Some(u2)) = (u1, u2) {
                // cubic fit through (0,g), (h/2,p0), (3h/2,p1), (5h/2,p2):
                // flux_out = (h/60ρ)(184g − 225 p0 + 50 p1 − 9 p2)
                b.add(row, self_unknown, -225.0 * h / (60.0 * rho));
                b.add(row, u1, 50.0 * h / (60.0 * rho));
                b.add(row, u2, -9.0 * h / (60.0 * rho));
                b.rhs[row] -= 184.0 * g * h / (60.0 * rho);
                return;
            }
            if let Some(u1) = u1 {
                // quadratic ghost: flux_out = (h/3ρ)(8g + p_inner − 9 p_self)
                b.add(row, self_unknown, -3.0 * h / rho);
                b.add(row, u1, h / (3.0 * rho));
                b.rhs[row] -= 8.0 * g * h / (3.0 * rho);
                return;
            }
        }
        // linear closure for cut boundary faces: flux_out = (2αh/ρ)(g − p)
        b.add(row, self_unknown, -2.0 * coeff);
        b.rhs[row] -= 2.0 * coeff * g;
    };

    for (lin, rec) in records.iter().enumerate() {
        let idx = rec.index;
        let center = grid.cell_center(idx);
        match rec.class {
            CellClass::Partial => {
                let cut = rec.cut.as_ref().expect("partial cell has geometry");
                let x_gamma = cut.centroid;
                for comp in [Component::A, Component::B] {
                    let row = map.index(lin, comp, Location::Center).unwrap();
                    let rho = spec.rho(comp);
                    let vol = cut.vol(comp);
                    let (stencil, flux) = &flux_rows[&(lin, comp)];
                    if vol < SMALL_CELL_FRACTION * h3 {
                        // slave the center to the interface stencil
                        log.slaved_small_cells += 1;
                        b.add(row, row, 1.0);
                        for (u, w) in stencil.value_row(center)? {
                            b.add(row, u, -w);
                        }
                        b.rhs[row] = 0.0;
                        continue;
                    }
                    for axis in 0..3 {
                        for (side_i, side) in [(-1i64, 0usize), (1, 1)] {
                            let alpha = cut.aperture(comp, axis, side);
                            face_flux(
                                &mut b, row, row, idx, comp, rho, axis, side_i, alpha, &mut log,
                            );
                        }
                    }
                    // interface flux with outward sign: +n for a, −n for b
                    let sign = match comp {
                        Component::A => 1.0,
                        Component::B => -1.0,
                    };
                    for &(u, w) in flux {
                        b.add(row, u, sign * cut.area * w);
                    }
                    b.rhs[row] += (spec.source)(center) * vol;
                }
                // [p] jump row at the a-interface unknown
                let row_p = map.index(lin, Component::A, Location::Interface).unwrap();
                let uia = row_p;
                let uib = map.index(lin, Component::B, Location::Interface).unwrap();
                b.add(row_p, uia, 1.0);
                b.add(row_p, uib, -1.0);
                b.rhs[row_p] = (spec.jump_value)(x_gamma);
                // [flux] jump row at the b-interface unknown
                let row_f = uib;
                for &(u, w) in &flux_rows[&(lin, Component::A)].1 {
                    b.add(row_f, u, w);
                }
                for &(u, w) in &flux_rows[&(lin, Component::B)].1 {
                    b.add(row_f, u, -w);
                }
                b.rhs[row_f] = (spec.jump_flux)(x_gamma);
            }
            _ => {
                let comp = rec.component.unwrap();
                let rho = spec.rho(comp);
                let row = map.index(lin, comp, Location::Center).unwrap();
                for axis in 0..3 {
                    for side in [-1i64, 1] {
                        face_flux(&mut b, row, row, idx, comp, rho, axis, side, 1.0, &mut log);
                    }
                }
                b.rhs[row] += (spec.source)(center) * h3;
            }
        }
    }

    let sys = SparseSystem::from_triplets(map.n_unknowns(), &b.triplets, b.rhs)?;
    Ok((sys, log))
}
