//! Cell classification from level-set corner signs.
//!
//! A cell whose corners all carry the same sign is internal to one component
//! (flagged `Boundary` instead when it touches the domain box — its
//! treatment differs only through the Dirichlet face closure). Mixed corner
//! signs make a partial cell. `External` exists in the taxonomy but is
//! unused for a box domain. Corner values that are exactly zero are
//! perturbed to the positive side by `CORNER_PERTURBATION · h`, so
//! classification is deterministic and no corner is ever "on" the interface.

use super::geometry::CutGeometry;
use super::levelset::LevelSet;
use super::unknowns::Component;
use super::CORNER_PERTURBATION;
use crate::grid::{GridIndex, GridSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellClass {
    External,
    Internal,
    Boundary,
    Partial,
}

/// Per-cell classification plus (for partial cells) cut geometry.
#[derive(Clone, Debug)]
pub struct CellRecord<const D: usize> {
    pub index: GridIndex<D>,
    pub class: CellClass,
    /// The owning component for non-partial cells; `None` for partial cells,
    /// which carry both.
    pub component: Option<Component>,
    /// Populated by `compute_geometry` for partial cells (3D only).
    pub cut: Option<CutGeometry>,
}

impl<const D: usize> CellRecord<D> {
    pub fn is_partial(&self) -> bool {
        self.class == CellClass::Partial
    }

    /// Whether this cell's center carries an unknown for `comp`.
    pub fn carries(&self, comp: Component) -> bool {
        self.is_partial() || self.component == Some(comp)
    }
}

/// Level-set value at a lattice corner with the exact-zero perturbation.
pub fn corner_phi<const D: usize>(
    grid: &GridSpec<D>,
    level: &impl LevelSet<D>,
    corner: [usize; D],
) -> f64 {
    let v = level.phi(grid.corner(corner));
    if v == 0.0 {
        CORNER_PERTURBATION * grid.h
    } else {
        v
    }
}

fn touches_box<const D: usize>(grid: &GridSpec<D>, idx: GridIndex<D>) -> bool {
    (0..D).any(|a| idx.0[a] == 0 || idx.0[a] as usize == grid.n[a] - 1)
}

/// Majority corner sign of a cell (ties go to component a); used to
/// reclassify cells whose reconstructed plane misses the cell.
pub fn majority_component<const D: usize>(
    grid: &GridSpec<D>,
    level: &impl LevelSet<D>,
    idx: GridIndex<D>,
) -> Component {
    let mut sum = 0.0;
    for_each_corner::<D>(idx, |corner| {
        sum += corner_phi(grid, level, corner);
    });
    if sum <= 0.0 {
        Component::A
    } else {
        Component::B
    }
}

fn for_each_corner<const D: usize>(idx: GridIndex<D>, mut f: impl FnMut([usize; D])) {
    for bits in 0..(1usize << D) {
        let mut corner = [0usize; D];
        for a in 0..D {
            corner[a] = idx.0[a] as usize + ((bits >> a) & 1);
        }
        f(corner);
    }
}

/// Classifies every cell of the grid by its corner signs.
pub fn classify<const D: usize>(
    grid: &GridSpec<D>,
    level: &impl LevelSet<D>,
) -> Vec<CellRecord<D>> {
    // corner values are shared between the up-to-2^D adjacent cells;
    // evaluate the (n+1)^D lattice once
    let corner_n: Vec<usize> = grid.n.iter().map(|&c| c + 1).collect();
    let total_corners: usize = corner_n.iter().product();
    let corner_lin = |corner: &[usize; D]| -> usize {
        let mut lin = 0usize;
        for a in (0..D).rev() {
            lin = lin * corner_n[a] + corner[a];
        }
        lin
    };
    let mut phi = vec![0.0f64; total_corners];
    {
        let mut corner = [0usize; D];
        for lin in 0..total_corners {
            let mut rem = lin;
            for a in 0..D {
                corner[a] = rem % corner_n[a];
                rem /= corner_n[a];
            }
            phi[lin] = corner_phi(grid, level, corner);
        }
    }

    grid.indices()
        .map(|idx| {
            let mut neg = 0usize;
            let mut pos = 0usize;
            for_each_corner::<D>(idx, |corner| {
                if phi[corner_lin(&corner)] < 0.0 {
                    neg += 1;
                } else {
                    pos += 1;
                }
            });
            let (class, component) = if neg > 0 && pos > 0 {
                (CellClass::Partial, None)
            } else {
                let comp = if neg > 0 { Component::A } else { Component::B };
                let class = if touches_box(grid, idx) {
                    CellClass::Boundary
                } else {
                    CellClass::Internal
                };
                (class, Some(comp))
            };
            CellRecord {
                index: idx,
                class,
                component,
                cut: None,
            }
        })
        .collect()
}
