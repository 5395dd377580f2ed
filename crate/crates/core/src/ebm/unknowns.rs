//! Unknown numbering: full cells carry one cell-center unknown; partial
//! cells carry four — two at the cell center and two at the interface
//! centroid, one per component.

use super::classify::{CellClass, CellRecord};
use crate::grid::{GridIndex, GridSpec};

/// Material component: a is the level set's negative side.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Component {
    A,
    B,
}

impl Component {
    pub fn other(self) -> Component {
        match self {
            Component::A => Component::B,
            Component::B => Component::A,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::A => "a",
            Component::B => "b",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Location {
    Center,
    Interface,
}

#[derive(Clone, Copy, Debug)]
pub enum CellUnknowns {
    /// One unknown: the cell center of the owning component.
    Single(Component),
    /// Four unknowns in order: (A, Center), (B, Center), (A, Interface),
    /// (B, Interface), starting at the stored base index.
    Partial,
}

/// Bijection between (cell, component, location) and contiguous unknown
/// indices, in cell-linear order.
pub struct UnknownMap {
    base: Vec<usize>,
    kind: Vec<CellUnknowns>,
    reverse: Vec<(usize, Component, Location)>,
}

impl UnknownMap {
    pub fn build<const D: usize>(grid: &GridSpec<D>, records: &[CellRecord<D>]) -> UnknownMap {
        assert_eq!(records.len(), grid.num_cells());
        let mut base = Vec::with_capacity(records.len());
        let mut kind = Vec::with_capacity(records.len());
        let mut reverse = Vec::new();
        for (lin, rec) in records.iter().enumerate() {
            debug_assert_eq!(grid.linear(rec.index), lin);
            base.push(reverse.len());
            match rec.class {
                CellClass::Partial => {
                    kind.push(CellUnknowns::Partial);
                    reverse.push((lin, Component::A, Location::Center));
                    reverse.push((lin, Component::B, Location::Center));
                    reverse.push((lin, Component::A, Location::Interface));
                    reverse.push((lin, Component::B, Location::Interface));
                }
                _ => {
                    let comp = rec.component.expect("non-partial cell has a component");
                    kind.push(CellUnknowns::Single(comp));
                    reverse.push((lin, comp, Location::Center));
                }
            }
        }
        UnknownMap {
            base,
            kind,
            reverse,
        }
    }

    pub fn n_unknowns(&self) -> usize {
        self.reverse.len()
    }

    pub fn cell_kind(&self, cell_lin: usize) -> CellUnknowns {
        self.kind[cell_lin]
    }

    /// Unknown index of (cell, component, location); `None` when the cell
    /// does not carry that unknown.
    pub fn index(&self, cell_lin: usize, comp: Component, loc: Location) -> Option<usize> {
        match self.kind[cell_lin] {
            CellUnknowns::Single(c) => {
                (c == comp && loc == Location::Center).then_some(self.base[cell_lin])
            }
            CellUnknowns::Partial => {
                let off = match (comp, loc) {
                    (Component::A, Location::Center) => 0,
                    (Component::B, Location::Center) => 1,
                    (Component::A, Location::Interface) => 2,
                    (Component::B, Location::Interface) => 3,
                };
                Some(self.base[cell_lin] + off)
            }
        }
    }

    pub fn index_of<const D: usize>(
        &self,
        grid: &GridSpec<D>,
        idx: GridIndex<D>,
        comp: Component,
        loc: Location,
    ) -> Option<usize> {
        if !grid.contains(idx) {
            return None;
        }
        self.index(grid.linear(idx), comp, loc)
    }

    pub fn unknown_info(&self, u: usize) -> (usize, Component, Location) {
        self.reverse[u]
    }
}
