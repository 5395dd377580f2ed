//! Uniform Cartesian lattice geometry and the neighbor-layer topology on
//! which all stencil selection is defined.
//!
//! A *layer* (or shell) of radius `L` around a center index `c` is the set of
//! indices `m` with Chebyshev distance `max_a |m[a] - c[a]| = L`. In 2D the
//! shells have 1, 8, 16, 24, ... members; in 3D 1, 26, 98, ... members.
//!
//! 2D shells carry a canonical ring order: counter-clockwise starting from
//! the `+x` extremity `(c.x + L, c.y)`, so "consecutive" members and
//! wrap-around windows are well-defined. 3D shells have no ring order;
//! consecutive selection in 3D is only ever performed inside 2D sub-planes
//! (see [`PlaneEmbedding`]), so 3D members are emitted in face/edge/corner
//! class order (lexicographic within each class) purely for determinism.

use crate::error::GridError;

/// Lattice index. Components may be negative as intermediate offsets;
/// only indices used as unknown locations must lie in `[0, n)` per axis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GridIndex<const D: usize>(pub [i64; D]);

impl<const D: usize> GridIndex<D> {
    /// Component-wise translation.
    pub fn offset(self, delta: [i64; D]) -> Self {
        let mut out = self.0;
        for a in 0..D {
            out[a] += delta[a];
        }
        GridIndex(out)
    }

    /// Translation by `steps` along a single axis.
    pub fn step(self, axis: usize, steps: i64) -> Self {
        let mut out = self.0;
        out[axis] += steps;
        GridIndex(out)
    }

    /// Chebyshev (max-norm) distance.
    pub fn chebyshev(self, other: Self) -> i64 {
        (0..D)
            .map(|a| (self.0[a] - other.0[a]).abs())
            .max()
            .unwrap_or(0)
    }
}

impl<const D: usize> std::fmt::Display for GridIndex<D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (a, v) in self.0.iter().enumerate() {
            if a > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// One of the `2·dim` axis directions. In 2D: west/east (x∓), south/north
/// (y∓); in 3D additionally down/up (z∓).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub struct Direction {
    pub axis: usize,
    pub sign: i8,
}

impl Direction {
    pub const WEST: Direction = Direction { axis: 0, sign: -1 };
    pub const EAST: Direction = Direction { axis: 0, sign: 1 };
    pub const SOUTH: Direction = Direction { axis: 1, sign: -1 };
    pub const NORTH: Direction = Direction { axis: 1, sign: 1 };
    pub const DOWN: Direction = Direction { axis: 2, sign: -1 };
    pub const UP: Direction = Direction { axis: 2, sign: 1 };

    /// Canonical direction order: −x, +x, −y, +y, −z, +z.
    pub fn canonical(dim: usize) -> impl Iterator<Item = Direction> {
        (0..dim).flat_map(|axis| {
            [-1i8, 1i8]
                .into_iter()
                .map(move |sign| Direction { axis, sign })
        })
    }

    pub fn name(&self) -> &'static str {
        match (self.axis, self.sign) {
            (0, -1) => "west",
            (0, 1) => "east",
            (1, -1) => "south",
            (1, 1) => "north",
            (2, -1) => "down",
            (2, 1) => "up",
            _ => "invalid",
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        match s.to_ascii_lowercase().as_str() {
            "west" | "w" | "-x" => Some(Direction::WEST),
            "east" | "e" | "+x" => Some(Direction::EAST),
            "south" | "s" | "-y" => Some(Direction::SOUTH),
            "north" | "n" | "+y" => Some(Direction::NORTH),
            "down" | "d" | "-z" => Some(Direction::DOWN),
            "up" | "u" | "+z" => Some(Direction::UP),
            _ => None,
        }
    }

    /// Unit offset of this direction, e.g. east → `(1,0[,0])`.
    pub fn unit<const D: usize>(&self) -> [i64; D] {
        let mut u = [0i64; D];
        u[self.axis] = self.sign as i64;
        u
    }
}

/// A Chebyshev shell around a center, in canonical member order.
#[derive(Clone, Debug)]
pub struct LayerSet<const D: usize> {
    pub center: GridIndex<D>,
    pub layer: u32,
    pub members: Vec<GridIndex<D>>,
}

/// The Chebyshev shell of the given radius, in canonical order.
///
/// 2D shells are emitted as a counter-clockwise ring starting at
/// `(center.x + layer, center.y)`; consecutive ring entries differ by one
/// lattice step. 3D shells are emitted face-class, edge-class, corner-class
/// (classified by how many axes sit at the extreme offset ±layer),
/// lexicographic within each class.
pub fn layer_members<const D: usize>(center: GridIndex<D>, layer: u32) -> LayerSet<D> {
    assert!(D == 2 || D == 3, "layers are defined for dim 2 and 3");
    if layer == 0 {
        return LayerSet {
            center,
            layer,
            members: vec![center],
        };
    }
    let members = match D {
        2 => ring_offsets(layer as i64)
            .into_iter()
            .map(|[dx, dy]| {
                let mut m = center.0;
                m[0] += dx;
                m[1] += dy;
                GridIndex(m)
            })
            .collect(),
        _ => shell3_offsets(layer as i64)
            .into_iter()
            .map(|d| {
                let mut m = center.0;
                for a in 0..D {
                    m[a] += d[a];
                }
                GridIndex(m)
            })
            .collect(),
    };
    LayerSet {
        center,
        layer,
        members,
    }
}

/// Counter-clockwise ring of offsets of Chebyshev radius `l ≥ 1`, starting
/// at `(l, 0)`. Length `8·l`.
fn ring_offsets(l: i64) -> Vec<[i64; 2]> {
    let mut out = Vec::with_capacity((8 * l) as usize);
    let mut p = [l, 0i64];
    out.push(p);
    let legs: [([i64; 2], i64); 5] = [
        ([0, 1], l),      // up the right edge to the (l,l) corner
        ([-1, 0], 2 * l), // across the top
        ([0, -1], 2 * l), // down the left edge
        ([1, 0], 2 * l),  // across the bottom
        ([0, 1], l - 1),  // back up to just below the start
    ];
    for (step, count) in legs {
        for _ in 0..count {
            p[0] += step[0];
            p[1] += step[1];
            out.push(p);
        }
    }
    debug_assert_eq!(out.len(), (8 * l) as usize);
    out
}

/// 3D shell offsets of Chebyshev radius `l ≥ 1` in face/edge/corner class
/// order (number of axes at ±l), lexicographic within each class.
fn shell3_offsets(l: i64) -> Vec<[i64; 3]> {
    let mut classes: [Vec<[i64; 3]>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for dx in -l..=l {
        for dy in -l..=l {
            for dz in -l..=l {
                let d = [dx, dy, dz];
                if d.iter().map(|v| v.abs()).max().unwrap() != l {
                    continue;
                }
                let extremes = d.iter().filter(|v| v.abs() == l).count();
                classes[extremes - 1].push(d);
            }
        }
    }
    let mut out = Vec::new();
    for class in classes.iter_mut() {
        class.sort_unstable();
        out.append(class);
    }
    out
}

/// Members of the shell at offset `±layer` along `d.axis`, ordered
/// lexicographically in the remaining axes. In 2D layer 2 this is a 5-point
/// line; in 3D layer 2 a 25-point plane; in 3D layer 1 a 9-point face.
pub fn directional_subset<const D: usize>(ls: &LayerSet<D>, d: Direction) -> Vec<GridIndex<D>> {
    assert!(ls.layer >= 1, "directional subsets need layer ≥ 1");
    let want = d.sign as i64 * ls.layer as i64;
    let mut subset: Vec<GridIndex<D>> = ls
        .members
        .iter()
        .copied()
        .filter(|m| m.0[d.axis] - ls.center.0[d.axis] == want)
        .collect();
    subset.sort_unstable_by_key(|m| {
        let mut key = [i64::MIN; 3];
        let mut k = 0;
        for a in 0..D {
            if a != d.axis {
                key[k] = m.0[a];
                k += 1;
            }
        }
        key
    });
    subset
}

/// All length-`k` windows of consecutive ring entries, wrapping around.
/// Defined on 2D shells only; 3D consumes consecutiveness through 2D
/// sub-planes.
pub fn consecutive_runs(ls: &LayerSet<2>, k: usize) -> Vec<Vec<GridIndex<2>>> {
    assert!(k >= 2 && ls.layer >= 1);
    let n = ls.members.len();
    (0..n)
        .map(|s| (0..k).map(|t| ls.members[(s + t) % n]).collect())
        .collect()
}

/// Maps 2D in-plane indices into a 3D lattice plane: `(u, v)` goes to
/// `origin + u·e(axes[0]) + v·e(axes[1])`. Used to run the 2D selection
/// steps inside a first-layer face or second-layer plane of a 3D shell.
#[derive(Clone, Copy, Debug)]
pub struct PlaneEmbedding {
    pub origin: GridIndex<3>,
    pub axes: [usize; 2],
}

impl PlaneEmbedding {
    /// The plane orthogonal to `normal_axis` through `origin`, with in-plane
    /// axes the remaining two in ascending order.
    pub fn orthogonal_to(normal_axis: usize, origin: GridIndex<3>) -> Self {
        let axes = match normal_axis {
            0 => [1, 2],
            1 => [0, 2],
            _ => [0, 1],
        };
        PlaneEmbedding { origin, axes }
    }

    pub fn to3(&self, p: GridIndex<2>) -> GridIndex<3> {
        let mut out = self.origin.0;
        out[self.axes[0]] += p.0[0];
        out[self.axes[1]] += p.0[1];
        GridIndex(out)
    }

    /// Lifts an in-plane direction to the corresponding 3D direction.
    pub fn lift_direction(&self, d: Direction) -> Direction {
        Direction {
            axis: self.axes[d.axis],
            sign: d.sign,
        }
    }
}

/// Uniform isotropic Cartesian lattice over the box `[lo, hi]^D`.
///
/// Cell `i` along axis `a` spans `[lo + i·h, lo + (i+1)·h]` with center
/// `lo + (i + 1/2)·h`.
#[derive(Clone, Debug)]
pub struct GridSpec<const D: usize> {
    pub n: [usize; D],
    pub lo: [f64; D],
    pub hi: [f64; D],
    pub h: f64,
}

impl<const D: usize> GridSpec<D> {
    pub fn new(n: [usize; D], lo: [f64; D], hi: [f64; D]) -> Result<Self, GridError> {
        if n.contains(&0) {
            return Err(GridError::EmptyAxis);
        }
        let spacings: Vec<f64> = (0..D).map(|a| (hi[a] - lo[a]) / n[a] as f64).collect();
        for (axis, &h) in spacings.iter().enumerate() {
            if h.is_nan() || h <= 0.0 {
                return Err(GridError::NonPositiveSpacing { axis, h });
            }
        }
        let h = spacings[0];
        if spacings.iter().any(|&s| (s - h).abs() > 1e-12 * h) {
            return Err(GridError::Anisotropic { h: spacings });
        }
        Ok(GridSpec { n, lo, hi, h })
    }

    /// Cube `[lo, lo + n·h]^D` with `n` cells per axis.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self, GridError> {
        Self::new([n; D], [lo; D], [hi; D])
    }

    pub fn dim(&self) -> usize {
        D
    }

    pub fn num_cells(&self) -> usize {
        self.n.iter().product()
    }

    pub fn contains(&self, idx: GridIndex<D>) -> bool {
        (0..D).all(|a| idx.0[a] >= 0 && (idx.0[a] as usize) < self.n[a])
    }

    pub fn cell_center(&self, idx: GridIndex<D>) -> [f64; D] {
        let mut x = [0.0; D];
        for a in 0..D {
            x[a] = self.lo[a] + (idx.0[a] as f64 + 0.5) * self.h;
        }
        x
    }

    /// Physical coordinates of lattice corner `c` (corner `c` along each axis
    /// is `lo + c·h`; corners run 0..=n).
    pub fn corner(&self, c: [usize; D]) -> [f64; D] {
        let mut x = [0.0; D];
        for a in 0..D {
            x[a] = self.lo[a] + c[a] as f64 * self.h;
        }
        x
    }

    /// Row-major linearization with axis 0 fastest.
    pub fn linear(&self, idx: GridIndex<D>) -> usize {
        debug_assert!(self.contains(idx));
        let mut lin = 0usize;
        for a in (0..D).rev() {
            lin = lin * self.n[a] + idx.0[a] as usize;
        }
        lin
    }

    pub fn from_linear(&self, mut lin: usize) -> GridIndex<D> {
        let mut idx = [0i64; D];
        for a in 0..D {
            idx[a] = (lin % self.n[a]) as i64;
            lin /= self.n[a];
        }
        GridIndex(idx)
    }

    /// Iterator over all in-range indices in linear order.
    pub fn indices(&self) -> impl Iterator<Item = GridIndex<D>> + '_ {
        (0..self.num_cells()).map(|lin| self.from_linear(lin))
    }
}
