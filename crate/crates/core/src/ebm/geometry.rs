//! Cut-cell geometry from a linear reconstruction of the level set.
//!
//! Inside a partial cell the level set is replaced by its least-squares
//! plane through the eight corner values (the corner lattice is symmetric,
//! so the fit has a closed form: mean value and central differences of the
//! corner sums). The plane–cube intersection is then computed exactly:
//! face apertures by clipping each cube face against the half-space,
//! the interface polygon from plane–edge intersections, and the component-a
//! volume by the divergence theorem over the resulting closed polyhedron.
//! The interface normal is the analytic level-set gradient at the polygon
//! centroid, pointing from component a toward component b.

use super::classify::{corner_phi, majority_component, CellClass, CellRecord};
use super::levelset::LevelSet;
use crate::error::EbmError;
use crate::grid::{GridIndex, GridSpec};

/// Cut geometry of one partial cell, physical units.
#[derive(Clone, Debug)]
pub struct CutGeometry {
    /// Component volumes; `vol_a + vol_b = h³` by construction.
    pub vol_a: f64,
    pub vol_b: f64,
    /// Component-a area fraction of each face, indexed `[axis][side]` with
    /// side 0 the minus face. Component b's aperture is the complement.
    pub aperture_a: [[f64; 2]; 3],
    /// Interface centroid x_Γ.
    pub centroid: [f64; 3],
    /// Unit normal at x_Γ, from component a toward component b.
    pub normal: [f64; 3],
    /// Interface patch area A_Γ.
    pub area: f64,
}

impl CutGeometry {
    pub fn vol(&self, comp: super::Component) -> f64 {
        match comp {
            super::Component::A => self.vol_a,
            super::Component::B => self.vol_b,
        }
    }

    pub fn aperture(&self, comp: super::Component, axis: usize, side: usize) -> f64 {
        let a = self.aperture_a[axis][side];
        match comp {
            super::Component::A => a,
            super::Component::B => 1.0 - a,
        }
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Area and centroid of a planar polygon given in order (either winding).
fn polygon_area_centroid(verts: &[[f64; 3]]) -> (f64, [f64; 3]) {
    if verts.len() < 3 {
        return (0.0, verts.first().copied().unwrap_or([0.0; 3]));
    }
    let v0 = verts[0];
    let mut vec_area = [0.0; 3];
    let mut weighted = [0.0; 3];
    let mut total = 0.0;
    for w in verts[1..].windows(2) {
        let c = cross(sub(w[0], v0), sub(w[1], v0));
        for a in 0..3 {
            vec_area[a] += 0.5 * c[a];
        }
        let tri_area = 0.5 * norm(c);
        let tri_centroid = [
            (v0[0] + w[0][0] + w[1][0]) / 3.0,
            (v0[1] + w[0][1] + w[1][1]) / 3.0,
            (v0[2] + w[0][2] + w[1][2]) / 3.0,
        ];
        for a in 0..3 {
            weighted[a] += tri_area * tri_centroid[a];
        }
        total += tri_area;
    }
    // for convex polygons the fan triangles agree in orientation, so the
    // scalar sum equals |vector area|
    let area = norm(vec_area);
    if total > 0.0 {
        for a in 0..3 {
            weighted[a] /= total;
        }
    } else {
        weighted = v0;
    }
    (area, weighted)
}

/// Sutherland–Hodgman clip of a convex polygon against `c + g·x ≤ 0`.
fn clip_polygon(verts: &[[f64; 3]], c: f64, g: [f64; 3]) -> Vec<[f64; 3]> {
    let ell = |p: [f64; 3]| c + dot(g, p);
    let mut out = Vec::with_capacity(verts.len() + 2);
    for i in 0..verts.len() {
        let p = verts[i];
        let q = verts[(i + 1) % verts.len()];
        let lp = ell(p);
        let lq = ell(q);
        if lp <= 0.0 {
            out.push(p);
        }
        if (lp <= 0.0) != (lq <= 0.0) {
            let t = lp / (lp - lq);
            out.push([
                p[0] + t * (q[0] - p[0]),
                p[1] + t * (q[1] - p[1]),
                p[2] + t * (q[2] - p[2]),
            ]);
        }
    }
    out
}

/// The four vertices of a cube face in cell-local coordinates; `s = h/2`.
fn face_vertices(axis: usize, side: usize, s: f64) -> [[f64; 3]; 4] {
    let fixed = if side == 0 { -s } else { s };
    let (u, v) = match axis {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut verts = [[0.0; 3]; 4];
    for (k, (du, dv)) in [(-s, -s), (s, -s), (s, s), (-s, s)].into_iter().enumerate() {
        verts[k][axis] = fixed;
        verts[k][u] = du;
        verts[k][v] = dv;
    }
    verts
}

/// Least-squares plane `c + g·x` through the eight corner values of a cell,
/// in cell-local coordinates.
fn corner_plane<L: LevelSet<3>>(
    grid: &GridSpec<3>,
    level: &L,
    idx: GridIndex<3>,
) -> (f64, [f64; 3]) {
    let h = grid.h;
    let mut mean = 0.0;
    let mut g = [0.0; 3];
    for bits in 0..8usize {
        let corner = [
            idx.0[0] as usize + (bits & 1),
            idx.0[1] as usize + ((bits >> 1) & 1),
            idx.0[2] as usize + ((bits >> 2) & 1),
        ];
        let v = corner_phi(grid, level, corner);
        mean += v / 8.0;
        for a in 0..3 {
            let sign = if (bits >> a) & 1 == 1 { 1.0 } else { -1.0 };
            g[a] += sign * v / (4.0 * h);
        }
    }
    (mean, g)
}

/// Exact plane–cube geometry for one partial cell.
pub fn cut_geometry<L: LevelSet<3>>(
    grid: &GridSpec<3>,
    level: &L,
    idx: GridIndex<3>,
) -> Result<CutGeometry, EbmError> {
    let h = grid.h;
    let s = 0.5 * h;
    let (c, g) = corner_plane(grid, level, idx);
    let degenerate = || EbmError::DegenerateCut { cell: idx.0 };

    // interface polygon: plane ∩ cube edges
    let mut points: Vec<[f64; 3]> = Vec::new();
    for axis in 0..3 {
        let (u, v) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for (du, dv) in [(-s, -s), (s, -s), (s, s), (-s, s)] {
            let mut p = [0.0; 3];
            let mut q = [0.0; 3];
            p[u] = du;
            p[v] = dv;
            q[u] = du;
            q[v] = dv;
            p[axis] = -s;
            q[axis] = s;
            let lp = c + dot(g, p);
            let lq = c + dot(g, q);
            if (lp <= 0.0) != (lq <= 0.0) {
                let t = lp / (lp - lq);
                let mut x = p;
                x[axis] += t * h;
                points.push(x);
            }
        }
    }
    // dedupe points that coincide (plane through an edge or corner)
    let mut unique: Vec<[f64; 3]> = Vec::with_capacity(points.len());
    for p in points {
        if unique.iter().all(|q| norm(sub(p, *q)) > 1e-9 * h) {
            unique.push(p);
        }
    }
    if unique.len() < 3 {
        return Err(degenerate());
    }
    // order around the plane
    let gn = norm(g);
    if gn == 0.0 {
        return Err(degenerate());
    }
    let g_hat = [g[0] / gn, g[1] / gn, g[2] / gn];
    let seed = if g_hat[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1_raw = cross(g_hat, seed);
    let e1n = norm(e1_raw);
    let e1 = [e1_raw[0] / e1n, e1_raw[1] / e1n, e1_raw[2] / e1n];
    let e2 = cross(g_hat, e1);
    let mean = unique.iter().fold([0.0; 3], |m, p| {
        [
            m[0] + p[0] / unique.len() as f64,
            m[1] + p[1] / unique.len() as f64,
            m[2] + p[2] / unique.len() as f64,
        ]
    });
    unique.sort_by(|a, b| {
        let pa = sub(*a, mean);
        let pb = sub(*b, mean);
        let ta = dot(pa, e2).atan2(dot(pa, e1));
        let tb = dot(pb, e2).atan2(dot(pb, e1));
        ta.partial_cmp(&tb).unwrap()
    });
    let (area, centroid_local) = polygon_area_centroid(&unique);
    if area <= 1e-12 * h * h {
        return Err(degenerate());
    }

    // apertures: clip each cube face against the a-side half-space
    let mut aperture_a = [[0.0f64; 2]; 3];
    let mut face_area_sum = 0.0;
    for axis in 0..3 {
        for side in 0..2 {
            let poly = clip_polygon(&face_vertices(axis, side, s), c, g);
            let (a, _) = polygon_area_centroid(&poly);
            let frac = (a / (h * h)).clamp(0.0, 1.0);
            aperture_a[axis][side] = frac;
            face_area_sum += frac * h * h;
        }
    }

    // divergence theorem over the closed a-side boundary: every clipped face
    // polygon contributes s·area (its plane passes at distance s from the
    // local origin), the interface polygon contributes (centroid·ĝ)·area
    let vol_a = ((s * face_area_sum) + dot(centroid_local, g_hat) * area) / 3.0;
    let vol_a = vol_a.clamp(0.0, h * h * h);
    let vol_b = h * h * h - vol_a;

    let center = grid.cell_center(idx);
    let centroid = [
        center[0] + centroid_local[0],
        center[1] + centroid_local[1],
        center[2] + centroid_local[2],
    ];
    let grad = level.grad(centroid);
    let gradn = norm(grad);
    let normal = if gradn > 1e-300 {
        [grad[0] / gradn, grad[1] / gradn, grad[2] / gradn]
    } else {
        g_hat
    };

    Ok(CutGeometry {
        vol_a,
        vol_b,
        aperture_a,
        centroid,
        normal,
        area,
    })
}

/// Populates cut geometry for every partial cell; cells whose reconstructed
/// plane misses the cell (grazing cuts) are reclassified by majority corner
/// sign. Returns the number of reclassified cells.
pub fn compute_geometry<L: LevelSet<3>>(
    grid: &GridSpec<3>,
    level: &L,
    records: &mut [CellRecord<3>],
) -> usize {
    let mut reclassified = 0;
    for rec in records.iter_mut() {
        if rec.class != CellClass::Partial {
            continue;
        }
        match cut_geometry(grid, level, rec.index) {
            Ok(cut) => rec.cut = Some(cut),
            Err(_) => {
                let comp = majority_component(grid, level, rec.index);
                let boundary =
                    (0..3).any(|a| rec.index.0[a] == 0 || rec.index.0[a] as usize == grid.n[a] - 1);
                rec.class = if boundary {
                    CellClass::Boundary
                } else {
                    CellClass::Internal
                };
                rec.component = Some(comp);
                rec.cut = None;
                reclassified += 1;
            }
        }
    }
    reclassified
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ebm::levelset::HalfSpace;
    use crate::ebm::Component;

    fn unit_grid() -> GridSpec<3> {
        // one cell of size h = 1 spanning [0,1]³
        GridSpec::cube(1, 0.0, 1.0).unwrap()
    }

    #[test]
    fn symmetric_half_cut() {
        let grid = unit_grid();
        let level = HalfSpace {
            normal: [1.0, 0.0, 0.0],
            offset: 0.5,
        };
        let cut = cut_geometry(&grid, &level, GridIndex([0, 0, 0])).unwrap();
        assert!((cut.vol_a - 0.5).abs() < 1e-12);
        assert!((cut.vol_b - 0.5).abs() < 1e-12);
        assert!((cut.area - 1.0).abs() < 1e-12);
        assert!((cut.aperture_a[0][0] - 1.0).abs() < 1e-12); // −x face all a
        assert!(cut.aperture_a[0][1].abs() < 1e-12); // +x face all b
        for axis in 1..3 {
            for side in 0..2 {
                assert!((cut.aperture_a[axis][side] - 0.5).abs() < 1e-12);
            }
        }
        assert!((cut.centroid[0] - 0.5).abs() < 1e-12);
        assert!((cut.normal[0] - 1.0).abs() < 1e-12);
        // b-side apertures are complements
        assert!((cut.aperture(Component::B, 0, 0)).abs() < 1e-12);
    }

    #[test]
    fn corner_tetrahedron_volume() {
        // plane x + y + z = 1/2 cuts the corner at the origin with
        // intercepts at h/2: the a-side is a tetrahedron of volume h³/48
        let grid = unit_grid();
        let level = HalfSpace {
            normal: [1.0, 1.0, 1.0],
            offset: 0.5,
        };
        let cut = cut_geometry(&grid, &level, GridIndex([0, 0, 0])).unwrap();
        assert!((cut.vol_a - 1.0 / 48.0).abs() < 1e-12, "{}", cut.vol_a);
        assert!((cut.vol_a + cut.vol_b - 1.0).abs() < 1e-12);
        // interface triangle area √3·h²/8
        assert!((cut.area - 3f64.sqrt() / 8.0).abs() < 1e-12);
    }

    #[test]
    fn oblique_plane_partitions_volume() {
        let grid = unit_grid();
        let level = HalfSpace {
            normal: [0.6, -0.48, 0.64],
            offset: 0.2,
        };
        let cut = cut_geometry(&grid, &level, GridIndex([0, 0, 0])).unwrap();
        assert!((cut.vol_a + cut.vol_b - 1.0).abs() < 1e-10);
        for axis in 0..3 {
            for side in 0..2 {
                let a = cut.aperture_a[axis][side];
                assert!((0.0..=1.0).contains(&a));
            }
        }
        assert!((norm(cut.normal) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grazing_plane_reports_degenerate() {
        let grid = unit_grid();
        let level = HalfSpace {
            normal: [1.0, 0.0, 0.0],
            offset: 2.0, // plane far outside the cell
        };
        assert!(matches!(
            cut_geometry(&grid, &level, GridIndex([0, 0, 0])),
            Err(EbmError::DegenerateCut { .. })
        ));
    }
}
