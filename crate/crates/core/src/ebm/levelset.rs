//! Analytic level sets. The zero set is the interface; `phi < 0` selects
//! component a, `phi > 0` component b. `|∇phi| > 0` must hold near the zero
//! set (the gradient is queried only there).

pub trait LevelSet<const D: usize>: Sync {
    fn phi(&self, x: [f64; D]) -> f64;
    fn grad(&self, x: [f64; D]) -> [f64; D];
}

/// Signed distance to a sphere (circle in 2D).
#[derive(Clone, Copy, Debug)]
pub struct Sphere<const D: usize> {
    pub center: [f64; D],
    pub radius: f64,
}

impl<const D: usize> LevelSet<D> for Sphere<D> {
    fn phi(&self, x: [f64; D]) -> f64 {
        let r2: f64 = (0..D).map(|a| (x[a] - self.center[a]).powi(2)).sum();
        r2.sqrt() - self.radius
    }

    fn grad(&self, x: [f64; D]) -> [f64; D] {
        let mut d = [0.0; D];
        let mut r2 = 0.0;
        for a in 0..D {
            d[a] = x[a] - self.center[a];
            r2 += d[a] * d[a];
        }
        let r = r2.sqrt();
        if r > 0.0 {
            for v in &mut d {
                *v /= r;
            }
        }
        d
    }
}

/// Affine level set `phi = n·x − offset`; component a on the `n·x < offset`
/// side.
#[derive(Clone, Copy, Debug)]
pub struct HalfSpace<const D: usize> {
    pub normal: [f64; D],
    pub offset: f64,
}

impl<const D: usize> LevelSet<D> for HalfSpace<D> {
    fn phi(&self, x: [f64; D]) -> f64 {
        (0..D).map(|a| self.normal[a] * x[a]).sum::<f64>() - self.offset
    }

    fn grad(&self, _: [f64; D]) -> [f64; D] {
        self.normal
    }
}

/// Constant level set — no interface anywhere. `Uniform(-1.0)` puts the
/// whole domain in component a.
#[derive(Clone, Copy, Debug)]
pub struct Uniform(pub f64);

impl<const D: usize> LevelSet<D> for Uniform {
    fn phi(&self, _: [f64; D]) -> f64 {
        self.0
    }

    fn grad(&self, _: [f64; D]) -> [f64; D] {
        [0.0; D]
    }
}
