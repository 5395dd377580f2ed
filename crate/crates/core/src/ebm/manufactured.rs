//! Manufactured verification cases. The interface case prescribes the exact
//! solution
//!
//! ```text
//! p = r³              inside the sphere |x − (1.5,1.5,1.5)| = 1,
//! p = 0.001·r³ + 0.1125   outside,          r = |x| from the origin,
//! ```
//!
//! with ρ = 1 inside and ρ = 0.001 outside on the box [0,3]³. Substituting
//! into ∇·(∇p/ρ) gives f = 12·r on both sides (the ρ factors cancel against
//! the 0.001 in the outside branch), the flux jump J₂ vanishes for the same
//! reason, and J₁ is the difference of the two branches at the interface.

use super::assemble::ProblemSpec;
use super::levelset::{LevelSet, Sphere, Uniform};
use super::unknowns::Component;
use crate::grid::GridSpec;
use crate::interp::Point;

/// Level set of a verification case (static dispatch for the two shapes the
/// cases use).
#[derive(Clone, Copy, Debug)]
pub enum CaseLevel {
    Sphere(Sphere<3>),
    Uniform(Uniform),
}

impl LevelSet<3> for CaseLevel {
    fn phi(&self, x: [f64; 3]) -> f64 {
        match self {
            CaseLevel::Sphere(s) => s.phi(x),
            CaseLevel::Uniform(u) => LevelSet::<3>::phi(u, x),
        }
    }

    fn grad(&self, x: [f64; 3]) -> [f64; 3] {
        match self {
            CaseLevel::Sphere(s) => s.grad(x),
            CaseLevel::Uniform(u) => LevelSet::<3>::grad(u, x),
        }
    }
}

/// A grid, a level set, problem data, and the exact per-component solution
/// to measure errors against.
pub struct CaseSetup {
    pub name: &'static str,
    pub n: usize,
    pub grid: GridSpec<3>,
    pub level: CaseLevel,
    pub problem: ProblemSpec,
    pub exact: fn(Point, Component) -> f64,
}

fn radius(x: Point) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn sphere_exact(x: Point, comp: Component) -> f64 {
    let r3 = radius(x).powi(3);
    match comp {
        Component::A => r3,
        Component::B => 0.001 * r3 + 0.1125,
    }
}

/// The sphere interface problem at mesh size `n`.
pub fn manufactured_case(n: usize) -> CaseSetup {
    assert!(n >= 4);
    let grid: GridSpec<3> = GridSpec::cube(n, 0.0, 3.0).unwrap();
    let problem = ProblemSpec {
        rho_a: 1.0,
        rho_b: 0.001,
        // ∇·(∇r³/ρ) with the branch constants: 12·r on both sides
        source: Box::new(|x| 12.0 * radius(x)),
        jump_value: Box::new(|x| sphere_exact(x, Component::A) - sphere_exact(x, Component::B)),
        // (1/ρ)∂p/∂n = 3r·(x·n)/|x| on both sides: the jump vanishes
        jump_flux: Box::new(|_| 0.0),
        dirichlet: Box::new(|x| sphere_exact(x, Component::B)),
    };
    CaseSetup {
        name: "sphere-interface",
        n,
        grid,
        level: CaseLevel::Sphere(Sphere {
            center: [1.5; 3],
            radius: 1.0,
        }),
        problem,
        exact: sphere_exact,
    }
}

fn smooth_exact(x: Point, _: Component) -> f64 {
    x[0].sin() * x[1].sin() * x[2].sin()
}

/// Interface-free sanity case: ρ ≡ 1 and a smooth product solution, which
/// isolates the plain 7-point machinery from everything interface-related.
pub fn no_interface_case(n: usize) -> CaseSetup {
    assert!(n >= 4);
    let grid: GridSpec<3> = GridSpec::cube(n, 0.0, 3.0).unwrap();
    let problem = ProblemSpec {
        rho_a: 1.0,
        rho_b: 1.0,
        source: Box::new(|x| -3.0 * x[0].sin() * x[1].sin() * x[2].sin()),
        jump_value: Box::new(|_| 0.0),
        jump_flux: Box::new(|_| 0.0),
        dirichlet: Box::new(|x| smooth_exact(x, Component::A)),
    };
    CaseSetup {
        name: "no-interface",
        n,
        grid,
        level: CaseLevel::Uniform(Uniform(-1.0)),
        problem,
        exact: smooth_exact,
    }
}
