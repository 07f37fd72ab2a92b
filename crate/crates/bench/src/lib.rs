//! Fixtures shared by the benchmarks.

use qpdno::hops::PerturbationProblem;
use qpdno::mms::{profile_library, ManufacturedSolution};
use qpdno::{Complex64, Depth, LatticeSpec, SpectralGrid};

/// The two-dimensional manufactured-solution problem at `n` points per axis,
/// with Dirichlet data taken at interface amplitude `eps`.
pub fn problem_2d(n: usize, order: usize, eps: f64, a: f64, n_y: usize) -> PerturbationProblem {
    let lattice = LatticeSpec::new(&[vec![1.0], vec![2f64.sqrt()]], Depth::Infinite).expect("lattice");
    let grid = SpectralGrid::new(lattice.clone(), &[n, n]).expect("grid");
    let f = profile_library("cos_sin_2d", &[], &grid).expect("profile");
    let ms = ManufacturedSolution::new(lattice, Complex64::new(-3.0, 0.0), vec![1, 1], false).expect("solution");
    let (xi, _) = ms.exact_traces(&f.scale(Complex64::new(eps, 0.0))).expect("traces");
    PerturbationProblem::new(f, xi, order, a, n_y).expect("problem")
}
