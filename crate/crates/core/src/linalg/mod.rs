//! In-house linear algebra sized for lattice windows of a few hundred sites:
//! pivoted tridiagonal solves, Sturm-bisection eigenvalues for symmetric
//! tridiagonal operators, and a dense real eigensolver (Householder
//! Hessenberg reduction followed by the shifted double-step QR iteration)
//! that also returns eigenvectors for nonsymmetric matrices.

mod dense;
mod evd;
mod tridiag;

pub use dense::{lu_solve, Mat};
pub use evd::{eigen, Eigen};
pub use tridiag::{solve_tridiag, Inertia, SymTridiag};
