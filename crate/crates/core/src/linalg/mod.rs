pub mod check;
pub mod eigen;
pub mod operator;
pub mod state;
pub mod tridiag;

pub use check::blas_self_check;
pub use eigen::{eig_hermitian, eig_hermitian_range, EigenDecomposition, Vectors};
pub use operator::{energy_uncertainty, expectation, HermitianOperator, LinearOperator, SparseMatrix};
pub use state::{inner, overlap_deficit, Basis, StateVector};
