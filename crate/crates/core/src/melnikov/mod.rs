//! First-order Melnikov function of a piecewise perturbation: assembly in
//! the generator basis, evaluation, zero counting and structure checks.

mod assemble;
mod spec;
mod structure;
mod zeros;

pub use assemble::{assemble, assemble_via, eval_m, eval_m_with_scale, melnikov_quadrature};
pub use spec::{Case, PerturbationSpec, Piece};
pub use structure::{structure_check, theoretical_bound, DegreeEntry, StructureReport};
pub use zeros::{count_zeros, scan_grid, ScanParams, ZeroRecord, ZeroReport};
