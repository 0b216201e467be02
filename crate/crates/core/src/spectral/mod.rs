//! ℤᵈ-invariant sub-Markov kernels with sheets: tilted matrices F(u),
//! Perron eigenvalue data and its gradient, the λ(u)=1 surface, lattice
//! Green functions, local-limit audits and the Ancona-violation ratio table.

mod first_return;
mod green;
mod kernel;
mod perron;

pub use first_return::{first_return_kernel_mc, FirstReturnEstimate};
pub use green::{ancona_violation_demo, local_limit_audit, zd_green, AnconaViolationTable, LocalLimitReport};
pub use kernel::ZdKernel;
pub use perron::{assumptions_report, f_matrix, h_surface_point, perron, AssumptionsReport, PerronData};
