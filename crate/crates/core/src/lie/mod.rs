//! Closed-form arithmetic on su(2)/SU(2), so(3)/SO(3), so(4)/SO(4) and the
//! maps between them.

mod so3;
mod so4;
mod su2;

pub use so3::{phi, psi, psi_inv, rodrigues, so3_log, So3Algebra, So3Matrix};
pub use so4::{
    exp_so4, phi_tilde, psi_tilde, psi_tilde_inv, quaternion_of, su2_of_quaternion, So4Algebra, So4Matrix,
    Su2AlgebraPair,
};
pub use su2::{
    cayley_klein_of, ck_to_matrix, exp_su2, log_su2, sigma_x, sigma_y, sigma_z, CayleyKlein, Su2Matrix, Su2Vector,
    GROUP_TOL,
};

pub(crate) use su2::wrap_two_pi;
