//! Small numerical kernels shared by the solvers: adaptive quadrature,
//! an embedded Runge–Kutta pair, bracketing root finders, Hermite
//! interpolation and a few special functions.

pub mod interp;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod special;
