//! Exact and numerical tools for the Legendre differential operator and its square.

pub mod ce;
pub mod classify;
pub mod dsl;
pub mod forms;
pub mod operator;
pub mod poly;
pub mod quadrature;
pub mod spectral;
