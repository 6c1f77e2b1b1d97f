//! Independent reference evaluators: quadrature of the defining integrals and
//! Monte Carlo simulation of the raw system model.

pub mod monte_carlo;
pub mod quadrature;
