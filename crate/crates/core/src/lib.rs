pub mod derivation;
pub mod flow;
pub mod geometry;
pub mod golden;
pub mod manifest;
pub mod model;
pub mod monomial;
pub mod ode;
pub mod oscillator;
pub mod polar;
pub mod printer;
pub mod protocol;
pub mod rational;
pub mod schedule;
pub mod series;
pub mod simulator;
