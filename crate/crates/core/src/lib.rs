//! Compiler and conformance toolkit for the Hardware Robot Information
//! Model: component models for robot hardware modules, their naming
//! convention, generated interface files, module conformance and a
//! deterministic publish/subscribe simulation.

pub mod catalog;
pub mod cli;
pub mod conformance;
pub mod descriptor;
pub mod diag;
pub mod emit;
pub mod lang;
pub mod model;
pub mod naming;
pub mod simbus;
pub mod units;
