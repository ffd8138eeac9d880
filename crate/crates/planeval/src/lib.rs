//! Plane valuations from Hamburger-Noether data, in exact arithmetic.
//!
//! Modules build on each other bottom-up: [`exactnum`] and [`poly`] supply
//! arithmetic, [`hn_model`] holds expansions, [`invariants`] and
//! [`dual_graph`] derive structure, [`evaluation`] and [`linear_systems`]
//! compute values, and [`minimality`] assembles certificates. [`batch`] runs
//! independent jobs, in parallel when the `parallel` feature is on.

pub mod batch;
pub mod corpus;
pub mod dual_graph;
pub mod error;
pub mod evaluation;
pub mod exactnum;
pub mod hn_model;
pub mod invariants;
pub mod linear_systems;
pub mod minimality;
pub mod poly;

pub use error::{Error, Result};
