//! Task allocation for edge resource sharing.
//!
//! Servers publish computing and communication resources, users submit
//! offloading tasks through a nearby server, and a leader assigns tasks to
//! servers so as to maximise the servers' total utility under capacity and
//! deadline constraints. The crate provides the cost and reward models, a
//! tabular Q-learning allocator, random/greedy/exhaustive baselines, a
//! single-round settlement simulator and an experiment harness.

pub mod allocation;
pub mod baselines;
pub mod cli;
pub mod cost;
pub mod domain;
pub mod error;
pub mod harness;
pub mod qlearning;
pub mod reward;
pub mod round;

#[cfg(test)]
mod testutil;

pub use domain::{parse_instance, serialize_instance, Allocation, Assignment, Instance, ServerSpec, TaskSpec};
pub use error::{Error, Result, ValidationError};
