//! Planted-structure recovery in random hypergraphs and tensors by
//! color-coded hypertree counting, with exact low-degree verification tools.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod combin;
pub mod cumulants;
pub mod error;
pub mod exact;
pub mod hypertrees;
pub mod lowdeg;
pub mod models;
pub mod recovery;
pub mod rng;

pub use error::{Error, Result};
