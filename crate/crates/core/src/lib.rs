//! Lattice-based signcryption with a ciphertext equality test.
//!
//! The crate provides the full stack for an educational implementation of a
//! signcryption scheme whose ciphertexts a semi-trusted tester can compare
//! for plaintext equality using a receiver-issued tag key:
//!
//! - exact mod-q linear algebra and a binary container format ([`zq`],
//!   [`serialize`]),
//! - discrete Gaussian samplers ([`gaussian`]),
//! - gadget-lattice sampling and decoding ([`gadget`]),
//! - gadget trapdoors: key generation, preimage sampling, LWE inversion,
//!   trapdoor combination ([`trapdoor`]),
//! - the hash roles used by the scheme, including a full-rank-differences
//!   encoding and an abort-resistant hash family ([`hashes`]),
//! - the scheme itself ([`scet`]) and its parameter checker ([`params`]),
//! - a chosen-plaintext attack demo against an earlier lattice signcryption
//!   ([`attack`]), and the acceptance suite ([`acceptance`]).
//!
//! # Security warning
//!
//! **Do not use this library in production.** All shipped parameter profiles
//! are deliberately tiny and insecure; the samplers are not constant-time;
//! the code exists to make the construction and the attack reproducible at
//! desk scale.

pub mod acceptance;
pub mod attack;
pub mod error;
pub mod gadget;
pub mod hashes;
pub mod gaussian;
pub mod params;
pub mod scet;
pub mod serialize;
pub mod stats;
pub mod trapdoor;
pub mod zq;

pub use error::{Error, Result};
