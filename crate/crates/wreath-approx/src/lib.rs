//! Constructive metric approximations of unrestricted wreath products
//! `G ≀≀ H` with `H` amenable, and of groups with co-amenable subgroups,
//! in the four classes weakly sofic / sofic / linear sofic / hyperlinear.
//!
//! The library builds the lift `Φ: G ≀≀ H → K ≀_B Sym(B)` from a metric
//! approximation of `G` and a Følner set of `H`, pushes it into a single
//! group of the target class through the block embeddings `ψ`, and measures
//! multiplicativity, freeness, and trace statistics against the theoretical
//! bounds, emitting machine-checked certificates.

pub mod amenable;
pub mod certify;
pub mod coamenable;
pub mod context;
pub mod embeddings;
pub mod lift;
pub mod matrix;
pub mod perm;
pub mod rational;
pub mod table;
pub mod wreath;

mod error;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
