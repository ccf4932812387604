//! Projected-coloring graphs (PCGs) and Hardy-like quantum pigeonhole
//! paradoxes.
//!
//! A PCG is a connected signed hypergraph whose edges form an antichain.
//! Each PCG defines a quantum state in which, conditioned on the qubits
//! outside an edge reading `Z = +1`, the product of `X` over the edge is
//! fixed to `-θ`. When the resulting parity system has no classical solution
//! (the graph is un-colorable) the state exhibits a pigeonhole-type
//! contradiction with local hidden variables.
//!
//! - [`gf2`]: bit-packed rank and linear solves over GF(2).
//! - [`pcg`]: graph validation, Hardy matrices, colorability, brute force.
//! - [`state`]: exact sparse states, conditioning, and product observables.
//! - [`verify`]: certificates that cross-check all of the above.
//! - [`search`]: enumeration of small graphs up to relabeling.
//! - [`catalog`]: named instances with expected outcomes.
//! - [`io`]: JSON files and Graphviz export.

pub mod catalog;
pub mod error;
pub mod gf2;
pub mod io;
pub mod pcg;
pub mod search;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use gf2::{Gf2Matrix, Gf2Vector};
pub use pcg::{Colorability, Coloring, Irreducibility, Pcg, Sign, SignedEdge};
pub use state::{BTerm, PauliWord, ProductBasis, SparseState};
pub use verify::{verify, ParadoxCertificate, Verdict};
