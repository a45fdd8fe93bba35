//! Linear cliques, density calculus, regularity audits and Ramsey-arrow search
//! for randomly perturbed dense 3-graphs.

pub mod cliques;
pub mod density;
pub mod error;
pub mod experiments;
pub mod hypergraph;
pub mod index;
pub mod io;
pub mod janson;
pub mod ramsey;
pub mod random;
pub mod rational;
pub mod regularity;
pub mod tuple;

pub use error::{Error, Result};
pub use hypergraph::{
    Color, Coloring2, Graph2, Hypergraph3, PairPartition, Triad, Triple, Vertex, VertexPartition,
};
pub use rational::Rational;
