//! Ant System shortest-path search with uniform and exponential-gradient
//! pheromone deposition.
//!
//! - [`roadmap`]: geometric instances, features, Dijkstra oracle, file format
//! - [`dynamics`]: single-edge pheromone model, discrete and closed form
//! - [`solver`]: the Ant System itself
//! - [`advisor`]: fitted (alpha, beta) surfaces
//! - [`bench`]: comparison and sweep harness, CLI

pub mod advisor;
pub mod bench;
pub mod dynamics;
pub mod roadmap;
pub mod solver;

pub use advisor::{recommend, Advisor, Recommendation};
pub use dynamics::{DepositionForm, DynamicsParams, Trace};
pub use roadmap::{
    dijkstra, extract_features, generate_roadmap, FeatureVector, NodeId, PathResult, Roadmap,
};
pub use solver::{run, AsParams, DepositionRule, RunReport};
