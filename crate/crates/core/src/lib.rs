//! Chord diagrams over one or more backbones: topological genus, loop
//! classification, shape projection, the bijections between one- and
//! two-backbone shapes, exact shape polynomials and generating functions,
//! brute-force enumeration and uniform shape sampling.

pub mod bijection;
pub mod diagram;
pub mod enumerate;
pub mod error;
pub mod fatgraph;
pub mod sample;
pub mod series;
pub mod shape;

pub use bijection::{eta, eta_inv, theta, theta_inv};
pub use diagram::{parse_batch, parse_diagram, Diagram, IntervalKind};
pub use enumerate::{count_fiber, enumerate_matchings, enumerate_shapes, EnumSpec};
pub use error::{Error, ErrorKind, Result};
pub use fatgraph::{boundary_components, classify_loops, genus_of, BoundaryDecomposition, LoopProfile};
pub use sample::{uniform_bishape, uniform_shape_1bb, SampleStats, SamplerConfig, ShapeTable};
pub use series::{IntPolynomial, PowerSeries};
pub use shape::{is_shape, project_shape, shape_class, Projection, Shape, ShapeClass};
