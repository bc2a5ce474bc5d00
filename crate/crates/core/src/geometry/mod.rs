//! Domains, signed distance, curvature, touching balls, sup/inf
//! convolutions and level-set measures.

mod ball;
mod contour;
mod convolution;
mod domain;
mod graph;
mod measure;

pub use ball::TouchingBall;
pub use contour::{clipped_length, marching_squares, Segment};
pub use convolution::{inf_convolution, inf_convolution_of, sup_convolution};
pub use domain::{graph_curvatures, Domain, DomainKind, DomainSpec};
pub use graph::{GraphFunction, GraphSpec, GraphSurface};
pub use measure::{asymptotic_volume_constant, level_set_measure, MeasureEstimate, MeasureMethod, MeasureOptions};
