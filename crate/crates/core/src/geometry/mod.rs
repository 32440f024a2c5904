//! Prefractal and reference domains, boundary measures, and empirical
//! geometric constants.

mod ball;
mod domain;
pub mod format;
mod index;
mod point;
mod regularity;
mod sigma;

pub use ball::{ball_trace, clipped_edge_mass, BoundaryBall, BoundaryPoint};
pub use domain::{
    bbox, cantor_squares, gen_cantor_complement, gen_koch_snowflake, gen_reference,
    koch_lattice_point, koch_lattice_vertices, point_set_diameter, signed_area, Family,
    PolygonalDomain, ReferenceKind, Segment, MAX_CANTOR_GENERATION, MAX_KOCH_GENERATION,
};
pub use index::{inside_by_nearest, SegmentIndex};
pub use point::{clip_segment_to_box, clip_segment_to_disk, orient, segment_distance, Point};
pub use regularity::{
    check_ahlfors, check_corkscrew, corkscrew_point, far_pole, indexed_ball_mass, sample_centers,
    scale_ladder, van_der_corput, RegularityReport,
};
pub use sigma::{attach_sigma, nominal_dimension, BoundaryMeasure, SigmaRule};
