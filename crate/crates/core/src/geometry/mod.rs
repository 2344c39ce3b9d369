//! Planar geometry shared by the planner, the ice model and the simulator.

mod dubins;
mod polygon;
mod pose;

pub use dubins::{dubins_shortest_path, dubins_word_path, sample_path, DubinsPath, DubinsWord, Segment, SegmentKind};
pub use polygon::{
    convex_hull, polygon_cell_overlap, ring_centroid, signed_area, ConvexPolygon, PolygonError, CONTACT_EPS,
};
pub use pose::{normalize_angle, wrap_to_pi, Pose, Vec2};
