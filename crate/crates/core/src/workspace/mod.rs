//! Reachability sampling, convex hulls of the reachable set, and the
//! synthetic servo-slop error model.

mod backlash;
mod hull;
mod sampling;

pub use backlash::{
    simulate_observed, BacklashError, BacklashModel, PosePair, DEFAULT_EPSILON_SERVO_DEG,
};
pub use hull::{
    convex_hull, mesh_volume, read_mesh, ConvexHull3, HullError, MeshError, HULL_EPSILON,
};
pub use sampling::{
    classify, count_reachable, read_samples_csv, sample_workspace, uniform_targets,
    write_samples_csv, BoxRegion, FailureKind, SampleCsvError, SampleError, WorkspaceSample,
    DEFAULT_BOX_HALF_WIDTH,
};
