//! Affine disk/ball meshes, curving to geometric order `r`, and mesh I/O.

mod affine;
mod curved;
mod io;

pub use affine::{
    boundary_edge_count, classify_elements, generate_ball_mesh, generate_disk_mesh, AffineMap, AffineMesh,
    ElementClass, GENERATED_BOUNDARY_TOL,
};
pub use curved::{curve_mesh, CurvedMesh, MAX_GEOMETRIC_ORDER};
pub use io::{format_gmsh, format_native, parse_gmsh, parse_native, read_gmsh, read_native, write_gmsh, write_native, FILE_BOUNDARY_TOL};
