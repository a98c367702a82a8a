//! Reversible nets of convex polyhedra.
//!
//! Cut a convex surface along a spanning tree, develop it into the plane,
//! cut the net again along a second, non-crossing tree and hinge the pieces
//! into a chain that folds between both nets. Also: exact shortest paths,
//! star and source unfoldings, and plane tilings by isotetrahedron nets.
#![no_std]

extern crate alloc;

pub mod dissection;
pub mod geodesic;
pub mod geom;
pub mod hull;
pub mod isotess;
pub mod mesh;
pub mod overlay;
pub mod reversible;
pub mod unfold;

pub use geom::{Motion2, Vec2, Vec3};
pub use mesh::{Loc, MeshError, PolyhedronMesh, SurfacePoint};
