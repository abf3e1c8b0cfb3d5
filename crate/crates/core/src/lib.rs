//! Exact construction of Type III anticanonical pairs.
//!
//! A toric model and a list of surgeries give an almost toric base
//! ([`surgery`]); its boundary is closed off by a cone ([`compactify`]); the
//! resulting sphere is triangulated into basis triangles and checked
//! ([`complex`]). All arithmetic is over the integers or the rationals.

pub mod compactify;
pub mod complex;
pub mod cycles;
pub mod exactgeom;
pub mod surgery;

pub use compactify::{close_surface, CloseOptions, ClosedSurface, CompactifyError};
pub use complex::{build_complex, verify_type_iii, ComplexError, ComplexJson, TriComplex, TypeIIIReport};
pub use cycles::{charge, dual_cycle, monodromy, sl2z_word, Cycle, CycleError, SurgeryOnCycle};
pub use exactgeom::lattice::{IAffine, IMat2, Pt};
pub use exactgeom::{AffineMap, Mat2, Rat, Vec2};
pub use surgery::{AlmostToricBase, BlowupPlacement, SurgeryError};
