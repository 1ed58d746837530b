//! Self-contained dense complex linear algebra and planar geometry.

pub mod geometry;
pub mod hermitian;
pub mod psd;
pub mod schur;

pub use geometry::{convex_hull, hausdorff, hausdorff_to_disk, ConvexPolygon};
pub use hermitian::{herm_eig, HermEig};
pub use psd::{pinv, pinv_absolute, DEFAULT_RANK_TOL, psd_pinv_sqrt, singular_values, smallest_singular_pair, spectral_norm, PsdDecomposition};
pub use schur::{general_eig, sort_spectrum};
