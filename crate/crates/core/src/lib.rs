pub mod catalog;
pub mod complex;
pub mod derived;
pub mod error;
pub mod iceseq;
pub mod lattice;
pub mod linalg;
pub mod quiver;
pub mod rep;
pub mod subcat;

pub use catalog::IndCatalog;
pub use error::{Error, Result};
pub use linalg::FMatrix;
pub use quiver::{BoundQuiverAlgebra, QPath, Quiver};
pub use rep::{RepMorphism, Representation};
pub use subcat::{Subcat, SubcatCalc};
pub use lattice::{Interval, TorsLattice};
pub use iceseq::IceSequence;
pub use complex::{mapping_cone, resolved_stalk, ChainHomSpace, ChainMap, Complex};
pub use derived::{DerivedCalc, WindowedAisle};
