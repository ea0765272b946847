//! Lower bounds for the first nonzero Neumann eigenvalue of the Laplacian with
//! density on planar domains that are conformal images of the unit disk, and
//! a finite-element oracle to check them against.

pub mod bounds;
pub mod conformal;
pub mod error;
pub mod fem_oracle;
pub mod logspace;
pub mod orlicz;
pub mod youngfn;

pub use bounds::{BoundFlag, BoundMethod, BoundReport, ScenarioParams};
pub use conformal::{ConformalMap, DensityField, DiskQuadrature, MapKind};
pub use error::{Error, Result};
pub use orlicz::{Measure, SampledFunction};
pub use youngfn::{YoungFunction, YoungKind};
