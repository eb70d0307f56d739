//! Tate cohomology of finite p-groups over small finite fields.

pub mod algebra;
pub mod generators;
pub mod group;
pub mod graded;
pub mod lifting;
pub mod linalg;
pub mod massey;
pub mod module_map;
pub mod resolution;
pub mod ring;
pub mod scalars;
pub mod secondary;
pub mod suite;
pub mod verdict;

pub use algebra::{Algebra, AlgebraElement, AlgebraError, AlgebraKind, IdealSpec};
pub use graded::{GradedMap, MapError, TateClass};
pub use module_map::ModuleMap;
pub use resolution::{BasisLabel, CheckReport, Family, Resolution};
pub use scalars::{Field, FieldError, Scalar};
