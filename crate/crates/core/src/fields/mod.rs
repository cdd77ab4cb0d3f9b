//! Base fields, étale algebras and the composites L = E ⊗ K.

pub mod classes;
pub mod composite;
pub mod etale;
pub mod finite;
pub mod poly;
pub mod scalar;

pub use classes::{class_test, ClassWitness, Subgroup, Verdict};
pub use composite::{discriminant_class, quadratic_field, quadratic_split, Composite, LElem};
pub use etale::{AlgebraDesc, CubicKind, Elem, EtaleAlgebra};
pub use scalar::{BaseDesc, BaseField, Scalar};
