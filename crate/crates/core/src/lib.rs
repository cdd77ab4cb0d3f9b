//! Exact arithmetic for twisted composition algebras and related structures.

pub mod arthur;
pub mod error;
pub mod fields;
pub mod hecke;
pub mod jordan;
pub mod selftest;
pub mod tca;
pub mod cubes;

pub use error::{ArthurError, CubeError, FieldError, HeckeError, SchemaError, TcaError};
pub use fields::{BaseField, Elem, EtaleAlgebra, Scalar};
