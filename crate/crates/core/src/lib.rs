pub mod error;
pub mod scalar;

pub use error::{Error, Result};
pub mod tensor;
pub mod geometry;
pub mod invariants;
pub mod lab;
pub mod models;

pub type TensorF64 = tensor::Tensor<f64>;
pub type TensorQ = tensor::Tensor<scalar::Rational>;
pub type JetF64 = scalar::Jet<f64>;
pub type JetQ = scalar::Jet<scalar::Rational>;
pub type ContextF64 = geometry::Context<f64>;
pub type ContextQ = geometry::Context<scalar::Rational>;
pub type StackF64 = geometry::CurvatureStack<f64>;
pub type StackQ = geometry::CurvatureStack<scalar::Rational>;
