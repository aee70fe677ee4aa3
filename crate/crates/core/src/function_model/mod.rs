//! The functions the criterion talks about: indicator families on intervals
//! and simplices, product functions, and closed-form test functions.
//!
//! Every model is immutable after construction and evaluation is pure.

mod intervals;
mod product;
mod simplex;
mod test_fn;

pub use intervals::{IndexRange, IntervalFamily1D, LengthRule};
pub use product::{Head, ProductFunction, RadialTail};
pub use simplex::{RadiusRule, SimplexFamilyND, SimplexND};
pub use test_fn::{Profile, TestFunction1D};

use serde::Serialize;

use crate::error::Result;

/// Pointwise evaluation on `ℝ^dim`.
pub trait PointFunction: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum FunctionModel {
    Test(TestFunction1D),
    Intervals(IntervalFamily1D),
    Simplex(SimplexND),
    SimplexFamily(SimplexFamilyND),
    Product(ProductFunction),
}

impl FunctionModel {
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        PointFunction::value(self, x)
    }

    /// The model of `x ↦ f(a·x)`.
    pub fn dilate(&self, a: f64) -> Result<FunctionModel> {
        Ok(match self {
            FunctionModel::Test(f) => FunctionModel::Test(f.dilate(a)?),
            FunctionModel::Intervals(f) => FunctionModel::Intervals(f.dilate(a)?),
            FunctionModel::Simplex(s) => {
                // x ↦ 1_Δa(λx) is the indicator of Δ_{a/λ} for λ > 0 only
                if a > 0.0 {
                    FunctionModel::Simplex(SimplexND::new(s.n, s.a / a)?)
                } else {
                    return Err(crate::error::invalid(
                        "a",
                        "reflected simplices are not representable; use a positive factor",
                    ));
                }
            }
            FunctionModel::SimplexFamily(f) => FunctionModel::SimplexFamily(f.dilate(a)?),
            FunctionModel::Product(f) => FunctionModel::Product(f.dilate(a)?),
        })
    }
}

impl PointFunction for FunctionModel {
    fn dim(&self) -> usize {
        match self {
            FunctionModel::Test(_) | FunctionModel::Intervals(_) => 1,
            FunctionModel::Simplex(s) => s.n,
            FunctionModel::SimplexFamily(f) => f.dim(),
            FunctionModel::Product(f) => f.dim(),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            FunctionModel::Test(f) => f.value(x[0]),
            FunctionModel::Intervals(f) => f.value(x[0]),
            FunctionModel::Simplex(s) => {
                if s.contains(x) {
                    1.0
                } else {
                    0.0
                }
            }
            FunctionModel::SimplexFamily(f) => f.value(x),
            FunctionModel::Product(f) => f.value(x),
        }
    }
}

/// Free-function form of [`FunctionModel::evaluate`].
pub fn evaluate(f: &FunctionModel, x: &[f64]) -> f64 {
    f.evaluate(x)
}

/// Free-function form of [`FunctionModel::dilate`].
pub fn dilate(f: &FunctionModel, a: f64) -> Result<FunctionModel> {
    f.dilate(a)
}
