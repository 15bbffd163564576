//! Abelian 3-cocycles, quadratic forms and skeletal braided categorical groups.
#![allow(clippy::needless_range_loop)]

pub mod cocycles;
pub mod error;
pub mod groups;
pub mod intmat;
pub mod json;
pub mod presentations;
pub mod quadforms;
pub mod skeletal;
pub mod target;

pub use error::{Error, Result};
pub use groups::{Group, GroupElement};
pub use quadforms::{BilinearForm, QuadraticForm};
pub use target::{QZValue, TargetGroup, Value};
