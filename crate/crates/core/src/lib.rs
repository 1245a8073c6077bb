pub mod ball;
pub mod error;
pub mod harmonic;
pub mod intervals;
pub mod kahane;
pub mod maximal;
pub mod names;
pub mod quad;
pub mod rational;
pub mod schnorr;
pub mod suites;
pub mod trigpoly;

pub use ball::{CBall, CertifiedReal};
pub use error::{Error, Result};
pub use intervals::{Angle, IntervalSet};
pub use rational::{QComplex, Q};
pub use trigpoly::{fejer_kernel, TrigPoly};
