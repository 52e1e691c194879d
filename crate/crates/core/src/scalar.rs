//! Scalar abstraction shared by every module.
//!
//! All amplitudes are `Complex<T>` where `T` is one of the floating point
//! types implementing [`Real`].

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar usable as the real part of an amplitude.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute tolerance used when validating unitarity and normalisation.
    const DEFAULT_TOL: f64;

    /// Converts an `f64` literal into `Self`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal is representable")
    }

    fn default_tol() -> Self {
        Self::lit(Self::DEFAULT_TOL)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const DEFAULT_TOL: f64 = 1e-12;
}

impl Real for f32 {
    const DEFAULT_TOL: f64 = 1e-5;
}

/// Complex amplitude over `T`.
pub type Cx<T> = Complex<T>;

pub(crate) fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

pub(crate) fn re<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

/// `e^{i theta}`
pub(crate) fn expi<T: Real>(theta: T) -> Cx<T> {
    Complex::new(theta.cos(), theta.sin())
}

pub(crate) fn is_finite<T: Real>(z: Cx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
