use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};

/// Floating point scalar the numeric kernels are generic over: `f32` or `f64`.
pub trait Scalar: Float + FromPrimitive + Debug + Default + Send + Sync + 'static {
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable as float")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
