//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the graph and linear-algebra code is generic over.
///
/// Implemented for `f32` and `f64`; the crate-root aliases fix `f64`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_f64(n as f64).expect("usize representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }

    /// Relative tolerance used where the f64 code path uses `1e-10`.
    fn tight_tol() -> Self {
        Self::epsilon() * Self::lit(4.5e5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A value that is either finite or the distinguished `+∞` of the
/// isocapacitary conventions. Infinity never enters arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> Extended<T> {
    pub fn finite(&self) -> Option<T> {
        match *self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    /// Total order with `Infinite` above every finite value.
    pub fn total_cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b).unwrap_or(Ordering::Equal),
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self.total_cmp(&other) == std::cmp::Ordering::Less {
            other
        } else {
            self
        }
    }

    /// Multiply a finite value by a positive factor; infinity stays infinite.
    pub fn scale(self, s: T) -> Self {
        match self {
            Extended::Finite(v) => Extended::Finite(v * s),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

impl<T: Display> Display for Extended<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => f.write_str("infinite"),
        }
    }
}
