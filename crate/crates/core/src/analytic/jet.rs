//! Truncated Taylor jets: a value together with its first two time
//! derivatives, closed under the arithmetic needed to expand nested `∂t`
//! operators with the product and chain rules.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// `(f, f', f'')` at one instant. `order` counts how many of the derivative
/// slots are still meaningful; taking [`Jet::dt`] consumes one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub order: u8,
}

const NAN: Complex64 = Complex64::new(f64::NAN, f64::NAN);

impl Jet {
    pub fn new(value: Complex64, d1: Complex64, d2: Complex64) -> Self {
        Self { value, d1, d2, order: 2 }
    }

    pub fn real(value: f64, d1: f64, d2: f64) -> Self {
        Self::new(value.into(), d1.into(), d2.into())
    }

    /// A time-independent quantity.
    pub fn constant(value: Complex64) -> Self {
        Self { value, d1: Complex64::ZERO, d2: Complex64::ZERO, order: 2 }
    }

    /// Time derivative. Panics if no derivative information is left, which
    /// would mean an expression needs more derivatives than were supplied.
    pub fn dt(self) -> Self {
        assert!(self.order > 0, "time derivative requested beyond the supplied order");
        Self { value: self.d1, d1: self.d2, d2: NAN, order: self.order - 1 }
    }

    pub fn recip(self) -> Self {
        let inv = self.value.inv();
        let inv2 = inv * inv;
        Self {
            value: inv,
            d1: -self.d1 * inv2,
            d2: -self.d2 * inv2 + self.d1 * self.d1 * inv2 * inv * 2.0,
            order: self.order,
        }
    }

    pub fn scale(self, k: Complex64) -> Self {
        Self { value: self.value * k, d1: self.d1 * k, d2: self.d2 * k, order: self.order }
    }

    /// `(∂t − k)·self` for a constant `k`.
    pub fn dt_minus(self, k: Complex64) -> Self {
        self.dt() - self.scale(k)
    }

    pub fn powi(self, n: u32) -> Self {
        (1..n).fold(self, |acc, _| acc * self)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { value: self.value + o.value, d1: self.d1 + o.d1, d2: self.d2 + o.d2, order: self.order.min(o.order) }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { value: -self.value, d1: -self.d1, d2: -self.d2, order: self.order }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            value: self.value * o.value,
            d1: self.d1 * o.value + self.value * o.d1,
            d2: self.d2 * o.value + self.d1 * o.d1 * 2.0 + self.value * o.d2,
            order: self.order.min(o.order),
        }
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, k: f64) -> Jet {
        self.scale(k.into())
    }
}

impl Mul<Complex64> for Jet {
    type Output = Jet;
    fn mul(self, k: Complex64) -> Jet {
        self.scale(k)
    }
}

impl Add<Complex64> for Jet {
    type Output = Jet;
    fn add(self, k: Complex64) -> Jet {
        Jet { value: self.value + k, ..self }
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, k: f64) -> Jet {
        self + Complex64::from(k)
    }
}
