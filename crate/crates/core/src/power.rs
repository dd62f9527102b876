//! Real powers with cheap paths for the exponents that actually show up in
//! chemotaxis models (integers and half-integers).

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Zero,
    One,
    Square,
    Sqrt,
    Integer(i32),
    /// `n + 1/2`, stored as `n`.
    HalfInteger(i32),
    General,
}

/// A fixed exponent `e`, evaluated as `x^e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Power {
    exponent: f64,
    kind: Kind,
}

impl Power {
    pub fn new(exponent: f64) -> Self {
        let kind = if exponent == 0.0 {
            Kind::Zero
        } else if exponent == 1.0 {
            Kind::One
        } else if exponent == 2.0 {
            Kind::Square
        } else if exponent == 0.5 {
            Kind::Sqrt
        } else if exponent.fract() == 0.0 && exponent.abs() < i32::MAX as f64 {
            Kind::Integer(exponent as i32)
        } else if (exponent - 0.5).fract() == 0.0 && exponent > 0.0 && exponent < i32::MAX as f64 {
            Kind::HalfInteger((exponent - 0.5) as i32)
        } else {
            Kind::General
        };
        Self { exponent, kind }
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// True when `x^e` has no real value for negative `x`.
    pub fn is_fractional(&self) -> bool {
        !matches!(self.kind, Kind::Zero | Kind::One | Kind::Square | Kind::Integer(_))
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self.kind {
            Kind::Zero => 1.0,
            Kind::One => x,
            Kind::Square => x * x,
            Kind::Sqrt => x.sqrt(),
            Kind::Integer(n) => x.powi(n),
            Kind::HalfInteger(n) => x.powi(n) * x.sqrt(),
            Kind::General => x.powf(self.exponent),
        }
    }

    /// `x^e`, or `None` when the result would be imaginary.
    #[inline]
    pub fn checked(&self, x: f64) -> Option<f64> {
        if x < 0.0 && self.is_fractional() {
            None
        } else {
            Some(self.apply(x))
        }
    }
}
