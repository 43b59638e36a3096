use nalgebra::{Complex, ComplexField};

/// Scalar field of a measurement stream: `f64` or `Complex<f64>`.
///
/// Real streams run through exactly the same arithmetic as complex ones;
/// with zero imaginary parts every complex operation used by the estimators
/// reduces to the corresponding real one.
pub trait Scalar: ComplexField<RealField = f64> + Copy + Send + Sync + 'static {
    /// `r·e^{j·arg(self)}`, with `arg(0) = 0`. For reals this is `±r`.
    fn with_modulus(self, r: f64) -> Self {
        let m = self.modulus();
        if m == 0.0 {
            Self::from_real(r)
        } else {
            self.scale(r / m)
        }
    }

    /// Builds a scalar from real and imaginary parts; real fields drop `im`.
    fn from_parts(re: f64, im: f64) -> Self;

    fn is_complex() -> bool;
}

impl Scalar for f64 {
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }

    fn is_complex() -> bool {
        false
    }
}

impl Scalar for Complex<f64> {
    fn from_parts(re: f64, im: f64) -> Self {
        Complex::new(re, im)
    }

    fn is_complex() -> bool {
        true
    }
}
