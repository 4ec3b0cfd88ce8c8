//! Scalar abstraction.
//!
//! Every numerical type in the crate is generic over a real field `R`
//! (`f32` or `f64`); signals and operators live over `Complex<R>`.

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable as the base field of every computation.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive {}

/// Complex scalar over `R`.
pub type C<R> = Complex<R>;
/// Dense complex matrix over `R`.
pub type CMatrix<R> = DMatrix<Complex<R>>;
/// Dense complex column vector over `R`.
pub type CVector<R> = DVector<Complex<R>>;

/// Converts an `f64` literal into `R`.
#[inline]
pub fn lit<R: Real>(x: f64) -> R {
    nalgebra::convert(x)
}

/// Converts `R` back into `f64` (exact for `f32`/`f64`).
#[inline]
pub fn to_f64<R: Real>(x: R) -> f64 {
    ToPrimitive::to_f64(&x).unwrap_or(f64::NAN)
}

#[inline]
pub fn cplx<R: Real>(re: R, im: R) -> C<R> {
    Complex::new(re, im)
}

#[inline]
pub fn cre<R: Real>(re: R) -> C<R> {
    Complex::new(re, R::zero())
}

/// Complex number from `f64` parts.
#[inline]
pub fn c64_to<R: Real>(re: f64, im: f64) -> C<R> {
    Complex::new(lit(re), lit(im))
}

/// Modulus `|z|`.
#[inline]
pub fn modulus<R: Real>(z: C<R>) -> R {
    (z.re * z.re + z.im * z.im).sqrt()
}

#[inline]
pub fn recip<R: Real>(z: C<R>) -> C<R> {
    let d = z.re * z.re + z.im * z.im;
    Complex::new(z.re / d, -z.im / d)
}

/// Integer power by repeated squaring; negative exponents invert.
pub fn cpowi<R: Real>(z: C<R>, k: i32) -> C<R> {
    let mut base = if k < 0 { recip(z) } else { z };
    let mut e = k.unsigned_abs();
    let mut acc = Complex::new(R::one(), R::zero());
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// `e^{iθ}`.
#[inline]
pub fn cis<R: Real>(theta: R) -> C<R> {
    Complex::new(theta.cos(), theta.sin())
}

/// Real power `x^p` for `x ≥ 0`.
#[inline]
pub fn rpow<R: Real>(x: R, p: R) -> R {
    if x <= R::zero() {
        R::zero()
    } else {
        (x.ln() * p).exp()
    }
}

#[inline]
pub fn rmax<R: Real>(a: R, b: R) -> R {
    if a >= b || b != b {
        a
    } else {
        b
    }
}

#[inline]
pub fn rmin<R: Real>(a: R, b: R) -> R {
    if a <= b || b != b {
        a
    } else {
        b
    }
}

/// Promotes a real matrix to a complex one.
pub fn complexify<R: Real>(m: &DMatrix<R>) -> CMatrix<R> {
    m.map(cre)
}
