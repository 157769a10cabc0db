//! Tilt central charges, slopes and numerical walls in the `(α², β)` plane.
//!
//! `α` itself is never stored: every quantity used here is polynomial in `α²`,
//! so points are kept as `(α², β)` with both coordinates rational.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::chern::{ChernCharacter, FanoContext};
use crate::rational::{int, text, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TiltError {
    #[error("alpha^2 must be positive, got {0}")]
    NonPositiveAlphaSq(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TiltPoint {
    alpha_sq: Rational,
    beta: Rational,
}

impl TiltPoint {
    pub fn new(alpha_sq: Rational, beta: Rational) -> Result<Self, TiltError> {
        if alpha_sq.is_positive() {
            Ok(TiltPoint { alpha_sq, beta })
        } else {
            Err(TiltError::NonPositiveAlphaSq(text(&alpha_sq)))
        }
    }

    pub fn alpha_sq(&self) -> Rational {
        self.alpha_sq
    }

    pub fn beta(&self) -> Rational {
        self.beta
    }
}

impl fmt::Display for TiltPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(alpha^2={}, beta={})", text(&self.alpha_sq), text(&self.beta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChargeValue {
    pub re: Rational,
    pub im: Rational,
}

impl ChargeValue {
    pub fn new(re: Rational, im: Rational) -> Self {
        ChargeValue { re, im }
    }

    pub fn zero() -> Self {
        ChargeValue::new(Rational::zero(), Rational::zero())
    }

    /// Division by `i`, i.e. a quarter turn clockwise.
    pub fn rotate(&self) -> Self {
        ChargeValue::new(self.im, -self.re)
    }

    /// `-re/im` with the weak-stability convention for `im ≤ 0`.
    pub fn slope(&self) -> Slope {
        if self.im.is_positive() {
            Slope::Finite(-self.re / self.im)
        } else if self.im.is_zero() {
            Slope::Infinite(InfiniteSlope::ZeroIm { re_nonpositive: !self.re.is_positive() })
        } else {
            Slope::Infinite(InfiniteSlope::NegativeIm)
        }
    }
}

impl Add for ChargeValue {
    type Output = ChargeValue;

    fn add(self, o: ChargeValue) -> ChargeValue {
        ChargeValue::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for ChargeValue {
    type Output = ChargeValue;

    fn sub(self, o: ChargeValue) -> ChargeValue {
        ChargeValue::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for ChargeValue {
    type Output = ChargeValue;

    fn neg(self) -> ChargeValue {
        ChargeValue::new(-self.re, -self.im)
    }
}

/// How a `+∞` slope arose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InfiniteSlope {
    /// `im = 0`; objects in a heart additionally need `re ≤ 0`.
    ZeroIm { re_nonpositive: bool },
    /// `im < 0`: the character of a shifted object, reported as `+∞` rather than rejected.
    NegativeIm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slope {
    Finite(Rational),
    Infinite(InfiniteSlope),
}

impl Slope {
    pub fn finite(&self) -> Option<Rational> {
        match self {
            Slope::Finite(x) => Some(*x),
            Slope::Infinite(_) => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Slope::Infinite(_))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(x) => write!(f, "{}", text(x)),
            Slope::Infinite(_) => write!(f, "+inf"),
        }
    }
}

/// `Z_{α,β}` evaluated at a raw `(α², β)` pair; `α² = 0` is allowed here.
pub fn central_charge_raw(
    v: &ChernCharacter,
    alpha_sq: Rational,
    beta: Rational,
    ctx: &FanoContext,
) -> ChargeValue {
    let t = v.truncated().twist(beta, ctx);
    let d = ctx.d();
    ChargeValue::new(alpha_sq * d * t.ch0 / int(2) - t.ch2, d * t.ch1)
}

/// `Z_{α,β}(v) = ½α²·d·ch0^β − ch2^β + i·d·ch1^β`.
pub fn central_charge(v: &ChernCharacter, pt: &TiltPoint, ctx: &FanoContext) -> ChargeValue {
    central_charge_raw(v, pt.alpha_sq, pt.beta, ctx)
}

pub fn tilt_slope(v: &ChernCharacter, pt: &TiltPoint, ctx: &FanoContext) -> Slope {
    central_charge(v, pt, ctx).slope()
}

/// `Z⁰ = Z/i`, so `(re', im') = (im Z, −re Z)`.
pub fn rotated_charge(v: &ChernCharacter, pt: &TiltPoint, ctx: &FanoContext) -> ChargeValue {
    central_charge(v, pt, ctx).rotate()
}

pub fn rotated_slope(v: &ChernCharacter, pt: &TiltPoint, ctx: &FanoContext) -> Slope {
    rotated_charge(v, pt, ctx).slope()
}

/// The triangular region `-1/2 ≤ β < 0, α < −β` or `-1 < β < -1/2, α ≤ 1 + β`.
pub fn region_v_contains(pt: &TiltPoint) -> bool {
    let (a2, b) = (pt.alpha_sq, pt.beta);
    let half = Rational::new(1, 2);
    let one = int(1);
    if -half <= b && b < Rational::zero() {
        a2 < b * b
    } else if -one < b && b < -half {
        a2 <= (one + b) * (one + b)
    } else {
        false
    }
}

/// Solution set of `Re Z(v)·Im Z(w) = Re Z(w)·Im Z(v)` in the `(β, α)` half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WallLocus {
    /// `(β − center)² + α² = radius²`.
    Circle {
        center_beta: Rational,
        radius_sq: Rational,
    },
    VerticalLine {
        beta0: Rational,
    },
    Everywhere,
    Nowhere,
}

impl WallLocus {
    /// Whether `(α², β)` lies on the locus.
    pub fn contains(&self, alpha_sq: Rational, beta: Rational) -> bool {
        match *self {
            WallLocus::Circle { center_beta, radius_sq } => {
                (beta - center_beta) * (beta - center_beta) + alpha_sq == radius_sq
            }
            WallLocus::VerticalLine { beta0 } => beta == beta0,
            WallLocus::Everywhere => true,
            WallLocus::Nowhere => false,
        }
    }
}

/// `Re Z(v)·Im Z(w) − Re Z(w)·Im Z(v)`; vanishes exactly where the slopes agree.
pub fn slope_difference_form(
    v: &ChernCharacter,
    w: &ChernCharacter,
    alpha_sq: Rational,
    beta: Rational,
    ctx: &FanoContext,
) -> Rational {
    let zv = central_charge_raw(v, alpha_sq, beta, ctx);
    let zw = central_charge_raw(w, alpha_sq, beta, ctx);
    zv.re * zw.im - zw.re * zv.im
}

pub fn wall_between(v: &ChernCharacter, w: &ChernCharacter, ctx: &FanoContext) -> WallLocus {
    // The form is A·α² + p(β) with A constant and p quadratic whose leading
    // coefficient is A again; read p off at β = 0, 1, −1.
    let d = ctx.d();
    let a = d * d * (v.ch0 * w.ch1 - w.ch0 * v.ch1) / int(2);
    let zero = Rational::zero();
    let f = |b: i128| slope_difference_form(v, w, zero, int(b), ctx);
    let (f0, f1, fm) = (f(0), f(1), f(-1));
    let p0 = f0;
    let p1 = (f1 - fm) / int(2);
    let p2 = (f1 + fm) / int(2) - f0;
    debug_assert_eq!(p2, a);

    if a.is_zero() {
        return if !p1.is_zero() {
            WallLocus::VerticalLine { beta0: -p0 / p1 }
        } else if p0.is_zero() {
            WallLocus::Everywhere
        } else {
            WallLocus::Nowhere
        };
    }
    let center_beta = -p1 / (int(2) * a);
    let radius_sq = center_beta * center_beta - p0 / a;
    if radius_sq.is_positive() {
        WallLocus::Circle { center_beta, radius_sq }
    } else {
        WallLocus::Nowhere
    }
}
