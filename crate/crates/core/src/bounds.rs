//! Numerical inequalities for tilt-semistable characters.
//!
//! Each check only evaluates an inequality; whether the tested character
//! actually belongs to a semistable object is left to the caller, so a
//! violation reads as "eliminated if stable".

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::chern::{ChernCharacter, FanoContext};
use crate::rational::{int, rat, Rational};
use crate::tilt::TiltPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundStatus {
    Pass,
    Violate,
    Equality,
    NotApplicable,
}

impl BoundStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundStatus::Pass => "pass",
            BoundStatus::Violate => "violate",
            BoundStatus::Equality => "equality",
            BoundStatus::NotApplicable => "not-applicable",
        }
    }
}

/// Which inequality (or which window of it) produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundReason {
    Bogomolov,
    /// `d = 5`, `μ² ≤ 3/20`: bound 0.
    LiDegree5,
    /// `d = 4`, `√3/4 ≤ |μ| ≤ 1 − √3/4`: bound `μ²/2 − 3/32`.
    LiDegree4,
    /// `d = 3`, `|μ| ≤ 1/2`: bound 0.
    LiDegree3Inner,
    /// `d = 3`, `1/2 < |μ| ≤ 1`: bound `|μ| − 1/2`.
    LiDegree3Outer,
    /// `d = 2`, `|μ| ≤ 1/2`: bound 0.
    LiDegree2,
    /// Equality in a Li window with rank other than 1 or 2.
    LiRider,
    LiOutsideWindows,
    LiNoBoundForDegree,
    ZeroRank,
}

impl BoundReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundReason::Bogomolov => "bogomolov",
            BoundReason::LiDegree5 => "li-d5",
            BoundReason::LiDegree4 => "li-d4",
            BoundReason::LiDegree3Inner => "li-d3-inner",
            BoundReason::LiDegree3Outer => "li-d3-outer",
            BoundReason::LiDegree2 => "li-d2",
            BoundReason::LiRider => "li-rider",
            BoundReason::LiOutsideWindows => "li-outside-windows",
            BoundReason::LiNoBoundForDegree => "li-no-bound-for-degree",
            BoundReason::ZeroRank => "zero-rank",
        }
    }
}

impl fmt::Display for BoundReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundVerdict {
    pub status: BoundStatus,
    /// The tested quantity.
    pub value: Option<Rational>,
    pub bound_value: Option<Rational>,
    pub reason: BoundReason,
}

impl BoundVerdict {
    fn not_applicable(value: Option<Rational>, reason: BoundReason) -> Self {
        BoundVerdict { status: BoundStatus::NotApplicable, value, bound_value: None, reason }
    }

    /// Upper-bound comparison `value ≤ bound`.
    fn upper(value: Rational, bound: Rational, reason: BoundReason) -> Self {
        let status = if value < bound {
            BoundStatus::Pass
        } else if value == bound {
            BoundStatus::Equality
        } else {
            BoundStatus::Violate
        };
        BoundVerdict { status, value: Some(value), bound_value: Some(bound), reason }
    }

    /// Pass or equality.
    pub fn holds(&self) -> bool {
        matches!(self.status, BoundStatus::Pass | BoundStatus::Equality)
    }

    pub fn is_violation(&self) -> bool {
        self.status == BoundStatus::Violate
    }
}

/// `Δ ≥ 0`, reported as a lower-bound check with bound 0.
pub fn bogomolov_check(v: &ChernCharacter, ctx: &FanoContext) -> BoundVerdict {
    let delta = v.discriminant(ctx);
    let zero = Rational::zero();
    let status = if delta.is_positive() {
        BoundStatus::Pass
    } else if delta.is_zero() {
        BoundStatus::Equality
    } else {
        BoundStatus::Violate
    };
    BoundVerdict { status, value: Some(delta), bound_value: Some(zero), reason: BoundReason::Bogomolov }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LiBound {
    /// Upper bound on `ch2/(d·ch0)`.
    pub bound: Rational,
    pub reason: BoundReason,
}

/// The Li upper bound on `ch2/(d·ch0)` at Mumford slope `mu`, if one applies.
///
/// The irrational window endpoints `√(3/20)` and `√3/4` are decided on `μ²`.
pub fn li_ch2_bound(ctx: &FanoContext, mu: Rational) -> Option<LiBound> {
    let abs = mu.abs();
    let sq = mu * mu;
    let half = rat(1, 2);
    let found = |bound, reason| Some(LiBound { bound, reason });
    match ctx.degree() {
        5 if sq <= rat(3, 20) => found(int(0), BoundReason::LiDegree5),
        4 => {
            let one_minus = int(1) - abs;
            let inside = sq >= rat(3, 16) && abs <= int(1) && one_minus * one_minus >= rat(3, 16);
            if inside {
                found(sq / int(2) - rat(3, 32), BoundReason::LiDegree4)
            } else {
                None
            }
        }
        3 if abs <= half => found(int(0), BoundReason::LiDegree3Inner),
        3 if abs <= int(1) => found(abs - half, BoundReason::LiDegree3Outer),
        2 if abs <= half => found(int(0), BoundReason::LiDegree2),
        _ => None,
    }
}

/// Li's inequality for `v`, with the equality rider: equality is only
/// possible in ranks 1 and 2, so equality in any other rank is a violation.
pub fn li_check(v: &ChernCharacter, ctx: &FanoContext) -> BoundVerdict {
    if v.ch0.is_zero() {
        return BoundVerdict::not_applicable(None, BoundReason::ZeroRank);
    }
    let mu = v.ch1 / v.ch0;
    let ratio = v.ch2 / (ctx.d() * v.ch0);
    if ctx.degree() == 1 {
        return BoundVerdict::not_applicable(Some(ratio), BoundReason::LiNoBoundForDegree);
    }
    let Some(li) = li_ch2_bound(ctx, mu) else {
        return BoundVerdict::not_applicable(Some(ratio), BoundReason::LiOutsideWindows);
    };
    let verdict = BoundVerdict::upper(ratio, li.bound, li.reason);
    let rank = v.ch0.abs();
    if verdict.status == BoundStatus::Equality && rank != int(1) && rank != int(2) {
        return BoundVerdict { status: BoundStatus::Violate, reason: BoundReason::LiRider, ..verdict };
    }
    verdict
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("twisted degree d*ch1^beta vanishes, the ch3 bound is degenerate")]
    Degenerate,
    #[error("twisted degree d*ch1^beta is negative, no upper ch3 bound")]
    NegativeTwistedDegree,
    #[error("alpha^2 must be non-negative")]
    NegativeAlphaSq,
}

/// Largest untwisted `ch3` allowed by
/// `α²Δ(v) + 4(ch2^β)² − 6(d·ch1^β)·ch3^β ≥ 0`, with `α² = 0` permitted.
pub fn bms_ch3_bound_at(
    v: &ChernCharacter,
    alpha_sq: Rational,
    beta: Rational,
    ctx: &FanoContext,
) -> Result<Rational, BoundsError> {
    if alpha_sq.is_negative() {
        return Err(BoundsError::NegativeAlphaSq);
    }
    let t = v.truncated().twist(beta, ctx);
    let h2ch1 = ctx.d() * t.ch1;
    if h2ch1.is_zero() {
        return Err(BoundsError::Degenerate);
    }
    if h2ch1.is_negative() {
        return Err(BoundsError::NegativeTwistedDegree);
    }
    let twisted_bound = (alpha_sq * v.discriminant(ctx) + int(4) * t.ch2 * t.ch2) / (int(6) * h2ch1);
    let untwisted = t.with_ch3(twisted_bound).twist(-beta, ctx);
    Ok(untwisted.ch3.expect("ch3 was just set"))
}

pub fn bms_ch3_bound(v: &ChernCharacter, pt: &TiltPoint, ctx: &FanoContext) -> Result<Rational, BoundsError> {
    bms_ch3_bound_at(v, pt.alpha_sq(), pt.beta(), ctx)
}
