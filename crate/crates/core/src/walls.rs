//! Certified finite enumeration of numerical walls and destabilizing pairs.
//!
//! Two searches live here. [`enumerate_walls_on_line`] fixes β and looks for
//! splittings `target = sub + quot` in the twisted lattice whose tilt slopes
//! agree at some `α²` in a range; [`enumerate_axis_destabilizers`] fixes a
//! point and looks for splittings whose parts both lie on the real axis of the
//! rotated charge. Both report every search dimension's bound in a
//! [`CompletenessCertificate`].
//!
//! Twisted coordinates at `β = p/q` (lowest terms) are written
//! `(a, b/q, c/(2q²))` with integers `a, b, c`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::bounds::{bogomolov_check, li_check, BoundReason, BoundStatus, BoundVerdict};
use crate::chern::{ChernCharacter, FanoContext};
use crate::rational::{as_integer, ceil_int, floor_int, int, rat, text, Rational};
use crate::tilt::{central_charge, TiltPoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WallsError {
    #[error("alpha^2 range must satisfy 0 <= lo < hi, got ({0}, {1})")]
    InvalidRange(String, String),
    #[error("target has non-positive twisted degree {0} at this beta")]
    NonPositiveTwistedDegree(String),
    #[error("rank search is unbounded for b = {b}; supply a rank cap or a positive alpha^2 lower bound")]
    Unbounded { b: i128 },
    #[error("target is not on the real axis of the rotated charge at {0}")]
    NotOnAxis(String),
    #[error("target must have integral level-2 data: {0}")]
    NonLattice(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Proportional,
    ZeroPart,
    SignClash,
    DeltaViolation,
    LatticeViolation,
    LiEliminated,
    RiderEliminated,
    JhEliminated,
    RequiresCategorical,
    Survives,
}

impl Tag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tag::Proportional => "proportional",
            Tag::ZeroPart => "zero-part",
            Tag::SignClash => "sign-clash",
            Tag::DeltaViolation => "delta-violation",
            Tag::LatticeViolation => "lattice-violation",
            Tag::LiEliminated => "li-eliminated",
            Tag::RiderEliminated => "rider-eliminated",
            Tag::JhEliminated => "jh-eliminated",
            Tag::RequiresCategorical => "requires-categorical",
            Tag::Survives => "survives",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `α² ∈ (lo, hi]` or `(lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlphaSqRange {
    pub lo: Rational,
    pub hi: Rational,
    pub hi_inclusive: bool,
}

impl AlphaSqRange {
    pub fn open(lo: Rational, hi: Rational) -> Self {
        AlphaSqRange { lo, hi, hi_inclusive: false }
    }

    pub fn half_open(lo: Rational, hi: Rational) -> Self {
        AlphaSqRange { lo, hi, hi_inclusive: true }
    }

    pub fn contains(&self, x: Rational) -> bool {
        x > self.lo && (x < self.hi || (self.hi_inclusive && x == self.hi))
    }

    fn as_interval(&self) -> Interval {
        Interval { lo: self.lo, lo_closed: false, hi: self.hi, hi_closed: self.hi_inclusive }
    }
}

/// A bounded interval of rationals with independent endpoint closure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: Rational,
    pub lo_closed: bool,
    pub hi: Rational,
    pub hi_closed: bool,
}

impl Interval {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    pub fn contains(&self, x: Rational) -> bool {
        (x > self.lo || (self.lo_closed && x == self.lo)) && (x < self.hi || (self.hi_closed && x == self.hi))
    }

    /// Intersect with `{x : m·x + n ≥ 0}`; `None` when that set is empty.
    fn meet_affine(mut self, m: Rational, n: Rational) -> Option<Interval> {
        if m.is_zero() {
            return (!n.is_negative()).then_some(self);
        }
        let root = -n / m;
        if m.is_positive() {
            if root > self.lo || (root == self.lo && !self.lo_closed) {
                self.lo = root;
                self.lo_closed = true;
            }
        } else if root < self.hi || (root == self.hi && !self.hi_closed) {
            self.hi = root;
            self.hi_closed = true;
        }
        (!self.is_empty()).then_some(self)
    }

    /// Integers `n` with `n` in the image of the interval under the monotone
    /// affine map `x ↦ c0 + c1·x` (`c1 ≠ 0`).
    fn integers_in_image(&self, c0: Rational, c1: Rational) -> std::ops::RangeInclusive<i128> {
        let (mut lo, mut lo_closed) = (c0 + c1 * self.lo, self.lo_closed);
        let (mut hi, mut hi_closed) = (c0 + c1 * self.hi, self.hi_closed);
        if c1.is_negative() {
            std::mem::swap(&mut lo, &mut hi);
            std::mem::swap(&mut lo_closed, &mut hi_closed);
        }
        let start = if lo_closed { ceil_int(&lo) } else { floor_int(&lo) + 1 };
        let end = if hi_closed { floor_int(&hi) } else { ceil_int(&hi) - 1 };
        start..=end
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            text(&self.lo),
            text(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlphaSq {
    Exact(Rational),
    /// The slope condition holds, or is vacuous, on the whole range.
    Throughout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Derivation {
    DeltaInterval,
    SlopeMonotone,
    UserCap,
}

impl Derivation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Derivation::DeltaInterval => "delta-interval",
            Derivation::SlopeMonotone => "slope-monotone",
            Derivation::UserCap => "user-cap",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompletenessCertificate {
    pub complete: bool,
    /// Largest `|ch0|` of a part that had to be examined.
    pub rank_bound_used: i128,
    pub derivation: Derivation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallCandidate {
    /// `(a, b, c)` in twisted coordinates.
    pub triple: (i128, i128, i128),
    /// Untwisted level-2 characters.
    pub sub: ChernCharacter,
    pub quot: ChernCharacter,
    pub sub_twisted: ChernCharacter,
    pub quot_twisted: ChernCharacter,
    pub alpha_sq: AlphaSq,
    pub tags: BTreeSet<Tag>,
    pub li_sub: Option<BoundVerdict>,
    pub li_quot: Option<BoundVerdict>,
}

impl WallCandidate {
    pub fn survives(&self) -> bool {
        self.tags.contains(&Tag::Survives)
    }

    pub fn has(&self, tag: Tag) -> bool {
        self.tags.contains(&tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BranchKind {
    /// Interior `b` with an `α²` window from slope equality and `Δ ≥ 0`.
    Window { window: Interval, integral_c: usize },
    /// Endpoint `b` where slope equality forces `Δ < 0` for every `a ≠ 0`.
    SignClash,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WallBranch {
    /// `None` stands for every nonzero rank at once.
    pub a: Option<i128>,
    pub b: i128,
    pub kind: BranchKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineQuery {
    pub target: ChernCharacter,
    pub beta: Rational,
    pub range: AlphaSqRange,
    pub rank_cap: Option<i128>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallEnumeration {
    pub target_twisted: ChernCharacter,
    pub beta: Rational,
    pub range: AlphaSqRange,
    /// Sorted lexicographically by `(a, b, c)`.
    pub candidates: Vec<WallCandidate>,
    pub branches: Vec<WallBranch>,
    pub certificate: CompletenessCertificate,
}

impl WallEnumeration {
    pub fn survivors(&self) -> impl Iterator<Item = &WallCandidate> {
        self.candidates.iter().filter(|c| c.survives())
    }

    pub fn find(&self, a: i128, b: i128, c: i128) -> Option<&WallCandidate> {
        self.candidates.iter().find(|k| k.triple == (a, b, c))
    }
}

/// Closed integer set used for the rank window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Span {
    Empty,
    Bounded(i128, i128),
    Below(i128),
    Above(i128),
    All,
}

impl Span {
    fn meet(self, other: Span) -> Span {
        use Span::*;
        let lo = |s: Span| match s {
            Bounded(l, _) | Above(l) => Some(l),
            _ => None,
        };
        let hi = |s: Span| match s {
            Bounded(_, h) | Below(h) => Some(h),
            _ => None,
        };
        if self == Empty || other == Empty {
            return Empty;
        }
        let l = match (lo(self), lo(other)) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        let h = match (hi(self), hi(other)) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        match (l, h) {
            (Some(l), Some(h)) if l > h => Empty,
            (Some(l), Some(h)) => Bounded(l, h),
            (Some(l), None) => Above(l),
            (None, Some(h)) => Below(h),
            (None, None) => All,
        }
    }
}

/// Integers where `g(n) = a2·n² + a1·n + a0 ≥ 0`, for `a2 ≤ 0`.
fn nonnegative_span(a2: Rational, a1: Rational, a0: Rational) -> Span {
    let g = |n: i128| a2 * int(n) * int(n) + a1 * int(n) + a0;
    if a2.is_zero() {
        if a1.is_zero() {
            return if a0.is_negative() { Span::Empty } else { Span::All };
        }
        let root = -a0 / a1;
        return if a1.is_positive() { Span::Above(ceil_int(&root)) } else { Span::Below(floor_int(&root)) };
    }
    debug_assert!(a2.is_negative());
    // concave: the integer maximum sits next to the vertex
    let vertex = -a1 / (int(2) * a2);
    let v0 = floor_int(&vertex);
    let start = if !g(v0).is_negative() {
        v0
    } else if !g(v0 + 1).is_negative() {
        v0 + 1
    } else {
        return Span::Empty;
    };
    let edge = |dir: i128| {
        let mut step = 1i128;
        while !g(start + dir * step).is_negative() {
            step *= 2;
        }
        // g ≥ 0 at start + dir·(step/2 or 0), < 0 at start + dir·step
        let (mut good, mut bad) = (step / 2, step);
        while bad - good > 1 {
            let mid = (good + bad) / 2;
            if g(start + dir * mid).is_negative() {
                bad = mid;
            } else {
                good = mid;
            }
        }
        start + dir * good
    };
    Span::Bounded(edge(-1), edge(1))
}

/// Quadratic coefficients of `n ↦ f(n)` from its values at 0, 1, 2.
fn quadratic_coefficients(f: impl Fn(i128) -> Rational) -> (Rational, Rational, Rational) {
    let (f0, f1, f2) = (f(0), f(1), f(2));
    let a2 = (f2 - int(2) * f1 + f0) / int(2);
    (a2, f1 - f0 - a2, f0)
}

/// Li's inequality on the sheaf side of a part, with the stability evidence
/// needed to turn a violation into an elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct LiAssessment {
    verdict: Option<BoundVerdict>,
    /// Strict bound eliminates: the part is a primitive class with `Δ = 0`.
    strict_certified: bool,
    /// Rider eliminates: primitive `Δ = 0` class or minimal twisted degree.
    rider_certified: bool,
}

impl LiAssessment {
    fn of(part: &ChernCharacter, minimal_degree: bool, ctx: &FanoContext) -> Self {
        if part.ch0.is_zero() {
            return LiAssessment { verdict: None, strict_certified: false, rider_certified: false };
        }
        let sheaf = sheaf_side(part);
        let primitive = sheaf.rank_degree_gcd() == Some(1) && sheaf.discriminant(ctx).is_zero();
        LiAssessment {
            verdict: Some(li_check(&sheaf, ctx)),
            strict_certified: primitive,
            rider_certified: primitive || minimal_degree,
        }
    }

    fn violated(&self) -> bool {
        self.verdict.is_some_and(|v| v.is_violation())
    }

    fn elimination(&self) -> Option<Tag> {
        let v = self.verdict?;
        if v.status != BoundStatus::Violate {
            return None;
        }
        if v.reason == BoundReason::LiRider {
            self.rider_certified.then_some(Tag::RiderEliminated)
        } else {
            self.strict_certified.then_some(Tag::LiEliminated)
        }
    }
}

fn sheaf_side(v: &ChernCharacter) -> ChernCharacter {
    if v.ch0.is_negative() {
        -v.truncated()
    } else {
        v.truncated()
    }
}

struct LineSetup<'a> {
    ctx: &'a FanoContext,
    beta: Rational,
    q: i128,
    target: ChernCharacter,
    big_r: Rational,
    big_b: Rational,
    big_c: Rational,
    delta_target: Rational,
    range: AlphaSqRange,
}

impl LineSetup<'_> {
    fn twisted(&self, a: i128, b: i128, c: i128) -> ChernCharacter {
        ChernCharacter::level2(int(a), rat(b, self.q), rat(c, 2 * self.q * self.q))
    }

    fn candidate(
        &self,
        triple: (i128, i128, i128),
        alpha_sq: AlphaSq,
        mut tags: BTreeSet<Tag>,
    ) -> WallCandidate {
        let (a, b, c) = triple;
        let sub_twisted = self.twisted(a, b, c);
        let quot_twisted = self.target - sub_twisted;
        let sub = sub_twisted.twist(-self.beta, self.ctx);
        let quot = self.target.truncated().twist(-self.beta, self.ctx) - sub;
        if !sub.is_lattice(self.ctx) || !quot.is_lattice(self.ctx) {
            tags.insert(Tag::LatticeViolation);
        }
        for part in [&sub, &quot] {
            if !bogomolov_check(part, self.ctx).holds() {
                tags.insert(Tag::DeltaViolation);
            }
            if part.discriminant(self.ctx) > self.delta_target {
                tags.insert(Tag::DeltaViolation);
            }
        }
        let bq = as_integer(&(self.big_b * int(self.q))).expect("integral twisted degree");
        let li_sub = LiAssessment::of(&sub, b == 1, self.ctx);
        let li_quot = LiAssessment::of(&quot, bq - b == 1, self.ctx);
        for li in [li_sub, li_quot] {
            if let Some(t) = li.elimination() {
                tags.insert(t);
            }
        }
        if tags.is_empty() {
            tags.insert(Tag::Survives);
        }
        WallCandidate {
            triple,
            sub,
            quot,
            sub_twisted,
            quot_twisted,
            alpha_sq,
            tags,
            li_sub: li_sub.verdict,
            li_quot: li_quot.verdict,
        }
    }

    /// Sub part at interior `t = b/q` on the slope-equality line:
    /// `σ(α²) = tC/B + ½·d·k·α²` with `k = a − tR/B`.
    fn k(&self, a: i128, t: Rational) -> Rational {
        int(a) - t * self.big_r / self.big_b
    }

    /// `(m, n)` with `Δ_sub(α²) = m·α² + n` and likewise for the quotient.
    fn delta_lines(&self, a: i128, t: Rational) -> ((Rational, Rational), (Rational, Rational)) {
        let d = self.ctx.d();
        let (r, bb, cc) = (self.big_r, self.big_b, self.big_c);
        let k = self.k(a, t);
        let a = int(a);
        let sigma0 = t * cc / bb;
        let sub = (-d * d * a * k, d * d * t * t - int(2) * d * a * sigma0);
        let quot = (d * d * (r - a) * k, d * d * (bb - t) * (bb - t) - int(2) * d * (r - a) * (cc - sigma0));
        (sub, quot)
    }

    /// Ranks that can possibly survive the `Δ ≥ 0` window at interior `t`.
    fn rank_span(&self, t: Rational) -> (Span, i128, i128) {
        let lo = self.range.lo;
        let s_lo = floor_int(&self.big_r.min(Rational::zero()));
        let s_hi = ceil_int(&self.big_r.max(Rational::zero()));
        // Outside [min(0,R), max(0,R)] both Δ lines decrease in α², so they
        // must already be non-negative at the lower end of the range.
        let at_lo = |which: usize| {
            move |a: i128| {
                let (s, qt) = self.delta_lines(a, t);
                let (m, n) = if which == 0 { s } else { qt };
                m * lo + n
            }
        };
        let (x2, x1, x0) = quadratic_coefficients(at_lo(0));
        let (y2, y1, y0) = quadratic_coefficients(at_lo(1));
        let span = nonnegative_span(x2, x1, x0).meet(nonnegative_span(y2, y1, y0));
        (span, s_lo, s_hi)
    }
}

/// Walls for `target` along the vertical line `β = query.beta`.
pub fn enumerate_walls_on_line(query: &LineQuery, ctx: &FanoContext) -> Result<WallEnumeration, WallsError> {
    let range = query.range;
    if range.lo.is_negative() || range.lo >= range.hi {
        return Err(WallsError::InvalidRange(text(&range.lo), text(&range.hi)));
    }
    let target = query.target.truncated();
    if !target.is_lattice(ctx) {
        return Err(WallsError::NonLattice(target.to_string()));
    }
    let beta = query.beta;
    let q = *beta.denom();
    let tw = target.twist(beta, ctx);
    if !tw.ch1.is_positive() {
        return Err(WallsError::NonPositiveTwistedDegree(text(&tw.ch1)));
    }
    let setup = LineSetup {
        ctx,
        beta,
        q,
        target: tw,
        big_r: tw.ch0,
        big_b: tw.ch1,
        big_c: tw.ch2,
        delta_target: target.discriminant(ctx),
        range,
    };
    let bq = as_integer(&(tw.ch1 * int(q))).expect("integral twisted degree");
    let d = ctx.d();

    let mut candidates = Vec::new();
    let mut branches = Vec::new();
    let mut rank_bound_used = 0i128;
    let mut derivation = Derivation::SlopeMonotone;
    let mut capped = false;

    // b = 0: slope equality reads σ = ½·d·a·α², so Δ_sub = −d²a²α² < 0 unless a = 0.
    branches.push(WallBranch { a: None, b: 0, kind: BranchKind::SignClash });
    let root = int(2) * tw.ch2 / (d * tw.ch0);
    let torsion_alpha =
        if !tw.ch0.is_zero() && range.contains(root) { AlphaSq::Exact(root) } else { AlphaSq::Throughout };
    candidates.push(setup.candidate(
        (0, 0, 0),
        torsion_alpha,
        BTreeSet::from([Tag::ZeroPart, Tag::RequiresCategorical]),
    ));

    for b in 1..bq {
        let t = rat(b, q);
        let (span, s_lo, s_hi) = setup.rank_span(t);
        let window = match span {
            Span::Empty => None,
            Span::Bounded(l, h) => Some((l, h)),
            _ => match query.rank_cap {
                Some(cap) => {
                    capped = true;
                    let clipped = span.meet(Span::Bounded(-cap, cap));
                    match clipped {
                        Span::Bounded(l, h) => Some((l, h)),
                        _ => None,
                    }
                }
                None => return Err(WallsError::Unbounded { b }),
            },
        };
        let mut ranks: BTreeSet<i128> = (s_lo..=s_hi).collect();
        if let Some((l, h)) = window {
            let (mut l, mut h) = (l, h);
            if let Some(cap) = query.rank_cap {
                if l < -cap || h > cap {
                    capped = true;
                }
                l = l.max(-cap);
                h = h.min(cap);
            }
            if l < s_lo || h > s_hi {
                derivation = Derivation::DeltaInterval;
            }
            ranks.extend(l..=h);
        }
        for &a in &ranks {
            rank_bound_used = rank_bound_used.max(a.abs());
            let k = setup.k(a, t);
            let sigma0 = t * tw.ch2 / tw.ch1;
            let two_q2 = int(2 * q * q);
            if k.is_zero() {
                if let Some(c) = as_integer(&(two_q2 * sigma0)) {
                    candidates.push(setup.candidate(
                        (a, b, c),
                        AlphaSq::Throughout,
                        BTreeSet::from([Tag::Proportional]),
                    ));
                }
                continue;
            }
            let ((sm, sn), (qm, qn)) = setup.delta_lines(a, t);
            let Some(window) = range.as_interval().meet_affine(sm, sn).and_then(|w| w.meet_affine(qm, qn))
            else {
                continue;
            };
            // c = 2q²·σ(α²)
            let (c0, c1) = (two_q2 * sigma0, two_q2 * d * k / int(2));
            let cs = window.integers_in_image(c0, c1);
            let mut integral_c = 0;
            for c in cs {
                integral_c += 1;
                let alpha_sq = (int(c) - c0) / c1;
                candidates.push(setup.candidate((a, b, c), AlphaSq::Exact(alpha_sq), BTreeSet::new()));
            }
            branches.push(WallBranch { a: Some(a), b, kind: BranchKind::Window { window, integral_c } });
        }
    }

    // b = Bq: the quotient has vanishing twisted degree; symmetric to b = 0.
    if bq > 0 {
        branches.push(WallBranch { a: None, b: bq, kind: BranchKind::SignClash });
        let c = as_integer(&(int(2 * q * q) * tw.ch2)).expect("lattice target");
        let r = as_integer(&tw.ch0).expect("lattice target");
        candidates.push(setup.candidate((r, bq, c), AlphaSq::Throughout, BTreeSet::from([Tag::ZeroPart])));
    }

    candidates.sort_by_key(|c| c.triple);
    candidates.dedup_by_key(|c| c.triple);
    branches.sort_by_key(|b| (b.b, b.a));
    let certificate = CompletenessCertificate {
        complete: !capped,
        rank_bound_used,
        derivation: if capped { Derivation::UserCap } else { derivation },
    };
    Ok(WallEnumeration { target_twisted: tw, beta, range, candidates, branches, certificate })
}

/// A splitting `target = P + Q` on the real axis of the rotated charge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DestabilizerCase {
    pub p: ChernCharacter,
    pub q: ChernCharacter,
    pub degree: i64,
    pub tags: BTreeSet<Tag>,
    pub li_p: Option<BoundVerdict>,
    pub li_q: Option<BoundVerdict>,
    /// Present when a Li violation had to be settled by splitting further.
    pub jh: Option<JhAnalysis>,
}

impl DestabilizerCase {
    /// Neither part is zero and the parts are not proportional.
    pub fn is_genuine(&self) -> bool {
        !self.tags.contains(&Tag::ZeroPart) && !self.tags.contains(&Tag::Proportional)
    }
}

/// Splittings of a sheaf-side part `F` whose factors have smaller `Δ/d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JhAnalysis {
    pub factor: ChernCharacter,
    /// `Δ(F)/d`.
    pub level: i128,
    pub splits: Vec<(ChernCharacter, ChernCharacter)>,
    pub eliminated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisEnumeration {
    pub target: ChernCharacter,
    pub point: TiltPoint,
    /// Sorted by `(P, Q)`.
    pub cases: Vec<DestabilizerCase>,
    pub certificate: CompletenessCertificate,
}

impl AxisEnumeration {
    pub fn genuine(&self) -> impl Iterator<Item = &DestabilizerCase> {
        self.cases.iter().filter(|c| c.is_genuine())
    }
}

/// Largest `n ≥ 0` with `n² ≤ x`.
fn isqrt_floor(x: Rational) -> i128 {
    let mut n = 1i128;
    while int(n * n) <= x {
        n *= 2;
    }
    while int(n * n) > x {
        n -= 1;
    }
    n.max(0)
}

/// Unordered lattice splittings `target = P + Q` with `Re Z(P) = Re Z(Q) = 0`,
/// both twisted degrees between 0 and the target's, and `Δ ≥ 0` for both.
fn axis_splits(
    target: &ChernCharacter,
    pt: &TiltPoint,
    ctx: &FanoContext,
) -> (Vec<(ChernCharacter, ChernCharacter)>, i128) {
    let d = ctx.d();
    let (a2, beta) = (pt.alpha_sq(), pt.beta());
    let big_t = target.truncated().twist(beta, ctx).ch1;
    let (t_lo, t_hi) = (big_t.min(Rational::zero()), big_t.max(Rational::zero()));
    // Δ(P) = d²(t² − α²a²) forces a²α² ≤ T²
    let a_max = isqrt_floor(big_t * big_t / a2);
    let mut out = BTreeSet::new();
    for a in -a_max..=a_max {
        let ra = int(a);
        for e in ceil_int(&(beta * ra + t_lo))..=floor_int(&(beta * ra + t_hi)) {
            let re = int(e);
            let f = a2 * d * ra / int(2) + d * beta * re - d * beta * beta * ra / int(2);
            let p = ChernCharacter::level2(ra, re, f);
            if !p.is_lattice(ctx) {
                continue;
            }
            let q = target.truncated() - p;
            if p.discriminant(ctx).is_negative() || q.discriminant(ctx).is_negative() {
                continue;
            }
            let pair = if p.level2_vec() >= q.level2_vec() { (p, q) } else { (q, p) };
            out.insert(pair);
        }
    }
    (out.into_iter().collect(), a_max)
}

fn is_certified_li_eliminated(part: &ChernCharacter, pt: &TiltPoint, ctx: &FanoContext) -> bool {
    LiAssessment::of(part, minimal_twisted_degree(part, pt, ctx), ctx).elimination().is_some()
}

/// Smallest positive value of `|ch1^β|` on the lattice, i.e. `1/q` for `β = p/q`.
fn minimal_twisted_degree(part: &ChernCharacter, pt: &TiltPoint, ctx: &FanoContext) -> bool {
    let t = part.truncated().twist(pt.beta(), ctx).ch1.abs();
    t * int(*pt.beta().denom()) == Rational::one()
}

fn jh_analysis(factor: &ChernCharacter, pt: &TiltPoint, ctx: &FanoContext) -> Option<JhAnalysis> {
    let d = ctx.d();
    let level = as_integer(&(factor.discriminant(ctx) / d))?;
    if level < 1 {
        return None;
    }
    let (splits, _) = axis_splits(factor, pt, ctx);
    let allowed = |x: &ChernCharacter| {
        !x.is_zero_level2() && as_integer(&(x.discriminant(ctx) / d)).is_some_and(|l| (0..level).contains(&l))
    };
    let splits: Vec<_> = splits.into_iter().filter(|(x, y)| allowed(x) && allowed(y)).collect();
    let eliminated = splits
        .iter()
        .all(|(x, y)| is_certified_li_eliminated(x, pt, ctx) || is_certified_li_eliminated(y, pt, ctx));
    Some(JhAnalysis { factor: *factor, level, splits, eliminated })
}

/// Tags for a pair on the rotated real axis.
pub fn classify_destabilizer(
    p: &ChernCharacter,
    q: &ChernCharacter,
    target: &ChernCharacter,
    pt: &TiltPoint,
    ctx: &FanoContext,
) -> (BTreeSet<Tag>, Option<BoundVerdict>, Option<BoundVerdict>, Option<JhAnalysis>) {
    let mut tags = BTreeSet::new();
    if p.is_zero_level2() || q.is_zero_level2() {
        tags.insert(Tag::ZeroPart);
    } else if p.is_level2_proportional(target) {
        tags.insert(Tag::Proportional);
    }
    if !p.is_lattice(ctx) || !q.is_lattice(ctx) {
        tags.insert(Tag::LatticeViolation);
    }
    let lp = LiAssessment::of(p, minimal_twisted_degree(p, pt, ctx), ctx);
    let lq = LiAssessment::of(q, minimal_twisted_degree(q, pt, ctx), ctx);
    let mut jh = None;
    if tags.is_empty() {
        let direct: Vec<Tag> = [lp, lq].iter().filter_map(|l| l.elimination()).collect();
        if !direct.is_empty() {
            tags.extend(direct);
        } else {
            // keep an eliminating analysis if any part has one, else the first attempted
            for (li, part) in [(lp, p), (lq, q)] {
                if !li.violated() || jh.as_ref().is_some_and(|a: &JhAnalysis| a.eliminated) {
                    continue;
                }
                if let Some(a) = jh_analysis(&sheaf_side(part), pt, ctx) {
                    if a.eliminated || jh.is_none() {
                        jh = Some(a);
                    }
                }
            }
            match &jh {
                Some(a) if a.eliminated => tags.insert(Tag::JhEliminated),
                _ => tags.insert(Tag::RequiresCategorical),
            };
        }
    }
    (tags, lp.verdict, lq.verdict, jh)
}

/// Lattice pairs `(P, Q)` with `P + Q = target` on the real axis of `Z⁰` at `pt`.
pub fn enumerate_axis_destabilizers(
    target: &ChernCharacter,
    pt: &TiltPoint,
    ctx: &FanoContext,
) -> Result<AxisEnumeration, WallsError> {
    if !target.truncated().is_lattice(ctx) {
        return Err(WallsError::NonLattice(target.to_string()));
    }
    if !central_charge(target, pt, ctx).re.is_zero() {
        return Err(WallsError::NotOnAxis(pt.to_string()));
    }
    let (splits, a_max) = axis_splits(target, pt, ctx);
    let cases = splits
        .into_iter()
        .map(|(p, q)| {
            let (tags, li_p, li_q, jh) = classify_destabilizer(&p, &q, target, pt, ctx);
            DestabilizerCase { p, q, degree: ctx.degree(), tags, li_p, li_q, jh }
        })
        .collect();
    Ok(AxisEnumeration {
        target: target.truncated(),
        point: *pt,
        cases,
        certificate: CompletenessCertificate {
            complete: true,
            rank_bound_used: a_max,
            derivation: Derivation::DeltaInterval,
        },
    })
}

/// The tilt point where the semicircle through `(−2, 0, 2)` and `O(−1)` peaks:
/// `(((d−2)/(2d))², −(d+2)/(2d))`.
pub fn semicircle_apex(ctx: &FanoContext) -> TiltPoint {
    let d = ctx.degree() as i128;
    let r = rat(d - 2, 2 * d);
    TiltPoint::new(r * r, rat(-(d + 2), 2 * d)).expect("apex requires d > 2")
}

pub const DIOPHANTINE_DEFAULT_A: (i128, i128) = (0, 3);
/// Twisted degree window of a rank-3 sub at `β = −7/10`.
pub const DIOPHANTINE_DEFAULT_B: (i128, i128) = (-2, 1);

/// Integer `(a, b, c)` with `2a + 7b + c = 0`, `5b² − ac ∈ {0, 1}` and
/// `5(1+b)² − (3−a)(1−c) ∈ {0, 1}`.
pub fn check_rank_three_diophantine(a_range: (i128, i128), b_range: (i128, i128)) -> Vec<(i128, i128, i128)> {
    let mut out = Vec::new();
    for a in a_range.0..=a_range.1 {
        for b in b_range.0..=b_range.1 {
            let c = -2 * a - 7 * b;
            let first = 5 * b * b - a * c;
            let second = 5 * (1 + b) * (1 + b) - (3 - a) * (1 - c);
            if (0..=1).contains(&first) && (0..=1).contains(&second) {
                out.push((a, b, c));
            }
        }
    }
    out
}

/// `(χ(O(−1), Q), χ(P, Q))` for `P = n·ch(O(−1))` and `Q = −(2,0,−2,0) − P`.
pub fn shifted_line_pairings(n: i64, ctx: &FanoContext) -> (Rational, Rational) {
    let line = ctx.line_bundle(-1);
    let p = line.scale(int(n as i128));
    let g = -ChernCharacter::new(int(2), int(0), int(-2), Some(int(0)));
    let q = g - p;
    let chi = |v: &ChernCharacter, w: &ChernCharacter| {
        crate::chern::euler_pairing(v, w, ctx).expect("full characters")
    };
    (chi(&line, &q), chi(&p, &q))
}
