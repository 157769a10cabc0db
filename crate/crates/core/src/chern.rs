//! Chern characters on a Picard-rank-one, index-two Fano threefold.
//!
//! The cohomology ring is generated by the hyperplane class `H`, the line class
//! `L` and the point class `P`, with `H·H = d·L`, `H·L = P` and all higher
//! products zero, where `d = H³ ∈ {1, …, 5}` is the degree. A character is
//! stored by its coefficients in the basis `(1, H, L, P)`; `ch3` may be absent,
//! in which case the character is a level-two truncation and every operation
//! that needs the point coefficient refuses to guess it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{as_integer, int, integer_gcd, rat, text, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChernError {
    #[error("degree {0} is outside 1..=5")]
    UnsupportedDegree(i64),
    #[error("lattice violation: {0}")]
    Lattice(String),
    #[error("operation needs ch3 but the character is truncated at level 2")]
    MissingCh3,
    #[error("need at least 4 Euler constraints, got {0}")]
    TooFewConstraints(usize),
    #[error("Euler constraint system is singular (rank {0} < 4)")]
    Singular(usize),
    #[error("Euler constraint system is inconsistent")]
    Inconsistent,
}

/// The threefold, determined numerically by its degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FanoContext {
    degree: u8,
}

impl FanoContext {
    pub fn new(degree: i64) -> Result<Self, ChernError> {
        if (1..=5).contains(&degree) {
            Ok(FanoContext { degree: degree as u8 })
        } else {
            Err(ChernError::UnsupportedDegree(degree))
        }
    }

    pub fn degree(&self) -> i64 {
        self.degree as i64
    }

    /// The degree as a rational, `H³`.
    pub fn d(&self) -> Rational {
        int(self.degree as i128)
    }

    /// Todd class of the tangent bundle, `(1, 1, 1 + d/3, 1)`.
    pub fn todd(&self) -> ChernCharacter {
        ChernCharacter::new(int(1), int(1), int(1) + self.d() / int(3), Some(int(1)))
    }

    /// `ch(O(n)) = e^{nH}`.
    pub fn line_bundle(&self, n: i64) -> ChernCharacter {
        exp_hyperplane(int(n as i128), self)
    }

    pub fn structure_sheaf(&self) -> ChernCharacter {
        self.line_bundle(0)
    }

    /// Character of the ideal sheaf of a line, `(1, 0, -1, 0)`.
    pub fn ideal_of_line(&self) -> ChernCharacter {
        ChernCharacter::new(int(1), int(0), int(-1), Some(int(0)))
    }

    /// `ch(ω_X) = ch(O(-2))`.
    pub fn canonical(&self) -> ChernCharacter {
        self.line_bundle(-2)
    }
}

/// `e^{xH}` for rational `x`: `(1, x, d x²/2, d x³/6)`.
pub fn exp_hyperplane(x: Rational, ctx: &FanoContext) -> ChernCharacter {
    let d = ctx.d();
    ChernCharacter::new(int(1), x, d * x * x / int(2), Some(d * x * x * x / int(6)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChernCharacter {
    pub ch0: Rational,
    pub ch1: Rational,
    pub ch2: Rational,
    pub ch3: Option<Rational>,
}

impl ChernCharacter {
    pub fn new(ch0: Rational, ch1: Rational, ch2: Rational, ch3: Option<Rational>) -> Self {
        ChernCharacter { ch0, ch1, ch2, ch3 }
    }

    /// Level-two character with absent `ch3`.
    pub fn level2(ch0: Rational, ch1: Rational, ch2: Rational) -> Self {
        ChernCharacter { ch0, ch1, ch2, ch3: None }
    }

    /// Integer/half-integer convenience constructor used heavily in tests and fixtures.
    pub fn from_ints(ch0: i128, ch1: i128, ch2: Rational, ch3: Option<Rational>) -> Self {
        ChernCharacter::new(int(ch0), int(ch1), ch2, ch3)
    }

    pub fn zero() -> Self {
        ChernCharacter::new(int(0), int(0), int(0), Some(int(0)))
    }

    pub fn truncated(&self) -> Self {
        ChernCharacter { ch3: None, ..*self }
    }

    pub fn with_ch3(&self, ch3: Rational) -> Self {
        ChernCharacter { ch3: Some(ch3), ..*self }
    }

    pub fn is_zero_level2(&self) -> bool {
        self.ch0.is_zero() && self.ch1.is_zero() && self.ch2.is_zero()
    }

    pub fn level2_eq(&self, other: &Self) -> bool {
        self.ch0 == other.ch0 && self.ch1 == other.ch1 && self.ch2 == other.ch2
    }

    /// Level-two parts are linearly dependent over ℚ.
    pub fn is_level2_proportional(&self, other: &Self) -> bool {
        let (a, b) = (self.level2_vec(), other.level2_vec());
        (0..3).all(|i| (i + 1..3).all(|j| a[i] * b[j] == a[j] * b[i]))
    }

    pub fn level2_vec(&self) -> [Rational; 3] {
        [self.ch0, self.ch1, self.ch2]
    }

    pub fn require_ch3(&self) -> Result<Rational, ChernError> {
        self.ch3.ok_or(ChernError::MissingCh3)
    }

    pub fn scale(&self, k: Rational) -> Self {
        ChernCharacter::new(k * self.ch0, k * self.ch1, k * self.ch2, self.ch3.map(|x| k * x))
    }

    /// Product in the truncated cohomology ring.
    pub fn mul(&self, other: &Self, ctx: &FanoContext) -> Self {
        let d = ctx.d();
        let (a, b) = (self, other);
        let ch3 = match (a.ch3, b.ch3) {
            (Some(a3), Some(b3)) => Some(a.ch0 * b3 + a3 * b.ch0 + a.ch1 * b.ch2 + a.ch2 * b.ch1),
            _ => None,
        };
        ChernCharacter::new(
            a.ch0 * b.ch0,
            a.ch0 * b.ch1 + a.ch1 * b.ch0,
            a.ch0 * b.ch2 + a.ch2 * b.ch0 + d * a.ch1 * b.ch1,
            ch3,
        )
    }

    /// `ch^∨`: odd-degree parts change sign.
    pub fn dual(&self) -> Self {
        ChernCharacter::new(self.ch0, -self.ch1, self.ch2, self.ch3.map(|x| -x))
    }

    /// Twisted character `e^{-βH}·ch`.
    pub fn twist(&self, beta: Rational, ctx: &FanoContext) -> Self {
        let mut e = exp_hyperplane(-beta, ctx);
        if self.ch3.is_none() {
            e.ch3 = None;
        }
        e.mul(self, ctx)
    }

    /// `Δ_H = (H²ch₁)² − 2·H³ch₀·Hch₂ = (d·ch1)² − 2d·ch0·ch2`.
    pub fn discriminant(&self, ctx: &FanoContext) -> Rational {
        let d = ctx.d();
        d * d * self.ch1 * self.ch1 - int(2) * d * self.ch0 * self.ch2
    }

    /// Mumford slope `ch1/ch0`, `None` standing for `+∞` when `ch0 = 0`.
    pub fn mumford_slope(&self) -> Option<Rational> {
        (!self.ch0.is_zero()).then(|| self.ch1 / self.ch0)
    }

    /// Checks integrality of the character: `ch0, ch1 ∈ ℤ`, `2ch2 ∈ ℤ` with
    /// `2ch2 ≡ d·ch1² (mod 2)`, and `6ch3 ∈ ℤ` when present.
    pub fn check_lattice(&self, ctx: &FanoContext) -> Result<(), ChernError> {
        let fail = |what: &str| Err(ChernError::Lattice(format!("{what} in {self}")));
        let Some(c1) = as_integer(&self.ch1) else {
            return fail("ch1 is not an integer");
        };
        if as_integer(&self.ch0).is_none() {
            return fail("ch0 is not an integer");
        }
        let Some(two_ch2) = as_integer(&(int(2) * self.ch2)) else {
            return fail("2·ch2 is not an integer");
        };
        if (two_ch2 - ctx.degree() as i128 * c1 * c1).rem_euclid(2) != 0 {
            return fail("2·ch2 ≢ d·ch1² (mod 2)");
        }
        if let Some(c3) = self.ch3 {
            if as_integer(&(int(6) * c3)).is_none() {
                return fail("6·ch3 is not an integer");
            }
        }
        Ok(())
    }

    pub fn is_lattice(&self, ctx: &FanoContext) -> bool {
        self.check_lattice(ctx).is_ok()
    }

    /// `gcd(ch0, ch1)` for integral characters.
    pub fn rank_degree_gcd(&self) -> Option<i128> {
        integer_gcd(&self.ch0, &self.ch1)
    }
}

impl fmt::Display for ChernCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}", text(&self.ch0), text(&self.ch1), text(&self.ch2))?;
        if let Some(c3) = self.ch3 {
            write!(f, ", {}", text(&c3))?;
        }
        write!(f, ")")
    }
}

impl Add for ChernCharacter {
    type Output = ChernCharacter;

    fn add(self, o: ChernCharacter) -> ChernCharacter {
        let ch3 = match (self.ch3, o.ch3) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        ChernCharacter::new(self.ch0 + o.ch0, self.ch1 + o.ch1, self.ch2 + o.ch2, ch3)
    }
}

impl Neg for ChernCharacter {
    type Output = ChernCharacter;

    fn neg(self) -> ChernCharacter {
        self.scale(-Rational::one())
    }
}

impl Sub for ChernCharacter {
    type Output = ChernCharacter;

    fn sub(self, o: ChernCharacter) -> ChernCharacter {
        self + (-o)
    }
}

impl Mul<ChernCharacter> for Rational {
    type Output = ChernCharacter;

    fn mul(self, v: ChernCharacter) -> ChernCharacter {
        v.scale(self)
    }
}

/// Builds a character, optionally insisting on the integrality conditions.
pub fn make_character(
    ch0: Rational,
    ch1: Rational,
    ch2: Rational,
    ch3: Option<Rational>,
    assert_lattice: bool,
    ctx: &FanoContext,
) -> Result<ChernCharacter, ChernError> {
    let v = ChernCharacter::new(ch0, ch1, ch2, ch3);
    if assert_lattice {
        v.check_lattice(ctx)?;
    }
    Ok(v)
}

/// `χ(v, w)`: the point coefficient of `v^∨ · w · td_X`.
pub fn euler_pairing(
    v: &ChernCharacter,
    w: &ChernCharacter,
    ctx: &FanoContext,
) -> Result<Rational, ChernError> {
    v.require_ch3()?;
    w.require_ch3()?;
    let product = v.dual().mul(w, ctx).mul(&ctx.todd(), ctx);
    product.require_ch3()
}

/// `χ(F(m)) = a₃m³ + a₂m² + a₁m + a₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertPolynomial {
    /// Coefficients `[a₀, a₁, a₂, a₃]`.
    pub coefficients: [Rational; 4],
}

impl HilbertPolynomial {
    pub fn eval(&self, m: Rational) -> Rational {
        self.coefficients.iter().rev().fold(Rational::zero(), |acc, c| acc * m + c)
    }

    /// The reduced polynomial with the constant term dropped.
    pub fn without_constant(&self) -> HilbertPolynomial {
        let mut c = self.coefficients;
        c[0] = Rational::zero();
        HilbertPolynomial { coefficients: c }
    }
}

pub fn hilbert_polynomial(v: &ChernCharacter, ctx: &FanoContext) -> Result<HilbertPolynomial, ChernError> {
    v.require_ch3()?;
    let u = v.mul(&ctx.todd(), ctx);
    let d = ctx.d();
    // χ(v·e^{mH}) with e^{mH} = (1, m, d m²/2, d m³/6).
    Ok(HilbertPolynomial { coefficients: [u.require_ch3()?, u.ch2, d * u.ch1 / int(2), d * u.ch0 / int(6)] })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingSide {
    /// `χ(probe, F)`.
    Left,
    /// `χ(F, probe)`.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EulerConstraint {
    pub probe: ChernCharacter,
    pub side: PairingSide,
    pub value: Rational,
}

impl EulerConstraint {
    pub fn left(probe: ChernCharacter, value: Rational) -> Self {
        EulerConstraint { probe, side: PairingSide::Left, value }
    }

    pub fn right(probe: ChernCharacter, value: Rational) -> Self {
        EulerConstraint { probe, side: PairingSide::Right, value }
    }

    fn pairing_with(&self, f: &ChernCharacter, ctx: &FanoContext) -> Result<Rational, ChernError> {
        match self.side {
            PairingSide::Left => euler_pairing(&self.probe, f, ctx),
            PairingSide::Right => euler_pairing(f, &self.probe, ctx),
        }
    }
}

fn basis_vector(i: usize) -> ChernCharacter {
    let mut c = [Rational::zero(); 4];
    c[i] = Rational::one();
    ChernCharacter::new(c[0], c[1], c[2], Some(c[3]))
}

/// Recovers the unique full character `F` satisfying every constraint.
pub fn solve_character_from_euler_constraints(
    constraints: &[EulerConstraint],
    ctx: &FanoContext,
) -> Result<ChernCharacter, ChernError> {
    if constraints.len() < 4 {
        return Err(ChernError::TooFewConstraints(constraints.len()));
    }
    // χ is linear in F, so each row is read off on the basis vectors.
    let mut rows: Vec<[Rational; 5]> = Vec::with_capacity(constraints.len());
    for c in constraints {
        let mut row = [Rational::zero(); 5];
        for (i, slot) in row.iter_mut().take(4).enumerate() {
            *slot = c.pairing_with(&basis_vector(i), ctx)?;
        }
        row[4] = c.value;
        rows.push(row);
    }

    let mut rank = 0;
    for col in 0..4 {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][col];
        for x in rows[rank].iter_mut() {
            *x /= pivot;
        }
        let pivot_row = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col];
                for (x, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *x -= f * p;
                }
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|r| !r[4].is_zero()) {
        return Err(ChernError::Inconsistent);
    }
    if rank < 4 {
        return Err(ChernError::Singular(rank));
    }
    Ok(ChernCharacter::new(rows[0][4], rows[1][4], rows[2][4], Some(rows[3][4])))
}

/// Half-integer helper: `n/2`.
pub fn half(n: i128) -> Rational {
    rat(n, 2)
}
