//! Affine forms over exact rationals and the normalized halfspace constraints
//! that comparisons between them produce.
//!
//! A traced program computes with [`LinExpr`] values instead of numbers. Every
//! arithmetic step stays affine; products of two non-constant forms are
//! rejected. Comparing two forms either folds to a constant boolean or yields a
//! [`Constraint`] in canonical integer form, so structurally equal halfspaces
//! compare equal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, ExtRational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("product of two non-constant affine expressions is not affine")]
    Nonlinear,
    #[error("infinite constant cannot appear in a comparison")]
    InfiniteComparison,
    #[error("+inf and -inf cannot be added")]
    IndeterminateSum,
    #[error("an equality constraint has no single complementary halfspace")]
    NegateEquality,
}

/// `Σ coeffs[i]·x_i + constant`, with zero coefficients never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinExpr {
    coeffs: BTreeMap<usize, Rational>,
    constant: ExtRational,
}

impl LinExpr {
    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn constant(c: Rational) -> Self {
        Self { coeffs: BTreeMap::new(), constant: ExtRational::Finite(c) }
    }

    pub fn ext_constant(c: ExtRational) -> Self {
        Self { coeffs: BTreeMap::new(), constant: c }
    }

    /// The input variable `x_index` (zero-based).
    pub fn var(index: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(index, Rational::one());
        Self { coeffs, constant: ExtRational::zero() }
    }

    /// The vector of input variables `x_0 .. x_{n-1}`.
    pub fn vars(n: usize) -> Vec<Self> {
        (0..n).map(Self::var).collect()
    }

    pub fn from_parts(
        coeffs: impl IntoIterator<Item = (usize, Rational)>,
        constant: ExtRational,
    ) -> Self {
        let mut e = Self { coeffs: BTreeMap::new(), constant };
        for (i, c) in coeffs {
            e.add_term(i, &c);
        }
        e
    }

    fn add_term(&mut self, index: usize, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(index).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, Rational> {
        &self.coeffs
    }

    pub fn coeff(&self, index: usize) -> Rational {
        self.coeffs.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> &ExtRational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_linear(&self) -> bool {
        self.constant == ExtRational::zero()
    }

    /// Largest variable index plus one, or 0 for a constant.
    pub fn support_dim(&self) -> usize {
        self.coeffs.keys().next_back().map_or(0, |i| i + 1)
    }

    pub fn eval(&self, x: &[Rational]) -> ExtRational {
        match &self.constant {
            ExtRational::Finite(b) => ExtRational::Finite(self.eval_linear(x) + b),
            inf => inf.clone(),
        }
    }

    /// `Σ coeffs[i]·x_i`, ignoring the constant.
    pub fn eval_linear(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (i, c)| acc + c * &x[*i])
    }

    /// Coefficients as a dense vector of length `n`.
    pub fn dense(&self, n: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); n];
        for (i, c) in &self.coeffs {
            v[*i] = c.clone();
        }
        v
    }

    pub fn checked_add(&self, other: &LinExpr) -> Result<LinExpr, ExprError> {
        let constant = self
            .constant
            .checked_add(&other.constant)
            .ok_or(ExprError::IndeterminateSum)?;
        let mut out = LinExpr { coeffs: self.coeffs.clone(), constant };
        for (i, c) in &other.coeffs {
            out.add_term(*i, c);
        }
        Ok(out)
    }

    pub fn scale(&self, k: &Rational) -> LinExpr {
        if k.is_zero() {
            return LinExpr::ext_constant(self.constant.scale(k));
        }
        LinExpr {
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c * k)).collect(),
            constant: self.constant.scale(k),
        }
    }

    /// Product of two forms, defined only when at least one side is a finite constant.
    pub fn try_mul(&self, other: &LinExpr) -> Result<LinExpr, ExprError> {
        let finite_const = |e: &LinExpr| e.is_constant().then(|| e.constant.finite()).flatten().cloned();
        if let Some(k) = finite_const(other) {
            Ok(self.scale(&k))
        } else if let Some(k) = finite_const(self) {
            Ok(other.scale(&k))
        } else {
            Err(ExprError::Nonlinear)
        }
    }
}

/// Exact affine combination `Σ k_i·e_i + offset`.
pub fn lin_combine(
    terms: &[(Rational, LinExpr)],
    offset: ExtRational,
) -> Result<LinExpr, ExprError> {
    let mut acc = LinExpr::ext_constant(offset);
    for (k, e) in terms {
        acc = acc.checked_add(&e.scale(k))?;
    }
    Ok(acc)
}

impl From<Rational> for LinExpr {
    fn from(r: Rational) -> Self {
        LinExpr::constant(r)
    }
}

// The operator impls panic on `+inf + -inf`; use `checked_add` where infinite
// constants may meet.
impl Add<&LinExpr> for &LinExpr {
    type Output = LinExpr;
    fn add(self, rhs: &LinExpr) -> LinExpr {
        self.checked_add(rhs).expect("indeterminate sum of infinite constants")
    }
}

impl Add for LinExpr {
    type Output = LinExpr;
    fn add(self, rhs: LinExpr) -> LinExpr {
        &self + &rhs
    }
}

impl AddAssign<&LinExpr> for LinExpr {
    fn add_assign(&mut self, rhs: &LinExpr) {
        *self = &*self + rhs;
    }
}

impl Neg for &LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        self.scale(&-Rational::one())
    }
}

impl Neg for LinExpr {
    type Output = LinExpr;
    fn neg(self) -> LinExpr {
        -&self
    }
}

impl Sub<&LinExpr> for &LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: &LinExpr) -> LinExpr {
        self + &(-rhs)
    }
}

impl Sub for LinExpr {
    type Output = LinExpr;
    fn sub(self, rhs: LinExpr) -> LinExpr {
        &self - &rhs
    }
}

impl SubAssign<&LinExpr> for LinExpr {
    fn sub_assign(&mut self, rhs: &LinExpr) {
        *self = &*self - rhs;
    }
}

impl Mul<&Rational> for &LinExpr {
    type Output = LinExpr;
    fn mul(self, k: &Rational) -> LinExpr {
        self.scale(k)
    }
}

fn write_terms(
    f: &mut fmt::Formatter<'_>,
    coeffs: &BTreeMap<usize, Rational>,
) -> Result<bool, fmt::Error> {
    let mut first = true;
    for (i, c) in coeffs {
        let mag = c.abs();
        if first {
            if c.is_negative() {
                f.write_str("-")?;
            }
        } else if c.is_negative() {
            f.write_str(" - ")?;
        } else {
            f.write_str(" + ")?;
        }
        if mag.is_one() {
            write!(f, "x{}", i + 1)?;
        } else {
            write!(f, "{}*x{}", format_rational(&mag), i + 1)?;
        }
        first = false;
    }
    Ok(!first)
}

impl fmt::Display for LinExpr {
    /// Variables render one-based: `x1`, `x2`, ...
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrote = write_terms(f, &self.coeffs)?;
        match &self.constant {
            ExtRational::Finite(b) if b.is_zero() => {
                if !wrote {
                    f.write_str("0")?;
                }
                Ok(())
            }
            ExtRational::Finite(b) if wrote => {
                let sign = if b.is_negative() { "-" } else { "+" };
                write!(f, " {} {}", sign, format_rational(&b.abs()))
            }
            c if wrote => match c {
                ExtRational::NegInf => f.write_str(" - inf"),
                _ => f.write_str(" + inf"),
            },
            c => write!(f, "{c}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `expr = 0`
    Eq,
    /// `expr <= 0`
    Le,
    /// `expr < 0`
    Lt,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Lt => "<",
        }
    }
}

/// Comparison operators a traced program may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Le,
    Lt,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

/// A canonical relation `Σ a_i x_i + b  (= | <= | <)  0` with finite `b`.
///
/// Canonical form: all coefficients and the constant are coprime integers; for
/// equalities the lowest-index coefficient is positive. A constraint without
/// variables keeps only the sign of its constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    rel: Relation,
    coeffs: BTreeMap<usize, Rational>,
    constant: Rational,
}

impl Constraint {
    pub fn new(expr: &LinExpr, rel: Relation) -> Result<Self, ExprError> {
        let constant = expr
            .constant
            .finite()
            .ok_or(ExprError::InfiniteComparison)?
            .clone();
        Ok(Self::canonical(expr.coeffs.clone(), constant, rel))
    }

    fn canonical(coeffs: BTreeMap<usize, Rational>, constant: Rational, rel: Relation) -> Self {
        if coeffs.is_empty() {
            return Self { rel, coeffs, constant: constant.signum() };
        }
        let lcm = coeffs
            .values()
            .chain(std::iter::once(&constant))
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let scaled: Vec<BigInt> = coeffs
            .values()
            .chain(std::iter::once(&constant))
            .map(|r| r.numer() * (&lcm / r.denom()))
            .collect();
        let gcd = scaled.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let mut sign = BigInt::one();
        if rel == Relation::Eq && coeffs.values().next().is_some_and(|c| c.is_negative()) {
            sign = -sign;
        }
        let factor = Rational::new(lcm * sign, gcd);
        Self {
            rel,
            coeffs: coeffs.into_iter().map(|(i, c)| (i, c * &factor)).collect(),
            constant: constant * factor,
        }
    }

    /// `lhs <= rhs` as a constraint (no constant folding).
    pub fn le(lhs: &LinExpr, rhs: &LinExpr) -> Result<Self, ExprError> {
        Self::new(&lhs.checked_add(&-rhs)?, Relation::Le)
    }

    pub fn lt(lhs: &LinExpr, rhs: &LinExpr) -> Result<Self, ExprError> {
        Self::new(&lhs.checked_add(&-rhs)?, Relation::Lt)
    }

    pub fn eq(lhs: &LinExpr, rhs: &LinExpr) -> Result<Self, ExprError> {
        Self::new(&lhs.checked_add(&-rhs)?, Relation::Eq)
    }

    pub fn ge(lhs: &LinExpr, rhs: &LinExpr) -> Result<Self, ExprError> {
        Self::le(rhs, lhs)
    }

    pub fn gt(lhs: &LinExpr, rhs: &LinExpr) -> Result<Self, ExprError> {
        Self::lt(rhs, lhs)
    }

    pub fn relation(&self) -> Relation {
        self.rel
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, Rational> {
        &self.coeffs
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn expr(&self) -> LinExpr {
        LinExpr {
            coeffs: self.coeffs.clone(),
            constant: ExtRational::Finite(self.constant.clone()),
        }
    }

    pub fn support_dim(&self) -> usize {
        self.coeffs.keys().next_back().map_or(0, |i| i + 1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `Σ a_i x_i + b` at `x`.
    pub fn lhs_at(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .fold(self.constant.clone(), |acc, (i, c)| acc + c * &x[*i])
    }

    pub fn holds_at(&self, x: &[Rational]) -> bool {
        let v = self.lhs_at(x);
        match self.rel {
            Relation::Eq => v.is_zero(),
            Relation::Le => !v.is_positive(),
            Relation::Lt => v.is_negative(),
        }
    }

    /// The same halfspace with `<` relaxed to `<=`.
    pub fn weakened(&self) -> Self {
        let mut c = self.clone();
        if c.rel == Relation::Lt {
            c.rel = Relation::Le;
        }
        c
    }

    /// The same halfspace with `<=` tightened to `<`. Equalities are unchanged.
    pub fn strictified(&self) -> Self {
        let mut c = self.clone();
        if c.rel == Relation::Le {
            c.rel = Relation::Lt;
        }
        c
    }
}

impl fmt::Display for Constraint {
    /// Renders `Σ a_i x_i REL -b`, e.g. `-x1 + x2 + x3 < 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrote = write_terms(f, &self.coeffs)?;
        if !wrote {
            f.write_str("0")?;
        }
        write!(f, " {} {}", self.rel.symbol(), format_rational(&-&self.constant))
    }
}

/// Result of comparing two affine forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// The difference is constant, so the outcome is known without branching.
    Decided(bool),
    /// The outcome depends on the input; the constraint describes "relation holds".
    Branch(Constraint),
}

pub fn compare(lhs: &LinExpr, op: CmpOp, rhs: &LinExpr) -> Result<Comparison, ExprError> {
    if !lhs.constant.is_finite() || !rhs.constant.is_finite() {
        return Err(ExprError::InfiniteComparison);
    }
    let diff = lhs - rhs;
    if diff.is_constant() {
        let d = diff.constant.finite().expect("finite difference");
        return Ok(Comparison::Decided(op.holds(d, &Rational::zero())));
    }
    let c = match op {
        CmpOp::Le => Constraint::new(&diff, Relation::Le)?,
        CmpOp::Lt => Constraint::new(&diff, Relation::Lt)?,
        CmpOp::Eq => Constraint::new(&diff, Relation::Eq)?,
        CmpOp::Ge => Constraint::new(&-diff, Relation::Le)?,
        CmpOp::Gt => Constraint::new(&-diff, Relation::Lt)?,
    };
    Ok(Comparison::Branch(c))
}

/// Exact set complement of a halfspace.
pub fn negate_constraint(c: &Constraint) -> Result<Constraint, ExprError> {
    let rel = match c.rel {
        Relation::Le => Relation::Lt,
        Relation::Lt => Relation::Le,
        Relation::Eq => return Err(ExprError::NegateEquality),
    };
    let neg_coeffs = c.coeffs.iter().map(|(i, a)| (*i, -a)).collect();
    Ok(Constraint::canonical(neg_coeffs, -&c.constant, rel))
}
