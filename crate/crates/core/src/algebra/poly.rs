use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{binomial, falling_factorial, Rational};
use super::AlgebraError;

/// Pair of nonnegative integers in the variables `x` and `y`.
///
/// Used both as a monomial exponent and as a derivative multi-index.
/// Ordered graded-lexicographically: total degree first, then the `x`
/// component.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct MultiIndex {
    pub x: u32,
    pub y: u32,
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex { x: 0, y: 0 };
    pub const X: MultiIndex = MultiIndex { x: 1, y: 0 };
    pub const Y: MultiIndex = MultiIndex { x: 0, y: 1 };

    pub const fn new(x: u32, y: u32) -> Self {
        MultiIndex { x, y }
    }

    pub fn degree(self) -> u32 {
        self.x + self.y
    }

    pub fn divides(self, other: MultiIndex) -> bool {
        self.x <= other.x && self.y <= other.y
    }

    pub fn checked_sub(self, other: MultiIndex) -> Option<MultiIndex> {
        Some(MultiIndex::new(
            self.x.checked_sub(other.x)?,
            self.y.checked_sub(other.y)?,
        ))
    }

    /// All multi-indices `mu <= self` componentwise.
    pub fn below(self) -> impl Iterator<Item = MultiIndex> {
        (0..=self.x).flat_map(move |i| (0..=self.y).map(move |j| MultiIndex::new(i, j)))
    }

    /// All multi-indices of total degree at most `d`, in ascending order.
    pub fn up_to_degree(d: u32) -> impl Iterator<Item = MultiIndex> {
        (0..=d).flat_map(|t| (0..=t).map(move |i| MultiIndex::new(i, t - i)))
    }

    pub fn factorial(self) -> BigInt {
        falling_factorial(self.x, self.x) * falling_factorial(self.y, self.y)
    }

    /// Product of componentwise binomials `C(self, mu)`.
    pub fn binomial(self, mu: MultiIndex) -> BigInt {
        binomial(self.x, mu.x) * binomial(self.y, mu.y)
    }
}

impl Add for MultiIndex {
    type Output = MultiIndex;
    fn add(self, o: MultiIndex) -> MultiIndex {
        MultiIndex::new(self.x + o.x, self.y + o.y)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.x.cmp(&other.x))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `x`, `y` with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// polynomial equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn one() -> Self {
        Poly2::constant(Rational::one())
    }

    pub fn x() -> Self {
        Poly2::monomial(Rational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Poly2::monomial(Rational::one(), 0, 1)
    }

    pub fn constant(c: Rational) -> Self {
        Poly2::monomial(c, 0, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Poly2::constant(Rational::from_integer(BigInt::from(c)))
    }

    pub fn monomial(c: Rational, dx: u32, dy: u32) -> Self {
        let mut p = Poly2::zero();
        p.add_term(MultiIndex::new(dx, dy), c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, Rational)>>(terms: I) -> Self {
        let mut p = Poly2::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * x^m.x * y^m.y` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, m: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == MultiIndex::ZERO)
    }

    /// The constant value if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.coeff(MultiIndex::ZERO))
        } else {
            None
        }
    }

    pub fn coeff(&self, m: MultiIndex) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn leading_term(&self) -> Option<(MultiIndex, &Rational)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn scale(&self, c: &Rational) -> Poly2 {
        if c.is_zero() {
            return Poly2::zero();
        }
        Poly2 {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    /// Multiplies by `c * x^m.x * y^m.y`.
    pub fn mul_term(&self, m: MultiIndex, c: &Rational) -> Poly2 {
        if c.is_zero() {
            return Poly2::zero();
        }
        Poly2 {
            terms: self.terms.iter().map(|(k, v)| (*k + m, v * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly2 {
        let mut acc = Poly2::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn dx(&self) -> Poly2 {
        self.derivative(MultiIndex::X)
    }

    pub fn dy(&self) -> Poly2 {
        self.derivative(MultiIndex::Y)
    }

    /// Mixed partial derivative `∂x^alpha.x ∂y^alpha.y`.
    pub fn derivative(&self, alpha: MultiIndex) -> Poly2 {
        if alpha == MultiIndex::ZERO {
            return self.clone();
        }
        let mut out = Poly2::zero();
        for (m, c) in &self.terms {
            if let Some(rest) = m.checked_sub(alpha) {
                let f = falling_factorial(m.x, alpha.x) * falling_factorial(m.y, alpha.y);
                out.terms.insert(rest, c * Rational::from_integer(f));
            }
        }
        out
    }

    /// Exact quotient `q` with `divisor * q == self`.
    pub fn exact_div(&self, divisor: &Poly2) -> Result<Poly2, AlgebraError> {
        let not_divisible = || AlgebraError::NotDivisible {
            dividend: self.to_string(),
            divisor: divisor.to_string(),
        };
        let (lead_m, lead_c) = divisor.leading_term().ok_or_else(not_divisible)?;
        let mut rem = self.clone();
        let mut quot = Poly2::zero();
        while let Some((m, c)) = rem.leading_term() {
            let shift = m.checked_sub(lead_m).ok_or_else(not_divisible)?;
            let factor = c / lead_c;
            rem -= &divisor.mul_term(shift, &factor);
            quot.add_term(shift, factor);
        }
        Ok(quot)
    }

    pub fn divides(&self, other: &Poly2) -> bool {
        other.exact_div(self).is_ok()
    }

    /// `p(a x + b, c y + d)`.
    pub fn affine_substitute(
        &self,
        a: &Rational,
        b: &Rational,
        c: &Rational,
        d: &Rational,
    ) -> Result<Poly2, AlgebraError> {
        if a.is_zero() || c.is_zero() {
            return Err(AlgebraError::DegenerateMap {
                a: a.to_string(),
                c: c.to_string(),
            });
        }
        let sx = Poly2::from_terms([(MultiIndex::X, a.clone()), (MultiIndex::ZERO, b.clone())]);
        let sy = Poly2::from_terms([(MultiIndex::Y, c.clone()), (MultiIndex::ZERO, d.clone())]);
        let mut out = Poly2::zero();
        for (m, coef) in &self.terms {
            out += &(&sx.pow(m.x) * &sy.pow(m.y)).scale(coef);
        }
        Ok(out)
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            acc += c
                * num_traits::pow(x.clone(), m.x as usize)
                * num_traits::pow(y.clone(), m.y as usize);
        }
        acc
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || *m == MultiIndex::ZERO {
                factors.push(mag.to_string());
            }
            for (name, e) in [("x", m.x), ("y", m.y)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly2({self})")
    }
}

impl AddAssign<&Poly2> for Poly2 {
    fn add_assign(&mut self, rhs: &Poly2) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl SubAssign<&Poly2> for Poly2 {
    fn sub_assign(&mut self, rhs: &Poly2) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c.clone());
        }
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(*m1 + *m2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        Poly2 {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Poly2 {
            type Output = Poly2;
            fn $f(self, rhs: Poly2) -> Poly2 { (&self).$f(&rhs) }
        }
        impl $tr<&Poly2> for Poly2 {
            type Output = Poly2;
            fn $f(self, rhs: &Poly2) -> Poly2 { (&self).$f(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use proptest::prelude::*;

    fn p(terms: &[(i64, i64, u32, u32)]) -> Poly2 {
        Poly2::from_terms(
            terms
                .iter()
                .map(|&(n, d, i, j)| (MultiIndex::new(i, j), rat(n, d))),
        )
    }

    #[test]
    fn partial_derivative() {
        // x*y + x, d/dy -> x
        let f = p(&[(1, 1, 1, 1), (1, 1, 1, 0)]);
        assert_eq!(f.dy(), Poly2::x());
    }

    #[test]
    fn exact_division() {
        let a = p(&[(1, 1, 2, 1), (-1, 1, 1, 1)]);
        let b = p(&[(1, 1, 1, 1)]);
        assert_eq!(a.exact_div(&b).unwrap(), p(&[(1, 1, 1, 0), (-1, 1, 0, 0)]));
        let err = (&Poly2::x() + &Poly2::y()).exact_div(&Poly2::x());
        assert!(matches!(err, Err(AlgebraError::NotDivisible { .. })));
        assert!(Poly2::one().exact_div(&Poly2::zero()).is_err());
    }

    #[test]
    fn affine_examples() {
        let (zero, one) = (rat(0, 1), rat(1, 1));
        let xy = p(&[(1, 1, 1, 1)]);
        assert_eq!(
            xy.affine_substitute(&rat(2, 1), &zero, &one, &zero)
                .unwrap(),
            p(&[(2, 1, 1, 1)])
        );
        let x2 = p(&[(1, 1, 2, 0)]);
        assert_eq!(
            x2.affine_substitute(&one, &one, &one, &zero).unwrap(),
            p(&[(1, 1, 2, 0), (2, 1, 1, 0), (1, 1, 0, 0)])
        );
        let s = &Poly2::x() + &Poly2::y();
        assert_eq!(
            s.affine_substitute(&one, &zero, &rat(-1, 1), &zero)
                .unwrap(),
            &Poly2::x() - &Poly2::y()
        );
        assert!(matches!(
            s.affine_substitute(&zero, &zero, &one, &zero),
            Err(AlgebraError::DegenerateMap { .. })
        ));
    }

    #[test]
    fn display_is_graded_lex_descending() {
        let f = p(&[(3, 2, 2, 1), (-1, 1, 0, 3), (1, 1, 0, 0), (-2, 1, 1, 0)]);
        assert_eq!(f.to_string(), "3/2*x^2*y - y^3 - 2*x + 1");
        assert_eq!(Poly2::zero().to_string(), "0");
        assert_eq!((-Poly2::one()).to_string(), "-1");
    }

    #[test]
    fn power() {
        let s = &Poly2::x() + &Poly2::one();
        assert_eq!(s.pow(0), Poly2::one());
        assert_eq!(s.pow(3), &(&s * &s) * &s);
    }

    pub(crate) fn arb_poly() -> impl Strategy<Value = Poly2> {
        prop::collection::vec((-5i64..=5, 1i64..=3, 0u32..4, 0u32..4), 0..5).prop_map(|ts| {
            Poly2::from_terms(
                ts.into_iter()
                    .map(|(n, d, i, j)| (MultiIndex::new(i, j), rat(n, d))),
            )
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn exact_div_postcondition(a in arb_poly(), b in arb_poly()) {
            if let Ok(q) = a.exact_div(&b) {
                prop_assert_eq!(&b * &q, a.clone());
            }
            if !b.is_zero() {
                prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
            }
        }

        #[test]
        fn derivatives_commute_and_leibniz(a in arb_poly(), b in arb_poly()) {
            prop_assert_eq!(a.dx().dy(), a.dy().dx());
            prop_assert_eq!((&a * &b).dx(), &(&a.dx() * &b) + &(&a * &b.dx()));
            prop_assert_eq!((&a * &b).dy(), &(&a.dy() * &b) + &(&a * &b.dy()));
            prop_assert_eq!(a.derivative(MultiIndex::new(2, 1)), a.dx().dx().dy());
        }
    }
}
