use std::fmt::Debug;

use num_traits::Zero;

use super::poly::Poly2;
use super::AlgebraError;

/// Minimal (not necessarily commutative) ring interface used by
/// truncated series. Elements build their own zero and one so that
/// rings carrying extra context (a localization polynomial) fit.
pub trait Ring: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Two-sided inverse if the element is a unit.
    fn unit_inverse(&self) -> Option<Self>;
}

impl Ring for Poly2 {
    fn zero_like(&self) -> Self {
        Poly2::zero()
    }
    fn one_like(&self) -> Self {
        Poly2::one()
    }
    fn is_zero(&self) -> bool {
        Poly2::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn unit_inverse(&self) -> Option<Self> {
        match self.as_constant() {
            Some(c) if !c.is_zero() => Some(Poly2::constant(c.recip())),
            _ => None,
        }
    }
}

/// Power series in ħ truncated after `ħ^order`.
#[derive(Clone, PartialEq, Debug)]
pub struct HSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Ring> HSeries<T> {
    /// Series whose `ħ^i` coefficient is `coeffs[i]`, truncated at
    /// `order`; missing coefficients are zero.
    pub fn new(order: usize, coeffs: Vec<T>, template: &T) -> Self {
        let mut coeffs = coeffs;
        coeffs.truncate(order + 1);
        while coeffs.len() < order + 1 {
            coeffs.push(template.zero_like());
        }
        HSeries { coeffs }
    }

    pub fn constant(order: usize, c: T) -> Self {
        let zero = c.zero_like();
        HSeries::new(order, vec![c], &zero)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, i: usize) -> &T {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let template = self.coeffs[0].zero_like();
        HSeries::new(order, self.coeffs.clone(), &template)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Ring::is_zero)
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> HSeries<U> {
        HSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        HSeries {
            coeffs: (0..=n)
                .map(|i| self.coeffs[i].add(&rhs.coeffs[i]))
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        HSeries {
            coeffs: (0..=n)
                .map(|i| self.coeffs[i].sub(&rhs.coeffs[i]))
                .collect(),
        }
    }

    /// Cauchy product, truncated at the smaller of the two orders.
    pub fn mul(&self, rhs: &Self) -> Self {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n)
            .map(|k| {
                (0..=k).fold(self.coeffs[0].zero_like(), |acc, i| {
                    acc.add(&self.coeffs[i].mul(&rhs.coeffs[k - i]))
                })
            })
            .collect();
        HSeries { coeffs }
    }

    /// `w` with `self * w = w * self = 1 mod ħ^(order+1)`.
    pub fn invert(&self) -> Result<Self, AlgebraError> {
        let lead_inv = self.coeffs[0]
            .unit_inverse()
            .ok_or_else(|| AlgebraError::NonUnitLeadingTerm(format!("{:?}", self.coeffs[0])))?;
        let mut w: Vec<T> = vec![lead_inv.clone()];
        for n in 1..=self.order() {
            let mut acc = lead_inv.zero_like();
            for i in 1..=n {
                acc = acc.add(&self.coeffs[i].mul(&w[n - i]));
            }
            w.push(lead_inv.mul(&acc).neg());
        }
        Ok(HSeries { coeffs: w })
    }
}

impl<T: Ring> Ring for HSeries<T> {
    fn zero_like(&self) -> Self {
        HSeries {
            coeffs: self.coeffs.iter().map(Ring::zero_like).collect(),
        }
    }
    fn one_like(&self) -> Self {
        let one = self.coeffs[0].one_like();
        HSeries::constant(self.order(), one)
    }
    fn is_zero(&self) -> bool {
        HSeries::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        HSeries::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        HSeries::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        HSeries::mul(self, rhs)
    }
    fn neg(&self) -> Self {
        self.map(Ring::neg)
    }
    fn unit_inverse(&self) -> Option<Self> {
        self.invert().ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use proptest::prelude::*;

    fn series(order: usize, cs: Vec<Poly2>) -> HSeries<Poly2> {
        HSeries::new(order, cs, &Poly2::zero())
    }

    #[test]
    fn geometric_inverse() {
        let x = Poly2::x();
        let u = series(2, vec![Poly2::one(), x.clone()]);
        let w = u.invert().unwrap();
        assert_eq!(w, series(2, vec![Poly2::one(), -&x, &x * &x]));
        let one = series(5, vec![Poly2::one()]);
        assert_eq!(one.invert().unwrap(), one);
    }

    #[test]
    fn truncated_product() {
        let x = Poly2::x();
        let a = series(2, vec![Poly2::one(), x.clone()]);
        let b = series(2, vec![Poly2::one(), -&x]);
        assert_eq!(
            a.mul(&b),
            series(2, vec![Poly2::one(), Poly2::zero(), -(&x * &x)])
        );
        let short = series(1, vec![Poly2::one(), x.clone()]);
        assert_eq!(a.mul(&short).order(), 1);
    }

    #[test]
    fn non_unit_leading_term() {
        let u = series(2, vec![Poly2::x()]);
        assert!(matches!(
            u.invert(),
            Err(AlgebraError::NonUnitLeadingTerm(_))
        ));
    }

    proptest! {
        #[test]
        fn invert_is_inverse(
            lead in prop_oneof![Just(1i64), Just(-1), Just(3)],
            tail in prop::collection::vec((-3i64..=3, 0u32..3, 0u32..3), 0..6),
            order in 0usize..5
        ) {
            let mut cs = vec![Poly2::from_int(lead)];
            for (c, a, b) in tail {
                cs.push(Poly2::monomial(rat(c, 1), a, b));
            }
            let u = series(order, cs);
            let w = u.invert().unwrap();
            let one = series(order, vec![Poly2::one()]);
            prop_assert_eq!(u.mul(&w), one.clone());
            prop_assert_eq!(w.mul(&u), one);
        }
    }
}
