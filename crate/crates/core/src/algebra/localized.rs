use std::fmt;
use std::sync::Arc;

use super::poly::Poly2;
use super::rational::Rational;
use super::series::Ring;
use super::AlgebraError;

/// `numerator / phi^phi_power` for one fixed nonzero polynomial `phi`.
///
/// Kept reduced: while `phi_power > 0`, `phi` does not divide the
/// numerator. For constant `phi` this forces `phi_power = 0`.
#[derive(Clone)]
pub struct LocalizedFn {
    numerator: Poly2,
    phi_power: u32,
    phi: Arc<Poly2>,
}

impl LocalizedFn {
    pub fn new(numerator: Poly2, phi_power: u32, phi: Arc<Poly2>) -> Result<Self, AlgebraError> {
        if phi.is_zero() {
            return Err(AlgebraError::ZeroLocalization);
        }
        Ok(LocalizedFn::reduced(numerator, phi_power, phi))
    }

    pub fn from_poly(p: Poly2, phi: Arc<Poly2>) -> Result<Self, AlgebraError> {
        LocalizedFn::new(p, 0, phi)
    }

    /// `1 / phi`.
    pub fn inverse_phi(phi: Arc<Poly2>) -> Result<Self, AlgebraError> {
        LocalizedFn::new(Poly2::one(), 1, phi)
    }

    fn reduced(mut numerator: Poly2, mut phi_power: u32, phi: Arc<Poly2>) -> Self {
        if numerator.is_zero() {
            phi_power = 0;
        }
        while phi_power > 0 {
            match numerator.exact_div(&phi) {
                Ok(q) => {
                    numerator = q;
                    phi_power -= 1;
                }
                Err(_) => break,
            }
        }
        LocalizedFn {
            numerator,
            phi_power,
            phi,
        }
    }

    pub fn numerator(&self) -> &Poly2 {
        &self.numerator
    }

    pub fn phi_power(&self) -> u32 {
        self.phi_power
    }

    pub fn phi(&self) -> &Arc<Poly2> {
        &self.phi
    }

    /// The polynomial value, if the denominator is trivial.
    pub fn as_poly(&self) -> Option<&Poly2> {
        (self.phi_power == 0).then_some(&self.numerator)
    }

    fn same_phi(&self, other: &LocalizedFn) {
        assert!(
            Arc::ptr_eq(&self.phi, &other.phi) || self.phi == other.phi,
            "localized functions over different polynomials: {} vs {}",
            self.phi,
            other.phi
        );
    }

    fn lift(&self, power: u32) -> Poly2 {
        &self.numerator * &self.phi.pow(power - self.phi_power)
    }

    pub fn scale(&self, c: &Rational) -> LocalizedFn {
        LocalizedFn::reduced(self.numerator.scale(c), self.phi_power, self.phi.clone())
    }

    pub fn mul_poly(&self, p: &Poly2) -> LocalizedFn {
        LocalizedFn::reduced(&self.numerator * p, self.phi_power, self.phi.clone())
    }

    fn derivative_with(&self, d: impl Fn(&Poly2) -> Poly2) -> LocalizedFn {
        // (n / phi^m)' = (n' phi - m n phi') / phi^(m+1)
        if self.phi_power == 0 {
            return LocalizedFn::reduced(d(&self.numerator), 0, self.phi.clone());
        }
        let m = Rational::from_integer(self.phi_power.into());
        let num = &(&d(&self.numerator) * &self.phi) - &(&self.numerator * &d(&self.phi)).scale(&m);
        LocalizedFn::reduced(num, self.phi_power + 1, self.phi.clone())
    }

    pub fn dx(&self) -> LocalizedFn {
        self.derivative_with(Poly2::dx)
    }

    pub fn dy(&self) -> LocalizedFn {
        self.derivative_with(Poly2::dy)
    }
}

impl PartialEq for LocalizedFn {
    fn eq(&self, other: &Self) -> bool {
        self.same_phi(other);
        &self.numerator * &self.phi.pow(other.phi_power)
            == &other.numerator * &self.phi.pow(self.phi_power)
    }
}

impl fmt::Debug for LocalizedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) / ({})^{}",
            self.numerator, self.phi, self.phi_power
        )
    }
}

impl Ring for LocalizedFn {
    fn zero_like(&self) -> Self {
        LocalizedFn::reduced(Poly2::zero(), 0, self.phi.clone())
    }
    fn one_like(&self) -> Self {
        LocalizedFn::reduced(Poly2::one(), 0, self.phi.clone())
    }
    fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        self.same_phi(rhs);
        let m = self.phi_power.max(rhs.phi_power);
        LocalizedFn::reduced(&self.lift(m) + &rhs.lift(m), m, self.phi.clone())
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.same_phi(rhs);
        let m = self.phi_power.max(rhs.phi_power);
        LocalizedFn::reduced(&self.lift(m) - &rhs.lift(m), m, self.phi.clone())
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.same_phi(rhs);
        LocalizedFn::reduced(
            &self.numerator * &rhs.numerator,
            self.phi_power + rhs.phi_power,
            self.phi.clone(),
        )
    }
    fn neg(&self) -> Self {
        LocalizedFn::reduced(-&self.numerator, self.phi_power, self.phi.clone())
    }
    /// Units are exactly `c * phi^j` with `c` a nonzero constant and `j`
    /// any integer.
    fn unit_inverse(&self) -> Option<Self> {
        let mut rest = self.numerator.clone();
        let mut extra = 0u32;
        if rest.is_zero() {
            return None;
        }
        while !self.phi.is_constant() {
            match rest.exact_div(&self.phi) {
                Ok(q) => {
                    rest = q;
                    extra += 1;
                }
                Err(_) => break,
            }
        }
        let c = rest.as_constant()?;
        // self = c * phi^(extra - phi_power)
        let inv = Poly2::constant(c.recip());
        if extra >= self.phi_power {
            Some(LocalizedFn::reduced(
                inv,
                extra - self.phi_power,
                self.phi.clone(),
            ))
        } else {
            Some(LocalizedFn::reduced(
                &inv * &self.phi.pow(self.phi_power - extra),
                0,
                self.phi.clone(),
            ))
        }
    }
}
