//! Polydifferential operators with polynomial coefficients.
//!
//! Every operator is stored in the canonical form
//! `Σ c · ∂^α f · ∂^β g (· ∂^γ h)`, so two operators are equal exactly
//! when their coefficient maps are equal.

mod hochschild;
mod ktable;

pub(crate) use hochschild::associator_pair;
pub use hochschild::{
    build_rhs_t, euler_lagrange, hochschild_b, hochschild_b_ktable, in_admissible_class, Axis,
};
pub use ktable::KTable;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{MultiIndex, Poly2, Rational, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffOpError {
    #[error("operator of arity {expected} applied to {got} arguments")]
    ArityMismatch { expected: usize, got: usize },
    #[error("right-hand side for order {0} is missing a prior order")]
    MissingPriorOrder(usize),
}

pub type BiKey = (MultiIndex, MultiIndex);
pub type TriKey = (MultiIndex, MultiIndex, MultiIndex);

/// Shape classes of cochains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    /// Bidifferential, first slot pure positive `∂x`, second slot pure
    /// positive `∂y`.
    K2,
    /// Tridifferential, first slot pure positive `∂x`, last slot pure
    /// positive `∂y`.
    K3,
    /// Same test as `K2`, read as membership of a product order.
    Spq,
}

fn add_coeff<K: Ord>(map: &mut BTreeMap<K, Poly2>, key: K, c: Poly2) {
    if c.is_zero() {
        return;
    }
    match map.get_mut(&key) {
        Some(v) => {
            *v += &c;
            if v.is_zero() {
                map.remove(&key);
            }
        }
        None => {
            map.insert(key, c);
        }
    }
}

fn int(n: num_bigint::BigInt) -> Rational {
    Rational::from_integer(n)
}

/// Leibniz splittings `alpha = a1 + a2` with weight `C(alpha, a1)`.
pub(crate) fn splits2(alpha: MultiIndex) -> Vec<(MultiIndex, MultiIndex, Rational)> {
    alpha
        .below()
        .map(|a1| {
            let a2 = alpha.checked_sub(a1).expect("a1 <= alpha");
            (a1, a2, int(alpha.binomial(a1)))
        })
        .collect()
}

/// Three-factor Leibniz splittings `alpha = a1 + a2 + a3` weighted by the
/// multinomial coefficient.
pub(crate) fn splits3(alpha: MultiIndex) -> Vec<(MultiIndex, MultiIndex, MultiIndex, Rational)> {
    let mut out = Vec::new();
    for a1 in alpha.below() {
        let rest = alpha.checked_sub(a1).expect("a1 <= alpha");
        let w1 = alpha.binomial(a1);
        for a2 in rest.below() {
            let a3 = rest.checked_sub(a2).expect("a2 <= rest");
            out.push((a1, a2, a3, int(&w1 * rest.binomial(a2))));
        }
    }
    out
}

macro_rules! coeff_map_ops {
    ($ty:ident, $key:ty) => {
        impl $ty {
            pub fn zero() -> Self {
                $ty {
                    terms: BTreeMap::new(),
                }
            }

            pub fn from_terms<I: IntoIterator<Item = ($key, Poly2)>>(terms: I) -> Self {
                let mut out = $ty::zero();
                for (k, c) in terms {
                    out.add_term(k, c);
                }
                out
            }

            pub fn add_term(&mut self, key: $key, c: Poly2) {
                add_coeff(&mut self.terms, key, c);
            }

            pub fn terms(&self) -> &BTreeMap<$key, Poly2> {
                &self.terms
            }

            pub fn coeff(&self, key: &$key) -> Poly2 {
                self.terms.get(key).cloned().unwrap_or_default()
            }

            pub fn is_zero(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn scale(&self, c: &Rational) -> Self {
                $ty::from_terms(self.terms.iter().map(|(k, v)| (*k, v.scale(c))))
            }

            /// Multiplies every coefficient by `p`, i.e. multiplies the
            /// operator's output pointwise by `p`.
            pub fn mul_poly(&self, p: &Poly2) -> Self {
                $ty::from_terms(self.terms.iter().map(|(k, v)| (*k, v * p)))
            }

            pub fn add(&self, rhs: &Self) -> Self {
                let mut out = self.clone();
                for (k, v) in &rhs.terms {
                    out.add_term(*k, v.clone());
                }
                out
            }

            pub fn sub(&self, rhs: &Self) -> Self {
                let mut out = self.clone();
                for (k, v) in &rhs.terms {
                    out.add_term(*k, -v);
                }
                out
            }

            /// Largest total coefficient degree, `None` for the zero operator.
            pub fn max_coeff_degree(&self) -> Option<u32> {
                self.terms.values().filter_map(Poly2::degree).max()
            }
        }
    };
}

/// Linear differential operator `Σ u_γ ∂^γ`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DiffOp {
    terms: BTreeMap<MultiIndex, Poly2>,
}

coeff_map_ops!(DiffOp, MultiIndex);

impl DiffOp {
    pub fn identity() -> Self {
        DiffOp::from_terms([(MultiIndex::ZERO, Poly2::one())])
    }

    pub fn partial(alpha: MultiIndex) -> Self {
        DiffOp::from_terms([(alpha, Poly2::one())])
    }

    pub fn apply(&self, f: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (g, u) in &self.terms {
            out += &(u * &f.derivative(*g));
        }
        out
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero();
        for (g, a) in &self.terms {
            for (mu, nu, w) in splits2(*g) {
                for (b_idx, b) in &rhs.terms {
                    let c = (a * &b.derivative(mu)).scale(&w);
                    out.add_term(nu + *b_idx, c);
                }
            }
        }
        out
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }
}

impl Ring for DiffOp {
    fn zero_like(&self) -> Self {
        DiffOp::zero()
    }
    fn one_like(&self) -> Self {
        DiffOp::identity()
    }
    fn is_zero(&self) -> bool {
        DiffOp::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        DiffOp::add(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        DiffOp::sub(self, rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.compose(rhs)
    }
    fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }
    fn unit_inverse(&self) -> Option<Self> {
        if self.terms.len() == 1 {
            if let Some(c) = self.coeff(&MultiIndex::ZERO).as_constant() {
                if !c.is_zero() {
                    return Some(DiffOp::from_terms([(
                        MultiIndex::ZERO,
                        Poly2::constant(c.recip()),
                    )]));
                }
            }
        }
        None
    }
}

/// Bidifferential operator `(f, g) ↦ Σ c_{αβ} ∂^α f ∂^β g`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BiDiffOp {
    terms: BTreeMap<BiKey, Poly2>,
}

coeff_map_ops!(BiDiffOp, BiKey);

impl BiDiffOp {
    /// The pointwise product `(f, g) ↦ f g`.
    pub fn pointwise() -> Self {
        BiDiffOp::from_terms([((MultiIndex::ZERO, MultiIndex::ZERO), Poly2::one())])
    }

    pub fn apply(&self, f: &Poly2, g: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for ((a, b), c) in &self.terms {
            let fa = f.derivative(*a);
            if fa.is_zero() {
                continue;
            }
            out += &(&(c * &fa) * &g.derivative(*b));
        }
        out
    }

    pub fn apply_args(&self, args: &[&Poly2]) -> Result<Poly2, DiffOpError> {
        match args {
            [f, g] => Ok(self.apply(f, g)),
            _ => Err(DiffOpError::ArityMismatch {
                expected: 2,
                got: args.len(),
            }),
        }
    }

    /// `(f, g, h) ↦ self(inner(f, g), h)`.
    pub fn compose_first(&self, inner: &BiDiffOp) -> TriDiffOp {
        let mut out = TriDiffOp::zero();
        for ((alpha, beta), c) in &self.terms {
            let parts = splits3(*alpha);
            for ((mu, nu), e) in &inner.terms {
                for (a1, a2, a3, w) in &parts {
                    let coeff = (c * &e.derivative(*a1)).scale(w);
                    out.add_term((*mu + *a2, *nu + *a3, *beta), coeff);
                }
            }
        }
        out
    }

    /// `(f, g, h) ↦ self(f, inner(g, h))`.
    pub fn compose_second(&self, inner: &BiDiffOp) -> TriDiffOp {
        let mut out = TriDiffOp::zero();
        for ((alpha, beta), c) in &self.terms {
            let parts = splits3(*beta);
            for ((mu, nu), e) in &inner.terms {
                for (b1, b2, b3, w) in &parts {
                    let coeff = (c * &e.derivative(*b1)).scale(w);
                    out.add_term((*alpha, *mu + *b2, *nu + *b3), coeff);
                }
            }
        }
        out
    }

    /// `(f, g) ↦ outer(self(f, g))`.
    pub fn then(&self, outer: &DiffOp) -> BiDiffOp {
        let mut out = BiDiffOp::zero();
        for (gamma, l) in outer.terms() {
            let parts = splits3(*gamma);
            for ((alpha, beta), c) in &self.terms {
                for (g1, g2, g3, w) in &parts {
                    let coeff = (l * &c.derivative(*g1)).scale(w);
                    out.add_term((*alpha + *g2, *beta + *g3), coeff);
                }
            }
        }
        out
    }

    /// `(f, g) ↦ self(u f, v g)`.
    pub fn precompose(&self, u: &DiffOp, v: &DiffOp) -> BiDiffOp {
        let mut out = BiDiffOp::zero();
        for ((alpha, beta), c) in &self.terms {
            let left = expand_derivative_of(u, *alpha);
            let right = expand_derivative_of(v, *beta);
            for (mf, cf) in &left {
                for (mg, cg) in &right {
                    out.add_term((*mf, *mg), &(c * cf) * cg);
                }
            }
        }
        out
    }

    pub fn satisfies(&self, shape: Shape) -> bool {
        match shape {
            Shape::K2 | Shape::Spq => self
                .terms
                .keys()
                .all(|(a, b)| a.y == 0 && b.x == 0 && a.x >= 1 && b.y >= 1),
            Shape::K3 => false,
        }
    }

    /// Largest `|α| + |β|` among the terms.
    pub fn max_order(&self) -> u32 {
        self.terms
            .keys()
            .map(|(a, b)| a.degree() + b.degree())
            .max()
            .unwrap_or(0)
    }
}

/// Coefficients of `∂^alpha ∘ u` as an operator in canonical form.
fn expand_derivative_of(u: &DiffOp, alpha: MultiIndex) -> BTreeMap<MultiIndex, Poly2> {
    let mut out = BTreeMap::new();
    for (a1, a2, w) in splits2(alpha) {
        for (mu, c) in u.terms() {
            add_coeff(&mut out, a2 + *mu, c.derivative(a1).scale(&w));
        }
    }
    out
}

/// Tridifferential operator `(f, g, h) ↦ Σ c ∂^α f ∂^β g ∂^γ h`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct TriDiffOp {
    terms: BTreeMap<TriKey, Poly2>,
}

coeff_map_ops!(TriDiffOp, TriKey);

impl TriDiffOp {
    pub fn apply(&self, f: &Poly2, g: &Poly2, h: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for ((a, b, c), k) in &self.terms {
            let fa = f.derivative(*a);
            if fa.is_zero() {
                continue;
            }
            let gb = g.derivative(*b);
            if gb.is_zero() {
                continue;
            }
            out += &(&(&(k * &fa) * &gb) * &h.derivative(*c));
        }
        out
    }

    pub fn apply_args(&self, args: &[&Poly2]) -> Result<Poly2, DiffOpError> {
        match args {
            [f, g, h] => Ok(self.apply(f, g, h)),
            _ => Err(DiffOpError::ArityMismatch {
                expected: 3,
                got: args.len(),
            }),
        }
    }

    pub fn satisfies(&self, shape: Shape) -> bool {
        match shape {
            Shape::K3 => self
                .terms
                .keys()
                .all(|(a, _, c)| a.y == 0 && a.x >= 1 && c.x == 0 && c.y >= 1),
            Shape::K2 | Shape::Spq => false,
        }
    }
}

fn write_index(f: &mut fmt::Formatter<'_>, slot: &str, m: MultiIndex) -> fmt::Result {
    match (m.x, m.y) {
        (0, 0) => write!(f, "{slot}"),
        (a, 0) => write!(f, "{slot}_x{a}"),
        (0, b) => write!(f, "{slot}_y{b}"),
        (a, b) => write!(f, "{slot}_x{a}y{b}"),
    }
}

impl fmt::Display for BiDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*")?;
            write_index(f, "f", *a)?;
            write!(f, "*")?;
            write_index(f, "g", *b)?;
        }
        Ok(())
    }
}

impl fmt::Display for TriDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b, c), k)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({k})*")?;
            write_index(f, "f", *a)?;
            write!(f, "*")?;
            write_index(f, "g", *b)?;
            write!(f, "*")?;
            write_index(f, "h", *c)?;
        }
        Ok(())
    }
}
