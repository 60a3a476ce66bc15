use std::collections::BTreeMap;
use std::fmt;

use super::{add_coeff, BiDiffOp, Shape};
use crate::algebra::{MultiIndex, Poly2};

/// Normalized bidifferential cochain `Σ κ_ab ∂x^a ⊗ ∂y^b` with `a, b >= 1`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct KTable {
    terms: BTreeMap<(u32, u32), Poly2>,
}

impl KTable {
    pub fn zero() -> Self {
        KTable::default()
    }

    /// The cocycle `∂x ⊗ ∂y`.
    pub fn dx_dy() -> Self {
        KTable::from_terms([((1, 1), Poly2::one())])
    }

    /// # Panics
    /// If any index has `a == 0` or `b == 0`.
    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), Poly2)>>(terms: I) -> Self {
        let mut out = KTable::zero();
        for (k, c) in terms {
            out.add_term(k.0, k.1, c);
        }
        out
    }

    pub fn add_term(&mut self, a: u32, b: u32, c: Poly2) {
        assert!(
            a >= 1 && b >= 1,
            "KTable index ({a}, {b}) must have a, b >= 1"
        );
        add_coeff(&mut self.terms, (a, b), c);
    }

    pub fn get(&self, a: u32, b: u32) -> Poly2 {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), Poly2> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, rhs: &KTable) -> KTable {
        let mut out = self.clone();
        for ((a, b), c) in &rhs.terms {
            out.add_term(*a, *b, c.clone());
        }
        out
    }

    pub fn mul_poly(&self, p: &Poly2) -> KTable {
        KTable::from_terms(self.terms.iter().map(|(k, c)| (*k, c * p)))
    }

    pub fn to_bidiff(&self) -> BiDiffOp {
        BiDiffOp::from_terms(
            self.terms
                .iter()
                .map(|((a, b), c)| ((MultiIndex::new(*a, 0), MultiIndex::new(0, *b)), c.clone())),
        )
    }

    /// `None` unless the operator has K2 shape.
    pub fn from_bidiff(d: &BiDiffOp) -> Option<KTable> {
        if !d.satisfies(Shape::K2) {
            return None;
        }
        Some(KTable::from_terms(
            d.terms().iter().map(|((a, b), c)| ((a.x, b.y), c.clone())),
        ))
    }

    pub fn apply(&self, f: &Poly2, g: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for ((a, b), c) in &self.terms {
            let fa = f.derivative(MultiIndex::new(*a, 0));
            if fa.is_zero() {
                continue;
            }
            out += &(&(c * &fa) * &g.derivative(MultiIndex::new(0, *b)));
        }
        out
    }

    pub fn max_order(&self) -> (u32, u32) {
        let a = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let b = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        (a, b)
    }
}

impl fmt::Display for KTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b), c)| format!("({c})*dx^{a}(x)dy^{b}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
