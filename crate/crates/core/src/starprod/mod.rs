//! Star products as values: evaluation, associativity defects, gauge
//! action, normalization into the polarized class, and the Poisson
//! classifier.

mod gauge;
mod normalize;
mod poisson;

pub use gauge::{gauge_transform, GaugeOp};
pub use normalize::{normalize, NormalizeConfig, Normalized};
pub use poisson::{classify_p2, extract_poisson_p3, PoissonSeries};

use num_traits::One;
use thiserror::Error;

use crate::algebra::{binomial, HSeries, MultiIndex, Poly2, Rational};
use crate::diffop::{associator_pair, BiDiffOp, KTable, Shape, TriDiffOp};
use crate::quantize::QuantizeError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StarError {
    #[error("truncation orders differ: product {product}, gauge {gauge}")]
    OrderMismatch { product: usize, gauge: usize },
    #[error("order {order}: no differential operator of order <= {max_op_order} matches the forced values")]
    Infeasible { order: usize, max_op_order: u32 },
    #[error("normalization failed validation: {0}")]
    Inconsistent(String),
    #[error("product is not associative mod ħ^{0}")]
    NotAssociative(usize),
    #[error("product is not in the polarized class")]
    NotNormalized,
    #[error(
        "product is not the quantization of any Poisson series (first mismatch at order {order})"
    )]
    NotInImage { order: usize },
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
}

/// `m(f,g) = fg + Σ_{k=1}^{N} ħ^k m_k(f,g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarProduct {
    orders: Vec<BiDiffOp>,
    normalized: bool,
}

impl StarProduct {
    /// `orders[k-1]` is `m_k`.
    pub fn new(orders: Vec<BiDiffOp>) -> Self {
        let normalized = orders.iter().all(|m| m.satisfies(Shape::Spq));
        StarProduct { orders, normalized }
    }

    /// The pointwise product truncated at `order`.
    pub fn pointwise(order: usize) -> Self {
        StarProduct::new(vec![BiDiffOp::zero(); order])
    }

    pub fn order(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[BiDiffOp] {
        &self.orders
    }

    /// `m_k`, with `m_0` the pointwise product.
    pub fn order_op(&self, k: usize) -> &BiDiffOp {
        &self.orders[k - 1]
    }

    fn full(&self) -> Vec<BiDiffOp> {
        let mut v = vec![BiDiffOp::pointwise()];
        v.extend(self.orders.iter().cloned());
        v
    }

    /// True iff every `m_k` differentiates its first argument only in `x`
    /// and its second only in `y`, each with positive order.
    pub fn spq_membership(&self) -> bool {
        self.normalized
    }

    /// The orders as KTables, when the product is normalized.
    pub fn k_tables(&self) -> Option<Vec<KTable>> {
        self.orders.iter().map(KTable::from_bidiff).collect()
    }

    pub fn truncate(&self, order: usize) -> StarProduct {
        StarProduct::new(self.orders.iter().take(order).cloned().collect())
    }

    pub fn star_mul(&self, f: &Poly2, g: &Poly2) -> HSeries<Poly2> {
        let n = self.order();
        let mut out = vec![f * g];
        out.extend(self.orders.iter().map(|m| m.apply(f, g)));
        HSeries::new(n, out, &Poly2::zero())
    }

    /// Star product of two ħ-series, truncated at the smallest order.
    pub fn star_mul_series(&self, f: &HSeries<Poly2>, g: &HSeries<Poly2>) -> HSeries<Poly2> {
        let n = self.order().min(f.order()).min(g.order());
        let full = self.full();
        let mut out = vec![Poly2::zero(); n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                let (fi, gj) = (f.coeff(i), g.coeff(j));
                if fi.is_zero() || gj.is_zero() {
                    continue;
                }
                for (k, m) in full.iter().enumerate().take(n - i - j + 1) {
                    out[i + j + k] += &m.apply(fi, gj);
                }
            }
        }
        HSeries::new(n, out, &Poly2::zero())
    }

    /// `f^{⋆n}` as an ħ-series.
    pub fn star_power(&self, f: &Poly2, n: u32) -> HSeries<Poly2> {
        let mut acc = HSeries::constant(self.order(), Poly2::one());
        let base = HSeries::constant(self.order(), f.clone());
        for _ in 0..n {
            acc = self.star_mul_series(&acc, &base);
        }
        acc
    }

    /// Order-k associativity defects for `k = 2..=N`:
    /// `Σ_{i+j=k} [m_i(m_j(f,g),h) - m_i(f,m_j(g,h))]`.
    pub fn assoc_defect(&self) -> Vec<(usize, TriDiffOp)> {
        let full = self.full();
        (2..=self.order())
            .map(|k| {
                let mut d = TriDiffOp::zero();
                for i in 0..=k {
                    let (mi, mj) = (&full[i], &full[k - i]);
                    if mi.is_zero() || mj.is_zero() {
                        continue;
                    }
                    d = d.add(&associator_pair(mi, mj));
                }
                (k, d)
            })
            .collect()
    }

    pub fn is_associative(&self) -> bool {
        self.assoc_defect().iter().all(|(_, d)| d.is_zero())
    }
}

/// Symmetric Moyal product of the constant bivector `c ∂x∧∂y`:
/// `m_k = c^k/(k! 2^k) Σ_j (-1)^j C(k,j) ∂x^(k-j)∂y^j ⊗ ∂x^j∂y^(k-j)`.
pub fn moyal_fixture(c: &Rational, order: usize) -> StarProduct {
    let mut orders = Vec::with_capacity(order);
    let mut scale = Rational::one();
    for k in 1..=order as u32 {
        scale = scale * c / Rational::from_integer((2 * k).into());
        let mut m = BiDiffOp::zero();
        for j in 0..=k {
            let mut w = Rational::from_integer(binomial(k, j)) * &scale;
            if j % 2 == 1 {
                w = -w;
            }
            m.add_term(
                (MultiIndex::new(k - j, j), MultiIndex::new(j, k - j)),
                Poly2::constant(w),
            );
        }
        orders.push(m);
    }
    StarProduct::new(orders)
}
