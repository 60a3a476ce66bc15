use crate::algebra::{HSeries, Poly2};
use crate::diffop::{BiDiffOp, DiffOp};

use super::{StarError, StarProduct};

/// `U = 1 + Σ_{k=1}^{N} ħ^k U_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeOp {
    orders: Vec<DiffOp>,
}

impl GaugeOp {
    pub fn new(orders: Vec<DiffOp>) -> Self {
        GaugeOp { orders }
    }

    pub fn identity(order: usize) -> Self {
        GaugeOp::new(vec![DiffOp::zero(); order])
    }

    pub fn order(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[DiffOp] {
        &self.orders
    }

    pub fn order_op(&self, k: usize) -> &DiffOp {
        &self.orders[k - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.orders.iter().all(DiffOp::is_zero)
    }

    pub fn as_series(&self) -> HSeries<DiffOp> {
        let mut coeffs = vec![DiffOp::identity()];
        coeffs.extend(self.orders.iter().cloned());
        HSeries::new(self.order(), coeffs, &DiffOp::zero())
    }

    pub fn inverse(&self) -> GaugeOp {
        let inv = self
            .as_series()
            .invert()
            .expect("leading coefficient is the identity");
        GaugeOp::new(inv.into_coeffs().into_iter().skip(1).collect())
    }

    pub fn apply(&self, f: &Poly2) -> HSeries<Poly2> {
        self.apply_series(&HSeries::constant(self.order(), f.clone()))
    }

    pub fn apply_series(&self, f: &HSeries<Poly2>) -> HSeries<Poly2> {
        let n = self.order().min(f.order());
        let u = self.as_series();
        let mut out = vec![Poly2::zero(); n + 1];
        for i in 0..=n {
            for j in 0..=(n - i) {
                out[i + j] += &u.coeff(i).apply(f.coeff(j));
            }
        }
        HSeries::new(n, out, &Poly2::zero())
    }
}

/// `m'(f,g) = U^{-1}(m(Uf, Ug))`, computed by operator composition.
pub fn gauge_transform(m: &StarProduct, u: &GaugeOp) -> Result<StarProduct, StarError> {
    let n = m.order();
    if u.order() != n {
        return Err(StarError::OrderMismatch {
            product: n,
            gauge: u.order(),
        });
    }
    let us = u.as_series().into_coeffs();
    let inv = u.inverse().as_series().into_coeffs();
    let ms = m.full();
    // inner[b][c][d] = m_b(U_c ·, U_d ·), filled for b + c + d <= n
    let mut inner: Vec<Vec<Vec<BiDiffOp>>> =
        vec![vec![vec![BiDiffOp::zero(); n + 1]; n + 1]; n + 1];
    for (b, mb) in ms.iter().enumerate() {
        if mb.is_zero() {
            continue;
        }
        for c in 0..=(n - b) {
            for d in 0..=(n - b - c) {
                if !us[c].is_zero() && !us[d].is_zero() {
                    inner[b][c][d] = mb.precompose(&us[c], &us[d]);
                }
            }
        }
    }
    let mut orders = Vec::with_capacity(n);
    for t in 1..=n {
        let mut acc = BiDiffOp::zero();
        for (a, ua) in inv.iter().enumerate().take(t + 1) {
            if ua.is_zero() {
                continue;
            }
            let mut sum = BiDiffOp::zero();
            for b in 0..=(t - a) {
                for c in 0..=(t - a - b) {
                    let d = t - a - b - c;
                    let e = &inner[b][c][d];
                    if !e.is_zero() {
                        sum = sum.add(e);
                    }
                }
            }
            if !sum.is_zero() {
                acc = acc.add(&sum.then(ua));
            }
        }
        orders.push(acc);
    }
    Ok(StarProduct::new(orders))
}
