use std::collections::BTreeMap;

use crate::algebra::{HSeries, MultiIndex, Poly2, Rational};
use crate::certify::{monomials_up_to, star_values};
use crate::diffop::DiffOp;

use super::{gauge_transform, GaugeOp, StarError, StarProduct};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizeConfig {
    /// Initial cap on the order of `U_j`; default `2j + 2`.
    pub max_op_order: Option<u32>,
    pub escalation_steps: u32,
    /// Extra monomial degrees beyond the cap on which each fit is checked.
    pub validation_margin: u32,
    /// Monomial pairs up to this degree are used to confirm
    /// `U(f ⋆' g) = Uf ⋆ Ug`.
    pub validation_degree: u32,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig {
            max_op_order: None,
            escalation_steps: 2,
            validation_margin: 2,
            validation_degree: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Normalized {
    pub gauge: GaugeOp,
    pub product: StarProduct,
    /// Operator-order cap that succeeded, per order `j`.
    pub op_caps: Vec<u32>,
}

/// Values `y^{⋆n} ⋆ x^{⋆m}`, extended on demand.
struct ForcedValues<'a> {
    m: &'a StarProduct,
    xs: Vec<HSeries<Poly2>>,
    ys: Vec<HSeries<Poly2>>,
    values: BTreeMap<MultiIndex, HSeries<Poly2>>,
}

impl<'a> ForcedValues<'a> {
    fn new(m: &'a StarProduct) -> Self {
        let one = HSeries::constant(m.order(), Poly2::one());
        ForcedValues {
            m,
            xs: vec![one.clone()],
            ys: vec![one],
            values: BTreeMap::new(),
        }
    }

    fn ensure(&mut self, degree: u32) {
        let n = self.m.order();
        let (x, y) = (
            HSeries::constant(n, Poly2::x()),
            HSeries::constant(n, Poly2::y()),
        );
        while self.xs.len() <= degree as usize {
            let next = self.m.star_mul_series(self.xs.last().unwrap(), &x);
            self.xs.push(next);
            let next = self.m.star_mul_series(self.ys.last().unwrap(), &y);
            self.ys.push(next);
        }
        for gamma in MultiIndex::up_to_degree(degree) {
            if !self.values.contains_key(&gamma) {
                let v = self
                    .m
                    .star_mul_series(&self.ys[gamma.y as usize], &self.xs[gamma.x as usize]);
                self.values.insert(gamma, v);
            }
        }
    }

    fn value(&self, gamma: MultiIndex, j: usize) -> &Poly2 {
        self.values[&gamma].coeff(j)
    }
}

fn monomial(gamma: MultiIndex) -> Poly2 {
    Poly2::monomial(Rational::from_integer(1.into()), gamma.x, gamma.y)
}

/// Reconstructs `Σ u_γ ∂^γ` from its values on `x^γ`, `|γ| <= window`,
/// requiring `u_γ = 0` for `|γ| > cap`.
fn fit_operator(values: &ForcedValues, j: usize, cap: u32, window: u32) -> Option<DiffOp> {
    let mut coeffs: BTreeMap<MultiIndex, Poly2> = BTreeMap::new();
    for gamma in MultiIndex::up_to_degree(window) {
        let target = monomial(gamma);
        let mut rest = values.value(gamma, j).clone();
        for (g, u) in &coeffs {
            if g.divides(gamma) {
                rest -= &(u * &target.derivative(*g));
            }
        }
        if rest.is_zero() {
            continue;
        }
        if gamma.degree() > cap {
            return None;
        }
        let u = rest.scale(&Rational::from_integer(gamma.factorial()).recip());
        coeffs.insert(gamma, u);
    }
    Some(DiffOp::from_terms(coeffs))
}

/// Finds the gauge `U` with `U x = x`, `U y = y` and
/// `U(x^m y^n) = y^{⋆n} ⋆ x^{⋆m}`, and returns it with the conjugated
/// product, which then lies in the polarized class.
pub fn normalize(m: &StarProduct, cfg: &NormalizeConfig) -> Result<Normalized, StarError> {
    if let Some((k, _)) = m.assoc_defect().into_iter().find(|(_, d)| !d.is_zero()) {
        return Err(StarError::NotAssociative(k));
    }
    let n = m.order();
    let mut values = ForcedValues::new(m);
    let mut orders = Vec::with_capacity(n);
    let mut op_caps = Vec::with_capacity(n);
    for j in 1..=n {
        let mut cap = cfg.max_op_order.unwrap_or(2 * j as u32 + 2);
        let mut fitted = None;
        for step in 0..=cfg.escalation_steps {
            let window = cap + cfg.validation_margin;
            values.ensure(window);
            if let Some(op) = fit_operator(&values, j, cap, window) {
                fitted = Some(op);
                break;
            }
            if step < cfg.escalation_steps {
                cap = (cap * 2).max(1);
            }
        }
        let Some(op) = fitted else {
            return Err(StarError::Infeasible {
                order: j,
                max_op_order: cap,
            });
        };
        orders.push(op);
        op_caps.push(cap);
    }
    let gauge = GaugeOp::new(orders);
    let product = gauge_transform(m, &gauge)?;
    if !product.spq_membership() {
        return Err(StarError::Inconsistent(
            "conjugated product is not in the polarized class".into(),
        ));
    }
    let monos = monomials_up_to(cfg.validation_degree);
    for f in &monos {
        let uf = gauge.apply(f);
        for g in &monos {
            let lhs = gauge.apply_series(&product.star_mul(f, g));
            let rhs = star_values(m.orders(), n, uf.coeffs(), gauge.apply(g).coeffs());
            if lhs.coeffs() != &rhs[..] {
                return Err(StarError::Inconsistent(format!(
                    "gauge relation fails on ({f}, {g})"
                )));
            }
        }
    }
    Ok(Normalized {
        gauge,
        product,
        op_caps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::diffop::BiDiffOp;
    use crate::quantize::{quantize, QuantizeConfig};
    use crate::starprod::moyal_fixture;

    #[test]
    fn moyal_normalizes_to_normal_order() {
        let out = normalize(&moyal_fixture(&rat(1, 1), 2), &NormalizeConfig::default()).unwrap();
        let u1 = DiffOp::from_terms([(MultiIndex::new(1, 1), Poly2::constant(rat(-1, 2)))]);
        assert_eq!(out.gauge.order_op(1), &u1);
        let u2 = DiffOp::from_terms([(MultiIndex::new(2, 2), Poly2::constant(rat(1, 8)))]);
        assert_eq!(out.gauge.order_op(2), &u2);
        let normal = quantize(&Poly2::one(), &QuantizeConfig::new(2))
            .unwrap()
            .product;
        assert_eq!(out.product, normal);
    }

    #[test]
    fn polarized_products_need_no_gauge() {
        let q = quantize(&(Poly2::x() * Poly2::y()), &QuantizeConfig::new(3)).unwrap();
        let out = normalize(&q.product, &NormalizeConfig::default()).unwrap();
        assert!(out.gauge.is_identity());
        assert_eq!(out.product, q.product);
        let out = normalize(&StarProduct::pointwise(2), &NormalizeConfig::default()).unwrap();
        assert!(out.gauge.is_identity());
    }

    #[test]
    fn non_associative_input_is_rejected() {
        let m = StarProduct::new(vec![
            BiDiffOp::from_terms([((MultiIndex::X, MultiIndex::Y), Poly2::one())]),
            BiDiffOp::zero(),
        ]);
        assert_eq!(
            normalize(&m, &NormalizeConfig::default()).unwrap_err(),
            StarError::NotAssociative(2)
        );
    }

    #[test]
    fn tiny_cap_escalates() {
        let cfg = NormalizeConfig {
            max_op_order: Some(1),
            escalation_steps: 0,
            ..NormalizeConfig::default()
        };
        let m = moyal_fixture(&rat(1, 1), 1);
        assert!(matches!(
            normalize(&m, &cfg).unwrap_err(),
            StarError::Infeasible { order: 1, .. }
        ));
        let cfg = NormalizeConfig {
            escalation_steps: 1,
            ..cfg
        };
        assert_eq!(normalize(&m, &cfg).unwrap().op_caps, vec![2]);
    }
}
