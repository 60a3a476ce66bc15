use crate::algebra::Poly2;
use crate::quantize::{quantize_series, QuantizeConfig};

use super::{StarError, StarProduct};

/// `Ψ = Σ_{i=0}^{N} ħ^i ψ_i ∂x∧∂y`.
#[derive(Clone, Debug, Default)]
pub struct PoissonSeries {
    coeffs: Vec<Poly2>,
}

impl PoissonSeries {
    pub fn new(coeffs: Vec<Poly2>) -> Self {
        PoissonSeries { coeffs }
    }

    /// `φ` as a series of order `order`.
    pub fn constant(phi: Poly2, order: usize) -> Self {
        let mut coeffs = vec![Poly2::zero(); order + 1];
        coeffs[0] = phi;
        PoissonSeries { coeffs }
    }

    /// Number of stored coefficients minus one; 0 for an empty series.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Poly2] {
        &self.coeffs
    }

    /// `ψ_q`, zero beyond the stored range.
    pub fn coeff(&self, q: usize) -> Poly2 {
        self.coeffs.get(q).cloned().unwrap_or_else(Poly2::zero)
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(Poly2::degree).max()
    }

    pub fn truncate(&self, order: usize) -> PoissonSeries {
        PoissonSeries::new((0..=order).map(|q| self.coeff(q)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly2::is_zero)
    }

    /// Coefficients with trailing zeros removed.
    pub fn trimmed(&self) -> &[Poly2] {
        let len = self
            .coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .map_or(0, |i| i + 1);
        &self.coeffs[..len]
    }
}

impl PartialEq for PoissonSeries {
    fn eq(&self, other: &Self) -> bool {
        self.trimmed() == other.trimmed()
    }
}

impl Eq for PoissonSeries {}

/// `(1/ħ)(m(x,y) - m(y,x))`: the ħ^(k-1) coefficient is
/// `m_k(x,y) - m_k(y,x)`.
pub fn extract_poisson_p3(m: &StarProduct) -> PoissonSeries {
    let (x, y) = (Poly2::x(), Poly2::y());
    PoissonSeries::new(
        m.orders()
            .iter()
            .map(|mk| mk.apply(&x, &y) - mk.apply(&y, &x))
            .collect(),
    )
}

/// The Poisson series whose quantization is `m`, found by Newton
/// iteration on `p3` and certified by requantizing. `caps.order` is
/// ignored; the product's own order is used.
pub fn classify_p2(m: &StarProduct, caps: &QuantizeConfig) -> Result<PoissonSeries, StarError> {
    if !m.spq_membership() {
        return Err(StarError::NotNormalized);
    }
    let n = m.order();
    let with_order = |order: usize| QuantizeConfig {
        order,
        ..caps.clone()
    };
    let target = extract_poisson_p3(m);
    let mut psi = vec![target.coeff(0)];
    for j in 1..n {
        let q = quantize_series(&PoissonSeries::new(psi.clone()), &with_order(j + 1))?;
        let current = extract_poisson_p3(&q.product);
        psi.push(target.coeff(j) - current.coeff(j));
    }
    let result = PoissonSeries::new(psi);
    let check = quantize_series(&result, &with_order(n))?.product;
    if let Some(k) = (1..=n).find(|&k| check.order_op(k) != m.order_op(k)) {
        return Err(StarError::NotInImage { order: k });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, MultiIndex};
    use crate::diffop::BiDiffOp;
    use crate::quantize::quantize;
    use crate::starprod::moyal_fixture;

    #[test]
    fn p3_examples() {
        let phi = Poly2::x().pow(2) * Poly2::y() + Poly2::x();
        let q = quantize(&phi, &QuantizeConfig::new(3)).unwrap();
        let p = extract_poisson_p3(&q.product);
        assert_eq!(p.coeff(0), phi);
        assert_eq!(p.coeff(1), (&phi * &phi.dx().dy()).scale(&rat(1, 2)));
        assert_eq!(
            extract_poisson_p3(&moyal_fixture(&rat(1, 1), 3)),
            PoissonSeries::constant(Poly2::one(), 0)
        );
        assert!(extract_poisson_p3(&StarProduct::pointwise(2)).is_zero());
    }

    #[test]
    fn classify_inverts_quantize() {
        let phi = Poly2::x() * Poly2::y() - Poly2::y().pow(2);
        let q = quantize(&phi, &QuantizeConfig::new(3)).unwrap();
        let psi = classify_p2(&q.product, &QuantizeConfig::new(0)).unwrap();
        assert_eq!(psi, PoissonSeries::constant(phi, 2));
        assert!(
            classify_p2(&StarProduct::pointwise(3), &QuantizeConfig::new(0))
                .unwrap()
                .is_zero()
        );
    }

    #[test]
    fn classify_recovers_h_dependent_series() {
        let psi = PoissonSeries::new(vec![Poly2::x(), Poly2::y().pow(2), Poly2::from_int(3)]);
        let q = quantize_series(&psi, &QuantizeConfig::new(3)).unwrap();
        let back = classify_p2(&q.product, &QuantizeConfig::new(0)).unwrap();
        assert_eq!(back, psi);
    }

    #[test]
    fn classify_rejects_bad_inputs() {
        let caps = QuantizeConfig::new(0);
        assert_eq!(
            classify_p2(&moyal_fixture(&rat(1, 1), 2), &caps).unwrap_err(),
            StarError::NotNormalized
        );
        // polarized but not associative, so outside the image
        let m = StarProduct::new(vec![
            BiDiffOp::zero(),
            BiDiffOp::from_terms([((MultiIndex::new(2, 0), MultiIndex::new(0, 1)), Poly2::one())]),
        ]);
        assert!(!m.is_associative());
        assert_eq!(
            classify_p2(&m, &caps).unwrap_err(),
            StarError::NotInImage { order: 2 }
        );
    }
}
