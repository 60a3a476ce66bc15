use std::collections::BTreeMap;

use super::{BiDiffOp, DiffOpError, KTable, TriDiffOp};
use crate::algebra::{binomial, MultiIndex, Poly2, Rational};

/// Hochschild coboundary of a 2-cochain:
/// `(bD)(f,g,h) = f D(g,h) - D(fg,h) + D(f,gh) - D(f,g) h`.
pub fn hochschild_b(d: &BiDiffOp) -> TriDiffOp {
    let z = MultiIndex::ZERO;
    let mut out = TriDiffOp::zero();
    for ((alpha, beta), c) in d.terms() {
        out.add_term((z, *alpha, *beta), c.clone());
        for mu in alpha.below() {
            let rest = alpha.checked_sub(mu).expect("mu <= alpha");
            let w = Rational::from_integer(alpha.binomial(mu));
            out.add_term((mu, rest, *beta), -c.scale(&w));
        }
        for nu in beta.below() {
            let rest = beta.checked_sub(nu).expect("nu <= beta");
            let w = Rational::from_integer(beta.binomial(nu));
            out.add_term((*alpha, nu, rest), c.scale(&w));
        }
        out.add_term((*alpha, *beta, z), -c.clone());
    }
    out
}

/// Closed form of `b` on a KTable: for each `κ_ab`,
/// `Σ_{l=1}^{b-1} C(b,l) f^(a,0) g^(0,l) h^(0,b-l) - Σ_{j=1}^{a-1} C(a,j) f^(j,0) g^(a-j,0) h^(0,b)`.
pub fn hochschild_b_ktable(k: &KTable) -> TriDiffOp {
    let mut out = TriDiffOp::zero();
    for ((a, b), c) in k.terms() {
        let (a, b) = (*a, *b);
        for l in 1..b {
            let w = Rational::from_integer(binomial(b, l));
            out.add_term(
                (
                    MultiIndex::new(a, 0),
                    MultiIndex::new(0, l),
                    MultiIndex::new(0, b - l),
                ),
                c.scale(&w),
            );
        }
        for j in 1..a {
            let w = Rational::from_integer(binomial(a, j));
            out.add_term(
                (
                    MultiIndex::new(j, 0),
                    MultiIndex::new(a - j, 0),
                    MultiIndex::new(0, b),
                ),
                -c.scale(&w),
            );
        }
    }
    out
}

/// `outer(inner(f,g),h) - outer(f,inner(g,h))`.
pub(crate) fn associator_pair(outer: &BiDiffOp, inner: &BiDiffOp) -> TriDiffOp {
    outer.compose_first(inner).sub(&outer.compose_second(inner))
}

/// Right-hand side of the order-`k` equation `b K_k = T_k`:
/// `T_k = Σ_{i+j=k; i,j>=1} [K_i(φ K_j(f,g), h) - K_i(f, φ K_j(g,h))]`.
///
/// `priors[i - 1]` holds `K_i`.
pub fn build_rhs_t(k: usize, phi: &Poly2, priors: &[KTable]) -> Result<TriDiffOp, DiffOpError> {
    if k < 2 || priors.len() < k - 1 {
        return Err(DiffOpError::MissingPriorOrder(k));
    }
    let mut out = TriDiffOp::zero();
    if phi.is_zero() {
        return Ok(out);
    }
    for i in 1..k {
        let j = k - i;
        let outer = priors[i - 1].to_bidiff();
        let inner = priors[j - 1].to_bidiff().mul_poly(phi);
        out = out.add(&associator_pair(&outer, &inner));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Partial Euler–Lagrange functional of a KTable.
///
/// Axis `X`: for each `b`, `Σ_a (-1)^(a-1) ∂x^(a-1) κ_ab`; axis `Y`: for
/// each `a`, `Σ_b (-1)^(b-1) ∂y^(b-1) κ_ab`. Keys are the indices
/// present in the table; values may be zero.
pub fn euler_lagrange(k: &KTable, axis: Axis) -> BTreeMap<u32, Poly2> {
    let mut out: BTreeMap<u32, Poly2> = BTreeMap::new();
    for ((a, b), c) in k.terms() {
        let (active, passive) = match axis {
            Axis::X => (*a, *b),
            Axis::Y => (*b, *a),
        };
        let d = match axis {
            Axis::X => MultiIndex::new(active - 1, 0),
            Axis::Y => MultiIndex::new(0, active - 1),
        };
        let mut term = c.derivative(d);
        if active % 2 == 0 {
            term = -term;
        }
        *out.entry(passive).or_default() += &term;
    }
    out
}

/// True iff both Euler–Lagrange maps vanish identically.
pub fn in_admissible_class(k: &KTable) -> bool {
    [Axis::X, Axis::Y]
        .iter()
        .all(|ax| euler_lagrange(k, *ax).values().all(Poly2::is_zero))
}
