//! Evaluation-based certificates.
//!
//! These checks never use symbolic operator composition: they apply
//! operators to explicit monomials with plain polynomial arithmetic, so
//! they serve as an independent route against the symbolic results.

use crate::algebra::{MultiIndex, Poly2, Rational};
use crate::diffop::{BiDiffOp, TriDiffOp};

/// `x^i y^j` for all `i + j <= degree`, ascending graded-lex.
pub fn monomials_up_to(degree: u32) -> Vec<Poly2> {
    MultiIndex::up_to_degree(degree)
        .map(|m| Poly2::monomial(Rational::from_integer(1.into()), m.x, m.y))
        .collect()
}

/// `f D(g,h) - D(fg,h) + D(f,gh) - D(f,g) h`, evaluated pointwise.
pub fn coboundary_value(d: &BiDiffOp, f: &Poly2, g: &Poly2, h: &Poly2) -> Poly2 {
    let mut v = f * &d.apply(g, h);
    v -= &d.apply(&(f * g), h);
    v += &d.apply(f, &(g * h));
    v -= &(&d.apply(f, g) * h);
    v
}

/// Coboundary of a 3-cochain evaluated on a quadruple.
pub fn coboundary3_value(t: &TriDiffOp, f: &Poly2, g: &Poly2, h: &Poly2, k: &Poly2) -> Poly2 {
    let mut v = f * &t.apply(g, h, k);
    v -= &t.apply(&(f * g), h, k);
    v += &t.apply(f, &(g * h), k);
    v -= &t.apply(f, g, &(h * k));
    v += &(&t.apply(f, g, h) * k);
    v
}

/// True iff `t(f,g,h) == coboundary_value(d, f, g, h)` on every monomial
/// triple of degree at most `degree`.
pub fn coboundary_matches(d: &BiDiffOp, t: &TriDiffOp, degree: u32) -> bool {
    let monos = monomials_up_to(degree);
    monos.iter().all(|f| {
        monos.iter().all(|g| {
            monos
                .iter()
                .all(|h| t.apply(f, g, h) == coboundary_value(d, f, g, h))
        })
    })
}

/// Star product of explicit ħ-coefficient lists, truncated at `order`.
/// `orders[k-1]` is `m_k`; `m_0` is the pointwise product.
pub fn star_values(orders: &[BiDiffOp], order: usize, f: &[Poly2], g: &[Poly2]) -> Vec<Poly2> {
    let mut out = vec![Poly2::zero(); order + 1];
    for (i, fi) in f.iter().enumerate().take(order + 1) {
        for (j, gj) in g.iter().enumerate() {
            if i + j > order {
                break;
            }
            out[i + j] += &(fi * gj);
            for (k, mk) in orders.iter().enumerate() {
                let n = i + j + k + 1;
                if n > order {
                    break;
                }
                out[n] += &mk.apply(fi, gj);
            }
        }
    }
    out
}

/// First monomial triple `(f, g, h)` of degree at most `degree` on which
/// `(f⋆g)⋆h - f⋆(g⋆h)` is nonzero mod ħ^(N+1), if any.
pub fn associativity_counterexample(
    orders: &[BiDiffOp],
    degree: u32,
) -> Option<(Poly2, Poly2, Poly2)> {
    let n = orders.len();
    let monos = monomials_up_to(degree);
    for f in &monos {
        for g in &monos {
            let fg = star_values(orders, n, std::slice::from_ref(f), std::slice::from_ref(g));
            for h in &monos {
                let gh = star_values(orders, n, std::slice::from_ref(g), std::slice::from_ref(h));
                let left = star_values(orders, n, &fg, std::slice::from_ref(h));
                let right = star_values(orders, n, std::slice::from_ref(f), &gh);
                if left != right {
                    return Some((f.clone(), g.clone(), h.clone()));
                }
            }
        }
    }
    None
}
