//! Order-by-order construction of the star product attached to a
//! polynomial Poisson structure `φ ∂x∧∂y`.
//!
//! The product has the form `m = fg + Σ_k ħ^k φ K_k` where every `K_k`
//! is a KTable. `K_1 = ∂x⊗∂y`; for `k >= 2`, `K_k` is the unique
//! solution of `b K_k = T_k` whose two partial Euler–Lagrange maps
//! vanish. Each solve is an exact sparse linear system over unknown
//! coefficients of `κ_ab`, with caps on the operator order and the
//! coefficient degree that are escalated on infeasibility.
//!
//! A Poisson structure that itself depends on ħ (`Φ = Σ ħ^q ψ_q`) is
//! handled by expanding each `K_k` in ħ: the solve map is ħ-linear, so
//! every ħ-coefficient of `T_k` is solved separately.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{binomial, falling_factorial, MultiIndex, Poly2, Rational};
use crate::diffop::{
    associator_pair, build_rhs_t, BiDiffOp, DiffOpError, KTable, TriDiffOp, TriKey,
};
use crate::linsys::{LinSys, SparseRow};
use crate::starprod::{PoissonSeries, StarProduct};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantizeError {
    #[error("order {k}: no admissible solution within caps (op order {max_op_order}, coefficient degree {max_coeff_degree})")]
    Infeasible {
        k: usize,
        max_op_order: u32,
        max_coeff_degree: u32,
    },
    #[error("order {k}: solution is not unique (kernel dimension {kernel_dim})")]
    NonUniqueSolution { k: usize, kernel_dim: usize },
    #[error(transparent)]
    DiffOp(#[from] DiffOpError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizeConfig {
    /// Truncation order `N`: the product is computed mod ħ^(N+1).
    pub order: usize,
    /// Initial cap on `a` and `b` in `κ_ab`; default `2k`.
    pub max_op_order: Option<u32>,
    /// Initial cap on the total degree of each `κ_ab`; default is the
    /// maximal coefficient degree of `T_k` plus `deg φ + 2`.
    pub max_coeff_degree: Option<u32>,
    /// Number of cap doublings tried before reporting `Infeasible`.
    pub escalation_steps: u32,
}

impl QuantizeConfig {
    pub fn new(order: usize) -> Self {
        QuantizeConfig {
            order,
            max_op_order: None,
            max_coeff_degree: None,
            escalation_steps: 3,
        }
    }
}

/// Bookkeeping for one exact solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub k: usize,
    /// ħ-power of the right-hand side piece (0 for ħ-independent φ).
    pub h_power: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    pub max_op_order: u32,
    pub max_coeff_degree: u32,
    pub escalations: u32,
}

#[derive(Debug, Clone)]
pub struct Quantization {
    pub poisson: PoissonSeries,
    /// `k_tables[k-1][p]` is the ħ^p coefficient of `K_k`, for
    /// `p = 0..=N-k`.
    pub k_tables: Vec<Vec<KTable>>,
    pub product: StarProduct,
    pub solves: Vec<SolveReport>,
}

impl Quantization {
    /// `K_k` for an ħ-independent φ (the ħ^0 coefficient).
    pub fn k_table(&self, k: usize) -> &KTable {
        &self.k_tables[k - 1][0]
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum RowKey {
    Cochain(TriKey, MultiIndex),
    ElX(u32, MultiIndex),
    ElY(u32, MultiIndex),
}

fn signed(n: num_bigint::BigInt, negative: bool) -> Rational {
    let r = Rational::from_integer(n);
    if negative {
        -r
    } else {
        r
    }
}

fn attempt(
    rhs: &TriDiffOp,
    op_cap: u32,
    deg_cap: u32,
) -> (Option<KTable>, usize, usize, usize, usize) {
    let monos: Vec<MultiIndex> = MultiIndex::up_to_degree(deg_cap).collect();
    let mut cols: Vec<(u32, u32, MultiIndex)> = Vec::new();
    for a in 1..=op_cap {
        for b in 1..=op_cap {
            for mu in &monos {
                cols.push((a, b, *mu));
            }
        }
    }
    let mut rows: BTreeMap<RowKey, (SparseRow, Rational)> = BTreeMap::new();
    let mut entry = |key: RowKey, col: usize, v: Rational| {
        let row = rows
            .entry(key)
            .or_insert_with(|| (SparseRow::new(), Rational::zero()));
        *row.0.entry(col).or_insert_with(Rational::zero) += v;
    };
    for (col, &(a, b, mu)) in cols.iter().enumerate() {
        for l in 1..b {
            let key = (
                MultiIndex::new(a, 0),
                MultiIndex::new(0, l),
                MultiIndex::new(0, b - l),
            );
            entry(
                RowKey::Cochain(key, mu),
                col,
                Rational::from_integer(binomial(b, l)),
            );
        }
        for j in 1..a {
            let key = (
                MultiIndex::new(j, 0),
                MultiIndex::new(a - j, 0),
                MultiIndex::new(0, b),
            );
            entry(
                RowKey::Cochain(key, mu),
                col,
                -Rational::from_integer(binomial(a, j)),
            );
        }
        if mu.x + 1 >= a {
            let nu = MultiIndex::new(mu.x + 1 - a, mu.y);
            entry(
                RowKey::ElX(b, nu),
                col,
                signed(falling_factorial(mu.x, a - 1), a % 2 == 0),
            );
        }
        if mu.y + 1 >= b {
            let nu = MultiIndex::new(mu.x, mu.y + 1 - b);
            entry(
                RowKey::ElY(a, nu),
                col,
                signed(falling_factorial(mu.y, b - 1), b % 2 == 0),
            );
        }
    }
    for (key, c) in rhs.terms() {
        for (m, v) in c.terms() {
            let row = rows
                .entry(RowKey::Cochain(*key, *m))
                .or_insert_with(|| (SparseRow::new(), Rational::zero()));
            row.1 += v;
        }
    }
    let mut sys = LinSys::new(cols.len());
    for (_, (row, r)) in rows {
        sys.push(row, r);
    }
    let sol = sys.solve();
    let stats = (cols.len(), sys.nrows(), sol.rank, sol.kernel_dim);
    if !sol.is_consistent() {
        return (None, stats.0, stats.1, stats.2, stats.3);
    }
    let mut k = KTable::zero();
    for ((a, b, mu), v) in cols.iter().zip(sol.values) {
        if !v.is_zero() {
            k.add_term(*a, *b, Poly2::monomial(v, mu.x, mu.y));
        }
    }
    (Some(k), stats.0, stats.1, stats.2, stats.3)
}

/// Solves `b K = rhs` for a KTable `K` with vanishing Euler–Lagrange maps.
///
/// `phi_degree` enters the default coefficient-degree cap.
pub fn solve_cochain(
    rhs: &TriDiffOp,
    k: usize,
    phi_degree: u32,
    cfg: &QuantizeConfig,
) -> Result<(KTable, SolveReport), QuantizeError> {
    let mut op_cap = cfg.max_op_order.unwrap_or(2 * k as u32).max(1);
    let mut deg_cap = cfg
        .max_coeff_degree
        .unwrap_or_else(|| rhs.max_coeff_degree().unwrap_or(0) + phi_degree + 2);
    for step in 0..=cfg.escalation_steps {
        let (sol, unknowns, equations, rank, kernel_dim) = attempt(rhs, op_cap, deg_cap);
        if let Some(table) = sol {
            if kernel_dim != 0 {
                return Err(QuantizeError::NonUniqueSolution { k, kernel_dim });
            }
            let report = SolveReport {
                k,
                h_power: 0,
                unknowns,
                equations,
                rank,
                kernel_dim,
                max_op_order: op_cap,
                max_coeff_degree: deg_cap,
                escalations: step,
            };
            return Ok((table, report));
        }
        if step < cfg.escalation_steps {
            op_cap *= 2;
            deg_cap = (deg_cap * 2).max(1);
        }
    }
    Err(QuantizeError::Infeasible {
        k,
        max_op_order: op_cap,
        max_coeff_degree: deg_cap,
    })
}

/// `K_k` for an ħ-independent φ, given `priors[i-1] = K_i` for `i < k`.
pub fn solve_order(
    phi: &Poly2,
    priors: &[KTable],
    k: usize,
    cfg: &QuantizeConfig,
) -> Result<KTable, QuantizeError> {
    let rhs = build_rhs_t(k, phi, priors)?;
    if rhs.is_zero() {
        return Ok(KTable::zero());
    }
    let (table, _) = solve_cochain(&rhs, k, phi.degree().unwrap_or(0), cfg)?;
    Ok(table)
}

pub fn quantize(phi: &Poly2, cfg: &QuantizeConfig) -> Result<Quantization, QuantizeError> {
    let psi = PoissonSeries::constant(phi.clone(), cfg.order.saturating_sub(1));
    quantize_series(&psi, cfg)
}

/// Quantizes `Φ = Σ_q ħ^q ψ_q`; only `ψ_q` with `q < N` contribute.
pub fn quantize_series(
    psi: &PoissonSeries,
    cfg: &QuantizeConfig,
) -> Result<Quantization, QuantizeError> {
    let n = cfg.order;
    let phi_degree = psi.max_degree().unwrap_or(0);
    let psis: Vec<Poly2> = (0..n).map(|q| psi.coeff(q)).collect();
    let mut tables: Vec<Vec<KTable>> = Vec::new();
    let mut solves = Vec::new();
    if n >= 1 {
        let mut k1 = vec![KTable::zero(); n];
        k1[0] = KTable::dx_dy();
        tables.push(k1);
    }
    // inner[j-1][q][r] = ψ_q K_j^(r) as a bidifferential operator
    let mut inner: Vec<Vec<Vec<BiDiffOp>>> = Vec::new();
    let push_inner = |inner: &mut Vec<Vec<Vec<BiDiffOp>>>, ks: &[KTable]| {
        let by_q = psis
            .iter()
            .map(|p| ks.iter().map(|t| t.to_bidiff().mul_poly(p)).collect())
            .collect();
        inner.push(by_q);
    };
    if n >= 1 {
        push_inner(&mut inner, &tables[0]);
    }
    for k in 2..=n {
        let mut ks = Vec::with_capacity(n - k + 1);
        for h in 0..=(n - k) {
            let mut rhs = TriDiffOp::zero();
            for i in 1..k {
                let j = k - i;
                for p in 0..=h {
                    let outer = &tables[i - 1][p];
                    if outer.is_zero() {
                        continue;
                    }
                    let outer = outer.to_bidiff();
                    for q in 0..=(h - p) {
                        let r = h - p - q;
                        let e = &inner[j - 1][q][r];
                        if !e.is_zero() {
                            rhs = rhs.add(&associator_pair(&outer, e));
                        }
                    }
                }
            }
            if rhs.is_zero() {
                ks.push(KTable::zero());
                continue;
            }
            let (table, mut report) = solve_cochain(&rhs, k, phi_degree, cfg)?;
            report.h_power = h;
            solves.push(report);
            ks.push(table);
        }
        push_inner(&mut inner, &ks);
        tables.push(ks);
    }

    let mut orders = Vec::with_capacity(n);
    for total in 1..=n {
        let mut m = BiDiffOp::zero();
        for k in 1..=total {
            for p in 0..=(total - k) {
                let q = total - k - p;
                m = m.add(&inner[k - 1][q][p]);
            }
        }
        orders.push(m);
    }
    Ok(Quantization {
        poisson: psi.truncate(n.saturating_sub(1)),
        k_tables: tables,
        product: StarProduct::new(orders),
        solves,
    })
}

/// `(c^k / k!) ∂x^k ⊗ ∂y^k`, the order-k table for constant φ = c.
pub fn constant_phi_table(c: &Rational, k: u32) -> KTable {
    let mut fact = Rational::one();
    for i in 1..=k {
        fact *= Rational::from_integer(i.into());
    }
    let coeff = num_traits::pow(c.clone(), (k - 1) as usize) / fact;
    KTable::from_terms([((k, k), Poly2::constant(coeff))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::certify::{associativity_counterexample, coboundary_matches};
    use crate::diffop::{euler_lagrange, hochschild_b_ktable, in_admissible_class, Axis};

    fn order_two_closed_form(phi: &Poly2) -> KTable {
        let h = rat(1, 2);
        KTable::from_terms([
            ((1, 1), phi.dx().dy().scale(&h)),
            ((2, 1), phi.dy().scale(&h)),
            ((1, 2), phi.dx().scale(&h)),
            ((2, 2), phi.scale(&h)),
        ])
    }

    #[test]
    fn order_two_matches_hand_solution() {
        let cfg = QuantizeConfig::new(2);
        for phi in [
            Poly2::one(),
            Poly2::x() * Poly2::y(),
            Poly2::x().pow(3) + Poly2::y().pow(2) * Poly2::x(),
        ] {
            let k2 = solve_order(&phi, &[KTable::dx_dy()], 2, &cfg).unwrap();
            assert_eq!(k2, order_two_closed_form(&phi), "phi = {phi}");
        }
        let k2 = solve_order(&Poly2::one(), &[KTable::dx_dy()], 2, &cfg).unwrap();
        assert_eq!(
            k2,
            KTable::from_terms([((2, 2), Poly2::constant(rat(1, 2)))])
        );
    }

    #[test]
    fn order_two_hand_solution_is_a_certified_solution() {
        // independent check of the frozen table: b(φK_2) = φT_2 by evaluation
        let phi = Poly2::x() * Poly2::y() + Poly2::y();
        let k2 = order_two_closed_form(&phi);
        let t2 = build_rhs_t(2, &phi, &[KTable::dx_dy()]).unwrap();
        assert!(coboundary_matches(
            &k2.to_bidiff().mul_poly(&phi),
            &t2.mul_poly(&phi),
            4
        ));
        assert_eq!(hochschild_b_ktable(&k2), t2);
    }

    #[test]
    fn zero_phi_is_pointwise() {
        let q = quantize(&Poly2::zero(), &QuantizeConfig::new(3)).unwrap();
        assert!(q.product.orders().iter().all(BiDiffOp::is_zero));
        assert!(q.solves.is_empty());
    }

    #[test]
    fn constant_phi_gives_normal_ordered_exponential() {
        let c = rat(-3, 2);
        let q = quantize(&Poly2::constant(c.clone()), &QuantizeConfig::new(4)).unwrap();
        for k in 1..=4u32 {
            let expected = constant_phi_table(&c, k).mul_poly(&Poly2::constant(c.clone()));
            assert_eq!(q.product.order_op(k as usize), &expected.to_bidiff());
        }
    }

    #[test]
    fn solutions_are_admissible_and_unique() {
        let phi = Poly2::x().pow(2) * Poly2::y() - Poly2::y().scale(&rat(3, 1));
        let q = quantize(&phi, &QuantizeConfig::new(3)).unwrap();
        for k in 2..=3 {
            assert!(in_admissible_class(q.k_table(k)));
        }
        assert!(q.solves.iter().all(|s| s.kernel_dim == 0));
        let broken = q.k_table(2).add(&KTable::dx_dy());
        assert!(!euler_lagrange(&broken, Axis::X)
            .values()
            .all(Poly2::is_zero));
        assert!(associativity_counterexample(q.product.orders(), 3).is_none());
    }

    #[test]
    fn caps_too_small_escalate_or_fail() {
        let mut cfg = QuantizeConfig::new(3);
        cfg.max_op_order = Some(1);
        cfg.max_coeff_degree = Some(0);
        cfg.escalation_steps = 0;
        let err = quantize(&Poly2::x(), &cfg).unwrap_err();
        assert!(matches!(err, QuantizeError::Infeasible { k: 2, .. }));
        cfg.escalation_steps = 2;
        let q = quantize(&Poly2::x(), &cfg).unwrap();
        assert!(q.solves.iter().any(|s| s.escalations > 0));
    }

    #[test]
    fn missing_prior_is_reported() {
        let err = solve_order(&Poly2::x(), &[], 2, &QuantizeConfig::new(2)).unwrap_err();
        assert_eq!(
            err,
            QuantizeError::DiffOp(DiffOpError::MissingPriorOrder(2))
        );
    }
}
