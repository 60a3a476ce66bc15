//! The commutator `(1/ħ) ad x` of a polarized star product, the operator
//! `S` with `(1/ħ) ad x = φ ∂y (1 + S ∘ ∂y)`, the density `f` solving
//! `φ (1 + ∂y ∘ S) f = 1`, and the primitive `τ = -S f` with
//! `f = 1/φ + ∂y τ`. The 2-form is `Ω = f dx∧dy`.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::algebra::{AlgebraError, HSeries, LocalizedFn, MultiIndex, Poly2, Ring};
use crate::certify::monomials_up_to;
use crate::quantize::{quantize, QuantizeConfig, QuantizeError};
use crate::starprod::{extract_poisson_p3, StarProduct};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BerezinError {
    #[error("product is not in the polarized class")]
    NotNormalized,
    #[error("product has no orders beyond the pointwise product")]
    TooShort,
    #[error("leading Poisson coefficient is {found}, expected {expected}")]
    PhiMismatch { expected: String, found: String },
    #[error("commutator check failed on {0}")]
    CommutatorMismatch(String),
    #[error("commutator does not start with φ∂y")]
    LeadingTerm,
    #[error("no finite-order S reproduces the commutator at ħ^{h_power}")]
    IntegrationObstruction { h_power: usize },
    #[error("φ must be nonzero")]
    ZeroPhi,
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
}

impl From<AlgebraError> for BerezinError {
    fn from(_: AlgebraError) -> Self {
        BerezinError::ZeroPhi
    }
}

fn dy_n(f: &LocalizedFn, n: u32) -> LocalizedFn {
    (0..n).fold(f.clone(), |acc, _| acc.dy())
}

/// `Σ_b w_b(x, y; ħ) ∂y^b` with coefficients in the φ-localized ring,
/// truncated at ħ^order.
#[derive(Clone, Debug, PartialEq)]
pub struct YOpSeries {
    order: usize,
    phi: Arc<Poly2>,
    terms: BTreeMap<u32, HSeries<LocalizedFn>>,
}

impl YOpSeries {
    pub fn zero(order: usize, phi: Arc<Poly2>) -> Self {
        YOpSeries {
            order,
            phi,
            terms: BTreeMap::new(),
        }
    }

    /// Builds from `per_h[h][b]`, the ħ^h coefficient of `∂y^b`.
    pub fn from_orders(phi: Arc<Poly2>, per_h: &[BTreeMap<u32, LocalizedFn>]) -> Self {
        let order = per_h.len().saturating_sub(1);
        let zero = LocalizedFn::from_poly(Poly2::zero(), phi.clone()).expect("nonzero φ");
        let bs: std::collections::BTreeSet<u32> =
            per_h.iter().flat_map(|m| m.keys().copied()).collect();
        let mut terms = BTreeMap::new();
        for b in bs {
            let coeffs: Vec<LocalizedFn> = per_h
                .iter()
                .map(|m| m.get(&b).cloned().unwrap_or_else(|| zero.clone()))
                .collect();
            let s = HSeries::new(order, coeffs, &zero);
            if !s.is_zero() {
                terms.insert(b, s);
            }
        }
        YOpSeries { order, phi, terms }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn phi(&self) -> &Arc<Poly2> {
        &self.phi
    }

    pub fn terms(&self) -> &BTreeMap<u32, HSeries<LocalizedFn>> {
        &self.terms
    }

    fn zero_fn(&self) -> LocalizedFn {
        LocalizedFn::from_poly(Poly2::zero(), self.phi.clone()).expect("nonzero φ")
    }

    pub fn coeff(&self, b: u32, h: usize) -> LocalizedFn {
        match self.terms.get(&b) {
            Some(s) if h <= self.order => s.coeff(h).clone(),
            _ => self.zero_fn(),
        }
    }

    /// The ħ^h coefficient as a map `b -> w_b`.
    pub fn at(&self, h: usize) -> BTreeMap<u32, LocalizedFn> {
        self.terms
            .iter()
            .filter(|(_, s)| !s.coeff(h).is_zero())
            .map(|(b, s)| (*b, s.coeff(h).clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn apply(&self, g: &HSeries<LocalizedFn>) -> HSeries<LocalizedFn> {
        let n = self.order.min(g.order());
        let mut out = vec![self.zero_fn(); n + 1];
        for (b, w) in &self.terms {
            for j in 0..=n {
                let dg = dy_n(g.coeff(j), *b);
                if dg.is_zero() {
                    continue;
                }
                for i in 0..=(n - j) {
                    out[i + j] = out[i + j].add(&w.coeff(i).mul(&dg));
                }
            }
        }
        HSeries::new(n, out, &self.zero_fn())
    }

    pub fn apply_poly(&self, g: &Poly2) -> HSeries<LocalizedFn> {
        let g = LocalizedFn::from_poly(g.clone(), self.phi.clone()).expect("nonzero φ");
        self.apply(&HSeries::constant(self.order, g))
    }
}

#[derive(Clone, Debug)]
pub struct BerezinData {
    pub phi: Arc<Poly2>,
    /// `(1/ħ) ad x`.
    pub ad_x: YOpSeries,
    pub s: YOpSeries,
    pub f: HSeries<LocalizedFn>,
    pub tau: HSeries<LocalizedFn>,
}

impl BerezinData {
    pub fn order(&self) -> usize {
        self.f.order()
    }

    /// Coefficient of `Ω = f dx∧dy`.
    pub fn omega(&self) -> &HSeries<LocalizedFn> {
        &self.f
    }
}

/// `(1/ħ)(x ⋆ g - g ⋆ x)` as an operator in `g`, read off the `∂x ⊗ ∂y^b`
/// entries of each order and cross-checked against the star commutator.
pub fn ad_x(m: &StarProduct, phi: &Poly2) -> Result<YOpSeries, BerezinError> {
    if !m.spq_membership() {
        return Err(BerezinError::NotNormalized);
    }
    if m.order() == 0 {
        return Err(BerezinError::TooShort);
    }
    if phi.is_zero() {
        return Err(BerezinError::ZeroPhi);
    }
    let found = extract_poisson_p3(m).coeff(0);
    if &found != phi {
        return Err(BerezinError::PhiMismatch {
            expected: phi.to_string(),
            found: found.to_string(),
        });
    }
    let phi_rc = Arc::new(phi.clone());
    let mut per_h = Vec::with_capacity(m.order());
    for mk in m.orders() {
        let mut row = BTreeMap::new();
        for ((a, b), c) in mk.terms() {
            if *a == MultiIndex::X {
                row.insert(b.y, LocalizedFn::from_poly(c.clone(), phi_rc.clone())?);
            }
        }
        per_h.push(row);
    }
    let w = YOpSeries::from_orders(phi_rc.clone(), &per_h);

    let x = Poly2::x();
    for g in monomials_up_to(3) {
        let got = w.apply_poly(&g);
        for (k, mk) in m.orders().iter().enumerate() {
            let expected = &mk.apply(&x, &g) - &mk.apply(&g, &x);
            if got.coeff(k) != &LocalizedFn::from_poly(expected, phi_rc.clone())? {
                return Err(BerezinError::CommutatorMismatch(g.to_string()));
            }
        }
    }
    Ok(w)
}

/// The finite-order `S = Σ_j s_j ∂y^j` with `φ ∂y (1 + S ∘ ∂y) = W`.
///
/// Writing `W/φ - ∂y = Σ_b v_b ∂y^b`, the identity reads
/// `v_b = ∂y s_(b-1) + s_(b-2)`. It is solved from the highest `b`
/// downwards; the equation `v_1 = ∂y s_0` is then a consistency check.
pub fn extract_s(w: &YOpSeries, phi: &Poly2) -> Result<YOpSeries, BerezinError> {
    if phi.is_zero() {
        return Err(BerezinError::ZeroPhi);
    }
    let phi_rc = w.phi().clone();
    let inv = LocalizedFn::inverse_phi(phi_rc.clone())?;
    let mut per_h = Vec::with_capacity(w.order() + 1);
    for h in 0..=w.order() {
        let mut v: BTreeMap<u32, LocalizedFn> = BTreeMap::new();
        for (b, c) in w.at(h) {
            v.insert(b, c.mul(&inv));
        }
        if h == 0 {
            let one = inv.one_like();
            let e = v.entry(1).or_insert_with(|| inv.zero_like());
            *e = e.sub(&one);
            v.retain(|_, c| !c.is_zero());
        }
        let zero = inv.zero_like();
        let get = |b: u32| v.get(&b).cloned().unwrap_or_else(|| zero.clone());
        let mut s: BTreeMap<u32, LocalizedFn> = BTreeMap::new();
        if let Some(&top) = v.keys().next_back() {
            if top < 2 {
                return Err(BerezinError::IntegrationObstruction { h_power: h });
            }
            let mut cur = get(top);
            let mut j = top - 2;
            loop {
                if !cur.is_zero() {
                    s.insert(j, cur.clone());
                }
                if j == 0 {
                    break;
                }
                cur = get(j + 1).sub(&cur.dy());
                j -= 1;
            }
            let s0 = s.get(&0).cloned().unwrap_or_else(|| zero.clone());
            if s0.dy() != get(1) {
                return Err(BerezinError::IntegrationObstruction { h_power: h });
            }
        }
        if h == 0 && !s.is_empty() {
            return Err(BerezinError::LeadingTerm);
        }
        per_h.push(s);
    }
    Ok(YOpSeries::from_orders(phi_rc, &per_h))
}

/// Solves `f = 1/φ - ∂y(S f)` order by order and sets `τ = -S f`.
pub fn density_f(
    phi: &Poly2,
    s: &YOpSeries,
    order: usize,
) -> Result<(HSeries<LocalizedFn>, HSeries<LocalizedFn>), BerezinError> {
    if phi.is_zero() {
        return Err(BerezinError::ZeroPhi);
    }
    let n = order.min(s.order());
    let inv = LocalizedFn::inverse_phi(s.phi().clone())?;
    let zero = inv.zero_like();
    let mut f = vec![inv.clone()];
    let mut tau = vec![zero.clone()];
    for k in 1..=n {
        let mut sf = zero.clone();
        for p in 1..=k {
            for (b, c) in s.at(p) {
                sf = sf.add(&c.mul(&dy_n(&f[k - p], b)));
            }
        }
        let t = sf.neg();
        f.push(t.dy());
        tau.push(t);
    }
    Ok((HSeries::new(n, f, &zero), HSeries::new(n, tau, &zero)))
}

/// Quantizes `φ` one order beyond `order` and runs the whole pipeline, so
/// that `S`, `f` and `τ` are exact mod ħ^(order+1).
pub fn berezin(phi: &Poly2, order: usize) -> Result<BerezinData, BerezinError> {
    if phi.is_zero() {
        return Err(BerezinError::ZeroPhi);
    }
    let q = quantize(phi, &QuantizeConfig::new(order + 1))?;
    let w = ad_x(&q.product, phi)?;
    let s = extract_s(&w, phi)?;
    let (f, tau) = density_f(phi, &s, order)?;
    Ok(BerezinData {
        phi: w.phi().clone(),
        ad_x: w,
        s,
        f,
        tau,
    })
}

/// `φ (1 + ∂y ∘ S) f = 1` mod ħ^(N+1).
pub fn verify_density(data: &BerezinData) -> bool {
    let sf = data.s.apply(&data.f);
    let one = data.f.coeff(0).one_like();
    (0..=data.order()).all(|k| {
        let lhs = data.f.coeff(k).add(&sf.coeff(k).dy()).mul_poly(&data.phi);
        let rhs = if k == 0 { one.clone() } else { one.zero_like() };
        lhs == rhs
    })
}

/// `f_0 = 1/φ` and `f_k = ∂y τ_k` for `k >= 1`, with `τ = -S f`.
pub fn verify_exactness(data: &BerezinData) -> bool {
    let Ok(inv) = LocalizedFn::inverse_phi(data.phi.clone()) else {
        return false;
    };
    let minus_sf = data.s.apply(&data.f);
    data.f.coeff(0) == &inv
        && data.tau.coeff(0).is_zero()
        && (1..=data.order()).all(|k| {
            data.f.coeff(k) == &data.tau.coeff(k).dy()
                && data.tau.coeff(k) == &minus_sf.coeff(k).neg()
        })
}

/// `φ ∂y (1 + S ∘ ∂y)` equals `(1/ħ) ad x` coefficientwise, and `S = O(ħ)`.
pub fn verify_s(data: &BerezinData) -> bool {
    let (w, s) = (&data.ad_x, &data.s);
    if !s.at(0).is_empty() {
        return false;
    }
    let n = w.order().min(s.order());
    let zero = w.zero_fn();
    (0..=n).all(|h| {
        let sh = s.at(h);
        let get = |b: u32| sh.get(&b).cloned().unwrap_or_else(|| zero.clone());
        let top = sh
            .keys()
            .next_back()
            .map_or(1, |b| b + 2)
            .max(w.at(h).keys().next_back().copied().unwrap_or(0));
        (1..=top).all(|b| {
            let mut v = if b >= 2 {
                get(b - 1).dy().add(&get(b - 2))
            } else {
                get(0).dy()
            };
            if h == 0 && b == 1 {
                v = v.add(&zero.one_like());
            }
            v.mul_poly(&data.phi) == w.coeff(b, h)
        })
    })
}
