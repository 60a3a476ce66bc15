//! Fits order `k+1` of the quantization against linear combinations of
//! Lie-derivative words
//!
//! `Σ_{i_1..i_{k+1}} X_{i_1} X_{i_2} ⋯ X_{i_{k+1}} f · Y_{i_1} Y_{i_ρ(2)} ⋯ Y_{i_ρ(k+1)} g`,
//!
//! one universal coefficient per permutation `ρ` of the last `k` slots,
//! where `φ = Σ_i ξ_i η_i` is split into monomials with `X_i = ξ_i ∂x`
//! and `Y_i = η_i ∂y`. Permuting the `X` word as well adds nothing: the
//! sum over all index tuples only sees the relative permutation.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::{MultiIndex, Poly2, Rational};
use crate::diffop::{BiDiffOp, BiKey, DiffOp};
use crate::linsys::{LinSys, SparseRow};
use crate::quantize::{quantize, QuantizeConfig, QuantizeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FitStatus {
    Unique,
    UnderDetermined { kernel_dim: usize },
    NotRepresentable,
}

impl FitStatus {
    pub fn is_consistent(&self) -> bool {
        !matches!(self, FitStatus::NotRepresentable)
    }

    pub fn name(&self) -> &'static str {
        match self {
            FitStatus::Unique => "unique",
            FitStatus::UnderDetermined { .. } => "underdetermined",
            FitStatus::NotRepresentable => "not_representable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FitReport {
    pub k: usize,
    pub samples: Vec<Poly2>,
    /// `words[w]` is the permutation `ρ` of `0..k`, applied to slots `2..=k+1`.
    pub words: Vec<Vec<usize>>,
    /// A particular solution (free coefficients set to zero).
    pub coefficients: Vec<Rational>,
    pub status: FitStatus,
    pub equations: usize,
    pub rank: usize,
    /// `m_{k+1} - Σ_w λ_w M_w` per sample; all zero when consistent.
    pub residuals: Vec<BiDiffOp>,
}

impl FitReport {
    /// `"X1X2X3 ⊗ Y1Y3Y2"`-style label of a word.
    pub fn word_label(&self, w: usize) -> String {
        let xs: String = (1..=self.k + 1).map(|i| format!("X{i}")).collect();
        let ys: String = std::iter::once(1)
            .chain(self.words[w].iter().map(|r| r + 2))
            .map(|i| format!("Y{i}"))
            .collect();
        format!("{xs} ⊗ {ys}")
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn split(phi: &Poly2) -> Vec<(DiffOp, DiffOp)> {
    phi.terms()
        .map(|(m, c)| {
            let xi = Poly2::monomial(c.clone(), m.x, 0);
            let eta = Poly2::monomial(Rational::from_integer(1.into()), 0, m.y);
            (
                DiffOp::from_terms([(MultiIndex::X, xi)]),
                DiffOp::from_terms([(MultiIndex::Y, eta)]),
            )
        })
        .collect()
}

fn word(fields: &[&DiffOp]) -> DiffOp {
    fields
        .iter()
        .fold(DiffOp::identity(), |acc, f| acc.compose(f))
}

fn tensor(a: &DiffOp, b: &DiffOp) -> BiDiffOp {
    let mut out = BiDiffOp::zero();
    for (alpha, ca) in a.terms() {
        for (beta, cb) in b.terms() {
            out.add_term((*alpha, *beta), ca * cb);
        }
    }
    out
}

/// `M_ρ` for every word, for one sample.
fn word_operators(phi: &Poly2, k: usize, words: &[Vec<usize>]) -> Vec<BiDiffOp> {
    let parts = split(phi);
    let r = parts.len();
    let mut out = vec![BiDiffOp::zero(); words.len()];
    if r == 0 {
        return out;
    }
    let slots = k + 1;
    let mut tuple = vec![0usize; slots];
    loop {
        let xs: Vec<&DiffOp> = tuple.iter().map(|&i| &parts[i].0).collect();
        let a = word(&xs);
        for (w, rho) in words.iter().enumerate() {
            let mut ys = vec![&parts[tuple[0]].1];
            ys.extend(rho.iter().map(|&j| &parts[tuple[j + 1]].1));
            out[w] = out[w].add(&tensor(&a, &word(&ys)));
        }
        // next tuple in [r]^slots
        let mut pos = slots;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            tuple[pos] += 1;
            if tuple[pos] < r {
                break;
            }
            tuple[pos] = 0;
        }
    }
}

pub fn fit_lie_words(
    samples: &[Poly2],
    k: usize,
    cfg: &QuantizeConfig,
) -> Result<FitReport, QuantizeError> {
    let words = permutations(k);
    let mut targets = Vec::with_capacity(samples.len());
    let mut ops = Vec::with_capacity(samples.len());
    let mut rows: BTreeMap<(usize, BiKey, MultiIndex), (SparseRow, Rational)> = BTreeMap::new();
    for (s, phi) in samples.iter().enumerate() {
        let q = quantize(
            phi,
            &QuantizeConfig {
                order: k + 1,
                ..cfg.clone()
            },
        )?;
        let target = q.product.order_op(k + 1).clone();
        let m = word_operators(phi, k, &words);
        for (w, op) in m.iter().enumerate() {
            for (key, c) in op.terms() {
                for (mono, v) in c.terms() {
                    let row = rows
                        .entry((s, *key, *mono))
                        .or_insert_with(|| (SparseRow::new(), Rational::zero()));
                    *row.0.entry(w).or_insert_with(Rational::zero) += v;
                }
            }
        }
        for (key, c) in target.terms() {
            for (mono, v) in c.terms() {
                let row = rows
                    .entry((s, *key, *mono))
                    .or_insert_with(|| (SparseRow::new(), Rational::zero()));
                row.1 += v;
            }
        }
        targets.push(target);
        ops.push(m);
    }
    let mut sys = LinSys::new(words.len());
    for (_, (row, rhs)) in rows {
        sys.push(row, rhs);
    }
    let sol = sys.solve();
    let residuals: Vec<BiDiffOp> = targets
        .iter()
        .zip(&ops)
        .map(|(t, m)| {
            m.iter()
                .zip(&sol.values)
                .fold(t.clone(), |acc, (op, l)| acc.sub(&op.scale(l)))
        })
        .collect();
    let status = if !sol.is_consistent() {
        FitStatus::NotRepresentable
    } else if sol.kernel_dim > 0 {
        FitStatus::UnderDetermined {
            kernel_dim: sol.kernel_dim,
        }
    } else {
        FitStatus::Unique
    };
    Ok(FitReport {
        k,
        samples: samples.to_vec(),
        words,
        coefficients: sol.values,
        status,
        equations: sys.nrows(),
        rank: sol.rank,
        residuals,
    })
}
