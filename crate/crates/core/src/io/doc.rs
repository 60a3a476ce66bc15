//! JSON documents. Every document carries a `kind` tag; coefficients are
//! printed polynomials; terms follow the in-memory map order (graded-lex
//! on multi-indices, compared slot by slot) and orders ascend in `k`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{HSeries, LocalizedFn, MultiIndex, Poly2};
use crate::berezin::{BerezinData, YOpSeries};
use crate::diffop::{BiDiffOp, DiffOp};
use crate::lie::{FitReport, FitStatus};
use crate::starprod::{GaugeOp, PoissonSeries, StarProduct};

use super::parse::{parse_poly, ParseError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad polynomial {text:?}: {source}")]
    Poly { text: String, source: ParseError },
    #[error("no {0} document in input")]
    Missing(&'static str),
    #[error("invalid document: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    StarProduct(StarProductDoc),
    GaugeOp(GaugeOpDoc),
    PoissonSeries(PoissonSeriesDoc),
    BerezinData(BerezinDoc),
    FitReport(FitReportDoc),
    DefectReport(DefectReportDoc),
    HSeries(HSeriesDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::StarProduct(_) => "star_product",
            Document::GaugeOp(_) => "gauge_op",
            Document::PoissonSeries(_) => "poisson_series",
            Document::BerezinData(_) => "berezin_data",
            Document::FitReport(_) => "fit_report",
            Document::DefectReport(_) => "defect_report",
            Document::HSeries(_) => "h_series",
        }
    }

    /// Pretty JSON followed by a newline.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

/// All documents in a stream of concatenated JSON values.
pub fn read_documents(text: &str) -> Result<Vec<Document>, IoError> {
    serde_json::Deserializer::from_str(text)
        .into_iter::<Document>()
        .map(|d| d.map_err(IoError::from))
        .collect()
}

fn poly(text: &str) -> Result<Poly2, IoError> {
    parse_poly(text).map_err(|source| IoError::Poly {
        text: text.to_string(),
        source,
    })
}

fn idx(m: MultiIndex) -> [u32; 2] {
    [m.x, m.y]
}

fn mi(a: [u32; 2]) -> MultiIndex {
    MultiIndex::new(a[0], a[1])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiTermDoc {
    pub df: [u32; 2],
    pub dg: [u32; 2],
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarOrderDoc {
    pub k: usize,
    pub ops: Vec<BiTermDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarProductDoc {
    pub h_order: usize,
    pub terms: Vec<StarOrderDoc>,
}

fn bi_terms(op: &BiDiffOp) -> Vec<BiTermDoc> {
    op.terms()
        .iter()
        .map(|((a, b), c)| BiTermDoc {
            df: idx(*a),
            dg: idx(*b),
            coeff: c.to_string(),
        })
        .collect()
}

impl StarProductDoc {
    pub fn from_product(m: &StarProduct) -> Self {
        StarProductDoc {
            h_order: m.order(),
            terms: m
                .orders()
                .iter()
                .enumerate()
                .map(|(i, op)| StarOrderDoc {
                    k: i + 1,
                    ops: bi_terms(op),
                })
                .collect(),
        }
    }

    pub fn to_product(&self) -> Result<StarProduct, IoError> {
        let mut orders = vec![BiDiffOp::zero(); self.h_order];
        for t in &self.terms {
            if t.k == 0 || t.k > self.h_order {
                return Err(IoError::Invalid(format!(
                    "order k = {} outside 1..={}",
                    t.k, self.h_order
                )));
            }
            for op in &t.ops {
                orders[t.k - 1].add_term((mi(op.df), mi(op.dg)), poly(&op.coeff)?);
            }
        }
        Ok(StarProduct::new(orders))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnaryTermDoc {
    pub d: [u32; 2],
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeOrderDoc {
    pub k: usize,
    pub ops: Vec<UnaryTermDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeOpDoc {
    pub h_order: usize,
    pub terms: Vec<GaugeOrderDoc>,
}

impl GaugeOpDoc {
    pub fn from_gauge(u: &GaugeOp) -> Self {
        GaugeOpDoc {
            h_order: u.order(),
            terms: u
                .orders()
                .iter()
                .enumerate()
                .map(|(i, op)| GaugeOrderDoc {
                    k: i + 1,
                    ops: op
                        .terms()
                        .iter()
                        .map(|(g, c)| UnaryTermDoc {
                            d: idx(*g),
                            coeff: c.to_string(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_gauge(&self) -> Result<GaugeOp, IoError> {
        let mut orders = vec![DiffOp::zero(); self.h_order];
        for t in &self.terms {
            if t.k == 0 || t.k > self.h_order {
                return Err(IoError::Invalid(format!(
                    "order k = {} outside 1..={}",
                    t.k, self.h_order
                )));
            }
            for op in &t.ops {
                orders[t.k - 1].add_term(mi(op.d), poly(&op.coeff)?);
            }
        }
        Ok(GaugeOp::new(orders))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoissonTermDoc {
    pub i: usize,
    pub phi: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoissonSeriesDoc {
    pub terms: Vec<PoissonTermDoc>,
}

impl PoissonSeriesDoc {
    /// Zero coefficients are omitted.
    pub fn from_series(psi: &PoissonSeries) -> Self {
        PoissonSeriesDoc {
            terms: psi
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| PoissonTermDoc {
                    i,
                    phi: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_series(&self) -> Result<PoissonSeries, IoError> {
        let len = self.terms.iter().map(|t| t.i + 1).max().unwrap_or(0);
        let mut coeffs = vec![Poly2::zero(); len];
        for t in &self.terms {
            coeffs[t.i] += &poly(&t.phi)?;
        }
        Ok(PoissonSeries::new(coeffs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HSeriesDoc {
    pub h_order: usize,
    pub coeffs: Vec<String>,
}

impl HSeriesDoc {
    pub fn from_series(s: &HSeries<Poly2>) -> Self {
        HSeriesDoc {
            h_order: s.order(),
            coeffs: s.coeffs().iter().map(Poly2::to_string).collect(),
        }
    }

    pub fn to_series(&self) -> Result<HSeries<Poly2>, IoError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| poly(c))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HSeries::new(self.h_order, coeffs, &Poly2::zero()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriTermDoc {
    pub df: [u32; 2],
    pub dg: [u32; 2],
    pub dh: [u32; 2],
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectDoc {
    pub k: usize,
    pub ops: Vec<TriTermDoc>,
}

/// Only nonzero defects are listed; an empty list means associative.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectReportDoc {
    pub h_order: usize,
    pub defects: Vec<DefectDoc>,
}

impl DefectReportDoc {
    pub fn from_product(m: &StarProduct) -> Self {
        DefectReportDoc {
            h_order: m.order(),
            defects: m
                .assoc_defect()
                .into_iter()
                .filter(|(_, d)| !d.is_zero())
                .map(|(k, d)| DefectDoc {
                    k,
                    ops: d
                        .terms()
                        .iter()
                        .map(|((a, b, c), v)| TriTermDoc {
                            df: idx(*a),
                            dg: idx(*b),
                            dh: idx(*c),
                            coeff: v.to_string(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalizedDoc {
    pub num: String,
    pub phi_pow: u32,
}

impl LocalizedDoc {
    fn from_fn(f: &LocalizedFn) -> Self {
        LocalizedDoc {
            num: f.numerator().to_string(),
            phi_pow: f.phi_power(),
        }
    }

    fn to_fn(&self, phi: &Arc<Poly2>) -> Result<LocalizedFn, IoError> {
        LocalizedFn::new(poly(&self.num)?, self.phi_pow, phi.clone())
            .map_err(|e| IoError::Invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YTermDoc {
    pub dy: u32,
    #[serde(flatten)]
    pub coeff: LocalizedDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YOrderDoc {
    pub i: usize,
    pub ops: Vec<YTermDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalarDoc {
    pub i: usize,
    #[serde(flatten)]
    pub value: LocalizedDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BerezinDoc {
    pub phi: String,
    pub h_order: usize,
    pub ad_x: Vec<YOrderDoc>,
    pub s: Vec<YOrderDoc>,
    pub f: Vec<ScalarDoc>,
    pub tau: Vec<ScalarDoc>,
}

fn y_orders(op: &YOpSeries) -> Vec<YOrderDoc> {
    (0..=op.order())
        .map(|i| YOrderDoc {
            i,
            ops: op
                .at(i)
                .iter()
                .map(|(b, c)| YTermDoc {
                    dy: *b,
                    coeff: LocalizedDoc::from_fn(c),
                })
                .collect(),
        })
        .collect()
}

fn scalars(s: &HSeries<LocalizedFn>) -> Vec<ScalarDoc> {
    s.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| ScalarDoc {
            i,
            value: LocalizedDoc::from_fn(c),
        })
        .collect()
}

impl BerezinDoc {
    pub fn from_data(d: &BerezinData) -> Self {
        BerezinDoc {
            phi: d.phi.to_string(),
            h_order: d.order(),
            ad_x: y_orders(&d.ad_x),
            s: y_orders(&d.s),
            f: scalars(&d.f),
            tau: scalars(&d.tau),
        }
    }

    /// `(φ, S, f, τ)` read back from the document.
    #[allow(clippy::type_complexity)]
    pub fn to_parts(
        &self,
    ) -> Result<
        (
            Arc<Poly2>,
            YOpSeries,
            HSeries<LocalizedFn>,
            HSeries<LocalizedFn>,
        ),
        IoError,
    > {
        let phi = Arc::new(poly(&self.phi)?);
        let zero = LocalizedFn::from_poly(Poly2::zero(), phi.clone())
            .map_err(|e| IoError::Invalid(e.to_string()))?;
        let per_h = self
            .s
            .iter()
            .map(|o| {
                o.ops
                    .iter()
                    .map(|t| Ok((t.dy, t.coeff.to_fn(&phi)?)))
                    .collect::<Result<_, IoError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let s = YOpSeries::from_orders(phi.clone(), &per_h);
        let read = |v: &[ScalarDoc]| -> Result<HSeries<LocalizedFn>, IoError> {
            let coeffs = v
                .iter()
                .map(|c| c.value.to_fn(&phi))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(HSeries::new(self.h_order, coeffs, &zero))
        };
        Ok((phi.clone(), s, read(&self.f)?, read(&self.tau)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordDoc {
    pub word: String,
    pub perm: Vec<usize>,
    pub coeff: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitReportDoc {
    pub k: usize,
    pub samples: Vec<String>,
    pub status: String,
    pub kernel_dim: usize,
    pub equations: usize,
    pub rank: usize,
    pub words: Vec<WordDoc>,
    /// Printed nonzero residual operators, one entry per failing sample.
    pub residuals: Vec<String>,
}

impl FitReportDoc {
    pub fn from_report(r: &FitReport) -> Self {
        let kernel_dim = match r.status {
            FitStatus::UnderDetermined { kernel_dim } => kernel_dim,
            _ => 0,
        };
        FitReportDoc {
            k: r.k,
            samples: r.samples.iter().map(Poly2::to_string).collect(),
            status: r.status.name().to_string(),
            kernel_dim,
            equations: r.equations,
            rank: r.rank,
            words: r
                .words
                .iter()
                .enumerate()
                .map(|(w, perm)| WordDoc {
                    word: r.word_label(w),
                    perm: perm.clone(),
                    coeff: r.coefficients[w].to_string(),
                })
                .collect(),
            residuals: r
                .residuals
                .iter()
                .zip(&r.samples)
                .filter(|(res, _)| !res.is_zero())
                .map(|(res, s)| format!("{s}: {res}"))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::berezin::berezin;
    use crate::quantize::{quantize, QuantizeConfig};
    use crate::starprod::{moyal_fixture, normalize, NormalizeConfig};

    fn round_trip(doc: Document) {
        let text = doc.to_text();
        let back = read_documents(&text).unwrap();
        assert_eq!(back, vec![doc]);
        assert_eq!(back[0].to_text(), text);
    }

    #[test]
    fn star_product_document() {
        let q = quantize(&Poly2::one(), &QuantizeConfig::new(3)).unwrap();
        let doc = StarProductDoc::from_product(&q.product);
        assert_eq!(
            doc.terms[2].ops,
            vec![BiTermDoc {
                df: [3, 0],
                dg: [0, 3],
                coeff: "1/6".into()
            }]
        );
        assert_eq!(doc.to_product().unwrap(), q.product);
        let m = moyal_fixture(&rat(-3, 2), 3);
        assert_eq!(StarProductDoc::from_product(&m).to_product().unwrap(), m);
        round_trip(Document::StarProduct(doc));
    }

    #[test]
    fn other_documents_round_trip() {
        let out = normalize(&moyal_fixture(&rat(1, 1), 2), &NormalizeConfig::default()).unwrap();
        let g = GaugeOpDoc::from_gauge(&out.gauge);
        assert_eq!(g.to_gauge().unwrap(), out.gauge);
        round_trip(Document::GaugeOp(g));

        let psi = PoissonSeries::new(vec![Poly2::x(), Poly2::zero(), Poly2::y()]);
        let p = PoissonSeriesDoc::from_series(&psi);
        assert_eq!(p.terms.iter().map(|t| t.i).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(p.to_series().unwrap(), psi);
        round_trip(Document::PoissonSeries(p));

        let m = StarProduct::new(vec![
            BiDiffOp::from_terms([((MultiIndex::X, MultiIndex::Y), Poly2::one())]),
            BiDiffOp::zero(),
        ]);
        let d = DefectReportDoc::from_product(&m);
        assert_eq!(d.defects.len(), 1);
        round_trip(Document::DefectReport(d));

        let s = m.star_mul(&Poly2::x(), &Poly2::y());
        let h = HSeriesDoc::from_series(&s);
        assert_eq!(h.to_series().unwrap(), s);
        round_trip(Document::HSeries(h));

        let data = berezin(&(Poly2::x() * Poly2::y()), 2).unwrap();
        let b = BerezinDoc::from_data(&data);
        let (phi, s, f, tau) = b.to_parts().unwrap();
        assert_eq!(
            (&*phi, &s, &f, &tau),
            (&*data.phi, &data.s, &data.f, &data.tau)
        );
        round_trip(Document::BerezinData(b));
    }

    #[test]
    fn malformed_input_is_reported() {
        assert!(matches!(
            read_documents("{\"kind\": \"nope\"}"),
            Err(IoError::Json(_))
        ));
        let bad = r#"{"kind":"poisson_series","terms":[{"i":0,"phi":"x y"}]}"#;
        let docs = read_documents(bad).unwrap();
        let Document::PoissonSeries(p) = &docs[0] else {
            panic!()
        };
        assert!(matches!(p.to_series(), Err(IoError::Poly { .. })));
        let bad = r#"{"kind":"star_product","h_order":1,"terms":[{"k":2,"ops":[]}]}"#;
        let Document::StarProduct(p) = &read_documents(bad).unwrap()[0] else {
            panic!()
        };
        assert!(matches!(p.to_product(), Err(IoError::Invalid(_))));
    }
}
