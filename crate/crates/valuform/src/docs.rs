//! JSON documents. Rationals travel as strings (`"3/2"`), polynomials as
//! strings in the ring's variable names.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use valuform_core::blowup::PresentedAlgebra;
use valuform_core::models::ModelScheme;
use valuform_core::monoid::{AffineMonoid, MonoidPair};
use valuform_core::pipeline::{Certificate, CertificateKind, RecordSpec, TowerRecord};
use valuform_core::poly::{fmt_rat, parse_rat, Ideal, Limits, Polynomial, RationalPoint, Ring};
use valuform_core::polyhedral::HeightedFan;
use valuform_core::valuation::MonomialValuation;

use crate::error::CliError;

pub const TOWER_VERSION: u32 = 1;

/// Deserializes with the JSON path of the first offending field.
pub fn from_value<T: DeserializeOwned>(v: &Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v)
        .map_err(|e| CliError::Schema { path: e.path().to_string(), message: e.inner().to_string() })
}

pub type PointDoc = BTreeMap<String, String>;

pub fn point_doc(p: &RationalPoint) -> PointDoc {
    p.coords.iter().map(|(k, v)| (k.clone(), fmt_rat(v))).collect()
}

pub fn parse_point(p: &PointDoc) -> Result<RationalPoint, CliError> {
    let mut out = RationalPoint::default();
    for (k, v) in p {
        out.set(k, parse_rat(v)?);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<String>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<PointDoc>,
}

impl AlgebraDoc {
    pub fn build(&self, limits: &Limits) -> Result<PresentedAlgebra, CliError> {
        let ring = Ring::with_limits(self.vars.iter().cloned(), self.pi.as_deref(), limits.clone())?;
        let mut alg = PresentedAlgebra::new(Ideal::parse(&ring, &self.relations)?);
        if let Some(p) = &self.point {
            alg = alg.with_point(parse_point(p)?);
        }
        Ok(alg)
    }

    /// Canonical form: relations as the reduced basis.
    pub fn of(alg: &PresentedAlgebra) -> Result<Self, CliError> {
        Ok(AlgebraDoc {
            vars: alg.ring().vars().to_vec(),
            pi: alg.ring().pi_name().map(str::to_string),
            relations: alg.relations.fmt_canonical()?,
            point: alg.point.as_ref().map(point_doc),
        })
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub generators: Vec<Vec<i64>>,
    pub lambda: Vec<i64>,
}

impl PairDoc {
    pub fn build(&self) -> Result<MonoidPair, CliError> {
        let q = AffineMonoid::new(self.lambda.len(), self.generators.clone())?;
        Ok(MonoidPair::new(q, self.lambda.clone())?)
    }

    pub fn of(p: &MonoidPair) -> Self {
        PairDoc { generators: p.q.generators().to_vec(), lambda: p.lambda1.clone() }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub algebra: AlgebraDoc,
    pub pair: PairDoc,
    /// Images of the generators of `Q`.
    pub chart: Vec<String>,
}

impl ModelDoc {
    pub fn build(&self, limits: &Limits) -> Result<ModelScheme, CliError> {
        let alg = self.algebra.build(limits)?;
        let chart = alg.ring().parse_all(&self.chart)?;
        Ok(ModelScheme::new(alg, self.pair.build()?, chart)?)
    }

    pub fn of(m: &ModelScheme) -> Result<Self, CliError> {
        Ok(ModelDoc {
            algebra: AlgebraDoc::of(&m.algebra)?,
            pair: PairDoc::of(&m.pair),
            chart: m.algebra.ring().fmt_polys(&m.chart),
        })
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ValuationDoc {
    pub algebra: AlgebraDoc,
    /// One row per level, one entry per variable.
    pub weights: Vec<Vec<String>>,
}

impl ValuationDoc {
    pub fn build(&self, limits: &Limits) -> Result<MonomialValuation, CliError> {
        let alg = self.algebra.build(limits)?;
        let w = self
            .weights
            .iter()
            .map(|r| r.iter().map(|x| parse_rat(x)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MonomialValuation::new(alg, w)?)
    }

    pub fn of(v: &MonomialValuation) -> Result<Self, CliError> {
        Ok(ValuationDoc {
            algebra: AlgebraDoc::of(v.chart())?,
            weights: v.weights().iter().map(|r| r.iter().map(fmt_rat).collect()).collect(),
        })
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FanDoc {
    pub d: i64,
    pub cones: Vec<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lfunc: Option<Vec<i64>>,
    /// Heights of a convex lifting, `[ray, "value"]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifting: Option<Vec<(Vec<i64>, String)>>,
}

impl FanDoc {
    pub fn of(f: &HeightedFan) -> Self {
        FanDoc {
            d: f.d,
            cones: f.cones.clone(),
            lfunc: Some(f.lfunc.clone()),
            lifting: f.lifting.as_ref().map(|l| l.iter().map(|(r, h)| (r.clone(), fmt_rat(h))).collect()),
        }
    }

    pub fn build(&self, pair: &MonoidPair) -> Result<HeightedFan, CliError> {
        let lfunc = match &self.lfunc {
            Some(l) => l.clone(),
            None => valuform_core::polyhedral::dual_cone(pair)?.1,
        };
        let lifting = match &self.lifting {
            Some(l) => {
                Some(l.iter().map(|(r, h)| Ok((r.clone(), parse_rat(h)?))).collect::<Result<Vec<_>, CliError>>()?)
            }
            None => None,
        };
        Ok(HeightedFan { d: self.d, lfunc, cones: self.cones.clone(), lifting })
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub kind: String,
    pub chart: AlgebraDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<PointDoc>,
    #[serde(default)]
    pub center: Vec<String>,
    #[serde(default)]
    pub parameters: Vec<String>,
    #[serde(default)]
    pub boundary: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<i64>,
}

impl CertificateDoc {
    pub fn of(c: &Certificate) -> Result<Self, CliError> {
        let ring = c.chart.ring();
        Ok(CertificateDoc {
            kind: c.kind.as_str().into(),
            chart: AlgebraDoc::of(&c.chart)?,
            point: c.point.as_ref().map(point_doc),
            center: ring.fmt_polys(&c.center),
            parameters: ring.fmt_polys(&c.parameters),
            boundary: ring.fmt_polys(&c.boundary),
            d: c.d,
        })
    }

    pub fn build(&self, limits: &Limits) -> Result<Certificate, CliError> {
        let chart = self.chart.build(limits)?;
        let ring = chart.ring().clone();
        let parse = |v: &[String]| -> Result<Vec<Polynomial>, CliError> { Ok(ring.parse_all(v)?) };
        Ok(Certificate {
            kind: CertificateKind::parse(&self.kind)?,
            point: self.point.as_ref().map(parse_point).transpose()?,
            center: parse(&self.center)?,
            parameters: parse(&self.parameters)?,
            boundary: parse(&self.boundary)?,
            d: self.d,
            chart,
        })
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RecordDoc {
    Blowup {
        step: String,
        center: Vec<String>,
        index: usize,
        chart_vars: Vec<String>,
        chart_relations: Vec<String>,
        /// Informational: boundary and valuation center on the new chart.
        #[serde(default)]
        boundary: Vec<Vec<String>>,
        #[serde(default)]
        valuation_center: Vec<String>,
    },
    Subdivision {
        step: String,
        pair: PairDoc,
        chart_monomials: Vec<String>,
        d: i64,
        cones: Vec<Vec<Vec<i64>>>,
        cone: usize,
        chart_vars: Vec<String>,
        chart_relations: Vec<String>,
    },
}

impl RecordDoc {
    pub fn of(r: &TowerRecord) -> Result<Self, CliError> {
        Ok(match (r.spec()?, r) {
            (RecordSpec::Blowup { step, center, index, chart_vars, chart_relations }, TowerRecord::Blowup(b)) => {
                RecordDoc::Blowup {
                    step,
                    center,
                    index,
                    chart_vars,
                    chart_relations,
                    boundary: b.boundary.iter().map(|i| i.fmt_gens()).collect(),
                    valuation_center: b.center.clone(),
                }
            }
            (
                RecordSpec::Subdivision {
                    step,
                    generators,
                    lambda,
                    chart_monomials,
                    d,
                    cones,
                    cone,
                    chart_vars,
                    chart_relations,
                },
                _,
            ) => RecordDoc::Subdivision {
                step,
                pair: PairDoc { generators, lambda },
                chart_monomials,
                d,
                cones,
                cone,
                chart_vars,
                chart_relations,
            },
            _ => unreachable!("record spec mirrors its record"),
        })
    }

    pub fn spec(&self) -> RecordSpec {
        match self.clone() {
            RecordDoc::Blowup { step, center, index, chart_vars, chart_relations, .. } => {
                RecordSpec::Blowup { step, center, index, chart_vars, chart_relations }
            }
            RecordDoc::Subdivision { step, pair, chart_monomials, d, cones, cone, chart_vars, chart_relations } => {
                RecordSpec::Subdivision {
                    step,
                    generators: pair.generators,
                    lambda: pair.lambda,
                    chart_monomials,
                    d,
                    cones,
                    cone,
                    chart_vars,
                    chart_relations,
                }
            }
        }
    }
}

/// A tower with its source and final certificate; input of `replay`.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TowerDoc {
    pub version: u32,
    pub driver: String,
    pub oracle: String,
    pub source: AlgebraDoc,
    #[serde(default)]
    pub boundary: Vec<Vec<String>>,
    pub records: Vec<RecordDoc>,
    pub certificate: CertificateDoc,
}

impl TowerDoc {
    pub fn new(
        driver: &str,
        oracle: &str,
        source: &PresentedAlgebra,
        boundary: &[Ideal],
        tower: &[TowerRecord],
        cert: &Certificate,
    ) -> Result<Self, CliError> {
        Ok(TowerDoc {
            version: TOWER_VERSION,
            driver: driver.into(),
            oracle: oracle.into(),
            source: AlgebraDoc::of(source)?,
            boundary: boundary.iter().map(|i| i.fmt_gens()).collect(),
            records: tower.iter().map(RecordDoc::of).collect::<Result<_, _>>()?,
            certificate: CertificateDoc::of(cert)?,
        })
    }
}
