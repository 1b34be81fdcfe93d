//! Monomial valuations of finite height with values in `ℚ^h` under the
//! lexicographic order, on charts presented by binomial relations.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::blowup::{blowup_chart, ChartResult, PresentedAlgebra};
use crate::linalg::{rational_rank, smith_diagonal};
use crate::poly::{krull_dim, saturate, Ideal, Polynomial, Rat, RationalPoint, Ring};
use crate::{Error, Result};

/// `None` is `∞`, the value of `0`.
pub type Value = Option<Vec<Rat>>;

fn lex_positive(v: &[Rat]) -> bool {
    v.iter().find(|x| !x.is_zero()).map(|x| x.is_positive()).unwrap_or(false)
}

fn lex_nonneg(v: &[Rat]) -> bool {
    v.iter().find(|x| !x.is_zero()).map(|x| x.is_positive()).unwrap_or(true)
}

/// A weight valuation: variable `i` has value `column i` of `weights`.
#[derive(Clone, Debug)]
pub struct MonomialValuation {
    chart: PresentedAlgebra,
    /// `h` rows, one column per ring variable.
    weights: Vec<Vec<Rat>>,
}

impl MonomialValuation {
    pub fn new(chart: PresentedAlgebra, weights: Vec<Vec<Rat>>) -> Result<Self> {
        let n = chart.ring().nvars();
        if weights.iter().any(|r| r.len() != n) {
            return Err(Error::pre(format!("every weight row needs {n} entries")));
        }
        let v = MonomialValuation { chart, weights };
        for i in 0..n {
            let col = v.column(i);
            if !lex_nonneg(&col) {
                return Err(Error::pre(format!("variable {} has negative value", v.ring().var_name(i))));
            }
        }
        if let Some(p) = v.ring().pi() {
            if !lex_positive(&v.column(p)) {
                return Err(Error::pre("π must have positive value"));
            }
        }
        v.check_compatible()?;
        Ok(v)
    }

    /// Integer weights, one row per level.
    pub fn from_ints(chart: PresentedAlgebra, rows: &[Vec<i64>]) -> Result<Self> {
        let w = rows.iter().map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect()).collect();
        Self::new(chart, w)
    }

    pub fn chart(&self) -> &PresentedAlgebra {
        &self.chart
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.chart.ring()
    }

    pub fn weights(&self) -> &[Vec<Rat>] {
        &self.weights
    }

    pub fn nominal_height(&self) -> usize {
        self.weights.len()
    }

    pub fn column(&self, i: usize) -> Vec<Rat> {
        self.weights.iter().map(|r| r[i].clone()).collect()
    }

    pub fn monomial_value(&self, e: &[u32]) -> Vec<Rat> {
        self.weights
            .iter()
            .map(|r| r.iter().zip(e).fold(Rat::zero(), |acc, (w, &k)| acc + w * Rat::from_integer(k.into())))
            .collect()
    }

    /// Relations must be binomials `u^a − c·u^b` (or monomials) with
    /// `W·a = W·b`.
    fn check_compatible(&self) -> Result<()> {
        if self.chart.relations.is_zero_ideal() {
            return Ok(());
        }
        let basis = self.chart.relations.canonical()?;
        for g in &basis {
            let terms: Vec<_> = g.terms().collect();
            match terms.len() {
                1 => {}
                2 => {
                    if self.monomial_value(terms[0].0) != self.monomial_value(terms[1].0) {
                        return Err(Error::pre(format!(
                            "relation {} is not homogeneous for the weights",
                            self.ring().fmt_poly(g)
                        )));
                    }
                }
                _ => {
                    return Err(Error::pre(format!(
                        "relation {} is not a binomial; monomial weights need binomial relations",
                        self.ring().fmt_poly(g)
                    )))
                }
            }
        }
        Ok(())
    }

    /// Lexicographic minimum of `W·e` over the normal form of `f`.
    pub fn value(&self, f: &Polynomial) -> Result<Value> {
        if f.nvars() != self.ring().nvars() {
            return Err(Error::RingMismatch);
        }
        let nf = if self.chart.relations.is_zero_ideal() { f.clone() } else { self.chart.relations.reduce(f)? };
        Ok(nf.terms().map(|(e, _)| self.monomial_value(e)).min())
    }

    pub fn fmt_value(v: &Value) -> String {
        match v {
            None => "∞".into(),
            Some(x) => {
                let parts: Vec<String> = x.iter().map(crate::poly::fmt_rat).collect();
                format!("({})", parts.join(","))
            }
        }
    }

    /// Drops rows that are combinations of earlier rows; the order on
    /// values is unchanged.
    pub fn reduced(&self) -> MonomialValuation {
        let mut kept: Vec<Vec<Rat>> = Vec::new();
        for r in &self.weights {
            let mut trial = kept.clone();
            trial.push(r.clone());
            if rational_rank(&trial) == trial.len() {
                kept = trial;
            }
        }
        MonomialValuation { chart: self.chart.clone(), weights: kept }
    }
}

/// Height of the value group generated by the variables: the number of
/// jumps in its chain of convex subgroups, i.e. the rank of `W`.
pub fn effective_height(v: &MonomialValuation) -> usize {
    rational_rank(&v.weights)
}

#[derive(Clone, Debug)]
pub struct CompositionSplit {
    pub h0: usize,
    pub head: MonomialValuation,
    /// The residual valuation on the closure of the head's center.
    pub residual: MonomialValuation,
    /// Variables with positive head value (zero on the residual chart).
    pub dropped: Vec<usize>,
    /// Residual rows on the dropped variables.
    pub tail: Vec<Vec<Rat>>,
}

impl CompositionSplit {
    /// `v(u^e)` rebuilt from the head value and the residual value of the
    /// part of `u^e` in the kept variables.
    pub fn recompose(&self, e: &[u32]) -> Vec<Rat> {
        let mut kept = e.to_vec();
        let mut dropped = alloc::vec![0u32; e.len()];
        for &i in &self.dropped {
            dropped[i] = kept[i];
            kept[i] = 0;
        }
        let mut out = self.head.monomial_value(e);
        let res = self.residual.monomial_value(&kept);
        for (k, r) in res.iter().enumerate() {
            let t: Rat = self.tail[k].iter().zip(&dropped).map(|(w, &x)| w * Rat::from_integer(x.into())).sum();
            out.push(r + t);
        }
        out
    }
}

/// Splits `v` into a head of height `h0` and the residual valuation.
pub fn decompose(v: &MonomialValuation, h0: usize) -> Result<CompositionSplit> {
    let r = v.reduced();
    let h = r.weights.len();
    if h0 == 0 || h0 >= h {
        return Err(Error::pre(format!("split position {h0} outside 1..{h}")));
    }
    let n = v.ring().nvars();
    let head_rows = r.weights[..h0].to_vec();
    let head = MonomialValuation { chart: v.chart.clone(), weights: head_rows };
    let dropped: Vec<usize> = (0..n).filter(|&i| lex_positive(&head.column(i))).collect();
    let ring = v.ring();
    let residual_chart = v.chart.quotient(dropped.iter().map(|&i| ring.gen(i))).traced("closure of the head center");
    let rows: Vec<Vec<Rat>> = r.weights[h0..]
        .iter()
        .map(|row| {
            row.iter().enumerate().map(|(i, w)| if dropped.contains(&i) { Rat::zero() } else { w.clone() }).collect()
        })
        .collect();
    let tail: Vec<Vec<Rat>> = r.weights[h0..]
        .iter()
        .map(|row| {
            row.iter().enumerate().map(|(i, w)| if dropped.contains(&i) { w.clone() } else { Rat::zero() }).collect()
        })
        .collect();
    // the π column lives in the head; the residual chart is a closed fiber
    let residual = MonomialValuation { chart: residual_chart, weights: rows };
    residual.check_compatible()?;
    Ok(CompositionSplit { h0, head, residual, dropped, tail })
}

#[derive(Clone, Debug)]
pub struct CenterResult {
    pub ideal: Ideal,
    /// The variables (and `π`) generating the center.
    pub generators: Vec<usize>,
    /// True when the center is the marked closed point.
    pub closed: bool,
    pub dim: usize,
    pub prime_certified: bool,
}

/// Primality of `relations + (variables)` for binomial relations: the
/// ideal is saturated by the remaining variables and its binomials span a
/// saturated lattice.
fn certify_prime(ideal: &Ideal, zero_vars: &[usize]) -> Result<bool> {
    let ring = ideal.ring();
    if ideal.is_unit()? {
        return Ok(false);
    }
    let rest: Vec<usize> = (0..ring.nvars()).filter(|i| !zero_vars.contains(i)).collect();
    let prod = rest.iter().fold(ring.one(), |acc, &i| &acc * &ring.gen(i));
    let (sat, _) = saturate(ideal, &prod)?;
    if !sat.is_subset(ideal)? {
        return Ok(false);
    }
    let mut lattice: Vec<Vec<i64>> = Vec::new();
    for g in ideal.canonical()? {
        let terms: Vec<_> = g.terms().collect();
        match terms.len() {
            1 => {
                // a monomial in the basis must be a center variable
                let e = terms[0].0;
                let ones: Vec<usize> = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, _)| i).collect();
                if ones.len() != 1 || e[ones[0]] != 1 || !zero_vars.contains(&ones[0]) {
                    return Ok(false);
                }
            }
            2 => {
                let diff: Vec<i64> = terms[0].0.iter().zip(terms[1].0).map(|(a, b)| *a as i64 - *b as i64).collect();
                lattice.push(diff);
            }
            _ => return Ok(false),
        }
    }
    if lattice.is_empty() {
        return Ok(true);
    }
    Ok(smith_diagonal(&lattice)?.iter().all(|&d| d == 1 || d == 0))
}

/// The center: `π` and all variables of positive value (or zero in the chart).
pub fn center(v: &MonomialValuation) -> Result<CenterResult> {
    let ring = v.ring();
    let n = ring.nvars();
    let mut generators = Vec::new();
    for i in 0..n {
        if lex_positive(&v.column(i)) || v.chart.is_zero(&ring.gen(i))? {
            generators.push(i);
        }
    }
    let ideal = v.chart.ideal(generators.iter().map(|&i| ring.gen(i)));
    let prime = certify_prime(&ideal, &generators)?;
    if !prime {
        return Err(Error::cert(format!("center ({}) is not prime", ideal.fmt_canonical()?.join(", "))));
    }
    let dim = krull_dim(&ideal)?;
    let closed = match &v.chart.point {
        Some(p) => {
            let m = Ideal::new(ring.clone(), p.maximal_ideal(ring)?);
            m.same_as(&ideal)?
        }
        None => dim == 0 && generators.len() == n,
    };
    Ok(CenterResult { ideal, generators, closed, dim, prime_certified: prime })
}

/// The valuation read on a chart of a blowup: chart variables get the
/// values of the functions they stand for.
pub fn pull_back(v: &MonomialValuation, res: &ChartResult) -> Result<MonomialValuation> {
    if res.source.ring() != v.ring() {
        return Err(Error::RingMismatch);
    }
    let cring = res.ring();
    let m = cring.nvars();
    let fj = v.value(&res.center[res.index])?.ok_or_else(|| Error::pre("center generator has infinite value"))?;
    let mut cols: Vec<Option<Vec<Rat>>> = alloc::vec![None; m];
    for (i, t) in res.transforms.iter().enumerate() {
        if let Some(slot) = t.as_variable() {
            if i != res.index {
                let fi = v.value(&res.center[i])?.ok_or_else(|| Error::pre("center generator has infinite value"))?;
                cols[slot] = Some(fi.iter().zip(&fj).map(|(a, b)| a - b).collect());
            }
        }
    }
    for (src, img) in res.var_images.iter().enumerate() {
        if let Some(slot) = img.as_variable() {
            if cols[slot].is_none() {
                cols[slot] = Some(v.column(src));
            }
        }
    }
    let h = v.weights.len();
    let mut weights = alloc::vec![alloc::vec![Rat::zero(); m]; h];
    for (j, c) in cols.into_iter().enumerate() {
        let c = c.ok_or_else(|| Error::cert(format!("no value for chart variable {}", cring.var_name(j))))?;
        for k in 0..h {
            weights[k][j] = c[k].clone();
        }
    }
    MonomialValuation::new(res.chart.clone(), weights)
}

#[derive(Clone, Debug)]
pub struct LiftResult {
    pub index: usize,
    pub chart: ChartResult,
    pub valuation: MonomialValuation,
    pub center: CenterResult,
}

/// Index of the center generator of least value, ties to the least index.
pub fn choose_chart(v: &MonomialValuation, center_gens: &[Polynomial]) -> Result<usize> {
    let mut best: Option<(Vec<Rat>, usize)> = None;
    for (i, f) in center_gens.iter().enumerate() {
        let val = v.value(f)?.ok_or_else(|| Error::pre("center generator is zero in the chart"))?;
        if best.as_ref().map(|(b, _)| val < *b).unwrap_or(true) {
            best = Some((val, i));
        }
    }
    best.map(|b| b.1).ok_or_else(|| Error::pre("empty center"))
}

/// Lifts the center of `v` to the blowup along `center_gens`.
pub fn lift_center(v: &MonomialValuation, center_gens: &[Polynomial]) -> Result<LiftResult> {
    let index = choose_chart(v, center_gens)?;
    let chart = blowup_chart(&v.chart, center_gens, index)?;
    lift_through(v, chart)
}

/// Lifts `v` through a chart computed elsewhere and certifies that every
/// transform has nonnegative value there.
pub fn lift_through(v: &MonomialValuation, mut chart: ChartResult) -> Result<LiftResult> {
    let index = chart.index;
    if let Some(p) = &v.chart.point {
        chart.source.point = Some(p.clone());
    }
    let valuation = pull_back(v, &chart)?;
    for t in &chart.transforms {
        match valuation.value(t)? {
            Some(x) if !lex_nonneg(&x) => {
                return Err(Error::cert(format!("transform {} has negative value", chart.ring().fmt_poly(t))))
            }
            _ => {}
        }
    }
    let center = center(&valuation)?;
    Ok(LiftResult { index, chart, valuation, center })
}

/// The rational point cut out by a zero-dimensional center generated by
/// variables, if that is what it is.
pub fn center_point(c: &CenterResult, ring: &Ring) -> Option<RationalPoint> {
    (c.generators.len() == ring.nvars()).then(|| RationalPoint::origin(ring))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::from_integer(n.into())
    }

    fn sorted(i: &Ideal) -> Vec<String> {
        let mut v = i.fmt_canonical().unwrap();
        v.sort();
        v
    }

    fn cone() -> PresentedAlgebra {
        PresentedAlgebra::parse(&["x", "y", "z"], None, &["x*y - z^2"]).unwrap()
    }

    #[test]
    fn values() {
        let a = PresentedAlgebra::parse(&["x", "y"], None, &[] as &[&str]).unwrap();
        let v = MonomialValuation::from_ints(a.clone(), &[vec![1, 0]]).unwrap();
        assert_eq!(v.value(&a.parse_poly("x^2*y + x^3").unwrap()).unwrap(), Some(vec![r(2)]));
        let v = MonomialValuation::from_ints(a.clone(), &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(v.value(&a.parse_poly("x + y").unwrap()).unwrap(), Some(vec![r(0), r(1)]));
        assert_eq!(v.value(&a.parse_poly("x*y").unwrap()).unwrap(), Some(vec![r(1), r(1)]));
        assert_eq!(v.value(&a.ring().zero()).unwrap(), None);
    }

    #[test]
    fn heights() {
        let a = PresentedAlgebra::parse(&["x", "y"], None, &[] as &[&str]).unwrap();
        let h = |rows: &[Vec<i64>]| effective_height(&MonomialValuation::from_ints(a.clone(), rows).unwrap());
        assert_eq!(h(&[vec![1, 0], vec![2, 0]]), 1);
        assert_eq!(h(&[vec![1, 0], vec![0, 1]]), 2);
        assert_eq!(h(&[vec![0, 0]]), 0);
    }

    #[test]
    fn compatibility() {
        // w(x) = (2,0) does not respect x*y = z^2
        assert!(MonomialValuation::from_ints(cone(), &[vec![2, 0, 1], vec![0, 1, 0]]).is_err());
        assert!(MonomialValuation::from_ints(cone(), &[vec![2, 0, 1], vec![-1, 1, 0]]).is_ok());
    }

    #[test]
    fn centers() {
        let a = PresentedAlgebra::parse(&["x", "y"], None, &[] as &[&str]).unwrap();
        let v = MonomialValuation::from_ints(a, &[vec![1, 0]]).unwrap();
        let c = center(&v).unwrap();
        assert_eq!(c.ideal.fmt_canonical().unwrap(), ["x"]);
        assert!(!c.closed);

        let v = MonomialValuation::from_ints(cone(), &[vec![2, 0, 1]]).unwrap();
        let c = center(&v).unwrap();
        assert_eq!(sorted(&c.ideal), ["x", "z"]);
        assert_eq!(c.dim, 1);

        let v = MonomialValuation::from_ints(cone(), &[vec![2, 2, 2]]).unwrap();
        assert!(center(&v).unwrap().closed);
    }

    #[test]
    fn decomposition() {
        let v = MonomialValuation::from_ints(cone(), &[vec![2, 0, 1], vec![-1, 1, 0]]).unwrap();
        let s = decompose(&v, 1).unwrap();
        assert_eq!(s.dropped, vec![0, 2]);
        assert_eq!(sorted(&center(&s.head).unwrap().ideal), ["x", "z"]);
        assert_eq!(sorted(&center(&s.residual).unwrap().ideal), ["x", "y", "z"]);
        for e in [[1u32, 2, 3], [0, 5, 0], [3, 0, 1]] {
            assert_eq!(s.recompose(&e), v.monomial_value(&e));
        }
        assert!(decompose(&v, 2).is_err());
        assert!(center(&s.head).unwrap().ideal.is_subset(&center(&v).unwrap().ideal).unwrap());
    }

    #[test]
    fn lifting() {
        let a = PresentedAlgebra::parse(&["x", "y"], None, &[] as &[&str]).unwrap();
        let ring = a.ring().clone();
        let v = MonomialValuation::from_ints(a.clone(), &[vec![1, 2]]).unwrap();
        assert_eq!(choose_chart(&v, &[ring.gen(0), ring.gen(1)]).unwrap(), 0);
        let v = MonomialValuation::from_ints(a, &[vec![1, 1]]).unwrap();
        assert_eq!(choose_chart(&v, &[ring.gen(0), ring.gen(1)]).unwrap(), 0);

        // the cone blown up along (z, y): the y-chart, where x = z'^2*y
        let v = MonomialValuation::from_ints(cone(), &[vec![2, 0, 1], vec![-1, 1, 0]]).unwrap();
        let cr = cone().ring().clone();
        let l = lift_center(&v, &[cr.gen(2), cr.gen(1)]).unwrap();
        assert_eq!(l.index, 1);
        assert_eq!(l.chart.chart.relations.fmt_canonical().unwrap(), ["y*z'^2 - x"]);
        assert!(l.center.dim == 0 && l.center.generators.len() == 3);
        let again = center(&pull_back(&v, &l.chart).unwrap()).unwrap();
        assert!(again.ideal.same_as(&l.center.ideal).unwrap());
    }
}
