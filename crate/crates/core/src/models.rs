//! Standard semistable models, the `T_{π,m,r,l}` family, and the
//! log-smoothness fiber criterion on algebraic charts.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::blowup::{blowup_chart, PresentedAlgebra};
use crate::linalg::integer_rank;
use crate::monoid::{gp_invariants, AffineMonoid, MonoidPair};
use crate::poly::{
    exact_quotient, ideal_rel, krull_dim, smooth_at, Ideal, IdealRelation, Polynomial, Rat, RationalPoint,
    RelationVerdict, Ring,
};
use crate::{Error, Result};

/// A presented algebra with a monoid chart `q ↦ u^q`, given by one
/// monomial per generator of `Q`.
#[derive(Clone, Debug)]
pub struct ModelScheme {
    pub algebra: PresentedAlgebra,
    pub pair: MonoidPair,
    pub chart: Vec<Polynomial>,
}

impl ModelScheme {
    pub fn new(algebra: PresentedAlgebra, pair: MonoidPair, chart: Vec<Polynomial>) -> Result<Self> {
        if chart.len() != pair.q.generators().len() {
            return Err(Error::pre("one chart monomial per monoid generator"));
        }
        let m = ModelScheme { algebra, pair, chart };
        let pi = m.algebra.ring().pi_poly().ok_or_else(|| Error::pre("model needs a designated π"))?;
        if !m.algebra.is_zero(&(&m.u_lambda()? - &pi))? {
            return Err(Error::pre("u^λ(1) ≠ π in the algebra"));
        }
        if !m.algebra.is_pi_saturated()? {
            return Err(Error::pre("relations are not π-saturated"));
        }
        Ok(m)
    }

    /// `u^{λ(1)}` through a word for `λ(1)`.
    pub fn u_lambda(&self) -> Result<Polynomial> {
        let word = self.pair.lambda_word()?.ok_or_else(|| Error::pre("λ(1) not in Q"))?;
        Ok(self.monomial(&word))
    }

    /// `u^q` for `q = Σ word_i g_i`.
    pub fn monomial(&self, word: &[u64]) -> Polynomial {
        let one = Polynomial::constant(self.algebra.ring().nvars(), Rat::one());
        word.iter().zip(&self.chart).fold(one, |acc, (&k, u)| &acc * &u.pow(k as u32))
    }
}

fn product(ring: &Ring, items: impl IntoIterator<Item = Polynomial>) -> Polynomial {
    items.into_iter().fold(ring.one(), |acc, p| &acc * &p)
}

/// `ℚ[π][t_0..t_m]/(t_0⋯t_m − π)` with `Q = ℕ^{m+1}`, `λ(1) = Σ e_i`.
pub fn standard_semistable(m: usize) -> Result<ModelScheme> {
    let mut vars: Vec<String> = (0..=m).map(|i| format!("t{i}")).collect();
    vars.push("pi".into());
    let ring = Ring::new(vars, Some("pi"))?;
    let ts: Vec<Polynomial> = (0..=m).map(|i| ring.gen(i)).collect();
    let rel = &product(&ring, ts.iter().cloned()) - &ring.pi_poly().unwrap();
    let algebra = PresentedAlgebra::new(Ideal::new(ring.clone(), alloc::vec![rel])).traced(format!("S_(π,{m})"));
    ModelScheme::new(algebra, MonoidPair::semistable(m), ts)
}

/// `ℚ[π][t'_0..t'_m, v_1..v_r]/(t'_0⋯t'_m·v_1^d⋯v_r^d − π)` with `d = (m+1)l`.
pub fn t_model(m: usize, r: usize, l: usize) -> Result<ModelScheme> {
    if r == 0 || l == 0 {
        return Err(Error::pre("t_model needs r ≥ 1 and l ≥ 1"));
    }
    let d = (m + 1) * l;
    let mut vars: Vec<String> = (0..=m).map(|i| format!("t{i}'")).collect();
    vars.extend((1..=r).map(|j| format!("v{j}")));
    vars.push("pi".into());
    let ring = Ring::new(vars, Some("pi"))?;
    let gens: Vec<Polynomial> = (0..=m + r).map(|i| ring.gen(i)).collect();
    let rel = &product(&ring, gens.iter().enumerate().map(|(i, g)| if i <= m { g.clone() } else { g.pow(d as u32) }))
        - &ring.pi_poly().unwrap();
    let mut lambda = alloc::vec![1i64; m + 1];
    lambda.extend(core::iter::repeat_n(d as i64, r));
    let pair = MonoidPair::new(AffineMonoid::free(m + r + 1), lambda)?;
    let algebra =
        PresentedAlgebra::new(Ideal::new(ring.clone(), alloc::vec![rel])).traced(format!("T_(π,{m},{r},{l}), d = {d}"));
    ModelScheme::new(algebra, pair, gens)
}

#[derive(Clone, Debug)]
pub struct ToricVerdict {
    pub passed: bool,
    pub d: usize,
    /// Canonical relations of the computed chart.
    pub chart_relations: Vec<String>,
    pub expected: Vec<String>,
    pub relation: IdealRelation,
}

/// Blows up `S_{π,m} × 𝔸^r` along `(t_0, …, t_m, v_1^l⋯v_r^l)`, takes the
/// `v`-chart and compares it with `t_model(m, r, l)`.
pub fn toriclem_verify(m: usize, r: usize, l: usize) -> Result<ToricVerdict> {
    let mut vars: Vec<String> = (0..=m).map(|i| format!("t{i}")).collect();
    vars.extend((1..=r).map(|j| format!("v{j}")));
    vars.push("pi".into());
    let ring = Ring::new(vars, Some("pi"))?;
    let rel = &product(&ring, (0..=m).map(|i| ring.gen(i))) - &ring.pi_poly().unwrap();
    let source = PresentedAlgebra::new(Ideal::new(ring.clone(), alloc::vec![rel]));
    let mut center: Vec<Polynomial> = (0..=m).map(|i| ring.gen(i)).collect();
    center.push(product(&ring, (1..=r).map(|j| ring.gen(m + j).pow(l as u32))));
    let res = blowup_chart(&source, &center, m + 1)?;
    let expected_model = t_model(m, r, l)?;
    let chart_ring = res.ring();
    if chart_ring.vars() != expected_model.algebra.ring().vars() {
        return Err(Error::cert(format!(
            "chart variables {:?} differ from the model's {:?}",
            chart_ring.vars(),
            expected_model.algebra.ring().vars()
        )));
    }
    let expected_src = expected_model.algebra.relations.fmt_gens();
    let expected = Ideal::parse(chart_ring, &expected_src)?;
    let relation = ideal_rel(&res.chart.relations, &expected)?;
    Ok(ToricVerdict {
        passed: relation.verdict == RelationVerdict::Equal,
        d: (m + 1) * l,
        chart_relations: res.chart.relations.fmt_canonical()?,
        expected: expected_src,
        relation,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogSmoothVerdict {
    /// Generators of `Z` (relations, `π`, and the `u^q` vanishing at the point).
    pub stratum: Vec<Polynomial>,
    pub fiber_dim: usize,
    pub stratum_dim: usize,
    pub codim: usize,
    /// Rank of `Q^gp/P^gp`, after dropping generators that are units at the point.
    pub rank: usize,
    pub smooth: bool,
    /// `codim = rank` was observed.
    pub equality: bool,
    /// No generator outside `λ(P)` maps to a constant times a power of `π`.
    pub pi_powers_clean: bool,
    pub log_smooth: bool,
}

/// Stratum check shared by the monoid-chart and parameter criteria:
/// `monomials` vanish at `p`, `rank` is the expected codimension.
fn stratum_verdict(
    alg: &PresentedAlgebra,
    monomials: &[Polynomial],
    rank: usize,
    p: &RationalPoint,
) -> Result<LogSmoothVerdict> {
    let ring = alg.ring();
    let pi = ring.pi_poly().ok_or_else(|| Error::pre("no π designated"))?;
    if !p.on_closed_fiber(ring) {
        return Err(Error::pre("point is not on the closed fiber"));
    }
    let fiber = alg.ideal([pi.clone()]);
    let mut zg = alg.relations.gens().to_vec();
    zg.push(pi);
    zg.extend(monomials.iter().cloned());
    let z = Ideal::new(ring.clone(), zg);
    let fiber_dim = krull_dim(&fiber)?;
    let stratum_dim = krull_dim(&z)?;
    let sv = smooth_at(&z, p, stratum_dim)?;
    let codim = fiber_dim.saturating_sub(stratum_dim);
    let equality = codim == rank;
    Ok(LogSmoothVerdict {
        stratum: z.canonical()?,
        fiber_dim,
        stratum_dim,
        codim,
        rank,
        smooth: sv.regular,
        equality,
        pi_powers_clean: true,
        log_smooth: sv.regular && equality,
    })
}

/// Is `f ≡ c·π^k` in the algebra for some constant `c` and `k ≤ bound`?
fn is_pi_power(alg: &PresentedAlgebra, f: &Polynomial, bound: u32) -> Result<bool> {
    let pi = alg.ring().pi_poly().expect("π designated");
    let nf = alg.relations.reduce(f)?;
    if nf.is_zero() {
        return Ok(false);
    }
    for k in 0..=bound {
        let nk = alg.relations.reduce(&pi.pow(k))?;
        let Some((e, c)) = nk.as_monomial() else { continue };
        let d = nf.coeff(e);
        if !d.is_zero() && nf == nk.scale(&(d / c)) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The fiber criterion at a rational point of the closed fiber.
///
/// Generators with `u^q(p) ≠ 0` are units near `p`; they are dropped and
/// the rank is taken for the localized monoid.
pub fn logsmooth_check(model: &ModelScheme, p: &RationalPoint) -> Result<LogSmoothVerdict> {
    let ring = model.algebra.ring();
    let vals = p.values(ring)?;
    for u in &model.chart {
        if model.algebra.is_zero(u)? {
            return Err(Error::pre(format!("chart monomial {} is zero in the algebra", ring.fmt_poly(u))));
        }
    }
    let gens = model.pair.q.generators();
    let mut vanishing = Vec::new();
    let mut unit_gens: Vec<Vec<i64>> = Vec::new();
    for (g, u) in gens.iter().zip(&model.chart) {
        if u.eval(&vals).is_zero() {
            vanishing.push(u.clone());
        } else {
            unit_gens.push(g.clone());
        }
    }
    if unit_gens.iter().any(|g| g == &model.pair.lambda1) {
        return Err(Error::pre("π is a unit at the point"));
    }
    let inv = gp_invariants(&model.pair)?;
    let face_rank = integer_rank(&unit_gens);
    let rank = inv.rank.saturating_sub(face_rank);
    let mut v = stratum_verdict(&model.algebra, &vanishing, rank, p)?;

    // u^Q ∩ k° = π^P
    let lam = &model.pair.lambda1;
    let in_lambda_p = |g: &[i64]| {
        let k = lam.iter().zip(g).find(|(l, _)| **l != 0).map(|(l, x)| (*x, *l));
        match k {
            Some((x, l)) if x % l == 0 && x / l >= 0 => g.iter().zip(lam).all(|(a, b)| *a == (x / l) * b),
            _ => false,
        }
    };
    for (g, u) in gens.iter().zip(&model.chart) {
        if !in_lambda_p(g) && is_pi_power(&model.algebra, u, 4)? {
            v.pi_powers_clean = false;
        }
    }
    v.log_smooth = v.log_smooth && v.pi_powers_clean;
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct SemistableParamsVerdict {
    pub passed: bool,
    /// `t_0⋯t_m = u·π`.
    pub unit: Polynomial,
    pub twisted: bool,
    /// `1 ∈ (u) + m_p + relations`.
    pub invertible: bool,
    pub stratum_smooth: bool,
    pub codim: usize,
    pub m: usize,
    pub logsmooth: LogSmoothVerdict,
    /// `t_0/u, t_1, …` when `u` is a constant and normalization was asked for.
    pub normalized: Option<Vec<Polynomial>>,
}

/// Checks that `t̲` are (possibly twisted) semistable parameters at `p`.
pub fn semistable_params_check(
    alg: &PresentedAlgebra,
    t: &[Polynomial],
    p: &RationalPoint,
    normalize: bool,
) -> Result<SemistableParamsVerdict> {
    let ring = alg.ring();
    let pi = ring.pi_poly().ok_or_else(|| Error::pre("no π designated"))?;
    if t.is_empty() {
        return Err(Error::pre("at least one parameter is needed"));
    }
    let m = t.len() - 1;
    let prod = product(ring, t.iter().cloned());
    let unit = exact_quotient(&alg.relations, &prod, &pi)?
        .ok_or_else(|| Error::pre("the product of the parameters is not a multiple of π"))?;
    let unit = alg.relations.reduce(&unit)?;
    let twisted = !alg.is_zero(&(&unit - &ring.one()))?;
    let mut probe = alg.relations.gens().to_vec();
    probe.push(unit.clone());
    probe.extend(p.maximal_ideal(ring)?);
    let invertible = Ideal::new(ring.clone(), probe).is_unit()?;

    let normalized = if normalize {
        unit.as_constant().filter(|c| !c.is_zero()).map(|c| {
            let mut v = t.to_vec();
            v[0] = v[0].scale(&c.recip());
            v
        })
    } else {
        None
    };

    // For a strict or constant-twisted family the induced chart is a model
    // with Q = ℕ^{m+1}; otherwise only the stratum criterion applies.
    let params = normalized.clone().or_else(|| (!twisted).then(|| t.to_vec()));
    let logsmooth = match params {
        Some(ps) => {
            let model = ModelScheme::new(alg.clone(), MonoidPair::semistable(m), ps)?;
            logsmooth_check(&model, p)?
        }
        None => {
            let vals = p.values(ring)?;
            let vanishing: Vec<Polynomial> = t.iter().filter(|f| f.eval(&vals).is_zero()).cloned().collect();
            stratum_verdict(alg, &vanishing, vanishing.len().saturating_sub(1), p)?
        }
    };
    let vals = p.values(ring)?;
    let through_p = t.iter().all(|f| f.eval(&vals).is_zero());
    let stratum_smooth = through_p && logsmooth.smooth;
    let codim = logsmooth.codim;
    let passed = invertible && stratum_smooth && codim == m && logsmooth.log_smooth;
    Ok(SemistableParamsVerdict { passed, unit, twisted, invertible, stratum_smooth, codim, m, logsmooth, normalized })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_models() {
        let s = standard_semistable(0).unwrap();
        assert_eq!(s.algebra.relations.fmt_gens(), ["t0 - pi"]);
        let s = standard_semistable(2).unwrap();
        assert_eq!(s.algebra.relations.fmt_gens(), ["t0*t1*t2 - pi"]);
        let t = t_model(1, 1, 1).unwrap();
        assert_eq!(t.algebra.relations.fmt_gens(), ["t0'*t1'*v1^2 - pi"]);
        let t = t_model(0, 1, 3).unwrap();
        assert_eq!(t.algebra.relations.fmt_gens(), ["t0'*v1^3 - pi"]);
        let t = t_model(1, 2, 1).unwrap();
        assert_eq!(t.algebra.relations.fmt_gens(), ["t0'*t1'*v1^2*v2^2 - pi"]);
    }

    #[test]
    fn toric_lemma() {
        for (m, r, l) in [(1, 1, 1), (0, 1, 1), (2, 1, 1)] {
            let v = toriclem_verify(m, r, l).unwrap();
            assert!(v.passed, "{m} {r} {l}: {:?}", v.chart_relations);
        }
        assert_eq!(toriclem_verify(2, 1, 1).unwrap().d, 3);
    }

    #[test]
    fn toric_lemma_grid() {
        for m in 0..=2 {
            for r in 1..=2 {
                for l in 1..=2 {
                    assert!(toriclem_verify(m, r, l).unwrap().passed, "{m} {r} {l}");
                }
            }
        }
    }

    #[test]
    fn fiber_criterion() {
        let s = standard_semistable(2).unwrap();
        let o = RationalPoint::origin(s.algebra.ring());
        let v = logsmooth_check(&s, &o).unwrap();
        assert!(v.log_smooth && v.equality);
        assert_eq!((v.codim, v.rank), (2, 2));

        let t = t_model(1, 1, 1).unwrap();
        let v = logsmooth_check(&t, &RationalPoint::origin(t.algebra.ring())).unwrap();
        assert!(v.log_smooth);
        assert_eq!((v.fiber_dim, v.codim, v.rank), (2, 2, 2));

        // one coordinate a unit: same verdict as S_(π,1) at its origin
        let mut p = o.clone();
        p.set("t0", Rat::one());
        let v = logsmooth_check(&s, &p).unwrap();
        let s1 = standard_semistable(1).unwrap();
        let w = logsmooth_check(&s1, &RationalPoint::origin(s1.algebra.ring())).unwrap();
        assert_eq!((v.log_smooth, v.codim, v.rank), (w.log_smooth, w.codim, w.rank));

        // codimension-deficient chart
        let alg = PresentedAlgebra::parse(&["x", "y", "z", "pi"], Some("pi"), &["x*y*z - pi", "z - x"]).unwrap();
        let ring = alg.ring().clone();
        let chart = alloc::vec![ring.gen(0), ring.gen(1), ring.gen(2)];
        let model = ModelScheme::new(alg, MonoidPair::semistable(2), chart).unwrap();
        let v = logsmooth_check(&model, &RationalPoint::origin(&ring)).unwrap();
        assert!(!v.log_smooth);
        assert_eq!((v.codim, v.rank), (1, 2));
    }

    #[test]
    fn parameters() {
        let s = standard_semistable(1).unwrap();
        let ring = s.algebra.ring().clone();
        let o = RationalPoint::origin(&ring);
        let v = semistable_params_check(&s.algebra, &[ring.gen(0), ring.gen(1)], &o, false).unwrap();
        assert!(v.passed && !v.twisted);

        let two = Rat::from_integer(2.into());
        let v = semistable_params_check(&s.algebra, &[ring.gen(0).scale(&two), ring.gen(1)], &o, true).unwrap();
        assert!(v.passed && v.twisted);
        assert_eq!(v.unit, ring.constant(two.clone()));
        assert_eq!(v.normalized.unwrap()[0], ring.gen(0));

        let v = semistable_params_check(&s.algebra, &[&ring.gen(0) * &ring.gen(1)], &o, false).unwrap();
        assert!(!v.passed && !v.stratum_smooth);

        // unit rescaling with product one
        let half = Rat::new(1.into(), 2.into());
        let v = semistable_params_check(&s.algebra, &[ring.gen(0).scale(&two), ring.gen(1).scale(&half)], &o, false)
            .unwrap();
        assert!(v.passed && !v.twisted);
    }
}
