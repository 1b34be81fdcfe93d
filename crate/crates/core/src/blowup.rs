//! Affine charts of blowups, strict transforms, annihilator lifts, and the
//! key-lemma blowup that makes a scheme regular along a regular subvariety.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::poly::{
    exact_quotient, ideal_quotient, ideal_rel, krull_dim, radical_contains, saturate, smooth_at, Ideal, MonomialOrder,
    Polynomial, Rat, RationalPoint, RelationVerdict, Ring, SmoothVerdict,
};
use crate::{Error, Result};

/// A finitely presented algebra `ℚ[vars]/relations`, optionally with a
/// marked rational point and a human-readable construction trace.
#[derive(Clone, Debug)]
pub struct PresentedAlgebra {
    pub relations: Ideal,
    pub point: Option<RationalPoint>,
    pub provenance: Vec<String>,
}

impl PresentedAlgebra {
    pub fn new(relations: Ideal) -> Self {
        PresentedAlgebra { relations, point: None, provenance: Vec::new() }
    }

    pub fn parse<S: AsRef<str>>(vars: &[&str], pi: Option<&str>, relations: &[S]) -> Result<Self> {
        let ring = Ring::new(vars.iter().copied(), pi)?;
        Ok(PresentedAlgebra::new(Ideal::parse(&ring, relations)?))
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.relations.ring()
    }

    pub fn with_point(mut self, p: RationalPoint) -> Self {
        self.point = Some(p);
        self
    }

    pub fn traced(mut self, line: impl Into<String>) -> Self {
        self.provenance.push(line.into());
        self
    }

    /// Ideal of the algebra generated by `gens` together with the relations.
    pub fn ideal(&self, gens: impl IntoIterator<Item = Polynomial>) -> Ideal {
        self.relations.with(gens)
    }

    pub fn is_zero(&self, f: &Polynomial) -> Result<bool> {
        self.relations.contains(f)
    }

    /// The quotient by additional relations.
    pub fn quotient(&self, extra: impl IntoIterator<Item = Polynomial>) -> PresentedAlgebra {
        PresentedAlgebra {
            relations: self.relations.with(extra),
            point: self.point.clone(),
            provenance: self.provenance.clone(),
        }
    }

    /// `(relations : π^∞) = relations`.
    pub fn is_pi_saturated(&self) -> Result<bool> {
        let Some(pi) = self.ring().pi_poly() else { return Err(Error::pre("no π designated")) };
        let (s, _) = saturate(&self.relations, &pi)?;
        s.is_subset(&self.relations)
    }

    pub fn parse_poly(&self, s: &str) -> Result<Polynomial> {
        self.ring().parse(s)
    }
}

/// One affine chart of a blowup.
#[derive(Clone, Debug)]
pub struct ChartResult {
    pub source: PresentedAlgebra,
    /// Center generators, in the source ring.
    pub center: Vec<Polynomial>,
    /// The generator inverted in this chart.
    pub index: usize,
    pub chart: PresentedAlgebra,
    /// Image in the chart of every source variable.
    pub var_images: Vec<Polynomial>,
    /// `f_i / f_index` for every center generator.
    pub transforms: Vec<Polynomial>,
    /// Generator of the exceptional ideal: the image of `f_index`.
    pub exceptional: Polynomial,
    /// Stabilization exponents of the saturations by the exceptional element and by `π`.
    pub saturation_exponents: (u32, Option<u32>),
}

impl ChartResult {
    /// Image of a source polynomial in the chart.
    pub fn map(&self, f: &Polynomial) -> Polynomial {
        f.substitute(&self.var_images)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.chart.ring()
    }

    /// Checks `exceptional · transform(f_i) - f_i ∈ relations` for all `i`.
    pub fn check_transforms(&self) -> Result<bool> {
        for (f, t) in self.center.iter().zip(&self.transforms) {
            let lhs = &(&self.exceptional * t) - &self.map(f);
            if !self.chart.is_zero(&lhs)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The chart `A[f_i / f_j]` of the blowup of `A` along `(f_0, …, f_k)`.
///
/// A new variable `y_i = f_i / f_j` is adjoined for `i ≠ j`; when `f_i` is
/// a plain variable `x` not occurring in `f_j` (and not `π`), `x` is
/// eliminated through `x = y_i·f_j` and `y_i` is named `x'` in its place.
pub fn blowup_chart(a: &PresentedAlgebra, center: &[Polynomial], j: usize) -> Result<ChartResult> {
    let ring = a.ring().clone();
    let n = ring.nvars();
    if j >= center.len() {
        return Err(Error::pre("chart index outside the center"));
    }
    for f in center {
        if f.nvars() != n {
            return Err(Error::RingMismatch);
        }
        if a.is_zero(f)? {
            return Err(Error::pre(format!("center generator {} is zero in the algebra", ring.fmt_poly(f))));
        }
    }
    let fj = &center[j];
    let fj_support = fj.support();

    if let Some(c) = fj.as_constant() {
        // unit ideal: the chart is the source itself
        let inv = c.recip();
        let transforms = center.iter().map(|f| f.scale(&inv)).collect();
        return Ok(ChartResult {
            source: a.clone(),
            center: center.to_vec(),
            index: j,
            chart: a.clone().traced(format!("blowup along a unit ideal, chart {j}: unchanged")),
            var_images: (0..n).map(|i| ring.gen(i)).collect(),
            transforms,
            exceptional: Polynomial::constant(n, c),
            saturation_exponents: (0, None),
        });
    }

    // plan the chart variables
    let mut eliminated: Vec<Option<usize>> = vec![None; n]; // source var -> center index
    let mut appended: Vec<usize> = Vec::new(); // center indices needing a fresh variable
    for (i, f) in center.iter().enumerate() {
        if i == j {
            continue;
        }
        match f.as_variable() {
            Some(v) if Some(v) != ring.pi() && !fj_support.contains(&v) && eliminated[v].is_none() => {
                eliminated[v] = Some(i)
            }
            _ => appended.push(i),
        }
    }
    let mut names: Vec<String> = Vec::new();
    let mut slot_of_center: Vec<Option<usize>> = vec![None; center.len()];
    let mut taken: Vec<String> = Vec::new();
    for v in 0..n {
        match eliminated[v] {
            Some(i) => {
                let nm = ring.fresh_name(&format!("{}'", ring.var_name(v)), &taken);
                slot_of_center[i] = Some(names.len());
                taken.push(nm.clone());
                names.push(nm);
            }
            None => names.push(ring.var_name(v).into()),
        }
    }
    for &i in &appended {
        let base = match center[i].as_variable() {
            Some(v) => format!("{}'", ring.var_name(v)),
            None => format!("y{i}"),
        };
        let nm = ring.fresh_name(&base, &taken);
        slot_of_center[i] = Some(names.len());
        taken.push(nm.clone());
        names.push(nm);
    }
    let chart_ring = Ring::with_limits(names, ring.pi_name(), ring.limits().clone())?;
    let m = chart_ring.nvars();
    let kept: Vec<usize> = (0..n).collect(); // source var v sits at slot v
    let fj_c = fj.embed(m, &kept);
    let var_images: Vec<Polynomial> = (0..n)
        .map(|v| match eliminated[v] {
            Some(i) => &chart_ring.gen(slot_of_center[i].unwrap()) * &fj_c,
            None => chart_ring.gen(v),
        })
        .collect();
    let map = |f: &Polynomial| f.substitute(&var_images);
    let mut gens: Vec<Polynomial> = a.relations.gens().iter().map(map).collect();
    for &i in &appended {
        let y = chart_ring.gen(slot_of_center[i].unwrap());
        gens.push(&map(&center[i]) - &(&y * &fj_c));
    }
    let exceptional = map(fj);
    let (mut rel, e_exc) = saturate(&Ideal::new(chart_ring.clone(), gens), &exceptional)?;
    let mut e_pi = None;
    if let Some(pi) = chart_ring.pi_poly() {
        let (r2, e) = saturate(&rel, &pi)?;
        rel = r2;
        e_pi = Some(e);
    }
    let relations = Ideal::new(chart_ring.clone(), rel.canonical()?);
    let transforms: Vec<Polynomial> = (0..center.len())
        .map(|i| if i == j { chart_ring.one() } else { chart_ring.gen(slot_of_center[i].unwrap()) })
        .collect();
    let chart = PresentedAlgebra::new(relations).traced(format!(
        "chart {} of the blowup along ({}); saturation exponents {}{}",
        j,
        ring.fmt_polys(center).join(", "),
        e_exc,
        e_pi.map(|e| format!(", π: {e}")).unwrap_or_default()
    ));
    let res = ChartResult {
        source: a.clone(),
        center: center.to_vec(),
        index: j,
        chart,
        var_images,
        transforms,
        exceptional,
        saturation_exponents: (e_exc, e_pi),
    };
    if !res.check_transforms()? {
        return Err(Error::cert("center generator is not exceptional × transform"));
    }
    Ok(res)
}

/// Extension of `k` to the chart, saturated by the exceptional element.
pub fn strict_transform(res: &ChartResult, k: &Ideal) -> Result<Ideal> {
    if k.ring() != res.source.ring() {
        return Err(Error::RingMismatch);
    }
    let ext = res.chart.ideal(k.gens().iter().map(|g| res.map(g)));
    let (s, _) = saturate(&ext, &res.exceptional)?;
    Ok(Ideal::new(res.ring().clone(), s.canonical()?))
}

#[derive(Clone, Debug)]
pub struct AnnLiftResult {
    pub exponent: u32,
    pub lift: Polynomial,
    pub stabilized: bool,
    /// Set when the canonical lift failed and `c·(1+z)` was used.
    pub correction: Option<Polynomial>,
}

/// Least `n` and a lift `c` of `b^n` to `C` with `Ann_C(c) = J`.
pub fn ann_lift(c_alg: &PresentedAlgebra, j: &Ideal, b: &Polynomial) -> Result<AnnLiftResult> {
    let rel = &c_alg.relations;
    let cap = c_alg.ring().limits().max_ann_exponent;
    let target = rel.with(j.gens().iter().cloned()).prepared()?;
    let ann = |c: &Polynomial| -> Result<Option<Ideal>> {
        if rel.contains(c)? {
            return Ok(None);
        }
        Ok(Some(ideal_quotient(rel, c)?))
    };
    let mut chain: Vec<String> = Vec::new();
    let relp = rel.prepared()?;
    for n in 1..=cap {
        let c = relp.reduce(&b.pow(n))?;
        match ann(&c)? {
            Some(q) => {
                if ideal_rel(&q, &target)?.verdict == RelationVerdict::Equal {
                    return Ok(AnnLiftResult { exponent: n, lift: c, stabilized: true, correction: None });
                }
                chain.push(format!("(0:c^{n}) = ({})", q.fmt_canonical()?.join(", ")));
            }
            None => chain.push(format!("b^{n} = 0")),
        }
    }
    // corrected lifts c·(1+z) with z of degree ≤ 1 in J
    let zs: Vec<Polynomial> = j
        .gens()
        .iter()
        .chain(target.canonical()?.iter())
        .filter(|z| z.total_degree() <= 1 && !z.is_zero())
        .cloned()
        .collect();
    for n in 1..=cap {
        let c0 = relp.reduce(&b.pow(n))?;
        for z in &zs {
            for sign in [1i64, -1] {
                let zz = z.scale(&Rat::from_integer(sign.into()));
                let c = relp.reduce(&(&c0 * &(&c_alg.ring().one() + &zz)))?;
                if let Some(q) = ann(&c)? {
                    if ideal_rel(&q, &target)?.verdict == RelationVerdict::Equal {
                        return Ok(AnnLiftResult { exponent: n, lift: c, stabilized: true, correction: Some(zz) });
                    }
                }
            }
        }
    }
    Err(Error::cap("max-ann-exponent", cap.into(), chain.join("; ")))
}

/// `π ∈ rad(J + relations)`.
pub fn is_open_ideal(a: &PresentedAlgebra, j: &Ideal) -> Result<bool> {
    let pi = a.ring().pi_poly().ok_or_else(|| Error::pre("no π designated"))?;
    radical_contains(&a.relations.with(j.gens().iter().cloned()), &pi)
}

#[derive(Clone, Debug)]
pub struct UnitRatio {
    /// `u` with `a' = a·u` in the chart.
    pub u: Polynomial,
    /// `1 ∈ (u) + Z` verified.
    pub invertible_along: bool,
}

/// The ratio `u = a'/a` in the chart of a blowup along `I + (·)`, where
/// `a' ≡ a` modulo the other center generators, with an invertibility
/// certificate along `V(z)`.
pub fn unit_ratio(res: &ChartResult, a: &Polynomial, a2: &Polynomial, z: &Ideal) -> Result<UnitRatio> {
    let others = res.center.iter().enumerate().filter(|(i, _)| *i != res.index).map(|(_, f)| f.clone());
    let congr = res.source.ideal(others);
    if !congr.contains(&(a2 - a))? {
        return Err(Error::pre("a and a' differ modulo the blown-up ideal"));
    }
    let num = res.map(a2);
    let den = res.map(a);
    let u = exact_quotient(&res.chart.relations, &num, &den)?
        .ok_or_else(|| Error::cert("a' is not divisible by a in the chart"))?;
    let check = z.with([u.clone()]);
    if !check.is_unit()? {
        return Err(Error::cert(format!("ratio {} is not invertible along Z", res.ring().fmt_poly(&u))));
    }
    Ok(UnitRatio { u, invertible_along: true })
}

/// A component of the boundary at the new point, cut by a parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SncComponent {
    pub equation: String,
    /// Index into the concatenated family `(t', s)`.
    pub parameter: usize,
}

#[derive(Clone, Debug)]
pub struct SncCertificate {
    pub components: Vec<SncComponent>,
    /// `a = v·a'` with `v(x') ≠ 0`.
    pub unit: Polynomial,
    pub unit_value: Rat,
}

#[derive(Clone, Debug)]
pub struct KeyBlowupResult {
    pub b: Polynomial,
    pub ann: AnnLiftResult,
    pub a: Polynomial,
    pub center: Vec<Polynomial>,
    pub chart: ChartResult,
    pub strict_y: Ideal,
    pub point: RationalPoint,
    pub t_params: Vec<Polynomial>,
    pub s_params: Vec<Polynomial>,
    /// `X'` regular at `x'` with expected dimension `n + m`.
    pub regularity: SmoothVerdict,
    /// `(t', s)` cut out `x'` transversally.
    pub parameters: SmoothVerdict,
    pub snc: Option<SncCertificate>,
}

fn minors_not_in(gens: &[Polynomial], nvars: usize, size: usize, y: &Ideal) -> Result<Vec<Polynomial>> {
    let mut out = Vec::new();
    for m in crate::poly::jacobian_minors(gens, nvars, size) {
        if !y.contains(&m)? {
            out.push(m);
        }
    }
    Ok(out)
}

/// Divisor `b` on `Y` off which `V(t)` is smooth of the dimension of `Y`:
/// the simplest maximal Jacobian minor not vanishing on `Y`.
pub fn auto_divisor(x: &PresentedAlgebra, y: &Ideal, t: &[Polynomial]) -> Result<Polynomial> {
    let ring = x.ring();
    let n = ring.nvars();
    let ydim = krull_dim(y)?;
    let mut gens: Vec<Polynomial> = x.relations.canonical()?;
    gens.extend(t.iter().cloned());
    let size = n - ydim;
    let yp = y.prepared()?;
    let mut cands = minors_not_in(&gens, n, size, &yp)?;
    cands.sort_by_key(|m| (m.len(), m.total_degree()));
    let b = cands.into_iter().next().ok_or_else(|| Error::pre("V(t) is singular along all of Y"))?;
    Ok(yp.reduce(&b)?.content_sign_normalized(&MonomialOrder::GrevLex))
}

/// Variables dividing a monomial-times-constant `b`, with multiplicity.
fn monomial_factors(b: &Polynomial) -> Option<Vec<(usize, u32)>> {
    let (e, _) = b.as_monomial()?;
    Some(e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(i, &k)| (i, k)).collect())
}

/// The blowup of the key lemma. Blows up `(t, a)` (or `(t, a²)` in the
/// logarithmic case) where `a` lifts a power of `b` annihilated exactly by
/// `Y` in `X/(t)`, takes the `a`-power chart and certifies regularity of the
/// chart at the new point, and in the logarithmic case that the boundary is
/// snc there.
pub fn key_blowup(
    x_alg: &PresentedAlgebra,
    y: &Ideal,
    x: &RationalPoint,
    t: &[Polynomial],
    b: Option<&Polynomial>,
    log: bool,
) -> Result<KeyBlowupResult> {
    let ring = x_alg.ring().clone();
    if y.ring() != &ring {
        return Err(Error::RingMismatch);
    }
    let y_full = x_alg.relations.with(y.gens().iter().cloned()).prepared()?;
    let vals = x.values(&ring)?;
    for g in y_full.gens() {
        if !g.eval(&vals).is_zero() {
            return Err(Error::NotOnVariety("x is not on Y".into()));
        }
    }
    for ti in t {
        if !y_full.contains(ti)? {
            return Err(Error::pre(format!("parameter {} does not vanish on Y", ring.fmt_poly(ti))));
        }
    }
    let n_t = t.len();
    let m_y = krull_dim(&y_full)?;
    let dim_x = krull_dim(&x_alg.relations)?;
    if dim_x != n_t + m_y {
        return Err(Error::pre(format!("dim X = {dim_x} but |t| + dim Y = {}", n_t + m_y)));
    }

    let b = match b {
        Some(b) => b.clone(),
        None if log => return Err(Error::pre("the logarithmic case needs the divisor b")),
        None => auto_divisor(x_alg, &y_full, t)?,
    };
    let c_alg = x_alg.quotient(t.iter().cloned());
    let ann = ann_lift(&c_alg, &y_full, &b)?;
    let a = ann.lift.clone();
    let exc = if log { a.pow(2) } else { a.clone() };
    let mut center: Vec<Polynomial> = t.to_vec();
    center.push(exc);
    let chart = blowup_chart(x_alg, &center, n_t)?;
    let cring = chart.ring().clone();
    let strict_y = strict_transform(&chart, y)?;

    // x': old coordinates, zero on the new ones
    let mut point = RationalPoint::default();
    for v in cring.vars() {
        let val = x.get(v).filter(|_| ring.index_of(v).is_some()).cloned().unwrap_or_else(Rat::zero);
        point.set(v, val);
    }
    let t_params: Vec<Polynomial> = chart.transforms[..n_t].to_vec();
    let zprime = chart.chart.ideal(t_params.iter().cloned());
    if ideal_rel(&strict_y, &zprime)?.verdict != RelationVerdict::Equal {
        return Err(Error::cert("strict transform of Y is not cut out by t'"));
    }
    let cvals = point.values(&cring)?;
    for g in strict_y.gens() {
        if !g.eval(&cvals).is_zero() {
            return Err(Error::cert("x' is not on the strict transform of Y"));
        }
    }

    // parameters s completing t' at x'
    let mut candidates: Vec<Polynomial> = Vec::new();
    if let Some(f) = monomial_factors(&b) {
        for (v, _) in f {
            candidates.push(&cring.gen(v) - &cring.constant(cvals[v].clone()));
        }
    }
    for v in 0..cring.nvars() {
        candidates.push(&cring.gen(v) - &cring.constant(cvals[v].clone()));
    }
    let rel_gens = chart.chart.relations.canonical()?;
    let rank_of = |extra: &[Polynomial]| -> Result<usize> {
        let id = Ideal::new(cring.clone(), rel_gens.iter().chain(t_params.iter()).chain(extra).cloned().collect());
        Ok(smooth_at(&id, &point, 0)?.jacobian_rank)
    };
    let mut s_params: Vec<Polynomial> = Vec::new();
    let mut rank = rank_of(&s_params)?;
    for cand in candidates {
        if s_params.len() == m_y {
            break;
        }
        if s_params.contains(&cand) {
            continue;
        }
        let mut trial = s_params.clone();
        trial.push(cand);
        let r = rank_of(&trial)?;
        if r > rank {
            rank = r;
            s_params = trial;
        }
    }
    let regularity = smooth_at(&chart.chart.relations, &point, n_t + m_y)?;
    if !regularity.regular {
        return Err(Error::cert(format!(
            "chart is singular at x': Jacobian rank {} < {}",
            regularity.jacobian_rank, regularity.expected_rank
        )));
    }
    let family =
        Ideal::new(cring.clone(), rel_gens.iter().chain(t_params.iter()).chain(s_params.iter()).cloned().collect());
    let parameters = smooth_at(&family, &point, 0)?;
    if !parameters.regular || s_params.len() != m_y {
        return Err(Error::cert("(t', s) is not a regular family of parameters at x'"));
    }

    let snc = if log {
        let factors = monomial_factors(&b).ok_or_else(|| Error::pre("logarithmic divisor b must be a monomial"))?;
        let a_prime = b.pow(ann.exponent);
        let u = exact_quotient(&chart.chart.relations, &chart.map(&a_prime), &chart.map(&a))?
            .ok_or_else(|| Error::cert("a' is not divisible by a in the chart"))?;
        let unit_value = u.eval(&cvals);
        if unit_value.is_zero() {
            return Err(Error::cert("a'/a vanishes at x'"));
        }
        let mut components = Vec::new();
        for (i, tp) in t_params.iter().enumerate() {
            components.push(SncComponent { equation: cring.fmt_poly(tp), parameter: i });
        }
        for (v, _) in factors {
            let sv = &cring.gen(v) - &cring.constant(cvals[v].clone());
            let idx = s_params
                .iter()
                .position(|s| *s == sv)
                .ok_or_else(|| Error::cert(format!("{} is not among the parameters", cring.var_name(v))))?;
            components.push(SncComponent { equation: cring.fmt_poly(&sv), parameter: n_t + idx });
        }
        Some(SncCertificate { components, unit: u, unit_value })
    } else {
        None
    };

    Ok(KeyBlowupResult { b, ann, a, center, chart, strict_y, point, t_params, s_params, regularity, parameters, snc })
}
