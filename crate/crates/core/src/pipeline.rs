//! Drivers for the height-reduction arguments: uniformization of a
//! monomial valuation on a scheme by induction on the height, and the
//! formal variant that ends in a semistable chart after a base change.
//!
//! Every produced step is recomputed and verified by the driver; oracles
//! only propose centers.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::blowup::{
    ann_lift, blowup_chart, is_open_ideal, key_blowup, strict_transform, ChartResult, PresentedAlgebra,
};
use crate::linalg::{lattice_coords, solve_left};
use crate::models::{logsmooth_check, semistable_params_check, LogSmoothVerdict, ModelScheme, SemistableParamsVerdict};
use crate::monoid::{is_admissible_pair, AffineMonoid, MonoidPair};
use crate::poly::{
    exact_quotient, krull_dim, radical_contains, regular_at_generic, saturate, smooth_at, Ideal, Polynomial, Rat,
    RationalPoint, Ring, SmoothVerdict,
};
use crate::polyhedral::{chart_monoid, semistable_subdivision, ChartMonoid, HeightedFan};
use crate::valuation::{
    center, choose_chart, decompose, effective_height, lift_through, CenterResult, MonomialValuation,
};
use crate::{Error, Result};

/// One executed blowup of a tower.
#[derive(Clone, Debug)]
pub struct BlowupRecord {
    /// Which part of the argument produced it.
    pub step: String,
    pub chart: ChartResult,
    /// Boundary components after the blowup (total transforms and the
    /// exceptional divisor).
    pub boundary: Vec<Ideal>,
    /// Center of the valuation on the chart.
    pub center: Vec<String>,
}

/// The toric modification and base change of a log smooth chart.
#[derive(Clone, Debug)]
pub struct SubdivisionRecord {
    pub step: String,
    pub model: ModelScheme,
    pub fan: HeightedFan,
    pub cone: usize,
    pub monoid: ChartMonoid,
    pub chart: PresentedAlgebra,
    /// Names of the chart-monoid variables in `chart`.
    pub chart_vars: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum TowerRecord {
    Blowup(BlowupRecord),
    Subdivision(SubdivisionRecord),
}

impl TowerRecord {
    pub fn chart_algebra(&self) -> &PresentedAlgebra {
        match self {
            TowerRecord::Blowup(b) => &b.chart.chart,
            TowerRecord::Subdivision(s) => &s.chart,
        }
    }

    pub fn step(&self) -> &str {
        match self {
            TowerRecord::Blowup(b) => &b.step,
            TowerRecord::Subdivision(s) => &s.step,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateKind {
    RegularPair,
    LogSmooth,
    Semistable,
}

impl CertificateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CertificateKind::RegularPair => "regular-pair",
            CertificateKind::LogSmooth => "log-smooth",
            CertificateKind::Semistable => "semistable",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "regular-pair" => Ok(CertificateKind::RegularPair),
            "log-smooth" => Ok(CertificateKind::LogSmooth),
            "semistable" => Ok(CertificateKind::Semistable),
            _ => Err(Error::pre(format!("unknown certificate kind `{s}`"))),
        }
    }
}

/// A claim about the final chart that can be re-checked from the chart
/// alone.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub chart: PresentedAlgebra,
    /// The center: a rational point, or the generic point of `center`.
    pub point: Option<RationalPoint>,
    pub center: Vec<Polynomial>,
    /// The parameter family (`t̲` for semistable charts).
    pub parameters: Vec<Polynomial>,
    /// Boundary components through the point, one parameter each.
    pub boundary: Vec<Polynomial>,
    /// Base-change degree for semistable certificates.
    pub d: Option<i64>,
}

/// What the checks of a certificate found.
#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub regularity: Option<SmoothVerdict>,
    pub parameters: Option<SmoothVerdict>,
    pub semistable: Option<SemistableParamsVerdict>,
    pub logsmooth: Option<LogSmoothVerdict>,
}

/// Re-checks a certificate against its chart.
pub fn verify_certificate(cert: &Certificate) -> Result<CertificateReport> {
    let rel = &cert.chart.relations;
    let ring = cert.chart.ring();
    match cert.kind {
        CertificateKind::RegularPair => {
            let dim = krull_dim(rel)?;
            match &cert.point {
                Some(p) => {
                    let reg = smooth_at(rel, p, dim)?;
                    if !reg.regular {
                        return Err(Error::cert(format!(
                            "chart is singular at the point: Jacobian rank {} < {}",
                            reg.jacobian_rank, reg.expected_rank
                        )));
                    }
                    let fam = rel.with(cert.parameters.iter().cloned());
                    let par = smooth_at(&fam, p, 0)?;
                    if !par.regular || cert.parameters.len() != dim {
                        return Err(Error::cert("parameters are not a regular family at the point"));
                    }
                    check_boundary(&cert.chart, &cert.boundary, &cert.parameters)?;
                    Ok(CertificateReport {
                        regularity: Some(reg),
                        parameters: Some(par),
                        semistable: None,
                        logsmooth: None,
                    })
                }
                None => {
                    let prime = cert.chart.ideal(cert.center.iter().cloned());
                    if !regular_at_generic(rel, &prime, dim)? {
                        return Err(Error::cert("chart is singular at the generic point of the center"));
                    }
                    if !cert.boundary.is_empty() {
                        return Err(Error::pre("boundary certificates need a closed point"));
                    }
                    Ok(CertificateReport { regularity: None, parameters: None, semistable: None, logsmooth: None })
                }
            }
        }
        CertificateKind::Semistable | CertificateKind::LogSmooth => {
            let p = cert.point.as_ref().ok_or_else(|| Error::pre("semistable certificates need a point"))?;
            if ring.pi().is_none() {
                return Err(Error::pre("semistable certificates need a designated π"));
            }
            let v = semistable_params_check(&cert.chart, &cert.parameters, p, false)?;
            if !v.passed {
                return Err(Error::cert(format!(
                    "semistable parameters fail: invertible {}, stratum smooth {}, codim {} (want {})",
                    v.invertible, v.stratum_smooth, v.codim, v.m
                )));
            }
            let ls = v.logsmooth.clone();
            Ok(CertificateReport { regularity: None, parameters: None, semistable: Some(v), logsmooth: Some(ls) })
        }
    }
}

/// Each boundary equation must cut out (up to radical) the same set as a
/// distinct parameter.
fn check_boundary(chart: &PresentedAlgebra, boundary: &[Polynomial], params: &[Polynomial]) -> Result<Vec<usize>> {
    let mut used = Vec::new();
    for b in boundary {
        let bi = chart.ideal([b.clone()]);
        let mut found = None;
        for (k, p) in params.iter().enumerate() {
            if used.contains(&k) {
                continue;
            }
            let pi = chart.ideal([p.clone()]);
            if radical_contains(&bi, p)? && radical_contains(&pi, b)? {
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => used.push(k),
            None => {
                return Err(Error::cert(format!(
                    "boundary component {} is not cut out by a parameter",
                    chart.ring().fmt_poly(b)
                )))
            }
        }
    }
    Ok(used)
}

/// A step proposed by an oracle: the center as polynomials in the current
/// chart, and the chart index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProposedStep {
    pub center: Vec<String>,
    pub index: usize,
}

/// Uniformization of height-one valuations, as an untrusted black box.
pub trait HeightOneOracle {
    fn name(&self) -> &'static str;
    /// `None` declines.
    fn propose(
        &self,
        x: &PresentedAlgebra,
        boundary: &[Ideal],
        v: &MonomialValuation,
    ) -> Result<Option<Vec<ProposedStep>>>;
}

/// Claims that nothing needs to be done.
pub struct IdentityOracle;

impl HeightOneOracle for IdentityOracle {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn propose(&self, _: &PresentedAlgebra, _: &[Ideal], _: &MonomialValuation) -> Result<Option<Vec<ProposedStep>>> {
        Ok(Some(Vec::new()))
    }
}

/// Blows up the center of the valuation until the chart is regular there.
pub struct ToricOracle {
    pub max_steps: usize,
}

impl Default for ToricOracle {
    fn default() -> Self {
        ToricOracle { max_steps: 6 }
    }
}

impl HeightOneOracle for ToricOracle {
    fn name(&self) -> &'static str {
        "toric"
    }

    fn propose(&self, x: &PresentedAlgebra, _: &[Ideal], v: &MonomialValuation) -> Result<Option<Vec<ProposedStep>>> {
        let mut steps = Vec::new();
        let mut v = v.clone();
        for _ in 0..=self.max_steps {
            if regular_at_center(&v)? {
                return Ok(Some(steps));
            }
            let c = center(&v)?;
            let ring = v.ring().clone();
            let gens: Vec<Polynomial> = c.generators.iter().map(|&i| ring.gen(i)).collect();
            let index = choose_chart(&v, &gens)?;
            steps.push(ProposedStep { center: ring.fmt_polys(&gens), index });
            let chart = blowup_chart(v.chart(), &gens, index)?;
            v = lift_through(&v, chart)?.valuation;
        }
        let _ = x;
        Ok(None)
    }
}

/// Always proposes a chart the valuation is not centered on; used to check
/// that oracle output is verified.
pub struct LyingOracle;

impl HeightOneOracle for LyingOracle {
    fn name(&self) -> &'static str {
        "lying"
    }

    fn propose(&self, _: &PresentedAlgebra, _: &[Ideal], v: &MonomialValuation) -> Result<Option<Vec<ProposedStep>>> {
        let c = center(v)?;
        let ring = v.ring().clone();
        let mut gens: Vec<Polynomial> = c.generators.iter().map(|&i| ring.gen(i)).collect();
        if gens.is_empty() {
            return Ok(Some(Vec::new()));
        }
        if gens.len() == 1 {
            gens.push(gens[0].pow(2));
        }
        let mut worst = 0;
        let mut worst_val = None;
        for (i, g) in gens.iter().enumerate() {
            let val = v.value(g)?;
            if worst_val.as_ref().map(|w| val > *w).unwrap_or(true) {
                worst_val = Some(val);
                worst = i;
            }
        }
        Ok(Some(vec![ProposedStep { center: ring.fmt_polys(&gens), index: worst }]))
    }
}

pub fn oracle_by_name(name: &str) -> Result<Box<dyn HeightOneOracle>> {
    match name {
        "identity" => Ok(Box::new(IdentityOracle)),
        "toric" => Ok(Box::new(ToricOracle::default())),
        "lying" => Ok(Box::new(LyingOracle)),
        _ => Err(Error::pre(format!("unknown oracle `{name}`"))),
    }
}

/// Is the chart regular at the center of `v` (closed point or generic point)?
pub fn regular_at_center(v: &MonomialValuation) -> Result<bool> {
    let c = center(v)?;
    let rel = &v.chart().relations;
    let dim = krull_dim(rel)?;
    let ring = v.ring();
    if c.generators.len() == ring.nvars() {
        Ok(smooth_at(rel, &RationalPoint::origin(ring), dim)?.regular)
    } else {
        regular_at_generic(rel, &c.ideal, dim)
    }
}

/// State carried along a tower.
#[derive(Clone, Debug)]
struct State {
    v: MonomialValuation,
    boundary: Vec<Ideal>,
}

impl State {
    fn alg(&self) -> &PresentedAlgebra {
        self.v.chart()
    }

    /// Blows up `gens` in chart `index`, lifts the valuation and the
    /// boundary, and returns the record.
    fn blow_up(&mut self, step: &str, gens: &[Polynomial], index: usize) -> Result<BlowupRecord> {
        let chart = blowup_chart(self.alg(), gens, index)?;
        self.apply(step, chart)
    }

    fn apply(&mut self, step: &str, chart: ChartResult) -> Result<BlowupRecord> {
        let lifted = lift_through(&self.v, chart.clone())
            .map_err(|e| Error::cert(format!("{step}: the valuation is not centered on chart {}: {e}", chart.index)))?;
        let mut boundary: Vec<Ideal> =
            self.boundary.iter().map(|i| chart.chart.ideal(i.gens().iter().map(|g| chart.map(g)))).collect();
        if chart.exceptional.as_constant().is_none() {
            boundary.push(chart.chart.ideal([chart.exceptional.clone()]));
        }
        self.v = lifted.valuation;
        self.boundary = boundary.clone();
        Ok(BlowupRecord { step: step.into(), chart, boundary, center: lifted.center.ideal.fmt_canonical()? })
    }
}

/// Executes and verifies an oracle's proposal.
fn run_oracle(oracle: &dyn HeightOneOracle, st: &mut State, step: &str) -> Result<Vec<BlowupRecord>> {
    let proposal = oracle
        .propose(st.alg(), &st.boundary, &st.v)?
        .ok_or_else(|| Error::cert(format!("{step}: oracle `{}` declined", oracle.name())))?;
    let mut out = Vec::new();
    for p in proposal {
        let ring = st.alg().ring().clone();
        let gens = ring.parse_all(&p.center)?;
        let rec = st
            .blow_up(&format!("{step} ({})", oracle.name()), &gens, p.index)
            .map_err(|e| Error::cert(format!("oracle `{}` output rejected: {e}", oracle.name())))?;
        out.push(rec);
    }
    if !regular_at_center(&st.v)? {
        return Err(Error::cert(format!(
            "oracle `{}` output rejected: the chart is not regular at the center",
            oracle.name()
        )));
    }
    Ok(out)
}

/// Options of the scheme driver.
#[derive(Clone, Debug, Default)]
pub struct SchemeOptions {
    /// Closure ideals of the parameter divisors at the head center, one per
    /// parameter, as polynomials of the chart reached after the head step.
    pub closure_ideals: Vec<Vec<String>>,
    /// An extra blowup performed first (chart chosen by the valuation).
    pub pre_blowup: Option<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct UniformizeResult {
    pub source: PresentedAlgebra,
    pub tower: Vec<TowerRecord>,
    pub certificate: Certificate,
    pub valuation: MonomialValuation,
}

/// Regular parameters at a rational point: coordinates `x_i - p_i` added
/// greedily by Jacobian rank.
fn point_parameters(alg: &PresentedAlgebra, p: &RationalPoint, prefer: &[Polynomial]) -> Result<Vec<Polynomial>> {
    let ring = alg.ring();
    let dim = krull_dim(&alg.relations)?;
    let vals = p.values(ring)?;
    let mut cands: Vec<Polynomial> = prefer.to_vec();
    for i in 0..ring.nvars() {
        cands.push(&ring.gen(i) - &ring.constant(vals[i].clone()));
    }
    let rank = |extra: &[Polynomial]| -> Result<usize> {
        Ok(smooth_at(&alg.relations.with(extra.iter().cloned()), p, 0)?.jacobian_rank)
    };
    let mut chosen: Vec<Polynomial> = Vec::new();
    let mut r = rank(&chosen)?;
    for c in cands {
        if chosen.len() == dim {
            break;
        }
        if chosen.contains(&c) {
            continue;
        }
        let mut trial = chosen.clone();
        trial.push(c);
        let r2 = rank(&trial)?;
        if r2 > r {
            r = r2;
            chosen = trial;
        }
    }
    Ok(chosen)
}

/// Boundary components through `p`: monomial generators are split into
/// their variables, and repeated components are dropped.
fn boundary_through(alg: &PresentedAlgebra, boundary: &[Ideal], p: &RationalPoint) -> Result<Vec<Polynomial>> {
    let ring = alg.ring();
    let vals = p.values(ring)?;
    let mut comps: Vec<Polynomial> = Vec::new();
    for b in boundary {
        let gens: Vec<Polynomial> = b.gens().iter().filter(|g| !alg.is_zero(g).unwrap_or(false)).cloned().collect();
        let pieces = match gens.len() {
            0 => continue,
            1 => split_principal(alg, &gens[0], &vals)?,
            _ => return Err(Error::pre("boundary components must be principal")),
        };
        for piece in pieces {
            if !piece.eval(&vals).is_zero() {
                continue;
            }
            let pi = alg.ideal([piece.clone()]);
            let mut dup = false;
            for c in &comps {
                let ci = alg.ideal([c.clone()]);
                if radical_contains(&ci, &piece)? && radical_contains(&pi, c)? {
                    dup = true;
                    break;
                }
            }
            if !dup {
                comps.push(piece);
            }
        }
    }
    Ok(comps)
}

fn same_zero_set(alg: &PresentedAlgebra, a: &Polynomial, b: &Polynomial) -> Result<bool> {
    Ok(radical_contains(&alg.ideal([a.clone()]), b)? && radical_contains(&alg.ideal([b.clone()]), a)?)
}

/// Writes `V(g)` near the point as a union of coordinate hyperplanes when
/// possible (e.g. an exceptional divisor `z = x'y`), keeping a minimal set.
fn split_principal(alg: &PresentedAlgebra, g: &Polynomial, vals: &[Rat]) -> Result<Vec<Polynomial>> {
    let ring = alg.ring();
    let gi = alg.ideal([g.clone()]);
    let mut s: Vec<usize> = Vec::new();
    for i in 0..ring.nvars() {
        if vals[i].is_zero() && radical_contains(&alg.ideal([ring.gen(i)]), g)? {
            s.push(i);
        }
    }
    let product = |s: &[usize]| s.iter().fold(ring.one(), |a, &i| &a * &ring.gen(i));
    if s.is_empty() || !radical_contains(&gi, &product(&s))? {
        return Ok(vec![g.clone()]);
    }
    // try dropping g itself first
    s.sort_by_key(|&i| core::cmp::Reverse(ring.gen(i) == *g));
    let mut k = 0;
    while k < s.len() {
        let mut trial = s.clone();
        trial.remove(k);
        if !trial.is_empty() && same_zero_set(alg, &product(&trial), g)? {
            s = trial;
        } else {
            k += 1;
        }
    }
    s.sort();
    Ok(s.into_iter().map(|i| ring.gen(i)).collect())
}

/// Chooses `k` generators of the prime `P` cutting out `V(P)` near its
/// generic point inside `V(relations + extra)`.
fn generic_parameters(
    alg: &PresentedAlgebra,
    prime: &Ideal,
    gens: &[Polynomial],
    extra: &[Polynomial],
    ydim: usize,
) -> Result<Vec<Polynomial>> {
    let n = alg.ring().nvars();
    let mut chosen: Vec<Polynomial> = Vec::new();
    let base_dim = krull_dim(&alg.relations.with(extra.iter().cloned()))?;
    let need = base_dim.saturating_sub(ydim);
    if need == 0 {
        return Ok(chosen);
    }
    for k in crate::polyhedral::subsets(gens.len(), need) {
        let t: Vec<Polynomial> = k.iter().map(|&i| gens[i].clone()).collect();
        let id = alg.relations.with(extra.iter().cloned()).with(t.iter().cloned());
        if regular_at_generic(&id, prime, ydim)? {
            chosen = t;
            return Ok(chosen);
        }
    }
    let _ = n;
    Err(Error::cert("no regular family of parameters among the center generators"))
}

fn closed_point(c: &CenterResult, ring: &Ring) -> Result<RationalPoint> {
    if c.generators.len() != ring.nvars() {
        return Err(Error::pre(format!(
            "the center ({}) is not a rational closed point",
            c.ideal.fmt_canonical()?.join(", ")
        )));
    }
    Ok(RationalPoint::origin(ring))
}

/// Uniformizes `v` on `x` with boundary `d` by induction on the height.
pub fn uniformize_scheme(
    x: &PresentedAlgebra,
    d: &[Ideal],
    v: &MonomialValuation,
    oracle: &dyn HeightOneOracle,
    opts: &SchemeOptions,
) -> Result<UniformizeResult> {
    if v.ring() != x.ring() {
        return Err(Error::RingMismatch);
    }
    let h = effective_height(v);
    if h == 0 {
        return Err(Error::pre("the valuation is trivial"));
    }
    let mut st = State { v: v.clone(), boundary: d.to_vec() };
    let mut tower: Vec<TowerRecord> = Vec::new();
    if let Some(pre) = &opts.pre_blowup {
        let gens = st.alg().ring().parse_all(pre)?;
        let j = choose_chart(&st.v, &gens)?;
        tower.push(TowerRecord::Blowup(st.blow_up("pre-blowup", &gens, j)?));
    }

    if h == 1 {
        for r in run_oracle(oracle, &mut st, "height one")? {
            tower.push(TowerRecord::Blowup(r));
        }
        let certificate = final_certificate(&st, None)?;
        return Ok(UniformizeResult { source: x.clone(), tower, certificate, valuation: st.v });
    }

    // Step 1: the head valuation
    let split = decompose(&st.v, 1)?;
    let mut head_state = State { v: split.head.clone(), boundary: st.boundary.clone() };
    let head_records = run_oracle(oracle, &mut head_state, "step 1")?;
    for r in head_records {
        let rec = st.apply(&r.step, r.chart.clone())?;
        tower.push(TowerRecord::Blowup(rec));
    }

    // Step 2: parameters at the head center, principalized if closure
    // ideals are supplied
    if !opts.closure_ideals.is_empty() {
        let ring = st.alg().ring().clone();
        let head = decompose(&st.v, 1)?.head;
        let hc = center(&head)?;
        let gens: Vec<Polynomial> = hc.generators.iter().map(|&i| ring.gen(i)).collect();
        let ydim = krull_dim(&hc.ideal)?;
        let t = generic_parameters(st.alg(), &hc.ideal, &gens, &[], ydim)?;
        if opts.closure_ideals.len() != t.len() {
            return Err(Error::pre(format!("{} closure ideals for {} parameters", opts.closure_ideals.len(), t.len())));
        }
        let mut product: Vec<Polynomial> = vec![ring.one()];
        for (ti, ci) in t.iter().zip(&opts.closure_ideals) {
            let cid = st.alg().ideal(ring.parse_all(ci)?);
            if !cid.contains(ti)? {
                return Err(Error::pre(format!("closure ideal does not contain {}", ring.fmt_poly(ti))));
            }
            if !cid.is_subset(&hc.ideal)? {
                return Err(Error::pre("closure ideal does not vanish at the head center"));
            }
            let gi = ring.parse_all(ci)?;
            product = product.iter().flat_map(|p| gi.iter().map(move |g| p * g)).collect();
        }
        let j = choose_chart(&st.v, &product)?;
        tower.push(TowerRecord::Blowup(st.blow_up("step 2", &product, j)?));
    }

    let ring = st.alg().ring().clone();
    let head = decompose(&st.v, 1)?.head;
    let hc = center(&head)?;
    let ydim = krull_dim(&hc.ideal)?;
    let hgens: Vec<Polynomial> = hc.generators.iter().map(|&i| ring.gen(i)).collect();
    let t = generic_parameters(st.alg(), &hc.ideal, &hgens, &[], ydim)?;
    let y_ideal = hc.ideal.clone();
    let xc = center(&st.v)?;
    let xp = closed_point(&xc, &ring)?;

    // Step 3: boundary on Y through x
    let mut e_eqs: Vec<Polynomial> = Vec::new();
    for comp in boundary_through(st.alg(), &st.boundary, &xp)? {
        if !y_ideal.contains(&comp)? {
            e_eqs.push(comp);
        }
    }

    // Step 4: the residual valuation on Y
    let residual = decompose(&st.v, 1)?.residual;
    let y_alg = residual.chart().clone();
    let e_ideals: Vec<Ideal> = e_eqs.iter().map(|e| y_alg.ideal([e.clone()])).collect();
    let sub = uniformize_scheme(&y_alg, &e_ideals, &residual, oracle, &SchemeOptions::default())?;
    for rec in &sub.tower {
        let TowerRecord::Blowup(b) = rec else { return Err(Error::pre("unexpected record on Y")) };
        let ring = st.alg().ring().clone();
        let gens = ring.parse_all(&ring_strings(&b.chart.source, &b.chart.center))?;
        tower.push(TowerRecord::Blowup(st.blow_up("step 4 (lifted from Y)", &gens, b.chart.index)?));
    }

    // Step 5: the key blowup
    let ring = st.alg().ring().clone();
    let head = decompose(&st.v, 1)?.head;
    let hc = center(&head)?;
    let ydim = krull_dim(&hc.ideal)?;
    let hgens: Vec<Polynomial> = hc.generators.iter().map(|&i| ring.gen(i)).collect();
    let t = if sub.tower.is_empty() { t } else { generic_parameters(st.alg(), &hc.ideal, &hgens, &[], ydim)? };
    let xc = center(&st.v)?;
    let xp = closed_point(&xc, &ring)?;
    let mut e_now: Vec<Polynomial> = Vec::new();
    for comp in boundary_through(st.alg(), &st.boundary, &xp)? {
        if !hc.ideal.contains(&comp)? {
            e_now.push(comp);
        }
    }
    let log = !e_now.is_empty();
    let b = log.then(|| e_now.iter().fold(ring.one(), |acc, e| &acc * e));
    let key = key_blowup(st.alg(), &hc.ideal, &xp, &t, b.as_ref(), log)?;
    let rec = st.apply("step 5 (key lemma)", key.chart.clone())?;
    let cpoint = closed_point(&center(&st.v)?, st.alg().ring())?;
    if cpoint != key.point {
        return Err(Error::cert("the valuation's center is not the point certified by the key lemma"));
    }
    tower.push(TowerRecord::Blowup(rec));
    let mut prefer = key.t_params.clone();
    prefer.extend(key.s_params.iter().cloned());
    let certificate = final_certificate(&st, Some(&prefer))?;
    Ok(UniformizeResult { source: x.clone(), tower, certificate, valuation: st.v })
}

fn ring_strings(alg: &PresentedAlgebra, ps: &[Polynomial]) -> Vec<String> {
    alg.ring().fmt_polys(ps)
}

/// Regular-pair certificate at the center of the current valuation.
fn final_certificate(st: &State, prefer: Option<&[Polynomial]>) -> Result<Certificate> {
    let c = center(&st.v)?;
    let ring = st.alg().ring().clone();
    let cert = if c.generators.len() == ring.nvars() {
        let p = RationalPoint::origin(&ring);
        let boundary = boundary_through(st.alg(), &st.boundary, &p)?;
        let mut pref: Vec<Polynomial> = boundary.clone();
        pref.extend(prefer.unwrap_or(&[]).iter().cloned());
        let params = point_parameters(st.alg(), &p, &pref)?;
        Certificate {
            kind: CertificateKind::RegularPair,
            chart: st.alg().clone(),
            point: Some(p),
            center: c.ideal.canonical()?,
            parameters: params,
            boundary,
            d: None,
        }
    } else {
        Certificate {
            kind: CertificateKind::RegularPair,
            chart: st.alg().clone(),
            point: None,
            center: c.ideal.canonical()?,
            parameters: Vec::new(),
            boundary: Vec::new(),
            d: None,
        }
    };
    verify_certificate(&cert)?;
    Ok(cert)
}

/// Output of the formal key lemma.
#[derive(Clone, Debug)]
pub struct FormalKeyResult {
    pub record: ChartResult,
    pub model: ModelScheme,
    pub point: RationalPoint,
    pub l: u32,
    pub d: u32,
    /// `a = u·v^l` in the chart.
    pub unit: Polynomial,
    pub logsmooth: LogSmoothVerdict,
}

/// Blows up `(t̲, s̲, a²)` where `a` lifts `w^l` with `Ann(w^l) = J` in
/// `A/(π, t̲, s̲)`, and presents the `a²`-chart as a `T_{π,m,r,l}` chart.
pub fn formal_key(
    alg: &PresentedAlgebra,
    y: &Ideal,
    x: &RationalPoint,
    t: &[Polynomial],
    s: &[Polynomial],
    v: &[Polynomial],
) -> Result<FormalKeyResult> {
    let ring = alg.ring().clone();
    let pi = ring.pi_poly().ok_or_else(|| Error::pre("formal key needs a designated π"))?;
    if t.is_empty() || v.is_empty() {
        return Err(Error::pre("formal key needs t̲ and v̲"));
    }
    let y_full = alg.relations.with(y.gens().iter().cloned()).prepared()?;
    let ydim = krull_dim(&y_full)?;
    if ydim != v.len() {
        return Err(Error::pre(format!("dim Y = {ydim} but {} boundary parameters", v.len())));
    }
    // claim (i): (π, t̲, s̲) cut out Y near its generic point
    let mut z_gens: Vec<Polynomial> = vec![pi.clone()];
    z_gens.extend(t.iter().cloned());
    z_gens.extend(s.iter().cloned());
    let z = alg.ideal(z_gens.iter().cloned());
    if !z.is_subset(&y_full)? || !regular_at_generic(&z, &y_full, ydim)? {
        return Err(Error::cert("claim (i): (π, t̲, s̲) is not a family of parameters at the generic point of Y"));
    }
    let prod = t.iter().fold(ring.one(), |a, b| &a * b);
    let twist =
        exact_quotient(&alg.relations, &prod, &pi)?.ok_or_else(|| Error::pre("t_0⋯t_m is not a multiple of π"))?;
    if y_full.contains(&twist)? {
        return Err(Error::pre("the twist t_0⋯t_m/π is not a unit at the generic point of Y"));
    }

    let c_alg = alg.quotient(z_gens.iter().cloned());
    let w = v.iter().fold(ring.one(), |a, b| &a * b);
    let ann = ann_lift(&c_alg, &y_full, &w)?;
    let l = ann.exponent;
    let a = ann.lift.clone();
    let mut center: Vec<Polynomial> = t.to_vec();
    center.extend(s.iter().cloned());
    center.push(a.pow(2));
    if !is_open_ideal(alg, &alg.ideal(center.iter().cloned()))? {
        return Err(Error::cert("the center (t̲, s̲, a²) is not open"));
    }
    let idx = center.len() - 1;
    let chart = blowup_chart(alg, &center, idx)?;
    let cring = chart.ring().clone();

    // claim (ii): the strict transform of Z is cut out by (π, t̲', s̲')
    let zt = strict_transform(&chart, &z)?;
    let mut expect: Vec<Polynomial> = vec![cring.pi_poly().unwrap()];
    expect.extend(chart.transforms[..idx].iter().cloned());
    let zt_expect = chart.chart.ideal(expect.iter().cloned());
    if !zt.same_as(&zt_expect)? {
        return Err(Error::cert("claim (ii): the strict transform of Z is not V(π, t̲', s̲')"));
    }

    let mut point = RationalPoint::default();
    for name in cring.vars() {
        let val = x.get(name).filter(|_| ring.index_of(name).is_some()).cloned().unwrap_or_else(Rat::zero);
        point.set(name, val);
    }
    let cvals = point.values(&cring)?;

    // claim (iii): a = u·v^l with u a unit along Z'
    let vl = chart.map(&w.pow(l));
    let u = exact_quotient(&chart.chart.relations, &chart.map(&a), &vl)?
        .ok_or_else(|| Error::cert("claim (iii): a is not divisible by v^l in the chart"))?;
    if !zt.with([u.clone()]).is_unit()? {
        return Err(Error::cert("claim (iii): a/v^l is not invertible along the strict transform of Z"));
    }

    // y_0 = π / (t'_1⋯t'_m·v^d)
    let m = t.len() - 1;
    let d = 2 * l * (m as u32 + 1);
    let tp: Vec<Polynomial> = chart.transforms[..t.len()].to_vec();
    let vs: Vec<Polynomial> = v.iter().map(|g| chart.map(g)).collect();
    let rest = tp[1..]
        .iter()
        .chain(vs.iter().collect::<Vec<_>>().iter().copied())
        .fold(cring.one(), |acc, g| &acc * g);
    let rest = &rest * &vs.iter().fold(cring.one(), |acc, g| &acc * &g.pow(d - 1));
    let y0 = exact_quotient(&chart.chart.relations, &cring.pi_poly().unwrap(), &rest)?
        .ok_or_else(|| Error::cert("π is not divisible by t'_1⋯t'_m·v^d"))?;
    let y0_unit = exact_quotient(&chart.chart.relations, &y0, &tp[0])?
        .ok_or_else(|| Error::cert("y_0 is not a multiple of t'_0"))?;
    if y0_unit.eval(&cvals).is_zero() {
        return Err(Error::cert("y_0/t'_0 vanishes at x'"));
    }
    let mut monomials: Vec<Polynomial> = vec![y0];
    monomials.extend(tp[1..].iter().cloned());
    monomials.extend(vs.iter().cloned());
    let r = v.len();
    let mut lambda = vec![1i64; m + 1];
    lambda.extend(core::iter::repeat_n(d as i64, r));
    let pair = MonoidPair::new(AffineMonoid::free(m + r + 1), lambda)?;
    let model = ModelScheme::new(chart.chart.clone(), pair, monomials)?;
    let ls = logsmooth_check(&model, &point)?;
    if !ls.smooth {
        return Err(Error::cert("claim (i) of the fiber criterion: the stratum W' is not smooth at x'"));
    }
    if !ls.equality {
        return Err(Error::cert(format!(
            "claim (ii) of the fiber criterion: codim W' = {} but rank = {}",
            ls.codim, ls.rank
        )));
    }
    Ok(FormalKeyResult { record: chart, model, point, l, d, unit: u, logsmooth: ls })
}

/// `N`-coordinates of the valuation: one vector per level, in the basis of
/// `Q^gp` used by the polyhedral module.
fn n_vector(model: &ModelScheme, v: &MonomialValuation) -> Result<Vec<Vec<Rat>>> {
    let basis = model.pair.q.group_basis()?;
    let gens = model.pair.q.generators();
    let coords: Vec<Vec<Rat>> = gens
        .iter()
        .map(|g| {
            lattice_coords(&basis, g)
                .map(|c| c.iter().map(|&x| Rat::from_integer(x.into())).collect())
                .ok_or_else(|| Error::cert("generator outside Q^gp"))
        })
        .collect::<Result<_>>()?;
    let mut vals: Vec<Vec<Rat>> = Vec::new();
    for u in &model.chart {
        vals.push(v.value(u)?.ok_or_else(|| Error::pre("chart monomial has infinite value"))?);
    }
    let h = v.nominal_height();
    let k = basis.len();
    let ct: Vec<Vec<Rat>> = (0..k).map(|j| coords.iter().map(|c| c[j].clone()).collect()).collect();
    let mut out = Vec::new();
    for lvl in 0..h {
        let target: Vec<Rat> = vals.iter().map(|x| x[lvl].clone()).collect();
        // n with <n, c_i> = target_i, i.e. n·Cᵀ = target
        out.push(solve_left(&ct, &target).ok_or_else(|| Error::cert("valuation is not a point of N"))?);
    }
    Ok(out)
}

/// First cone whose lexicographic coefficients are all nonnegative.
fn locate(fan: &HeightedFan, nv: &[Vec<Rat>]) -> Result<(usize, Vec<bool>)> {
    for (ci, cone) in fan.cones.iter().enumerate() {
        let u: Vec<Vec<Rat>> = cone.iter().map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect()).collect();
        let mut coeffs: Vec<Vec<Rat>> = Vec::new();
        let mut ok = true;
        for level in nv {
            match solve_left(&u, level) {
                Some(a) => coeffs.push(a),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let k = cone.len();
        let lexes: Vec<Vec<Rat>> = (0..k).map(|j| coeffs.iter().map(|a| a[j].clone()).collect()).collect();
        let sign =
            |v: &[Rat]| v.iter().find(|x| !x.is_zero()).map(|x| if x.is_positive() { 1 } else { -1 }).unwrap_or(0);
        if lexes.iter().all(|a| sign(a) >= 0) {
            return Ok((ci, lexes.iter().map(|a| sign(a) > 0).collect()));
        }
    }
    Err(Error::cert("the valuation lies in no cone of the fan"))
}

/// Base change `π = ϖ^d` and the toric chart of a cone, applied to a log
/// smooth chart: adjoin `w` with `u^{q_i} = w^{⟨u_j, q_i⟩}`, `Πw = ϖ`.
fn toric_chart(
    model: &ModelScheme,
    fan: &HeightedFan,
    cone: usize,
) -> Result<(ChartMonoid, PresentedAlgebra, Vec<String>)> {
    let cm = chart_monoid(&fan.cones[cone], &model.pair, fan.d)?;
    let ring = model.algebra.ring().clone();
    let k = cm.pair.q.generators().len();
    let mut taken: Vec<String> = ring.vars().to_vec();
    let mut wnames = Vec::new();
    for j in 0..k {
        let nm = ring.fresh_name(&format!("w{j}"), &taken);
        taken.push(nm.clone());
        wnames.push(nm);
    }
    let varpi = ring.fresh_name("varpi", &taken);
    let mut names: Vec<String> = ring.vars().to_vec();
    names.extend(wnames.iter().cloned());
    names.push(varpi.clone());
    let cring = Ring::with_limits(names, Some(&varpi), ring.limits().clone())?;
    let n = ring.nvars();
    let m = cring.nvars();
    let emb: Vec<usize> = (0..n).collect();
    let w: Vec<Polynomial> = (0..k).map(|j| cring.gen(n + j)).collect();
    let vp = cring.gen(m - 1);
    let mut rels: Vec<Polynomial> = model.algebra.relations.gens().iter().map(|g| g.embed(m, &emb)).collect();
    for (u, row) in model.chart.iter().zip(&cm.pullback) {
        let mono = row.iter().enumerate().fold(cring.one(), |acc, (j, &e)| &acc * &w[j].pow(e as u32));
        rels.push(&u.embed(m, &emb) - &mono);
    }
    let pi_old = cring.gen(ring.pi().unwrap());
    rels.push(&pi_old - &vp.pow(fan.d as u32));
    rels.push(&w.iter().fold(cring.one(), |a, b| &a * b) - &vp);
    let (sat, _) = saturate(&Ideal::new(cring.clone(), rels), &vp)?;
    let alg = PresentedAlgebra::new(Ideal::new(cring.clone(), sat.canonical()?))
        .traced(format!("toric chart of cone {cone} after π = ϖ^{}", fan.d));
    Ok((cm, alg, wnames))
}

/// Subdivision step on a log smooth chart with the valuation `v`.
fn subdivision_step(
    model: &ModelScheme,
    v: &MonomialValuation,
    x: &RationalPoint,
    max_iters: u64,
) -> Result<(SubdivisionRecord, Certificate)> {
    if !is_admissible_pair(&model.pair)?.admissible {
        return Err(Error::pre("chart monoid pair is not admissible"));
    }
    let fan = semistable_subdivision(&model.pair, max_iters)?;
    let nv = n_vector(model, v)?;
    let (cone, positive) = locate(&fan, &nv)?;
    let (cm, chart, wnames) = toric_chart(model, &fan, cone)?;
    let cring = chart.ring().clone();
    let mut point = RationalPoint::default();
    for name in cring.vars() {
        point.set(name, x.get(name).cloned().unwrap_or_else(Rat::zero));
    }
    let mut params: Vec<Polynomial> = Vec::new();
    let mut units = cring.one();
    for (j, nm) in wnames.iter().enumerate() {
        let g = cring.var(nm)?;
        if positive[j] {
            params.push(g);
        } else {
            point.set(nm, Rat::one());
            units = &units * &g;
        }
    }
    if params.is_empty() {
        return Err(Error::cert("the valuation is not centered on the closed fiber of the chart"));
    }
    params[0] = &params[0] * &units;
    // old monoid coordinates follow the w's
    let vals: Vec<Rat> = cring.vars().iter().map(|nm| point.get(nm).cloned().unwrap_or_else(Rat::zero)).collect();
    let n_old = model.algebra.ring().nvars();
    for (i, name) in model.algebra.ring().vars().iter().enumerate() {
        if let Some(u) = model.chart.iter().position(|u| u.as_variable() == Some(i)) {
            let row = &cm.pullback[u];
            let val = row
                .iter()
                .enumerate()
                .fold(Rat::one(), |acc, (j, &e)| acc * num_traits::pow(vals[n_old + j].clone(), e as usize));
            point.set(name, val);
        }
    }
    let cert = Certificate {
        kind: CertificateKind::Semistable,
        chart: chart.clone(),
        point: Some(point),
        center: Vec::new(),
        parameters: params,
        boundary: Vec::new(),
        d: Some(fan.d),
    };
    verify_certificate(&cert)?;
    let rec = SubdivisionRecord {
        step: "step 5 (subdivision)".into(),
        model: model.clone(),
        fan,
        cone,
        monoid: cm,
        chart,
        chart_vars: wnames,
    };
    Ok((rec, cert))
}

/// Options of the formal driver.
#[derive(Clone, Debug, Default)]
pub struct FormalOptions {
    /// Open ideals to blow up before the key step (one per parameter),
    /// given in the model's ring.
    pub closure_ideals: Vec<Vec<String>>,
    pub pre_blowup: Option<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct FormalResult {
    pub source: ModelScheme,
    pub tower: Vec<TowerRecord>,
    pub certificate: Certificate,
    pub d: i64,
}

/// Uniformizes a π-positive monomial valuation on a model scheme, ending
/// with a semistable chart after a base change.
pub fn uniformize_formal(
    model: &ModelScheme,
    v: &MonomialValuation,
    oracle: &dyn HeightOneOracle,
    opts: &FormalOptions,
) -> Result<FormalResult> {
    let ring = model.algebra.ring().clone();
    if v.ring() != &ring {
        return Err(Error::RingMismatch);
    }
    let pi_idx = ring.pi().ok_or_else(|| Error::pre("the model needs a designated π"))?;
    let h = effective_height(v);
    if h == 0 {
        return Err(Error::pre("the valuation is trivial"));
    }
    let max_iters = ring.limits().max_subdiv_iters;
    let mut st = State { v: v.clone(), boundary: Vec::new() };
    let mut tower: Vec<TowerRecord> = Vec::new();
    let input = model.clone();
    let mut model = model.clone();
    if let Some(pre) = &opts.pre_blowup {
        let gens = ring.parse_all(pre)?;
        if !is_open_ideal(&model.algebra, &model.algebra.ideal(gens.iter().cloned()))? {
            return Err(Error::pre("the extra blowup is not admissible"));
        }
        let j = choose_chart(&st.v, &gens)?;
        let rec = st.blow_up("pre-blowup", &gens, j)?;
        model = pulled_model(&model, &rec.chart)?;
        tower.push(TowerRecord::Blowup(rec));
    }

    // already log smooth at the center: only the subdivision is needed
    let c = center(&st.v)?;
    if c.generators.len() == st.alg().ring().nvars() {
        let p = RationalPoint::origin(st.alg().ring());
        let ls = logsmooth_check(&model, &p)?;
        if ls.log_smooth && !is_semistable_pair(&model.pair) {
            let (rec, cert) = subdivision_step(&model, &st.v, &p, max_iters)?;
            let d = rec.fan.d;
            tower.push(TowerRecord::Subdivision(rec));
            return Ok(FormalResult { source: input, tower, certificate: cert, d });
        }
    }
    if h < 2 {
        return Err(Error::pre(
            "the valuation needs height at least 2 unless the chart is already log smooth at its center",
        ));
    }

    // Step 1 (entry condition): strictly semistable at the head center
    let head = decompose(&st.v, 1)?.head;
    let hc = center(&head)?;
    if !hc.generators.contains(&pi_idx) {
        return Err(Error::pre("the head valuation must be π-positive"));
    }
    let cring = st.alg().ring().clone();
    let t: Vec<Polynomial> = model
        .chart
        .iter()
        .filter(|u| matches!(head.value(u), Ok(Some(ref x)) if x.iter().any(|c| !c.is_zero())))
        .cloned()
        .collect();
    if t.is_empty() {
        return Err(Error::pre("no chart monomial vanishes at the head center"));
    }
    let ydim = krull_dim(&hc.ideal)?;
    let pi = cring.pi_poly().unwrap();

    // Step 2: extend the parameters by principalizing supplied ideals
    if !opts.closure_ideals.is_empty() {
        if opts.closure_ideals.len() != t.len() {
            return Err(Error::pre(format!("{} closure ideals for {} parameters", opts.closure_ideals.len(), t.len())));
        }
        let mut product: Vec<Polynomial> = vec![cring.one()];
        for ci in &opts.closure_ideals {
            let gi = cring.parse_all(ci)?;
            product = product.iter().flat_map(|p| gi.iter().map(move |g| p * g)).collect();
        }
        if !is_open_ideal(st.alg(), &st.alg().ideal(product.iter().cloned()))? {
            return Err(Error::pre("step 2: the product of the closure ideals is not open"));
        }
        let j = choose_chart(&st.v, &product)?;
        let rec = st.blow_up("step 2", &product, j)?;
        model = pulled_model(&model, &rec.chart)?;
        tower.push(TowerRecord::Blowup(rec));
    }

    // Step 3: complete (π, t̲) by center generators s̲
    let cring = st.alg().ring().clone();
    let head = decompose(&st.v, 1)?.head;
    let hc = center(&head)?;
    let t: Vec<Polynomial> = model
        .chart
        .iter()
        .filter(|u| matches!(head.value(u), Ok(Some(ref x)) if x.iter().any(|c| !c.is_zero())))
        .cloned()
        .collect();
    let mut base: Vec<Polynomial> = vec![pi.clone()];
    base.extend(t.iter().cloned());
    let others: Vec<Polynomial> = hc
        .generators
        .iter()
        .map(|&i| cring.gen(i))
        .filter(|g| !base.contains(g) && !t.iter().any(|u| u == g))
        .collect();
    let s = generic_parameters(st.alg(), &hc.ideal, &others, &base, ydim)?;

    // Step 4: the residual valuation on Y
    let residual = decompose(&st.v, 1)?.residual;
    let y_alg = residual.chart().clone();
    let sub = uniformize_scheme(&y_alg, &[], &residual, oracle, &SchemeOptions::default())?;
    for rec in &sub.tower {
        let TowerRecord::Blowup(b) = rec else { return Err(Error::pre("unexpected record on Y")) };
        let ring = st.alg().ring().clone();
        let mut gens = ring.parse_all(&ring_strings(&b.chart.source, &b.chart.center))?;
        gens.push(ring.pi_poly().unwrap());
        let rec = st.blow_up("step 4 (lifted from Y)", &gens, b.chart.index)?;
        model = pulled_model(&model, &rec.chart)?;
        tower.push(TowerRecord::Blowup(rec));
    }
    let y_cert = &sub.certificate;
    let cring = st.alg().ring().clone();
    let vparams: Vec<Polynomial> = cring.parse_all(&y_cert.chart.ring().fmt_polys(&y_cert.parameters))?;

    // Step 5: the formal key lemma, then the subdivision
    let head = decompose(&st.v, 1)?.head;
    let hc = center(&head)?;
    let t: Vec<Polynomial> = model
        .chart
        .iter()
        .filter(|u| matches!(head.value(u), Ok(Some(ref x)) if x.iter().any(|c| !c.is_zero())))
        .cloned()
        .collect();
    let s = if sub.tower.is_empty() && opts.closure_ideals.is_empty() {
        s
    } else {
        let mut base: Vec<Polynomial> = vec![pi.clone()];
        base.extend(t.iter().cloned());
        let others: Vec<Polynomial> =
            hc.generators.iter().map(|&i| cring.gen(i)).filter(|g| !base.contains(g)).collect();
        generic_parameters(st.alg(), &hc.ideal, &others, &base, krull_dim(&hc.ideal)?)?
    };
    let xp = closed_point(&center(&st.v)?, &cring)?;
    let fk = formal_key(st.alg(), &hc.ideal, &xp, &t, &s, &vparams)?;
    let rec = st.apply("step 5 (formal key lemma)", fk.record.clone())?;
    if closed_point(&center(&st.v)?, st.alg().ring())? != fk.point {
        return Err(Error::cert("the valuation's center is not the point of the formal key lemma"));
    }
    tower.push(TowerRecord::Blowup(rec));
    let (srec, cert) = subdivision_step(&fk.model, &st.v, &fk.point, max_iters)?;
    let d = srec.fan.d;
    tower.push(TowerRecord::Subdivision(srec));
    Ok(FormalResult { source: input, tower, certificate: cert, d })
}

fn is_semistable_pair(p: &MonoidPair) -> bool {
    let n = p.q.ambient_rank();
    p.q.generators().len() == n && p.lambda1.iter().all(|&x| x == 1) && *p == MonoidPair::semistable(n - 1)
}

/// The model's monoid chart read on a blowup chart.
fn pulled_model(model: &ModelScheme, chart: &ChartResult) -> Result<ModelScheme> {
    let monos: Vec<Polynomial> = model.chart.iter().map(|u| chart.map(u)).collect();
    ModelScheme::new(chart.chart.clone(), model.pair.clone(), monos)
}

/// A tower record reduced to strings, enough to replay it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecordSpec {
    Blowup {
        step: String,
        center: Vec<String>,
        index: usize,
        chart_vars: Vec<String>,
        chart_relations: Vec<String>,
    },
    Subdivision {
        step: String,
        generators: Vec<Vec<i64>>,
        lambda: Vec<i64>,
        chart_monomials: Vec<String>,
        d: i64,
        cones: Vec<Vec<Vec<i64>>>,
        cone: usize,
        chart_vars: Vec<String>,
        chart_relations: Vec<String>,
    },
}

impl TowerRecord {
    pub fn spec(&self) -> Result<RecordSpec> {
        Ok(match self {
            TowerRecord::Blowup(b) => RecordSpec::Blowup {
                step: b.step.clone(),
                center: b.chart.source.ring().fmt_polys(&b.chart.center),
                index: b.chart.index,
                chart_vars: b.chart.ring().vars().to_vec(),
                chart_relations: b.chart.chart.relations.fmt_canonical()?,
            },
            TowerRecord::Subdivision(s) => RecordSpec::Subdivision {
                step: s.step.clone(),
                generators: s.model.pair.q.generators().to_vec(),
                lambda: s.model.pair.lambda1.clone(),
                chart_monomials: s.model.algebra.ring().fmt_polys(&s.model.chart),
                d: s.fan.d,
                cones: s.fan.cones.clone(),
                cone: s.cone,
                chart_vars: s.chart.ring().vars().to_vec(),
                chart_relations: s.chart.relations.fmt_canonical()?,
            },
        })
    }
}

/// What a replay recomputed.
#[derive(Clone, Debug)]
pub struct ReplayReport {
    pub records: usize,
    pub final_chart: PresentedAlgebra,
    pub certificate: CertificateReport,
}

/// Re-executes a tower from its source and re-checks the certificate.
pub fn replay(source: &PresentedAlgebra, records: &[RecordSpec], cert: &Certificate) -> Result<ReplayReport> {
    let mut cur = source.clone();
    for (k, r) in records.iter().enumerate() {
        match r {
            RecordSpec::Blowup { center, index, chart_vars, chart_relations, .. } => {
                let gens = cur.ring().parse_all(center)?;
                let res = blowup_chart(&cur, &gens, *index)?;
                if res.ring().vars() != chart_vars.as_slice() {
                    return Err(Error::cert(format!("record {k}: chart variables differ from the stored ones")));
                }
                if res.chart.relations.fmt_canonical()? != *chart_relations {
                    return Err(Error::cert(format!("record {k}: chart relations differ from the stored ones")));
                }
                cur = res.chart;
            }
            RecordSpec::Subdivision {
                generators,
                lambda,
                chart_monomials,
                d,
                cones,
                cone,
                chart_vars,
                chart_relations,
                ..
            } => {
                let q = AffineMonoid::new(lambda.len(), generators.clone())?;
                let pair = MonoidPair::new(q, lambda.clone())?;
                let monos = cur.ring().parse_all(chart_monomials)?;
                let model = ModelScheme::new(cur.clone(), pair, monos)?;
                let fan = semistable_subdivision(&model.pair, cur.ring().limits().max_subdiv_iters)?;
                if fan.d != *d || fan.cones != *cones {
                    return Err(Error::cert(format!("record {k}: recomputed fan differs from the stored one")));
                }
                let (_, chart, _) = toric_chart(&model, &fan, *cone)?;
                if chart.ring().vars() != chart_vars.as_slice() || chart.relations.fmt_canonical()? != *chart_relations
                {
                    return Err(Error::cert(format!("record {k}: toric chart differs from the stored one")));
                }
                cur = chart;
            }
        }
    }
    if cur.ring().vars() != cert.chart.ring().vars()
        || cur.relations.fmt_canonical()? != cert.chart.relations.fmt_canonical()?
    {
        return Err(Error::cert("the certificate is not about the final chart of the tower"));
    }
    let report = verify_certificate(cert)?;
    Ok(ReplayReport { records: records.len(), final_chart: cur, certificate: report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{standard_semistable, t_model};

    fn cone() -> PresentedAlgebra {
        PresentedAlgebra::parse(&["x", "y", "z"], None, &["x*y - z^2"]).unwrap()
    }

    fn cone_valuation() -> MonomialValuation {
        MonomialValuation::from_ints(cone(), &[vec![2, 0, 1], vec![-1, 1, 0]]).unwrap()
    }

    #[test]
    fn regular_height_one_is_immediate() {
        let a = PresentedAlgebra::parse(&["x", "y"], None, &[] as &[&str]).unwrap();
        let v = MonomialValuation::from_ints(a.clone(), &[vec![1, 2]]).unwrap();
        let r = uniformize_scheme(&a, &[], &v, &IdentityOracle, &SchemeOptions::default()).unwrap();
        assert!(r.tower.is_empty());
        assert_eq!(r.certificate.kind, CertificateKind::RegularPair);
    }

    #[test]
    fn cone_non_log() {
        let r = uniformize_scheme(&cone(), &[], &cone_valuation(), &ToricOracle::default(), &SchemeOptions::default())
            .unwrap();
        assert_eq!(r.tower.len(), 1);
        let rel = r.certificate.chart.relations.fmt_canonical().unwrap();
        assert_eq!(rel, ["y*z'^2 - x"]);
        let specs: Vec<RecordSpec> = r.tower.iter().map(|t| t.spec().unwrap()).collect();
        replay(&cone(), &specs, &r.certificate).unwrap();
    }

    #[test]
    fn cone_with_closure_ideal() {
        let opts = SchemeOptions { closure_ideals: vec![vec!["x".into(), "z".into()]], pre_blowup: None };
        let r = uniformize_scheme(&cone(), &[], &cone_valuation(), &ToricOracle::default(), &opts).unwrap();
        assert_eq!(r.tower.len(), 2);
    }

    #[test]
    fn cone_log() {
        let d = vec![Ideal::parse(cone().ring(), &["y"]).unwrap()];
        let r = uniformize_scheme(&cone(), &d, &cone_valuation(), &ToricOracle::default(), &SchemeOptions::default())
            .unwrap();
        assert_eq!(r.certificate.chart.relations.fmt_canonical().unwrap(), ["y^3*z'^2 - x"]);
        let b: Vec<String> = r.certificate.chart.ring().fmt_polys(&r.certificate.boundary);
        assert_eq!(b, ["y"]);
    }

    #[test]
    fn extra_blowup_first() {
        for pre in [vec!["x", "y", "z"], vec!["y", "z"]] {
            let opts =
                SchemeOptions { closure_ideals: vec![], pre_blowup: Some(pre.iter().map(|s| s.to_string()).collect()) };
            let r = uniformize_scheme(&cone(), &[], &cone_valuation(), &ToricOracle::default(), &opts).unwrap();
            verify_certificate(&r.certificate).unwrap();
        }
    }

    #[test]
    fn lying_oracle_is_caught() {
        let e =
            uniformize_scheme(&cone(), &[], &cone_valuation(), &LyingOracle, &SchemeOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Certificate(_)), "{e:?}");
    }

    #[test]
    fn tampered_tower_is_caught() {
        let r = uniformize_scheme(&cone(), &[], &cone_valuation(), &ToricOracle::default(), &SchemeOptions::default())
            .unwrap();
        let mut specs: Vec<RecordSpec> = r.tower.iter().map(|t| t.spec().unwrap()).collect();
        if let RecordSpec::Blowup { chart_relations, .. } = &mut specs[0] {
            chart_relations[0] = "y*z'^2 - x^2".into();
        }
        assert!(matches!(replay(&cone(), &specs, &r.certificate), Err(Error::Certificate(_))));
    }

    #[test]
    fn formal_key_curated() {
        let alg = PresentedAlgebra::parse(&["t0", "t1", "s", "pi"], Some("pi"), &["t0*t1 - pi"]).unwrap();
        let ring = alg.ring().clone();
        let y = Ideal::parse(&ring, &["t0", "t1", "pi"]).unwrap();
        let t = ring.parse_all(&["t0", "t1"]).unwrap();
        let v = ring.parse_all(&["s"]).unwrap();
        let r = formal_key(&alg, &y, &RationalPoint::origin(&ring), &t, &[], &v).unwrap();
        assert_eq!((r.l, r.d), (1, 4));
        assert_eq!(r.model.pair.lambda1, vec![1, 1, 4]);
        assert!(r.logsmooth.log_smooth);

        // s̲ that is not a parameter on the stratum
        let bad = ring.parse_all(&["s^2"]).unwrap();
        let e = formal_key(&alg, &y, &RationalPoint::origin(&ring), &t, &bad, &v).unwrap_err();
        assert!(format!("{e}").contains("claim (i)"), "{e}");
    }

    #[test]
    fn formal_driver_curated() {
        let alg = PresentedAlgebra::parse(&["t0", "t1", "s", "pi"], Some("pi"), &["t0*t1 - pi"]).unwrap();
        let ring = alg.ring().clone();
        let model =
            ModelScheme::new(alg.clone(), MonoidPair::semistable(1), ring.parse_all(&["t0", "t1"]).unwrap()).unwrap();
        let v = MonomialValuation::from_ints(alg, &[vec![1, 1, 0, 2], vec![0, 1, 1, 1]]).unwrap();
        let r = uniformize_formal(&model, &v, &ToricOracle::default(), &FormalOptions::default()).unwrap();
        assert_eq!(r.certificate.kind, CertificateKind::Semistable);
        assert_eq!(r.d, 4);
        assert!(matches!(r.tower.last(), Some(TowerRecord::Subdivision(_))));
    }

    #[test]
    fn formal_driver_subdivision_only() {
        let t = t_model(1, 1, 1).unwrap();
        let v = MonomialValuation::from_ints(t.algebra.clone(), &[vec![2, 3, 1, 7]]).unwrap();
        let r = uniformize_formal(&t, &v, &ToricOracle::default(), &FormalOptions::default()).unwrap();
        assert_eq!(r.tower.len(), 1);
        assert_eq!(r.d, 2);
        let _ = standard_semistable(1).unwrap();
    }
}
