//! One function per subcommand: JSON document in, JSON document out.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use valuform_core::blowup::{ann_lift, blowup_chart, key_blowup, strict_transform};
use valuform_core::models::{
    logsmooth_check, semistable_params_check, t_model, toriclem_verify, LogSmoothVerdict, SemistableParamsVerdict,
};
use valuform_core::monoid::{
    gp_invariants, is_admissible_pair, monoid_algebra, saturate_monoid, AffineMonoid, SaturationLattice,
};
use valuform_core::pipeline::{
    formal_key, oracle_by_name, replay, uniformize_formal, uniformize_scheme, verify_certificate, FormalOptions,
    SchemeOptions,
};
use valuform_core::poly::{
    eliminate, fmt_rat, ideal_quotient, ideal_rel, krull_dim, saturate, Ideal, Limits, MonomialOrder, RationalPoint,
    RelationVerdict, SmoothVerdict,
};
use valuform_core::polyhedral::{chart_monoid, semistable_subdivision, verify_subdivision};
use valuform_core::valuation::{center, decompose, effective_height, lift_center, CenterResult, MonomialValuation};

use crate::docs::{
    from_value, parse_point, point_doc, AlgebraDoc, FanDoc, ModelDoc, PairDoc, PointDoc, TowerDoc, ValuationDoc,
};
use crate::error::CliError;

/// Global flags shared by every subcommand.
#[derive(Clone, Debug)]
pub struct Options {
    pub order: MonomialOrder,
    pub limits: Limits,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options { order: MonomialOrder::GrevLex, limits: Limits::default(), seed: 0 }
    }
}

pub fn parse_order(s: &str) -> Result<MonomialOrder, CliError> {
    match s {
        "grevlex" => Ok(MonomialOrder::GrevLex),
        "lex" => Ok(MonomialOrder::Lex),
        _ => Err(CliError::Usage(format!("unknown order `{s}` (grevlex, lex)"))),
    }
}

#[derive(Clone, Debug)]
pub struct JobSpec {
    pub command: String,
    pub op: Option<String>,
    pub input: Value,
    pub options: Options,
}

/// A successful run; `passed` is false when a check ran but rejected.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub output: Value,
    pub passed: bool,
}

impl Outcome {
    fn ok(output: Value) -> Self {
        Outcome { output, passed: true }
    }
}

pub fn run(job: &JobSpec) -> Result<Outcome, CliError> {
    let o = &job.options;
    let i = &job.input;
    let op = job.op.as_deref();
    match job.command.as_str() {
        "gb" => gb(i, o),
        "ideal" => ideal(op.ok_or_else(|| usage("ideal needs an operation"))?, i, o),
        "blowup" => blowup(i, o),
        "strict-transform" => strict(i, o),
        "annlift" => annlift(i, o),
        "keylemma" => keylemma(i, o),
        "monoid" => monoid(op.ok_or_else(|| usage("monoid needs an operation"))?, i),
        "toric-chart" => toric_chart(i, o),
        "toric-verify" => toric_verify(i),
        "subdivide" => subdivide(i, o),
        "verify-fan" => verify_fan(i),
        "chart-monoid" => chart_monoid_cmd(i),
        "logsmooth" => logsmooth(i, o),
        "semistable-check" => semistable(i, o),
        "val" => val(op.ok_or_else(|| usage("val needs an operation"))?, i, o),
        "uniformize" => uniformize(i, o),
        "formal-key" => formal_key_cmd(i, o),
        "formal-uniformize" => formal_uniformize(i, o),
        "replay" => replay_cmd(i, o),
        "corpus" => {
            let reports = crate::corpus::run_all(o)?;
            let passed = reports.iter().all(|r| r.passed);
            Ok(Outcome { output: serde_json::to_value(&reports).map_err(CliError::from)?, passed })
        }
        c => Err(usage(&format!("unknown command `{c}`"))),
    }
}

fn usage(m: &str) -> CliError {
    CliError::Usage(m.into())
}

fn smooth_json(v: &SmoothVerdict) -> Value {
    json!({
        "regular": v.regular,
        "jacobian_rank": v.jacobian_rank,
        "expected_rank": v.expected_rank,
        "corank": v.corank,
    })
}

fn logsmooth_json(v: &LogSmoothVerdict, ring: &valuform_core::Ring) -> Value {
    json!({
        "stratum": ring.fmt_polys(&v.stratum),
        "fiber_dim": v.fiber_dim,
        "stratum_dim": v.stratum_dim,
        "codim": v.codim,
        "rank": v.rank,
        "smooth": v.smooth,
        "equality": v.equality,
        "pi_powers_clean": v.pi_powers_clean,
        "log_smooth": v.log_smooth,
    })
}

fn semistable_json(v: &SemistableParamsVerdict, ring: &valuform_core::Ring) -> Value {
    json!({
        "passed": v.passed,
        "unit": ring.fmt_poly(&v.unit),
        "twisted": v.twisted,
        "invertible": v.invertible,
        "stratum_smooth": v.stratum_smooth,
        "codim": v.codim,
        "m": v.m,
        "logsmooth": logsmooth_json(&v.logsmooth, ring),
        "normalized": v.normalized.as_ref().map(|n| ring.fmt_polys(n)),
    })
}

fn verdict_name(v: RelationVerdict) -> &'static str {
    match v {
        RelationVerdict::Equal => "equal",
        RelationVerdict::FirstInSecond => "first-in-second",
        RelationVerdict::SecondInFirst => "second-in-first",
        RelationVerdict::Incomparable => "incomparable",
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GbInput {
    vars: Vec<String>,
    #[serde(default)]
    pi: Option<String>,
    generators: Vec<String>,
}

fn gb(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let inp: GbInput = from_value(i)?;
    let alg = AlgebraDoc { vars: inp.vars, pi: inp.pi, relations: vec![], point: None }.build(&o.limits)?;
    let ring = alg.ring().clone();
    let id = Ideal::parse(&ring, &inp.generators)?.groebner(&o.order)?;
    let basis = id.cached_basis().expect("basis was just computed");
    Ok(Outcome::ok(json!({
        "order": o.order.name(),
        "basis": ring.fmt_polys(&basis.polys),
    })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IdealInput {
    algebra: AlgebraDoc,
    ideal: Vec<String>,
    #[serde(default)]
    f: Option<String>,
    #[serde(default)]
    other: Option<Vec<String>>,
    #[serde(default)]
    eliminate: Option<Vec<String>>,
}

fn ideal(op: &str, i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let inp: IdealInput = from_value(i)?;
    let alg = inp.algebra.build(&o.limits)?;
    let ring = alg.ring().clone();
    let id = alg.ideal(ring.parse_all(&inp.ideal)?);
    let f = || -> Result<_, CliError> {
        let s = inp.f.as_deref().ok_or_else(|| usage("missing field `f`"))?;
        Ok(ring.parse(s)?)
    };
    let out = match op {
        "quotient" => json!({ "ideal": ideal_quotient(&id, &f()?)?.fmt_canonical()? }),
        "saturate" => {
            let (s, k) = saturate(&id, &f()?)?;
            json!({ "ideal": s.fmt_canonical()?, "exponent": k })
        }
        "eliminate" => {
            let names = inp.eliminate.as_ref().ok_or_else(|| usage("missing field `eliminate`"))?;
            let idx = names
                .iter()
                .map(|n| ring.index_of(n).ok_or_else(|| usage(&format!("unknown variable `{n}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            json!({ "ideal": eliminate(&id, &idx)?.fmt_canonical()? })
        }
        "dim" => json!({ "dim": krull_dim(&id)? }),
        "relate" => {
            let other = inp.other.as_ref().ok_or_else(|| usage("missing field `other`"))?;
            let j = alg.ideal(ring.parse_all(other)?);
            let r = ideal_rel(&id, &j)?;
            json!({
                "verdict": verdict_name(r.verdict),
                "first_in_second": r.first_in_second,
                "second_in_first": r.second_in_first,
            })
        }
        _ => return Err(usage(&format!("unknown ideal operation `{op}`"))),
    };
    Ok(Outcome::ok(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BlowupInput {
    algebra: AlgebraDoc,
    center: Vec<String>,
    index: usize,
    #[serde(default)]
    ideal: Option<Vec<String>>,
}

fn blowup_parts(i: &Value, o: &Options) -> Result<(BlowupInput, valuform_core::blowup::ChartResult), CliError> {
    let inp: BlowupInput = from_value(i)?;
    let alg = inp.algebra.build(&o.limits)?;
    let center = alg.ring().parse_all(&inp.center)?;
    let res = blowup_chart(&alg, &center, inp.index)?;
    Ok((inp, res))
}

fn chart_json(res: &valuform_core::blowup::ChartResult) -> Result<Value, CliError> {
    let r = res.ring();
    Ok(json!({
        "chart": AlgebraDoc::of(&res.chart)?,
        "index": res.index,
        "var_images": r.fmt_polys(&res.var_images),
        "transforms": r.fmt_polys(&res.transforms),
        "exceptional": r.fmt_poly(&res.exceptional),
        "saturation_exponents": [res.saturation_exponents.0, res.saturation_exponents.1],
    }))
}

fn blowup(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let (_, res) = blowup_parts(i, o)?;
    Ok(Outcome::ok(chart_json(&res)?))
}

fn strict(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let (inp, res) = blowup_parts(i, o)?;
    let gens = inp.ideal.as_ref().ok_or_else(|| usage("missing field `ideal`"))?;
    let k = Ideal::parse(res.source.ring(), gens)?;
    let st = strict_transform(&res, &k)?;
    let mut out = chart_json(&res)?;
    out["strict_transform"] = json!(st.fmt_canonical()?);
    Ok(Outcome::ok(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnInput {
    algebra: AlgebraDoc,
    j: Vec<String>,
    b: String,
}

fn annlift(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let inp: AnnInput = from_value(i)?;
    let alg = inp.algebra.build(&o.limits)?;
    let ring = alg.ring().clone();
    let r = ann_lift(&alg, &Ideal::parse(&ring, &inp.j)?, &ring.parse(&inp.b)?)?;
    Ok(Outcome::ok(json!({
        "exponent": r.exponent,
        "lift": ring.fmt_poly(&r.lift),
        "stabilized": r.stabilized,
        "correction": r.correction.as_ref().map(|c| ring.fmt_poly(c)),
    })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KeyInput {
    algebra: AlgebraDoc,
    y: Vec<String>,
    #[serde(default)]
    point: Option<PointDoc>,
    t: Vec<String>,
    #[serde(default)]
    b: Option<String>,
    #[serde(default)]
    log: bool,
}

fn point_or_origin(p: &Option<PointDoc>, ring: &valuform_core::Ring) -> Result<RationalPoint, CliError> {
    match p {
        Some(p) => parse_point(p),
        None => Ok(RationalPoint::origin(ring)),
    }
}

fn keylemma(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let inp: KeyInput = from_value(i)?;
    let alg = inp.algebra.build(&o.limits)?;
    let ring = alg.ring().clone();
    let y = Ideal::parse(&ring, &inp.y)?;
    let p = point_or_origin(&inp.point, &ring)?;
    let t = ring.parse_all(&inp.t)?;
    let b = inp.b.as_deref().map(|s| ring.parse(s)).transpose()?;
    let r = key_blowup(&alg, &y, &p, &t, b.as_ref(), inp.log)?;
    let cr = r.chart.ring().clone();
    let passed = r.regularity.regular && r.parameters.regular;
    Ok(Outcome {
        passed,
        output: json!({
            "b": ring.fmt_poly(&r.b),
            "exponent": r.ann.exponent,
            "a": ring.fmt_poly(&r.a),
            "center": ring.fmt_polys(&r.center),
            "chart": chart_json(&r.chart)?,
            "strict_y": r.strict_y.fmt_canonical()?,
            "point": point_doc(&r.point),
            "t_params": cr.fmt_polys(&r.t_params),
            "s_params": cr.fmt_polys(&r.s_params),
            "regularity": smooth_json(&r.regularity),
            "parameters": smooth_json(&r.parameters),
            "snc": r.snc.as_ref().map(|s| json!({
                "components": s.components.iter().map(|c| json!({"equation": c.equation, "parameter": c.parameter})).collect::<Vec<_>>(),
                "unit": cr.fmt_poly(&s.unit),
                "unit_value": fmt_rat(&s.unit_value),
            })),
        }),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MonoidInput {
    generators: Vec<Vec<i64>>,
    #[serde(default)]
    lambda: Option<Vec<i64>>,
    #[serde(default)]
    rank: Option<usize>,
    #[serde(default)]
    lattice: Option<String>,
    #[serde(default)]
    names: Option<Vec<String>>,
}

fn monoid(op: &str, i: &Value) -> Result<Outcome, CliError> {
    let inp: MonoidInput = from_value(i)?;
    let pair = || -> Result<_, CliError> {
        let lambda = inp.lambda.clone().ok_or_else(|| usage("missing field `lambda`"))?;
        PairDoc { generators: inp.generators.clone(), lambda }.build()
    };
    let out = match op {
        "invariants" => {
            let g = gp_invariants(&pair()?)?;
            json!({ "rank": g.rank, "torsion": g.torsion, "warning": g.warning() })
        }
        "admissible" => {
            let a = is_admissible_pair(&pair()?)?;
            return Ok(Outcome {
                passed: a.admissible,
                output: json!({
                    "admissible": a.admissible,
                    "interior": a.interior,
                    "group_condition": a.group_condition,
                    "complement_condition": a.complement_condition,
                    "complements": a.complements,
                    "witness": a.witness,
                }),
            });
        }
        "saturate" => {
            let n = inp
                .rank
                .or(inp.lambda.as_ref().map(|l| l.len()))
                .or(inp.generators.first().map(|g| g.len()))
                .ok_or_else(|| usage("cannot infer the ambient rank"))?;
            let lattice = match inp.lattice.as_deref() {
                None | Some("ambient") => SaturationLattice::Ambient,
                Some("group") => SaturationLattice::Group,
                Some(l) => return Err(usage(&format!("unknown lattice `{l}` (ambient, group)"))),
            };
            let q = AffineMonoid::new(n, inp.generators.clone())?;
            json!({ "generators": saturate_monoid(&q, lattice)?.generators() })
        }
        "algebra" => {
            let m = monoid_algebra(&pair()?, inp.names.as_deref())?;
            json!(ModelDoc::of(&m)?)
        }
        _ => return Err(usage(&format!("unknown monoid operation `{op}`"))),
    };
    Ok(Outcome::ok(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MrlInput {
    m: usize,
    r: usize,
    l: usize,
}

fn toric_chart(i: &Value, _: &Options) -> Result<Outcome, CliError> {
    let inp: MrlInput = from_value(i)?;
    let t = t_model(inp.m, inp.r, inp.l)?;
    let d = (inp.m + 1) * inp.l;
    Ok(Outcome::ok(json!({ "d": d, "model": ModelDoc::of(&t)? })))
}

fn toric_verify(i: &Value) -> Result<Outcome, CliError> {
    let inp: MrlInput = from_value(i)?;
    let v = toriclem_verify(inp.m, inp.r, inp.l)?;
    Ok(Outcome {
        passed: v.passed,
        output: json!({
            "passed": v.passed,
            "d": v.d,
            "chart_relations": v.chart_relations,
            "expected": v.expected,
            "verdict": verdict_name(v.relation.verdict),
        }),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairInput {
    pair: PairDoc,
    #[serde(default)]
    fan: Option<FanDoc>,
    #[serde(default)]
    d: Option<i64>,
    #[serde(default)]
    cone: Option<Vec<Vec<i64>>>,
}

fn subdivide(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let inp: PairInput = from_value(i)?;
    let fan = semistable_subdivision(&inp.pair.build()?, o.limits.max_subdiv_iters)?;
    Ok(Outcome::ok(json!(FanDoc::of(&fan))))
}

fn verify_fan(i: &Value) -> Result<Outcome, CliError> {
    let inp: PairInput = from_value(i)?;
    let pair = inp.pair.build()?;
    let fan = inp.fan.as_ref().ok_or_else(|| usage("missing field `fan`"))?.build(&pair)?;
    let v = verify_subdivision(&fan, &pair)?;
    Ok(Outcome {
        passed: v.passed,
        output: json!({
            "passed": v.passed,
            "failures": v.failures.iter().map(|f| json!({"cone": f.cone, "condition": f.condition, "detail": f.detail})).collect::<Vec<_>>(),
            "multiplicities": v.multiplicities,
            "coherent": v.coherent,
        }),
    })
}

fn chart_monoid_cmd(i: &Value) -> Result<Outcome, CliError> {
    let inp: PairInput = from_value(i)?;
    let pair = inp.pair.build()?;
    let cone = inp.cone.as_ref().ok_or_else(|| usage("missing field `cone`"))?;
    let d = inp.d.ok_or_else(|| usage("missing field `d`"))?;
    let cm = chart_monoid(cone, &pair, d)?;
    Ok(Outcome::ok(json!({
        "pair": PairDoc::of(&cm.pair),
        "characters": cm.characters.iter().map(|c| c.iter().map(fmt_rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "pullback": cm.pullback,
        "d": cm.d,
    })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LogSmoothInput {
    model: ModelDoc,
    #[serde(default)]
    point: Option<PointDoc>,
}

fn logsmooth(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let inp: LogSmoothInput = from_value(i)?;
    let m = inp.model.build(&o.limits)?;
    let p = point_or_origin(&inp.point, m.algebra.ring())?;
    let v = logsmooth_check(&m, &p)?;
    Ok(Outcome { passed: v.log_smooth, output: logsmooth_json(&v, m.algebra.ring()) })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SemistableInput {
    algebra: AlgebraDoc,
    t: Vec<String>,
    #[serde(default)]
    point: Option<PointDoc>,
    #[serde(default)]
    normalize: bool,
}

fn semistable(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let inp: SemistableInput = from_value(i)?;
    let alg = inp.algebra.build(&o.limits)?;
    let ring = alg.ring().clone();
    let p = point_or_origin(&inp.point, &ring)?;
    let v = semistable_params_check(&alg, &ring.parse_all(&inp.t)?, &p, inp.normalize)?;
    Ok(Outcome { passed: v.passed, output: semistable_json(&v, &ring) })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValInput {
    valuation: ValuationDoc,
    #[serde(default)]
    f: Option<String>,
    #[serde(default)]
    h0: Option<usize>,
    #[serde(default)]
    center: Option<Vec<String>>,
}

fn center_json(c: &CenterResult) -> Result<Value, CliError> {
    Ok(json!({
        "ideal": c.ideal.fmt_canonical()?,
        "closed": c.closed,
        "dim": c.dim,
        "prime_certified": c.prime_certified,
    }))
}

fn val(op: &str, i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let inp: ValInput = from_value(i)?;
    let v = inp.valuation.build(&o.limits)?;
    let ring = v.ring().clone();
    let out = match op {
        "value" => {
            let f = ring.parse(inp.f.as_deref().ok_or_else(|| usage("missing field `f`"))?)?;
            let x = v.value(&f)?;
            json!({ "value": x.as_ref().map(|x| x.iter().map(fmt_rat).collect::<Vec<_>>()), "display": MonomialValuation::fmt_value(&x) })
        }
        "height" => json!({ "nominal": v.nominal_height(), "effective": effective_height(&v) }),
        "decompose" => {
            let s = decompose(&v, inp.h0.unwrap_or(1))?;
            json!({
                "h0": s.h0,
                "head": ValuationDoc::of(&s.head)?,
                "residual": ValuationDoc::of(&s.residual)?,
                "dropped": s.dropped.iter().map(|&i| ring.var_name(i).to_string()).collect::<Vec<_>>(),
                "tail": s.tail.iter().map(|r| r.iter().map(fmt_rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })
        }
        "center" => center_json(&center(&v)?)?,
        "lift" => {
            let gens = ring.parse_all(inp.center.as_ref().ok_or_else(|| usage("missing field `center`"))?)?;
            let l = lift_center(&v, &gens)?;
            json!({
                "index": l.index,
                "chart": chart_json(&l.chart)?,
                "valuation": ValuationDoc::of(&l.valuation)?,
                "center": center_json(&l.center)?,
            })
        }
        _ => return Err(usage(&format!("unknown val operation `{op}`"))),
    };
    Ok(Outcome::ok(out))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UniformizeInput {
    valuation: ValuationDoc,
    #[serde(default)]
    boundary: Vec<Vec<String>>,
    #[serde(default = "default_oracle")]
    oracle: String,
    #[serde(default)]
    closure_ideals: Vec<Vec<String>>,
    #[serde(default)]
    pre_blowup: Option<Vec<String>>,
    /// Blow up a seeded random set of at least two variables first.
    #[serde(default)]
    random_pre_blowup: bool,
}

fn default_oracle() -> String {
    "toric".into()
}

fn random_center(vars: &[String], seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = vars.to_vec();
    v.shuffle(&mut rng);
    let k = if v.len() <= 2 { v.len() } else { 2 + (seed as usize % (v.len() - 1)) };
    let mut c: Vec<String> = v.into_iter().take(k).collect();
    c.sort();
    c
}

fn uniformize(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let inp: UniformizeInput = from_value(i)?;
    let v = inp.valuation.build(&o.limits)?;
    let x = v.chart().clone();
    let d = inp.boundary.iter().map(|b| Ok(x.ideal(x.ring().parse_all(b)?))).collect::<Result<Vec<_>, CliError>>()?;
    let oracle = oracle_by_name(&inp.oracle)?;
    let mut pre = inp.pre_blowup.clone();
    if inp.random_pre_blowup && pre.is_none() {
        pre = Some(random_center(x.ring().vars(), o.seed));
    }
    let opts = SchemeOptions { closure_ideals: inp.closure_ideals, pre_blowup: pre };
    let r = uniformize_scheme(&x, &d, &v, oracle.as_ref(), &opts)?;
    let doc = TowerDoc::new("scheme", oracle.name(), &r.source, &d, &r.tower, &r.certificate)?;
    Ok(Outcome::ok(json!(doc)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormalKeyInput {
    algebra: AlgebraDoc,
    y: Vec<String>,
    #[serde(default)]
    point: Option<PointDoc>,
    t: Vec<String>,
    #[serde(default)]
    s: Vec<String>,
    v: Vec<String>,
}

fn formal_key_cmd(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let inp: FormalKeyInput = from_value(i)?;
    let alg = inp.algebra.build(&o.limits)?;
    let ring = alg.ring().clone();
    let p = point_or_origin(&inp.point, &ring)?;
    let r = formal_key(
        &alg,
        &Ideal::parse(&ring, &inp.y)?,
        &p,
        &ring.parse_all(&inp.t)?,
        &ring.parse_all(&inp.s)?,
        &ring.parse_all(&inp.v)?,
    )?;
    let cr = r.record.ring().clone();
    Ok(Outcome {
        passed: r.logsmooth.log_smooth,
        output: json!({
            "chart": chart_json(&r.record)?,
            "model": ModelDoc::of(&r.model)?,
            "point": point_doc(&r.point),
            "l": r.l,
            "d": r.d,
            "unit": cr.fmt_poly(&r.unit),
            "logsmooth": logsmooth_json(&r.logsmooth, &cr),
        }),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FormalInput {
    model: ModelDoc,
    weights: Vec<Vec<String>>,
    #[serde(default = "default_oracle")]
    oracle: String,
    #[serde(default)]
    closure_ideals: Vec<Vec<String>>,
    #[serde(default)]
    pre_blowup: Option<Vec<String>>,
}

fn formal_uniformize(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let inp: FormalInput = from_value(i)?;
    let m = inp.model.build(&o.limits)?;
    let v = ValuationDoc { algebra: inp.model.algebra.clone(), weights: inp.weights.clone() }.build(&o.limits)?;
    let m = valuform_core::models::ModelScheme::new(v.chart().clone(), m.pair, m.chart)?;
    let oracle = oracle_by_name(&inp.oracle)?;
    let opts = FormalOptions { closure_ideals: inp.closure_ideals, pre_blowup: inp.pre_blowup };
    let r = uniformize_formal(&m, &v, oracle.as_ref(), &opts)?;
    let mut doc = TowerDoc::new("formal", oracle.name(), &r.source.algebra, &[], &r.tower, &r.certificate)?;
    doc.driver = format!("formal (d = {})", r.d);
    Ok(Outcome::ok(json!(doc)))
}

fn replay_cmd(i: &Value, o: &Options) -> Result<Outcome, CliError> {
    let doc: TowerDoc = from_value(i)?;
    if doc.version != crate::docs::TOWER_VERSION {
        return Err(usage(&format!("unsupported tower version {}", doc.version)));
    }
    let source = doc.source.build(&o.limits)?;
    let specs: Vec<_> = doc.records.iter().map(|r| r.spec()).collect();
    let cert = doc.certificate.build(&o.limits)?;
    let rep = replay(&source, &specs, &cert)?;
    // the certificate alone, without the tower, must verify too
    verify_certificate(&cert)?;
    Ok(Outcome::ok(json!({
        "records": rep.records,
        "final_chart": AlgebraDoc::of(&rep.final_chart)?,
        "certificate": doc.certificate.kind,
        "verified": true,
    })))
}
