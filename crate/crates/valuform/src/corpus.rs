//! The acceptance corpus: curated inputs, seeded random instances and the
//! self-checks run by `valuform corpus`. The integration tests compare the
//! same runs against independent oracles.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use valuform_core::blowup::{
    ann_lift, blowup_chart, key_blowup, strict_transform, unit_ratio, KeyBlowupResult, PresentedAlgebra,
};
use valuform_core::models::{
    logsmooth_check, standard_semistable, t_model, toriclem_verify, ModelScheme, ToricVerdict,
};
use valuform_core::monoid::{AffineMonoid, MonoidPair};
use valuform_core::poly::{ideal_rel, krull_dim, Ideal, Limits, RationalPoint, RelationVerdict, Ring};
use valuform_core::polyhedral::{chart_monoid, semistable_subdivision, verify_subdivision, HeightedFan};
use valuform_core::valuation::{decompose, effective_height, MonomialValuation};

use crate::commands::{run, JobSpec, Options};
use crate::docs::{from_value, RecordDoc, TowerDoc};
use crate::error::{CliError, EXIT_CERTIFICATE};

#[derive(Serialize, Clone, Debug)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {}: {} [{}] {} ({:.2} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn timed(id: u8, name: &str, f: impl FnOnce() -> Result<(bool, String), CliError>) -> CriterionReport {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionReport { id, name: name.into(), passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(o: &Options) -> Result<Vec<CriterionReport>, CliError> {
    run_all_with(o, &mut |_| {})
}

/// Like [`run_all`], calling `progress` after each criterion.
pub fn run_all_with(o: &Options, progress: &mut dyn FnMut(&CriterionReport)) -> Result<Vec<CriterionReport>, CliError> {
    let mut out = Vec::new();
    let mut push = |r: CriterionReport| {
        progress(&r);
        out.push(r);
    };
    push(timed(1, "toric chart identity", || {
        let grid = toric_grid()?;
        let slow = grid.iter().filter(|g| g.seconds >= 5.0).count();
        let bad = grid.iter().filter(|g| !g.verdict.passed).count();
        Ok((bad == 0 && slow == 0, format!("{} cases, {bad} failed, {slow} over 5 s", grid.len())))
    }));
    push(timed(2, "strict transform laws", || {
        let runs = strict_transform_runs(o.seed, 100)?;
        let bad = runs.iter().filter(|r| !(r.claim_ii && r.claim_iii)).count();
        Ok((bad == 0 && runs.len() == 100, format!("{} instances, {bad} failures", runs.len())))
    }));
    push(timed(3, "key blowup on the cone", || {
        let plain = cone_key(false)?;
        let log = cone_key(true)?;
        let snc: Vec<String> =
            log.snc.as_ref().map(|s| s.components.iter().map(|c| c.equation.clone()).collect()).unwrap_or_default();
        let ok = plain.regularity.regular
            && log.regularity.regular
            && plain.chart.chart.relations.fmt_canonical()? == ["y*z'^2 - x"]
            && log.chart.chart.relations.fmt_canonical()? == ["y^3*z'^2 - x"]
            && snc == ["z'", "y"];
        Ok((ok, format!("snc components {snc:?}")))
    }));
    push(timed(4, "semistable subdivisions", || {
        let cases = subdivision_cases()?;
        let mut ok = true;
        let mut detail = Vec::new();
        for c in &cases {
            let v = verify_subdivision(&c.fan, &c.pair)?;
            ok &= v.passed && c.matches_expected;
            detail.push(format!("{}: d={} cones={}", c.name, c.fan.d, c.fan.cones.len()));
        }
        Ok((ok, detail.join("; ")))
    }));
    push(timed(5, "log smoothness criterion", || {
        let mut n = 0;
        for m in 0..=3 {
            let s = standard_semistable(m)?;
            let v = logsmooth_check(&s, &RationalPoint::origin(s.algebra.ring()))?;
            if !(v.log_smooth && v.equality) {
                return Ok((false, format!("standard model m={m} rejected")));
            }
            n += 1;
        }
        for (m, r, l) in grid() {
            let t = t_model(m, r, l)?;
            let v = logsmooth_check(&t, &RationalPoint::origin(t.algebra.ring()))?;
            if !(v.log_smooth && v.codim == v.rank) {
                return Ok((false, format!("T({m},{r},{l}) rejected")));
            }
            n += 1;
        }
        let bad = codim_deficient()?;
        let v = logsmooth_check(&bad, &RationalPoint::origin(bad.algebra.ring()))?;
        Ok((!v.log_smooth, format!("{n} models accepted, deficient chart codim {} vs rank {}", v.codim, v.rank)))
    }));
    push(timed(6, "finite height decomposition", || {
        let vals = random_valuations(o.seed, 200);
        let mut bad = 0;
        let mut split = 0;
        for rv in &vals {
            let v = rv.build()?;
            if effective_height(&v) > krull_dim(&v.chart().relations)? {
                bad += 1;
                continue;
            }
            if effective_height(&v) >= 2 {
                split += 1;
                let s = decompose(&v, 1)?;
                let red = v.reduced();
                bad += rv.monomials.iter().filter(|e| s.recompose(e) != red.monomial_value(e)).count();
            }
        }
        Ok((bad == 0, format!("{} valuations ({split} split), {bad} failures", vals.len())))
    }));
    push(timed(7, "end-to-end drivers", || {
        let mut detail = Vec::new();
        let mut ok = true;
        for (name, job) in driver_corpus(o) {
            let a = run(&job)?;
            let b = run(&job)?;
            let doc: TowerDoc = from_value(&a.output)?;
            let same = serde_json::to_string(&a.output)? == serde_json::to_string(&b.output)?;
            let replayed = run(&replay_job(&a.output, o)).is_ok();
            ok &= same && replayed;
            detail.push(format!("{name}: {} records, {}", doc.records.len(), doc.certificate.kind));
        }
        for (name, code) in fault_injection(o)? {
            ok &= code == EXIT_CERTIFICATE;
            detail.push(format!("{name} exit {code}"));
        }
        Ok((ok, detail.join("; ")))
    }));
    Ok(out)
}

pub fn grid() -> Vec<(usize, usize, usize)> {
    let mut g = Vec::new();
    for m in 0..=2 {
        for r in 1..=2 {
            for l in 1..=2 {
                g.push((m, r, l));
            }
        }
    }
    g
}

pub struct ToricCase {
    pub m: usize,
    pub r: usize,
    pub l: usize,
    pub verdict: ToricVerdict,
    pub seconds: f64,
}

pub fn toric_grid() -> Result<Vec<ToricCase>, CliError> {
    grid()
        .into_iter()
        .map(|(m, r, l)| {
            let start = Instant::now();
            let verdict = toriclem_verify(m, r, l)?;
            Ok(ToricCase { m, r, l, verdict, seconds: start.elapsed().as_secs_f64() })
        })
        .collect()
}

/// A random hypersurface through `Y = V(x, z)` with `t = z`.
#[derive(Clone, Debug)]
pub struct StrictInstance {
    pub relation: String,
    pub b: String,
    pub g: String,
}

#[derive(Clone, Debug)]
pub struct StrictRun {
    pub instance: StrictInstance,
    pub exponent: u32,
    pub lift: String,
    pub strict: Vec<String>,
    pub claim_ii: bool,
    pub claim_iii: bool,
}

fn lin(rng: &mut ChaCha8Rng) -> [i64; 4] {
    [0; 4].map(|_| rng.gen_range(-2..=2))
}

fn fmt_lin(c: &[i64]) -> String {
    let names = ["x", "y", "z"];
    let mut s = format!("({})", c[0]);
    for (k, n) in names.iter().enumerate().take(c.len() - 1) {
        s.push_str(&format!(" + ({})*{n}", c[k + 1]));
    }
    s
}

/// `Ann(c) = (x)` in `A/(z)` forces `c` into the ideal of `p(x, y, 0)`, so
/// half of the `b` are drawn from multiples of it.
pub fn strict_instance(rng: &mut ChaCha8Rng) -> StrictInstance {
    const BS: [&str; 6] = ["y", "y + 1", "y^2", "x + y", "y - x", "2*y"];
    const FACTORS: [&str; 3] = ["1", "y", "1 + x"];
    const GS: [&str; 4] = ["1", "x", "y", "y + 1"];
    let p = lin(rng);
    let q = lin(rng);
    let b = if rng.gen_bool(0.5) {
        BS[rng.gen_range(0..BS.len())].to_string()
    } else {
        format!("({})*({})", fmt_lin(&p[..3]), FACTORS[rng.gen_range(0..FACTORS.len())])
    };
    StrictInstance {
        relation: format!("x*({}) + z*({})", fmt_lin(&p), fmt_lin(&q)),
        b,
        g: GS[rng.gen_range(0..GS.len())].into(),
    }
}

/// Runs the laws on one instance; `None` when the annihilator is not
/// certified (the instance is then outside the hypotheses).
pub fn strict_run(inst: &StrictInstance) -> Result<Option<StrictRun>, CliError> {
    // small annihilator cap: instances beyond it are skipped, not failed
    let limits = Limits { max_ann_exponent: 4, ..Limits::default() };
    let ring = Ring::with_limits(["x", "y", "z"], None, limits)?;
    let a_alg = PresentedAlgebra::new(Ideal::parse(&ring, &[inst.relation.as_str()])?);
    if a_alg.relations.is_unit()? || a_alg.relations.gens().iter().all(|g| g.is_zero()) {
        return Ok(None);
    }
    let z = ring.parse("z")?;
    let y_ideal = Ideal::parse(&ring, &["x", "z"])?;
    let c_alg = a_alg.quotient([z.clone()]);
    let b = ring.parse(&inst.b)?;
    // b must be nonzero on Y, otherwise B_b is empty
    if a_alg.ideal(y_ideal.gens().iter().cloned()).contains(&b)? {
        return Ok(None);
    }
    let ann = match ann_lift(&c_alg, &y_ideal, &b) {
        Ok(a) => a,
        Err(valuform_core::Error::ResourceCap { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let a = ann.lift.clone();
    let res = blowup_chart(&a_alg, &[z.clone(), a.clone()], 1)?;
    // Z = V(z) and Y = V(x, z) have the same strict transform V(z/a)
    let strict = strict_transform(&res, &Ideal::new(ring.clone(), vec![z.clone()]))?;
    let strict_y = strict_transform(&res, &y_ideal)?;
    let expected = res.chart.ideal([res.transforms[0].clone()]);
    let claim_ii = ideal_rel(&strict, &expected)?.verdict == RelationVerdict::Equal
        && ideal_rel(&strict_y, &expected)?.verdict == RelationVerdict::Equal;
    let a2 = &a + &(&z * &ring.parse(&inst.g)?);
    let claim_iii = unit_ratio(&res, &a, &a2, &strict).is_ok();
    Ok(Some(StrictRun {
        instance: inst.clone(),
        exponent: ann.exponent,
        lift: ring.fmt_poly(&a),
        strict: strict.fmt_canonical()?,
        claim_ii,
        claim_iii,
    }))
}

pub fn strict_transform_runs(seed: u64, count: usize) -> Result<Vec<StrictRun>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut tries = 0;
    while out.len() < count && tries < 50 * count {
        tries += 1;
        if let Some(r) = strict_run(&strict_instance(&mut rng))? {
            out.push(r);
        }
    }
    Ok(out)
}

pub fn cone() -> Result<PresentedAlgebra, CliError> {
    Ok(PresentedAlgebra::parse(&["x", "y", "z"], None, &["x*y - z^2"])?)
}

pub fn cone_key(log: bool) -> Result<KeyBlowupResult, CliError> {
    let x = cone()?;
    let ring = x.ring().clone();
    let y = Ideal::parse(&ring, &["x", "z"])?;
    let t = ring.parse_all(&["z"])?;
    let b = ring.parse("y")?;
    Ok(key_blowup(&x, &y, &RationalPoint::origin(&ring), &t, Some(&b), log)?)
}

pub struct SubdivisionCase {
    pub name: String,
    pub pair: MonoidPair,
    pub fan: HeightedFan,
    pub matches_expected: bool,
}

pub fn subdivision_cases() -> Result<Vec<SubdivisionCase>, CliError> {
    let iters = Limits::default().max_subdiv_iters;
    let mut out = Vec::new();
    for m in 0..=3 {
        let pair = MonoidPair::semistable(m);
        let fan = semistable_subdivision(&pair, iters)?;
        let ok = fan.d == 1 && fan.cones.len() == 1;
        out.push(SubdivisionCase { name: format!("(a) m={m}"), pair, fan, matches_expected: ok });
    }
    let pair = MonoidPair::new(AffineMonoid::free(2), vec![1, 2])?;
    let fan = semistable_subdivision(&pair, iters)?;
    let cm = chart_monoid(&fan.cones[0], &pair, fan.d)?;
    let ok = fan.d == 2 && fan.cones == vec![vec![vec![2, 0], vec![0, 1]]] && cm.pair == MonoidPair::semistable(1);
    out.push(SubdivisionCase { name: "(b)".into(), pair, fan, matches_expected: ok });
    let pair = MonoidPair::new(AffineMonoid::new(2, vec![vec![1, 0], vec![1, 1], vec![1, 2]])?, vec![1, 1])?;
    let fan = semistable_subdivision(&pair, iters)?;
    let ok = fan.d == 1 && fan.cones.len() == 2 && fan.cones.iter().all(|c| c.contains(&vec![1, 0]));
    out.push(SubdivisionCase { name: "(c)".into(), pair, fan, matches_expected: ok });
    Ok(out)
}

/// `x·y·z = π` cut by `z = x`: the stratum has codimension 1, not 2.
pub fn codim_deficient() -> Result<ModelScheme, CliError> {
    let alg = PresentedAlgebra::parse(&["x", "y", "z", "pi"], Some("pi"), &["x*y*z - pi", "z - x"])?;
    let chart = alg.ring().parse_all(&["x", "y", "z"])?;
    Ok(ModelScheme::new(alg, MonoidPair::semistable(2), chart)?)
}

#[derive(Clone, Debug)]
pub struct RandomValuation {
    pub n: usize,
    /// Rows of the weight matrix.
    pub weights: Vec<Vec<i64>>,
    pub monomials: Vec<Vec<u32>>,
}

impl RandomValuation {
    pub fn build(&self) -> Result<MonomialValuation, CliError> {
        let names = ["x", "y", "z", "w"];
        let alg = PresentedAlgebra::parse(&names[..self.n], None, &[] as &[&str])?;
        Ok(MonomialValuation::from_ints(alg, &self.weights)?)
    }
}

pub fn random_valuations(seed: u64, count: usize) -> Vec<RandomValuation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=4);
            let h = rng.gen_range(1..=3);
            let cols: Vec<Vec<i64>> = (0..n)
                .map(|_| {
                    let c: Vec<i64> = (0..h).map(|_| rng.gen_range(-3..=3)).collect();
                    match c.iter().find(|x| **x != 0) {
                        Some(x) if *x < 0 => c.iter().map(|y| -y).collect(),
                        _ => c,
                    }
                })
                .collect();
            let weights = (0..h).map(|k| cols.iter().map(|c| c[k]).collect()).collect();
            let monomials = (0..50).map(|_| (0..n).map(|_| rng.gen_range(0..5)).collect()).collect();
            RandomValuation { n, weights, monomials }
        })
        .collect()
}

fn job(command: &str, input: Value, o: &Options) -> JobSpec {
    JobSpec { command: command.into(), op: None, input, options: o.clone() }
}

pub fn replay_job(tower: &Value, o: &Options) -> JobSpec {
    job("replay", tower.clone(), o)
}

fn cone_valuation() -> Value {
    json!({
        "algebra": { "vars": ["x", "y", "z"], "relations": ["x*y - z^2"] },
        "weights": [["2", "0", "1"], ["-1", "1", "0"]],
    })
}

/// Driver inputs: the cone with a height-2 valuation and the formal models.
pub fn driver_corpus(o: &Options) -> Vec<(String, JobSpec)> {
    let formal_alg = json!({ "vars": ["t0", "t1", "s", "pi"], "pi": "pi", "relations": ["t0*t1 - pi"] });
    vec![
        ("cone".into(), job("uniformize", json!({ "valuation": cone_valuation() }), o)),
        ("cone, D = V(y)".into(), job("uniformize", json!({ "valuation": cone_valuation(), "boundary": [["y"]] }), o)),
        (
            "cone, closure ideal (x, z)".into(),
            job("uniformize", json!({ "valuation": cone_valuation(), "closure_ideals": [["x", "z"]] }), o),
        ),
        (
            "cone, random extra blowup".into(),
            job("uniformize", json!({ "valuation": cone_valuation(), "random_pre_blowup": true }), o),
        ),
        (
            "S(1) x A^1".into(),
            job(
                "formal-uniformize",
                json!({
                    "model": { "algebra": formal_alg, "pair": { "generators": [[1, 0], [0, 1]], "lambda": [1, 1] }, "chart": ["t0", "t1"] },
                    "weights": [["1", "1", "0", "2"], ["0", "1", "1", "1"]],
                }),
                o,
            ),
        ),
        ("T(1,1,1)".into(), job("formal-uniformize", t_model_input(), o)),
    ]
}

fn t_model_input() -> Value {
    let t = t_model(1, 1, 1).expect("fixed model");
    json!({
        "model": crate::docs::ModelDoc::of(&t).expect("fixed model"),
        "weights": [["2", "3", "1", "7"]],
    })
}

/// Runs the lying oracle and a tampered replay; returns the exit codes.
pub fn fault_injection(o: &Options) -> Result<Vec<(String, i32)>, CliError> {
    let code = |r: Result<_, CliError>| match r {
        Ok(_) => 0,
        Err(e) => e.exit_code(),
    };
    let lying = job("uniformize", json!({ "valuation": cone_valuation(), "oracle": "lying" }), o);
    let tower = run(&job("uniformize", json!({ "valuation": cone_valuation() }), o))?.output;
    Ok(vec![
        ("lying oracle".into(), code(run(&lying))),
        ("tampered tower".into(), code(run(&replay_job(&tamper(&tower)?, o)))),
    ])
}

/// Changes one stored chart relation of the first record.
pub fn tamper(tower: &Value) -> Result<Value, CliError> {
    let mut doc: TowerDoc = from_value(tower)?;
    match doc.records.first_mut() {
        Some(RecordDoc::Blowup { chart_relations, .. }) | Some(RecordDoc::Subdivision { chart_relations, .. }) => {
            match chart_relations.first_mut() {
                Some(r) => r.push_str(" + 1"),
                None => chart_relations.push("1".into()),
            }
        }
        None => doc.certificate.parameters.reverse(),
    }
    Ok(serde_json::to_value(doc)?)
}
