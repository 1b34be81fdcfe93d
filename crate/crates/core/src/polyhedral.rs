//! Dual cones of monoid pairs and unimodular subdivisions after a base
//! change `π = ϖ^d`.
//!
//! Everything lives in coordinates of a Hermite basis of `Q^gp`, so `N` is
//! `ℤ^k` with the dual pairing. The refined lattice after base change is
//! `N_d = {x ∈ N : ℓ(x) ≡ 0 mod d}` with rescaled height `ℓ/d`; fan cones
//! are stored by their `N_d`-primitive generators.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::linalg::{
    clear_denominators, det_int, det_rat, dot, gcd_all, lattice_coords, primitive, rational_kernel, solve_left, to_rat,
};
use crate::monoid::{gp_invariants, is_admissible_pair, saturate_monoid, MonoidPair, SaturationLattice};
use crate::poly::Rat;
use crate::{Error, Result};

/// Largest supported lattice rank.
pub const RANK_CAP: usize = 4;

pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Primitive normal of the hyperplane through `k - 1` independent vectors.
fn hyperplane_normal(vs: &[&Vec<i64>], k: usize) -> Result<Option<Vec<i64>>> {
    let rows: Vec<Vec<Rat>> = vs.iter().map(|v| to_rat(v)).collect();
    let ker = rational_kernel(&rows, k);
    if ker.len() != 1 {
        return Ok(None);
    }
    Ok(Some(clear_denominators(&ker[0])?))
}

/// Primitive inward facet normals of the full-dimensional cone spanned by
/// `gens` in `ℚ^k`. Empty when the cone is all of `ℚ^k`.
pub fn facet_normals(gens: &[Vec<i64>], k: usize) -> Result<Vec<Vec<i64>>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for s in subsets(gens.len(), k.saturating_sub(1)) {
        let vs: Vec<&Vec<i64>> = s.iter().map(|&i| &gens[i]).collect();
        let Some(mut nv) = hyperplane_normal(&vs, k)? else { continue };
        let signs: Vec<i64> = gens.iter().map(|g| dot(&nv, g).signum()).collect();
        if signs.iter().all(|&x| x >= 0) {
        } else if signs.iter().all(|&x| x <= 0) {
            nv.iter_mut().for_each(|x| *x = -*x);
        } else {
            continue;
        }
        if !out.contains(&nv) {
            out.push(nv);
        }
    }
    out.sort();
    Ok(out)
}

/// A polyhedral cone given by primitive ray generators in `N = ℤ^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub rays: Vec<Vec<i64>>,
}

/// Monoid pair data in `Q^gp` coordinates.
#[derive(Clone, Debug)]
struct Frame {
    /// Hermite basis of `Q^gp` (rows, ambient coordinates).
    basis: Vec<Vec<i64>>,
    /// Generators of the saturation in basis coordinates.
    gens: Vec<Vec<i64>>,
    /// `λ(1)` in basis coordinates, i.e. the height functional on `N`.
    ell: Vec<i64>,
    /// Inward normals of `σ`: its facets are cut out by these characters.
    sigma_facets: Vec<Vec<i64>>,
}

fn frame(pair: &MonoidPair) -> Result<Frame> {
    let q = saturate_monoid(&pair.q, SaturationLattice::Group)?;
    let basis = q.group_basis()?;
    if basis.len() > RANK_CAP {
        return Err(Error::cap("rank", RANK_CAP as u64, format!("Q^gp has rank {}", basis.len())));
    }
    let gens: Vec<Vec<i64>> = q
        .generators()
        .iter()
        .map(|g| lattice_coords(&basis, g).ok_or_else(|| Error::cert("generator outside Q^gp")))
        .collect::<Result<_>>()?;
    let ell = lattice_coords(&basis, &pair.lambda1).ok_or_else(|| Error::pre("λ(1) not in Q^gp"))?;
    let k = basis.len();
    let rays = facet_normals(&gens, k)?;
    let sigma_facets = facet_normals(&rays, k)?;
    Ok(Frame { basis, gens, ell, sigma_facets })
}

/// `σ = (Q_ℝ)^∨` with its primitive rays, and `ℓ = ⟨·, λ(1)⟩` in the same
/// coordinates.
pub fn dual_cone(pair: &MonoidPair) -> Result<(Cone, Vec<i64>)> {
    if !is_admissible_pair(pair)?.admissible {
        return Err(Error::pre("pair is not admissible"));
    }
    let f = frame(pair)?;
    let rays = facet_normals(&f.gens, f.basis.len())?;
    Ok((Cone { rays }, f.ell))
}

/// A fan with base-change degree `d` and height functional `ℓ`; cones are
/// listed by `N_d`-primitive generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightedFan {
    pub d: i64,
    pub lfunc: Vec<i64>,
    pub cones: Vec<Vec<Vec<i64>>>,
    /// Heights `ω` on the primitive rays certifying that the fan is regular.
    pub lifting: Option<Vec<(Vec<i64>, Rat)>>,
}

fn ell_of(ell: &[i64], v: &[i64]) -> i64 {
    dot(ell, v)
}

/// Index of `N_d` in `N`.
fn index_of(ell: &[i64], d: i64) -> i64 {
    d / d.gcd(&gcd_all(ell))
}

/// `N_d`-primitive generator on the ray of `ρ` (primitive in `N`).
fn nd_generator(ell: &[i64], rho: &[i64], d: i64) -> Vec<i64> {
    let h = ell_of(ell, rho);
    let k = d / d.gcd(&h);
    rho.iter().map(|x| x * k).collect()
}

fn is_unimodular(ell: &[i64], rays: &[Vec<i64>], d: i64) -> Result<(bool, i64)> {
    let us: Vec<Vec<i64>> = rays.iter().map(|r| nd_generator(ell, r, d)).collect();
    let heights_ok = us.iter().all(|u| ell_of(ell, u) == d);
    let det = det_int(&us)?.abs();
    let idx = index_of(ell, d);
    Ok((heights_ok && det == idx, if idx == 0 { 0 } else { det / idx }))
}

fn sorted_set(v: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut s = v.to_vec();
    s.sort();
    s
}

/// Placing triangulation of the cone over its rays, in the given order.
fn placing(rays: &[Vec<i64>], k: usize) -> Result<Vec<Vec<Vec<i64>>>> {
    let mut init: Vec<Vec<i64>> = Vec::new();
    for r in rays {
        let mut trial = init.clone();
        trial.push(r.clone());
        if crate::linalg::integer_rank(&trial) == trial.len() {
            init = trial;
        }
        if init.len() == k {
            break;
        }
    }
    if init.len() != k {
        return Err(Error::pre("cone is not full-dimensional"));
    }
    let mut cones: Vec<Vec<Vec<i64>>> = vec![init.clone()];
    for r in rays.iter().filter(|r| !init.contains(r)) {
        let mut added = Vec::new();
        for (facet, opposite) in boundary_facets(&cones) {
            let refs: Vec<&Vec<i64>> = facet.iter().collect();
            let Some(mut nv) = hyperplane_normal(&refs, k)? else { continue };
            if dot(&nv, &opposite) < 0 {
                nv.iter_mut().for_each(|x| *x = -*x);
            }
            if dot(&nv, r) < 0 {
                let mut c = facet.clone();
                c.push(r.clone());
                added.push(c);
            }
        }
        cones.extend(added);
    }
    Ok(cones)
}

/// Facets that belong to a single cone, with that cone's opposite ray.
fn boundary_facets(cones: &[Vec<Vec<i64>>]) -> Vec<(Vec<Vec<i64>>, Vec<i64>)> {
    let mut count: BTreeMap<Vec<Vec<i64>>, (usize, Vec<i64>)> = BTreeMap::new();
    for c in cones {
        for i in 0..c.len() {
            let f: Vec<Vec<i64>> = c.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
            let e = count.entry(sorted_set(&f)).or_insert((0, c[i].clone()));
            e.0 += 1;
        }
    }
    count.into_iter().filter(|(_, (n, _))| *n == 1).map(|(f, (_, o))| (f, o)).collect()
}

/// Box point of minimal height (then lexicographically least) of a
/// simplicial cone in `N_d`.
fn box_point(ell: &[i64], us: &[Vec<i64>], d: i64) -> Result<Option<Vec<i64>>> {
    let k = us.len();
    let bound: Vec<i64> = (0..k).map(|j| us.iter().map(|u| u[j].abs()).sum()).collect();
    let basis: Vec<Vec<Rat>> = us.iter().map(|u| to_rat(u)).collect();
    let mut best: Option<(i64, Vec<i64>)> = None;
    let mut cur: Vec<i64> = bound.iter().map(|b| -b).collect();
    loop {
        let h = ell_of(ell, &cur);
        if h > 0 && h % d == 0 {
            if let Some(a) = solve_left(&basis, &to_rat(&cur)) {
                let one = Rat::from_integer(1.into());
                if a.iter().all(|x| !x.is_negative() && *x < one) {
                    let cand = (h, cur.clone());
                    if best.as_ref().map(|b| cand < *b).unwrap_or(true) {
                        best = Some(cand);
                    }
                }
            }
        }
        let mut j = 0;
        while j < k {
            if cur[j] < bound[j] {
                cur[j] += 1;
                break;
            }
            cur[j] = -bound[j];
            j += 1;
        }
        if j == k {
            break;
        }
    }
    Ok(best.map(|b| b.1))
}

/// Coefficients of `v` in the basis given by the rays of a simplicial cone.
fn coefficients(rays: &[Vec<i64>], v: &[i64]) -> Option<Vec<Rat>> {
    let basis: Vec<Vec<Rat>> = rays.iter().map(|r| to_rat(r)).collect();
    solve_left(&basis, &to_rat(v))
}

fn star_subdivide(cones: &[Vec<Vec<i64>>], rho: &[i64]) -> Vec<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for c in cones {
        match coefficients(c, rho) {
            Some(a) if a.iter().all(|x| !x.is_negative()) => {
                for (i, ai) in a.iter().enumerate() {
                    if ai.is_zero() {
                        continue;
                    }
                    let mut nc = c.clone();
                    nc[i] = rho.to_vec();
                    out.push(nc);
                }
            }
            _ => out.push(c.clone()),
        }
    }
    out
}

/// Linear functional agreeing with `ω` on the rays of a simplicial cone.
fn interpolate(rays: &[Vec<i64>], omega: &BTreeMap<Vec<i64>, Rat>) -> Option<Vec<Rat>> {
    // solve R h = ω(R) for h
    let k = rays.len();
    let rows: Vec<Vec<Rat>> = (0..k).map(|j| rays.iter().map(|r| Rat::from_integer(r[j].into())).collect()).collect();
    let target: Vec<Rat> = rays.iter().map(|r| omega[r].clone()).collect();
    solve_left(&rows, &target)
}

fn eval(h: &[Rat], v: &[i64]) -> Rat {
    h.iter().zip(v).fold(Rat::zero(), |acc, (a, b)| acc + a * Rat::from_integer((*b).into()))
}

/// Strict convexity of the piecewise linear extension of `ω`.
fn is_coherent(cones: &[Vec<Vec<i64>>], omega: &BTreeMap<Vec<i64>, Rat>) -> bool {
    for c in cones {
        let Some(h) = interpolate(c, omega) else { return false };
        for (r, w) in omega {
            if !c.contains(r) && eval(&h, r) >= *w {
                return false;
            }
        }
    }
    true
}

const COHERENCE_TRIES: u32 = 60;

/// Semistable subdivision: the least `d` reached by the refinement loop and
/// a unimodular fan in `N_d` subdividing `σ`.
pub fn semistable_subdivision(pair: &MonoidPair, max_iters: u64) -> Result<HeightedFan> {
    if !is_admissible_pair(pair)?.admissible {
        return Err(Error::pre("pair is not admissible"));
    }
    let inv = gp_invariants(pair)?;
    if !inv.torsion.is_empty() {
        return Err(Error::pre(format!("Q^gp/P^gp has torsion {:?}", inv.torsion)));
    }
    let f = frame(pair)?;
    let k = f.basis.len();
    let ell = f.ell.clone();
    let rays = facet_normals(&f.gens, k)?;
    let mut cones = placing(&rays, k)?;

    // lifting heights: placing lifts later rays high
    let mut omega: BTreeMap<Vec<i64>, Rat> = BTreeMap::new();
    let mut coherent = true;
    {
        let init: Vec<Vec<i64>> = cones[0].clone();
        for r in &init {
            omega.insert(r.clone(), Rat::zero());
        }
        let mut h = Rat::from_integer(1.into());
        for r in rays.iter().filter(|r| !init.contains(r)) {
            omega.insert(r.clone(), h.clone());
            h *= Rat::from_integer(4.into());
        }
        let mut tries = 0;
        while !is_coherent(&cones, &omega) {
            tries += 1;
            if tries > COHERENCE_TRIES {
                coherent = false;
                break;
            }
            // spread the placing heights further apart
            for (i, r) in rays.iter().filter(|r| !init.contains(r)).enumerate() {
                let w = omega.get_mut(r).unwrap();
                *w *= Rat::from_integer((2 + i as i64).into());
            }
        }
    }

    let mut d = rays.iter().fold(1i64, |acc, r| acc.lcm(&ell_of(&ell, r)));
    let mut iters = 0u64;
    loop {
        let mut bad: Option<(usize, i64)> = None;
        for (i, c) in cones.iter().enumerate() {
            let (ok, mult) = is_unimodular(&ell, c, d)?;
            if !ok {
                bad = Some((i, mult));
                break;
            }
        }
        let Some((i, mult)) = bad else { break };
        iters += 1;
        if iters > max_iters {
            return Err(Error::cap(
                "max-subdiv-iters",
                max_iters,
                format!("cone {:?} has multiplicity {mult} at d = {d}", cones[i]),
            ));
        }
        let us: Vec<Vec<i64>> = cones[i].iter().map(|r| nd_generator(&ell, r, d)).collect();
        let p = box_point(&ell, &us, d)?.ok_or_else(|| Error::cert("non-unimodular cone without box point"))?;
        let rho = primitive(&p);
        let h = ell_of(&ell, &rho);
        if d % h != 0 {
            d = d.lcm(&h);
        }
        // pull the new ray slightly below the current lift
        let host = cones
            .iter()
            .find(|c| coefficients(c, &rho).map(|a| a.iter().all(|x| !x.is_negative())).unwrap_or(false))
            .cloned()
            .ok_or_else(|| Error::cert("new ray outside the fan"))?;
        let new_cones = star_subdivide(&cones, &rho);
        if coherent {
            let base = interpolate(&host, &omega).map(|h| eval(&h, &rho));
            match base {
                Some(b) => {
                    let mut delta = Rat::from_integer(1.into());
                    let mut ok = false;
                    for _ in 0..COHERENCE_TRIES {
                        omega.insert(rho.clone(), &b - &delta);
                        if is_coherent(&new_cones, &omega) {
                            ok = true;
                            break;
                        }
                        delta /= Rat::from_integer(2.into());
                    }
                    coherent = ok;
                }
                None => coherent = false,
            }
        }
        cones = new_cones;
    }
    let lifting = coherent.then(|| omega.into_iter().collect::<Vec<_>>());
    let fan = HeightedFan {
        d,
        lfunc: ell.clone(),
        cones: canonical_cones(cones.iter().map(|c| c.iter().map(|r| nd_generator(&ell, r, d)).collect()).collect()),
        lifting,
    };
    let verdict = verify_subdivision(&fan, pair)?;
    if !verdict.passed {
        return Err(Error::cert(format!("subdivision failed its own verification: {:?}", verdict.failures)));
    }
    Ok(fan)
}

/// Generators in decreasing lexicographic order, cones sorted.
fn canonical_cones(mut cones: Vec<Vec<Vec<i64>>>) -> Vec<Vec<Vec<i64>>> {
    for c in &mut cones {
        c.sort_by(|a, b| b.cmp(a));
    }
    cones.sort();
    cones
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeFailure {
    pub cone: usize,
    /// `a` (support), `b` (simplicial), `c` (unimodular) or `lifting`.
    pub condition: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubdivisionVerdict {
    pub passed: bool,
    pub failures: Vec<ConeFailure>,
    /// `|det| / [N : N_d]` for each cone.
    pub multiplicities: Vec<i64>,
    /// `None` when no lifting function was supplied.
    pub coherent: Option<bool>,
}

fn cross_section_volume(ell: &[i64], rays: &[Vec<i64>]) -> Rat {
    let vs: Vec<Vec<Rat>> = rays
        .iter()
        .map(|r| {
            let h = Rat::from_integer(ell_of(ell, r).into());
            r.iter().map(|x| Rat::from_integer((*x).into()) / &h).collect()
        })
        .collect();
    det_rat(&vs).abs()
}

/// Checks that the fan subdivides `σ`, is simplicial, and is unimodular in
/// `N_d` with all generators at rescaled height one.
pub fn verify_subdivision(fan: &HeightedFan, pair: &MonoidPair) -> Result<SubdivisionVerdict> {
    let f = frame(pair)?;
    let k = f.basis.len();
    let ell = &f.ell;
    let mut failures = Vec::new();
    let mut multiplicities = Vec::new();
    if fan.lfunc != *ell {
        failures.push(ConeFailure { cone: 0, condition: "a", detail: "height functional differs from λ(1)".into() });
    }
    if fan.d <= 0 {
        return Err(Error::pre("d must be positive"));
    }
    let sigma_rays = facet_normals(&f.gens, k)?;
    let in_sigma = |v: &[i64]| f.gens.iter().all(|q| dot(q, v) >= 0);
    let mut prim_cones: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut volume = Rat::zero();
    let idx = index_of(ell, fan.d);
    for (i, c) in fan.cones.iter().enumerate() {
        if c.len() != k || c.iter().any(|u| u.len() != k) {
            failures.push(ConeFailure {
                cone: i,
                condition: "b",
                detail: format!("{} generators in rank {k}", c.len()),
            });
            multiplicities.push(0);
            continue;
        }
        let det = det_int(c)?.abs();
        if det == 0 {
            failures.push(ConeFailure { cone: i, condition: "b", detail: "generators are dependent".into() });
            multiplicities.push(0);
            continue;
        }
        if let Some(u) = c.iter().find(|u| !in_sigma(u)) {
            failures.push(ConeFailure { cone: i, condition: "a", detail: format!("generator {u:?} outside σ") });
        }
        let mult = det / idx;
        multiplicities.push(if det % idx == 0 { mult } else { 0 });
        let heights: Vec<i64> = c.iter().map(|u| ell_of(ell, u)).collect();
        if heights.iter().any(|&h| h != fan.d) {
            failures.push(ConeFailure {
                cone: i,
                condition: "c",
                detail: format!("heights {heights:?} differ from d = {}", fan.d),
            });
        } else if det != idx {
            failures.push(ConeFailure {
                cone: i,
                condition: "c",
                detail: format!("index {} at cone {:?}", det / idx.max(1), c),
            });
        }
        let prim: Vec<Vec<i64>> = c.iter().map(|u| primitive(u)).collect();
        volume += cross_section_volume(ell, &prim);
        prim_cones.push(prim);
    }

    // support: volumes add up and facets glue correctly
    let sigma_volume: Rat = placing(&sigma_rays, k)?.iter().map(|c| cross_section_volume(ell, c)).sum();
    if volume != sigma_volume {
        failures.push(ConeFailure {
            cone: 0,
            condition: "a",
            detail: format!("cross-section volume {volume} differs from that of σ, {sigma_volume}"),
        });
    }
    let mut facets: BTreeMap<Vec<Vec<i64>>, Vec<(usize, Vec<i64>)>> = BTreeMap::new();
    for (ci, c) in prim_cones.iter().enumerate() {
        for i in 0..c.len() {
            let fct: Vec<Vec<i64>> = c.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r.clone()).collect();
            facets.entry(sorted_set(&fct)).or_default().push((ci, c[i].clone()));
        }
    }
    for (fct, owners) in &facets {
        let on_boundary =
            f.sigma_facets.is_empty() || (k == 1 && fct.is_empty()) || f.sigma_facets_contains(fct, &f.gens);
        let refs: Vec<&Vec<i64>> = fct.iter().collect();
        let ok = match (on_boundary, owners.len()) {
            (true, 1) => true,
            (false, 2) => match hyperplane_normal(&refs, k)? {
                Some(nv) => dot(&nv, &owners[0].1).signum() * dot(&nv, &owners[1].1).signum() < 0,
                None => false,
            },
            _ => false,
        };
        if !ok {
            failures.push(ConeFailure {
                cone: owners[0].0,
                condition: "a",
                detail: format!("facet {fct:?} shared by {} cones", owners.len()),
            });
        }
    }

    let coherent = fan.lifting.as_ref().map(|l| {
        let omega: BTreeMap<Vec<i64>, Rat> = l.iter().cloned().collect();
        prim_cones.iter().all(|c| c.iter().all(|r| omega.contains_key(r))) && is_coherent(&prim_cones, &omega)
    });
    if coherent == Some(false) {
        failures.push(ConeFailure {
            cone: 0,
            condition: "lifting",
            detail: "lifting function is not strictly convex".into(),
        });
    }
    Ok(SubdivisionVerdict { passed: failures.is_empty(), failures, multiplicities, coherent })
}

impl Frame {
    /// Is the facet (rays, primitive) contained in a facet of `σ`, i.e. does
    /// some generator of `Q` vanish on all of it?
    fn sigma_facets_contains(&self, fct: &[Vec<i64>], gens: &[Vec<i64>]) -> bool {
        gens.iter().any(|q| fct.iter().all(|r| dot(q, r) == 0))
    }
}

/// The chart monoid of a unimodular cone: `ℕ^k` with `λ_d(1)` the sum of
/// the generators, together with the characters they correspond to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartMonoid {
    pub pair: MonoidPair,
    /// Dual basis `m_i` in `Q^gp ⊗ ℚ`, ambient coordinates.
    pub characters: Vec<Vec<Rat>>,
    /// `⟨u_i, q⟩` for every generator `q` of the input `Q` (rows: `q`).
    pub pullback: Vec<Vec<i64>>,
    pub d: i64,
}

/// Dual monoid of a cone of a verified fan inside `Q^gp + ℤ·λ(1)/d`.
pub fn chart_monoid(cone: &[Vec<i64>], pair: &MonoidPair, d: i64) -> Result<ChartMonoid> {
    let f = frame(pair)?;
    let k = f.basis.len();
    let ell = &f.ell;
    if cone.len() != k {
        return Err(Error::cert("cone is not simplicial of full dimension"));
    }
    let (ok, mult) = is_unimodular(ell, cone, d)?;
    if !ok || cone.iter().any(|u| ell_of(ell, u) != d) {
        return Err(Error::cert(format!("cone {cone:?} is not unimodular at height one (multiplicity {mult})")));
    }
    // dual basis: rows m_i with <u_j, m_i> = δ_ij
    let u: Vec<Vec<Rat>> = cone.iter().map(|r| to_rat(r)).collect();
    let ut: Vec<Vec<Rat>> = (0..k).map(|j| u.iter().map(|r| r[j].clone()).collect()).collect();
    let mut dual: Vec<Vec<Rat>> = Vec::new();
    for i in 0..k {
        let e: Vec<Rat> = (0..k).map(|j| Rat::from_integer(i64::from(i == j).into())).collect();
        // m with U m = e, i.e. m·Uᵀ = e
        dual.push(solve_left(&ut, &e).ok_or_else(|| Error::cert("cone generators are dependent"))?);
    }
    let dd = Rat::from_integer(d.into());
    let lam_d: Vec<Rat> = ell.iter().map(|x| Rat::from_integer((*x).into()) / &dd).collect();
    let sum: Vec<Rat> = (0..k).map(|j| dual.iter().map(|m| m[j].clone()).sum()).collect();
    if sum != lam_d {
        return Err(Error::cert("λ(1)/d is not the sum of the dual basis"));
    }
    for m in &dual {
        let in_md =
            (0..d).any(|jj| m.iter().zip(&lam_d).all(|(a, l)| (a - l * Rat::from_integer(jj.into())).is_integer()));
        if !in_md {
            return Err(Error::cert("dual generator outside Q^gp + ℤλ(1)/d"));
        }
    }
    // pullback of the original generators
    let mut pullback = Vec::new();
    for g in pair.q.generators() {
        let c = lattice_coords(&f.basis, g).ok_or_else(|| Error::cert("generator outside Q^gp"))?;
        let row: Vec<i64> = cone.iter().map(|ui| dot(ui, &c)).collect();
        if row.iter().any(|&x| x < 0) {
            return Err(Error::cert("generator of Q is negative on the cone"));
        }
        pullback.push(row);
    }
    let characters: Vec<Vec<Rat>> = dual
        .iter()
        .map(|m| {
            (0..pair.q.ambient_rank())
                .map(|i| m.iter().zip(&f.basis).map(|(a, b)| a * Rat::from_integer(b[i].into())).sum())
                .collect()
        })
        .collect();
    let chart_pair = MonoidPair::semistable(k - 1);
    Ok(ChartMonoid { pair: chart_pair, characters, pullback, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::AffineMonoid;

    fn pair(gens: &[&[i64]], lam: &[i64]) -> MonoidPair {
        let n = lam.len();
        MonoidPair::new(AffineMonoid::new(n, gens.iter().map(|g| g.to_vec()).collect()).unwrap(), lam.to_vec()).unwrap()
    }

    fn a1() -> MonoidPair {
        pair(&[&[1, 0], &[1, 1], &[1, 2]], &[1, 1])
    }

    #[test]
    fn dual_cones() {
        let (c, l) = dual_cone(&pair(&[&[1, 0], &[0, 1]], &[1, 1])).unwrap();
        assert_eq!(c.rays, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(l, vec![1, 1]);
        let (c, l) = dual_cone(&pair(&[&[1, 0], &[0, 1]], &[1, 2])).unwrap();
        let heights: Vec<i64> = c.rays.iter().map(|r| dot(r, &l)).collect();
        assert_eq!(heights, vec![2, 1]);
        let (c, l) = dual_cone(&a1()).unwrap();
        assert_eq!(c.rays, vec![vec![0, 1], vec![2, -1]]);
        assert_eq!(c.rays.iter().map(|r| dot(r, &l)).collect::<Vec<_>>(), vec![1, 1]);
    }

    #[test]
    fn subdivisions() {
        for m in 0..=3 {
            let fan = semistable_subdivision(&MonoidPair::semistable(m), 200).unwrap();
            assert_eq!((fan.d, fan.cones.len()), (1, 1));
        }
        let p = pair(&[&[1, 0], &[0, 1]], &[1, 2]);
        let fan = semistable_subdivision(&p, 200).unwrap();
        assert_eq!(fan.d, 2);
        assert_eq!(fan.cones, vec![vec![vec![2, 0], vec![0, 1]]]);

        let fan = semistable_subdivision(&a1(), 200).unwrap();
        assert_eq!(fan.d, 1);
        assert_eq!(fan.cones.len(), 2);
        assert!(fan.cones.iter().all(|c| c.contains(&vec![1, 0])));
        assert_eq!(verify_subdivision(&fan, &a1()).unwrap().coherent, Some(true));
    }

    #[test]
    fn verification_failures() {
        let fan = HeightedFan { d: 1, lfunc: vec![1, 1], cones: vec![vec![vec![0, 1], vec![2, -1]]], lifting: None };
        let v = verify_subdivision(&fan, &a1()).unwrap();
        assert!(!v.passed);
        assert_eq!(v.multiplicities, vec![2]);
        assert_eq!(v.failures[0].condition, "c");

        let overlap = HeightedFan {
            d: 1,
            lfunc: vec![1, 1],
            cones: vec![vec![vec![0, 1], vec![1, 0]], vec![vec![0, 1], vec![2, -1]], vec![vec![1, 0], vec![2, -1]]],
            lifting: None,
        };
        let v = verify_subdivision(&overlap, &a1()).unwrap();
        assert!(v.failures.iter().any(|f| f.condition == "a"));
    }

    #[test]
    fn chart_monoids() {
        let p = pair(&[&[1, 0], &[0, 1]], &[1, 2]);
        let cm = chart_monoid(&[vec![2, 0], vec![0, 1]], &p, 2).unwrap();
        assert_eq!(
            cm.characters,
            vec![vec![Rat::new(1.into(), 2.into()), Rat::zero()], vec![Rat::zero(), Rat::from_integer(1.into())]]
        );
        // x = w0^2, y = w1
        assert_eq!(cm.pullback, vec![vec![2, 0], vec![0, 1]]);
        let cm = chart_monoid(&[vec![0, 1], vec![1, 0]], &a1(), 1).unwrap();
        assert_eq!(cm.pair, MonoidPair::semistable(1));
        assert!(chart_monoid(&[vec![0, 1], vec![2, -1]], &a1(), 1).is_err());
    }
}
