//! Worked examples, each compared with a hand computation or a brute-force
//! search that does not go through the library's algorithms.

use valuform_core::blowup::{ann_lift, blowup_chart, strict_transform, PresentedAlgebra};
use valuform_core::monoid::{gp_invariants, saturate_monoid, AffineMonoid, MonoidPair, SaturationLattice};
use valuform_core::poly::{
    eliminate, groebner_basis, ideal_quotient, ideal_rel, int, krull_dim, saturate, smooth_at, RelationVerdict,
};
use valuform_core::polyhedral::{chart_monoid, dual_cone, verify_subdivision, HeightedFan};
use valuform_core::valuation::{center, effective_height, MonomialValuation};
use valuform_core::{Ideal, MonomialOrder, Polynomial, RationalPoint, Ring};

fn ring(vars: &[&str]) -> std::sync::Arc<Ring> {
    Ring::new(vars.iter().copied(), None).unwrap()
}

fn monomials(n: usize, max_deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|e| (0..=max_deg).map(move |k| [e.clone(), vec![k]].concat())).collect();
    }
    out.retain(|e| e.iter().sum::<u32>() <= max_deg);
    out
}

fn mono(r: &Ring, e: &[u32]) -> Polynomial {
    let mut p = r.one();
    for (i, k) in e.iter().enumerate() {
        p = &p * &r.gen(i).pow(*k);
    }
    p
}

/// Membership in the monomial ideal `(x·w², x²)` of `ℚ[x, w]`.
fn in_xw2_x2(e: &[u32]) -> bool {
    (e[0] >= 1 && e[1] >= 2) || e[0] >= 2
}

fn equal(a: &Ideal, b: &Ideal) -> bool {
    ideal_rel(a, b).unwrap().verdict == RelationVerdict::Equal
}

#[test]
fn lex_basis_of_a_parabola_and_its_tangent() {
    let r = ring(&["x", "y"]);
    let gens = r.parse_all(&["x^2 - y", "y"]).unwrap();
    let gb = groebner_basis(&gens, 2, &MonomialOrder::Lex, r.limits()).unwrap();
    let mut got = r.fmt_polys(&gb.polys);
    got.sort();
    // one S-polynomial: x^2 - y reduces by y to x^2
    assert_eq!(got, ["x^2", "y"]);
}

#[test]
fn ideal_comparisons() {
    let r = Ring::new(["x", "y", "pi"], Some("pi")).unwrap();
    let i = Ideal::parse(&r, &["x*y - pi", "pi"]).unwrap();
    assert!(equal(&i, &Ideal::parse(&r, &["pi", "x*y"]).unwrap()));
    let v = ideal_rel(&Ideal::parse(&r, &["x*y - pi"]).unwrap(), &Ideal::parse(&r, &["pi"]).unwrap()).unwrap();
    assert_eq!(v.verdict, RelationVerdict::Incomparable);
}

#[test]
fn colon_by_w_matches_monomial_brute_force() {
    let r = ring(&["x", "w"]);
    let i = Ideal::parse(&r, &["x*w^2", "x^2"]).unwrap();
    let q = ideal_quotient(&i, &r.gen(1)).unwrap();
    assert!(equal(&q, &Ideal::parse(&r, &["x*w", "x^2"]).unwrap()));
    for e in monomials(2, 3) {
        assert_eq!(q.contains(&mono(&r, &e)).unwrap(), in_xw2_x2(&[e[0], e[1] + 1]), "{e:?}");
    }
}

#[test]
fn saturation_stabilizes_at_two() {
    let r = ring(&["x", "w"]);
    let i = Ideal::parse(&r, &["x*w^2", "x^2"]).unwrap();
    let (s, e) = saturate(&i, &r.gen(1)).unwrap();
    // I : w^k by hand: k = 1 gives (x·w, x^2), k ≥ 2 gives (x)
    let colon = |k: u32, m: &[u32]| in_xw2_x2(&[m[0], m[1] + k]);
    let k_stable = (1..6).find(|k| monomials(2, 3).iter().all(|m| colon(*k, m) == colon(k + 1, m))).unwrap();
    assert_eq!(e, k_stable);
    assert_eq!(e, 2);
    for m in monomials(2, 3) {
        assert_eq!(s.contains(&mono(&r, &m)).unwrap(), colon(5, &m));
    }
}

#[test]
fn eliminating_x_substitutes_the_chart_map() {
    let r = Ring::new(["x", "y", "z'", "pi"], Some("pi")).unwrap();
    let i = Ideal::parse(&r, &["x - z'*y", "x*y - pi"]).unwrap();
    let e = eliminate(&i, &[0]).unwrap();
    assert!(equal(&e, &Ideal::parse(&r, &["z'*y^2 - pi"]).unwrap()));
    for (y, z) in [(1, 2), (-3, 5), (4, -1)] {
        let (y, z) = (int(y), int(z));
        let p = [z.clone() * y.clone(), y.clone(), z.clone(), z * y.clone() * y];
        assert!(e.gens().iter().all(|g| g.eval(&p) == int(0)));
    }
}

#[test]
fn cone_dimension_from_independent_sets() {
    let r = ring(&["x", "y", "z"]);
    let i = Ideal::parse(&r, &["x*y - z^2"]).unwrap();
    // leading term x·y: the largest variable sets avoiding {x, y} have size 2
    let lt = [true, true, false];
    let best = (0u32..8)
        .filter(|s| !(0..3).filter(|k| lt[*k]).all(|k| s >> k & 1 == 1))
        .map(|s| s.count_ones())
        .max()
        .unwrap();
    assert_eq!(krull_dim(&i).unwrap(), best as usize);
}

#[test]
fn graph_of_a_function_is_smooth() {
    let r = ring(&["x", "y", "z'"]);
    let i = Ideal::parse(&r, &["x - z'^2*y"]).unwrap();
    let v = smooth_at(&i, &RationalPoint::origin(&r), 2).unwrap();
    assert!(v.regular);
    assert_eq!(v.jacobian_rank, 1);
}

#[test]
fn torsion_of_the_diagonal_quotient() {
    let pair = MonoidPair::new(AffineMonoid::free(2), vec![2, 2]).unwrap();
    let g = gp_invariants(&pair).unwrap();
    // (1,1) is not in Z(2,2) but twice it is; Z^2/Z(1,1) is free of rank 1
    assert_eq!(g.rank, 1);
    assert_eq!(g.torsion, [2]);
}

/// Irreducible lattice points of a plane cone inside a box.
fn hilbert_basis_2d(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let normals: Vec<[i64; 2]> =
        [[1, 0], [0, 1], [-1, 0], [0, -1], [1, -1], [-1, 1], [2, -1], [-2, 1], [1, -2], [-1, 2]]
            .into_iter()
            .filter(|n| gens.iter().all(|g| n[0] * g[0] + n[1] * g[1] >= 0))
            .collect();
    let inside = |p: [i64; 2]| normals.iter().all(|n| n[0] * p[0] + n[1] * p[1] >= 0);
    let pts: Vec<[i64; 2]> =
        (-4..=4).flat_map(|a| (-4..=4).map(move |b| [a, b])).filter(|p| *p != [0, 0] && inside(*p)).collect();
    let mut basis: Vec<Vec<i64>> = pts
        .iter()
        .filter(|p| {
            !pts.iter().any(|q| q != *p && inside([p[0] - q[0], p[1] - q[1]]) && [p[0] - q[0], p[1] - q[1]] != [0, 0])
        })
        .map(|p| p.to_vec())
        .collect();
    basis.sort();
    basis
}

#[test]
fn saturation_adds_the_middle_point() {
    let q = AffineMonoid::new(2, vec![vec![1, 0], vec![1, 2]]).unwrap();
    let s = saturate_monoid(&q, SaturationLattice::Ambient).unwrap();
    let mut got = s.generators().to_vec();
    got.sort();
    assert_eq!(got, hilbert_basis_2d(q.generators()));
    assert!(got.contains(&vec![1, 1]));
    let two = AffineMonoid::new(1, vec![vec![2]]).unwrap();
    assert_eq!(saturate_monoid(&two, SaturationLattice::Ambient).unwrap().generators(), [vec![1]]);
}

fn a1_pair() -> MonoidPair {
    MonoidPair::new(AffineMonoid::new(2, vec![vec![1, 0], vec![1, 1], vec![1, 2]]).unwrap(), vec![1, 1]).unwrap()
}

#[test]
fn plane_dual_cones() {
    let (cone, ell) = dual_cone(&a1_pair()).unwrap();
    // facets of cone((1,0),(1,2)) have inward normals (0,1) and (2,-1)
    let mut rays = cone.rays.clone();
    rays.sort();
    assert_eq!(rays, [vec![0, 1], vec![2, -1]]);
    assert_eq!(ell, [1, 1]);
    let heights: Vec<i64> = rays.iter().map(|r| r[0] * ell[0] + r[1] * ell[1]).collect();
    assert_eq!(heights, [1, 1]);
    let (cone, ell) = dual_cone(&MonoidPair::new(AffineMonoid::free(2), vec![1, 2]).unwrap()).unwrap();
    let mut h: Vec<i64> = cone.rays.iter().map(|r| r[0] * ell[0] + r[1] * ell[1]).collect();
    h.sort();
    assert_eq!(h, [1, 2]);
}

#[test]
fn unsubdivided_a1_cone_has_index_two() {
    let fan = HeightedFan { d: 1, lfunc: vec![1, 1], cones: vec![vec![vec![0, 1], vec![2, -1]]], lifting: None };
    let v = verify_subdivision(&fan, &a1_pair()).unwrap();
    assert!(!v.passed);
    let (p, q) = ([0i64, 1], [2i64, -1]);
    let det = (p[0] * q[1] - p[1] * q[0]).abs();
    assert_eq!(v.multiplicities, [det]);
}

#[test]
fn chart_monoid_of_the_doubled_line() {
    let pair = MonoidPair::new(AffineMonoid::free(2), vec![1, 2]).unwrap();
    let cm = chart_monoid(&[vec![2, 0], vec![0, 1]], &pair, 2).unwrap();
    assert_eq!(cm.pair, MonoidPair::semistable(1));
    // x = u^2 and y = w: pairings of (2,0), (0,1) with e_1 and e_2
    let mut rows = cm.pullback.clone();
    rows.sort();
    assert_eq!(rows, [vec![0, 1], vec![2, 0]]);
}

#[test]
fn plane_blowup_and_strict_transform() {
    let r = ring(&["x", "y"]);
    let a = PresentedAlgebra::new(Ideal::zero(r.clone()));
    let res = blowup_chart(&a, &r.parse_all(&["x", "y"]).unwrap(), 1).unwrap();
    assert!(res.chart.relations.canonical().unwrap().is_empty());
    let cr = res.chart.ring().clone();
    // x = x'·y at a few points (x', y)
    for (xp, y) in [(2, 3), (-1, 5)] {
        let mut p = vec![int(0); cr.nvars()];
        for (i, name) in cr.vars().iter().enumerate() {
            p[i] = if name == "y" { int(y) } else { int(xp) };
        }
        assert_eq!(res.var_images[0].eval(&p), int(xp * y));
        assert_eq!(res.var_images[1].eval(&p), int(y));
    }
    let st = strict_transform(&res, &Ideal::parse(&r, &["x"]).unwrap()).unwrap();
    let xp = cr.vars().iter().find(|v| *v != "y").unwrap().clone();
    assert!(equal(&st, &Ideal::parse(&cr, &[xp.as_str()]).unwrap()));
}

#[test]
fn annihilator_exponents_by_brute_force() {
    let r = ring(&["x", "w"]);
    let j = Ideal::parse(&r, &["x"]).unwrap();
    let c = PresentedAlgebra::new(Ideal::parse(&r, &["x*w"]).unwrap());
    assert_eq!(ann_lift(&c, &j, &r.gen(1)).unwrap().exponent, 1);
    let c = PresentedAlgebra::new(Ideal::parse(&r, &["x*w^2", "x^2"]).unwrap());
    // Ann(w^n) = {m : m·w^n ∈ I}, equal to (x) once w^n kills x
    let ann_is_x = |n: u32| monomials(2, 3).iter().all(|m| in_xw2_x2(&[m[0], m[1] + n]) == (m[0] >= 1));
    let least = (1..5).find(|n| ann_is_x(*n)).unwrap();
    let got = ann_lift(&c, &j, &r.gen(1)).unwrap();
    assert_eq!(got.exponent, least);
    assert_eq!(got.exponent, 2);
}

#[test]
fn valuation_values_and_heights() {
    let r = ring(&["x", "y"]);
    let alg = PresentedAlgebra::new(Ideal::zero(r.clone()));
    // w(x) = (0,1), w(y) = (1,0)
    let v = MonomialValuation::from_ints(alg.clone(), &[vec![0, 1], vec![1, 0]]).unwrap();
    let lexmin = |terms: &[[i64; 2]]| *terms.iter().min().unwrap();
    let val = |s: &str| {
        v.value(&r.parse(s).unwrap())
            .unwrap()
            .unwrap()
            .iter()
            .map(|q| q.to_integer().try_into().unwrap())
            .collect::<Vec<i64>>()
    };
    assert_eq!(val("x + y"), lexmin(&[[0, 1], [1, 0]]));
    assert_eq!(val("x*y"), [1, 1]);
    let flat = MonomialValuation::from_ints(alg, &[vec![1, 0], vec![2, 0]]).unwrap();
    assert_eq!(effective_height(&flat), 1);
}

#[test]
fn cone_valuation_centers_on_the_line() {
    let alg = PresentedAlgebra::parse(&["x", "y", "z"], None, &["x*y - z^2"]).unwrap();
    let r = alg.ring().clone();
    let v = MonomialValuation::from_ints(alg.clone(), &[vec![2, 0, 1]]).unwrap();
    let c = center(&v).unwrap();
    // positive on x and z only; the quotient by (x, z) is Q[y]
    assert!(equal(&c.ideal, &Ideal::parse(&r, &["x", "z"]).unwrap()));
    assert_eq!(krull_dim(&alg.relations.with(r.parse_all(&["x", "z"]).unwrap())).unwrap(), 1);
    assert_eq!(c.dim, 1);
}
