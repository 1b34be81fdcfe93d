use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::groebner::{groebner_basis, normal_form, GroebnerBasis};
use super::{MonomialOrder, Polynomial, Rat, RationalPoint, Ring};
use crate::linalg::rational_rank;
use crate::{Error, Result};

/// An ideal given by generators, with an optional cached Gröbner basis.
#[derive(Clone, Debug)]
pub struct Ideal {
    ring: Arc<Ring>,
    gens: Vec<Polynomial>,
    basis: Option<GroebnerBasis>,
}

impl PartialEq for Ideal {
    /// Structural equality of generators; use [`ideal_rel`] for ideal equality.
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.gens == other.gens
    }
}

impl Ideal {
    pub fn new(ring: Arc<Ring>, gens: Vec<Polynomial>) -> Self {
        let n = ring.nvars();
        let gens = gens.into_iter().filter(|g| !g.is_zero()).collect::<Vec<_>>();
        debug_assert!(gens.iter().all(|g| g.nvars() == n));
        Ideal { ring, gens, basis: None }
    }

    pub fn parse<S: AsRef<str>>(ring: &Arc<Ring>, gens: &[S]) -> Result<Self> {
        Ok(Ideal::new(ring.clone(), ring.parse_all(gens)?))
    }

    pub fn zero(ring: Arc<Ring>) -> Self {
        Ideal::new(ring, Vec::new())
    }

    pub fn unit(ring: Arc<Ring>) -> Self {
        let one = ring.one();
        Ideal::new(ring, vec![one])
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn cached_basis(&self) -> Option<&GroebnerBasis> {
        self.basis.as_ref()
    }

    /// Same ideal with the reduced basis for `order` cached.
    pub fn groebner(&self, order: &MonomialOrder) -> Result<Ideal> {
        if let Some(b) = &self.basis {
            if &b.order == order {
                return Ok(self.clone());
            }
        }
        let b = groebner_basis(&self.gens, self.ring.nvars(), order, self.ring.limits())?;
        Ok(Ideal { ring: self.ring.clone(), gens: self.gens.clone(), basis: Some(b) })
    }

    /// Reduced graded reverse lexicographic basis (cached if present).
    pub fn basis(&self) -> Result<GroebnerBasis> {
        match &self.basis {
            Some(b) if b.order == MonomialOrder::GrevLex => Ok(b.clone()),
            _ => groebner_basis(&self.gens, self.ring.nvars(), &MonomialOrder::GrevLex, self.ring.limits()),
        }
    }

    /// Ideal with its grevlex basis cached, for repeated membership tests.
    pub fn prepared(&self) -> Result<Ideal> {
        self.groebner(&MonomialOrder::GrevLex)
    }

    pub fn reduce(&self, f: &Polynomial) -> Result<Polynomial> {
        Ok(normal_form(f, &self.basis()?))
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        Ok(self.reduce(f)?.is_zero())
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.basis()?.is_unit())
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.gens.is_empty()
    }

    /// Generators of the reduced grevlex basis: a canonical form.
    pub fn canonical(&self) -> Result<Vec<Polynomial>> {
        Ok(self.basis()?.polys)
    }

    pub fn with(&self, extra: impl IntoIterator<Item = Polynomial>) -> Ideal {
        let mut gens = self.gens.clone();
        gens.extend(extra);
        Ideal::new(self.ring.clone(), gens)
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        Ok(self.with(other.gens.iter().cloned()))
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let mut gens = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                gens.push(a * b);
            }
        }
        Ok(Ideal::new(self.ring.clone(), gens))
    }

    /// Extension along the ring map sending variable `i` to `images[i]`.
    pub fn map(&self, target: &Arc<Ring>, images: &[Polynomial]) -> Ideal {
        Ideal::new(target.clone(), self.gens.iter().map(|g| g.substitute(images)).collect())
    }

    pub fn is_subset(&self, other: &Ideal) -> Result<bool> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let b = other.basis()?;
        Ok(self.gens.iter().all(|g| normal_form(g, &b).is_zero()))
    }

    pub fn same_as(&self, other: &Ideal) -> Result<bool> {
        Ok(ideal_rel(self, other)?.verdict == RelationVerdict::Equal)
    }

    pub fn fmt_gens(&self) -> Vec<String> {
        self.ring.fmt_polys(&self.gens)
    }

    /// Printed reduced basis.
    pub fn fmt_canonical(&self) -> Result<Vec<String>> {
        Ok(self.ring.fmt_polys(&self.canonical()?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationVerdict {
    Equal,
    /// First ideal strictly inside the second.
    FirstInSecond,
    /// Second ideal strictly inside the first.
    SecondInFirst,
    Incomparable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealRelation {
    pub verdict: RelationVerdict,
    /// For each generator of the first ideal: does it lie in the second?
    pub first_in_second: Vec<bool>,
    /// For each generator of the second ideal: does it lie in the first?
    pub second_in_first: Vec<bool>,
}

/// Compares two ideals by mutual normal-form reduction.
pub fn ideal_rel(i: &Ideal, j: &Ideal) -> Result<IdealRelation> {
    if i.ring != j.ring {
        return Err(Error::RingMismatch);
    }
    let bi = i.basis()?;
    let bj = j.basis()?;
    let first_in_second: Vec<bool> = i.gens.iter().map(|g| normal_form(g, &bj).is_zero()).collect();
    let second_in_first: Vec<bool> = j.gens.iter().map(|g| normal_form(g, &bi).is_zero()).collect();
    let a = first_in_second.iter().all(|&b| b);
    let b = second_in_first.iter().all(|&b| b);
    let verdict = match (a, b) {
        (true, true) => RelationVerdict::Equal,
        (true, false) => RelationVerdict::FirstInSecond,
        (false, true) => RelationVerdict::SecondInFirst,
        (false, false) => RelationVerdict::Incomparable,
    };
    Ok(IdealRelation { verdict, first_in_second, second_in_first })
}

/// Exact division of polynomials, `None` if `f` does not divide `h`.
pub(crate) fn divide_exact(h: &Polynomial, f: &Polynomial) -> Option<Polynomial> {
    let order = MonomialOrder::GrevLex;
    let (lf, cf) = f.leading(&order)?;
    let (lf, cf) = (lf.clone(), cf.clone());
    let mut rem = h.clone();
    let mut q = Polynomial::zero(h.nvars());
    while let Some((lh, ch)) = rem.leading(&order) {
        if !lf.iter().zip(lh).all(|(a, b)| a <= b) {
            return None;
        }
        let shift: Vec<u32> = lh.iter().zip(&lf).map(|(a, b)| a - b).collect();
        let c = ch / &cf;
        rem = &rem - &f.mul_term(&shift, &c);
        q.add_term(shift, c);
    }
    Some(q)
}

/// Ring with one extra variable, and the embedding of the old ring.
fn with_extra(ring: &Arc<Ring>, name: &str) -> Result<(Arc<Ring>, usize, Vec<usize>)> {
    let (r2, idx) = ring.extend(&[name])?;
    let map: Vec<usize> = (0..ring.nvars()).collect();
    Ok((r2, idx[0], map))
}

/// The quotient `(I : f) = { g : g·f ∈ I }`.
pub fn ideal_quotient(i: &Ideal, f: &Polynomial) -> Result<Ideal> {
    if f.is_zero() {
        return Err(Error::pre("quotient by the zero polynomial"));
    }
    let ring = i.ring();
    if i.gens.is_empty() {
        return Ok(Ideal::zero(ring.clone()));
    }
    if let Some(c) = f.as_constant() {
        debug_assert!(!c.is_zero());
        return Ok(i.clone());
    }
    if i.is_unit()? {
        return Ok(Ideal::unit(ring.clone()));
    }
    // I ∩ (f) = (t·I + (1 - t)·f) ∩ k[x]
    let (r2, t, map) = with_extra(ring, "t_q")?;
    let n2 = r2.nvars();
    let tv = Polynomial::var(n2, t);
    let one = Polynomial::one(n2);
    let fe = f.embed(n2, &map);
    let mut gens: Vec<Polynomial> = i.gens.iter().map(|g| &tv * &g.embed(n2, &map)).collect();
    gens.push(&(&one - &tv) * &fe);
    let gb = groebner_basis(&gens, n2, &MonomialOrder::block(vec![t]), r2.limits())?;
    let back: Vec<usize> = (0..ring.nvars()).collect();
    let mut out = Vec::new();
    for g in gb.polys {
        if g.support().contains(&t) {
            continue;
        }
        // drop the extra slot
        let g = Polynomial::from_terms(
            ring.nvars(),
            g.terms().map(|(e, c)| (back.iter().map(|&k| e[k]).collect(), c.clone())),
        );
        let q = divide_exact(&g, f).ok_or_else(|| Error::cert("intersection element not divisible by f"))?;
        out.push(q);
    }
    Ideal::new(ring.clone(), out).groebner(&MonomialOrder::GrevLex)
}

/// Saturation `(I : f^∞)` and the least `e` with `(I : f^e) = (I : f^{e+1})`.
pub fn saturate(i: &Ideal, f: &Polynomial) -> Result<(Ideal, u32)> {
    if f.is_zero() {
        return Err(Error::pre("saturation by the zero polynomial"));
    }
    let cap = i.ring().limits().max_ann_exponent;
    let mut cur = i.prepared()?;
    for e in 0..=cap {
        let next = ideal_quotient(&cur, f)?;
        if next.is_subset(&cur)? {
            return Ok((cur, e));
        }
        cur = next;
    }
    Err(Error::cap("max-ann-exponent", cap.into(), "saturation did not stabilize"))
}

/// `I ∩ k[x \ vars]`, computed with a block elimination order.
pub fn eliminate(i: &Ideal, vars: &[usize]) -> Result<Ideal> {
    let n = i.ring().nvars();
    if vars.iter().any(|&v| v >= n) {
        return Err(Error::pre("elimination variable outside the ring"));
    }
    if vars.is_empty() {
        return Ok(i.clone());
    }
    let gb = groebner_basis(&i.gens, n, &MonomialOrder::block(vars.to_vec()), i.ring().limits())?;
    let kept = gb.polys.into_iter().filter(|g| g.support().iter().all(|v| !vars.contains(v))).collect();
    Ok(Ideal::new(i.ring().clone(), kept))
}

/// Krull dimension of `k[x]/I` from the initial ideal: the size of a largest
/// set of variables containing the support of no leading monomial.
pub fn krull_dim(i: &Ideal) -> Result<usize> {
    let b = i.basis()?;
    if b.is_unit() {
        return Err(Error::UnitIdeal);
    }
    let n = i.ring().nvars();
    if n > 24 {
        return Err(Error::cap("krull-dim-vars", 24, "too many variables for subset search"));
    }
    let masks: Vec<u32> = b
        .leading_monomials()
        .iter()
        .map(|e| e.iter().enumerate().filter(|(_, &k)| k > 0).fold(0u32, |m, (i, _)| m | (1 << i)))
        .collect();
    let mut best = 0usize;
    for s in 0u32..(1u32 << n) {
        let size = s.count_ones() as usize;
        if size <= best {
            continue;
        }
        if masks.iter().all(|&m| m & !s != 0) {
            best = size;
        }
    }
    Ok(best)
}

/// True iff `f` lies in the radical of `I` (Rabinowitsch trick).
pub fn radical_contains(i: &Ideal, f: &Polynomial) -> Result<bool> {
    let (r2, t, map) = with_extra(i.ring(), "t_r")?;
    let n2 = r2.nvars();
    let mut gens: Vec<Polynomial> = i.gens.iter().map(|g| g.embed(n2, &map)).collect();
    gens.push(&Polynomial::one(n2) - &(&Polynomial::var(n2, t) * &f.embed(n2, &map)));
    Ok(groebner_basis(&gens, n2, &MonomialOrder::GrevLex, r2.limits())?.is_unit())
}

/// The element `u` with `den·u ≡ num (mod I)`, assuming `den` is a
/// nonzerodivisor modulo `I`. Returns the normal form of `u`, or `None`
/// when `num` is not divisible by `den` in `k[x]/I`.
pub fn exact_quotient(i: &Ideal, num: &Polynomial, den: &Polynomial) -> Result<Option<Polynomial>> {
    if den.is_zero() {
        return Err(Error::pre("division by zero"));
    }
    if let Some(c) = den.as_constant() {
        return Ok(Some(i.reduce(&num.scale(&c.recip()))?));
    }
    if let Some(q) = divide_exact(num, den) {
        return Ok(Some(i.reduce(&q)?));
    }
    let ring = i.ring();
    let (r2, u, map) = with_extra(ring, "u_q")?;
    let n2 = r2.nvars();
    let uv = Polynomial::var(n2, u);
    let base = Ideal::new(
        r2.clone(),
        i.gens
            .iter()
            .map(|g| g.embed(n2, &map))
            .chain(core::iter::once(&(&den.embed(n2, &map) * &uv) - &num.embed(n2, &map)))
            .collect(),
    );
    let (sat, _) = saturate(&base, &den.embed(n2, &map))?;
    let gb = groebner_basis(sat.gens(), n2, &MonomialOrder::block(vec![u]), r2.limits())?;
    let mut unit_exp = vec![0u32; n2];
    unit_exp[u] = 1;
    for g in &gb.polys {
        if let Some((lm, _)) = g.leading(&gb.order) {
            if *lm == unit_exp {
                let rest = &uv - g;
                if rest.support().contains(&u) {
                    continue;
                }
                let q = Polynomial::from_terms(
                    ring.nvars(),
                    rest.terms().map(|(e, c)| (e[..ring.nvars()].to_vec(), c.clone())),
                );
                return Ok(Some(i.reduce(&q)?));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothVerdict {
    pub regular: bool,
    pub jacobian_rank: usize,
    /// `nvars - expected_dim`
    pub expected_rank: usize,
    /// `expected_rank - jacobian_rank` (saturating)
    pub corank: usize,
}

/// Jacobian criterion at a rational point with caller-supplied dimension.
pub fn smooth_at(i: &Ideal, p: &RationalPoint, expected_dim: usize) -> Result<SmoothVerdict> {
    let ring = i.ring();
    let n = ring.nvars();
    if expected_dim > n {
        return Err(Error::pre("expected dimension exceeds number of variables"));
    }
    let vals = p.values(ring)?;
    for g in &i.gens {
        let v = g.eval(&vals);
        if !v.is_zero() {
            return Err(Error::NotOnVariety(format!("{} = {} at the point", ring.fmt_poly(g), v)));
        }
    }
    let rows: Vec<Vec<Rat>> = i.gens.iter().map(|g| (0..n).map(|k| g.derivative(k).eval(&vals)).collect()).collect();
    let rank = rational_rank(&rows);
    let expected_rank = n - expected_dim;
    Ok(SmoothVerdict {
        regular: rank == expected_rank,
        jacobian_rank: rank,
        expected_rank,
        corank: expected_rank.saturating_sub(rank),
    })
}

fn det(m: &[Vec<Polynomial>], nvars: usize) -> Polynomial {
    let k = m.len();
    match k {
        0 => Polynomial::one(nvars),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Polynomial::zero(nvars);
            for c in 0..k {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Polynomial>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, v)| v.clone()).collect())
                    .collect();
                let t = &m[0][c] * &det(&minor, nvars);
                acc = if c % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
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

/// All `k×k` minors of the Jacobian of `gens`.
pub(crate) fn jacobian_minors(gens: &[Polynomial], nvars: usize, k: usize) -> Vec<Polynomial> {
    let jac: Vec<Vec<Polynomial>> = gens.iter().map(|g| (0..nvars).map(|c| g.derivative(c)).collect()).collect();
    let mut out = Vec::new();
    for rows in subsets(gens.len(), k) {
        for cols in subsets(nvars, k) {
            let m: Vec<Vec<Polynomial>> =
                rows.iter().map(|&r| cols.iter().map(|&c| jac[r][c].clone()).collect()).collect();
            let d = det(&m, nvars);
            if !d.is_zero() {
                out.push(d);
            }
        }
    }
    out
}

/// Jacobian criterion at the generic point of `V(P)`: some minor of size
/// `nvars - expected_dim` is nonzero modulo the prime `P`.
pub fn regular_at_generic(i: &Ideal, prime: &Ideal, expected_dim: usize) -> Result<bool> {
    let n = i.ring().nvars();
    if expected_dim > n {
        return Err(Error::pre("expected dimension exceeds number of variables"));
    }
    if !i.is_subset(prime)? {
        return Err(Error::NotOnVariety("ideal not contained in the prime".into()));
    }
    let k = n - expected_dim;
    if k == 0 {
        return Ok(true);
    }
    let pb = prime.basis()?;
    // small generating set first: the reduced basis
    let gens = i.canonical()?;
    for m in jacobian_minors(&gens, n, k) {
        if !normal_form(&m, &pb).is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

#[allow(dead_code)]
pub(crate) fn is_one(p: &Polynomial) -> bool {
    p.as_constant().map(|c| c.is_one()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(vars: &[&str], pi: Option<&str>) -> Arc<Ring> {
        Ring::new(vars.iter().copied(), pi).unwrap()
    }

    fn ideal(r: &Arc<Ring>, g: &[&str]) -> Ideal {
        Ideal::parse(r, g).unwrap()
    }

    #[test]
    fn relation_verdicts() {
        let r = ring(&["x", "y", "pi"], Some("pi"));
        let v = |a: &[&str], b: &[&str]| ideal_rel(&ideal(&r, a), &ideal(&r, b)).unwrap().verdict;
        assert_eq!(v(&["x"], &["x", "x^2"]), RelationVerdict::Equal);
        assert_eq!(v(&["x"], &["x^2"]), RelationVerdict::SecondInFirst);
        assert_eq!(v(&["x*y - pi"], &["pi"]), RelationVerdict::Incomparable);
        let other = ring(&["x"], None);
        assert_eq!(ideal_rel(&ideal(&r, &["x"]), &ideal(&other, &["x"])), Err(Error::RingMismatch));
    }

    #[test]
    fn quotients() {
        let r = ring(&["x", "y", "w"], None);
        let q = ideal_quotient(&ideal(&r, &["x^2"]), &r.parse("x").unwrap()).unwrap();
        assert!(q.same_as(&ideal(&r, &["x"])).unwrap());
        let q = ideal_quotient(&ideal(&r, &["x*y"]), &r.parse("x").unwrap()).unwrap();
        assert!(q.same_as(&ideal(&r, &["y"])).unwrap());
        let q = ideal_quotient(&ideal(&r, &["x*w^2", "x^2"]), &r.parse("w").unwrap()).unwrap();
        assert!(q.same_as(&ideal(&r, &["x*w", "x^2"])).unwrap());
        assert!(ideal_quotient(&ideal(&r, &["x"]), &r.zero()).is_err());
    }

    #[test]
    fn saturations() {
        let r = ring(&["x", "y", "w"], None);
        let (s, e) = saturate(&ideal(&r, &["x^2*y"]), &r.parse("x").unwrap()).unwrap();
        assert!(s.same_as(&ideal(&r, &["y"])).unwrap());
        assert_eq!(e, 2);
        let (s, e) = saturate(&ideal(&r, &["x*w^2", "x^2"]), &r.parse("w").unwrap()).unwrap();
        assert!(s.same_as(&ideal(&r, &["x"])).unwrap());
        assert_eq!(e, 2);
        let t = ring(&["t0", "t1", "v", "pi"], Some("pi"));
        let f = ideal(&t, &["t0*t1*v^2 - pi"]);
        let (s, e) = saturate(&f, &t.parse("v").unwrap()).unwrap();
        assert!(s.same_as(&f).unwrap());
        assert_eq!(e, 0);
    }

    #[test]
    fn eliminations() {
        let r = ring(&["x", "y", "z"], None);
        let e = eliminate(&ideal(&r, &["x - y*z"]), &[0]).unwrap();
        assert!(e.is_zero_ideal());
        let r = ring(&["x", "z'", "y", "pi"], Some("pi"));
        let e = eliminate(&ideal(&r, &["x - z'*y", "x*y - pi"]), &[0]).unwrap();
        assert!(e.same_as(&ideal(&r, &["z'*y^2 - pi"])).unwrap());
        let e = eliminate(&Ideal::unit(r.clone()), &[0, 1]).unwrap();
        assert!(e.is_unit().unwrap());
    }

    #[test]
    fn dimensions() {
        let r = ring(&["x", "y", "z"], None);
        assert_eq!(krull_dim(&Ideal::zero(r.clone())).unwrap(), 3);
        assert_eq!(krull_dim(&ideal(&r, &["x*y - z^2"])).unwrap(), 2);
        assert_eq!(krull_dim(&ideal(&r, &["x*y*z"])).unwrap(), 2);
        assert_eq!(krull_dim(&ideal(&r, &["x", "y", "z"])).unwrap(), 0);
        assert_eq!(krull_dim(&Ideal::unit(r)), Err(Error::UnitIdeal));
    }

    #[test]
    fn smoothness() {
        let r = ring(&["x", "y", "z"], None);
        let o = RationalPoint::origin(&r);
        let v = smooth_at(&ideal(&r, &["x*y - z^2"]), &o, 2).unwrap();
        assert!(!v.regular);
        assert_eq!(v.jacobian_rank, 0);
        let r2 = ring(&["x", "z'", "y"], None);
        let v = smooth_at(&ideal(&r2, &["x - z'^2*y"]), &RationalPoint::origin(&r2), 2).unwrap();
        assert!(v.regular);
        assert!(smooth_at(&Ideal::zero(r.clone()), &o, 3).unwrap().regular);
        let mut p = RationalPoint::origin(&r);
        p.set("z", crate::poly::int(1));
        assert!(matches!(smooth_at(&ideal(&r, &["x*y - z^2"]), &p, 2), Err(Error::NotOnVariety(_))));
    }

    #[test]
    fn generic_regularity() {
        let r = ring(&["x", "y", "z"], None);
        let cone = ideal(&r, &["x*y - z^2"]);
        // regular along the generic point of the line x = z = 0
        assert!(regular_at_generic(&cone, &ideal(&r, &["x", "z"]), 2).unwrap());
        // but not at the vertex
        assert!(!regular_at_generic(&cone, &ideal(&r, &["x", "y", "z"]), 2).unwrap());
    }

    #[test]
    fn radical_and_division() {
        let r = ring(&["t0", "t1", "v", "pi"], Some("pi"));
        let rel = ideal(&r, &["t0*t1 - pi"]);
        let pi = r.parse("pi").unwrap();
        assert!(radical_contains(&rel.with(r.parse_all(&["t0"]).unwrap()), &pi).unwrap());
        assert!(!radical_contains(&rel.with(r.parse_all(&["v"]).unwrap()), &pi).unwrap());
        // pi / t0 = t1 in the quotient
        let q = exact_quotient(&rel, &pi, &r.parse("t0").unwrap()).unwrap().unwrap();
        assert_eq!(q, r.parse("t1").unwrap());
        assert_eq!(exact_quotient(&rel, &r.parse("v").unwrap(), &r.parse("t0").unwrap()).unwrap(), None);
    }
}
