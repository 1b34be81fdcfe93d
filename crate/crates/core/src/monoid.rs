//! Affine monoids `Q ⊂ ℤ^n`, pairs `λ: ℕ → Q`, and their monoid algebras.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::blowup::PresentedAlgebra;
use crate::linalg::{self, dot, hnf, integer_kernel, integer_rank, lattice_coords, smith_diagonal};
use crate::models::ModelScheme;
use crate::poly::{ideal_rel, saturate, Ideal, Polynomial, Rat, RelationVerdict, Ring};
use crate::polyhedral::facet_normals;
use crate::{Error, Result};

/// Finitely generated submonoid of `ℤ^n`. Zero generators are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMonoid {
    ambient_rank: usize,
    generators: Vec<Vec<i64>>,
}

/// Candidate-count ceiling for Hilbert basis box enumeration.
const BOX_CAP: u64 = 2_000_000;
/// Ceiling on `n` in complement searches `n·λ(1) - q ∈ Q`.
const COMPLEMENT_CAP: i64 = 64;

impl AffineMonoid {
    pub fn new(ambient_rank: usize, generators: Vec<Vec<i64>>) -> Result<Self> {
        if generators.iter().any(|g| g.len() != ambient_rank) {
            return Err(Error::pre("generator length differs from ambient rank"));
        }
        let mut gens: Vec<Vec<i64>> = Vec::new();
        for g in generators {
            if g.iter().any(|&x| x != 0) && !gens.contains(&g) {
                gens.push(g);
            }
        }
        Ok(AffineMonoid { ambient_rank, generators: gens })
    }

    /// `ℕ^n` with the standard basis.
    pub fn free(n: usize) -> Self {
        let gens = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        AffineMonoid { ambient_rank: n, generators: gens }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    /// Hermite basis of `Q^gp`.
    pub fn group_basis(&self) -> Result<Vec<Vec<i64>>> {
        hnf(&self.generators)
    }

    pub fn rank(&self) -> usize {
        integer_rank(&self.generators)
    }

    /// Basis of `ℤ^n ∩ span(Q)`.
    pub fn span_lattice(&self) -> Result<Vec<Vec<i64>>> {
        let n = self.ambient_rank;
        if self.generators.is_empty() {
            return Ok(Vec::new());
        }
        let perp = integer_kernel(&self.generators, n)?;
        if perp.is_empty() {
            return Ok(AffineMonoid::free(n).generators);
        }
        integer_kernel(&perp, n)
    }

    /// Generators in coordinates of a lattice basis containing them.
    fn coords_in(&self, basis: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
        self.generators
            .iter()
            .map(|g| lattice_coords(basis, g).ok_or_else(|| Error::cert("generator outside lattice")))
            .collect()
    }

    /// Inward facet normals of `cone(Q)` in `Q^gp` coordinates.
    fn cone_data(&self) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<i64>>)> {
        let basis = self.group_basis()?;
        let coords = self.coords_in(&basis)?;
        let normals = facet_normals(&coords, basis.len())?;
        Ok((basis, coords, normals))
    }

    /// No nonzero `q` with `-q ∈ Q`, i.e. the cone is pointed.
    pub fn is_sharp(&self) -> Result<bool> {
        if self.generators.is_empty() {
            return Ok(true);
        }
        let (basis, _, normals) = self.cone_data()?;
        Ok(integer_rank(&normals) == basis.len())
    }

    /// A functional positive on every nonzero element (sharp monoids only).
    fn positive_functional(&self) -> Result<Vec<i64>> {
        let (basis, _, normals) = self.cone_data()?;
        if integer_rank(&normals) != basis.len() {
            return Err(Error::pre("monoid is not sharp"));
        }
        // pull the coordinate functional back to ℤ^n through a rational left inverse
        let k = basis.len();
        let sum: Vec<i64> = (0..k).map(|j| normals.iter().map(|nv| nv[j]).sum()).collect();
        let n = self.ambient_rank;
        let b: Vec<Vec<Rat>> = basis.iter().map(|r| linalg::to_rat(r)).collect();
        // find w ∈ ℚ^n with B w = sum
        let mut rows: Vec<Vec<Rat>> = b.clone();
        for (r, s) in rows.iter_mut().zip(&sum) {
            r.push(Rat::from_integer((*s).into()));
        }
        let (m, pivots) = linalg::rref(&rows);
        let mut w = vec![Rat::from_integer(0.into()); n];
        for (row, &p) in m.iter().zip(&pivots) {
            w[p] = row[n].clone();
        }
        let w = linalg::clear_denominators(&w)?;
        debug_assert!(self.generators.iter().all(|g| dot(&w, g) > 0));
        Ok(w)
    }

    /// Membership `v ∈ Q` with an explicit word: `v = Σ c_i g_i`, `c_i ∈ ℕ`.
    pub fn express(&self, v: &[i64]) -> Result<Option<Vec<u64>>> {
        if v.iter().all(|&x| x == 0) {
            return Ok(Some(vec![0; self.generators.len()]));
        }
        if self.generators.is_empty() {
            return Ok(None);
        }
        let w = self.positive_functional()?;
        if dot(&w, v) <= 0 {
            return Ok(None);
        }
        let mut memo: BTreeMap<(usize, Vec<i64>), bool> = BTreeMap::new();
        let mut word = vec![0u64; self.generators.len()];
        let found = express_rec(&self.generators, &w, 0, v.to_vec(), &mut word, &mut memo);
        Ok(found.then_some(word))
    }

    pub fn contains(&self, v: &[i64]) -> Result<bool> {
        Ok(self.express(v)?.is_some())
    }
}

fn express_rec(
    gens: &[Vec<i64>],
    w: &[i64],
    i: usize,
    rem: Vec<i64>,
    word: &mut [u64],
    memo: &mut BTreeMap<(usize, Vec<i64>), bool>,
) -> bool {
    if rem.iter().all(|&x| x == 0) {
        return true;
    }
    if i == gens.len() || dot(w, &rem) <= 0 {
        return false;
    }
    let key = (i, rem.clone());
    if memo.get(&key) == Some(&false) {
        return false;
    }
    let wg = dot(w, &gens[i]);
    let max = dot(w, &rem) / wg;
    for c in (0..=max).rev() {
        let next: Vec<i64> = rem.iter().zip(&gens[i]).map(|(r, g)| r - c * g).collect();
        word[i] = c as u64;
        if express_rec(gens, w, i + 1, next, word, memo) {
            return true;
        }
    }
    word[i] = 0;
    memo.insert(key, false);
    false
}

/// The image `λ(1)` of `1 ∈ ℕ` in `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidPair {
    pub q: AffineMonoid,
    pub lambda1: Vec<i64>,
}

impl MonoidPair {
    pub fn new(q: AffineMonoid, lambda1: Vec<i64>) -> Result<Self> {
        if lambda1.len() != q.ambient_rank {
            return Err(Error::pre("λ(1) has the wrong length"));
        }
        if lambda1.iter().all(|&x| x == 0) {
            return Err(Error::pre("λ(1) = 0: λ is not injective"));
        }
        let pair = MonoidPair { q, lambda1 };
        if pair.lambda_word()?.is_none() {
            return Err(Error::pre("λ(1) is not in Q"));
        }
        Ok(pair)
    }

    /// `Q = ℕ^{m+1}`, `λ(1) = e_0 + … + e_m`.
    pub fn semistable(m: usize) -> Self {
        MonoidPair { q: AffineMonoid::free(m + 1), lambda1: vec![1; m + 1] }
    }

    /// A word for `λ(1)` in the generators of `Q`.
    pub fn lambda_word(&self) -> Result<Option<Vec<u64>>> {
        self.q.express(&self.lambda1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpInvariants {
    /// Rank of `Q^gp / P^gp`.
    pub rank: usize,
    /// Elementary divisors greater than one.
    pub torsion: Vec<i64>,
}

impl GpInvariants {
    /// Torsion is allowed in characteristic zero but worth a warning.
    pub fn warning(&self) -> Option<String> {
        (!self.torsion.is_empty()).then(|| format!("Q^gp/P^gp has torsion {:?}", self.torsion))
    }
}

/// Rank and torsion of `Q^gp / ℤ·λ(1)` via the Smith form of the inclusion.
pub fn gp_invariants(pair: &MonoidPair) -> Result<GpInvariants> {
    let basis = pair.q.group_basis()?;
    let c = lattice_coords(&basis, &pair.lambda1).ok_or_else(|| Error::pre("λ(1) not in Q^gp"))?;
    let diag = smith_diagonal(&[c])?;
    Ok(GpInvariants { rank: basis.len() - diag.len(), torsion: diag.into_iter().filter(|&d| d > 1).collect() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    /// `λ(1)` in the relative interior of `cone(Q)` (rational check).
    pub interior: bool,
    /// `Q + ℤλ(1) = Q^gp`.
    pub group_condition: bool,
    /// Every generator has a complement landing in `ℕλ(1)`.
    pub complement_condition: bool,
    /// For each generator `q`, the least `n` with `nλ(1) - q ∈ Q`.
    pub complements: Vec<Option<i64>>,
    /// A generator without complement.
    pub witness: Option<Vec<i64>>,
}

/// Does `λ` miss every facet of `Q`? Checks the interior condition, the
/// group condition and the element-wise complement condition separately.
pub fn is_admissible_pair(pair: &MonoidPair) -> Result<Admissibility> {
    let q = &pair.q;
    if !q.is_sharp()? {
        return Err(Error::pre("monoid is not sharp"));
    }
    let (basis, _, normals) = q.cone_data()?;
    let lc = lattice_coords(&basis, &pair.lambda1).ok_or_else(|| Error::pre("λ(1) not in Q^gp"))?;
    let interior = normals.iter().all(|nv| dot(nv, &lc) > 0);

    let mut complements = Vec::new();
    let mut witness = None;
    for g in q.generators() {
        let mut found = None;
        for n in 1..=COMPLEMENT_CAP {
            let v: Vec<i64> = pair.lambda1.iter().zip(g).map(|(l, x)| n * l - x).collect();
            if q.contains(&v)? {
                found = Some(n);
                break;
            }
        }
        if found.is_none() && witness.is_none() {
            witness = Some(g.clone());
        }
        complements.push(found);
    }
    let complement_condition = complements.iter().all(Option::is_some);

    // group condition: -g ∈ Q + ℤλ for each generator, searched with m ∈ [-cap, cap]
    let mut group_condition = true;
    for g in q.generators() {
        let mut ok = false;
        for m in -COMPLEMENT_CAP..=COMPLEMENT_CAP {
            let v: Vec<i64> = pair.lambda1.iter().zip(g).map(|(l, x)| m * l - x).collect();
            if q.contains(&v)? {
                ok = true;
                break;
            }
        }
        group_condition &= ok;
    }
    if interior != complement_condition || group_condition != complement_condition {
        return Err(Error::cert(format!(
            "admissibility conditions disagree: interior {interior}, group {group_condition}, complement {complement_condition}"
        )));
    }
    Ok(Admissibility {
        admissible: complement_condition,
        interior,
        group_condition,
        complement_condition,
        complements,
        witness,
    })
}

/// Which lattice the saturation is taken in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SaturationLattice {
    /// `ℤ^n ∩ span(Q)`.
    #[default]
    Ambient,
    /// `Q^gp`.
    Group,
}

/// Hilbert basis of `L ∩ cone(Q)` by box enumeration, returned as a monoid.
pub fn saturate_monoid(q: &AffineMonoid, lattice: SaturationLattice) -> Result<AffineMonoid> {
    if q.generators.is_empty() {
        return Ok(q.clone());
    }
    if q.rank() > 6 {
        return Err(Error::cap("saturation-rank", 6, "ambient rank above 6"));
    }
    if !q.is_sharp()? {
        return Err(Error::pre("cone of Q is not pointed"));
    }
    let basis = match lattice {
        SaturationLattice::Ambient => q.span_lattice()?,
        SaturationLattice::Group => q.group_basis()?,
    };
    let coords = q.coords_in(&basis)?;
    let k = basis.len();
    let normals = facet_normals(&coords, k)?;
    let bound: Vec<i64> = (0..k).map(|j| coords.iter().map(|g| g[j].abs()).sum()).collect();
    let count: u64 = bound.iter().map(|&b| (2 * b + 1) as u64).product();
    if count > BOX_CAP {
        return Err(Error::cap("saturation-box", BOX_CAP, format!("{count} candidate points")));
    }
    let in_cone = |x: &[i64]| normals.iter().all(|nv| dot(nv, x) >= 0);
    let mut cands: Vec<Vec<i64>> = Vec::new();
    let mut cur: Vec<i64> = bound.iter().map(|b| -b).collect();
    loop {
        if cur.iter().any(|&x| x != 0) && in_cone(&cur) {
            cands.push(cur.clone());
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
    let mut hilbert: Vec<Vec<i64>> = Vec::new();
    for x in &cands {
        let reducible = cands.iter().any(|y| {
            y != x && {
                let d: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                d.iter().any(|&t| t != 0) && in_cone(&d)
            }
        });
        if !reducible {
            hilbert.push(x.clone());
        }
    }
    // back to ambient coordinates: surviving input generators first, then new elements
    let mut fresh: Vec<Vec<i64>> = hilbert
        .iter()
        .map(|c| (0..q.ambient_rank).map(|i| c.iter().zip(&basis).map(|(a, b)| a * b[i]).sum()).collect())
        .collect();
    fresh.sort();
    let mut gens: Vec<Vec<i64>> = q.generators.iter().filter(|g| fresh.contains(g)).cloned().collect();
    gens.extend(fresh.into_iter().filter(|g| !q.generators.contains(g)));
    AffineMonoid::new(q.ambient_rank, gens)
}

/// Default variable names `u0, u1, …` for monoid generators.
pub fn default_names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("u{i}")).collect()
}

/// Binomial `x^{a+} - x^{a-}` for an integer vector `a`.
fn binomial(nvars: usize, a: &[i64]) -> Polynomial {
    let pos: Vec<u32> = a.iter().map(|&x| x.max(0) as u32).chain(core::iter::repeat(0)).take(nvars).collect();
    let neg: Vec<u32> = a.iter().map(|&x| (-x).max(0) as u32).chain(core::iter::repeat(0)).take(nvars).collect();
    &Polynomial::monomial(pos, Rat::one()) - &Polynomial::monomial(neg, Rat::one())
}

/// Toric ideal of the generator configuration: lattice basis ideal
/// saturated by the product of the variables.
fn toric_by_saturation(ring: &alloc::sync::Arc<Ring>, gens: &[Vec<i64>], nvars: usize) -> Result<Ideal> {
    let k = gens.len();
    let n = gens.first().map(|g| g.len()).unwrap_or(0);
    let cols: Vec<Vec<i64>> = (0..n).map(|i| gens.iter().map(|g| g[i]).collect()).collect();
    let ker = integer_kernel(&cols, k)?;
    let base = Ideal::new(ring.clone(), ker.iter().map(|a| binomial(nvars, a)).collect());
    let prod = (0..k).fold(ring.one(), |acc, i| &acc * &ring.gen(i));
    Ok(saturate(&base, &prod)?.0)
}

/// Toric ideal as the kernel of `x_i ↦ s^{g_i}`, by elimination.
fn toric_by_elimination(ring: &alloc::sync::Arc<Ring>, gens: &[Vec<i64>], nvars: usize) -> Result<Ideal> {
    let k = gens.len();
    let n = gens.first().map(|g| g.len()).unwrap_or(0);
    let names: Vec<String> = (0..n).map(|i| format!("s_{i}")).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let (big, sidx) = ring.extend(&name_refs)?;
    let nb = big.nvars();
    let map: Vec<usize> = (0..nvars).collect();
    let mut polys = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        let mut pos = vec![0u32; nb];
        let mut neg = vec![0u32; nb];
        for (j, &x) in g.iter().enumerate() {
            if x > 0 {
                pos[sidx[j]] = x as u32;
            } else {
                neg[sidx[j]] = (-x) as u32;
            }
        }
        let xi = ring.gen(i).embed(nb, &map);
        polys.push(&(&xi * &Polynomial::monomial(neg, Rat::one())) - &Polynomial::monomial(pos, Rat::one()));
    }
    let prod = sidx.iter().fold(Polynomial::one(nb), |acc, &s| &acc * &Polynomial::var(nb, s));
    let (sat, _) = saturate(&Ideal::new(big.clone(), polys), &prod)?;
    let elim = crate::poly::eliminate(&sat, &sidx)?;
    let back: Vec<Polynomial> = elim
        .gens()
        .iter()
        .map(|p| Polynomial::from_terms(nvars, p.terms().map(|(e, c)| (e[..nvars].to_vec(), c.clone()))))
        .collect();
    let _ = k;
    Ok(Ideal::new(ring.clone(), back))
}

/// Binomial presentation of `k°_P[Q]`: one variable per generator plus `pi`,
/// the toric ideal, and `u^{λ(1)} - π`.
pub fn monoid_algebra(pair: &MonoidPair, names: Option<&[String]>) -> Result<ModelScheme> {
    let adm = is_admissible_pair(pair)?;
    if !adm.admissible {
        return Err(Error::pre(format!("pair is not admissible; witness {:?}", adm.witness)));
    }
    let k = pair.q.generators.len();
    let names: Vec<String> = match names {
        Some(n) if n.len() == k => n.to_vec(),
        Some(_) => return Err(Error::pre("one name per generator required")),
        None => default_names(k),
    };
    let mut vars = names.clone();
    vars.push("pi".into());
    let ring = Ring::new(vars, Some("pi"))?;
    let n = ring.nvars();
    let toric = toric_by_saturation(&ring, &pair.q.generators, n)?;
    let check = toric_by_elimination(&ring, &pair.q.generators, n)?;
    if ideal_rel(&toric, &check)?.verdict != RelationVerdict::Equal {
        return Err(Error::cert("toric ideal routes disagree"));
    }
    let word = pair.lambda_word()?.ok_or_else(|| Error::pre("λ(1) not in Q"))?;
    let mut exp: Vec<u32> = word.iter().map(|&c| c as u32).collect();
    exp.push(0);
    let pi = ring.pi_poly().expect("pi designated");
    let lam = &Polynomial::monomial(exp, Rat::one()) - &pi;
    let canon = toric.canonical()?;
    let mut rels = canon;
    rels.push(lam);
    let relations = Ideal::new(ring.clone(), rels);
    let algebra = PresentedAlgebra::new(relations)
        .traced(format!("monoid algebra of {:?} with λ(1) = {:?}", pair.q.generators, pair.lambda1));
    let chart = (0..k).map(|i| ring.gen(i)).collect();
    ModelScheme::new(algebra, pair.clone(), chart)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(gens: &[&[i64]], lam: &[i64]) -> MonoidPair {
        let n = lam.len();
        MonoidPair::new(AffineMonoid::new(n, gens.iter().map(|g| g.to_vec()).collect()).unwrap(), lam.to_vec()).unwrap()
    }

    #[test]
    fn invariants() {
        let inv = gp_invariants(&pair(&[&[1, 0], &[0, 1]], &[1, 1])).unwrap();
        assert_eq!(inv, GpInvariants { rank: 1, torsion: vec![] });
        let inv = gp_invariants(&pair(&[&[1, 0], &[0, 1]], &[2, 2])).unwrap();
        assert_eq!(inv, GpInvariants { rank: 1, torsion: vec![2] });
        assert!(inv.warning().is_some());
        let inv = gp_invariants(&pair(&[&[1]], &[1])).unwrap();
        assert_eq!(inv, GpInvariants { rank: 0, torsion: vec![] });
    }

    #[test]
    fn admissibility() {
        assert!(is_admissible_pair(&pair(&[&[1, 0], &[0, 1]], &[1, 1])).unwrap().admissible);
        let a = is_admissible_pair(&pair(&[&[1, 0], &[0, 1]], &[1, 0])).unwrap();
        assert!(!a.admissible && !a.interior);
        assert_eq!(a.witness, Some(vec![0, 1]));
        let a = is_admissible_pair(&pair(&[&[1, 0], &[0, 1]], &[1, 2])).unwrap();
        assert!(a.admissible);
        assert_eq!(a.complements, vec![Some(1), Some(1)]);
        let q = AffineMonoid::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert!(!q.is_sharp().unwrap());
    }

    #[test]
    fn saturation() {
        let q = AffineMonoid::new(2, vec![vec![1, 0], vec![1, 2]]).unwrap();
        let s = saturate_monoid(&q, SaturationLattice::Ambient).unwrap();
        assert_eq!(s.generators(), &[vec![1, 0], vec![1, 2], vec![1, 1]]);
        // inside Q^gp = ℤ(1,0) + ℤ(0,2) nothing is missing
        let s = saturate_monoid(&q, SaturationLattice::Group).unwrap();
        assert_eq!(s.generators(), &[vec![1, 0], vec![1, 2]]);
        let s = saturate_monoid(&AffineMonoid::free(2), SaturationLattice::Ambient).unwrap();
        assert_eq!(s.generators(), AffineMonoid::free(2).generators());
        let s = saturate_monoid(&AffineMonoid::new(1, vec![vec![2]]).unwrap(), SaturationLattice::Ambient).unwrap();
        assert_eq!(s.generators(), &[vec![1]]);
        // the A1 cone: (1,0),(1,1),(1,2) is saturated in both senses
        let q = AffineMonoid::new(2, vec![vec![1, 0], vec![1, 1], vec![1, 2]]).unwrap();
        assert_eq!(saturate_monoid(&q, SaturationLattice::Group).unwrap().generators().len(), 3);
    }

    #[test]
    fn membership_words() {
        let q = AffineMonoid::new(2, vec![vec![1, 0], vec![1, 2]]).unwrap();
        assert_eq!(q.express(&[2, 2]).unwrap(), Some(vec![1, 1]));
        assert_eq!(q.express(&[1, 1]).unwrap(), None);
        assert_eq!(q.express(&[-1, 0]).unwrap(), None);
    }

    #[test]
    fn algebras() {
        let names: Vec<String> = ["t0", "t1"].iter().map(|s| String::from(*s)).collect();
        let m = monoid_algebra(&MonoidPair::semistable(1), Some(&names)).unwrap();
        assert_eq!(m.algebra.relations.fmt_canonical().unwrap(), ["t0*t1 - pi"]);

        let names: Vec<String> = ["t0", "t1", "v"].iter().map(|s| String::from(*s)).collect();
        let p = pair(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[1, 1, 2]);
        let m = monoid_algebra(&p, Some(&names)).unwrap();
        assert_eq!(m.algebra.relations.fmt_canonical().unwrap(), ["t0*t1*v^2 - pi"]);

        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| String::from(*s)).collect();
        let p = pair(&[&[1, 0], &[1, 1], &[1, 2]], &[1, 1]);
        let m = monoid_algebra(&p, Some(&names)).unwrap();
        let r = m.algebra.ring();
        let expected = Ideal::parse(r, &["x*z - y^2", "y - pi"]).unwrap();
        assert!(m.algebra.relations.same_as(&expected).unwrap());

        let bad = pair(&[&[1, 0], &[0, 1]], &[1, 0]);
        assert!(matches!(monoid_algebra(&bad, None), Err(Error::Precondition(_))));
    }
}
