//! Buchberger's algorithm with the product and chain criteria and the
//! normal selection strategy. Output is the reduced, monic basis sorted by
//! decreasing leading monomial, which makes it canonical for the ideal.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Zero};

use super::{Exponent, Limits, MonomialOrder, Polynomial, Rat};
use crate::{Error, Result};

/// A reduced Gröbner basis tagged with its order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    pub order: MonomialOrder,
    pub polys: Vec<Polynomial>,
}

impl GroebnerBasis {
    pub fn is_unit(&self) -> bool {
        self.polys.len() == 1 && self.polys[0].is_constant() && !self.polys[0].is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn leading_monomials(&self) -> Vec<Exponent> {
        self.polys.iter().filter_map(|p| p.leading(&self.order).map(|(e, _)| e.clone())).collect()
    }
}

type Term = (Exponent, Rat);

fn sorted(p: &Polynomial, order: &MonomialOrder) -> Vec<Term> {
    p.sorted_terms(order).into_iter().map(|(e, c)| (e.clone(), c.clone())).collect()
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn diff(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `p - c * x^shift * g`, both inputs sorted descending.
fn sub_mul(p: &[Term], g: &[Term], shift: &[u32], c: &Rat, order: &MonomialOrder) -> Vec<Term> {
    let mut out = Vec::with_capacity(p.len() + g.len());
    let mut i = 0;
    let mut j = 0;
    let shifted = |t: &Term| -> Term { (t.0.iter().zip(shift).map(|(a, b)| a + b).collect(), &t.1 * c) };
    while i < p.len() || j < g.len() {
        if j >= g.len() {
            out.push(p[i].clone());
            i += 1;
            continue;
        }
        let gj = shifted(&g[j]);
        if i >= p.len() {
            out.push((gj.0, -gj.1));
            j += 1;
            continue;
        }
        match order.cmp(&p[i].0, &gj.0) {
            Ordering::Greater => {
                out.push(p[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push((gj.0, -gj.1));
                j += 1;
            }
            Ordering::Equal => {
                let v = &p[i].1 - &gj.1;
                if !v.is_zero() {
                    out.push((gj.0, v));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Full reduction of `f` by monic sorted basis elements.
fn reduce(f: Vec<Term>, basis: &[Vec<Term>], order: &MonomialOrder) -> Vec<Term> {
    let mut rem: Vec<Term> = Vec::new();
    let mut p = f;
    let mut idx = 0;
    while idx < p.len() {
        let (lm, lc) = (&p[idx].0, &p[idx].1);
        match basis.iter().find(|g| divides(&g[0].0, lm)) {
            Some(g) => {
                let shift = diff(lm, &g[0].0);
                let c = lc.clone();
                p = sub_mul(&p[idx..], g, &shift, &c, order);
                idx = 0;
            }
            None => {
                rem.push(p[idx].clone());
                idx += 1;
            }
        }
    }
    rem
}

fn make_monic(mut v: Vec<Term>) -> Vec<Term> {
    if let Some(first) = v.first() {
        if !first.1.is_one() {
            let inv = first.1.recip();
            for t in &mut v {
                t.1 *= &inv;
            }
        }
    }
    v
}

fn to_poly(nvars: usize, v: Vec<Term>) -> Polynomial {
    Polynomial::from_terms(nvars, v)
}

/// Reduced Gröbner basis of the ideal generated by `gens`.
pub fn groebner_basis(
    gens: &[Polynomial],
    nvars: usize,
    order: &MonomialOrder,
    limits: &Limits,
) -> Result<GroebnerBasis> {
    let mut basis: Vec<Vec<Term>> = Vec::new();
    let mut pending: BTreeSet<(usize, usize)> = BTreeSet::new();
    let unit = || GroebnerBasis { order: order.clone(), polys: alloc::vec![Polynomial::one(nvars)] };

    let insert = |basis: &mut Vec<Vec<Term>>, pending: &mut BTreeSet<(usize, usize)>, r: Vec<Term>| {
        let k = basis.len();
        basis.push(make_monic(r));
        for i in 0..k {
            pending.insert((i, k));
        }
    };

    for f in gens {
        debug_assert_eq!(f.nvars(), nvars);
        let r = reduce(sorted(f, order), &basis, order);
        if r.is_empty() {
            continue;
        }
        if r[0].0.iter().all(|&x| x == 0) {
            return Ok(unit());
        }
        insert(&mut basis, &mut pending, r);
    }

    let mut steps: u64 = 0;
    while let Some(&(i, j)) = pending.iter().min_by(|a, b| {
        let la = lcm(&basis[a.0][0].0, &basis[a.1][0].0);
        let lb = lcm(&basis[b.0][0].0, &basis[b.1][0].0);
        order.cmp(&la, &lb).then(a.cmp(b))
    }) {
        pending.remove(&(i, j));
        let (li, lj) = (&basis[i][0].0, &basis[j][0].0);
        let l = lcm(li, lj);
        // product criterion: coprime leading monomials
        if li.iter().zip(lj).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        // chain criterion
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && divides(&basis[k][0].0, &l)
                && !pending.contains(&(i.min(k), i.max(k)))
                && !pending.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        steps += 1;
        if steps > limits.max_steps {
            return Err(Error::cap(
                "max-steps",
                limits.max_steps,
                format!("basis size {} with {} pending pairs", basis.len(), pending.len()),
            ));
        }
        let si = diff(&l, li);
        let sj = diff(&l, lj);
        let a = sub_mul(&[], &basis[i], &si, &-Rat::one(), order);
        let s = sub_mul(&a, &basis[j], &sj, &Rat::one(), order);
        let r = reduce(s, &basis, order);
        if r.is_empty() {
            continue;
        }
        if r[0].0.iter().all(|&x| x == 0) {
            return Ok(unit());
        }
        let deg: u32 = r.iter().map(|t| t.0.iter().sum::<u32>()).max().unwrap_or(0);
        if deg > limits.max_degree {
            return Err(Error::cap("max-degree", limits.max_degree.into(), format!("basis element of degree {deg}")));
        }
        insert(&mut basis, &mut pending, r);
    }

    // minimalize
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..basis.len() {
        let li = &basis[i][0].0;
        let redundant =
            (0..basis.len()).any(|k| k != i && divides(&basis[k][0].0, li) && (basis[k][0].0 != *li || k < i));
        if !redundant {
            keep.push(i);
        }
    }
    let minimal: Vec<Vec<Term>> = keep.into_iter().map(|i| basis[i].clone()).collect();
    // interreduce tails
    let mut reduced: Vec<Vec<Term>> = Vec::with_capacity(minimal.len());
    for (i, g) in minimal.iter().enumerate() {
        let others: Vec<Vec<Term>> =
            minimal.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, h)| h.clone()).collect();
        let head = g[0].clone();
        let tail = reduce(g[1..].to_vec(), &others, order);
        let mut v = alloc::vec![head];
        v.extend(tail);
        reduced.push(make_monic(v));
    }
    reduced.sort_by(|a, b| order.cmp(&b[0].0, &a[0].0));
    Ok(GroebnerBasis { order: order.clone(), polys: reduced.into_iter().map(|v| to_poly(nvars, v)).collect() })
}

/// Remainder of `f` on division by a Gröbner basis.
pub fn normal_form(f: &Polynomial, gb: &GroebnerBasis) -> Polynomial {
    if gb.is_unit() {
        return Polynomial::zero(f.nvars());
    }
    let basis: Vec<Vec<Term>> = gb.polys.iter().map(|p| sorted(p, &gb.order)).collect();
    to_poly(f.nvars(), reduce(sorted(f, &gb.order), &basis, &gb.order))
}
