//! Oracles written without the library's algorithms: brute force over small
//! lattices, hand-derived charts checked at rational points, and plain
//! integer linear algebra.

#![allow(dead_code)]

use std::cmp::Ordering;

use valuform_core::poly::parse_rat;
use valuform_core::{Polynomial, Rat, Ring};

pub fn rat(n: i64) -> Rat {
    parse_rat(&n.to_string()).unwrap()
}

pub fn vanishes(p: &Polynomial, point: &[Rat]) -> bool {
    p.eval(point) == rat(0)
}

/// Value assignment for the variables of `ring`, by name.
pub fn point(ring: &Ring, values: &[(&str, Rat)]) -> Vec<Rat> {
    ring.vars()
        .iter()
        .map(|v| {
            values.iter().find(|(n, _)| n == v).map(|(_, x)| x.clone()).unwrap_or_else(|| panic!("no value for {v}"))
        })
        .collect()
}

/// Small sample of nonzero rationals.
pub fn samples() -> Vec<Rat> {
    [(1, 1), (2, 1), (-3, 1), (1, 2), (-5, 3)].iter().map(|(p, q)| parse_rat(&format!("{p}/{q}")).unwrap()).collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn cross(a: [i64; 2], b: [i64; 2]) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Result of the plane-cone search: the least degree admitting a fan and
/// every fan with the fewest rays at that degree.
#[derive(Debug)]
pub struct PlaneFans {
    pub d: i64,
    pub sigma: [[i64; 2]; 2],
    /// Cones as sorted pairs of `N_d` generators.
    pub fans: Vec<Vec<[[i64; 2]; 2]>>,
}

/// Exhaustive search over rays with coordinates in `[-3, 3]` for a plane
/// cone `σ = {n : ⟨n, g⟩ ≥ 0}`. A fan is accepted at degree `d` when every
/// ray meets the slice `ℓ = d` in a lattice point and consecutive slice
/// points bound a segment with no lattice point inside.
pub fn plane_fans(gens: &[[i64; 2]], ell: [i64; 2], max_d: i64) -> Option<PlaneFans> {
    let dot = |a: [i64; 2], b: [i64; 2]| a[0] * b[0] + a[1] * b[1];
    let mut cand = Vec::new();
    for a in -3..=3i64 {
        for b in -3..=3i64 {
            if (a, b) != (0, 0) && gcd(a, b) == 1 && gens.iter().all(|g| dot([a, b], *g) >= 0) {
                cand.push([a, b]);
            }
        }
    }
    let (boundary, interior): (Vec<_>, Vec<_>) = cand.into_iter().partition(|n| gens.iter().any(|g| dot(*n, *g) == 0));
    assert_eq!(boundary.len(), 2, "plane cone must be two-dimensional and strongly convex");
    let (r0, r1) =
        if cross(boundary[0], boundary[1]) > 0 { (boundary[0], boundary[1]) } else { (boundary[1], boundary[0]) };
    for d in 1..=max_d {
        let mut best: Vec<Vec<[[i64; 2]; 2]>> = Vec::new();
        let mut best_len = usize::MAX;
        for mask in 0u32..(1 << interior.len()) {
            let mut rays: Vec<[i64; 2]> = vec![r0, r1];
            rays.extend(interior.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, r)| *r));
            if rays.len() > best_len {
                continue;
            }
            if rays.iter().any(|r| dot(*r, ell) <= 0 || d % dot(*r, ell) != 0) {
                continue;
            }
            rays.sort_by(|a, b| {
                if a == b {
                    Ordering::Equal
                } else if cross(*a, *b) > 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            });
            let us: Vec<[i64; 2]> = rays
                .iter()
                .map(|r| {
                    let k = d / dot(*r, ell);
                    [r[0] * k, r[1] * k]
                })
                .collect();
            let ok = us.windows(2).all(|w| gcd(w[1][0] - w[0][0], w[1][1] - w[0][1]) == 1);
            if !ok {
                continue;
            }
            let cones: Vec<[[i64; 2]; 2]> = us
                .windows(2)
                .map(|w| {
                    let mut c = [w[0], w[1]];
                    c.sort();
                    c
                })
                .collect();
            if rays.len() < best_len {
                best.clear();
                best_len = rays.len();
            }
            best.push(cones);
        }
        if !best.is_empty() {
            return Some(PlaneFans { d, sigma: [r0, r1], fans: best });
        }
    }
    None
}

/// Normalizes library cones for comparison with [`plane_fans`].
pub fn plane_cones(cones: &[Vec<Vec<i64>>]) -> Vec<[[i64; 2]; 2]> {
    let mut out: Vec<[[i64; 2]; 2]> = cones
        .iter()
        .map(|c| {
            assert_eq!(c.len(), 2);
            let mut p = [[c[0][0], c[0][1]], [c[1][0], c[1][1]]];
            p.sort();
            p
        })
        .collect();
    out.sort();
    out
}

pub fn matches_oracle(found: &[Vec<Vec<i64>>], oracle: &PlaneFans) -> bool {
    let got = plane_cones(found);
    oracle.fans.iter().any(|f| {
        let mut f = f.clone();
        f.sort();
        f == got
    })
}

/// Rank by fraction-free elimination over `i128`.
pub fn int_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|x| *x as i128).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|i| m[*i][c] != 0) else { continue };
        m.swap(rank, p);
        for i in rank + 1..m.len() {
            let (a, b) = (m[rank][c], m[i][c]);
            for k in 0..cols {
                m[i][k] = m[i][k] * a - m[rank][k] * b;
            }
            let g = m[i].iter().fold(0i128, |g, x| {
                let (mut a, mut b) = (g.abs(), x.abs());
                while b != 0 {
                    (a, b) = (b, a % b);
                }
                a
            });
            if g > 1 {
                m[i].iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

/// `W·e` with integer weights.
pub fn weight_value(w: &[Vec<i64>], e: &[u32]) -> Vec<i64> {
    w.iter().map(|row| row.iter().zip(e).map(|(a, b)| a * *b as i64).sum()).collect()
}
