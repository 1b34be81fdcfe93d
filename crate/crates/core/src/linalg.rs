//! Small dense linear algebra: rational row reduction, and integer
//! Hermite/Smith normal forms with overflow checks. Matrices are row-major
//! `Vec<Vec<_>>`.

use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::poly::Rat;
use crate::{Error, Result};

/// Reduced row echelon form over ℚ; returns the nonzero rows and pivot columns.
pub fn rref(rows: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..ncols {
                    let t = &m[r][k] * &f;
                    m[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rational_rank(rows: &[Vec<Rat>]) -> usize {
    rref(rows).1.len()
}

pub fn to_rat(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&x| Rat::from_integer(x.into())).collect()
}

pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    rational_rank(&rows.iter().map(|r| to_rat(r)).collect::<Vec<_>>())
}

/// Basis of the right kernel `{x : A x = 0}` over ℚ.
pub fn rational_kernel(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let (m, pivots) = rref(rows);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::from_integer(1.into());
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// Solves `x · B = target` for a row vector `x` (rows of `B` independent).
pub fn solve_left(basis: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let k = basis.len();
    let n = target.len();
    // columns of the augmented system: unknowns x_0..x_{k-1}, one equation per coordinate
    let rows: Vec<Vec<Rat>> = (0..n)
        .map(|j| {
            let mut r: Vec<Rat> = basis.iter().map(|b| b[j].clone()).collect();
            r.push(target[j].clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&rows);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Rat::zero(); k];
    for (row, &p) in m.iter().zip(&pivots) {
        x[p] = row[k].clone();
    }
    Some(x)
}

pub fn det_rat(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rat::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return Rat::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for k in c..n {
                    let t = &a[c][k] * &f;
                    a[i][k] -= t;
                }
            }
        }
    }
    det
}

pub fn det_int(m: &[Vec<i64>]) -> Result<i64> {
    let d = det_rat(&m.iter().map(|r| to_rat(r)).collect::<Vec<_>>());
    rat_to_i64(&d)
}

pub fn rat_to_i64(r: &Rat) -> Result<i64> {
    if !r.is_integer() {
        return Err(Error::pre("expected an integer"));
    }
    i64::try_from(r.to_integer()).map_err(|_| Error::Overflow)
}

fn fdiv(a: i64, b: i64) -> i64 {
    Integer::div_floor(&a, &b)
}

fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow)
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// `row_i -= q * row_j` over the given column range.
fn row_axpy(m: &mut [Vec<i64>], i: usize, j: usize, q: i64) -> Result<()> {
    if q == 0 {
        return Ok(());
    }
    for k in 0..m[i].len() {
        m[i][k] = add(m[i][k], -mul(q, m[j][k])?)?;
    }
    Ok(())
}

/// Row echelon form over ℤ restricted to the first `cols` columns. Returns
/// the number of pivot rows; rows below it vanish on those columns.
fn int_echelon(m: &mut [Vec<i64>], cols: usize, reduce_above: bool) -> Result<usize> {
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        loop {
            let Some(p) = (r..m.len()).filter(|&i| m[i][c] != 0).min_by_key(|&i| m[i][c].unsigned_abs()) else {
                break;
            };
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][c] != 0 {
                    let q = fdiv(m[i][c], m[r][c]);
                    row_axpy(m, i, r, q)?;
                    if m[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[r][c] == 0 {
            continue;
        }
        if m[r][c] < 0 {
            for x in m[r].iter_mut() {
                *x = x.checked_neg().ok_or(Error::Overflow)?;
            }
        }
        if reduce_above {
            for i in 0..r {
                let q = fdiv(m[i][c], m[r][c]);
                row_axpy(m, i, r, q)?;
            }
        }
        r += 1;
    }
    Ok(r)
}

/// Row-style Hermite normal form: a basis of the row lattice.
pub fn hnf(rows: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let mut m = rows.to_vec();
    let n = m.first().map(|r| r.len()).unwrap_or(0);
    let r = int_echelon(&mut m, n, true)?;
    m.truncate(r);
    Ok(m)
}

/// Basis of the integer kernel `{x ∈ ℤ^n : A x = 0}` of `A` (rows × n).
pub fn integer_kernel(a: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    // rows of [Aᵀ | I]; row operations keep the right block unimodular
    let r = a.len();
    let mut m: Vec<Vec<i64>> = (0..n)
        .map(|j| {
            let mut row: Vec<i64> = a.iter().map(|ai| ai[j]).collect();
            row.extend((0..n).map(|k| i64::from(k == j)));
            row
        })
        .collect();
    let rank = int_echelon(&mut m, r, false)?;
    let mut ker: Vec<Vec<i64>> = m[rank..].iter().map(|row| row[r..].to_vec()).collect();
    if !ker.is_empty() {
        ker = hnf(&ker)?;
    }
    Ok(ker)
}

/// Nonzero elementary divisors (Smith normal form diagonal).
pub fn smith_diagonal(rows: &[Vec<i64>]) -> Result<Vec<i64>> {
    let mut m = rows.to_vec();
    let nr = m.len();
    let nc = m.first().map(|r| r.len()).unwrap_or(0);
    let mut diag = Vec::new();
    for t in 0..nr.min(nc) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..nr {
                for j in t..nc {
                    if m[i][j] != 0
                        && best.map(|(a, b)| m[i][j].unsigned_abs() < m[a][b].unsigned_abs()).unwrap_or(true)
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { return Ok(diag) };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let p = m[t][t];
            let mut clean = true;
            for i in t + 1..nr {
                let q = fdiv(m[i][t], p);
                row_axpy(&mut m, i, t, q)?;
                clean &= m[i][t] == 0;
            }
            for j in t + 1..nc {
                let q = fdiv(m[t][j], p);
                if q != 0 {
                    for i in 0..nr {
                        m[i][j] = add(m[i][j], -mul(q, m[i][t])?)?;
                    }
                }
                clean &= m[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility of the remaining block
            let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| m[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in 0..nc {
                        m[t][j] = add(m[t][j], m[i][j])?;
                    }
                }
                None => break,
            }
        }
        diag.push(m[t][t].abs());
    }
    Ok(diag)
}

/// Coordinates of `v` in a lattice basis (rows of `basis`), if integral.
pub fn lattice_coords(basis: &[Vec<i64>], v: &[i64]) -> Option<Vec<i64>> {
    let b: Vec<Vec<Rat>> = basis.iter().map(|r| to_rat(r)).collect();
    let x = solve_left(&b, &to_rat(v))?;
    x.iter().map(|c| rat_to_i64(c).ok()).collect()
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

pub fn lcm_all(v: &[i64]) -> i64 {
    v.iter().fold(1i64, |l, &x| if x == 0 { l } else { l.lcm(&x) })
}

pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = gcd_all(v);
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

/// Integral primitive multiple of a rational vector, sign preserved.
pub fn clear_denominators(v: &[Rat]) -> Result<Vec<i64>> {
    let l = v.iter().fold(num_bigint::BigInt::from(1), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<Rat> = v.iter().map(|x| x * Rat::from_integer(l.clone())).collect();
    let ints: Vec<i64> = scaled.iter().map(rat_to_i64).collect::<Result<_>>()?;
    Ok(primitive(&ints))
}

pub fn is_nonneg(r: &Rat) -> bool {
    !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;

    #[test]
    fn hermite_and_kernel() {
        let h = hnf(&[vec![2, 4], vec![4, 2]]).unwrap();
        assert_eq!(h, vec![vec![2, 4], vec![0, 6]]);
        // toric kernel of [[1,1,1],[0,1,2]]: x0 + x2 = 2 x1
        let k = integer_kernel(&[vec![1, 1, 1], vec![0, 1, 2]], 3).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(primitive(&k[0]).iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1, 2, 1]);
        let k = integer_kernel(&[vec![2, 3]], 2).unwrap();
        assert_eq!(k.len(), 1);
        assert_eq!(dot(&k[0], &[2, 3]), 0);
        assert_eq!(gcd_all(&k[0]), 1);
    }

    #[test]
    fn smith() {
        assert_eq!(smith_diagonal(&[vec![2], vec![2]]).unwrap(), vec![2]);
        assert_eq!(smith_diagonal(&[vec![2, 0], vec![0, 3]]).unwrap(), vec![1, 6]);
        assert_eq!(smith_diagonal(&[vec![0, 0]]).unwrap(), Vec::<i64>::new());
    }

    #[test]
    fn rational() {
        let m = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(rational_rank(&m), 1);
        assert_eq!(det_rat(&m), int(0));
        assert_eq!(det_int(&[vec![0, 1], vec![2, -1]]).unwrap(), -2);
        let x = solve_left(&[vec![int(1), int(0)], vec![int(1), int(2)]], &[int(3), int(4)]).unwrap();
        assert_eq!(x, vec![int(1), int(2)]);
        assert_eq!(lattice_coords(&[vec![2, 0], vec![0, 1]], &[1, 0]), None);
    }
}
