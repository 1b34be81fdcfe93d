use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::{One, Signed, Zero};

use super::parse::Parser;
use super::{MonomialOrder, Polynomial, Rat};
use crate::{Error, Result};

/// Budgets for the expensive loops. Exceeding one is an error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    /// S-polynomial reductions per Gröbner basis computation.
    pub max_steps: u64,
    /// Total degree of any intermediate basis element.
    pub max_degree: u32,
    /// Largest exponent tried by annihilator lifting and saturation.
    pub max_ann_exponent: u32,
    /// Stellar subdivision rounds.
    pub max_subdiv_iters: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_steps: 20_000, max_degree: 40, max_ann_exponent: 12, max_subdiv_iters: 200 }
    }
}

/// Ordered variable names plus an optional quasi-uniformizer.
#[derive(Clone, Debug)]
pub struct Ring {
    vars: Vec<String>,
    pi: Option<usize>,
    limits: Limits,
}

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.pi == other.pi
    }
}
impl Eq for Ring {}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Ring {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>, pi: Option<&str>) -> Result<Arc<Ring>> {
        Self::with_limits(vars, pi, Limits::default())
    }

    pub fn with_limits<S: Into<String>>(
        vars: impl IntoIterator<Item = S>,
        pi: Option<&str>,
        limits: Limits,
    ) -> Result<Arc<Ring>> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        for (i, v) in vars.iter().enumerate() {
            if !valid_name(v) {
                return Err(Error::pre(format!("invalid variable name `{v}`")));
            }
            if vars[..i].contains(v) {
                return Err(Error::pre(format!("duplicate variable `{v}`")));
            }
        }
        let pi = match pi {
            Some(name) => Some(
                vars.iter()
                    .position(|v| v == name)
                    .ok_or_else(|| Error::pre(format!("π variable `{name}` not in ring")))?,
            ),
            None => None,
        };
        Ok(Arc::new(Ring { vars, pi, limits }))
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_name(&self, i: usize) -> &str {
        &self.vars[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn pi(&self) -> Option<usize> {
        self.pi
    }

    pub fn pi_name(&self) -> Option<&str> {
        self.pi.map(|i| self.vars[i].as_str())
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    /// Same ring with different budgets.
    pub fn relimit(&self, limits: Limits) -> Arc<Ring> {
        Arc::new(Ring { vars: self.vars.clone(), pi: self.pi, limits })
    }

    pub fn gen(&self, i: usize) -> Polynomial {
        Polynomial::var(self.nvars(), i)
    }

    pub fn var(&self, name: &str) -> Result<Polynomial> {
        self.index_of(name).map(|i| self.gen(i)).ok_or_else(|| Error::pre(format!("unknown variable `{name}`")))
    }

    pub fn pi_poly(&self) -> Option<Polynomial> {
        self.pi.map(|i| self.gen(i))
    }

    pub fn zero(&self) -> Polynomial {
        Polynomial::zero(self.nvars())
    }

    pub fn one(&self) -> Polynomial {
        Polynomial::one(self.nvars())
    }

    pub fn constant(&self, c: Rat) -> Polynomial {
        Polynomial::constant(self.nvars(), c)
    }

    pub fn parse(&self, s: &str) -> Result<Polynomial> {
        Parser::new(self, s).parse()
    }

    pub fn parse_all<S: AsRef<str>>(&self, items: &[S]) -> Result<Vec<Polynomial>> {
        items.iter().map(|s| self.parse(s.as_ref())).collect()
    }

    /// A name not yet used in this ring, derived from `base`.
    pub fn fresh_name(&self, base: &str, taken: &[String]) -> String {
        let mut name = String::from(base);
        while self.vars.contains(&name) || taken.contains(&name) {
            name.push('\'');
        }
        name
    }

    /// This ring with `names` appended (made unique by priming).
    pub fn extend(&self, names: &[&str]) -> Result<(Arc<Ring>, Vec<usize>)> {
        let mut vars = self.vars.clone();
        let mut idx = Vec::new();
        for n in names {
            let name = self.fresh_name(n, &vars);
            idx.push(vars.len());
            vars.push(name);
        }
        Ok((Arc::new(Ring { vars, pi: self.pi, limits: self.limits.clone() }), idx))
    }

    /// Ring on a subset/reordering of variables, keeping `π` if it survives.
    pub fn restrict(&self, keep: &[usize]) -> Result<Arc<Ring>> {
        let vars: Vec<String> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let pi = self.pi.and_then(|p| keep.iter().position(|&i| i == p));
        Ok(Arc::new(Ring { vars, pi, limits: self.limits.clone() }))
    }

    /// Canonical printed form: terms from the largest to the smallest in
    /// graded reverse lexicographic order.
    pub fn fmt_poly(&self, p: &Polynomial) -> String {
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in p.sorted_terms(&MonomialOrder::GrevLex).into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let is_one = e.iter().all(|&x| x == 0);
            let mut parts: Vec<String> = Vec::new();
            if !a.is_one() || is_one {
                parts.push(fmt_rat(&a));
            }
            for (i, &x) in e.iter().enumerate() {
                match x {
                    0 => {}
                    1 => parts.push(self.vars[i].clone()),
                    _ => parts.push(format!("{}^{}", self.vars[i], x)),
                }
            }
            out.push_str(&parts.join("*"));
        }
        out
    }

    pub fn fmt_polys(&self, ps: &[Polynomial]) -> Vec<String> {
        ps.iter().map(|p| self.fmt_poly(p)).collect()
    }
}

/// `n` or `n/d` with a positive denominator.
pub fn fmt_rat(r: &Rat) -> String {
    let mut s = String::new();
    if r.denom().is_one() {
        let _ = write!(s, "{}", r.numer());
    } else {
        let _ = write!(s, "{}/{}", r.numer(), r.denom());
    }
    s
}

/// Parses `n`, `-n` or `n/d`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    let bad = || Error::Parse { input: s.to_string(), message: "expected rational".into() };
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: num_bigint::BigInt = n.parse().map_err(|_| bad())?;
    let d: num_bigint::BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

/// A point with rational coordinates, keyed by variable name.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalPoint {
    pub coords: BTreeMap<String, Rat>,
}

impl RationalPoint {
    pub fn new(coords: impl IntoIterator<Item = (String, Rat)>) -> Self {
        RationalPoint { coords: coords.into_iter().collect() }
    }

    pub fn origin(ring: &Ring) -> Self {
        RationalPoint::new(ring.vars().iter().map(|v| (v.clone(), Rat::zero())))
    }

    /// Coordinates in ring order; every variable must be assigned.
    pub fn values(&self, ring: &Ring) -> Result<Vec<Rat>> {
        ring.vars()
            .iter()
            .map(|v| {
                self.coords.get(v).cloned().ok_or_else(|| Error::pre(format!("point has no coordinate for `{v}`")))
            })
            .collect()
    }

    pub fn set(&mut self, var: &str, value: Rat) {
        self.coords.insert(var.into(), value);
    }

    pub fn get(&self, var: &str) -> Option<&Rat> {
        self.coords.get(var)
    }

    /// True when the π coordinate vanishes (or no π is designated).
    pub fn on_closed_fiber(&self, ring: &Ring) -> bool {
        match ring.pi_name() {
            Some(p) => self.coords.get(p).map(Zero::is_zero).unwrap_or(false),
            None => true,
        }
    }

    /// Generators `x_i - p_i` of the maximal ideal of the point.
    pub fn maximal_ideal(&self, ring: &Ring) -> Result<Vec<Polynomial>> {
        let vals = self.values(ring)?;
        Ok(vals.iter().enumerate().map(|(i, c)| &ring.gen(i) - &ring.constant(c.clone())).collect())
    }
}
