//! Sparse multivariate polynomials over the rationals.
//!
//! Invariants kept by every constructor and operation:
//! - no stored zero coefficients;
//! - `vars` is exactly the set of variables that occur with a positive
//!   exponent, sorted in natural order (`x2 < x10`), so two equal polynomials
//!   always have identical representations;
//! - terms are keyed by [`Exponents`], ordered graded-lexicographically over
//!   `vars` (the leading term is the last key).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponents(pub Vec<u32>);

impl Exponents {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    fn divides(&self, other: &Exponents) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

type Terms = BTreeMap<Exponents, Rational>;

/// Natural ordering of symbol names: digit runs compare numerically.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for ((da, sa), (db, sb)) in ca.iter().zip(cb.iter()) {
        let ord = match (da, db) {
            (true, true) => {
                let ta = sa.trim_start_matches('0');
                let tb = sb.trim_start_matches('0');
                ta.len().cmp(&tb.len()).then_with(|| ta.cmp(tb))
            }
            _ => sa.cmp(sb),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<Vec<String>>,
    terms: Terms,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly {
            vars: Arc::new(Vec::new()),
            terms: Terms::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = Terms::new();
        if !c.is_zero() {
            terms.insert(Exponents(Vec::new()), c);
        }
        MultiPoly {
            vars: Arc::new(Vec::new()),
            terms,
        }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rational::int(n))
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(rational::int(1), &[(name, 1)])
    }

    /// `c * Π name^exp`; repeated names accumulate.
    pub fn monomial(c: Rational, powers: &[(&str, u32)]) -> Self {
        let mut names: Vec<String> = powers
            .iter()
            .filter(|(_, e)| *e > 0)
            .map(|(n, _)| n.to_string())
            .collect();
        names.sort_by(|a, b| natural_cmp(a, b));
        names.dedup();
        let mut exps = vec![0u32; names.len()];
        for (n, e) in powers {
            if let Some(i) = names.iter().position(|m| m == n) {
                exps[i] += e;
            }
        }
        let mut terms = Terms::new();
        if !c.is_zero() {
            terms.insert(Exponents(exps), c);
        }
        MultiPoly::from_raw(Arc::new(names), terms)
    }

    /// Builds from raw parts, dropping zeros and unused variables.
    fn from_raw(vars: Arc<Vec<String>>, mut terms: Terms) -> Self {
        terms.retain(|_, c| !c.is_zero());
        let used: Vec<bool> = (0..vars.len())
            .map(|i| terms.keys().any(|e| e.0[i] > 0))
            .collect();
        if used.iter().all(|u| *u) {
            return MultiPoly { vars, terms };
        }
        let new_vars: Vec<String> = vars
            .iter()
            .zip(&used)
            .filter(|(_, u)| **u)
            .map(|(v, _)| v.clone())
            .collect();
        let terms = terms
            .into_iter()
            .map(|(e, c)| {
                let e = e
                    .0
                    .iter()
                    .zip(&used)
                    .filter(|(_, u)| **u)
                    .map(|(x, _)| *x)
                    .collect();
                (Exponents(e), c)
            })
            .collect();
        MultiPoly {
            vars: Arc::new(new_vars),
            terms,
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_value().is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Value of the constant term.
    pub fn constant_value(&self) -> Rational {
        self.terms
            .get(&Exponents(vec![0; self.vars.len()]))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn contains_var(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v == name)
    }

    pub fn leading_coefficient(&self) -> Rational {
        self.terms
            .iter()
            .next_back()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.total()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        match self.var_index(name) {
            Some(i) => self.terms.keys().map(|e| e.0[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Re-expresses both operands over the sorted union of their variables.
    fn align(&self, other: &MultiPoly) -> (Arc<Vec<String>>, Terms, Terms) {
        if self.vars == other.vars {
            return (self.vars.clone(), self.terms.clone(), other.terms.clone());
        }
        let mut union: Vec<String> = self.vars.iter().chain(other.vars.iter()).cloned().collect();
        union.sort_by(|a, b| natural_cmp(a, b));
        union.dedup();
        let union = Arc::new(union);
        let a = Self::reindex(&self.vars, &self.terms, &union);
        let b = Self::reindex(&other.vars, &other.terms, &union);
        (union, a, b)
    }

    fn reindex(from: &[String], terms: &Terms, to: &[String]) -> Terms {
        let map: Vec<usize> = from
            .iter()
            .map(|v| to.iter().position(|w| w == v).expect("target contains source vars"))
            .collect();
        terms
            .iter()
            .map(|(e, c)| {
                let mut out = vec![0u32; to.len()];
                for (i, x) in e.0.iter().enumerate() {
                    out[map[i]] = *x;
                }
                (Exponents(out), c.clone())
            })
            .collect()
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let (vars, mut a, b) = self.align(other);
        for (e, c) in b {
            add_term(&mut a, e, c);
        }
        MultiPoly::from_raw(vars, a)
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        if self.is_zero() || other.is_zero() {
            return MultiPoly::zero();
        }
        if other.is_constant() {
            return self.scale(&other.constant_value());
        }
        if self.is_constant() {
            return other.scale(&self.constant_value());
        }
        let (vars, a, b) = self.align(other);
        let mut out = Terms::new();
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e = Exponents(ea.0.iter().zip(&eb.0).map(|(x, y)| x + y).collect());
                add_term(&mut out, e, ca * cb);
            }
        }
        MultiPoly::from_raw(vars, out)
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut result = MultiPoly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Partial derivative with respect to the named variable.
    pub fn derivative(&self, name: &str) -> MultiPoly {
        let Some(i) = self.var_index(name) else {
            return MultiPoly::zero();
        };
        let mut out = Terms::new();
        for (e, c) in &self.terms {
            if e.0[i] == 0 {
                continue;
            }
            let mut f = e.0.clone();
            f[i] -= 1;
            add_term(&mut out, Exponents(f), c * rational::int(e.0[i] as i64));
        }
        MultiPoly::from_raw(self.vars.clone(), out)
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        if divisor.is_zero() {
            return None;
        }
        if divisor.is_constant() {
            return Some(self.scale(&divisor.constant_value().recip()));
        }
        if self.is_zero() {
            return Some(MultiPoly::zero());
        }
        if divisor.vars.iter().any(|v| !self.contains_var(v)) {
            return None;
        }
        let (vars, mut rem, d) = self.align(divisor);
        let (lead_e, lead_c) = d.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))?;
        let lead_inv = lead_c.recip();
        let mut quot = Terms::new();
        while let Some((e, c)) = rem.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
            if !lead_e.divides(&e) {
                return None;
            }
            let shift: Vec<u32> = e.0.iter().zip(&lead_e.0).map(|(a, b)| a - b).collect();
            let factor = &c * &lead_inv;
            for (de, dc) in &d {
                let te = Exponents(de.0.iter().zip(&shift).map(|(a, b)| a + b).collect());
                add_term(&mut rem, te, -(dc * &factor));
            }
            quot.insert(Exponents(shift), factor);
        }
        Some(MultiPoly::from_raw(vars, quot))
    }

    /// Coefficients with respect to one variable: `self = Σ_k coeff[k] v^k`.
    pub fn coefficients_in(&self, name: &str) -> BTreeMap<u32, MultiPoly> {
        let Some(i) = self.var_index(name) else {
            let mut m = BTreeMap::new();
            if !self.is_zero() {
                m.insert(0, self.clone());
            }
            return m;
        };
        let mut buckets: BTreeMap<u32, Terms> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut f = e.0.clone();
            let k = f[i];
            f[i] = 0;
            buckets.entry(k).or_default().insert(Exponents(f), c.clone());
        }
        buckets
            .into_iter()
            .map(|(k, t)| (k, MultiPoly::from_raw(self.vars.clone(), t)))
            .collect()
    }

    /// Multiplies by `name^k`.
    fn shift_var(&self, name: &str, k: u32) -> MultiPoly {
        if k == 0 {
            return self.clone();
        }
        self.mul(&MultiPoly::monomial(Rational::one(), &[(name, k)]))
    }

    /// Scales to the unique associate whose leading coefficient is one.
    pub fn monic(&self) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading_coefficient().recip())
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> MultiPoly {
        let mut mins: Option<Vec<u32>> = None;
        for e in self.terms.keys() {
            mins = Some(match mins {
                None => e.0.clone(),
                Some(m) => m.iter().zip(&e.0).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        let mut terms = Terms::new();
        terms.insert(Exponents(mins.unwrap_or_default()), Rational::one());
        MultiPoly::from_raw(self.vars.clone(), terms)
    }

    /// Integer-normalized content: the positive rational `c` such that
    /// `self / c` has coprime integer coefficients.
    pub fn rational_content(&self) -> Rational {
        if self.is_zero() {
            return Rational::one();
        }
        let l = rational::denominator_lcm(self.terms.values());
        let g = rational::numerator_gcd(self.terms.values());
        Rational::new(g, l)
    }

    /// Evaluates every variable for which `value` returns `Some`, leaving the
    /// others symbolic.
    pub fn eval_partial(&self, value: impl Fn(&str) -> Option<Rational>) -> MultiPoly {
        let fixed: Vec<Option<Rational>> = self.vars.iter().map(|v| value(v)).collect();
        let mut out = Terms::new();
        for (e, c) in &self.terms {
            let mut c = c.clone();
            let mut f = e.0.clone();
            for (i, x) in fixed.iter().enumerate() {
                if let Some(x) = x {
                    c *= num_traits::pow(x.clone(), e.0[i] as usize);
                    f[i] = 0;
                }
            }
            add_term(&mut out, Exponents(f), c);
        }
        MultiPoly::from_raw(self.vars.clone(), out)
    }

    /// Greatest common divisor, monic (the zero polynomial only for `gcd(0, 0)`).
    pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return MultiPoly::one();
        }
        if a.is_monomial() || b.is_monomial() {
            return monomial_gcd(a, b);
        }
        if let Some(v) = a.vars.iter().find(|v| !b.contains_var(v)) {
            return gcd_with_coefficients(b, a, v);
        }
        if let Some(v) = b.vars.iter().find(|v| !a.contains_var(v)) {
            return gcd_with_coefficients(a, b, v);
        }
        let (small, large) = if a.num_terms() <= b.num_terms() { (a, b) } else { (b, a) };
        if large.div_exact(small).is_some() {
            return small.monic();
        }
        let v = a.vars[0].clone();
        let ca = a.content_in(&v);
        let cb = b.content_in(&v);
        let c = MultiPoly::gcd(&ca, &cb);
        let pa = a.div_exact(&ca).expect("content divides");
        let pb = b.div_exact(&cb).expect("content divides");
        let g = primitive_prs(pa, pb, &v);
        c.mul(&g).monic()
    }

    /// Gcd of the coefficients with respect to `name`.
    pub fn content_in(&self, name: &str) -> MultiPoly {
        let coeffs = self.coefficients_in(name);
        let mut g = MultiPoly::zero();
        for c in coeffs.values() {
            g = MultiPoly::gcd(&g, c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn primitive_part_in(&self, name: &str) -> MultiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content_in(name);
        self.div_exact(&c).expect("content divides")
    }
}

/// `gcd(base, p)` where `v` occurs in `p` but not in `base`: the gcd of
/// `base` with every coefficient of `p` in `v`.
fn gcd_with_coefficients(base: &MultiPoly, p: &MultiPoly, v: &str) -> MultiPoly {
    let mut g = base.clone();
    for c in p.coefficients_in(v).values() {
        g = MultiPoly::gcd(&g, c);
        if g.is_constant() {
            return MultiPoly::one();
        }
    }
    g.monic()
}

fn monomial_gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let (vars, ta, tb) = ma.align(&mb);
    let ea = ta.keys().next().cloned().unwrap_or(Exponents(vec![0; vars.len()]));
    let eb = tb.keys().next().cloned().unwrap_or(Exponents(vec![0; vars.len()]));
    let e = Exponents(ea.0.iter().zip(&eb.0).map(|(x, y)| *x.min(y)).collect());
    let mut t = Terms::new();
    t.insert(e, Rational::one());
    MultiPoly::from_raw(vars, t)
}

fn primitive_prs(a: MultiPoly, b: MultiPoly, v: &str) -> MultiPoly {
    let (mut p, mut q) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if q.is_zero() {
            return p.primitive_part_in(v).monic();
        }
        if q.degree_in(v) == 0 {
            return MultiPoly::one();
        }
        let r = pseudo_remainder(&p, &q, v);
        p = q;
        q = r.primitive_part_in(v);
    }
}

/// Pseudo-remainder of `p` by `q` viewed as polynomials in `v`.
fn pseudo_remainder(p: &MultiPoly, q: &MultiPoly, v: &str) -> MultiPoly {
    let dq = q.degree_in(v);
    let qc = q.coefficients_in(v);
    let lq = qc.get(&dq).cloned().unwrap_or_else(MultiPoly::zero);
    let mut r = p.clone();
    while !r.is_zero() && r.degree_in(v) >= dq {
        let dr = r.degree_in(v);
        let lr = r.coefficients_in(v).remove(&dr).expect("leading coefficient");
        r = r.mul(&lq).sub(&q.mul(&lr).shift_var(v, dr - dq));
    }
    r
}

fn add_term(terms: &mut Terms, e: Exponents, c: Rational) {
    if c.is_zero() {
        return;
    }
    match terms.entry(e) {
        std::collections::btree_map::Entry::Vacant(slot) => {
            slot.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut slot) => {
            let sum = slot.get() + &c;
            if sum.is_zero() {
                slot.remove();
            } else {
                *slot.get_mut() = sum;
            }
        }
    }
}

impl MultiPoly {
    /// Terms as `(monomial, coefficient)` in descending grlex order; the
    /// constant monomial is written `"1"`.
    pub fn monomial_terms(&self) -> Vec<(String, Rational)> {
        self.terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .0
                    .iter()
                    .zip(self.vars.iter())
                    .filter(|(x, _)| **x > 0)
                    .map(|(x, v)| if *x == 1 { v.clone() } else { format!("{v}^{x}") })
                    .collect();
                let mono = if mono.is_empty() { "1".to_string() } else { mono.join("*") };
                (mono, c.clone())
            })
            .collect()
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .0
                .iter()
                .zip(self.vars.iter())
                .filter(|(x, _)| **x > 0)
                .map(|(x, v)| if *x == 1 { v.clone() } else { format!("{v}^{x}") })
                .collect();
            let mono = mono.join("*");
            let negative = c.is_negative();
            let abs = c.abs();
            let body = if mono.is_empty() {
                rational::format(&abs)
            } else if abs.is_one() {
                mono
            } else {
                format!("{}*{}", rational::format(&abs), mono)
            };
            match (idx, negative) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}
