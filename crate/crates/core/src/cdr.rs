//! The Čech–de Rham double complex of a chart category.
//!
//! `C^{p,q}` is the product, over length-`p` strings `U0 → … → Up`, of the
//! simplicial `q`-cochains of `U0`. The horizontal differential is
//!
//! ```text
//! (δω)(h1, …, h_{p+1}) = h1^* ω(h2, …, h_{p+1})
//!                      + Σ_{i=1}^{p} (−1)^i ω(h1, …, h_{i+1}∘h_i, …, h_{p+1})
//!                      + (−1)^{p+1} ω(h1, …, hp)
//! ```
//!
//! the vertical one is `(−1)^p d`, and the total differential is their sum.
//! Cochains are stored flat, string by string in canonical string order and
//! simplex by simplex inside each string.

use std::collections::HashMap;

use num_traits::Zero;
use rand::Rng;
use serde_json::{json, Value};

use crate::category::{ChainString, ChartCategory};
use crate::error::Error;
use crate::linalg::{CohomologySpace, SparseMatrix};
use crate::model::FamilySpec;
use crate::rational::{self, Rational};

/// Environment variable overriding [`DEFAULT_STRING_CAP`].
pub const STRING_CAP_VAR: &str = "LEAFSPACE_STRING_CAP";
pub const DEFAULT_STRING_CAP: u128 = 200_000;

/// The string-count cap in force.
pub fn string_cap() -> u128 {
    std::env::var(STRING_CAP_VAR)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_STRING_CAP)
}

/// Cochain of bidegree `(p, q)`: `values[i]` is the `q`-cochain on the source
/// of the `i`-th string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigradedCochain {
    pub p: usize,
    pub q: usize,
    pub values: Vec<Vec<Rational>>,
}

impl BigradedCochain {
    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(|x| x.is_zero())
    }
}

/// Strings up to a fixed length with their cochain layout.
#[derive(Clone, Debug)]
pub struct DoubleComplex<'a> {
    cat: &'a ChartCategory,
    strings: Vec<Vec<ChainString>>,
    index: Vec<HashMap<ChainString, usize>>,
    max_q: usize,
}

impl<'a> DoubleComplex<'a> {
    /// Materializes strings of length `0..=max_p`, refusing when their number
    /// exceeds [`string_cap`].
    pub fn new(cat: &'a ChartCategory, max_p: usize) -> Result<Self, Error> {
        Self::with_cap(cat, max_p, string_cap())
    }

    pub fn with_cap(cat: &'a ChartCategory, max_p: usize, cap: u128) -> Result<Self, Error> {
        let total: u128 = (0..=max_p).map(|p| cat.count_strings(p)).fold(0, u128::saturating_add);
        if total > cap {
            return Err(Error::Guard(format!(
                "{total} strings of length at most {max_p} exceed the cap {cap} (set {STRING_CAP_VAR} to raise it)"
            )));
        }
        let strings: Vec<Vec<ChainString>> = (0..=max_p).map(|p| cat.strings(p)).collect();
        let index = strings
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let max_q = cat.objects().iter().map(|o| o.complex.dim()).max().unwrap_or(0);
        Ok(DoubleComplex {
            cat,
            strings,
            index,
            max_q,
        })
    }

    pub fn category(&self) -> &ChartCategory {
        self.cat
    }

    pub fn max_p(&self) -> usize {
        self.strings.len() - 1
    }

    pub fn max_q(&self) -> usize {
        self.max_q
    }

    pub fn strings(&self, p: usize) -> &[ChainString] {
        &self.strings[p]
    }

    pub fn string_index(&self, s: &ChainString) -> Option<usize> {
        self.index.get(s.len())?.get(s).copied()
    }

    fn simplices(&self, s: &ChainString, q: usize) -> usize {
        self.cat.object(s.source).complex.count(q)
    }

    /// Start of each string's block in the flat layout, plus the total.
    pub fn offsets(&self, p: usize, q: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.strings[p].len() + 1);
        let mut acc = 0;
        out.push(0);
        for s in &self.strings[p] {
            acc += self.simplices(s, q);
            out.push(acc);
        }
        out
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.strings[p].iter().map(|s| self.simplices(s, q)).sum()
    }

    fn check_p(&self, p: usize) -> Result<(), Error> {
        if p > self.max_p() {
            return Err(Error::InvalidArgument(format!(
                "strings of length {p} were not materialized (maximum {})",
                self.max_p()
            )));
        }
        Ok(())
    }

    pub fn zero(&self, p: usize, q: usize) -> BigradedCochain {
        BigradedCochain {
            p,
            q,
            values: self.strings[p]
                .iter()
                .map(|s| vec![Rational::zero(); self.simplices(s, q)])
                .collect(),
        }
    }

    pub fn flatten(&self, c: &BigradedCochain) -> Vec<Rational> {
        c.values.iter().flatten().cloned().collect()
    }

    pub fn unflatten(&self, p: usize, q: usize, flat: &[Rational]) -> BigradedCochain {
        let offsets = self.offsets(p, q);
        assert_eq!(flat.len(), *offsets.last().unwrap(), "flat cochain has the wrong length");
        BigradedCochain {
            p,
            q,
            values: offsets.windows(2).map(|w| flat[w[0]..w[1]].to_vec()).collect(),
        }
    }

    /// Cochain with entries `n/d`, `n ∈ [−5, 5]`, `d ∈ [1, 4]`.
    pub fn random(&self, p: usize, q: usize, rng: &mut impl Rng) -> BigradedCochain {
        let flat = random_vector(rng, self.dim(p, q));
        self.unflatten(p, q, &flat)
    }

    /// Matrix of `δ: C^{p,q} → C^{p+1,q}`.
    pub fn delta_matrix(&self, p: usize, q: usize) -> Result<SparseMatrix, Error> {
        self.check_p(p + 1)?;
        let src = self.offsets(p, q);
        let dst = self.offsets(p + 1, q);
        let mut m = SparseMatrix::zeros(*dst.last().unwrap(), *src.last().unwrap());
        let mut pullbacks: HashMap<usize, SparseMatrix> = HashMap::new();
        for (row_block, t) in self.strings[p + 1].iter().enumerate() {
            let r0 = dst[row_block];
            let n = dst[row_block + 1] - r0;
            let h1 = t.arrows[0];
            let tail = ChainString {
                source: self.cat.morphism(h1).target,
                arrows: t.arrows[1..].to_vec(),
            };
            let c0 = src[self.string_index(&tail).expect("tail is a string")];
            let pull = pullbacks.entry(h1).or_insert_with(|| {
                let mor = self.cat.morphism(h1);
                mor.map.pullback(
                    &self.cat.object(mor.source).complex,
                    &self.cat.object(mor.target).complex,
                    q,
                )
            });
            for (i, j, v) in pull.entries() {
                m.add_to(r0 + i, c0 + j, v.clone());
            }
            for i in 1..=p {
                let composite = self
                    .cat
                    .compose(t.arrows[i - 1], t.arrows[i])
                    .expect("validated category");
                let mut arrows = t.arrows[..i - 1].to_vec();
                arrows.push(composite);
                arrows.extend_from_slice(&t.arrows[i + 1..]);
                let s = ChainString {
                    source: t.source,
                    arrows,
                };
                let c0 = src[self.string_index(&s).expect("face is a string")];
                let sign = rational::int(if i % 2 == 0 { 1 } else { -1 });
                for k in 0..n {
                    m.add_to(r0 + k, c0 + k, sign.clone());
                }
            }
            let head = ChainString {
                source: t.source,
                arrows: t.arrows[..p].to_vec(),
            };
            let c0 = src[self.string_index(&head).expect("head is a string")];
            let sign = rational::int(if (p + 1) % 2 == 0 { 1 } else { -1 });
            for k in 0..n {
                m.add_to(r0 + k, c0 + k, sign.clone());
            }
        }
        Ok(m)
    }

    /// Matrix of `(−1)^p d: C^{p,q} → C^{p,q+1}`.
    pub fn vertical_matrix(&self, p: usize, q: usize) -> Result<SparseMatrix, Error> {
        self.check_p(p)?;
        let src = self.offsets(p, q);
        let dst = self.offsets(p, q + 1);
        let mut m = SparseMatrix::zeros(*dst.last().unwrap(), *src.last().unwrap());
        let sign = rational::int(if p % 2 == 0 { 1 } else { -1 });
        let mut cache: HashMap<usize, SparseMatrix> = HashMap::new();
        for (block, s) in self.strings[p].iter().enumerate() {
            let d = cache
                .entry(s.source)
                .or_insert_with(|| self.cat.object(s.source).complex.coboundary(q));
            for (i, j, v) in d.entries() {
                m.add_to(dst[block] + i, src[block] + j, v * &sign);
            }
        }
        Ok(m)
    }

    pub fn delta(&self, c: &BigradedCochain) -> Result<BigradedCochain, Error> {
        let v = self.delta_matrix(c.p, c.q)?.mul_vec(&self.flatten(c));
        Ok(self.unflatten(c.p + 1, c.q, &v))
    }

    pub fn vertical(&self, c: &BigradedCochain) -> Result<BigradedCochain, Error> {
        let v = self.vertical_matrix(c.p, c.q)?.mul_vec(&self.flatten(c));
        Ok(self.unflatten(c.p, c.q + 1, &v))
    }

    /// Bidegrees `(p, t − p)` making up total degree `t`, in increasing `p`.
    pub fn bidegrees(&self, t: usize) -> Vec<(usize, usize)> {
        (0..=t)
            .filter(|&p| t - p <= self.max_q)
            .map(|p| (p, t - p))
            .collect()
    }

    /// Each bidegree of total degree `t` with the start of its block.
    pub fn total_offsets(&self, t: usize) -> Vec<((usize, usize), usize)> {
        let mut acc = 0;
        self.bidegrees(t)
            .into_iter()
            .map(|bd| {
                let start = acc;
                acc += self.dim(bd.0, bd.1);
                (bd, start)
            })
            .collect()
    }

    pub fn total_dim(&self, t: usize) -> usize {
        self.bidegrees(t).iter().map(|&(p, q)| self.dim(p, q)).sum()
    }

    /// Matrix of `D = δ + (−1)^p d` from total degree `t` to `t + 1`.
    pub fn total_matrix(&self, t: usize) -> Result<SparseMatrix, Error> {
        self.check_p(t + 1)?;
        let src = self.total_offsets(t);
        let dst: HashMap<(usize, usize), usize> = self.total_offsets(t + 1).into_iter().collect();
        let mut m = SparseMatrix::zeros(self.total_dim(t + 1), self.total_dim(t));
        for &((p, q), c0) in &src {
            if let Some(&r0) = dst.get(&(p + 1, q)) {
                for (i, j, v) in self.delta_matrix(p, q)?.entries() {
                    m.add_to(r0 + i, c0 + j, v.clone());
                }
            }
            if let Some(&r0) = dst.get(&(p, q + 1)) {
                for (i, j, v) in self.vertical_matrix(p, q)?.entries() {
                    m.add_to(r0 + i, c0 + j, v.clone());
                }
            }
        }
        Ok(m)
    }

    /// Splits a flat total-degree vector into its bidegree components.
    pub fn split_total(&self, t: usize, flat: &[Rational]) -> Vec<BigradedCochain> {
        self.total_offsets(t)
            .into_iter()
            .map(|((p, q), start)| self.unflatten(p, q, &flat[start..start + self.dim(p, q)]))
            .collect()
    }

    /// Concatenates bidegree components (missing ones read as zero).
    pub fn join_total(&self, t: usize, parts: &[BigradedCochain]) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.total_dim(t));
        for (p, q) in self.bidegrees(t) {
            match parts.iter().find(|c| c.p == p && c.q == q) {
                Some(c) => out.extend(self.flatten(c)),
                None => out.extend(std::iter::repeat_with(Rational::zero).take(self.dim(p, q))),
            }
        }
        out
    }

    /// JSON rendering: nonzero values keyed by string label and simplex.
    pub fn cochain_json(&self, c: &BigradedCochain) -> Value {
        let mut values = serde_json::Map::new();
        for (s, vals) in self.strings[c.p].iter().zip(&c.values) {
            let complex = &self.cat.object(s.source).complex;
            let entries: serde_json::Map<String, Value> = complex
                .simplices(c.q)
                .iter()
                .zip(vals)
                .filter(|(_, v)| !v.is_zero())
                .map(|(simplex, v)| (simplex_label(complex, simplex), Value::String(rational::format(v))))
                .collect();
            if !entries.is_empty() {
                values.insert(self.cat.label(s), Value::Object(entries));
            }
        }
        json!({ "p": c.p, "q": c.q, "values": values })
    }
}

/// `[a,b,c]` from vertex names.
pub fn simplex_label(complex: &crate::simplicial::SimplicialComplex, simplex: &[usize]) -> String {
    let names: Vec<&str> = simplex.iter().map(|&i| complex.vertices()[i].as_str()).collect();
    format!("[{}]", names.join(","))
}

/// Entries `n/d` with `n ∈ [−5, 5]` and `d ∈ [1, 4]`.
pub fn random_vector(rng: &mut impl Rng, len: usize) -> Vec<Rational> {
    (0..len)
        .map(|_| rational::ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4)))
        .collect()
}

/// Total cohomology with canonical representatives per degree.
#[derive(Clone, Debug)]
pub struct TotalCohomology {
    pub betti: Vec<usize>,
    pub representatives: Vec<Vec<Vec<BigradedCochain>>>,
    spaces: Vec<CohomologySpace>,
}

impl TotalCohomology {
    /// Coordinates of the class of a flat `D`-cocycle of total degree `t`.
    pub fn class_of(&self, t: usize, flat: &[Rational]) -> Result<Vec<Rational>, Error> {
        let space = self
            .spaces
            .get(t)
            .ok_or_else(|| Error::InvalidArgument(format!("degree {t} was not computed")))?;
        space.coordinates(flat).ok_or(Error::NotClosed)
    }

    pub fn space(&self, t: usize) -> &CohomologySpace {
        &self.spaces[t]
    }
}

/// Cohomology of the total complex in degrees `0..=max_degree`.
pub fn total_cohomology(cat: &ChartCategory, max_degree: usize) -> Result<(DoubleComplex<'_>, TotalCohomology), Error> {
    let dc = DoubleComplex::new(cat, max_degree + 1)?;
    let mut betti = Vec::new();
    let mut representatives = Vec::new();
    let mut spaces = Vec::new();
    let mut incoming: Option<SparseMatrix> = None;
    for t in 0..=max_degree {
        let outgoing = dc.total_matrix(t)?;
        let space = CohomologySpace::compute(incoming.as_ref(), Some(&outgoing), dc.total_dim(t));
        betti.push(space.betti());
        representatives.push(
            space
                .representatives()
                .iter()
                .map(|v| dc.split_total(t, v))
                .collect(),
        );
        spaces.push(space);
        incoming = Some(outgoing);
    }
    Ok((
        dc,
        TotalCohomology {
            betti,
            representatives,
            spaces,
        },
    ))
}

/// Per-object `q`-cochains, read from a model family. Simplices are keyed
/// by comma-joined vertex names in any order (the permutation sign applies).
pub fn family_from_spec(cat: &ChartCategory, spec: &FamilySpec) -> Result<Vec<Vec<Rational>>, Error> {
    for id in spec.values.keys() {
        if cat.object_index(id).is_none() {
            return Err(Error::InvalidArgument(format!("family {} names unknown object {id}", spec.name)));
        }
    }
    let mut out = Vec::new();
    for obj in cat.objects() {
        let complex = &obj.complex;
        let mut values = vec![Rational::zero(); complex.count(spec.degree)];
        if let Some(entries) = spec.values.get(&obj.id) {
            for (key, text) in entries {
                let mut idx = Vec::new();
                for v in key.split(',').map(str::trim) {
                    idx.push(complex.vertex_index(v).ok_or_else(|| {
                        Error::InvalidArgument(format!("family {}: unknown vertex {v} on {}", spec.name, obj.id))
                    })?);
                }
                if idx.len() != spec.degree + 1 {
                    return Err(Error::InvalidArgument(format!(
                        "family {}: simplex {key} does not have degree {}",
                        spec.name, spec.degree
                    )));
                }
                let mut inversions = 0;
                for i in 0..idx.len() {
                    for j in i + 1..idx.len() {
                        if idx[i] > idx[j] {
                            inversions += 1;
                        }
                    }
                }
                idx.sort_unstable();
                let pos = complex.simplex_index(&idx).ok_or_else(|| {
                    Error::InvalidArgument(format!("family {}: {key} is not a simplex of {}", spec.name, obj.id))
                })?;
                let mut value = rational::parse(text)?;
                if inversions % 2 == 1 {
                    value = -value;
                }
                values[pos] += value;
            }
        }
        out.push(values);
    }
    Ok(out)
}

/// The `(0, q)` cochain `U0 ↦ ω_{U0}` of a compatible family.
pub fn j_map(dc: &DoubleComplex<'_>, family: &[Vec<Rational>], q: usize) -> Result<BigradedCochain, Error> {
    let cat = dc.category();
    if family.len() != cat.objects().len() {
        return Err(Error::InvalidArgument("one cochain per object is required".into()));
    }
    for (o, values) in family.iter().enumerate() {
        if values.len() != cat.object(o).complex.count(q) {
            return Err(Error::InvalidArgument(format!(
                "cochain on {} has the wrong length",
                cat.object(o).id
            )));
        }
    }
    for m in cat.morphisms() {
        let pulled = m
            .map
            .pullback(&cat.object(m.source).complex, &cat.object(m.target).complex, q)
            .mul_vec(&family[m.target]);
        if pulled != family[m.source] {
            return Err(Error::IncompatibleFamily { morphism: m.id.clone() });
        }
    }
    Ok(BigradedCochain {
        p: 0,
        q,
        values: dc.strings(0).iter().map(|s| family[s.source].clone()).collect(),
    })
}
