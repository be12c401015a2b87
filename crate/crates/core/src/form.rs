//! Differential forms with rational-function coefficients.
//!
//! A form lives on an ordered coordinate list; a term is a strictly
//! increasing index tuple `i1 < … < iq` (standing for `dx_i1∧…∧dx_iq`) with a
//! nonzero [`RationalFunction`] coefficient. Variables of a coefficient that
//! are not coordinates are symbolic constants: `d` treats them as constants.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::Error;
use crate::poly::MultiPoly;
use crate::ratfunc::{RationalFunction, VarMap};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorForm {
    coords: Arc<Vec<String>>,
    degree: usize,
    terms: BTreeMap<Vec<usize>, RationalFunction>,
}

/// Sign of the shuffle merging two increasing tuples, or `None` when they share
/// an index.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut inversions = 0usize;
    for x in a {
        for y in b {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
    merged.sort_unstable();
    Some((merged, inversions % 2 == 1))
}

impl ExteriorForm {
    pub fn zero(coords: &Arc<Vec<String>>, degree: usize) -> Self {
        ExteriorForm {
            coords: coords.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// The 0-form `f`.
    pub fn function(coords: &Arc<Vec<String>>, f: RationalFunction) -> Self {
        let mut form = Self::zero(coords, 0);
        if !f.is_zero() {
            form.terms.insert(Vec::new(), f);
        }
        form
    }

    /// `dx_i` for the `i`-th coordinate.
    pub fn differential(coords: &Arc<Vec<String>>, i: usize) -> Self {
        assert!(i < coords.len(), "coordinate index out of range");
        let mut form = Self::zero(coords, 1);
        form.terms.insert(vec![i], RationalFunction::one());
        form
    }

    /// `f dx_I`, sorting `I` with the permutation sign; repeated indices give 0.
    pub fn monomial(coords: &Arc<Vec<String>>, f: RationalFunction, indices: &[usize]) -> Self {
        let mut form = Self::function(coords, f);
        for &i in indices {
            form = form
                .wedge(&Self::differential(coords, i))
                .expect("same coordinates");
        }
        form
    }

    pub fn coords(&self) -> &Arc<Vec<String>> {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, indices: &[usize]) -> RationalFunction {
        self.terms
            .get(indices)
            .cloned()
            .unwrap_or_else(RationalFunction::zero)
    }

    fn check_coords(&self, other: &Self) -> Result<(), Error> {
        if self.coords == other.coords {
            Ok(())
        } else {
            Err(Error::CoordinateMismatch {
                left: self.coords.to_vec(),
                right: other.coords.to_vec(),
            })
        }
    }

    fn insert_term(&mut self, indices: Vec<usize>, c: RationalFunction) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&indices) {
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(indices, sum);
                }
            }
            None => {
                self.terms.insert(indices, c);
            }
        }
    }

    /// Sum of two forms of the same degree on the same coordinates.
    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        self.check_coords(other)?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree {
            return Err(Error::InvalidArgument(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        ExteriorForm {
            coords: self.coords.clone(),
            degree: self.degree,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, Error> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(&self.coords, self.degree);
        for (k, v) in &self.terms {
            out.insert_term(k.clone(), v.scale(c));
        }
        out
    }

    /// Multiplies every coefficient by the function `f`.
    pub fn mul_function(&self, f: &RationalFunction) -> Self {
        let mut out = Self::zero(&self.coords, self.degree);
        for (k, v) in &self.terms {
            out.insert_term(k.clone(), v.mul(f));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self, Error> {
        self.check_coords(other)?;
        let mut out = Self::zero(&self.coords, self.degree + other.degree);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((idx, negative)) = merge_sign(a, b) {
                    let c = ca.mul(cb);
                    out.insert_term(idx, if negative { c.neg() } else { c });
                }
            }
        }
        Ok(out)
    }

    /// de Rham differential with respect to the coordinates.
    pub fn exterior_derivative(&self) -> Self {
        let mut out = Self::zero(&self.coords, self.degree + 1);
        for (idx, c) in &self.terms {
            for (j, name) in self.coords.iter().enumerate() {
                if idx.contains(&j) {
                    continue;
                }
                let dc = c.derivative(name);
                if dc.is_zero() {
                    continue;
                }
                let (merged, negative) = merge_sign(&[j], idx).expect("j not in idx");
                out.insert_term(merged, if negative { dc.neg() } else { dc });
            }
        }
        out
    }

    /// Pulls back along a substitution of the coordinates.
    pub fn pullback(&self, subst: &Substitution) -> Result<Self, Error> {
        let images: Vec<RationalFunction> = self
            .coords
            .iter()
            .map(|name| subst.image_of(name))
            .collect::<Result<_, _>>()?;
        let map: VarMap = self
            .coords
            .iter()
            .cloned()
            .zip(images.iter().cloned())
            .collect();
        let mut extra = subst.images.clone();
        extra.extend(map);
        let source = subst.source.clone();
        let mut differentials: BTreeMap<usize, ExteriorForm> = BTreeMap::new();
        let mut out = Self::zero(&source, self.degree);
        for (idx, c) in &self.terms {
            let coeff = c.substitute(&extra)?;
            let mut piece = Self::function(&source, coeff);
            for &i in idx {
                let di = differentials
                    .entry(i)
                    .or_insert_with(|| Self::function(&source, images[i].clone()).exterior_derivative());
                piece = piece.wedge(di)?;
                if piece.is_zero() {
                    break;
                }
            }
            out = out.add(&piece)?;
        }
        Ok(out)
    }

    /// `Some(s)` with `self = s * other` for a rational scalar `s`.
    pub fn ratio_to(&self, other: &Self) -> Option<Rational> {
        if self.coords != other.coords || self.terms.len() != other.terms.len() || other.is_zero() {
            return None;
        }
        let (k, c) = other.terms.iter().next()?;
        let s = self.terms.get(k)?.div(c).ok()?.as_constant()?;
        (other.scale(&s) == *self).then_some(s)
    }

    /// One rendered term per entry: `coef * dx0^dx1`, or just `coef` for
    /// functions.
    pub fn render_terms(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|(idx, c)| {
                if idx.is_empty() {
                    c.to_string()
                } else {
                    let wedge: Vec<String> =
                        idx.iter().map(|&i| format!("d{}", self.coords[i])).collect();
                    if c.is_polynomial() && c.numerator().num_terms() > 1 {
                        format!("({}) * {}", c, wedge.join("^"))
                    } else {
                        format!("{} * {}", c, wedge.join("^"))
                    }
                }
            })
            .collect()
    }
}

impl ExteriorForm {
    /// Structured rendering: each term carries its basis element, the
    /// coefficient string and numerator/denominator monomial maps.
    pub fn to_json(&self) -> Value {
        let poly = |p: &MultiPoly| {
            let map: serde_json::Map<String, Value> = p
                .monomial_terms()
                .into_iter()
                .map(|(m, c)| (m, Value::String(rational::format(&c))))
                .collect();
            Value::Object(map)
        };
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(idx, c)| {
                let basis: Vec<String> = idx.iter().map(|&i| format!("d{}", self.coords[i])).collect();
                json!({
                    "basis": basis.join("^"),
                    "coefficient": c.to_string(),
                    "numerator": poly(c.numerator()),
                    "denominator": poly(c.denominator()),
                })
            })
            .collect();
        json!({
            "coords": self.coords.as_slice(),
            "degree": self.degree,
            "terms": terms,
            "rendered": self.to_string(),
        })
    }
}

impl fmt::Display for ExteriorForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, term) in self.render_terms().iter().enumerate() {
            match (i, term.strip_prefix('-')) {
                (0, _) => f.write_str(term)?,
                (_, Some(rest)) => write!(f, " - {rest}")?,
                (_, None) => write!(f, " + {term}")?,
            }
        }
        Ok(())
    }
}

/// A map of coordinates: each target coordinate is sent to an expression in
/// the source coordinates (and symbolic constants).
///
/// Coordinates not listed map to themselves when they are also source
/// coordinates. `pullback(pullback(a, s), t) == pullback(a, s.then(&t))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    source: Arc<Vec<String>>,
    images: VarMap,
}

impl Substitution {
    pub fn identity(source: &Arc<Vec<String>>) -> Self {
        Substitution {
            source: source.clone(),
            images: VarMap::new(),
        }
    }

    pub fn with(mut self, name: &str, image: RationalFunction) -> Self {
        self.images.insert(name.to_string(), image);
        self
    }

    pub fn source(&self) -> &Arc<Vec<String>> {
        &self.source
    }

    pub fn images(&self) -> &VarMap {
        &self.images
    }

    pub fn image_of(&self, name: &str) -> Result<RationalFunction, Error> {
        if let Some(img) = self.images.get(name) {
            return Ok(img.clone());
        }
        if self.source.iter().any(|s| s == name) {
            return Ok(RationalFunction::var(name));
        }
        Err(Error::UndefinedSubstitution(name.to_string()))
    }

    /// Substitution whose pullback is "pull back by `self`, then by `next`".
    pub fn then(&self, next: &Substitution) -> Result<Substitution, Error> {
        let mut images = VarMap::new();
        for (name, img) in &self.images {
            images.insert(name.clone(), img.substitute(&next.images)?);
        }
        for (name, img) in &next.images {
            images.entry(name.clone()).or_insert_with(|| img.clone());
        }
        Ok(Substitution {
            source: next.source.clone(),
            images,
        })
    }
}
