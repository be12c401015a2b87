//! Finite models of Gelfand–Fuchs cohomology.
//!
//! The truncated Weil algebra on odd generators `y_i` (degree `2i - 1`) and
//! even generators `c_i` (degree `2i`), `1 <= i <= n`, with `d y_i = c_i`,
//! `d c_i = 0` and every `c`-monomial of index weight above `n` set to zero.
//! Three variants share this presentation:
//!
//! | variant | `y` generators allowed | models                      |
//! |---------|------------------------|-----------------------------|
//! | `W`     | all `y_1..y_n`         | `H*(W_n)`                   |
//! | `WO`    | odd `y_1, y_3, …`      | `H*(W_n, O(n))`             |
//! | `WGL`   | none                   | `H*(W_n, GL(n))`            |
//!
//! All `c_i` are present in every variant. Signs follow the graded Leibniz
//! rule with factors written `y`s ascending, then `c`s ascending.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::Error;
use crate::linalg::{CohomologySpace, SparseMatrix};
use crate::rational::{self, Rational};

/// Largest codimension accepted without an explicit override.
pub const DEFAULT_MAX_N: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    W,
    WO,
    WGL,
}

impl Variant {
    fn allows_y(self, i: u32) -> bool {
        match self {
            Variant::W => true,
            Variant::WO => i % 2 == 1,
            Variant::WGL => false,
        }
    }

    /// Whether the model of `self` is a subcomplex of the model of `other`.
    pub fn is_subcomplex_of(self, other: Variant) -> bool {
        matches!(
            (self, other),
            (Variant::WGL, _) | (Variant::WO, Variant::WO) | (Variant::WO, Variant::W) | (Variant::W, Variant::W)
        )
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::W => "W",
            Variant::WO => "WO",
            Variant::WGL => "WGL",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_uppercase().as_str() {
            "W" => Ok(Variant::W),
            "WO" => Ok(Variant::WO),
            "WGL" => Ok(Variant::WGL),
            _ => Err(Error::Parse(format!("unknown variant {s:?} (expected W, WO or WGL)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorKind {
    Y,
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub kind: GeneratorKind,
    pub index: u32,
}

impl Generator {
    pub fn degree(self) -> u32 {
        match self.kind {
            GeneratorKind::Y => 2 * self.index - 1,
            GeneratorKind::C => 2 * self.index,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeneratorKind::Y => write!(f, "y{}", self.index),
            GeneratorKind::C => write!(f, "c{}", self.index),
        }
    }
}

/// `y_{i1}⋯y_{ir} c_{j1}⋯c_{js}` with `i1 < … < ir` and `j1 <= … <= js`.
///
/// Ordering: at the smallest `y` index where two monomials differ, the one
/// lacking it is smaller; ties on `y` are broken the same way on `c`
/// multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    y: Vec<u32>,
    c: Vec<u32>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { y: Vec::new(), c: Vec::new() }
    }

    /// Builds a canonical monomial; `None` when a `y` repeats.
    pub fn new(mut y: Vec<u32>, mut c: Vec<u32>) -> Option<Self> {
        y.sort_unstable();
        if y.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        c.sort_unstable();
        Some(Monomial { y, c })
    }

    pub fn y_part(&self) -> &[u32] {
        &self.y
    }

    pub fn c_part(&self) -> &[u32] {
        &self.c
    }

    pub fn degree(&self) -> u32 {
        self.y.iter().map(|i| 2 * i - 1).sum::<u32>() + self.c.iter().map(|i| 2 * i).sum::<u32>()
    }

    pub fn c_weight(&self) -> u32 {
        self.c.iter().sum()
    }

    /// Product with sign from reordering the odd factors; `None` if zero
    /// before truncation (a repeated `y`).
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let mut inversions = 0usize;
        for a in &self.y {
            for b in &other.y {
                match a.cmp(b) {
                    Ordering::Equal => return None,
                    Ordering::Greater => inversions += 1,
                    Ordering::Less => {}
                }
            }
        }
        let y = self.y.iter().chain(&other.y).copied().collect();
        let c = self.c.iter().chain(&other.c).copied().collect();
        Monomial::new(y, c).map(|m| (m, inversions % 2 == 1))
    }
}

fn multiplicity_cmp(a: &[u32], b: &[u32]) -> Ordering {
    let max = a.iter().chain(b).copied().max().unwrap_or(0);
    for i in 1..=max {
        let ca = a.iter().filter(|x| **x == i).count();
        let cb = b.iter().filter(|x| **x == i).count();
        if ca != cb {
            return ca.cmp(&cb);
        }
    }
    Ordering::Equal
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        multiplicity_cmp(&self.y, &other.y).then_with(|| multiplicity_cmp(&self.c, &other.c))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_empty() && self.c.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .y
            .iter()
            .map(|i| format!("y{i}"))
            .chain(self.c.iter().map(|i| format!("c{i}")))
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// One of the finite DGA models in codimension `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GFComplex {
    variant: Variant,
    n: u32,
    allowed_y: Vec<u32>,
}

impl GFComplex {
    /// The model of `variant` in codimension `n`, `1 <= n <= DEFAULT_MAX_N`.
    pub fn new(variant: Variant, n: u32) -> Result<Self, Error> {
        if n > DEFAULT_MAX_N {
            return Err(Error::Guard(format!(
                "codimension {n} exceeds the default cap {DEFAULT_MAX_N}; the basis grows exponentially"
            )));
        }
        Self::new_unbounded(variant, n)
    }

    /// As [`GFComplex::new`] without the size cap.
    pub fn new_unbounded(variant: Variant, n: u32) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidArgument("codimension n must be at least 1".into()));
        }
        let allowed_y = (1..=n).filter(|&i| variant.allows_y(i)).collect();
        Ok(GFComplex { variant, n, allowed_y })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn generators(&self) -> Vec<Generator> {
        self.allowed_y
            .iter()
            .map(|&index| Generator { kind: GeneratorKind::Y, index })
            .chain((1..=self.n).map(|index| Generator { kind: GeneratorKind::C, index }))
            .collect()
    }

    /// Degree of the product of all allowed `y`s plus `2n`; nothing lives above.
    pub fn top_degree(&self) -> u32 {
        self.allowed_y.iter().map(|i| 2 * i - 1).sum::<u32>() + 2 * self.n
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        m.y.iter().all(|i| self.allowed_y.contains(i))
            && m.c.iter().all(|&i| (1..=self.n).contains(&i))
            && m.c_weight() <= self.n
    }

    /// Monomials of one degree in canonical order.
    pub fn basis(&self, degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let k = self.allowed_y.len();
        for mask in 0u32..(1 << k) {
            let y: Vec<u32> = (0..k)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| self.allowed_y[b])
                .collect();
            let ydeg: u32 = y.iter().map(|i| 2 * i - 1).sum();
            if ydeg > degree || (degree - ydeg) % 2 == 1 {
                continue;
            }
            // c-part has degree 2·weight
            let weight = (degree - ydeg) / 2;
            if weight > self.n {
                continue;
            }
            for c in partitions(weight, self.n) {
                out.push(Monomial { y: y.clone(), c });
            }
        }
        out.sort();
        out
    }

    /// `d` of a basis monomial, truncation applied.
    pub fn differential_of(&self, m: &Monomial) -> Vec<(Monomial, Rational)> {
        let mut out = Vec::new();
        for (pos, &i) in m.y.iter().enumerate() {
            let mut y = m.y.clone();
            y.remove(pos);
            let mut c = m.c.clone();
            c.push(i);
            c.sort_unstable();
            let image = Monomial { y, c };
            if image.c_weight() > self.n {
                continue;
            }
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            out.push((image, rational::int(sign)));
        }
        out
    }

    /// Matrix of `d` from `degree` to `degree + 1` in the canonical bases.
    pub fn differential_matrix(&self, degree: u32) -> SparseMatrix {
        let src = self.basis(degree);
        let dst = self.basis(degree + 1);
        let index: BTreeMap<&Monomial, usize> = dst.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut mat = SparseMatrix::zeros(dst.len(), src.len());
        for (j, m) in src.iter().enumerate() {
            for (image, coeff) in self.differential_of(m) {
                mat.add_to(index[&image], j, coeff);
            }
        }
        mat
    }

    fn space(&self, degree: u32) -> CohomologySpace {
        let incoming = (degree > 0).then(|| self.differential_matrix(degree - 1));
        let outgoing = self.differential_matrix(degree);
        CohomologySpace::compute(incoming.as_ref(), Some(&outgoing), self.basis(degree).len())
    }

    /// Cohomology in degrees `0..=max_degree` with canonical representatives.
    pub fn cohomology(&self, max_degree: u32) -> Result<GradedCohomology, Error> {
        if max_degree > self.top_degree() {
            return Err(Error::InvalidArgument(format!(
                "max degree {max_degree} exceeds the top degree {} of {}{}",
                self.top_degree(),
                self.variant,
                self.n
            )));
        }
        let mut betti = Vec::new();
        let mut representatives = Vec::new();
        let mut spaces = Vec::new();
        for degree in 0..=max_degree {
            let space = self.space(degree);
            let reps: Vec<GFElement> = space
                .representatives()
                .iter()
                .map(|v| GFElement::from_vector(self, degree, v))
                .collect();
            debug_assert!(reps.iter().all(|r| r.differential().is_zero()));
            betti.push(space.betti());
            representatives.push(reps);
            spaces.push(space);
        }
        Ok(GradedCohomology {
            complex: self.clone(),
            betti,
            representatives,
            spaces,
        })
    }

    /// Parses expressions such as `"1/2*y1*c1 + c2"` or `"-y1*c1"`.
    pub fn parse_element(&self, text: &str) -> Result<GFElement, Error> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty class expression".into()));
        }
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for ch in cleaned.chars() {
            if (ch == '+' || ch == '-') && !current.is_empty() {
                pieces.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if ch == '+' || ch == '-' {
                if ch == '-' {
                    negative = !negative;
                }
            } else {
                current.push(ch);
            }
        }
        if current.is_empty() {
            return Err(Error::Parse(format!("dangling sign in {text:?}")));
        }
        pieces.push((negative, current));

        let mut result: Option<GFElement> = None;
        for (negative, piece) in pieces {
            let mut coeff = rational::int(if negative { -1 } else { 1 });
            let mut term = GFElement::one(self);
            for factor in piece.split('*') {
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in {text:?}")));
                }
                if factor.starts_with(|c: char| c.is_ascii_digit()) {
                    coeff *= rational::parse(factor)?;
                    continue;
                }
                let gen = parse_generator(factor)?;
                term = term.mul(&GFElement::generator(self, gen)?);
            }
            let term = term.scale(&coeff);
            result = Some(match result {
                None => term,
                Some(acc) => acc.add(&term)?,
            });
        }
        Ok(result.expect("at least one piece"))
    }
}

fn parse_generator(s: &str) -> Result<Generator, Error> {
    let bad = || Error::Parse(format!("unknown generator {s:?} (expected y<i> or c<i>)"));
    let (kind, rest) = match s.chars().next() {
        Some('y') => (GeneratorKind::Y, &s[1..]),
        Some('c') => (GeneratorKind::C, &s[1..]),
        _ => return Err(bad()),
    };
    let index: u32 = rest.parse().map_err(|_| bad())?;
    if index == 0 {
        return Err(bad());
    }
    Ok(Generator { kind, index })
}

/// Nonincreasing lists of parts in `1..=max_part` summing to `total`, each
/// returned in ascending order.
fn partitions(total: u32, max_part: u32) -> Vec<Vec<u32>> {
    fn go(total: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if total == 0 {
            let mut p = prefix.clone();
            p.sort_unstable();
            out.push(p);
            return;
        }
        for part in (1..=max_part.min(total)).rev() {
            prefix.push(part);
            go(total - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(total, max_part, &mut Vec::new(), &mut out);
    out
}

/// Homogeneous element of a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GFElement {
    complex: GFComplex,
    degree: u32,
    terms: BTreeMap<Monomial, Rational>,
}

impl GFElement {
    pub fn zero(complex: &GFComplex, degree: u32) -> Self {
        GFElement {
            complex: complex.clone(),
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(complex: &GFComplex) -> Self {
        Self::monomial(complex, Monomial::one(), Rational::one())
    }

    /// `c * m`, zero if `m` is truncated away; panics if `m` uses a generator
    /// the complex lacks.
    pub fn monomial(complex: &GFComplex, m: Monomial, c: Rational) -> Self {
        assert!(
            m.y.iter().all(|i| complex.allowed_y.contains(i)) && m.c.iter().all(|&i| i <= complex.n),
            "monomial {m} is not in {}{}",
            complex.variant,
            complex.n
        );
        let mut e = Self::zero(complex, m.degree());
        if m.c_weight() <= complex.n && !c.is_zero() {
            e.terms.insert(m, c);
        }
        e
    }

    pub fn generator(complex: &GFComplex, gen: Generator) -> Result<Self, Error> {
        let allowed = match gen.kind {
            GeneratorKind::Y => complex.allowed_y.contains(&gen.index),
            GeneratorKind::C => gen.index <= complex.n,
        };
        if !allowed {
            return Err(Error::InvalidArgument(format!(
                "generator {gen} is not part of {}{}",
                complex.variant, complex.n
            )));
        }
        let m = match gen.kind {
            GeneratorKind::Y => Monomial { y: vec![gen.index], c: vec![] },
            GeneratorKind::C => Monomial { y: vec![], c: vec![gen.index] },
        };
        Ok(Self::monomial(complex, m, Rational::one()))
    }

    pub fn from_vector(complex: &GFComplex, degree: u32, v: &[Rational]) -> Self {
        let basis = complex.basis(degree);
        assert_eq!(basis.len(), v.len(), "vector length does not match the basis");
        let terms = basis
            .into_iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, c.clone()))
            .collect();
        GFElement {
            complex: complex.clone(),
            degree,
            terms,
        }
    }

    pub fn to_vector(&self) -> Vec<Rational> {
        self.complex
            .basis(self.degree)
            .iter()
            .map(|m| self.terms.get(m).cloned().unwrap_or_else(Rational::zero))
            .collect()
    }

    pub fn complex(&self) -> &GFComplex {
        &self.complex
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn insert(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let sum = self.coefficient(&m) + c;
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.complex != other.complex {
            return Err(Error::IncompatibleComplexes("elements of different models".into()));
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.degree != other.degree {
            return Err(Error::InvalidArgument(format!(
                "cannot add elements of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(&self.complex, self.degree);
        for (m, x) in &self.terms {
            out.insert(m.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.complex, self.degree + other.degree);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((m, negative)) = a.mul(b) {
                    if m.c_weight() > self.complex.n {
                        continue;
                    }
                    let c = ca * cb;
                    out.insert(m, if negative { -c } else { c });
                }
            }
        }
        out
    }

    pub fn differential(&self) -> Self {
        let mut out = Self::zero(&self.complex, self.degree + 1);
        for (m, c) in &self.terms {
            for (image, s) in self.complex.differential_of(m) {
                out.insert(image, c * s);
            }
        }
        out
    }

    /// The same element read in a model containing this one.
    pub fn include_into(&self, target: &GFComplex) -> Result<Self, Error> {
        if self.complex.n != target.n || !self.complex.variant.is_subcomplex_of(target.variant) {
            return Err(Error::IncompatibleComplexes(format!(
                "{}{} is not a subcomplex of {}{}",
                self.complex.variant, self.complex.n, target.variant, target.n
            )));
        }
        Ok(GFElement {
            complex: target.clone(),
            degree: self.degree,
            terms: self.terms.clone(),
        })
    }

    /// Monomial keys such as `"y1*c1"` mapped to coefficient strings.
    pub fn to_json_terms(&self) -> Value {
        let map: serde_json::Map<String, Value> = self
            .terms
            .iter()
            .map(|(m, c)| (m.to_string(), Value::String(rational::format(c))))
            .collect();
        Value::Object(map)
    }
}

impl fmt::Display for GFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            let body = if abs.is_one() {
                m.to_string()
            } else if m.y.is_empty() && m.c.is_empty() {
                rational::format(&abs)
            } else {
                format!("{}*{}", rational::format(&abs), m)
            };
            match (i, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GradedCohomology {
    complex: GFComplex,
    pub betti: Vec<usize>,
    pub representatives: Vec<Vec<GFElement>>,
    spaces: Vec<CohomologySpace>,
}

impl GradedCohomology {
    pub fn complex(&self) -> &GFComplex {
        &self.complex
    }

    /// Coordinates of the class of a closed element in the representative
    /// basis of its degree.
    pub fn class_of(&self, z: &GFElement) -> Result<Vec<Rational>, Error> {
        if z.complex != self.complex {
            return Err(Error::IncompatibleComplexes("element from another model".into()));
        }
        if !z.differential().is_zero() {
            return Err(Error::NotClosed);
        }
        let space = self.spaces.get(z.degree as usize).ok_or_else(|| {
            Error::InvalidArgument(format!("degree {} was not computed", z.degree))
        })?;
        space.coordinates(&z.to_vector()).ok_or(Error::NotClosed)
    }

    pub fn to_json(&self) -> Value {
        let reps: Vec<Value> = self
            .representatives
            .iter()
            .enumerate()
            .flat_map(|(degree, reps)| {
                reps.iter()
                    .map(move |r| json!({ "degree": degree, "terms": r.to_json_terms() }))
            })
            .collect();
        json!({
            "variant": self.complex.variant.to_string(),
            "n": self.complex.n,
            "betti": self.betti,
            "representatives": reps,
        })
    }
}

/// Result of [`induced_map`].
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub source: GFComplex,
    pub target: GFComplex,
    pub degree: u32,
    /// `matrix[i][j]`: coordinate `i` in the target of source class `j`.
    pub matrix: Vec<Vec<Rational>>,
    /// Basis of the kernel, in source class coordinates.
    pub kernel: Vec<Vec<Rational>>,
    pub source_representatives: Vec<GFElement>,
    pub target_representatives: Vec<GFElement>,
}

impl InducedMap {
    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|x| x.is_zero())
    }

    pub fn is_isomorphism(&self) -> bool {
        let n = self.source_representatives.len();
        if n != self.target_representatives.len() {
            return false;
        }
        n == 0 || SparseMatrix::from_dense(&self.matrix).rank() == n
    }

    /// Kernel vectors written as cocycles of the source model.
    pub fn kernel_elements(&self) -> Vec<GFElement> {
        self.kernel
            .iter()
            .map(|v| {
                let mut acc = GFElement::zero(&self.source, self.degree);
                for (c, rep) in v.iter().zip(&self.source_representatives) {
                    acc = acc.add(&rep.scale(c)).expect("same model");
                }
                acc
            })
            .collect()
    }
}

/// Map on cohomology induced by the inclusion `source ⊂ target` in one degree.
pub fn induced_map(source: &GFComplex, target: &GFComplex, degree: u32) -> Result<InducedMap, Error> {
    if source.n != target.n || !source.variant.is_subcomplex_of(target.variant) {
        return Err(Error::IncompatibleComplexes(format!(
            "{}{} is not a subcomplex of {}{}",
            source.variant, source.n, target.variant, target.n
        )));
    }
    let src_space = source.space(degree);
    let dst_space = target.space(degree);
    let src_reps: Vec<GFElement> = src_space
        .representatives()
        .iter()
        .map(|v| GFElement::from_vector(source, degree, v))
        .collect();
    let dst_reps: Vec<GFElement> = dst_space
        .representatives()
        .iter()
        .map(|v| GFElement::from_vector(target, degree, v))
        .collect();
    let mut columns = Vec::new();
    for rep in &src_reps {
        let image = rep.include_into(target)?;
        let coords = dst_space
            .coordinates(&image.to_vector())
            .expect("image of a cocycle is a cocycle");
        columns.push(coords);
    }
    let rows = dst_reps.len();
    let matrix: Vec<Vec<Rational>> = (0..rows)
        .map(|i| columns.iter().map(|col| col[i].clone()).collect())
        .collect();
    let kernel = if src_reps.is_empty() {
        Vec::new()
    } else if rows == 0 {
        (0..src_reps.len())
            .map(|j| (0..src_reps.len()).map(|k| rational::int((j == k) as i64)).collect())
            .collect()
    } else {
        SparseMatrix::from_dense(&matrix).rank_kernel_image().kernel
    };
    Ok(InducedMap {
        source: source.clone(),
        target: target.clone(),
        degree,
        matrix,
        kernel,
        source_representatives: src_reps,
        target_representatives: dst_reps,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Triviality {
    /// The class vanishes; `d(primitive)` equals the cocycle.
    Trivial { primitive: GFElement },
    /// Nonzero coordinates of the class in the canonical representative basis.
    Nontrivial { coordinates: Vec<Rational> },
}

impl Triviality {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Triviality::Trivial { .. })
    }
}

/// Decides whether a cocycle is exact, returning a primitive or the class.
pub fn is_trivial_class(cocycle: &GFElement) -> Result<Triviality, Error> {
    if !cocycle.differential().is_zero() {
        return Err(Error::NotClosed);
    }
    let complex = &cocycle.complex;
    let degree = cocycle.degree;
    if cocycle.is_zero() {
        return Ok(Triviality::Trivial {
            primitive: GFElement::zero(complex, degree.saturating_sub(1)),
        });
    }
    if degree > 0 {
        let d = complex.differential_matrix(degree - 1);
        if let Some(x) = d.solve(&cocycle.to_vector()) {
            let primitive = GFElement::from_vector(complex, degree - 1, &x);
            return Ok(Triviality::Trivial { primitive });
        }
    }
    let coordinates = complex
        .space(degree)
        .coordinates(&cocycle.to_vector())
        .ok_or(Error::NotClosed)?;
    Ok(Triviality::Nontrivial { coordinates })
}
