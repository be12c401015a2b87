//! Jets of formal maps and the forms built from them.
//!
//! In one dimension the coordinates are `x0, …, xK` where `xk` is the `k`-th
//! derivative at `0` of a formal map `u ↦ f(u)`. The tautological form is
//! `θ(u) = f′(u)⁻¹ δf(u) = Σ θk u^k/k!`, and Gelfand–Fuchs cocycles built from
//! `y1` and the `ci` are realized through `θ⁽¹⁾` and its curvature
//! `R = dθ⁽¹⁾ − θ⁽¹⁾∧θ⁽¹⁾`.
//!
//! ```
//! use leafspace::gf::{GFComplex, Variant};
//! use leafspace::jets::{realize_class, JetCoordinates};
//!
//! let coords = JetCoordinates::one_dimensional(3);
//! let wo1 = GFComplex::new(Variant::WO, 1).unwrap();
//! let gv = realize_class(&wo1.parse_element("y1*c1").unwrap(), &coords).unwrap();
//! assert_eq!(gv.to_string(), "-1/x1^3 * dx0^dx1^dx2");
//! ```
//!
//! For `n >= 2` only zeroth, first and second order coordinates exist:
//! `x{a}`, `x{a}_{b}` and `x{a}_{bc}` with `b <= c`, all indices 1-based.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::form::{ExteriorForm, Substitution};
use crate::gf::{GFElement, Monomial};
use crate::ratfunc::RationalFunction;
use crate::rational::{self, Rational};

/// Jet order needed by `θ⁽¹⁾` and its curvature.
pub const MIN_ORDER: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetCoordinates {
    n: usize,
    order: usize,
    names: Arc<Vec<String>>,
}

impl JetCoordinates {
    /// Jets of order `order` of maps `ℝⁿ → ℝⁿ`; for `n >= 2` symbols stop at
    /// second order.
    pub fn new(n: usize, order: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension n must be at least 1".into()));
        }
        if order == 0 {
            return Err(Error::InvalidArgument("jet order must be at least 1".into()));
        }
        if n == 1 {
            return Ok(Self::one_dimensional(order));
        }
        let mut names = Vec::new();
        for a in 1..=n {
            names.push(format!("x{a}"));
        }
        for a in 1..=n {
            for b in 1..=n {
                names.push(format!("x{a}_{b}"));
            }
        }
        if order >= 2 {
            for a in 1..=n {
                for b in 1..=n {
                    for c in b..=n {
                        names.push(format!("x{a}_{b}{c}"));
                    }
                }
            }
        }
        Ok(JetCoordinates {
            n,
            order,
            names: Arc::new(names),
        })
    }

    /// `x0, …, xK`.
    pub fn one_dimensional(order: usize) -> Self {
        JetCoordinates {
            n: 1,
            order,
            names: Arc::new((0..=order).map(|k| format!("x{k}")).collect()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn names(&self) -> &Arc<Vec<String>> {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    fn require_order(&self, needed: usize) -> Result<(), Error> {
        if self.order < needed {
            return Err(Error::TruncationTooSmall {
                needed,
                got: self.order,
            });
        }
        Ok(())
    }

    fn require_one_dimensional(&self, what: &str) -> Result<(), Error> {
        if self.n != 1 {
            return Err(Error::InvalidArgument(format!("{what} is implemented for n = 1 only")));
        }
        Ok(())
    }

    fn d(&self, name: &str) -> ExteriorForm {
        let i = self.index(name).unwrap_or_else(|| panic!("unknown jet coordinate {name}"));
        ExteriorForm::differential(&self.names, i)
    }

    fn function(&self, f: RationalFunction) -> ExteriorForm {
        ExteriorForm::function(&self.names, f)
    }

    fn zero(&self, degree: usize) -> ExteriorForm {
        ExteriorForm::zero(&self.names, degree)
    }

    fn second_name(a: usize, b: usize, c: usize) -> String {
        let (lo, hi) = if b <= c { (b, c) } else { (c, b) };
        format!("x{a}_{lo}{hi}")
    }
}

fn x(k: usize) -> RationalFunction {
    RationalFunction::var(&format!("x{k}"))
}

fn factorial(k: usize) -> Rational {
    (1..=k as i64).fold(Rational::one(), |acc, i| acc * rational::int(i))
}

fn binomial(n: usize, k: usize) -> Rational {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn add_forms(a: &ExteriorForm, b: &ExteriorForm) -> ExteriorForm {
    a.add(b).expect("forms on the same coordinates")
}

fn wedge(a: &ExteriorForm, b: &ExteriorForm) -> ExteriorForm {
    a.wedge(b).expect("forms on the same coordinates")
}

/// `Σ θk u^k/k!` in one dimension, or the zeroth and first order parts in
/// higher dimension.
#[derive(Clone, Debug)]
pub struct TautologicalForm {
    coords: JetCoordinates,
    components: Vec<ExteriorForm>,
    zeroth: Vec<ExteriorForm>,
    first_order: Vec<Vec<ExteriorForm>>,
}

impl TautologicalForm {
    pub fn coords(&self) -> &JetCoordinates {
        &self.coords
    }

    /// `θ0, …, θ_{K−1}` (one dimension only; empty otherwise).
    pub fn components(&self) -> &[ExteriorForm] {
        &self.components
    }

    /// The vector `θ0 = Df(0)⁻¹ dx0`.
    pub fn zeroth(&self) -> &[ExteriorForm] {
        &self.zeroth
    }

    /// The matrix `θ⁽¹⁾`, entry `[a][b]` being the `∂a` component of `θ⁽¹⁾ e_b`.
    pub fn first_order(&self) -> &[Vec<ExteriorForm>] {
        &self.first_order
    }

    /// `tr θ⁽¹⁾`.
    pub fn trace(&self) -> ExteriorForm {
        (0..self.coords.n).fold(self.coords.zero(1), |acc, a| add_forms(&acc, &self.first_order[a][a]))
    }

    /// `R = dθ⁽¹⁾ − θ⁽¹⁾∧θ⁽¹⁾` with the product taken as composition of
    /// linear vector fields, which reverses the matrix order: entrywise
    /// `R = dM + M∧M` for the matrix `M` of [`TautologicalForm::first_order`].
    pub fn curvature(&self) -> Vec<Vec<ExteriorForm>> {
        let n = self.coords.n;
        let m = &self.first_order;
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut r = m[a][b].exterior_derivative();
                        for c in 0..n {
                            r = add_forms(&r, &wedge(&m[a][c], &m[c][b]));
                        }
                        r
                    })
                    .collect()
            })
            .collect()
    }
}

/// The tautological form by truncated power-series division.
pub fn tautological_form(coords: &JetCoordinates) -> Result<TautologicalForm, Error> {
    coords.require_order(MIN_ORDER)?;
    if coords.n == 1 {
        return Ok(tautological_one_dimensional(coords));
    }
    Ok(tautological_higher(coords))
}

fn tautological_one_dimensional(coords: &JetCoordinates) -> TautologicalForm {
    let big_k = coords.order;
    // f′(u) = Σ a_j u^j with a_j = x_{j+1}/j!; δf(u) = Σ b_k u^k with b_k = dx_k/k!
    let a: Vec<RationalFunction> = (0..big_k).map(|j| x(j + 1).scale(&factorial(j).recip())).collect();
    let a0_inv = a[0].recip().expect("x1 is a nonzero symbol");
    let mut q: Vec<ExteriorForm> = Vec::with_capacity(big_k);
    for k in 0..big_k {
        let mut num = coords.d(&format!("x{k}")).scale(&factorial(k).recip());
        for j in 1..=k {
            num = num.sub(&q[k - j].mul_function(&a[j])).expect("same coordinates");
        }
        q.push(num.mul_function(&a0_inv));
    }
    let components: Vec<ExteriorForm> = q
        .iter()
        .enumerate()
        .map(|(k, qk)| qk.scale(&factorial(k)))
        .collect();
    TautologicalForm {
        coords: coords.clone(),
        zeroth: vec![components[0].clone()],
        first_order: vec![vec![components[1].clone()]],
        components,
    }
}

fn tautological_higher(coords: &JetCoordinates) -> TautologicalForm {
    let n = coords.n;
    let x1: Vec<Vec<RationalFunction>> = (1..=n)
        .map(|a| (1..=n).map(|b| RationalFunction::var(&format!("x{a}_{b}"))).collect())
        .collect();
    let inv = inverse(&x1);
    // φ = X1⁻¹ dx
    let phi: Vec<ExteriorForm> = (0..n)
        .map(|e| {
            (0..n).fold(coords.zero(1), |acc, g| {
                add_forms(&acc, &coords.d(&format!("x{}", g + 1)).mul_function(&inv[e][g]))
            })
        })
        .collect();
    // θ⁽¹⁾ e_b = X1⁻¹ (dX1 e_b − X2(e_b) φ)
    let mut first_order = vec![vec![coords.zero(1); n]; n];
    for b in 0..n {
        let inner: Vec<ExteriorForm> = (0..n)
            .map(|c| {
                let mut v = coords.d(&format!("x{}_{}", c + 1, b + 1));
                for (e, phi_e) in phi.iter().enumerate() {
                    let coeff = RationalFunction::var(&JetCoordinates::second_name(c + 1, b + 1, e + 1));
                    v = v.sub(&phi_e.mul_function(&coeff)).expect("same coordinates");
                }
                v
            })
            .collect();
        for a in 0..n {
            first_order[a][b] = (0..n).fold(coords.zero(1), |acc, c| {
                add_forms(&acc, &inner[c].mul_function(&inv[a][c]))
            });
        }
    }
    TautologicalForm {
        coords: coords.clone(),
        components: Vec::new(),
        zeroth: phi,
        first_order,
    }
}

/// All permutations of `0..m` with their signs.
fn permutations(m: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, negative: bool, out: &mut Vec<(Vec<usize>, bool)>) {
        if rest.is_empty() {
            out.push((prefix.clone(), negative));
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            go(prefix, rest, negative ^ (i % 2 == 1), out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..m).collect(), false, &mut out);
    out
}

fn determinant(m: &[Vec<RationalFunction>]) -> RationalFunction {
    let mut det = RationalFunction::zero();
    for (perm, negative) in permutations(m.len()) {
        let mut term = RationalFunction::one();
        for (row, &col) in perm.iter().enumerate() {
            term = term.mul(&m[row][col]);
        }
        det = if negative { det.sub(&term) } else { det.add(&term) };
    }
    det
}

fn inverse(m: &[Vec<RationalFunction>]) -> Vec<Vec<RationalFunction>> {
    let n = m.len();
    let det_inv = determinant(m).recip().expect("generic matrix is invertible");
    let minor = |skip_r: usize, skip_c: usize| -> Vec<Vec<RationalFunction>> {
        (0..n)
            .filter(|&r| r != skip_r)
            .map(|r| (0..n).filter(|&c| c != skip_c).map(|c| m[r][c].clone()).collect())
            .collect()
    };
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let cof = determinant(&minor(j, i)).mul(&det_inv);
                    if (i + j) % 2 == 1 { cof.neg() } else { cof }
                })
                .collect()
        })
        .collect()
}

/// The `i`-th elementary invariant of a matrix of even forms: the sum of its
/// principal `i × i` minors.
fn elementary_invariant(r: &[Vec<ExteriorForm>], i: usize, coords: &JetCoordinates) -> ExteriorForm {
    let n = r.len();
    let mut total = coords.zero(2 * i);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != i {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|b| mask & (1 << b) != 0).collect();
        for (perm, negative) in permutations(i) {
            let mut term = coords.function(RationalFunction::one());
            for (row, &col) in perm.iter().enumerate() {
                term = wedge(&term, &r[idx[row]][idx[col]]);
                if term.is_zero() {
                    break;
                }
            }
            total = if negative {
                total.sub(&term).expect("same coordinates")
            } else {
                add_forms(&total, &term)
            };
        }
    }
    total
}

/// The differential form attached to a cocycle built from `y1` and the `ci`.
///
/// `y1 ↦ tr θ⁽¹⁾`, `ci ↦` the `i`-th elementary invariant of the curvature,
/// products to wedges in the order `y` before `c`.
pub fn realize_class(element: &GFElement, coords: &JetCoordinates) -> Result<ExteriorForm, Error> {
    let complex = element.complex();
    if complex.n() as usize != coords.n {
        return Err(Error::IncompatibleComplexes(format!(
            "cocycle lives in codimension {} but the jets have dimension {}",
            complex.n(),
            coords.n
        )));
    }
    for (m, _) in element.terms() {
        if let Some(&i) = m.y_part().iter().find(|&&i| i >= 2) {
            return Err(Error::UnsupportedGenerator(format!("y{i}")));
        }
    }
    coords.require_order(MIN_ORDER)?;
    let taut = tautological_form(coords)?;
    let y1 = taut.trace();
    let curvature = taut.curvature();
    let mut chern: Vec<Option<ExteriorForm>> = vec![None; coords.n + 1];
    let mut total = coords.zero(element.degree() as usize);
    for (m, c) in element.terms() {
        let piece = realize_monomial(m, &y1, &curvature, &mut chern, coords);
        total = add_forms(&total, &piece.scale(c));
    }
    Ok(total)
}

fn realize_monomial(
    m: &Monomial,
    y1: &ExteriorForm,
    curvature: &[Vec<ExteriorForm>],
    chern: &mut [Option<ExteriorForm>],
    coords: &JetCoordinates,
) -> ExteriorForm {
    let mut form = coords.function(RationalFunction::one());
    if !m.y_part().is_empty() {
        form = wedge(&form, y1);
    }
    for &i in m.c_part() {
        let ci = chern[i as usize]
            .get_or_insert_with(|| elementary_invariant(curvature, i as usize, coords))
            .clone();
        form = wedge(&form, &ci);
        if form.is_zero() {
            break;
        }
    }
    form
}

/// `1/x1³ dx0∧dx1∧dx2`, the Godbillon–Vey form as usually printed.
pub fn godbillon_vey_reference(coords: &JetCoordinates) -> Result<ExteriorForm, Error> {
    coords.require_one_dimensional("the Godbillon–Vey reference form")?;
    coords.require_order(MIN_ORDER)?;
    let c = RationalFunction::one().div(&x(1).pow(3))?;
    Ok(ExteriorForm::monomial(coords.names(), c, &[0, 1, 2]))
}

/// Formal series `h(u) = Σ h_m u^m` (ordinary coefficients, possibly
/// symbolic) acting on jets by postcomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalDiffeo {
    coeffs: Vec<RationalFunction>,
}

impl FormalDiffeo {
    /// Rejects a vanishing linear coefficient.
    pub fn new(coeffs: Vec<RationalFunction>) -> Result<Self, Error> {
        if coeffs.get(1).map_or(true, |c| c.is_zero()) {
            return Err(Error::NonRegular("the linear coefficient of h vanishes".into()));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > 2 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(FormalDiffeo { coeffs })
    }

    pub fn identity() -> Self {
        FormalDiffeo {
            coeffs: vec![RationalFunction::zero(), RationalFunction::one()],
        }
    }

    /// `u + a u²`.
    pub fn quadratic(a: RationalFunction) -> Self {
        FormalDiffeo {
            coeffs: vec![RationalFunction::zero(), RationalFunction::one(), a],
        }
    }

    /// `p0 + p1 u + … + p_d u^d` with symbols named `{prefix}{m}`.
    pub fn generic(degree: usize, prefix: &str) -> Self {
        assert!(degree >= 1, "a diffeomorphism needs a linear term");
        FormalDiffeo {
            coeffs: (0..=degree)
                .map(|m| RationalFunction::var(&format!("{prefix}{m}")))
                .collect(),
        }
    }

    pub fn coefficients(&self) -> &[RationalFunction] {
        &self.coeffs
    }

    /// `h^{(j)}(t)`.
    pub fn derivative_at(&self, j: usize, t: &RationalFunction) -> RationalFunction {
        let mut acc = RationalFunction::zero();
        for (m, c) in self.coeffs.iter().enumerate().skip(j) {
            let falling = factorial(m) / factorial(m - j);
            acc = acc.add(&c.mul(&t.pow((m - j) as u32)).scale(&falling));
        }
        acc
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &FormalDiffeo) -> Result<FormalDiffeo, Error> {
        let mut result: Vec<RationalFunction> = vec![RationalFunction::zero()];
        let mut power: Vec<RationalFunction> = vec![RationalFunction::one()];
        for c in &self.coeffs {
            for (i, p) in power.iter().enumerate() {
                if result.len() <= i {
                    result.push(RationalFunction::zero());
                }
                result[i] = result[i].add(&c.mul(p));
            }
            power = poly_mul(&power, &inner.coeffs);
        }
        FormalDiffeo::new(result)
    }
}

fn poly_mul(a: &[RationalFunction], b: &[RationalFunction]) -> Vec<RationalFunction> {
    let mut out = vec![RationalFunction::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Partial Bell polynomials `B[k][j](x1, x2, …)` for `k <= order`.
fn bell_table(order: usize) -> Vec<Vec<RationalFunction>> {
    let mut b = vec![vec![RationalFunction::zero(); order + 1]; order + 1];
    b[0][0] = RationalFunction::one();
    for k in 1..=order {
        for j in 1..=k {
            let mut acc = RationalFunction::zero();
            for i in 1..=k - j + 1 {
                let prev = &b[k - i][j - 1];
                if prev.is_zero() {
                    continue;
                }
                acc = acc.add(&x(i).mul(prev).scale(&binomial(k - 1, i - 1)));
            }
            b[k][j] = acc;
        }
    }
    b
}

/// The substitution `xk ↦ (h∘f)^{(k)}(0)` (Faà di Bruno).
///
/// Pulling a form back along it applies the prolongation of `h`; for
/// composites `prolong(h2∘h1) = prolong(h2).then(prolong(h1))`.
pub fn prolong(h: &FormalDiffeo, coords: &JetCoordinates) -> Result<Substitution, Error> {
    coords.require_one_dimensional("prolongation")?;
    let order = coords.order;
    let bell = bell_table(order);
    let x0 = x(0);
    let derivs: Vec<RationalFunction> = (0..=order).map(|j| h.derivative_at(j, &x0)).collect();
    let mut subst = Substitution::identity(coords.names()).with("x0", derivs[0].clone());
    for k in 1..=order {
        let mut img = RationalFunction::zero();
        for j in 1..=k {
            img = img.add(&derivs[j].mul(&bell[k][j]));
        }
        subst = subst.with(&format!("x{k}"), img);
    }
    Ok(subst)
}

/// Precomposition with `u ↦ λu`: `xk ↦ λ^k xk`.
pub fn scaling_action(coords: &JetCoordinates, lambda: &RationalFunction) -> Result<Substitution, Error> {
    coords.require_one_dimensional("the scaling action")?;
    let mut subst = Substitution::identity(coords.names());
    for k in 1..=coords.order {
        subst = subst.with(&format!("x{k}"), x(k).mul(&lambda.pow(k as u32)));
    }
    Ok(subst)
}

/// Precomposition with `u ↦ −u`: `xk ↦ (−1)^k xk`.
pub fn reflection_action(coords: &JetCoordinates) -> Result<Substitution, Error> {
    scaling_action(coords, &RationalFunction::int(-1))
}

/// Elements of `W1` truncated at order `K`, stored by polynomial coefficient:
/// `v = Σ p_m u^m ∂u` with `m <= K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedVectorField {
    order: usize,
    coeffs: Vec<Rational>,
}

impl TruncatedVectorField {
    pub fn zero(order: usize) -> Self {
        TruncatedVectorField {
            order,
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    /// `e_k = u^k/k! ∂u`.
    pub fn basis(k: usize, order: usize) -> Self {
        let mut v = Self::zero(order);
        if k <= order {
            v.coeffs[k] = factorial(k).recip();
        }
        v
    }

    /// Polynomial coefficient of `u^m ∂u`.
    pub fn coefficient(&self, m: usize) -> Rational {
        self.coeffs.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coordinates in the basis `e_0, …, e_K`.
    pub fn in_basis(&self) -> Vec<Rational> {
        self.coeffs.iter().enumerate().map(|(m, c)| c * factorial(m)).collect()
    }

    /// `[p∂, q∂] = (p q′ − q p′)∂`, truncated above order `K`.
    pub fn bracket(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.order);
        for (i, p) in self.coeffs.iter().enumerate() {
            for (j, q) in other.coeffs.iter().enumerate() {
                if p.is_zero() || q.is_zero() || i + j == 0 {
                    continue;
                }
                let m = i + j - 1;
                if m > self.order {
                    continue;
                }
                out.coeffs[m] += p * q * (rational::int(j as i64) - rational::int(i as i64));
            }
        }
        out
    }
}

/// `Σ_{i<j} C^k_{ij} θi∧θj` with `[e_i, e_j] = Σ C^k_{ij} e_k`.
pub fn maurer_cartan_expansion(taut: &TautologicalForm, k: usize) -> Result<ExteriorForm, Error> {
    let thetas = taut.components();
    if thetas.is_empty() {
        return Err(Error::InvalidArgument("Maurer–Cartan expansion needs one-dimensional jets".into()));
    }
    if k + 1 >= thetas.len() {
        return Err(Error::TruncationTooSmall {
            needed: k + 2,
            got: taut.coords.order,
        });
    }
    let order = taut.coords.order;
    let mut total = taut.coords.zero(2);
    for j in 0..=k + 1 {
        for i in 0..j {
            let c = TruncatedVectorField::basis(i, order)
                .bracket(&TruncatedVectorField::basis(j, order))
                .in_basis()[k]
                .clone();
            if !c.is_zero() {
                total = add_forms(&total, &wedge(&thetas[i], &thetas[j]).scale(&c));
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientKind {
    /// `S′ = S/GL(1)`.
    General,
    /// `S″ = S/O(1)`.
    Orthogonal,
}

/// Invariant functions on a quotient of the one-dimensional jet space.
#[derive(Clone, Debug)]
pub struct QuotientCoordinates {
    kind: QuotientKind,
    coords: JetCoordinates,
    invariants: Vec<(String, RationalFunction)>,
}

impl QuotientCoordinates {
    /// `y0 = x0`, `yk = xk/x1^k` for `k >= 2`; the orthogonal quotient adds
    /// `y1 = x1²`.
    pub fn new(coords: &JetCoordinates, kind: QuotientKind) -> Result<Self, Error> {
        coords.require_one_dimensional("quotient coordinates")?;
        coords.require_order(MIN_ORDER)?;
        let mut invariants = vec![("y0".to_string(), x(0))];
        if kind == QuotientKind::Orthogonal {
            invariants.push(("y1".to_string(), x(1).pow(2)));
        }
        for k in 2..=coords.order {
            invariants.push((format!("y{k}"), x(k).div(&x(1).pow(k as u32))?));
        }
        Ok(QuotientCoordinates {
            kind,
            coords: coords.clone(),
            invariants,
        })
    }

    pub fn kind(&self) -> QuotientKind {
        self.kind
    }

    pub fn invariants(&self) -> &[(String, RationalFunction)] {
        &self.invariants
    }

    pub fn get(&self, name: &str) -> Option<&RationalFunction> {
        self.invariants.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    /// `d` of an invariant function as a 1-form in jet coordinates.
    pub fn differential(&self, name: &str) -> Result<ExteriorForm, Error> {
        let f = self
            .get(name)
            .ok_or_else(|| Error::InvalidArgument(format!("no invariant coordinate {name}")))?;
        Ok(self.coords.function(f.clone()).exterior_derivative())
    }

    /// Whether every invariant is fixed by the group it quotients: symbolic
    /// scaling for `S′`, the reflection for `S″`.
    pub fn verify(&self) -> Result<bool, Error> {
        let action = match self.kind {
            QuotientKind::General => scaling_action(&self.coords, &RationalFunction::var("lambda"))?,
            QuotientKind::Orthogonal => reflection_action(&self.coords)?,
        };
        for (_, f) in &self.invariants {
            if f.substitute(action.images())? != *f {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `dy2∧dy0` on `S′`, expanded in jet coordinates.
pub fn chern_form_quotient(coords: &JetCoordinates) -> Result<ExteriorForm, Error> {
    let q = QuotientCoordinates::new(coords, QuotientKind::General)?;
    q.differential("y2")?.wedge(&q.differential("y0")?)
}

/// A named substitution acting on jets.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub name: String,
    pub action: Substitution,
}

impl FamilyMember {
    pub fn prolongation(name: &str, h: &FormalDiffeo, coords: &JetCoordinates) -> Result<Self, Error> {
        Ok(FamilyMember {
            name: name.to_string(),
            action: prolong(h, coords)?,
        })
    }
}

/// Identity, `u + a u²`, the generic cubic, symbolic scaling and reflection.
pub fn standard_family(coords: &JetCoordinates) -> Result<Vec<FamilyMember>, Error> {
    Ok(vec![
        FamilyMember::prolongation("identity", &FormalDiffeo::identity(), coords)?,
        FamilyMember::prolongation("quadratic u + a*u^2", &FormalDiffeo::quadratic(RationalFunction::var("a")), coords)?,
        FamilyMember::prolongation("cubic b0 + b1*u + b2*u^2 + b3*u^3", &FormalDiffeo::generic(3, "b"), coords)?,
        FamilyMember {
            name: "scaling u -> lambda*u".into(),
            action: scaling_action(coords, &RationalFunction::var("lambda"))?,
        },
        FamilyMember {
            name: "reflection u -> -u".into(),
            action: reflection_action(coords)?,
        },
    ])
}

#[derive(Clone, Debug)]
pub struct MemberOutcome {
    pub name: String,
    pub residual: ExteriorForm,
}

impl MemberOutcome {
    pub fn invariant(&self) -> bool {
        self.residual.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub outcomes: Vec<MemberOutcome>,
}

impl InvarianceReport {
    pub fn invariant(&self) -> bool {
        self.outcomes.iter().all(MemberOutcome::invariant)
    }

    pub fn first_failure(&self) -> Option<&MemberOutcome> {
        self.outcomes.iter().find(|o| !o.invariant())
    }
}

/// `pullback(form, g) − form` for each member `g`.
pub fn check_invariance(form: &ExteriorForm, family: &[FamilyMember]) -> Result<InvarianceReport, Error> {
    let outcomes = family
        .iter()
        .map(|member| {
            Ok(MemberOutcome {
                name: member.name.clone(),
                residual: form.pullback(&member.action)?.sub(form)?,
            })
        })
        .collect::<Result<_, Error>>()?;
    Ok(InvarianceReport { outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{GFComplex, Variant};
    use crate::rational::int;

    fn rf(text_num: i64) -> RationalFunction {
        RationalFunction::int(text_num)
    }

    fn element(v: Variant, n: u32, s: &str) -> GFElement {
        GFComplex::new(v, n).unwrap().parse_element(s).unwrap()
    }

    #[test]
    fn coordinate_names() {
        assert_eq!(JetCoordinates::new(1, 3).unwrap().names().as_slice(), ["x0", "x1", "x2", "x3"]);
        let c = JetCoordinates::new(2, 2).unwrap();
        assert_eq!(c.names().len(), 2 + 4 + 6);
        assert!(c.index("x2_12").is_some());
        assert!(c.index("x2_21").is_none());
        assert_eq!(JetCoordinates::new(2, 1).unwrap().names().len(), 6);
        assert!(JetCoordinates::new(0, 2).is_err());
    }

    #[test]
    fn tautological_components() {
        let coords = JetCoordinates::one_dimensional(3);
        let t = tautological_form(&coords).unwrap();
        assert_eq!(t.components().len(), 3);
        assert_eq!(t.components()[0].to_string(), "1/x1 * dx0");
        assert_eq!(t.components()[1].to_string(), "-x2/x1^2 * dx0 + 1/x1 * dx1");
        let d0 = t.components()[0].exterior_derivative();
        assert_eq!(d0, t.components()[0].wedge(&t.components()[1]).unwrap());
        assert!(matches!(
            tautological_form(&JetCoordinates::one_dimensional(1)),
            Err(Error::TruncationTooSmall { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn realize_examples() {
        let coords = JetCoordinates::one_dimensional(3);
        let c1 = realize_class(&element(Variant::WO, 1, "c1"), &coords).unwrap();
        assert_eq!(c1.to_string(), "-2*x2/x1^3 * dx0^dx1 + 1/x1^2 * dx0^dx2");
        let gv = realize_class(&element(Variant::WO, 1, "y1*c1"), &coords).unwrap();
        assert_eq!(gv.to_string(), "-1/x1^3 * dx0^dx1^dx2");
        assert_eq!(gv.ratio_to(&godbillon_vey_reference(&coords).unwrap()), Some(int(-1)));
        let y1 = realize_class(&element(Variant::WO, 1, "y1"), &coords).unwrap();
        assert_eq!(y1.exterior_derivative(), c1);
        let one = realize_class(&element(Variant::W, 1, "3"), &coords).unwrap();
        assert_eq!(one.to_string(), "3");
    }

    #[test]
    fn realize_rejects_inadmissible_input() {
        let coords = JetCoordinates::new(2, 2).unwrap();
        assert!(matches!(
            realize_class(&element(Variant::W, 2, "y2"), &coords),
            Err(Error::UnsupportedGenerator(_))
        ));
        assert!(matches!(
            realize_class(&element(Variant::W, 1, "c1"), &coords),
            Err(Error::IncompatibleComplexes(_))
        ));
        assert!(matches!(
            realize_class(&element(Variant::W, 1, "c1"), &JetCoordinates::one_dimensional(1)),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn chern_quotient_matches_curvature() {
        let coords = JetCoordinates::one_dimensional(2);
        let chern = chern_form_quotient(&coords).unwrap();
        let c1 = realize_class(&element(Variant::WGL, 1, "c1"), &coords).unwrap();
        assert_eq!(chern, c1.neg());
        assert!(chern.exterior_derivative().is_zero());
        let scaled = chern.pullback(&scaling_action(&coords, &RationalFunction::var("lambda")).unwrap()).unwrap();
        assert_eq!(scaled, chern);
        for kind in [QuotientKind::General, QuotientKind::Orthogonal] {
            assert!(QuotientCoordinates::new(&JetCoordinates::one_dimensional(4), kind).unwrap().verify().unwrap());
        }
    }

    #[test]
    fn prolongation_examples() {
        let coords = JetCoordinates::one_dimensional(2);
        let id = prolong(&FormalDiffeo::identity(), &coords).unwrap();
        for name in coords.names().iter() {
            assert_eq!(id.image_of(name).unwrap(), RationalFunction::var(name));
        }
        let a = RationalFunction::var("a");
        let q = prolong(&FormalDiffeo::quadratic(a.clone()), &coords).unwrap();
        let lin = rf(1).add(&a.mul(&x(0)).scale(&int(2)));
        assert_eq!(q.image_of("x0").unwrap(), x(0).add(&a.mul(&x(0).pow(2))));
        assert_eq!(q.image_of("x1").unwrap(), lin.mul(&x(1)));
        assert_eq!(
            q.image_of("x2").unwrap(),
            a.mul(&x(1).pow(2)).scale(&int(2)).add(&lin.mul(&x(2)))
        );
        assert!(matches!(
            FormalDiffeo::new(vec![rf(1), rf(0), rf(1)]),
            Err(Error::NonRegular(_))
        ));
    }

    #[test]
    fn invariance_examples() {
        let coords = JetCoordinates::one_dimensional(3);
        let family = standard_family(&coords).unwrap();
        let gv = realize_class(&element(Variant::WO, 1, "y1*c1"), &coords).unwrap();
        let report = check_invariance(&gv, &family).unwrap();
        assert!(report.invariant(), "{:?}", report.first_failure());
        let dx0 = ExteriorForm::differential(coords.names(), 0);
        let report = check_invariance(&dx0, &family).unwrap();
        let failure = report.first_failure().unwrap();
        assert!(failure.name.starts_with("quadratic"));
        assert_eq!(failure.residual.to_string(), "2*a*x0 * dx0");
    }

    #[test]
    fn vector_field_brackets() {
        let e = |k| TruncatedVectorField::basis(k, 4);
        assert_eq!(e(0).bracket(&e(1)), e(0));
        assert_eq!(e(1).bracket(&e(2)), e(2));
        assert_eq!(e(0).bracket(&e(3)), e(2));
        assert_eq!(e(2).bracket(&e(4)), TruncatedVectorField::basis(5, 4));
        assert_eq!(e(1).bracket(&e(3)).in_basis()[3], int(2));
    }

    #[test]
    fn maurer_cartan_at_order_five() {
        let coords = JetCoordinates::one_dimensional(5);
        let t = tautological_form(&coords).unwrap();
        for k in 0..=3 {
            let lhs = t.components()[k].exterior_derivative();
            assert_eq!(lhs, maurer_cartan_expansion(&t, k).unwrap(), "k = {k}");
        }
        assert!(maurer_cartan_expansion(&t, 4).is_err());
    }

    #[test]
    fn two_dimensional_realization() {
        let coords = JetCoordinates::new(2, 2).unwrap();
        let c1 = realize_class(&element(Variant::WGL, 2, "c1"), &coords).unwrap();
        assert!(!c1.is_zero());
        assert!(c1.exterior_derivative().is_zero());
        let y1 = realize_class(&element(Variant::WO, 2, "y1"), &coords).unwrap();
        assert_eq!(y1.exterior_derivative(), c1);
        let c2 = realize_class(&element(Variant::WGL, 2, "c2"), &coords).unwrap();
        assert!(c2.exterior_derivative().is_zero());
        // c-monomials of weight above n vanish as forms too
        assert!(c1.wedge(&c2).unwrap().is_zero());
        let t = tautological_form(&coords).unwrap();
        let volume = t.zeroth()[0].wedge(&t.zeroth()[1]).unwrap();
        for row in t.curvature() {
            for r in row {
                assert!(r.wedge(&volume).unwrap().is_zero());
            }
        }
    }
}
