//! Rational functions `num / den` over the rationals.
//!
//! Normal form: `gcd(num, den) = 1`, both parts have coprime integer
//! coefficients up to one shared rational factor moved into `num`, and the
//! leading coefficient of `den` is positive. Zero is `0 / 1`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::poly::MultiPoly;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: MultiPoly,
    den: MultiPoly,
}

/// Variable name to replacement value.
pub type VarMap = BTreeMap<String, RationalFunction>;

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction {
            num: MultiPoly::zero(),
            den: MultiPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunction {
            num: MultiPoly::constant(c),
            den: MultiPoly::one(),
        }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(crate::rational::int(n))
    }

    pub fn var(name: &str) -> Self {
        Self::from_poly(MultiPoly::var(name))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        RationalFunction {
            num: p,
            den: MultiPoly::one(),
        }
    }

    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_constant() {
            return Self::from_poly(num.scale(&den.constant_value().recip()));
        }
        let g = MultiPoly::gcd(&num, &den);
        if g.is_one() {
            Self::scalar_normalized(num, den)
        } else {
            Self::scalar_normalized(
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        }
    }

    /// Assumes `num` and `den` are coprime; fixes the scalar normalization.
    fn scalar_normalized(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_constant() {
            return Self::from_poly(num.scale(&den.constant_value().recip()));
        }
        let mut cd = den.rational_content();
        if den.leading_coefficient().is_negative() {
            cd = -cd;
        }
        let cn = num.rational_content();
        let pn = num.scale(&cn.recip());
        let pd = den.scale(&cd.recip());
        let r = cn / cd;
        let num = pn.scale(&Rational::from_integer(r.numer().clone()));
        let den = pd.scale(&Rational::from_integer(r.denom().clone()));
        RationalFunction { num, den }
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denominator(&self) -> &MultiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.is_constant().then(|| self.num.constant_value())
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Sorted union of the variables in numerator and denominator.
    pub fn vars(&self) -> Vec<String> {
        let mut v: Vec<String> = self.num.vars().iter().chain(self.den.vars()).cloned().collect();
        v.sort_by(|a, b| crate::poly::natural_cmp(a, b));
        v.dedup();
        v
    }

    pub fn contains_var(&self, name: &str) -> bool {
        self.num.contains_var(name) || self.den.contains_var(name)
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den == other.den {
            if self.den.is_one() {
                return Self::from_poly(self.num.add(&other.num));
            }
            return Self::normalized(self.num.add(&other.num), self.den.clone());
        }
        let g = MultiPoly::gcd(&self.den, &other.den);
        let b = self.den.div_exact(&g).expect("gcd divides");
        let d = other.den.div_exact(&g).expect("gcd divides");
        let num = self.num.mul(&d).add(&other.num.mul(&b));
        let den = self.den.mul(&d);
        if g.is_one() {
            // a/b + c/d with gcd(b, d) = 1 is already reduced
            Self::scalar_normalized(num, den)
        } else {
            Self::normalized(num, den)
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_polynomial() && other.is_polynomial() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        let g1 = MultiPoly::gcd(&self.num, &other.den);
        let g2 = MultiPoly::gcd(&other.num, &self.den);
        let a = self.num.div_exact(&g1).expect("gcd divides");
        let d = other.den.div_exact(&g1).expect("gcd divides");
        let c = other.num.div_exact(&g2).expect("gcd divides");
        let b = self.den.div_exact(&g2).expect("gcd divides");
        Self::scalar_normalized(a.mul(&c), b.mul(&d))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::scalar_normalized(self.num.scale(c), self.den.clone())
    }

    pub fn recip(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::scalar_normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &Self) -> Result<Self, Error> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, k: u32) -> Self {
        Self::scalar_normalized(self.num.pow(k), self.den.pow(k))
    }

    /// Partial derivative by the quotient rule.
    pub fn derivative(&self, name: &str) -> Self {
        if !self.contains_var(name) {
            return Self::zero();
        }
        if self.den.is_one() {
            return Self::from_poly(self.num.derivative(name));
        }
        let top = self
            .num
            .derivative(name)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(name)));
        Self::normalized(top, self.den.mul(&self.den))
    }

    /// Simultaneously replaces the mapped variables; others stay symbolic.
    pub fn substitute(&self, map: &VarMap) -> Result<Self, Error> {
        let n = substitute_poly(&self.num, map)?;
        let d = substitute_poly(&self.den, map)?;
        if d.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        n.div(&d)
    }

    /// Fixes the listed variables to rational values.
    pub fn eval_partial(&self, value: impl Fn(&str) -> Option<Rational> + Copy) -> Result<Self, Error> {
        let n = self.num.eval_partial(value);
        let d = self.den.eval_partial(value);
        Self::new(n, d)
    }
}

/// `p(map)` computed over a single common denominator.
fn substitute_poly(p: &MultiPoly, map: &VarMap) -> Result<RationalFunction, Error> {
    let vars = p.vars();
    if vars.iter().all(|v| !map.contains_key(v)) {
        return Ok(RationalFunction::from_poly(p.clone()));
    }
    struct Slot<'a> {
        image: Option<&'a RationalFunction>,
        name: &'a str,
        max_exp: u32,
        num_pows: Vec<MultiPoly>,
        den_pows: Vec<MultiPoly>,
    }
    let mut slots: Vec<Slot> = vars
        .iter()
        .map(|v| Slot {
            image: map.get(v),
            name: v,
            max_exp: p.degree_in(v),
            num_pows: vec![MultiPoly::one()],
            den_pows: vec![MultiPoly::one()],
        })
        .collect();
    for s in slots.iter_mut() {
        if let Some(img) = s.image {
            for k in 1..=s.max_exp as usize {
                let n = s.num_pows[k - 1].mul(img.numerator());
                let d = s.den_pows[k - 1].mul(img.denominator());
                s.num_pows.push(n);
                s.den_pows.push(d);
            }
        }
    }
    let mut total = MultiPoly::zero();
    for (e, c) in p.terms() {
        let mut t = MultiPoly::constant(c.clone());
        for (i, s) in slots.iter().enumerate() {
            let k = e.0[i];
            match s.image {
                Some(_) => {
                    t = t.mul(&s.num_pows[k as usize]);
                    t = t.mul(&s.den_pows[(s.max_exp - k) as usize]);
                }
                None if k > 0 => {
                    t = t.mul(&MultiPoly::monomial(Rational::one(), &[(s.name, k)]));
                }
                None => {}
            }
        }
        total = total.add(&t);
    }
    let mut den = MultiPoly::one();
    for s in &slots {
        if s.image.is_some() {
            den = den.mul(&s.den_pows[s.max_exp as usize]);
        }
    }
    RationalFunction::new(total, den)
}

impl From<MultiPoly> for RationalFunction {
    fn from(p: MultiPoly) -> Self {
        Self::from_poly(p)
    }
}

impl From<Rational> for RationalFunction {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl From<i64> for RationalFunction {
    fn from(n: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(n)))
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = if self.num.num_terms() > 1 {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        let bare_den = self.den.num_terms() == 1
            && self.den.leading_coefficient().is_one()
            && self.den.vars().len() == 1;
        if bare_den {
            write!(f, "{num}/{}", self.den)
        } else {
            write!(f, "{num}/({})", self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn v(name: &str) -> RationalFunction {
        RationalFunction::var(name)
    }

    #[test]
    fn reduces_common_factors() {
        let num = MultiPoly::var("x").pow(2).sub(&MultiPoly::one());
        let den = MultiPoly::var("x").sub(&MultiPoly::one());
        let r = RationalFunction::new(num, den).unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.to_string(), "x + 1");
    }

    #[test]
    fn canonical_sign_and_content() {
        let r = RationalFunction::new(MultiPoly::int(3), MultiPoly::var("y").scale(&int(-6))).unwrap();
        assert_eq!(r.to_string(), "-1/(2*y)");
        let s = RationalFunction::new(
            MultiPoly::var("y").scale(&ratio(1, 3)),
            MultiPoly::var("x").scale(&ratio(2, 9)),
        )
        .unwrap();
        assert_eq!(s.to_string(), "3*y/(2*x)");
        assert_eq!(s, v("y").scale(&ratio(3, 2)).div(&v("x")).unwrap());
    }

    #[test]
    fn arithmetic_cancels_to_zero() {
        let a = v("x2").div(&v("x1").pow(2)).unwrap();
        let b = v("x2").mul(&v("x1")).div(&v("x1").pow(3)).unwrap();
        assert!(a.sub(&b).is_zero());
        let c = RationalFunction::one().div(&v("x").add(&RationalFunction::one())).unwrap();
        let d = RationalFunction::one().div(&v("x").sub(&RationalFunction::one())).unwrap();
        let sum = c.add(&d);
        assert_eq!(sum.to_string(), "2*x/(x^2 - 1)");
    }

    #[test]
    fn quotient_rule() {
        let r = v("x2").div(&v("x1").pow(2)).unwrap();
        assert_eq!(r.derivative("x1").to_string(), "-2*x2/x1^3");
        assert_eq!(r.derivative("x2").to_string(), "1/x1^2");
        assert!(r.derivative("x0").is_zero());
    }

    #[test]
    fn substitution_and_zero_denominator() {
        let r = RationalFunction::one().div(&v("x1")).unwrap();
        let mut map = VarMap::new();
        map.insert("x1".into(), v("l").mul(&v("x1")));
        assert_eq!(r.substitute(&map).unwrap().to_string(), "1/(l*x1)");
        map.insert("x1".into(), RationalFunction::zero());
        assert!(matches!(r.substitute(&map), Err(Error::ZeroDenominator)));
        assert!(RationalFunction::new(MultiPoly::one(), MultiPoly::zero()).is_err());
    }
}
