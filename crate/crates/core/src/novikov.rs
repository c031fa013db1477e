//! Truncated elements of the universal Novikov field.
//!
//! A [`NovikovScalar`] is a finite sum `Σ aᵢ T^{λᵢ}` with exact rational
//! exponents and complex floating-point coefficients, together with a
//! truncation order: every exponent at or above it is unknown. Exact
//! quantities (such as the coefficients `T^{λ_j}` read off a polytope) carry
//! an infinite truncation order.
//!
//! Truncation propagates as a rigorous error bound. For a product the bound is
//! `min(trunc(a) + v(b), trunc(b) + v(a))`, which reduces to `min(trunc(a),
//! trunc(b))` for the valuation-zero series that dominate the solver.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{display_rational, format_rational, int, parse_rational, Extended, Rational};

/// Truncation order used when an exact series has to be expanded into an
/// infinite one (inverse, exponential, logarithm).
pub const DEFAULT_TRUNCATION: i64 = 5;

const DEFAULT_COEFF_EPS: f64 = 1e-12;

static COEFF_EPS_BITS: AtomicU64 = AtomicU64::new(DEFAULT_COEFF_EPS.to_bits());

/// Coefficients with magnitude below this threshold are pruned.
pub fn coefficient_tolerance() -> f64 {
    f64::from_bits(COEFF_EPS_BITS.load(Ordering::Relaxed))
}

/// Sets the process-wide pruning threshold. Intended for front ends; the
/// library itself never changes it.
pub fn set_coefficient_tolerance(eps: f64) {
    assert!(eps > 0.0 && eps.is_finite(), "coefficient tolerance must be positive");
    COEFF_EPS_BITS.store(eps.to_bits(), Ordering::Relaxed);
}

#[derive(Clone, Debug, PartialEq)]
pub struct NovikovScalar {
    terms: Vec<(Rational, Complex64)>,
    trunc: Extended,
}

fn keep(c: &Complex64) -> bool {
    c.norm() >= coefficient_tolerance()
}

impl NovikovScalar {
    /// The exact zero.
    pub fn zero() -> Self {
        NovikovScalar { terms: Vec::new(), trunc: Extended::Infinity }
    }

    /// `O(T^trunc)`: zero as far as it is known.
    pub fn zero_to(trunc: Extended) -> Self {
        NovikovScalar { terms: Vec::new(), trunc }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(Rational::zero(), c)
    }

    pub fn real(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    /// `T^exp`.
    pub fn t_pow(exp: Rational) -> Self {
        Self::monomial(exp, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(exp: Rational, coeff: Complex64) -> Self {
        if keep(&coeff) {
            NovikovScalar { terms: vec![(exp, coeff)], trunc: Extended::Infinity }
        } else {
            Self::zero()
        }
    }

    /// Builds a normalized scalar: duplicate exponents are merged, small
    /// coefficients pruned and exponents at or above `trunc` dropped.
    pub fn from_terms<I>(terms: I, trunc: Extended) -> Self
    where
        I: IntoIterator<Item = (Rational, Complex64)>,
    {
        let mut acc: BTreeMap<Rational, Complex64> = BTreeMap::new();
        for (e, c) in terms {
            if trunc.exceeds(&e) {
                *acc.entry(e).or_insert_with(Complex64::zero) += c;
            }
        }
        NovikovScalar { terms: acc.into_iter().filter(|(_, c)| keep(c)).collect(), trunc }
    }

    pub fn terms(&self) -> &[(Rational, Complex64)] {
        &self.terms
    }

    pub fn trunc(&self) -> &Extended {
        &self.trunc
    }

    pub fn is_exact(&self) -> bool {
        !self.trunc.is_finite()
    }

    /// True when no term is known to be nonzero.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest exponent with a nonzero coefficient; `+∞` for zero.
    pub fn valuation(&self) -> Extended {
        match self.terms.first() {
            Some((e, _)) => Extended::Finite(e.clone()),
            None => Extended::Infinity,
        }
    }

    pub fn leading(&self) -> Option<(&Rational, Complex64)> {
        self.terms.first().map(|(e, c)| (e, *c))
    }

    pub fn coefficient(&self, exp: &Rational) -> Complex64 {
        self.terms
            .binary_search_by(|(e, _)| e.cmp(exp))
            .map(|i| self.terms[i].1)
            .unwrap_or_else(|_| Complex64::zero())
    }

    /// Coefficient of `T^0`: the image in `Λ₀/Λ₊` for elements of `Λ₀`.
    pub fn constant_term(&self) -> Complex64 {
        self.coefficient(&Rational::zero())
    }

    pub fn in_lambda0(&self) -> bool {
        match self.valuation() {
            Extended::Finite(v) => !v.is_negative(),
            Extended::Infinity => true,
        }
    }

    pub fn in_lambda_plus(&self) -> bool {
        match self.valuation() {
            Extended::Finite(v) => v.is_positive(),
            Extended::Infinity => true,
        }
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|(_, c)| c.norm()).fold(0.0, f64::max)
    }

    /// Drops every term with exponent `>= trunc` and lowers the truncation
    /// order accordingly.
    pub fn truncate(&self, trunc: &Rational) -> Self {
        let t = self.trunc.clone().min(Extended::Finite(trunc.clone()));
        NovikovScalar {
            terms: self.terms.iter().filter(|(e, _)| t.exceeds(e)).cloned().collect(),
            trunc: t,
        }
    }

    /// Same series with a different (caller-certified) truncation order.
    pub fn with_trunc(&self, trunc: Extended) -> Self {
        NovikovScalar {
            terms: self.terms.iter().filter(|(e, _)| trunc.exceeds(e)).cloned().collect(),
            trunc,
        }
    }

    /// Multiplication by `T^by`.
    pub fn shift(&self, by: &Rational) -> Self {
        NovikovScalar {
            terms: self.terms.iter().map(|(e, c)| (e + by, *c)).collect(),
            trunc: self.trunc.shift(by),
        }
    }

    pub fn scale(&self, by: Complex64) -> Self {
        if !keep(&by) {
            return Self::zero_to(self.trunc.clone());
        }
        NovikovScalar {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * by))
                .filter(|(_, c)| keep(c))
                .collect(),
            trunc: self.trunc.clone(),
        }
    }

    fn merge(&self, other: &Self, sign: f64) -> Self {
        let trunc = self.trunc.clone().min(other.trunc.clone());
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let (e, c) = if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                i += 1;
                (&a[i - 1].0, a[i - 1].1)
            } else if i >= a.len() || b[j].0 < a[i].0 {
                j += 1;
                (&b[j - 1].0, b[j - 1].1 * sign)
            } else {
                i += 1;
                j += 1;
                (&a[i - 1].0, a[i - 1].1 + b[j - 1].1 * sign)
            };
            if trunc.exceeds(e) && keep(&c) {
                out.push((e.clone(), c));
            }
        }
        NovikovScalar { terms: out, trunc }
    }

    fn product_trunc(&self, other: &Self) -> Extended {
        let va = self.valuation().min(self.trunc.clone());
        let vb = other.valuation().min(other.trunc.clone());
        (&self.trunc + &vb).min(&other.trunc + &va)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let trunc = self.product_trunc(other);
        let mut acc: BTreeMap<Rational, Complex64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if !trunc.exceeds(&e) {
                    break;
                }
                *acc.entry(e).or_insert_with(Complex64::zero) += ca * cb;
            }
        }
        NovikovScalar { terms: acc.into_iter().filter(|(_, c)| keep(c)).collect(), trunc }
    }

    /// Multiplicative inverse. The truncation order of the result is the
    /// input order shifted by `-2·v(s)`; exact monomials invert exactly and
    /// other exact series are expanded to relative order
    /// [`DEFAULT_TRUNCATION`].
    pub fn invert(&self) -> Result<Self> {
        let (v, c0) = match self.leading() {
            Some((v, c)) => (v.clone(), c),
            None => return Err(Error::DivisionByZero),
        };
        match &self.trunc {
            Extended::Finite(t) => self.invert_to(&(t - &v - &v)),
            Extended::Infinity if self.terms.len() == 1 => {
                Ok(NovikovScalar { terms: vec![(-v, c0.inv())], trunc: Extended::Infinity })
            }
            Extended::Infinity => self.invert_to(&(int(DEFAULT_TRUNCATION) - v)),
        }
    }

    /// Inverse known up to (at most) `T^trunc`.
    pub fn invert_to(&self, trunc: &Rational) -> Result<Self> {
        let (v, c0) = match self.leading() {
            Some((v, c)) => (v.clone(), c),
            None => return Err(Error::DivisionByZero),
        };
        let natural = self.trunc.shift(&(-&v - &v));
        let target = natural.min(Extended::Finite(trunc.clone()));
        // relative precision needed for 1/u where self = c0 T^v u
        let rel = match &target {
            Extended::Finite(t) => t + &v,
            Extended::Infinity => unreachable!("finite target"),
        };
        let u = self.shift(&-&v).scale(c0.inv());
        let x = if rel.is_positive() { unit_inverse(&u, &rel) } else { NovikovScalar::zero_to(Extended::Finite(rel)) };
        Ok(x.scale(c0.inv()).shift(&-v).with_trunc(target))
    }

    /// Integer power; negative exponents go through [`invert`](Self::invert).
    pub fn pow(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.invert()?.pow(-k);
        }
        let mut result = NovikovScalar::one();
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// `exp(x)` for `x ∈ Λ₀`, split as `x = x₀ + x₊` with `x₀ ∈ ℂ`:
    /// `e^{x₀} Σ x₊^k / k!`.
    pub fn exp(&self) -> Result<Self> {
        if !self.in_lambda0() {
            return Err(Error::NotInLambda0(self.valuation().to_string()));
        }
        let target = match &self.trunc {
            Extended::Finite(t) => t.clone(),
            Extended::Infinity => int(DEFAULT_TRUNCATION),
        };
        let x0 = self.constant_term();
        let xp = NovikovScalar {
            terms: self.terms.iter().filter(|(e, _)| !e.is_zero()).cloned().collect(),
            trunc: self.trunc.clone(),
        };
        if xp.is_zero() {
            return Ok(NovikovScalar::constant(x0.exp()).with_trunc(self.trunc.clone()));
        }
        let mut sum = NovikovScalar::one();
        let mut term = NovikovScalar::one();
        let mut k = 1.0;
        loop {
            term = term.mul(&xp).truncate(&target).scale(Complex64::new(1.0 / k, 0.0));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
            k += 1.0;
        }
        Ok(sum.truncate(&target).scale(x0.exp()))
    }

    /// Inverse of [`exp`](Self::exp) on valuation-zero series, using the
    /// principal branch for the logarithm of the `T^0` coefficient.
    pub fn log1p_frame(&self) -> Result<Self> {
        let y0 = self.constant_term();
        match self.valuation() {
            Extended::Finite(v) if v.is_negative() => {
                return Err(Error::NotInLambda0(display_rational(&v)));
            }
            _ => {}
        }
        if !keep(&y0) {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let target = match &self.trunc {
            Extended::Finite(t) => t.clone(),
            Extended::Infinity => int(DEFAULT_TRUNCATION),
        };
        // y = y0 (1 + r), v(r) > 0
        let r = self.scale(y0.inv()).sub(&NovikovScalar::one());
        let mut sum = NovikovScalar::constant(y0.ln()).with_trunc(self.trunc.clone());
        let mut power = NovikovScalar::one();
        let mut k = 1.0;
        loop {
            power = power.mul(&r).truncate(&target);
            if power.is_zero() {
                break;
            }
            let sign = if (k as i64) % 2 == 1 { 1.0 } else { -1.0 };
            sum = sum.add(&power.scale(Complex64::new(sign / k, 0.0)));
            k += 1.0;
        }
        Ok(sum.truncate(&target))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, -1.0)
    }

    pub fn neg(&self) -> Self {
        NovikovScalar {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Every coefficient of the difference is below `tol` (truncation orders
    /// are not compared).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let diff = self.sub(other);
        diff.terms.iter().all(|(_, c)| c.norm() < tol)
    }

    /// Zero up to `tol` in every retained coefficient.
    pub fn is_approx_zero(&self, tol: f64) -> bool {
        self.terms.iter().all(|(_, c)| c.norm() < tol)
    }
}

/// `1/u` for `u = 1 + r`, `v(r) > 0`, to relative order `prec`, by Newton's
/// iteration `x ← x(2 − ux)`, which doubles the known precision each step.
fn unit_inverse(u: &NovikovScalar, prec: &Rational) -> NovikovScalar {
    let u = u.truncate(prec);
    let two = NovikovScalar::real(2.0);
    let mut x = NovikovScalar::one().truncate(prec);
    for _ in 0..64 {
        let ux = u.mul(&x).truncate(prec);
        let err = ux.sub(&NovikovScalar::one());
        if err.is_zero() {
            return x.with_trunc(u.trunc.clone());
        }
        x = x.mul(&two.sub(&ux)).truncate(prec);
    }
    x.with_trunc(u.trunc.clone())
}

impl Add for &NovikovScalar {
    type Output = NovikovScalar;
    fn add(self, rhs: &NovikovScalar) -> NovikovScalar {
        NovikovScalar::add(self, rhs)
    }
}

impl Sub for &NovikovScalar {
    type Output = NovikovScalar;
    fn sub(self, rhs: &NovikovScalar) -> NovikovScalar {
        NovikovScalar::sub(self, rhs)
    }
}

impl Mul for &NovikovScalar {
    type Output = NovikovScalar;
    fn mul(self, rhs: &NovikovScalar) -> NovikovScalar {
        NovikovScalar::mul(self, rhs)
    }
}

impl Neg for &NovikovScalar {
    type Output = NovikovScalar;
    fn neg(self) -> NovikovScalar {
        NovikovScalar::neg(self)
    }
}

pub(crate) fn format_complex(c: Complex64) -> String {
    let re = if c.re.abs() < 1e-12 { 0.0 } else { c.re };
    let im = if c.im.abs() < 1e-12 { 0.0 } else { c.im };
    let f = |x: f64| {
        if (x - x.round()).abs() < 1e-12 {
            format!("{}", x.round())
        } else {
            format!("{x:.6}")
        }
    };
    match (re == 0.0, im == 0.0) {
        (_, true) => f(re),
        (true, false) => format!("{}i", f(im)),
        (false, false) => format!("({}{}{}i)", f(re), if im < 0.0 { "-" } else { "+" }, f(im.abs())),
    }
}

impl NovikovScalar {
    /// The first `k` terms, with `...` standing for the rest up to the
    /// truncation order.
    pub fn display_leading(&self, k: usize) -> String {
        self.render(Some(k))
    }

    fn render(&self, limit: Option<usize>) -> String {
        let shown = limit.unwrap_or(self.terms.len()).min(self.terms.len());
        let mut parts: Vec<String> = self.terms[..shown]
            .iter()
            .map(|(e, c)| {
                let coeff = format_complex(*c);
                if e.is_zero() {
                    coeff
                } else if e.is_one() {
                    format!("{coeff} T")
                } else {
                    format!("{coeff} T^{}", display_rational(e))
                }
            })
            .collect();
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        if shown < self.terms.len() {
            parts.push("...".to_string());
        }
        if let Extended::Finite(t) = &self.trunc {
            parts.push(format!("O(T^{})", display_rational(t)));
        }
        parts.join(" + ")
    }
}

impl fmt::Display for NovikovScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(None))
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: String,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    terms: Vec<TermRepr>,
    trunc: String,
}

impl Serialize for NovikovScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr { exp: format_rational(e), re: c.re, im: c.im })
                .collect(),
            trunc: self.trunc.to_string_exact(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NovikovScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ScalarRepr::deserialize(deserializer)?;
        let trunc = Extended::parse(&repr.trunc).map_err(D::Error::custom)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in repr.terms {
            let e = parse_rational(&t.exp).map_err(D::Error::custom)?;
            terms.push((e, Complex64::new(t.re, t.im)));
        }
        // keep the stored representation verbatim (it was normalized on write)
        let mut sorted = terms.clone();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Ok(NovikovScalar::from_terms(terms, trunc));
        }
        Ok(NovikovScalar { terms: sorted, trunc })
    }
}

/// Serde adapter storing a complex number as `{"re": .., "im": ..}`.
pub mod serde_complex {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        re: f64,
        #[serde(default)]
        im: f64,
    }

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Repr { re: c.re, im: c.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let r = Repr::deserialize(d)?;
        Ok(Complex64::new(r.re, r.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use std::f64::consts::PI;

    fn t(e: Rational) -> NovikovScalar {
        NovikovScalar::t_pow(e)
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(NovikovScalar::zero().valuation(), Extended::Infinity);
        let s = t(rat(1, 2)).sub(&t(rat(1, 3)).scale(Complex64::new(2.0, 0.0)));
        assert_eq!(s.valuation(), Extended::Finite(rat(1, 3)));
        let p = t(rat(1, 2)).mul(&t(int(1)).scale(Complex64::new(3.0, 0.0)));
        assert_eq!(p.valuation(), Extended::Finite(rat(3, 2)));
    }

    #[test]
    fn field_examples() {
        assert_eq!(t(rat(1, 2)).mul(&t(rat(1, 2))), t(int(1)));
        let z = t(rat(1, 3)).add(&t(rat(1, 3)).neg());
        assert!(z.is_zero());
        assert_eq!(z.valuation(), Extended::Infinity);
        let s = NovikovScalar::one().add(&t(int(1)));
        let inv = s.invert().unwrap();
        assert_eq!(inv.trunc(), &Extended::Finite(int(5)));
        let expect: Vec<f64> = vec![1.0, -1.0, 1.0, -1.0, 1.0];
        assert_eq!(inv.terms().len(), 5);
        for (k, (e, c)) in inv.terms().iter().enumerate() {
            assert_eq!(e, &int(k as i64));
            assert!((c.re - expect[k]).abs() < 1e-15 && c.im.abs() < 1e-15);
        }
        assert_eq!(NovikovScalar::zero().invert(), Err(Error::DivisionByZero));
    }

    #[test]
    fn invert_shifts_truncation() {
        // T^{1/2}(2 + T) known to order 3
        let s = NovikovScalar::from_terms(
            vec![(rat(1, 2), Complex64::new(2.0, 0.0)), (rat(3, 2), Complex64::new(1.0, 0.0))],
            Extended::Finite(int(3)),
        );
        let inv = s.invert().unwrap();
        assert_eq!(inv.trunc(), &Extended::Finite(int(2)));
        let prod = s.mul(&inv);
        assert_eq!(prod.trunc(), &Extended::Finite(rat(5, 2)));
        assert!(prod.sub(&NovikovScalar::one()).is_approx_zero(1e-12));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(NovikovScalar::zero().exp().unwrap(), NovikovScalar::one());
        let w = Complex64::new(0.0, 2.0 * PI / 3.0);
        let e = NovikovScalar::constant(w).exp().unwrap();
        assert_eq!(e.terms().len(), 1);
        assert!((e.constant_term() - w.exp()).norm() < 1e-15);
        let et = t(int(1)).exp().unwrap();
        let fact = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        assert_eq!(et.terms().len(), 5);
        for (k, (_, c)) in et.terms().iter().enumerate() {
            assert!((c.re - fact[k]).abs() < 1e-15);
        }
        assert!(matches!(t(int(-1)).exp(), Err(Error::NotInLambda0(_))));
    }

    #[test]
    fn log_examples() {
        assert!(NovikovScalar::one().log1p_frame().unwrap().is_zero());
        let x = t(rat(1, 2));
        let back = x.exp().unwrap().log1p_frame().unwrap();
        assert!(back.approx_eq(&x, 1e-12));
        // -1 + T  ->  πi + log(1 - T)
        let y = NovikovScalar::real(-1.0).add(&t(int(1)));
        let l = y.log1p_frame().unwrap();
        assert!((l.constant_term() - Complex64::new(0.0, PI)).norm() < 1e-15);
        for k in 1..5 {
            let c = l.coefficient(&int(k));
            assert!((c.re + 1.0 / k as f64).abs() < 1e-14, "k={k} c={c}");
        }
        assert_eq!(t(int(1)).log1p_frame(), Err(Error::ZeroLeadingCoefficient));
    }

    #[test]
    fn serde_round_trip() {
        let s = NovikovScalar::from_terms(
            vec![(rat(1, 3), Complex64::new(1.5, -2.0)), (int(2), Complex64::new(0.0, 1.0))],
            Extended::Finite(rat(7, 2)),
        );
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(
            js,
            r#"{"terms":[{"exp":"1/3","re":1.5,"im":-2.0},{"exp":"2","re":0.0,"im":1.0}],"trunc":"7/2"}"#
        );
        let back: NovikovScalar = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        let exact: NovikovScalar = serde_json::from_str(r#"{"terms":[],"trunc":"inf"}"#).unwrap();
        assert_eq!(exact, NovikovScalar::zero());
    }
}
