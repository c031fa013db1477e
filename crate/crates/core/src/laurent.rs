//! Laurent polynomials in `y₁ … yₙ` with Novikov coefficients, and the
//! potential function `PO = Σ 𝔠_j z_j + corrections` built from a polytope.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot_int_rat;
use crate::novikov::{format_complex, NovikovScalar};
use crate::polytope::{BulkCoefficients, Correction, FanoType, MomentPolytope};
use crate::rational::{display_rational, int, Extended, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, NovikovScalar>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn monomial(exponent: Vec<i64>, coeff: NovikovScalar) -> Self {
        let mut p = Self::zero(exponent.len());
        p.add_term(exponent, coeff);
        p
    }

    pub fn constant(nvars: usize, coeff: NovikovScalar) -> Self {
        Self::monomial(vec![0; nvars], coeff)
    }

    /// Sums the given terms; repeated exponents are merged.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, NovikovScalar)>,
    {
        let mut p = Self::zero(nvars);
        for (a, c) in terms {
            p.add_term(a, c);
        }
        p
    }

    fn add_term(&mut self, a: Vec<i64>, c: NovikovScalar) {
        assert_eq!(a.len(), self.nvars, "exponent length does not match variable count");
        let sum = match self.terms.remove(&a) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(a, sum);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &NovikovScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: &[i64]) -> Option<&NovikovScalar> {
        self.terms.get(a)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (a, c) in &other.terms {
            p.add_term(a.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|_, c| c.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero(self.nvars);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                p.add_term(e, c.mul(d));
            }
        }
        p
    }

    pub fn scale(&self, s: &NovikovScalar) -> Self {
        self.map_coeffs(|_, c| c.mul(s))
    }

    fn map_coeffs<F: Fn(&[i64], &NovikovScalar) -> NovikovScalar>(&self, f: F) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.clone(), f(a, c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// `y_i ∂/∂y_i` (0-based `i`): each coefficient is multiplied by the
    /// exponent `a_i` of its monomial.
    pub fn log_derivative(&self, i: usize) -> Result<Self> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange { index: i, bound: self.nvars });
        }
        Ok(self.map_coeffs(|a, c| c.scale(Complex64::new(a[i] as f64, 0.0))))
    }

    /// `𝔳_T^u(F) = min over terms of 𝔳(c_a) + ⟨a, u⟩`.
    pub fn valuation_at_u(&self, u: &[Rational]) -> Extended {
        self.terms
            .iter()
            .map(|(a, c)| c.valuation().shift(&dot_int_rat(a, u)))
            .min()
            .unwrap_or(Extended::Infinity)
    }

    /// Rewrites `F` in the variables `ȳ_i = T^{−u_i} y_i`: the coefficient of
    /// `ȳ^a` becomes `c_a T^{⟨a, u⟩}`.
    pub fn change_frame(&self, u: &[Rational]) -> Self {
        assert_eq!(u.len(), self.nvars, "frame has wrong dimension");
        self.map_coeffs(|a, c| c.shift(&dot_int_rat(a, u)))
    }

    pub fn truncate(&self, e: &Rational) -> Self {
        self.map_coeffs(|_, c| c.truncate(e))
    }

    /// Substitutes `y = point`; no domain check.
    pub fn evaluate(&self, point: &[NovikovScalar]) -> Result<NovikovScalar> {
        assert_eq!(point.len(), self.nvars, "point has wrong dimension");
        let mut cache: HashMap<(usize, i64), NovikovScalar> = HashMap::new();
        let mut inverses: Vec<Option<NovikovScalar>> = vec![None; self.nvars];
        let mut total = NovikovScalar::zero();
        for (a, c) in &self.terms {
            let mut term = c.clone();
            for (i, &k) in a.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if !cache.contains_key(&(i, k)) {
                    let base = if k < 0 {
                        if inverses[i].is_none() {
                            inverses[i] = Some(point[i].invert()?);
                        }
                        inverses[i].clone().unwrap()
                    } else {
                        point[i].clone()
                    };
                    cache.insert((i, k), base.pow(k.abs())?);
                }
                term = term.mul(&cache[&(i, k)]);
            }
            total = total.add(&term);
        }
        Ok(total)
    }

    /// Terms in display order: by coefficient valuation, then by exponent.
    fn sorted_terms(&self) -> Vec<(&Vec<i64>, &NovikovScalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by_key(|(a, c)| (c.valuation(), Reverse((*a).clone())));
        v
    }

    /// Human-readable form with variables named `{var}1 … {var}n`, e.g.
    /// `y1 + y2 + T (y1 y2)^-1`.
    pub fn render(&self, var: &str) -> String {
        let mut out = String::new();
        for (a, c) in self.sorted_terms() {
            let s = render_term(a, c, var);
            match (out.is_empty(), s.strip_prefix('-')) {
                (true, _) => out.push_str(&s),
                (false, Some(rest)) => {
                    out.push_str(" - ");
                    out.push_str(rest.trim_start());
                }
                (false, None) => {
                    out.push_str(" + ");
                    out.push_str(&s);
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("y"))
    }
}

fn render_monomial(a: &[i64], var: &str) -> String {
    let nz: Vec<(usize, i64)> = a.iter().copied().enumerate().filter(|&(_, k)| k != 0).collect();
    if nz.len() >= 2 && nz.iter().all(|&(_, k)| k == nz[0].1) && nz[0].1 < 0 {
        let vars: Vec<String> = nz.iter().map(|(i, _)| format!("{var}{}", i + 1)).collect();
        return format!("({})^{}", vars.join(" "), nz[0].1);
    }
    nz.iter()
        .map(|&(i, k)| if k == 1 { format!("{var}{}", i + 1) } else { format!("{var}{}^{k}", i + 1) })
        .collect::<Vec<_>>()
        .join(" ")
}

fn is_unit(c: Complex64) -> bool {
    (c - Complex64::one()).norm() < 1e-12
}

fn t_power(e: &Rational, bare_one: bool) -> String {
    if e.is_zero() {
        String::new()
    } else if e.is_one() && bare_one {
        "T".to_string()
    } else {
        format!("T^{}", display_rational(e))
    }
}

fn render_term(a: &[i64], c: &NovikovScalar, var: &str) -> String {
    let mono = render_monomial(a, var);
    let terms = c.terms();
    if terms.len() == 1 {
        let (e, z) = (&terms[0].0, terms[0].1);
        let negative = z.im.abs() < 1e-12 && z.re < 0.0;
        let mag = if negative { -z } else { z };
        let coeff = if is_unit(mag) { String::new() } else { format_complex(mag) };
        let parts: Vec<String> = [coeff, t_power(e, true), mono].into_iter().filter(|s| !s.is_empty()).collect();
        let body = if parts.is_empty() { "1".to_string() } else { parts.join(" ") };
        return if negative { format!("-{body}") } else { body };
    }
    let v = terms[0].0.clone();
    let mut inner = String::new();
    for (e, z) in terms {
        let e = e - &v;
        let negative = z.im.abs() < 1e-12 && z.re < 0.0;
        let mag = if negative { -z } else { *z };
        let piece = match (is_unit(mag), e.is_zero()) {
            (_, true) => format_complex(mag),
            (true, false) => t_power(&e, false),
            (false, false) => format!("{}{}", format_complex(mag), t_power(&e, false)),
        };
        if negative {
            inner.push('-');
        } else if !inner.is_empty() {
            inner.push('+');
        }
        inner.push_str(&piece);
    }
    let parts: Vec<String> =
        [format!("({inner})"), mono, t_power(&v, false)].into_iter().filter(|s| !s.is_empty()).collect();
    parts.join(" ")
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    monomial: Vec<i64>,
    coeff: NovikovScalar,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, c)| TermRepr { monomial: a.clone(), coeff: c.clone() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        if repr.terms.iter().any(|t| t.monomial.len() != repr.nvars) {
            return Err(serde::de::Error::custom("monomial length does not match nvars"));
        }
        Ok(LaurentPoly::from_terms(repr.nvars, repr.terms.into_iter().map(|t| (t.monomial, t.coeff))))
    }
}

/// `z_j = T^{λ_j} y^{v_j}` for the 0-based facet index `j`.
pub fn z_monomial(p: &MomentPolytope, j: usize) -> Result<LaurentPoly> {
    let f = p.facet(j)?;
    Ok(LaurentPoly::monomial(f.normal.clone(), NovikovScalar::t_pow(f.constant.clone())))
}

/// The potential function of a toric manifold: the leading part
/// `PO₀ = Σ 𝔠_j z_j` plus correction terms given as `z`-monomials.
#[derive(Clone, Debug)]
pub struct Potential {
    polytope: MomentPolytope,
    bulk: BulkCoefficients,
    corrections: Vec<Correction>,
    dropped: Vec<Correction>,
    truncation: Rational,
    fano: FanoType,
    warnings: Vec<String>,
    base: LaurentPoly,
    full: LaurentPoly,
}

impl Potential {
    /// Builds the potential. Corrections whose extra exponent reaches the
    /// truncation order are dropped; a non-Fano polytope without corrections
    /// records a warning since its higher terms are unknown.
    pub fn build(
        p: &MomentPolytope,
        bulk: &BulkCoefficients,
        corrections: &[Correction],
        truncation: &Rational,
    ) -> Result<Self> {
        p.ensure_valid()?;
        let m = p.facet_count();
        if bulk.len() != m {
            return Err(Error::ParamOutOfRange(format!("{} bulk coefficients for {m} facets", bulk.len())));
        }
        if !truncation.is_positive() {
            return Err(Error::ParamOutOfRange(format!("truncation {} must be positive", display_rational(truncation))));
        }
        let fano = p.fano_check()?;
        let mut warnings = Vec::new();
        if fano != FanoType::Fano && corrections.is_empty() {
            let msg = format!("polytope is {fano}, not Fano: higher correction terms are unknown and omitted");
            log::warn!("{msg}");
            warnings.push(msg);
        }
        let base = LaurentPoly::from_terms(
            p.dim,
            p.facets
                .iter()
                .enumerate()
                .map(|(j, f)| (f.normal.clone(), bulk.get(j).shift(&f.constant))),
        );
        let (mut kept, mut dropped) = (Vec::new(), Vec::new());
        let mut full = base.clone();
        for c in corrections {
            if !c.extra_t.is_positive() {
                return Err(Error::CorrectionNotPositive(display_rational(&c.extra_t)));
            }
            if c.monomial_z.len() != m {
                return Err(Error::ParamOutOfRange(format!(
                    "correction monomial has {} exponents for {m} facets",
                    c.monomial_z.len()
                )));
            }
            if c.extra_t >= *truncation {
                log::info!("dropping correction with extra exponent {} >= truncation", display_rational(&c.extra_t));
                dropped.push(c.clone());
                continue;
            }
            let mut a = vec![0i64; p.dim];
            let mut t = c.extra_t.clone();
            for (k, f) in c.monomial_z.iter().zip(&p.facets) {
                for (ai, vi) in a.iter_mut().zip(&f.normal) {
                    *ai += *k as i64 * vi;
                }
                t += &f.constant * int(*k as i64);
            }
            full = full.add(&LaurentPoly::monomial(a, NovikovScalar::monomial(t, c.coeff)));
            kept.push(c.clone());
        }
        Ok(Potential {
            polytope: p.clone(),
            bulk: bulk.clone(),
            corrections: kept,
            dropped,
            truncation: truncation.clone(),
            fano,
            warnings,
            base,
            full,
        })
    }

    /// Unit bulk coefficients.
    pub fn standard(p: &MomentPolytope, corrections: &[Correction], truncation: &Rational) -> Result<Self> {
        Self::build(p, &BulkCoefficients::ones(p.facet_count()), corrections, truncation)
    }

    pub fn polytope(&self) -> &MomentPolytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim
    }

    pub fn bulk(&self) -> &BulkCoefficients {
        &self.bulk
    }

    pub fn corrections(&self) -> &[Correction] {
        &self.corrections
    }

    pub fn dropped_corrections(&self) -> &[Correction] {
        &self.dropped
    }

    pub fn truncation(&self) -> &Rational {
        &self.truncation
    }

    pub fn fano_type(&self) -> FanoType {
        self.fano
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Drops the non-Fano warning when the caller vouches for the input.
    pub fn clear_warnings(&mut self) {
        self.warnings.clear();
    }

    /// `PO₀ = Σ 𝔠_j z_j`.
    pub fn leading(&self) -> &LaurentPoly {
        &self.base
    }

    /// `PO₀` plus the retained corrections.
    pub fn poly(&self) -> &LaurentPoly {
        &self.full
    }

    pub fn log_derivative(&self, i: usize) -> Result<LaurentPoly> {
        self.full.log_derivative(i)
    }

    /// `PO(𝔶)` truncated at the potential's order. The valuation vector of
    /// `𝔶` must lie in `P`.
    pub fn evaluate(&self, y: &[NovikovScalar]) -> Result<NovikovScalar> {
        if y.len() != self.dim() {
            return Err(Error::OutsideDomain(format!("expected {} coordinates, got {}", self.dim(), y.len())));
        }
        let mut u = Vec::with_capacity(y.len());
        for yi in y {
            match yi.valuation() {
                Extended::Finite(v) => u.push(v),
                Extended::Infinity => return Err(Error::OutsideDomain("a coordinate is zero".into())),
            }
        }
        if !self.polytope.contains(&u) {
            let s: Vec<String> = u.iter().map(display_rational).collect();
            return Err(Error::OutsideDomain(format!("({})", s.join(", "))));
        }
        Ok(self.full.evaluate(y)?.truncate(&self.truncation))
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.full, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{blowup1, hirzebruch, simplex};
    use crate::rational::rat;

    fn e5() -> Rational {
        int(5)
    }

    fn t(e: Rational) -> NovikovScalar {
        NovikovScalar::t_pow(e)
    }

    #[test]
    fn z_monomials() {
        let p = simplex(2).unwrap().polytope;
        assert_eq!(z_monomial(&p, 0).unwrap(), LaurentPoly::monomial(vec![-1, -1], t(int(1))));
        assert_eq!(z_monomial(&p, 1).unwrap(), LaurentPoly::monomial(vec![1, 0], NovikovScalar::one()));
        let q = blowup1(&rat(2, 5)).unwrap().polytope;
        assert_eq!(z_monomial(&q, 3).unwrap(), LaurentPoly::monomial(vec![0, -1], t(rat(3, 5))));
        assert!(matches!(z_monomial(&q, 4), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn rendering() {
        let po = Potential::standard(&simplex(3).unwrap().polytope, &[], &e5()).unwrap();
        assert_eq!(po.to_string(), "y1 + y2 + y3 + T (y1 y2 y3)^-1");
        let e = hirzebruch(2, &rat(1, 2)).unwrap();
        let po = Potential::standard(&e.polytope, &e.corrections, &e5()).unwrap();
        assert_eq!(po.to_string(), "y1 + y2 + (1+T^1) y2^-1 T^0.5 + T^2 y1^-1 y2^-2");
        let q = LaurentPoly::from_terms(
            2,
            [(vec![2, -3], NovikovScalar::real(-2.0)), (vec![0, 0], NovikovScalar::real(1.0))],
        );
        assert_eq!(q.render("x"), "-2 x1^2 x2^-3 + 1");
    }

    #[test]
    fn potentials() {
        let po = Potential::standard(&blowup1(&rat(1, 3)).unwrap().polytope, &[], &e5()).unwrap();
        assert_eq!(po.to_string(), "y1 + y2 + T^2/3 y2^-1 + T (y1 y2)^-1");
        assert!(po.warnings().is_empty());
        let f2 = hirzebruch(2, &rat(1, 2)).unwrap().polytope;
        assert_eq!(Potential::standard(&f2, &[], &e5()).unwrap().warnings().len(), 1);
        let bad = Correction { monomial_z: vec![0, 0, 0, 1], extra_t: int(0), coeff: Complex64::one() };
        assert!(matches!(Potential::standard(&f2, &[bad], &e5()), Err(Error::CorrectionNotPositive(_))));
        let far = Correction { monomial_z: vec![0, 0, 0, 1], extra_t: int(7), coeff: Complex64::one() };
        let po = Potential::standard(&f2, &[far], &e5()).unwrap();
        assert_eq!(po.dropped_corrections().len(), 1);
        assert_eq!(po.poly(), po.leading());
    }

    #[test]
    fn log_derivatives() {
        let po = Potential::standard(&simplex(3).unwrap().polytope, &[], &e5()).unwrap();
        for i in 0..3 {
            let mut a = vec![0; 3];
            a[i] = 1;
            let want = LaurentPoly::from_terms(
                3,
                [(a, NovikovScalar::one()), (vec![-1, -1, -1], t(int(1)).neg())],
            );
            assert_eq!(po.log_derivative(i).unwrap(), want);
        }
        let c = LaurentPoly::constant(2, NovikovScalar::real(3.0));
        assert!(c.log_derivative(0).unwrap().is_zero());
        let m = LaurentPoly::monomial(vec![2, -3], NovikovScalar::real(1.5));
        assert_eq!(m.log_derivative(1).unwrap(), LaurentPoly::monomial(vec![2, -3], NovikovScalar::real(-4.5)));
    }

    #[test]
    fn valuations_at_u() {
        let p = simplex(2).unwrap().polytope;
        let po = Potential::standard(&p, &[], &e5()).unwrap();
        let u = [rat(1, 3), rat(1, 3)];
        assert_eq!(po.poly().valuation_at_u(&u), Extended::Finite(rat(1, 3)));
        assert_eq!(LaurentPoly::zero(2).valuation_at_u(&u), Extended::Infinity);
        let w = [rat(1, 5), rat(1, 2)];
        for j in 0..3 {
            assert_eq!(z_monomial(&p, j).unwrap().valuation_at_u(&w), Extended::Finite(p.ell(j, &w).unwrap()));
        }
    }

    #[test]
    fn evaluation() {
        let cp1 = Potential::standard(&simplex(1).unwrap().polytope, &[], &e5()).unwrap();
        let v = cp1.evaluate(&[t(rat(1, 2))]).unwrap();
        assert!(v.approx_eq(&t(rat(1, 2)).scale(Complex64::new(2.0, 0.0)), 1e-12));
        assert!(matches!(cp1.evaluate(&[t(int(2))]), Err(Error::OutsideDomain(_))));
        assert!(matches!(cp1.evaluate(&[NovikovScalar::zero()]), Err(Error::OutsideDomain(_))));
        let n = 3;
        let cp = Potential::standard(&simplex(n).unwrap().polytope, &[], &e5()).unwrap();
        for k in 0..=n {
            let zeta = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / (n + 1) as f64);
            let y = vec![NovikovScalar::monomial(rat(1, 4), zeta); n];
            let want = NovikovScalar::monomial(rat(1, 4), zeta * 4.0);
            assert!(cp.evaluate(&y).unwrap().approx_eq(&want, 1e-12));
        }
    }

    #[test]
    fn frame_change() {
        let a = rat(1, 2);
        let e = hirzebruch(2, &a).unwrap();
        let po = Potential::standard(&e.polytope, &e.corrections, &e5()).unwrap();
        let u = [(int(1) + &a) / int(2), (int(1) - &a) / int(2)];
        let bar = po.poly().change_frame(&u);
        let lo = t((int(1) - &a) / int(2));
        let hi = t((int(1) + &a) / int(2));
        let want = LaurentPoly::from_terms(
            2,
            [
                (vec![0, 1], lo.clone()),
                (vec![0, -1], lo.add(&lo.shift(&(&a * int(2))))),
                (vec![1, 0], hi.clone()),
                (vec![-1, -2], hi),
            ],
        );
        assert_eq!(bar, want);
        assert_eq!(po.poly().change_frame(&[int(0), int(0)]), *po.poly());
        let back = bar.change_frame(&[-u[0].clone(), -u[1].clone()]);
        assert_eq!(back, *po.poly());
    }

    #[test]
    fn json_mirror() {
        let po = Potential::standard(&blowup1(&rat(1, 5)).unwrap().polytope, &[], &e5()).unwrap();
        let s = serde_json::to_string(po.poly()).unwrap();
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(&back, po.poly());
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
