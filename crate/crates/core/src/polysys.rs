//! Square Laurent polynomial systems over `ℂ` and their solutions in the
//! torus `(ℂ*)ⁿ`.
//!
//! Strategy by shape: one variable uses companion-matrix eigenvalues; systems
//! where every equation is a binomial are solved exactly through a
//! diagonal form of the exponent matrix; two variables use the Sylvester
//! resultant (sampled on the unit circle and interpolated) followed by
//! back-substitution; anything else goes through total-degree homotopy
//! continuation.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::diagonalize;

/// Default distance below which two torus points are identified.
pub const DEFAULT_SOLUTION_EPS: f64 = 1e-8;

/// Threshold on `|det|` of the normalized logarithmic Jacobian below which a
/// root counts as degenerate.
pub const DEGENERACY_EPS: f64 = 1e-8;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct CPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, Complex64>,
}

impl CPoly {
    pub fn zero(nvars: usize) -> Self {
        CPoly { nvars, terms: BTreeMap::new() }
    }

    /// Sums the given terms and drops exact zeros.
    pub fn from_terms<I: IntoIterator<Item = (Vec<i64>, Complex64)>>(nvars: usize, terms: I) -> Self {
        let mut map: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (a, c) in terms {
            assert_eq!(a.len(), nvars, "exponent length does not match variable count");
            *map.entry(a).or_insert_with(Complex64::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        CPoly { nvars, terms: map }
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, a: &[i64]) -> Complex64 {
        self.terms.get(a).copied().unwrap_or_else(Complex64::zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops coefficients below `rel · max|c|` and rescales to `max|c| = 1`.
    pub fn normalized(&self, rel: f64) -> Self {
        let m = self.max_abs();
        if m == 0.0 {
            return self.clone();
        }
        CPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() >= rel * m)
                .map(|(a, c)| (a.clone(), c / m))
                .collect(),
        }
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|a| a[var] != 0)
    }

    fn monomial_value(a: &[i64], x: &[Complex64]) -> Complex64 {
        a.iter().zip(x).fold(ONE, |acc, (&k, xi)| if k == 0 { acc } else { acc * xi.powi(k as i32) })
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(a, c)| c * Self::monomial_value(a, x)).sum()
    }

    /// `Σ |c_a x^a|`, the natural scale for the residual at `x`.
    pub fn abs_scale(&self, x: &[Complex64]) -> f64 {
        self.terms.iter().map(|(a, c)| (c * Self::monomial_value(a, x)).norm()).sum()
    }

    /// `(x_j ∂f/∂x_j)_j` at `x`.
    pub fn log_gradient(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut g = vec![Complex64::zero(); self.nvars];
        for (a, c) in &self.terms {
            let v = c * Self::monomial_value(a, x);
            for (gj, &k) in g.iter_mut().zip(a) {
                *gj += v * k as f64;
            }
        }
        g
    }

    /// `x_i ∂/∂x_i`.
    pub fn log_derivative(&self, i: usize) -> Self {
        CPoly::from_terms(self.nvars, self.terms.iter().map(|(a, c)| (a.clone(), c * a[i] as f64)))
    }

    /// Coefficients `[c_0, …, c_d]` of the univariate polynomial in `var`
    /// obtained by fixing the other coordinates at `x`, after multiplying by
    /// the power of `x_var` that makes every exponent nonnegative.
    fn univariate_at(&self, var: usize, x: &[Complex64]) -> Vec<Complex64> {
        let lo = self.terms.keys().map(|a| a[var]).min().unwrap_or(0);
        let hi = self.terms.keys().map(|a| a[var]).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::zero(); (hi - lo + 1) as usize];
        for (a, c) in &self.terms {
            let mut b = a.clone();
            b[var] = 0;
            coeffs[(a[var] - lo) as usize] += c * Self::monomial_value(&b, x);
        }
        coeffs
    }

    /// Shifts exponents so that the minimum in every variable is zero.
    fn cleared(&self) -> Self {
        let mins: Vec<i64> =
            (0..self.nvars).map(|i| self.terms.keys().map(|a| a[i]).min().unwrap_or(0)).collect();
        CPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.iter().zip(&mins).map(|(x, m)| x - m).collect(), *c))
                .collect(),
        }
    }

    fn degree_in(&self, var: usize) -> i64 {
        self.terms.keys().map(|a| a[var]).max().unwrap_or(0)
    }

    fn total_degree(&self) -> i64 {
        self.terms.keys().map(|a| a.iter().sum::<i64>()).max().unwrap_or(0)
    }

    /// Human-readable form with variables `{var}1 … {var}n`.
    pub fn render(&self, var: &str) -> String {
        let mut terms: Vec<(&Vec<i64>, &Complex64)> = self.terms.iter().collect();
        terms.reverse();
        let parts: Vec<String> = terms
            .into_iter()
            .map(|(a, c)| {
                let mono: Vec<String> = a
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k != 0)
                    .map(|(i, &k)| if k == 1 { format!("{var}{}", i + 1) } else { format!("{var}{}^{k}", i + 1) })
                    .collect();
                let coeff = crate::novikov::format_complex(*c);
                match (mono.is_empty(), coeff.as_str()) {
                    (true, _) => coeff,
                    (false, "1") => mono.join(" "),
                    (false, "-1") => format!("-{}", mono.join(" ")),
                    (false, _) => format!("{coeff} {}", mono.join(" ")),
                }
            })
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

impl fmt::Display for CPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("y"))
    }
}

#[derive(Serialize, Deserialize)]
struct CTermRepr {
    monomial: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct CPolyRepr {
    nvars: usize,
    terms: Vec<CTermRepr>,
}

impl Serialize for CPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CPolyRepr {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, c)| CTermRepr { monomial: a.clone(), re: c.re, im: c.im }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CPolyRepr::deserialize(d)?;
        if r.terms.iter().any(|t| t.monomial.len() != r.nvars) {
            return Err(serde::de::Error::custom("monomial length does not match nvars"));
        }
        Ok(CPoly::from_terms(r.nvars, r.terms.into_iter().map(|t| (t.monomial, Complex64::new(t.re, t.im)))))
    }
}

/// Roots of `Σ c_k x^k` (coefficients from low to high degree), with
/// multiplicity, via the eigenvalues of the companion matrix followed by a
/// few Newton steps per root.
pub fn univariate_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.norm() <= 1e-14 * scale) {
        c.pop();
    }
    let d = c.len().saturating_sub(1);
    if d == 0 {
        return Vec::new();
    }
    if let Some(eig) = companion_eigenvalues(&c) {
        return eig.into_iter().map(|z| polish_univariate(&c, z)).collect();
    }
    // QR stalls on symmetric root sets such as (x² − 1)²; a generic shift of
    // the variable breaks the symmetry.
    let shift = Complex64::from_polar(0.5, 0.918_273_645);
    let shifted = taylor_shift(&c, shift);
    let eig = companion_eigenvalues(&shifted).unwrap_or_else(|| durand_kerner(&shifted));
    eig.into_iter().map(|z| polish_univariate(&c, z + shift)).collect()
}

/// Eigenvalues of the companion matrix, `None` if the Schur iteration does
/// not converge within its budget.
fn companion_eigenvalues(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = c.len() - 1;
    let lead = c[d];
    let mut m = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        m[(i, i - 1)] = ONE;
    }
    for i in 0..d {
        m[(i, d - 1)] = -c[i] / lead;
    }
    let schur = m.try_schur(f64::EPSILON, 100 * d.max(10))?;
    Some(schur.eigenvalues().expect("complex Schur form is triangular").iter().copied().collect())
}

/// Coefficients of `p(y + s)`.
fn taylor_shift(c: &[Complex64], s: Complex64) -> Vec<Complex64> {
    let mut out = c.to_vec();
    let d = out.len() - 1;
    for i in 0..d {
        for k in (i..d).rev() {
            let hi = out[k + 1];
            out[k] += s * hi;
        }
    }
    out
}

/// Simultaneous Weierstrass iteration; the last resort.
fn durand_kerner(c: &[Complex64]) -> Vec<Complex64> {
    let d = c.len() - 1;
    let lead = c[d];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let radius = 1.0 + monic[..d].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d).map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * PI * k as f64 / d as f64)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let num = horner(&monic, z[i]).0;
            let den = (0..d).filter(|&j| j != i).fold(ONE, |acc, j| acc * (z[i] - z[j]));
            if den.norm() == 0.0 {
                continue;
            }
            let step = num / den;
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * radius {
            break;
        }
    }
    z
}

fn horner(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &ck in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + ck;
    }
    (p, dp)
}

fn polish_univariate(c: &[Complex64], mut x: Complex64) -> Complex64 {
    let mut best = horner(c, x).0.norm();
    for _ in 0..8 {
        let (p, dp) = horner(c, x);
        if dp.norm() == 0.0 {
            break;
        }
        let next = x - p / dp;
        let val = horner(c, next).0.norm();
        if val >= best {
            break;
        }
        best = val;
        x = next;
    }
    x
}

/// Groups nearby values; returns (mean, count) per cluster.
pub fn cluster(values: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut groups: Vec<Vec<Complex64>> = Vec::new();
    for &v in values {
        let r = radius * v.norm().max(1.0);
        match groups.iter_mut().find(|g| g.iter().any(|w| (w - v).norm() < r)) {
            Some(g) => g.push(v),
            None => groups.push(vec![v]),
        }
    }
    groups.into_iter().map(|g| (g.iter().sum::<Complex64>() / g.len() as f64, g.len())).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Univariate,
    Binomial,
    Resultant,
    Homotopy,
}

/// One isolated torus solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusRoot {
    #[serde(with = "complex_vec")]
    pub point: Vec<Complex64>,
    /// `None` when the local multiplicity could not be determined.
    pub multiplicity: Option<usize>,
    pub nondegenerate: bool,
    /// `|det|` of the logarithmic Jacobian of the normalized system.
    pub jacobian_det: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusSolution {
    pub method: SolveMethod,
    pub roots: Vec<TorusRoot>,
    /// For two variables: the monic eliminant in the first variable,
    /// coefficients from low to high degree.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_complex_vec")]
    pub eliminant: Option<Vec<Complex64>>,
}

mod complex_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?.into_iter().map(|[a, b]| Complex64::new(a, b)).collect())
    }
}

mod opt_complex_vec {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Complex64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::complex_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Complex64>>, D::Error> {
        Ok(Option::<Vec<[f64; 2]>>::deserialize(d)?.map(|v| v.into_iter().map(|[a, b]| Complex64::new(a, b)).collect()))
    }
}

/// Logarithmic Jacobian `[x_j ∂f_i/∂x_j]`.
pub fn log_jacobian(system: &[CPoly], x: &[Complex64]) -> DMatrix<Complex64> {
    let n = x.len();
    let mut j = DMatrix::zeros(system.len(), n);
    for (i, f) in system.iter().enumerate() {
        for (k, g) in f.log_gradient(x).into_iter().enumerate() {
            j[(i, k)] = g;
        }
    }
    j
}

fn jacobian_det(system: &[CPoly], x: &[Complex64]) -> f64 {
    log_jacobian(system, x).determinant().norm()
}

/// Newton's method in logarithmic coordinates: `x_j ← x_j (1 − δ_j)` with
/// `J_log δ = f`. Stops when the scaled residual stops improving.
pub fn newton_polish(system: &[CPoly], x0: &[Complex64], max_iter: usize) -> Vec<Complex64> {
    let resid = |x: &[Complex64]| {
        system.iter().map(|f| f.eval(x).norm() / f.abs_scale(x).max(1e-300)).fold(0.0, f64::max)
    };
    let mut x = x0.to_vec();
    let mut best = resid(&x);
    for _ in 0..max_iter {
        if best < 1e-15 {
            break;
        }
        let j = log_jacobian(system, &x);
        let f = nalgebra::DVector::from_iterator(system.len(), system.iter().map(|p| p.eval(&x)));
        let Some(delta) = j.lu().solve(&f) else { break };
        let next: Vec<Complex64> = x.iter().zip(delta.iter()).map(|(xi, d)| xi * (ONE - d)).collect();
        let r = resid(&next);
        if !(r < best) {
            break;
        }
        best = r;
        x = next;
    }
    x
}

fn scaled_residual(system: &[CPoly], x: &[Complex64]) -> f64 {
    system.iter().map(|f| f.eval(x).norm() / f.abs_scale(x).max(1e-300)).fold(0.0, f64::max)
}

fn finish_root(system: &[CPoly], point: Vec<Complex64>, multiplicity: Option<usize>) -> TorusRoot {
    let jacobian_det = jacobian_det(system, &point);
    let nondegenerate = jacobian_det >= DEGENERACY_EPS;
    let multiplicity = if nondegenerate { Some(1) } else { multiplicity };
    TorusRoot { point, multiplicity, nondegenerate, jacobian_det }
}

fn same_point(a: &[Complex64], b: &[Complex64], eps: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= eps * x.norm().max(1.0))
}

/// Merges roots closer than `eps` (relative), adding multiplicities.
pub fn dedup_roots(roots: Vec<TorusRoot>, eps: f64) -> Vec<TorusRoot> {
    let mut out: Vec<TorusRoot> = Vec::new();
    for r in roots {
        match out.iter_mut().find(|o| same_point(&o.point, &r.point, eps)) {
            Some(o) => {
                if !o.nondegenerate {
                    o.multiplicity = match (o.multiplicity, r.multiplicity) {
                        (Some(a), Some(b)) => Some(a + b),
                        _ => None,
                    };
                }
            }
            None => out.push(r),
        }
    }
    out
}

/// Orders roots by argument then modulus of each coordinate, for stable output.
pub fn sort_roots(roots: &mut [TorusRoot]) {
    let key = |r: &TorusRoot| -> Vec<(i64, i64)> {
        r.point
            .iter()
            .map(|z| {
                let arg = if z.im.abs() < 1e-9 && z.re > 0.0 { 0.0 } else { z.arg().rem_euclid(2.0 * PI) };
                ((arg * 1e6).round() as i64, (z.norm() * 1e6).round() as i64)
            })
            .collect()
    };
    roots.sort_by_key(key);
}

/// All isolated solutions of a square system in `(ℂ*)ⁿ`.
///
/// Equations are normalized first (coefficients below `1e-12 · max` are
/// treated as zero). Errors with `PositiveDimensionalInitialLocus` when a
/// positive-dimensional component is detected.
pub fn solve_torus(system: &[CPoly], eps: f64) -> Result<TorusSolution> {
    let n = system.first().map(CPoly::nvars).unwrap_or(0);
    if system.len() != n || n == 0 {
        return Err(Error::EliminationFailed(format!("system is not square ({} equations)", system.len())));
    }
    let sys: Vec<CPoly> = system.iter().map(|f| f.normalized(1e-12)).collect();
    if sys.iter().any(CPoly::is_zero) {
        return Err(Error::PositiveDimensionalInitialLocus);
    }
    if sys.iter().any(|f| f.len() == 1) {
        // a single monomial never vanishes on the torus
        return Ok(TorusSolution { method: SolveMethod::Binomial, roots: Vec::new(), eliminant: None });
    }
    let mut sol = if n == 1 {
        solve_univariate(&sys[0], eps)?
    } else if sys.iter().all(|f| f.len() == 2) {
        solve_binomial(&sys)?
    } else if n == 2 {
        solve_resultant(&sys, eps)?
    } else {
        solve_homotopy(&sys, eps)?
    };
    sort_roots(&mut sol.roots);
    Ok(sol)
}

fn solve_univariate(f: &CPoly, eps: f64) -> Result<TorusSolution> {
    let c = f.univariate_at(0, &[ONE]);
    let roots: Vec<Complex64> = univariate_roots(&c).into_iter().filter(|z| z.norm() > 1e-12).collect();
    let sys = std::slice::from_ref(f);
    let out = cluster(&roots, 1e-4)
        .into_iter()
        .map(|(z, k)| {
            let p = newton_polish(sys, &[z], 20);
            finish_root(sys, p, Some(k))
        })
        .collect();
    Ok(TorusSolution { method: SolveMethod::Univariate, roots: dedup_roots(out, eps), eliminant: None })
}

/// Each equation `c₁x^a + c₂x^b` becomes `x^{a−b} = −c₂/c₁`. With
/// `U M V = diag(s)` the system decouples into `w_i^{s_i} = Π r_j^{U_ij}`
/// and `x = w^V`.
fn solve_binomial(sys: &[CPoly]) -> Result<TorusSolution> {
    let n = sys.len();
    let mut m = Vec::with_capacity(n);
    let mut logr = Vec::with_capacity(n);
    for f in sys {
        let t: Vec<(&Vec<i64>, &Complex64)> = f.terms().collect();
        let (a, c1) = t[0];
        let (b, c2) = t[1];
        m.push(a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<i64>>());
        logr.push((-c2 / c1).ln());
    }
    let (u, s, v) = diagonalize(&m);
    // log of the right-hand side after applying U
    let rhs: Vec<Complex64> =
        (0..n).map(|i| (0..n).map(|j| logr[j] * u[i][j] as f64).sum::<Complex64>()).collect();
    if s.contains(&0) {
        let consistent = (0..n).filter(|&i| s[i] == 0).all(|i| {
            let z = rhs[i].exp();
            (z - ONE).norm() < 1e-9
        });
        return if consistent {
            Err(Error::PositiveDimensionalInitialLocus)
        } else {
            Ok(TorusSolution { method: SolveMethod::Binomial, roots: Vec::new(), eliminant: None })
        };
    }
    let mut roots = Vec::new();
    let counts: Vec<i64> = s.iter().map(|x| x.abs()).collect();
    let total: i64 = counts.iter().product();
    for idx in 0..total {
        let mut rem = idx;
        let mut z = vec![Complex64::zero(); n];
        for i in 0..n {
            let k = rem % counts[i];
            rem /= counts[i];
            z[i] = (rhs[i] + Complex64::new(0.0, 2.0 * PI * k as f64)) / s[i] as f64;
        }
        let x: Vec<Complex64> =
            (0..n).map(|j| (0..n).map(|i| z[i] * v[j][i] as f64).sum::<Complex64>().exp()).collect();
        let x = newton_polish(sys, &x, 3);
        roots.push(finish_root(sys, x, Some(1)));
    }
    Ok(TorusSolution { method: SolveMethod::Binomial, roots, eliminant: None })
}

/// Sylvester resultant of `p`, `q` with respect to variable 1, as a
/// polynomial in variable 0 (coefficients low to high), for systems whose
/// exponents have been cleared to be nonnegative.
fn resultant_in_x(p: &CPoly, q: &CPoly) -> Vec<Complex64> {
    let (dp, dq) = (p.degree_in(1) as usize, q.degree_in(1) as usize);
    let bound = dp * q.degree_in(0) as usize + dq * p.degree_in(0) as usize;
    let size = dp + dq;
    if size == 0 {
        return vec![ONE];
    }
    let npts = bound + 1;
    let values: Vec<Complex64> = (0..npts)
        .map(|k| {
            let x = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / npts as f64);
            let mut pc = vec![Complex64::zero(); dp + 1];
            for (a, c) in p.terms() {
                pc[a[1] as usize] += c * x.powi(a[0] as i32);
            }
            let mut qc = vec![Complex64::zero(); dq + 1];
            for (a, c) in q.terms() {
                qc[a[1] as usize] += c * x.powi(a[0] as i32);
            }
            let mut s = DMatrix::<Complex64>::zeros(size, size);
            for i in 0..dq {
                for (j, c) in pc.iter().rev().enumerate() {
                    s[(i, i + j)] = *c;
                }
            }
            for i in 0..dp {
                for (j, c) in qc.iter().rev().enumerate() {
                    s[(dq + i, i + j)] = *c;
                }
            }
            s.determinant()
        })
        .collect();
    (0..npts)
        .map(|j| {
            values
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / npts as f64))
                .sum::<Complex64>()
                / npts as f64
        })
        .collect()
}

fn solve_resultant(sys: &[CPoly], eps: f64) -> Result<TorusSolution> {
    let p = sys[0].cleared();
    let q = sys[1].cleared();
    let mut r = resultant_in_x(&p, &q);
    let scale = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tiny = 1e-9 * scale.max(1e-300);
    if scale < 1e-12 {
        return Err(Error::PositiveDimensionalInitialLocus);
    }
    for c in r.iter_mut() {
        if c.norm() < tiny {
            *c = Complex64::zero();
        }
    }
    while r.last().is_some_and(|c| c.is_zero()) {
        r.pop();
    }
    let low = r.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let r: Vec<Complex64> = r[low..].to_vec();
    let lead = *r.last().unwrap();
    let eliminant: Vec<Complex64> = r.iter().map(|c| clean(c / lead)).collect();
    let xs = univariate_roots(&eliminant);
    let mut roots = Vec::new();
    for (x, k) in cluster(&xs, 1e-3) {
        // candidate second coordinates from whichever equation involves it
        let (f, g) = if p.involves(1) { (&p, &q) } else { (&q, &p) };
        let pt = [x, ONE];
        let ys: Vec<Complex64> =
            univariate_roots(&f.univariate_at(1, &pt)).into_iter().filter(|y| y.norm() > 1e-10).collect();
        let tol = if k > 1 { 1e-3 } else { 1e-6 };
        let mut found: Vec<TorusRoot> = Vec::new();
        for y in ys {
            let z = [x, y];
            if g.eval(&z).norm() > tol * g.abs_scale(&z).max(1e-300) {
                continue;
            }
            let z = newton_polish(sys, &z, 30);
            if scaled_residual(sys, &z) > 1e-6 {
                continue;
            }
            if !found.iter().any(|o| same_point(&o.point, &z, 1e-6)) {
                found.push(finish_root(sys, z, None));
            }
        }
        let simple = found.iter().filter(|r| r.nondegenerate).count();
        let degenerate = found.len() - simple;
        for r in found.iter_mut().filter(|r| !r.nondegenerate) {
            if degenerate == 1 && k > simple {
                r.multiplicity = Some(k - simple);
            }
        }
        roots.extend(found);
    }
    Ok(TorusSolution { method: SolveMethod::Resultant, roots: dedup_roots(roots, eps), eliminant: Some(eliminant) })
}

fn clean(c: Complex64) -> Complex64 {
    let f = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
    Complex64::new(f(c.re), f(c.im))
}

/// Total-degree homotopy `H = (1−t)γ G + t F` with `G_i = x_i^{d_i} − 1`,
/// tracked by an Euler predictor and Newton corrector with adaptive steps.
fn solve_homotopy(sys: &[CPoly], eps: f64) -> Result<TorusSolution> {
    let f: Vec<CPoly> = sys.iter().map(CPoly::cleared).collect();
    let degs: Vec<i64> = f.iter().map(CPoly::total_degree).collect();
    let total: i64 = degs.iter().product();
    if total > 200_000 {
        return Err(Error::EliminationFailed(format!("{total} homotopy paths exceed the budget")));
    }
    let gamma = Complex64::from_polar(1.0, 0.918_273_645);
    let mut ends = Vec::new();
    for idx in 0..total {
        let mut rem = idx;
        let start: Vec<Complex64> = degs
            .iter()
            .map(|&d| {
                let k = rem % d;
                rem /= d;
                Complex64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)
            })
            .collect();
        if let Some(x) = track_path(&f, &degs, gamma, start) {
            if x.iter().all(|z| z.norm() > 1e-8 && z.norm() < 1e8) {
                ends.push(x);
            }
        }
    }
    let mut roots: Vec<TorusRoot> = Vec::new();
    for x in ends {
        let x = newton_polish(sys, &x, 20);
        if scaled_residual(sys, &x) > 1e-6 {
            continue;
        }
        match roots.iter_mut().find(|r| same_point(&r.point, &x, 1e-5)) {
            Some(r) if !r.nondegenerate => {
                r.multiplicity = None;
            }
            Some(_) => {}
            None => roots.push(finish_root(sys, x, None)),
        }
    }
    Ok(TorusSolution { method: SolveMethod::Homotopy, roots: dedup_roots(roots, eps), eliminant: None })
}

fn homotopy_eval(
    f: &[CPoly],
    degs: &[i64],
    gamma: Complex64,
    x: &[Complex64],
    t: f64,
) -> (nalgebra::DVector<Complex64>, DMatrix<Complex64>, nalgebra::DVector<Complex64>) {
    let n = x.len();
    let mut h = nalgebra::DVector::zeros(n);
    let mut jx = DMatrix::zeros(n, n);
    let mut ht = nalgebra::DVector::zeros(n);
    for i in 0..n {
        let d = degs[i] as i32;
        let g = x[i].powi(d) - ONE;
        let fv = f[i].eval(x);
        h[i] = gamma * (1.0 - t) * g + fv * t;
        ht[i] = fv - gamma * g;
        // ∂F/∂x_j from the logarithmic gradient
        let lg = f[i].log_gradient(x);
        for j in 0..n {
            let df = if x[j].norm() > 0.0 { lg[j] / x[j] } else { partial_at_zero(&f[i], x, j) };
            jx[(i, j)] = df * t;
        }
        jx[(i, i)] += gamma * (1.0 - t) * x[i].powi(d - 1) * d as f64;
    }
    (h, jx, ht)
}

fn partial_at_zero(f: &CPoly, x: &[Complex64], j: usize) -> Complex64 {
    f.terms()
        .filter(|(a, _)| a[j] > 0)
        .map(|(a, c)| {
            let mut b = a.clone();
            b[j] -= 1;
            c * a[j] as f64 * CPoly::monomial_value(&b, x)
        })
        .sum()
}

fn track_path(f: &[CPoly], degs: &[i64], gamma: Complex64, start: Vec<Complex64>) -> Option<Vec<Complex64>> {
    let mut x = start;
    let mut t = 0.0f64;
    let mut dt = 0.02f64;
    let mut steps = 0;
    while t < 1.0 {
        steps += 1;
        if steps > 20_000 || dt < 1e-12 {
            return None;
        }
        let step = dt.min(1.0 - t);
        let (_, jx, ht) = homotopy_eval(f, degs, gamma, &x, t);
        let lu = jx.lu();
        let Some(dx) = lu.solve(&(-ht)) else { return None };
        let mut y: Vec<Complex64> = x.iter().zip(dx.iter()).map(|(a, b)| a + b * step).collect();
        let t1 = t + step;
        let mut ok = false;
        for _ in 0..6 {
            let (h, jx, _) = homotopy_eval(f, degs, gamma, &y, t1);
            let Some(corr) = jx.lu().solve(&h) else { break };
            let norm_y = y.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for (a, b) in y.iter_mut().zip(corr.iter()) {
                *a -= b;
            }
            if corr.norm() < 1e-10 * norm_y {
                ok = true;
                break;
            }
        }
        if ok {
            x = y;
            t = t1;
            dt = (dt * 1.5).min(0.1);
            if x.iter().any(|z| z.norm() > 1e10) {
                return None;
            }
        } else {
            dt *= 0.5;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn poly(n: usize, terms: &[(&[i64], f64)]) -> CPoly {
        CPoly::from_terms(n, terms.iter().map(|(a, x)| (a.to_vec(), c(*x))))
    }

    #[test]
    fn double_roots_of_a_symmetric_eliminant() {
        let mut roots = univariate_roots(&[c(1.0), c(0.0), c(-2.0), c(0.0), c(1.0)]);
        assert_eq!(roots.len(), 4);
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (z, want) in roots.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((z - want).norm() < 1e-6, "{roots:?}");
        }
    }

    #[test]
    fn taylor_shift_evaluates_at_offset() {
        let p = [c(2.0), c(-3.0), c(0.5), c(1.0)];
        let s = Complex64::new(0.3, -0.7);
        let q = taylor_shift(&p, s);
        for y in [c(0.0), c(1.5), Complex64::new(-0.2, 0.9)] {
            assert!((horner(&q, y).0 - horner(&p, y + s).0).norm() < 1e-12);
        }
        assert_eq!(durand_kerner(&[c(-1.0), c(0.0), c(1.0)]).len(), 2);
    }

    fn has(roots: &[TorusRoot], p: &[Complex64]) -> bool {
        roots.iter().any(|r| same_point(&r.point, p, 1e-9))
    }

    #[test]
    fn square_roots_of_one() {
        let s = solve_torus(&[poly(1, &[(&[2], 1.0), (&[0], -1.0)])], DEFAULT_SOLUTION_EPS).unwrap();
        assert_eq!(s.roots.len(), 2);
        assert!(has(&s.roots, &[c(1.0)]) && has(&s.roots, &[c(-1.0)]));
    }

    #[test]
    fn quartic_roots() {
        let roots = univariate_roots(&[c(-1.0), c(0.0), c(0.0), c(1.0), c(1.0)]);
        assert_eq!(roots.len(), 4);
        for z in &roots {
            assert!((z.powi(4) + z.powi(3) - 1.0).norm() < 1e-13);
        }
    }

    #[test]
    fn double_root_multiplicity() {
        // (y − 2)² y⁻¹
        let f = poly(1, &[(&[1], 1.0), (&[0], -4.0), (&[-1], 4.0)]);
        let s = solve_torus(&[f], DEFAULT_SOLUTION_EPS).unwrap();
        assert_eq!(s.roots.len(), 1);
        assert_eq!(s.roots[0].multiplicity, Some(2));
        assert!(!s.roots[0].nondegenerate);
        assert!((s.roots[0].point[0] - 2.0).norm() < 1e-6);
    }

    #[test]
    fn binomial_cpn() {
        for n in 1..=4usize {
            let sys: Vec<CPoly> = (0..n)
                .map(|i| {
                    let mut a = vec![0; n];
                    a[i] = 1;
                    CPoly::from_terms(n, [(a, c(1.0)), (vec![-1; n], c(-1.0))])
                })
                .collect();
            let s = solve_torus(&sys, DEFAULT_SOLUTION_EPS).unwrap();
            assert_eq!(s.method, if n == 1 { SolveMethod::Univariate } else { SolveMethod::Binomial });
            assert_eq!(s.roots.len(), n + 1);
            for k in 0..=n {
                let z = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / (n + 1) as f64);
                assert!(has(&s.roots, &vec![z; n]), "n={n} k={k}");
            }
            assert!(s.roots.iter().all(|r| r.nondegenerate));
        }
    }

    #[test]
    fn resultant_eliminant() {
        // monotone blow-up initial system: 1 − y1⁻² y2⁻¹ and 1 − y1⁻¹ y2⁻² − y2⁻²
        let p = poly(2, &[(&[0, 0], 1.0), (&[-2, -1], -1.0)]);
        let q = poly(2, &[(&[0, 0], 1.0), (&[-1, -2], -1.0), (&[0, -2], -1.0)]);
        let s = solve_torus(&[p, q], DEFAULT_SOLUTION_EPS).unwrap();
        assert_eq!(s.method, SolveMethod::Resultant);
        let e = s.eliminant.unwrap();
        let want = [c(-1.0), c(0.0), c(0.0), c(1.0), c(1.0)];
        assert_eq!(e.len(), 5);
        for (a, b) in e.iter().zip(want) {
            assert!((a - b).norm() < 1e-9, "{e:?}");
        }
        assert_eq!(s.roots.len(), 4);
        assert!(s.roots.iter().all(|r| r.nondegenerate && r.multiplicity == Some(1)));
    }

    #[test]
    fn positive_dimensional() {
        let p = poly(2, &[(&[0, 0], 1.0), (&[0, -2], -1.0)]);
        let q = poly(2, &[(&[0, 0], 1.0), (&[0, 1], 1.0)]);
        assert_eq!(solve_torus(&[p, q], DEFAULT_SOLUTION_EPS), Err(Error::PositiveDimensionalInitialLocus));
        let b1 = poly(2, &[(&[1, 1], 1.0), (&[0, 0], -1.0)]);
        let b2 = poly(2, &[(&[2, 2], 1.0), (&[0, 0], -1.0)]);
        assert_eq!(solve_torus(&[b1, b2], DEFAULT_SOLUTION_EPS), Err(Error::PositiveDimensionalInitialLocus));
    }

    #[test]
    fn homotopy_three_variables() {
        // x + y + z = 3, xy = 1, xyz = 1; the first equation is not a binomial
        let f1 = poly(3, &[(&[1, 0, 0], 1.0), (&[0, 1, 0], 1.0), (&[0, 0, 1], 1.0), (&[0, 0, 0], -3.0)]);
        let f2 = poly(3, &[(&[1, 1, 0], 1.0), (&[0, 0, 0], -1.0)]);
        let f3 = poly(3, &[(&[1, 1, 1], 1.0), (&[0, 0, 0], -1.0)]);
        let s = solve_torus(&[f1, f2, f3], DEFAULT_SOLUTION_EPS).unwrap();
        assert_eq!(s.method, SolveMethod::Homotopy);
        // z = 1, x + y = 2, xy = 1 → x = y = 1 (a double root)
        assert_eq!(s.roots.len(), 1);
        assert!(same_point(&s.roots[0].point, &[c(1.0), c(1.0), c(1.0)], 1e-5));
        assert!(!s.roots[0].nondegenerate);

        let g1 = poly(3, &[(&[1, 0, 0], 1.0), (&[0, 1, 0], 1.0), (&[0, 0, 1], 1.0), (&[0, 0, 0], -6.0)]);
        let g2 = poly(3, &[(&[1, 1, 0], 1.0), (&[0, 1, 1], 1.0), (&[1, 0, 1], 1.0), (&[0, 0, 0], -11.0)]);
        let g3 = poly(3, &[(&[1, 1, 1], 1.0), (&[0, 0, 0], -6.0)]);
        let s = solve_torus(&[g1, g2, g3], DEFAULT_SOLUTION_EPS).unwrap();
        // permutations of (1, 2, 3)
        assert_eq!(s.roots.len(), 6);
        assert!(has(&s.roots, &[c(3.0), c(1.0), c(2.0)]));
        assert!(s.roots.iter().all(|r| r.nondegenerate));
    }

    #[test]
    fn monomial_equation_has_no_roots() {
        let s = solve_torus(&[poly(1, &[(&[3], 2.0)])], DEFAULT_SOLUTION_EPS).unwrap();
        assert!(s.roots.is_empty());
    }
}
