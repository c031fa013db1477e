//! Critical points of the potential over the Novikov field.
//!
//! The pipeline enumerates candidate valuation vectors `u ∈ Int P` where every
//! critical equation has at least two monomials of minimal `𝔳_T^u`, solves
//! the initial system (the `T⁰` part in the frame `ȳ = T^{−u} y`) over `ℂ*`,
//! and lifts each nondegenerate solution by Newton's method in `Λ₀`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Potential};
use crate::linalg::{affine_solve, dot_int_rat, int_to_rat, rank, solve_unique};
use crate::novikov::NovikovScalar;
use crate::polysys::{self, CPoly, TorusRoot, TorusSolution, DEFAULT_SOLUTION_EPS};
use crate::polytope::{subsets, MomentPolytope};
use crate::rational::{display_rational, int, serde_rational_mat, serde_rational_vec, to_f64, Extended, Rational};

/// Largest supported dimension.
pub const MAX_DIM: usize = 4;

/// Residual coefficients below this, relative to the largest term they
/// collect, count as zero in the Newton lift.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// The logarithmic derivatives `y_i ∂PO/∂y_i`.
pub fn critical_system(w: &Potential) -> Vec<LaurentPoly> {
    (0..w.dim()).map(|i| w.log_derivative(i).expect("index below dimension")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellKind {
    Point,
    Region,
}

/// A piece of the locus where every equation's minimum valuation is attained
/// at least twice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TropicalCell {
    pub kind: CellKind,
    pub dim: usize,
    /// The point itself, or the centroid of the region's vertices.
    #[serde(with = "serde_rational_vec")]
    pub sample: Vec<Rational>,
    /// Vertices of the closed region (the point for a point cell).
    #[serde(with = "serde_rational_mat")]
    pub vertices: Vec<Vec<Rational>>,
    /// Per equation, the exponents of the monomials attaining the minimum at
    /// the sample point.
    pub tie_pattern: Vec<Vec<Vec<i64>>>,
}

impl TropicalCell {
    pub fn label(&self) -> String {
        let s: Vec<String> = self.sample.iter().map(display_rational).collect();
        format!("({})", s.join(", "))
    }
}

/// Exponents and coefficient valuations of an equation's terms.
fn term_data(f: &LaurentPoly) -> Vec<(Vec<i64>, Rational)> {
    f.terms()
        .filter_map(|(a, c)| c.valuation().finite().map(|v| (a.clone(), v.clone())))
        .collect()
}

fn term_val(t: &(Vec<i64>, Rational), u: &[Rational]) -> Rational {
    dot_int_rat(&t.0, u) + &t.1
}

fn tie_pattern(eqs: &[Vec<(Vec<i64>, Rational)>], u: &[Rational]) -> Option<Vec<Vec<Vec<i64>>>> {
    let mut pattern = Vec::with_capacity(eqs.len());
    for terms in eqs {
        let vals: Vec<Rational> = terms.iter().map(|t| term_val(t, u)).collect();
        let min = vals.iter().min()?;
        let at_min: Vec<Vec<i64>> =
            terms.iter().zip(&vals).filter(|(_, v)| *v == min).map(|(t, _)| t.0.clone()).collect();
        if at_min.len() < 2 {
            return None;
        }
        pattern.push(at_min);
    }
    Some(pattern)
}

/// Candidate cells inside `Int P`, points first (sorted), then regions.
pub fn tropical_candidates(system: &[LaurentPoly], p: &MomentPolytope) -> Result<Vec<TropicalCell>> {
    let n = p.dim;
    if n > MAX_DIM {
        return Err(Error::DimensionUnsupported(n, MAX_DIM));
    }
    if system.len() != n {
        return Err(Error::EliminationFailed(format!("{} equations in {n} variables", system.len())));
    }
    let eqs: Vec<Vec<(Vec<i64>, Rational)>> = system.iter().map(term_data).collect();
    if eqs.iter().any(|t| t.len() < 2) {
        return Ok(Vec::new());
    }
    let pairs: Vec<Vec<(usize, usize)>> = eqs
        .iter()
        .map(|t| (0..t.len()).flat_map(|a| (a + 1..t.len()).map(move |b| (a, b))).collect())
        .collect();
    let mut points: BTreeSet<Vec<Rational>> = BTreeSet::new();
    let mut regions: Vec<TropicalCell> = Vec::new();
    let total: usize = pairs.iter().map(Vec::len).product();
    for idx in 0..total {
        let mut rem = idx;
        let mut rows = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        let mut chosen = Vec::with_capacity(n);
        for (i, pl) in pairs.iter().enumerate() {
            let (a, b) = pl[rem % pl.len()];
            rem /= pl.len();
            let (ta, tb) = (&eqs[i][a], &eqs[i][b]);
            rows.push(int_to_rat(&ta.0.iter().zip(&tb.0).map(|(x, y)| x - y).collect::<Vec<_>>()));
            rhs.push(&tb.1 - &ta.1);
            chosen.push(a);
        }
        let Some((u0, basis)) = affine_solve(&rows, &rhs) else { continue };
        if basis.is_empty() {
            if p.is_interior(&u0) && tie_pattern(&eqs, &u0).is_some() {
                points.insert(u0);
            }
            continue;
        }
        if let Some(cell) = region_cell(&eqs, &chosen, p, &u0, &basis) {
            match cell.kind {
                CellKind::Point => {
                    points.insert(cell.sample);
                }
                CellKind::Region => {
                    if !regions.iter().any(|r| r.vertices == cell.vertices) {
                        regions.push(cell);
                    }
                }
            }
        }
    }
    let mut cells: Vec<TropicalCell> = points
        .into_iter()
        .map(|u| TropicalCell {
            kind: CellKind::Point,
            dim: 0,
            tie_pattern: tie_pattern(&eqs, &u).expect("checked above"),
            vertices: vec![u.clone()],
            sample: u,
        })
        .collect();
    regions.sort_by(|a, b| (a.dim, &a.sample).cmp(&(b.dim, &b.sample)));
    cells.extend(regions);
    Ok(cells)
}

/// The closed region `{u0 + N t}` on which the chosen monomial of each
/// equation is minimal, intersected with `P`.
fn region_cell(
    eqs: &[Vec<(Vec<i64>, Rational)>],
    chosen: &[usize],
    p: &MomentPolytope,
    u0: &[Rational],
    basis: &[Vec<Rational>],
) -> Option<TropicalCell> {
    let n = u0.len();
    let k = basis.len();
    // constraints g·t + h ≥ 0
    let mut cons: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let lin = |v: &[i64]| -> (Vec<Rational>, Rational) {
        (basis.iter().map(|b| dot_int_rat(v, b)).collect(), dot_int_rat(v, u0))
    };
    for f in &p.facets {
        let (g, h) = lin(&f.normal);
        cons.push((g, h + &f.constant));
    }
    for (terms, &c) in eqs.iter().zip(chosen) {
        for (r, t) in terms.iter().enumerate() {
            if r == c {
                continue;
            }
            // val_r(u) − val_c(u) ≥ 0
            let d: Vec<i64> = t.0.iter().zip(&terms[c].0).map(|(x, y)| x - y).collect();
            let (g, h) = lin(&d);
            cons.push((g, h + &t.1 - &terms[c].1));
        }
    }
    let mut verts: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for sub in subsets(cons.len(), k) {
        let a: Vec<Vec<Rational>> = sub.iter().map(|&i| cons[i].0.clone()).collect();
        let b: Vec<Rational> = sub.iter().map(|&i| -cons[i].1.clone()).collect();
        let Some(t) = solve_unique(&a, &b) else { continue };
        let feasible = cons.iter().all(|(g, h)| {
            let v: Rational = g.iter().zip(&t).map(|(x, y)| x * y).sum::<Rational>() + h;
            !v.is_negative()
        });
        if feasible {
            let u: Vec<Rational> =
                (0..n).map(|i| &u0[i] + basis.iter().zip(&t).map(|(b, s)| &b[i] * s).sum::<Rational>()).collect();
            verts.insert(u);
        }
    }
    if verts.is_empty() {
        return None;
    }
    let verts: Vec<Vec<Rational>> = verts.into_iter().collect();
    let count = int(verts.len() as i64);
    let sample: Vec<Rational> = (0..n).map(|i| verts.iter().map(|v| v[i].clone()).sum::<Rational>() / &count).collect();
    if !p.is_interior(&sample) {
        return None;
    }
    let pattern = tie_pattern(eqs, &sample)?;
    let diffs: Vec<Vec<Rational>> =
        verts[1..].iter().map(|v| v.iter().zip(&verts[0]).map(|(a, b)| a - b).collect()).collect();
    let dim = if diffs.is_empty() { 0 } else { rank(&diffs) };
    let kind = if dim == 0 { CellKind::Point } else { CellKind::Region };
    Some(TropicalCell { kind, dim, sample, vertices: verts, tie_pattern: pattern })
}

/// Equation `i` rewritten in `ȳ` and divided by its minimal power `T^{S_i}`.
/// Returns `S_i` (`+∞` for a zero equation) and the normalized polynomial,
/// whose coefficients lie in `Λ₀`.
pub fn normalized_equation(f: &LaurentPoly, u: &[Rational]) -> (Extended, LaurentPoly) {
    let g = f.change_frame(u);
    let s = g.valuation_at_u(&vec![Rational::zero(); u.len()]);
    match &s {
        Extended::Finite(v) => {
            let shift = -v.clone();
            let h = LaurentPoly::from_terms(g.nvars(), g.terms().map(|(a, c)| (a.clone(), c.shift(&shift))));
            (s, h)
        }
        Extended::Infinity => (s, g),
    }
}

/// The initial system at `u`: the `T⁰` coefficients of the normalized
/// equations.
pub fn initial_system(system: &[LaurentPoly], u: &[Rational]) -> Vec<CPoly> {
    system
        .iter()
        .map(|f| {
            let (_, h) = normalized_equation(f, u);
            CPoly::from_terms(f.nvars(), h.terms().map(|(a, c)| (a.clone(), c.constant_term())))
        })
        .collect()
}

/// All isolated solutions of an initial system in `(ℂ*)ⁿ`.
pub fn solve_initial(system: &[CPoly]) -> Result<TorusSolution> {
    polysys::solve_torus(system, DEFAULT_SOLUTION_EPS)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    /// `𝔶_i = T^{u_i} ȳ_i`.
    pub y: Vec<NovikovScalar>,
    /// Coordinates in the frame of `u`; valuation zero.
    pub ybar: Vec<NovikovScalar>,
    #[serde(with = "serde_rational_vec")]
    pub u: Vec<Rational>,
    #[serde(with = "complex_list")]
    pub initial: Vec<Complex64>,
    pub nondegenerate: bool,
    /// `None` when unresolved.
    pub multiplicity: Option<usize>,
    /// Lower bound for the valuation of every residual in the `ȳ` frame;
    /// `None` for unlifted (degenerate) points.
    pub residual_valuation: Option<Extended>,
    pub iterations: usize,
}

pub(crate) mod complex_list {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct C {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|c| C { re: c.re, im: c.im }).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        Ok(Vec::<C>::deserialize(d)?.into_iter().map(|c| Complex64::new(c.re, c.im)).collect())
    }
}

type Terms = Vec<(Vec<i64>, NovikovScalar)>;

/// A series `Σ_{k<N} c_k T^{k/L}` truncated at `T^{N/L}`; every exponent met
/// during a lift lies on this grid.
#[derive(Clone, Debug)]
struct Dense(Vec<Complex64>);

impl Dense {
    fn zero(len: usize) -> Self {
        Dense(vec![Complex64::zero(); len])
    }

    fn constant(c: Complex64, len: usize) -> Self {
        let mut d = Dense::zero(len);
        d.0[0] = c;
        d
    }

    fn from_scalar(s: &NovikovScalar, step: &BigInt, len: usize) -> Self {
        let mut d = Dense::zero(len);
        for (e, c) in s.terms() {
            let k = (e * Rational::from_integer(step.clone())).to_integer();
            if let Some(k) = k.to_usize().filter(|&k| k < len) {
                d.0[k] += c;
            }
        }
        d
    }

    /// Coefficients below `RESIDUAL_TOL` times the largest magnitude seen at
    /// lower order are rounding noise: the lift certifies nothing finer.
    fn to_scalar(&self, step: &BigInt, trunc: &Rational) -> NovikovScalar {
        let mut scale = 0.0f64;
        let terms: Vec<(Rational, Complex64)> = self
            .0
            .iter()
            .enumerate()
            .filter_map(|(k, c)| {
                scale = scale.max(c.norm());
                (c.norm() >= RESIDUAL_TOL * scale).then(|| (Rational::new(BigInt::from(k), step.clone()), *c))
            })
            .collect();
        NovikovScalar::from_terms(terms, Extended::Finite(trunc.clone()))
    }

    fn mul(&self, o: &Dense) -> Dense {
        let n = self.0.len();
        let mut out = Dense::zero(n);
        for (i, a) in self.0.iter().enumerate() {
            if *a == Complex64::zero() {
                continue;
            }
            for (j, b) in o.0[..n - i].iter().enumerate() {
                out.0[i + j] += a * b;
            }
        }
        out
    }

    fn add_scaled(&mut self, o: &Dense, k: Complex64) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a += k * b;
        }
    }

    fn inv(&self) -> Result<Dense> {
        let a0 = self.0[0];
        if a0.norm() == 0.0 {
            return Err(Error::DivisionByZero);
        }
        let r = a0.inv();
        let mut b = Dense::zero(self.0.len());
        b.0[0] = r;
        for k in 1..self.0.len() {
            let s: Complex64 = (1..=k).map(|j| self.0[j] * b.0[k - j]).sum();
            b.0[k] = -r * s;
        }
        Ok(b)
    }

    fn valuation(&self, step: &BigInt, tol: f64) -> Extended {
        match self.0.iter().position(|c| c.norm() > tol) {
            Some(k) => Extended::Finite(Rational::new(BigInt::from(k), step.clone())),
            None => Extended::Infinity,
        }
    }
}

/// Solves `A x = b` over `Λ₀` truncated to the grid; pivots on the largest
/// constant term, so `A mod T` must be invertible.
fn dense_solve(mut a: Vec<Vec<Dense>>, mut b: Vec<Dense>) -> Result<Vec<Dense>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&r, &s| a[r][col].0[0].norm().total_cmp(&a[s][col].0[0].norm()))
            .expect("nonempty range");
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].inv().map_err(|_| Error::SingularInitialJacobian(0.0))?;
        for r in col + 1..n {
            let f = a[r][col].mul(&inv);
            for c in col..n {
                let d = f.mul(&a[col][c]);
                a[r][c].add_scaled(&d, -Complex64::new(1.0, 0.0));
            }
            let d = f.mul(&b[col]);
            b[r].add_scaled(&d, -Complex64::new(1.0, 0.0));
        }
    }
    let len = b[0].0.len();
    let mut x = vec![Dense::zero(len); n];
    for r in (0..n).rev() {
        let mut s = b[r].clone();
        for c in r + 1..n {
            s.add_scaled(&a[r][c].mul(&x[c]), -Complex64::new(1.0, 0.0));
        }
        x[r] = s.mul(&a[r][r].inv()?);
    }
    Ok(x)
}

fn dense_pow(base: &Dense, k: u64) -> Dense {
    let mut out = Dense::constant(Complex64::new(1.0, 0.0), base.0.len());
    let mut b = base.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            out = out.mul(&b);
        }
        k >>= 1;
        if k > 0 {
            b = b.mul(&b);
        }
    }
    out
}

fn min_positive_exponent(eqs: &[Terms]) -> Option<Rational> {
    eqs.iter()
        .flat_map(|t| t.iter())
        .flat_map(|(_, c)| c.terms().iter().map(|(e, _)| e.clone()))
        .filter(|e| e.is_positive())
        .min()
}

/// Lifts a nondegenerate initial root at `u` to a critical point known to
/// relative order `e`.
pub fn newton_lift(w: &Potential, u: &[Rational], initial: &[Complex64], e: &Rational) -> Result<CriticalPoint> {
    newton_lift_system(&critical_system(w), u, initial, e)
}

pub fn newton_lift_system(
    system: &[LaurentPoly],
    u: &[Rational],
    initial: &[Complex64],
    e: &Rational,
) -> Result<CriticalPoint> {
    let n = u.len();
    if initial.len() != n {
        return Err(Error::IndexOutOfRange { index: initial.len(), bound: n });
    }
    let eqs: Vec<Terms> = system
        .iter()
        .map(|f| {
            let (_, h) = normalized_equation(f, u);
            h.terms().map(|(a, c)| (a.clone(), c.truncate(e))).filter(|(_, c)| !c.is_zero()).collect()
        })
        .collect();
    let init_sys: Vec<CPoly> = eqs
        .iter()
        .map(|t| CPoly::from_terms(n, t.iter().map(|(a, c)| (a.clone(), c.constant_term()))))
        .collect();
    let normalized: Vec<CPoly> = init_sys.iter().map(|f| f.normalized(1e-12)).collect();
    let det = polysys::log_jacobian(&normalized, initial).determinant().norm();
    if det < polysys::DEGENERACY_EPS {
        return Err(Error::SingularInitialJacobian(det));
    }
    let exps: Vec<Vec<i64>> = {
        let mut s: BTreeSet<Vec<i64>> = BTreeSet::new();
        for t in &eqs {
            s.extend(t.iter().map(|(a, _)| a.clone()));
        }
        s.into_iter().collect()
    };
    let budget = match min_positive_exponent(&eqs) {
        Some(rho) => 2 * (to_f64(e) / to_f64(&rho)).log2().ceil().max(0.0) as usize + 8,
        None => 8,
    };
    let step = eqs
        .iter()
        .flatten()
        .flat_map(|(_, c)| c.terms().iter().map(|(x, _)| x.denom().clone()))
        .fold(e.denom().clone(), |l, d| l.lcm(&d));
    let len = (e * Rational::from_integer(step.clone()))
        .to_integer()
        .to_usize()
        .filter(|&l| l > 0)
        .ok_or_else(|| Error::OutsideDomain(format!("truncation order {e} must be positive")))?;
    let coeffs: Vec<Vec<(usize, Dense)>> = eqs
        .iter()
        .map(|t| {
            t.iter()
                .map(|(a, c)| (exps.binary_search(a).expect("exponent registered"), Dense::from_scalar(c, &step, len)))
                .collect()
        })
        .collect();
    let mut y: Vec<Dense> = initial.iter().map(|&c| Dense::constant(c, len)).collect();
    let mut iterations = 0;
    loop {
        let inv: Vec<Dense> = y.iter().map(Dense::inv).collect::<Result<_>>()?;
        let mono: Vec<Dense> = exps
            .iter()
            .map(|a| {
                a.iter().enumerate().filter(|(_, &k)| k != 0).fold(
                    Dense::constant(Complex64::new(1.0, 0.0), len),
                    |m, (i, &k)| m.mul(&dense_pow(if k > 0 { &y[i] } else { &inv[i] }, k.unsigned_abs())),
                )
            })
            .collect();
        let mut f = Vec::with_capacity(n);
        let mut jac = Vec::with_capacity(n);
        let mut converged = true;
        for (t, cs) in eqs.iter().zip(&coeffs) {
            // terms that cancel exactly leave floating-point residue of the
            // size of the terms themselves
            let mut mag = vec![1.0f64; len];
            let mut fi = Dense::zero(len);
            let mut row = vec![Dense::zero(len); n];
            for ((a, _), (idx, c)) in t.iter().zip(cs) {
                let v = c.mul(&mono[*idx]);
                for (j, &k) in a.iter().enumerate() {
                    if k != 0 {
                        row[j].add_scaled(&v, Complex64::new(k as f64, 0.0));
                    }
                }
                fi.add_scaled(&v, Complex64::new(1.0, 0.0));
                for (m, c) in mag.iter_mut().zip(&v.0) {
                    *m = m.max(c.norm());
                }
            }
            converged &= fi.0.iter().zip(&mag).all(|(c, m)| c.norm() <= RESIDUAL_TOL * m);
            f.push(fi);
            jac.push(row);
        }
        if converged {
            break;
        }
        if iterations >= budget {
            let residual = f.iter().map(|r| r.valuation(&step, RESIDUAL_TOL)).min().unwrap_or(Extended::Infinity);
            return Err(Error::NoConvergence { iterations, residual: residual.to_string() });
        }
        let delta = dense_solve(jac, f)?;
        y = y
            .iter()
            .zip(&delta)
            .map(|(yi, d)| {
                let mut r = yi.clone();
                r.add_scaled(&yi.mul(d), -Complex64::new(1.0, 0.0));
                r
            })
            .collect();
        iterations += 1;
    }
    let y: Vec<NovikovScalar> = y.iter().map(|d| d.to_scalar(&step, e)).collect();
    let ybar = y;
    let yfull: Vec<NovikovScalar> = ybar.iter().zip(u).map(|(v, ui)| v.shift(ui)).collect();
    Ok(CriticalPoint {
        y: yfull,
        ybar,
        u: u.to_vec(),
        initial: initial.to_vec(),
        nondegenerate: true,
        multiplicity: Some(1),
        residual_valuation: Some(Extended::Finite(e.clone())),
        iterations,
    })
}

/// A degenerate initial root reported without lifting: only the leading
/// coefficients are known.
fn unlifted_point(system: &[LaurentPoly], u: &[Rational], root: &TorusRoot) -> CriticalPoint {
    let eqs: Vec<Terms> = system
        .iter()
        .map(|f| normalized_equation(f, u).1.terms().map(|(a, c)| (a.clone(), c.clone())).collect())
        .collect();
    let m = root.multiplicity.unwrap_or(1).max(1) as i64;
    let known = match min_positive_exponent(&eqs) {
        Some(rho) => rho / int(m),
        None => int(1),
    };
    let ybar: Vec<NovikovScalar> = root
        .point
        .iter()
        .map(|&c| NovikovScalar::constant(c).with_trunc(Extended::Finite(known.clone())))
        .collect();
    CriticalPoint {
        y: ybar.iter().zip(u).map(|(v, ui)| v.shift(ui)).collect(),
        ybar,
        u: u.to_vec(),
        initial: root.point.clone(),
        nondegenerate: false,
        multiplicity: root.multiplicity,
        residual_valuation: None,
        iterations: 0,
    }
}

/// The initial system at a point cell and its solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSolution {
    pub cell: TropicalCell,
    pub system: Vec<CPoly>,
    /// `None` when the initial locus is positive-dimensional.
    pub solution: Option<TorusSolution>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub points: Vec<CriticalPoint>,
    pub cells: Vec<CellSolution>,
    /// Regions and points whose initial locus is positive-dimensional; these
    /// are left to the leading-term analysis.
    pub positive_dimensional: Vec<TropicalCell>,
    #[serde(with = "crate::rational::serde_rational")]
    pub truncation: Rational,
}

impl CriticalReport {
    /// Sum of multiplicities, `None` if any is unresolved.
    pub fn count_with_multiplicity(&self) -> Option<usize> {
        self.points.iter().map(|p| p.multiplicity).sum()
    }

    pub fn is_morse(&self) -> bool {
        self.points.iter().all(|p| p.nondegenerate)
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Relative truncation order of the lift; the potential's own order when
    /// `None`.
    pub truncation: Option<Rational>,
    pub parallel: bool,
    /// Distance below which two initial roots are identified.
    pub solution_eps: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { truncation: None, parallel: true, solution_eps: DEFAULT_SOLUTION_EPS }
    }
}

fn point_key(p: &CriticalPoint) -> (Vec<Rational>, Vec<(i64, i64)>) {
    let arg = |z: &Complex64| {
        let a = if z.im.abs() < 1e-9 && z.re > 0.0 { 0.0 } else { z.arg().rem_euclid(2.0 * std::f64::consts::PI) };
        ((a * 1e6).round() as i64, (z.norm() * 1e6).round() as i64)
    };
    (p.u.clone(), p.initial.iter().map(arg).collect())
}

fn solve_cell(
    system: &[LaurentPoly],
    cell: &TropicalCell,
    e: &Rational,
    eps: f64,
) -> Result<(CellSolution, Vec<CriticalPoint>)> {
    let init = initial_system(system, &cell.sample);
    let solution = match polysys::solve_torus(&init, eps) {
        Ok(s) => s,
        Err(Error::PositiveDimensionalInitialLocus) => {
            return Ok((CellSolution { cell: cell.clone(), system: init, solution: None }, Vec::new()));
        }
        Err(err) => return Err(err),
    };
    let mut points = Vec::with_capacity(solution.roots.len());
    for root in &solution.roots {
        if root.nondegenerate {
            let mut cp = newton_lift_system(system, &cell.sample, &root.point, e)?;
            cp.multiplicity = root.multiplicity;
            points.push(cp);
        } else {
            points.push(unlifted_point(system, &cell.sample, root));
        }
    }
    Ok((CellSolution { cell: cell.clone(), system: init, solution: Some(solution) }, points))
}

/// Full pipeline: candidates, initial systems, lifting.
pub fn find_critical_points(w: &Potential, opts: &SolveOptions) -> Result<CriticalReport> {
    let n = w.dim();
    if n > MAX_DIM {
        return Err(Error::DimensionUnsupported(n, MAX_DIM));
    }
    let e = opts.truncation.clone().unwrap_or_else(|| w.truncation().clone());
    let system = critical_system(w);
    let cells = tropical_candidates(&system, w.polytope())?;
    let (point_cells, region_cells): (Vec<TropicalCell>, Vec<TropicalCell>) =
        cells.into_iter().partition(|c| c.kind == CellKind::Point);
    let solved: Vec<Result<(CellSolution, Vec<CriticalPoint>)>> = if opts.parallel {
        point_cells.par_iter().map(|c| solve_cell(&system, c, &e, opts.solution_eps)).collect()
    } else {
        point_cells.iter().map(|c| solve_cell(&system, c, &e, opts.solution_eps)).collect()
    };
    let mut cells_out = Vec::new();
    let mut points = Vec::new();
    let mut leftovers = Vec::new();
    for r in solved {
        let (cs, pts) = r?;
        if cs.solution.is_none() {
            leftovers.push(cs.cell.clone());
        }
        cells_out.push(cs);
        points.extend(pts);
    }
    leftovers.extend(region_cells);
    points.sort_by_key(point_key);
    Ok(CriticalReport { points, cells: cells_out, positive_dimensional: leftovers, truncation: e })
}
