//! The leading term equation at a fixed `u ∈ Int P`.
//!
//! Facets are grouped into levels by the value of `ℓ_j(u)`. The normals of
//! the first `l` levels span `𝔸_l^⊥`; an integral basis `e*_{l,s}` adapted to
//! this filtration turns the level-`l` part of `PO₀` into a Laurent
//! polynomial in the variables `ȳ_{l′,s}`, `l′ ≤ l`. The equations of level
//! `l` are its logarithmic derivatives in the level-`l` variables only, so
//! the system is solved level by level.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{column_echelon, int_to_rat, row_reduce};
use crate::polysys::{self, CPoly, DEFAULT_SOLUTION_EPS};
use crate::polytope::{subsets, BulkCoefficients, MomentPolytope};
use crate::rational::{display_rational, serde_rational, serde_rational_mat, serde_rational_vec, Rational};

/// Coefficients cancelling below this fraction of the terms they collect
/// are treated as zero after substituting earlier levels.
pub const CANCEL_TOL: f64 = 1e-9;

/// Value given to a free variable when a later level needs it numerically.
pub fn generic_value() -> Complex64 {
    Complex64::from_polar(1.0, 0.918273645)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Level {
    #[serde(with = "serde_rational")]
    pub value: Rational,
    /// Facet indices `j(l, r)`, increasing.
    pub facets: Vec<usize>,
}

fn point_label(u: &[Rational]) -> String {
    format!("({})", u.iter().map(display_rational).collect::<Vec<_>>().join(", "))
}

/// Groups the facet values `ℓ_j(u)` into strictly increasing levels.
pub fn order_levels(p: &MomentPolytope, u: &[Rational]) -> Result<Vec<Level>> {
    if !p.is_interior(u) {
        return Err(Error::NotInterior(point_label(u)));
    }
    let mut groups: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    for (j, v) in p.ell_all(u).into_iter().enumerate() {
        groups.entry(v).or_default().push(j);
    }
    Ok(groups.into_iter().map(|(value, facets)| Level { value, facets }).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filtration {
    /// Reduced row echelon basis of `𝔸_l^⊥`, per level.
    #[serde(with = "nested_rational_mat")]
    pub spaces: Vec<Vec<Vec<Rational>>>,
    /// `d(l)`, per level (zero beyond `K`).
    pub dims: Vec<usize>,
    /// Smallest level count whose normals span everything.
    pub k: usize,
}

mod nested_rational_mat {
    use super::{serde_rational_mat, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct W(#[serde(with = "serde_rational_mat")] Vec<Vec<Rational>>);

    pub fn serialize<S: Serializer>(v: &[Vec<Vec<Rational>>], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|m| W(m.clone())).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Vec<Rational>>>, D::Error> {
        Ok(Vec::<W>::deserialize(d)?.into_iter().map(|w| w.0).collect())
    }
}

/// The incremental spans of the normals, level by level.
pub fn build_filtration(p: &MomentPolytope, levels: &[Level]) -> Filtration {
    let n = p.dim;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut spaces = Vec::with_capacity(levels.len());
    let mut dims = Vec::with_capacity(levels.len());
    let mut prev = 0;
    let mut k = levels.len();
    for (l, level) in levels.iter().enumerate() {
        rows.extend(level.facets.iter().map(|&j| int_to_rat(&p.facets[j].normal)));
        let (rref, pivots) = row_reduce(rows.clone());
        let r = pivots.len();
        spaces.push(rref.into_iter().take(r).collect());
        dims.push(r - prev);
        if r == n && prev < n {
            k = l + 1;
        }
        prev = r;
    }
    Filtration { spaces, dims, k }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdaptedBasis {
    /// Rows `e*_{l,s}` in level order: the coefficients `b_{l,s;j}`.
    pub basis: Vec<Vec<i64>>,
    /// Inverse of `basis`: `ȳ_j = Π_k ȳ_{(k)}^{inverse[j][k]}`.
    pub inverse: Vec<Vec<i64>>,
    /// Per facet `j`, the integers `c` with `v_j = Σ_k c_k e*_k`.
    pub change: Vec<Vec<i64>>,
    /// Level of each basis vector (0-based).
    pub var_level: Vec<usize>,
}

/// A basis of `ℤⁿ` whose first `d(1) + … + d(l)` vectors span the saturated
/// lattice `𝔸_l^⊥ ∩ ℤⁿ`, from the column-style Hermite form of the normals
/// stacked level by level.
pub fn adapted_basis(p: &MomentPolytope, levels: &[Level], filt: &Filtration) -> Result<AdaptedBasis> {
    let n = p.dim;
    let order: Vec<usize> = levels.iter().flat_map(|l| l.facets.iter().copied()).collect();
    let rows: Vec<Vec<i64>> = order.iter().map(|&j| p.facets[j].normal.clone()).collect();
    let ce = column_echelon(&rows, n);
    if ce.rank != n {
        return Err(Error::IntegralityFailure(format!("normals have rank {} < {n}", ce.rank)));
    }
    let mut var_level = Vec::with_capacity(n);
    for (l, &d) in filt.dims.iter().enumerate() {
        var_level.extend(std::iter::repeat_n(l, d));
    }
    let mut change = vec![Vec::new(); p.facet_count()];
    let mut row = 0;
    let mut span = 0;
    for (l, level) in levels.iter().enumerate() {
        span += filt.dims[l];
        for &j in &level.facets {
            let c = ce.reduced[row].clone();
            row += 1;
            if c[span..].iter().any(|&x| x != 0) {
                return Err(Error::IntegralityFailure(format!("normal of facet {j} leaves the level-{} span", l + 1)));
            }
            let back: Vec<i64> = (0..n).map(|i| (0..n).map(|k| c[k] * ce.inverse[k][i]).sum()).collect();
            if back != p.facets[j].normal {
                return Err(Error::IntegralityFailure(format!("facet {j}: {c:?} does not reproduce the normal")));
            }
            change[j] = c;
        }
    }
    Ok(AdaptedBasis { basis: ce.inverse, inverse: ce.transform, change, var_level })
}

/// The leading term equation at `u`. Immutable once built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LteSystem {
    #[serde(with = "serde_rational_vec")]
    pub u: Vec<Rational>,
    pub levels: Vec<Level>,
    pub filtration: Filtration,
    pub basis: AdaptedBasis,
    /// `(PO₀)_l` for `l ≤ K`, in the variables `ȳ_{(k)}`.
    pub level_polys: Vec<CPoly>,
    /// The `n` equations in variable order.
    pub equations: Vec<CPoly>,
}

impl LteSystem {
    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// `K`.
    pub fn k(&self) -> usize {
        self.filtration.k
    }

    /// `K₀`.
    pub fn k0(&self) -> usize {
        self.levels.len()
    }

    /// Variable indices belonging to level `l` (0-based).
    pub fn level_vars(&self, l: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&k| self.basis.var_level[k] == l).collect()
    }

    /// True when every equation involves only variables of its own or an
    /// earlier level.
    pub fn is_triangular(&self) -> bool {
        self.equations.iter().enumerate().all(|(k, f)| {
            let l = self.basis.var_level[k];
            (0..self.dim()).all(|v| self.basis.var_level[v] <= l || !f.involves(v))
        })
    }
}

impl fmt::Display for LteSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, poly) in self.level_polys.iter().enumerate() {
            writeln!(f, "level {} (S = {}): {}", l + 1, display_rational(&self.levels[l].value), poly.render("w"))?;
            for k in self.level_vars(l) {
                writeln!(f, "  w{} d/dw{}: {} = 0", k + 1, k + 1, self.equations[k].render("w"))?;
            }
        }
        Ok(())
    }
}

/// Builds the leading term equation; the bulk coefficients enter through
/// their values modulo `Λ₊`.
pub fn leading_term_system(p: &MomentPolytope, u: &[Rational], bulk: &BulkCoefficients) -> Result<LteSystem> {
    if bulk.len() != p.facet_count() {
        return Err(Error::ParamOutOfRange(format!("{} bulk coefficients for {} facets", bulk.len(), p.facet_count())));
    }
    let levels = order_levels(p, u)?;
    let filtration = build_filtration(p, &levels);
    let basis = adapted_basis(p, &levels, &filtration)?;
    let c = bulk.leading();
    let n = p.dim;
    let level_polys: Vec<CPoly> = levels[..filtration.k]
        .iter()
        .map(|level| CPoly::from_terms(n, level.facets.iter().map(|&j| (basis.change[j].clone(), c[j]))))
        .collect();
    let equations = (0..n).map(|k| level_polys[basis.var_level[k]].log_derivative(k)).collect();
    Ok(LteSystem { u: u.to_vec(), levels, filtration, basis, level_polys, equations })
}

/// A coordinate of a leading-term solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LteValue {
    Fixed(Complex64),
    /// Unconstrained in `ℂ*`.
    Free,
}

impl LteValue {
    pub fn fixed(&self) -> Option<Complex64> {
        match self {
            LteValue::Fixed(z) => Some(*z),
            LteValue::Free => None,
        }
    }
}

impl fmt::Display for LteValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LteValue::Fixed(z) => write!(f, "{}", crate::novikov::format_complex(*z)),
            LteValue::Free => write!(f, "free"),
        }
    }
}

impl Serialize for LteValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LteValue::Fixed(z) => [z.re, z.im].serialize(s),
            LteValue::Free => s.serialize_str("free"),
        }
    }
}

impl<'de> Deserialize<'de> for LteValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([f64; 2]),
            Word(String),
        }
        match Repr::deserialize(d)? {
            Repr::Pair([re, im]) => Ok(LteValue::Fixed(Complex64::new(re, im))),
            Repr::Word(w) if w == "free" => Ok(LteValue::Free),
            Repr::Word(w) => Err(serde::de::Error::custom(format!("expected [re, im] or \"free\", got {w:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LteSolution {
    /// In the adapted variables `ȳ_{(k)}`.
    pub adapted: Vec<LteValue>,
    /// In the frame coordinates `ȳ_i`; a coordinate is free when it depends
    /// on a free adapted variable.
    pub ybar: Vec<LteValue>,
    /// Free variables that a later level needed numerically; they were set
    /// to [`generic_value`].
    pub sampled: Vec<usize>,
}

impl LteSolution {
    pub fn render(&self) -> String {
        let parts: Vec<String> = self.ybar.iter().enumerate().map(|(i, v)| format!("ybar{} = {v}", i + 1)).collect();
        parts.join(", ")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum LteOutcome {
    Solved { solutions: Vec<LteSolution> },
    /// No branch survives past this level (1-based).
    Unsolvable { level: usize },
}

impl LteOutcome {
    pub fn is_solvable(&self) -> bool {
        matches!(self, LteOutcome::Solved { .. })
    }

    pub fn solutions(&self) -> &[LteSolution] {
        match self {
            LteOutcome::Solved { solutions } => solutions,
            LteOutcome::Unsolvable { .. } => &[],
        }
    }
}

/// Substitutes known variables; coefficients that cancel to within
/// [`CANCEL_TOL`] of the terms they collect are dropped.
fn substitute(f: &CPoly, vals: &[Option<Complex64>]) -> CPoly {
    let mut acc: BTreeMap<Vec<i64>, (Complex64, f64)> = BTreeMap::new();
    for (a, &c) in f.terms() {
        let mut coeff = c;
        let mut rest = a.clone();
        for (k, v) in vals.iter().enumerate() {
            if let Some(z) = v {
                coeff *= z.powi(a[k] as i32);
                rest[k] = 0;
            }
        }
        let e = acc.entry(rest).or_insert((Complex64::new(0.0, 0.0), 0.0));
        e.0 += coeff;
        e.1 = e.1.max(coeff.norm());
    }
    CPoly::from_terms(
        f.nvars(),
        acc.into_iter().filter(|(_, (c, m))| c.norm() > CANCEL_TOL * m).map(|(a, (c, _))| (a, c)),
    )
}

/// Restricts a polynomial to the listed variables (others must not occur).
fn restrict(f: &CPoly, vars: &[usize]) -> CPoly {
    CPoly::from_terms(vars.len(), f.terms().map(|(a, &c)| (vars.iter().map(|&v| a[v]).collect(), c)))
}

fn residual_ok(f: &CPoly, x: &[Complex64]) -> bool {
    f.eval(x).norm() <= 1e-8 * f.abs_scale(x).max(1.0)
}

type Branch = (Vec<Option<Complex64>>, Vec<bool>, Vec<usize>);

/// Solves one level on one branch; returns the extended branches.
fn solve_level(sys: &LteSystem, l: usize, branch: &Branch) -> Result<Vec<Branch>> {
    let n = sys.dim();
    let (vals, free, sampled) = branch;
    let mut vals = vals.clone();
    let mut sampled = sampled.clone();
    let vars = sys.level_vars(l);
    // earlier free variables that occur here are pinned to the generic value
    for k in 0..n {
        if free[k] && vars.iter().any(|&v| sys.equations[v].involves(k)) {
            vals[k] = Some(generic_value());
            sampled.push(k);
        }
    }
    let mut free = free.clone();
    for &k in &sampled {
        free[k] = false;
    }
    let eqs: Vec<CPoly> = vars.iter().map(|&v| substitute(&sys.equations[v], &vals)).filter(|f| !f.is_zero()).collect();
    if eqs.iter().any(|f| !vars.iter().any(|&v| f.involves(v))) {
        // a nonzero constant
        return Ok(Vec::new());
    }
    let involved: Vec<usize> = vars.iter().copied().filter(|&v| eqs.iter().any(|f| f.involves(v))).collect();
    for &v in &vars {
        if !involved.contains(&v) {
            free[v] = true;
        }
    }
    if involved.is_empty() {
        return Ok(vec![(vals, free, sampled)]);
    }
    if involved.len() > eqs.len() {
        return Err(Error::LevelUnderdetermined(l + 1));
    }
    let local: Vec<CPoly> = eqs.iter().map(|f| restrict(f, &involved)).collect();
    let mut roots = None;
    for sub in subsets(local.len(), involved.len()) {
        let square: Vec<CPoly> = sub.iter().map(|&i| local[i].clone()).collect();
        match polysys::solve_torus(&square, DEFAULT_SOLUTION_EPS) {
            Ok(s) => {
                roots = Some(s.roots);
                break;
            }
            Err(Error::PositiveDimensionalInitialLocus) => continue,
            Err(e) => return Err(e),
        }
    }
    let roots = roots.ok_or(Error::LevelUnderdetermined(l + 1))?;
    Ok(roots
        .into_iter()
        .filter(|r| local.iter().all(|f| residual_ok(f, &r.point)))
        .map(|r| {
            let mut v = vals.clone();
            for (&k, &z) in involved.iter().zip(&r.point) {
                v[k] = Some(z);
            }
            (v, free.clone(), sampled.clone())
        })
        .collect())
}

/// Solves the leading term equation level by level.
pub fn solve_lte(sys: &LteSystem) -> Result<LteOutcome> {
    let n = sys.dim();
    let mut branches: Vec<Branch> = vec![(vec![None; n], vec![false; n], Vec::new())];
    for l in 0..sys.k() {
        let mut next = Vec::new();
        for b in &branches {
            next.extend(solve_level(sys, l, b)?);
        }
        if next.is_empty() {
            return Ok(LteOutcome::Unsolvable { level: l + 1 });
        }
        branches = next;
    }
    let inv = &sys.basis.inverse;
    let mut solutions: Vec<LteSolution> = branches
        .into_iter()
        .map(|(vals, free, sampled)| {
            let adapted: Vec<LteValue> = (0..n)
                .map(|k| match vals[k] {
                    Some(z) if !free[k] => LteValue::Fixed(z),
                    _ => LteValue::Free,
                })
                .collect();
            let ybar = (0..n)
                .map(|i| {
                    let mut z = Complex64::new(1.0, 0.0);
                    for (k, a) in adapted.iter().enumerate() {
                        if inv[i][k] == 0 {
                            continue;
                        }
                        match a {
                            LteValue::Fixed(w) => z *= w.powi(inv[i][k] as i32),
                            LteValue::Free => return LteValue::Free,
                        }
                    }
                    LteValue::Fixed(z)
                })
                .collect();
            LteSolution { adapted, ybar, sampled }
        })
        .collect();
    solutions.sort_by(|a, b| solution_key(a).cmp(&solution_key(b)));
    Ok(LteOutcome::Solved { solutions })
}

fn solution_key(s: &LteSolution) -> Vec<(i64, i64)> {
    s.ybar
        .iter()
        .map(|v| match v {
            LteValue::Fixed(z) => ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64),
            LteValue::Free => (i64::MAX, 0),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceVerdict {
    #[serde(with = "serde_rational_vec")]
    pub u: Vec<Rational>,
    pub balanced: bool,
    pub witness: Option<LteSolution>,
    pub solution_count: usize,
    pub obstructing_level: Option<usize>,
}

/// Whether the leading term equation with `𝔠 ≡ 1` has a solution in `(ℂ*)ⁿ`.
pub fn is_strongly_bulk_balanced(p: &MomentPolytope, u: &[Rational]) -> Result<BalanceVerdict> {
    let sys = leading_term_system(p, u, &BulkCoefficients::ones(p.facet_count()))?;
    verdict(&sys)
}

pub fn verdict(sys: &LteSystem) -> Result<BalanceVerdict> {
    let out = solve_lte(sys)?;
    Ok(match out {
        LteOutcome::Solved { solutions } => BalanceVerdict {
            u: sys.u.clone(),
            balanced: true,
            solution_count: solutions.len(),
            witness: solutions.into_iter().next(),
            obstructing_level: None,
        },
        LteOutcome::Unsolvable { level } => BalanceVerdict {
            u: sys.u.clone(),
            balanced: false,
            witness: None,
            solution_count: 0,
            obstructing_level: Some(level),
        },
    })
}

/// Interior points of the `k × k` grid `lo + (i/(k+1))(hi − lo)`,
/// `1 ≤ i ≤ k`, over the bounding box (two dimensions only); `extra` points
/// are appended.
pub fn grid_points(p: &MomentPolytope, k: usize, extra: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    if p.dim != 2 {
        return Err(Error::DimensionUnsupported(p.dim, 2));
    }
    let (lo, hi) = p.bounding_box()?;
    let step = |d: usize, i: usize| &lo[d] + (&hi[d] - &lo[d]) * Rational::new((i as i64).into(), (k as i64 + 1).into());
    let mut pts: Vec<Vec<Rational>> = (1..=k)
        .flat_map(|i| (1..=k).map(move |j| (i, j)))
        .map(|(i, j)| vec![step(0, i), step(1, j)])
        .filter(|u| p.is_interior(u))
        .collect();
    for u in extra {
        if p.is_interior(u) && !pts.contains(u) {
            pts.push(u.clone());
        }
    }
    Ok(pts)
}

/// Verdicts at every grid point, in grid order.
pub fn scan_grid(p: &MomentPolytope, k: usize, extra: &[Vec<Rational>]) -> Result<Vec<BalanceVerdict>> {
    let pts = grid_points(p, k, extra)?;
    pts.par_iter().map(|u| is_strongly_bulk_balanced(p, u)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{blowup1, blowup2, hirzebruch, simplex, Facet};
    use crate::rational::{int, rat};

    fn ones(p: &MomentPolytope) -> BulkCoefficients {
        BulkCoefficients::ones(p.facet_count())
    }

    fn close(v: &LteValue, z: Complex64) -> bool {
        v.fixed().is_some_and(|w| (w - z).norm() < 1e-9)
    }

    #[test]
    fn levels_and_filtration() {
        let f2 = hirzebruch(2, &rat(1, 2)).unwrap().polytope;
        let u = [rat(1, 2), rat(1, 4)];
        let levels = order_levels(&f2, &u).unwrap();
        assert_eq!(levels[0], Level { value: rat(1, 4), facets: vec![1, 3] });
        let filt = build_filtration(&f2, &levels);
        assert_eq!(filt.spaces[0], vec![vec![int(0), int(1)]]);
        assert_eq!(filt.dims, vec![1, 1, 0]);
        assert_eq!(filt.k, 2);

        let cp3 = simplex(3).unwrap().polytope;
        let levels = order_levels(&cp3, &vec![rat(1, 4); 3]).unwrap();
        assert_eq!(levels.len(), 1);
        assert_eq!(levels[0].facets, vec![0, 1, 2, 3]);
        let filt = build_filtration(&cp3, &levels);
        assert_eq!((filt.k, filt.dims.clone()), (1, vec![3]));

        assert!(matches!(order_levels(&cp3, &[int(1), int(0), int(0)]), Err(Error::NotInterior(_))));
    }

    #[test]
    fn adapted_basis_of_hirzebruch() {
        let f2 = hirzebruch(2, &rat(1, 2)).unwrap().polytope;
        let u = [rat(1, 2), rat(1, 4)];
        let levels = order_levels(&f2, &u).unwrap();
        let filt = build_filtration(&f2, &levels);
        let b = adapted_basis(&f2, &levels, &filt).unwrap();
        assert_eq!(b.basis, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(b.change[1], vec![1, 0]);
        assert_eq!(b.change[3], vec![-1, 0]);
        assert_eq!(b.change[0], vec![0, 1]);
        assert_eq!(b.change[2], vec![-2, -1]);
    }

    #[test]
    fn standard_basis_is_kept() {
        let f = |normal: Vec<i64>, c: i64| Facet::new(normal, int(c));
        let square =
            MomentPolytope::new(2, vec![f(vec![1, 0], 0), f(vec![0, 1], 0), f(vec![-1, 0], 1), f(vec![0, -1], 1)]).unwrap();
        let u = [rat(1, 4), rat(1, 3)];
        let levels = order_levels(&square, &u).unwrap();
        let filt = build_filtration(&square, &levels);
        let b = adapted_basis(&square, &levels, &filt).unwrap();
        assert_eq!(b.basis, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(b.inverse, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn hirzebruch_equations() {
        let e = hirzebruch(2, &rat(1, 2)).unwrap().polytope;
        let u = [rat(3, 4), rat(1, 4)];
        let sys = leading_term_system(&e, &u, &ones(&e)).unwrap();
        assert!(sys.is_triangular());
        // level 1: w1 + w1^-1, equation w1 - w1^-1
        assert_eq!(sys.equations[0].render("w"), "w1 - w1^-1");
        assert_eq!(sys.equations[1].render("w"), "w2 - w1^-2 w2^-1");
        let out = solve_lte(&sys).unwrap();
        let sols = out.solutions();
        assert_eq!(sols.len(), 4);
        for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            assert!(sols.iter().any(|s| close(&s.ybar[0], Complex64::new(a, 0.0)) && close(&s.ybar[1], Complex64::new(b, 0.0))));
        }
    }

    #[test]
    fn hirzebruch_off_balance() {
        let e = hirzebruch(2, &rat(1, 2)).unwrap().polytope;
        let v = is_strongly_bulk_balanced(&e, &[rat(1, 2), rat(1, 4)]).unwrap();
        assert!(!v.balanced);
        assert_eq!(v.obstructing_level, Some(2));
        let v = is_strongly_bulk_balanced(&e, &[int(1), rat(1, 4)]).unwrap();
        assert!(!v.balanced);
        let v = is_strongly_bulk_balanced(&e, &[rat(1, 2), rat(1, 3)]).unwrap();
        assert!(!v.balanced);
        assert_eq!(v.obstructing_level, Some(1));
    }

    #[test]
    fn two_point_blowup_has_free_variable() {
        let e = blowup2(&rat(1, 2), &rat(1, 4)).unwrap().polytope;
        let u = [rat(3, 10), rat(1, 4)];
        let sys = leading_term_system(&e, &u, &ones(&e)).unwrap();
        let v = verdict(&sys).unwrap();
        assert!(v.balanced);
        let w = v.witness.unwrap();
        assert!(close(&w.ybar[1], Complex64::new(-1.0, 0.0)));
        assert_eq!(w.ybar[0], LteValue::Free);
        assert!(w.sampled.is_empty());
    }

    #[test]
    fn matches_initial_system_on_cpn() {
        let e = simplex(2).unwrap().polytope;
        let sys = leading_term_system(&e, &[rat(1, 3), rat(1, 3)], &ones(&e)).unwrap();
        let sols = solve_lte(&sys).unwrap();
        assert_eq!(sols.solutions().len(), 3);
        for s in sols.solutions() {
            let z = s.ybar[0].fixed().unwrap();
            assert!((z.powi(3) - 1.0).norm() < 1e-9);
            assert!(close(&s.ybar[1], z));
        }
        let e = blowup1(&rat(2, 5)).unwrap().polytope;
        let sys = leading_term_system(&e, &[rat(7, 20), rat(3, 10)], &ones(&e)).unwrap();
        assert_eq!(sys.k(), 2);
        assert_eq!(solve_lte(&sys).unwrap().solutions().len(), 4);
    }

    #[test]
    fn bulk_scaling_keeps_verdict() {
        let e = hirzebruch(2, &rat(1, 2)).unwrap().polytope;
        let scale = Complex64::from_polar(2.0, 0.7);
        let bulk = BulkCoefficients::from_complex(&[scale; 4]).unwrap();
        for u in [[rat(3, 4), rat(1, 4)], [rat(1, 2), rat(1, 4)]] {
            let a = verdict(&leading_term_system(&e, &u, &ones(&e)).unwrap()).unwrap();
            let b = verdict(&leading_term_system(&e, &u, &bulk).unwrap()).unwrap();
            assert_eq!(a.balanced, b.balanced);
        }
    }

    #[test]
    fn value_serde() {
        let s = serde_json::to_string(&vec![LteValue::Free, LteValue::Fixed(Complex64::new(-1.0, 0.0))]).unwrap();
        assert_eq!(s, r#"["free",[-1.0,0.0]]"#);
        let back: Vec<LteValue> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[0], LteValue::Free);
    }
}
