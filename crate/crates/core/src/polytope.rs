//! Moment polytopes `P = {u : ℓ_j(u) ≥ 0}` with `ℓ_j(u) = ⟨v_j, u⟩ + λ_j`,
//! their validation and combinatorics, and the builtin example catalog.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{affine_solve, det, dot_int_rat, int_to_rat, rank, solve_unique};
use crate::novikov::{serde_complex, NovikovScalar};
use crate::rational::{display_rational, format_rational, int, parse_rational, serde_rational, serde_rational_vec, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: Vec<i64>,
    #[serde(with = "serde_rational")]
    pub constant: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl Facet {
    pub fn new(normal: Vec<i64>, constant: Rational) -> Self {
        Facet { normal, constant, name: None }
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn eval(&self, u: &[Rational]) -> Rational {
        dot_int_rat(&self.normal, u) + &self.constant
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        if !self.constant.is_zero() {
            s.push_str(&display_rational(&self.constant));
        }
        for (i, &a) in self.normal.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let sign = if a < 0 { "-" } else if s.is_empty() { "" } else { "+" };
            let mag = if a.abs() == 1 { String::new() } else { a.abs().to_string() };
            s.push_str(&format!("{sign}{mag}u{}", i + 1));
        }
        if s.is_empty() {
            s.push('0');
        }
        match &self.name {
            Some(n) => write!(f, "{n}: {s}"),
            None => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentPolytope {
    pub dim: usize,
    pub facets: Vec<Facet>,
}

/// A 0-face together with the indices of the facets through it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    #[serde(with = "serde_rational_vec")]
    pub point: Vec<Rational>,
    pub facets: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    WrongNormalLength { facet: usize, len: usize },
    ZeroNormal { facet: usize },
    Unbounded,
    EmptyInterior,
    DuplicateFacet { facet: usize, duplicate_of: usize },
    RedundantFacet { facet: usize },
    NotSimple {
        #[serde(with = "serde_rational_vec")]
        vertex: Vec<Rational>,
        facets: Vec<usize>,
    },
    NotUnimodular {
        #[serde(with = "serde_rational_vec")]
        vertex: Vec<Rational>,
        facets: Vec<usize>,
        det: i64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pt = |v: &[Rational]| v.iter().map(display_rational).collect::<Vec<_>>().join(", ");
        match self {
            Violation::WrongNormalLength { facet, len } => write!(f, "facet {facet}: normal has length {len}"),
            Violation::ZeroNormal { facet } => write!(f, "facet {facet}: zero normal"),
            Violation::Unbounded => write!(f, "polytope is unbounded"),
            Violation::EmptyInterior => write!(f, "polytope has empty interior"),
            Violation::DuplicateFacet { facet, duplicate_of } => {
                write!(f, "facet {facet} duplicates facet {duplicate_of}")
            }
            Violation::RedundantFacet { facet } => write!(f, "facet {facet} is redundant"),
            Violation::NotSimple { vertex, facets } => {
                write!(f, "vertex ({}) lies on {} facets {facets:?}", pt(vertex), facets.len())
            }
            Violation::NotUnimodular { vertex, facets, det } => {
                write!(f, "vertex ({}): normals of facets {facets:?} have determinant {det}", pt(vertex))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub vertex_count: usize,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FanoType {
    Fano,
    NefOnly,
    Neither,
}

impl FanoType {
    pub fn is_nef(self) -> bool {
        self != FanoType::Neither
    }
}

impl fmt::Display for FanoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FanoType::Fano => "fano",
            FanoType::NefOnly => "nef-only",
            FanoType::Neither => "neither",
        })
    }
}

impl MomentPolytope {
    /// Builds a polytope after checking that every normal has length `dim`.
    /// Geometric validity is checked separately by [`validate`](Self::validate).
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPolytope("dimension must be positive".into()));
        }
        if let Some((j, f)) = facets.iter().enumerate().find(|(_, f)| f.normal.len() != dim) {
            return Err(Error::InvalidPolytope(format!("facet {j} has normal of length {}", f.normal.len())));
        }
        Ok(MomentPolytope { dim, facets })
    }

    pub fn facet_count(&self) -> usize {
        self.facets.len()
    }

    pub fn facet(&self, j: usize) -> Result<&Facet> {
        self.facets.get(j).ok_or(Error::IndexOutOfRange { index: j, bound: self.facets.len() })
    }

    pub fn ell(&self, j: usize, u: &[Rational]) -> Result<Rational> {
        Ok(self.facet(j)?.eval(u))
    }

    pub fn ell_all(&self, u: &[Rational]) -> Vec<Rational> {
        self.facets.iter().map(|f| f.eval(u)).collect()
    }

    pub fn contains(&self, u: &[Rational]) -> bool {
        u.len() == self.dim && self.facets.iter().all(|f| !f.eval(u).is_negative())
    }

    pub fn is_interior(&self, u: &[Rational]) -> bool {
        u.len() == self.dim && self.facets.iter().all(|f| f.eval(u).is_positive())
    }

    fn normals_rat(&self, idx: &[usize]) -> Vec<Vec<Rational>> {
        idx.iter().map(|&j| int_to_rat(&self.facets[j].normal)).collect()
    }

    /// Vertices by intersecting every `n`-subset of facet hyperplanes, without
    /// assuming validity. Each vertex lists every facet through it.
    pub fn enumerate_vertices(&self) -> Vec<Vertex> {
        let n = self.dim;
        let mut found: BTreeMap<Vec<Rational>, Vec<usize>> = BTreeMap::new();
        for subset in subsets(self.facets.len(), n) {
            let a = self.normals_rat(&subset);
            let b: Vec<Rational> = subset.iter().map(|&j| -self.facets[j].constant.clone()).collect();
            let Some(x) = solve_unique(&a, &b) else { continue };
            if found.contains_key(&x) || !self.contains(&x) {
                continue;
            }
            let tight = (0..self.facets.len()).filter(|&j| self.facets[j].eval(&x).is_zero()).collect();
            found.insert(x, tight);
        }
        found.into_iter().map(|(point, facets)| Vertex { point, facets }).collect()
    }

    fn is_bounded(&self) -> bool {
        let n = self.dim;
        let all: Vec<usize> = (0..self.facets.len()).collect();
        if rank(&self.normals_rat(&all)) < n {
            return false;
        }
        // The recession cone {d : ⟨v_j, d⟩ ≥ 0} is pointed; it is nonzero iff
        // one of its candidate extreme rays is feasible.
        let feasible = |d: &[Rational]| self.facets.iter().all(|f| !dot_int_rat(&f.normal, d).is_negative());
        if n == 1 {
            return !feasible(&[int(1)]) && !feasible(&[int(-1)]);
        }
        for subset in subsets(self.facets.len(), n - 1) {
            let a = self.normals_rat(&subset);
            let Some((_, basis)) = affine_solve(&a, &vec![Rational::zero(); n - 1]) else { continue };
            if basis.len() != 1 {
                continue;
            }
            let d = &basis[0];
            let neg: Vec<Rational> = d.iter().map(|x| -x.clone()).collect();
            if feasible(d) || feasible(&neg) {
                return false;
            }
        }
        true
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim;
        let mut violations = Vec::new();
        for (j, f) in self.facets.iter().enumerate() {
            if f.normal.len() != n {
                violations.push(Violation::WrongNormalLength { facet: j, len: f.normal.len() });
            } else if f.normal.iter().all(|&a| a == 0) {
                violations.push(Violation::ZeroNormal { facet: j });
            }
        }
        if !violations.is_empty() {
            return ValidationReport { valid: false, vertex_count: 0, violations };
        }
        for j in 0..self.facets.len() {
            if let Some(k) = (0..j).find(|&k| self.facets[k].normal == self.facets[j].normal) {
                if self.facets[k].constant == self.facets[j].constant {
                    violations.push(Violation::DuplicateFacet { facet: j, duplicate_of: k });
                }
            }
        }
        if !self.is_bounded() {
            violations.push(Violation::Unbounded);
            return ValidationReport { valid: false, vertex_count: 0, violations };
        }
        let verts = self.enumerate_vertices();
        if verts.is_empty() || !self.is_interior(&centroid(&verts, n)) {
            violations.push(Violation::EmptyInterior);
            return ValidationReport { valid: false, vertex_count: verts.len(), violations };
        }
        let duplicates: Vec<usize> = violations
            .iter()
            .filter_map(|v| match v {
                Violation::DuplicateFacet { facet, .. } => Some(*facet),
                _ => None,
            })
            .collect();
        for j in 0..self.facets.len() {
            if duplicates.contains(&j) {
                continue;
            }
            let on_face: Vec<&Vertex> = verts.iter().filter(|v| v.facets.contains(&j)).collect();
            if affine_rank(&on_face) + 1 < n {
                violations.push(Violation::RedundantFacet { facet: j });
            }
        }
        for v in &verts {
            if v.facets.len() != n {
                violations.push(Violation::NotSimple { vertex: v.point.clone(), facets: v.facets.clone() });
                continue;
            }
            let m: Vec<Vec<i64>> = v.facets.iter().map(|&j| self.facets[j].normal.clone()).collect();
            let d = det(&m);
            if d.abs() != 1 {
                violations.push(Violation::NotUnimodular { vertex: v.point.clone(), facets: v.facets.clone(), det: d });
            }
        }
        ValidationReport { valid: violations.is_empty(), vertex_count: verts.len(), violations }
    }

    /// Errors with `InvalidPolytope` listing the violations.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.valid {
            Ok(())
        } else {
            let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidPolytope(msgs.join("; ")))
        }
    }

    pub fn vertices(&self) -> Result<Vec<Vertex>> {
        self.ensure_valid()?;
        Ok(self.enumerate_vertices())
    }

    /// Rank of `H(X; ℚ)`, the vertex count for a Delzant polytope.
    pub fn total_betti(&self) -> Result<usize> {
        Ok(self.vertices()?.len())
    }

    /// Convexity of the anticanonical support function across the walls of
    /// the normal fan. For adjacent vertices `σ`, `σ'` sharing `n − 1`
    /// facets, let `φ_σ` be the linear form equal to 1 on the normals at `σ`;
    /// its value at the extra normal of `σ'` must be `< 1` everywhere for a
    /// Fano manifold and `≤ 1` for a nef one.
    pub fn fano_check(&self) -> Result<FanoType> {
        let verts = self.vertices()?;
        let n = self.dim;
        let mut result = FanoType::Fano;
        for (a, va) in verts.iter().enumerate() {
            let rows = self.normals_rat(&va.facets);
            let phi = solve_unique(&rows, &vec![int(1); n])
                .ok_or_else(|| Error::InvalidPolytope("singular vertex cone".into()))?;
            for (b, vb) in verts.iter().enumerate() {
                if a == b {
                    continue;
                }
                let shared = va.facets.iter().filter(|j| vb.facets.contains(j)).count();
                if shared + 1 != n {
                    continue;
                }
                let extra = vb.facets.iter().find(|j| !va.facets.contains(j)).copied().unwrap_or(0);
                let value = dot_int_rat(&self.facets[extra].normal, &phi);
                if value > int(1) {
                    return Ok(FanoType::Neither);
                }
                if value.is_one() {
                    result = FanoType::NefOnly;
                }
            }
        }
        Ok(result)
    }

    /// Coordinate-wise bounds of the vertex set.
    pub fn bounding_box(&self) -> Result<(Vec<Rational>, Vec<Rational>)> {
        let verts = self.vertices()?;
        let mut lo = verts[0].point.clone();
        let mut hi = verts[0].point.clone();
        for v in &verts[1..] {
            for i in 0..self.dim {
                if v.point[i] < lo[i] {
                    lo[i] = v.point[i].clone();
                }
                if v.point[i] > hi[i] {
                    hi[i] = v.point[i].clone();
                }
            }
        }
        Ok((lo, hi))
    }

    /// Average of the vertices, an interior point of a valid polytope.
    pub fn vertex_centroid(&self) -> Result<Vec<Rational>> {
        Ok(centroid(&self.vertices()?, self.dim))
    }
}

fn centroid(verts: &[Vertex], n: usize) -> Vec<Rational> {
    let k = int(verts.len() as i64);
    (0..n).map(|i| verts.iter().map(|v| v.point[i].clone()).sum::<Rational>() / &k).collect()
}

fn affine_rank(points: &[&Vertex]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let base = &points[0].point;
    let diffs: Vec<Vec<Rational>> =
        points[1..].iter().map(|p| p.point.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    rank(&diffs)
}

/// All `k`-element subsets of `0..m` in lexicographic order.
pub(crate) fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= m {
        rec(0, m, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Degree-two bulk parameters: one valuation-zero scalar `𝔠_j = e^{w̄_j}`
/// per facet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BulkCoefficients {
    c: Vec<NovikovScalar>,
}

impl BulkCoefficients {
    pub fn ones(m: usize) -> Self {
        BulkCoefficients { c: vec![NovikovScalar::one(); m] }
    }

    pub fn new(c: Vec<NovikovScalar>) -> Result<Self> {
        for (j, x) in c.iter().enumerate() {
            if x.valuation() != int(0).into() {
                return Err(Error::ParamOutOfRange(format!("bulk coefficient {j} must have valuation 0, got {x}")));
            }
        }
        Ok(BulkCoefficients { c })
    }

    /// `𝔠_j = exp(w̄_j)` for `w̄_j ∈ Λ₀`.
    pub fn from_exponents(w: &[NovikovScalar]) -> Result<Self> {
        Self::new(w.iter().map(NovikovScalar::exp).collect::<Result<_>>()?)
    }

    pub fn from_complex(c: &[Complex64]) -> Result<Self> {
        Self::new(c.iter().map(|&z| NovikovScalar::constant(z)).collect())
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    pub fn get(&self, j: usize) -> &NovikovScalar {
        &self.c[j]
    }

    pub fn as_slice(&self) -> &[NovikovScalar] {
        &self.c
    }

    /// The values modulo `Λ₊`.
    pub fn leading(&self) -> Vec<Complex64> {
        self.c.iter().map(NovikovScalar::constant_term).collect()
    }
}

/// A correction term `coeff · T^{extra_T} · Π z_j^{monomial_z[j]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub monomial_z: Vec<u32>,
    #[serde(rename = "extra_T", with = "serde_rational")]
    pub extra_t: Rational,
    #[serde(with = "serde_complex")]
    pub coeff: Complex64,
}

/// On-disk polytope description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    pub facets: Vec<Facet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corrections: Vec<Correction>,
}

impl PolytopeFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("polytope file serializes")
    }

    pub fn into_parts(self) -> Result<(MomentPolytope, Vec<Correction>)> {
        let m = self.facets.len();
        if let Some(c) = self.corrections.iter().find(|c| c.monomial_z.len() != m) {
            return Err(Error::Parse(format!(
                "correction monomial has {} exponents, expected {m}",
                c.monomial_z.len()
            )));
        }
        Ok((MomentPolytope::new(self.dim, self.facets)?, self.corrections))
    }

    pub fn from_parts(p: &MomentPolytope, corrections: &[Correction]) -> Self {
        PolytopeFile { dim: p.dim, facets: p.facets.clone(), corrections: corrections.to_vec() }
    }
}

/// A catalog polytope with its known correction terms.
#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub polytope: MomentPolytope,
    pub corrections: Vec<Correction>,
}

pub const CATALOG_NAMES: [(&str, &str); 4] = [
    ("simplex", "simplex:n  projective space CP^n"),
    ("blowup1", "blowup1:a  CP^2 blown up at one point, 0 < a < 1"),
    ("blowup2", "blowup2:a,b  CP^2 blown up at two points, a, b > 0, a + b < 1"),
    ("hirzebruch", "hirzebruch:n,a  Hirzebruch surface F_n, n >= 1, 0 < a < 1"),
];

fn open_unit(name: &str, a: &Rational) -> Result<()> {
    if a.is_positive() && *a < int(1) {
        Ok(())
    } else {
        Err(Error::ParamOutOfRange(format!("{name} = {} must lie in (0, 1)", display_rational(a))))
    }
}

fn simplex_facets(n: usize) -> Vec<Facet> {
    let mut facets = vec![Facet::new(vec![-1; n], int(1)).named("l0")];
    for i in 0..n {
        let mut v = vec![0; n];
        v[i] = 1;
        facets.push(Facet::new(v, int(0)).named(&format!("l{}", i + 1)));
    }
    facets
}

/// `CPⁿ`: `ℓ₀ = 1 − Σ u_i` and `ℓ_i = u_i`.
pub fn simplex(n: usize) -> Result<CatalogEntry> {
    if n == 0 {
        return Err(Error::ParamOutOfRange("simplex dimension must be positive".into()));
    }
    Ok(CatalogEntry { polytope: MomentPolytope::new(n, simplex_facets(n))?, corrections: Vec::new() })
}

/// One-point blow-up of `CP²`: the simplex cut by `ℓ₃ = 1 − α − u₂`.
pub fn blowup1(alpha: &Rational) -> Result<CatalogEntry> {
    open_unit("alpha", alpha)?;
    let mut facets = simplex_facets(2);
    facets.push(Facet::new(vec![0, -1], int(1) - alpha).named("l3"));
    Ok(CatalogEntry { polytope: MomentPolytope::new(2, facets)?, corrections: Vec::new() })
}

/// Two-point blow-up: additionally `ℓ₄ = u₁ + u₂ − α′`.
pub fn blowup2(alpha: &Rational, alpha2: &Rational) -> Result<CatalogEntry> {
    open_unit("alpha", alpha)?;
    open_unit("alpha'", alpha2)?;
    if alpha + alpha2 >= int(1) {
        return Err(Error::ParamOutOfRange("alpha + alpha' must be < 1".into()));
    }
    let mut facets = simplex_facets(2);
    facets.push(Facet::new(vec![0, -1], int(1) - alpha).named("l3"));
    facets.push(Facet::new(vec![1, 1], -alpha2.clone()).named("l4"));
    Ok(CatalogEntry { polytope: MomentPolytope::new(2, facets)?, corrections: Vec::new() })
}

/// Hirzebruch surface `F_n` with facets `u₁`, `u₂`, `n − u₁ − n u₂`,
/// `1 − α − u₂`. For `n = 2` the known correction `T^{1−α}·T^{2α} y₂⁻¹` is
/// included.
pub fn hirzebruch(n: i64, alpha: &Rational) -> Result<CatalogEntry> {
    if n < 1 {
        return Err(Error::ParamOutOfRange(format!("hirzebruch n = {n} must be >= 1")));
    }
    open_unit("alpha", alpha)?;
    let facets = vec![
        Facet::new(vec![1, 0], int(0)).named("l1"),
        Facet::new(vec![0, 1], int(0)).named("l2"),
        Facet::new(vec![-1, -n], int(n)).named("l3"),
        Facet::new(vec![0, -1], int(1) - alpha).named("l4"),
    ];
    let corrections = if n == 2 {
        vec![Correction { monomial_z: vec![0, 0, 0, 1], extra_t: alpha * int(2), coeff: Complex64::new(1.0, 0.0) }]
    } else {
        Vec::new()
    };
    Ok(CatalogEntry { polytope: MomentPolytope::new(2, facets)?, corrections })
}

/// Parses `"name:p1,p2"` (parameters as integers, `p/q`, or exact decimals).
pub fn catalog_from_spec(spec: &str) -> Result<CatalogEntry> {
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    let params: Vec<Rational> = if params.trim().is_empty() {
        Vec::new()
    } else {
        params.split(',').map(parse_rational).collect::<Result<_>>()?
    };
    let want = |k: usize| {
        if params.len() == k {
            Ok(())
        } else {
            Err(Error::ParamOutOfRange(format!("{name} takes {k} parameter(s), got {}", params.len())))
        }
    };
    let integer = |r: &Rational| {
        if r.is_integer() {
            r.to_integer().try_into().map_err(|_| Error::ParamOutOfRange(format!("{} too large", format_rational(r))))
        } else {
            Err(Error::ParamOutOfRange(format!("{} is not an integer", format_rational(r))))
        }
    };
    match name.trim() {
        "simplex" => {
            want(1)?;
            let n: i64 = integer(&params[0])?;
            if n < 1 {
                return Err(Error::ParamOutOfRange(format!("simplex dimension {n} must be positive")));
            }
            simplex(n as usize)
        }
        "blowup1" => {
            want(1)?;
            blowup1(&params[0])
        }
        "blowup2" => {
            want(2)?;
            blowup2(&params[0], &params[1])
        }
        "hirzebruch" => {
            want(2)?;
            hirzebruch(integer(&params[0])?, &params[1])
        }
        other => Err(Error::UnknownName(other.to_string())),
    }
}
