//! Post-processing of critical points: logarithmic Hessians, `Z` values and
//! the residue pairing, the trace identity `Σ 1/Z = 0`, Morse counts against
//! the Betti rank, critical values, and the duality check for `CPⁿ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::Potential;
use crate::novikov::NovikovScalar;
use crate::polytope::{simplex, FanoType};
use crate::rational::{int, rat, serde_rational_vec, Rational};
use crate::tropical::{find_critical_points, CriticalPoint, CriticalReport, SolveOptions, MAX_DIM};

/// Relative tolerance for accepting a Novikov scalar as zero.
pub const TRACE_TOL: f64 = 1e-9;

pub type NovikovMatrix = Vec<Vec<NovikovScalar>>;

/// `[𝔶_i 𝔶_j ∂²PO/∂y_i∂y_j]` at a critical point, computed as the second
/// logarithmic derivative (the two differ by a diagonal multiple of the
/// critical equations).
pub fn hessian(w: &Potential, cp: &CriticalPoint) -> Result<NovikovMatrix> {
    let n = w.dim();
    let first: Vec<_> = (0..n).map(|i| w.log_derivative(i)).collect::<Result<_>>()?;
    let mut h = vec![vec![NovikovScalar::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let v = first[i].log_derivative(j)?.evaluate(&cp.y)?;
            h[j][i] = v.clone();
            h[i][j] = v;
        }
    }
    Ok(h)
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &[Vec<NovikovScalar>]) -> NovikovScalar {
    let n = m.len();
    match n {
        0 => NovikovScalar::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut total = NovikovScalar::zero();
            for c in 0..n {
                if m[0][c].is_zero() && !m[0][c].trunc().is_finite() {
                    continue;
                }
                let minor: Vec<Vec<NovikovScalar>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = m[0][c].mul(&determinant(&minor));
                total = if c % 2 == 0 { total.add(&term) } else { total.sub(&term) };
            }
            total
        }
    }
}

/// When the Hessian determinant is known to equal `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactnessRegime {
    Surface,
    NefDeg2,
    LeadingOrderOnly,
}

impl ExactnessRegime {
    pub fn for_potential(w: &Potential) -> Self {
        if w.dim() == 2 {
            ExactnessRegime::Surface
        } else if matches!(w.fano_type(), FanoType::Fano | FanoType::NefOnly) {
            ExactnessRegime::NefDeg2
        } else {
            ExactnessRegime::LeadingOrderOnly
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ExactnessRegime::Surface => "surface",
            ExactnessRegime::NefDeg2 => "nef-deg2",
            ExactnessRegime::LeadingOrderOnly => "leading-order only",
        }
    }
}

/// `Z = det Hess` with its regime label.
pub fn z_value(w: &Potential, cp: &CriticalPoint) -> Result<(NovikovScalar, ExactnessRegime)> {
    if !cp.nondegenerate {
        return Err(Error::SingularHessian);
    }
    let z = determinant(&hessian(w, cp)?);
    if z.is_zero() {
        return Err(Error::SingularHessian);
    }
    Ok((z, ExactnessRegime::for_potential(w)))
}

/// Diagonal entries `⟨1_𝔶, 1_𝔶⟩ = 1/Z`; off-diagonal entries vanish.
pub fn residue_pairing(zs: &[NovikovScalar]) -> Result<Vec<NovikovScalar>> {
    zs.iter().map(|z| z.invert().map_err(|_| Error::NotMorse("zero Z value".into()))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceCheck {
    pub sum: NovikovScalar,
    pub tol_abs: f64,
    pub vanishes: bool,
}

/// `Σ 1/Z`, accepted as zero when every coefficient is below
/// `TRACE_TOL · (largest input coefficient)`.
pub fn trace_sum_check(pairing: &[NovikovScalar]) -> TraceCheck {
    trace_sum_check_with(pairing, TRACE_TOL)
}

pub fn trace_sum_check_with(pairing: &[NovikovScalar], rel_tol: f64) -> TraceCheck {
    let scale = pairing.iter().map(NovikovScalar::max_abs_coefficient).fold(0.0, f64::max);
    let sum = pairing.iter().fold(NovikovScalar::zero(), |acc, x| acc.add(x));
    let tol_abs = rel_tol * scale;
    let vanishes = sum.max_abs_coefficient() <= tol_abs;
    TraceCheck { sum, tol_abs, vanishes }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MorseVerdict {
    /// Morse, and the number of points equals the Betti rank.
    Equal,
    /// Not Morse, and `0 < #points < rank`.
    StrictInequality,
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseCount {
    pub morse: bool,
    pub distinct: usize,
    /// `None` when some multiplicity is unresolved.
    pub count_with_multiplicity: Option<usize>,
    pub unresolved: usize,
    pub betti: usize,
    pub verdict: MorseVerdict,
}

/// Compares the critical points with `rank H(X; ℚ)`. Unresolved
/// multiplicities downgrade the comparison to the inequality on distinct
/// points.
pub fn morse_count_check(w: &Potential, report: &CriticalReport) -> Result<MorseCount> {
    let betti = w.polytope().total_betti()?;
    let morse = report.is_morse();
    let distinct = report.points.len();
    let count = report.count_with_multiplicity();
    let unresolved = report.points.iter().filter(|p| p.multiplicity.is_none()).count();
    let verdict = match (morse, count) {
        (true, Some(c)) if c == betti => MorseVerdict::Equal,
        (false, Some(c)) if c == betti && distinct > 0 && distinct < betti => MorseVerdict::StrictInequality,
        (false, None) if distinct > 0 && distinct < betti => MorseVerdict::StrictInequality,
        _ => MorseVerdict::Inconsistent,
    };
    Ok(MorseCount { morse, distinct, count_with_multiplicity: count, unresolved, betti, verdict })
}

/// `PO(𝔶)` for each point.
pub fn critical_values(w: &Potential, points: &[CriticalPoint]) -> Result<Vec<NovikovScalar>> {
    points.iter().map(|p| w.evaluate(&p.y)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResidue {
    #[serde(with = "serde_rational_vec")]
    pub u: Vec<Rational>,
    pub y: Vec<NovikovScalar>,
    pub hessian: NovikovMatrix,
    pub z: NovikovScalar,
    pub pairing_diag: NovikovScalar,
    pub critical_value: NovikovScalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidueReport {
    pub points: Vec<PointResidue>,
    pub regime: ExactnessRegime,
    pub morse: MorseCount,
    pub trace: TraceCheck,
}

/// Residue data for every critical point of a Morse potential.
pub fn residue_report(w: &Potential, report: &CriticalReport) -> Result<ResidueReport> {
    residue_report_with(w, report, TRACE_TOL)
}

pub fn residue_report_with(w: &Potential, report: &CriticalReport, rel_tol: f64) -> Result<ResidueReport> {
    let morse = morse_count_check(w, report)?;
    if !morse.morse {
        return Err(Error::NotMorse(format!("{} degenerate point(s)", report.points.iter().filter(|p| !p.nondegenerate).count())));
    }
    let per: Vec<(NovikovMatrix, NovikovScalar, NovikovScalar)> = report
        .points
        .par_iter()
        .map(|p| {
            let h = hessian(w, p)?;
            let z = determinant(&h);
            if z.is_zero() {
                return Err(Error::SingularHessian);
            }
            Ok((h, z, w.evaluate(&p.y)?))
        })
        .collect::<Result<_>>()?;
    let zs: Vec<NovikovScalar> = per.iter().map(|(_, z, _)| z.clone()).collect();
    let pairing = residue_pairing(&zs)?;
    let trace = trace_sum_check_with(&pairing, rel_tol);
    let points = report
        .points
        .iter()
        .zip(per)
        .zip(pairing)
        .map(|((p, (hessian, z, critical_value)), pairing_diag)| PointResidue {
            u: p.u.clone(),
            y: p.y.clone(),
            hessian,
            z,
            pairing_diag,
            critical_value,
        })
        .collect();
    Ok(ResidueReport { points, regime: ExactnessRegime::for_potential(w), morse, trace })
}

fn root_of_unity(k: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

/// Index `k` with `z ≈ |z| e^{2πik/m}`.
fn root_index(z: Complex64, m: usize) -> usize {
    let a = z.arg().rem_euclid(2.0 * PI);
    ((a * m as f64 / (2.0 * PI)).round() as usize) % m
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub n: usize,
    /// `⟨ks(p_ℓ), ks(p_ℓ′)⟩` for `0 ≤ ℓ, ℓ′ ≤ n`.
    pub pairings: Vec<Vec<NovikovScalar>>,
    /// Whether the `Z` values came from the critical point pipeline (as
    /// opposed to the closed form).
    pub computed: bool,
    pub passed: bool,
}

/// Pairs `ks(p_ℓ) = T^{ℓ/(n+1)} Σ_k ζ^{kℓ} 1_{𝔶^{(k)}}` under the residue
/// pairing and checks `⟨ks(p_ℓ), ks(p_ℓ′)⟩ = δ_{ℓ+ℓ′, n}`. For `n` within
/// the solver's range the pairing uses the computed `Z` values, matched to
/// `k` by the argument of the leading coefficient.
pub fn cpn_duality_check(n: usize) -> Result<DualityReport> {
    if !(1..=6).contains(&n) {
        return Err(Error::ParamOutOfRange(format!("duality check needs 1 <= n <= 6, got {n}")));
    }
    let m = n + 1;
    let e = rat(2, 1);
    let (pairing, computed) = if n <= MAX_DIM {
        let entry = simplex(n)?;
        let w = Potential::standard(&entry.polytope, &entry.corrections, &e)?;
        let report = find_critical_points(&w, &SolveOptions::default())?;
        let mut diag: Vec<Option<NovikovScalar>> = vec![None; m];
        for p in &report.points {
            let (z, _) = z_value(&w, p)?;
            let k = root_index(p.initial[0], m);
            diag[k] = Some(residue_pairing(&[z])?.remove(0));
        }
        let diag: Vec<NovikovScalar> = diag
            .into_iter()
            .enumerate()
            .map(|(k, d)| d.ok_or_else(|| Error::NotMorse(format!("no critical point with argument index {k}"))))
            .collect::<Result<_>>()?;
        (diag, true)
    } else {
        let diag = (0..m)
            .map(|k| {
                let z = NovikovScalar::monomial(rat(n as i64, m as i64), root_of_unity(k * n, m) * m as f64);
                z.invert()
            })
            .collect::<Result<_>>()?;
        (diag, false)
    };
    let ks = |l: usize, k: usize| NovikovScalar::monomial(rat(l as i64, m as i64), root_of_unity(k * l, m));
    let mut pairings = vec![vec![NovikovScalar::zero(); m]; m];
    let mut passed = true;
    for l in 0..m {
        for lp in 0..m {
            let v = (0..m).fold(NovikovScalar::zero(), |acc, k| acc.add(&ks(l, k).mul(&ks(lp, k)).mul(&pairing[k])));
            let want = if l + lp == n { NovikovScalar::one() } else { NovikovScalar::zero() };
            passed &= v.approx_eq(&want, 1e-9);
            pairings[l][lp] = v;
        }
    }
    Ok(DualityReport { n, pairings, computed, passed })
}

/// Closed-form critical values `(n+1) T^{1/(n+1)} ζ^k` of `CPⁿ`.
pub fn cpn_critical_values(n: usize) -> Vec<NovikovScalar> {
    let m = n + 1;
    (0..m).map(|k| NovikovScalar::monomial(rat(1, m as i64), root_of_unity(k, m) * m as f64)).collect()
}

/// Exponent of the leading term, for reports.
pub fn leading_exponent(x: &NovikovScalar) -> Option<Rational> {
    x.leading().map(|(e, _)| e.clone())
}

/// `𝔳(Z)` predicted from the initial system: row `i` of the Hessian is
/// `T^{S_i}` times the initial log-Jacobian row plus higher terms, and the
/// initial Jacobian is invertible at a nondegenerate point, so
/// `𝔳(Z) = Σ S_i`.
pub fn leading_z_valuation(w: &Potential, cp: &CriticalPoint) -> Result<Rational> {
    use crate::tropical::{critical_system, normalized_equation};
    let sys = critical_system(w);
    let mut shift = int(0);
    for f in &sys {
        let (s, _) = normalized_equation(f, &cp.u);
        shift += s.finite().cloned().ok_or(Error::SingularHessian)?;
    }
    Ok(shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{blowup1, hirzebruch};
    use crate::rational::Extended;

    fn pipeline(entry: crate::polytope::CatalogEntry, e: i64) -> (Potential, CriticalReport) {
        let w = Potential::standard(&entry.polytope, &entry.corrections, &int(e)).unwrap();
        let r = find_critical_points(&w, &SolveOptions::default()).unwrap();
        (w, r)
    }

    #[test]
    fn cp1_hessian() {
        let (w, r) = pipeline(simplex(1).unwrap(), 3);
        let p = r.points.iter().find(|p| p.initial[0].re > 0.0).unwrap();
        let h = hessian(&w, p).unwrap();
        assert!(h[0][0].approx_eq(&NovikovScalar::monomial(rat(1, 2), Complex64::new(2.0, 0.0)), 1e-9));
    }

    #[test]
    fn cpn_hessian_and_z() {
        for n in 1..=3usize {
            let m = n + 1;
            let (w, r) = pipeline(simplex(n).unwrap(), 2);
            for p in &r.points {
                let k = root_index(p.initial[0], m);
                let zeta = root_of_unity(k, m);
                let h = hessian(&w, p).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        let c = if i == j { 2.0 } else { 1.0 };
                        assert!(h[i][j].approx_eq(&NovikovScalar::monomial(rat(1, m as i64), zeta * c), 1e-9));
                    }
                }
                let (z, _) = z_value(&w, p).unwrap();
                let want = NovikovScalar::monomial(rat(n as i64, m as i64), root_of_unity(k * n, m) * m as f64);
                assert!(z.approx_eq(&want, 1e-9), "{z}");
                assert_eq!(leading_exponent(&z), Some(leading_z_valuation(&w, p).unwrap()));
            }
        }
    }

    #[test]
    fn hirzebruch_determinants() {
        let (w, r) = pipeline(hirzebruch(2, &rat(1, 2)).unwrap(), 3);
        let rep = residue_report(&w, &r).unwrap();
        let mut signs: Vec<i32> = rep
            .points
            .iter()
            .map(|p| {
                let (e, c) = p.z.leading().unwrap();
                assert_eq!(*e, int(1));
                assert!((c.norm() - 4.0).abs() < 1e-9 && c.im.abs() < 1e-9);
                c.re.signum() as i32
            })
            .collect();
        signs.sort();
        assert_eq!(signs, vec![-1, -1, 1, 1]);
        assert!(rep.trace.vanishes, "{}", rep.trace.sum);
        assert_eq!(rep.morse.verdict, MorseVerdict::Equal);
        assert_eq!(rep.regime, ExactnessRegime::Surface);
    }

    #[test]
    fn monotone_blowup_trace() {
        let (w, r) = pipeline(blowup1(&rat(1, 3)).unwrap(), 2);
        let rep = residue_report(&w, &r).unwrap();
        for (p, cp) in rep.points.iter().zip(&r.points) {
            let z = cp.initial[0];
            let want = (4.0 - z.powi(3)) / z;
            let (e, c) = p.z.leading().unwrap();
            assert_eq!(*e, rat(2, 3));
            assert!((c - want).norm() < 1e-9);
        }
        assert!(rep.trace.vanishes, "{}", rep.trace.sum);
    }

    #[test]
    fn critical_values_of_cpn() {
        for n in 1..=2usize {
            let (w, r) = pipeline(simplex(n).unwrap(), 2);
            let vals = critical_values(&w, &r.points).unwrap();
            let want = cpn_critical_values(n);
            for v in &vals {
                assert!(want.iter().any(|x| v.approx_eq(x, 1e-9)), "{v}");
            }
        }
    }

    #[test]
    fn duality() {
        for n in 1..=6 {
            let d = cpn_duality_check(n).unwrap();
            assert!(d.passed, "n = {n}");
            assert_eq!(d.computed, n <= MAX_DIM);
        }
        let d = cpn_duality_check(2).unwrap();
        assert!(d.pairings[1][1].approx_eq(&NovikovScalar::one(), 1e-9));
        assert!(d.pairings[1][2].is_approx_zero(1e-9));
        let d = cpn_duality_check(1).unwrap();
        assert!(d.pairings[0][1].approx_eq(&NovikovScalar::one(), 1e-9));
    }

    #[test]
    fn morse_counts() {
        let (w, r) = pipeline(blowup1(&rat(1, 5)).unwrap(), 2);
        let m = morse_count_check(&w, &r).unwrap();
        assert_eq!((m.count_with_multiplicity, m.betti, m.verdict), (Some(4), 4, MorseVerdict::Equal));
    }

    #[test]
    fn pairing_single_point() {
        let z = NovikovScalar::monomial(int(1), Complex64::new(4.0, 0.0));
        let p = residue_pairing(std::slice::from_ref(&z)).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p[0].mul(&z).approx_eq(&NovikovScalar::one(), 1e-12));
        assert_eq!(*p[0].trunc(), Extended::Infinity);
    }
}
