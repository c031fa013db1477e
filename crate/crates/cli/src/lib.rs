//! Command implementations behind the `toricpo` binary: input loading, run
//! configuration, report types and their text rendering.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toricpo::jacres::{self, MorseCount, ResidueReport};
use toricpo::lte::{self, BalanceVerdict, LteSystem};
use toricpo::polytope::{catalog_from_spec, Correction, PolytopeFile, ValidationReport, CATALOG_NAMES};
use toricpo::rational::{display_rational, format_rational, parse_rational, Rational};
use toricpo::tropical::{find_critical_points, CriticalReport, SolveOptions};
use toricpo::{Error, FanoType, MomentPolytope, Potential};

/// Series terms shown in text output.
const LEADING_TERMS: usize = 4;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "TORICPO_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

/// Settings shared by all subcommands. Loaded from TOML; every field is
/// optional there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Truncation order `E`, as `"p/q"` or a decimal.
    pub truncation: String,
    pub coefficient_eps: f64,
    pub solution_eps: f64,
    pub tol_abs: f64,
    pub assume_fano: bool,
    pub grid: usize,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            truncation: "5".into(),
            coefficient_eps: 1e-12,
            solution_eps: toricpo::polysys::DEFAULT_SOLUTION_EPS,
            tol_abs: jacres::TRACE_TOL,
            assume_fano: false,
            grid: 50,
            format: Format::Text,
        }
    }
}

impl RunConfig {
    /// Reads `path`, or the file named by [`CONFIG_ENV`], or the defaults.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let path: Option<PathBuf> = match path {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
        };
        let cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p).map_err(|e| CliError::io(&p, e))?;
                toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let e = self.truncation_order()?;
        if e <= Rational::from_integer(0.into()) {
            return Err(CliError::Validation(format!("truncation must be positive, got {}", self.truncation)));
        }
        for (name, v) in [("coefficient_eps", self.coefficient_eps), ("solution_eps", self.solution_eps), ("tol_abs", self.tol_abs)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Validation(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn truncation_order(&self) -> Result<Rational, CliError> {
        Ok(parse_rational(&self.truncation)?)
    }

    fn solve_options(&self) -> Result<SolveOptions, CliError> {
        Ok(SolveOptions { truncation: None, parallel: true, solution_eps: self.solution_eps })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Validation(format!("{}: {e}", path.display()))
    }

    /// 2 for invalid input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Core(e) => match e {
                Error::NoConvergence { .. }
                | Error::SingularInitialJacobian(_)
                | Error::EliminationFailed(_)
                | Error::PositiveDimensionalInitialLocus
                | Error::SingularHessian
                | Error::NotMorse(_)
                | Error::UnresolvedMultiplicities(_)
                | Error::LevelUnderdetermined(_)
                | Error::IntegralityFailure(_)
                | Error::DivisionByZero => 3,
                _ => 2,
            },
        }
    }
}

/// Where the polytope comes from.
#[derive(Clone, Debug, Default)]
pub struct InputSpec {
    pub catalog: Option<String>,
    pub polytope: Option<PathBuf>,
    pub corrections: Option<PathBuf>,
}

pub struct Loaded {
    pub polytope: MomentPolytope,
    pub corrections: Vec<Correction>,
}

impl InputSpec {
    pub fn load(&self) -> Result<Loaded, CliError> {
        let (polytope, mut corrections) = match (&self.catalog, &self.polytope) {
            (Some(spec), None) => {
                let e = catalog_from_spec(spec)?;
                (e.polytope, e.corrections)
            }
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                let file = PolytopeFile::from_json(&text)
                    .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
                file.into_parts()?
            }
            (Some(_), Some(_)) => return Err(CliError::Validation("give either --catalog or --polytope, not both".into())),
            (None, None) => return Err(CliError::Validation("one of --catalog or --polytope is required".into())),
        };
        if let Some(path) = &self.corrections {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let extra: Vec<Correction> = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("{}: parse error: {e}", path.display())))?;
            if let Some(c) = extra.iter().find(|c| c.monomial_z.len() != polytope.facet_count()) {
                return Err(CliError::Validation(format!(
                    "correction monomial has {} exponents, expected {}",
                    c.monomial_z.len(),
                    polytope.facet_count()
                )));
            }
            corrections.extend(extra);
        }
        polytope.ensure_valid()?;
        Ok(Loaded { polytope, corrections })
    }
}

/// Parses `"1/3,1/3"` or `"0.3, 0.25"`.
pub fn parse_point(s: &str) -> Result<Vec<Rational>, CliError> {
    s.split(',').map(|x| parse_rational(x).map_err(CliError::from)).collect()
}

fn point_strings(u: &[Rational]) -> Vec<String> {
    u.iter().map(format_rational).collect()
}

fn point_label(u: &[Rational]) -> String {
    format!("({})", u.iter().map(display_rational).collect::<Vec<_>>().join(", "))
}

fn build_potential(input: &Loaded, cfg: &RunConfig) -> Result<Potential, CliError> {
    let mut w = Potential::standard(&input.polytope, &input.corrections, &cfg.truncation_order()?)?;
    if cfg.assume_fano {
        w.clear_warnings();
    }
    Ok(w)
}

/// Something every subcommand prints.
pub trait Report: Serialize {
    fn text(&self) -> String;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("reports serialize"),
            Format::Text => self.text(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogItem {
    pub name: String,
    pub usage: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogList {
    pub entries: Vec<CatalogItem>,
}

impl Report for CatalogList {
    fn text(&self) -> String {
        self.entries.iter().map(|e| format!("{}\n", e.usage)).collect()
    }
}

pub fn cmd_catalog_list() -> CatalogList {
    CatalogList {
        entries: CATALOG_NAMES
            .iter()
            .map(|(name, usage)| CatalogItem { name: name.to_string(), usage: usage.to_string() })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameView {
    pub u: Vec<String>,
    pub potential: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialReport {
    pub potential: String,
    pub leading: String,
    pub fano: FanoType,
    pub truncation: String,
    pub dropped_corrections: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameView>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl Report for PotentialReport {
    fn text(&self) -> String {
        let mut s = format!("PO = {}\n", self.potential);
        let _ = writeln!(s, "fano type: {}", self.fano);
        let _ = writeln!(s, "truncation: T^{}", self.truncation);
        if self.dropped_corrections > 0 {
            let _ = writeln!(s, "corrections beyond the truncation: {}", self.dropped_corrections);
        }
        if let Some(f) = &self.frame {
            let _ = writeln!(s, "at u = ({}): PO = {}", f.u.join(", "), f.potential);
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

fn potential_report(w: &Potential, u: Option<&[Rational]>) -> Result<PotentialReport, CliError> {
    let frame = match u {
        Some(u) => {
            if u.len() != w.dim() {
                return Err(CliError::Validation(format!("--u has {} coordinates, expected {}", u.len(), w.dim())));
            }
            if !w.polytope().is_interior(u) {
                return Err(Error::NotInterior(point_label(u)).into());
            }
            Some(FrameView { u: point_strings(u), potential: w.poly().change_frame(u).render("ybar") })
        }
        None => None,
    };
    Ok(PotentialReport {
        potential: w.to_string(),
        leading: w.leading().render("y"),
        fano: w.fano_type(),
        truncation: display_rational(w.truncation()),
        dropped_corrections: w.dropped_corrections().len(),
        frame,
        warnings: w.warnings().to_vec(),
    })
}

pub fn cmd_potential(input: &InputSpec, cfg: &RunConfig, u: Option<&str>) -> Result<PotentialReport, CliError> {
    let loaded = input.load()?;
    let w = build_potential(&loaded, cfg)?;
    let u = u.map(parse_point).transpose()?;
    potential_report(&w, u.as_deref())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointsReport {
    pub potential: String,
    pub report: CriticalReport,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn critical_text(r: &CriticalReport) -> String {
    let mut s = format!("{} critical point(s), truncation T^{}\n", r.points.len(), display_rational(&r.truncation));
    for (i, p) in r.points.iter().enumerate() {
        let mult = p.multiplicity.map_or("?".to_string(), |m| m.to_string());
        let kind = if p.nondegenerate { "nondegenerate" } else { "degenerate" };
        let _ = writeln!(s, "[{}] u = {}  {kind}, multiplicity {mult}", i + 1, point_label(&p.u));
        for (k, y) in p.y.iter().enumerate() {
            let _ = writeln!(s, "    y{} = {}", k + 1, y.display_leading(LEADING_TERMS));
        }
    }
    for c in &r.positive_dimensional {
        let _ = writeln!(s, "positive-dimensional initial locus at u = {}", c.label());
    }
    s
}

impl Report for CriticalPointsReport {
    fn text(&self) -> String {
        let mut s = format!("PO = {}\n", self.potential);
        s.push_str(&critical_text(&self.report));
        for w in &self.warnings {
            let _ = writeln!(s, "warning: {w}");
        }
        s
    }
}

pub fn cmd_critical_points(input: &InputSpec, cfg: &RunConfig) -> Result<CriticalPointsReport, CliError> {
    let loaded = input.load()?;
    let w = build_potential(&loaded, cfg)?;
    let report = find_critical_points(&w, &cfg.solve_options()?)?;
    Ok(CriticalPointsReport { potential: w.to_string(), report, warnings: w.warnings().to_vec() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum LteReport {
    Point { system: LteSystem, verdict: BalanceVerdict },
    Grid { grid: usize, scanned: usize, balanced: Vec<BalanceVerdict> },
}

fn verdict_text(v: &BalanceVerdict) -> String {
    let mut s = format!("u = {}: strongly-bulk-balanced: {}", point_label(&v.u), v.balanced);
    if let Some(w) = &v.witness {
        let _ = write!(s, ", witness {}", w.render());
        if v.solution_count > 1 {
            let _ = write!(s, " (1 of {})", v.solution_count);
        }
    }
    if let Some(l) = v.obstructing_level {
        let _ = write!(s, ", no solution at level {l}");
    }
    s
}

impl Report for LteReport {
    fn text(&self) -> String {
        match self {
            LteReport::Point { system, verdict } => format!("{system}{}\n", verdict_text(verdict)),
            LteReport::Grid { grid, scanned, balanced } => {
                let mut s = format!("{grid}x{grid} grid: {scanned} interior point(s), {} balanced\n", balanced.len());
                for v in balanced {
                    let _ = writeln!(s, "{}", verdict_text(v));
                }
                s
            }
        }
    }
}

pub fn cmd_lte(input: &InputSpec, cfg: &RunConfig, u: Option<&str>, grid: Option<usize>) -> Result<LteReport, CliError> {
    let loaded = input.load()?;
    let p = &loaded.polytope;
    match (u, grid) {
        (Some(u), None) => {
            let u = parse_point(u)?;
            if u.len() != p.dim {
                return Err(CliError::Validation(format!("--u has {} coordinates, expected {}", u.len(), p.dim)));
            }
            let system = lte::leading_term_system(p, &u, &toricpo::BulkCoefficients::ones(p.facet_count()))?;
            let verdict = lte::verdict(&system)?;
            Ok(LteReport::Point { system, verdict })
        }
        (extra, Some(k)) => {
            let extra = extra.map(parse_point).transpose()?.into_iter().collect::<Vec<_>>();
            let k = if k == 0 { cfg.grid } else { k };
            let all = lte::scan_grid(p, k, &extra)?;
            let scanned = all.len();
            Ok(LteReport::Grid { grid: k, scanned, balanced: all.into_iter().filter(|v| v.balanced).collect() })
        }
        (None, None) => Err(CliError::Validation("lte needs --u or --grid".into())),
    }
}

impl Report for ResidueReport {
    fn text(&self) -> String {
        let mut s = format!("regime: {}\n", self.regime.label());
        for (i, p) in self.points.iter().enumerate() {
            let _ = writeln!(s, "[{}] u = {}", i + 1, point_label(&p.u));
            let _ = writeln!(s, "    Z     = {}", p.z.display_leading(LEADING_TERMS));
            let _ = writeln!(s, "    <1,1> = {}", p.pairing_diag.display_leading(LEADING_TERMS));
        }
        let _ = writeln!(
            s,
            "trace sum: max |coefficient| {:.3e}, tolerance {:.3e}: {}",
            self.trace.sum.max_abs_coefficient(),
            self.trace.tol_abs,
            if self.trace.vanishes { "vanishes" } else { "DOES NOT vanish" }
        );
        let _ = writeln!(s, "{}", morse_text(&self.morse));
        s
    }
}

fn morse_text(m: &MorseCount) -> String {
    let count = m.count_with_multiplicity.map_or("?".to_string(), |c| c.to_string());
    format!(
        "critical points: {} distinct, {count} with multiplicity; rank H = {}; morse: {}; verdict: {:?}",
        m.distinct, m.betti, m.morse, m.verdict
    )
}

pub fn cmd_residue_check(input: &InputSpec, cfg: &RunConfig) -> Result<ResidueReport, CliError> {
    let loaded = input.load()?;
    let w = build_potential(&loaded, cfg)?;
    let report = find_critical_points(&w, &cfg.solve_options()?)?;
    Ok(jacres::residue_report_with(&w, &report, cfg.tol_abs)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettiReport {
    pub betti: usize,
    pub vertices: Vec<Vec<String>>,
    pub fano: FanoType,
    pub validation: ValidationReport,
}

impl Report for BettiReport {
    fn text(&self) -> String {
        let mut s = format!("rank H = {} (vertices)\nfano type: {}\n", self.betti, self.fano);
        for v in &self.vertices {
            let _ = writeln!(s, "  ({})", v.join(", "));
        }
        s
    }
}

pub fn cmd_betti(input: &InputSpec) -> Result<BettiReport, CliError> {
    let loaded = input.load()?;
    let p = &loaded.polytope;
    let vertices = p.vertices()?.iter().map(|v| point_strings(&v.point)).collect::<Vec<_>>();
    Ok(BettiReport { betti: vertices.len(), vertices, fano: p.fano_check()?, validation: p.validate() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub potential: PotentialReport,
    pub betti: BettiReport,
    pub critical: CriticalReport,
    pub morse: MorseCount,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residue: Option<ResidueReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report for AnalyzeReport {
    fn text(&self) -> String {
        let mut s = self.potential.text();
        s.push_str(&self.betti.text());
        s.push_str(&critical_text(&self.critical));
        let _ = writeln!(s, "{}", morse_text(&self.morse));
        if let Some(r) = &self.residue {
            s.push_str(&r.text());
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }
}

pub fn cmd_analyze(input: &InputSpec, cfg: &RunConfig) -> Result<AnalyzeReport, CliError> {
    let loaded = input.load()?;
    let w = build_potential(&loaded, cfg)?;
    let potential = potential_report(&w, None)?;
    let betti = cmd_betti(input)?;
    let critical = find_critical_points(&w, &cfg.solve_options()?)?;
    let morse = jacres::morse_count_check(&w, &critical)?;
    let mut notes = Vec::new();
    let residue = if morse.morse && !critical.points.is_empty() {
        Some(jacres::residue_report_with(&w, &critical, cfg.tol_abs)?)
    } else {
        notes.push("residue pairing skipped: potential is not Morse".to_string());
        None
    };
    if !critical.positive_dimensional.is_empty() {
        notes.push(format!(
            "{} cell(s) with positive-dimensional initial locus; see the lte subcommand",
            critical.positive_dimensional.len()
        ));
    }
    Ok(AnalyzeReport { potential, betti, critical, morse, residue, notes })
}
