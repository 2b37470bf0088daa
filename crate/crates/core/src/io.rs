//! Structured-text file formats.
//!
//! Everything is UTF-8 TOML with every scalar written as an exact fraction
//! string `p/q` (or a plain integer); no floating point ever enters a data
//! field. Serialization is deterministic — fixed field order, fixed point
//! order — so identical inputs produce byte-identical outputs. An optional
//! decimal column can be added next to measure weights for human readers;
//! it never replaces the fractions.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corevar::{Decision, DecisionStatus, Hypothesis};
use crate::exact::Rat;
use crate::extend::{ExtensionProblem, TailRatio, TowerReport, TowerSpec};
use crate::faces::{FaceDescriptor, FastpathClass};
use crate::measure::AtomicMeasure;
use crate::space::{FunctionSystem, Functional, GroundSet, SubsetView};
use crate::{Error, Result};

fn parse_toml<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_toml<T: Serialize>(value: &T) -> String {
    toml::to_string(value).expect("file structs serialize infallibly")
}

/// A problem instance: labeled points with optional exact coordinates, a
/// named basis, the evaluation matrix (rows = basis functions), and the
/// functional in the dual basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<Rat>>>,
    pub basis: Vec<String>,
    pub evals: Vec<Vec<Rat>>,
    pub functional: Vec<Rat>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text)
    }

    pub fn render(&self) -> String {
        to_toml(self)
    }

    pub fn from_instance(system: &FunctionSystem, l: &Functional) -> Self {
        InstanceFile {
            points: system.ground().labels().to_vec(),
            coords: system.ground().coords().cloned(),
            basis: system.basis_names().to_vec(),
            evals: system
                .evals()
                .iter_rows()
                .map(|row| row.to_vec())
                .collect(),
            functional: l.coeffs().to_vec(),
        }
    }

    pub fn to_instance(&self) -> Result<(FunctionSystem, Functional)> {
        let ground = GroundSet::with_coords(self.points.clone(), self.coords.clone())?;
        let rows = self.evals.clone();
        for row in &rows {
            if row.len() != self.points.len() {
                return Err(Error::DimensionMismatch(format!(
                    "evaluation row of width {} for {} points",
                    row.len(),
                    self.points.len()
                )));
            }
        }
        let mat = crate::exact::Mat::from_rows(rows);
        let system = FunctionSystem::new(ground, self.basis.clone(), mat)?;
        let l = system.functional(self.functional.clone())?;
        Ok((system, l))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomEntry {
    pub point: String,
    pub weight: Rat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_decimal: Option<f64>,
}

/// A finitely atomic measure as labeled atoms with exact weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    #[serde(rename = "atom", default)]
    pub atoms: Vec<AtomEntry>,
}

impl MeasureFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text)
    }

    pub fn render(&self) -> String {
        to_toml(self)
    }

    pub fn from_measure(system: &FunctionSystem, m: &AtomicMeasure, decimals: bool) -> Self {
        MeasureFile {
            atoms: m
                .atoms()
                .iter()
                .map(|(j, w)| AtomEntry {
                    point: system.ground().labels()[*j].clone(),
                    weight: w.clone(),
                    weight_decimal: decimals.then(|| w.to_f64()),
                })
                .collect(),
        }
    }

    /// Atoms of a compressed cloud, labeled by their exact coordinates.
    pub fn from_cloud_measure(points: &[Vec<Rat>], m: &AtomicMeasure, decimals: bool) -> Self {
        MeasureFile {
            atoms: m
                .atoms()
                .iter()
                .map(|(j, w)| AtomEntry {
                    point: crate::space::coord_label(&points[*j]),
                    weight: w.clone(),
                    weight_decimal: decimals.then(|| w.to_f64()),
                })
                .collect(),
        }
    }

    pub fn to_measure(&self, system: &FunctionSystem) -> Result<AtomicMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                system
                    .ground()
                    .index_of(&a.point)
                    .map(|j| (j, a.weight.clone()))
                    .ok_or_else(|| Error::UnknownLabel(a.point.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        AtomicMeasure::new(atoms)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepEntry {
    pub index: usize,
    pub removed: Vec<String>,
    pub witness: Vec<Rat>,
}

/// Decision plus iteration trace, as emitted by `solve`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionFile {
    pub status: String,
    pub sign_flipped: bool,
    pub hypothesis: String,
    pub stabilized_at: usize,
    pub core: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Vec<Rat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fastpath: Option<String>,
    /// Whether the fast-path prediction matched the full iteration; absent
    /// unless the fast path was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fastpath_consistent: Option<bool>,
    #[serde(rename = "step", default)]
    pub steps: Vec<StepEntry>,
}

pub fn status_str(status: DecisionStatus) -> &'static str {
    match status {
        DecisionStatus::NoMeasure => "no-measure",
        DecisionStatus::HasMeasure => "has-measure",
        DecisionStatus::InconclusiveHypotheses => "inconclusive-hypotheses",
    }
}

pub fn hypothesis_str(h: Hypothesis) -> &'static str {
    match h {
        Hypothesis::Standing => "standing",
        Hypothesis::WeakTerminal => "weak-terminal",
        Hypothesis::None => "none",
    }
}

pub fn fastpath_str(c: FastpathClass) -> &'static str {
    match c {
        FastpathClass::Interior => "interior",
        FastpathClass::Boundary => "boundary",
        FastpathClass::Outside => "outside",
    }
}

impl DecisionFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text)
    }

    pub fn render(&self) -> String {
        to_toml(self)
    }

    pub fn from_decision(
        system: &FunctionSystem,
        d: &Decision,
        fastpath: Option<FastpathClass>,
    ) -> Self {
        let labels = |view: &SubsetView| -> Vec<String> {
            view.iter()
                .map(|j| system.ground().labels()[j].clone())
                .collect()
        };
        DecisionFile {
            status: status_str(d.status).to_string(),
            sign_flipped: d.sign_flipped,
            hypothesis: hypothesis_str(d.hypothesis).to_string(),
            stabilized_at: d.trace.stabilized_at,
            core: labels(d.trace.core()),
            rho: d.rho.clone(),
            fastpath: fastpath.map(|c| fastpath_str(c).to_string()),
            fastpath_consistent: None,
            steps: d
                .trace
                .certificates
                .iter()
                .map(|c| StepEntry {
                    index: c.step,
                    removed: c.removed.iter().map(|&j| system.ground().labels()[j].clone()).collect(),
                    witness: c.witness.clone(),
                })
                .collect(),
        }
    }
}

/// Face report, as emitted by `faces`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceFile {
    pub core: Vec<String>,
    pub exposed: bool,
    pub dual_face_generators: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relint_equal_to_compare: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare_member_of_face: Option<bool>,
}

impl FaceFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text)
    }

    pub fn render(&self) -> String {
        to_toml(self)
    }

    pub fn from_face(system: &FunctionSystem, face: &FaceDescriptor, generators: usize) -> Self {
        FaceFile {
            core: face
                .core
                .iter()
                .map(|j| system.ground().labels()[j].clone())
                .collect(),
            exposed: face.exposed,
            dual_face_generators: generators,
            relint_equal_to_compare: None,
            compare_member_of_face: None,
        }
    }
}

/// Extension problem: the full system plus a named sub-basis and the
/// functional on it. `rho`/`tail` feed the optional vanishing-ratio
/// diagnostic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionFile {
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<Rat>>>,
    pub basis: Vec<String>,
    pub evals: Vec<Vec<Rat>>,
    pub sub_basis: Vec<String>,
    pub sub_functional: Vec<Rat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<Vec<String>>,
}

impl ExtensionFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text)
    }

    pub fn render(&self) -> String {
        to_toml(self)
    }

    pub fn to_problem(&self) -> Result<(FunctionSystem, ExtensionProblem)> {
        let ground = GroundSet::with_coords(self.points.clone(), self.coords.clone())?;
        let mat = crate::exact::Mat::from_rows(self.evals.clone());
        let system = FunctionSystem::new(ground, self.basis.clone(), mat)?;
        let sub_rows = self
            .sub_basis
            .iter()
            .map(|name| {
                system
                    .basis_names()
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown basis name `{name}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let problem = ExtensionProblem::new(&system, sub_rows, self.sub_functional.clone())?;
        Ok((system, problem))
    }

    pub fn rho_row(&self, system: &FunctionSystem) -> Result<Option<usize>> {
        match &self.rho {
            None => Ok(None),
            Some(name) => system
                .basis_names()
                .iter()
                .position(|n| n == name)
                .map(Some)
                .ok_or_else(|| Error::InvalidInput(format!("unknown rho basis name `{name}`"))),
        }
    }

    pub fn tail_indices(&self, system: &FunctionSystem) -> Result<Option<BTreeSet<usize>>> {
        match &self.tail {
            None => Ok(None),
            Some(labels) => labels
                .iter()
                .map(|l| {
                    system
                        .ground()
                        .index_of(l)
                        .ok_or_else(|| Error::UnknownLabel(l.clone()))
                })
                .collect::<Result<BTreeSet<_>>>()
                .map(Some),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEntry {
    pub basis: String,
    pub max_ratio: Rat,
    pub at: String,
}

/// Result of `extend`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionResultFile {
    pub extension_exists: bool,
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extension: Option<Vec<Rat>>,
    #[serde(rename = "atom", default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomEntry>,
    /// Separating nonnegative function over the sub-basis when no
    /// extension exists.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separating: Option<Vec<Rat>>,
    #[serde(rename = "tail_ratio", default, skip_serializing_if = "Vec::is_empty")]
    pub tail_ratios: Vec<TailEntry>,
}

impl ExtensionResultFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text)
    }

    pub fn render(&self) -> String {
        to_toml(self)
    }

    pub fn tail_entries(report: &[TailRatio]) -> Vec<TailEntry> {
        report
            .iter()
            .map(|t| TailEntry {
                basis: t.basis_name.clone(),
                max_ratio: t.max_ratio.clone(),
                at: t.at_label.clone(),
            })
            .collect()
    }
}

/// Tower instance: a full system, the top functional, and nested levels
/// given by basis names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerFile {
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<Rat>>>,
    pub basis: Vec<String>,
    pub evals: Vec<Vec<Rat>>,
    pub functional: Vec<Rat>,
    pub levels: Vec<Vec<String>>,
}

impl TowerFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text)
    }

    pub fn render(&self) -> String {
        to_toml(self)
    }

    pub fn to_tower(&self) -> Result<(FunctionSystem, Functional, TowerSpec)> {
        let instance = InstanceFile {
            points: self.points.clone(),
            coords: self.coords.clone(),
            basis: self.basis.clone(),
            evals: self.evals.clone(),
            functional: self.functional.clone(),
        };
        let (system, top) = instance.to_instance()?;
        let levels = self
            .levels
            .iter()
            .map(|names| {
                names
                    .iter()
                    .map(|name| {
                        system
                            .basis_names()
                            .iter()
                            .position(|n| n == name)
                            .ok_or_else(|| {
                                Error::InvalidNesting(format!("unknown basis name `{name}`"))
                            })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = TowerSpec::new(&system, levels)?;
        Ok((system, top, spec))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerLevelEntry {
    pub level: usize,
    pub status: String,
    pub sign_flipped: bool,
    pub core: Vec<String>,
}

/// Result of `tower`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerResultFile {
    pub overall_has_measure: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<usize>,
    pub note: String,
    pub intersection: Vec<String>,
    #[serde(rename = "level", default)]
    pub levels: Vec<TowerLevelEntry>,
}

impl TowerResultFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text)
    }

    pub fn render(&self) -> String {
        to_toml(self)
    }

    pub fn build(
        system: &FunctionSystem,
        report: &TowerReport,
        intersection: &SubsetView,
        note: &str,
    ) -> Self {
        let labels = |view: &SubsetView| -> Vec<String> {
            view.iter()
                .map(|j| system.ground().labels()[j].clone())
                .collect()
        };
        TowerResultFile {
            overall_has_measure: report.overall_has_measure,
            first_failure: report.first_failure,
            note: note.to_string(),
            intersection: labels(intersection),
            levels: report
                .levels
                .iter()
                .map(|lr| TowerLevelEntry {
                    level: lr.level,
                    status: status_str(lr.status).to_string(),
                    sign_flipped: lr.sign_flipped,
                    core: labels(&lr.core),
                })
                .collect(),
        }
    }
}

/// Parses the plain-text cloud format: one point per line, whitespace
/// separated exact coordinates (fractions or decimals), optionally followed
/// by a weight (default 1). Blank lines and `#` comments are skipped.
pub fn parse_cloud(text: &str, nvars: usize) -> Result<(Vec<Vec<Rat>>, Vec<Rat>)> {
    if nvars == 0 {
        return Err(Error::InvalidInput("need at least one variable".into()));
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let weight = if tokens.len() == nvars {
            Rat::one()
        } else if tokens.len() == nvars + 1 {
            tokens[nvars]
                .parse::<Rat>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?
        } else {
            return Err(Error::Parse(format!(
                "line {}: expected {} or {} fields, found {}",
                lineno + 1,
                nvars,
                nvars + 1,
                tokens.len()
            )));
        };
        let coords = tokens[..nvars]
            .iter()
            .map(|t| {
                t.parse::<Rat>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        points.push(coords);
        weights.push(weight);
    }
    if points.is_empty() {
        return Err(Error::Parse("cloud file has no points".into()));
    }
    Ok((points, weights))
}
