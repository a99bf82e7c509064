//! Solution and oracle JSON. Rationals are strings `p/q` (or integers).

use capkc_core::oracle::OptResult;
use capkc_core::pipeline::{ComponentReport, ComponentTrace};
use capkc_core::rational::{format as fmt_q, parse as parse_q};
use capkc_core::{Rational, Solution, Variant};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub vertices: Vec<usize>,
    pub k_i: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageJson {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParcelJson {
    pub origin: usize,
    pub location: usize,
    pub amount: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceJson {
    pub vertices: Vec<usize>,
    pub k_i: usize,
    pub stages: Vec<StageJson>,
    pub parcels: Vec<ParcelJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionJson {
    pub variant: String,
    pub tau_star: String,
    pub metric_radius: String,
    pub hop_radius: u32,
    pub ratio_bound: u32,
    pub opens: Vec<usize>,
    /// `null` for vertices that need no service (facilities of a supplier
    /// instance).
    pub assignment: Vec<Option<usize>>,
    pub components: Vec<ComponentJson>,
    pub certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clients: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facilities: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceJson>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JsonError {
    #[error("malformed solution JSON: {0}")]
    Syntax(String),
    #[error("field {field}: {value:?} is not a rational")]
    Rational { field: &'static str, value: String },
    #[error("unknown variant {0:?}")]
    Variant(String),
}

fn trace_json(t: &ComponentTrace) -> TraceJson {
    TraceJson {
        vertices: t.vertices.clone(),
        k_i: t.k_i,
        stages: t
            .stages
            .iter()
            .map(|s| StageJson {
                name: s.name.to_string(),
                values: s.values.iter().map(fmt_q).collect(),
            })
            .collect(),
        parcels: t
            .parcels
            .iter()
            .map(|p| ParcelJson {
                origin: p.origin,
                location: p.location,
                amount: fmt_q(&p.amount),
            })
            .collect(),
    }
}

impl From<&Solution> for SolutionJson {
    fn from(s: &Solution) -> Self {
        SolutionJson {
            variant: s.variant.name().to_string(),
            tau_star: fmt_q(&s.tau_star),
            metric_radius: fmt_q(&s.metric_radius),
            hop_radius: s.hop_radius,
            ratio_bound: s.ratio_bound,
            opens: s.opens.clone(),
            assignment: s.assignment.clone(),
            components: s
                .components
                .iter()
                .map(|c| ComponentJson {
                    vertices: c.vertices.clone(),
                    k_i: c.k_i,
                })
                .collect(),
            certified: s.certified,
            cost: s.cost.as_ref().map(fmt_q),
            budget: s.budget.as_ref().map(fmt_q),
            clients: s.clients.clone(),
            facilities: s.facilities.clone(),
            trace: s.trace.as_ref().map(|t| t.iter().map(trace_json).collect()),
        }
    }
}

fn rational(field: &'static str, value: &str) -> Result<Rational, JsonError> {
    parse_q(value).ok_or_else(|| JsonError::Rational {
        field,
        value: value.to_string(),
    })
}

impl SolutionJson {
    /// The solution without its trace.
    pub fn to_solution(&self) -> Result<Solution, JsonError> {
        let variant: Variant = self
            .variant
            .parse()
            .map_err(|_| JsonError::Variant(self.variant.clone()))?;
        Ok(Solution {
            variant,
            tau_star: rational("tau_star", &self.tau_star)?,
            metric_radius: rational("metric_radius", &self.metric_radius)?,
            hop_radius: self.hop_radius,
            ratio_bound: self.ratio_bound,
            opens: self.opens.clone(),
            assignment: self.assignment.clone(),
            components: self
                .components
                .iter()
                .map(|c| ComponentReport {
                    vertices: c.vertices.clone(),
                    k_i: c.k_i,
                })
                .collect(),
            certified: self.certified,
            cost: self.cost.as_deref().map(|c| rational("cost", c)).transpose()?,
            budget: self.budget.as_deref().map(|b| rational("budget", b)).transpose()?,
            clients: self.clients.clone(),
            facilities: self.facilities.clone(),
            trace: None,
        })
    }
}

pub fn solution_to_json(s: &Solution) -> String {
    serde_json::to_string_pretty(&SolutionJson::from(s)).expect("plain data serializes")
}

pub fn solution_from_json(text: &str) -> Result<Solution, JsonError> {
    let parsed: SolutionJson = serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))?;
    parsed.to_solution()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleJson {
    pub opt_radius: String,
    pub opens: Vec<usize>,
}

pub fn oracle_to_json(r: &OptResult) -> String {
    let out = OracleJson {
        opt_radius: fmt_q(&r.radius),
        opens: r.opens.clone(),
    };
    serde_json::to_string_pretty(&out).expect("plain data serializes")
}
