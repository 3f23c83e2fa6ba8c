//! Scenario files: TOML key-value descriptions of one or more commands.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calculus::Mdim;
use crate::error::{Error, Result};

/// The dimension parameter as written in a scenario: a number or `"inf"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MValue {
    Number(f64),
    Text(String),
}

impl MValue {
    /// Finite numbers become `Number`; everything else stays text.
    pub fn parse(s: &str) -> MValue {
        match s.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => MValue::Number(x),
            _ => MValue::Text(s.trim().to_string()),
        }
    }

    fn normalized(self) -> MValue {
        match self {
            MValue::Number(x) if !x.is_finite() => MValue::Text(x.to_string()),
            other => other,
        }
    }

    pub fn to_mdim(&self) -> Result<Mdim> {
        match self {
            MValue::Number(x) if x.is_infinite() && *x > 0.0 => Ok(Mdim::Infinite),
            MValue::Number(x) => Ok(Mdim::Finite(*x)),
            MValue::Text(t) => match t.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "+inf" | "\u{221e}" => Ok(Mdim::Infinite),
                _ => Err(Error::Input(format!("m must be a number or \"inf\", got \"{t}\""))),
            },
        }
    }
}

/// A chart given in a scenario: coordinate box, axis kinds, base resolution
/// and the metric as expressions in the coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserChart {
    pub coordinates: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Periodic axes; defaults to none.
    #[serde(default)]
    pub periodic: Vec<bool>,
    /// Points per axis at refinement level 0.
    pub resolution: Vec<usize>,
    /// Upper triangle of g, row by row: g11, g12, …, g1n, g22, …, gnn.
    pub metric: Vec<String>,
}

/// One command with its parameters. Every key is optional; unset keys take
/// command-specific defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    /// Eigenproblem of `eig` or audit of `audit`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chart: Option<UserChart>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Semi-axes of the ellipsoid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub major: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_level: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stencil_order: Option<usize>,
    /// Points per axis at level 0, overriding the catalog default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<MValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub curvature_k: Option<f64>,
    #[serde(rename = "K1", skip_serializing_if = "Option::is_none")]
    pub k1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Almost-Schur target: h, s, r or sigma.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    /// Quantity of a `converge` study.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quantity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extrapolate: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conformally_flat: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<String>,
    /// Steps run in order, each merged over the keys of this table.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<Scenario>>,
}

macro_rules! overlay_fields {
    ($base:expr, $top:expr; $($field:ident),*) => {
        Scenario { $($field: $top.$field.clone().or_else(|| $base.$field.clone()),)* steps: None }
    };
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Scenario> {
        let sc: Scenario = toml::from_str(text).map_err(|e| {
            let position = e.span().map(|s| s.start).unwrap_or(0);
            Error::Parse { position, message: e.message().to_string() }
        })?;
        Ok(sc.normalized())
    }

    fn normalized(mut self) -> Scenario {
        self.m = self.m.map(MValue::normalized);
        self.steps = self.steps.map(|s| s.into_iter().map(Scenario::normalized).collect());
        self
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// `top` with unset keys taken from `self`.
    pub fn overlay(&self, top: &Scenario) -> Scenario {
        overlay_fields!(self, top;
            command, problem, geometry, chart, radius, axes, major, minor, level, levels, base_level,
            stencil_order, resolution, phi, v, f, m, beta, betas, curvature_k, k1, r, k, target,
            quantity, exact, extrapolate, conformally_flat, json, csv, plot)
    }

    /// The steps to run: each entry of `steps` over the shared keys, or the
    /// scenario itself. Flags in `overrides` win over both.
    pub fn expand(&self, overrides: &Scenario) -> Vec<Scenario> {
        match &self.steps {
            Some(steps) => steps.iter().map(|s| self.overlay(s).overlay(overrides)).collect(),
            None => vec![self.overlay(overrides)],
        }
    }

    /// Command and sub-command, accepting `command = "audit minkowski"`.
    pub fn command_parts(&self) -> Result<(String, Option<String>)> {
        let command = self.command.as_deref().ok_or_else(|| Error::Input("scenario step has no command".into()))?;
        let mut words = command.split_whitespace();
        let head = words.next().ok_or_else(|| Error::Input("empty command".into()))?.to_string();
        let tail = words.next().map(str::to_string);
        if words.next().is_some() {
            return Err(Error::Input(format!("malformed command \"{command}\"")));
        }
        Ok((head, tail.or_else(|| self.problem.clone())))
    }

    /// Keys recorded as run parameters in reports.
    pub fn parameters(&self) -> serde_json::Map<String, serde_json::Value> {
        let mut s = self.clone();
        s.command = None;
        s.problem = None;
        s.geometry = None;
        s.json = None;
        s.csv = None;
        s.plot = None;
        s.steps = None;
        match serde_json::to_value(&s) {
            Ok(serde_json::Value::Object(map)) => map,
            _ => serde_json::Map::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_inherit_and_flags_override() {
        let sc = Scenario::from_toml(
            r#"
            geometry = "flat-disk"
            m = "inf"
            K = 0.5
            [[steps]]
            command = "audit minkowski"
            m = 4
            [[steps]]
            command = "eig"
            problem = "steklov"
            "#,
        )
        .unwrap();
        let flags = Scenario { level: Some(1), ..Default::default() };
        let steps = sc.expand(&flags);
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].m, Some(MValue::Number(4.0)));
        assert_eq!(steps[1].m.as_ref().unwrap().to_mdim().unwrap(), Mdim::Infinite);
        assert!(steps.iter().all(|s| s.level == Some(1) && s.curvature_k == Some(0.5)));
        assert_eq!(steps[0].command_parts().unwrap(), ("audit".into(), Some("minkowski".into())));
        assert_eq!(steps[1].command_parts().unwrap(), ("eig".into(), Some("steklov".into())));
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_position() {
        match Scenario::from_toml("geometry = \"flat-disk\"\nbogus = 1\n") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 23),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn user_chart_and_toml_infinity() {
        let sc = Scenario::from_toml(
            r#"
            command = "eig closed"
            m = inf
            [chart]
            coordinates = ["u", "w"]
            lower = [0.0, 0.0]
            upper = [6.283185307179586, 6.283185307179586]
            periodic = [true, true]
            resolution = [16, 16]
            metric = ["1", "0", "1"]
            "#,
        )
        .unwrap();
        assert_eq!(sc.m.unwrap().to_mdim().unwrap(), Mdim::Infinite);
        assert_eq!(sc.chart.unwrap().metric.len(), 3);
        assert!(MValue::Text("huge".into()).to_mdim().is_err());
    }

    #[test]
    fn parameters_exclude_outputs() {
        let sc = Scenario { json: Some("a.json".into()), beta: Some(1.0), ..Default::default() };
        let p = sc.parameters();
        assert_eq!(p.len(), 1);
        assert!(p.contains_key("beta"));
    }
}
