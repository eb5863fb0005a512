//! Drug-substance manufacturing superstructure.
//!
//! One binary per flow stands for both the flow and the unit it passes
//! through. Node balances force exactly one option per disjunction, and
//! logic rules of the form `sum(positive) + sum(1 - negative) >= rhs`
//! encode the continuous-to-batch holding-tank requirements.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::ip::{BinaryProgram, Constraint, Sense};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flow {
    pub id: String,
    /// Unit the flow activates, for display.
    #[serde(default)]
    pub unit: String,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub name: String,
    #[serde(rename = "in")]
    pub inflows: Vec<String>,
    #[serde(rename = "out")]
    pub outflows: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogicRule {
    pub label: String,
    #[serde(default)]
    pub positive: Vec<String>,
    #[serde(default)]
    pub negative: Vec<String>,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DsDesignSpace {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub flows: Vec<Flow>,
    pub nodes: Vec<Node>,
    pub logic: Vec<LogicRule>,
    pub source: String,
    pub sink: String,
    /// Flows that identify a configuration.
    pub projection: Vec<String>,
}

impl DsDesignSpace {
    pub fn from_json(s: &str) -> Result<Self> {
        let space: DsDesignSpace = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        space.validate()?;
        Ok(space)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    fn flow_index(&self, id: &str) -> Result<usize> {
        self.flows
            .iter()
            .position(|f| f.id == id)
            .ok_or_else(|| Error::Model(format!("unknown flow {id:?}")))
    }

    pub fn validate(&self) -> Result<()> {
        let ids: BTreeSet<&str> = self.flows.iter().map(|f| f.id.as_str()).collect();
        if ids.len() != self.flows.len() {
            return Err(Error::Model("flow ids must be unique".into()));
        }
        if let Some(f) = self.flows.iter().find(|f| !f.cost.is_finite()) {
            return Err(Error::Model(format!("flow {}: cost must be finite", f.id)));
        }
        self.flow_index(&self.source)?;
        self.flow_index(&self.sink)?;
        let mut incident = BTreeSet::new();
        for n in &self.nodes {
            for id in n.inflows.iter().chain(&n.outflows) {
                self.flow_index(id)?;
                incident.insert(id.as_str());
            }
        }
        if let Some(orphan) = ids.difference(&incident).next() {
            return Err(Error::Model(format!("flow {orphan} is not attached to any node")));
        }
        for rule in &self.logic {
            for id in rule.positive.iter().chain(&rule.negative) {
                self.flow_index(id)?;
            }
            if !rule.rhs.is_finite() {
                return Err(Error::Model(format!("rule {}: rhs must be finite", rule.label)));
            }
        }
        for id in &self.projection {
            self.flow_index(id)?;
        }
        Ok(())
    }
}

pub fn build_ds_discrete(space: &DsDesignSpace) -> Result<BinaryProgram> {
    space.validate()?;
    let mut p = BinaryProgram::new();
    for f in &space.flows {
        let v = p.add_var(f.id.clone())?;
        p.set_cost(v, f.cost)?;
    }
    for n in &space.nodes {
        let mut c = Constraint::new(format!("flow conservation[{}]", n.name), Sense::Eq, 0.0);
        for id in &n.inflows {
            c = c.term(space.flow_index(id)?, 1.0);
        }
        for id in &n.outflows {
            c = c.term(space.flow_index(id)?, -1.0);
        }
        p.add_constraint(c)?;
    }
    for rule in &space.logic {
        let mut c = Constraint::new(rule.label.clone(), Sense::Ge, rule.rhs - rule.negative.len() as f64);
        for id in &rule.positive {
            c = c.term(space.flow_index(id)?, 1.0);
        }
        for id in &rule.negative {
            c = c.term(space.flow_index(id)?, -1.0);
        }
        p.add_constraint(c)?;
    }
    p.add_constraint(
        Constraint::new("source/sink activation", Sense::Eq, 2.0)
            .term(space.flow_index(&space.source)?, 1.0)
            .term(space.flow_index(&space.sink)?, 1.0),
    )?;
    let projection = space
        .projection
        .iter()
        .map(|id| space.flow_index(id))
        .collect::<Result<Vec<_>>>()?;
    p.set_projection(projection)?;
    Ok(p)
}
