//! Ionic-liquid selection with a reactor/separator network.
//!
//! The discrete model selects reactors, separators and one cation/anion
//! pair; its cost carries the operating terms with a factor of 2 exactly
//! as the formulation states it (the factor is not explained there and is
//! kept as is). The bilinear objective term `y_s * w_ca` is linearized with
//! variables `v[s,c,a]` defined by product constraints.
//!
//! The continuous model fixes those choices and optimizes the flows on the
//! reactor-to-separator edges. For a reactor `r`, inlet = (sum of its edge
//! flows) / alpha_r; for a separator `s`, inlet = sum of its edge flows and
//! outlet = beta_{s,c,a} * inlet for the selected pair. All cost
//! coefficients are non-negative, so every objective term grows with flow.

use serde::{Deserialize, Serialize};

use super::pattern::{run_blackbox, BlackBoxObjective, Evaluation, SearchOptions, SearchStatus};
use crate::ip::{BinaryProgram, Constraint, Sense};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reactor {
    pub name: String,
    pub fixed_cost: f64,
    pub oper_cost: f64,
    /// Conversion factor, outlet = alpha * inlet.
    pub alpha: f64,
    /// Coefficient of the inlet^0.6 capital term.
    pub feed_cost: f64,
    pub flow_lower: f64,
    pub flow_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Separator {
    pub name: String,
    pub fixed_cost: f64,
    pub oper_cost: f64,
    /// Coefficient of the inlet^2 term.
    pub quad_cost: f64,
    /// Cost per unit of material not recovered (inlet - outlet).
    pub waste_cost: f64,
    pub flow_lower: f64,
    pub flow_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IlDesignSpace {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub reactors: Vec<Reactor>,
    pub separators: Vec<Separator>,
    pub cations: Vec<String>,
    pub anions: Vec<String>,
    /// `beta[s][c][a]`, separation factor of separator `s` for the pair.
    pub beta: Vec<Vec<Vec<f64>>>,
    pub demand: f64,
    pub big_m: f64,
}

fn finite_nonneg(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Model(format!("{what} must be finite and non-negative, got {v}")))
    }
}

impl IlDesignSpace {
    pub fn from_json(s: &str) -> Result<Self> {
        let space: IlDesignSpace = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        space.validate()?;
        Ok(space)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reactors.is_empty() || self.separators.is_empty() {
            return Err(Error::Model("need at least one reactor and one separator".into()));
        }
        if self.cations.is_empty() || self.anions.is_empty() {
            return Err(Error::Model("need at least one cation and one anion".into()));
        }
        let mut names: Vec<&str> = self
            .reactors
            .iter()
            .map(|r| r.name.as_str())
            .chain(self.separators.iter().map(|s| s.name.as_str()))
            .chain(self.cations.iter().map(String::as_str))
            .chain(self.anions.iter().map(String::as_str))
            .collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Model("unit and ion names must be distinct".into()));
        }
        for r in &self.reactors {
            if !(r.alpha > 0.0 && r.alpha <= 1.0) {
                return Err(Error::Model(format!("reactor {}: alpha must lie in (0, 1]", r.name)));
            }
            for (what, v) in [
                ("fixed_cost", r.fixed_cost),
                ("oper_cost", r.oper_cost),
                ("feed_cost", r.feed_cost),
                ("flow_lower", r.flow_lower),
                ("flow_upper", r.flow_upper),
            ] {
                finite_nonneg(&format!("reactor {} {what}", r.name), v)?;
            }
            if r.flow_lower > r.flow_upper {
                return Err(Error::Model(format!("reactor {}: flow_lower > flow_upper", r.name)));
            }
        }
        for s in &self.separators {
            for (what, v) in [
                ("fixed_cost", s.fixed_cost),
                ("oper_cost", s.oper_cost),
                ("quad_cost", s.quad_cost),
                ("waste_cost", s.waste_cost),
                ("flow_lower", s.flow_lower),
                ("flow_upper", s.flow_upper),
            ] {
                finite_nonneg(&format!("separator {} {what}", s.name), v)?;
            }
            if s.flow_lower > s.flow_upper {
                return Err(Error::Model(format!("separator {}: flow_lower > flow_upper", s.name)));
            }
        }
        let shape_ok = self.beta.len() == self.separators.len()
            && self.beta.iter().all(|by_c| {
                by_c.len() == self.cations.len() && by_c.iter().all(|by_a| by_a.len() == self.anions.len())
            });
        if !shape_ok {
            return Err(Error::Model("beta must be indexed [separator][cation][anion]".into()));
        }
        if self.beta.iter().flatten().flatten().any(|&b| !(0.0..=1.0).contains(&b)) {
            return Err(Error::Model("beta values must lie in [0, 1]".into()));
        }
        finite_nonneg("demand", self.demand)?;
        if !(self.big_m.is_finite() && self.big_m > 0.0) {
            return Err(Error::Model("big_m must be positive".into()));
        }
        Ok(())
    }
}

fn var(p: &mut BinaryProgram, name: String) -> Result<usize> {
    p.add_var(name)
}

/// Discrete model. Requires exactly two reactors, since the
/// at-least-one-reactor rule is written with their pairwise product.
pub fn build_il_discrete(space: &IlDesignSpace) -> Result<BinaryProgram> {
    space.validate()?;
    if space.reactors.len() != 2 {
        return Err(Error::Model(format!(
            "the discrete model needs exactly 2 reactors, got {}",
            space.reactors.len()
        )));
    }
    let mut p = BinaryProgram::new();
    let y_r: Vec<usize> = space
        .reactors
        .iter()
        .map(|r| var(&mut p, format!("y[{}]", r.name)))
        .collect::<Result<_>>()?;
    let y_s: Vec<usize> = space
        .separators
        .iter()
        .map(|s| var(&mut p, format!("y[{}]", s.name)))
        .collect::<Result<_>>()?;
    let z_c: Vec<usize> = space
        .cations
        .iter()
        .map(|c| var(&mut p, format!("z[{c}]")))
        .collect::<Result<_>>()?;
    let z_a: Vec<usize> = space
        .anions
        .iter()
        .map(|a| var(&mut p, format!("z[{a}]")))
        .collect::<Result<_>>()?;
    let f_src: Vec<usize> = space
        .reactors
        .iter()
        .map(|r| var(&mut p, format!("f[src,{}]", r.name)))
        .collect::<Result<_>>()?;
    let f_sink: Vec<usize> = space
        .separators
        .iter()
        .map(|s| var(&mut p, format!("f[{},sink]", s.name)))
        .collect::<Result<_>>()?;
    let mut f_rs = vec![Vec::new(); space.reactors.len()];
    for (r, reactor) in space.reactors.iter().enumerate() {
        for s in &space.separators {
            f_rs[r].push(var(&mut p, format!("f[{},{}]", reactor.name, s.name))?);
        }
    }
    let mut w = vec![Vec::new(); space.cations.len()];
    for (c, cation) in space.cations.iter().enumerate() {
        for a in &space.anions {
            w[c].push(var(&mut p, format!("w[{cation},{a}]"))?);
        }
    }
    let mut v = Vec::new();
    for s in &space.separators {
        let mut by_c = Vec::new();
        for c in &space.cations {
            let mut by_a = Vec::new();
            for a in &space.anions {
                by_a.push(var(&mut p, format!("v[{},{c},{a}]", s.name))?);
            }
            by_c.push(by_a);
        }
        v.push(by_c);
    }

    for (r, reactor) in space.reactors.iter().enumerate() {
        p.set_cost(y_r[r], reactor.fixed_cost + 2.0 * reactor.oper_cost * reactor.alpha)?;
    }
    for (s, sep) in space.separators.iter().enumerate() {
        p.set_cost(y_s[s], sep.fixed_cost)?;
        for (vars, betas) in v[s].iter().zip(&space.beta[s]) {
            for (&var, &beta) in vars.iter().zip(betas) {
                p.set_cost(var, 2.0 * sep.oper_cost * beta)?;
            }
        }
    }

    for (r, reactor) in space.reactors.iter().enumerate() {
        p.add_constraint(
            Constraint::new(format!("reactor selection[{}]", reactor.name), Sense::Eq, 0.0)
                .term(f_src[r], 1.0)
                .term(y_r[r], -1.0),
        )?;
    }
    for (s, sep) in space.separators.iter().enumerate() {
        p.add_constraint(
            Constraint::new(format!("separator selection[{}]", sep.name), Sense::Eq, 0.0)
                .term(f_sink[s], 1.0)
                .term(y_s[s], -1.0),
        )?;
    }
    p.add_constraint(
        Constraint::new("source flow", Sense::Eq, 1.0)
            .term(f_src[0], 1.0)
            .term(f_src[1], 1.0)
            .product(f_src[0], f_src[1], -1.0),
    )?;
    let mut sink = Constraint::new("sink flow", Sense::Ge, 1.0);
    for &f in &f_sink {
        sink = sink.term(f, 1.0);
    }
    p.add_constraint(sink)?;
    for (r, reactor) in space.reactors.iter().enumerate() {
        for (s, sep) in space.separators.iter().enumerate() {
            let edge = f_rs[r][s];
            p.add_constraint(
                Constraint::new(
                    format!("edge needs reactor[{},{}]", reactor.name, sep.name),
                    Sense::Eq,
                    0.0,
                )
                .product(edge, f_src[r], 1.0)
                .term(edge, -1.0),
            )?;
            p.add_constraint(
                Constraint::new(
                    format!("edge needs separator[{},{}]", reactor.name, sep.name),
                    Sense::Eq,
                    0.0,
                )
                .product(edge, f_sink[s], 1.0)
                .term(edge, -1.0),
            )?;
        }
    }
    for (r, reactor) in space.reactors.iter().enumerate() {
        let mut c = Constraint::new(format!("reactor outflow[{}]", reactor.name), Sense::Ge, 0.0).term(f_src[r], -1.0);
        for &edge in &f_rs[r] {
            c = c.term(edge, 1.0);
        }
        p.add_constraint(c)?;
    }
    for (s, sep) in space.separators.iter().enumerate() {
        let mut c = Constraint::new(format!("separator inflow[{}]", sep.name), Sense::Ge, 0.0).term(f_sink[s], -1.0);
        for edges in &f_rs {
            c = c.term(edges[s], 1.0);
        }
        p.add_constraint(c)?;
    }
    let mut one_cation = Constraint::new("one cation", Sense::Eq, 1.0);
    for &z in &z_c {
        one_cation = one_cation.term(z, 1.0);
    }
    p.add_constraint(one_cation)?;
    let mut one_anion = Constraint::new("one anion", Sense::Eq, 1.0);
    for &z in &z_a {
        one_anion = one_anion.term(z, 1.0);
    }
    p.add_constraint(one_anion)?;
    for (c, cation) in space.cations.iter().enumerate() {
        for (a, anion) in space.anions.iter().enumerate() {
            p.add_constraint(
                Constraint::new(format!("ion pair[{cation},{anion}]"), Sense::Eq, 0.0)
                    .term(w[c][a], 1.0)
                    .product(z_c[c], z_a[a], -1.0),
            )?;
        }
    }
    for (s, sep) in space.separators.iter().enumerate() {
        for (c, cation) in space.cations.iter().enumerate() {
            for (a, anion) in space.anions.iter().enumerate() {
                p.add_constraint(
                    Constraint::new(format!("separator pair[{},{cation},{anion}]", sep.name), Sense::Eq, 0.0)
                        .term(v[s][c][a], 1.0)
                        .product(y_s[s], w[c][a], -1.0),
                )?;
            }
        }
    }
    let projection: Vec<usize> = y_r.iter().chain(&y_s).chain(&z_c).chain(&z_a).copied().collect();
    p.set_projection(projection)?;
    Ok(p)
}

/// Fixed discrete choices for the continuous model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlSelection {
    pub reactors: Vec<bool>,
    pub separators: Vec<bool>,
    pub cation: usize,
    pub anion: usize,
}

impl IlSelection {
    /// Parses a configuration key (projection bits: reactors, separators,
    /// cations, anions). Rejects keys that are infeasible for the discrete
    /// model.
    pub fn from_config_key(space: &IlDesignSpace, key: &str) -> Result<Self> {
        let bits = crate::bits_from_str(key)?;
        let (nr, ns, nc, na) = (
            space.reactors.len(),
            space.separators.len(),
            space.cations.len(),
            space.anions.len(),
        );
        if bits.len() != nr + ns + nc + na {
            return Err(Error::Dimension {
                expected: nr + ns + nc + na,
                got: bits.len(),
            });
        }
        let reactors = bits[..nr].to_vec();
        let separators = bits[nr..nr + ns].to_vec();
        let cations = &bits[nr + ns..nr + ns + nc];
        let anions = &bits[nr + ns + nc..];
        let one = |xs: &[bool]| {
            let on: Vec<usize> = (0..xs.len()).filter(|&i| xs[i]).collect();
            (on.len() == 1).then(|| on[0])
        };
        let (Some(cation), Some(anion)) = (one(cations), one(anions)) else {
            return Err(Error::Argument(format!(
                "configuration {key} must select one cation and one anion"
            )));
        };
        if !reactors.contains(&true) || !separators.contains(&true) {
            return Err(Error::Argument(format!(
                "configuration {key} must select a reactor and a separator"
            )));
        }
        Ok(Self {
            reactors,
            separators,
            cation,
            anion,
        })
    }

    pub fn config_key(&self, space: &IlDesignSpace) -> String {
        let mut bits = self.reactors.clone();
        bits.extend(&self.separators);
        bits.extend((0..space.cations.len()).map(|c| c == self.cation));
        bits.extend((0..space.anions.len()).map(|a| a == self.anion));
        crate::bits_to_string(&bits)
    }

    /// Reactor/separator edges carrying flow, reactor-major.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (r, &on_r) in self.reactors.iter().enumerate() {
            for (s, &on_s) in self.separators.iter().enumerate() {
                if on_r && on_s {
                    out.push((r, s));
                }
            }
        }
        out
    }
}

/// Derived stream values at a flow point.
#[derive(Debug, Clone, PartialEq)]
pub struct IlStreams {
    pub reactor_in: Vec<f64>,
    pub separator_in: Vec<f64>,
    pub separator_out: Vec<f64>,
}

pub fn streams(space: &IlDesignSpace, sel: &IlSelection, flows: &[f64]) -> IlStreams {
    let mut reactor_out = vec![0.0; space.reactors.len()];
    let mut separator_in = vec![0.0; space.separators.len()];
    for (&(r, s), &x) in sel.edges().iter().zip(flows) {
        reactor_out[r] += x;
        separator_in[s] += x;
    }
    let reactor_in = reactor_out
        .iter()
        .zip(&space.reactors)
        .map(|(out, r)| out / r.alpha)
        .collect();
    let separator_out = separator_in
        .iter()
        .enumerate()
        .map(|(s, inflow)| space.beta[s][sel.cation][sel.anion] * inflow)
        .collect();
    IlStreams {
        reactor_in,
        separator_in,
        separator_out,
    }
}

/// Continuous objective: fixed costs of selected units, reactor inlet^0.6
/// terms, separator inlet^2 terms and separator losses.
pub fn objective(space: &IlDesignSpace, sel: &IlSelection, flows: &[f64]) -> f64 {
    let st = streams(space, sel, flows);
    let mut total = fixed_cost(space, sel);
    for (r, reactor) in space.reactors.iter().enumerate() {
        total += reactor.feed_cost * st.reactor_in[r].powf(0.6);
    }
    for (s, sep) in space.separators.iter().enumerate() {
        total += sep.quad_cost * st.separator_in[s].powi(2);
        total += sep.waste_cost * (st.separator_in[s] - st.separator_out[s]);
    }
    total
}

/// Sum of fixed costs of the selected units, a lower bound on the
/// continuous objective.
pub fn fixed_cost(space: &IlDesignSpace, sel: &IlSelection) -> f64 {
    let reactors = space
        .reactors
        .iter()
        .zip(&sel.reactors)
        .filter(|(_, &on)| on)
        .map(|(r, _)| r.fixed_cost);
    let separators = space
        .separators
        .iter()
        .zip(&sel.separators)
        .filter(|(_, &on)| on)
        .map(|(s, _)| s.fixed_cost);
    reactors.chain(separators).sum()
}

/// Analytic lower bound on the continuous objective of a selection.
///
/// With `T` the total separator inlet, demand forces `T >= d / beta_max`,
/// and the lower bounds force `T >= sum f^L_s`. Then, term by term:
/// reactor inlets sum to at least `T / alpha_max` and `x^0.6` is
/// subadditive; `sum q_s in_s^2 >= T^2 / sum(1/q_s)`; and losses are at
/// least the smallest loss rate times `T`. Infinite when demand cannot be
/// met at all.
pub fn objective_lower_bound(space: &IlDesignSpace, sel: &IlSelection) -> f64 {
    let on_r: Vec<&Reactor> = space
        .reactors
        .iter()
        .zip(&sel.reactors)
        .filter_map(|(r, &on)| on.then_some(r))
        .collect();
    let on_s: Vec<(usize, &Separator)> = space
        .separators
        .iter()
        .enumerate()
        .zip(&sel.separators)
        .filter_map(|(s, &on)| on.then_some(s))
        .collect();
    let beta = |s: usize| space.beta[s][sel.cation][sel.anion];
    let beta_max = on_s.iter().map(|&(s, _)| beta(s)).fold(0.0, f64::max);
    if space.demand > 0.0 && beta_max == 0.0 {
        return f64::INFINITY;
    }
    let demand_total = if space.demand > 0.0 {
        space.demand / beta_max
    } else {
        0.0
    };
    let t = demand_total.max(on_s.iter().map(|(_, s)| s.flow_lower).sum());
    let alpha_max = on_r.iter().map(|r| r.alpha).fold(0.0, f64::max);
    let feed_each: f64 = on_r.iter().map(|r| r.feed_cost * r.flow_lower.powf(0.6)).sum();
    let feed_min = on_r.iter().map(|r| r.feed_cost).fold(f64::INFINITY, f64::min);
    let feed = feed_each.max(feed_min * (t / alpha_max).powf(0.6));
    let quad_each: f64 = on_s.iter().map(|(_, s)| s.quad_cost * s.flow_lower.powi(2)).sum();
    let quad_total = if on_s.iter().all(|(_, s)| s.quad_cost > 0.0) {
        t * t / on_s.iter().map(|(_, s)| 1.0 / s.quad_cost).sum::<f64>()
    } else {
        0.0
    };
    let loss_rate = on_s
        .iter()
        .map(|&(s, sep)| sep.waste_cost * (1.0 - beta(s)))
        .fold(f64::INFINITY, f64::min);
    fixed_cost(space, sel) + feed + quad_each.max(quad_total) + loss_rate * t
}

/// Largest violation over all continuous constraints: non-negative flows,
/// unit flow bounds (zero for unselected units), outlet definitions for
/// every ion pair under big-M relaxation, and demand.
pub fn max_violation(space: &IlDesignSpace, sel: &IlSelection, flows: &[f64]) -> f64 {
    let st = streams(space, sel, flows);
    let mut worst: f64 = flows.iter().map(|&x| -x).fold(0.0, f64::max);
    let mut bound = |value: f64, on: bool, lo: f64, hi: f64| {
        let (lo, hi) = if on { (lo, hi) } else { (0.0, 0.0) };
        worst = worst.max(lo - value).max(value - hi);
    };
    for (r, reactor) in space.reactors.iter().enumerate() {
        bound(
            st.reactor_in[r],
            sel.reactors[r],
            reactor.flow_lower,
            reactor.flow_upper,
        );
    }
    for (s, sep) in space.separators.iter().enumerate() {
        bound(st.separator_in[s], sel.separators[s], sep.flow_lower, sep.flow_upper);
    }
    for s in 0..space.separators.len() {
        for c in 0..space.cations.len() {
            for a in 0..space.anions.len() {
                let active = usize::from(c == sel.cation) + usize::from(a == sel.anion);
                let slack = space.big_m * (2 - active) as f64;
                let gap = (st.separator_out[s] - space.beta[s][c][a] * st.separator_in[s]).abs();
                worst = worst.max(gap - slack);
            }
        }
    }
    let produced: f64 = st.separator_out.iter().sum();
    worst.max(space.demand - produced)
}

/// The continuous model as a black-box objective keyed by configuration.
pub struct IlContinuous<'a> {
    pub space: &'a IlDesignSpace,
}

impl IlContinuous<'_> {
    fn selection(&self, config: &str) -> Option<IlSelection> {
        IlSelection::from_config_key(self.space, config).ok()
    }

    fn edge_upper(&self, r: usize, s: usize) -> f64 {
        (self.space.reactors[r].alpha * self.space.reactors[r].flow_upper).min(self.space.separators[s].flow_upper)
    }
}

impl BlackBoxObjective for IlContinuous<'_> {
    fn bounds(&self, config: &str) -> Vec<(f64, f64)> {
        self.selection(config)
            .map(|sel| sel.edges().iter().map(|&(r, s)| (0.0, self.edge_upper(r, s))).collect())
            .unwrap_or_default()
    }

    /// Start high: every unit's capacity is shared evenly among its edges,
    /// so no unit is overloaded.
    fn start_point(&self, config: &str) -> Option<Vec<f64>> {
        let sel = self.selection(config)?;
        let edges = sel.edges();
        let degree = |pick: &dyn Fn(&(usize, usize)) -> bool| edges.iter().filter(|e| pick(e)).count() as f64;
        Some(
            edges
                .iter()
                .map(|&(r, s)| {
                    let reactor = &self.space.reactors[r];
                    let by_reactor = reactor.alpha * reactor.flow_upper / degree(&|e| e.0 == r);
                    let by_separator = self.space.separators[s].flow_upper / degree(&|e| e.1 == s);
                    by_reactor.min(by_separator)
                })
                .collect(),
        )
    }

    fn evaluate(&self, config: &str, x: &[f64]) -> Evaluation {
        let Some(sel) = self.selection(config) else {
            return Evaluation::Failed(format!("invalid configuration {config}"));
        };
        if max_violation(self.space, &sel, x) > 0.0 {
            Evaluation::Infeasible
        } else {
            Evaluation::Ok(objective(self.space, &sel, x))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContinuousStatus {
    Ok,
    ContinuousInfeasible,
}

impl ContinuousStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContinuousStatus::Ok => "ok",
            ContinuousStatus::ContinuousInfeasible => "continuous-infeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSolution {
    pub status: ContinuousStatus,
    /// `(reactor, separator, flow)` per edge.
    pub flows: Vec<(String, String, f64)>,
    pub objective: Option<f64>,
    pub evaluations: usize,
}

/// Optimizes edge flows at fixed discrete choices.
pub fn il_continuous_solve(
    space: &IlDesignSpace,
    sel: &IlSelection,
    opts: &SearchOptions,
) -> Result<ContinuousSolution> {
    let key = sel.config_key(space);
    IlSelection::from_config_key(space, &key)?;
    let result = run_blackbox(&IlContinuous { space }, &key, opts);
    let edges = sel.edges();
    let flows = match &result.best_point {
        Some(x) => edges
            .iter()
            .zip(x)
            .map(|(&(r, s), &f)| (space.reactors[r].name.clone(), space.separators[s].name.clone(), f))
            .collect(),
        None => Vec::new(),
    };
    Ok(ContinuousSolution {
        status: match result.status {
            SearchStatus::Ok => ContinuousStatus::Ok,
            SearchStatus::NoFeasibleEvaluation => ContinuousStatus::ContinuousInfeasible,
        },
        flows,
        objective: result.best_score,
        evaluations: result.evaluations,
    })
}

/// Optimal flow for a selection with one reactor and one separator. Every
/// cost term increases with flow, so the optimum is the smallest flow that
/// satisfies demand and both lower bounds. `None` if that flow exceeds an
/// upper bound or the selection is not a single path.
pub fn single_path_optimum(space: &IlDesignSpace, sel: &IlSelection) -> Option<f64> {
    let edges = sel.edges();
    let &[(r, s)] = edges.as_slice() else { return None };
    let reactor = &space.reactors[r];
    let sep = &space.separators[s];
    let beta = space.beta[s][sel.cation][sel.anion];
    let demand_flow = if space.demand == 0.0 {
        0.0
    } else if beta > 0.0 {
        space.demand / beta
    } else {
        return None;
    };
    let t = demand_flow.max(sep.flow_lower).max(reactor.alpha * reactor.flow_lower);
    let ok = t <= sep.flow_upper && t / reactor.alpha <= reactor.flow_upper;
    ok.then_some(t)
}

/// Exhaustive grid search over the edge flows at spacing `step`, for
/// selections with at most two edges. Returns the best feasible objective
/// and point.
pub fn grid_search(space: &IlDesignSpace, sel: &IlSelection, step: f64) -> Result<Option<(f64, Vec<f64>)>> {
    let cont = IlContinuous { space };
    let key = sel.config_key(space);
    let bounds = cont.bounds(&key);
    if bounds.len() > 2 || step.is_nan() || step <= 0.0 {
        return Err(Error::Argument(
            "grid search needs at most two edges and a positive step".into(),
        ));
    }
    let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
        let n = ((hi - lo) / step).floor() as usize;
        (0..=n).map(|k| lo + k as f64 * step).collect()
    };
    let axes: Vec<Vec<f64>> = bounds.iter().map(|&b| axis(b)).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        if let Evaluation::Ok(v) = cont.evaluate(&key, &x) {
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, x));
            }
        }
    };
    match axes.as_slice() {
        [] => consider(Vec::new()),
        [a] => a.iter().for_each(|&x| consider(vec![x])),
        [a, b] => {
            for &x in a {
                for &y in b {
                    consider(vec![x, y]);
                }
            }
        }
        _ => unreachable!("checked above"),
    }
    Ok(best)
}
