//! Continuous flows satisfying tcp predicates.
//!
//! A tcp predicate is split into ODE conjuncts of the scalar linear form
//! `x' = a*x + b` and pointwise constraints. The ODE part has a closed-form
//! solution which is sampled on a fixed grid; the pointwise part is checked
//! at the samples of the half-open delay interval.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{Declarations, VarKind};
use crate::predicate::{CmpOp, EvalError, Expr, Predicate, Valuation, Value, Var};

/// Dynamics of one continuous variable during a delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarFlow {
    /// `x' = a*x + b`.
    Ode { a: f64, b: f64 },
    /// No ODE conjunct constrains the variable; it is held constant with a
    /// zero derivative.
    Unconstrained,
}

/// Per-variable dynamics plus the residual pointwise constraints of a tcp
/// predicate (or of a conjunction of tcp predicates across active levels).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FlowSpec {
    odes: BTreeMap<String, (f64, f64)>,
    pointwise: Vec<Predicate>,
}

impl FlowSpec {
    pub fn flow_of(&self, name: &str) -> VarFlow {
        match self.odes.get(name) {
            Some((a, b)) => VarFlow::Ode { a: *a, b: *b },
            None => VarFlow::Unconstrained,
        }
    }

    pub fn pointwise(&self) -> &[Predicate] {
        &self.pointwise
    }

    /// Merges the dynamics of another active level into this one. Two ODEs
    /// for the same variable must coincide exactly.
    pub fn merge(&mut self, other: &FlowSpec) -> Result<(), FlowError> {
        for (name, (a, b)) in &other.odes {
            match self.odes.get(name) {
                Some((a0, b0)) if (a0, b0) != (a, b) => {
                    return Err(FlowError::InconsistentDynamics { variable: name.clone() })
                }
                _ => {
                    self.odes.insert(name.clone(), (*a, *b));
                }
            }
        }
        self.pointwise.extend(other.pointwise.iter().cloned());
        Ok(())
    }
}

/// Errors raised while building or sampling a flow.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FlowError {
    #[error("duration {t} is not a multiple of the sample step {delta}")]
    NotSampleMultiple { t: f64, delta: f64 },
    #[error("sample step must be positive, got {0}")]
    BadSampleStep(f64),
    #[error("inconsistent dynamics for variable `{variable}`")]
    InconsistentDynamics { variable: String },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Splits a tcp predicate into scalar linear ODEs and pointwise conjuncts.
///
/// A conjunct `e1 = e2` is an ODE for continuous `x` when `e1 - e2` is
/// linear in exactly `x'` and (optionally) `x`. A second ODE conjunct for
/// the same variable must coincide; anything else stays pointwise.
pub fn extract_flow_spec(decls: &Declarations, tcp: &Predicate) -> Result<FlowSpec, FlowError> {
    let mut spec = FlowSpec::default();
    for conjunct in tcp.conjuncts() {
        if let Some((name, a, b)) = ode_form(decls, conjunct) {
            match spec.odes.get(&name) {
                Some(prev) if *prev != (a, b) => {
                    return Err(FlowError::InconsistentDynamics { variable: name })
                }
                _ => {
                    spec.odes.insert(name, (a, b));
                }
            }
        } else {
            spec.pointwise.push(conjunct.clone());
        }
    }
    Ok(spec)
}

fn ode_form(decls: &Declarations, p: &Predicate) -> Option<(String, f64, f64)> {
    let (lhs, rhs) = match p {
        Predicate::Cmp(CmpOp::Eq, l, r) => (l, r),
        _ => return None,
    };
    let diff = Expr::Sub(Box::new(lhs.clone()), Box::new(rhs.clone()));
    let (coeffs, constant) = linearize(&diff)?;

    let mut dotted: Option<(String, f64)> = None;
    let mut plain: Option<(String, f64)> = None;
    for (var, coeff) in &coeffs {
        if coeff == &0.0 {
            continue;
        }
        if var.dotted {
            if dotted.is_some() {
                return None;
            }
            dotted = Some((var.name.clone(), *coeff));
        } else {
            if plain.is_some() {
                return None;
            }
            plain = Some((var.name.clone(), *coeff));
        }
    }
    let (name, d) = dotted?;
    if decls.kind_of(&name) != Some(VarKind::Continuous) {
        return None;
    }
    let a = match plain {
        Some((pname, c)) if pname == name => -c / d,
        Some(_) => return None,
        None => 0.0,
    };
    Some((name, a, -constant / d))
}

/// Linear form `sum(coeff * var) + constant` of an expression, when it has
/// one. Products need a constant factor; `exp` only folds over constants.
fn linearize(e: &Expr) -> Option<(BTreeMap<Var, f64>, f64)> {
    match e {
        Expr::Const(c) => Some((BTreeMap::new(), *c)),
        Expr::Var(v) => {
            if v.stepped {
                return None;
            }
            let mut m = BTreeMap::new();
            m.insert(v.base(), 1.0);
            Some((m, 0.0))
        }
        Expr::Neg(inner) => {
            let (m, c) = linearize(inner)?;
            Some((m.into_iter().map(|(k, v)| (k, -v)).collect(), -c))
        }
        Expr::Add(a, b) => {
            let (ma, ca) = linearize(a)?;
            let (mut mb, cb) = linearize(b)?;
            for (k, v) in ma {
                *mb.entry(k).or_insert(0.0) += v;
            }
            Some((mb, ca + cb))
        }
        Expr::Sub(a, b) => {
            let (ma, ca) = linearize(a)?;
            let (mb, cb) = linearize(b)?;
            let mut m = ma;
            for (k, v) in mb {
                *m.entry(k).or_insert(0.0) -= v;
            }
            Some((m, ca - cb))
        }
        Expr::Mul(a, b) => {
            let (ma, ca) = linearize(a)?;
            let (mb, cb) = linearize(b)?;
            if ma.values().all(|v| *v == 0.0) {
                Some((mb.into_iter().map(|(k, v)| (k, v * ca)).collect(), ca * cb))
            } else if mb.values().all(|v| *v == 0.0) {
                Some((ma.into_iter().map(|(k, v)| (k, v * cb)).collect(), ca * cb))
            } else {
                None
            }
        }
        Expr::Exp(inner) => {
            let (m, c) = linearize(inner)?;
            if m.values().all(|v| *v == 0.0) {
                Some((BTreeMap::new(), c.exp()))
            } else {
                None
            }
        }
    }
}

/// Closed-form value of `x' = a*x + b` at time `s` from `x0`.
pub fn ode_value(a: f64, b: f64, x0: f64, s: f64) -> f64 {
    if a == 0.0 {
        x0 + b * s
    } else {
        -b / a + (x0 + b / a) * (a * s).exp()
    }
}

/// A variable trajectory sampled every `delta` time units.
#[derive(Debug, Clone, PartialEq)]
pub struct VarTrajectory {
    pub delta: f64,
    pub samples: Vec<Valuation>,
}

impl VarTrajectory {
    pub fn duration(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.delta
    }

    pub fn start(&self) -> &Valuation {
        self.samples.first().expect("trajectory has at least one sample")
    }

    pub fn end(&self) -> &Valuation {
        self.samples.last().expect("trajectory has at least one sample")
    }
}

/// Result of attempting a flow: either a trajectory, or a refusal because a
/// pointwise tcp conjunct fails at a sample of `[0, t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowOutcome {
    Trajectory(VarTrajectory),
    Refused { sample: usize },
}

pub(crate) fn sample_count(t: f64, delta: f64) -> Result<usize, FlowError> {
    if delta <= 0.0 {
        return Err(FlowError::BadSampleStep(delta));
    }
    if t < 0.0 {
        return Err(FlowError::NotSampleMultiple { t, delta });
    }
    let n = (t / delta).round();
    if (n * delta - t).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(FlowError::NotSampleMultiple { t, delta });
    }
    Ok(n as usize)
}

/// Samples the closed-form flow of `spec` from `sigma0` on the grid
/// `0, delta, .., n*delta`, without checking pointwise constraints.
///
/// The first sample is `sigma0` itself; from the second sample on, dotted
/// values of continuous variables carry the derivative `a*x + b` (zero when
/// unconstrained) and discrete variables stay constant with a zero dot.
pub(crate) fn sample_flow(
    decls: &Declarations,
    spec: &FlowSpec,
    sigma0: &Valuation,
    t: f64,
    delta: f64,
) -> Result<Vec<Valuation>, FlowError> {
    let n = sample_count(t, delta)?;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(sigma0.clone());
    for k in 1..=n {
        let s = k as f64 * delta;
        let mut rho = sigma0.clone();
        for d in decls.iter() {
            if d.kind != VarKind::Continuous {
                continue;
            }
            let x0 = sigma0
                .get(&Var::plain(&d.name))
                .and_then(Value::as_real)
                .ok_or_else(|| EvalError::Unbound(d.name.clone()))?;
            match spec.flow_of(&d.name) {
                VarFlow::Ode { a, b } => {
                    let x = ode_value(a, b, x0, s);
                    rho.set(Var::plain(&d.name), Value::Real(x));
                    rho.set(Var::dotted(&d.name), Value::Real(a * x + b));
                }
                VarFlow::Unconstrained => {
                    rho.set(Var::plain(&d.name), Value::Real(x0));
                    rho.set(Var::dotted(&d.name), Value::Real(0.0));
                }
            }
        }
        samples.push(rho);
    }
    Ok(samples)
}

/// The sampled trajectory from `sigma0` under `tcp` over `[0, t]`, or a
/// refusal when a pointwise conjunct fails on the half-open interval.
pub fn flow(
    decls: &Declarations,
    sigma0: &Valuation,
    tcp: &Predicate,
    t: f64,
    delta: f64,
) -> Result<FlowOutcome, FlowError> {
    let spec = extract_flow_spec(decls, tcp)?;
    let samples = sample_flow(decls, &spec, sigma0, t, delta)?;
    let n = samples.len() - 1;
    for (k, rho) in samples.iter().enumerate().take(n) {
        for p in spec.pointwise() {
            if !rho.satisfies(p).map_err(FlowError::Eval)? {
                return Ok(FlowOutcome::Refused { sample: k });
            }
        }
    }
    Ok(FlowOutcome::Trajectory(VarTrajectory { delta, samples }))
}
