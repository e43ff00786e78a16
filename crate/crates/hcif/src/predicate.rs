//! Predicate language, valuations and reset solving.
//!
//! Predicates are expression trees over three name forms of each model
//! variable: the plain form `x`, the dotted form `x'` (the derivative during
//! delays) and the stepped form `x+` (the post-action value used in resets).
//! Valuations assign values to the plain and dotted forms only; stepped
//! entries appear as a separate overlay when resets are evaluated.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A value carried by a variable: a real or a boolean.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(untagged)]
pub enum Value {
    Real(f64),
    Bool(bool),
}

impl Value {
    pub fn as_real(&self) -> Option<f64> {
        match self {
            Value::Real(r) => Some(*r),
            Value::Bool(_) => None,
        }
    }

    /// Exact equality; reals compare bitwise-equal via `==`.
    pub fn same(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Real(a), Value::Real(b)) => a == b,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            _ => false,
        }
    }

    pub fn approx_eq(&self, other: &Value, tol: f64) -> bool {
        match (self, other) {
            (Value::Real(a), Value::Real(b)) => (a - b).abs() <= tol,
            (Value::Bool(a), Value::Bool(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Real(r) => write!(f, "{}", r),
            Value::Bool(b) => write!(f, "{}", b),
        }
    }
}

/// Key of a valuation entry: a plain or dotted variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub dotted: bool,
}

impl Var {
    pub fn plain(name: impl Into<String>) -> Self {
        Var { name: name.into(), dotted: false }
    }

    pub fn dotted(name: impl Into<String>) -> Self {
        Var { name: name.into(), dotted: true }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, if self.dotted { "'" } else { "" })
    }
}

/// A variable occurrence in a predicate, in one of the three name forms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarRef {
    pub name: String,
    pub dotted: bool,
    pub stepped: bool,
}

impl VarRef {
    pub fn plain(name: impl Into<String>) -> Self {
        VarRef { name: name.into(), dotted: false, stepped: false }
    }

    pub fn dotted(name: impl Into<String>) -> Self {
        VarRef { name: name.into(), dotted: true, stepped: false }
    }

    pub fn stepped(name: impl Into<String>) -> Self {
        VarRef { name: name.into(), dotted: false, stepped: true }
    }

    /// The valuation key this occurrence resolves against (stepped forms
    /// resolve in the stepped overlay under the same key).
    pub fn base(&self) -> Var {
        Var { name: self.name.clone(), dotted: self.dotted }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{}",
            self.name,
            if self.dotted { "'" } else { "" },
            if self.stepped { "+" } else { "" }
        )
    }
}

/// Arithmetic expression over variables and rational constants.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(VarRef),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn var(v: VarRef) -> Self {
        Expr::Var(v)
    }

    /// Constant in parser-canonical form: negative values become a negated
    /// positive literal, so printing and reparsing preserves the tree.
    pub fn constant(c: f64) -> Self {
        if c < 0.0 {
            Expr::Neg(Box::new(Expr::Const(-c)))
        } else {
            Expr::Const(c)
        }
    }

    fn visit_vars(&self, f: &mut impl FnMut(&VarRef)) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => f(v),
            Expr::Neg(e) | Expr::Exp(e) => e.visit_vars(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    fn map_vars(&self, f: &impl Fn(&VarRef) -> VarRef) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(v) => Expr::Var(f(v)),
            Expr::Neg(e) => Expr::Neg(Box::new(e.map_vars(f))),
            Expr::Exp(e) => Expr::Exp(Box::new(e.map_vars(f))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.map_vars(f)), Box::new(b.map_vars(f))),
        }
    }
}

/// Comparison operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn eval(&self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

/// Boolean predicate over arithmetic comparisons.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    Lit(bool),
    Cmp(CmpOp, Expr, Expr),
    Not(Box<Predicate>),
    And(Box<Predicate>, Box<Predicate>),
    Or(Box<Predicate>, Box<Predicate>),
}

impl Predicate {
    pub const TRUE: Predicate = Predicate::Lit(true);
    pub const FALSE: Predicate = Predicate::Lit(false);

    pub fn cmp(op: CmpOp, lhs: Expr, rhs: Expr) -> Self {
        Predicate::Cmp(op, lhs, rhs)
    }

    /// `v = c` for a plain variable and a constant.
    pub fn var_eq_const(name: &str, c: f64) -> Self {
        Predicate::Cmp(CmpOp::Eq, Expr::Var(VarRef::plain(name)), Expr::Const(c))
    }

    /// Conjunction that drops literal `true` operands, so flattened models
    /// print exactly like hand-written ones. Literal `false` is preserved.
    pub fn conj(a: Predicate, b: Predicate) -> Predicate {
        match (a, b) {
            (Predicate::Lit(true), b) => b,
            (a, Predicate::Lit(true)) => a,
            (a, b) => Predicate::And(Box::new(a), Box::new(b)),
        }
    }

    /// Top-level conjuncts of an `and`-tree, left to right.
    pub fn conjuncts(&self) -> Vec<&Predicate> {
        match self {
            Predicate::And(a, b) => {
                let mut out = a.conjuncts();
                out.extend(b.conjuncts());
                out
            }
            other => vec![other],
        }
    }

    /// Whether any conjunct is the literal `false`.
    pub fn has_false_conjunct(&self) -> bool {
        self.conjuncts().iter().any(|c| matches!(c, Predicate::Lit(false)))
    }

    pub fn visit_vars(&self, f: &mut impl FnMut(&VarRef)) {
        match self {
            Predicate::Lit(_) => {}
            Predicate::Cmp(_, a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Predicate::Not(p) => p.visit_vars(f),
            Predicate::And(a, b) | Predicate::Or(a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    /// All variable occurrences in the predicate.
    pub fn variables(&self) -> BTreeSet<VarRef> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    pub fn uses_stepped(&self) -> bool {
        let mut found = false;
        self.visit_vars(&mut |v| found |= v.stepped);
        found
    }

    fn map_vars(&self, f: &impl Fn(&VarRef) -> VarRef) -> Predicate {
        match self {
            Predicate::Lit(b) => Predicate::Lit(*b),
            Predicate::Cmp(op, a, b) => Predicate::Cmp(*op, a.map_vars(f), b.map_vars(f)),
            Predicate::Not(p) => Predicate::Not(Box::new(p.map_vars(f))),
            Predicate::And(a, b) => {
                Predicate::And(Box::new(a.map_vars(f)), Box::new(b.map_vars(f)))
            }
            Predicate::Or(a, b) => {
                Predicate::Or(Box::new(a.map_vars(f)), Box::new(b.map_vars(f)))
            }
        }
    }

    /// The predicate with every variable occurrence renamed to its stepped
    /// form. Turns an initialization predicate like `c = 0` into the reset
    /// conjunct `c+ = 0`.
    pub fn stepped_form(&self) -> Predicate {
        self.map_vars(&|v| VarRef { name: v.name.clone(), dotted: v.dotted, stepped: true })
    }
}

/// Evaluation and reset-solving errors.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("type mismatch: expected a real value for `{0}`")]
    NotReal(String),
    #[error("unsupported reset form: {0}")]
    UnsupportedReset(String),
}

/// Total assignment of values to plain and dotted variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Valuation {
    entries: BTreeMap<Var, Value>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation { entries: BTreeMap::new() }
    }

    pub fn get(&self, var: &Var) -> Option<&Value> {
        self.entries.get(var)
    }

    pub fn set(&mut self, var: Var, value: Value) {
        self.entries.insert(var, value);
    }

    pub fn with(mut self, var: Var, value: Value) -> Self {
        self.set(var, value);
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Value)> {
        self.entries.iter()
    }

    /// Every key renamed to its stepped form, values unchanged.
    pub fn stepped(&self) -> SteppedValuation {
        SteppedValuation { entries: self.entries.clone() }
    }

    pub fn satisfies(&self, pred: &Predicate) -> Result<bool, EvalError> {
        EvalEnv { current: self, stepped: None }.satisfies(pred)
    }

    pub fn approx_eq(&self, other: &Valuation, tol: f64) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().all(|(k, v)| {
                other.entries.get(k).map(|w| v.approx_eq(w, tol)).unwrap_or(false)
            })
    }

    /// Deterministic key with reals quantized to the given tolerance, for
    /// memoization of visited states.
    pub fn quantized_key(&self, tol: f64) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for (var, value) in &self.entries {
            match value {
                Value::Real(r) => {
                    let q = (r / tol).round();
                    let q = if q.abs() < i64::MAX as f64 { q as i64 } else { i64::MAX };
                    let _ = write!(out, "{}={};", var, q);
                }
                Value::Bool(b) => {
                    let _ = write!(out, "{}={};", var, b);
                }
            }
        }
        out
    }
}

impl FromIterator<(Var, Value)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (Var, Value)>>(iter: T) -> Self {
        Valuation { entries: iter.into_iter().collect() }
    }
}

/// A valuation whose keys are understood in their stepped (`x+`) form.
///
/// The entries keep the underlying `Var` keys; the renaming to `x+` is
/// carried by the type so evaluation can route stepped occurrences here.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SteppedValuation {
    entries: BTreeMap<Var, Value>,
}

impl SteppedValuation {
    /// Look up the stepped entry `base+`.
    pub fn get(&self, base: &Var) -> Option<&Value> {
        self.entries.get(base)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Evaluation environment: the current valuation plus an optional stepped
/// overlay, forming `sigma ∪ sigma'+` when resets are checked.
#[derive(Debug, Clone, Copy)]
pub struct EvalEnv<'a> {
    pub current: &'a Valuation,
    pub stepped: Option<&'a SteppedValuation>,
}

impl<'a> EvalEnv<'a> {
    pub fn new(current: &'a Valuation) -> Self {
        EvalEnv { current, stepped: None }
    }

    pub fn with_stepped(current: &'a Valuation, stepped: &'a SteppedValuation) -> Self {
        EvalEnv { current, stepped: Some(stepped) }
    }

    fn lookup(&self, v: &VarRef) -> Result<Value, EvalError> {
        let base = v.base();
        let found = if v.stepped {
            self.stepped.and_then(|s| s.get(&base))
        } else {
            self.current.get(&base)
        };
        found.copied().ok_or_else(|| EvalError::Unbound(v.to_string()))
    }

    pub fn eval(&self, expr: &Expr) -> Result<f64, EvalError> {
        match expr {
            Expr::Const(c) => Ok(*c),
            Expr::Var(v) => match self.lookup(v)? {
                Value::Real(r) => Ok(r),
                Value::Bool(_) => Err(EvalError::NotReal(v.to_string())),
            },
            Expr::Neg(e) => Ok(-self.eval(e)?),
            Expr::Add(a, b) => Ok(self.eval(a)? + self.eval(b)?),
            Expr::Sub(a, b) => Ok(self.eval(a)? - self.eval(b)?),
            Expr::Mul(a, b) => Ok(self.eval(a)? * self.eval(b)?),
            Expr::Exp(e) => Ok(self.eval(e)?.exp()),
        }
    }

    pub fn satisfies(&self, pred: &Predicate) -> Result<bool, EvalError> {
        match pred {
            Predicate::Lit(b) => Ok(*b),
            Predicate::Cmp(op, a, b) => Ok(op.eval(self.eval(a)?, self.eval(b)?)),
            Predicate::Not(p) => Ok(!self.satisfies(p)?),
            Predicate::And(a, b) => Ok(self.satisfies(a)? && self.satisfies(b)?),
            Predicate::Or(a, b) => Ok(self.satisfies(a)? || self.satisfies(b)?),
        }
    }
}

/// Truth of a predicate under a valuation. Comparisons are evaluated
/// exactly as written, with no epsilon widening.
pub fn satisfies(env: EvalEnv<'_>, pred: &Predicate) -> Result<bool, EvalError> {
    env.satisfies(pred)
}

/// Every key of the valuation renamed to its stepped form.
pub fn stepped(sigma: &Valuation) -> SteppedValuation {
    sigma.stepped()
}

/// Outcome of solving a reset predicate in the functional fragment.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ResetSolution {
    pub valuation: Valuation,
    /// Variables the reset explicitly pinned, as opposed to frame-inherited.
    pub assigned: BTreeSet<Var>,
}

/// Core reset solver shared by `solve_reset` and the transition engine.
///
/// The supported fragment is a conjunction of boolean literals and
/// functional assignments `x+ = e` (either orientation) where `e` reads
/// only plain and dotted variables. `Ok(None)` means the reset is
/// unsatisfiable: a `false` literal or contradicting duplicate assignments.
pub(crate) fn solve_reset_core(
    kinds: &dyn Fn(&str) -> Option<crate::model::VarKind>,
    sigma: &Valuation,
    reset: &Predicate,
) -> Result<Option<ResetSolution>, EvalError> {
    let env = EvalEnv::new(sigma);
    let mut assignments: BTreeMap<Var, Value> = BTreeMap::new();
    for conjunct in reset.conjuncts() {
        match conjunct {
            Predicate::Lit(true) => {}
            Predicate::Lit(false) => return Ok(None),
            Predicate::Cmp(CmpOp::Eq, lhs, rhs) => {
                let (target, expr) = match (lhs, rhs) {
                    (Expr::Var(v), e) if v.stepped => (v, e),
                    (e, Expr::Var(v)) if v.stepped => (v, e),
                    _ => {
                        return Err(EvalError::UnsupportedReset(format!(
                            "conjunct `{}` is not a stepped assignment",
                            crate::printer::predicate_to_string(conjunct)
                        )))
                    }
                };
                let mut rhs_stepped = false;
                expr.visit_vars(&mut |v| rhs_stepped |= v.stepped);
                if rhs_stepped {
                    return Err(EvalError::UnsupportedReset(
                        "assignment right-hand side uses stepped variables".into(),
                    ));
                }
                let value = Value::Real(env.eval(expr)?);
                let key = target.base();
                if kinds(&key.name).is_none() {
                    return Err(EvalError::Unbound(target.to_string()));
                }
                match assignments.get(&key) {
                    Some(prev) if !prev.same(&value) => return Ok(None),
                    _ => {
                        assignments.insert(key, value);
                    }
                }
            }
            other => {
                return Err(EvalError::UnsupportedReset(format!(
                    "conjunct `{}` is outside the functional fragment",
                    crate::printer::predicate_to_string(other)
                )))
            }
        }
    }

    let mut next = sigma.clone();
    let assigned: BTreeSet<Var> = assignments.keys().cloned().collect();
    for (var, value) in assignments {
        // Dotted versions of discrete variables are identically zero; an
        // explicit assignment that disagrees makes the reset unsatisfiable.
        if var.dotted
            && kinds(&var.name) == Some(crate::model::VarKind::Discrete)
            && !value.same(&Value::Real(0.0))
        {
            return Ok(None);
        }
        next.set(var, value);
    }
    Ok(Some(ResetSolution { valuation: next, assigned }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Declarations, VarDecl, VarKind};

    fn decls() -> Declarations {
        Declarations::new(vec![
            VarDecl { name: "T".into(), kind: VarKind::Continuous },
            VarDecl { name: "x".into(), kind: VarKind::Continuous },
            VarDecl { name: "y".into(), kind: VarKind::Continuous },
            VarDecl { name: "n".into(), kind: VarKind::Discrete },
        ])
    }

    fn solve(sigma: &Valuation, r: &Predicate) -> Vec<Valuation> {
        crate::solve_reset(&decls(), sigma, r).unwrap()
    }

    #[test]
    fn satisfies_literal_equality() {
        let sigma = Valuation::new().with(Var::plain("T"), Value::Real(25.0));
        let p = Predicate::var_eq_const("T", 25.0);
        assert!(sigma.satisfies(&p).unwrap());
    }

    #[test]
    fn satisfies_thermostat_guards() {
        let sigma = Valuation::new().with(Var::plain("T"), Value::Real(25.0));
        let lt20 = Predicate::Cmp(CmpOp::Lt, Expr::Var(VarRef::plain("T")), Expr::Const(20.0));
        assert!(!sigma.satisfies(&lt20).unwrap());

        let sigma = Valuation::new().with(Var::plain("n"), Value::Real(1001.0));
        let le1000 =
            Predicate::Cmp(CmpOp::Le, Expr::Var(VarRef::plain("n")), Expr::Const(1000.0));
        assert!(!sigma.satisfies(&le1000).unwrap());
    }

    #[test]
    fn satisfies_unbound_is_error() {
        let sigma = Valuation::new();
        let p = Predicate::var_eq_const("T", 25.0);
        assert_eq!(sigma.satisfies(&p), Err(EvalError::Unbound("T".into())));
    }

    #[test]
    fn stepped_renames_every_key() {
        let sigma = Valuation::new().with(Var::plain("T"), Value::Real(25.0));
        let plus = sigma.stepped();
        assert_eq!(plus.get(&Var::plain("T")), Some(&Value::Real(25.0)));

        assert!(Valuation::new().stepped().is_empty());

        let sigma = Valuation::new()
            .with(Var::plain("n"), Value::Real(0.0))
            .with(Var::dotted("n"), Value::Real(0.0));
        let plus = sigma.stepped();
        assert_eq!(plus.get(&Var::plain("n")), Some(&Value::Real(0.0)));
        assert_eq!(plus.get(&Var::dotted("n")), Some(&Value::Real(0.0)));
        assert_eq!(plus.len(), 2);
    }

    #[test]
    fn reset_increment() {
        let sigma = Valuation::new().with(Var::plain("n"), Value::Real(5.0));
        // n+ = n + 1
        let r = Predicate::Cmp(
            CmpOp::Eq,
            Expr::Var(VarRef::stepped("n")),
            Expr::Add(Box::new(Expr::Var(VarRef::plain("n"))), Box::new(Expr::Const(1.0))),
        );
        let out = solve(&sigma, &r);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].get(&Var::plain("n")), Some(&Value::Real(6.0)));
    }

    #[test]
    fn reset_true_inherits_frame() {
        let sigma = Valuation::new()
            .with(Var::plain("x"), Value::Real(3.0))
            .with(Var::plain("n"), Value::Real(1.0));
        let out = solve(&sigma, &Predicate::TRUE);
        assert_eq!(out, vec![sigma]);
    }

    #[test]
    fn reset_satisfies_its_own_predicate() {
        let sigma = Valuation::new()
            .with(Var::plain("x"), Value::Real(3.0))
            .with(Var::plain("y"), Value::Real(0.0));
        // (x+ = x) and (y+ = 2 * x)
        let r = Predicate::And(
            Box::new(Predicate::Cmp(
                CmpOp::Eq,
                Expr::Var(VarRef::stepped("x")),
                Expr::Var(VarRef::plain("x")),
            )),
            Box::new(Predicate::Cmp(
                CmpOp::Eq,
                Expr::Var(VarRef::stepped("y")),
                Expr::Mul(Box::new(Expr::Const(2.0)), Box::new(Expr::Var(VarRef::plain("x")))),
            )),
        );
        let out = solve(&sigma, &r);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].get(&Var::plain("x")), Some(&Value::Real(3.0)));
        assert_eq!(out[0].get(&Var::plain("y")), Some(&Value::Real(6.0)));

        // sigma ∪ stepped(sigma') ⊨ r
        let plus = out[0].stepped();
        assert!(EvalEnv::with_stepped(&sigma, &plus).satisfies(&r).unwrap());
    }

    #[test]
    fn reset_contradiction_is_empty() {
        let sigma = Valuation::new().with(Var::plain("x"), Value::Real(0.0));
        let r = Predicate::And(
            Box::new(Predicate::Cmp(
                CmpOp::Eq,
                Expr::Var(VarRef::stepped("x")),
                Expr::Const(1.0),
            )),
            Box::new(Predicate::Cmp(
                CmpOp::Eq,
                Expr::Var(VarRef::stepped("x")),
                Expr::Const(2.0),
            )),
        );
        assert!(solve(&sigma, &r).is_empty());
    }

    #[test]
    fn reset_false_literal_is_empty() {
        let sigma = Valuation::new();
        assert!(solve(&sigma, &Predicate::FALSE).is_empty());
    }

    #[test]
    fn reset_outside_fragment_is_error() {
        let sigma = Valuation::new().with(Var::plain("x"), Value::Real(0.0));
        let r = Predicate::Cmp(CmpOp::Lt, Expr::Var(VarRef::stepped("x")), Expr::Const(1.0));
        let err = crate::solve_reset(&decls(), &sigma, &r).unwrap_err();
        assert!(matches!(err, EvalError::UnsupportedReset(_)));
    }

    #[test]
    fn stepped_form_renames_predicate() {
        let init = Predicate::var_eq_const("c", 0.0);
        let stepped = init.stepped_form();
        match &stepped {
            Predicate::Cmp(CmpOp::Eq, Expr::Var(v), Expr::Const(c)) => {
                assert!(v.stepped);
                assert_eq!(v.name, "c");
                assert_eq!(*c, 0.0);
            }
            other => panic!("unexpected shape: {:?}", other),
        }
    }
}
