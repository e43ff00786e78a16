//! Model loading pipeline: parse, validate, and the optional reset
//! augmentation that lets entering edges establish substructure
//! initializations.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{
    AtomicAutomaton, Composition, Declarations, Diagnostic, Edge, VarKind,
};
use crate::predicate::{CmpOp, EvalEnv, Expr, Predicate, Valuation, Value, Var};
use crate::syntax::{parse, ModelFile, ParseError};

/// Errors raised while loading a model file.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LoadError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("model is not well-formed:\n{}", .0.iter().map(|d| format!("  {}", d)).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

/// A parsed and validated model.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub file: ModelFile,
    pub decls: Declarations,
}

/// Parses and validates a model file.
pub fn load(src: &str) -> Result<LoadedModel, LoadError> {
    let file = parse(src)?;
    let decls = file.declarations();
    let diags = crate::model::validate(&file.comp, &decls);
    if !diags.is_empty() {
        return Err(LoadError::Invalid(diags));
    }
    Ok(LoadedModel { file, decls })
}

/// Constant value of a variable-free expression.
fn const_value(e: &Expr) -> Option<f64> {
    let empty = Valuation::new();
    EvalEnv::new(&empty).eval(e).ok()
}

/// Conjuncts `x+ = e` derived from the initialization predicates an entering
/// edge must establish: for each spine automaton of the substructure with
/// exactly one possibly-initial location, the `x = constant` conjuncts of
/// that location's init predicate, renamed to stepped form.
///
/// Substructures with several possibly-initial locations are left alone; for
/// those the eager choice deciding among them has to be driven by the edge's
/// own reset.
fn entry_conjuncts(sub: &Composition) -> Vec<Predicate> {
    let mut out = Vec::new();
    for automaton in sub.spine() {
        let live: Vec<_> = automaton
            .locations
            .iter()
            .filter(|v| automaton.init_of(v) != &Predicate::FALSE)
            .collect();
        let [only] = live.as_slice() else { continue };
        for conjunct in automaton.init_of(only).conjuncts() {
            let (var, value) = match conjunct {
                Predicate::Cmp(CmpOp::Eq, Expr::Var(v), e) if !v.dotted && !v.stepped => (v, e),
                Predicate::Cmp(CmpOp::Eq, e, Expr::Var(v)) if !v.dotted && !v.stepped => (v, e),
                _ => continue,
            };
            if const_value(value).is_none() {
                continue;
            }
            out.push(Predicate::Cmp(
                CmpOp::Eq,
                Expr::Var(crate::predicate::VarRef::stepped(var.name.clone())),
                value.clone(),
            ));
        }
    }
    out
}

fn augment_automaton(a: &AtomicAutomaton) -> AtomicAutomaton {
    let hierarchy: BTreeMap<_, _> = a
        .hierarchy
        .iter()
        .map(|(v, sub)| (v.clone(), augment_comp(sub)))
        .collect();
    let edges = a
        .edges
        .iter()
        .map(|e| {
            let mut reset = e.reset.clone();
            if let Some(sub) = a.hierarchy.get(&e.target) {
                for conjunct in entry_conjuncts(sub) {
                    reset = Predicate::conj(reset, conjunct);
                }
            }
            Edge { reset, ..e.clone() }
        })
        .collect();
    AtomicAutomaton { hierarchy, edges, ..a.clone() }
}

fn augment_comp(c: &Composition) -> Composition {
    match c {
        Composition::Atomic(a) => Composition::Atomic(augment_automaton(a)),
        Composition::Postfix { child, parent } => {
            Composition::postfix(augment_comp(child), augment_automaton(parent))
        }
        Composition::Parallel { left, sync, right } => Composition::parallel(
            augment_comp(left),
            sync.clone(),
            augment_comp(right),
        ),
    }
}

/// Conjoins to each edge entering a hierarchical location the stepped form
/// of the `x = constant` initialization conjuncts its substructure requires,
/// mirroring what flattening folds into the corresponding cross edges.
pub fn augment_entry_resets(file: &ModelFile) -> ModelFile {
    ModelFile { decls: file.decls.clone(), comp: augment_comp(&file.comp) }
}

/// An initial valuation extracted from the model: every variable defaults to
/// zero, then the `x = constant` conjuncts of the first possibly-initial
/// location of each root spine automaton are applied.
pub fn initial_valuation(file: &ModelFile, decls: &Declarations) -> Valuation {
    let mut sigma = decls.zero_valuation();
    for automaton in file.comp.spine() {
        let live = automaton
            .locations
            .iter()
            .find(|v| automaton.init_of(v) != &Predicate::FALSE);
        let Some(loc) = live else { continue };
        for conjunct in automaton.init_of(loc).conjuncts() {
            let (var, value) = match conjunct {
                Predicate::Cmp(CmpOp::Eq, Expr::Var(v), e) if !v.stepped => (v, e),
                Predicate::Cmp(CmpOp::Eq, e, Expr::Var(v)) if !v.stepped => (v, e),
                _ => continue,
            };
            if let Some(value) = const_value(value) {
                sigma.set(var.base(), Value::Real(value));
            }
        }
    }
    // Dotted versions of discrete variables are identically zero.
    for d in decls.iter() {
        if d.kind == VarKind::Discrete {
            sigma.set(Var::dotted(&d.name), Value::Real(0.0));
        }
    }
    sigma
}

/// Parses one valuation line of `name=value` pairs separated by whitespace
/// or commas, e.g. `T=25, n=0, c'=1`. Unmentioned variables default to zero.
pub fn parse_valuation_line(line: &str, decls: &Declarations) -> Result<Valuation, String> {
    let mut sigma = decls.zero_valuation();
    for pair in line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("expected name=value, found `{}`", pair))?;
        let (name, dotted) = match name.strip_suffix('\'') {
            Some(base) => (base, true),
            None => (name, false),
        };
        if decls.kind_of(name).is_none() {
            return Err(format!("undeclared variable `{}`", name));
        }
        let value: f64 = value.parse().map_err(|_| format!("invalid number `{}`", value))?;
        sigma.set(Var { name: name.to_string(), dotted }, Value::Real(value));
    }
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::printer::predicate_to_string;

    #[test]
    fn augmentation_adds_the_clock_reset() {
        let file = parse(models::THERMOSTAT_HIER).unwrap();
        let augmented = augment_entry_resets(&file);
        let a = match &augmented.comp {
            Composition::Atomic(a) => a,
            _ => unreachable!(),
        };
        let switch_on = a.edges.iter().find(|e| e.action == "switch_on").unwrap();
        assert_eq!(predicate_to_string(&switch_on.reset), "n+ = n + 1 and c+ = 0");
        // The other edge is untouched.
        let switch_off = a.edges.iter().find(|e| e.action == "switch_off").unwrap();
        assert_eq!(switch_off.reset, Predicate::TRUE);
    }

    #[test]
    fn augmentation_skips_multi_initial_substructures() {
        let file = parse(models::EAGER_CHOICE).unwrap();
        let augmented = augment_entry_resets(&file);
        assert_eq!(file, augmented);
    }

    #[test]
    fn initial_valuation_reads_init_constants() {
        let loaded = load(models::THERMOSTAT_HIER).unwrap();
        let sigma = initial_valuation(&loaded.file, &loaded.decls);
        assert_eq!(sigma.get(&Var::plain("T")), Some(&Value::Real(25.0)));
        assert_eq!(sigma.get(&Var::plain("n")), Some(&Value::Real(0.0)));
        assert_eq!(sigma.get(&Var::plain("Delta")), Some(&Value::Real(0.5)));
        assert_eq!(sigma.get(&Var::dotted("T")), Some(&Value::Real(0.0)));
    }

    #[test]
    fn invalid_models_are_rejected_with_diagnostics() {
        let err = load("automaton A { location L { init q = 1 } }").unwrap_err();
        match err {
            LoadError::Invalid(diags) => {
                assert!(diags.iter().any(|d| d.message.contains("undeclared variable `q`")));
            }
            other => panic!("unexpected error: {}", other),
        }
    }

    #[test]
    fn valuation_lines_parse() {
        let loaded = load(models::THERMOSTAT_HIER).unwrap();
        let sigma = parse_valuation_line("T=25, n=0 c=0 Delta=0.5", &loaded.decls).unwrap();
        assert_eq!(sigma.get(&Var::plain("Delta")), Some(&Value::Real(0.5)));
        assert!(parse_valuation_line("q=1", &loaded.decls).is_err());
        assert!(parse_valuation_line("T", &loaded.decls).is_err());
    }
}
