//! Graphviz export with one cluster per hierarchy level.

use std::fmt::Write;

use crate::model::{AtomicAutomaton, Composition};
use crate::predicate::Predicate;
use crate::printer::predicate_to_string;
use crate::syntax::ModelFile;

struct DotWriter {
    out: String,
    next_id: usize,
}

impl DotWriter {
    fn fresh(&mut self, prefix: &str) -> String {
        let id = self.next_id;
        self.next_id += 1;
        format!("{}{}", prefix, id)
    }

    fn automaton(&mut self, a: &AtomicAutomaton, depth: usize) {
        let pad = "  ".repeat(depth + 1);
        let cluster = self.fresh("cluster_");
        let _ = writeln!(self.out, "{}subgraph {} {{", pad, cluster);
        let _ = writeln!(self.out, "{}  label=\"{}\";", pad, a.name);
        let _ = writeln!(self.out, "{}  style=rounded;", pad);

        let mut node_ids = std::collections::BTreeMap::new();
        for v in &a.locations {
            let node = self.fresh("n");
            let tcp = a.tcp_of(v);
            let label = if tcp == &Predicate::TRUE {
                v.to_string()
            } else {
                format!("{}\\n{}", v, escape(&predicate_to_string(tcp)))
            };
            let _ = writeln!(self.out, "{}  {} [shape=circle, label=\"{}\"];", pad, node, label);
            node_ids.insert(v.clone(), node);
        }

        for v in &a.locations {
            let node = node_ids.get(v).expect("node exists").clone();
            let init = a.effective_init(v);
            if init != Predicate::FALSE {
                let point = self.fresh("i");
                let _ = writeln!(self.out, "{}  {} [shape=point, label=\"\"];", pad, point);
                let _ = writeln!(
                    self.out,
                    "{}  {} -> {} [label=\"{}\"];",
                    pad,
                    point,
                    node,
                    escape(&predicate_to_string(&init))
                );
            }
            let term = a.term_of(v);
            if term != &Predicate::FALSE {
                let point = self.fresh("t");
                let _ = writeln!(self.out, "{}  {} [shape=point, label=\"\"];", pad, point);
                let _ = writeln!(
                    self.out,
                    "{}  {} -> {} [label=\"{}\", style=dashed];",
                    pad,
                    node,
                    point,
                    escape(&predicate_to_string(term))
                );
            }
        }

        for e in &a.edges {
            let label = format!(
                "{} : {} : {}",
                predicate_to_string(&e.guard),
                e.action,
                predicate_to_string(&e.reset)
            );
            let _ = writeln!(
                self.out,
                "{}  {} -> {} [label=\"{}\"];",
                pad,
                node_ids[&e.source],
                node_ids[&e.target],
                escape(&label)
            );
        }

        // Substructures become nested clusters linked from their location.
        for (v, sub) in &a.hierarchy {
            let anchor = self.comp(sub, depth + 1);
            let _ = writeln!(
                self.out,
                "{}  {} -> {} [style=dotted, arrowhead=none, label=\"sub\"];",
                pad, node_ids[v], anchor
            );
        }
        let _ = writeln!(self.out, "{}}}", pad);
    }

    /// Writes a composition and returns a node id usable as a link anchor.
    fn comp(&mut self, c: &Composition, depth: usize) -> String {
        match c {
            Composition::Atomic(a) => {
                let before = self.next_id;
                self.automaton(a, depth);
                // The first location node created above.
                format!("n{}", before + 1)
            }
            Composition::Postfix { child, parent } => {
                let anchor = self.comp(child, depth);
                self.automaton(parent, depth);
                anchor
            }
            Composition::Parallel { left, right, .. } => {
                let anchor = self.comp(left, depth);
                self.comp(right, depth);
                anchor
            }
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Renders the model as a Graphviz digraph, one cluster per hierarchy level.
pub fn export_dot(file: &ModelFile) -> String {
    let mut w = DotWriter { out: String::new(), next_id: 0 };
    let _ = writeln!(w.out, "digraph model {{");
    let _ = writeln!(w.out, "  rankdir=LR;");
    let _ = writeln!(w.out, "  compound=true;");
    w.comp(&file.comp, 0);
    let _ = writeln!(w.out, "}}");
    w.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::syntax::parse;

    #[test]
    fn hierarchical_model_nests_clusters() {
        let file = parse(models::THERMOSTAT_HIER).unwrap();
        let dot = export_dot(&file);
        assert!(dot.starts_with("digraph model {"));
        // One cluster for the thermostat, one for the clock substructure.
        assert_eq!(dot.matches("subgraph cluster_").count(), 2);
        assert!(dot.contains("label=\"Thermostat\""));
        assert!(dot.contains("label=\"Clock\""));
        assert!(dot.contains("switch_on"));
    }

    #[test]
    fn parallel_models_produce_one_cluster_per_automaton() {
        let file = parse(models::HANDOVER).unwrap();
        let dot = export_dot(&file);
        assert_eq!(dot.matches("subgraph cluster_").count(), 2);
    }
}
