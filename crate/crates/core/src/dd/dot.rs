use std::fmt::Write;

use super::manager::DdManager;
use super::Add;

impl DdManager {
    /// Graphviz rendering of `a`. Dashed edges are low (0) edges.
    /// `label` names variables; terminals print their value.
    pub fn to_dot(&self, a: Add, label: impl Fn(u32) -> String) -> String {
        let mut ids = self.reachable(a.0);
        ids.sort_unstable_by(|x, y| y.cmp(x));
        let mut out = String::from("digraph dd {\n");
        for &id in &ids {
            let n = self.node(id);
            if n.is_terminal() {
                let _ = writeln!(out, "  n{id} [shape=box,label=\"{}\"];", n.value());
            } else {
                let _ = writeln!(out, "  n{id} [label=\"{}\"];", label(n.var));
                let _ = writeln!(out, "  n{id} -> n{} [style=dashed];", n.lo);
                let _ = writeln!(out, "  n{id} -> n{};", n.hi);
            }
        }
        out.push_str("}\n");
        out
    }
}
