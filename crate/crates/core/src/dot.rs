//! Graphviz export of `V_n` with vertices filled by spin.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::spin_config::SpinConfiguration;
use crate::tree_group::volume;

const PALETTE: [&str; 12] = [
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#ffff33", "#a65628", "#f781bf",
    "#999999", "#66c2a5", "#fc8d62", "#8da0cb",
];

/// Fill color for a spin; cycles through a fixed palette.
pub fn spin_color(spin: u32) -> &'static str {
    PALETTE[(spin as usize).saturating_sub(1) % PALETTE.len()]
}

/// Undirected DOT graph of `V_n`. Node ids are the textual words; edges
/// join each non-root vertex to its parent.
pub fn export_dot(config: &SpinConfiguration, n: usize) -> Result<String> {
    let vertices = volume(n, config.tree());
    let mut out = String::new();
    writeln!(out, "graph V{n} {{").unwrap();
    writeln!(out, "  node [style=filled, shape=circle];").unwrap();
    for w in vertices.iter() {
        let spin = config
            .get(w)
            .ok_or_else(|| Error::MissingVertex(w.to_string()))?;
        writeln!(
            out,
            "  \"{w}\" [label=\"{w}\\n{spin}\", fillcolor=\"{}\"];",
            spin_color(spin)
        )
        .unwrap();
    }
    for w in vertices.iter() {
        if let Some(p) = w.parent() {
            writeln!(out, "  \"{p}\" -- \"{w}\";").unwrap();
        }
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree_group::TreeParams;

    #[test]
    fn single_node() {
        let t = TreeParams::new(2).unwrap();
        let c = SpinConfiguration::constant(&volume(0, t), 1).unwrap();
        let dot = export_dot(&c, 0).unwrap();
        assert_eq!(dot.matches("fillcolor").count(), 1);
        assert_eq!(dot.matches(" -- ").count(), 0);
    }

    #[test]
    fn v2_has_ten_nodes_nine_edges() {
        let t = TreeParams::new(2).unwrap();
        let c = SpinConfiguration::constant(&volume(2, t), 3).unwrap();
        let dot = export_dot(&c, 2).unwrap();
        assert_eq!(dot.matches("fillcolor").count(), 10);
        assert_eq!(dot.matches(" -- ").count(), 9);
        assert!(dot.contains("\"1\" -- \"1 2\";"));
    }

    #[test]
    fn missing_vertex_is_reported() {
        let t = TreeParams::new(2).unwrap();
        let c = SpinConfiguration::constant(&volume(1, t), 3).unwrap();
        assert!(matches!(export_dot(&c, 2), Err(Error::MissingVertex(_))));
    }
}
