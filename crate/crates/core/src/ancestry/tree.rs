//! Ancestor trees in the shape of a hand-drawn lineage diagram.
//!
//! Layers are built breadth-first. A parent is drawn under a node unless the
//! same pattern was already reached at the node's own depth or shallower;
//! repeats at the new depth are drawn but only the first copy is expanded.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::parents::enumerate_parents;
use super::search::SearchLimits;
use crate::error::{Error, Result};
use crate::pattern::{word_to_pattern, Direction, Pattern};
use crate::substitution::{Grid, RuleSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeStatus {
    /// Occurs in the supplied level-1 grid.
    Grounded,
    /// No pattern one level up can produce it.
    NoParents,
    /// Already drawn at this depth, or every parent was seen before.
    Repeat,
    Interior,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub pattern: Pattern,
    pub depth: u32,
    pub status: NodeStatus,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn max_depth(&self) -> u32 {
        self.children
            .iter()
            .map(TreeNode::max_depth)
            .max()
            .unwrap_or(self.depth)
    }

    pub fn leaves(&self) -> Vec<&TreeNode> {
        if self.children.is_empty() {
            return vec![self];
        }
        self.children.iter().flat_map(TreeNode::leaves).collect()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(TreeNode::node_count).sum::<usize>()
    }

    /// Indented outline, one node per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out);
        out
    }

    fn write_text(&self, out: &mut String) {
        let status = match self.status {
            NodeStatus::Interior => String::new(),
            s => format!(" [{}]", status_name(s)),
        };
        let _ = writeln!(out, "{}{}{}", "  ".repeat(self.depth as usize), self.pattern, status);
        for child in &self.children {
            child.write_text(out);
        }
    }

    /// Graphviz edge list.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph ancestry {\n  rankdir=BT;\n");
        let mut next_id = 0usize;
        self.write_dot(&mut out, &mut next_id);
        out.push_str("}\n");
        out
    }

    fn write_dot(&self, out: &mut String, next_id: &mut usize) -> usize {
        let id = *next_id;
        *next_id += 1;
        let _ = writeln!(
            out,
            "  n{id} [label=\"{}\" status=\"{}\"];",
            self.pattern.text().replace('/', "\\n"),
            status_name(self.status)
        );
        for child in &self.children {
            let child_id = child.write_dot(out, next_id);
            let _ = writeln!(out, "  n{id} -> n{child_id};");
        }
        id
    }
}

fn status_name(status: NodeStatus) -> &'static str {
    match status {
        NodeStatus::Grounded => "grounded",
        NodeStatus::NoParents => "no-parents",
        NodeStatus::Repeat => "repeat",
        NodeStatus::Interior => "interior",
    }
}

struct FlatNode {
    pattern: Pattern,
    depth: u32,
    status: NodeStatus,
    children: Vec<usize>,
}

/// Builds the exploration tree for `word`. With `l1`, grounded patterns are
/// leaves.
pub fn ancestor_tree(
    word: &[u8],
    direction: Direction,
    rules: &RuleSet,
    l1: Option<&Grid>,
    limits: SearchLimits,
) -> Result<TreeNode> {
    for &c in word {
        rules.alphabet().check(c)?;
    }
    let root = word_to_pattern(word, direction)?;
    let mut nodes = vec![FlatNode {
        pattern: root.clone(),
        depth: 0,
        status: NodeStatus::Interior,
        children: Vec::new(),
    }];
    let mut seen: HashMap<Pattern, u32> = HashMap::from([(root, 0)]);
    let mut layer = vec![0usize];
    let mut depth = 0u32;
    while !layer.is_empty() {
        if limits.depth_cap.is_some_and(|cap| depth >= cap) {
            return Err(Error::Unresolved {
                depth,
                stats: Default::default(),
            });
        }
        let mut expanded_here: HashMap<Pattern, ()> = HashMap::new();
        let mut next = Vec::new();
        for id in layer {
            let pattern = nodes[id].pattern.clone();
            if l1.is_some_and(|g| pattern.first_occurrence(g).is_some()) {
                nodes[id].status = NodeStatus::Grounded;
                continue;
            }
            if expanded_here.insert(pattern.clone(), ()).is_some() {
                nodes[id].status = NodeStatus::Repeat;
                continue;
            }
            let parents = enumerate_parents(&pattern, rules, limits.product_cap)?;
            if parents.is_empty() {
                nodes[id].status = NodeStatus::NoParents;
                continue;
            }
            let mut children = Vec::new();
            for parent in parents {
                if seen.get(&parent.pattern).is_some_and(|&d| d <= depth) {
                    continue;
                }
                seen.insert(parent.pattern.clone(), depth + 1);
                let child = nodes.len();
                nodes.push(FlatNode {
                    pattern: parent.pattern,
                    depth: depth + 1,
                    status: NodeStatus::Interior,
                    children: Vec::new(),
                });
                children.push(child);
                next.push(child);
            }
            if children.is_empty() {
                nodes[id].status = NodeStatus::Repeat;
            }
            nodes[id].children = children;
        }
        layer = next;
        depth += 1;
    }
    Ok(assemble(&mut nodes, 0))
}

fn assemble(nodes: &mut [FlatNode], id: usize) -> TreeNode {
    let children = std::mem::take(&mut nodes[id].children);
    let children = children.into_iter().map(|c| assemble(nodes, c)).collect();
    let node = &nodes[id];
    TreeNode {
        pattern: node.pattern.clone(),
        depth: node.depth,
        status: node.status,
        children,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> RuleSet {
        RuleSet::from_rules(&[('A', "AB"), ('B', "AC"), ('C', "BB")]).unwrap()
    }

    #[test]
    fn cacaba_lineage() {
        let tree = ancestor_tree(b"CACABA", Direction::E, &example1(), None, SearchLimits::default()).unwrap();
        let mut leaves: Vec<String> = tree.leaves().iter().map(|n| n.pattern.text()).collect();
        leaves.sort();
        // the hand-drawn lineage leaves out the BA <- CB <- BC branch
        assert_eq!(leaves, ["A", "AA", "B", "B", "BBAA", "BC", "CC"]);
        assert_eq!(tree.max_depth(), 5);
        let first: Vec<String> = tree.children.iter().map(|n| n.pattern.text()).collect();
        assert_eq!(first, ["BBAA", "BBAB"]);
        assert_eq!(tree.children[0].status, NodeStatus::NoParents);
        assert_eq!(tree.node_count(), 16);
    }

    #[test]
    fn unproducible_letter_is_a_lone_root() {
        let rules = RuleSet::from_rules(&[('A', "AB"), ('B', "BA"), ('C', "AB")]).unwrap();
        let tree = ancestor_tree(b"C", Direction::E, &rules, None, SearchLimits::default()).unwrap();
        assert!(tree.children.is_empty());
        assert_eq!(tree.status, NodeStatus::NoParents);
    }

    #[test]
    fn grounded_nodes_stop_the_branch() {
        let l1 = Grid::parse("BA", 1).unwrap();
        let tree = ancestor_tree(b"CACABA", Direction::E, &example1(), Some(&l1), SearchLimits::default()).unwrap();
        assert!(tree.leaves().iter().any(|n| n.status == NodeStatus::Grounded && n.pattern.text() == "BA"));
        let dot = tree.to_dot();
        assert!(dot.starts_with("digraph"));
        assert!(tree.to_text().contains("CACABA"));
    }
}
