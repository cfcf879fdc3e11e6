use std::ops::Range;

use super::cluster::ClusterTree;
use crate::geometry::Rect;

/// Rectangle admissibility: `min(diam Q_t, diam Q_s) <= eta * dist(Q_t, Q_s)`.
pub fn admissible(qt: &Rect, qs: &Rect, eta: f64) -> bool {
    qt.diam().min(qs.diam()) <= eta * qt.dist(qs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Admissible,
    Inadmissible,
    Internal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockNode {
    pub row: usize,
    pub col: usize,
    pub kind: BlockKind,
    pub sons: Vec<usize>,
}

/// Quadtree of cluster products `t × s`. Node 0 is the root `I × I`.
#[derive(Debug, Clone)]
pub struct BlockClusterTree {
    nodes: Vec<BlockNode>,
    eta: f64,
}

impl BlockClusterTree {
    /// Recursion from `I × I`: a block becomes an admissible leaf when its
    /// cluster boxes pass [`admissible`], an inadmissible leaf when both
    /// clusters are leaves, and is otherwise replaced by the products of the
    /// sons. A leaf cluster paired with an inner cluster is kept whole while
    /// the other side is refined.
    pub fn build(tree: &ClusterTree, eta: f64) -> Self {
        let mut bct = BlockClusterTree { nodes: Vec::new(), eta };
        bct.refine(tree, tree.root(), tree.root());
        bct
    }

    fn refine(&mut self, tree: &ClusterTree, t: usize, s: usize) -> usize {
        let (ct, cs) = (tree.node(t), tree.node(s));
        let id = self.nodes.len();
        let kind = if admissible(&ct.bbox, &cs.bbox, self.eta) {
            BlockKind::Admissible
        } else if ct.is_leaf() && cs.is_leaf() {
            BlockKind::Inadmissible
        } else {
            BlockKind::Internal
        };
        self.nodes.push(BlockNode {
            row: t,
            col: s,
            kind,
            sons: Vec::new(),
        });
        if kind == BlockKind::Internal {
            let rows = if ct.is_leaf() { vec![t] } else { ct.sons.clone() };
            let cols = if cs.is_leaf() { vec![s] } else { cs.sons.clone() };
            let mut sons = Vec::with_capacity(rows.len() * cols.len());
            for &r in &rows {
                for &c in &cols {
                    sons.push(self.refine(tree, r, c));
                }
            }
            self.nodes[id].sons = sons;
        }
        id
    }

    pub fn nodes(&self) -> &[BlockNode] {
        &self.nodes
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn leaves(&self) -> impl Iterator<Item = &BlockNode> {
        self.nodes.iter().filter(|n| n.kind != BlockKind::Internal)
    }

    /// Row and column position ranges of every leaf.
    pub fn leaf_boxes(&self, tree: &ClusterTree) -> Vec<(Range<usize>, Range<usize>, BlockKind)> {
        self.leaves()
            .map(|b| (tree.node(b.row).range.clone(), tree.node(b.col).range.clone(), b.kind))
            .collect()
    }
}
