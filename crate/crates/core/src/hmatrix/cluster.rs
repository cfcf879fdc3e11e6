use std::ops::Range;

use crate::geometry::Rect;
use crate::mesh::ElementGeometry;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterNode {
    /// Positions in [`ClusterTree::permutation`] owned by this cluster.
    pub range: Range<usize>,
    /// Axis-parallel box enclosing the supports of all member elements.
    pub bbox: Rect,
    pub sons: Vec<usize>,
    pub level: usize,
}

impl ClusterNode {
    pub fn is_leaf(&self) -> bool {
        self.sons.is_empty()
    }

    pub fn len(&self) -> usize {
        self.range.len()
    }

    pub fn is_empty(&self) -> bool {
        self.range.is_empty()
    }
}

/// Box-tree clustering of element indices. Node 0 is the root.
#[derive(Debug, Clone)]
pub struct ClusterTree {
    nodes: Vec<ClusterNode>,
    permutation: Vec<usize>,
    leaf_size: usize,
}

impl ClusterTree {
    /// Recursive geometric bisection: split the cluster box at the midpoint
    /// of its longest side, assigning elements by centroid. If every centroid
    /// lands on one side the split falls back to the median centroid along
    /// the same axis. Clusters with at most `leaf_size` elements are leaves.
    ///
    /// # Panics
    /// If `geometries` is empty or `leaf_size == 0`.
    pub fn build(geometries: &[ElementGeometry], leaf_size: usize) -> Self {
        assert!(!geometries.is_empty(), "cluster tree needs at least one element");
        assert!(leaf_size >= 1, "leaf size must be positive");
        let mut tree = ClusterTree {
            nodes: Vec::new(),
            permutation: (0..geometries.len()).collect(),
            leaf_size,
        };
        tree.split(geometries, 0..geometries.len(), 0);
        tree
    }

    fn split(&mut self, geoms: &[ElementGeometry], range: Range<usize>, level: usize) -> usize {
        let bbox = self.permutation[range.clone()]
            .iter()
            .fold(Rect::empty(), |r, &i| r.union(&geoms[i].bbox));
        let id = self.nodes.len();
        self.nodes.push(ClusterNode {
            range: range.clone(),
            bbox,
            sons: Vec::new(),
            level,
        });
        if range.len() <= self.leaf_size {
            return id;
        }

        let axis = if bbox.width() >= bbox.height() { 0 } else { 1 };
        let mid = 0.5 * (bbox.min.coord(axis) + bbox.max.coord(axis));
        let idx = &mut self.permutation[range.clone()];
        // stable partition keeps the input order inside each son
        let (mut lo, hi): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| geoms[i].centroid.coord(axis) < mid);
        let mut cut = lo.len();
        if lo.is_empty() || hi.is_empty() {
            lo = idx.to_vec();
            lo.sort_by(|&a, &b| {
                geoms[a]
                    .centroid
                    .coord(axis)
                    .total_cmp(&geoms[b].centroid.coord(axis))
                    .then(a.cmp(&b))
            });
            idx.copy_from_slice(&lo);
            cut = idx.len() / 2;
        } else {
            idx[..cut].copy_from_slice(&lo);
            idx[cut..].copy_from_slice(&hi);
        }

        let split_at = range.start + cut;
        let a = self.split(geoms, range.start..split_at, level + 1);
        let b = self.split(geoms, split_at..range.end, level + 1);
        self.nodes[id].sons = vec![a, b];
        id
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn node(&self, id: usize) -> &ClusterNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[ClusterNode] {
        &self.nodes
    }

    /// `permutation()[pos]` is the original element index stored at cluster
    /// position `pos`.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn leaf_size(&self) -> usize {
        self.leaf_size
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &ClusterNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.level).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;

    fn square_cell(x: f64, y: f64, h: f64) -> ElementGeometry {
        ElementGeometry {
            area: h * h,
            centroid: Point2::new(x, y),
            bbox: Rect::new(Point2::new(x - 0.5 * h, y - 0.5 * h), Point2::new(x + 0.5 * h, y + 0.5 * h)),
        }
    }

    #[test]
    fn single_element_is_a_leaf_root() {
        let t = ClusterTree::build(&[square_cell(0.0, 0.0, 1.0)], 256);
        assert_eq!(t.nodes().len(), 1);
        assert!(t.node(0).is_leaf());
    }

    #[test]
    fn two_elements_split_into_singletons() {
        let t = ClusterTree::build(&[square_cell(0.0, 0.0, 1.0), square_cell(3.0, 0.0, 1.0)], 1);
        assert_eq!(t.nodes().len(), 3);
        assert_eq!(t.node(0).sons.len(), 2);
        for &s in &t.node(0).sons {
            assert_eq!(t.node(s).len(), 1);
        }
    }

    #[test]
    fn coincident_centroids_use_median_fallback() {
        let g: Vec<_> = (0..9).map(|_| square_cell(0.0, 0.0, 1.0)).collect();
        let t = ClusterTree::build(&g, 2);
        assert!(t.leaves().all(|l| l.len() <= 2 && !l.is_empty()));
    }

    #[test]
    fn uniform_grid_bisects_to_four_quarters() {
        // 32 x 32 cells on the unit square: x-midpoint split gives two 512
        // halves (16 columns each, never on the cut); each half is taller
        // than wide and splits at the y-midpoint into 256s.
        let h = 1.0 / 32.0;
        let g: Vec<_> = (0..32 * 32)
            .map(|k| square_cell((k % 32) as f64 * h + 0.5 * h, (k / 32) as f64 * h + 0.5 * h, h))
            .collect();
        let t = ClusterTree::build(&g, 256);
        assert_eq!(t.depth(), 2);
        let leaves: Vec<_> = t.leaves().collect();
        assert_eq!(leaves.len(), 4);
        assert!(leaves.iter().all(|l| l.len() == 256));
    }
}
