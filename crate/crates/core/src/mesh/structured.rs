use crate::geometry::Point2;
use crate::mesh::{Region, TriMesh};
use crate::Result;

/// Triangulates the tensor grid `xs × ys` (both strictly increasing), two
/// triangles per cell with diagonals alternating in a checkerboard pattern.
/// Each element is tagged by evaluating `region` at its cell center.
pub fn grid_mesh(xs: &[f64], ys: &[f64], region: impl Fn(Point2) -> Region) -> Result<TriMesh> {
    let nx = xs.len();
    let ny = ys.len();
    let mut vertices = Vec::with_capacity(nx * ny);
    for &y in ys {
        for &x in xs {
            vertices.push(Point2::new(x, y));
        }
    }
    let id = |i: usize, j: usize| j * nx + i;
    let cells = nx.saturating_sub(1) * ny.saturating_sub(1);
    let mut elements = Vec::with_capacity(2 * cells);
    let mut regions = Vec::with_capacity(2 * cells);
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let center = Point2::new(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
            let tag = region(center);
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                elements.push([a, b, c]);
                elements.push([a, c, d]);
            } else {
                elements.push([a, b, d]);
                elements.push([b, c, d]);
            }
            regions.push(tag);
            regions.push(tag);
        }
    }
    TriMesh::new(vertices, elements, regions)
}

/// Splits each interval between consecutive breakpoints into the fewest
/// equal pieces no longer than `h`.
pub(crate) fn subdivide(breaks: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![breaks[0]];
    for w in breaks.windows(2) {
        let n = ((w[1] - w[0]) / h - 1e-9).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(if k == n {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * k as f64 / n as f64
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_grid() {
        let m = grid_mesh(&[0.0, 1.0], &[0.0, 1.0], |_| Region::Core).unwrap();
        assert_eq!(m.num_elements(), 2);
        assert_eq!(m.boundary_vertices().len(), 4);
        assert!((m.region_area(Region::Core) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn subdivision_hits_breakpoints() {
        let s = subdivide(&[0.0, 1.0, 1.1], 0.3);
        assert_eq!(s.len(), 6);
        assert_eq!(s[4], 1.0);
        assert_eq!(*s.last().unwrap(), 1.1);
    }

    #[test]
    fn grid_is_conforming_with_interior_vertices_off_boundary() {
        let xs = subdivide(&[0.0, 1.0], 0.25);
        let m = grid_mesh(&xs, &xs, |_| Region::Air).unwrap();
        let census = m.edge_census();
        assert_eq!(census.nonconforming, 0);
        assert_eq!(census.boundary, 16);
        assert_eq!(m.boundary_vertices().len(), 16);
    }
}
