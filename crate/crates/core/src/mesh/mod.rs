//! Triangulated 2D domains with region tags.

mod reference;
mod structured;
mod triangle;

use std::collections::HashMap;

use crate::geometry::{Point2, Rect};
use crate::{Error, Result};

pub use reference::ReferenceGeometry;
pub use structured::grid_mesh;
pub use triangle::{load_triangle_mesh, parse_triangle_mesh, write_triangle_mesh};

/// Material/source region of an element.
///
/// The integer mapping is the one carried in the attribute column of `.ele`
/// files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Core,
    Air,
    CoilPlusPrimary,
    CoilMinusPrimary,
    CoilSecondary,
}

impl Region {
    pub const ALL: [Region; 5] = [
        Region::Core,
        Region::Air,
        Region::CoilPlusPrimary,
        Region::CoilMinusPrimary,
        Region::CoilSecondary,
    ];

    pub fn attribute(self) -> i64 {
        match self {
            Region::Core => 1,
            Region::Air => 2,
            Region::CoilPlusPrimary => 3,
            Region::CoilMinusPrimary => 4,
            Region::CoilSecondary => 5,
        }
    }

    pub fn from_attribute(value: i64) -> Option<Region> {
        Some(match value {
            1 => Region::Core,
            2 => Region::Air,
            3 => Region::CoilPlusPrimary,
            4 => Region::CoilMinusPrimary,
            5 => Region::CoilSecondary,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::Core => "core",
            Region::Air => "air",
            Region::CoilPlusPrimary => "coil_plus_primary",
            Region::CoilMinusPrimary => "coil_minus_primary",
            Region::CoilSecondary => "coil_secondary",
        }
    }
}

/// Area, centroid and bounding box of one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementGeometry {
    pub area: f64,
    pub centroid: Point2,
    pub bbox: Rect,
}

impl ElementGeometry {
    pub fn of_triangle(p: [Point2; 3]) -> Self {
        let area = 0.5 * signed_area2(p[0], p[1], p[2]);
        let centroid = Point2::new(
            (p[0].x + p[1].x + p[2].x) / 3.0,
            (p[0].y + p[1].y + p[2].y) / 3.0,
        );
        ElementGeometry {
            area,
            centroid,
            bbox: Rect::from_points(&p),
        }
    }
}

/// Twice the signed area of the triangle `(a, b, c)`; positive when
/// counterclockwise.
pub fn signed_area2(a: Point2, b: Point2, c: Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)
}

/// Immutable triangle mesh. Elements are stored counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Point2>,
    elements: Vec<[usize; 3]>,
    regions: Vec<Region>,
    boundary: Vec<usize>,
}

impl TriMesh {
    /// Validates indices, normalizes orientation to counterclockwise and
    /// detects boundary vertices (vertices of edges owned by one element).
    pub fn new(vertices: Vec<Point2>, mut elements: Vec<[usize; 3]>, regions: Vec<Region>) -> Result<Self> {
        if regions.len() != elements.len() {
            return Err(Error::Dimension {
                expected: elements.len(),
                got: regions.len(),
            });
        }
        let nv = vertices.len();
        for (e, tri) in elements.iter_mut().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&v| v >= nv) {
                return Err(Error::Geometry(format!(
                    "element {e} references vertex {bad}, mesh has {nv} vertices"
                )));
            }
            let a2 = signed_area2(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if a2 < 0.0 {
                tri.swap(1, 2);
            } else if a2 == 0.0 || !a2.is_finite() {
                return Err(Error::Geometry(format!("element {e} is degenerate")));
            }
        }

        let mut edge_count: HashMap<(usize, usize), u32> = HashMap::new();
        for tri in &elements {
            for k in 0..3 {
                *edge_count.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut on_boundary = vec![false; nv];
        for (&(a, b), &c) in &edge_count {
            if c == 1 {
                on_boundary[a] = true;
                on_boundary[b] = true;
            }
        }
        let boundary = (0..nv).filter(|&v| on_boundary[v]).collect();

        Ok(TriMesh {
            vertices,
            elements,
            regions,
            boundary,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn elements(&self) -> &[[usize; 3]] {
        &self.elements
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn region(&self, element: usize) -> Region {
        self.regions[element]
    }

    /// Sorted indices of the vertices on the outer boundary.
    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn corners(&self, element: usize) -> [Point2; 3] {
        self.elements[element].map(|v| self.vertices[v])
    }

    /// # Panics
    /// If `element` is out of range.
    pub fn element_geometry(&self, element: usize) -> ElementGeometry {
        ElementGeometry::of_triangle(self.corners(element))
    }

    /// Indices of the elements tagged `region`, in ascending order.
    pub fn elements_in(&self, region: Region) -> Vec<usize> {
        (0..self.elements.len())
            .filter(|&e| self.regions[e] == region)
            .collect()
    }

    pub fn region_area(&self, region: Region) -> f64 {
        self.elements_in(region)
            .into_iter()
            .map(|e| self.element_geometry(e).area)
            .sum()
    }

    /// Core element indices and their geometry; the substrate of the
    /// covariance discretization.
    pub fn core(&self) -> CoreElements {
        let elements = self.elements_in(Region::Core);
        let geometries = elements.iter().map(|&e| self.element_geometry(e)).collect();
        CoreElements { elements, geometries }
    }

    /// Number of edges shared by more than two elements, and number of
    /// boundary edges. A conforming mesh has zero of the former.
    pub fn edge_census(&self) -> EdgeCensus {
        let mut edge_count: HashMap<(usize, usize), u32> = HashMap::new();
        for tri in &self.elements {
            for k in 0..3 {
                *edge_count.entry(edge_key(tri[k], tri[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut census = EdgeCensus::default();
        for &c in edge_count.values() {
            match c {
                1 => census.boundary += 1,
                2 => census.interior += 1,
                _ => census.nonconforming += 1,
            }
        }
        census
    }

    /// Returns the mesh with vertices relabelled: new index of old vertex `v`
    /// is `perm[v]`.
    pub fn renumbered(&self, perm: &[usize]) -> Result<TriMesh> {
        let mut vertices = vec![Point2::default(); self.vertices.len()];
        for (old, &new) in perm.iter().enumerate() {
            vertices[new] = self.vertices[old];
        }
        let elements = self.elements.iter().map(|t| t.map(|v| perm[v])).collect();
        TriMesh::new(vertices, elements, self.regions.clone())
    }

    /// Number of edge-connected components formed by the elements of
    /// `region`.
    pub fn region_components(&self, region: Region) -> usize {
        let members = self.elements_in(region);
        let mut parent: Vec<usize> = (0..members.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (k, &e) in members.iter().enumerate() {
            let tri = self.elements[e];
            for j in 0..3 {
                let key = edge_key(tri[j], tri[(j + 1) % 3]);
                if let Some(&other) = owner.get(&key) {
                    let (a, b) = (find(&mut parent, k), find(&mut parent, other));
                    parent[a] = b;
                } else {
                    owner.insert(key, k);
                }
            }
        }
        (0..members.len()).filter(|&k| find(&mut parent, k) == k).count()
    }

    pub fn bounding_box(&self) -> Rect {
        Rect::from_points(&self.vertices)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeCensus {
    pub interior: usize,
    pub boundary: usize,
    pub nonconforming: usize,
}

/// Core elements of a mesh in ascending element order; position `i` in this
/// list is the covariance matrix index `i`.
#[derive(Debug, Clone)]
pub struct CoreElements {
    pub elements: Vec<usize>,
    pub geometries: Vec<ElementGeometry>,
}

impl CoreElements {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.geometries.iter().map(|g| g.area).sum()
    }
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}
