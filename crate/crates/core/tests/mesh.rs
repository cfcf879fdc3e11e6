use hkle::mesh::{grid_mesh, parse_triangle_mesh, write_triangle_mesh, ReferenceGeometry};
use hkle::{Error, Point2, Region, TriMesh};
use proptest::prelude::*;

fn sorted_breaks(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    v
}

#[test]
fn reference_core_area_matches_analytic_value() {
    for h in [0.004, 0.0025] {
        let g = ReferenceGeometry::default().with_element_size(h);
        let mesh = g.generate().unwrap();
        let core = mesh.core();
        let rel = (core.area() - g.core_area()).abs() / g.core_area();
        assert!(rel <= 1e-12, "h = {h}: relative area mismatch {rel}");
    }
}

#[test]
fn reference_mesh_is_conforming_and_has_all_regions() {
    let mesh = ReferenceGeometry::default().generate().unwrap();
    assert_eq!(mesh.edge_census().nonconforming, 0);
    for r in Region::ALL {
        assert!(!mesh.elements_in(r).is_empty(), "{} missing", r.name());
    }
    assert_eq!(mesh.region_components(Region::Core), 4);
}

#[test]
fn boundary_vertices_lie_on_outer_rectangle() {
    let g = ReferenceGeometry::default();
    let mesh = g.generate().unwrap();
    let dom = g.domain();
    let on_edge = |p: &Point2| {
        (p.x - dom.min.x).abs() < 1e-12 || (p.x - dom.max.x).abs() < 1e-12 || (p.y - dom.min.y).abs() < 1e-12 || (p.y - dom.max.y).abs() < 1e-12
    };
    let boundary = mesh.boundary_vertices();
    for (v, p) in mesh.vertices().iter().enumerate() {
        assert_eq!(boundary.binary_search(&v).is_ok(), on_edge(p), "vertex {v} at {p:?}");
    }
}

#[test]
fn halving_element_size_roughly_quadruples_elements() {
    let g = ReferenceGeometry::default();
    let coarse = g.with_element_size(0.004).generate().unwrap().num_elements() as f64;
    let fine = g.with_element_size(0.002).generate().unwrap().num_elements() as f64;
    let factor = fine / coarse;
    assert!((3.0..=5.0).contains(&factor), "growth factor {factor}");
}

#[test]
fn window_wider_than_core_is_a_geometry_error() {
    let g = ReferenceGeometry {
        window_width: 0.07,
        ..ReferenceGeometry::default()
    };
    assert!(matches!(g.generate(), Err(Error::Geometry(_))));
}

#[test]
fn single_triangle_file() {
    let mesh = parse_triangle_mesh("3 2 0 0\n1 0 0\n2 1 0\n3 0 1\n", "1 3 1\n1 1 3 2 1\n", "t.node", "t.ele").unwrap();
    assert_eq!(mesh.num_elements(), 1);
    assert_eq!(mesh.boundary_vertices(), &[0, 1, 2]);
    assert_eq!(mesh.element_geometry(0).area, 0.5);
    assert_eq!(mesh.region(0), Region::Core);
}

#[test]
fn element_geometry_examples() {
    let mesh = TriMesh::new(
        vec![Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(0.0, 2.0)],
        vec![[0, 1, 2]],
        vec![Region::Air],
    )
    .unwrap();
    let g = mesh.element_geometry(0);
    assert_eq!(g.area, 2.0);
    assert_eq!((g.bbox.min, g.bbox.max), (Point2::new(0.0, 0.0), Point2::new(2.0, 2.0)));
    assert!((g.centroid.x - 2.0 / 3.0).abs() < 1e-15 && (g.centroid.y - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn file_round_trip_of_reference_mesh() {
    let mesh = ReferenceGeometry::default().generate().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (node, ele) = (dir.path().join("m.node"), dir.path().join("m.ele"));
    write_triangle_mesh(&mesh, &node, &ele).unwrap();
    let back = hkle::mesh::load_triangle_mesh(&node, &ele).unwrap();
    assert_eq!(back.vertices(), mesh.vertices());
    assert_eq!(back.elements(), mesh.elements());
    assert_eq!(back.regions(), mesh.regions());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn round_trip_is_exact(
        xs in prop::collection::vec(-10.0f64..10.0, 2..7),
        ys in prop::collection::vec(-10.0f64..10.0, 2..7),
        tags in prop::collection::vec(1i64..=5, 1..8),
    ) {
        let (xs, ys) = (sorted_breaks(xs), sorted_breaks(ys));
        prop_assume!(xs.len() >= 2 && ys.len() >= 2);
        let mesh = grid_mesh(&xs, &ys, |p| {
            let k = ((p.x * 7.0 + p.y * 13.0).abs() as usize) % tags.len();
            Region::from_attribute(tags[k]).unwrap()
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (node, ele) = (dir.path().join("a.node"), dir.path().join("a.ele"));
        write_triangle_mesh(&mesh, &node, &ele).unwrap();
        let back = hkle::mesh::load_triangle_mesh(&node, &ele).unwrap();
        prop_assert_eq!(back.vertices(), mesh.vertices());
        prop_assert_eq!(back.elements(), mesh.elements());
        prop_assert_eq!(back.regions(), mesh.regions());
    }

    #[test]
    fn grid_meshes_are_conforming_with_valid_geometry(
        xs in prop::collection::vec(0.0f64..5.0, 2..9),
        ys in prop::collection::vec(0.0f64..5.0, 2..9),
    ) {
        let (xs, ys) = (sorted_breaks(xs), sorted_breaks(ys));
        prop_assume!(xs.len() >= 2 && ys.len() >= 2);
        let mesh = grid_mesh(&xs, &ys, |_| Region::Core).unwrap();
        let census = mesh.edge_census();
        prop_assert_eq!(census.nonconforming, 0);
        let (nx, ny) = (xs.len() - 1, ys.len() - 1);
        prop_assert_eq!(census.boundary, 2 * (nx + ny));
        let area: f64 = (0..mesh.num_elements()).map(|e| mesh.element_geometry(e).area).sum();
        let exact = (xs[nx] - xs[0]) * (ys[ny] - ys[0]);
        prop_assert!((area - exact).abs() <= 1e-12 * exact);
        for e in 0..mesh.num_elements() {
            let g = mesh.element_geometry(e);
            prop_assert!(g.area > 0.0);
            prop_assert!(g.bbox.contains(&g.centroid));
            for c in mesh.corners(e) {
                prop_assert!(g.bbox.contains(&c));
            }
        }
    }

    #[test]
    fn centroid_translates_with_the_triangle(dx in -5.0f64..5.0, dy in -5.0f64..5.0) {
        let tri = [Point2::new(0.1, 0.2), Point2::new(1.3, 0.4), Point2::new(0.5, 1.7)];
        let g0 = hkle::ElementGeometry::of_triangle(tri);
        let shift = Point2::new(dx, dy);
        let g1 = hkle::ElementGeometry::of_triangle(tri.map(|p| p + shift));
        prop_assert!((g1.centroid.x - g0.centroid.x - dx).abs() < 1e-12);
        prop_assert!((g1.centroid.y - g0.centroid.y - dy).abs() < 1e-12);
        prop_assert!((g1.area - g0.area).abs() < 1e-12);
    }
}
