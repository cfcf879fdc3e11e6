//! Triangle ASCII `.node` / `.ele` files.
//!
//! Region tags travel in the first attribute column of the `.ele` file using
//! the [`Region::attribute`] mapping. Indexing may be zero- or one-based; the
//! base is taken from the first vertex index in the `.node` file.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::geometry::Point2;
use crate::mesh::{Region, TriMesh};
use crate::{Error, Result};

pub fn load_triangle_mesh(node_path: &Path, ele_path: &Path) -> Result<TriMesh> {
    let node = fs::read_to_string(node_path)?;
    let ele = fs::read_to_string(ele_path)?;
    parse_triangle_mesh(
        &node,
        &ele,
        &node_path.display().to_string(),
        &ele_path.display().to_string(),
    )
}

/// Data lines with their 1-based line numbers; `#` starts a comment.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn parse<T: std::str::FromStr>(tok: &str, file: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::format(file, line, format!("cannot parse {what} from {tok:?}")))
}

pub fn parse_triangle_mesh(node_text: &str, ele_text: &str, node_name: &str, ele_name: &str) -> Result<TriMesh> {
    let mut lines = data_lines(node_text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| Error::format(node_name, 1, "missing header"))?;
    if header.len() < 2 {
        return Err(Error::format(node_name, hl, "header needs at least <count> <dim>"));
    }
    let count: usize = parse(header[0], node_name, hl, "vertex count")?;
    let dim: usize = parse(header[1], node_name, hl, "dimension")?;
    if dim != 2 {
        return Err(Error::format(node_name, hl, format!("dimension {dim}, expected 2")));
    }
    let n_attr: usize = match header.get(2) {
        Some(t) => parse(t, node_name, hl, "attribute count")?,
        None => 0,
    };
    let n_marker: usize = match header.get(3) {
        Some(t) => parse(t, node_name, hl, "marker count")?,
        None => 0,
    };

    let mut base = None;
    let mut vertices = Vec::with_capacity(count);
    for (ln, toks) in lines.by_ref().take(count) {
        if toks.len() < 3 + n_attr + n_marker {
            return Err(Error::format(node_name, ln, "too few columns"));
        }
        let idx: usize = parse(toks[0], node_name, ln, "vertex index")?;
        let b = *base.get_or_insert(idx);
        if b > 1 {
            return Err(Error::format(node_name, ln, format!("first index {b} is neither 0 nor 1")));
        }
        if idx != b + vertices.len() {
            return Err(Error::format(node_name, ln, format!("vertex index {idx} out of sequence")));
        }
        let x: f64 = parse(toks[1], node_name, ln, "x")?;
        let y: f64 = parse(toks[2], node_name, ln, "y")?;
        vertices.push(Point2::new(x, y));
    }
    if vertices.len() != count {
        return Err(Error::format(
            node_name,
            node_text.lines().count(),
            format!("header announces {count} vertices, found {}", vertices.len()),
        ));
    }
    let base = base.unwrap_or(0);

    let mut lines = data_lines(ele_text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| Error::format(ele_name, 1, "missing header"))?;
    if header.len() < 2 {
        return Err(Error::format(ele_name, hl, "header needs <count> <nodes per triangle>"));
    }
    let n_tri: usize = parse(header[0], ele_name, hl, "triangle count")?;
    let per: usize = parse(header[1], ele_name, hl, "nodes per triangle")?;
    if per != 3 {
        return Err(Error::format(ele_name, hl, format!("{per} nodes per triangle, expected 3")));
    }
    let n_attr: usize = match header.get(2) {
        Some(t) => parse(t, ele_name, hl, "attribute count")?,
        None => 0,
    };
    if n_attr < 1 {
        return Err(Error::format(ele_name, hl, "region attribute column missing"));
    }

    let mut elements = Vec::with_capacity(n_tri);
    let mut regions = Vec::with_capacity(n_tri);
    for (ln, toks) in lines.by_ref().take(n_tri) {
        if toks.len() < 4 + n_attr {
            return Err(Error::format(ele_name, ln, "too few columns"));
        }
        let mut tri = [0usize; 3];
        for k in 0..3 {
            let v: usize = parse(toks[k + 1], ele_name, ln, "vertex index")?;
            if v < base || v - base >= count {
                return Err(Error::format(
                    ele_name,
                    ln,
                    format!("vertex index {v} outside [{base}, {})", base + count),
                ));
            }
            tri[k] = v - base;
        }
        let attr: f64 = parse(toks[4], ele_name, ln, "region attribute")?;
        let region = (attr.fract() == 0.0)
            .then(|| Region::from_attribute(attr as i64))
            .flatten()
            .ok_or(Error::Tagging {
                element: elements.len(),
                value: attr as i64,
            })?;
        elements.push(tri);
        regions.push(region);
    }
    if elements.len() != n_tri {
        return Err(Error::format(
            ele_name,
            ele_text.lines().count(),
            format!("header announces {n_tri} triangles, found {}", elements.len()),
        ));
    }
    TriMesh::new(vertices, elements, regions)
}

/// Serializes to Triangle format with one-based indices. Coordinates use the
/// shortest representation that parses back to the same `f64`.
pub fn write_triangle_mesh(mesh: &TriMesh, node_path: &Path, ele_path: &Path) -> Result<()> {
    let (node, ele) = format_triangle_mesh(mesh);
    fs::write(node_path, node)?;
    fs::write(ele_path, ele)?;
    Ok(())
}

pub(crate) fn format_triangle_mesh(mesh: &TriMesh) -> (String, String) {
    let mut node = format!("{} 2 0 0\n", mesh.num_vertices());
    for (i, p) in mesh.vertices().iter().enumerate() {
        let _ = writeln!(node, "{} {:?} {:?}", i + 1, p.x, p.y);
    }
    let mut ele = format!("{} 3 1\n", mesh.num_elements());
    for (i, (t, r)) in mesh.elements().iter().zip(mesh.regions()).enumerate() {
        let _ = writeln!(ele, "{} {} {} {} {}", i + 1, t[0] + 1, t[1] + 1, t[2] + 1, r.attribute());
    }
    (node, ele)
}
