//! Gmsh MSH 4.1 (ASCII) and native text mesh files.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::assemble::FESpace;
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::linalg::{det, Point};
use crate::refelem::Lattice;

use super::affine::AffineMesh;
use super::curved::CurvedMesh;

/// Boundary-vertex tolerance for ingested files.
pub const FILE_BOUNDARY_TOL: f64 = 1e-8;

const NATIVE_MAGIC: &str = "curvelast-mesh 1";

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// `(dimension, node count)` of the Gmsh element types we know about.
fn gmsh_type_info(t: u32) -> Option<(usize, usize)> {
    Some(match t {
        15 => (0, 1),
        1 => (1, 2),
        8 => (1, 3),
        26 => (1, 4),
        2 => (2, 3),
        9 => (2, 6),
        21 => (2, 10),
        4 => (3, 4),
        11 => (3, 10),
        29 => (3, 20),
        _ => return None,
    })
}

fn gmsh_type(dim: usize, order: usize) -> Option<u32> {
    match (dim, order) {
        (2, 1) => Some(2),
        (2, 2) => Some(9),
        (2, 3) => Some(21),
        (3, 1) => Some(4),
        (3, 2) => Some(11),
        (3, 3) => Some(29),
        _ => None,
    }
}

/// Lattice multi-indices of the Gmsh high-order node ordering: vertices,
/// edge nodes running from the first to the second listed vertex, face
/// nodes, interior node.
fn gmsh_alphas(dim: usize, order: usize) -> Vec<Vec<usize>> {
    let n = dim + 1;
    let unit = |i: usize, k: usize| {
        let mut a = vec![0; n];
        a[i] = k;
        a
    };
    let mut out: Vec<Vec<usize>> = (0..n).map(|i| unit(i, order)).collect();
    let edges: &[(usize, usize)] =
        if dim == 2 { &[(0, 1), (1, 2), (2, 0)] } else { &[(0, 1), (1, 2), (2, 0), (3, 0), (3, 2), (3, 1)] };
    for &(a, b) in edges {
        for j in 1..order {
            let mut alpha = unit(a, order - j);
            alpha[b] += j;
            out.push(alpha);
        }
    }
    if order == 3 {
        if dim == 2 {
            out.push(vec![1, 1, 1]);
        } else {
            for face in [[0, 2, 1], [0, 1, 3], [0, 3, 2], [3, 1, 2]] {
                let mut alpha = vec![0; n];
                for v in face {
                    alpha[v] = 1;
                }
                out.push(alpha);
            }
        }
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines { inner: text.lines().enumerate(), line: 0 }
    }

    /// Next non-empty line.
    fn next(&mut self) -> Option<&'a str> {
        for (i, l) in self.inner.by_ref() {
            self.line = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Some(t);
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<&'a str> {
        let line = self.line;
        self.next().ok_or_else(|| Error::parse(line + 1, format!("unexpected end of file, expected {what}")))
    }

    fn numbers<T: std::str::FromStr>(&mut self, what: &str, count: usize) -> Result<Vec<T>> {
        let l = self.expect(what)?;
        let v: Vec<T> = l
            .split_whitespace()
            .map(|t| t.parse::<T>().map_err(|_| Error::parse(self.line, format!("bad number `{t}` in {what}"))))
            .collect::<Result<_>>()?;
        if v.len() < count {
            return Err(Error::parse(self.line, format!("{what}: expected {count} values, found {}", v.len())));
        }
        Ok(v)
    }

    fn end_section(&mut self, name: &str) -> Result<()> {
        let l = self.expect(&format!("$End{name}"))?;
        if l != format!("$End{name}") {
            return Err(Error::parse(self.line, format!("expected $End{name}, found `{l}`")));
        }
        Ok(())
    }
}

pub fn read_gmsh<const D: usize>(path: &Path, domain: &Domain<D>) -> Result<CurvedMesh<D>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gmsh(&text, domain)
}

/// Parses an MSH 4.1 ASCII file. Only elements of dimension `D` become
/// cells; lower-dimensional elements are ignored. Boundary vertices are those
/// with `|d| <= 1e-8`.
pub fn parse_gmsh<const D: usize>(text: &str, domain: &Domain<D>) -> Result<CurvedMesh<D>> {
    let mut lines = Lines::new(text);
    let mut nodes: HashMap<u64, Point<D>> = HashMap::new();
    let mut elements: Vec<(u32, Vec<u64>)> = Vec::new();
    let mut seen_format = false;
    while let Some(l) = lines.next() {
        match l {
            "$MeshFormat" => {
                let f = lines.expect("format line")?;
                let parts: Vec<&str> = f.split_whitespace().collect();
                if parts.len() < 3 || !parts[0].starts_with("4.1") {
                    return Err(Error::parse(lines.line, format!("unsupported format `{f}`, expected 4.1")));
                }
                if parts[1] != "0" {
                    return Err(Error::parse(lines.line, "binary MSH files are not supported"));
                }
                lines.end_section("MeshFormat")?;
                seen_format = true;
            }
            "$Nodes" => {
                let header: Vec<u64> = lines.numbers("$Nodes header", 4)?;
                if header[1] == 0 {
                    return Err(Error::parse(lines.line, "empty $Nodes section"));
                }
                for _ in 0..header[0] {
                    let block: Vec<u64> = lines.numbers("node block header", 4)?;
                    let count = block[3] as usize;
                    let mut tags = Vec::with_capacity(count);
                    for _ in 0..count {
                        tags.push(lines.numbers::<u64>("node tag", 1)?[0]);
                    }
                    for tag in tags {
                        let xyz: Vec<f64> = lines.numbers("node coordinates", 3)?;
                        nodes.insert(tag, Point::<D>::from_fn(|i, _| xyz[i]));
                    }
                }
                if nodes.len() as u64 != header[1] {
                    return Err(Error::parse(lines.line, format!("expected {} nodes, read {}", header[1], nodes.len())));
                }
                lines.end_section("Nodes")?;
            }
            "$Elements" => {
                let header: Vec<u64> = lines.numbers("$Elements header", 4)?;
                for _ in 0..header[0] {
                    let block: Vec<u64> = lines.numbers("element block header", 4)?;
                    let t = block[2] as u32;
                    let (dim, n_nodes) = gmsh_type_info(t).ok_or(Error::UnsupportedElementType(t))?;
                    if dim > D {
                        return Err(Error::UnsupportedElementType(t));
                    }
                    for _ in 0..block[3] {
                        let v: Vec<u64> = lines.numbers("element", n_nodes + 1)?;
                        if v.len() != n_nodes + 1 {
                            return Err(Error::parse(lines.line, format!("element type {t} needs {n_nodes} nodes")));
                        }
                        if dim == D {
                            elements.push((t, v[1..].to_vec()));
                        }
                    }
                }
                lines.end_section("Elements")?;
            }
            s if s.starts_with('$') => {
                let end = format!("$End{}", &s[1..]);
                loop {
                    if lines.expect(&end)? == end {
                        break;
                    }
                }
            }
            other => return Err(Error::parse(lines.line, format!("unexpected line `{other}` outside a section"))),
        }
    }
    if !seen_format {
        return Err(Error::parse(lines.line, "missing $MeshFormat section"));
    }
    if nodes.is_empty() {
        return Err(Error::parse(lines.line, "missing $Nodes section"));
    }
    let Some(&(t0, _)) = elements.first() else {
        return Err(Error::parse(lines.line, format!("no {D}-dimensional elements")));
    };
    let order = (1..=3).find(|&r| gmsh_type(D, r) == Some(t0)).ok_or(Error::UnsupportedElementType(t0))?;
    if let Some(&(t, _)) = elements.iter().find(|(t, _)| *t != t0) {
        return Err(Error::UnsupportedElementType(t));
    }
    let lattice = Lattice::new(D, order)?;
    let alphas = gmsh_alphas(D, order);
    let lookup = |tag: u64| nodes.get(&tag).copied().ok_or_else(|| Error::parse(0, format!("element references missing node {tag}")));

    let mut vertex_of: HashMap<u64, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut cells = Vec::with_capacity(elements.len());
    let mut control = vec![Point::<D>::zeros(); elements.len() * lattice.len()];
    for (c, (_, tags)) in elements.iter().enumerate() {
        let mut corners = [0usize; 4];
        for (i, &tag) in tags[..=D].iter().enumerate() {
            let next = vertices.len();
            corners[i] = *vertex_of.entry(tag).or_insert(next);
            if corners[i] == next {
                vertices.push(lookup(tag)?);
            }
        }
        // Swap two vertices of negatively oriented cells.
        let mut perm = [0, 1, 2, 3];
        let p = |i: usize| vertices[corners[i]];
        let jac = crate::linalg::Mat::<D>::from_fn(|r, k| p(k + 1)[r] - p(0)[r]);
        if det(&jac) < 0.0 {
            perm.swap(1, 2);
            corners.swap(1, 2);
        }
        cells.push(corners);
        for (alpha, &tag) in alphas.iter().zip(tags) {
            let permuted: Vec<usize> = (0..=D).map(|j| alpha[perm[j]]).collect();
            let i = lattice.index_of(&permuted).expect("gmsh node table covers the lattice");
            control[c * lattice.len() + i] = lookup(tag)?;
        }
    }
    let base = AffineMesh::new(vertices, cells, domain, FILE_BOUNDARY_TOL)?;
    CurvedMesh::from_parts(order, base, control)
}

pub fn write_gmsh<const D: usize>(mesh: &CurvedMesh<D>, path: &Path) -> Result<()> {
    std::fs::write(path, format_gmsh(mesh)?).map_err(|e| Error::io(path, e))
}

/// MSH 4.1 ASCII text with shared nodes merged; all nodes and cells live in
/// a single entity of tag 1.
pub fn format_gmsh<const D: usize>(mesh: &CurvedMesh<D>) -> Result<String> {
    let space = FESpace::new(mesh, mesh.order)?;
    let n = space.n_scalar;
    let mut coords = vec![Point::<D>::zeros(); n];
    for c in 0..mesh.n_cells() {
        for (i, &node) in space.cell_nodes(c).iter().enumerate() {
            coords[node] = mesh.control_points(c)[i];
        }
    }
    let t = gmsh_type(D, mesh.order).ok_or(Error::UnsupportedDegree {
        dim: D,
        degree: mesh.order,
        reason: "no Gmsh element type",
    })?;
    let m = mesh.n_cells();
    let mut s = String::new();
    s.push_str("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n");
    let _ = writeln!(s, "$Nodes\n1 {n} 1 {n}\n{D} 1 0 {n}");
    for i in 1..=n {
        let _ = writeln!(s, "{i}");
    }
    for p in &coords {
        let z = if D == 3 { p[2] } else { 0.0 };
        let _ = writeln!(s, "{} {} {}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(z));
    }
    s.push_str("$EndNodes\n");
    let _ = writeln!(s, "$Elements\n1 {m} 1 {m}\n{D} 1 {t} {m}");
    let alphas = gmsh_alphas(D, mesh.order);
    let lattice = &mesh.basis.lattice;
    for c in 0..m {
        let _ = write!(s, "{}", c + 1);
        for alpha in &alphas {
            let i = lattice.index_of(alpha).expect("gmsh node table covers the lattice");
            let _ = write!(s, " {}", space.cell_nodes(c)[i] + 1);
        }
        s.push('\n');
    }
    s.push_str("$EndElements\n");
    Ok(s)
}

pub fn write_native<const D: usize>(mesh: &CurvedMesh<D>, path: &Path) -> Result<()> {
    std::fs::write(path, format_native(mesh)).map_err(|e| Error::io(path, e))
}

pub fn read_native<const D: usize>(path: &Path) -> Result<CurvedMesh<D>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_native(&text)
}

/// Native dump: sections `vertices` (coordinates and boundary flag),
/// `cells`, `control_points` and `boundary_facets`, reals at 17 significant
/// digits.
pub fn format_native<const D: usize>(mesh: &CurvedMesh<D>) -> String {
    let base = &mesh.base;
    let mut s = String::new();
    let _ = writeln!(s, "{NATIVE_MAGIC}\ndimension {D}\norder {}", mesh.order);
    let _ = writeln!(s, "vertices {}", base.vertices.len());
    for (v, &flag) in base.vertices.iter().zip(&base.boundary_vertex) {
        let coords: Vec<String> = v.iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(s, "{} {}", coords.join(" "), flag as u8);
    }
    let _ = writeln!(s, "cells {}", base.n_cells());
    for c in 0..base.n_cells() {
        let ids: Vec<String> = base.cell(c).iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", ids.join(" "));
    }
    let _ = writeln!(s, "control_points {}", base.n_cells() * mesh.n_control());
    for c in 0..base.n_cells() {
        for p in mesh.control_points(c) {
            let coords: Vec<String> = p.iter().map(|&x| fmt_f64(x)).collect();
            let _ = writeln!(s, "{}", coords.join(" "));
        }
    }
    let _ = writeln!(s, "boundary_facets {}", base.boundary_facets.len());
    for (c, f) in &base.boundary_facets {
        let _ = writeln!(s, "{c} {f}");
    }
    s.push_str("end\n");
    s
}

pub fn parse_native<const D: usize>(text: &str) -> Result<CurvedMesh<D>> {
    let mut lines = Lines::new(text);
    let magic = lines.expect("header")?;
    if magic != NATIVE_MAGIC {
        return Err(Error::parse(lines.line, format!("expected `{NATIVE_MAGIC}`, found `{magic}`")));
    }
    fn keyed(lines: &mut Lines<'_>, key: &str) -> Result<usize> {
        let l = lines.expect(key)?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(key) {
            return Err(Error::parse(lines.line, format!("expected `{key} <n>`, found `{l}`")));
        }
        parts
            .next()
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| Error::parse(lines.line, format!("bad count in `{l}`")))
    }
    let dim = keyed(&mut lines, "dimension")?;
    if dim != D {
        return Err(Error::DimensionMismatch { expected: D, found: dim });
    }
    let order = keyed(&mut lines, "order")?;
    let nv = keyed(&mut lines, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    let mut flags = Vec::with_capacity(nv);
    for _ in 0..nv {
        let v: Vec<f64> = lines.numbers("vertex", D + 1)?;
        vertices.push(Point::<D>::from_fn(|i, _| v[i]));
        flags.push(v[D] != 0.0);
    }
    let nc = keyed(&mut lines, "cells")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let v: Vec<usize> = lines.numbers("cell", D + 1)?;
        let mut cell = [0; 4];
        cell[..=D].copy_from_slice(&v[..=D]);
        cells.push(cell);
    }
    let np = keyed(&mut lines, "control_points")?;
    let mut control = Vec::with_capacity(np);
    for _ in 0..np {
        let v: Vec<f64> = lines.numbers("control point", D)?;
        control.push(Point::<D>::from_fn(|i, _| v[i]));
    }
    let nf = keyed(&mut lines, "boundary_facets")?;
    let mut facets = Vec::with_capacity(nf);
    for _ in 0..nf {
        let v: Vec<usize> = lines.numbers("boundary facet", 2)?;
        facets.push((v[0], v[1]));
    }
    if lines.expect("end")? != "end" {
        return Err(Error::parse(lines.line, "expected `end`"));
    }
    let base = AffineMesh::from_parts(vertices, cells, flags)?;
    if base.boundary_facets != facets {
        return Err(Error::parse(lines.line, "boundary facets do not match the cell connectivity"));
    }
    CurvedMesh::from_parts(order, base, control)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{curve_mesh, generate_ball_mesh, generate_disk_mesh};

    /// Gmsh files merge shared nodes, whose per-cell copies may differ by
    /// roundoff, so they only round-trip to `tol`.
    fn assert_same<const D: usize>(a: &CurvedMesh<D>, b: &CurvedMesh<D>, tol: f64) {
        assert_eq!(a.order, b.order);
        assert_eq!(a.n_cells(), b.n_cells());
        assert_eq!(a.base.boundary_facets, b.base.boundary_facets);
        for c in 0..a.n_cells() {
            let flags = |m: &CurvedMesh<D>| m.base.cell(c).iter().map(|&v| m.base.boundary_vertex[v]).collect::<Vec<_>>();
            assert_eq!(flags(a), flags(b));
            for (p, q) in a.control_points(c).iter().zip(b.control_points(c)) {
                assert!((p - q).amax() <= tol, "{p:?} vs {q:?}");
            }
        }
    }

    #[test]
    fn native_round_trip_is_exact() {
        let mesh = curve_mesh(&generate_disk_mesh(2).unwrap(), &Domain::unit_disk(), 3).unwrap();
        let back: CurvedMesh<2> = parse_native(&format_native(&mesh)).unwrap();
        assert_same(&mesh, &back, 0.0);
        assert_eq!(mesh.base.vertices, back.base.vertices);
        let mesh = curve_mesh(&generate_ball_mesh(1).unwrap(), &Domain::unit_ball(), 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ball.mesh");
        write_native(&mesh, &path).unwrap();
        assert_same(&mesh, &read_native::<3>(&path).unwrap(), 0.0);
    }

    #[test]
    fn native_rejects_malformed() {
        let mesh = curve_mesh(&generate_disk_mesh(1).unwrap(), &Domain::unit_disk(), 1).unwrap();
        let text = format_native(&mesh);
        assert!(matches!(parse_native::<3>(&text), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(parse_native::<2>(&text.replace("cells", "cels")), Err(Error::Parse { .. })));
        let truncated: String = text.lines().take(20).collect::<Vec<_>>().join("\n");
        assert!(matches!(parse_native::<2>(&truncated), Err(Error::Parse { .. })));
        assert!(matches!(parse_native::<2>("hello"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn gmsh_round_trip() {
        let disk = Domain::unit_disk();
        let mesh = curve_mesh(&generate_disk_mesh(1).unwrap(), &disk, 2).unwrap();
        let back = parse_gmsh(&format_gmsh(&mesh).unwrap(), &disk).unwrap();
        assert_eq!(back.order, 2);
        assert_eq!(back.base.boundary_facets.len(), 10);
        assert_same(&mesh, &back, 1e-15);
        let ball = Domain::unit_ball();
        for r in 1..=3 {
            let mesh = curve_mesh(&generate_ball_mesh(1).unwrap(), &ball, r).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("ball.msh");
            write_gmsh(&mesh, &path).unwrap();
            assert_same(&mesh, &read_gmsh(&path, &ball).unwrap(), 1e-15);
        }
    }

    fn msh(dim: usize, t: u32, coords: &[[f64; 3]]) -> String {
        let n = coords.len();
        let mut s = format!("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n$Nodes\n1 {n} 1 {n}\n{dim} 1 0 {n}\n");
        for i in 1..=n {
            s += &format!("{i}\n");
        }
        for c in coords {
            s += &format!("{} {} {}\n", c[0], c[1], c[2]);
        }
        s += &format!("$EndNodes\n$Elements\n1 1 1 1\n{dim} 1 {t} 1\n1");
        for i in 1..=n {
            s += &format!(" {i}");
        }
        s + "\n$EndElements\n"
    }

    fn lerp(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
    }

    /// Reads a single reference element written in documented Gmsh order
    /// and checks every control point against its lattice position.
    fn check_reference_element<const D: usize>(t: u32, order: usize, domain: &Domain<D>) {
        let v: Vec<[f64; 3]> = (0..=D)
            .map(|i| {
                let mut p = [0.0; 3];
                if i > 0 {
                    p[i - 1] = 1.0;
                }
                p
            })
            .collect();
        let mut coords = v.clone();
        let edges: &[(usize, usize)] =
            if D == 2 { &[(0, 1), (1, 2), (2, 0)] } else { &[(0, 1), (1, 2), (2, 0), (3, 0), (3, 2), (3, 1)] };
        for &(a, b) in edges {
            for j in 1..order {
                coords.push(lerp(v[a], v[b], j as f64 / order as f64));
            }
        }
        if order == 3 {
            let faces: Vec<Vec<usize>> = if D == 2 { vec![vec![0, 1, 2]] } else { vec![vec![0, 2, 1], vec![0, 1, 3], vec![0, 3, 2], vec![3, 1, 2]] };
            for f in faces {
                let mut c = [0.0; 3];
                for &i in &f {
                    for k in 0..3 {
                        c[k] += v[i][k] / 3.0;
                    }
                }
                coords.push(c);
            }
        }
        let mesh = parse_gmsh::<D>(&msh(D, t, &coords), domain).unwrap();
        assert_eq!(mesh.order, order);
        for i in 0..mesh.n_control() {
            assert!((mesh.control_points(0)[i] - mesh.basis.node(i)).norm() < 1e-15, "type {t} node {i}");
        }
    }

    #[test]
    fn gmsh_node_ordering() {
        let far2 = Domain::<2>::level_set(std::sync::Arc::new(Shifted), 0.5);
        let far3 = Domain::<3>::level_set(std::sync::Arc::new(Shifted), 0.5);
        for (t, r) in [(2, 1), (9, 2), (21, 3)] {
            check_reference_element::<2>(t, r, &far2);
        }
        for (t, r) in [(4, 1), (11, 2), (29, 3)] {
            check_reference_element::<3>(t, r, &far3);
        }
    }

    /// Plane `x_0 = 10`, far from every test vertex.
    struct Shifted;

    impl<const D: usize> crate::geometry::LevelSet<D> for Shifted {
        fn value(&self, x: &Point<D>) -> f64 {
            x[0] - 10.0
        }
        fn gradient(&self, _: &Point<D>) -> Point<D> {
            Point::<D>::from_fn(|i, _| if i == 0 { 1.0 } else { 0.0 })
        }
        fn hessian(&self, _: &Point<D>) -> crate::linalg::Mat<D> {
            crate::linalg::Mat::<D>::zeros()
        }
    }

    #[test]
    fn gmsh_reorients_clockwise_triangles() {
        let far = Domain::<2>::level_set(std::sync::Arc::new(Shifted), 0.5);
        let coords = [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.5, 0.0], [0.5, 0.5, 0.0], [0.5, 0.0, 0.0]];
        let mesh = parse_gmsh::<2>(&msh(2, 9, &coords), &far).unwrap();
        assert!(mesh.base.cell_measure(0) > 0.0);
        for i in 0..6 {
            assert!((mesh.control_points(0)[i] - mesh.basis.node(i)).norm() < 1e-15);
        }
    }

    #[test]
    fn gmsh_errors() {
        let disk = Domain::unit_disk();
        let empty = "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n$Nodes\n0 0 0 0\n$EndNodes\n";
        assert!(matches!(parse_gmsh(empty, &disk), Err(Error::Parse { .. })));
        let quad = msh(2, 3, &[[0.0; 3], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]);
        assert!(matches!(parse_gmsh(&quad, &disk), Err(Error::UnsupportedElementType(3))));
        let tet = msh(3, 4, &[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(parse_gmsh(&tet, &disk), Err(Error::UnsupportedElementType(4))));
        assert!(matches!(parse_gmsh("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n", &disk), Err(Error::Parse { .. })));
    }
}
