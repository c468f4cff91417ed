//! Quickhull in three dimensions.
//!
//! Starts from the tetrahedron spanned by the extreme points, then
//! repeatedly lifts the furthest outside point of some face, replacing
//! every face it sees by a fan over the horizon. Plane tests use a fixed
//! thickness of [`HULL_EPSILON`] mm; points within it count as on the hull
//! and are not inserted.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::vector::Vec3;

pub const HULL_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HullError {
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHull3 {
    pub vertices: Vec<Vec3<f64>>,
    /// Counter-clockwise seen from outside.
    pub faces: Vec<[usize; 3]>,
    /// mm³
    pub volume: f64,
}

struct Face {
    v: [usize; 3],
    normal: Vec3<f64>,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn new(pts: &[Vec3<f64>], v: [usize; 3]) -> Self {
        let n = (pts[v[1]] - pts[v[0]]).cross(pts[v[2]] - pts[v[0]]);
        let len = n.norm();
        let normal = if len > 0.0 { n * (1.0 / len) } else { n };
        Self {
            v,
            normal,
            offset: normal.dot(pts[v[0]]),
            outside: Vec::new(),
            alive: true,
        }
    }

    fn distance(&self, p: Vec3<f64>) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

fn initial_simplex(pts: &[Vec3<f64>]) -> Result<[usize; 4], HullError> {
    if pts.len() < 4 {
        return Err(HullError::Degenerate("fewer than four points"));
    }
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(HullError::Degenerate("non-finite point"));
    }
    // pair of extreme points along the axis of largest spread
    let mut best = (0, 0, -1.0);
    for axis in 0..3 {
        let key = |i: usize| pts[i].to_array()[axis];
        let lo = (0..pts.len())
            .min_by(|&a, &b| key(a).total_cmp(&key(b)))
            .unwrap();
        let hi = (0..pts.len())
            .max_by(|&a, &b| key(a).total_cmp(&key(b)))
            .unwrap();
        let spread = key(hi) - key(lo);
        if spread > best.2 {
            best = (lo, hi, spread);
        }
    }
    let (a, b, spread) = best;
    if spread <= HULL_EPSILON {
        return Err(HullError::Degenerate("all points coincide"));
    }
    let ab = pts[b] - pts[a];
    let line_dist = |i: usize| ab.cross(pts[i] - pts[a]).norm() / ab.norm();
    let c = (0..pts.len())
        .max_by(|&i, &j| line_dist(i).total_cmp(&line_dist(j)))
        .unwrap();
    if line_dist(c) <= HULL_EPSILON {
        return Err(HullError::Degenerate("collinear points"));
    }
    let n = ab.cross(pts[c] - pts[a]);
    let n = n * (1.0 / n.norm());
    let plane_dist = |i: usize| n.dot(pts[i] - pts[a]).abs();
    let d = (0..pts.len())
        .max_by(|&i, &j| plane_dist(i).total_cmp(&plane_dist(j)))
        .unwrap();
    if plane_dist(d) <= HULL_EPSILON {
        return Err(HullError::Degenerate("coplanar points"));
    }
    Ok([a, b, c, d])
}

/// Convex hull of `points` with outward faces and enclosed volume.
pub fn convex_hull(points: &[Vec3<f64>]) -> Result<ConvexHull3, HullError> {
    let [a, b, c, d] = initial_simplex(points)?;
    let mut faces: Vec<Face> = Vec::new();
    let centroid = (points[a] + points[b] + points[c] + points[d]) * 0.25;
    for tri in [[a, b, c], [a, c, d], [a, d, b], [b, d, c]] {
        let mut f = Face::new(points, tri);
        if f.distance(centroid) > 0.0 {
            f = Face::new(points, [tri[0], tri[2], tri[1]]);
        }
        faces.push(f);
    }
    for i in 0..points.len() {
        if [a, b, c, d].contains(&i) {
            continue;
        }
        assign(&mut faces, 0..4, points, i);
    }

    // directed edge -> owning face
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            edges.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }

    let mut queue: Vec<usize> = (0..4).collect();
    while let Some(fi) = queue.pop() {
        if !faces[fi].alive || faces[fi].outside.is_empty() {
            continue;
        }
        let eye = {
            let f = &faces[fi];
            *f.outside
                .iter()
                .max_by(|&&i, &&j| f.distance(points[i]).total_cmp(&f.distance(points[j])))
                .unwrap()
        };
        let p = points[eye];

        // flood the visible region outward from fi
        let mut visible = vec![fi];
        let mut seen: HashSet<usize> = HashSet::from([fi]);
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut k = 0;
        while k < visible.len() {
            let f = visible[k];
            k += 1;
            let v = faces[f].v;
            for e in 0..3 {
                let (u, w) = (v[e], v[(e + 1) % 3]);
                let nb = edges[&(w, u)];
                if seen.contains(&nb) {
                    continue;
                }
                if faces[nb].distance(p) > HULL_EPSILON {
                    seen.insert(nb);
                    visible.push(nb);
                } else {
                    horizon.push((u, w));
                }
            }
        }
        // horizon edges of visible faces that border a visible neighbor found
        // later are not horizon edges
        horizon.retain(|&(u, w)| !seen.contains(&edges[&(w, u)]));

        let mut orphans = Vec::new();
        for &f in &visible {
            faces[f].alive = false;
            orphans.append(&mut faces[f].outside);
            let v = faces[f].v;
            for e in 0..3 {
                let key = (v[e], v[(e + 1) % 3]);
                if edges.get(&key) == Some(&f) {
                    edges.remove(&key);
                }
            }
        }
        let first_new = faces.len();
        for &(u, w) in &horizon {
            let nf = Face::new(points, [u, w, eye]);
            let id = faces.len();
            edges.insert((u, w), id);
            edges.insert((w, eye), id);
            edges.insert((eye, u), id);
            faces.push(nf);
        }
        let end = faces.len();
        for i in orphans {
            if i != eye {
                assign(&mut faces, first_new..end, points, i);
            }
        }
        queue.extend(first_new..end);
    }

    let live: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut out_faces = Vec::with_capacity(live.len());
    for f in &live {
        let tri = f.v.map(|i| {
            *remap.entry(i).or_insert_with(|| {
                vertices.push(points[i]);
                vertices.len() - 1
            })
        });
        out_faces.push(tri);
    }
    let volume = mesh_volume(&vertices, &out_faces);
    Ok(ConvexHull3 {
        vertices,
        faces: out_faces,
        volume,
    })
}

fn assign(faces: &mut [Face], range: std::ops::Range<usize>, points: &[Vec3<f64>], i: usize) {
    for fi in range {
        if faces[fi].alive && faces[fi].distance(points[i]) > HULL_EPSILON {
            faces[fi].outside.push(i);
            return;
        }
    }
}

/// Enclosed volume of a closed, outward-oriented triangle mesh.
pub fn mesh_volume(vertices: &[Vec3<f64>], faces: &[[usize; 3]]) -> f64 {
    let Some(&o) = vertices.first() else {
        return 0.0;
    };
    faces
        .iter()
        .map(|f| {
            let (a, b, c) = (vertices[f[0]] - o, vertices[f[1]] - o, vertices[f[2]] - o);
            a.dot(b.cross(c))
        })
        .sum::<f64>()
        / 6.0
}

impl ConvexHull3 {
    /// Largest signed distance of `p` to the face planes: positive outside,
    /// non-positive inside or on the surface.
    pub fn signed_distance(&self, p: Vec3<f64>) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                let n = (b - a).cross(c - a);
                n.dot(p - a) / n.norm()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains(&self, p: Vec3<f64>) -> bool {
        self.signed_distance(p) <= HULL_EPSILON
    }

    pub fn edge_count(&self) -> usize {
        let mut set = HashSet::new();
        for f in &self.faces {
            for k in 0..3 {
                let (u, w) = (f[k], f[(k + 1) % 3]);
                set.insert((u.min(w), u.max(w)));
            }
        }
        set.len()
    }

    /// `V - E + F`; 2 for any closed convex polyhedron.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// Writes the mesh as `v x y z` and 1-based `f i j k` lines, preceded by
    /// a volume comment.
    pub fn write_mesh<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "# convex hull: {} vertices, {} faces",
            self.vertices.len(),
            self.faces.len()
        )?;
        writeln!(out, "# volume_mm3 {}", self.volume)?;
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Reads a mesh written by [`ConvexHull3::write_mesh`]; the volume is
/// recomputed from the faces.
pub fn read_mesh<R: BufRead>(input: R) -> Result<ConvexHull3, MeshError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let bad = |reason: &str| MeshError::Parse {
            line: n + 1,
            reason: reason.to_owned(),
        };
        let mut parts = line.split_whitespace();
        match parts.next() {
            None => {}
            Some(s) if s.starts_with('#') => {}
            Some("v") => {
                let c: Vec<f64> = parts
                    .map(|s| s.parse::<f64>().map_err(|_| bad("bad coordinate")))
                    .collect::<Result<_, _>>()?;
                if c.len() != 3 {
                    return Err(bad("vertex needs three coordinates"));
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|s| s.parse::<usize>().map_err(|_| bad("bad index")))
                    .collect::<Result<_, _>>()?;
                if idx.len() != 3 || idx.iter().any(|&i| i == 0 || i > vertices.len()) {
                    return Err(bad("face needs three valid 1-based indices"));
                }
                faces.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            Some(_) => return Err(bad("unknown record")),
        }
    }
    let volume = mesh_volume(&vertices, &faces);
    Ok(ConvexHull3 {
        vertices,
        faces,
        volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube() -> Vec<Vec3<f64>> {
        let mut v = Vec::new();
        for i in 0..8 {
            v.push(Vec3::new(
                (i & 1) as f64,
                ((i >> 1) & 1) as f64,
                ((i >> 2) & 1) as f64,
            ));
        }
        v
    }

    #[test]
    fn unit_cube() {
        let h = convex_hull(&cube()).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert_eq!(h.faces.len(), 12);
        assert!((h.volume - 1.0).abs() < 1e-12);
        assert_eq!(h.euler_characteristic(), 2);
    }

    #[test]
    fn interior_point_dropped() {
        let mut pts = cube();
        pts.insert(3, Vec3::new(0.5, 0.5, 0.5));
        pts.push(Vec3::new(0.5, 0.5, 1.0)); // on a face
        let h = convex_hull(&pts).unwrap();
        assert_eq!(h.vertices.len(), 8);
        assert!(!h.vertices.contains(&Vec3::new(0.5, 0.5, 0.5)));
        assert!(pts.iter().all(|&p| h.contains(p)));
    }

    #[test]
    fn degenerate_inputs() {
        let flat: Vec<_> = (0..10)
            .map(|i| Vec3::new(i as f64, (i * i) as f64, 0.0))
            .collect();
        assert_eq!(
            convex_hull(&flat),
            Err(HullError::Degenerate("coplanar points"))
        );
        let line: Vec<_> = (0..10).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        assert_eq!(
            convex_hull(&line),
            Err(HullError::Degenerate("collinear points"))
        );
        assert!(convex_hull(&cube()[..3]).is_err());
    }

    #[test]
    fn mesh_round_trip() {
        let h = convex_hull(&cube()).unwrap();
        let mut buf = Vec::new();
        h.write_mesh(&mut buf).unwrap();
        let back = read_mesh(&buf[..]).unwrap();
        assert_eq!(back.faces, h.faces);
        assert_eq!(back.vertices, h.vertices);
        assert!((back.volume - 1.0).abs() < 1e-12);
    }
}
