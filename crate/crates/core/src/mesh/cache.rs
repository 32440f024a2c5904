//! Binary mesh cache (`RMLB1`, little endian).

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use super::{BoundaryEdge, Mesh};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryMeasure, Point, PolygonalDomain};

const MAGIC: &[u8; 5] = b"RMLB1";

pub fn write_mesh<W: Write>(mut w: W, mesh: &Mesh) -> Result<()> {
    let mut buf = Vec::with_capacity(32 * mesh.vertices.len());
    buf.extend_from_slice(MAGIC);
    for n in [
        mesh.vertices.len(),
        mesh.triangles.len(),
        mesh.boundary_edges.len(),
        mesh.num_holes,
    ] {
        buf.extend_from_slice(&(n as u64).to_le_bytes());
    }
    buf.extend_from_slice(&mesh.h.to_le_bytes());
    buf.extend_from_slice(&mesh.circle_radius.unwrap_or(f64::NAN).to_le_bytes());
    for p in &mesh.vertices {
        buf.extend_from_slice(&p.x.to_le_bytes());
        buf.extend_from_slice(&p.y.to_le_bytes());
    }
    for t in &mesh.triangles {
        for &v in t {
            buf.extend_from_slice(&(v as u32).to_le_bytes());
        }
    }
    for e in &mesh.boundary_edges {
        buf.extend_from_slice(&(e.v[0] as u32).to_le_bytes());
        buf.extend_from_slice(&(e.v[1] as u32).to_le_bytes());
        buf.extend_from_slice(&e.parent.map_or(u32::MAX, |p| p as u32).to_le_bytes());
        buf.extend_from_slice(&e.density.to_le_bytes());
    }
    for w in &mesh.sigma_weights {
        buf.extend_from_slice(&w.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let bytes = self
            .buf
            .get(self.pos..end)
            .ok_or_else(|| Error::InvalidArgument("truncated mesh file".into()))?;
        self.pos = end;
        Ok(bytes.try_into().unwrap())
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }
    fn u64(&mut self) -> Result<usize> {
        Ok(u64::from_le_bytes(self.take()?) as usize)
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn read_mesh<R: Read>(mut r: R) -> Result<Mesh> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    if !buf.starts_with(MAGIC) {
        return Err(Error::InvalidArgument("not an RMLB1 mesh file".into()));
    }
    let mut c = Cursor { buf: &buf, pos: 5 };
    let (nv, nt, nb, holes) = (c.u64()?, c.u64()?, c.u64()?, c.u64()?);
    let h = c.f64()?;
    let radius = c.f64()?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        vertices.push(Point::new(c.f64()?, c.f64()?));
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        triangles.push([c.u32()? as usize, c.u32()? as usize, c.u32()? as usize]);
    }
    let mut edges = Vec::with_capacity(nb);
    for _ in 0..nb {
        let a = c.u32()? as usize;
        let b = c.u32()? as usize;
        let p = c.u32()?;
        edges.push(BoundaryEdge {
            v: [a, b],
            parent: (p != u32::MAX).then_some(p as usize),
            density: c.f64()?,
        });
    }
    let mut weights = Vec::with_capacity(nv);
    for _ in 0..nv {
        weights.push(c.f64()?);
    }
    if triangles.iter().flatten().any(|&v| v >= nv)
        || edges.iter().any(|e| e.v.iter().any(|&v| v >= nv))
    {
        return Err(Error::InvalidArgument(
            "mesh file has out-of-range indices".into(),
        ));
    }
    let mut mesh = Mesh::with_boundary(vertices, triangles, edges, holes);
    mesh.h = h;
    mesh.circle_radius = (!radius.is_nan()).then_some(radius);
    mesh.sigma_weights = weights;
    Ok(mesh)
}

/// Cache file for a (domain, σ rule, target h) triple.
pub fn cache_path(
    dir: &Path,
    domain: &PolygonalDomain,
    sigma: &BoundaryMeasure,
    target_h: f64,
) -> PathBuf {
    dir.join(format!(
        "{}-{}-{:.9e}.rmlb",
        domain.content_hash(),
        sigma.rule,
        target_h
    ))
}

/// Loads a cached mesh or builds it and stores it atomically.
pub fn load_or_build(
    dir: Option<&Path>,
    domain: &PolygonalDomain,
    sigma: &BoundaryMeasure,
    target_h: f64,
) -> Result<Mesh> {
    let Some(dir) = dir else {
        return super::triangulate(domain, sigma, target_h);
    };
    let path = cache_path(dir, domain, sigma, target_h);
    if let Ok(f) = fs::File::open(&path) {
        if let Ok(m) = read_mesh(std::io::BufReader::new(f)) {
            return Ok(m);
        }
    }
    let mesh = super::triangulate(domain, sigma, target_h)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    write_mesh(fs::File::create(&tmp)?, &mesh)?;
    fs::rename(&tmp, &path)?;
    Ok(mesh)
}
