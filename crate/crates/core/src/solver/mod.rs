//! Discrete Robin form `B = K/a + M_σ`, Robin and Dirichlet solves, Green
//! columns and harmonic-measure densities.
//!
//! Data vectors are indexed by mesh vertex; only entries on the relevant
//! boundary vertices are read.

mod coeff;
mod krylov;
mod sparse;

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::measure::MeasureDensity;
use crate::mesh::Mesh;

pub use coeff::{CoefficientField, CoefficientKind, Mat2};
pub use krylov::{bicgstab, pcg, SolveStats, SolverOptions};
pub use sparse::{dot, norm, CsrMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub nodal_values: Vec<f64>,
    /// Relative residual of the linear system actually solved.
    pub residual_norm: f64,
    pub iterations: usize,
    /// Robin parameter, `None` for Dirichlet solves.
    pub a: Option<f64>,
    pub data: String,
}

/// Assembled Robin operator. Immutable; solves may run concurrently.
#[derive(Clone, Debug)]
pub struct RobinSystem {
    pub mesh: Arc<Mesh>,
    pub coeff: CoefficientField,
    pub a: f64,
    pub stiffness: CsrMatrix,
    pub matrix: CsrMatrix,
    /// Explicit `Bᵀ` for nonsymmetric systems.
    transpose: Option<CsrMatrix>,
    /// Diagonal of `M_σ`.
    pub sigma_mass: Vec<f64>,
    pub symmetric: bool,
    pub options: SolverOptions,
}

/// Stiffness matrix with centroid quadrature of `A` and linear elements.
pub fn assemble_stiffness(mesh: &Mesh, coeff: &CoefficientField) -> CsrMatrix {
    let triplets: Vec<(usize, usize, f64)> = (0..mesh.triangles.len())
        .into_par_iter()
        .flat_map_iter(|t| {
            let tri = mesh.triangles[t];
            let p = mesh.triangle_points(t);
            let twice = (p[1] - p[0]).cross(p[2] - p[0]);
            let grads: [Point; 3] = std::array::from_fn(|i| {
                let (b, c) = (p[(i + 1) % 3], p[(i + 2) % 3]);
                Point::new(b.y - c.y, c.x - b.x) * (1.0 / twice)
            });
            let centroid = (p[0] + p[1] + p[2]) * (1.0 / 3.0);
            let m = coeff.at(centroid);
            let area = 0.5 * twice;
            let mut out = Vec::with_capacity(9);
            for i in 0..3 {
                for j in 0..3 {
                    let (gi, gj) = (grads[i], grads[j]);
                    let agj = Point::new(
                        m[0][0] * gj.x + m[0][1] * gj.y,
                        m[1][0] * gj.x + m[1][1] * gj.y,
                    );
                    out.push((tri[i], tri[j], area * gi.dot(agj)));
                }
            }
            out
        })
        .collect();
    CsrMatrix::from_triplets(mesh.vertices.len(), triplets)
}

pub fn assemble(mesh: Arc<Mesh>, coeff: &CoefficientField, a: f64) -> Result<RobinSystem> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidRobinParameter(a));
    }
    let stiffness = assemble_stiffness(&mesh, coeff);
    let sigma_mass = mesh.sigma_weights.clone();
    let mut matrix = stiffness.clone();
    for i in 0..matrix.n {
        for k in matrix.row_ptr[i]..matrix.row_ptr[i + 1] {
            matrix.val[k] /= a;
            if matrix.col[k] == i {
                matrix.val[k] += sigma_mass[i];
            }
        }
    }
    let symmetric = coeff.is_symmetric();
    let transpose = (!symmetric).then(|| matrix.transpose());
    Ok(RobinSystem {
        mesh,
        coeff: coeff.clone(),
        a,
        stiffness,
        matrix,
        transpose,
        sigma_mass,
        symmetric,
        options: SolverOptions::default(),
    })
}

fn solve_with(
    a: &CsrMatrix,
    symmetric: bool,
    b: &[f64],
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolveStats)> {
    let mut x = vec![0.0; a.n];
    let st = if symmetric {
        krylov::pcg(a, b, &mut x, opts)?
    } else {
        krylov::bicgstab(a, b, &mut x, opts)?
    };
    Ok((x, st))
}

/// σ-weighted mean of `f` over the σ-carrying boundary.
pub fn sigma_mean(mesh: &Mesh, f: &[f64]) -> f64 {
    let total: f64 = mesh
        .boundary_vertices
        .iter()
        .map(|&v| mesh.sigma_weights[v])
        .sum();
    mesh.boundary_vertices
        .iter()
        .map(|&v| mesh.sigma_weights[v] * f[v])
        .sum::<f64>()
        / total
}

/// Barycentric evaluation functional `e_X` as (vertex, weight) pairs.
pub fn point_functional(mesh: &Mesh, x: Point) -> Result<Vec<(usize, f64)>> {
    let loc = mesh.locate(x)?;
    let v = loc.vertices(mesh);
    Ok((0..3)
        .filter(|&k| loc.bary[k] > 0.0)
        .map(|k| (v[k], loc.bary[k]))
        .collect())
}

fn check_data(mesh: &Mesh, f: &[f64]) -> Result<()> {
    if f.len() != mesh.vertices.len() {
        return Err(Error::InvalidArgument(format!(
            "data has {} entries, mesh has {} vertices",
            f.len(),
            mesh.vertices.len()
        )));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("data is not finite".into()));
    }
    Ok(())
}

impl RobinSystem {
    pub fn num_unknowns(&self) -> usize {
        self.matrix.n
    }

    fn adjoint(&self) -> &CsrMatrix {
        self.transpose.as_ref().unwrap_or(&self.matrix)
    }

    /// Solves `B u = M_σ f`. On meshes with an inner obstacle the obstacle
    /// vertices are Dirichlet rows with values taken from `f`.
    pub fn solve_robin(&self, f: &[f64]) -> Result<Solution> {
        let mesh = &self.mesh;
        check_data(mesh, f)?;
        if !mesh.dirichlet_vertices.is_empty() {
            return self.solve_mixed(f);
        }
        // Deflation: B·1 = M_σ·1 exactly, so only the σ-mean-free part of the
        // data is handed to the Krylov solver. This keeps the small-a limit,
        // where B is nearly singular, well conditioned on the relevant subspace.
        let mean = sigma_mean(mesh, f);
        let rhs: Vec<f64> = (0..self.matrix.n)
            .map(|i| self.sigma_mass[i] * (f[i] - mean))
            .collect();
        let (v, st) = solve_with(&self.matrix, self.symmetric, &rhs, &self.options)?;
        Ok(Solution {
            nodal_values: v.into_iter().map(|x| x + mean).collect(),
            residual_norm: st.residual,
            iterations: st.iterations,
            a: Some(self.a),
            data: "robin".into(),
        })
    }

    fn solve_mixed(&self, f: &[f64]) -> Result<Solution> {
        let mesh = &self.mesh;
        let mut keep = vec![true; self.matrix.n];
        for &v in &mesh.dirichlet_vertices {
            keep[v] = false;
        }
        let (ii, io, inner, outer) = self.matrix.split(&keep);
        let g: Vec<f64> = outer.iter().map(|&v| f[v]).collect();
        let coupling = io_matvec(&io, &g);
        let rhs: Vec<f64> = inner
            .iter()
            .zip(&coupling)
            .map(|(&v, c)| self.sigma_mass[v] * f[v] - c)
            .collect();
        let (x, st) = solve_with(&ii, self.symmetric, &rhs, &self.options)?;
        let mut u = f.to_vec();
        for (k, &v) in inner.iter().enumerate() {
            u[v] = x[k];
        }
        Ok(Solution {
            nodal_values: u,
            residual_norm: st.residual,
            iterations: st.iterations,
            a: Some(self.a),
            data: "robin with inner dirichlet".into(),
        })
    }

    /// `z = B⁻ᵀ e_X`, computed as `1/σ(∂Ω) + y` with `Bᵀ y = e_X − M_σ1/σ(∂Ω)`.
    fn adjoint_column(&self, x: Point) -> Result<(Vec<f64>, SolveStats)> {
        let mesh = &self.mesh;
        if !mesh.dirichlet_vertices.is_empty() {
            return Err(Error::InvalidArgument(
                "harmonic measure needs a mesh without inner Dirichlet boundary".into(),
            ));
        }
        let ex = point_functional(mesh, x)?;
        let total: f64 = self.sigma_mass.iter().sum();
        let mut rhs: Vec<f64> = self.sigma_mass.iter().map(|m| -m / total).collect();
        for &(v, w) in &ex {
            rhs[v] += w;
        }
        let (y, st) = solve_with(self.adjoint(), self.symmetric, &rhs, &self.options)?;
        Ok((y.into_iter().map(|v| v + 1.0 / total).collect(), st))
    }

    /// Boundary density `w` with `ω^X(E) = Σ_{v∈E} w_v σ_v`.
    pub fn harmonic_measure_density(&self, x: Point) -> Result<MeasureDensity> {
        let (z, st) = self.adjoint_column(x)?;
        Ok(MeasureDensity::new(
            self.mesh.clone(),
            x,
            self.a,
            z,
            st.residual,
        ))
    }

    /// Green column `G(·, y) = B⁻ᵀ e_y / a`.
    pub fn green_column(&self, y: Point) -> Result<Solution> {
        let (z, st) = self.adjoint_column(y)?;
        Ok(Solution {
            nodal_values: z.into_iter().map(|v| v / self.a).collect(),
            residual_norm: st.residual,
            iterations: st.iterations,
            a: Some(self.a),
            data: format!("green column at ({}, {})", y.x, y.y),
        })
    }
}

/// Rectangular block product (rows of `io`, columns indexed by `x`).
fn io_matvec(io: &CsrMatrix, x: &[f64]) -> Vec<f64> {
    (0..io.n)
        .map(|i| io.row(i).map(|(j, v)| v * x[j]).sum())
        .collect()
}

fn dirichlet_keep(mesh: &Mesh) -> Vec<bool> {
    let mut keep = vec![true; mesh.vertices.len()];
    for &v in mesh
        .boundary_vertices
        .iter()
        .chain(&mesh.dirichlet_vertices)
    {
        keep[v] = false;
    }
    keep
}

/// Dirichlet problem with `u = g` on every boundary vertex.
pub fn solve_dirichlet(mesh: &Mesh, coeff: &CoefficientField, g: &[f64]) -> Result<Solution> {
    check_data(mesh, g)?;
    let k = assemble_stiffness(mesh, coeff);
    let (ii, io, inner, outer) = k.split(&dirichlet_keep(mesh));
    let gb: Vec<f64> = outer.iter().map(|&v| g[v]).collect();
    let rhs: Vec<f64> = io_matvec(&io, &gb).into_iter().map(|c| -c).collect();
    let (x, st) = solve_with(&ii, coeff.is_symmetric(), &rhs, &SolverOptions::default())?;
    let mut u = g.to_vec();
    for (k, &v) in inner.iter().enumerate() {
        u[v] = x[k];
    }
    Ok(Solution {
        nodal_values: u,
        residual_norm: st.residual,
        iterations: st.iterations,
        a: None,
        data: "dirichlet".into(),
    })
}

/// Discrete Dirichlet harmonic measure at `x`: per-vertex masses `ω_v` with
/// `u(x) = Σ ω_v g_v` for every Dirichlet solve. Uses one adjoint solve
/// `K_IIᵀ z = e_X`, then `ω_B = e_X|_B − K_IBᵀ z`.
pub fn dirichlet_harmonic_measure(
    mesh: &Mesh,
    coeff: &CoefficientField,
    x: Point,
) -> Result<(Vec<f64>, SolveStats)> {
    let k = assemble_stiffness(mesh, coeff);
    let keep = dirichlet_keep(mesh);
    let (ii, io, inner, outer) = k.split(&keep);
    let ex = point_functional(mesh, x)?;
    let mut local = vec![usize::MAX; mesh.vertices.len()];
    for (r, &v) in inner.iter().enumerate() {
        local[v] = r;
    }
    let mut rhs = vec![0.0; inner.len()];
    let mut omega = vec![0.0; mesh.vertices.len()];
    for &(v, w) in &ex {
        if keep[v] {
            rhs[local[v]] += w;
        } else {
            omega[v] += w;
        }
    }
    let symmetric = coeff.is_symmetric();
    let iit = if symmetric { ii } else { ii.transpose() };
    let (z, st) = solve_with(&iit, symmetric, &rhs, &SolverOptions::default())?;
    for r in 0..io.n {
        for (c, val) in io.row(r) {
            omega[outer[c]] -= val * z[r];
        }
    }
    Ok((omega, st))
}

/// `L²(Ω)` norm of `u_h − u` using the edge-midpoint rule, exact for the
/// square of a linear function.
pub fn l2_error(mesh: &Mesh, values: &[f64], exact: impl Fn(Point) -> f64 + Sync) -> f64 {
    (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let v = mesh.triangles[t];
            let p = mesh.triangle_points(t);
            let d: [f64; 3] = std::array::from_fn(|i| values[v[i]] - exact(p[i]));
            let mut s = 0.0;
            for i in 0..3 {
                let j = (i + 1) % 3;
                let e = 0.5 * (d[i] + d[j])
                    + (0.5 * (exact(p[i]) + exact(p[j])) - exact(p[i].midpoint(p[j])));
                s += e * e;
            }
            s * mesh.triangle_area(t) / 3.0
        })
        .collect::<Vec<_>>()
        .iter()
        .sum::<f64>()
        .sqrt()
}

/// Writes `vertex,x,y,value` rows.
pub fn write_csv<W: Write>(mut w: W, mesh: &Mesh, values: &[f64]) -> Result<()> {
    writeln!(w, "vertex,x,y,value")?;
    for (i, (p, v)) in mesh.vertices.iter().zip(values).enumerate() {
        writeln!(w, "{i},{},{},{}", p.x, p.y, v)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{attach_sigma, gen_reference, ReferenceKind, SigmaRule};
    use crate::mesh::triangulate;

    fn square(h: f64) -> Arc<Mesh> {
        let d = gen_reference(ReferenceKind::Square, 4).unwrap();
        let s = attach_sigma(&d, SigmaRule::Arclength).unwrap();
        Arc::new(triangulate(&d, &s, h).unwrap())
    }

    #[test]
    fn two_triangle_stiffness() {
        let m = square(1.0);
        assert_eq!(m.triangles.len(), 2);
        let k = assemble_stiffness(&m, &CoefficientField::identity());
        // Every corner has diagonal 1; sides couple -1/2, the diagonal 0.
        for i in 0..4 {
            assert!((k.get(i, i) - 1.0).abs() < 1e-15);
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let side = (m.vertices[i] - m.vertices[j]).norm() < 1.2;
                let want = if side { -0.5 } else { 0.0 };
                assert!((k.get(i, j) - want).abs() < 1e-15);
            }
        }
        for r in k.row_sums() {
            assert!(r.abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_nonpositive_a() {
        let m = square(0.25);
        for a in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                assemble(m.clone(), &CoefficientField::identity(), a),
                Err(Error::InvalidRobinParameter(_))
            ));
        }
    }

    #[test]
    fn constants_are_exact() {
        let m = square(1.0 / 16.0);
        let sys = assemble(m.clone(), &CoefficientField::identity(), 2.5).unwrap();
        let u = sys.solve_robin(&vec![0.7; m.vertices.len()]).unwrap();
        assert!(u.nodal_values.iter().all(|&v| v == 0.7));
    }

    #[test]
    fn large_a_approaches_mass() {
        let m = square(0.25);
        let sys = assemble(m.clone(), &CoefficientField::identity(), 1e12).unwrap();
        for &v in &m.boundary_vertices {
            assert!((sys.matrix.get(v, v) - m.sigma_weights[v]).abs() < 1e-10);
        }
    }

    #[test]
    fn green_symmetry_and_density_relation() {
        let m = square(1.0 / 16.0);
        let sys = assemble(m.clone(), &CoefficientField::identity(), 3.0).unwrap();
        let (p, q) = (Point::new(0.25, 0.375), Point::new(0.625, 0.75));
        let (vp, vq) = (m.vertex_nearest(p), m.vertex_nearest(q));
        let gp = sys.green_column(m.vertices[vp]).unwrap();
        let gq = sys.green_column(m.vertices[vq]).unwrap();
        assert!((gp.nodal_values[vq] - gq.nodal_values[vp]).abs() < 1e-8);
        assert!(gp.nodal_values.iter().all(|&g| g >= -1e-10));
        let w = sys.harmonic_measure_density(m.vertices[vp]).unwrap();
        for &v in &m.boundary_vertices {
            assert!((w.weight(v) - 3.0 * gp.nodal_values[v]).abs() < 1e-9);
        }
    }

    #[test]
    fn dirichlet_reproduces_harmonic_polynomial() {
        let exact = |p: Point| p.x * p.x - p.y * p.y;
        let mut errs = Vec::new();
        for h in [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0] {
            let m = square(h);
            let g: Vec<f64> = m.vertices.iter().map(|&p| exact(p)).collect();
            let u = solve_dirichlet(&m, &CoefficientField::identity(), &g).unwrap();
            errs.push(l2_error(&m, &u.nodal_values, exact));
        }
        assert!(errs[2] < errs[1] && errs[1] < errs[0]);
        assert!(errs[1] / errs[2] > 3.0, "{errs:?}");
    }

    #[test]
    fn dirichlet_measure_matches_solves() {
        let m = square(1.0 / 8.0);
        let coeff = CoefficientField::constant([[1.0, 0.3], [-0.3, 1.0]]).unwrap();
        let x = Point::new(0.3, 0.45);
        let (omega, _) = dirichlet_harmonic_measure(&m, &coeff, x).unwrap();
        let g: Vec<f64> = m.vertices.iter().map(|p| (3.0 * p.x).sin() + p.y).collect();
        let u = solve_dirichlet(&m, &coeff, &g).unwrap();
        let direct = m.locate(x).unwrap().interpolate(&m, &u.nodal_values);
        let paired: f64 = omega.iter().zip(&g).map(|(w, g)| w * g).sum();
        assert!((direct - paired).abs() < 1e-8);
        assert!((omega.iter().sum::<f64>() - 1.0).abs() < 1e-8);
    }
}
