//! Partially absorbed random walk whose absorption law is the discrete Robin
//! harmonic measure.
//!
//! From `B u = M_σ f`, every row reads `u_i = Σ_j p_ij u_j + q_i f_i` with
//! `p_ij = −B_ij/B_ii` and `q_i = (M_σ)_ii/B_ii`, so `u_i` is the expected
//! data value at the absorption vertex of the chain started at `i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{vertex_set_mass, BoundarySet};
use crate::mesh::Mesh;
use crate::solver::RobinSystem;

/// Steps allowed per trajectory.
pub const WALK_CAP: u64 = 100_000_000;

/// Off-diagonal entries up to this multiple of the diagonal count as zero.
const SIGN_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct WalkChain {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    /// Transition probabilities `p_ij`.
    probs: Vec<f64>,
    /// Absorption probability per vertex.
    pub absorb: Vec<f64>,
    /// Lumped σ-mass per vertex.
    pub sigma: Vec<f64>,
}

pub fn build_chain(system: &RobinSystem) -> Result<WalkChain> {
    let b = &system.matrix;
    let mesh = &system.mesh;
    let mut dirichlet = vec![false; b.n];
    for &v in &mesh.dirichlet_vertices {
        dirichlet[v] = true;
    }
    let mut row_ptr = vec![0];
    let mut cols = Vec::new();
    let mut probs = Vec::new();
    let mut absorb = Vec::with_capacity(b.n);
    for i in 0..b.n {
        if dirichlet[i] {
            absorb.push(1.0);
            row_ptr.push(cols.len());
            continue;
        }
        let d = b.get(i, i);
        for (j, v) in b.row(i) {
            if j == i {
                continue;
            }
            if v > SIGN_TOL * d {
                return Err(Error::NotMMatrix {
                    row: i,
                    col: j,
                    value: v,
                });
            }
            if v < 0.0 {
                cols.push(j);
                probs.push(-v / d);
            }
        }
        absorb.push(system.sigma_mass[i] / d);
        row_ptr.push(cols.len());
    }
    Ok(WalkChain {
        row_ptr,
        cols,
        probs,
        absorb,
        sigma: system.sigma_mass.clone(),
    })
}

impl WalkChain {
    pub fn num_vertices(&self) -> usize {
        self.absorb.len()
    }

    /// Transitions out of vertex `i`.
    pub fn transitions(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.probs[r].iter().copied())
    }

    /// `max_i |Σ_j p_ij + q_i − 1|`.
    pub fn stochastic_defect(&self) -> f64 {
        (0..self.num_vertices())
            .map(|i| {
                (self.transitions(i).map(|(_, p)| p).sum::<f64>() + self.absorb[i] - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    fn step(&self, i: usize, rng: &mut ChaCha8Rng) -> Option<usize> {
        let u: f64 = rng.gen();
        if u < self.absorb[i] {
            return None;
        }
        let mut acc = self.absorb[i];
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        for k in r.clone() {
            acc += self.probs[k];
            if u < acc {
                return Some(self.cols[k]);
            }
        }
        // Rounding left a sliver above the last cumulative value.
        Some(self.cols[r.end - 1])
    }

    /// Runs trajectory `index` of stream `seed` from `start`; returns the
    /// absorption vertex and the number of steps taken.
    pub fn walk(&self, start: usize, seed: u64, index: u64) -> Result<(usize, u64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut v = start;
        for steps in 0..WALK_CAP {
            match self.step(v, &mut rng) {
                None => return Ok((v, steps + 1)),
                Some(next) => v = next,
            }
        }
        Err(Error::CapExceeded { cap: WALK_CAP })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    /// Absorption counts per vertex.
    pub counts: Vec<u64>,
    pub n_walks: u64,
    pub total_steps: u64,
}

impl Histogram {
    /// `counts / (n·σ_v)`, an estimate of the density `w_v` (0 off the boundary).
    pub fn density(&self, sigma: &[f64]) -> Vec<f64> {
        self.counts
            .iter()
            .zip(sigma)
            .map(|(&c, &s)| {
                if s > 0.0 {
                    c as f64 / (self.n_walks as f64 * s)
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn mean_steps(&self) -> f64 {
        self.total_steps as f64 / self.n_walks as f64
    }

    /// `Σ (ĉ_v − P_v)² / P_v` against absorption probabilities `P_v`.
    pub fn chi_squared(&self, expected: &[f64]) -> f64 {
        let n = self.n_walks as f64;
        self.counts
            .iter()
            .zip(expected)
            .filter(|(_, &p)| p > 0.0)
            .map(|(&c, &p)| (c as f64 / n - p).powi(2) / p)
            .sum()
    }

    pub fn write_csv<W: std::io::Write>(&self, mut w: W, sigma: &[f64]) -> Result<()> {
        writeln!(w, "vertex,count,sigma_weight,density")?;
        let dens = self.density(sigma);
        for (v, (&c, &s)) in self.counts.iter().zip(sigma).enumerate() {
            if s > 0.0 {
                writeln!(w, "{v},{c},{s},{}", dens[v])?;
            }
        }
        Ok(())
    }
}

fn check_walks(n_walks: u64) -> Result<()> {
    if n_walks < 1000 {
        return Err(Error::InvalidArgument(format!(
            "need at least 1000 walks, got {n_walks}"
        )));
    }
    Ok(())
}

/// Absorption counts of `n_walks` trajectories from `start`. Trajectory `k`
/// uses stream `k` of `seed`, so the result does not depend on scheduling.
pub fn absorption_histogram(
    chain: &WalkChain,
    start: usize,
    n_walks: u64,
    seed: u64,
) -> Result<Histogram> {
    check_walks(n_walks)?;
    if start >= chain.num_vertices() {
        return Err(Error::InvalidArgument(format!("start vertex {start}")));
    }
    const CHUNK: u64 = 4096;
    let chunks: Vec<(Vec<u64>, u64)> = (0..n_walks.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; chain.num_vertices()];
            let mut steps = 0u64;
            for k in c * CHUNK..((c + 1) * CHUNK).min(n_walks) {
                let (v, s) = chain.walk(start, seed, k)?;
                counts[v] += 1;
                steps += s;
            }
            Ok((counts, steps))
        })
        .collect::<Result<_>>()?;
    let mut counts = vec![0u64; chain.num_vertices()];
    let mut total_steps = 0;
    for (c, s) in chunks {
        for (a, b) in counts.iter_mut().zip(c) {
            *a += b;
        }
        total_steps += s;
    }
    Ok(Histogram {
        counts,
        n_walks,
        total_steps,
    })
}

/// Share of each vertex's lumped σ-mass that lies in `set`.
pub fn vertex_fractions(mesh: &Mesh, set: &BoundarySet) -> Vec<f64> {
    vertex_set_mass(mesh, set)
        .iter()
        .zip(&mesh.sigma_weights)
        .map(|(&m, &s)| if s > 0.0 { (m / s).min(1.0) } else { 0.0 })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// `√(p̂(1−p̂)/n)`.
    pub stderr: f64,
    pub n_walks: u64,
    pub mean_steps: f64,
}

/// Monte Carlo estimate of `ω^X(E)`: each walk scores the fraction of its
/// absorption vertex's σ-mass that lies in `E`.
pub fn estimate_omega_mc(
    chain: &WalkChain,
    mesh: &Mesh,
    start: usize,
    set: &BoundarySet,
    n_walks: u64,
    seed: u64,
) -> Result<McEstimate> {
    let hist = absorption_histogram(chain, start, n_walks, seed)?;
    let frac = vertex_fractions(mesh, set);
    let score: f64 = hist
        .counts
        .iter()
        .zip(&frac)
        .map(|(&c, &f)| c as f64 * f)
        .sum();
    let p = score / n_walks as f64;
    Ok(McEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / n_walks as f64).sqrt(),
        n_walks,
        mean_steps: hist.mean_steps(),
    })
}
