use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use robin_lab::geometry::{
    gen_cantor_complement, gen_koch_snowflake, gen_reference, scale_ladder, ReferenceKind,
};
use robin_lab::solver::CoefficientKind;
use robin_lab::{Family, Point, PolygonalDomain, SigmaRule};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Oracle,
    RatioScan,
    HarnackScan,
    DensityScan,
    ActiveBoundary,
    DirichletCompare,
    MonteCarloCheck,
    Regularity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub family: Family,
    #[serde(default)]
    pub generation: u32,
    #[serde(default = "one")]
    pub base_scale: f64,
    /// Cantor only; defaults to `2·base_scale`.
    #[serde(default)]
    pub outer_radius: Option<f64>,
    /// Disk only; defaults to 256.
    #[serde(default)]
    pub edges: Option<usize>,
}

impl DomainSpec {
    pub fn build(&self) -> Result<PolygonalDomain> {
        let l = self.base_scale;
        let d = match self.family {
            Family::CantorComplement => {
                gen_cantor_complement(self.generation, self.outer_radius.unwrap_or(2.0 * l), l)?
            }
            Family::KochSnowflake => gen_koch_snowflake(self.generation, l)?,
            Family::Square => gen_reference(ReferenceKind::Square, 4)?.scaled(l),
            Family::DiskPolygon => {
                gen_reference(ReferenceKind::DiskPolygon, self.edges.unwrap_or(256))?.scaled(l)
            }
        };
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[derive(Default)]
pub struct MeshSpec {
    /// Defaults to [`default_h`].
    #[serde(default)]
    pub target_h: Option<f64>,
    /// Extra levels of uniform refinement (oracle runs compare all levels).
    #[serde(default)]
    pub refinements: u32,
    /// Grade toward the centers and poles instead of meshing uniformly.
    #[serde(default)]
    pub graded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub domain: DomainSpec,
    #[serde(default)]
    pub sigma: Option<SigmaRule>,
    #[serde(default = "identity")]
    pub coefficient: CoefficientKind,
    pub a_grid: Vec<f64>,
    #[serde(default)]
    pub mesh: MeshSpec,
    /// Explicit centers; when absent, `center_count` points are sampled on
    /// the fractal part of the boundary.
    #[serde(default)]
    pub centers: Option<Vec<Point>>,
    #[serde(default = "eight")]
    pub center_count: usize,
    /// Explicit scale ladder; when absent, `scale_count` dyadic scales.
    #[serde(default)]
    pub scales: Option<Vec<f64>>,
    #[serde(default = "six")]
    pub scale_count: usize,
    #[serde(default = "default_c_pole")]
    pub c_pole: Vec<f64>,
    /// Pole for measure comparisons and walk start.
    #[serde(default)]
    pub pole: Option<Point>,
    /// Ball radius for density scans.
    #[serde(default)]
    pub radius: Option<f64>,
    /// Data support multiplier for density scans.
    #[serde(default = "four")]
    pub support_factor: f64,
    /// Inner Dirichlet ball radius for active-boundary runs.
    #[serde(default)]
    pub obstacle_radius: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_walks")]
    pub n_walks: u64,
    #[serde(default = "default_reps")]
    pub repetitions: u64,
    pub output: PathBuf,
}

fn one() -> f64 {
    1.0
}
fn four() -> f64 {
    4.0
}
fn six() -> usize {
    6
}
fn eight() -> usize {
    8
}
fn identity() -> CoefficientKind {
    CoefficientKind::Identity
}
fn default_c_pole() -> Vec<f64> {
    vec![4.0, 10.0]
}
fn default_walks() -> u64 {
    100_000
}
fn default_reps() -> u64 {
    10
}

/// Half the lattice pitch. On disks, a sixteenth of the radius but never
/// below 1.25 chords, so every boundary vertex stays on the circle.
pub fn default_h(domain: &PolygonalDomain) -> f64 {
    match domain.family() {
        Family::DiskPolygon => {
            let r = domain.disk_radius().unwrap_or(1.0);
            let chord = domain.perimeter() / domain.num_edges() as f64;
            (r / 16.0).max(1.25 * chord)
        }
        _ => domain.lattice_pitch() / 2.0,
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    ensure!(
        v > 0.0 && v.is_finite(),
        "{name} must be positive and finite, got {v}"
    );
    Ok(())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text)
            .with_context(|| format!("config {} is invalid", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(!self.a_grid.is_empty(), "a_grid is empty");
        for &a in &self.a_grid {
            positive("a", a)?;
        }
        positive("base_scale", self.domain.base_scale)?;
        if let Some(r) = self.domain.outer_radius {
            positive("outer_radius", r)?;
        }
        if let Some(h) = self.mesh.target_h {
            positive("target_h", h)?;
        }
        for &c in &self.c_pole {
            positive("c_pole", c)?;
        }
        if let Some(s) = &self.scales {
            ensure!(!s.is_empty(), "scales is empty");
            for &r in s {
                positive("scale", r)?;
            }
        }
        for (name, v) in [
            ("radius", self.radius),
            ("obstacle_radius", self.obstacle_radius),
        ] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        positive("support_factor", self.support_factor)?;
        ensure!(self.center_count > 0, "center_count must be positive");
        ensure!(self.scale_count > 0, "scale_count must be positive");
        ensure!(self.n_walks >= 1000, "n_walks must be at least 1000");
        ensure!(self.repetitions > 0, "repetitions must be positive");
        match self.experiment {
            Experiment::Oracle if self.domain.family != Family::DiskPolygon => {
                bail!("oracle runs need a disk domain")
            }
            Experiment::DensityScan if self.radius.is_none() => bail!("density_scan needs radius"),
            Experiment::ActiveBoundary if self.obstacle_radius.is_none() => {
                bail!("active_boundary needs obstacle_radius")
            }
            Experiment::DirichletCompare | Experiment::MonteCarloCheck if self.pole.is_none() => {
                bail!("{:?} needs pole", self.experiment)
            }
            _ => Ok(()),
        }
    }

    pub fn sigma_rule(&self) -> SigmaRule {
        self.sigma
            .unwrap_or_else(|| SigmaRule::natural(self.domain.family))
    }

    pub fn target_h(&self, domain: &PolygonalDomain) -> f64 {
        self.mesh.target_h.unwrap_or_else(|| default_h(domain))
    }

    pub fn scale_list(&self, domain: &PolygonalDomain) -> Vec<f64> {
        self.scales
            .clone()
            .unwrap_or_else(|| scale_ladder(domain, self.scale_count))
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        format!("{:x}", Sha256::digest(bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentConfig {
        serde_json::from_str(
            r#"{
                "experiment": "ratio_scan",
                "domain": {"family": "cantor_complement", "generation": 2},
                "a_grid": [0.1, 10],
                "output": "out"
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = sample();
        assert_eq!(c.sigma_rule(), SigmaRule::ComponentUniform);
        assert_eq!(c.c_pole, vec![4.0, 10.0]);
        assert_eq!(c.coefficient, CoefficientKind::Identity);
        c.validate().unwrap();
    }

    #[test]
    fn round_trips_losslessly() {
        let mut c = sample();
        c.pole = Some(Point::new(1.25, 0.0));
        c.coefficient = CoefficientKind::Checkerboard {
            scale: 0.25,
            m0: [[1.0, 0.0], [0.0, 1.0]],
            m1: [[3.0, 0.5], [0.5, 2.0]],
        };
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<ExperimentConfig>(
            r#"{"experiment": "oracle", "domain": {"family": "disk_polygon"},
                "a_grid": [1], "output": "o", "agrid": [2]}"#,
        );
        assert!(err.is_err());
        let nested = serde_json::from_str::<ExperimentConfig>(
            r#"{"experiment": "oracle", "domain": {"family": "disk_polygon", "edge": 8},
                "a_grid": [1], "output": "o"}"#,
        );
        assert!(nested.is_err());
    }

    #[test]
    fn invalid_numbers_are_rejected() {
        let mut c = sample();
        c.a_grid = vec![1.0, -1.0];
        assert!(c.validate().is_err());
        let mut c = sample();
        c.a_grid.clear();
        assert!(c.validate().is_err());
        let mut c = sample();
        c.experiment = Experiment::Oracle;
        assert!(c.validate().is_err());
    }
}
