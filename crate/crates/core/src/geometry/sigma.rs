use std::fmt;

use serde::{Deserialize, Serialize};

use super::domain::{Family, PolygonalDomain};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaRule {
    /// One-dimensional Hausdorff measure on every edge.
    Arclength,
    /// Cantor complements: every hole carries mass `4^{-g}`, the outer
    /// curve keeps arclength density.
    ComponentUniform,
    /// Koch snowflakes: every generation-`g` edge carries mass `4^{-g}`.
    EdgeScaled,
}

impl SigmaRule {
    pub fn as_str(self) -> &'static str {
        match self {
            SigmaRule::Arclength => "arclength",
            SigmaRule::ComponentUniform => "component_uniform",
            SigmaRule::EdgeScaled => "edge_scaled",
        }
    }

    pub fn parse(s: &str) -> Option<SigmaRule> {
        match s {
            "arclength" => Some(SigmaRule::Arclength),
            "component_uniform" => Some(SigmaRule::ComponentUniform),
            "edge_scaled" => Some(SigmaRule::EdgeScaled),
            _ => None,
        }
    }

    /// The natural rule for a family: the one that makes the limit measure
    /// Ahlfors regular of the nominal dimension.
    pub fn natural(family: Family) -> SigmaRule {
        match family {
            Family::CantorComplement => SigmaRule::ComponentUniform,
            Family::KochSnowflake => SigmaRule::EdgeScaled,
            _ => SigmaRule::Arclength,
        }
    }
}

impl fmt::Display for SigmaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Boundary measure stored as a density against arclength on each domain edge.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMeasure {
    pub per_edge_density: Vec<f64>,
    pub total_mass: f64,
    pub dimension_d: f64,
    pub rule: SigmaRule,
}

impl BoundaryMeasure {
    pub fn from_densities(
        domain: &PolygonalDomain,
        densities: Vec<f64>,
        rule: SigmaRule,
    ) -> Result<Self> {
        if densities.len() != domain.num_edges() {
            return Err(Error::InvalidArgument(format!(
                "{} densities for {} edges",
                densities.len(),
                domain.num_edges()
            )));
        }
        if let Some(i) = densities.iter().position(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidArgument(format!(
                "edge {i} has nonpositive density {}",
                densities[i]
            )));
        }
        let total_mass = domain
            .edges()
            .zip(&densities)
            .map(|(e, d)| e.length() * d)
            .sum();
        Ok(Self {
            per_edge_density: densities,
            total_mass,
            dimension_d: nominal_dimension(domain.family()),
            rule,
        })
    }

    pub fn density(&self, edge: usize) -> f64 {
        self.per_edge_density[edge]
    }

    pub fn edge_mass(&self, domain: &PolygonalDomain, edge: usize) -> f64 {
        self.per_edge_density[edge] * domain.edge(edge).length()
    }

    /// Mass of the fractal part of the boundary (the holes for Cantor).
    pub fn fractal_mass(&self, domain: &PolygonalDomain) -> f64 {
        domain
            .fractal_edges()
            .map(|e| self.edge_mass(domain, e))
            .sum()
    }
}

pub fn nominal_dimension(family: Family) -> f64 {
    match family {
        Family::KochSnowflake => 4f64.ln() / 3f64.ln(),
        _ => 1.0,
    }
}

pub fn attach_sigma(domain: &PolygonalDomain, rule: SigmaRule) -> Result<BoundaryMeasure> {
    let g = domain.generation() as i32;
    let l = domain.base_scale();
    let densities = match (rule, domain.family()) {
        (SigmaRule::Arclength, _) => vec![1.0; domain.num_edges()],
        (SigmaRule::ComponentUniform, Family::CantorComplement) => {
            // Hole perimeter is 4 L 4^{-g}; mass 4^{-g} gives density 1/(4L).
            let mut d = vec![1.0; domain.num_edges()];
            for e in domain.fractal_edges() {
                d[e] = 1.0 / (4.0 * l);
            }
            d
        }
        (SigmaRule::EdgeScaled, Family::KochSnowflake) => {
            let mass = 0.25f64.powi(g);
            vec![mass / domain.lattice_pitch(); domain.num_edges()]
        }
        (rule, family) => {
            return Err(Error::IncompatibleRule {
                rule: rule.to_string(),
                family: family.to_string(),
            })
        }
    };
    BoundaryMeasure::from_densities(domain, densities, rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        gen_cantor_complement, gen_koch_snowflake, gen_reference, ReferenceKind,
    };

    #[test]
    fn cantor_component_masses() {
        let d = gen_cantor_complement(2, 2.0, 1.0).unwrap();
        let s = attach_sigma(&d, SigmaRule::ComponentUniform).unwrap();
        for c in 1..=16 {
            let m: f64 = d.component_edges(c).map(|e| s.edge_mass(&d, e)).sum();
            assert!((m - 1.0 / 16.0).abs() < 1e-15);
        }
        assert!((s.fractal_mass(&d) - 1.0).abs() < 1e-12);
        let outer: f64 = d.component_edges(0).map(|e| s.edge_mass(&d, e)).sum();
        assert!((s.total_mass - 1.0 - outer).abs() < 1e-12);
    }

    #[test]
    fn koch_edge_scaled() {
        let d = gen_koch_snowflake(1, 1.0).unwrap();
        let s = attach_sigma(&d, SigmaRule::EdgeScaled).unwrap();
        assert_eq!(s.per_edge_density.len(), 12);
        for e in 0..12 {
            assert!((s.edge_mass(&d, e) - 0.25).abs() < 1e-15);
        }
        assert!((s.total_mass - 3.0).abs() < 1e-12);
        assert!((s.dimension_d - 1.2618595071429148).abs() < 1e-12);
    }

    #[test]
    fn arclength_total_is_perimeter() {
        for d in [
            gen_reference(ReferenceKind::Square, 0).unwrap(),
            gen_koch_snowflake(3, 1.0).unwrap(),
            gen_cantor_complement(3, 2.0, 1.0).unwrap(),
        ] {
            let s = attach_sigma(&d, SigmaRule::Arclength).unwrap();
            assert!((s.total_mass - d.perimeter()).abs() <= 1e-12 * d.perimeter());
        }
    }

    #[test]
    fn incompatible_rules_rejected() {
        let sq = gen_reference(ReferenceKind::Square, 0).unwrap();
        assert!(matches!(
            attach_sigma(&sq, SigmaRule::EdgeScaled),
            Err(Error::IncompatibleRule { .. })
        ));
        let k = gen_koch_snowflake(1, 1.0).unwrap();
        assert!(attach_sigma(&k, SigmaRule::ComponentUniform).is_err());
    }
}
