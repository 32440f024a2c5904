//! Text formats for domains (`RMLDOM 1`) and boundary measures (`RMLSIG 1`).

use std::fmt::Write as _;

use super::domain::{Family, PolygonalDomain};
use super::point::Point;
use super::sigma::{BoundaryMeasure, SigmaRule};
use crate::error::{parse_err, Result};

pub fn write_domain(d: &PolygonalDomain) -> String {
    let mut out = String::from("RMLDOM 1\n");
    writeln!(
        out,
        "meta family={} generation={} base_scale={} lattice_pitch={}",
        d.family(),
        d.generation(),
        d.base_scale(),
        d.lattice_pitch()
    )
    .unwrap();
    for (i, comp) in d.components().iter().enumerate() {
        out.push_str(if i == 0 { "outer" } else { "hole" });
        write!(out, " {}", comp.len()).unwrap();
        for p in comp {
            write!(out, " {} {}", p.x, p.y).unwrap();
        }
        out.push('\n');
    }
    out
}

fn meta_fields(line: &str, lineno: usize) -> Result<Vec<(&str, &str)>> {
    let mut it = line.split_whitespace();
    if it.next() != Some("meta") {
        return Err(parse_err(lineno, "expected a meta line"));
    }
    it.map(|kv| {
        kv.split_once('=')
            .ok_or_else(|| parse_err(lineno, format!("malformed field {kv:?}")))
    })
    .collect()
}

fn num<T: std::str::FromStr>(s: &str, lineno: usize) -> Result<T> {
    s.parse()
        .map_err(|_| parse_err(lineno, format!("bad number {s:?}")))
}

pub fn read_domain(text: &str) -> Result<PolygonalDomain> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "RMLDOM 1")) => {}
        _ => return Err(parse_err(1, "missing RMLDOM 1 header")),
    }
    let (ln, meta) = lines
        .next()
        .ok_or_else(|| parse_err(2, "missing meta line"))?;
    let mut family = None;
    let mut generation = 0u32;
    let mut base_scale = 1.0;
    let mut pitch = 1.0;
    for (k, v) in meta_fields(meta, ln)? {
        match k {
            "family" => family = Family::parse(v),
            "generation" => generation = num(v, ln)?,
            "base_scale" => base_scale = num(v, ln)?,
            "lattice_pitch" => pitch = num(v, ln)?,
            _ => return Err(parse_err(ln, format!("unknown field {k:?}"))),
        }
    }
    let family = family.ok_or_else(|| parse_err(ln, "unknown or missing family"))?;
    let mut components = Vec::new();
    for (ln, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let kind = it.next().unwrap();
        match (kind, components.is_empty()) {
            ("outer", true) | ("hole", false) => {}
            _ => return Err(parse_err(ln, format!("unexpected component kind {kind:?}"))),
        }
        let count: usize = num(it.next().unwrap_or(""), ln)?;
        let coords: Vec<f64> = it.map(|s| num(s, ln)).collect::<Result<_>>()?;
        if coords.len() != 2 * count {
            return Err(parse_err(
                ln,
                format!("expected {} coordinates, found {}", 2 * count, coords.len()),
            ));
        }
        components.push(
            coords
                .chunks_exact(2)
                .map(|c| Point::new(c[0], c[1]))
                .collect::<Vec<_>>(),
        );
    }
    PolygonalDomain::from_parts(components, generation, family, pitch, base_scale)
}

pub fn write_sigma(s: &BoundaryMeasure) -> String {
    let mut out = String::from("RMLSIG 1\n");
    writeln!(
        out,
        "meta rule={} edges={} total_mass={} dimension_d={}",
        s.rule,
        s.per_edge_density.len(),
        s.total_mass,
        s.dimension_d
    )
    .unwrap();
    for (i, d) in s.per_edge_density.iter().enumerate() {
        writeln!(out, "{i} {d}").unwrap();
    }
    out
}

pub fn read_sigma(domain: &PolygonalDomain, text: &str) -> Result<BoundaryMeasure> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "RMLSIG 1")) => {}
        _ => return Err(parse_err(1, "missing RMLSIG 1 header")),
    }
    let (ln, meta) = lines
        .next()
        .ok_or_else(|| parse_err(2, "missing meta line"))?;
    let mut rule = None;
    for (k, v) in meta_fields(meta, ln)? {
        if k == "rule" {
            rule = SigmaRule::parse(v);
        }
    }
    let rule = rule.ok_or_else(|| parse_err(ln, "unknown or missing rule"))?;
    let mut dens = vec![f64::NAN; domain.num_edges()];
    for (ln, line) in lines {
        if line.is_empty() {
            continue;
        }
        let (id, d) = line
            .split_once(' ')
            .ok_or_else(|| parse_err(ln, "expected `edge_id density`"))?;
        let id: usize = num(id, ln)?;
        if id >= dens.len() {
            return Err(parse_err(ln, format!("edge id {id} out of range")));
        }
        dens[id] = num(d.trim(), ln)?;
    }
    BoundaryMeasure::from_densities(domain, dens, rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{attach_sigma, gen_cantor_complement, gen_koch_snowflake};

    #[test]
    fn domain_round_trip() {
        for d in [
            gen_cantor_complement(2, 2.0, 1.0).unwrap(),
            gen_koch_snowflake(2, 1.0).unwrap(),
        ] {
            let text = write_domain(&d);
            let back = read_domain(&text).unwrap();
            assert_eq!(back.components(), d.components());
            assert_eq!(back.family(), d.family());
            assert_eq!(back.lattice_pitch(), d.lattice_pitch());
            assert_eq!(write_domain(&back), text);
        }
    }

    #[test]
    fn sigma_round_trip() {
        let d = gen_koch_snowflake(2, 1.0).unwrap();
        let s = attach_sigma(&d, SigmaRule::EdgeScaled).unwrap();
        let back = read_sigma(&d, &write_sigma(&s)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn malformed_input() {
        assert!(read_domain("RMLDOM 2\n").is_err());
        assert!(read_domain("RMLDOM 1\nmeta family=blob\n").is_err());
        let bad = "RMLDOM 1\nmeta family=square\nouter 3 0 0 1 0\n";
        assert!(matches!(
            read_domain(bad),
            Err(crate::Error::Parse { line: 3, .. })
        ));
    }
}
