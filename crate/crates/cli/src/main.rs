use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use robin_lab::geometry::attach_sigma;
use robin_lab::geometry::format::{read_domain, write_domain, write_sigma};
use robin_lab::mesh::{load_or_build, write_mesh, Mesh};
use robin_lab::solver::{assemble, write_csv, CoefficientField, CoefficientKind};
use robin_lab::walker::{absorption_histogram, build_chain};
use robin_lab::{Family, Point, PolygonalDomain, SigmaRule};
use robin_lab_cli::config::{default_h, DomainSpec};
use robin_lab_cli::plots::render_dir;
use robin_lab_cli::run::{CACHE_ENV, REPORT_FILE};
use robin_lab_cli::{run, Experiment, ExperimentConfig, ExperimentReport, Status};

#[derive(Parser)]
#[command(name = "rml", version, about = "Robin harmonic measure laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct MeshArgs {
    /// Domain file (RMLDOM).
    #[arg(long)]
    domain: PathBuf,
    /// Boundary measure rule; defaults to the family's natural rule.
    #[arg(long, value_parser = parse_sigma)]
    sigma: Option<SigmaRule>,
    /// Target mesh size; defaults to half the lattice pitch.
    #[arg(long)]
    h: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a domain file.
    Gen {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        #[arg(long, default_value_t = 0)]
        generation: u32,
        #[arg(long, default_value_t = 1.0)]
        base_scale: f64,
        /// Cantor outer square radius (default 2 x base scale).
        #[arg(long)]
        outer_radius: Option<f64>,
        /// Disk polygon edge count.
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the natural boundary measure (RMLSIG) here.
        #[arg(long)]
        sigma_out: Option<PathBuf>,
    },
    /// Triangulate a domain and write the binary mesh.
    Mesh {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the Robin problem and write nodal values.
    Solve {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long)]
        a: f64,
        /// Boundary data: one, x, y or radial (x/|x|).
        #[arg(long, default_value = "x")]
        data: String,
        /// Coefficient as JSON, e.g. '{"kind":"identity"}'.
        #[arg(long)]
        coefficient: Option<String>,
        #[arg(long, default_value = "solution.csv")]
        out: PathBuf,
    },
    /// Robin harmonic measure density at a pole.
    Measure {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long)]
        a: f64,
        #[arg(long, value_parser = parse_point)]
        pole: Point,
        #[arg(long)]
        coefficient: Option<String>,
        #[arg(long, default_value = "measure.csv")]
        out: PathBuf,
    },
    /// Run a ratio or Harnack scan described by a config file.
    Scan {
        #[arg(long)]
        config: PathBuf,
    },
    /// Absorption histogram of the Robin random walk.
    Walk {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start point; defaults to the center of the bounding box.
        #[arg(long, value_parser = parse_point)]
        start: Option<Point>,
        #[arg(long, default_value = "histogram.csv")]
        out: PathBuf,
    },
    /// Regenerate the SVG figures of a report directory from its CSV files.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Run any experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::parse(s).ok_or_else(|| format!("unknown family {s}"))
}

fn parse_sigma(s: &str) -> Result<SigmaRule, String> {
    SigmaRule::parse(s).ok_or_else(|| format!("unknown sigma rule {s}"))
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| e.to_string());
    Ok(Point::new(p(x)?, p(y)?))
}

fn coefficient(json: Option<&str>) -> Result<CoefficientField> {
    let kind: CoefficientKind = match json {
        Some(j) => serde_json::from_str(j).context("parsing --coefficient")?,
        None => CoefficientKind::Identity,
    };
    Ok(CoefficientField::from_kind(kind)?)
}

fn load_mesh(args: &MeshArgs) -> Result<(PolygonalDomain, Arc<Mesh>)> {
    let text = fs::read_to_string(&args.domain)
        .with_context(|| format!("reading {}", args.domain.display()))?;
    let domain = read_domain(&text)?;
    let sigma = attach_sigma(
        &domain,
        args.sigma.unwrap_or(SigmaRule::natural(domain.family())),
    )?;
    let h = args.h.unwrap_or_else(|| default_h(&domain));
    let cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let mesh = load_or_build(cache.as_deref(), &domain, &sigma, h)?;
    Ok((domain, Arc::new(mesh)))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(
        fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn print_report(r: &ExperimentReport) {
    println!(
        "{:?} run {} -> {} ({:.1}s)",
        r.config.experiment,
        &r.config_hash[..12],
        r.config.output.display(),
        r.wall_clock_secs
    );
    for c in &r.checks {
        let value = c.value.map_or("n/a".into(), |v| format!("{v:.4e}"));
        println!(
            "  [{}] {}: {value} ({})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.limit
        );
    }
}

fn run_config(path: &Path, only: Option<&[Experiment]>) -> Result<()> {
    let cfg = ExperimentConfig::load(path)?;
    if let Some(kinds) = only {
        if !kinds.contains(&cfg.experiment) {
            bail!(
                "{:?} is not a scan experiment; use `rml run`",
                cfg.experiment
            );
        }
    }
    let report = run(&cfg)?;
    print_report(&report);
    if report.status == Status::Failed {
        bail!("{}", report.error.unwrap_or_default());
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen {
            family,
            generation,
            base_scale,
            outer_radius,
            edges,
            out,
            sigma_out,
        } => {
            let spec = DomainSpec {
                family,
                generation,
                base_scale,
                outer_radius,
                edges,
            };
            let d = spec.build()?;
            fs::write(&out, write_domain(&d))?;
            if let Some(path) = sigma_out {
                fs::write(
                    path,
                    write_sigma(&attach_sigma(&d, SigmaRule::natural(family))?),
                )?;
            }
            println!(
                "{family} generation {generation}: {} components, {} edges -> {}",
                d.components().len(),
                d.num_edges(),
                out.display()
            );
        }
        Command::Mesh { mesh, out } => {
            let (_, m) = load_mesh(&mesh)?;
            let mut w = create(&out)?;
            write_mesh(&mut w, &m)?;
            w.flush()?;
            println!(
                "{} vertices, {} triangles, h {:.4e}, max angle {:.3} deg -> {}",
                m.num_vertices(),
                m.num_triangles(),
                m.h,
                m.max_angle_deg(),
                out.display()
            );
        }
        Command::Solve {
            mesh,
            a,
            data,
            coefficient: coeff,
            out,
        } => {
            let (_, m) = load_mesh(&mesh)?;
            let f: Vec<f64> = match data.as_str() {
                "one" => vec![1.0; m.num_vertices()],
                "x" => m.vertices.iter().map(|p| p.x).collect(),
                "y" => m.vertices.iter().map(|p| p.y).collect(),
                "radial" => m
                    .vertices
                    .iter()
                    .map(|p| p.x / p.norm().max(1e-300))
                    .collect(),
                other => bail!("unknown data {other}; use one, x, y or radial"),
            };
            let u = assemble(m.clone(), &coefficient(coeff.as_deref())?, a)?.solve_robin(&f)?;
            let mut w = create(&out)?;
            write_csv(&mut w, &m, &u.nodal_values)?;
            w.flush()?;
            println!(
                "{} unknowns, {} iterations, residual {:.2e} -> {}",
                m.num_vertices(),
                u.iterations,
                u.residual_norm,
                out.display()
            );
        }
        Command::Measure {
            mesh,
            a,
            pole,
            coefficient: coeff,
            out,
        } => {
            let (_, m) = load_mesh(&mesh)?;
            let w = assemble(m.clone(), &coefficient(coeff.as_deref())?, a)?
                .harmonic_measure_density(pole)?;
            let mut f = create(&out)?;
            writeln!(f, "vertex,x,y,sigma_weight,density")?;
            for &v in &m.boundary_vertices {
                let p = m.vertices[v];
                writeln!(
                    f,
                    "{v},{},{},{},{}",
                    p.x,
                    p.y,
                    m.sigma_weights[v],
                    w.weight(v)
                )?;
            }
            f.flush()?;
            println!(
                "total mass {:.12}, residual {:.2e} -> {}",
                w.total,
                w.residual,
                out.display()
            );
        }
        Command::Scan { config } => run_config(
            &config,
            Some(&[Experiment::RatioScan, Experiment::HarnackScan]),
        )?,
        Command::Run { config } => run_config(&config, None)?,
        Command::Walk {
            mesh,
            a,
            n,
            seed,
            start,
            out,
        } => {
            let (domain, m) = load_mesh(&mesh)?;
            let x = match start {
                Some(p) => p,
                None => {
                    let (lo, hi) = domain.bounding_box();
                    let c = lo.midpoint(hi);
                    if !domain.contains(c) {
                        bail!("bounding-box center lies outside the domain; pass --start");
                    }
                    c
                }
            };
            let sys = assemble(m.clone(), &CoefficientField::identity(), a)?;
            let chain = build_chain(&sys)?;
            let v = m.vertex_nearest(x);
            let hist = absorption_histogram(&chain, v, n, seed)?;
            let mut w = create(&out)?;
            hist.write_csv(&mut w, &m.sigma_weights)?;
            w.flush()?;
            println!(
                "{n} walks from vertex {v}, mean length {:.1} steps -> {}",
                hist.mean_steps(),
                out.display()
            );
        }
        Command::Report { dir } => {
            if !dir.join(REPORT_FILE).exists() {
                bail!("{} has no {REPORT_FILE}", dir.display());
            }
            for svg in render_dir(&dir)? {
                println!("{}", dir.join(svg).display());
            }
        }
    }
    Ok(())
}
