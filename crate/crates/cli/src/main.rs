use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bishape_core::enumerate::{enumerate_shapes_with, ShapeEnumOptions};
use bishape_core::sample::{cache_dir, BishapeSampler, SampleStats, SamplerConfig, ShapeTable};
use bishape_core::series::{
    a_shape_poly, b_shape_poly, disconnected_pairs_poly, fiber_gf, generalized_shape_poly_2bb, shape_poly_1bb,
    shape_poly_2bb, w_gf,
};
use bishape_core::{
    boundary_components, classify_loops, count_fiber, eta, eta_inv, parse_batch, parse_diagram, project_shape,
    shape_class, theta, theta_inv, Diagram, Error, ErrorKind, IntPolynomial, IntervalKind, PowerSeries, Shape,
};

mod output;

use output::{coefficient_map, Format, Out};

#[derive(Parser, Debug)]
#[command(name = "bishape", version, about = "Genus, shapes and shape polynomials of chord diagrams")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// Diagram file; `-` or nothing reads stdin
    input: Option<PathBuf>,

    /// Inline diagram, lines separated by `;`, e.g. "4;1-3 2-4"
    #[arg(long, conflicts_with = "input")]
    diagram: Option<String>,

    /// Treat the input as blank-line separated diagrams
    #[arg(long)]
    batch: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Genus and number of boundary components
    Genus(Input),
    /// Loop classification
    Loops(Input),
    /// Shape projection, A/B class and interval statistics
    Shape(Input),
    /// Apply one of the shape bijections
    Bij {
        #[arg(value_enum)]
        map: BijMap,
        #[command(flatten)]
        input: Input,
    },
    /// Shape polynomial coefficients
    Poly {
        #[arg(long, default_value_t = 1)]
        backbones: usize,
        #[arg(long)]
        genus: usize,
        #[arg(long, value_enum, default_value_t = PolyKind::Shapes)]
        kind: PolyKind,
    },
    /// Generating function coefficients
    Series {
        #[command(subcommand)]
        which: SeriesKind,
    },
    /// Enumerate all shapes of a given genus
    Enumerate {
        #[arg(long)]
        backbones: usize,
        #[arg(long)]
        genus: usize,
        /// Print every shape
        #[arg(long)]
        list: bool,
        /// Keep disconnected two-backbone shapes
        #[arg(long)]
        include_disconnected: bool,
        /// Allow searches beyond the guaranteed size
        #[arg(long)]
        best_effort: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Draw uniform two-backbone shapes
    Sample {
        #[arg(long)]
        genus: usize,
        #[arg(long)]
        count: usize,
        /// Only shapes with this many arcs, rainbows included
        #[arg(long)]
        arcs: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        stats_only: bool,
        /// Shape table cache; defaults to $BISHAPE_CACHE_DIR
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long)]
        best_effort: bool,
    },
    /// Count the matchings with a given number of arcs whose shape is the input
    Fiber {
        #[arg(long)]
        arcs: usize,
        #[command(flatten)]
        input: Input,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BijMap {
    Theta,
    ThetaInv,
    Eta,
    EtaInv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PolyKind {
    Shapes,
    A,
    B,
    Generalized,
    Disconnected,
}

#[derive(Subcommand, Debug)]
enum SeriesKind {
    /// Fiber series of a two-backbone shape with `l` non-rainbow arcs
    Fiber {
        #[arg(long)]
        arcs: usize,
        #[arg(long, default_value_t = 20)]
        order: usize,
    },
    /// Two-backbone structures of genus g
    W {
        #[arg(long)]
        genus: usize,
        #[arg(long, default_value_t = 20)]
        order: usize,
    },
}

fn read_input(input: &Input) -> Result<Vec<Diagram>, Error> {
    let text = match (&input.diagram, &input.input) {
        (Some(inline), _) => inline.replace(';', "\n"),
        (None, Some(path)) if path.as_os_str() != "-" => fs::read_to_string(path)?,
        _ => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    if input.batch {
        parse_batch(&text)
    } else {
        Ok(vec![parse_diagram(&text)?])
    }
}

fn read_shape(input: &Input) -> Result<Shape, Error> {
    let mut diagrams = read_input(input)?;
    if diagrams.len() != 1 {
        return Err(Error::Precondition("expected exactly one diagram".into()));
    }
    Shape::new(diagrams.remove(0))
}

fn diagram_json(d: &Diagram) -> Value {
    json!({
        "backbones": d.backbone_lengths(),
        "arcs": d.arcs().iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>(),
        "code": d.canonical_code(),
    })
}

fn interval_counts(d: &Diagram) -> Value {
    let kinds = d.interval_kinds();
    let count = |k: IntervalKind| kinds.iter().filter(|&&x| x == k).count();
    json!({
        "gap": count(IntervalKind::Gap),
        "p": count(IntervalKind::PInterval),
        "sigma": count(IntervalKind::SigmaInterval),
    })
}

fn series_json(s: &PowerSeries) -> Value {
    json!({ "coefficients": s.coeffs().iter().map(ToString::to_string).collect::<Vec<_>>() })
}

fn run(cli: Cli, out: &mut Out<impl Write>) -> Result<(), Error> {
    match cli.command {
        Command::Genus(input) => {
            for d in read_input(&input)? {
                let bd = boundary_components(&d);
                out.record(&json!({ "genus": bd.genus, "r": bd.r }))?;
            }
        }
        Command::Loops(input) => {
            for d in read_input(&input)? {
                let p = classify_loops(&d);
                let mut v = serde_json::to_value(&p).map_err(|e| Error::Internal(e.to_string()))?;
                if out.format != Format::Json {
                    v.as_object_mut().unwrap().remove("loops");
                }
                out.record(&v)?;
            }
        }
        Command::Shape(input) => {
            for d in read_input(&input)? {
                let projection = project_shape(&d);
                let shape = projection.shape();
                let class = match &shape {
                    Some(s) if s.backbone_count() == 1 => Some(format!("{:?}", shape_class(s)?)),
                    _ => None,
                };
                out.record(&json!({
                    "shape": projection.diagram.canonical_code(),
                    "is_shape": shape.is_some(),
                    "empty": projection.empty,
                    "class": class,
                    "arcs": projection.diagram.arc_count(),
                    "intervals": interval_counts(&d),
                }))?;
            }
        }
        Command::Bij { map, input } => {
            let s = read_shape(&input)?;
            let image = match map {
                BijMap::Theta => theta(&s)?,
                BijMap::ThetaInv => theta_inv(&s)?,
                BijMap::Eta => eta(&s)?,
                BijMap::EtaInv => eta_inv(&s)?,
            };
            if out.format == Format::Text {
                out.line(&image.diagram().to_string())?;
            } else {
                out.record(&diagram_json(image.diagram()))?;
            }
        }
        Command::Poly { backbones, genus, kind } => {
            let p: IntPolynomial = match (backbones, kind) {
                (1, PolyKind::Shapes) => shape_poly_1bb(genus)?,
                (1, PolyKind::A) => a_shape_poly(genus)?,
                (1, PolyKind::B) => b_shape_poly(genus)?,
                (2, PolyKind::Shapes) => shape_poly_2bb(genus)?,
                (2, PolyKind::Generalized) => generalized_shape_poly_2bb(genus)?,
                (2, PolyKind::Disconnected) => disconnected_pairs_poly(genus)?,
                _ => {
                    return Err(Error::Precondition(format!(
                        "no {kind:?} polynomial over {backbones} backbone(s)"
                    )))
                }
            };
            if out.format == Format::Text {
                out.line(&p.to_string())?;
            } else {
                out.record(&json!({
                    "backbones": backbones,
                    "genus": genus,
                    "coefficients": coefficient_map(&p),
                }))?;
            }
        }
        Command::Series { which } => {
            let s = match which {
                SeriesKind::Fiber { arcs, order } => fiber_gf(arcs, order)?,
                SeriesKind::W { genus, order } => w_gf(genus, order)?,
            };
            out.record(&series_json(&s))?;
        }
        Command::Enumerate {
            backbones,
            genus,
            list,
            include_disconnected,
            best_effort,
            threads,
        } => {
            let options = ShapeEnumOptions {
                include_disconnected,
                best_effort,
                ..ShapeEnumOptions::default()
            };
            let shapes = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Internal(e.to_string()))?
                    .install(|| enumerate_shapes_with(backbones, genus, &options))?,
                None => enumerate_shapes_with(backbones, genus, &options)?,
            };
            if list {
                for s in &shapes {
                    out.line(&s.canonical_code())?;
                }
            }
            let mut profile = std::collections::BTreeMap::new();
            for s in &shapes {
                *profile.entry(s.arc_count().to_string()).or_insert(0u64) += 1;
            }
            out.record(&json!({ "count": shapes.len(), "profile": profile }))?;
        }
        Command::Sample {
            genus,
            count,
            arcs,
            seed,
            stats_only,
            cache_dir: dir,
            best_effort,
        } => {
            let table = ShapeTable::load_or_build(1, genus + 1, &cache_dir(dir.as_deref()), best_effort)?;
            let config = SamplerConfig { seed, genus, arcs, count };
            let mut rng = config.rng(0);
            let mut sampler = BishapeSampler::new(&table, arcs)?;
            let mut stats = SampleStats::default();
            for _ in 0..count {
                let s = sampler.sample(&mut rng)?;
                stats.record(&s);
                if !stats_only {
                    out.line(&s.canonical_code())?;
                }
            }
            stats.attempts = sampler.attempts();
            stats.accepted = sampler.accepted();
            if out.format == Format::Csv {
                out.raw(&stats.to_csv())?;
            } else {
                let mut v = serde_json::to_value(&stats).map_err(|e| Error::Internal(e.to_string()))?;
                let (am, av) = stats.alpha();
                let (bm, bv) = stats.beta();
                let obj = v.as_object_mut().unwrap();
                obj.insert("alpha_mean".into(), json!(am));
                obj.insert("alpha_var".into(), json!(av));
                obj.insert("beta_mean".into(), json!(bm));
                obj.insert("beta_var".into(), json!(bv));
                obj.insert("table_digest".into(), json!(table.digest()));
                out.record(&v)?;
            }
        }
        Command::Fiber { arcs, input } => {
            let s = read_shape(&input)?;
            let n = count_fiber(&s, arcs)?;
            out.record(&json!({ "shape": s.canonical_code(), "arcs": arcs, "count": n }))?;
        }
    }
    Ok(())
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Input => 3,
        ErrorKind::Infeasible => 4,
        ErrorKind::Internal => 5,
    }
}

fn report(kind: &str, message: &str) {
    let record = json!({ "error": { "kind": kind, "message": message } });
    let _ = writeln!(io::stderr(), "{record}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report("usage", e.to_string().trim());
            return ExitCode::from(2);
        }
    };
    let stdout = io::stdout();
    let mut out = Out::new(cli.format, stdout.lock());
    let result = run(cli, &mut out).and_then(|()| out.finish());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // a closed pipe downstream is not an error of ours
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            let kind = match e.kind() {
                ErrorKind::Input => "input",
                ErrorKind::Infeasible => "infeasible",
                ErrorKind::Internal => "internal",
            };
            report(kind, &e.to_string());
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
