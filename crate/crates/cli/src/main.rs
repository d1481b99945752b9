use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use facesat::classify::face_feasible;
use facesat::cone::{enumerate_faces, face_normal, Cone, DEFAULT_FACE_BUDGET};
use facesat::construct::{construct_from_antichain, verify_construction, AntichainSpec};
use facesat::hilbert::hilbert_basis;
use facesat::matrix_file::{format_matrix, parse_matrix, write_matrix};
use facesat::pairtype::{pair_type, CellIndex};
use facesat::report::{report_from_analysis, Analysis, ReportOptions};
use facesat::semigroup::{Semigroup, Window, DEFAULT_POINT_BUDGET};
use facesat::{fixtures, Error, IntMat, IntVec};

#[derive(Parser)]
#[command(name = "facesat", version, about = "Saturation of the faces of an affine semigroup's cone")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[arg(long, global = true, default_value_t = DEFAULT_FACE_BUDGET)]
    face_budget: usize,

    /// Largest number of lattice points scanned in one box.
    #[arg(long, global = true, default_value_t = DEFAULT_POINT_BUDGET)]
    point_budget: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct Input {
    /// Bundled matrix: ex21, ex22, ex23 or t2222.
    #[arg(long, conflicts_with = "matrix")]
    fixture: Option<String>,

    /// Matrix file: "d n" then d rows of n integers; columns are generators.
    matrix: Option<PathBuf>,
}

#[derive(Args)]
struct WindowArgs {
    /// Box "x1..y1,x2..y2,…" in internal lattice coordinates.
    #[arg(long, conflicts_with = "grading_cap")]
    window: Option<String>,

    /// Points of the cone with grading (sum of facet normals) at most W.
    #[arg(long)]
    grading_cap: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Extreme rays and the generator columns on them.
    Rays(Input),
    /// Facet normals.
    Facets(Input),
    /// Face counts by dimension, optionally every face.
    Faces {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        list: bool,
    },
    /// Minimal Hilbert basis of the cone's lattice points.
    Hilbert(Input),
    /// Fundamental holes.
    H0(Input),
    /// Holes inside a window.
    Holes {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Semigroup membership of a point.
    Member {
        #[command(flatten)]
        input: Input,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Whether a point of the semigroup is a saturation point.
    Saturation {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Feasibility of one face system: target = Σ x_j a_j with x_j >= 0 off the face.
    Feasible {
        #[command(flatten)]
        input: Input,
        /// Face as comma-separated ray indices (empty for the apex).
        #[arg(long, allow_hyphen_values = true)]
        face: String,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
    },
    /// Full report: cone, Hilbert basis, holes and face classification.
    Classify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        window: WindowArgs,
        /// Include wall-clock timings of each stage.
        #[arg(long)]
        timing: bool,
    },
    /// Generators whose minimal almost saturated faces are the antichain.
    Construct {
        #[command(flatten)]
        input: Input,
        /// JSON array of ray index arrays, e.g. '[[0],[1]]', or a file holding one.
        #[arg(long)]
        antichain: String,
        /// Where to write the new matrix.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a construction; rebuilds it when --a-prime is not given.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Antichain as for construct.
        #[arg(long)]
        antichain: String,
        /// Matrix file with the generators to check.
        #[arg(long)]
        a_prime: Option<PathBuf>,
    },
    /// Type of a pair of 2x2x2x2 cells, given as "1122" labels or 1-based columns.
    Pairtype {
        a: String,
        b: String,
        /// Read A and B as column numbers 1..16.
        #[arg(long)]
        columns: bool,
    },
    /// Like classify, with windowed data and nowhere witnesses, optionally written to a file.
    Report {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        window: WindowArgs,
        /// Include wall-clock timings of each stage.
        #[arg(long)]
        timing: bool,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_antichain(arg: &str) -> Result<AntichainSpec, Error> {
    let path = std::path::Path::new(arg);
    if !arg.trim_start().starts_with('[') && path.is_file() {
        let text = std::fs::read_to_string(path)?;
        AntichainSpec::from_json(&text)
    } else {
        AntichainSpec::from_json(arg)
    }
}

struct Ctx {
    face_budget: usize,
    point_budget: u64,
}

fn load(input: &Input) -> Result<(String, IntMat), Error> {
    match (&input.fixture, &input.matrix) {
        (Some(name), _) => fixtures::by_name(name)
            .map(|m| (format!("fixture:{name}"), m))
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown fixture {name:?}; bundled: {}",
                    fixtures::NAMES.join(", ")
                ))
            }),
        (None, Some(path)) => Ok((path.display().to_string(), parse_matrix(path)?)),
        (None, None) => Err(Error::InvalidInput("give a matrix file or --fixture".into())),
    }
}

fn parse_vec(text: &str) -> Result<IntVec, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("not an integer: {t:?}")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(IntVec::new)
}

fn parse_window(w: &WindowArgs) -> Result<Option<Window>, Error> {
    match (&w.window, &w.grading_cap) {
        (Some(b), _) => Window::parse_box(b).map(Some),
        (None, Some(cap)) => cap
            .trim()
            .parse()
            .map(|c| Some(Window::GradingCap(c)))
            .map_err(|_| Error::InvalidInput(format!("bad grading cap {cap:?}"))),
        (None, None) => Ok(None),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

/// Internal coordinates of an input point; `None` off the generated lattice.
fn internal(cone: &Cone, x: &IntVec) -> Result<Option<IntVec>, Error> {
    if x.dim() != cone.transform().ambient_dim() {
        return Err(Error::InvalidInput(format!(
            "point has {} coordinates, expected {}",
            x.dim(),
            cone.transform().ambient_dim()
        )));
    }
    Ok(cone.transform().to_internal(x))
}

fn run(cli: &Cli) -> Result<Value, Error> {
    let ctx = Ctx {
        face_budget: cli.face_budget,
        point_budget: cli.point_budget,
    };
    match &cli.command {
        Command::Rays(input) => {
            let (_, a) = load(input)?;
            let cone = Cone::ingest(&a)?;
            let rays: Vec<Value> = cone
                .extreme_rays_original()
                .iter()
                .zip(cone.ray_generators())
                .map(|(r, g)| json!({"ray": r, "generators": g}))
                .collect();
            Ok(json!({"rays": rays}))
        }
        Command::Facets(input) => {
            let (_, a) = load(input)?;
            let cone = Cone::ingest(&a)?;
            let facets: Vec<Value> = cone
                .facet_normals_original()
                .iter()
                .enumerate()
                .map(|(f, n)| json!({"normal": n, "rays": cone.facet_rays(f).ones().collect::<Vec<_>>()}))
                .collect();
            Ok(json!({"facets": facets}))
        }
        Command::Faces { input, list } => {
            let (_, a) = load(input)?;
            let cone = Cone::ingest(&a)?;
            let poset = enumerate_faces(&cone, ctx.face_budget)?;
            let mut out = json!({"counts": to_value(&poset.counts_by_dim()), "total": poset.len()});
            if *list {
                let faces: Vec<Value> = poset
                    .faces()
                    .iter()
                    .map(|f| {
                        json!({
                            "rays": f.ray_set,
                            "generators": f.gen_idx,
                            "dim": f.dim,
                            "facets": f.facet_set,
                            "normal": cone.transform().functional_to_original(&face_normal(&cone, f)),
                        })
                    })
                    .collect();
                out["faces"] = Value::Array(faces);
            }
            Ok(out)
        }
        Command::Hilbert(input) => {
            let (_, a) = load(input)?;
            let cone = Cone::ingest(&a)?;
            let b = hilbert_basis(&cone);
            let elems: Vec<IntVec> = b.elements().iter().map(|x| cone.transform().to_original(x)).collect();
            Ok(json!({"size": elems.len(), "hilbert_basis": elems}))
        }
        Command::H0(input) => {
            let (_, a) = load(input)?;
            let sg = Semigroup::from_generators(&a)?;
            let h0 = sg.fundamental_holes(ctx.point_budget)?;
            let holes: Vec<IntVec> = h0.holes.iter().map(|x| sg.cone().transform().to_original(x)).collect();
            Ok(json!({"size": holes.len(), "fundamental_holes": holes}))
        }
        Command::Holes { input, window } => {
            let (_, a) = load(input)?;
            let w = parse_window(window)?
                .ok_or_else(|| Error::InvalidInput("holes needs --window or --grading-cap".into()))?;
            let sg = Semigroup::from_generators(&a)?;
            let holes: Vec<IntVec> = sg
                .holes_in_window(&w, ctx.point_budget)?
                .iter()
                .map(|x| sg.cone().transform().to_original(x))
                .collect();
            Ok(json!({"size": holes.len(), "holes": holes}))
        }
        Command::Member { input, point } => {
            let (_, a) = load(input)?;
            let x = parse_vec(point)?;
            let sg = Semigroup::from_generators(&a)?;
            let combo = internal(sg.cone(), &x)?.and_then(|y| sg.member_q(&y));
            Ok(json!({"point": x, "member": combo.is_some(), "combination": combo}))
        }
        Command::Saturation { input, point } => {
            let (_, a) = load(input)?;
            let x = parse_vec(point)?;
            let sg = Semigroup::from_generators(&a)?;
            let y = internal(sg.cone(), &x)?.ok_or_else(|| Error::NotInSemigroup(x.to_string()))?;
            let h0 = sg.fundamental_holes(ctx.point_budget)?;
            let sat = sg.is_saturation_point(&h0, &y)?;
            Ok(json!({"point": x, "saturation_point": sat, "fundamental_holes": h0.len()}))
        }
        Command::Feasible { input, face, target } => {
            let (_, a) = load(input)?;
            let sg = Semigroup::from_generators(&a)?;
            let poset = enumerate_faces(sg.cone(), ctx.face_budget)?;
            let rays: Vec<usize> = if face.trim().is_empty() {
                Vec::new()
            } else {
                face.split(',')
                    .map(|t| t.trim().parse().map_err(|_| Error::InvalidInput(format!("bad ray index {t:?}"))))
                    .collect::<Result<_, _>>()?
            };
            let id = poset.find(&rays).ok_or_else(|| Error::UnknownFace(rays.clone()))?;
            let t = parse_vec(target)?;
            let y = internal(sg.cone(), &t)?
                .ok_or_else(|| Error::InvalidInput(format!("{t} is outside the generated lattice")))?;
            let r = face_feasible(&sg, poset.face(id), &y);
            Ok(json!({"face": rays, "target": t, "status": to_value(&r.status), "witness": r.witness}))
        }
        Command::Classify { input, window, timing } => {
            let (source, a) = load(input)?;
            let opts = report_options(&ctx, input, window, *timing)?;
            let an = Analysis::run(&a, ctx.face_budget)?;
            Ok(to_value(&report_from_analysis(&source, &an, &opts)?))
        }
        Command::Report {
            input,
            window,
            timing,
            out,
        } => {
            let (source, a) = load(input)?;
            let opts = report_options(&ctx, input, window, *timing)?;
            let an = Analysis::run(&a, ctx.face_budget)?;
            let doc = report_from_analysis(&source, &an, &opts)?;
            if let Some(path) = out {
                std::fs::write(path, doc.to_json() + "\n")?;
                return Ok(json!({"written": path.display().to_string()}));
            }
            Ok(to_value(&doc))
        }
        Command::Construct { input, antichain, out } => {
            let (_, a) = load(input)?;
            let spec = read_antichain(antichain)?;
            let cone = Cone::ingest(&a)?;
            let poset = enumerate_faces(&cone, ctx.face_budget)?;
            let basis = hilbert_basis(&cone);
            let c = construct_from_antichain(&cone, &poset, &basis, &spec)?;
            let t = cone.transform();
            let cols: Vec<IntVec> = c.a_prime.columns().iter().map(|x| t.to_original(x)).collect();
            let m = IntMat::from_columns(t.ambient_dim(), &cols);
            let mut outv = json!({
                "antichain": spec.faces,
                "b_stars": c.b_stars.iter().map(|x| t.to_original(x)).collect::<Vec<_>>(),
                "columns": cols,
                "provenance": to_value(&c.provenance),
            });
            match out {
                Some(path) => {
                    write_matrix(path, &m)?;
                    outv["written"] = json!(path.display().to_string());
                }
                None => outv["matrix"] = json!(format_matrix(&m)),
            }
            Ok(outv)
        }
        Command::Verify {
            input,
            antichain,
            a_prime,
        } => {
            let (_, a) = load(input)?;
            let spec = read_antichain(antichain)?;
            let cone = Cone::ingest(&a)?;
            let poset = enumerate_faces(&cone, ctx.face_budget)?;
            let basis = hilbert_basis(&cone);
            let m = match a_prime {
                Some(path) => {
                    let m = parse_matrix(path)?;
                    let cols = m
                        .columns()
                        .iter()
                        .map(|x| {
                            internal(&cone, x)?.ok_or_else(|| {
                                Error::VerificationFailed(format!(
                                    "lattice: column {x} is outside the lattice of the cone"
                                ))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    IntMat::from_columns(cone.dim(), &cols)
                }
                None => construct_from_antichain(&cone, &poset, &basis, &spec)?.a_prime,
            };
            let r = verify_construction(&cone, &poset, &basis, &spec, &m, ctx.point_budget)?;
            let mut v = to_value(&r);
            v["passed"] = json!(true);
            Ok(v)
        }
        Command::Pairtype { a, b, columns } => {
            let (x, y) = if *columns {
                let col = |s: &str| -> Result<usize, Error> {
                    match s.trim().parse::<usize>() {
                        Ok(c) if c >= 1 => Ok(c - 1),
                        _ => Err(Error::InvalidInput(format!("bad 1-based column {s:?}"))),
                    }
                };
                (CellIndex::from_column(col(a)?)?, CellIndex::from_column(col(b)?)?)
            } else {
                (CellIndex::parse(a)?, CellIndex::parse(b)?)
            };
            let t = pair_type(x, y)?;
            Ok(json!({"a": x.to_string(), "b": y.to_string(), "type": t.label()}))
        }
    }
}

fn report_options(ctx: &Ctx, input: &Input, window: &WindowArgs, timing: bool) -> Result<ReportOptions, Error> {
    Ok(ReportOptions {
        face_budget: ctx.face_budget,
        point_budget: ctx.point_budget,
        window: parse_window(window)?,
        pair_types: input.fixture.as_deref() == Some("t2222"),
        timing,
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::InvalidInput(_)
        | Error::Io(_)
        | Error::UnknownFace(_)
        | Error::NotAnAntichain { .. }
        | Error::SameCell => 2,
        Error::ZeroGenerator(_)
        | Error::NotPointed
        | Error::NoGenerators
        | Error::UnboundedSearch
        | Error::NotInSemigroup(_)
        | Error::EmptyFaceBasis(_)
        | Error::NotNowhereSaturated(_) => 3,
        Error::FaceBudgetExceeded { .. } | Error::WindowTooLarge { .. } | Error::NoWitnessInWindow(_) => 4,
        Error::VerificationFailed(_) => 5,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::ZeroGenerator(_) => "ZeroGenerator",
        Error::NotPointed => "NotPointed",
        Error::NoGenerators => "NoGenerators",
        Error::FaceBudgetExceeded { .. } => "FaceBudgetExceeded",
        Error::WindowTooLarge { .. } => "WindowTooLarge",
        Error::UnboundedSearch => "UnboundedSearch",
        Error::NotInSemigroup(_) => "NotInSemigroup",
        Error::EmptyFaceBasis(_) => "EmptyFaceBasis",
        Error::NotAnAntichain { .. } => "NotAnAntichain",
        Error::UnknownFace(_) => "UnknownFace",
        Error::NotNowhereSaturated(_) => "NotNowhereSaturated",
        Error::NoWitnessInWindow(_) => "NoWitnessInWindow",
        Error::VerificationFailed(_) => "VerificationFailed",
        Error::SameCell => "SameCell",
        Error::Parse { .. } => "ParseError",
        Error::InvalidInput(_) => "InvalidInput",
        Error::Io(_) => "Io",
    }
}

fn error_json(e: &Error) -> Value {
    let mut v = json!({
        "kind": error_kind(e),
        "message": e.to_string(),
        "exit_code": exit_code(e),
    });
    if let Error::Parse { line, column, .. } = e {
        v["line"] = json!(line);
        v["column"] = json!(column);
    }
    json!({ "error": v })
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_scalar_or_flat(x) {
                    out.push_str(&format!("{pad}{k}: {}\n", flat(x)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(x, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_scalar_or_flat(x) {
                    out.push_str(&format!("{pad}- {}\n", flat(x)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(x, indent + 1, out);
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", flat(other))),
    }
}

fn is_scalar_or_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_object() && !x.is_array()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn flat(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(items) => format!("({})", items.iter().map(flat).collect::<Vec<_>>().join(",")),
        other => other.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}", error_json(&Error::InvalidInput(e.to_string())));
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(v) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&v).expect("serializable")),
                Format::Text => {
                    let mut s = String::new();
                    render_text(&v, 0, &mut s);
                    print!("{s}");
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&error_json(&e)).expect("serializable"));
            ExitCode::from(exit_code(&e))
        }
    }
}
