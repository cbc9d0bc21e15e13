use std::f64::consts::TAU;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use planecode::mesh_io::{emit_obj, emit_stl_binary};
use planecode::polygonize::{boundary_planes_for_part, polygonize_part};
use planecode::simplify::simplify_segmented;
use planecode::{
    decode_convex, decode_segmented, default_eps, drop_small_faces, encode_convex,
    encode_segmented, load_mesh, merge_near_parallel, read_code, segment_mesh, storage_report,
    write_code, Code, ConvexError, MeshFormat, OrientedPlane, PartCode, PartKind, PlaneAdjacency,
    PlaneSet, SegmentedCode, SimplifyParams, SphericalDirection, TriangleMesh,
};

#[derive(Parser)]
#[command(
    name = "planecode",
    version,
    about = "Plane-based coding of polyhedral meshes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a mesh (OBJ or STL) as a .plnc plane code.
    Encode {
        input: PathBuf,
        output: PathBuf,
        /// Absolute tolerance; defaults to 1e-7 times the bounding-box diagonal.
        #[arg(long)]
        eps: Option<f64>,
        /// List the planes.
        #[arg(long, short)]
        verbose: bool,
        /// Show angles in degrees.
        #[arg(long)]
        degrees: bool,
    },
    /// Rebuild a mesh from a .plnc file.
    Decode {
        input: PathBuf,
        output: PathBuf,
        /// Output format; guessed from the output extension when omitted.
        #[arg(long, value_enum)]
        format: Option<OutFormat>,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Print the pseudo-convex / pseudo-concave parts of a mesh.
    Segment {
        input: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Drop planes with small faces and merge nearly parallel neighbours.
    Simplify {
        input: PathBuf,
        output: PathBuf,
        /// Minimum face area to keep.
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Merge angle in degrees.
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, short)]
        verbose: bool,
        #[arg(long)]
        degrees: bool,
    },
    /// Compare plane-code storage with indexed-mesh storage.
    Stats {
        mesh: PathBuf,
        /// Existing code for the mesh; encoded on the fly when omitted.
        code: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        /// Also compare against an indexed quad mesh.
        #[arg(long)]
        quad_accounting: bool,
        /// One key=value pair per line.
        #[arg(long)]
        machine: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Obj,
    Stl,
}

enum Failure {
    Parse(String, String),
    Geometry(String, String),
    Format(String, String),
}

impl Failure {
    fn parse(e: impl fmt::Debug + fmt::Display) -> Self {
        Failure::Parse(name_of(&e), e.to_string())
    }

    fn geometry(e: impl fmt::Debug + fmt::Display) -> Self {
        Failure::Geometry(name_of(&e), e.to_string())
    }

    fn format(e: impl fmt::Debug + fmt::Display) -> Self {
        Failure::Format(name_of(&e), e.to_string())
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Parse("IoError".into(), format!("{}: {e}", path.display()))
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Parse(..) => 2,
            Failure::Geometry(..) => 3,
            Failure::Format(..) => 4,
        }
    }
}

// Variant name of an error enum, taken from its Debug form.
fn name_of(e: &impl fmt::Debug) -> String {
    let s = format!("{e:?}");
    let s = s
        .strip_prefix("Segmentation(")
        .or_else(|| s.strip_prefix("Convex("))
        .or_else(|| s.strip_prefix("Geom("))
        .or_else(|| s.strip_prefix("Decode("))
        .unwrap_or(&s);
    s.split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or("")
        .to_string()
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::io(path, e))
}

fn load(path: &Path) -> Result<TriangleMesh, Failure> {
    let bytes = read(path)?;
    let format = MeshFormat::detect(&path.to_string_lossy(), &bytes).ok_or_else(|| {
        Failure::Parse(
            "UnknownMeshFormat".into(),
            format!("{}: expected a .obj or .stl file", path.display()),
        )
    })?;
    load_mesh(&bytes, format).map_err(Failure::parse)
}

fn load_code(path: &Path) -> Result<Code, Failure> {
    read_code(&read(path)?).map_err(Failure::format)
}

fn check_eps(eps: Option<f64>) -> Result<Option<f64>, Failure> {
    match eps {
        Some(e) if !(e > 0.0 && e.is_finite()) => Err(Failure::Parse(
            "InvalidEps".into(),
            format!("--eps {e} must be positive"),
        )),
        _ => Ok(eps),
    }
}

fn encode(mesh: &TriangleMesh, eps: f64) -> Result<Code, Failure> {
    let code = match encode_convex(mesh, eps) {
        Ok(set) => Code::Convex(set),
        Err(ConvexError::NotConvex { .. } | ConvexError::NotClosed { .. }) => {
            Code::Segmented(encode_segmented(mesh, eps).map_err(Failure::geometry)?)
        }
        Err(e) => return Err(Failure::geometry(e)),
    };
    Ok(snap(&code))
}

/// Flushes values that are rounding noise at single precision to zero: offsets
/// below `2⁻²⁴ ×` the largest offset, and angles within `2⁻²⁴` of 0 or 2π.
/// Without this a decoded mesh re-encodes to a different file.
fn snap(code: &Code) -> Code {
    let tiny = f64::from(f32::EPSILON) / 2.0;
    let scale = all_planes(code)
        .iter()
        .fold(0.0f64, |m, p| m.max(p.h().abs()));
    let angle = |a: f64| if a < tiny || a > TAU - tiny { 0.0 } else { a };
    let plane = |p: &OrientedPlane| {
        let d = p.direction();
        let h = if p.h().abs() < tiny * scale {
            0.0
        } else {
            p.h()
        };
        let nu = angle(d.nu());
        let pole = nu == 0.0 || nu > std::f64::consts::PI - tiny;
        SphericalDirection::new(nu, if pole { 0.0 } else { angle(d.phi()) })
            .ok()
            .and_then(|d| OrientedPlane::new(d, h).ok())
            .unwrap_or(*p)
    };
    let set = |s: &PlaneSet| -> PlaneSet { s.iter().map(plane).collect() };
    match code {
        Code::Convex(s) => Code::Convex(set(s).canonical()),
        Code::Segmented(seg) => Code::Segmented(
            SegmentedCode::new(
                seg.parts()
                    .iter()
                    .map(|p| PartCode {
                        kind: p.kind,
                        face_planes: set(&p.face_planes),
                        boundary_planes: set(&p.boundary_planes),
                    })
                    .collect(),
            )
            .expect("same part count"),
        ),
    }
}

fn all_planes(code: &Code) -> Vec<OrientedPlane> {
    match code {
        Code::Convex(set) => set.planes().to_vec(),
        Code::Segmented(seg) => seg
            .parts()
            .iter()
            .flat_map(|p| {
                p.face_planes
                    .iter()
                    .chain(p.boundary_planes.iter())
                    .copied()
            })
            .collect(),
    }
}

// Tolerance for codes read from disk, whose values carry f32 rounding.
fn code_eps(code: &Code) -> f64 {
    let scale = all_planes(code)
        .iter()
        .fold(0.0f64, |m, p| m.max(p.h().abs()));
    if scale > 0.0 {
        1e-5 * scale
    } else {
        1e-12
    }
}

fn describe(code: &Code) -> String {
    match code {
        Code::Convex(set) => format!("convex code, {} planes", set.len()),
        Code::Segmented(seg) => {
            let cuts: usize = seg.parts().iter().map(|p| p.boundary_planes.len()).sum();
            format!(
                "segmented code, {} parts, {} planes ({} face + {} boundary)",
                seg.parts().len(),
                seg.plane_count(),
                seg.plane_count() - cuts,
                cuts
            )
        }
    }
}

fn list_planes(code: &Code, degrees: bool) {
    for p in all_planes(code) {
        if degrees {
            let (nu, phi, h) = p.to_degree_triplet();
            println!("({nu:.6}, {phi:.6}, {h})");
        } else {
            let d = p.direction();
            println!("({:.9}, {:.9}, {})", d.nu(), d.phi(), p.h());
        }
    }
}

fn kind_name(kind: PartKind) -> &'static str {
    match kind {
        PartKind::PseudoConvex => "pseudo-convex",
        PartKind::PseudoConcave => "pseudo-concave",
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Encode {
            input,
            output,
            eps,
            verbose,
            degrees,
        } => {
            let mesh = load(&input)?;
            let eps = check_eps(eps)?.unwrap_or_else(|| default_eps(&mesh));
            let code = encode(&mesh, eps)?;
            let bytes = write_code(&code);
            write(&output, &bytes)?;
            println!("{}: {} bytes", describe(&code), bytes.len());
            if verbose {
                list_planes(&code, degrees);
            }
        }
        Command::Decode {
            input,
            output,
            format,
            eps,
        } => {
            let code = load_code(&input)?;
            let eps = check_eps(eps)?.unwrap_or_else(|| code_eps(&code));
            let mesh = match &code {
                Code::Convex(set) => decode_convex(set, eps)
                    .map_err(Failure::geometry)?
                    .polyhedron
                    .to_mesh(),
                Code::Segmented(seg) => decode_segmented(seg, eps).map_err(Failure::geometry)?,
            };
            let stl = match format {
                Some(f) => matches!(f, OutFormat::Stl),
                None => output
                    .to_string_lossy()
                    .to_ascii_lowercase()
                    .ends_with(".stl"),
            };
            write(
                &output,
                &if stl {
                    emit_stl_binary(&mesh)
                } else {
                    emit_obj(&mesh)
                },
            )?;
            println!(
                "{} vertices, {} triangles",
                mesh.vertex_count(),
                mesh.triangle_count()
            );
        }
        Command::Segment { input, eps } => {
            let mesh = load(&input)?;
            let eps = check_eps(eps)?.unwrap_or_else(|| default_eps(&mesh));
            let parts = segment_mesh(&mesh, eps).map_err(Failure::geometry)?;
            println!(
                "{:>4}  {:<15} {:>9} {:>11} {:>14}",
                "part", "kind", "triangles", "face_planes", "boundary_planes"
            );
            for (k, part) in parts.iter().enumerate() {
                let faces = polygonize_part(&mesh, part, eps)
                    .map(|f| f.len().to_string())
                    .unwrap_or_else(|e| name_of(&e));
                let cuts = boundary_planes_for_part(&mesh, part, eps)
                    .map(|c| c.len().to_string())
                    .unwrap_or_else(|e| name_of(&e));
                println!(
                    "{:>4}  {:<15} {:>9} {:>11} {:>14}",
                    k,
                    kind_name(part.kind),
                    part.triangles.len(),
                    faces,
                    cuts
                );
            }
        }
        Command::Simplify {
            input,
            output,
            delta,
            tau,
            eps,
            verbose,
            degrees,
        } => {
            let params = SimplifyParams::new(delta, tau.to_radians())
                .map_err(|e| Failure::Parse("InvalidParams".into(), e.to_string()))?;
            let code = load_code(&input)?;
            let eps = check_eps(eps)?.unwrap_or_else(|| code_eps(&code));
            let before = code.plane_count();
            let out = match &code {
                Code::Convex(set) => Code::Convex(simplify_convex(set, params, eps)?),
                Code::Segmented(seg) => Code::Segmented(
                    simplify_segmented(seg, params, eps).map_err(Failure::geometry)?,
                ),
            };
            let out = snap(&out);
            write(&output, &write_code(&out))?;
            println!("planes: {before} -> {}", out.plane_count());
            if verbose {
                list_planes(&out, degrees);
            }
        }
        Command::Stats {
            mesh,
            code,
            eps,
            quad_accounting,
            machine,
        } => {
            let m = load(&mesh)?;
            let code = match code {
                Some(path) => load_code(&path)?,
                None => encode(&m, check_eps(eps)?.unwrap_or_else(|| default_eps(&m)))?,
            };
            let mut report = storage_report(&m, &code);
            if !quad_accounting {
                report.quads = None;
                report.quad_bytes = None;
            }
            if machine {
                print!("{}", report.to_key_values());
            } else {
                println!("{report}");
            }
        }
    }
    Ok(())
}

fn simplify_convex(set: &PlaneSet, params: SimplifyParams, eps: f64) -> Result<PlaneSet, Failure> {
    let mut out = set.clone();
    if params.delta > 0.0 {
        out = drop_small_faces(&out, params, eps).map_err(Failure::geometry)?;
    }
    if params.tau > 0.0 {
        let adj = PlaneAdjacency::of_code(&out, eps).map_err(Failure::geometry)?;
        out = merge_near_parallel(&out, &adj, params);
        decode_convex(&out, eps).map_err(Failure::geometry)?;
    }
    Ok(out)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = f.code();
            let (Failure::Parse(name, msg)
            | Failure::Geometry(name, msg)
            | Failure::Format(name, msg)) = f;
            eprintln!("error: {name}: {msg}");
            ExitCode::from(code)
        }
    }
}
