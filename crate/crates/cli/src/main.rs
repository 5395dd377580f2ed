//! Command-line surface: stencil selection demos (`select`), exhaustive
//! unisolvence sweeps (`sweep`), and mesh convergence studies (`converge`).
//!
//! Exit codes: 0 success, 2 usage error, 3 stencil/solver failure.

#![allow(clippy::needless_range_loop)] // explicit indices read better here

use clap::{Args, Parser, Subcommand};
use cutstencil::ebm::{
    manufactured_case, no_interface_case, observed_orders, solve_and_measure_threaded, MeshRun,
};
use cutstencil::formats::{
    parse_config, parse_mask_file, write_coo_system, OutputFormat, RunConfig,
};
use cutstencil::grid::{Direction, GridIndex};
use cutstencil::interp::{assemble_vandermonde, LocalFrame, MonomialBasis, Point};
use cutstencil::oracle::{
    enumerate_improved_2d, enumerate_improved_3d_threaded, enumerate_original_2d, summarize,
    write_csv, ConfigReport,
};
use cutstencil::stencil::{
    select_2d_cubic, select_2d_quadratic, select_3d_quadratic, SelectionChoices, StencilSelection,
};
use std::fmt::Write as _;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cutstencil",
    about = "Cartesian-grid stencil selection, unisolvence sweeps, and an embedded-boundary convergence study",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select an interpolation stencil and print it with its Vandermonde
    /// determinant and condition number (unit-spacing local frame)
    Select(SelectArgs),
    /// Enumerate every configuration of a selection algorithm and classify
    /// each by its exact integer determinant
    Sweep(SweepArgs),
    /// Run the manufactured elliptic-interface convergence study
    Converge(ConvergeArgs),
}

#[derive(Args)]
struct SelectArgs {
    /// Spatial dimension (2 or 3)
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Polynomial degree (2, or 3 in 2D)
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// Center index, e.g. "5,5" or "5,5,5"
    #[arg(long)]
    center: Option<String>,
    /// Whitelist mask file: one available `i j [k]` index per line
    #[arg(long)]
    mask_file: Option<String>,
    /// Preferred step-3 direction (west|east|south|north|down|up)
    #[arg(long)]
    prefer: Option<String>,
    /// Preferred first-layer face direction (3D)
    #[arg(long)]
    prefer_face: Option<String>,
    /// Preferred second-layer plane direction (3D)
    #[arg(long)]
    prefer_plane: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    /// improved2d | improved3d | original2d
    #[arg(long)]
    algorithm: String,
    /// Report file (CSV: id, choice, det, condition, singular)
    #[arg(long)]
    out: String,
    /// Worker threads for the enumeration
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Comma-separated mesh sizes, ascending (cells per axis, ≥ 4)
    #[arg(long)]
    meshes: Option<String>,
    /// Config file with `key = value` lines
    /// (keys: meshes, tol, max_iter, format, out, threads)
    #[arg(long)]
    config: Option<String>,
    /// Relative residual tolerance for the linear solver
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap for the linear solver
    #[arg(long)]
    max_iter: Option<usize>,
    /// Output format: csv | json
    #[arg(long)]
    format: Option<String>,
    /// Output file for the convergence table (stdout table always printed)
    #[arg(long)]
    out: Option<String>,
    /// Worker threads for assembly
    #[arg(long)]
    threads: Option<usize>,
    /// Solve the smooth no-interface sanity problem instead of the sphere
    #[arg(long, default_value_t = false)]
    no_interface: bool,
    /// Dump each mesh's sparse system in coordinate text format to
    /// `<path>.n<mesh>.coo`
    #[arg(long)]
    dump_system: Option<String>,
}

fn main() -> ExitCode {
    // die quietly when stdout is a closed pipe (e.g. `cutstencil sweep | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: msg.into(),
        }
    }

    fn failure(msg: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: msg.into(),
        }
    }

    fn io(e: std::io::Error) -> Self {
        CliError {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Select(args) => cmd_select(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Converge(args) => cmd_converge(args),
    }
}

fn parse_direction(s: &str) -> Result<Direction, CliError> {
    Direction::parse(s).ok_or_else(|| {
        CliError::usage(format!(
            "unknown direction {s:?} (expected west|east|south|north|down|up)"
        ))
    })
}

fn parse_center<const D: usize>(s: Option<&str>) -> Result<GridIndex<D>, CliError> {
    let Some(s) = s else {
        return Ok(GridIndex([5i64; D]));
    };
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != D {
        return Err(CliError::usage(format!(
            "center {s:?} must have {D} components"
        )));
    }
    let mut out = [0i64; D];
    for (a, p) in parts.iter().enumerate() {
        out[a] = p
            .trim()
            .parse()
            .map_err(|e| CliError::usage(format!("bad center component {p:?}: {e}")))?;
    }
    Ok(GridIndex(out))
}

fn print_selection<const D: usize>(sel: &StencilSelection<D>) {
    println!(
        "degree {} selection, {} nodes:",
        sel.degree,
        sel.nodes.len()
    );
    for (k, n) in sel.nodes.iter().enumerate() {
        println!("  node {k}: {n}");
    }
    match &sel.choices {
        SelectionChoices::Quad2(c) => println!(
            "choices: pair start {} on the 8-ring; line {}; subset {:?}",
            c.pair_start,
            c.line_dir.name(),
            c.line_subset
        ),
        SelectionChoices::Quad3(c) => println!(
            "choices: face {}, face pair start {}; plane {}; in-plane line {}, pair {}, subset {:?}",
            c.face_dir.name(),
            c.face_pair_start,
            c.plane_dir.name(),
            c.in_plane.line_dir.name(),
            c.in_plane.pair_start,
            c.in_plane.line_subset
        ),
        SelectionChoices::Cubic2(c) => println!(
            "choices: quad pair start {}, line {}, subset {:?}; cubic line {}, subset {:?}",
            c.quad.pair_start,
            c.quad.line_dir.name(),
            c.quad.line_subset,
            c.cubic_dir.name(),
            c.cubic_subset
        ),
    }
    let points: Vec<Point> = sel
        .nodes
        .iter()
        .map(|n| {
            let mut p = [0.0; 3];
            for a in 0..D {
                p[a] = n.0[a] as f64;
            }
            p
        })
        .collect();
    let mut origin = [0.0; 3];
    for a in 0..D {
        origin[a] = sel.local_origin.0[a] as f64;
    }
    let basis = MonomialBasis::new(D, sel.degree);
    let frame = LocalFrame::new(origin, 1.0);
    let v = assemble_vandermonde(&points, &basis, &frame);
    println!(
        "local-frame |det| = {:.6e}",
        cutstencil::dense::det(&v).abs()
    );
    println!(
        "condition        = {:.6e}",
        cutstencil::dense::condition_1(&v)
    );
}

fn cmd_select(args: SelectArgs) -> Result<(), CliError> {
    let mask = match &args.mask_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(CliError::io)?;
            Some(parse_mask_file(&text).map_err(|e| CliError::usage(format!("{path}: {e}")))?)
        }
        None => None,
    };
    let prefer = args.prefer.as_deref().map(parse_direction).transpose()?;
    let no_stencil =
        || CliError::failure("NoStencil: no direction/pair/subset combination is fully available");

    match (args.dim, args.degree) {
        (2, deg @ (2 | 3)) => {
            if let Some(m) = &mask {
                if m.dim == 3 {
                    return Err(CliError::usage("mask file is 3D but --dim is 2"));
                }
            }
            let center = parse_center::<2>(args.center.as_deref())?;
            let available = |i: GridIndex<2>| mask.as_ref().is_none_or(|m| m.contains2(i));
            let sel = if deg == 2 {
                select_2d_quadratic(center, &available, prefer)
            } else {
                select_2d_cubic(center, &available, prefer)
            }
            .map_err(|_| no_stencil())?;
            print_selection(&sel);
        }
        (3, 2) => {
            if let Some(m) = &mask {
                if m.dim == 2 {
                    return Err(CliError::usage("mask file is 2D but --dim is 3"));
                }
            }
            let center = parse_center::<3>(args.center.as_deref())?;
            let available = |i: GridIndex<3>| mask.as_ref().is_none_or(|m| m.contains3(i));
            let face = args
                .prefer_face
                .as_deref()
                .map(parse_direction)
                .transpose()?;
            let plane = match args.prefer_plane.as_deref() {
                Some(s) => Some(parse_direction(s)?),
                None => prefer,
            };
            let sel =
                select_3d_quadratic(center, &available, face, plane).map_err(|_| no_stencil())?;
            print_selection(&sel);
        }
        (3, 3) => return Err(CliError::usage("degree 3 is supported in 2D only")),
        (d, g) => {
            return Err(CliError::usage(format!(
                "unsupported --dim {d} --degree {g}"
            )))
        }
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    if args.threads == 0 {
        return Err(CliError::usage("--threads must be ≥ 1"));
    }
    let reports: Vec<ConfigReport> = match args.algorithm.as_str() {
        "improved2d" => enumerate_improved_2d(),
        "improved3d" => enumerate_improved_3d_threaded(args.threads),
        "original2d" => enumerate_original_2d(),
        other => {
            return Err(CliError::usage(format!(
                "unknown algorithm {other:?} (improved2d|improved3d|original2d)"
            )))
        }
    };
    let file = std::fs::File::create(&args.out).map_err(CliError::io)?;
    write_csv(std::io::BufWriter::new(file), &reports).map_err(CliError::io)?;
    let s = summarize(&reports);
    println!("{} configurations, {} singular", s.count, s.singular);
    println!(
        "min |det| over non-singular = {:.6e}, max condition = {:.6e}",
        s.min_abs_det, s.max_condition
    );
    if s.singular > 0 {
        println!("singular configurations:");
        for r in reports.iter().filter(|r| r.singular) {
            let nodes: Vec<String> = r
                .nodes
                .iter()
                .map(|n| format!("({},{})", n[0], n[1]))
                .collect();
            println!("  id {}: {} nodes {}", r.id, r.choice, nodes.join(" "));
        }
    }
    println!("report written to {}", args.out);
    Ok(())
}

fn effective_config(args: &ConvergeArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(CliError::io)?;
            parse_config(&text).map_err(|e| CliError::usage(format!("{path}: {e}")))?
        }
        None => RunConfig::default(),
    };
    if let Some(meshes) = &args.meshes {
        let mut parsed = Vec::new();
        for part in meshes.split(',') {
            let n: usize = part
                .trim()
                .parse()
                .map_err(|e| CliError::usage(format!("bad mesh size {part:?}: {e}")))?;
            if n < 4 {
                return Err(CliError::usage(format!("mesh size {n} < 4")));
            }
            parsed.push(n);
        }
        cfg.meshes = Some(parsed);
    }
    if let Some(tol) = args.tol {
        if tol.is_nan() || tol <= 0.0 {
            return Err(CliError::usage("tol must be > 0"));
        }
        cfg.tol = Some(tol);
    }
    if let Some(mi) = args.max_iter {
        cfg.max_iter = Some(mi);
    }
    if let Some(f) = &args.format {
        cfg.format = Some(
            OutputFormat::parse(f)
                .ok_or_else(|| CliError::usage(format!("format {f:?} is not csv|json")))?,
        );
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    if let Some(t) = args.threads {
        if t == 0 {
            return Err(CliError::usage("--threads must be ≥ 1"));
        }
        cfg.threads = Some(t);
    }
    if let Some(meshes) = &cfg.meshes {
        if meshes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::usage("mesh sizes must be ascending"));
        }
    }
    Ok(cfg)
}

fn format_order(o: Option<f64>) -> String {
    o.map_or(String::new(), |v| format!("{v:.3}"))
}

fn render_csv(rows: &[(MeshRun, Option<f64>)]) -> String {
    let mut out = String::from("mesh,linf_error,order,iterations,seconds\n");
    for (run, order) in rows {
        let _ = writeln!(
            out,
            "{},{:e},{},{},{:.3}",
            run.n,
            run.linf_error,
            format_order(*order),
            run.iterations,
            run.seconds
        );
    }
    out
}

fn render_json(case: &str, tol: f64, max_iter: usize, rows: &[(MeshRun, Option<f64>)]) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\n  \"case\": \"{case}\",\n  \"tol\": {tol:e},\n  \"max_iter\": {max_iter},\n  \"rows\": ["
    );
    for (k, (run, order)) in rows.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        let order_json = order.map_or("null".to_string(), |v| format!("{v:.6}"));
        let _ = write!(
            out,
            "\n    {{\"mesh\": {}, \"h\": {:e}, \"linf_error\": {:e}, \"order\": {}, \"iterations\": {}, \"seconds\": {:.3}, \"residual\": {:e}, \"unknowns\": {}, \"degraded\": {}}}",
            run.n,
            run.h,
            run.linf_error,
            order_json,
            run.iterations,
            run.seconds,
            run.residual,
            run.unknowns,
            run.log.degraded.len()
        );
    }
    out.push_str("\n  ]\n}\n");
    out
}

fn cmd_converge(args: ConvergeArgs) -> Result<(), CliError> {
    let cfg = effective_config(&args)?;
    let meshes = cfg
        .meshes
        .clone()
        .ok_or_else(|| CliError::usage("no meshes given (--meshes or config file)"))?;
    let tol = cfg.tol.unwrap_or(1e-10);
    let max_iter = cfg.max_iter.unwrap_or(50_000);
    let threads = cfg.threads.unwrap_or(1);
    let format = cfg.format.unwrap_or(OutputFormat::Csv);

    let case_name = if args.no_interface {
        "no-interface"
    } else {
        "sphere-interface"
    };
    let mut rows: Vec<(MeshRun, Option<f64>)> = Vec::new();
    println!("mesh      L_inf error     order   iterations   seconds");
    for &n in &meshes {
        let case = if args.no_interface {
            no_interface_case(n)
        } else {
            manufactured_case(n)
        };
        let run = match solve_and_measure_threaded(&case, tol, max_iter, threads) {
            Ok(run) => run,
            Err(e) => {
                // flush the partial table before aborting
                flush_table(cfg.out.as_deref(), case_name, tol, max_iter, format, &rows)?;
                return Err(CliError::failure(format!("mesh {n}: {e}")));
            }
        };
        let order = rows
            .last()
            .map(|(prev, _)| (prev.linf_error / run.linf_error).log2());
        println!(
            "{:<9} {:<15.8e} {:<7} {:<12} {:.3}",
            format!("{n}^3"),
            run.linf_error,
            format_order(order),
            run.iterations,
            run.seconds
        );
        if let Some(dump) = &args.dump_system {
            let path = format!("{dump}.n{n}.coo");
            std::fs::write(&path, write_coo_system(&run.system)).map_err(CliError::io)?;
            println!("  system dumped to {path}");
        }
        rows.push((run, order));
    }
    let errors: Vec<f64> = rows.iter().map(|(r, _)| r.linf_error).collect();
    if errors.len() > 1 {
        let orders = observed_orders(&errors);
        let avg = orders.iter().sum::<f64>() / orders.len() as f64;
        let rendered: Vec<String> = orders.iter().map(|o| format!("{o:.3}")).collect();
        println!(
            "observed orders: [{}] (average {avg:.3})",
            rendered.join(", ")
        );
    }
    flush_table(cfg.out.as_deref(), case_name, tol, max_iter, format, &rows)?;
    Ok(())
}

fn flush_table(
    out: Option<&str>,
    case: &str,
    tol: f64,
    max_iter: usize,
    format: OutputFormat,
    rows: &[(MeshRun, Option<f64>)],
) -> Result<(), CliError> {
    let Some(out) = out else {
        return Ok(());
    };
    let rendered = match format {
        OutputFormat::Csv => render_csv(rows),
        OutputFormat::Json => render_json(case, tol, max_iter, rows),
    };
    std::fs::write(out, rendered).map_err(CliError::io)?;
    println!("table written to {out}");
    Ok(())
}
