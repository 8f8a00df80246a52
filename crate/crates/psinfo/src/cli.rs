//! Command-line interface: compute phase-space fields, sweep the measure
//! catalog over an (n, λ) lattice, check uncertainty-style bounds, and
//! render heatmaps.
//!
//! Commands:
//! - `field <wigner|husimi>` — one distribution on the working grid,
//!   written as `x,p,value` CSV under a versioned header, plus optional
//!   SVG/PPM heatmaps.
//! - `sweep` — every registered measure over the lattice, written as a
//!   wide CSV (complex measures split into `_re`/`_im` columns) plus a
//!   JSON summary of the bound verdicts.
//! - `bounds` — just the JSON bound summary, including the smallest
//!   coupling at which any bound fails.
//! - `render` — re-render a field CSV as an SVG rect grid or binary PPM,
//!   using a symmetric diverging colormap centered at zero so negative
//!   regions stay visible.
//!
//! Every argument is validated before the first quadrature call, and
//! output files are opened before computation starts so an unwritable
//! path fails fast. Exit codes: 0 success, 1 usage error, 2 sweep
//! finished with failed rows, 3 numerical invariant violation. The
//! `PSINFO_THREADS` environment variable caps the sweep worker pool.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::phasespace::{husimi_from_wigner, wigner, FieldKind};
use crate::quadrature::{GridSpec1D, GridSpec2D, SampledField2D};
use crate::report::{registry, sweep, NamedBound, SweepMetadata, SweepTable};
use crate::states::{perturbed_state_general, OscillatorSpec, Space};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARTIAL_SWEEP: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const FIELD_SCHEMA: &str = "# psinfo-field-v1";
const SWEEP_SCHEMA: &str = "# psinfo-sweep-v1";

#[derive(Parser)]
#[command(
    name = "psinfo",
    version,
    about = "Wigner and Husimi distributions and their information measures \
             for quartic-perturbed oscillator states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one phase-space distribution and write it as CSV and/or heatmaps.
    Field(FieldArgs),
    /// Compute every measure over an (n, λ) lattice; write CSV plus a bound summary.
    Sweep(SweepArgs),
    /// Check the entropic and Fisher bounds over an (n, λ) lattice; write JSON.
    Bounds(SweepArgs),
    /// Re-render a field CSV as an SVG or PPM heatmap.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldChoice {
    Wigner,
    Husimi,
}

#[derive(Args)]
struct FieldArgs {
    /// Which distribution to compute.
    #[arg(value_enum)]
    kind: FieldChoice,
    /// Oscillator level n.
    #[arg(long, default_value_t = 0)]
    n: usize,
    /// Quartic coupling λ (a single value for this command).
    #[arg(long, default_value = "0.0001", allow_hyphen_values = true)]
    lambda: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Oscillator levels as a comma list.
    #[arg(long, default_value = "0,1")]
    n: String,
    /// Coupling values: comma list or start:stop:step.
    #[arg(long, default_value = "0:0.3:0.05", allow_hyphen_values = true)]
    lambda: String,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Working grid as min:max:points, used for both axes.
    #[arg(long, default_value = "-8:8:513", allow_hyphen_values = true)]
    grid: String,
    /// Rényi orders: comma list of even integers including 2.
    #[arg(long, default_value = "2,4")]
    alpha: String,
    /// Smoothing width s (momentum kernel variance 1/(4s²)).
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Comma list of output formats (field: csv,svg,ppm; sweep: csv,json).
    #[arg(long)]
    format: Option<String>,
    /// Slack when flagging a bound as violated (margin < −tol).
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct RenderArgs {
    /// Input CSV in the field schema.
    input: PathBuf,
    /// Output image path (.svg or .ppm).
    #[arg(long)]
    out: PathBuf,
    /// Image format, svg or ppm (default: inferred from the output extension).
    #[arg(long)]
    format: Option<String>,
}

/// Parse `std::env::args`, dispatch, and map errors to exit codes.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version exit 0; real parse errors exit 1
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Field(args) => cmd_field(args),
        Command::Sweep(args) => cmd_sweep(args, true),
        Command::Bounds(args) => cmd_sweep(args, false),
        Command::Render(args) => cmd_render(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}

// ---------------------------------------------------------------------------
// argument parsing
// ---------------------------------------------------------------------------

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn parse_grid(text: &str) -> Result<GridSpec2D> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(usage(format!("grid must be min:max:points, got '{text}'")));
    }
    let min: f64 = parts[0]
        .trim()
        .parse()
        .map_err(|_| usage(format!("cannot parse grid minimum '{}'", parts[0])))?;
    let max: f64 = parts[1]
        .trim()
        .parse()
        .map_err(|_| usage(format!("cannot parse grid maximum '{}'", parts[1])))?;
    let points: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| usage(format!("cannot parse grid point count '{}'", parts[2])))?;
    Ok(GridSpec2D::square(GridSpec1D::new(min, max, points)?))
}

fn parse_lambda_list(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(usage(format!(
                "coupling range must be start:stop:step, got '{text}'"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| usage(format!("cannot parse coupling component '{p}'")))
            })
            .collect::<Result<_>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(usage(format!(
                "coupling range needs start <= stop and step > 0, got '{text}'"
            )));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| start + i as f64 * step).collect()
    } else {
        text.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse()
                    .map_err(|_| usage(format!("cannot parse coupling '{t}'")))
            })
            .collect::<Result<Vec<f64>>>()?
    };
    if values.is_empty() {
        return Err(usage("at least one coupling value is required"));
    }
    for &l in &values {
        if !l.is_finite() || l < 0.0 {
            return Err(Error::InvalidCoupling(l));
        }
    }
    Ok(values)
}

fn parse_n_list(text: &str) -> Result<Vec<usize>> {
    let values: Vec<usize> = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| usage(format!("cannot parse oscillator level '{t}'")))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(usage("at least one oscillator level is required"));
    }
    Ok(values)
}

fn parse_alphas(text: &str) -> Result<Vec<u32>> {
    let values: Vec<u32> = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| usage(format!("cannot parse Rényi order '{t}'")))
        })
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return Err(usage("at least one Rényi order is required"));
    }
    for &a in &values {
        if a < 2 || a % 2 != 0 {
            return Err(usage(format!(
                "Rényi orders must be even integers >= 2 (signed fields admit only even powers), got {a}"
            )));
        }
    }
    if !values.contains(&2) {
        return Err(usage(
            "Rényi order list must include 2; the collision-order bounds need it",
        ));
    }
    for (i, a) in values.iter().enumerate() {
        if values[..i].contains(a) {
            return Err(usage(format!("duplicate Rényi order {a}")));
        }
    }
    Ok(values)
}

fn parse_formats(text: Option<&str>, allowed: &[&str], default: &[&str]) -> Result<Vec<String>> {
    let chosen: Vec<String> = match text {
        None => default.iter().map(|s| s.to_string()).collect(),
        Some(t) => t
            .split(',')
            .map(|s| s.trim().to_ascii_lowercase())
            .filter(|s| !s.is_empty())
            .collect(),
    };
    if chosen.is_empty() {
        return Err(usage("at least one output format is required"));
    }
    for (i, f) in chosen.iter().enumerate() {
        if !allowed.contains(&f.as_str()) {
            return Err(usage(format!(
                "unsupported format '{f}'; expected one of: {}",
                allowed.join(", ")
            )));
        }
        if chosen[..i].contains(f) {
            return Err(usage(format!("duplicate format '{f}'")));
        }
    }
    Ok(chosen)
}

fn validate_smoothing(s: f64) -> Result<()> {
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::InvalidSmoothing(s));
    }
    Ok(())
}

fn validate_tol(tol: f64) -> Result<()> {
    if !tol.is_finite() || tol < 0.0 {
        return Err(usage(format!(
            "violation slack must be finite and >= 0, got {tol}"
        )));
    }
    Ok(())
}

fn worker_cap() -> Result<usize> {
    match std::env::var("PSINFO_THREADS") {
        Err(_) => Ok(0),
        Ok(v) => {
            let k: usize = v
                .trim()
                .parse()
                .map_err(|_| usage(format!("PSINFO_THREADS must be a positive integer, got '{v}'")))?;
            if k == 0 {
                return Err(usage("PSINFO_THREADS must be a positive integer, got 0"));
            }
            Ok(k)
        }
    }
}

fn warn_nonperturbative(lambdas: &[f64]) {
    let worst = lambdas.iter().cloned().fold(0.0f64, f64::max);
    let probe = OscillatorSpec { n: 0, lambda: worst };
    if !probe.perturbative() {
        eprintln!(
            "warning: coupling {worst} is outside the first-order perturbative regime; \
             results describe the truncated expansion, not the true eigenstate"
        );
    }
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

struct Sink {
    format: String,
    path: PathBuf,
    file: File,
}

/// Open one output file per requested format before any computation, so an
/// unwritable destination fails immediately.
fn open_sinks(dir: &Path, names: &[(String, String)]) -> Result<Vec<Sink>> {
    fs::create_dir_all(dir)?;
    names
        .iter()
        .map(|(format, name)| {
            let path = dir.join(name);
            let file = File::create(&path)?;
            Ok(Sink {
                format: format.clone(),
                path,
                file,
            })
        })
        .collect()
}

fn cmd_field(args: FieldArgs) -> Result<i32> {
    let grid = parse_grid(&args.common.grid)?;
    let lambdas = parse_lambda_list(&args.lambda)?;
    if lambdas.len() != 1 {
        return Err(usage(format!(
            "the field command takes exactly one coupling value, got {}",
            lambdas.len()
        )));
    }
    let spec = OscillatorSpec::new(args.n, lambdas[0])?;
    validate_smoothing(args.common.s)?;
    let formats = parse_formats(args.common.format.as_deref(), &["csv", "svg", "ppm"], &["csv"])?;
    warn_nonperturbative(&lambdas);

    let kind_name = match args.kind {
        FieldChoice::Wigner => FieldKind::Wigner.name(),
        FieldChoice::Husimi => FieldKind::Husimi.name(),
    };
    let stem = format!("{kind_name}_n{}_lambda{}", spec.n, spec.lambda);
    let names: Vec<(String, String)> = formats
        .iter()
        .map(|f| (f.clone(), format!("{stem}.{f}")))
        .collect();
    let mut sinks = open_sinks(&args.common.out, &names)?;

    let psi = perturbed_state_general(&spec, Space::Position, &grid.x)?;
    let w = wigner(&psi, &grid)?;
    let field = match args.kind {
        FieldChoice::Wigner => w,
        FieldChoice::Husimi => husimi_from_wigner(&w, args.common.s)?,
    };

    for sink in &mut sinks {
        match sink.format.as_str() {
            "csv" => {
                let mut w = BufWriter::new(&sink.file);
                write_field_csv(&mut w, kind_name, &spec, args.common.s, field.sampled())?;
                w.flush()?;
            }
            "svg" => {
                let image = render_svg(&lattice_of(field.sampled()));
                (&sink.file).write_all(image.as_bytes())?;
            }
            "ppm" => {
                let image = render_ppm(&lattice_of(field.sampled()));
                (&sink.file).write_all(&image)?;
            }
            _ => unreachable!("formats are validated"),
        }
        println!("wrote {}", sink.path.display());
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(args: SweepArgs, with_csv: bool) -> Result<i32> {
    let grid = parse_grid(&args.common.grid)?;
    let ns = parse_n_list(&args.n)?;
    let lambdas = parse_lambda_list(&args.lambda)?;
    let alphas = parse_alphas(&args.common.alpha)?;
    validate_smoothing(args.common.s)?;
    validate_tol(args.common.tol)?;
    let workers = worker_cap()?;
    let names: Vec<(String, String)> = if with_csv {
        let formats =
            parse_formats(args.common.format.as_deref(), &["csv", "json"], &["csv", "json"])?;
        formats
            .iter()
            .map(|f| match f.as_str() {
                "csv" => (f.clone(), "sweep.csv".to_string()),
                _ => (f.clone(), "sweep_bounds.json".to_string()),
            })
            .collect()
    } else {
        parse_formats(args.common.format.as_deref(), &["json"], &["json"])?;
        vec![("json".to_string(), "bounds.json".to_string())]
    };
    warn_nonperturbative(&lambdas);
    let mut sinks = open_sinks(&args.common.out, &names)?;

    let table = sweep(&ns, &lambdas, &grid, args.common.s, &alphas, workers)?;

    for sink in &mut sinks {
        match sink.format.as_str() {
            "csv" => {
                let mut w = BufWriter::new(&sink.file);
                write_sweep_csv(&mut w, &table)?;
                w.flush()?;
            }
            "json" => {
                let summary = bound_summary(&table, args.common.tol);
                let mut w = BufWriter::new(&sink.file);
                serde_json::to_writer_pretty(&mut w, &summary).map_err(io::Error::from)?;
                w.write_all(b"\n")?;
                w.flush()?;
            }
            _ => unreachable!("formats are validated"),
        }
        println!("wrote {}", sink.path.display());
    }

    let failed = table.failed_rows();
    if failed > 0 {
        eprintln!(
            "{failed} of {} sweep rows failed; see the error column",
            table.rows.len()
        );
        return Ok(EXIT_PARTIAL_SWEEP);
    }
    Ok(EXIT_OK)
}

fn cmd_render(args: RenderArgs) -> Result<i32> {
    let format = match args.format.as_deref() {
        Some(f) => {
            let f = f.trim().to_ascii_lowercase();
            if f != "svg" && f != "ppm" {
                return Err(usage(format!("unsupported image format '{f}'; expected svg or ppm")));
            }
            f
        }
        None => match args.out.extension().and_then(|e| e.to_str()) {
            Some("svg") => "svg".to_string(),
            Some("ppm") => "ppm".to_string(),
            _ => {
                return Err(usage(
                    "cannot infer the image format from the output extension; pass --format svg|ppm",
                ))
            }
        },
    };
    let text = fs::read_to_string(&args.input)?;
    let mut file = File::create(&args.out)?;
    let lattice = parse_field_csv(&text)?;
    match format.as_str() {
        "svg" => file.write_all(render_svg(&lattice).as_bytes())?,
        _ => file.write_all(&render_ppm(&lattice))?,
    }
    println!("wrote {}", args.out.display());
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

fn axis_text(g: &GridSpec1D) -> String {
    format!("{}:{}:{}", g.min(), g.max(), g.points())
}

fn sanitize_error(message: &str) -> String {
    message.replace(',', ";").replace('\n', " ")
}

fn write_field_csv(
    w: &mut impl io::Write,
    kind: &str,
    spec: &OscillatorSpec,
    s: f64,
    field: &SampledField2D,
) -> io::Result<()> {
    let grid = field.grid();
    writeln!(w, "{FIELD_SCHEMA}")?;
    writeln!(w, "# version,{}", crate::VERSION)?;
    writeln!(w, "# kind,{kind}")?;
    writeln!(w, "# n,{}", spec.n)?;
    writeln!(w, "# lambda,{:.16e}", spec.lambda)?;
    writeln!(w, "# grid,{},{}", axis_text(&grid.x), axis_text(&grid.p))?;
    writeln!(w, "# s,{:.16e}", s)?;
    writeln!(w, "# a,0")?;
    writeln!(w, "# b,0")?;
    writeln!(w, "x,p,value")?;
    let xs = grid.x.coords();
    let ps = grid.p.coords();
    for (i, &x) in xs.iter().enumerate() {
        for (k, &p) in ps.iter().enumerate() {
            writeln!(w, "{x:.16e},{p:.16e},{:.16e}", field.at(i, k))?;
        }
    }
    Ok(())
}

fn write_sweep_csv(w: &mut impl io::Write, table: &SweepTable) -> io::Result<()> {
    let meta: &SweepMetadata = &table.metadata;
    writeln!(w, "{SWEEP_SCHEMA}")?;
    writeln!(w, "# version,{}", meta.version)?;
    writeln!(
        w,
        "# grid,{},{}",
        axis_text(&meta.grid.x),
        axis_text(&meta.grid.p)
    )?;
    writeln!(w, "# s,{:.16e}", meta.smoothing)?;
    writeln!(
        w,
        "# alphas,{}",
        meta.alphas
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",")
    )?;
    writeln!(w, "# a,0")?;
    writeln!(w, "# b,0")?;

    let defs = registry(&meta.alphas);
    let mut header = String::from("n,lambda,error");
    for d in &defs {
        if d.complex {
            header.push_str(&format!(",{0}_re,{0}_im", d.name));
        } else {
            header.push(',');
            header.push_str(&d.name);
        }
    }
    writeln!(w, "{header}")?;

    for row in &table.rows {
        write!(w, "{},{:.16e},", row.n, row.lambda)?;
        if let Some(e) = &row.error {
            write!(w, "{}", sanitize_error(e))?;
        }
        match &row.report {
            Some(report) => {
                for (d, entry) in defs.iter().zip(&report.entries) {
                    if d.complex {
                        write!(w, ",{:.16e},{:.16e}", entry.real, entry.imag)?;
                    } else {
                        write!(w, ",{:.16e}", entry.real)?;
                    }
                }
            }
            None => {
                for d in &defs {
                    w.write_all(if d.complex { b",," } else { b"," })?;
                }
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bound summary
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct BoundRow {
    n: usize,
    lambda: f64,
    error: Option<String>,
    bounds: Vec<NamedBound>,
}

#[derive(serde::Serialize)]
struct BoundSummary {
    metadata: SweepMetadata,
    a: f64,
    b: f64,
    violation_slack: f64,
    rows: Vec<BoundRow>,
    /// Smallest coupling at which any bound's margin drops below −slack;
    /// null when every bound holds everywhere.
    first_failing_lambda: Option<f64>,
}

fn bound_summary(table: &SweepTable, tol: f64) -> BoundSummary {
    let mut rows = Vec::with_capacity(table.rows.len());
    let mut first: Option<f64> = None;
    for row in &table.rows {
        let bounds = row
            .report
            .as_ref()
            .map(|r| r.bounds.clone())
            .unwrap_or_default();
        if bounds.iter().any(|b| b.check.margin < -tol) {
            first = Some(match first {
                Some(f) if f <= row.lambda => f,
                _ => row.lambda,
            });
        }
        rows.push(BoundRow {
            n: row.n,
            lambda: row.lambda,
            error: row.error.clone(),
            bounds,
        });
    }
    BoundSummary {
        metadata: table.metadata.clone(),
        a: 0.0,
        b: 0.0,
        violation_slack: tol,
        rows,
        first_failing_lambda: first,
    }
}

// ---------------------------------------------------------------------------
// field CSV parsing and heatmap rendering
// ---------------------------------------------------------------------------

/// A bare value lattice: `values[i * np + k]` with x outermost, exactly the
/// row order of the field CSV.
#[derive(Debug)]
struct ValueLattice {
    nx: usize,
    np: usize,
    values: Vec<f64>,
}

fn lattice_of(field: &SampledField2D) -> ValueLattice {
    ValueLattice {
        nx: field.grid().x.points(),
        np: field.grid().p.points(),
        values: field.values().to_vec(),
    }
}

fn malformed(line: usize, message: impl Into<String>) -> Error {
    Error::MalformedCsv {
        line,
        message: message.into(),
    }
}

fn axis_points(text: &str) -> Option<usize> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return None;
    }
    parts[0].trim().parse::<f64>().ok()?;
    parts[1].trim().parse::<f64>().ok()?;
    parts[2].trim().parse::<usize>().ok()
}

fn parse_field_csv(text: &str) -> Result<ValueLattice> {
    let mut lines = text.lines().enumerate();
    let first = lines.next().ok_or_else(|| malformed(1, "empty file"))?.1;
    if first.trim() != FIELD_SCHEMA {
        return Err(malformed(
            1,
            format!("unknown schema version '{}'; expected '{FIELD_SCHEMA}'", first.trim()),
        ));
    }

    let mut dims: Option<(usize, usize)> = None;
    let mut header_line = 0;
    for (idx, line) in lines.by_ref() {
        let lineno = idx + 1;
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(axes) = rest.trim_start().strip_prefix("grid,") {
                let parts: Vec<&str> = axes.split(',').collect();
                if parts.len() != 2 {
                    return Err(malformed(lineno, "grid metadata needs two min:max:points axes"));
                }
                let nx = axis_points(parts[0])
                    .ok_or_else(|| malformed(lineno, format!("cannot parse x axis '{}'", parts[0])))?;
                let np = axis_points(parts[1])
                    .ok_or_else(|| malformed(lineno, format!("cannot parse p axis '{}'", parts[1])))?;
                dims = Some((nx, np));
            }
            continue;
        }
        if line.trim() == "x,p,value" {
            header_line = lineno;
            break;
        }
        return Err(malformed(
            lineno,
            format!("expected metadata or the 'x,p,value' header, got '{line}'"),
        ));
    }
    if header_line == 0 {
        return Err(malformed(text.lines().count(), "missing 'x,p,value' header"));
    }
    let (nx, np) =
        dims.ok_or_else(|| malformed(header_line, "missing '# grid' metadata before the header"))?;

    let want = nx
        .checked_mul(np)
        .ok_or_else(|| malformed(header_line, "grid dimensions overflow"))?;
    let mut values = Vec::with_capacity(want);
    let mut last_line = header_line;
    for (idx, line) in lines {
        let lineno = idx + 1;
        last_line = lineno;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(fx), Some(fp), Some(fv), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(malformed(lineno, "expected exactly three comma-separated fields"));
        };
        for (name, raw) in [("x", fx), ("p", fp), ("value", fv)] {
            let parsed: f64 = raw.trim().parse().map_err(|_| {
                malformed(lineno, format!("cannot parse {name} field '{raw}'"))
            })?;
            if !parsed.is_finite() {
                return Err(malformed(lineno, format!("non-finite {name} field '{raw}'")));
            }
        }
        if values.len() == want {
            return Err(malformed(lineno, format!("more than {want} data rows")));
        }
        values.push(fv.trim().parse().expect("validated above"));
    }
    if values.len() != want {
        return Err(malformed(
            last_line + 1,
            format!("expected {want} data rows, found {}", values.len()),
        ));
    }
    Ok(ValueLattice { nx, np, values })
}

// symmetric diverging colormap: saturated blue at −max|v|, neutral white
// at 0, saturated red at +max|v|
const POLE_NEG: [f64; 3] = [43.0, 131.0, 186.0];
const COLOR_MID: [f64; 3] = [247.0, 247.0, 247.0];
const POLE_POS: [f64; 3] = [215.0, 25.0, 28.0];

fn diverging_color(t: f64) -> [u8; 3] {
    let t = t.clamp(-1.0, 1.0);
    let (pole, u) = if t < 0.0 {
        (POLE_NEG, -t)
    } else {
        (POLE_POS, t)
    };
    let mut c = [0u8; 3];
    for ch in 0..3 {
        c[ch] = (COLOR_MID[ch] + (pole[ch] - COLOR_MID[ch]) * u).round() as u8;
    }
    c
}

fn color_scale(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
}

fn pixel(value: f64, scale: f64) -> [u8; 3] {
    if scale > 0.0 {
        diverging_color(value / scale)
    } else {
        diverging_color(0.0)
    }
}

/// One unit rect per grid cell; x grows rightward, p grows upward.
fn render_svg(lattice: &ValueLattice) -> String {
    let scale = color_scale(&lattice.values);
    let mut out = String::with_capacity(lattice.values.len() * 56 + 160);
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" \
         viewBox=\"0 0 {0} {1}\" shape-rendering=\"crispEdges\">\n",
        lattice.nx, lattice.np
    ));
    for r in 0..lattice.np {
        let k = lattice.np - 1 - r;
        for i in 0..lattice.nx {
            let [cr, cg, cb] = pixel(lattice.values[i * lattice.np + k], scale);
            out.push_str(&format!(
                "<rect x=\"{i}\" y=\"{r}\" width=\"1\" height=\"1\" fill=\"#{cr:02x}{cg:02x}{cb:02x}\"/>\n"
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Binary P6, one pixel per grid cell, rows from p = max down to p = min.
fn render_ppm(lattice: &ValueLattice) -> Vec<u8> {
    let scale = color_scale(&lattice.values);
    let mut out = Vec::with_capacity(lattice.values.len() * 3 + 32);
    out.extend_from_slice(format!("P6\n{} {}\n255\n", lattice.nx, lattice.np).as_bytes());
    for r in 0..lattice.np {
        let k = lattice.np - 1 - r;
        for i in 0..lattice.nx {
            out.extend_from_slice(&pixel(lattice.values[i * lattice.np + k], scale));
        }
    }
    out
}
