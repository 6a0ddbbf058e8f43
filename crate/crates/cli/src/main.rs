//! Command-line interface: eigenvalues, oracle enumeration, modal bases,
//! Green's function fields, transfer functions, resonance modes, reference
//! solvers and comparison metrics for rectangular rooms with impedance
//! walls.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 numerical failure.

mod output;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rectroom::eigensolver::{fallback_im_bound, solve_axis};
use rectroom::greens::{green_eval, transfer_function, room_hash};
use rectroom::metrics::{frac, l2_relative_error};
use rectroom::modal::build_basis;
use rectroom::modes::{mode_frequencies, mode_q};
use rectroom::oracle::{enumerate_roots, SearchRegion};
use rectroom::reference::{fdm_green_2d, green_1d_closed_form};
use rectroom::{load_config, Config, Error, RoomSpec, SolverParams};
use serde_json::json;
use std::path::{Path, PathBuf};

use output::{complex_cols, fmt_f64, CsvDoc, Sidecar, Sink};

#[derive(Parser)]
#[command(
    name = "rectroom",
    version,
    about = "Green's functions, eigenvalues and resonance modes of rectangular rooms with impedance walls"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Room configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the truncation order n_max from the config.
    #[arg(long)]
    nmax: Option<usize>,
    /// Output CSV path; stdout when omitted. A `<out>.meta.json` sidecar is
    /// written next to the CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for frequency sweeps (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Seed recorded in metadata and used by sampling-based commands.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Interpret --source/--receiver relative to the room corner instead of
    /// the room center. Output coordinates are always room-centered.
    #[arg(long)]
    corner_coords: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of every axis at one frequency.
    Eigenvalues {
        #[command(flatten)]
        common: Common,
        /// Frequency in Hz.
        #[arg(long)]
        freq: f64,
    },
    /// Independent argument-principle root enumeration over a rectangle.
    RootsOracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        freq: f64,
        /// Axis index (0-based).
        #[arg(long, default_value_t = 0)]
        axis: usize,
        #[arg(long)]
        re_min: f64,
        #[arg(long)]
        re_max: f64,
        #[arg(long)]
        im_min: f64,
        #[arg(long)]
        im_max: f64,
    },
    /// Eigenfunction basis of one axis at one frequency.
    Basis {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        freq: f64,
        #[arg(long, default_value_t = 0)]
        axis: usize,
    },
    /// Green's function field over a grid or point list.
    Green {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        freq: f64,
        /// Source position, comma-separated coordinates.
        #[arg(long)]
        source: String,
        /// Per-axis point counts for a uniform wall-to-wall grid, e.g. "40,56".
        #[arg(long, conflicts_with = "points")]
        grid: Option<String>,
        /// Evaluate at the coordinates of an existing grid CSV.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Transfer-function sweep between a source and a receiver.
    Tf {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        source: String,
        #[arg(long)]
        receiver: String,
        #[arg(long)]
        f_start: f64,
        #[arg(long)]
        f_stop: f64,
        #[arg(long)]
        f_step: f64,
    },
    /// Closed-form resonance modes of one axis.
    Modes {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0)]
        axis: usize,
        #[arg(long, default_value_t = 1)]
        n_start: i64,
        #[arg(long)]
        n_end: i64,
    },
    /// Independent reference solution (1D closed form, 2D finite differences).
    Reference {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        freq: f64,
        #[arg(long)]
        source: String,
        /// Points per wavelength of the 2D finite-difference grid.
        #[arg(long, default_value_t = 40.0)]
        epw: f64,
        /// 1D only: number of output points (wall to wall).
        #[arg(long, default_value_t = 201)]
        grid: usize,
        /// 1D only: evaluate at the coordinates of an existing grid CSV.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Relative L2 error and FRAC between two result CSVs.
    Compare {
        /// Candidate CSV (grid or transfer-function format).
        #[arg(long)]
        a: PathBuf,
        /// Reference CSV of the same format.
        #[arg(long)]
        b: PathBuf,
        /// Exclude points within a disc: "x[,y[,z]],radius" (grid format).
        #[arg(long)]
        exclude: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in verification: rigid-wall exactness, reported-value checks and
    /// solver-vs-oracle equivalence on random configurations.
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems exit 1 (clap's default would be 2, which is
            // reserved for numerical failures here).
            let _ = e.print();
            std::process::exit(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    std::process::exit(code);
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NegativeFrequency(_)
        | Error::NonPositiveLength(_)
        | Error::NonPositiveSpeed(_)
        | Error::BadDimension(_)
        | Error::BadSolverParam(_)
        | Error::TableNotIncreasing
        | Error::TableEmpty
        | Error::TableRange { .. }
        | Error::ZeroImpedance
        | Error::BadRegion(_)
        | Error::OutOfDomain { .. }
        | Error::PointOutsideRoom(_)
        | Error::FrequenciesNotIncreasing
        | Error::FrequencyDependentAdmittance
        | Error::BadEpw(_)
        | Error::NotTwoDimensional(_)
        | Error::LengthMismatch(_, _)
        | Error::ZeroNorm
        | Error::Config(_)
        | Error::Io(_) => 1,
        _ => 2,
    }
}

fn setup_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn load(common: &Common) -> Result<Config, Error> {
    let mut config = load_config(&common.config)?;
    if let Some(n) = common.nmax {
        config.params.n_max = n;
    }
    setup_jobs(common.jobs);
    Ok(config)
}

/// Parse "x[,y[,z]]" into room coordinates, applying the corner shift when
/// requested.
fn parse_point(s: &str, room: &RoomSpec, corner: bool) -> Result<[f64; 3], Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != room.dim() {
        return Err(Error::Config(format!(
            "expected {} coordinates, got {:?}",
            room.dim(),
            s
        )));
    }
    let mut p = [0.0f64; 3];
    for (j, part) in parts.iter().enumerate() {
        let v: f64 = part
            .parse()
            .map_err(|_| Error::Config(format!("bad coordinate {part:?}")))?;
        p[j] = if corner { v - room.axes[j].length / 2.0 } else { v };
    }
    Ok(p)
}

fn grid_points(room: &RoomSpec, spec: &str) -> Result<Vec<[f64; 3]>, Error> {
    let counts: Vec<usize> = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad grid count {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    if counts.len() != room.dim() || counts.iter().any(|&n| n < 2) {
        return Err(Error::Config(format!(
            "--grid needs {} counts >= 2, got {spec:?}",
            room.dim()
        )));
    }
    let axes: Vec<Vec<f64>> = room
        .axes
        .iter()
        .zip(&counts)
        .map(|(a, &n)| {
            (0..n)
                .map(|i| -a.length / 2.0 + a.length * i as f64 / (n - 1) as f64)
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; room.dim()];
    loop {
        let mut p = [0.0f64; 3];
        for j in 0..room.dim() {
            p[j] = axes[j][idx[j]];
        }
        out.push(p);
        let mut j = 0;
        loop {
            if j == room.dim() {
                return Ok(out);
            }
            idx[j] += 1;
            if idx[j] < counts[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

struct LoadedCsv {
    header: Vec<String>,
    /// Leading key columns (coordinates or frequency).
    keys: Vec<Vec<f64>>,
    /// Complex value per row; `None` when the fields are empty.
    values: Vec<Option<Complex64>>,
}

fn load_result_csv(path: &Path) -> Result<LoadedCsv, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{}: empty file", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let re_col = header
        .iter()
        .position(|h| h == "re_g")
        .ok_or_else(|| Error::Config(format!("{}: no re_g column", path.display())))?;
    let im_col = header
        .iter()
        .position(|h| h == "im_g")
        .ok_or_else(|| Error::Config(format!("{}: no im_g column", path.display())))?;
    let key_cols = re_col; // coordinates or frequency come first
    let mut keys = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(Error::Config(format!(
                "{}: line {}: expected {} fields",
                path.display(),
                lineno + 2,
                header.len()
            )));
        }
        let parse = |s: &str| -> Result<f64, Error> {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("{}: bad number {s:?}", path.display())))
        };
        keys.push(
            fields[..key_cols]
                .iter()
                .map(|s| parse(s))
                .collect::<Result<Vec<f64>, Error>>()?,
        );
        if fields[re_col].is_empty() || fields[im_col].is_empty() {
            values.push(None);
        } else {
            values.push(Some(Complex64::new(
                parse(fields[re_col])?,
                parse(fields[im_col])?,
            )));
        }
    }
    Ok(LoadedCsv {
        header,
        keys,
        values,
    })
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Eigenvalues { common, freq } => {
            let config = load(&common)?;
            let mut sidecar = Sidecar::new("eigenvalues");
            sidecar.record_config(&common.config, &config);
            sidecar.set("frequency_hz", json!(freq));
            let ctx = config.room.wave_context(freq)?;
            let mut csv = CsvDoc::new(&["axis", "n", "re_q_hat", "im_q_hat", "residual", "group"]);
            for (j, axis) in config.room.axes.iter().enumerate() {
                let g = rectroom::GammaPair::for_axis(axis, &ctx)?;
                let set = solve_axis(&g, &config.params)?;
                sidecar.warn_all(
                    &set.warnings
                        .iter()
                        .map(|w| format!("axis {j}: {w}"))
                        .collect::<Vec<_>>(),
                );
                if set.oracle_fallback {
                    sidecar.set(&format!("axis_{j}_oracle_fallback"), json!(true));
                }
                for (n, root) in set.roots.iter().enumerate() {
                    let [re, im] = complex_cols(root.q_hat);
                    csv.row(vec![
                        j.to_string(),
                        n.to_string(),
                        re,
                        im,
                        fmt_f64(root.residual),
                        root.group.label().into(),
                    ]);
                }
            }
            Sink::new(common.out).write(&csv, &sidecar)?;
            Ok(())
        }

        Command::RootsOracle {
            common,
            freq,
            axis,
            re_min,
            re_max,
            im_min,
            im_max,
        } => {
            let config = load(&common)?;
            let mut sidecar = Sidecar::new("roots-oracle");
            sidecar.record_config(&common.config, &config);
            sidecar.set("frequency_hz", json!(freq));
            let ctx = config.room.wave_context(freq)?;
            let axis_def = config
                .room
                .axes
                .get(axis)
                .ok_or_else(|| Error::Config(format!("axis {axis} out of range")))?;
            let g = rectroom::GammaPair::for_axis(axis_def, &ctx)?;
            let region = SearchRegion::new(re_min, re_max, im_min, im_max)?;
            let enumeration = enumerate_roots(&region, &g, 1e-10)?;
            sidecar.set("winding_count", json!(enumeration.winding));
            sidecar.set(
                "clusters",
                json!(enumeration
                    .clusters
                    .iter()
                    .map(|c| json!({
                        "re": c.center.re,
                        "im": c.center.im,
                        "multiplicity": c.multiplicity
                    }))
                    .collect::<Vec<_>>()),
            );
            eprintln!("winding count: {}", enumeration.winding);
            let mut csv = CsvDoc::new(&["re_q_hat", "im_q_hat", "residual"]);
            for root in &enumeration.roots {
                let [re, im] = complex_cols(*root);
                csv.row(vec![
                    re,
                    im,
                    fmt_f64(rectroom::eigensolver::residual(*root, &g).norm()),
                ]);
            }
            Sink::new(common.out).write(&csv, &sidecar)?;
            Ok(())
        }

        Command::Basis { common, freq, axis } => {
            let config = load(&common)?;
            let mut sidecar = Sidecar::new("basis");
            sidecar.record_config(&common.config, &config);
            sidecar.set("frequency_hz", json!(freq));
            sidecar.set("axis", json!(axis));
            let ctx = config.room.wave_context(freq)?;
            let axis_def = config
                .room
                .axes
                .get(axis)
                .ok_or_else(|| Error::Config(format!("axis {axis} out of range")))?;
            let basis = build_basis(axis_def, &ctx, &config.params)?;
            sidecar.warn_all(&basis.warnings);
            let mut csv = CsvDoc::new(&[
                "n",
                "re_q_hat",
                "im_q_hat",
                "re_b_hat",
                "im_b_hat",
                "re_lambda",
                "im_lambda",
                "near_defective",
            ]);
            for (n, entry) in basis.entries.iter().enumerate() {
                let [re_q, im_q] = complex_cols(entry.root.q_hat);
                let [re_b, im_b] = complex_cols(entry.b_hat);
                let [re_l, im_l] = complex_cols(entry.lambda);
                csv.row(vec![
                    n.to_string(),
                    re_q,
                    im_q,
                    re_b,
                    im_b,
                    re_l,
                    im_l,
                    entry.near_defective.to_string(),
                ]);
            }
            Sink::new(common.out).write(&csv, &sidecar)?;
            Ok(())
        }

        Command::Green {
            common,
            freq,
            source,
            grid,
            points,
        } => {
            let config = load(&common)?;
            let mut sidecar = Sidecar::new("green");
            sidecar.record_config(&common.config, &config);
            sidecar.set("frequency_hz", json!(freq));
            sidecar.set("seed", json!(common.seed));
            let ctx = config.room.wave_context(freq)?;
            let x0 = parse_point(&source, &config.room, common.corner_coords)?;
            let pts = match (&grid, &points) {
                (Some(spec), None) => grid_points(&config.room, spec)?,
                (None, Some(path)) => {
                    let loaded = load_result_csv(path)?;
                    loaded
                        .keys
                        .iter()
                        .map(|k| {
                            let mut p = [0.0f64; 3];
                            for (j, v) in k.iter().take(3).enumerate() {
                                p[j] = *v;
                            }
                            p
                        })
                        .collect()
                }
                _ => {
                    return Err(Error::Config(
                        "green needs exactly one of --grid or --points".into(),
                    ))
                }
            };
            let field = green_eval(&config.room, &ctx, x0, &pts, &config.params)?;
            sidecar.warn_all(&field.warnings);
            sidecar.set("term_count", json!(field.term_count));
            sidecar.set("n_max", json!(field.n_max));
            sidecar.set("source", json!(&x0[..config.room.dim()]));
            let coord_names = ["x", "y", "z"];
            let mut header: Vec<&str> = coord_names[..config.room.dim()].to_vec();
            header.extend(["re_g", "im_g"]);
            let mut csv = CsvDoc::new(&header);
            for (p, v) in field.points.iter().zip(&field.values) {
                let mut row: Vec<String> =
                    p[..config.room.dim()].iter().map(|c| fmt_f64(*c)).collect();
                let [re, im] = complex_cols(*v);
                row.extend([re, im]);
                csv.row(row);
            }
            Sink::new(common.out).write(&csv, &sidecar)?;
            Ok(())
        }

        Command::Tf {
            common,
            source,
            receiver,
            f_start,
            f_stop,
            f_step,
        } => {
            let config = load(&common)?;
            let mut sidecar = Sidecar::new("tf");
            sidecar.record_config(&common.config, &config);
            sidecar.set("seed", json!(common.seed));
            if !(f_step > 0.0 && f_stop >= f_start) {
                return Err(Error::FrequenciesNotIncreasing);
            }
            let mut freqs = Vec::new();
            let mut f = f_start;
            while f <= f_stop + 1e-9 * f_step {
                freqs.push(f);
                f += f_step;
            }
            let x0 = parse_point(&source, &config.room, common.corner_coords)?;
            let x = parse_point(&receiver, &config.room, common.corner_coords)?;
            let tf = transfer_function(&config.room, x0, x, &freqs, &config.params)?;
            sidecar.warn_all(&tf.warnings);
            sidecar.set(
                "failures",
                json!(tf
                    .failures
                    .iter()
                    .map(|(f, m)| json!({ "f_hz": f, "error": m }))
                    .collect::<Vec<_>>()),
            );
            let spl = tf.spl();
            let mut csv = CsvDoc::new(&["f_hz", "re_g", "im_g", "spl_db"]);
            for ((f, v), s) in tf.frequencies.iter().zip(&tf.values).zip(&spl) {
                let row = match (v, s) {
                    (Some(v), Some(s)) => {
                        let [re, im] = complex_cols(*v);
                        vec![fmt_f64(*f), re, im, fmt_f64(*s)]
                    }
                    _ => vec![fmt_f64(*f), String::new(), String::new(), String::new()],
                };
                csv.row(row);
            }
            Sink::new(common.out).write(&csv, &sidecar)?;
            Ok(())
        }

        Command::Modes {
            common,
            axis,
            n_start,
            n_end,
        } => {
            let config = load(&common)?;
            let mut sidecar = Sidecar::new("modes");
            sidecar.record_config(&common.config, &config);
            let axis_def = config
                .room
                .axes
                .get(axis)
                .ok_or_else(|| Error::Config(format!("axis {axis} out of range")))?;
            if n_end < n_start {
                return Err(Error::Config("--n-end must be >= --n-start".into()));
            }
            let (bm, bp) = match (
                axis_def.beta_minus.constant_value(),
                axis_def.beta_plus.constant_value(),
            ) {
                (Some(bm), Some(bp)) => (bm, bp),
                _ => return Err(Error::FrequencyDependentAdmittance),
            };
            let freqs = mode_frequencies(axis_def, config.room.speed_of_sound, n_start..=n_end)?;
            let mut csv =
                CsvDoc::new(&["n", "re_q_tilde", "im_q_tilde", "f_hz", "delta_f_hz"]);
            for (n, f_n) in (n_start..=n_end).zip(&freqs) {
                let mode = mode_q(n, bm, bp)?;
                let rigid = n as f64 * config.room.speed_of_sound / (2.0 * axis_def.length);
                let [re, im] = complex_cols(mode.q_tilde);
                csv.row(vec![
                    n.to_string(),
                    re,
                    im,
                    fmt_f64(*f_n),
                    fmt_f64(f_n - rigid),
                ]);
            }
            Sink::new(common.out).write(&csv, &sidecar)?;
            Ok(())
        }

        Command::Reference {
            common,
            freq,
            source,
            epw,
            grid,
            points,
        } => {
            let config = load(&common)?;
            let mut sidecar = Sidecar::new("reference");
            sidecar.record_config(&common.config, &config);
            sidecar.set("frequency_hz", json!(freq));
            let ctx = config.room.wave_context(freq)?;
            let x0 = parse_point(&source, &config.room, common.corner_coords)?;
            match config.room.dim() {
                1 => {
                    let axis = &config.room.axes[0];
                    let coords: Vec<f64> = match &points {
                        Some(path) => load_result_csv(path)?
                            .keys
                            .iter()
                            .map(|k| k[0])
                            .collect(),
                        None => {
                            if grid < 2 {
                                return Err(Error::Config("--grid must be >= 2".into()));
                            }
                            (0..grid)
                                .map(|i| {
                                    -axis.length / 2.0
                                        + axis.length * i as f64 / (grid - 1) as f64
                                })
                                .collect()
                        }
                    };
                    let mut csv = CsvDoc::new(&["x", "re_g", "im_g"]);
                    for x in coords {
                        let v = green_1d_closed_form(axis, &ctx, x0[0], x)?;
                        let [re, im] = complex_cols(v);
                        csv.row(vec![fmt_f64(x), re, im]);
                    }
                    Sink::new(common.out).write(&csv, &sidecar)?;
                }
                2 => {
                    let sol = fdm_green_2d(&config.room, &ctx, [x0[0], x0[1]], epw)?;
                    sidecar.set("epw", json!(epw));
                    sidecar.set("grid_nodes", json!([sol.nx(), sol.ny()]));
                    let mut csv = CsvDoc::new(&["x", "y", "re_g", "im_g"]);
                    for (iy, y) in sol.ys.iter().enumerate() {
                        for (ix, x) in sol.xs.iter().enumerate() {
                            let [re, im] = complex_cols(sol.value_at(ix, iy));
                            csv.row(vec![fmt_f64(*x), fmt_f64(*y), re, im]);
                        }
                    }
                    Sink::new(common.out).write(&csv, &sidecar)?;
                }
                d => return Err(Error::NotTwoDimensional(d)),
            }
            Ok(())
        }

        Command::Compare { a, b, exclude, out } => {
            let mut sidecar = Sidecar::new("compare");
            sidecar.set("a", json!(a.display().to_string()));
            sidecar.set("b", json!(b.display().to_string()));
            let da = load_result_csv(&a)?;
            let db = load_result_csv(&b)?;
            if da.header != db.header {
                return Err(Error::Config(format!(
                    "column mismatch: {:?} vs {:?}",
                    da.header, db.header
                )));
            }
            if da.keys.len() != db.keys.len() {
                return Err(Error::LengthMismatch(da.keys.len(), db.keys.len()));
            }
            let excl = exclude
                .map(|s| -> Result<(Vec<f64>, f64), Error> {
                    let vals: Vec<f64> = s
                        .split(',')
                        .map(|p| {
                            p.trim()
                                .parse::<f64>()
                                .map_err(|_| Error::Config(format!("bad --exclude {s:?}")))
                        })
                        .collect::<Result<_, _>>()?;
                    if vals.len() < 2 {
                        return Err(Error::Config("--exclude needs center and radius".into()));
                    }
                    let (center, radius) = vals.split_at(vals.len() - 1);
                    Ok((center.to_vec(), radius[0]))
                })
                .transpose()?;

            let mut va = Vec::new();
            let mut vb = Vec::new();
            let mut skipped_absent = 0usize;
            let mut excluded = 0usize;
            for i in 0..da.keys.len() {
                for (ka, kb) in da.keys[i].iter().zip(&db.keys[i]) {
                    if (ka - kb).abs() > 1e-9 * ka.abs().max(1.0) {
                        return Err(Error::Config(format!(
                            "row {} keys differ: {:?} vs {:?}",
                            i + 2,
                            da.keys[i],
                            db.keys[i]
                        )));
                    }
                }
                if let Some((center, radius)) = &excl {
                    let d2: f64 = da.keys[i]
                        .iter()
                        .zip(center)
                        .map(|(k, c)| (k - c) * (k - c))
                        .sum();
                    if d2 < radius * radius {
                        excluded += 1;
                        continue;
                    }
                }
                match (da.values[i], db.values[i]) {
                    (Some(x), Some(y)) => {
                        va.push(x);
                        vb.push(y);
                    }
                    _ => skipped_absent += 1,
                }
            }
            let e = l2_relative_error(&va, &vb)?;
            let fr = frac(&va, &vb)?;
            sidecar.set("points_used", json!(va.len()));
            sidecar.set("points_excluded", json!(excluded));
            sidecar.set("points_absent", json!(skipped_absent));
            sidecar.set("e_l2", json!(e));
            sidecar.set("frac", json!(fr));
            println!("e_l2 = {e}");
            println!("frac = {fr}");
            let mut csv = CsvDoc::new(&["metric", "value"]);
            csv.row(vec!["e_l2".into(), fmt_f64(e)]);
            csv.row(vec!["frac".into(), fmt_f64(fr)]);
            if out.is_some() {
                Sink::new(out).write(&csv, &sidecar)?;
            }
            Ok(())
        }

        Command::Selfcheck { seed, jobs } => {
            setup_jobs(jobs);
            let ok = selfcheck(seed);
            if ok {
                Ok(())
            } else {
                Err(Error::SolveFailure("selfcheck failed".into()))
            }
        }
    }
}

fn selfcheck(seed: u64) -> bool {
    use rectroom::GammaPair;
    let mut all_ok = true;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("selfcheck {name}: {} — {detail}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    // Rigid walls: integer roots, exact normalization constants.
    let params = SolverParams { n_max: 6, ..Default::default() };
    match solve_axis(&GammaPair::rigid(), &params) {
        Ok(set) => {
            let ok = set.roots.len() == 6
                && set
                    .roots
                    .iter()
                    .enumerate()
                    .all(|(i, r)| (r.q_hat - Complex64::new((i + 1) as f64, 0.0)).norm() < 1e-12);
            report("rigid-walls", ok, format!("{} integer roots", set.roots.len()));
        }
        Err(e) => report("rigid-walls", false, e.to_string()),
    }

    // Reported cutoff values of the eigenvalue study.
    let kl = 2.0 * std::f64::consts::PI * 5000.0 / 343.0;
    let g_hard = GammaPair::new(
        Complex64::new(0.01, 0.01) * kl,
        Complex64::new(0.02, 0.0) * kl,
    );
    let g_soft = GammaPair::new(
        Complex64::new(0.1, 0.1) * kl,
        Complex64::new(0.2, 0.07) * kl,
    );
    let g_asym = GammaPair::new(
        Complex64::new(0.1, 0.06) * kl,
        Complex64::new(0.0, 0.0) * kl,
    );
    let cutoffs_ok = (g_hard.soft_wall_cutoff() - 0.49).abs() < 0.01
        && (g_soft.soft_wall_cutoff() - 5.05).abs() < 0.01
        && (g_asym.asymmetric_cutoff() - 3.40).abs() < 0.01;
    report(
        "cutoffs",
        cutoffs_ok,
        format!(
            "{:.3} / {:.3} / {:.3}",
            g_hard.soft_wall_cutoff(),
            g_soft.soft_wall_cutoff(),
            g_asym.asymmetric_cutoff()
        ),
    );

    // Study configurations: 9 roots each inside |q| <= 8.5.
    let params8 = SolverParams { n_max: 8, ..Default::default() };
    for (name, g) in [("hard", g_hard), ("soft", g_soft), ("asymmetric", g_asym)] {
        match solve_axis(&g, &params8) {
            Ok(set) => {
                let count = set.in_circle_count(8.5);
                report(
                    &format!("study-{name}"),
                    count == 9,
                    format!("{count} roots in the counting circle"),
                );
            }
            Err(e) => report(&format!("study-{name}"), false, e.to_string()),
        }
    }

    // Solver vs oracle on random configurations.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params10 = SolverParams { n_max: 10, ..Default::default() };
    let mut mismatches = 0usize;
    let cases = 20usize;
    for _ in 0..cases {
        let kl = rng.gen_range(1.0..=100.0);
        let mut beta = || {
            let modulus = rng.gen_range(0.0..=5.0);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(modulus, phase)
        };
        let g = GammaPair::new(beta() * kl, beta() * kl);
        let set = match solve_axis(&g, &params10) {
            Ok(s) => s,
            Err(_) => {
                mismatches += 1;
                continue;
            }
        };
        let im = fallback_im_bound(&g);
        let region = match SearchRegion::new(0.0, 11.0, -im, im) {
            Ok(r) => r,
            Err(_) => {
                mismatches += 1;
                continue;
            }
        };
        let enumeration = match enumerate_roots(&region, &g, 1e-10) {
            Ok(e) => e,
            Err(_) => {
                mismatches += 1;
                continue;
            }
        };
        let mut oracle: Vec<Complex64> = enumeration
            .roots
            .iter()
            .map(|&q| if q.re < -1e-4 || (q.re.abs() <= 1e-4 && q.im < 0.0) { -q } else { q })
            .filter(|q| q.norm() > 1e-4)
            .collect();
        oracle.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        oracle.dedup_by(|a, b| (*a - *b).norm() <= 1e-4);
        let complete = oracle
            .iter()
            .filter(|q| q.norm() <= 10.5)
            .all(|q| set.roots.iter().any(|r| (r.q_hat - q).norm() < 1e-8));
        if !complete {
            mismatches += 1;
        }
    }
    report(
        "oracle-equivalence",
        mismatches == 0,
        format!("{}/{cases} random configurations match (seed {seed})", cases - mismatches),
    );

    // Expansion vs exact 1D closed form.
    let room = RoomSpec::new(
        vec![rectroom::AxisBoundary::new(
            1.0,
            rectroom::Admittance::constant(Complex64::new(0.1, 0.1)),
            rectroom::Admittance::constant(Complex64::new(0.2, 0.07)),
        )
        .unwrap()],
        343.0,
    )
    .unwrap();
    let ctx = room.wave_context(1000.0).unwrap();
    let params = SolverParams { n_max: 117, ..Default::default() };
    let points: Vec<[f64; 3]> = (0..200)
        .map(|i| [-0.5 + (i as f64 + 0.5) / 200.0, 0.0, 0.0])
        .filter(|p| (p[0] + 0.3).abs() > 343.0 / 1000.0 / 4.0)
        .collect();
    match green_eval(&room, &ctx, [-0.3, 0.0, 0.0], &points, &params) {
        Ok(grid) => {
            let reference: Vec<Complex64> = points
                .iter()
                .map(|p| green_1d_closed_form(&room.axes[0], &ctx, -0.3, p[0]).unwrap())
                .collect();
            let err = l2_relative_error(&grid.values, &reference).unwrap();
            report("greens-1d", err < 1e-2, format!("relative L2 = {err:.3e}"));
        }
        Err(e) => report("greens-1d", false, e.to_string()),
    }

    let _ = room_hash(&room);
    all_ok
}
