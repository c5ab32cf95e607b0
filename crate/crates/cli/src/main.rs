#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ricker_core::orbit::{classify_attractor, neimark_sacker_scan, simulate, ClassifyOptions};
use ricker_core::periodic::{corollary_shortcuts, find_artificial_cycles, solve_two_cycle};
use ricker_core::sweep::{
    run_sweep, write_boundaries_csv, write_curves_csv, write_orbit_csv, write_sweep_csv,
};
use ricker_core::{
    certify_constant, certify_periodic, solve_equilibrium, thresholds, AbsorbingBounds, Axis,
    Classification, Error, ModelParams, Params, SweepSpec,
};

/// Equilibria, 2-cycles, stability certificates and figure data for the delayed Ricker
/// map with constant or period-two stocking.
#[derive(Parser, Debug)]
#[command(name = "ricker-lab", version)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// File of `key=value` lines supplying flags not given on the command line.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Stocking {
    /// Constant stocking.
    #[arg(long)]
    h: Option<f64>,
    /// Stocking on even steps.
    #[arg(long)]
    h0: Option<f64>,
    /// Stocking on odd steps.
    #[arg(long)]
    h1: Option<f64>,
    /// Arbitrary periodic schedule, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["h", "h0", "h1"])]
    stocking: Option<Vec<f64>>,
}

impl Stocking {
    fn schedule(&self) -> Result<Vec<f64>, Error> {
        match (self.h, self.h0, self.h1, &self.stocking) {
            (Some(h), None, None, None) => Ok(vec![h]),
            (None, Some(h0), Some(h1), None) => Ok(vec![h0, h1]),
            (None, None, None, Some(s)) => Ok(s.clone()),
            _ => Err(Error::InvalidParams(
                "give either --h, or both --h0 and --h1, or --stocking".into(),
            )),
        }
    }

    fn params(&self, r: f64) -> Result<ModelParams, Error> {
        Params::new(r, self.schedule()?)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Constant,
    Periodic,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Equilibrium, Jacobian and local stability for constant stocking.
    #[command(allow_negative_numbers = true)]
    Equilibrium {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        h: f64,
    },
    /// The 2-cycle of period-two stocking and its local stability.
    #[command(allow_negative_numbers = true)]
    TwoCycle {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        h0: f64,
        #[arg(long)]
        h1: f64,
    },
    /// Global classification via the monotone embedding.
    #[command(allow_negative_numbers = true)]
    Certify {
        #[arg(long)]
        r: f64,
        #[command(flatten)]
        stocking: Stocking,
    },
    /// Verdict map over a parameter grid, as CSV.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[arg(long, value_enum, default_value = "constant")]
        mode: Mode,
        /// Fixed growth rate (periodic mode).
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        h_min: f64,
        #[arg(long, default_value_t = 10.0)]
        h_max: f64,
        #[arg(long, default_value_t = 200)]
        nh: usize,
        #[arg(long, default_value_t = 0.1)]
        r_min: f64,
        #[arg(long, default_value_t = 8.0)]
        r_max: f64,
        #[arg(long, default_value_t = 200)]
        nr: usize,
        /// Periodic mode: `h1` axis; defaults to the `h` axis.
        #[arg(long)]
        h1_min: Option<f64>,
        #[arg(long)]
        h1_max: Option<f64>,
        #[arg(long)]
        nh1: Option<usize>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Boundary curves file (constant mode); defaults to `<out>_boundaries.csv`.
        #[arg(long)]
        boundaries: Option<PathBuf>,
    },
    /// Orbit dump as CSV rows `n, x_n, x_{n-1}, parity`.
    #[command(allow_negative_numbers = true)]
    Orbit {
        #[arg(long)]
        r: f64,
        #[command(flatten)]
        stocking: Stocking,
        #[arg(long, default_value_t = 1.0)]
        x0: f64,
        #[arg(long, default_value_t = 1.0)]
        x_minus1: f64,
        /// Rows to emit.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Steps dropped before the first row.
        #[arg(long, default_value_t = 0)]
        transient: usize,
        /// Also label the attractor (printed to standard error).
        #[arg(long)]
        classify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate where a complex eigenvalue pair crosses the unit circle as r varies.
    #[command(allow_negative_numbers = true)]
    ScanNs {
        #[command(flatten)]
        stocking: Stocking,
        #[arg(long)]
        r_min: f64,
        #[arg(long)]
        r_max: f64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Residual grid whose zero contours are the two curves crossing at the embedded
    /// fixed points (constant stocking) or at the 2-cycle and artificial cycles (period two).
    #[command(allow_negative_numbers = true)]
    Curves {
        #[arg(long)]
        r: f64,
        #[command(flatten)]
        stocking: Stocking,
        #[arg(long, default_value_t = 0.5)]
        x_min: f64,
        #[arg(long, default_value_t = 8.0)]
        x_max: f64,
        /// `y` range; defaults to the `x` range.
        #[arg(long)]
        y_min: Option<f64>,
        #[arg(long)]
        y_max: Option<f64>,
        /// Grid points per axis.
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solutions of the folded fixed-point system other than the 2-cycle.
    #[command(allow_negative_numbers = true)]
    ArtificialCycles {
        #[arg(long)]
        r: f64,
        #[arg(long)]
        h0: f64,
        #[arg(long)]
        h1: f64,
    },
}

enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Splices `--key value` pairs from the config file into `args` for keys that are not
/// already present. Values of `true`/`false` become bare switches.
fn apply_config(mut args: Vec<String>) -> Result<Vec<String>, String> {
    let pos = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(args) };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args.get(pos + 1).cloned().ok_or("--config needs a file")?,
    };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{path}:{}: expected key=value", lineno + 1))?;
        let flag = format!("--{}", key.trim().replace('_', "-"));
        let given = args
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        match value.trim() {
            "true" => args.push(flag),
            "false" => {}
            v => {
                args.push(flag);
                args.push(v.to_string());
            }
        }
    }
    Ok(args)
}

macro_rules! eig_json {
    ($e:expr) => {{
        let e = $e;
        (json!([e[0].re, e[1].re]), json!([e[0].im, e[1].im]))
    }};
}

fn bounds_json(b: Option<AbsorbingBounds>) -> Value {
    match b {
        Some(AbsorbingBounds::Square { lo, hi }) => json!({ "lo": lo, "hi": hi }),
        Some(AbsorbingBounds::EvenOdd { even, odd }) => json!({ "even": even, "odd": odd }),
        None => Value::Null,
    }
}

fn bounds_text(b: Option<AbsorbingBounds>) -> String {
    match b {
        Some(AbsorbingBounds::Square { lo, hi }) => format!(" [{lo:.6}, {hi:.6}]"),
        Some(AbsorbingBounds::EvenOdd { even, odd }) => format!(
            " even [{:.6}, {:.6}] odd [{:.6}, {:.6}]",
            even[0], even[1], odd[0], odd[1]
        ),
        None => String::new(),
    }
}

fn emit(json_mode: bool, value: Value, text: String) {
    let body = if json_mode {
        serde_json::to_string_pretty(&value).expect("json")
    } else {
        text
    };
    // a closed pipe (e.g. `| head`) is not an error worth reporting
    let _ = writeln!(io::stdout().lock(), "{body}");
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn boundaries_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    out.with_file_name(format!("{stem}_boundaries.csv"))
}

fn certify_json(c: &Classification) -> Value {
    json!({
        "verdict": c.verdict.tag(),
        "local": c.local.map(|l| l.label()),
        "provenance": c.provenance,
        "witness": c.witness.map(|w| json!({ "a": w.a, "b": w.b })),
        "bounds": bounds_json(c.verdict.bounds()),
        "notes": c.notes,
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let js = cli.json;
    match cli.command {
        Command::Equilibrium { r, h } => {
            let p = Params::constant(r, h)?;
            let rep = solve_equilibrium(&p)?;
            let (re, im) = eig_json!(rep.eigenvalues);
            let th = thresholds(h).ok();
            let value = json!({
                "r": r, "h": h, "y_bar": rep.y_bar, "trace": rep.trace, "det": rep.det,
                "eig_re": re, "eig_im": im, "verdict": rep.local.label(), "residual": rep.residual,
                "r1": th.map(|t| t.r1), "r2": th.map(|t| t.r2),
            });
            let [l0, l1] = rep.eigenvalues;
            let text = format!(
                "y_bar = {:.10}\ntrace = {:.10}  det = {:.10}\neigenvalues = {:.6}{:+.6}i, {:.6}{:+.6}i\nverdict = {}\nresidual = {:.3e}",
                rep.y_bar, rep.trace, rep.det, l0.re, l0.im, l1.re, l1.im, rep.local.label(), rep.residual
            );
            emit(js, value, text);
        }
        Command::TwoCycle { r, h0, h1 } => {
            let p = Params::two_periodic(r, h0, h1)?;
            let rep = solve_two_cycle(&p)?;
            let shortcuts = corollary_shortcuts(&rep, &p)?;
            let (re, im) = eig_json!(rep.eigenvalues);
            let residual = rep.residuals[0].max(rep.residuals[1]);
            let value = json!({
                "r": r, "h0": h0, "h1": h1, "z0": rep.z0, "z1": rep.z1,
                "trace": rep.trace, "det": rep.det, "eig_re": re, "eig_im": im,
                "verdict": rep.local.label(), "residual": residual, "shortcuts": shortcuts,
            });
            let [l0, l1] = rep.eigenvalues;
            let text = format!(
                "z0 = {:.10}  z1 = {:.10}\ntrace = {:.10}  det = {:.10}\neigenvalues = {:.6}{:+.6}i, {:.6}{:+.6}i\nverdict = {}\nresidual = {:.3e}",
                rep.z0, rep.z1, rep.trace, rep.det, l0.re, l0.im, l1.re, l1.im, rep.local.label(), residual
            );
            emit(js, value, text);
        }
        Command::Certify { r, stocking } => {
            let p = stocking.params(r)?;
            let c = match p.period() {
                1 => certify_constant(&p)?,
                2 => certify_periodic(&p)?,
                n => {
                    return Err(Error::InvalidParams(format!(
                        "certification covers periods 1 and 2, got {n}"
                    ))
                    .into())
                }
            };
            let mut value = certify_json(&c);
            value["r"] = json!(r);
            if p.is_constant() {
                value["h"] = json!(p.h(0));
            } else {
                value["h0"] = json!(p.h(0));
                value["h1"] = json!(p.h(1));
            }
            let mut text = format!(
                "{}{}\nprovenance: {}",
                c.verdict.tag(),
                bounds_text(c.verdict.bounds()),
                c.provenance.join(", ")
            );
            if let Some(l) = c.local {
                text.push_str(&format!("\nlocal: {}", l.label()));
            }
            if let Some(w) = c.witness {
                text.push_str(&format!("\nwitness box: a = {:.6}, b = {:.6}", w.a, w.b));
            }
            for n in &c.notes {
                text.push_str(&format!("\nnote: {n}"));
            }
            emit(js, value, text);
        }
        Command::Sweep {
            mode,
            r,
            h_min,
            h_max,
            nh,
            r_min,
            r_max,
            nr,
            h1_min,
            h1_max,
            nh1,
            out,
            boundaries,
        } => {
            let threads = std::env::var("RICKER_LAB_THREADS")
                .ok()
                .map(|v| {
                    v.parse::<usize>().map_err(|_| {
                        Error::InvalidParams(format!("RICKER_LAB_THREADS={v} is not a count"))
                    })
                })
                .transpose()?;
            let h_axis = Axis::new(h_min, h_max, nh)?;
            let spec = match mode {
                Mode::Constant => SweepSpec::Constant {
                    h: h_axis,
                    r: Axis::new(r_min, r_max, nr)?,
                },
                Mode::Periodic => {
                    let r =
                        r.ok_or_else(|| Error::InvalidParams("periodic sweep needs --r".into()))?;
                    if !(r > 0.0) {
                        return Err(
                            Error::InvalidParams(format!("r must be positive, got {r}")).into()
                        );
                    }
                    let h1 = Axis::new(
                        h1_min.unwrap_or(h_min),
                        h1_max.unwrap_or(h_max),
                        nh1.unwrap_or(nh),
                    )?;
                    SweepSpec::Periodic { r, h0: h_axis, h1 }
                }
            };
            let cells = run_sweep(&spec, threads)?;
            write_sweep_csv(&cells, mode == Mode::Periodic, open_out(&out)?)?;
            if mode == Mode::Constant {
                let target = boundaries.or_else(|| out.as_deref().map(boundaries_path));
                if let Some(path) = target {
                    write_boundaries_csv(&h_axis.values(), BufWriter::new(File::create(path)?))?;
                }
            }
        }
        Command::Orbit {
            r,
            stocking,
            x0,
            x_minus1,
            n,
            transient,
            classify,
            out,
        } => {
            let p = stocking.params(r)?;
            if n == 0 {
                return Err(Error::InvalidParams("--n must be at least 1".into()).into());
            }
            let orbit = simulate(&p, x0, x_minus1, transient + n)?;
            let prev = if transient == 0 {
                x0
            } else {
                orbit[transient - 1]
            };
            write_orbit_csv(transient + 1, prev, &orbit[transient..], open_out(&out)?)?;
            if classify {
                let res = classify_attractor(&p, x0, x_minus1, &ClassifyOptions::default())?;
                eprintln!("attractor: {}", res.attractor.label());
            }
        }
        Command::ScanNs {
            stocking,
            r_min,
            r_max,
            steps,
        } => {
            let schedule = stocking.schedule()?;
            let c =
                neimark_sacker_scan(|r| Params::new(r, schedule.clone()), (r_min, r_max), steps)?;
            let value = json!({
                "r": c.s, "r_lo": c.s_lo, "r_hi": c.s_hi, "modulus": c.modulus, "argument": c.argument,
            });
            let text = format!(
                "crossing at r = {:.9} (bracket [{:.10}, {:.10}])\nmodulus = {:.9}  argument = {:.6}",
                c.s, c.s_lo, c.s_hi, c.modulus, c.argument
            );
            emit(js, value, text);
        }
        Command::Curves {
            r,
            stocking,
            x_min,
            x_max,
            y_min,
            y_max,
            n,
            out,
        } => {
            let p = stocking.params(r)?;
            let x = Axis::new(x_min, x_max, n)?;
            let y = Axis::new(y_min.unwrap_or(x_min), y_max.unwrap_or(x_max), n)?;
            write_curves_csv(&p, &x, &y, open_out(&out)?)?;
        }
        Command::ArtificialCycles { r, h0, h1 } => {
            let p = Params::two_periodic(r, h0, h1)?;
            let set = find_artificial_cycles(&p)?;
            let cycles: Vec<[f64; 4]> = set.cycles.iter().map(|q| q.to_array()).collect();
            let value = json!({
                "r": r, "h0": h0, "h1": h1, "count": set.count, "cycles": cycles,
                "two_cycle": set.two_cycle, "resolution": set.resolution,
            });
            let mut text = format!(
                "{} artificial cycle(s) at scan resolution {:.3e}",
                set.count, set.resolution
            );
            if let Some([z0, z1]) = set.two_cycle {
                text.push_str(&format!("\n2-cycle: ({z0:.6}, {z1:.6})"));
            }
            for q in &set.cycles {
                text.push_str(&format!(
                    "\n({:.6}, {:.6}, {:.6}, {:.6})",
                    q.x, q.y, q.u, q.v
                ));
            }
            emit(js, value, text);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match apply_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
