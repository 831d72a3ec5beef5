//! `gasurf` command line: CSV convergence tables and partition reports.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::estimators::{
    self, area_estimate_balanced, area_estimate_naive, area_integral_oracle, balanced_mean_bivector,
    generalized_balanced_bivector, jacobian_estimate, mean_bivector_naive, EstimatorOptions,
};
use crate::ga::{self, Multivector};
use crate::geom::{self, OrientedTriangle2, Point2, Vertex};
use crate::numfmt::fmt_g17;
use crate::partition::{
    refine_times, schwarz_fourth_point, schwarz_lantern_partition, schwarz_local_triangle, triangulate, validate_partition,
    Partition, Polygon2,
};
use crate::surfaces::{make_cylinder, parse_surface, parse_transform, Surface};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "gasurf", version, about = "Inscribed-triangle estimators of tangent bivectors, Jacobians and surface area")]
pub struct Cli {
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for per-triangle evaluation. Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Naive and balanced mean bivectors against the tangent bivector.
    Tangent(TangentArgs),
    /// Balanced and naive area sums over refined partitions.
    Area(AreaArgs),
    /// Jacobian determinant estimates on shrinking triangles.
    Jacobian(JacobianArgs),
    /// Checks a partition for degeneracy, orientation, overlap and balance.
    Validate(ValidateArgs),
    /// Reproduces the Schwarz cylinder tables in one long-format CSV.
    SchwarzDemo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Schwarz triangles `[0, (π/m, 1/2n), (-π/m, 1/2n)]` translated to `--at`.
    Schwarz,
    /// A fixed scalene shape scaled by `1/m`.
    Shrink,
}

#[derive(Debug, Args)]
pub struct TangentArgs {
    #[arg(long, default_value = "cylinder(rho=1)")]
    pub surface: String,
    /// `n=m`, `n=m^2` or `n=m^3`.
    #[arg(long, default_value = "n=m")]
    pub schwarz: String,
    /// `lo:hi` (doubling), a comma list, or one value.
    #[arg(long, default_value = "4:256")]
    pub m: String,
    #[arg(long, value_enum, default_value_t = Family::Schwarz)]
    pub family: Family,
    /// Base point `u,v`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub at: String,
    /// Accept unbalanced vertices up to this ratio.
    #[arg(long)]
    pub relaxed: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Region {
    /// `x0,y0,x1,y1`.
    #[arg(long, group = "region", allow_hyphen_values = true)]
    pub rect: Option<String>,
    /// `x,y;x,y;...`, counterclockwise or clockwise.
    #[arg(long, group = "region", allow_hyphen_values = true)]
    pub polygon: Option<String>,
    /// `m=<schedule>,n=<int|m|m^2|m^3>,h=<height>`.
    #[arg(long, group = "region")]
    pub lantern: Option<String>,
}

#[derive(Debug, Args)]
pub struct AreaArgs {
    #[arg(long, default_value = "cylinder(rho=1)")]
    pub surface: String,
    #[command(flatten)]
    pub region: Region,
    /// Midpoint refinements `0..=levels` of the triangulated polygon.
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    #[arg(long)]
    pub relaxed: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub oracle_rtol: f64,
    /// Also write the finest partition as CSV.
    #[arg(long)]
    pub partition_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct JacobianArgs {
    /// `identity` or `custom(<expr>,<expr>)`.
    #[arg(long)]
    pub transform: String,
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub at: String,
    #[arg(long, default_value = "4:1024")]
    pub m: String,
    #[arg(long)]
    pub relaxed: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub region: Region,
    #[arg(long, default_value_t = 0)]
    pub levels: usize,
    /// Partition CSV to check against the region instead of triangulating it.
    #[arg(long)]
    pub partition: Option<PathBuf>,
}

/// A failed run, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidArgument(_)
            | Error::InvalidPolygon(_)
            | Error::DimensionOutOfRange(_)
            | Error::IndexOutOfRange(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses `lo:hi` (powers of two from `lo`), `a,b,c` or a single integer.
pub fn parse_schedule(s: &str) -> CliResult<Vec<u64>> {
    let bad = || config(format!("bad schedule `{s}`"));
    let out = if let Some((lo, hi)) = s.split_once(':') {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        std::iter::successors(Some(lo), |&m| m.checked_mul(2)).take_while(|&m| m <= hi).collect()
    } else {
        s.split(',').map(|t| t.trim().parse::<u64>().map_err(|_| bad())).collect::<CliResult<Vec<_>>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

/// The exponent `k` in `n = m^k`.
pub fn parse_regime(s: &str) -> CliResult<u32> {
    match s.trim().replace(' ', "").as_str() {
        "n=m" | "n=m^1" => Ok(1),
        "n=m^2" => Ok(2),
        "n=m^3" => Ok(3),
        _ => Err(config(format!("unknown Schwarz regime `{s}` (use n=m, n=m^2 or n=m^3)"))),
    }
}

fn n_for(m: u64, k: u32) -> CliResult<u64> {
    m.checked_pow(k).ok_or_else(|| config(format!("m={m} too large for n=m^{k}")))
}

fn parse_floats(s: &str, sep: char, count: usize, what: &str) -> CliResult<Vec<f64>> {
    let v: Vec<f64> = s
        .split(sep)
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| config(format!("bad {what} `{s}`")))?;
    if v.len() != count || v.iter().any(|x| !x.is_finite()) {
        return Err(config(format!("bad {what} `{s}`: expected {count} numbers")));
    }
    Ok(v)
}

pub fn parse_point(s: &str) -> CliResult<Point2> {
    let v = parse_floats(s, ',', 2, "point")?;
    Ok(Point2::new(v[0], v[1]))
}

pub fn parse_polygon(s: &str) -> CliResult<Polygon2> {
    let pts = s
        .split(';')
        .filter(|t| !t.trim().is_empty())
        .map(parse_point)
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Polygon2::new(pts)?)
}

pub fn parse_rect(s: &str) -> CliResult<Polygon2> {
    let v = parse_floats(s, ',', 4, "rectangle")?;
    Ok(Polygon2::rectangle(v[0], v[1], v[2], v[3])?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LanternSpec {
    pub m: Vec<u64>,
    /// `n = m^k` when `Ok(k)`, a fixed `n` when `Err(n)`.
    pub n: std::result::Result<u32, u64>,
    pub height: f64,
}

pub fn parse_lantern(s: &str) -> CliResult<LanternSpec> {
    let mut m = None;
    let mut n = None;
    let mut height = 1.0;
    // the schedule may itself contain commas, so split on known keys
    let mut rest = s.trim();
    while !rest.is_empty() {
        let (key, tail) = rest.split_once('=').ok_or_else(|| config(format!("bad lantern spec `{s}`")))?;
        let next = ["m=", "n=", "h="]
            .iter()
            .filter_map(|k| tail.find(&format!(",{k}")))
            .min()
            .unwrap_or(tail.len());
        let value = &tail[..next];
        rest = tail[next..].trim_start_matches(',');
        match key.trim() {
            "m" => m = Some(parse_schedule(value)?),
            "n" => {
                n = Some(match value.trim() {
                    "m" => Ok(1),
                    "m^2" => Ok(2),
                    "m^3" => Ok(3),
                    v => Err(v.parse::<u64>().map_err(|_| config(format!("bad lantern n `{v}`")))?),
                })
            }
            "h" => {
                height = value.trim().parse().map_err(|_| config(format!("bad lantern height `{value}`")))?
            }
            k => return Err(config(format!("unknown lantern key `{k}`"))),
        }
    }
    let m = m.ok_or_else(|| config("lantern spec needs m="))?;
    Ok(LanternSpec { m, n: n.unwrap_or(Ok(1)), height })
}

impl LanternSpec {
    fn n_for(&self, m: u64) -> CliResult<u64> {
        match self.n {
            Ok(k) => n_for(m, k),
            Err(n) if n > 0 => Ok(n),
            Err(_) => Err(config("lantern n must be positive")),
        }
    }
}

fn bivector_names(dim: usize) -> Vec<String> {
    ga::bivector_pairs(dim).into_iter().map(|(j, k)| ga::blade_name(ga::bivector_mask(j, k))).collect()
}

fn push_row(out: &mut String, cells: impl IntoIterator<Item = String>) {
    let row: Vec<String> = cells.into_iter().collect();
    out.push_str(&row.join(","));
    out.push('\n');
}

fn g(x: f64) -> String {
    fmt_g17(x)
}

fn opts(relaxed: Option<f64>) -> CliResult<EstimatorOptions> {
    match relaxed {
        None => Ok(EstimatorOptions::default()),
        Some(k) if k >= 1.0 && k.is_finite() => Ok(EstimatorOptions::relaxed(k)),
        Some(k) => Err(config(format!("--relaxed {k}: kappa must be at least 1"))),
    }
}

fn local_order(prev: Option<(f64, f64)>, x: f64, err: f64) -> String {
    prev.and_then(|(px, pe)| estimators::loglog_fit(&[px, x], &[pe, err]))
        .map(|(p, _)| g(p))
        .unwrap_or_default()
}

fn shrink_triangle(at: Point2, h: f64) -> OrientedTriangle2 {
    OrientedTriangle2::new(at, at + Point2::new(h, 0.0), at + Point2::new(0.3 * h, 0.8 * h))
}

pub fn cmd_tangent(a: &TangentArgs) -> CliResult<String> {
    let s = parse_surface(&a.surface)?;
    let k = parse_regime(&a.schwarz)?;
    let ms = parse_schedule(&a.m)?;
    let at = parse_point(&a.at)?;
    let o = opts(a.relaxed)?;
    let names = bivector_names(s.dim());
    let exact = s.tangent_bivector(at)?;

    let mut out = String::new();
    let mut header = vec!["m".to_string(), "n".to_string(), "vertex".to_string()];
    for prefix in ["naive", "balanced", "exact"] {
        header.extend(names.iter().map(|c| format!("{prefix}_{c}")));
    }
    header.extend(["naive_error", "balanced_error", "balanced_local_order"].map(String::from));
    push_row(&mut out, header);

    let mut prev = None;
    for m in ms {
        let n = n_for(m, k)?;
        let (t, which) = match a.family {
            Family::Schwarz => (schwarz_local_triangle(m, n)?.translated(at), Vertex::A),
            Family::Shrink => {
                let t = shrink_triangle(at, 1.0 / m as f64);
                (t, geom::balanced_vertex_choice(&t)?)
            }
        };
        let naive = mean_bivector_naive(&s, &t)?;
        let bal = balanced_mean_bivector(&s, &t, which, &o)?.value;
        let en = ga::norm(&(&naive - &exact));
        let eb = ga::norm(&(&bal - &exact));
        let mut row = vec![m.to_string(), n.to_string(), which.label().to_string()];
        for mv in [&naive, &bal, &exact] {
            row.extend(mv.bivector_components().into_iter().map(g));
        }
        row.extend([g(en), g(eb), local_order(prev, m as f64, eb)]);
        prev = Some((m as f64, eb));
        push_row(&mut out, row);
    }
    Ok(out)
}

fn region_polygon(r: &Region) -> CliResult<Option<Polygon2>> {
    match (&r.rect, &r.polygon) {
        (Some(s), _) => Ok(Some(parse_rect(s)?)),
        (_, Some(s)) => Ok(Some(parse_polygon(s)?)),
        _ => Ok(None),
    }
}

/// Area of the cylinder-like reference for a lantern: the oracle integral
/// over `[0, 2π] × [0, h]`.
fn lantern_reference(s: &Surface, height: f64, rtol: f64) -> CliResult<f64> {
    let rect = Polygon2::rectangle(0.0, 0.0, 2.0 * PI, height)?;
    Ok(area_integral_oracle(s, &rect, rtol)?)
}

pub fn cmd_area(a: &AreaArgs) -> CliResult<(String, Option<Partition>)> {
    let s = parse_surface(&a.surface)?;
    let o = opts(a.relaxed)?;
    if a.oracle_rtol.is_nan() || a.oracle_rtol <= 0.0 {
        return Err(config("--oracle-rtol must be positive"));
    }
    let mut out = String::new();
    push_row(
        &mut out,
        [
            "level", "m", "n", "triangles", "mesh_norm", "balanced", "naive", "oracle", "balanced_error",
            "naive_error", "balanced_local_order",
        ]
        .map(String::from),
    );

    let mut last = None;
    let mut prev = None;
    let mut emit = |out: &mut String, level: String, m: String, n: String, p: &Partition, oracle: f64| -> CliResult<()> {
        let bal = area_estimate_balanced(&s, p, &o)?;
        let naive = area_estimate_naive(&s, p)?;
        let eb = (bal - oracle).abs();
        let h = p.mesh_norm();
        push_row(
            out,
            [
                level,
                m,
                n,
                p.len().to_string(),
                g(h),
                g(bal),
                g(naive),
                g(oracle),
                g(eb),
                g((naive - oracle).abs()),
                local_order(prev, h, eb),
            ],
        );
        prev = Some((h, eb));
        Ok(())
    };

    if let Some(spec) = &a.region.lantern {
        let l = parse_lantern(spec)?;
        let oracle = lantern_reference(&s, l.height, a.oracle_rtol)?;
        for &m in &l.m {
            let n = l.n_for(m)?;
            let p = schwarz_lantern_partition(m, n, l.height)?;
            emit(&mut out, "0".into(), m.to_string(), n.to_string(), &p, oracle)?;
            last = Some(p);
        }
    } else {
        let poly = region_polygon(&a.region)?.ok_or_else(|| config("one of --rect, --polygon, --lantern is required"))?;
        let oracle = area_integral_oracle(&s, &poly, a.oracle_rtol)?;
        let mut p = triangulate(&poly)?;
        for level in 0..=a.levels {
            if level > 0 {
                p = refine_times(&p, 1);
            }
            emit(&mut out, level.to_string(), String::new(), String::new(), &p, oracle)?;
        }
        last = Some(p);
    }
    Ok((out, last))
}

pub fn cmd_jacobian(a: &JacobianArgs) -> CliResult<String> {
    let f = parse_transform(&a.transform)?;
    let at = parse_point(&a.at)?;
    let o = opts(a.relaxed)?;
    let exact = f.jacobian(at)?;
    let ms = parse_schedule(&a.m)?;
    let mut table = estimators::EstimateTable::new(vec!["det".into()]);
    // rows ordered by decreasing diameter
    for m in ms {
        let h = 1.0 / m as f64;
        let t = shrink_triangle(at, h);
        let which = geom::balanced_vertex_choice(&t)?;
        let est = jacobian_estimate(&f, &t, which, &o)?;
        table.push(estimators::EstimateRow::new(format!("m={m}"), t.diameter(), vec![est], vec![exact]));
    }
    Ok(table.to_csv())
}

pub fn cmd_validate(a: &ValidateArgs) -> CliResult<(String, bool)> {
    let (p, poly) = if let Some(spec) = &a.region.lantern {
        let l = parse_lantern(spec)?;
        let [m] = l.m[..] else {
            return Err(config("validate takes a single lantern m"));
        };
        let p = schwarz_lantern_partition(m, l.n_for(m)?, l.height)?;
        (p, Polygon2::rectangle(0.0, 0.0, 2.0 * PI, l.height)?)
    } else {
        let poly = region_polygon(&a.region)?.ok_or_else(|| config("one of --rect, --polygon, --lantern is required"))?;
        let p = match &a.partition {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
                Partition::from_csv(&text)?
            }
            None => refine_times(&triangulate(&poly)?, a.levels),
        };
        (p, poly)
    };
    let report = validate_partition(&p, &poly);
    Ok((report.to_csv(), report.passed()))
}

/// Long-format CSV `experiment,m,n,quantity,value` covering the Schwarz
/// triangle regimes, the non-mirror fourth point, and the lantern.
pub fn cmd_schwarz_demo() -> CliResult<String> {
    let s = make_cylinder(1.0)?;
    let o = EstimatorOptions::default();
    let mut out = String::from("experiment,m,n,quantity,value\n");
    let mut put = |exp: &str, m: u64, n: u64, q: &str, v: f64| {
        let _ = writeln!(out, "{exp},{m},{n},{q},{}", g(v));
    };
    let ms = parse_schedule("4:256")?;
    let comps = |b: &Multivector| [b.bivector_coeff(1, 2), b.bivector_coeff(1, 3), b.bivector_coeff(2, 3)];
    let names = ["e12", "e13", "e23"];

    for (k, exp) in [(1u32, "tangent_n=m"), (2, "tangent_n=m^2"), (3, "tangent_n=m^3")] {
        for &m in &ms {
            let n = n_for(m, k)?;
            let t = schwarz_local_triangle(m, n)?;
            let naive = mean_bivector_naive(&s, &t)?;
            let bal = balanced_mean_bivector(&s, &t, Vertex::A, &o)?.value;
            for (name, v) in names.iter().zip(comps(&naive)) {
                put(exp, m, n, &format!("naive_{name}"), v);
            }
            for (name, v) in names.iter().zip(comps(&bal)) {
                put(exp, m, n, &format!("balanced_{name}"), v);
            }
            let exact = s.tangent_bivector(t.a)?;
            put(exp, m, n, "naive_error", ga::norm(&(&naive - &exact)));
            put(exp, m, n, "balanced_error", ga::norm(&(&bal - &exact)));
        }
    }

    for &m in &ms {
        let (t, d) = schwarz_fourth_point(m, m)?;
        let r = generalized_balanced_bivector(&s, &t, d, &o)?;
        for (name, v) in names.iter().zip(comps(&r.value)) {
            put("fourth_point", m, m, &format!("estimate_{name}"), v);
        }
        put("fourth_point", m, m, "ratio", r.ratio);
        put("fourth_point", m, m, "denominator", r.denominator);
        let exact = s.tangent_bivector(t.b)?;
        put("fourth_point", m, m, "error", ga::norm(&(&r.value - &exact)));
    }

    for m in [4u64, 8, 16, 32] {
        let n = m * m * m;
        let p = schwarz_lantern_partition(m, n, 1.0)?;
        let bal = area_estimate_balanced(&s, &p, &o)?;
        let naive = area_estimate_naive(&s, &p)?;
        let one = estimators::naive_area_term(&s, &p.triangles()[0])?;
        put("lantern", m, n, "balanced", bal);
        put("lantern", m, n, "naive", naive);
        put("lantern", m, n, "naive_representative", one * p.len() as f64);
        put("lantern", m, n, "reference", 2.0 * PI);
    }
    Ok(out)
}

fn write_output(path: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| config(format!("cannot write {}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| config(format!("stdout: {e}")))
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Tangent(a) => write_output(cli.out.as_ref(), &cmd_tangent(a)?),
        Command::Area(a) => {
            let (csv, finest) = cmd_area(a)?;
            if let (Some(path), Some(p)) = (&a.partition_out, finest) {
                std::fs::write(path, p.to_csv()).map_err(|e| config(format!("cannot write {}: {e}", path.display())))?;
            }
            write_output(cli.out.as_ref(), &csv)
        }
        Command::Jacobian(a) => write_output(cli.out.as_ref(), &cmd_jacobian(a)?),
        Command::Validate(a) => {
            let (csv, passed) = cmd_validate(a)?;
            write_output(cli.out.as_ref(), &csv)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Numerical("partition failed validation".into()))
            }
        }
        Command::SchwarzDemo => write_output(cli.out.as_ref(), &cmd_schwarz_demo()?),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.threads {
        Some(0) => Err(config("--threads must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(config(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("gasurf: {e}");
            e.exit_code()
        }
    }
}
