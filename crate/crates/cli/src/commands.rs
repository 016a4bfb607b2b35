use std::fs;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use fpshift_core::expr::ParseError;
use fpshift_core::group::AxiomReport;
use fpshift_core::monotone::{certify_with, Certificate, CertifyError, CertifyOptions, Displacement};
use fpshift_core::orbit3::{closest_pair, obstruction_for_orbit, CylinderMap, ObstructionReport, Vec3};
use fpshift_core::qexact::{build_example, LevelReport, PeriodicScan, QexactError, QuadNum, StarWitness};
use fpshift_core::sampling::{LawReport, SampleConfig, GENERATOR};
use fpshift_core::tricolor::{Block, ColoringReport, ColoringScheme};
use fpshift_core::{parse_expr, ConjugacyError, ConjugacyMap, Grid, MonotoneMap1D, RebuiltGroup};

use crate::output::{csv, csv_num, emit, to_json};
use crate::{Format, MapArgs, Orbit3Args, OutputArgs, QexampleArgs, SampledArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    VerificationFailed,
    InputError,
}

impl Status {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::VerificationFailed
        }
    }
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> ExitCode {
        ExitCode::from(match s {
            Status::Pass => 0,
            Status::InputError => 1,
            Status::VerificationFailed => 2,
        })
    }
}

#[derive(Debug, Serialize)]
struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn parse(e: &ParseError) -> Self {
        Failure { kind: "ParseError", message: e.to_string() }
    }

    fn certify(e: &CertifyError) -> Self {
        let kind = match e {
            CertifyError::InvalidGrid { .. } => "InvalidGrid",
            CertifyError::Eval(_) => "EvalError",
            CertifyError::NotMonotone { .. } => "NotMonotone",
            CertifyError::FixedPointDetected { .. } => "FixedPointDetected",
            CertifyError::NotFixedPointFree { .. } => "NotFixedPointFree",
        };
        Failure { kind, message: e.to_string() }
    }

    fn conjugacy(e: &ConjugacyError) -> Self {
        let kind = match e {
            ConjugacyError::LadderCapExceeded { .. } => "LadderCapExceeded",
            ConjugacyError::LadderStalled { .. } => "LadderStalled",
            ConjugacyError::OutOfUnitInterval { .. } => "OutOfUnitInterval",
            ConjugacyError::NonFinite { .. } => "NonFinite",
            ConjugacyError::Eval(_) => "EvalError",
            ConjugacyError::Invert(_) => "InvertError",
        };
        Failure { kind, message: e.to_string() }
    }

    fn qexact(e: &QexactError) -> Self {
        let kind = match e {
            QexactError::DepthCapExceeded { .. } => "DepthCapExceeded",
            QexactError::InvalidLevel { .. } => "InvalidLevel",
            QexactError::ConstructionFailure { .. } => "ConstructionFailure",
            QexactError::OutsideDomain => "OutsideDomain",
        };
        Failure { kind, message: e.to_string() }
    }
}

/// Per-expression result: either the report or why it could not be produced.
#[derive(Serialize)]
#[serde(untagged)]
enum Entry<T> {
    Done(T),
    Failed { expression: String, pass: bool, error: Failure },
}

impl<T> Entry<T> {
    fn failed(expression: &str, error: Failure) -> Self {
        Entry::Failed { expression: expression.to_string(), pass: false, error }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generator: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a SampleConfig>,
    maps: Vec<Entry<T>>,
    pass: bool,
}

fn expressions(args: &MapArgs) -> Result<Vec<String>> {
    if let Some(f) = &args.f {
        return Ok(vec![f.clone()]);
    }
    let path = args.f_file.as_ref().expect("clap requires --f or --f-file");
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let exprs: Vec<String> =
        text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(String::from).collect();
    if exprs.is_empty() {
        bail!("{} contains no expressions", path.display());
    }
    Ok(exprs)
}

fn load_map(text: &str, args: &MapArgs) -> Result<MonotoneMap1D, Failure> {
    let expr = parse_expr(text).map_err(|e| Failure::parse(&e))?;
    let map = if args.assume_certified {
        MonotoneMap1D::assume_expr(&expr)
    } else {
        let options = CertifyOptions {
            grid: Grid::symmetric(args.grid_half_width, args.grid_points),
            ..CertifyOptions::default()
        };
        certify_with(&expr, &options)
    };
    map.map_err(|e| Failure::certify(&e))
}

fn sample_config(args: &SampledArgs) -> Result<SampleConfig> {
    let mut cfg = SampleConfig::default().with_samples(args.samples).with_tol(args.tol).with_seed(args.seed);
    if let Some(r) = &args.range {
        let (lo, hi) = (r[0], r[1]);
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            bail!("--range needs finite LO < HI, got {lo} {hi}");
        }
        cfg = cfg.with_range(lo, hi);
    }
    if !(cfg.tol.is_finite() && cfg.tol >= 0.0) {
        bail!("--tol must be finite and nonnegative");
    }
    Ok(cfg)
}

fn json_only(output: &OutputArgs, command: &str) -> Result<()> {
    if output.format == Format::Csv {
        bail!("{command} reports are JSON only; CSV is available for tricolor and orbit3");
    }
    Ok(())
}

/// Input errors outrank verification failures.
fn overall<T>(entries: &[(Entry<T>, Status)]) -> Status {
    entries.iter().map(|(_, s)| *s).max().unwrap_or(Status::Pass)
}

fn finish<T: Serialize>(
    command: &'static str,
    config: Option<&SampleConfig>,
    entries: Vec<(Entry<T>, Status)>,
    output: &OutputArgs,
) -> Result<Status> {
    let status = overall(&entries);
    let envelope = Envelope {
        command,
        generator: config.map(|_| GENERATOR),
        config,
        maps: entries.into_iter().map(|(e, _)| e).collect(),
        pass: status == Status::Pass,
    };
    emit(output.out.as_deref(), &to_json(&envelope)?)?;
    Ok(status)
}

#[derive(Serialize)]
struct CertifyReport {
    expression: String,
    certificate: Option<Certificate>,
    displacement: Displacement,
    pass: bool,
}

pub fn certify(args: &MapArgs) -> Result<Status> {
    json_only(&args.output, "certify")?;
    let entries = expressions(args)?
        .iter()
        .map(|text| match load_map(text, args) {
            Ok(map) => {
                let report = CertifyReport {
                    expression: text.clone(),
                    certificate: map.certificate().cloned(),
                    displacement: map.displacement(),
                    pass: true,
                };
                (Entry::Done(report), Status::Pass)
            }
            Err(e) => (Entry::failed(text, e), Status::InputError),
        })
        .collect();
    finish("certify", None, entries, &args.output)
}

#[derive(Serialize)]
struct RebuildReport {
    expression: String,
    certificate: Option<Certificate>,
    displacement: Displacement,
    order_reversing: bool,
    shift_element: f64,
    shift: LawReport,
    axioms: AxiomReport,
    pass: bool,
}

fn rebuild_one(text: &str, args: &SampledArgs, cfg: &SampleConfig) -> (Entry<RebuildReport>, Status) {
    let map = match load_map(text, &args.map) {
        Ok(m) => m,
        Err(e) => return (Entry::failed(text, e), Status::InputError),
    };
    let group = match RebuiltGroup::new(&map) {
        Ok(g) => g,
        Err(e) => return (Entry::failed(text, Failure::conjugacy(&e)), Status::InputError),
    };
    let shift = group.verify_shift(cfg);
    let axioms = group.verify_axioms(cfg);
    let pass = shift.pass && axioms.pass;
    let report = RebuildReport {
        expression: text.to_string(),
        certificate: map.certificate().cloned(),
        displacement: map.displacement(),
        order_reversing: group.conjugacy().is_order_reversing(),
        shift_element: group.shift_element(),
        shift,
        axioms,
        pass,
    };
    (Entry::Done(report), Status::from_pass(pass))
}

pub fn rebuild(args: &SampledArgs) -> Result<Status> {
    json_only(&args.map.output, "rebuild")?;
    let cfg = sample_config(args)?;
    let entries = expressions(&args.map)?.iter().map(|t| rebuild_one(t, args, &cfg)).collect();
    finish("rebuild", Some(&cfg), entries, &args.map.output)
}

#[derive(Serialize)]
struct TricolorReport {
    expression: String,
    range: [f64; 2],
    #[serde(skip_serializing_if = "Vec::is_empty")]
    blocks: Vec<Block>,
    coloring: ColoringReport,
    pass: bool,
}

fn tricolor_one(text: &str, args: &SampledArgs, cfg: &SampleConfig) -> (Entry<TricolorReport>, Status) {
    let map = match load_map(text, &args.map) {
        Ok(m) => m,
        Err(e) => return (Entry::failed(text, e), Status::InputError),
    };
    let conj = match ConjugacyMap::new(&map) {
        Ok(c) => c,
        Err(e) => return (Entry::failed(text, Failure::conjugacy(&e)), Status::InputError),
    };
    let scheme = ColoringScheme::new(&conj);
    let blocks = match scheme.emit_blocks(cfg.lo, cfg.hi) {
        Ok(b) => b,
        Err(e) => return (Entry::failed(text, Failure::conjugacy(&e)), Status::VerificationFailed),
    };
    let coloring = scheme.verify(cfg);
    let pass = coloring.pass;
    let report = TricolorReport { expression: text.to_string(), range: [cfg.lo, cfg.hi], blocks, coloring, pass };
    (Entry::Done(report), Status::from_pass(pass))
}

/// With `--format csv` the blocks go to the output and the JSON report to
/// stderr.
pub fn tricolor(args: &SampledArgs) -> Result<Status> {
    let cfg = sample_config(args)?;
    let exprs = expressions(&args.map)?;
    let output = &args.map.output;
    if output.format == Format::Json {
        let entries = exprs.iter().map(|t| tricolor_one(t, args, &cfg)).collect();
        return finish("tricolor", Some(&cfg), entries, output);
    }

    let entries: Vec<_> = exprs.iter().map(|t| tricolor_one(t, args, &cfg)).collect();
    let multi = entries.len() > 1;
    let header = if multi { "expression,lo,hi,color" } else { "lo,hi,color" };
    let mut rows = Vec::new();
    for (entry, _) in &entries {
        if let Entry::Done(r) = entry {
            for b in &r.blocks {
                let mut row = vec![csv_num(b.lo), csv_num(b.hi), b.color.to_string()];
                if multi {
                    row.insert(0, format!("\"{}\"", r.expression.replace('"', "\"\"")));
                }
                rows.push(row);
            }
        }
    }
    emit(output.out.as_deref(), &csv(header, rows))?;

    let status = overall(&entries);
    let summary = Envelope {
        command: "tricolor",
        generator: Some(GENERATOR),
        config: Some(&cfg),
        maps: entries
            .into_iter()
            .map(|(e, _)| match e {
                Entry::Done(mut r) => {
                    r.blocks.clear();
                    Entry::Done(r)
                }
                failed => failed,
            })
            .collect(),
        pass: status == Status::Pass,
    };
    eprint!("{}", to_json(&summary)?);
    Ok(status)
}

#[derive(Serialize)]
struct QexampleReport {
    command: &'static str,
    depth: usize,
    epsilon: QuadNum,
    epsilon_approx: f64,
    domains_disjoint: bool,
    ranges_disjoint: bool,
    levels: Vec<LevelReport>,
    witnesses: Vec<StarWitness>,
    periodic_scan: PeriodicScan,
    map: fpshift_core::qexact::ExampleMap,
    pass: bool,
}

#[derive(Serialize)]
struct QexampleFailure {
    command: &'static str,
    depth: usize,
    pass: bool,
    error: Failure,
}

pub fn qexample(args: &QexampleArgs) -> Result<Status> {
    json_only(&args.output, "qexample")?;
    let fail = |error: Failure, status: Status| -> Result<Status> {
        let report = QexampleFailure { command: "qexample", depth: args.depth, pass: false, error };
        emit(args.output.out.as_deref(), &to_json(&report)?)?;
        Ok(status)
    };
    let map = match build_example(args.depth) {
        Ok(m) => m,
        Err(e) => return fail(Failure::qexact(&e), Status::InputError),
    };
    let mut levels = Vec::new();
    let mut witnesses = Vec::new();
    for n in 1..map.depth() {
        match map.check_p123(n).and_then(|l| Ok((l, map.star_witness(n)?))) {
            Ok((l, w)) => {
                levels.push(l);
                witnesses.push(w);
            }
            Err(e) => return fail(Failure::qexact(&e), Status::VerificationFailed),
        }
    }
    let periodic_scan = map.no_periodic_scan(&map.default_samples(), args.max_period);
    let domains_disjoint = map.check_domains_disjoint();
    let ranges_disjoint = map.check_ranges_disjoint();
    let pass = domains_disjoint
        && ranges_disjoint
        && levels.iter().all(|l| l.pass)
        && witnesses.iter().all(|w| w.certified)
        && periodic_scan.pass;
    let report = QexampleReport {
        command: "qexample",
        depth: map.depth(),
        epsilon: map.epsilon().clone(),
        epsilon_approx: map.epsilon().to_f64(),
        domains_disjoint,
        ranges_disjoint,
        levels,
        witnesses,
        periodic_scan,
        map,
        pass,
    };
    emit(args.output.out.as_deref(), &to_json(&report)?)?;
    Ok(Status::from_pass(pass))
}

#[derive(Serialize)]
struct ClosestPairReport {
    i: usize,
    j: usize,
    gap: f64,
}

#[derive(Serialize)]
struct Orbit3Report {
    command: &'static str,
    start: Vec3,
    steps: usize,
    angle_radians: f64,
    closest_pair: Option<ClosestPairReport>,
    obstruction: Vec<ObstructionReport>,
}

/// Exit status is 0 whenever the orbit is computed; whether a witness exists
/// is data, not a check.
pub fn orbit3(args: &Orbit3Args) -> Result<Status> {
    if args.n < 1 {
        bail!("--n must be at least 1 so the orbit has two points");
    }
    if let Some(bad) = args.eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        bail!("--eps values must be positive, got {bad}");
    }
    let start = match &args.start {
        Some(s) => Vec3::new(s[0], s[1], s[2]),
        None => Vec3::new(1.0, 0.0, 0.0),
    };
    if ![start.x, start.y, start.z].iter().all(|c| c.is_finite()) {
        bail!("--start coordinates must be finite");
    }
    let map = CylinderMap::new();
    let points = map.orbit(start, args.n);
    let text = match args.output.format {
        Format::Csv => csv(
            "n,x,y,z",
            points.iter().enumerate().map(|(k, p)| vec![k.to_string(), csv_num(p.x), csv_num(p.y), csv_num(p.z)]),
        ),
        Format::Json => {
            let closest = closest_pair(&points);
            let report = Orbit3Report {
                command: "orbit3",
                start,
                steps: args.n,
                angle_radians: map.angle(),
                closest_pair: closest.map(|c| ClosestPairReport { i: c.i, j: c.j, gap: c.gap }),
                obstruction: obstruction_for_orbit(&points, closest, &args.eps),
            };
            to_json(&report)?
        }
    };
    emit(args.output.out.as_deref(), &text)?;
    Ok(Status::Pass)
}
