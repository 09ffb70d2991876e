use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use qcube::generators::{generate as build, FamilySpec, Kind};
use qcube::influence::{fourier_weights, influence_profile, InfluenceProfile, WeightSpectrum};
use qcube::io::{self, Format};
use qcube::laws::{self, Analysis, InequalityReport, Law, LawParams, Verdict};
use qcube::semigroup::noise_stability;
use qcube::{QOperator, MAX_QUBITS};

use crate::{AnalyzeArgs, GenerateArgs, LawArgs, SweepArgs, VerifyArgs};

/// `QCUBE_MAX_N` may lower the qubit cap, never raise it.
fn max_n() -> usize {
    std::env::var("QCUBE_MAX_N")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map_or(MAX_QUBITS, |v| v.min(MAX_QUBITS))
}

fn check_cap(n: usize) -> Result<()> {
    let cap = max_n();
    if n > cap {
        bail!("n = {n} exceeds the qubit cap {cap}");
    }
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn load(path: &Path) -> Result<QOperator> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let op = io::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    check_cap(op.n())?;
    Ok(op)
}

pub fn generate(args: GenerateArgs) -> Result<ExitCode> {
    let kind: Kind = args.kind.parse()?;
    let n = match (args.n, &args.table, &args.word) {
        (Some(n), _, _) => n,
        (None, Some(t), _) if t.len().is_power_of_two() => t.len().trailing_zeros() as usize,
        (None, _, Some(w)) => w.len(),
        _ => bail!("--n is required for kind {}", kind.name()),
    };
    check_cap(n)?;
    let format = match args.format.as_str() {
        "pauli" => Format::Pauli,
        "matrix" => Format::Matrix,
        other => bail!("unknown format `{other}`"),
    };
    let mut spec = FamilySpec::new(kind, n, args.seed);
    spec.extra.table = args.table;
    spec.extra.word = args.word;
    spec.extra.degree = args.degree;
    spec.extra.rank = args.rank;
    spec.extra.corruption = args.corruption;
    spec.extra.qubit = args.qubit;
    let op = build(&spec)?;
    let mut text = io::to_json(&op, format);
    text.push('\n');
    emit(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct SpectrumSummary {
    hermitian: bool,
    /// `τ(A)` as `[re, im]`.
    trace: [f64; 2],
    norm2_sq: f64,
    operator_norm: f64,
    /// Eigenvalues when Hermitian, singular values otherwise; descending.
    max_value: f64,
    min_value: f64,
    boolean_deviation: f64,
    degree: usize,
}

#[derive(Serialize)]
struct Stability {
    delta: f64,
    value: f64,
}

#[derive(Serialize)]
struct AnalysisReport {
    n: usize,
    spectrum: SpectrumSummary,
    variance: f64,
    weights: WeightSpectrum,
    influences: Vec<InfluenceProfile>,
    stability: Vec<Stability>,
}

pub fn analyze(args: AnalyzeArgs) -> Result<ExitCode> {
    let a = load(&args.input)?;
    let values = a.spectral_values();
    let trace = a.normalized_trace();
    let weights = fourier_weights(&a);
    let spectrum = SpectrumSummary {
        hermitian: a.is_hermitian(),
        trace: [trace.re, trace.im],
        norm2_sq: a.norm2_sq(),
        operator_norm: a.operator_norm(),
        max_value: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min_value: values.iter().copied().fold(f64::INFINITY, f64::min),
        boolean_deviation: if a.is_hermitian() { a.boolean_deviation() } else { f64::NAN },
        degree: a.degree(1e-12),
    };
    let influences = args
        .p
        .iter()
        .map(|&p| influence_profile(&a, p))
        .collect::<qcube::Result<Vec<_>>>()?;
    let stability = args
        .delta
        .iter()
        .map(|&delta| Ok(Stability { delta, value: noise_stability(&a, delta)? }))
        .collect::<qcube::Result<Vec<_>>>()?;
    let report = AnalysisReport {
        n: a.n(),
        variance: weights.w_geq(1),
        spectrum,
        weights,
        influences,
        stability,
    };
    let mut value = serde_json::to_value(&report)?;
    if !a.is_hermitian() {
        value["spectrum"]["boolean_deviation"] = serde_json::Value::Null;
    }
    emit(args.out.as_deref(), &to_json(&value))?;
    Ok(ExitCode::SUCCESS)
}

fn law_grid(args: &LawArgs) -> Result<(Vec<Law>, Vec<LawParams>)> {
    let laws = args
        .laws
        .iter()
        .map(|s| s.trim().parse::<Law>())
        .collect::<qcube::Result<Vec<_>>>()?;
    let base = LawParams {
        q: args.q,
        constant: args.constant_override,
        variant: args.variant.clone(),
        subset: args.subset.clone(),
        ..Default::default()
    };
    let grid = LawParams::grid(&args.p, &args.delta, &args.t, &args.k, &args.d, &base);
    Ok((laws, grid))
}

#[derive(Serialize)]
struct Summary {
    pass: usize,
    fail: usize,
    degenerate: usize,
}

impl Summary {
    fn of<'a>(reports: impl Iterator<Item = &'a InequalityReport>) -> Self {
        let mut s = Summary { pass: 0, fail: 0, degenerate: 0 };
        for r in reports {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Degenerate => s.degenerate += 1,
            }
        }
        s
    }
}

#[derive(Serialize)]
struct VerifyReport {
    n: usize,
    reports: Vec<InequalityReport>,
    summary: Summary,
}

pub fn verify(args: VerifyArgs) -> Result<ExitCode> {
    let (laws, grid) = law_grid(&args.law)?;
    let a = load(&args.input)?;
    let ctx = Analysis::new(&a);
    let mut reports = Vec::new();
    for &law in &laws {
        for params in &grid {
            reports.push(laws::check_law_or_flag(law, &ctx, params)?);
        }
    }
    let summary = Summary::of(reports.iter());
    let failed = summary.fail > 0;
    let report = VerifyReport { n: a.n(), reports, summary };
    emit(args.out.as_deref(), &to_json(&report))?;
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn failure_path(args: &SweepArgs) -> PathBuf {
    if let Some(p) = &args.failure_out {
        return p.clone();
    }
    match &args.out {
        Some(out) => {
            let mut name = out.as_os_str().to_owned();
            name.push(".failure.json");
            PathBuf::from(name)
        }
        None => PathBuf::from("qcube-failure.json"),
    }
}

pub fn sweep(args: SweepArgs) -> Result<ExitCode> {
    let (laws, grid) = law_grid(&args.law)?;
    let text = fs::read_to_string(&args.spec)
        .with_context(|| format!("reading {}", args.spec.display()))?;
    let family: FamilySpec = serde_json::from_str(&text)
        .with_context(|| format!("parsing family spec {}", args.spec.display()))?;
    check_cap(family.n_max.unwrap_or(family.n).max(family.n))?;
    let count = args.count.or(family.count).unwrap_or(1);
    let outcome = laws::sweep(&family, &laws, &grid, count)?;
    emit(args.out.as_deref(), &laws::csv_string(&outcome.rows))?;
    match outcome.failure {
        None => Ok(ExitCode::SUCCESS),
        Some((spec, op)) => {
            let path = failure_path(&args);
            let mut text = io::to_json(&op, Format::Pauli);
            text.push('\n');
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!(
                "fail: {} n={} seed={}; operator written to {}",
                spec.kind.name(),
                spec.n,
                spec.seed,
                path.display()
            );
            Ok(ExitCode::from(1))
        }
    }
}
