//! Both sides of each inequality, with a verdict.
//!
//! Every law reduces to `lhs ≤ rhs` or `lhs ≥ rhs`. `slack` is the margin in
//! the passing direction, so a report passes when
//! `slack ≥ −1e-9 · max(1, |lhs|, |rhs|)` over the finite values. Laws that
//! combine several inequalities report the tightest one.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::generators::{generate, FamilySpec};
use crate::influence::{self, fourier_weights, WeightSpectrum};
use crate::norms::{schatten_norm, schatten_power};
use crate::operator::QOperator;
use crate::pauli::{self, QubitSet};
use crate::semigroup::{self, DEGENERATE_TOL};

/// Relative slack tolerance.
pub const SLACK_TOL: f64 = 1e-9;

/// Operator-norm slack allowed by the `||A|| ≤ 1` precondition.
pub const NORM_TOL: f64 = 1e-9;

/// Influences at or above `1 − INF_EDGE` make `log(1/Inf)` terms infinite.
pub const INF_EDGE: f64 = 1e-12;

pub const KKL_DIMFREE_C: f64 = 180_000.0;
pub const TALAGRAND_C: f64 = 4e10;
pub const TALAGRAND_C_VARIANT: f64 = 1_228_800.0;
pub const BKS_C: f64 = 160_000.0;
pub const LEVELD_C: f64 = 10_240.0;

/// `ht_talagrand` enumerates all `C(n, k)` subsets only when `n ≤ 8` or `k ≤ 3`.
pub const HT_MAX_N: usize = 8;
pub const HT_MAX_K: usize = 3;

macro_rules! laws {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Law { $($variant),* }

        impl Law {
            pub const ALL: &'static [Law] = &[$(Law::$variant),*];

            pub fn name(&self) -> &'static str {
                match self { $(Law::$variant => $name),* }
            }
        }

        impl FromStr for Law {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(Law::$variant),)*
                    _ => Err(Error::UnknownLaw(s.to_string())),
                }
            }
        }
    };
}

laws! {
    Poincare => "poincare",
    Logsob => "logsob",
    LogsobLower => "logsob_lower",
    Hyper => "hyper",
    InfluenceChain => "influence_chain",
    Bmo => "bmo",
    KklDimfree => "kkl_dimfree",
    KklLogn => "kkl_logn",
    TalagrandL1 => "talagrand_l1",
    HtTalagrand => "ht_talagrand",
    HtKkl => "ht_kkl",
    Bks => "bks",
    Level1 => "level1",
    Leveld => "leveld",
    L2Integral => "l2_integral",
    Keylemma => "keylemma",
    Inter => "inter",
    GBounds => "g_bounds",
    GoodDegreesD => "good_degrees_d",
    GoodDegreesG => "good_degrees_g",
    Contract => "contract",
    Degree => "degree",
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Law {
    /// Laws whose statement assumes `||A|| ≤ 1`.
    pub fn needs_unit_norm(&self) -> bool {
        !matches!(
            self,
            Law::Poincare
                | Law::Logsob
                | Law::Hyper
                | Law::Level1
                | Law::L2Integral
                | Law::Inter
                | Law::Contract
                | Law::Degree
        )
    }
}

/// Parses a comma-separated list of law ids.
pub fn parse_laws(list: &str) -> Result<Vec<Law>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Degenerate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Degenerate => "degenerate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    PaperProof,
    TheoremStatement,
    UserOverride,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::PaperProof => "paper-proof",
            Provenance::TheoremStatement => "theorem-statement",
            Provenance::UserOverride => "user-override",
        })
    }
}

/// Optional law parameters; each law documents its defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LawParams {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub delta: Option<f64>,
    pub t: Option<f64>,
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub constant: Option<f64>,
    /// `"proof-case"` selects the alternative Talagrand constant.
    pub variant: Option<String>,
    pub subset: Option<Vec<usize>>,
}

impl LawParams {
    /// Cartesian product of the supplied value lists; an empty list leaves
    /// that parameter at its default.
    pub fn grid(
        ps: &[f64],
        deltas: &[f64],
        ts: &[f64],
        ks: &[usize],
        ds: &[usize],
        base: &LawParams,
    ) -> Vec<LawParams> {
        fn axis<T: Copy>(v: &[T]) -> Vec<Option<T>> {
            if v.is_empty() {
                vec![None]
            } else {
                v.iter().map(|&x| Some(x)).collect()
            }
        }
        let mut out = Vec::new();
        for &p in &axis(ps) {
            for &delta in &axis(deltas) {
                for &t in &axis(ts) {
                    for &k in &axis(ks) {
                        for &d in &axis(ds) {
                            out.push(LawParams {
                                p: p.or(base.p),
                                delta: delta.or(base.delta),
                                t: t.or(base.t),
                                k: k.or(base.k),
                                d: d.or(base.d),
                                ..base.clone()
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Finite values as JSON numbers, infinities as `"inf"` / `"-inf"`.
pub fn serialize_extended<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&format_extended(*x))
    }
}

pub fn format_extended(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        x.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub law: String,
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(serialize_with = "serialize_extended")]
    pub lhs: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub rhs: f64,
    pub relation: Relation,
    #[serde(serialize_with = "serialize_extended")]
    pub slack: f64,
    pub verdict: Verdict,
    pub constant_provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Signed margin of `lhs (relation) rhs` and its verdict.
pub fn judge(lhs: f64, rhs: f64, relation: Relation) -> (f64, Verdict) {
    let slack = match relation {
        Relation::Le => rhs - lhs,
        Relation::Ge => lhs - rhs,
    };
    let slack = if slack.is_nan() && lhs == rhs { 0.0 } else { slack };
    let scale = [1.0, lhs.abs(), rhs.abs()]
        .into_iter()
        .filter(|x| x.is_finite())
        .fold(1.0, f64::max);
    let verdict = if slack >= -SLACK_TOL * scale {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    (slack, verdict)
}

/// One inequality inside a law.
#[derive(Clone, Debug)]
struct Link {
    lhs: f64,
    rhs: f64,
    relation: Relation,
    label: String,
}

impl Link {
    fn le(lhs: f64, rhs: f64, label: impl Into<String>) -> Self {
        Self {
            lhs,
            rhs,
            relation: Relation::Le,
            label: label.into(),
        }
    }

    fn ge(lhs: f64, rhs: f64, label: impl Into<String>) -> Self {
        Self {
            lhs,
            rhs,
            relation: Relation::Ge,
            label: label.into(),
        }
    }

    /// Slack normalized by the tolerance scale, for ranking links.
    fn margin(&self) -> f64 {
        let (slack, _) = judge(self.lhs, self.rhs, self.relation);
        let scale = [1.0, self.lhs.abs(), self.rhs.abs()]
            .into_iter()
            .filter(|x| x.is_finite())
            .fold(1.0, f64::max);
        if slack.is_nan() {
            f64::NEG_INFINITY
        } else {
            slack / scale
        }
    }
}

/// Outcome of evaluating one law before packaging.
enum Evaluation {
    Links(Vec<Link>),
    Degenerate {
        lhs: f64,
        rhs: f64,
        relation: Relation,
        note: String,
    },
}

/// Lazily computed quantities shared across laws for one operator.
pub struct Analysis<'a> {
    a: &'a QOperator,
    norm: OnceLock<f64>,
    inf1: OnceLock<Vec<f64>>,
    weights: OnceLock<WeightSpectrum>,
}

impl<'a> Analysis<'a> {
    pub fn new(a: &'a QOperator) -> Self {
        Self {
            a,
            norm: OnceLock::new(),
            inf1: OnceLock::new(),
            weights: OnceLock::new(),
        }
    }

    pub fn operator(&self) -> &QOperator {
        self.a
    }

    pub fn operator_norm(&self) -> f64 {
        *self.norm.get_or_init(|| self.a.operator_norm())
    }

    /// `Inf_j^1[A]` for every `j`.
    pub fn inf1(&self) -> &[f64] {
        self.inf1.get_or_init(|| {
            (0..self.a.n())
                .into_par_iter()
                .map(|j| influence::influence(self.a, j, 1.0).expect("j in range"))
                .collect()
        })
    }

    pub fn inf1_total(&self) -> f64 {
        self.inf1().iter().sum()
    }

    pub fn inf1_max(&self) -> f64 {
        self.inf1().iter().copied().fold(0.0, f64::max)
    }

    /// `V[A] = Σ_j (Inf_j^1[A])^2`.
    pub fn inf1_square_sum(&self) -> f64 {
        self.inf1().iter().map(|x| x * x).sum()
    }

    pub fn weights(&self) -> &WeightSpectrum {
        self.weights.get_or_init(|| fourier_weights(self.a))
    }

    pub fn variance(&self) -> f64 {
        self.weights().w_geq(1)
    }

    pub fn inf_l2(&self) -> f64 {
        influence::total_influence_l2(self.a)
    }
}

/// Evaluates one law on one operator.
pub fn check_law(law: Law, a: &QOperator, params: &LawParams) -> Result<InequalityReport> {
    check_law_with(law, &Analysis::new(a), params)
}

pub fn check_law_with(
    law: Law,
    ctx: &Analysis<'_>,
    params: &LawParams,
) -> Result<InequalityReport> {
    let a = ctx.operator();
    if law != Law::L2Integral {
        a.require_hermitian()?;
        if law.needs_unit_norm() {
            let norm = ctx.operator_norm();
            if norm > 1.0 + NORM_TOL {
                return Err(Error::NormPrecondition { norm });
            }
        }
    }
    let mut used = BTreeMap::new();
    let (evaluation, provenance) = evaluate(law, ctx, params, &mut used)?;
    Ok(package(law, evaluation, provenance, used))
}

/// Like [`check_law_with`], but a violated precondition on the operator
/// (norm above 1, not Hermitian) becomes a degenerate report.
pub fn check_law_or_flag(
    law: Law,
    ctx: &Analysis<'_>,
    params: &LawParams,
) -> Result<InequalityReport> {
    let note = match check_law_with(law, ctx, params) {
        Err(Error::NormPrecondition { norm }) => format!("operator norm {norm} exceeds 1"),
        Err(Error::NotHermitian { .. }) => "operator is not Hermitian".to_string(),
        other => return other,
    };
    Ok(InequalityReport {
        law: law.name().into(),
        params: BTreeMap::new(),
        lhs: f64::NAN,
        rhs: f64::NAN,
        relation: Relation::Le,
        slack: f64::NAN,
        verdict: Verdict::Degenerate,
        constant_provenance: Provenance::TheoremStatement,
        note: Some(note),
    })
}

fn package(
    law: Law,
    evaluation: Evaluation,
    constant_provenance: Provenance,
    params: BTreeMap<String, serde_json::Value>,
) -> InequalityReport {
    match evaluation {
        Evaluation::Degenerate {
            lhs,
            rhs,
            relation,
            note,
        } => {
            let (slack, _) = judge(lhs, rhs, relation);
            InequalityReport {
                law: law.name().into(),
                params,
                lhs,
                rhs,
                relation,
                slack,
                verdict: Verdict::Degenerate,
                constant_provenance,
                note: Some(note),
            }
        }
        Evaluation::Links(links) => {
            let worst = links
                .iter()
                .min_by(|x, y| x.margin().total_cmp(&y.margin()))
                .expect("every law has at least one link")
                .clone();
            let (slack, verdict) = judge(worst.lhs, worst.rhs, worst.relation);
            let note = (links.len() > 1 || !worst.label.is_empty()).then(|| {
                if links.len() > 1 {
                    format!("tightest of {} links: {}", links.len(), worst.label)
                } else {
                    worst.label.clone()
                }
            });
            InequalityReport {
                law: law.name().into(),
                params,
                lhs: worst.lhs,
                rhs: worst.rhs,
                relation: worst.relation,
                slack,
                verdict,
                constant_provenance,
                note: note.filter(|s| !s.is_empty()),
            }
        }
    }
}

fn record_f(used: &mut BTreeMap<String, serde_json::Value>, key: &str, v: f64) {
    let value = if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::json!(format_extended(v))
    };
    used.insert(key.into(), value);
}

fn record_u(used: &mut BTreeMap<String, serde_json::Value>, key: &str, v: usize) {
    used.insert(key.into(), serde_json::json!(v));
}

fn constant_or(
    params: &LawParams,
    default: f64,
    default_provenance: Provenance,
    used: &mut BTreeMap<String, serde_json::Value>,
) -> (f64, Provenance) {
    let (c, prov) = match params.constant {
        Some(c) => (c, Provenance::UserOverride),
        None => (default, default_provenance),
    };
    record_f(used, "constant", c);
    (c, prov)
}

fn required_constant(
    law: Law,
    params: &LawParams,
    used: &mut BTreeMap<String, serde_json::Value>,
) -> Result<f64> {
    let c = params
        .constant
        .ok_or_else(|| Error::MissingConstant(law.name().into()))?;
    record_f(used, "constant", c);
    Ok(c)
}

fn subset_param(
    a: &QOperator,
    params: &LawParams,
    used: &mut BTreeMap<String, serde_json::Value>,
) -> Result<QubitSet> {
    let set = match &params.subset {
        Some(v) => QubitSet::from_indices(v, a.n())?,
        None => QubitSet::full(a.n()),
    };
    used.insert("subset".into(), serde_json::json!(set.to_vec()));
    Ok(set)
}

/// `x / log(1/x)` with `0 ↦ 0` and `x ≥ 1 − INF_EDGE ↦ +∞`.
fn talagrand_term(x: f64, power: i32) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 - INF_EDGE {
        f64::INFINITY
    } else {
        x / (1.0 / x).ln().powi(power)
    }
}

fn evaluate(
    law: Law,
    ctx: &Analysis<'_>,
    params: &LawParams,
    used: &mut BTreeMap<String, serde_json::Value>,
) -> Result<(Evaluation, Provenance)> {
    let a = ctx.operator();
    let n = a.n();
    let stmt = Provenance::TheoremStatement;
    let links = |v: Vec<Link>| Evaluation::Links(v);
    Ok(match law {
        Law::Poincare => (
            links(vec![Link::le(ctx.variance(), ctx.inf_l2(), "")]),
            stmt,
        ),
        Law::Logsob => {
            let ent = influence::entropy_abs_sq(a)?;
            (links(vec![Link::le(ent, 2.0 * ctx.inf_l2(), "")]), stmt)
        }
        Law::LogsobLower => {
            let p = params.p.unwrap_or(1.0);
            if !(1.0..2.0).contains(&p) {
                return Err(Error::Domain(format!("logsob_lower needs p in [1, 2), got {p}")));
            }
            record_f(used, "p", p);
            let n2 = a.norm2_sq();
            let np = schatten_norm(a, p)?;
            let entropy_term = if n2 > 0.0 { -0.5 * n2 * n2.ln() } else { 0.0 };
            let rhs = entropy_term - np.powf(p / 2.0) * n2.sqrt() / (2.0 - p);
            (links(vec![Link::ge(ctx.inf_l2(), rhs, "")]), stmt)
        }
        Law::Hyper => {
            let t = params.t.unwrap_or(1.0);
            record_f(used, "t", t);
            let pt = 1.0 + (-2.0 * t).exp();
            let lhs = semigroup::semigroup(a, t)?.norm2_sq().sqrt();
            (links(vec![Link::le(lhs, schatten_norm(a, pt)?, "")]), stmt)
        }
        Law::InfluenceChain => {
            let p = params.p.unwrap_or(1.0);
            if !(1.0..2.0).contains(&p) {
                return Err(Error::Domain(format!("influence_chain needs p in [1, 2), got {p}")));
            }
            record_f(used, "p", p);
            let mut v = Vec::new();
            for j in 0..n {
                let inf2 = influence::influence_l2(a, j)?;
                let infp = influence::influence(a, j, p)?;
                let upper = inf2.powf(p / 2.0);
                v.push(Link::le(2f64.powf(p - 2.0) * inf2, infp, format!("lower j={j}")));
                v.push(Link::le(infp, upper, format!("upper j={j}")));
                v.push(Link::le(upper, 1.0, format!("unit j={j}")));
            }
            (links(v), stmt)
        }
        Law::Bmo => {
            let set = subset_param(a, params, used)?;
            if set.is_empty() {
                return Err(Error::Domain("bmo needs a nonempty J".into()));
            }
            let inf1 = ctx.inf1();
            let max_j = set.iter().map(|j| inf1[j]).fold(0.0, f64::max);
            let wj = influence::single_intersection_weight(a, set)?;
            let log_term = if wj == 0.0 {
                0.0
            } else {
                0.5 * (1.0 / (2.0 * max_j)).ln() * wj
            };
            let rhs = log_term - 3f64.sqrt() * ctx.inf1_total().sqrt() * wj.sqrt();
            (links(vec![Link::ge(ctx.inf_l2(), rhs, "")]), stmt)
        }
        Law::KklDimfree => {
            let (c, prov) = constant_or(params, KKL_DIMFREE_C, Provenance::PaperProof, used);
            let lhs = ctx.inf1_max();
            let var = ctx.variance();
            if var <= DEGENERATE_TOL {
                let note = "zero variance".to_string();
                return Ok((
                    Evaluation::Degenerate {
                        lhs,
                        rhs: f64::NAN,
                        relation: Relation::Ge,
                        note,
                    },
                    prov,
                ));
            }
            let rhs = 2f64.powf(-c * ctx.inf1_total() / var);
            (links(vec![Link::ge(lhs, rhs, "")]), prov)
        }
        Law::KklLogn => {
            let c = required_constant(law, params, used)?;
            let rhs = c * ctx.variance() * (n as f64).ln() / n as f64;
            (
                links(vec![Link::ge(ctx.inf1_max(), rhs, "")]),
                Provenance::UserOverride,
            )
        }
        Law::TalagrandL1 => {
            let p = params.p.unwrap_or(1.0);
            record_f(used, "p", p);
            let variant = params.variant.as_deref();
            let (default, name) = match variant {
                None | Some("default") => (TALAGRAND_C, "default"),
                Some("proof-case") => (TALAGRAND_C_VARIANT, "proof-case"),
                Some(other) => {
                    return Err(Error::Domain(format!("unknown talagrand variant `{other}`")))
                }
            };
            used.insert("variant".into(), serde_json::json!(name));
            let (c, prov) = constant_or(params, default, Provenance::PaperProof, used);
            let infp: Vec<f64> = if p == 1.0 {
                ctx.inf1().to_vec()
            } else {
                (0..n)
                    .map(|j| influence::influence(a, j, p))
                    .collect::<Result<_>>()?
            };
            let sum: f64 = infp.iter().map(|&x| talagrand_term(x, 1)).sum();
            (links(vec![Link::le(ctx.variance(), c * sum, "")]), prov)
        }
        Law::HtTalagrand => {
            let k = params.k.unwrap_or(1);
            if k == 0 || k > n {
                return Err(Error::Domain(format!("k = {k} outside 1..={n}")));
            }
            if n > HT_MAX_N && k > HT_MAX_K {
                return Err(Error::Domain(format!(
                    "ht_talagrand enumerates C({n}, {k}) subsets; needs n ≤ {HT_MAX_N} or k ≤ {HT_MAX_K}"
                )));
            }
            record_u(used, "k", k);
            let factorial: f64 = (1..=k).map(|i| i as f64).product();
            let (c, prov) = constant_or(params, 24f64.powi(k as i32) * factorial, stmt, used);
            let sum = QubitSet::all_of_size(n, k)
                .into_par_iter()
                .map(|set| influence::set_influence(a, set, 1.0).map(|x| talagrand_term(x, k as i32)))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .sum::<f64>();
            (
                links(vec![Link::le(ctx.weights().w_geq(k), c * sum, "")]),
                prov,
            )
        }
        Law::HtKkl => {
            let k = params.k.unwrap_or(1);
            if k == 0 || k > n {
                return Err(Error::Domain(format!("k = {k} outside 1..={n}")));
            }
            record_u(used, "k", k);
            let c = required_constant(law, params, used)?;
            let lhs = QubitSet::all_of_size(n, k)
                .into_par_iter()
                .map(|set| influence::set_influence(a, set, 1.0))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let ratio = (n as f64).ln() / n as f64;
            let rhs = c * ratio.powi(k as i32) * ctx.weights().w_geq(k);
            (links(vec![Link::ge(lhs, rhs, "")]), Provenance::UserOverride)
        }
        Law::Bks => {
            let delta = params.delta.unwrap_or(0.5);
            record_f(used, "delta", delta);
            let (c, prov) = constant_or(params, BKS_C, Provenance::PaperProof, used);
            let lhs = semigroup::noise_stability(a, delta)?;
            let l2e = (2.0 * std::f64::consts::E).ln();
            let alpha = 1.0 / ((1.0 - delta) + l2e + 3.0 * l2e.ln());
            let v = ctx.inf1_square_sum();
            let rhs = c * v.powf(alpha * (1.0 - delta));
            (links(vec![Link::le(lhs, rhs, "")]), prov)
        }
        Law::Level1 => {
            let (c, prov) = constant_or(params, 3.0, stmt, used);
            (
                links(vec![Link::le(ctx.weights().w_eq(1), c * ctx.inf1_square_sum(), "")]),
                prov,
            )
        }
        Law::Leveld => {
            let d = params.d.unwrap_or(2);
            if d < 2 {
                return Err(Error::Domain(format!("leveld needs d ≥ 2, got {d}")));
            }
            record_u(used, "d", d);
            let (c, prov) = constant_or(params, LEVELD_C, Provenance::PaperProof, used);
            let v = ctx.inf1_square_sum();
            let lhs = ctx.weights().w_eq(d);
            let e = std::f64::consts::E;
            let df = d as f64;
            let rhs = if v == 0.0 {
                0.0
            } else {
                c * e / df
                    * (2.0 * e / (df - 1.0)).powf(df - 1.0)
                    * v
                    * (df / v).ln().powf(df - 1.0)
            };
            let gate = (-2.0 * (df - 1.0)).exp();
            if v > gate {
                let note = format!("precondition V = {v:e} > exp(-2(d-1)) = {gate:e}");
                return Ok((
                    Evaluation::Degenerate {
                        lhs,
                        rhs,
                        relation: Relation::Le,
                        note,
                    },
                    prov,
                ));
            }
            (links(vec![Link::le(lhs, rhs, "")]), prov)
        }
        Law::L2Integral => {
            let d = params.d.unwrap_or(2);
            if d < 2 {
                return Err(Error::Domain(format!("l2_integral needs d ≥ 2, got {d}")));
            }
            let threshold = (4.0 * std::f64::consts::E).powf((d as f64 - 1.0) / 2.0);
            let t0 = params.t.unwrap_or(1.5 * threshold);
            record_u(used, "d", d);
            record_f(used, "t", t0);
            let (lhs, rhs) = l2_integral_sides(d, t0);
            if t0 <= threshold {
                let note = format!("t0 = {t0} not above (4e)^((d-1)/2) = {threshold}");
                return Ok((
                    Evaluation::Degenerate {
                        lhs,
                        rhs,
                        relation: Relation::Le,
                        note,
                    },
                    stmt,
                ));
            }
            (links(vec![Link::le(lhs, rhs, "")]), stmt)
        }
        Law::Keylemma => (links(keylemma_links(a)?), stmt),
        Law::Inter => {
            let set = subset_param(a, params, used)?;
            let mut sum = 0.0;
            for j in set.iter() {
                for k in 1..=3u8 {
                    let g = influence::restriction_coefficient(a, set, j, k)?;
                    sum += influence::total_influence_l2(&g.operator);
                }
            }
            (links(vec![Link::le(sum, ctx.inf_l2(), "")]), stmt)
        }
        Law::GBounds => {
            let set = subset_param(a, params, used)?;
            let p = params.p.unwrap_or(1.0);
            if !(1.0..=2.0).contains(&p) {
                return Err(Error::Domain(format!("g_bounds needs p in [1, 2], got {p}")));
            }
            record_f(used, "p", p);
            let mut v = Vec::new();
            for j in set.iter() {
                let infp = influence::influence(a, j, p)?;
                for k in 1..=3u8 {
                    let g = influence::restriction_coefficient(a, set, j, k)?.operator;
                    let n2 = g.norm2_sq();
                    let n1 = schatten_norm(&g, 1.0)?;
                    v.push(Link::le(n2, n1, format!("l2sq<=l1 j={j} k={k}")));
                    v.push(Link::le(n1, n2.sqrt(), format!("l1<=l2 j={j} k={k}")));
                    v.push(Link::le(
                        schatten_power(&g, p)?,
                        infp,
                        format!("p-norm<=Inf j={j} k={k}"),
                    ));
                }
            }
            if v.is_empty() {
                return Err(Error::Domain("g_bounds needs a nonempty J".into()));
            }
            (links(v), stmt)
        }
        Law::GoodDegreesD | Law::GoodDegreesG => {
            let g = if law == Law::GoodDegreesD {
                semigroup::good_degrees_d(a)?
            } else {
                semigroup::good_degrees_g(a)?
            };
            used.insert("degrees".into(), serde_json::json!(g.degrees));
            if g.degenerate {
                return Ok((
                    Evaluation::Degenerate {
                        lhs: g.variance,
                        rhs: g.bound(),
                        relation: Relation::Le,
                        note: "zero variance or influence".into(),
                    },
                    stmt,
                ));
            }
            (links(vec![Link::le(g.variance, g.bound(), "")]), stmt)
        }
        Law::Contract => {
            let delta = params.delta.unwrap_or(0.5);
            let p = params.p.unwrap_or(1.0);
            record_f(used, "delta", delta);
            record_f(used, "p", p);
            let t = semigroup::noise_operator(a, delta)?;
            (
                links(vec![Link::le(schatten_norm(&t, p)?, schatten_norm(a, p)?, "")]),
                stmt,
            )
        }
        Law::Degree => {
            let q = params.q.or(params.p).unwrap_or(4.0);
            if q < 2.0 {
                return Err(Error::Domain(format!("degree law needs q ≥ 2, got {q}")));
            }
            record_f(used, "q", q);
            let d = a.degree(1e-12);
            record_u(used, "d", d);
            let rhs = (q - 1.0).powf(d as f64 / 2.0) * a.norm2_sq().sqrt();
            (links(vec![Link::le(schatten_norm(a, q)?, rhs, "")]), stmt)
        }
    })
}

fn keylemma_links(a: &QOperator) -> Result<Vec<Link>> {
    let n = a.n();
    let family = semigroup::chunk_family(a);
    let mut v = Vec::new();
    let mut chunk_inf = vec![0.0; n];
    for (&d, b) in &family.chunks {
        v.push(Link::le(b.operator_norm(), 2.0, format!("norm d={d}")));
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (s, (ca, cb)) in a.spectrum().iter().zip(b.spectrum()).enumerate() {
            let m = pauli::degree(s);
            if m < d || m >= 2 * d || ca.norm() == 0.0 {
                continue;
            }
            let ratio = cb.norm() / ca.norm();
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        if lo.is_finite() {
            v.push(Link::ge(lo, 1.0 / 20.0, format!("ratio lower d={d}")));
            v.push(Link::le(hi, 1.0, format!("ratio upper d={d}")));
        }
        for (j, acc) in chunk_inf.iter_mut().enumerate() {
            *acc += influence::influence_l2(b, j)?;
        }
    }
    for (j, &sum) in chunk_inf.iter().enumerate() {
        v.push(Link::le(sum, influence::influence_l2(a, j)?, format!("chunk sum j={j}")));
    }
    Ok(v)
}

/// Numerical left side and closed-form right side of the tail bound
/// `∫_{t0}^∞ t² exp(−c t^{2/(d−1)}) dt ≤ 5e t0^{3−2/(d−1)} exp(−c t0^{2/(d−1)})`
/// with `c = (d−1)/(2e)`.
///
/// The integral is taken in `u = c t^{2/(d−1)}`, where it becomes
/// `m c^{−3m} ∫_{u0}^∞ u^{3m−1} e^{−u} du` with `m = (d−1)/2`.
pub fn l2_integral_sides(d: usize, t0: f64) -> (f64, f64) {
    let e = std::f64::consts::E;
    let dm1 = d as f64 - 1.0;
    let c = dm1 / (2.0 * e);
    let m = dm1 / 2.0;
    let u0 = c * t0.powf(2.0 / dm1);
    let a = 3.0 * m - 1.0;
    let tail = gamma_tail(a, u0);
    let lhs = m * c.powf(-3.0 * m) * tail;
    let rhs = 5.0 * e * t0.powf(3.0 - 2.0 / dm1) * (-u0).exp();
    (lhs, rhs)
}

/// `∫_{u0}^∞ u^a e^{−u} du` by adaptive Simpson on unit panels.
fn gamma_tail(a: f64, u0: f64) -> f64 {
    let f = |u: f64| (a * u.ln() - u).exp();
    let mut total = 0.0;
    let mut lo = u0;
    let width = 1.0;
    loop {
        let hi = lo + width;
        let (fl, fm, fh) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = (hi - lo) / 6.0 * (fl + 4.0 * fm + fh);
        let part = adaptive_simpson(&f, lo, hi, fl, fm, fh, whole, 1e-15 * whole.abs().max(1e-300), 40);
        total += part;
        if hi > a && part <= 1e-17 * total {
            break;
        }
        lo = hi;
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// One sweep row.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub index: usize,
    pub kind: String,
    pub n: usize,
    pub seed: u64,
    pub report: InequalityReport,
}

pub const CSV_HEADER: [&str; 13] = [
    "index",
    "kind",
    "n",
    "seed",
    "law",
    "params",
    "lhs",
    "rhs",
    "relation",
    "slack",
    "verdict",
    "constant_provenance",
    "note",
];

/// Writes sweep rows as CSV, one line per (operator, law, params).
pub fn write_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let r = &row.report;
        let params = serde_json::to_string(&r.params).expect("params serialize");
        let relation = match r.relation {
            Relation::Le => "le",
            Relation::Ge => "ge",
        };
        w.write_record([
            row.index.to_string(),
            row.kind.clone(),
            row.n.to_string(),
            row.seed.to_string(),
            r.law.clone(),
            params,
            format_extended(r.lhs),
            format_extended(r.rhs),
            relation.to_string(),
            format_extended(r.slack),
            r.verdict.to_string(),
            r.constant_provenance.to_string(),
            r.note.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// The first member with a failing report, for replay.
    pub failure: Option<(FamilySpec, QOperator)>,
}

/// Runs `laws × grid` over `count` members per qubit count of `family`.
///
/// Members are evaluated in parallel and assembled in enumeration order.
/// Rows stop after the first member that has a failing report. Violated
/// preconditions become degenerate rows.
pub fn sweep(
    family: &FamilySpec,
    laws: &[Law],
    grid: &[LawParams],
    count: usize,
) -> Result<SweepOutcome> {
    let members = family.members(count);
    let per_member: Vec<Result<(Vec<SweepRow>, QOperator)>> = members
        .par_iter()
        .enumerate()
        .map(|(index, spec)| {
            let a = generate(spec)?;
            let ctx = Analysis::new(&a);
            let mut rows = Vec::new();
            for &law in laws {
                for params in grid {
                    let report = check_law_or_flag(law, &ctx, params)?;
                    rows.push(SweepRow {
                        index,
                        kind: spec.kind.name().into(),
                        n: spec.n,
                        seed: spec.seed,
                        report,
                    });
                }
            }
            drop(ctx);
            Ok((rows, a))
        })
        .collect();

    let mut rows = Vec::new();
    let mut failure = None;
    for (spec, result) in members.into_iter().zip(per_member) {
        let (member_rows, a) = result?;
        let failed = member_rows.iter().any(|r| r.report.failed());
        rows.extend(member_rows);
        if failed {
            failure = Some((spec, a));
            break;
        }
    }
    Ok(SweepOutcome { rows, failure })
}
