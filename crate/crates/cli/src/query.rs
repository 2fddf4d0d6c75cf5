use std::fs;
use std::path::Path;

use ellbundle::bundles::{cover_accounting, spectral_cover, verify_cover};
use ellbundle::existence::{construction_recipe, existence_verdict, Verdict};
use ellbundle::io::{self, AccountingDto, ReportDto};
use ellbundle::jacobian_surface::{genus_and_branching, JacobianSurface};
use ellbundle::{ChernData, Error, SurfaceData64, Tolerance64};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::checks;

pub const EXIT_ERROR: i32 = 3;
pub const EXIT_SCHEMA: i32 = 64;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_VERIFY: usize = 50;

/// One unit of work: a command with its surface and payload.
///
/// Fields holding documents (`surface`, `bundle`, `base`, `a`, `b`) accept an
/// inline JSON value or a path to a JSON file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Query {
    pub command: String,
    pub surface: Value,
    #[serde(default)]
    pub c1: Option<Value>,
    #[serde(default)]
    pub c2: Option<i64>,
    #[serde(default)]
    pub d: Option<i64>,
    #[serde(default)]
    pub base: Option<Value>,
    #[serde(default)]
    pub bundle: Option<Value>,
    #[serde(default)]
    pub a: Option<Value>,
    #[serde(default)]
    pub b: Option<Value>,
    #[serde(default)]
    pub verify: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub enum_radius: Option<i64>,
}

/// Command-line defaults that a query may override.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub tol: f64,
    pub seed: u64,
    pub verify: usize,
    pub enum_radius: Option<i64>,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            verify: DEFAULT_VERIFY,
            enum_radius: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub body: Value,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Self { code: 0, body }
    }

    pub fn error(code: i32, kind: &str, message: impl Into<String>) -> Self {
        Self {
            code,
            body: json!({"schema": io::SCHEMA, "error": kind, "message": message.into()}),
        }
    }
}

struct Failure(Outcome);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(Outcome::error(EXIT_ERROR, error_kind(&e), e.to_string()))
    }
}

fn invalid_input(e: Error) -> Failure {
    Failure(Outcome::error(EXIT_SCHEMA, error_kind(&e), e.to_string()))
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse(_) => "parse",
        Error::InvalidPeriod(_) => "invalid_period",
        Error::IndefiniteForm => "indefinite_form",
        Error::InvalidGram(_) => "invalid_gram",
        Error::InvalidSurface(_) => "invalid_surface",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::NotExists(_) => "not_exists",
        Error::NoBaseBisection(_) => "no_base_bisection",
        Error::ReplayMismatch(_) => "replay_mismatch",
        Error::VerificationFailed { .. } => "verification_failed",
        Error::DegreeOutOfRange { .. } => "degree_out_of_range",
        Error::NonIntegralGenus(_) => "non_integral_genus",
        _ => "error",
    }
}

/// Resolves an inline document or a path to one.
pub fn resolve_document(v: &Value) -> Result<Value, Error> {
    match v {
        Value::String(s) => {
            let t = s.trim_start();
            let text = if t.starts_with('{') || t.starts_with('[') {
                s.clone()
            } else {
                fs::read_to_string(Path::new(s)).map_err(|e| Error::Parse(format!("{s}: {e}")))?
            };
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{s}: {e}")))
        }
        other => Ok(other.clone()),
    }
}

fn document<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T, Error> {
    serde_json::from_value(resolve_document(v)?).map_err(|e| Error::Parse(e.to_string()))
}

fn required<'a>(v: &'a Option<Value>, name: &str) -> Result<&'a Value, Failure> {
    v.as_ref()
        .ok_or_else(|| invalid_input(Error::Parse(format!("missing field {name:?}"))))
}

fn chern(x: &SurfaceData64, q: &Query) -> Result<ChernData, Failure> {
    let c1 = match &q.c1 {
        None => io::parse_c1(x, ""),
        Some(Value::String(s)) => io::parse_c1(x, s),
        Some(v) => io::parse_c1(x, &v.to_string()),
    }
    .map_err(invalid_input)?;
    let c2 = q.c2.ok_or_else(|| invalid_input(Error::Parse("missing field \"c2\"".into())))?;
    Ok(ChernData::new(c1, c2))
}

pub fn run(q: &Query, opts: &Options) -> Outcome {
    match dispatch(q, opts) {
        Ok(o) => o,
        Err(Failure(o)) => o,
    }
}

fn dispatch(q: &Query, opts: &Options) -> Result<Outcome, Failure> {
    let tol_value = q.tol.unwrap_or(opts.tol);
    let tol = Tolerance64::new(tol_value, 10_000).map_err(invalid_input)?;
    let seed = q.seed.unwrap_or(opts.seed);
    let x = document::<io::SurfaceDto>(&q.surface)
        .and_then(|dto| io::surface_from_dto(&dto))
        .map_err(invalid_input)?;
    let jac = JacobianSurface::new(&x, tol, seed);
    match q.command.as_str() {
        "exists" => {
            let cd = chern(&x, q)?;
            let base = match &q.base {
                Some(v) => Some(
                    document::<io::BisectionDto>(v)
                        .and_then(|b| io::bisection_from_dto(&x, &b))
                        .map_err(invalid_input)?,
                ),
                None => None,
            };
            let v = existence_verdict(&jac, &cd, q.d, base.as_ref())?;
            Ok(Outcome {
                code: v.exit_code(),
                body: serde_json::to_value(io::verdict_to_dto(&v)).expect("serialisable"),
            })
        }
        "recipe" => {
            let cd = chern(&x, q)?;
            let base = match &q.base {
                Some(v) => Some(
                    document::<io::BisectionDto>(v)
                        .and_then(|b| io::bisection_from_dto(&x, &b))
                        .map_err(invalid_input)?,
                ),
                None => None,
            };
            match existence_verdict(&jac, &cd, q.d, base.as_ref())? {
                Verdict::Exists { .. } => {}
                v @ (Verdict::NotExists { .. } | Verdict::Unknown { .. }) => {
                    return Ok(Outcome {
                        code: v.exit_code(),
                        body: json!({
                            "schema": io::SCHEMA,
                            "error": v.name(),
                            "message": "no recipe: the queried bundle is not known to exist",
                            "verdict": io::verdict_to_dto(&v),
                        }),
                    });
                }
            }
            let r = construction_recipe(&jac, &cd, base.as_ref())?;
            let mut body = serde_json::to_value(io::recipe_to_dto(&r)).expect("serialisable");
            body["schema"] = json!(io::SCHEMA);
            Ok(Outcome::ok(body))
        }
        "spectral-cover" => {
            let dto: io::BundleDto = document(required(&q.bundle, "bundle")?).map_err(invalid_input)?;
            let e = io::bundle_from_dto(&jac, &dto)?;
            let cover = spectral_cover(&jac, &e)?;
            let n = q.verify.unwrap_or(opts.verify);
            let report = verify_cover(&jac, &e, &cover, n)?;
            let limit = 10.0 * tol_value;
            let mut out = io::cover_to_dto(&cover);
            out.verification = Some(ReportDto::from(&report));
            if let Ok(dot) = jac.intersection_with_zero_section(&cover.bisection) {
                out.accounting = Some(AccountingDto {
                    cover_dot_zero_section: dot,
                    jumps: cover.jump_total(),
                    n_e: e.chern().n_e(x.lattice())?,
                });
                debug_assert_eq!(cover_accounting(&jac, &cover).ok(), Some(dot + cover.jump_total() as i64));
            }
            let body = serde_json::to_value(&out).expect("serialisable");
            if report.max_residual > limit || report.false_positives > 0 {
                let e = Error::VerificationFailed {
                    fibre: report.worst_fibre.clone().unwrap_or_default(),
                    residual: report.max_residual,
                };
                let mut o = Outcome::error(EXIT_ERROR, error_kind(&e), e.to_string());
                o.body["cover"] = body;
                return Ok(o);
            }
            Ok(Outcome::ok(body))
        }
        "check" => {
            let report = checks::run_checks(&jac, q.enum_radius.or(opts.enum_radius));
            let passed = report.iter().all(|c| c.passed);
            Ok(Outcome {
                code: if passed { 0 } else { 1 },
                body: json!({"schema": io::SCHEMA, "passed": passed, "checks": report}),
            })
        }
        "intersect" => {
            let a: io::SectionDto = document(required(&q.a, "a")?).map_err(invalid_input)?;
            let b: io::SectionDto = document(required(&q.b, "b")?).map_err(invalid_input)?;
            let a = io::section_from_dto(&x, &a).map_err(invalid_input)?;
            let b = io::section_from_dto(&x, &b).map_err(invalid_input)?;
            let pairing = jac.section_pairing(&a, &b)?;
            let mut body = json!({"schema": io::SCHEMA, "pairing": pairing});
            if let Ok(n) = jac.coincidence_count(&a, &b) {
                body["numeric_coincidences"] = json!(n);
            }
            Ok(Outcome::ok(body))
        }
        "genus" => {
            let cd = chern(&x, q)?;
            let (genus, branching) = genus_and_branching(&cd, x.genus(), x.lattice())?;
            let delta = cd.discriminant(x.lattice())?;
            let g = x.genus() as i64;
            Ok(Outcome::ok(json!({
                "schema": io::SCHEMA,
                "delta": ellbundle::rational::to_string(&delta),
                "genus": genus,
                "branching": branching,
                "hurwitz": 2 * genus - 2 == 2 * (2 * g - 2) + branching,
            })))
        }
        other => Err(invalid_input(Error::Parse(format!("unknown command {other:?}")))),
    }
}
