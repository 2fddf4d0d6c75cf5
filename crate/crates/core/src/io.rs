//! JSON descriptions of surfaces, divisors, bundles and results (double precision).
//!
//! Complex numbers are `[re, im]`, exact rationals are `"p/q"` strings and every
//! top-level document carries `"schema": 1`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bundles::{
    FibreRestriction, LineBundleOnX, NonsplitLocus, Presentation, RankTwoBundle, SpectralCover, VerificationReport,
};
use crate::error::{Error, Result};
use crate::existence::{FiltrableTag, Recipe, RecipeBase, Verdict};
use crate::jacobian_surface::{Bisection, DoubleCover, JacobianSurface, RationalCover, RationalMap, SectionOfJ};
use crate::lattice::HomLattice;
use crate::rational::{self, Rational};
use crate::surface_model::{BaseCurve, BaseModel, BasePoint, ChernData, MultipleFibre, NSClass, SurfaceData};
use crate::tate_curve::{CurveParam, TatePoint};

pub const SCHEMA: u32 = 1;

pub type C = [f64; 2];

fn complex(c: C) -> Complex<f64> {
    Complex::new(c[0], c[1])
}

fn pair(z: Complex<f64>) -> C {
    [z.re, z.im]
}

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(parse_err)
}

pub fn to_json<T: Serialize>(x: &T) -> String {
    serde_json::to_string_pretty(x).expect("serialisable")
}

fn check_schema(schema: Option<u32>) -> Result<()> {
    match schema {
        None | Some(SCHEMA) => Ok(()),
        Some(s) => Err(Error::Parse(format!("unsupported schema version {s}"))),
    }
}

/// Rational entry written either as `"p/q"` or as a JSON integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalDto {
    Int(i64),
    Str(String),
}

impl RationalDto {
    pub fn value(&self) -> Result<Rational> {
        match self {
            RationalDto::Int(n) => Ok(rational::int(*n)),
            RationalDto::Str(s) => rational::parse(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointDto {
    Complex(C),
    Named(String),
    Label { label: u32 },
}

pub fn point_to_dto(b: &BasePoint<f64>) -> PointDto {
    match b {
        BasePoint::Finite(z) => PointDto::Complex(pair(*z)),
        BasePoint::Infinity => PointDto::Named("inf".into()),
        BasePoint::Label(l) => PointDto::Label { label: *l },
    }
}

pub fn point_from_dto(p: &PointDto) -> Result<BasePoint<f64>> {
    match p {
        PointDto::Complex(c) => Ok(BasePoint::Finite(complex(*c))),
        PointDto::Named(s) if s == "inf" => Ok(BasePoint::Infinity),
        PointDto::Named(s) => Err(Error::Parse(format!("unknown point {s:?}"))),
        PointDto::Label { label } => Ok(BasePoint::Label(*label)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeDto {
    pub rank: usize,
    #[serde(default)]
    pub gram: Vec<Vec<RationalDto>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<u32>,
    pub genus: u32,
    pub tau: C,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<C>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hom_exponents: Option<Vec<i64>>,
    #[serde(default)]
    pub multiple_fibres: Vec<(PointDto, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_degree: Option<u32>,
    pub lattice: LatticeDto,
}

pub fn surface_from_dto(s: &SurfaceDto) -> Result<SurfaceData<f64>> {
    check_schema(s.schema)?;
    let fibre = CurveParam::new(complex(s.tau))?;
    let model = match s.genus {
        0 => BaseModel::Rational,
        1 => BaseModel::Tate {
            sigma: CurveParam::new(complex(s.sigma.unwrap_or(s.tau)))?,
            hom_exponents: s.hom_exponents.clone(),
        },
        _ => BaseModel::Abstract,
    };
    let gram = s
        .lattice
        .gram
        .iter()
        .map(|row| row.iter().map(RationalDto::value).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if gram.len() != s.lattice.rank {
        return Err(Error::InvalidGram(format!("rank {} but {} rows", s.lattice.rank, gram.len())));
    }
    let lattice = HomLattice::from_gram(&gram)?;
    let multiple = s
        .multiple_fibres
        .iter()
        .map(|(p, m)| {
            Ok(MultipleFibre {
                point: point_from_dto(p)?,
                multiplicity: *m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SurfaceData::new(BaseCurve::new(s.genus, model)?, fibre, multiple, s.theta_degree, lattice)
}

pub fn surface_to_dto(x: &SurfaceData<f64>) -> SurfaceDto {
    let (sigma, hom_exponents) = match &x.base().model {
        BaseModel::Tate { sigma, hom_exponents } => (Some(pair(sigma.tau())), hom_exponents.clone()),
        _ => (None, None),
    };
    SurfaceDto {
        schema: Some(SCHEMA),
        genus: x.genus(),
        tau: pair(x.fibre().tau()),
        sigma,
        hom_exponents,
        multiple_fibres: x
            .multiple_fibres()
            .iter()
            .map(|m| (point_to_dto(&m.point), m.multiplicity))
            .collect(),
        theta_degree: x.theta_degree(),
        lattice: LatticeDto {
            rank: x.lattice().rank(),
            gram: x
                .lattice()
                .gram()
                .iter()
                .map(|row| row.iter().map(|r| RationalDto::Str(rational::to_string(r))).collect())
                .collect(),
        },
    }
}

pub fn parse_surface(json: &str) -> Result<SurfaceData<f64>> {
    surface_from_dto(&from_json(json)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionDto {
    pub constant: C,
    #[serde(default)]
    pub hom: Vec<i64>,
}

fn fibre_point(x: &SurfaceData<f64>, c: C) -> Result<TatePoint<f64>> {
    x.fibre().point(complex(c))
}

pub fn section_from_dto(x: &SurfaceData<f64>, s: &SectionDto) -> Result<SectionOfJ<f64>> {
    let mut hom = s.hom.clone();
    if hom.is_empty() {
        hom = vec![0; x.lattice().rank()];
    }
    x.lattice().check_dim(&hom)?;
    Ok(SectionOfJ::new(fibre_point(x, s.constant)?, hom))
}

pub fn section_to_dto(s: &SectionOfJ<f64>) -> SectionDto {
    SectionDto {
        constant: pair(s.constant.rep()),
        hom: s.hom.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineBundleDto {
    pub section: SectionDto,
    #[serde(default)]
    pub base_degree: i64,
    #[serde(default)]
    pub fibre_twists: Vec<i64>,
}

pub fn line_bundle_from_dto(x: &SurfaceData<f64>, l: &LineBundleDto) -> Result<LineBundleOnX<f64>> {
    let mut twists = l.fibre_twists.clone();
    if twists.is_empty() {
        twists = vec![0; x.multiple_fibres().len()];
    }
    let out = LineBundleOnX::new(section_from_dto(x, &l.section)?, l.base_degree, twists);
    out.check(x)?;
    Ok(out)
}

pub fn line_bundle_to_dto(l: &LineBundleOnX<f64>) -> LineBundleDto {
    LineBundleDto {
        section: section_to_dto(&l.section),
        base_degree: l.base_degree,
        fibre_twists: l.fibre_twists.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceDto {
    pub num: Vec<C>,
    pub den: Vec<C>,
    pub center: C,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrreducibleDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_order: Option<u64>,
    #[serde(default)]
    pub branch_points: Vec<PointDto>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BisectionDto {
    Reducible(SectionDto, SectionDto),
    Irreducible(IrreducibleDto),
}

pub fn bisection_from_dto(x: &SurfaceData<f64>, b: &BisectionDto) -> Result<Bisection<f64>> {
    match b {
        BisectionDto::Reducible(s1, s2) => Ok(Bisection::Reducible(section_from_dto(x, s1)?, section_from_dto(x, s2)?)),
        BisectionDto::Irreducible(i) => {
            let points = i.branch_points.iter().map(point_from_dto).collect::<Result<Vec<_>>>()?;
            match (&i.trace, i.branch_order) {
                (Some(t), _) => {
                    if x.genus() != 0 {
                        return Err(Error::Parse("a rational trace needs a rational base".into()));
                    }
                    Ok(Bisection::Irreducible(DoubleCover::Rational(RationalCover {
                        map: RationalMap::new(
                            t.num.iter().copied().map(complex).collect(),
                            t.den.iter().copied().map(complex).collect(),
                        )?,
                        center: fibre_point(x, t.center)?,
                        declared_branch_points: points,
                    })))
                }
                (None, Some(order)) => Ok(Bisection::Irreducible(DoubleCover::Declared {
                    branch_order: order,
                    branch_points: points,
                })),
                (None, None) => Err(Error::Parse("irreducible bisection needs a trace or a branch order".into())),
            }
        }
    }
}

pub fn bisection_to_dto(b: &Bisection<f64>) -> BisectionDto {
    match b {
        Bisection::Reducible(s1, s2) => BisectionDto::Reducible(section_to_dto(s1), section_to_dto(s2)),
        Bisection::Irreducible(DoubleCover::Rational(rc)) => BisectionDto::Irreducible(IrreducibleDto {
            trace: Some(TraceDto {
                num: rc.map.num.iter().copied().map(pair).collect(),
                den: rc.map.den.iter().copied().map(pair).collect(),
                center: pair(rc.center.rep()),
            }),
            branch_order: None,
            branch_points: rc.declared_branch_points.iter().map(point_to_dto).collect(),
        }),
        Bisection::Irreducible(DoubleCover::Declared {
            branch_order,
            branch_points,
        }) => BisectionDto::Irreducible(IrreducibleDto {
            trace: None,
            branch_order: Some(*branch_order),
            branch_points: branch_points.iter().map(point_to_dto).collect(),
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NonsplitDto {
    Everywhere(String),
    At(Vec<PointDto>),
}

impl Default for NonsplitDto {
    fn default() -> Self {
        NonsplitDto::At(Vec::new())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionDto {
    #[serde(rename = "D")]
    pub d: LineBundleDto,
    pub delta: LineBundleDto,
    #[serde(rename = "Z", default)]
    pub z: Vec<(PointDto, u32)>,
    #[serde(default)]
    pub nonsplit_at: NonsplitDto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPushDto {
    pub bisection: BisectionDto,
    pub delta: LineBundleDto,
    #[serde(default)]
    pub z_length: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElemModDto {
    pub parent: Box<BundleDto>,
    pub fibre: PointDto,
    pub steps: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleDto {
    Extension(ExtensionDto),
    SpectralPush(SpectralPushDto),
    ElemMod(ElemModDto),
}

pub fn bundle_from_dto(jac: &JacobianSurface<'_, f64>, b: &BundleDto) -> Result<RankTwoBundle<f64>> {
    let x = jac.surface();
    match b {
        BundleDto::Extension(e) => {
            let z = e
                .z
                .iter()
                .map(|(p, k)| Ok((point_from_dto(p)?, *k)))
                .collect::<Result<Vec<_>>>()?;
            let nonsplit = match &e.nonsplit_at {
                NonsplitDto::Everywhere(s) if s == "everywhere" => NonsplitLocus::Everywhere,
                NonsplitDto::Everywhere(s) => return Err(Error::Parse(format!("unknown nonsplit locus {s:?}"))),
                NonsplitDto::At(points) => NonsplitLocus::At(points.iter().map(point_from_dto).collect::<Result<_>>()?),
            };
            RankTwoBundle::extension(
                jac,
                line_bundle_from_dto(x, &e.d)?,
                line_bundle_from_dto(x, &e.delta)?,
                z,
                nonsplit,
            )
        }
        BundleDto::SpectralPush(s) => RankTwoBundle::spectral_push(
            jac,
            bisection_from_dto(x, &s.bisection)?,
            line_bundle_from_dto(x, &s.delta)?,
            s.z_length,
        ),
        BundleDto::ElemMod(m) => {
            let parent = bundle_from_dto(jac, &m.parent)?;
            RankTwoBundle::elementary_modification(jac, &parent, point_from_dto(&m.fibre)?, m.steps)
        }
    }
}

pub fn bundle_to_dto(e: &RankTwoBundle<f64>) -> BundleDto {
    match e.presentation() {
        Presentation::Extension { d, delta, z, nonsplit_at } => BundleDto::Extension(ExtensionDto {
            d: line_bundle_to_dto(d),
            delta: line_bundle_to_dto(delta),
            z: z.iter().map(|(p, k)| (point_to_dto(p), *k)).collect(),
            nonsplit_at: match nonsplit_at {
                NonsplitLocus::Everywhere => NonsplitDto::Everywhere("everywhere".into()),
                NonsplitLocus::At(points) => NonsplitDto::At(points.iter().map(point_to_dto).collect()),
            },
        }),
        Presentation::SpectralPush {
            bisection,
            delta,
            z_length,
        } => BundleDto::SpectralPush(SpectralPushDto {
            bisection: bisection_to_dto(bisection),
            delta: line_bundle_to_dto(delta),
            z_length: *z_length,
        }),
        Presentation::ElemMod { parent, fibre, steps } => BundleDto::ElemMod(ElemModDto {
            parent: Box::new(bundle_to_dto(parent)),
            fibre: point_to_dto(fibre),
            steps: *steps as i64,
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecipeBaseDto {
    Reducible {
        #[serde(rename = "D")]
        d: LineBundleDto,
        delta: LineBundleDto,
    },
    SpectralPush {
        bisection: BisectionDto,
        delta: LineBundleDto,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecipeDto {
    pub base: RecipeBaseDto,
    #[serde(with = "rational::serde_str")]
    pub delta0: Rational,
    pub fibre: PointDto,
    pub steps: u32,
    pub expected: ChernData,
    pub transcript: Vec<ChernData>,
}

pub fn recipe_to_dto(r: &Recipe<f64>) -> RecipeDto {
    RecipeDto {
        base: match &r.base {
            RecipeBase::Reducible { d, delta } => RecipeBaseDto::Reducible {
                d: line_bundle_to_dto(d),
                delta: line_bundle_to_dto(delta),
            },
            RecipeBase::SpectralPush { bisection, delta } => RecipeBaseDto::SpectralPush {
                bisection: bisection_to_dto(bisection),
                delta: line_bundle_to_dto(delta),
            },
        },
        delta0: r.delta0,
        fibre: point_to_dto(&r.fibre),
        steps: r.steps,
        expected: r.expected.clone(),
        transcript: r.transcript.clone(),
    }
}

pub fn recipe_from_dto(x: &SurfaceData<f64>, r: &RecipeDto) -> Result<Recipe<f64>> {
    Ok(Recipe {
        base: match &r.base {
            RecipeBaseDto::Reducible { d, delta } => RecipeBase::Reducible {
                d: line_bundle_from_dto(x, d)?,
                delta: line_bundle_from_dto(x, delta)?,
            },
            RecipeBaseDto::SpectralPush { bisection, delta } => RecipeBase::SpectralPush {
                bisection: bisection_from_dto(x, bisection)?,
                delta: line_bundle_from_dto(x, delta)?,
            },
        },
        delta0: r.delta0,
        fibre: point_from_dto(&r.fibre)?,
        steps: r.steps,
        expected: r.expected.clone(),
        transcript: r.transcript.clone(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagDto {
    Filtrable,
    NonFiltrable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum VerdictDto {
    Exists {
        schema: u32,
        #[serde(with = "rational::serde_str")]
        delta: Rational,
        #[serde(with = "rational::serde_str")]
        m: Rational,
        filtrable: TagDto,
        recipe: Option<RecipeDto>,
    },
    NotExists {
        schema: u32,
        #[serde(with = "rational::serde_str")]
        delta: Rational,
        reason: String,
    },
    Unknown {
        schema: u32,
        #[serde(with = "rational::serde_str")]
        delta: Rational,
        #[serde(with = "rational::serde_str")]
        m: Rational,
        #[serde(with = "rational::serde_interval")]
        interval: (Rational, Rational),
        d_range: (i64, i64),
    },
}

pub fn verdict_to_dto(v: &Verdict<f64>) -> VerdictDto {
    match v {
        Verdict::Exists { delta, m, tag, recipe } => VerdictDto::Exists {
            schema: SCHEMA,
            delta: *delta,
            m: *m,
            filtrable: match tag {
                FiltrableTag::Filtrable => TagDto::Filtrable,
                FiltrableTag::NonFiltrable => TagDto::NonFiltrable,
            },
            recipe: recipe.as_deref().map(recipe_to_dto),
        },
        Verdict::NotExists { delta, reason } => VerdictDto::NotExists {
            schema: SCHEMA,
            delta: *delta,
            reason: reason.clone(),
        },
        Verdict::Unknown {
            delta,
            m,
            interval,
            d_range,
        } => VerdictDto::Unknown {
            schema: SCHEMA,
            delta: *delta,
            m: *m,
            interval: *interval,
            d_range: *d_range,
        },
    }
}

pub fn verdict_from_dto(x: &SurfaceData<f64>, v: &VerdictDto) -> Result<Verdict<f64>> {
    Ok(match v {
        VerdictDto::Exists {
            schema,
            delta,
            m,
            filtrable,
            recipe,
        } => {
            check_schema(Some(*schema))?;
            Verdict::Exists {
                delta: *delta,
                m: *m,
                tag: match filtrable {
                    TagDto::Filtrable => FiltrableTag::Filtrable,
                    TagDto::NonFiltrable => FiltrableTag::NonFiltrable,
                },
                recipe: recipe.as_ref().map(|r| recipe_from_dto(x, r).map(Box::new)).transpose()?,
            }
        }
        VerdictDto::NotExists { schema, delta, reason } => {
            check_schema(Some(*schema))?;
            Verdict::NotExists {
                delta: *delta,
                reason: reason.clone(),
            }
        }
        VerdictDto::Unknown {
            schema,
            delta,
            m,
            interval,
            d_range,
        } => {
            check_schema(Some(*schema))?;
            Verdict::Unknown {
                delta: *delta,
                m: *m,
                interval: *interval,
                d_range: *d_range,
            }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDto {
    pub samples: usize,
    pub max_residual: f64,
    pub false_positives: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_fibre: Option<String>,
}

impl From<&VerificationReport> for ReportDto {
    fn from(r: &VerificationReport) -> Self {
        Self {
            samples: r.samples,
            max_residual: r.max_residual,
            false_positives: r.false_positives,
            worst_fibre: r.worst_fibre.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccountingDto {
    pub cover_dot_zero_section: i64,
    pub jumps: u64,
    pub n_e: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverDto {
    pub schema: u32,
    pub bisection: BisectionDto,
    pub jumps: Vec<(PointDto, u32)>,
    #[serde(default)]
    pub untracked: Vec<PointDto>,
    pub filtrable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accounting: Option<AccountingDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<ReportDto>,
}

pub fn cover_to_dto(c: &SpectralCover<f64>) -> CoverDto {
    CoverDto {
        schema: SCHEMA,
        bisection: bisection_to_dto(&c.bisection),
        jumps: c.jumps.iter().map(|(p, k)| (point_to_dto(p), *k)).collect(),
        untracked: c.untracked.iter().map(point_to_dto).collect(),
        filtrable: !c.bisection.is_irreducible(),
        accounting: None,
        verification: None,
    }
}

pub fn cover_from_dto(x: &SurfaceData<f64>, c: &CoverDto) -> Result<SpectralCover<f64>> {
    check_schema(Some(c.schema))?;
    Ok(SpectralCover {
        bisection: bisection_from_dto(x, &c.bisection)?,
        jumps: c
            .jumps
            .iter()
            .map(|(p, k)| Ok((point_from_dto(p)?, *k)))
            .collect::<Result<Vec<_>>>()?,
        untracked: c.untracked.iter().map(point_from_dto).collect::<Result<Vec<_>>>()?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RestrictionDto {
    Split { values: [C; 2] },
    NonSplit { value: C },
    Unstable { sub_degree: u32 },
}

pub fn restriction_to_dto(r: &FibreRestriction<f64>) -> RestrictionDto {
    match r {
        FibreRestriction::Split(a, b) => RestrictionDto::Split {
            values: [pair(a.rep()), pair(b.rep())],
        },
        FibreRestriction::NonSplit(a) => RestrictionDto::NonSplit { value: pair(a.rep()) },
        FibreRestriction::Unstable(k) => RestrictionDto::Unstable { sub_degree: *k },
    }
}

/// Parses a first Chern class: a JSON object `{"torsion": [...], "hom": [...]}`,
/// a JSON array of lattice coordinates, or comma-separated lattice coordinates.
/// Missing torsion coordinates are zero.
pub fn parse_c1(x: &SurfaceData<f64>, s: &str) -> Result<NSClass> {
    let s = s.trim();
    let mut c = if s.starts_with('{') {
        from_json::<NSClass>(s)?
    } else {
        let hom: Vec<i64> = if s.starts_with('[') {
            from_json(s)?
        } else if s.is_empty() {
            Vec::new()
        } else {
            s.split(',')
                .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("not an integer: {t:?}"))))
                .collect::<Result<_>>()?
        };
        NSClass::new(Vec::new(), hom)
    };
    if c.torsion.is_empty() {
        c.torsion = vec![0; x.torsion_len()];
    }
    if c.hom.is_empty() {
        c.hom = vec![0; x.lattice().rank()];
    }
    x.lattice().check_dim(&c.hom)?;
    if c.torsion.len() != x.torsion_len() {
        return Err(Error::DimensionMismatch {
            expected: x.torsion_len(),
            got: c.torsion.len(),
        });
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::existence::{construction_recipe, existence_verdict};
    use crate::tate_curve::Tolerance;

    const P1: &str = r#"{"schema": 1, "genus": 0, "tau": [3.0, 0.0], "theta_degree": 1, "lattice": {"rank": 0, "gram": []}}"#;

    #[test]
    fn surface_round_trip() {
        let x = parse_surface(P1).unwrap();
        assert_eq!(x.genus(), 0);
        let back = surface_from_dto(&surface_to_dto(&x)).unwrap();
        assert_eq!(back, x);
        let g1 = r#"{"genus": 1, "tau": [0.0, 2.0], "sigma": [0.0, 2.0], "hom_exponents": [2],
                     "lattice": {"rank": 1, "gram": [["2/1"]]}}"#;
        let y = parse_surface(g1).unwrap();
        assert_eq!(y.lattice().deg(&[1]).unwrap(), 2);
        assert_eq!(surface_from_dto(&from_json(&to_json(&surface_to_dto(&y))).unwrap()).unwrap(), y);
    }

    #[test]
    fn surface_rejections() {
        assert!(matches!(
            parse_surface(r#"{"genus": 0, "tau": [0.5, 0.0], "lattice": {"rank": 0}}"#),
            Err(Error::InvalidPeriod(_))
        ));
        assert!(parse_surface(r#"{"genus": 2, "tau": [3.0, 0.0], "lattice": {"rank": 1, "gram": [[-1]]}}"#).is_err());
        assert!(matches!(parse_surface(r#"{"genus": 0}"#), Err(Error::Parse(_))));
        assert!(parse_surface(r#"{"schema": 2, "genus": 0, "tau": [3.0, 0.0], "lattice": {"rank": 0}}"#).is_err());
    }

    #[test]
    fn verdict_round_trip() {
        let x = parse_surface(P1).unwrap();
        let jac = JacobianSurface::new(&x, Tolerance::default(), 7);
        for c2 in [-1, 0, 2] {
            let v = existence_verdict(&jac, &ChernData::new(NSClass::zero(1, 0), c2), None, None).unwrap();
            let json = to_json(&verdict_to_dto(&v));
            let back = verdict_from_dto(&x, &from_json(&json).unwrap()).unwrap();
            assert_eq!(back, v);
        }
        let r = construction_recipe(&jac, &ChernData::new(NSClass::zero(1, 0), 2), None).unwrap();
        let json = to_json(&recipe_to_dto(&r));
        assert!(json.contains("\"delta0\": \"0/1\""));
        assert_eq!(recipe_from_dto(&x, &from_json(&json).unwrap()).unwrap(), r);
    }

    #[test]
    fn bundle_and_cover_round_trip() {
        let x = parse_surface(P1).unwrap();
        let jac = JacobianSurface::new(&x, Tolerance::default(), 7);
        let json = r#"{"elem_mod": {"parent": {"extension": {
                "D": {"section": {"constant": [1.5, 0.5]}},
                "delta": {"section": {"constant": [1.0, 0.0]}},
                "Z": [[[0.1, 0.2], 1]], "nonsplit_at": "everywhere"}},
            "fibre": [0.5, 0.0], "steps": 2}}"#;
        let e = bundle_from_dto(&jac, &from_json(json).unwrap()).unwrap();
        assert_eq!(e.chern().c2, 3);
        let again = bundle_from_dto(&jac, &from_json(&to_json(&bundle_to_dto(&e))).unwrap()).unwrap();
        assert_eq!(again, e);
        let cover = crate::bundles::spectral_cover(&jac, &e).unwrap();
        let dto = cover_to_dto(&cover);
        assert_eq!(cover_from_dto(&x, &from_json(&to_json(&dto)).unwrap()).unwrap(), cover);
        let push = r#"{"spectral_push": {"bisection": {"irreducible": {"trace": {"num": [[0,0],[1,0]], "den": [[1,0]], "center": [1,0]}}},
                       "delta": {"section": {"constant": [1.0, 0.0]}}}}"#;
        let e = bundle_from_dto(&jac, &from_json(push).unwrap()).unwrap();
        assert_eq!(e.chern().c2, 1);
        assert_eq!(bundle_from_dto(&jac, &bundle_to_dto(&e)).unwrap(), e);
    }

    #[test]
    fn c1_forms() {
        let y = parse_surface(r#"{"genus": 1, "tau": [3.0, 0.0], "lattice": {"rank": 1, "gram": [[1]]}}"#).unwrap();
        assert_eq!(parse_c1(&y, "3").unwrap(), NSClass::new(vec![0], vec![3]));
        assert_eq!(parse_c1(&y, "[2]").unwrap(), NSClass::new(vec![0], vec![2]));
        assert_eq!(parse_c1(&y, r#"{"torsion": [1], "hom": [1]}"#).unwrap(), NSClass::new(vec![1], vec![1]));
        assert!(parse_c1(&y, "1,2").is_err());
        let x = parse_surface(P1).unwrap();
        assert_eq!(parse_c1(&x, "").unwrap(), NSClass::zero(1, 0));
    }
}
