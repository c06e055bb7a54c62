//! Built-in metrics and their JSON configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Context, Polynomial, RationalFunction};
use crate::scalar::{parse_rational, Jet, Rational, Scalar};
use crate::tensor::{linalg, Down, Tensor, Up};

/// The Berger parameters swept by default.
pub fn berger_sweep() -> Vec<Rational> {
    ["1", "4", "9", "1/4"].iter().map(|s| parse_rational(s).unwrap()).collect()
}

fn q<S: Scalar>(v: i64) -> S {
    S::from_i64(v)
}

fn diagonal<S: Scalar>(entries: &[S]) -> Tensor<S> {
    Tensor::from_fn(entries.len(), vec![Down, Down], |i| if i[0] == i[1] { entries[i[0]].clone() } else { S::zero() })
}

/// Metric jets of a chart given by rational-function components.
pub fn chart_metric<S: Scalar>(entries: &[Vec<RationalFunction<S>>], point: &[S], order: usize) -> Result<Tensor<Jet<S>>> {
    let n = entries.len();
    if entries.iter().any(|r| r.len() != n) || point.len() != n {
        return Err(Error::InvalidModel(format!("chart of dimension {n} needs an {n}×{n} metric and an {n}-point")));
    }
    let mut out = Tensor::zeros(n, vec![Down, Down]);
    for i in 0..n {
        for j in 0..n {
            if entries[i][j].vars() != n {
                return Err(Error::InvalidModel(format!("g_{i}{j} is not a function of {n} variables")));
            }
            let mut jet = entries[i][j].jet(point, order)?;
            if jet.is_constant() {
                jet = Jet::constant_with(n, order, jet.into_value());
            }
            out.set(&[i, j], jet);
        }
    }
    Ok(out)
}

pub fn flat<S: Scalar>(n: usize, order: usize) -> Result<Context<S>> {
    let metric = Tensor::from_fn(n, vec![Down, Down], |i| {
        Jet::constant_with(n, order, if i[0] == i[1] { S::one() } else { S::zero() })
    });
    Context::chart(format!("flat R^{n}"), metric)
}

/// `4/(1+|x|²)² δ` in stereographic coordinates: the unit sphere.
pub fn round_sphere<S: Scalar>(n: usize, point: &[S], order: usize) -> Result<Context<S>> {
    let mut r2 = Polynomial::constant(n, S::one());
    for v in 0..n {
        let x = Polynomial::coordinate(n, v);
        r2 = r2.add(&x.mul(&x));
    }
    let conf = RationalFunction::new(Polynomial::constant(n, q(4)), r2.mul(&r2))?;
    let zero = RationalFunction::polynomial(Polynomial::zero(n));
    let entries: Vec<Vec<_>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { conf.clone() } else { zero.clone() }).collect()).collect();
    Context::chart(format!("round S^{n}"), chart_metric(&entries, point, order)?)
}

/// Structure constants `[e_0,e_1] = c e_2` and cyclic permutations.
pub fn su2_structure<S: Scalar>(c: S) -> Tensor<S> {
    let mut s = Tensor::zeros(3, vec![Down, Down, Up]);
    for (a, b, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        s.set(&[a, b, k], c.clone());
        s.set(&[b, a, k], -c.clone());
    }
    s
}

/// The Berger sphere `t α² + β² + γ²` on `S³` with `[X,Y] = 2Z` cyclically.
pub fn berger<S: Scalar>(t: &S) -> Result<Context<S>> {
    if !t.is_invertible() || t.to_f64() <= 0.0 {
        return Err(Error::InvalidModel(format!("Berger parameter must be positive, got {t:?}")));
    }
    let g = diagonal(&[t.clone(), S::one(), S::one()]);
    Context::frame(format!("Berger S^3 (t = {})", t.to_f64()), g, su2_structure(q(2)))
}

pub fn circle<S: Scalar>() -> Result<Context<S>> {
    Context::frame("S^1", diagonal(&[S::one()]), Tensor::zeros(1, vec![Down, Down, Up]))
}

/// The Berger sphere times a unit circle, with frame `(X, Y, Z, T)`.
pub fn berger_product<S: Scalar>(t: &S) -> Result<Context<S>> {
    Ok(Context::product(&[&berger(t)?, &circle()?])?.with_label(format!("Berger S^3 × S^1 (t = {})", t.to_f64())))
}

/// Fubini–Study metric on `CP²` (holomorphic sectional curvature 4) in the affine
/// chart `z_a = x_a + i y_a`, coordinates ordered `(x_1, y_1, x_2, y_2)`.
pub fn fubini_study_entries<S: Scalar>() -> Vec<Vec<RationalFunction<S>>> {
    let n = 4;
    let x = |a: usize| Polynomial::<S>::coordinate(n, 2 * a);
    let y = |a: usize| Polynomial::<S>::coordinate(n, 2 * a + 1);
    let mut s = Polynomial::constant(n, S::one());
    for a in 0..2 {
        s = s.add(&x(a).mul(&x(a))).add(&y(a).mul(&y(a)));
    }
    let den = s.mul(&s);
    let minus = -S::one();
    // h_ab̄ = ((1+|z|²)δ_ab − z̄_a z_b)/(1+|z|²)² = A + iB
    let a_part = |a: usize, b: usize| {
        let mut p = x(a).mul(&x(b)).add(&y(a).mul(&y(b))).scale(&minus);
        if a == b {
            p = p.add(&s);
        }
        p
    };
    let b_part = |a: usize, b: usize| x(a).mul(&y(b)).add(&y(a).mul(&x(b)).scale(&minus)).scale(&minus);
    let mut out = vec![vec![RationalFunction::polynomial(Polynomial::zero(n)); n]; n];
    for a in 0..2 {
        for b in 0..2 {
            let (ap, bp) = (a_part(a, b), b_part(a, b));
            let f = |p: Polynomial<S>| RationalFunction::new(p, den.clone()).unwrap();
            out[2 * a][2 * b] = f(ap.clone());
            out[2 * a + 1][2 * b + 1] = f(ap);
            out[2 * a][2 * b + 1] = f(bp.clone());
            out[2 * a + 1][2 * b] = f(bp.scale(&minus));
        }
    }
    out
}

pub fn fubini_study<S: Scalar>(point: &[S], order: usize) -> Result<Context<S>> {
    Context::chart("CP^2 Fubini-Study", chart_metric(&fubini_study_entries(), point, order)?)
}

/// `(S³ × S¹, Berger) × (CP², Fubini–Study)`.
pub fn berger_cp2<S: Scalar>(t: &S, point: &[S], order: usize) -> Result<Context<S>> {
    Context::product(&[&berger_product(t)?, &fubini_study(point, order)?])
}

/// Coefficient ranges of the random ensemble.
pub const RANDOM_METRIC_RANGE: f64 = 0.05;
pub const RANDOM_FACTOR_RANGE: f64 = 0.5;
pub const RANDOM_DEGREE: u32 = 3;

fn rng_for(seed: u64, trial: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial.wrapping_mul(2).wrapping_add(stream));
    rng
}

fn random_polynomial(n: usize, range: f64, rng: &mut ChaCha8Rng) -> Polynomial<f64> {
    let mut terms = Vec::new();
    let mut e = vec![0u32; n];
    loop {
        if e.iter().sum::<u32>() <= RANDOM_DEGREE {
            terms.push((e.clone(), rng.gen_range(-range..=range)));
        }
        let mut i = 0;
        loop {
            if i == n {
                return Polynomial { vars: n, terms };
            }
            e[i] += 1;
            if e[i] <= RANDOM_DEGREE {
                break;
            }
            e[i] = 0;
            i += 1;
        }
    }
}

fn positive_definite(m: &[Vec<f64>]) -> bool {
    (1..=m.len()).all(|k| {
        let minor: Vec<Vec<f64>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
        linalg::determinant(&minor) > 0.0
    })
}

/// `g = I + Q` at the origin with `Q` a symmetric matrix of random polynomials,
/// resampled until positive definite at the origin.
pub fn random_chart(n: usize, seed: u64, trial: u64, order: usize) -> Result<Context<f64>> {
    let mut rng = rng_for(seed, trial, 0);
    let origin = vec![0.0; n];
    for _ in 0..100 {
        let mut metric = Tensor::zeros(n, vec![Down, Down]);
        for i in 0..n {
            for j in i..n {
                let mut jet = random_polynomial(n, RANDOM_METRIC_RANGE, &mut rng).jet(&origin, order)?;
                if i == j {
                    jet += &Jet::constant(1.0);
                }
                metric.set(&[i, j], jet.clone());
                metric.set(&[j, i], jet);
            }
        }
        if positive_definite(&metric.values().to_matrix()) {
            return Context::chart(format!("random R^{n} (seed {seed}, trial {trial})"), metric);
        }
    }
    Err(Error::InvalidModel("no positive definite sample".into()))
}

/// A random conformal factor of degree at most 3 in `n` variables.
pub fn random_factor(n: usize, seed: u64, trial: u64, order: usize) -> Result<Jet<f64>> {
    let mut rng = rng_for(seed, trial, 1);
    random_polynomial(n, RANDOM_FACTOR_RANGE, &mut rng).jet(&vec![0.0; n], order)
}

/// JSON description of a model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Flat { dim: usize, #[serde(default = "default_order")] jet_order: usize },
    RoundSphere { dim: usize, #[serde(default)] point: Vec<String>, #[serde(default = "default_order")] jet_order: usize },
    Berger { t: String },
    Circle,
    BergerProduct { t: String },
    FubiniStudy { #[serde(default)] point: Vec<String>, #[serde(default = "default_order_small")] jet_order: usize },
    BergerCp2 { t: String, #[serde(default)] point: Vec<String>, #[serde(default = "default_order_small")] jet_order: usize },
    Chart { point: Vec<String>, metric: Vec<Vec<FunctionSpec>>, #[serde(default = "default_order")] jet_order: usize, #[serde(default)] label: Option<String> },
    Frame { metric: Vec<Vec<String>>, brackets: Vec<BracketSpec>, #[serde(default)] label: Option<String> },
    Product { factors: Vec<ModelSpec> },
}

fn default_order() -> usize {
    5
}

fn default_order_small() -> usize {
    3
}

/// `num / den`, each a list of monomials; an omitted denominator is 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub num: Vec<MonomialSpec>,
    #[serde(default)]
    pub den: Option<Vec<MonomialSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialSpec {
    pub coefficient: String,
    pub exponents: Vec<u32>,
}

/// `[e_a, e_b] = Σ value · e_k` entries; antisymmetry is implied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketSpec {
    pub a: usize,
    pub b: usize,
    pub k: usize,
    pub value: String,
}

fn rational<S: Scalar>(text: &str) -> Result<S> {
    parse_rational(text).map(|r| S::from_rational(&r)).ok_or_else(|| Error::Config(format!("not a rational number: {text:?}")))
}

fn point<S: Scalar>(p: &[String], n: usize) -> Result<Vec<S>> {
    if p.is_empty() {
        return Ok(vec![S::zero(); n]);
    }
    if p.len() != n {
        return Err(Error::Config(format!("point has {} coordinates, expected {n}", p.len())));
    }
    p.iter().map(|s| rational(s)).collect()
}

fn polynomial<S: Scalar>(terms: &[MonomialSpec], n: usize) -> Result<Polynomial<S>> {
    let mut out = Vec::with_capacity(terms.len());
    for m in terms {
        if m.exponents.len() != n {
            return Err(Error::Config(format!("monomial with {} exponents in {n} variables", m.exponents.len())));
        }
        out.push((m.exponents.clone(), rational(&m.coefficient)?));
    }
    Ok(Polynomial { vars: n, terms: out })
}

impl ModelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// A built-in model by name.
    pub fn named(name: &str, t: Option<&str>) -> Result<Self> {
        let t = t.unwrap_or("4").to_string();
        Ok(match name {
            "flat4" => ModelSpec::Flat { dim: 4, jet_order: 5 },
            "round-s4" | "round_s4" => ModelSpec::RoundSphere { dim: 4, point: vec![], jet_order: 5 },
            "berger" => ModelSpec::Berger { t },
            "berger-s1" | "berger_product" => ModelSpec::BergerProduct { t },
            "fs-cp2" | "fubini_study" => ModelSpec::FubiniStudy { point: vec![], jet_order: 3 },
            "berger-cp2" | "berger_cp2" => ModelSpec::BergerCp2 { t, point: vec![], jet_order: 3 },
            other => return Err(Error::Config(format!("unknown model {other:?}"))),
        })
    }

    /// The same model with every chart truncated at `order`.
    pub fn with_jet_order(&self, order: usize) -> Self {
        let mut out = self.clone();
        match &mut out {
            ModelSpec::Flat { jet_order, .. }
            | ModelSpec::RoundSphere { jet_order, .. }
            | ModelSpec::FubiniStudy { jet_order, .. }
            | ModelSpec::BergerCp2 { jet_order, .. }
            | ModelSpec::Chart { jet_order, .. } => *jet_order = order,
            ModelSpec::Product { factors } => {
                *factors = factors.iter().map(|f| f.with_jet_order(order)).collect();
            }
            ModelSpec::Berger { .. } | ModelSpec::BergerProduct { .. } | ModelSpec::Circle | ModelSpec::Frame { .. } => {}
        }
        out
    }

    pub fn build<S: Scalar>(&self) -> Result<Context<S>> {
        match self {
            ModelSpec::Flat { dim, jet_order } => flat(*dim, *jet_order),
            ModelSpec::RoundSphere { dim, point: p, jet_order } => round_sphere(*dim, &point(p, *dim)?, *jet_order),
            ModelSpec::Berger { t } => berger(&rational::<S>(t)?),
            ModelSpec::Circle => circle(),
            ModelSpec::BergerProduct { t } => berger_product(&rational::<S>(t)?),
            ModelSpec::FubiniStudy { point: p, jet_order } => fubini_study(&point(p, 4)?, *jet_order),
            ModelSpec::BergerCp2 { t, point: p, jet_order } => berger_cp2(&rational::<S>(t)?, &point(p, 4)?, *jet_order),
            ModelSpec::Chart { point: p, metric, jet_order, label } => {
                let n = metric.len();
                let entries = metric
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|f| {
                                let num = polynomial(&f.num, n)?;
                                let den = match &f.den {
                                    Some(d) => polynomial(d, n)?,
                                    None => Polynomial::constant(n, S::one()),
                                };
                                RationalFunction::new(num, den)
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let ctx = Context::chart(label.clone().unwrap_or_else(|| format!("chart R^{n}")), chart_metric(&entries, &point(p, n)?, *jet_order)?)?;
                Ok(ctx)
            }
            ModelSpec::Frame { metric, brackets, label } => {
                let n = metric.len();
                if metric.iter().any(|r| r.len() != n) {
                    return Err(Error::Config("frame metric must be square".into()));
                }
                let rows = metric.iter().map(|r| r.iter().map(|x| rational(x)).collect::<Result<Vec<S>>>()).collect::<Result<Vec<_>>>()?;
                let mut c = Tensor::zeros(n, vec![Down, Down, Up]);
                for br in brackets {
                    if br.a >= n || br.b >= n || br.k >= n {
                        return Err(Error::Config(format!("bracket index out of range in {br:?}")));
                    }
                    let v: S = rational(&br.value)?;
                    c.set(&[br.a, br.b, br.k], v.clone());
                    c.set(&[br.b, br.a, br.k], -v);
                }
                Context::frame(label.clone().unwrap_or_else(|| format!("frame of dimension {n}")), Tensor::from_matrix([Down, Down], &rows), c)
            }
            ModelSpec::Product { factors } => {
                let built = factors.iter().map(|f| f.build::<S>()).collect::<Result<Vec<_>>>()?;
                let refs: Vec<&Context<S>> = built.iter().collect();
                Context::product(&refs)
            }
        }
    }
}
