//! Pseudo-Riemannian contexts and their curvature.
//!
//! A [`Context`] holds the metric as a tensor of jets in a local basis. In a
//! coordinate chart the basis is `∂_1…∂_n` and every basis vector differentiates
//! along one jet variable. In a homogeneous frame the basis is a left-invariant
//! frame with constant structure constants and constant metric components, so
//! every basis vector annihilates every component. Products mix the two.

mod poly;
mod stack;

pub use poly::{Polynomial, RationalFunction};
pub use stack::CurvatureStack;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Jet, Scalar};
use crate::tensor::{linalg, Down, Tensor, Up};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContextKind {
    Chart,
    Frame,
    Product,
}

#[derive(Clone, Debug)]
pub struct Context<S: Scalar> {
    kind: ContextKind,
    vars: usize,
    metric: Tensor<Jet<S>>,
    structure: Tensor<S>,
    directions: Vec<Option<usize>>,
    orientation: i8,
    label: String,
}

impl<S: Scalar> Context<S> {
    /// A coordinate chart whose metric components are jets in `dim` variables.
    pub fn chart(label: impl Into<String>, metric: Tensor<Jet<S>>) -> Result<Self> {
        let n = metric.dim();
        check_metric(&metric)?;
        if let Some(v) = metric.data().iter().find_map(|j| j.vars().filter(|&v| v != n)) {
            return Err(Error::ShapeMismatch(format!("chart metric jets in {v} variables, dimension {n}")));
        }
        Ok(Context {
            kind: ContextKind::Chart,
            vars: n,
            structure: Tensor::zeros(n, vec![Down, Down, Up]),
            directions: (0..n).map(Some).collect(),
            orientation: 1,
            label: label.into(),
            metric,
        })
    }

    /// A left-invariant frame with `[e_a, e_b] = c^k_ab e_k`; `structure` has slots (a, b, k).
    pub fn frame(label: impl Into<String>, metric: Tensor<S>, structure: Tensor<S>) -> Result<Self> {
        let n = metric.dim();
        if structure.dim() != n || structure.valence() != [Down, Down, Up] {
            return Err(Error::InvalidStructure("structure constants need slots (down, down, up)".into()));
        }
        let metric = Tensor::constant(&metric);
        check_metric(&metric)?;
        validate_structure(&structure)?;
        Ok(Context {
            kind: ContextKind::Frame,
            vars: 0,
            metric,
            structure,
            directions: vec![None; n],
            orientation: 1,
            label: label.into(),
        })
    }

    /// Riemannian product; the orientation is the product of the factors'.
    pub fn product(parts: &[&Context<S>]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("product of no factors".into()));
        }
        let n: usize = parts.iter().map(|p| p.dim()).sum();
        let vars: usize = parts.iter().map(|p| p.vars).sum();
        let mut metric = Tensor::zeros(n, vec![Down, Down]);
        let mut structure = Tensor::zeros(n, vec![Down, Down, Up]);
        let mut directions = Vec::with_capacity(n);
        let (mut off, mut var_off) = (0, 0);
        let mut orientation = 1;
        for p in parts {
            let m = p.dim();
            for i in 0..m {
                for j in 0..m {
                    let g = p.metric.get(&[i, j]);
                    let g = if p.vars == 0 { Jet::constant(g.value().clone()) } else { g.embed(vars, var_off) };
                    metric.set(&[off + i, off + j], g);
                    for k in 0..m {
                        structure.set(&[off + i, off + j, off + k], p.structure.get(&[i, j, k]).clone());
                    }
                }
            }
            directions.extend(p.directions.iter().map(|d| d.map(|v| v + var_off)));
            orientation *= p.orientation;
            off += m;
            var_off += p.vars;
        }
        let label = parts.iter().map(|p| p.label.as_str()).collect::<Vec<_>>().join(" × ");
        Ok(Context { kind: ContextKind::Product, vars, metric, structure, directions, orientation, label })
    }

    pub fn with_orientation(mut self, orientation: i8) -> Result<Self> {
        if orientation != 1 && orientation != -1 {
            return Err(Error::InvalidArgument(format!("orientation must be ±1, got {orientation}")));
        }
        self.orientation = orientation;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The conformally related context with metric `e^{2Υ} g`.
    pub fn rescale(&self, upsilon: &Jet<S>) -> Result<Self> {
        match upsilon.vars() {
            Some(v) if self.vars == 0 && v > 0 => return Err(Error::NonConstantOnFrame),
            Some(v) if v != self.vars && v > 0 => {
                return Err(Error::ShapeMismatch(format!("Υ in {v} variables, context has {}", self.vars)));
            }
            _ => {}
        }
        let factor = upsilon
            .scale_i64(2)
            .exp()
            .ok_or(Error::NotRepresentable { quantity: "e^{2Υ}".into(), kind: S::KIND.name() })?;
        let mut out = self.clone();
        out.metric = self.metric.map(|g| g.clone() * &factor);
        Ok(out)
    }

    /// Re-expresses every component in another scalar kind.
    pub fn lift<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> Context<T> {
        Context {
            kind: self.kind,
            vars: self.vars,
            metric: self.metric.map(|j| j.map(f)),
            structure: self.structure.map(f),
            directions: self.directions.clone(),
            orientation: self.orientation,
            label: self.label.clone(),
        }
    }

    pub fn kind(&self) -> ContextKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// Number of jet variables.
    pub fn vars(&self) -> usize {
        self.vars
    }

    /// True when every basis vector annihilates every metric component.
    pub fn is_homogeneous(&self) -> bool {
        self.vars == 0
    }

    pub fn metric(&self) -> &Tensor<Jet<S>> {
        &self.metric
    }

    pub fn structure(&self) -> &Tensor<S> {
        &self.structure
    }

    pub fn directions(&self) -> &[Option<usize>] {
        &self.directions
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Truncation order of the metric jets; `None` when every component is constant.
    pub fn jet_order(&self) -> Option<usize> {
        self.metric.jet_order()
    }

    /// `e_a f`: a coordinate derivative in a chart direction, zero along a frame direction.
    pub fn derive(&self, a: usize, f: &Jet<S>) -> Result<Jet<S>> {
        match self.directions[a] {
            Some(v) if !f.is_constant() => f.derivative(v),
            _ => Ok(Jet::zero()),
        }
    }

    pub fn build_stack(&self) -> Result<CurvatureStack<S>> {
        CurvatureStack::build(self)
    }
}

fn check_metric<S: Scalar>(metric: &Tensor<Jet<S>>) -> Result<()> {
    if metric.valence() != [Down, Down] {
        return Err(Error::ShapeMismatch("metric must be g_ab".into()));
    }
    let n = metric.dim();
    for i in 0..n {
        for j in 0..i {
            if metric.get(&[i, j]) != metric.get(&[j, i]) {
                return Err(Error::InvalidArgument(format!("metric is not symmetric in ({i}, {j})")));
            }
        }
    }
    let det = linalg::determinant(&metric.values().to_matrix());
    let scale = metric.values().max_magnitude().max(1.0).powi(n as i32);
    if !det.is_invertible() || (!S::EXACT && det.magnitude() <= 1e-12 * scale) {
        return Err(Error::DegenerateMetric);
    }
    Ok(())
}

/// Antisymmetry of `c^k_ab` in (a, b) and the Jacobi identity.
fn validate_structure<S: Scalar>(c: &Tensor<S>) -> Result<()> {
    let n = c.dim();
    let tol = if S::EXACT { 0.0 } else { 1e-12 * c.max_magnitude().max(1.0).powi(2) };
    let bad = |x: &S| if S::EXACT { !x.is_zero() } else { x.magnitude() > tol };
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                if bad(&(c.get(&[a, b, k]).clone() + c.get(&[b, a, k]))) {
                    return Err(Error::InvalidStructure(format!("c^{k}_({a}{b}) is not antisymmetric")));
                }
            }
        }
    }
    // Σ_cyclic [[e_a, e_b], e_c] = c^m_ab c^p_mc + c^m_bc c^p_ma + c^m_ca c^p_mb
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                for p in 0..n {
                    let mut s = S::zero();
                    for m in 0..n {
                        s += &(c.get(&[a, b, m]).clone() * c.get(&[m, d, p]));
                        s += &(c.get(&[b, d, m]).clone() * c.get(&[m, a, p]));
                        s += &(c.get(&[d, a, m]).clone() * c.get(&[m, b, p]));
                    }
                    if bad(&s) {
                        return Err(Error::InvalidStructure(format!("Jacobi identity fails at ({a},{b},{d})")));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn su2(scale: i64) -> Tensor<Rational> {
        let mut c = Tensor::zeros(3, vec![Down, Down, Up]);
        for (a, b, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c.set(&[a, b, k], q(scale));
            c.set(&[b, a, k], q(-scale));
        }
        c
    }

    #[test]
    fn frame_validation() {
        let g = Tensor::from_fn(3, vec![Down, Down], |i| if i[0] == i[1] { q(1) } else { q(0) });
        assert!(Context::frame("su2", g.clone(), su2(2)).is_ok());
        let mut broken = su2(2);
        broken.set(&[1, 0, 2], q(1));
        assert!(matches!(Context::frame("x", g.clone(), broken), Err(Error::InvalidStructure(_))));
        // [e0,e1]=e1, [e0,e2]=e0 violates Jacobi
        let mut c = Tensor::zeros(3, vec![Down, Down, Up]);
        c.set(&[0, 1, 1], q(1));
        c.set(&[1, 0, 1], q(-1));
        c.set(&[0, 2, 0], q(1));
        c.set(&[2, 0, 0], q(-1));
        assert!(matches!(Context::frame("x", g.clone(), c), Err(Error::InvalidStructure(_))));
        let degenerate = Tensor::from_fn(3, vec![Down, Down], |i| if i[0] == i[1] && i[0] > 0 { q(1) } else { q(0) });
        assert_eq!(Context::frame("x", degenerate, su2(2)).unwrap_err(), Error::DegenerateMetric);
    }

    #[test]
    fn non_constant_factor_on_frame_is_rejected() {
        let g = Tensor::from_fn(3, vec![Down, Down], |i| if i[0] == i[1] { q(1) } else { q(0) });
        let ctx = Context::frame("su2", g, su2(2)).unwrap();
        let ups = Jet::variable(1, 2, 0, q(0));
        assert_eq!(ctx.rescale(&ups).unwrap_err(), Error::NonConstantOnFrame);
        assert!(ctx.rescale(&Jet::constant(q(0))).is_ok());
    }

    #[test]
    fn product_offsets_variables_and_directions() {
        let g = Tensor::from_fn(3, vec![Down, Down], |i| if i[0] == i[1] { q(1) } else { q(0) });
        let frame = Context::frame("su2", g, su2(2)).unwrap();
        let chart_metric = Tensor::from_fn(2, vec![Down, Down], |i| {
            if i[0] == i[1] {
                Jet::variable(2, 3, i[0], q(1))
            } else {
                Jet::constant_with(2, 3, q(0))
            }
        });
        let chart = Context::chart("plane", chart_metric).unwrap().with_orientation(-1).unwrap();
        let p = Context::product(&[&frame, &chart]).unwrap();
        assert_eq!(p.dim(), 5);
        assert_eq!(p.vars(), 2);
        assert_eq!(p.directions(), &[None, None, None, Some(0), Some(1)]);
        assert_eq!(p.orientation(), -1);
        assert_eq!(p.metric().get(&[4, 4]).partial(&[0, 1]).unwrap(), q(1));
        assert_eq!(*p.structure().get(&[0, 1, 2]), q(2));
    }
}
