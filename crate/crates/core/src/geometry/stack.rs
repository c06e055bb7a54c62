use std::sync::OnceLock;

use num_traits::Zero;
use rayon::prelude::*;

use super::Context;
use crate::error::{Error, Result};
use crate::scalar::{Jet, Scalar};
use crate::tensor::{all_indices, linalg, Down, Tensor, Up, Variance, VolumeForm};

/// Levi-Civita connection and curvature of a [`Context`], with the metric in jets.
///
/// Slot conventions: `gamma[a,b,k] = Γ^k_ab` with `∇_{e_a} e_b = Γ^k_ab e_k`;
/// `riemann[a,b,k,l] = R_ab^k_l` with `R(e_a,e_b)e_l = R_ab^k_l e_k`; Weyl and
/// Cotton are all-down with `C_ijk = ∇_i P_jk − ∇_j P_ik`. Covariant derivatives
/// put the derivative slot first.
pub struct CurvatureStack<S: Scalar> {
    ctx: Context<S>,
    ginv: Tensor<Jet<S>>,
    gamma: Tensor<Jet<S>>,
    riemann: Tensor<Jet<S>>,
    riemann_down: Tensor<Jet<S>>,
    ricci: Tensor<Jet<S>>,
    scalar: Jet<S>,
    j: Jet<S>,
    schouten: Tensor<Jet<S>>,
    weyl: Tensor<Jet<S>>,
    cotton: Tensor<Jet<S>>,
    bach: OnceLock<Result<Tensor<Jet<S>>>>,
}

impl<S: Scalar> CurvatureStack<S> {
    pub fn build(ctx: &Context<S>) -> Result<Self> {
        let n = ctx.dim();
        if n < 3 {
            return Err(Error::Dimension { dim: n, requirement: "n ≥ 3 for the Schouten tensor".into() });
        }
        if let Some(k) = ctx.jet_order() {
            if k < 3 {
                return Err(Error::OrderExhausted(format!("Cotton needs metric jets of order ≥ 3, got {k}")));
            }
        }
        let g = ctx.metric().clone();
        let ginv = Tensor::from_matrix([Up, Up], &linalg::inverse(&g.to_matrix())?);
        let gamma = christoffel(ctx, &ginv)?;
        let c = ctx.structure();
        let riemann = par_tensor(n, vec![Down, Down, Up, Down], |idx| {
            let (a, b, k, l) = (idx[0], idx[1], idx[2], idx[3]);
            let mut r = ctx.derive(a, gamma.get(&[b, l, k]))? - &ctx.derive(b, gamma.get(&[a, l, k]))?;
            for m in 0..n {
                r += &(gamma.get(&[a, m, k]).clone() * gamma.get(&[b, l, m]));
                r -= &(gamma.get(&[b, m, k]).clone() * gamma.get(&[a, l, m]));
                let cm = c.get(&[a, b, m]);
                if !cm.is_zero() {
                    r -= &(gamma.get(&[m, l, k]).clone() * &Jet::constant(cm.clone()));
                }
            }
            Ok(r)
        })?;
        let riemann_down = riemann.lower(2, &g)?;
        let ricci = riemann.contract(&[(0, 2)])?;
        let scalar = ricci.contract_with(&ginv, &[(0, 0), (1, 1)])?.as_scalar().clone();
        let j = scalar.clone() / &Jet::constant(S::from_i64(2 * (n as i64 - 1)));
        let inv_nm2 = Jet::constant(S::one() / &S::from_i64(n as i64 - 2));
        let schouten = ricci.try_sub(&g.scale(&j))?.scale(&inv_nm2);
        let weyl = Tensor::from_fn(n, vec![Down; 4], |x| {
            let (i, jj, k, l) = (x[0], x[1], x[2], x[3]);
            let p = |a: usize, b: usize| schouten.get(&[a, b]);
            let gg = |a: usize, b: usize| g.get(&[a, b]);
            let kn = p(i, k).clone() * gg(jj, l) - &(p(i, l).clone() * gg(jj, k)) + &(p(jj, l).clone() * gg(i, k))
                - &(p(jj, k).clone() * gg(i, l));
            riemann_down.get(x).clone() - &kn
        });
        let mut stack = CurvatureStack {
            ctx: ctx.clone(),
            ginv,
            gamma,
            riemann,
            riemann_down,
            ricci,
            scalar,
            j,
            schouten,
            weyl,
            cotton: Tensor::zeros(n, vec![Down; 3]),
            bach: OnceLock::new(),
        };
        let dp = stack.nabla(&stack.schouten)?;
        stack.cotton = Tensor::from_fn(n, vec![Down; 3], |x| {
            dp.get(&[x[0], x[1], x[2]]).clone() - dp.get(&[x[1], x[0], x[2]])
        });
        Ok(stack)
    }

    pub fn context(&self) -> &Context<S> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn metric(&self) -> &Tensor<Jet<S>> {
        self.ctx.metric()
    }

    pub fn inverse_metric(&self) -> &Tensor<Jet<S>> {
        &self.ginv
    }

    pub fn christoffel(&self) -> &Tensor<Jet<S>> {
        &self.gamma
    }

    /// `R_ab^k_l`.
    pub fn riemann(&self) -> &Tensor<Jet<S>> {
        &self.riemann
    }

    /// `R_abkl = g_km R_ab^m_l`.
    pub fn riemann_down(&self) -> &Tensor<Jet<S>> {
        &self.riemann_down
    }

    pub fn ricci(&self) -> &Tensor<Jet<S>> {
        &self.ricci
    }

    pub fn scalar_curvature(&self) -> &Jet<S> {
        &self.scalar
    }

    /// `J = R / (2(n−1))`.
    pub fn j(&self) -> &Jet<S> {
        &self.j
    }

    pub fn schouten(&self) -> &Tensor<Jet<S>> {
        &self.schouten
    }

    pub fn weyl(&self) -> &Tensor<Jet<S>> {
        &self.weyl
    }

    pub fn cotton(&self) -> &Tensor<Jet<S>> {
        &self.cotton
    }

    /// `B_ij = ∇^s C_sij + W_isjt P^st`, computed on first use.
    pub fn bach(&self) -> Result<&Tensor<Jet<S>>> {
        self.bach.get_or_init(|| self.compute_bach()).as_ref().map_err(Clone::clone)
    }

    fn compute_bach(&self) -> Result<Tensor<Jet<S>>> {
        let div_c = self.divergence(&self.cotton, 0)?;
        let p_up = self.raise_all(&self.schouten)?;
        let wp = self.weyl.contract_with(&p_up, &[(1, 0), (3, 1)])?;
        div_c.try_add(&wp)
    }

    /// `W_ij^kl` with the last two slots raised.
    pub fn weyl_mixed(&self) -> Result<Tensor<Jet<S>>> {
        self.weyl.raise(2, &self.ginv)?.raise(3, &self.ginv)
    }

    /// `R_ij^kl` with the last two slots raised.
    pub fn riemann_mixed(&self) -> Result<Tensor<Jet<S>>> {
        self.riemann_down.raise(2, &self.ginv)?.raise(3, &self.ginv)
    }

    /// `P_i^j`.
    pub fn schouten_mixed(&self) -> Result<Tensor<Jet<S>>> {
        self.schouten.raise(1, &self.ginv)
    }

    pub fn raise(&self, t: &Tensor<Jet<S>>, slot: usize) -> Result<Tensor<Jet<S>>> {
        t.raise(slot, &self.ginv)
    }

    pub fn lower(&self, t: &Tensor<Jet<S>>, slot: usize) -> Result<Tensor<Jet<S>>> {
        t.lower(slot, self.metric())
    }

    /// Raises every down slot.
    pub fn raise_all(&self, t: &Tensor<Jet<S>>) -> Result<Tensor<Jet<S>>> {
        let mut out = t.clone();
        for s in 0..t.rank() {
            if t.valence()[s] == Down {
                out = out.raise(s, &self.ginv)?;
            }
        }
        Ok(out)
    }

    /// `∇T` with the derivative slot first. Each derivative costs one jet order.
    pub fn nabla(&self, t: &Tensor<Jet<S>>) -> Result<Tensor<Jet<S>>> {
        let n = self.dim();
        if t.dim() != n {
            return Err(Error::ShapeMismatch(format!("tensor of dim {} on a dim {n} context", t.dim())));
        }
        if t.data().iter().any(|x| x.order() == Some(0)) {
            return Err(Error::OrderExhausted("covariant derivative of an order-0 jet".into()));
        }
        let mut valence = vec![Down];
        valence.extend_from_slice(t.valence());
        let gamma = &self.gamma;
        par_tensor(n, valence, |idx| {
            let (a, rest) = (idx[0], &idx[1..]);
            let mut acc = self.ctx.derive(a, t.get(rest))?;
            let mut src = rest.to_vec();
            for (s, &v) in t.valence().iter().enumerate() {
                for m in 0..n {
                    src[s] = m;
                    let x = t.get(&src);
                    if x.is_zero() {
                        continue;
                    }
                    match v {
                        Variance::Down => {
                            let gm = gamma.get(&[a, rest[s], m]);
                            if !gm.is_zero() {
                                acc -= &(gm.clone() * x);
                            }
                        }
                        Variance::Up => {
                            let gm = gamma.get(&[a, m, rest[s]]);
                            if !gm.is_zero() {
                                acc += &(gm.clone() * x);
                            }
                        }
                    }
                }
                src[s] = rest[s];
            }
            Ok(acc)
        })
    }

    /// `∇f` of a scalar function as a one-form.
    pub fn gradient(&self, f: &Jet<S>) -> Result<Tensor<Jet<S>>> {
        self.nabla(&Tensor::scalar(self.dim(), f.clone()))
    }

    /// `∇^i T_{…i…}`: the divergence on a down slot.
    pub fn divergence(&self, t: &Tensor<Jet<S>>, slot: usize) -> Result<Tensor<Jet<S>>> {
        if slot >= t.rank() {
            return Err(Error::SlotOutOfRange { slot, rank: t.rank() });
        }
        if t.valence()[slot] != Down {
            return Err(Error::VarianceMismatch(format!("divergence on up slot {slot}")));
        }
        let dt = self.nabla(t)?;
        self.ginv.contract_with(&dt, &[(0, 0), (1, slot + 1)])
    }

    /// `g^ij T_ij`.
    pub fn trace(&self, t: &Tensor<Jet<S>>) -> Result<Jet<S>> {
        if t.valence() != [Down, Down] {
            return Err(Error::VarianceMismatch("trace needs a (0,2)-tensor".into()));
        }
        Ok(t.contract_with(&self.ginv, &[(0, 0), (1, 1)])?.as_scalar().clone())
    }

    /// `T − (1/n)(tr T) g`.
    pub fn trace_free(&self, t: &Tensor<Jet<S>>) -> Result<Tensor<Jet<S>>> {
        let tr = self.trace(t)? / &Jet::constant(S::from_i64(self.dim() as i64));
        t.try_sub(&self.metric().scale(&tr))
    }

    pub fn volume_form(&self) -> Result<VolumeForm<Jet<S>>> {
        VolumeForm::new(self.metric(), self.ctx.orientation())
    }

    /// Hodge star of an all-down antisymmetric form.
    pub fn hodge(&self, alpha: &Tensor<Jet<S>>) -> Result<Tensor<Jet<S>>> {
        crate::tensor::hodge_star(alpha, &self.ginv, &self.volume_form()?)
    }

    /// Residuals of the algebraic and differential identities every stack satisfies.
    pub fn invariant_residuals(&self) -> Result<Vec<(&'static str, f64)>> {
        let n = self.dim();
        let w = self.weyl.values();
        let r = self.riemann_down.values();
        let scale = r.max_magnitude().max(1.0);
        let mut out = Vec::new();
        let mut worst = |name, f: &dyn Fn(&[usize]) -> f64| {
            let m = all_indices(n, 4).iter().map(|i| f(i)).fold(0.0, f64::max);
            out.push((name, m / scale));
        };
        worst("riemann antisymmetry", &|i| (r.get(i).clone() + r.get(&[i[1], i[0], i[2], i[3]])).magnitude());
        worst("riemann pair antisymmetry", &|i| (r.get(i).clone() + r.get(&[i[0], i[1], i[3], i[2]])).magnitude());
        worst("riemann pair symmetry", &|i| (r.get(i).clone() - r.get(&[i[2], i[3], i[0], i[1]])).magnitude());
        worst("first bianchi", &|i| {
            (r.get(i).clone() + r.get(&[i[1], i[2], i[0], i[3]]) + r.get(&[i[2], i[0], i[1], i[3]])).magnitude()
        });
        worst("weyl first bianchi", &|i| {
            (w.get(i).clone() + w.get(&[i[1], i[2], i[0], i[3]]) + w.get(&[i[2], i[0], i[1], i[3]])).magnitude()
        });
        worst("weyl pair symmetry", &|i| (w.get(i).clone() - w.get(&[i[2], i[3], i[0], i[1]])).magnitude());
        let ginv = self.ginv.values();
        let wt = w.contract_with(&ginv, &[(0, 0), (2, 1)])?;
        out.push(("weyl trace", wt.max_magnitude() / scale));
        let c = self.cotton.values();
        let cscale = c.max_magnitude().max(1.0);
        let ct = c.contract_with(&ginv, &[(0, 0), (2, 1)])?;
        out.push(("cotton trace", ct.max_magnitude() / cscale));
        let cyc = Tensor::from_fn(n, vec![Down; 3], |i| {
            c.get(i).clone() + c.get(&[i[1], i[2], i[0]]) + c.get(&[i[2], i[0], i[1]])
        });
        out.push(("cotton cyclic", cyc.max_magnitude() / cscale));
        Ok(out)
    }
}

fn christoffel<S: Scalar>(ctx: &Context<S>, ginv: &Tensor<Jet<S>>) -> Result<Tensor<Jet<S>>> {
    let n = ctx.dim();
    let g = ctx.metric();
    let c = ctx.structure();
    let half = Jet::constant(S::from_ratio(1, 2));
    // Γ_abc = g(∇_a e_b, e_c) by the Koszul formula
    let lowered = par_tensor(n, vec![Down; 3], |x| {
        let (a, b, cc) = (x[0], x[1], x[2]);
        let mut s = ctx.derive(a, g.get(&[b, cc]))? + &ctx.derive(b, g.get(&[a, cc]))?
            - &ctx.derive(cc, g.get(&[a, b]))?;
        for m in 0..n {
            for (coef, (i, j, k)) in [(1, (a, b, cc)), (-1, (a, cc, b)), (-1, (b, cc, a))] {
                let cm = c.get(&[i, j, m]);
                if cm.is_zero() {
                    continue;
                }
                let term = g.get(&[m, k]).clone() * &Jet::constant(cm.clone());
                if coef > 0 {
                    s += &term;
                } else {
                    s -= &term;
                }
            }
        }
        Ok(s * &half)
    })?;
    lowered.contract_with(ginv, &[(2, 0)])
}

fn par_tensor<S: Scalar>(
    n: usize,
    valence: Vec<Variance>,
    f: impl Fn(&[usize]) -> Result<Jet<S>> + Sync,
) -> Result<Tensor<Jet<S>>> {
    let data = all_indices(n, valence.len()).par_iter().map(|i| f(i)).collect::<Result<Vec<_>>>()?;
    Tensor::new(n, valence, data)
}
