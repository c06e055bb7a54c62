use nalgebra::DMatrix;

use super::{tol, vanishes, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::{Context, CurvatureStack};
use crate::lab::linearize::{schouten_square, weyl_schouten, Linearizer, Quantity};
use crate::lab::report::{compare, Check, Collector};
use crate::scalar::{Jet, Scalar};
use crate::tensor::Tensor;

/// Independent components (`i ≤ j`) of the four displayed linearizations at one sample.
#[derive(Clone, Debug, PartialEq)]
pub struct NaturalityRows {
    pub rows: Vec<[f64; 4]>,
}

fn jet<S: Scalar>(x: S) -> Jet<S> {
    Jet::constant(x)
}

/// `−W_isjt Υ^st`, `−(P_i^s Υ_sj + Υ_i^s P_sj) + ½⟨P,∇²Υ⟩ g`,
/// `−J Υ_ij − ΔΥ P + ½ J ΔΥ g` and
/// `−∇²ΔΥ − 2J ∇²Υ − 3(Υ_i J_j + Υ_j J_i) + ¼(Δ²Υ + 2J ΔΥ + 6⟨∇Υ,∇J⟩) g`.
pub fn displayed_linearizations<S: Scalar>(s: &CurvatureStack<S>, upsilon: &Jet<S>) -> Result<[Tensor<S>; 4]> {
    let g = s.metric();
    let du = s.gradient(upsilon)?;
    let hess = s.nabla(&du)?;
    let hess_up = s.raise_all(&hess)?;
    let lap = s.trace(&hess)?;
    let j = s.j().clone();
    let p = s.schouten();
    let half = jet(S::from_ratio(1, 2));

    let d_wp = s.weyl().contract_with(&hess_up, &[(1, 0), (3, 1)])?.neg();

    let p_mixed = s.schouten_mixed()?;
    let ph = p_mixed.contract_with(&hess, &[(1, 0)])?;
    let pairing = p.contract_with(&hess_up, &[(0, 0), (1, 1)])?.as_scalar().clone();
    let d_p2 = ph.try_add(&ph.permute(&[1, 0])?)?.neg().try_add(&g.scale(&(pairing * &half)))?;

    let d_jp = hess
        .scale(&j)
        .try_add(&p.scale(&lap))?
        .neg()
        .try_add(&g.scale(&(j.clone() * &lap * &half)))?;

    let dj = s.gradient(&j)?;
    let grad_lap = s.gradient(&lap)?;
    let hess_lap = s.nabla(&grad_lap)?;
    let bilap = s.trace(&hess_lap)?;
    let cross = du.outer(&dj)?.try_add(&dj.outer(&du)?)?;
    let inner = s.raise(&du, 0)?.contract_with(&dj, &[(0, 0)])?.as_scalar().clone();
    let trace_part = (bilap + &(j.clone() * &lap * &jet(S::from_i64(2))) + &(inner * &jet(S::from_i64(6))))
        * &jet(S::from_ratio(1, 4));
    let d_hj = hess_lap
        .try_add(&hess.scale(&(j * &jet(S::from_i64(2)))))?
        .try_add(&cross.scale(&jet(S::from_i64(3))))?
        .neg()
        .try_add(&g.scale(&trace_part))?;

    Ok([d_wp.values(), d_p2.values(), d_jp.values(), d_hj.values()])
}

/// Dimension-4 identities for the Bach tensor and the natural weight −2 tensors,
/// returning the sample's rows for the rank test.
pub fn naturality_checks(
    c: &mut Collector,
    cfg: &Tolerances,
    ctx: &Context<f64>,
    upsilon: &Jet<f64>,
) -> Result<NaturalityRows> {
    let s = ctx.build_stack()?;
    if s.dim() != 4 {
        return Err(Error::Dimension { dim: s.dim(), requirement: "n = 4".into() });
    }
    let hat = ctx.rescale(upsilon)?.build_stack()?;
    let b = s.bach()?.values();
    let factor = (2.0 * upsilon.value()).exp();
    let b_hat = hat.bach()?.values().scale(&factor);
    c.push("naturality.bach_invariance", compare(&b_hat, &b, &[])?, cfg.get(tol::INVARIANCE));

    let w = s.weyl();
    let w_up = s.raise(&s.raise(&s.raise(w, 1)?, 2)?, 3)?;
    let w2 = w.contract_with(&w_up, &[(1, 1), (2, 2), (3, 3)])?;
    let tf = s.trace_free(&w2)?.values();
    c.push("naturality.tf_weyl_square", vanishes(&tf, w2.values().max_magnitude()), cfg.get(tol::TF_WEYL_SQUARE));

    let div_b = s.divergence(s.bach()?, 1)?.values();
    let scale = s.nabla(s.bach()?)?.values().max_magnitude();
    c.push("naturality.bach_divergence", vanishes(&div_b, scale), cfg.get(tol::BACH_DIVERGENCE));

    // B = ΔP − ∇²J + 2 W·P − 4 P² + |P|² g
    let p = s.schouten();
    let lap_p = s.divergence(&s.nabla(p)?, 0)?;
    let hess_j = s.nabla(&s.gradient(s.j())?)?;
    let wp = weyl_schouten(&s)?;
    let p2 = schouten_square(&s)?;
    let norm = p.contract_with(&s.raise_all(p)?, &[(0, 0), (1, 1)])?.as_scalar().clone();
    let terms = [
        lap_p.values(),
        hess_j.values().neg(),
        wp.values().scale(&2.0),
        p2.values().scale(&-4.0),
        s.metric().values().scale(norm.value()),
    ];
    let mut rhs = terms[0].clone();
    for t in &terms[1..] {
        rhs = rhs.try_add(t)?;
    }
    let context: Vec<&Tensor<f64>> = terms.iter().collect();
    c.push("naturality.bach_formula", compare(&b, &rhs, &context)?, cfg.get(tol::LEMMA));

    let lin = Linearizer::new(ctx, upsilon)?;
    let displays = displayed_linearizations(&s, upsilon)?;
    let quantities = [Quantity::WeylSchouten, Quantity::TfSchoutenSquare, Quantity::TfJSchouten, Quantity::TfHessianJ];
    for (q, d) in quantities.iter().zip(&displays) {
        let computed = lin.at_point(q, -2)?.value;
        c.push(&format!("naturality.linearization.{}", q.name()), compare(&computed, d, &[])?, cfg.get(tol::LINEARIZATION));
    }
    let db = lin.at_point(&Quantity::Bach, -2)?.value;
    c.push("naturality.linearization.bach", vanishes(&db, lin.unweighted_size(&Quantity::Bach)?), cfg.get(tol::LINEARIZATION));

    let mut rows = Vec::new();
    for i in 0..4 {
        for j in i..4 {
            rows.push([0, 1, 2, 3].map(|k| *displays[k].get(&[i, j])));
        }
    }
    Ok(NaturalityRows { rows })
}

/// Numerical rank of the stacked system in `(a, b, c, e)`: columns are normalized and
/// singular values below `threshold · σ_max` are discarded.
pub fn numerical_rank(samples: &[NaturalityRows], threshold: f64) -> usize {
    let rows: Vec<&[f64; 4]> = samples.iter().flat_map(|s| s.rows.iter()).collect();
    if rows.is_empty() {
        return 0;
    }
    let mut m = DMatrix::from_fn(rows.len(), 4, |r, c| rows[r][c]);
    for mut col in m.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&x| x > threshold * max).count()
}

/// Pushes the rank outcome; the caller resamples on failure.
pub fn rank_check(c: &mut Collector, samples: &[NaturalityRows], attempts: usize) -> usize {
    let rank = numerical_rank(samples, tol::RANK_THRESHOLD);
    let note = format!("rank {rank} of 4 over {} samples, attempt {attempts}", samples.len());
    c.add(Check::outcome("naturality.rank", rank == 4, note));
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity_like_rows() {
        let rows = NaturalityRows { rows: vec![[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0]] };
        assert_eq!(numerical_rank(std::slice::from_ref(&rows), 1e-6), 3);
        let more = NaturalityRows { rows: vec![[0.0, 0.0, 1.0, -1.0]] };
        assert_eq!(numerical_rank(&[rows, more], 1e-6), 4);
    }
}
