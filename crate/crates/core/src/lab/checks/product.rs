use super::{tol, Tolerances};
use crate::error::Result;
use crate::geometry::CurvatureStack;
use crate::invariants::{phi_wc_at, star_p_at, InvariantPolynomial};
use crate::lab::report::{compare_scalars, Check, Collector, Residual};
use crate::models::{berger_product, berger_cp2, fubini_study};
use crate::tensor::VolumeForm;

/// Sample points in the affine chart of `CP²`.
pub const PRODUCT_POINTS: [[f64; 4]; 2] = [[0.0, 0.0, 0.0, 0.0], [0.5, 0.0, -1.0, 1.0 / 3.0]];

/// The 7-tuple pairing the Berger block `(X, Y, Z)` with all of `CP²`.
const MIXED: [usize; 7] = [0, 1, 2, 4, 5, 6, 7];

fn top_density(s: &CurvatureStack<f64>, phi: &InvariantPolynomial) -> Result<f64> {
    let top: Vec<usize> = (0..s.dim()).collect();
    let vol = VolumeForm::new(&s.metric().values(), s.context().orientation())?;
    Ok(star_p_at(s, phi, &top)? * vol.upper(&top))
}

/// `p_Φ(W) = 0` on `(S³ × S¹) × CP²` with `Φ = tr(ω⁴)`, and `(Φ W³ C)_{XYZ·CP²}`
/// proportional to `(Φ̃ W C)_XYZ · (Φ̃ W²)_CP²` with the same nonzero ratio at every point;
/// every other component of the 7-form vanishes.
pub fn product_checks(c: &mut Collector, cfg: &Tolerances, t: f64) -> Result<()> {
    let phi = InvariantPolynomial::trace_power(2)?;
    let half = InvariantPolynomial::half_trace();
    let berger = berger_product(&t)?.build_stack()?;
    let block = phi_wc_at(&berger, &half, &[0, 1, 2])?;
    let mut ratios = Vec::new();
    for point in PRODUCT_POINTS {
        let s = berger_cp2(&t, &point, 3)?.build_stack()?;
        let scale = s.weyl().values().max_magnitude().powi(4);
        let p = top_density(&s, &phi)?;
        c.push("product_factorization.pontryagin_vanishes", Residual { diff: p.abs(), scale, exact_zero: p == 0.0 }, cfg.get(tol::PRODUCT));

        let fs = fubini_study(&point, 3)?.build_stack()?;
        let p_block = star_p_at(&fs, &half, &[0, 1, 2, 3])?;
        let x = phi_wc_at(&s, &phi, &MIXED)?;
        for skip in (0..8).filter(|&i| i != 3) {
            let idx: Vec<usize> = (0..8).filter(|&i| i != skip).collect();
            let v = phi_wc_at(&s, &phi, &idx)?;
            let r = Residual { diff: v.abs(), scale: x.abs(), exact_zero: v == 0.0 };
            c.push("product_factorization.other_components", r, cfg.get(tol::PRODUCT));
        }
        ratios.push((x, block * p_block));
    }
    let (x0, b0) = ratios[0];
    let ratio = x0 / b0;
    for (x, b) in &ratios[1..] {
        let r = compare_scalars(x, &(b * ratio), &[]);
        c.push("product_factorization.block_ratio", r, cfg.get(tol::PRODUCT));
    }
    let nonzero = ratio.is_finite() && ratio.abs() > tol::PRODUCT;
    c.add(Check::outcome(
        "product_factorization.block_ratio_nonzero",
        nonzero,
        format!("(Φ W³ C) = {ratio:.6} · (Φ̃ W C)(Φ̃ W²) at t = {t}"),
    ));
    Ok(())
}
