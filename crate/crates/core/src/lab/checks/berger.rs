use super::{stack_checks, tol, vanishes, Tolerances};
use crate::error::{Error, Result};
use crate::geometry::CurvatureStack;
use crate::invariants::{functional_density, pontryagin_function, rho, star_rho, xi, InvariantPolynomial};
use crate::lab::checks::pfaffian_checks;
use crate::lab::report::{compare, compare_scalars, Collector};
use crate::models::berger_product;
use crate::scalar::Scalar;
use crate::tensor::{Down, Tensor, Up};

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;
const T: usize = 3;

fn covector<S: Scalar>(i: usize) -> Tensor<S> {
    Tensor::from_fn(4, vec![Down], |x| if x[0] == i { S::one() } else { S::zero() })
}

fn pair<S: Scalar>(a: usize, b: usize) -> Tensor<S> {
    covector::<S>(a).outer(&covector(b)).expect("same dimension")
}

fn wedge<S: Scalar>(a: usize, b: usize) -> Tensor<S> {
    pair::<S>(a, b).try_sub(&pair(b, a)).expect("same shape")
}

fn square<S: Scalar>(a: usize, b: usize) -> Tensor<S> {
    wedge::<S>(a, b).outer(&wedge(a, b)).expect("same dimension")
}

fn sum<S: Scalar>(terms: Vec<(Tensor<S>, S)>) -> Result<Tensor<S>> {
    let mut it = terms.into_iter();
    let (first, c) = it.next().expect("nonempty");
    let mut acc = first.scale(&c);
    for (t, c) in it {
        acc = acc.try_add(&t.scale(&c))?;
    }
    Ok(acc)
}

fn int<S: Scalar>(v: i64) -> S {
    S::from_i64(v)
}

/// The frame `X, Y, Z, T` on `S³ × S¹` with `g = t α² + β² + γ² + θ²`, checked against
/// the closed-form connection, curvature and the one-forms at a single `t`.
pub fn berger_checks<S: Scalar>(c: &mut Collector, cfg: &Tolerances, t: &S) -> Result<()> {
    let ctx = berger_product(t)?;
    let s = ctx.build_stack()?;
    let tol = cfg.get(tol::FIXTURE);
    let one = S::one();
    let tm1 = t.clone() - &one;
    let tm2 = t.clone() - &int(2);

    let nabla = |i| -> Result<Tensor<S>> { Ok(s.nabla(&Tensor::constant(&covector(i)))?.values()) };
    let displays = [
        (X, sum(vec![(pair(Y, Z), -one.clone()), (pair(Z, Y), one.clone())])?),
        (Y, sum(vec![(pair(X, Z), -tm2.clone()), (pair(Z, X), -t.clone())])?),
        (Z, sum(vec![(pair(X, Y), tm2.clone()), (pair(Y, X), t.clone())])?),
        (T, Tensor::zeros(4, vec![Down, Down])),
    ];
    for (i, expected) in displays {
        c.push("berger.connection", compare(&nabla(i)?, &expected, &[])?, tol);
    }

    let ricci = Tensor::from_fn(4, vec![Down, Down], |x| match (x[0], x[1]) {
        (0, 0) => t.clone() * t * &int(2),
        (1, 1) | (2, 2) => (int::<S>(2) - t) * &int(2),
        _ => S::zero(),
    });
    c.push("berger.ricci", compare(&s.ricci().values(), &ricci, &[])?, tol);

    let wc = tm1.clone() * &int(2) / &int(3);
    let weyl = sum(vec![
        (square(X, Y), t.clone()),
        (square(X, Z), t.clone()),
        (square(Y, Z), int(-2)),
        (square(X, T), t.clone() * &int(-2)),
        (square(Y, T), one.clone()),
        (square(Z, T), one.clone()),
    ])?
    .scale(&wc);
    c.push("berger.weyl", compare(&s.weyl().values(), &weyl, &[])?, tol);
    c.note("berger.weyl", format!("factor 2(t−1)/3 = {}", wc.to_f64()));

    let cc = t.clone() * &tm1 * &int(2);
    let cotton = sum(vec![
        (wedge(X, Y).outer(&covector(Z))?, one.clone()),
        (wedge(X, Z).outer(&covector(Y))?, -one.clone()),
        (wedge(Y, Z).outer(&covector(X))?, int(-2)),
    ])?
    .scale(&cc);
    c.push("berger.cotton", compare(&s.cotton().values(), &cotton, &[])?, tol);
    c.note("berger.cotton", format!("factor 2t(t−1) = {}", cc.to_f64()));

    let phi = InvariantPolynomial::half_trace();
    let p = pontryagin_function(&s, &phi)?;
    c.push("berger.pontryagin", vanishes(&Tensor::scalar(4, p.value().clone()), 1.0), tol);

    let coef = -(t.clone() * &tm1 * &tm1 * &int(8) / &int(3));
    let xyz = Tensor::from_fn(4, vec![Down; 3], |x| {
        let sign = crate::tensor::sort_sign(x);
        let mut sorted = x.to_vec();
        sorted.sort_unstable();
        if sign != 0 && sorted == [X, Y, Z] {
            coef.clone() * &int(sign as i64)
        } else {
            S::zero()
        }
    });
    c.push("berger.star_rho", compare(&star_rho(&s, &phi)?.values(), &xyz, &[])?, tol);
    c.note("berger.star_rho", format!("★ρ = {} α∧β∧γ", coef.to_f64()));

    density_checks(c, cfg, &s, t)?;
    stack_checks(c, cfg, "berger.stack", &s)?;
    pfaffian_checks(c, cfg, "berger.pfaffian", &s)
}

/// `ρ(T) = 8t(t−1)²/(3√t)`, `ξ(T) = 0`, and `ρ(T)` changing sign with the orientation.
fn density_checks<S: Scalar>(c: &mut Collector, cfg: &Tolerances, s: &CurvatureStack<S>, t: &S) -> Result<()> {
    let tol = cfg.get(tol::FIXTURE);
    let phi = InvariantPolynomial::half_trace();
    let field = Tensor::from_fn(4, vec![Up], |i| if i[0] == T { S::one() } else { S::zero() });
    let ctx = s.context();
    let density = |st: &CurvatureStack<S>| -> Result<S> {
        functional_density(st.context(), &rho(st, &phi)?.form.values(), &field)
    };
    let d = density(s)?;
    let sqrt_t = t.sqrt().ok_or_else(|| Error::NotRepresentable { quantity: "√t".into(), kind: S::KIND.name() })?;
    let tm1 = t.clone() - &S::one();
    let expected = t.clone() * &tm1 * &tm1 * &int(8) / &(sqrt_t * &int(3));
    c.push("berger.rho_density", compare_scalars(&d, &expected, &[]), tol);
    c.note("berger.rho_density", format!("ρ(T) = {}", d.to_f64()));

    let xi_d = functional_density(ctx, &xi(s, 2)?.form.values(), &field)?;
    c.push("berger.xi_density", compare_scalars(&xi_d, &S::zero(), &[&d]), tol);

    let flipped = ctx.clone().with_orientation(-1)?.build_stack()?;
    let df = density(&flipped)?;
    c.push("berger.orientation_flip", compare_scalars(&df, &-d.clone(), &[]), tol);
    Ok(())
}
