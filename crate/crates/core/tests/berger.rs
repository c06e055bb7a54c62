//! Closed-form curvature of the Berger sphere times a circle, exactly over the rationals.

use conformal_core::invariants::{
    functional_density, phi_wc, pontryagin_function, rho, star_rho, InvariantPolynomial,
};
use conformal_core::models::{berger_product, berger_sweep};
use conformal_core::scalar::{Rational, Scalar};
use conformal_core::tensor::{Down, Tensor, Up};

fn r(v: i64) -> Rational {
    Rational::from_i64(v)
}

fn covector(i: usize) -> Tensor<Rational> {
    Tensor::from_fn(4, vec![Down], |x| if x[0] == i { r(1) } else { r(0) })
}

fn wedge(a: usize, b: usize) -> Tensor<Rational> {
    let (x, y) = (covector(a), covector(b));
    x.outer(&y).unwrap().try_sub(&y.outer(&x).unwrap()).unwrap()
}

fn sq(a: usize, b: usize) -> Tensor<Rational> {
    wedge(a, b).outer(&wedge(a, b)).unwrap()
}

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;
const T: usize = 3;

#[test]
fn connection_displays() {
    for t in berger_sweep() {
        let s = berger_product(&t).unwrap().build_stack().unwrap();
        let nabla = |i| s.nabla(&Tensor::constant(&covector(i))).unwrap().values();
        let expected_alpha = covector(Y).outer(&covector(Z)).unwrap().neg().try_add(&covector(Z).outer(&covector(Y)).unwrap()).unwrap();
        assert_eq!(nabla(X), expected_alpha);
        let tm2 = t.clone() - r(2);
        let expected_beta = covector(X)
            .outer(&covector(Z))
            .unwrap()
            .scale(&-tm2.clone())
            .try_sub(&covector(Z).outer(&covector(X)).unwrap().scale(&t))
            .unwrap();
        assert_eq!(nabla(Y), expected_beta);
        let expected_gamma = covector(X)
            .outer(&covector(Y))
            .unwrap()
            .scale(&tm2)
            .try_add(&covector(Y).outer(&covector(X)).unwrap().scale(&t))
            .unwrap();
        assert_eq!(nabla(Z), expected_gamma);
    }
}

#[test]
fn weyl_and_cotton_displays() {
    for t in berger_sweep() {
        let s = berger_product(&t).unwrap().build_stack().unwrap();
        let c = (t.clone() - r(1)) * r(2) / r(3);
        let mut w = sq(X, Y).scale(&t);
        for (term, coef) in [
            (sq(X, Z), t.clone()),
            (sq(Y, Z), r(-2)),
            (sq(X, T), t.clone() * r(-2)),
            (sq(Y, T), r(1)),
            (sq(Z, T), r(1)),
        ] {
            w = w.try_add(&term.scale(&coef)).unwrap();
        }
        assert_eq!(s.weyl().values(), w.scale(&c), "t = {t}");

        let cc = t.clone() * (t.clone() - r(1)) * r(2);
        let cotton = wedge(X, Y)
            .outer(&covector(Z))
            .unwrap()
            .try_sub(&wedge(X, Z).outer(&covector(Y)).unwrap())
            .unwrap()
            .try_sub(&wedge(Y, Z).outer(&covector(X)).unwrap().scale(&r(2)))
            .unwrap();
        assert_eq!(s.cotton().values(), cotton.scale(&cc), "t = {t}");
    }
}

#[test]
fn pontryagin_data() {
    let phi = InvariantPolynomial::half_trace();
    for t in berger_sweep() {
        let s = berger_product(&t).unwrap().build_stack().unwrap();
        assert_eq!(*pontryagin_function(&s, &phi).unwrap().value(), r(0));
        let coef = -(t.clone() * (t.clone() - r(1)) * (t.clone() - r(1)) * r(8) / r(3));
        let x = phi_wc(&s, &phi).unwrap().values();
        assert_eq!(*x.get(&[X, Y, Z]), coef, "t = {t}");
        for idx in [[X, Y, T], [X, Z, T], [Y, Z, T]] {
            assert_eq!(*x.get(&idx), r(0));
        }
        assert_eq!(star_rho(&s, &phi).unwrap().values(), x);

        // ρ(T) = −(★X)(T) = −coef/√t
        let rho = rho(&s, &phi).unwrap();
        assert_eq!(rho.weight, -4);
        let sqrt_t = t.sqrt().unwrap();
        let field = Tensor::from_fn(4, vec![Up], |i| if i[0] == T { r(1) } else { r(0) });
        let density = functional_density(s.context(), &rho.form.values(), &field).unwrap();
        assert_eq!(density, -coef / sqrt_t);
        // consistency of the two expressions: ρ = −★(★ρ)
        let star_star = s.hodge(&star_rho(&s, &phi).unwrap()).unwrap().neg();
        assert_eq!(star_star.values(), rho.form.values());
    }
}

#[test]
fn density_at_t_four_is_forty_eight() {
    let s = berger_product(&r(4)).unwrap().build_stack().unwrap();
    let rho = rho(&s, &InvariantPolynomial::half_trace()).unwrap();
    let field = Tensor::from_fn(4, vec![Up], |i| if i[0] == T { r(1) } else { r(0) });
    assert_eq!(functional_density(s.context(), &rho.form.values(), &field).unwrap(), r(48));
}
