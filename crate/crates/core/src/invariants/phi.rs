use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar};
use crate::tensor::{next_index, Permutation, Tensor, Up};

/// Square matrix, indexed `[row][column]`.
pub type Matrix<T> = Vec<Vec<T>>;

/// A multilinear polynomial on `gl(n)`, written as a combination of products
/// of traces:
///
/// `Φ(A_1, …, A_k) = Σ_σ c_σ Π_{cycles (a σ(a) σ²(a) …)} tr(A_a A_σ(a) A_σ²(a) ⋯)`.
///
/// Every such expression is `GL(n)`-invariant. Its index form is
/// `Φ_{s_1…s_k}^{t_1…t_k} = Σ_σ c_σ Π_a δ_{s_a}^{t_σ(a)}`, so that
/// `Φ(A_1,…,A_k) = Φ_{s_1…s_k}^{t_1…t_k} (A_1)_{t_1}^{s_1} ⋯ (A_k)_{t_k}^{s_k}`
/// where `(A)_t^s` is the matrix entry `A[t][s]`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantPolynomial {
    degree: usize,
    terms: Vec<(Rational, Permutation)>,
    cycles: Vec<Vec<Vec<usize>>>,
}

impl InvariantPolynomial {
    pub fn new(degree: usize, terms: Vec<(Rational, Permutation)>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument("invariant polynomial of degree 0".into()));
        }
        if let Some((_, p)) = terms.iter().find(|(_, p)| p.len() != degree) {
            return Err(Error::InvalidArgument(format!("permutation of length {} in degree {degree}", p.len())));
        }
        let mut merged: Vec<(Rational, Permutation)> = Vec::new();
        for (c, p) in terms {
            match merged.iter_mut().find(|(_, q)| *q == p) {
                Some((acc, _)) => *acc += c,
                None => merged.push((c, p)),
            }
        }
        merged.retain(|(c, _)| !num_traits::Zero::is_zero(c));
        merged.sort_by(|a, b| a.1.images().cmp(b.1.images()));
        let cycles = merged.iter().map(|(_, p)| p.cycles()).collect();
        Ok(InvariantPolynomial { degree, terms: merged, cycles })
    }

    /// Terms given as `(coefficient, disjoint cycles)`.
    pub fn from_cycles(degree: usize, terms: &[(Rational, Vec<Vec<usize>>)]) -> Result<Self> {
        let perms = terms
            .iter()
            .map(|(c, cyc)| {
                Permutation::from_cycles(degree, cyc)
                    .map(|p| (c.clone(), p))
                    .ok_or_else(|| Error::InvalidArgument(format!("{cyc:?} are not disjoint cycles on 0..{degree}")))
            })
            .collect::<Result<Vec<_>>>()?;
        InvariantPolynomial::new(degree, perms)
    }

    /// `Φ(A, B) = ½ tr(AB)`.
    pub fn half_trace() -> Self {
        let swap = Permutation::from_images(vec![1, 0]).unwrap();
        InvariantPolynomial::new(2, vec![(Rational::new(1.into(), 2.into()), swap)]).unwrap()
    }

    /// Full polarization of `A ↦ (tr A²)^k`, of degree `2k`.
    pub fn trace_power(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("trace power needs k ≥ 1".into()));
        }
        let cycles: Vec<Vec<usize>> = (0..k).map(|i| vec![2 * i, 2 * i + 1]).collect();
        Ok(InvariantPolynomial::from_cycles(2 * k, &[(Rational::from_integer(1.into()), cycles)])?.symmetrized())
    }

    /// Average over relabelings of the arguments: the symmetric polynomial
    /// with the same restriction to the diagonal.
    pub fn symmetrized(&self) -> Self {
        let all = Permutation::all(self.degree);
        let norm = Rational::from_integer((all.len() as i64).into());
        let mut terms = Vec::with_capacity(self.terms.len() * all.len());
        for (c, s) in &self.terms {
            for tau in &all {
                terms.push((c.clone() / &norm, tau.compose(s).compose(&tau.inverse())));
            }
        }
        InvariantPolynomial::new(self.degree, terms).unwrap()
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.symmetrized()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[(Rational, Permutation)] {
        &self.terms
    }

    /// `Φ(A_1, …, A_k)` on square matrices of a common size.
    pub fn evaluate<T: Scalar>(&self, args: &[&Matrix<T>]) -> Result<T> {
        if args.len() != self.degree {
            return Err(Error::InvalidArgument(format!("{} arguments for degree {}", args.len(), self.degree)));
        }
        Ok(self.evaluate_unchecked(args))
    }

    pub(crate) fn evaluate_unchecked<T: Scalar>(&self, args: &[&Matrix<T>]) -> T {
        let mut acc = T::zero();
        for ((c, _), cycles) in self.terms.iter().zip(&self.cycles) {
            let mut prod = T::from_rational(c);
            for cycle in cycles {
                let t = cycle_trace(cycle.iter().map(|&a| args[a]));
                if t.is_zero() {
                    prod = T::zero();
                    break;
                }
                prod = prod * &t;
            }
            acc += &prod;
        }
        acc
    }

    /// `Φ_{s_1…s_k}^{t_1…t_k}` with `k` down slots then `k` up slots.
    pub fn index_form<T: Scalar>(&self, n: usize) -> Tensor<T> {
        let k = self.degree;
        let mut valence = vec![crate::tensor::Down; k];
        valence.extend(std::iter::repeat_n(Up, k));
        let mut out = Tensor::zeros(n, valence);
        let mut s = vec![0; k];
        let mut t = vec![0; 2 * k];
        loop {
            t[..k].copy_from_slice(&s);
            for (c, p) in &self.terms {
                for a in 0..k {
                    t[k + p.apply(a)] = s[a];
                }
                *out.get_mut(&t) += &T::from_rational(c);
            }
            if !next_index(&mut s, n) {
                break;
            }
        }
        out
    }
}

fn cycle_trace<'a, T: Scalar + 'a>(mut mats: impl Iterator<Item = &'a Matrix<T>>) -> T {
    let first = mats.next().unwrap();
    let rest: Vec<&Matrix<T>> = mats.collect();
    let n = first.len();
    match rest.len() {
        0 => (0..n).fold(T::zero(), |acc, i| acc + &first[i][i]),
        _ => {
            let mut prod = first.clone();
            for m in &rest[..rest.len() - 1] {
                prod = matmul(&prod, m);
            }
            let last = rest[rest.len() - 1];
            let mut acc = T::zero();
            for i in 0..n {
                for j in 0..n {
                    if !prod[i][j].is_zero() && !last[j][i].is_zero() {
                        acc += &(prod[i][j].clone() * &last[j][i]);
                    }
                }
            }
            acc
        }
    }
}

fn matmul<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Matrix<T> {
    let n = a.len();
    let mut out = vec![vec![T::zero(); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &(a[i][k].clone() * &b[k][j]);
                }
            }
        }
    }
    out
}

/// Configuration form of an invariant polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiSpec {
    HalfTrace,
    TracePower { k: usize },
    Cycles { degree: usize, terms: Vec<PhiTerm>, #[serde(default)] symmetrize: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiTerm {
    /// A rational literal such as `"1/2"`.
    pub coefficient: String,
    pub cycles: Vec<Vec<usize>>,
}

impl PhiSpec {
    pub fn build(&self) -> Result<InvariantPolynomial> {
        match self {
            PhiSpec::HalfTrace => Ok(InvariantPolynomial::half_trace()),
            PhiSpec::TracePower { k } => InvariantPolynomial::trace_power(*k),
            PhiSpec::Cycles { degree, terms, symmetrize } => {
                let parsed = terms
                    .iter()
                    .map(|t| {
                        parse_rational(&t.coefficient)
                            .map(|c| (c, t.cycles.clone()))
                            .ok_or_else(|| Error::Config(format!("bad coefficient {:?}", t.coefficient)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let phi = InvariantPolynomial::from_cycles(*degree, &parsed)?;
                Ok(if *symmetrize { phi.symmetrized() } else { phi })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    fn mat(rows: &[&[i64]]) -> Matrix<Rational> {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    #[test]
    fn half_trace_matches_definition() {
        let a = mat(&[&[1, 2], &[3, 4]]);
        let b = mat(&[&[0, 1], &[-1, 5]]);
        // tr(AB) = (1·0 + 2·(−1)) + (3·1 + 4·5) = 21
        let v = InvariantPolynomial::half_trace().evaluate(&[&a, &b]).unwrap();
        assert_eq!(v, Rational::new(21.into(), 2.into()));
    }

    #[test]
    fn trace_power_restricts_to_power_of_trace_square() {
        let phi = InvariantPolynomial::trace_power(2).unwrap();
        assert!(phi.is_symmetric());
        assert_eq!(phi.terms().len(), 3);
        let a = mat(&[&[1, 2, 0], &[0, -1, 3], &[1, 1, 2]]);
        let tr2: Rational = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| a[i][j].clone() * &a[j][i]).sum();
        assert_eq!(phi.evaluate(&[&a, &a, &a, &a]).unwrap(), tr2.clone() * &tr2);
    }

    #[test]
    fn index_form_contracts_to_evaluation() {
        let phi = InvariantPolynomial::from_cycles(3, &[(q(2), vec![vec![0, 1, 2]]), (q(-1), vec![vec![1, 2]])])
            .unwrap()
            .symmetrized();
        let n = 2;
        let ms = [mat(&[&[1, 2], &[3, 4]]), mat(&[&[0, 1], &[1, 1]]), mat(&[&[2, -1], &[0, 3]])];
        let idx = phi.index_form::<Rational>(n);
        let mut total = q(0);
        let mut i = vec![0; 6];
        loop {
            let (s, t) = i.split_at(3);
            let mut term = idx.get(&i).clone();
            for a in 0..3 {
                term *= &ms[a][t[a]][s[a]];
            }
            total += &term;
            if !next_index(&mut i, n) {
                break;
            }
        }
        assert_eq!(total, phi.evaluate(&[&ms[0], &ms[1], &ms[2]]).unwrap());
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"kind":"cycles","degree":2,"terms":[{"coefficient":"1/2","cycles":[[0,1]]}]}"#;
        let spec: PhiSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.build().unwrap(), InvariantPolynomial::half_trace());
        assert!(PhiSpec::Cycles { degree: 2, terms: vec![PhiTerm { coefficient: "x".into(), cycles: vec![] }], symmetrize: false }
            .build()
            .is_err());
    }
}
