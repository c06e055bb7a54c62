//! Generalized Kronecker deltas, the volume form and the Hodge star.

use super::{linalg, sort_sign, Down, Tensor, Up, Variance};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_MATERIALIZED: usize = 1 << 24;

/// `δ_{i_1…i_p}^{j_1…j_p}` with `p` down slots followed by `p` up slots.
/// For `p > n` this is the zero tensor.
pub fn generalized_delta<S: Scalar>(p: usize, n: usize) -> Result<Tensor<S>> {
    if p < 1 {
        return Err(Error::InvalidArgument("generalized delta needs p >= 1".into()));
    }
    if n.checked_pow(2 * p as u32).is_none_or(|len| len > MAX_MATERIALIZED) {
        return Err(Error::InvalidArgument(format!("δ^({p}) in dimension {n} is too large to materialize")));
    }
    let mut valence = vec![Down; p];
    valence.extend(std::iter::repeat_n(Up, p));
    if p > n {
        return Ok(Tensor::zeros(n, valence));
    }
    Ok(Tensor::from_fn(n, valence, |idx| {
        let (lower, upper) = idx.split_at(p);
        let (sl, su) = (sort_sign(lower), sort_sign(upper));
        if sl == 0 || su == 0 {
            return S::zero();
        }
        let mut a = lower.to_vec();
        let mut b = upper.to_vec();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            S::zero()
        } else if sl * su > 0 {
            S::one()
        } else {
            -S::one()
        }
    }))
}

/// The permutation symbol with `n` down slots.
pub fn levi_civita<S: Scalar>(n: usize) -> Result<Tensor<S>> {
    if n.checked_pow(n as u32).is_none_or(|len| len > MAX_MATERIALIZED) {
        return Err(Error::InvalidArgument(format!("permutation symbol in dimension {n} is too large")));
    }
    Ok(Tensor::from_fn(n, vec![Down; n], |idx| match sort_sign(idx) {
        0 => S::zero(),
        1 => S::one(),
        _ => -S::one(),
    }))
}

/// `√|det g|` with an orientation: evaluates ε components without storing them.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeForm<S> {
    dim: usize,
    sqrt_abs_det: S,
    det_negative: bool,
    orientation: i8,
}

impl<S: Scalar> VolumeForm<S> {
    pub fn new(metric: &Tensor<S>, orientation: i8) -> Result<Self> {
        if metric.rank() != 2 || metric.valence() != [Down, Down] {
            return Err(Error::ShapeMismatch("volume form needs g_ab".into()));
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::InvalidArgument(format!("orientation must be ±1, got {orientation}")));
        }
        let det = linalg::determinant(&metric.to_matrix());
        if !det.is_invertible() {
            return Err(Error::DegenerateMetric);
        }
        let det_negative = det.to_f64() < 0.0;
        let abs = if det_negative { -det } else { det };
        let sqrt_abs_det = abs.sqrt().ok_or(Error::NotRepresentable {
            quantity: "√|det g|".into(),
            kind: S::KIND.name(),
        })?;
        Ok(VolumeForm { dim: metric.dim(), sqrt_abs_det, det_negative, orientation })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn sqrt_abs_det(&self) -> &S {
        &self.sqrt_abs_det
    }

    pub fn reversed(&self) -> Self {
        VolumeForm { orientation: -self.orientation, ..self.clone() }
    }

    /// `ε_{i_1…i_n}`.
    pub fn lower(&self, idx: &[usize]) -> S {
        match sort_sign(idx) * self.orientation {
            0 => S::zero(),
            1 => self.sqrt_abs_det.clone(),
            _ => -self.sqrt_abs_det.clone(),
        }
    }

    /// `ε^{i_1…i_n} = sign(det g)·ε_{i_1…i_n}/|det g|`.
    pub fn upper(&self, idx: &[usize]) -> S {
        let mut s = sort_sign(idx) * self.orientation;
        if self.det_negative {
            s = -s;
        }
        let inv = S::one() / &self.sqrt_abs_det;
        match s {
            0 => S::zero(),
            1 => inv,
            _ => -inv,
        }
    }
}

/// The volume form `ε_{i_1…i_n}` as a dense tensor.
pub fn epsilon_form<S: Scalar>(metric: &Tensor<S>, orientation: i8) -> Result<Tensor<S>> {
    let vol = VolumeForm::new(metric, orientation)?;
    let n = metric.dim();
    if n.checked_pow(n as u32).is_none_or(|len| len > MAX_MATERIALIZED) {
        return Err(Error::InvalidArgument(format!("volume form in dimension {n} is too large to materialize")));
    }
    Ok(Tensor::from_fn(n, vec![Down; n], |idx| vol.lower(idx)))
}

/// `(★α)_{i_{k+1}…i_n} = (1/k!) ε^{s_1…s_k}{}_{i_{k+1}…i_n} α_{s_1…s_k}`.
pub fn hodge_star<S: Scalar>(
    alpha: &Tensor<S>,
    inverse_metric: &Tensor<S>,
    volume: &VolumeForm<S>,
) -> Result<Tensor<S>> {
    let n = volume.dim();
    let k = alpha.rank();
    if alpha.dim() != n || k > n {
        return Err(Error::ShapeMismatch(format!("{k}-form of dim {} in dimension {n}", alpha.dim())));
    }
    if alpha.valence().iter().any(|&v| v != Variance::Down) {
        return Err(Error::VarianceMismatch("Hodge star needs an all-down form".into()));
    }
    let slots: Vec<usize> = (0..k).collect();
    if !alpha.is_antisymmetric(&slots)? {
        return Err(Error::NotAntisymmetric);
    }
    let mut raised = alpha.clone();
    for s in 0..k {
        raised = raised.raise(s, inverse_metric)?;
    }
    let mut full = vec![0usize; n];
    let mut present = vec![false; n];
    Ok(Tensor::from_fn(n, vec![Down; n - k], |j| {
        present.iter_mut().for_each(|p| *p = false);
        for &v in j {
            if present[v] {
                return S::zero();
            }
            present[v] = true;
        }
        // With sorted s-indices the ε-contraction has a single surviving term:
        // the complement of j.
        let mut pos = 0;
        for (v, &p) in present.iter().enumerate() {
            if !p {
                full[pos] = v;
                pos += 1;
            }
        }
        full[k..].copy_from_slice(j);
        let a = raised.get(&full[..k]);
        if a.is_zero() {
            return S::zero();
        }
        volume.lower(&full) * a
    }))
}

/// Iterates strictly increasing index tuples of length `k` over `0..n`.
pub fn for_each_sorted_tuple(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Fills an all-down antisymmetric tensor from its values on increasing tuples.
pub fn antisymmetric_from_sorted<S: Scalar>(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> S) -> Tensor<S> {
    let mut out = Tensor::zeros(n, vec![Down; k]);
    for_each_sorted_tuple(n, k, |sorted| {
        let v = f(sorted);
        if v.is_zero() {
            return;
        }
        super::for_each_permutation(k, |perm, sign| {
            let idx: Vec<usize> = perm.iter().map(|&p| sorted[p]).collect();
            out.set(&idx, if sign > 0 { v.clone() } else { -v.clone() });
        });
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::tensor::all_indices as all_tuples;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    fn diag(entries: &[Rational]) -> Tensor<Rational> {
        Tensor::from_fn(entries.len(), vec![Down, Down], |i| {
            if i[0] == i[1] {
                entries[i[0]].clone()
            } else {
                q(0)
            }
        })
    }

    #[test]
    fn two_delta_is_determinant() {
        let d = generalized_delta::<Rational>(2, 3).unwrap();
        let id = |a: usize, b: usize| if a == b { 1 } else { 0 };
        for idx in all_tuples(3, 4) {
            let expected = id(idx[0], idx[2]) * id(idx[1], idx[3]) - id(idx[0], idx[3]) * id(idx[1], idx[2]);
            assert_eq!(*d.get(&idx), q(expected));
        }
        assert!(generalized_delta::<Rational>(3, 2).unwrap().is_zero());
        assert!(generalized_delta::<Rational>(0, 2).is_err());
    }

    #[test]
    fn euclidean_volume_form() {
        let eps = epsilon_form(&diag(&[q(1), q(1), q(1), q(1)]), 1).unwrap();
        assert_eq!(*eps.get(&[0, 1, 2, 3]), q(1));
        assert_eq!(*eps.get(&[1, 0, 2, 3]), q(-1));
        let eps = epsilon_form(&diag(&[q(4), q(1), q(1), q(1)]), 1).unwrap();
        assert_eq!(*eps.get(&[0, 1, 2, 3]), q(2));
    }

    #[test]
    fn irrational_volume_is_not_representable() {
        let err = VolumeForm::new(&diag(&[q(2), q(1)]), 1).unwrap_err();
        assert!(matches!(err, Error::NotRepresentable { .. }));
        assert_eq!(VolumeForm::new(&diag(&[q(0), q(1)]), 1).unwrap_err(), Error::DegenerateMetric);
    }

    #[test]
    fn star_of_one_is_volume_form() {
        let g = diag(&[q(4), q(9), q(1)]);
        let ginv = diag(&[Rational::from_ratio(1, 4), Rational::from_ratio(1, 9), q(1)]);
        let ginv = Tensor::from_matrix([Up, Up], &ginv.to_matrix());
        let vol = VolumeForm::new(&g, 1).unwrap();
        let one = Tensor::scalar(3, q(1));
        assert_eq!(hodge_star(&one, &ginv, &vol).unwrap(), epsilon_form(&g, 1).unwrap());
    }

    #[test]
    fn star_rejects_non_forms() {
        let g = diag(&[q(1), q(1)]);
        let ginv = Tensor::from_matrix([Up, Up], &g.to_matrix());
        let vol = VolumeForm::new(&g, 1).unwrap();
        let t = Tensor::from_fn(2, vec![Down, Down], |i| q((i[0] + 2 * i[1]) as i64));
        assert_eq!(hodge_star(&t, &ginv, &vol).unwrap_err(), Error::NotAntisymmetric);
    }

    #[test]
    fn sorted_tuples_enumerate_combinations() {
        let mut count = 0;
        for_each_sorted_tuple(6, 3, |t| {
            assert!(t.windows(2).all(|w| w[0] < w[1]));
            count += 1;
        });
        assert_eq!(count, 20);
    }
}
