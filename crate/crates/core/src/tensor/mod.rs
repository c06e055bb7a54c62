//! Dense tensors with per-slot variance.
//!
//! Components are stored row-major with slot 0 varying slowest. Slot order is
//! the declaration order of abstract indices and every operation preserves it.

mod delta;
mod forms;
pub mod linalg;
mod perm;

use serde::{Deserialize, Serialize};

pub use delta::{delta_contract, BoundFactor, DeltaSlot};
pub use forms::{
    antisymmetric_from_sorted, epsilon_form, for_each_sorted_tuple, generalized_delta, hodge_star, levi_civita,
    VolumeForm,
};
pub use perm::{for_each_permutation, parity_sign, sort_sign, Permutation};

use crate::error::{Error, Result};
use crate::scalar::{Jet, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variance {
    Up,
    Down,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Up => Variance::Down,
            Variance::Down => Variance::Up,
        }
    }
}

pub use Variance::{Down, Up};

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    dim: usize,
    valence: Vec<Variance>,
    data: Vec<S>,
}

/// Advances a multi-index odometer; returns false after the last index.
pub fn next_index(idx: &mut [usize], dim: usize) -> bool {
    for slot in (0..idx.len()).rev() {
        idx[slot] += 1;
        if idx[slot] < dim {
            return true;
        }
        idx[slot] = 0;
    }
    false
}

/// Every multi-index of length `rank` over `0..dim`, in storage order.
pub fn all_indices(dim: usize, rank: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(dim.pow(rank as u32));
    let mut idx = vec![0; rank];
    loop {
        out.push(idx.clone());
        if !next_index(&mut idx, dim) {
            break;
        }
    }
    out
}

fn check_slots(slots: &[usize], rank: usize) -> Result<()> {
    for (i, &s) in slots.iter().enumerate() {
        if s >= rank {
            return Err(Error::SlotOutOfRange { slot: s, rank });
        }
        if slots[..i].contains(&s) {
            return Err(Error::RepeatedSlot { slot: s });
        }
    }
    Ok(())
}

impl<S: Scalar> Tensor<S> {
    pub fn new(dim: usize, valence: Vec<Variance>, data: Vec<S>) -> Result<Self> {
        let expected = dim.pow(valence.len() as u32);
        if data.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} components given, dimension {} rank {} needs {}",
                data.len(),
                dim,
                valence.len(),
                expected
            )));
        }
        Ok(Tensor { dim, valence, data })
    }

    pub fn zeros(dim: usize, valence: Vec<Variance>) -> Self {
        let len = dim.pow(valence.len() as u32);
        Tensor { dim, valence, data: vec![S::zero(); len] }
    }

    pub fn scalar(dim: usize, value: S) -> Self {
        Tensor { dim, valence: Vec::new(), data: vec![value] }
    }

    pub fn from_fn(dim: usize, valence: Vec<Variance>, mut f: impl FnMut(&[usize]) -> S) -> Self {
        let rank = valence.len();
        let mut data = Vec::with_capacity(dim.pow(rank as u32));
        let mut idx = vec![0; rank];
        loop {
            data.push(f(&idx));
            if !next_index(&mut idx, dim) {
                break;
            }
        }
        Tensor { dim, valence, data }
    }

    /// `δ_i^j` with slots (down, up).
    pub fn identity(dim: usize) -> Self {
        Tensor::from_fn(dim, vec![Down, Up], |i| if i[0] == i[1] { S::one() } else { S::zero() })
    }

    /// Rank-2 tensor from a square matrix.
    pub fn from_matrix(valence: [Variance; 2], rows: &[Vec<S>]) -> Self {
        let n = rows.len();
        Tensor::from_fn(n, valence.to_vec(), |i| rows[i[0]][i[1]].clone())
    }

    pub fn to_matrix(&self) -> Vec<Vec<S>> {
        assert_eq!(self.rank(), 2, "to_matrix needs a rank-2 tensor");
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(&[i, j]).clone()).collect()).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.valence.len()
    }

    pub fn valence(&self) -> &[Variance] {
        &self.valence
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn into_data(self) -> Vec<S> {
        self.data
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: S) {
        let o = self.offset(idx);
        self.data[o] = value;
    }

    pub fn get_mut(&mut self, idx: &[usize]) -> &mut S {
        let o = self.offset(idx);
        &mut self.data[o]
    }

    /// The value of a rank-0 tensor.
    pub fn as_scalar(&self) -> &S {
        assert_eq!(self.rank(), 0, "as_scalar needs a rank-0 tensor");
        &self.data[0]
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Tensor<T> {
        Tensor { dim: self.dim, valence: self.valence.clone(), data: self.data.iter().map(f).collect() }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.valence != other.valence {
            return Err(Error::ShapeMismatch(format!(
                "dim {} {:?} vs dim {} {:?}",
                self.dim, self.valence, other.dim, other.valence
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b).collect();
        Ok(Tensor { dim: self.dim, valence: self.valence.clone(), data })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b).collect();
        Ok(Tensor { dim: self.dim, valence: self.valence.clone(), data })
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s)
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Largest component magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn outer(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!("outer product of dims {} and {}", self.dim, other.dim)));
        }
        let mut valence = self.valence.clone();
        valence.extend_from_slice(&other.valence);
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a.clone() * b);
            }
        }
        Ok(Tensor { dim: self.dim, valence, data })
    }

    /// Reorders slots: slot `i` of the result is slot `order[i]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.rank() {
            return Err(Error::ShapeMismatch(format!(
                "permutation of length {} for rank {}",
                order.len(),
                self.rank()
            )));
        }
        check_slots(order, self.rank())?;
        let valence = order.iter().map(|&s| self.valence[s]).collect();
        let mut src = vec![0; self.rank()];
        Ok(Tensor::from_fn(self.dim, valence, |idx| {
            for (i, &s) in order.iter().enumerate() {
                src[s] = idx[i];
            }
            self.get(&src).clone()
        }))
    }

    /// Contracts each pair of slots; the two slots of a pair must have opposite variance.
    pub fn contract(&self, pairs: &[(usize, usize)]) -> Result<Self> {
        let flat: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        check_slots(&flat, self.rank())?;
        for &(a, b) in pairs {
            if self.valence[a] == self.valence[b] {
                return Err(Error::VarianceMismatch(format!(
                    "slots {a} and {b} are both {:?}",
                    self.valence[a]
                )));
            }
        }
        let keep: Vec<usize> = (0..self.rank()).filter(|s| !flat.contains(s)).collect();
        let valence = keep.iter().map(|&s| self.valence[s]).collect();
        let mut out = Tensor::zeros(self.dim, valence);
        let mut idx = vec![0; self.rank()];
        let mut res_idx = vec![0; keep.len()];
        loop {
            if pairs.iter().all(|&(a, b)| idx[a] == idx[b]) {
                let v = &self.data[self.offset(&idx)];
                if !v.is_zero() {
                    for (r, &s) in keep.iter().enumerate() {
                        res_idx[r] = idx[s];
                    }
                    *out.get_mut(&res_idx) += v;
                }
            }
            if !next_index(&mut idx, self.dim) {
                break;
            }
        }
        Ok(out)
    }

    /// Contracts slots of `self` against slots of `other` without forming the
    /// outer product. The result carries the free slots of `self` followed by
    /// the free slots of `other`.
    pub fn contract_with(&self, other: &Self, pairs: &[(usize, usize)]) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::ShapeMismatch(format!("contraction of dims {} and {}", self.dim, other.dim)));
        }
        let mine: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let theirs: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        check_slots(&mine, self.rank())?;
        check_slots(&theirs, other.rank())?;
        for &(a, b) in pairs {
            if self.valence[a] == other.valence[b] {
                return Err(Error::VarianceMismatch(format!(
                    "slot {a} and partner slot {b} are both {:?}",
                    self.valence[a]
                )));
            }
        }
        let keep_a: Vec<usize> = (0..self.rank()).filter(|s| !mine.contains(s)).collect();
        let keep_b: Vec<usize> = (0..other.rank()).filter(|s| !theirs.contains(s)).collect();
        let mut valence: Vec<Variance> = keep_a.iter().map(|&s| self.valence[s]).collect();
        valence.extend(keep_b.iter().map(|&s| other.valence[s]));
        let mut out = Tensor::zeros(self.dim, valence);
        let mut ia = vec![0; self.rank()];
        let mut ib = vec![0; other.rank()];
        let mut free_b = vec![0; keep_b.len()];
        let mut res = vec![0; keep_a.len() + keep_b.len()];
        loop {
            let va = &self.data[self.offset(&ia)];
            if !va.is_zero() {
                for &(a, b) in pairs {
                    ib[b] = ia[a];
                }
                for (r, &s) in keep_a.iter().enumerate() {
                    res[r] = ia[s];
                }
                free_b.iter_mut().for_each(|x| *x = 0);
                loop {
                    for (r, &s) in keep_b.iter().enumerate() {
                        ib[s] = free_b[r];
                        res[keep_a.len() + r] = free_b[r];
                    }
                    let vb = &other.data[other.offset(&ib)];
                    if !vb.is_zero() {
                        let prod = va.clone() * vb;
                        *out.get_mut(&res) += &prod;
                    }
                    if !next_index(&mut free_b, self.dim) {
                        break;
                    }
                }
            }
            if !next_index(&mut ia, self.dim) {
                break;
            }
        }
        Ok(out)
    }

    fn check_common_variance(&self, slots: &[usize]) -> Result<()> {
        check_slots(slots, self.rank())?;
        if let Some(&first) = slots.first() {
            if slots.iter().any(|&s| self.valence[s] != self.valence[first]) {
                return Err(Error::VarianceMismatch("mixed-variance slot list".into()));
            }
        }
        Ok(())
    }

    fn permutation_average(&self, slots: &[usize], signed: bool) -> Result<Self> {
        self.check_common_variance(slots)?;
        let p = slots.len();
        let mut acc = Tensor::zeros(self.dim, self.valence.clone());
        let mut count = 0i64;
        let mut src = vec![0; self.rank()];
        for_each_permutation(p, |sigma, sign| {
            count += 1;
            let flip = signed && sign < 0;
            let mut idx = vec![0; self.rank()];
            for (o, slot) in acc.data.iter_mut().enumerate() {
                let mut rem = o;
                for s in (0..idx.len()).rev() {
                    idx[s] = rem % self.dim;
                    rem /= self.dim;
                }
                src.copy_from_slice(&idx);
                for (a, &s) in slots.iter().enumerate() {
                    src[s] = idx[slots[sigma[a]]];
                }
                let v = &self.data[self.offset(&src)];
                if flip {
                    *slot -= v;
                } else {
                    *slot += v;
                }
            }
        });
        let inv = S::one() / &S::from_i64(count);
        Ok(acc.scale(&inv))
    }

    /// `(1/p!) Σ_σ sign(σ)·(slot-permuted self)` over the listed slots.
    pub fn antisymmetrize(&self, slots: &[usize]) -> Result<Self> {
        self.permutation_average(slots, true)
    }

    /// `(1/p!) Σ_σ (slot-permuted self)` over the listed slots.
    pub fn symmetrize(&self, slots: &[usize]) -> Result<Self> {
        self.permutation_average(slots, false)
    }

    /// Largest deviation from antisymmetry under transpositions of the listed slots.
    pub fn antisymmetry_defect(&self, slots: &[usize]) -> Result<f64> {
        check_slots(slots, self.rank())?;
        let mut worst: f64 = 0.0;
        let mut idx = vec![0; self.rank()];
        loop {
            for a in 0..slots.len() {
                for b in a + 1..slots.len() {
                    let mut sw = idx.clone();
                    sw.swap(slots[a], slots[b]);
                    let d = self.get(&idx).clone() + self.get(&sw);
                    worst = worst.max(d.magnitude());
                }
            }
            if !next_index(&mut idx, self.dim) {
                break;
            }
        }
        Ok(worst)
    }

    /// Exact antisymmetry for exact kinds; for floats, defect at most `1e-10` relative.
    pub fn is_antisymmetric(&self, slots: &[usize]) -> Result<bool> {
        if S::EXACT {
            check_slots(slots, self.rank())?;
            Ok(self.exact_antisymmetric(slots))
        } else {
            Ok(self.antisymmetry_defect(slots)? <= 1e-10 * self.max_magnitude().max(1.0))
        }
    }

    fn exact_antisymmetric(&self, slots: &[usize]) -> bool {
        let mut idx = vec![0; self.rank()];
        loop {
            for a in 0..slots.len() {
                for b in a + 1..slots.len() {
                    let mut sw = idx.clone();
                    sw.swap(slots[a], slots[b]);
                    if !(self.get(&idx).clone() + self.get(&sw)).is_zero() {
                        return false;
                    }
                }
            }
            if !next_index(&mut idx, self.dim) {
                return true;
            }
        }
    }

    fn move_slot(&self, slot: usize, metric: &Tensor<S>, from: Variance) -> Result<Self> {
        if slot >= self.rank() {
            return Err(Error::SlotOutOfRange { slot, rank: self.rank() });
        }
        if self.valence[slot] != from {
            return Err(Error::VarianceMismatch(format!("slot {slot} is not {:?}", from)));
        }
        if metric.rank() != 2 || metric.dim != self.dim || metric.valence.iter().any(|&v| v != from.flip()) {
            return Err(Error::ShapeMismatch("metric must be rank 2 with matching variance".into()));
        }
        let mut valence = self.valence.clone();
        valence[slot] = from.flip();
        let mut src = vec![0; self.rank()];
        Ok(Tensor::from_fn(self.dim, valence, |idx| {
            src.copy_from_slice(idx);
            let mut acc = S::zero();
            for b in 0..self.dim {
                src[slot] = b;
                let m = metric.get(&[idx[slot], b]);
                if m.is_zero() {
                    continue;
                }
                acc += &(m.clone() * self.get(&src));
            }
            acc
        }))
    }

    /// Raises a down slot with the inverse metric `g^{ab}`.
    pub fn raise(&self, slot: usize, inverse_metric: &Tensor<S>) -> Result<Self> {
        self.move_slot(slot, inverse_metric, Down)
    }

    /// Lowers an up slot with the metric `g_{ab}`.
    pub fn lower(&self, slot: usize, metric: &Tensor<S>) -> Result<Self> {
        self.move_slot(slot, metric, Up)
    }

    /// Relative deviation from `other`: `max|a−b| / max(max|a|, max|b|, floor)`.
    pub fn relative_residual(&self, other: &Self, floor: f64) -> Result<f64> {
        let diff = self.try_sub(other)?;
        let scale = self.max_magnitude().max(other.max_magnitude()).max(floor);
        Ok(diff.max_magnitude() / scale)
    }
}

impl<S: Scalar> Tensor<Jet<S>> {
    /// Component values at the base point.
    pub fn values(&self) -> Tensor<S> {
        Tensor { dim: self.dim, valence: self.valence.clone(), data: self.data.iter().map(|j| j.value().clone()).collect() }
    }

    pub fn truncate_jets(&self, order: usize) -> Self {
        self.map(|j| j.truncate(order))
    }

    /// Lowest truncation order among non-constant components.
    pub fn jet_order(&self) -> Option<usize> {
        self.data.iter().filter_map(Jet::order).min()
    }

    pub fn constant(t: &Tensor<S>) -> Self {
        t.map(|x| Jet::constant(x.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    #[test]
    fn trace_of_identity_is_dimension() {
        let d = Tensor::<Rational>::identity(4);
        assert_eq!(*d.contract(&[(1, 0)]).unwrap().as_scalar(), q(4));
    }

    #[test]
    fn metric_times_inverse_is_identity() {
        let g = Tensor::from_matrix([Down, Down], &[vec![q(2), q(1)], vec![q(1), q(3)]]);
        let ginv = Tensor::from_matrix([Up, Up], &linalg::inverse(&g.to_matrix()).unwrap());
        let d = g.contract_with(&ginv, &[(1, 0)]).unwrap();
        assert_eq!(d, Tensor::identity(2));
        assert_eq!(d.lower(1, &g).unwrap(), g);
    }

    #[test]
    fn contraction_rejects_bad_slots() {
        let g = Tensor::<Rational>::zeros(3, vec![Down, Down]);
        assert!(matches!(g.contract(&[(0, 1)]), Err(Error::VarianceMismatch(_))));
        assert!(matches!(g.contract(&[(0, 2)]), Err(Error::SlotOutOfRange { .. })));
        let d = Tensor::<Rational>::identity(3);
        assert!(matches!(d.contract(&[(0, 0)]), Err(Error::RepeatedSlot { .. })));
    }

    #[test]
    fn symmetric_tensor_antisymmetrizes_to_zero() {
        let g = Tensor::from_fn(3, vec![Down, Down], |i| q((i[0] + i[1]) as i64));
        assert!(g.antisymmetrize(&[0, 1]).unwrap().is_zero());
        let t = Tensor::from_fn(3, vec![Down, Down], |i| q((3 * i[0] + i[1] * i[1]) as i64));
        assert!(t.symmetrize(&[0, 1]).unwrap().antisymmetrize(&[0, 1]).unwrap().is_zero());
        assert!(matches!(
            Tensor::<Rational>::identity(3).antisymmetrize(&[0, 1]),
            Err(Error::VarianceMismatch(_))
        ));
    }

    #[test]
    fn permute_moves_slots() {
        let t = Tensor::from_fn(3, vec![Down, Up, Down], |i| q((9 * i[0] + 3 * i[1] + i[2]) as i64));
        let p = t.permute(&[2, 0, 1]).unwrap();
        assert_eq!(p.valence(), &[Down, Down, Up]);
        assert_eq!(p.get(&[1, 2, 0]), t.get(&[2, 0, 1]));
    }
}
