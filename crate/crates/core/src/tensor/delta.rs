//! Contractions of a generalized Kronecker delta against products of tensors,
//! evaluated as permutation sums without materializing the delta.

use rayon::prelude::*;

use super::{all_indices, for_each_permutation, Tensor, Variance};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which index of `δ_{a_0…a_{p−1}}^{b_0…b_{p−1}}` a factor slot contracts with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaSlot {
    /// Lower index `a_m`; binds an up slot of the factor.
    Lower(usize),
    /// Upper index `b_l`; binds a down slot of the factor.
    Upper(usize),
}

pub struct BoundFactor<'a, S> {
    pub tensor: &'a Tensor<S>,
    pub slots: Vec<DeltaSlot>,
}

impl<'a, S> BoundFactor<'a, S> {
    pub fn new(tensor: &'a Tensor<S>, slots: Vec<DeltaSlot>) -> Self {
        BoundFactor { tensor, slots }
    }
}

struct Plan {
    p: usize,
    free_a: Vec<usize>,
    free_b: Vec<usize>,
    contracted_a: Vec<usize>,
    perms: Vec<(Vec<usize>, i8)>,
}

/// `δ_{a_0…a_{p−1}}^{b_0…b_{p−1}} Π F` in dimension `dim`, where every slot of
/// every factor is bound to a delta index. Unbound delta indices are free; the
/// result carries the free lower indices (as down slots) followed by the free
/// upper indices (as up slots), each group in increasing position.
pub fn delta_contract<S: Scalar>(dim: usize, p: usize, factors: &[BoundFactor<'_, S>]) -> Result<Tensor<S>> {
    let mut a_used = vec![false; p];
    let mut b_used = vec![false; p];
    for f in factors {
        if f.tensor.dim() != dim {
            return Err(Error::ShapeMismatch(format!("factor of dim {} in a dim {} contraction", f.tensor.dim(), dim)));
        }
        if f.slots.len() != f.tensor.rank() {
            return Err(Error::ShapeMismatch(format!(
                "{} bindings for a rank {} factor",
                f.slots.len(),
                f.tensor.rank()
            )));
        }
        for (slot, (&binding, &variance)) in f.slots.iter().zip(f.tensor.valence()).enumerate() {
            let (used, pos, want) = match binding {
                DeltaSlot::Lower(m) => (&mut a_used, m, Variance::Up),
                DeltaSlot::Upper(l) => (&mut b_used, l, Variance::Down),
            };
            if pos >= p {
                return Err(Error::SlotOutOfRange { slot: pos, rank: p });
            }
            if variance != want {
                return Err(Error::VarianceMismatch(format!("factor slot {slot} is {variance:?}, bound to {binding:?}")));
            }
            if used[pos] {
                return Err(Error::RepeatedSlot { slot: pos });
            }
            used[pos] = true;
        }
    }
    let mut perms = Vec::new();
    for_each_permutation(p, |images, sign| perms.push((images.to_vec(), sign)));
    let plan = Plan {
        p,
        free_a: (0..p).filter(|&m| !a_used[m]).collect(),
        free_b: (0..p).filter(|&l| !b_used[l]).collect(),
        contracted_a: (0..p).filter(|&m| a_used[m]).collect(),
        perms,
    };
    let mut valence = vec![Variance::Down; plan.free_a.len()];
    valence.extend(std::iter::repeat_n(Variance::Up, plan.free_b.len()));
    let outputs = all_indices(dim, valence.len());
    let data: Vec<S> = outputs.par_iter().map(|out| component(dim, &plan, factors, out)).collect();
    Tensor::new(dim, valence, data)
}

fn component<S: Scalar>(dim: usize, plan: &Plan, factors: &[BoundFactor<'_, S>], out: &[usize]) -> S {
    let (fa, fb) = out.split_at(plan.free_a.len());
    let mut a = vec![usize::MAX; plan.p];
    let mut taken = vec![false; dim];
    for (&m, &v) in plan.free_a.iter().zip(fa) {
        if taken[v] {
            return S::zero();
        }
        taken[v] = true;
        a[m] = v;
    }
    let mut acc = S::zero();
    let mut scratch: Vec<Vec<usize>> = factors.iter().map(|f| vec![0; f.tensor.rank()]).collect();
    let mut b = vec![0; plan.p];
    assign(0, dim, plan, factors, fb, &mut a, &mut taken, &mut b, &mut scratch, &mut acc);
    acc
}

#[allow(clippy::too_many_arguments)]
fn assign<S: Scalar>(
    depth: usize,
    dim: usize,
    plan: &Plan,
    factors: &[BoundFactor<'_, S>],
    fb: &[usize],
    a: &mut [usize],
    taken: &mut [bool],
    b: &mut [usize],
    scratch: &mut [Vec<usize>],
    acc: &mut S,
) {
    if depth < plan.contracted_a.len() {
        let m = plan.contracted_a[depth];
        for v in 0..dim {
            if taken[v] {
                continue;
            }
            taken[v] = true;
            a[m] = v;
            assign(depth + 1, dim, plan, factors, fb, a, taken, b, scratch, acc);
            taken[v] = false;
        }
        return;
    }
    'perm: for (images, sign) in &plan.perms {
        for (l, &img) in images.iter().enumerate() {
            b[l] = a[img];
        }
        for (&l, &v) in plan.free_b.iter().zip(fb) {
            if b[l] != v {
                continue 'perm;
            }
        }
        let mut prod: Option<S> = None;
        for (f, idx) in factors.iter().zip(scratch.iter_mut()) {
            for (slot, binding) in f.slots.iter().enumerate() {
                idx[slot] = match *binding {
                    DeltaSlot::Lower(m) => a[m],
                    DeltaSlot::Upper(l) => b[l],
                };
            }
            let v = f.tensor.get(idx);
            if v.is_zero() {
                continue 'perm;
            }
            prod = Some(match prod {
                None => v.clone(),
                Some(x) => x * v,
            });
        }
        let term = prod.unwrap_or_else(S::one);
        if *sign > 0 {
            *acc += &term;
        } else {
            *acc -= &term;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use crate::tensor::{generalized_delta, next_index, Down, Up};

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    #[test]
    fn self_trace_counts_injections() {
        for n in 1..=5usize {
            let id = Tensor::<Rational>::identity(n);
            for p in 1..=n {
                let factors: Vec<_> = (0..p)
                    .map(|m| BoundFactor::new(&id, vec![DeltaSlot::Upper(m), DeltaSlot::Lower(m)]))
                    .collect();
                let t = delta_contract(n, p, &factors).unwrap();
                let expected: i64 = ((n - p + 1)..=n).map(|x| x as i64).product();
                assert_eq!(*t.as_scalar(), q(expected), "n={n} p={p}");
            }
        }
    }

    #[test]
    fn matches_materialized_delta() {
        // δ_{a0 a1 a2}^{b0 b1 b2} A_{b1}^{a1} B_{b2}^{a2}, free a0 and b0
        let n = 3;
        let a = Tensor::from_fn(n, vec![Down, Up], |i| q((2 * i[0] + 3 * i[1]) as i64 - 2));
        let bt = Tensor::from_fn(n, vec![Down, Up], |i| q((i[0] * i[1]) as i64 + 1));
        let got = delta_contract(
            n,
            3,
            &[
                BoundFactor::new(&a, vec![DeltaSlot::Upper(1), DeltaSlot::Lower(1)]),
                BoundFactor::new(&bt, vec![DeltaSlot::Upper(2), DeltaSlot::Lower(2)]),
            ],
        )
        .unwrap();
        let d = generalized_delta::<Rational>(3, n).unwrap();
        let mut idx = vec![0; 6];
        let mut naive = Tensor::<Rational>::zeros(n, vec![Down, Up]);
        loop {
            let v = d.get(&idx);
            if !num_traits::Zero::is_zero(v) {
                let term = v.clone() * a.get(&[idx[4], idx[1]]) * bt.get(&[idx[5], idx[2]]);
                *naive.get_mut(&[idx[0], idx[3]]) += &term;
            }
            if !next_index(&mut idx, n) {
                break;
            }
        }
        assert_eq!(got, naive);
    }

    #[test]
    fn rejects_bad_bindings() {
        let a = Tensor::<Rational>::identity(2);
        let err = delta_contract(2, 1, &[BoundFactor::new(&a, vec![DeltaSlot::Lower(0), DeltaSlot::Upper(0)])]);
        assert!(matches!(err, Err(Error::VarianceMismatch(_))));
        let err = delta_contract(2, 1, &[BoundFactor::new(&a, vec![DeltaSlot::Upper(0), DeltaSlot::Lower(3)])]);
        assert!(matches!(err, Err(Error::SlotOutOfRange { .. })));
    }
}
