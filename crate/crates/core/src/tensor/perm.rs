use std::fmt;

/// A bijection on `{0, …, p−1}` together with its sign.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
    sign: i8,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({:?}, {:+})", self.images, self.sign)
    }
}

impl Permutation {
    pub fn identity(p: usize) -> Self {
        Permutation { images: (0..p).collect(), sign: 1 }
    }

    /// Returns `None` unless `images` is a bijection on `0..len`.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let p = images.len();
        let mut seen = vec![false; p];
        for &i in &images {
            if i >= p || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        let sign = parity_sign(&images);
        Some(Permutation { images, sign })
    }

    /// Builds a permutation of `0..p` from disjoint cycles.
    pub fn from_cycles(p: usize, cycles: &[Vec<usize>]) -> Option<Self> {
        let mut images: Vec<usize> = (0..p).collect();
        let mut used = vec![false; p];
        for cycle in cycles {
            for (pos, &a) in cycle.iter().enumerate() {
                if a >= p || used[a] {
                    return None;
                }
                used[a] = true;
                images[a] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Permutation::from_images(images)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
            sign: self.sign * other.sign,
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images, sign: self.sign }
    }

    /// Disjoint cycles, each starting at its smallest element, fixed points included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }

    /// All permutations of `0..p`, in Heap's order.
    pub fn all(p: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        for_each_permutation(p, |images, sign| {
            out.push(Permutation { images: images.to_vec(), sign });
        });
        out
    }
}

/// Sign of a permutation given by its images, via cycle decomposition.
pub fn parity_sign(images: &[usize]) -> i8 {
    let mut seen = vec![false; images.len()];
    let mut sign = 1i8;
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = images[i];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Sign of the permutation sorting `values`, or 0 if a value repeats.
pub fn sort_sign(values: &[usize]) -> i8 {
    let mut sign = 1i8;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            match values[i].cmp(&values[j]) {
                std::cmp::Ordering::Equal => return 0,
                std::cmp::Ordering::Greater => sign = -sign,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    sign
}

/// Visits every permutation of `0..p` with Heap's algorithm; each step is one
/// transposition, so the sign is updated incrementally.
pub fn for_each_permutation(p: usize, mut f: impl FnMut(&[usize], i8)) {
    let mut a: Vec<usize> = (0..p).collect();
    let mut c = vec![0usize; p];
    let mut sign = 1i8;
    f(&a, sign);
    let mut i = 1;
    while i < p {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            sign = -sign;
            f(&a, sign);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heap_visits_each_permutation_once_with_correct_sign() {
        let mut seen = std::collections::HashSet::new();
        for_each_permutation(5, |images, sign| {
            assert_eq!(sign, parity_sign(images));
            assert!(seen.insert(images.to_vec()));
        });
        assert_eq!(seen.len(), 120);
    }

    #[test]
    fn cycles_round_trip() {
        let p = Permutation::from_cycles(5, &[vec![0, 2, 4], vec![1, 3]]).unwrap();
        assert_eq!(p.images(), &[2, 3, 4, 1, 0]);
        assert_eq!(p.sign(), -1);
        assert_eq!(Permutation::from_cycles(5, &p.cycles()).unwrap(), p);
        assert_eq!(p.compose(&p.inverse()), Permutation::identity(5));
    }

    #[test]
    fn sort_sign_detects_repeats() {
        assert_eq!(sort_sign(&[2, 0, 1]), 1);
        assert_eq!(sort_sign(&[1, 0, 2]), -1);
        assert_eq!(sort_sign(&[1, 1, 2]), 0);
    }
}
