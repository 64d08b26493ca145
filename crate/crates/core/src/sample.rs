//! Seeded random generation of scalars, lattice points and elements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{Coset, Lattice};
use crate::scalar::{Field, Scalar};
use crate::svir::{Parity, SuperAlgebra, SuperElement};
use crate::vir::AlgebraElement;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in `lo..=hi`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.rng.gen_range(0..items.len())]
    }

    /// `p/q` with `|p| <= 9`, `1 <= q <= 6`.
    pub fn rational(&mut self, f: &Field) -> Scalar {
        let p = self.int(-9, 9);
        let q = self.int(1, 6);
        f.from_ratio(p, q)
    }

    /// A small-height field element; every power basis coordinate is random.
    pub fn scalar(&mut self, f: &Field) -> Scalar {
        let mut acc = self.rational(f);
        if f.degree() > 1 {
            let g = f.gen();
            let mut pow = f.one();
            for _ in 1..f.degree() {
                pow = &pow * &g;
                acc = &acc + &(&self.rational(f) * &pow);
            }
        }
        acc
    }

    pub fn nonzero_scalar(&mut self, f: &Field) -> Scalar {
        loop {
            let s = self.scalar(f);
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// A scalar avoiding `avoid`.
    pub fn scalar_avoiding(&mut self, f: &Field, avoid: impl Fn(&Scalar) -> bool) -> Scalar {
        loop {
            let s = self.scalar(f);
            if !avoid(&s) {
                return s;
            }
        }
    }

    /// Integer coordinates in `[-radius, radius]` on the reduced basis.
    pub fn lattice_point(&mut self, lat: &Lattice, radius: i64) -> Scalar {
        let coords: Vec<_> = (0..lat.rank()).map(|_| self.int(-radius, radius).into()).collect();
        lat.element(&coords)
    }

    pub fn coset_point(&mut self, coset: &Coset, radius: i64) -> Scalar {
        &self.lattice_point(coset.lattice(), radius) + coset.offset()
    }

    /// Up to `max_terms` `L` terms with degrees of radius 3, and sometimes `c`.
    pub fn element(&mut self, lat: &Lattice, centerless: bool, max_terms: usize) -> AlgebraElement {
        let f = lat.field();
        let mut x = AlgebraElement::zero(lat, centerless);
        let n = self.int(1, max_terms as i64);
        for _ in 0..n {
            let mu = self.lattice_point(lat, 3);
            let a = self.nonzero_scalar(f);
            x.add_l(&mu, a).expect("point in M");
        }
        if self.coin() {
            let k = self.scalar(f);
            x.add_c(k);
        }
        x
    }

    pub fn super_element(&mut self, alg: &SuperAlgebra, parity: Parity, max_terms: usize) -> SuperElement {
        let f = alg.lattice().field();
        let mut x = SuperElement::zero(alg);
        let n = self.int(1, max_terms as i64);
        for _ in 0..n {
            let a = self.nonzero_scalar(f);
            match parity {
                Parity::Even => {
                    let mu = self.lattice_point(alg.lattice(), 3);
                    x.add_l(&mu, a).expect("point in M");
                }
                Parity::Odd => {
                    let nu = self.coset_point(alg.coset(), 3);
                    x.add_g(&nu, a).expect("point in coset");
                }
            }
        }
        if parity == Parity::Even && self.coin() {
            x = x.add(&SuperElement::c(alg).scale(&self.scalar(f))).expect("same algebra");
        }
        x
    }

    pub fn parity(&mut self) -> Parity {
        if self.coin() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let f = Field::sqrt2();
        let lat = Lattice::new(&f, vec![f.one(), f.gen()]).unwrap();
        let mut a = Sampler::new(7);
        let mut b = Sampler::new(7);
        for _ in 0..20 {
            assert_eq!(a.element(&lat, false, 3), b.element(&lat, false, 3));
        }
    }

    #[test]
    fn samples_stay_in_range() {
        let q = Field::rational();
        let lat = Lattice::integers(&q);
        let coset = Coset::new(&lat, &q.from_ratio(1, 2)).unwrap();
        let mut s = Sampler::new(1);
        for _ in 0..50 {
            assert!(lat.contains(&s.lattice_point(&lat, 4)));
            assert!(coset.contains(&s.coset_point(&coset, 4)));
            assert!(!s.nonzero_scalar(&q).is_zero());
        }
    }
}
