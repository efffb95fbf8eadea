//! Seeded generators for the randomized checks.

use num_rational::BigRational;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeff::{Coefficient, ComplexRational};
use crate::lattice::SymTridiagonal;
use crate::opalg::{Monomial, OperatorPolynomial};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_rational<R: Rng>(rng: &mut R) -> BigRational {
    BigRational::new(rng.random_range(-9i64..=9).into(), rng.random_range(1i64..=6).into())
}

/// Up to six terms with `x` powers in `-4..=6`, `p` powers in `0..=3`, `g`
/// powers in `0..=2` and small complex-rational values.
pub fn random_operator<R: Rng>(rng: &mut R) -> OperatorPolynomial {
    let mut out = OperatorPolynomial::zero();
    for _ in 0..rng.random_range(0..=6) {
        let m = Monomial::new(rng.random_range(-4..=6), rng.random_range(0..=3));
        let value = match rng.random_range(0..3) {
            0 => ComplexRational::real(small_rational(rng)),
            1 => ComplexRational::new(BigRational::from_integer(0.into()), small_rational(rng)),
            _ => ComplexRational::new(small_rational(rng), small_rational(rng)),
        };
        out.add_term(m, &Coefficient::monomial(rng.random_range(0..=2), value));
    }
    out
}

/// Symmetric tridiagonal with entries uniform in `[-10, 10]`.
pub fn random_sym_tridiagonal<R: Rng>(rng: &mut R, n: usize) -> SymTridiagonal {
    let diag = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
    let off = (0..n.saturating_sub(1)).map(|_| rng.random_range(-10.0..10.0)).collect();
    SymTridiagonal::new(diag, off)
}
