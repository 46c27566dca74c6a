use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use super::{Form, UltrametricMatrix};
use crate::extended::Extended;

/// Edge heights are drawn uniformly from `{1, .., max_step} / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeShape {
    pub max_step: u32,
    pub denominator: u32,
}

impl Default for TreeShape {
    fn default() -> Self {
        TreeShape { max_step: 4, denominator: 4 }
    }
}

/// Random rooted tree over `n` leaves; the distance of two leaves is the height
/// of their lowest common ancestor.
///
/// Clusters are merged pairwise at random; each merge sits strictly above both
/// children by a random positive step.
pub fn random_tree_ultrametric<R: Rng + ?Sized>(
    n: usize,
    shape: TreeShape,
    rng: &mut R,
) -> UltrametricMatrix<BigRational> {
    let den = BigInt::from(shape.denominator.max(1));
    let step = |rng: &mut R| BigRational::new(BigInt::from(rng.gen_range(1..=shape.max_step.max(1))), den.clone());
    let mut clusters: Vec<(Vec<usize>, BigRational)> =
        (0..n).map(|i| (vec![i], BigRational::from_integer(BigInt::from(0)))).collect();
    let mut d = vec![vec![Extended::zero(); n]; n];
    while clusters.len() > 1 {
        let i = rng.gen_range(0..clusters.len());
        let (a, ha) = clusters.swap_remove(i);
        let j = rng.gen_range(0..clusters.len());
        let (b, hb) = clusters.swap_remove(j);
        let height = if ha > hb { ha } else { hb } + step(rng);
        for &x in &a {
            for &y in &b {
                d[x][y] = Extended::Finite(height.clone());
                d[y][x] = Extended::Finite(height.clone());
            }
        }
        let mut merged = a;
        merged.extend(b);
        clusters.push((merged, height));
    }
    UltrametricMatrix::new(super::default_labels(n), d, Form::MaxForm).expect("square by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ultrametric::verify_ultrametric;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_matrices_are_ultrametric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..10 {
            let m = random_tree_ultrametric(n, TreeShape::default(), &mut rng);
            let r = verify_ultrametric(&m, 0.0).unwrap();
            assert!(r.valid && r.positive);
        }
    }
}
