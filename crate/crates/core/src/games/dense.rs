use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{BilinearZeroSumGame, LinearMap};
use crate::eja::{flat_gram_weights, ConeDescriptor, EjaElement};
use crate::entropy::StrategySpace;
use crate::error::{Error, Result};

/// A linear map given by a dense matrix over flat coordinates
/// (see [`EjaElement::to_flat`]): `flat(A x) = M flat(x)`.
///
/// The adjoint under the canonical inner products is `Gx^-1 M^T Gy` with
/// `G` the diagonal Gram weights of the flat coordinates; it is formed once
/// at construction.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    domain: ConeDescriptor,
    codomain: ConeDescriptor,
    matrix: DMatrix<f64>,
    adjoint: DMatrix<f64>,
}

/// A Lipschitz constant for the payoff maps, in trace-one to
/// trace-infinity norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzBound {
    pub value: f64,
    /// True when `value` is the exact norm, false when it is only an upper
    /// bound.
    pub exact: bool,
}

impl DenseOperator {
    pub fn new(domain: ConeDescriptor, codomain: ConeDescriptor, matrix: DMatrix<f64>) -> Result<Self> {
        domain.validate()?;
        codomain.validate()?;
        let shape = (codomain.ambient_dim(), domain.ambient_dim());
        if matrix.shape() != shape {
            return Err(Error::DimensionMismatch(format!(
                "operator {domain} -> {codomain} needs a {}x{} matrix, got {}x{}",
                shape.0,
                shape.1,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("operator matrix"));
        }
        let gx = flat_gram_weights(&domain);
        let gy = flat_gram_weights(&codomain);
        let adjoint = DMatrix::from_fn(shape.1, shape.0, |i, j| matrix[(j, i)] * gy[j] / gx[i]);
        Ok(Self {
            domain,
            codomain,
            matrix,
            adjoint,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Exact `max ||A q||_{tr,inf}` over the standard basis when either side
    /// is a (product of) orthant(s); otherwise the operator norm under the
    /// canonical inner products, which dominates the trace-norm constant.
    pub fn lipschitz_bound(&self) -> LipschitzBound {
        let all_orthant =
            |d: &ConeDescriptor| d.leaves().iter().all(|l| matches!(l, ConeDescriptor::Orthant(_)));
        if all_orthant(&self.domain) {
            return LipschitzBound {
                value: max_column_norm(&self.matrix, &self.codomain),
                exact: true,
            };
        }
        if all_orthant(&self.codomain) {
            return LipschitzBound {
                value: max_column_norm(&self.adjoint, &self.domain),
                exact: true,
            };
        }
        let gx = flat_gram_weights(&self.domain);
        let gy = flat_gram_weights(&self.codomain);
        let scaled = DMatrix::from_fn(self.matrix.nrows(), self.matrix.ncols(), |i, j| {
            self.matrix[(i, j)] * gy[i].sqrt() / gx[j].sqrt()
        });
        let value = scaled
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max);
        LipschitzBound { value, exact: false }
    }

    /// Game `<y, A x>` over the joint simplices of both algebras.
    pub fn into_game(self, lipschitz: Option<(f64, f64)>) -> Result<BilinearZeroSumGame> {
        let b = EjaElement::zero(&self.domain);
        let c = EjaElement::zero(&self.codomain);
        self.into_game_with_offsets(b, c, lipschitz)
    }

    /// Game `<y, A x> + <b, x> + <c, y>`; Lipschitz constants default to
    /// [`Self::lipschitz_bound`].
    pub fn into_game_with_offsets(
        self,
        b: EjaElement,
        c: EjaElement,
        lipschitz: Option<(f64, f64)>,
    ) -> Result<BilinearZeroSumGame> {
        let l = lipschitz.unwrap_or_else(|| {
            let v = self.lipschitz_bound().value;
            (v, v)
        });
        let space_x = StrategySpace::simplex(self.domain.clone())?;
        let space_y = StrategySpace::simplex(self.codomain.clone())?;
        BilinearZeroSumGame::new(space_x, space_y, Arc::new(self), b, c, l)
    }
}

fn max_column_norm(m: &DMatrix<f64>, target: &ConeDescriptor) -> f64 {
    (0..m.ncols())
        .map(|j| {
            let col: Vec<f64> = m.column(j).iter().copied().collect();
            EjaElement::from_flat(target, &col)
                .expect("column length matches target")
                .spectral_norm()
        })
        .fold(0.0, f64::max)
}

impl LinearMap for DenseOperator {
    fn domain(&self) -> &ConeDescriptor {
        &self.domain
    }

    fn codomain(&self) -> &ConeDescriptor {
        &self.codomain
    }

    fn apply(&self, x: &EjaElement) -> EjaElement {
        let y = &self.matrix * DVector::from_vec(x.to_flat());
        EjaElement::from_flat(&self.codomain, y.as_slice()).expect("shape checked at construction")
    }

    fn adjoint(&self, y: &EjaElement) -> EjaElement {
        let x = &self.adjoint * DVector::from_vec(y.to_flat());
        EjaElement::from_flat(&self.domain, x.as_slice()).expect("shape checked at construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_operator(dx: ConeDescriptor, dy: ConeDescriptor, rng: &mut ChaCha8Rng) -> DenseOperator {
        let m = DMatrix::from_fn(dy.ambient_dim(), dx.ambient_dim(), |_, _| StandardNormal.sample(rng));
        DenseOperator::new(dx, dy, m).unwrap()
    }

    #[test]
    fn adjoint_identity_across_algebras() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let descs = [
            ConeDescriptor::orthant(3),
            ConeDescriptor::spin(4),
            ConeDescriptor::sym(3),
            ConeDescriptor::product(vec![ConeDescriptor::spin(3), ConeDescriptor::sym(2)]),
        ];
        for dx in &descs {
            for dy in &descs {
                let op = random_operator(dx.clone(), dy.clone(), &mut rng);
                for _ in 0..5 {
                    let x = EjaElement::gaussian(dx, &mut rng);
                    let y = EjaElement::gaussian(dy, &mut rng);
                    let lhs = op.apply(&x).inner(&y).unwrap();
                    let rhs = x.inner(&op.adjoint(&y)).unwrap();
                    assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
                }
            }
        }
    }

    #[test]
    fn rejects_wrong_shape() {
        let err = DenseOperator::new(ConeDescriptor::sym(2), ConeDescriptor::orthant(2), DMatrix::zeros(2, 2));
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = f64::NAN;
        assert!(DenseOperator::new(ConeDescriptor::orthant(2), ConeDescriptor::orthant(2), m).is_err());
    }

    #[test]
    fn exact_lipschitz_for_orthant_domain() {
        // columns: (3, -1) -> 3 ; (0.5, 2) -> 2
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.5, -1.0, 2.0]);
        let op = DenseOperator::new(ConeDescriptor::orthant(2), ConeDescriptor::orthant(2), m).unwrap();
        assert_eq!(op.lipschitz_bound(), LipschitzBound { value: 3.0, exact: true });
    }

    #[test]
    fn general_bound_dominates_sampled_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let op = random_operator(ConeDescriptor::spin(4), ConeDescriptor::sym(3), &mut rng);
        let bound = op.lipschitz_bound();
        assert!(!bound.exact);
        for _ in 0..500 {
            let x = EjaElement::gaussian(&ConeDescriptor::spin(4), &mut rng);
            let ratio = op.apply(&x).spectral_norm() / x.trace_norm();
            assert!(ratio <= bound.value + 1e-12);
        }
    }
}
