//! Sum-of-norms location `min_{|x| <= R} sum_i |A_i x - b_i|` as a game
//! between a point `(1/2, x / 2R)` of the spin simplex and one spin simplex
//! point per residual.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::eja::{BlockRef, ConeDescriptor, EjaElement};
use crate::entropy::{SimplexPoint, StrategySpace};
use crate::error::{Error, Result};
use crate::games::{BilinearZeroSumGame, LinearMap, PrimalEvaluator};

#[derive(Clone, Debug)]
pub struct FermatWeberInstance {
    maps: Vec<DMatrix<f64>>,
    targets: Vec<DVector<f64>>,
    radius: f64,
}

impl FermatWeberInstance {
    /// `maps[i]` is `m x d`, `targets[i]` has length `m`.
    pub fn new(maps: Vec<DMatrix<f64>>, targets: Vec<DVector<f64>>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        if maps.is_empty() || maps.len() != targets.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} maps and {} targets",
                maps.len(),
                targets.len()
            )));
        }
        let (m, d) = maps[0].shape();
        if m == 0 || d == 0 {
            return Err(Error::DimensionMismatch("maps must be nonempty".into()));
        }
        for (a, b) in maps.iter().zip(&targets) {
            if a.shape() != (m, d) || b.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "expected {m}x{d} maps and length-{m} targets, got {}x{} and {}",
                    a.nrows(),
                    a.ncols(),
                    b.len()
                )));
            }
            if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("instance data"));
            }
        }
        Ok(Self {
            maps,
            targets,
            radius,
        })
    }

    /// Sum of distances: every map is the identity.
    pub fn points(targets: Vec<DVector<f64>>, radius: f64) -> Result<Self> {
        let d = targets.first().map(|t| t.len()).unwrap_or(0);
        let maps = vec![DMatrix::identity(d, d); targets.len()];
        Self::new(maps, targets, radius)
    }

    pub fn dim(&self) -> usize {
        self.maps[0].ncols()
    }

    pub fn residual_dim(&self) -> usize {
        self.maps[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn maps(&self) -> &[DMatrix<f64>] {
        &self.maps
    }

    pub fn targets(&self) -> &[DVector<f64>] {
        &self.targets
    }

    /// `sum_i |A_i x - b_i|`.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        sum_of_norms(&self.maps, &self.targets, x)
    }

    /// `R max_i |A_i|_2`: the trace-one to trace-infinity norm of the lifted
    /// operator and of its adjoint.
    pub fn lipschitz(&self) -> f64 {
        let spectral = |a: &DMatrix<f64>| a.singular_values().iter().copied().fold(0.0, f64::max);
        self.radius * self.maps.iter().map(spectral).fold(0.0, f64::max)
    }

    /// The location `2R v` encoded by a spin point `(s, v)`.
    pub fn location(&self, x: &EjaElement) -> Result<DVector<f64>> {
        match x.view() {
            BlockRef::Spin { v, .. } if v.len() == self.dim() => {
                Ok(DVector::from_column_slice(v) * (2.0 * self.radius))
            }
            _ => Err(crate::error::mismatch(ConeDescriptor::spin(self.dim() + 1), x.descriptor())),
        }
    }

    /// The spin point `(1/2, x / 2R)` of a location.
    pub fn encode(&self, x: &DVector<f64>) -> Result<EjaElement> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("location has length {}", x.len())));
        }
        EjaElement::spin(0.5, (x / (2.0 * self.radius)).as_slice().to_vec())
    }
}

pub fn sum_of_norms(maps: &[DMatrix<f64>], targets: &[DVector<f64>], x: &DVector<f64>) -> f64 {
    maps.iter()
        .zip(targets)
        .map(|(a, b)| (a * x - b).norm())
        .sum()
}

/// `(s, v) -> ((0, 2R A_1 v), ..., (0, 2R A_p v))`.
#[derive(Clone, Debug)]
pub struct FermatWeberOperator {
    domain: ConeDescriptor,
    codomain: ConeDescriptor,
    maps: Vec<DMatrix<f64>>,
    scale: f64,
}

impl FermatWeberOperator {
    pub fn new(maps: Vec<DMatrix<f64>>, radius: f64) -> Self {
        let (m, d) = maps[0].shape();
        let codomain = ConeDescriptor::product(vec![ConeDescriptor::spin(m + 1); maps.len()]);
        Self {
            domain: ConeDescriptor::spin(d + 1),
            codomain,
            maps,
            scale: 2.0 * radius,
        }
    }
}

impl LinearMap for FermatWeberOperator {
    fn domain(&self) -> &ConeDescriptor {
        &self.domain
    }

    fn codomain(&self) -> &ConeDescriptor {
        &self.codomain
    }

    fn apply(&self, x: &EjaElement) -> EjaElement {
        let BlockRef::Spin { v, .. } = x.view() else {
            unreachable!("domain is spin")
        };
        let v = DVector::from_column_slice(v);
        let blocks = self
            .maps
            .iter()
            .map(|a| {
                let r = a * &v * self.scale;
                EjaElement::spin(0.0, r.as_slice().to_vec()).expect("finite block")
            })
            .collect();
        EjaElement::product(blocks).expect("p >= 1 blocks")
    }

    fn adjoint(&self, y: &EjaElement) -> EjaElement {
        let d = self.maps[0].ncols();
        let mut acc = DVector::zeros(d);
        for (a, block) in self.maps.iter().zip(y.blocks().expect("codomain is a product")) {
            let BlockRef::Spin { v, .. } = block.view() else {
                unreachable!("blocks are spin")
            };
            acc += a.tr_mul(&DVector::from_column_slice(v));
        }
        EjaElement::spin(0.0, (acc * self.scale).as_slice().to_vec()).expect("finite adjoint")
    }
}

/// The game `<A x̄ - b̄, y>` with `y` ranging over a product of spin
/// simplices, one trace-one constraint per block, and an evaluator for the
/// sum of norms at the location of a min-player strategy.
pub fn build_fermat_weber_game(inst: &FermatWeberInstance) -> Result<(BilinearZeroSumGame, PrimalEvaluator)> {
    let op = FermatWeberOperator::new(inst.maps.clone(), inst.radius);
    let space_x = StrategySpace::simplex(op.domain.clone())?;
    let m = inst.residual_dim();
    let space_y = StrategySpace::product_of_simplices(vec![ConeDescriptor::spin(m + 1); inst.len()])?;
    let b = EjaElement::zero(space_x.descriptor());
    let c = EjaElement::product(
        inst.targets
            .iter()
            .map(|t| EjaElement::spin(0.0, (-t).as_slice().to_vec()))
            .collect::<Result<_>>()?,
    )?;
    let l = inst.lipschitz();
    let game = BilinearZeroSumGame::new(space_x, space_y, Arc::new(op), b, c, (l, l))?;
    let owned = inst.clone();
    let primal: PrimalEvaluator = Arc::new(move |x: &SimplexPoint| {
        owned
            .location(x)
            .map(|loc| owned.objective(&loc))
            .unwrap_or(f64::NAN)
    });
    Ok((game, primal))
}

/// Sum-of-distances instance: `p` targets in `R^d` with Gaussian directions
/// and norms uniform in `[R/2, 3R/2]`.
pub fn synthetic_fermat_weber<R: Rng + ?Sized>(d: usize, p: usize, radius: f64, rng: &mut R) -> Result<FermatWeberInstance> {
    if d == 0 || p == 0 {
        return Err(Error::InvalidParameter("d and p must be positive".into()));
    }
    let targets = (0..p)
        .map(|_| {
            let mut g = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
            while g.norm() == 0.0 {
                g = DVector::from_fn(d, |_, _| StandardNormal.sample(rng));
            }
            let norm = rng.random_range(0.5 * radius..=1.5 * radius);
            g.normalize() * norm
        })
        .collect();
    FermatWeberInstance::points(targets, radius)
}
