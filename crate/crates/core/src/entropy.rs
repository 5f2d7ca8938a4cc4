//! Geometry of generalized simplices: the negative-entropy regularizer, its
//! Bregman divergence, the exp-normalize map and the support function.

use std::ops::Deref;

use rand::Rng;

use crate::eja::{ConeDescriptor, EjaElement, NumericPolicy, Spectrum};
use crate::error::{mismatch, Error, Result};

/// Membership tolerance for trace and cone checks.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// A strategy set: either the trace-one slice of one cone, or a product of
/// such slices where every top-level block of a product cone carries its own
/// trace-one constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategySpace {
    descriptor: ConeDescriptor,
    per_block: bool,
}

/// A point of a generalized simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint {
    element: EjaElement,
}

/// Value and maximizer of a linear form over a strategy space.
#[derive(Clone, Debug)]
pub struct Support {
    pub value: f64,
    pub argmax: SimplexPoint,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundaryPolicy {
    /// Zero eigenvalues are an error.
    #[default]
    Reject,
    /// Eigenvalues in `[0, 1e-300)` contribute `0 ln 0 = 0`.
    ZeroLogZero,
}

impl StrategySpace {
    /// `{x in K : tr(x) = 1}`.
    pub fn simplex(descriptor: ConeDescriptor) -> Result<Self> {
        descriptor.validate()?;
        Ok(Self {
            descriptor,
            per_block: false,
        })
    }

    /// `prod_i {x_i in K_i : tr(x_i) = 1}`, carried by the product algebra.
    pub fn product_of_simplices(factors: Vec<ConeDescriptor>) -> Result<Self> {
        let descriptor = ConeDescriptor::Product(factors);
        descriptor.validate()?;
        Ok(Self {
            descriptor,
            per_block: true,
        })
    }

    pub fn descriptor(&self) -> &ConeDescriptor {
        &self.descriptor
    }

    pub fn is_per_block(&self) -> bool {
        self.per_block
    }

    /// The cones whose trace-one slices multiply to this space.
    pub fn factors(&self) -> Vec<&ConeDescriptor> {
        match (&self.descriptor, self.per_block) {
            (ConeDescriptor::Product(parts), true) => parts.iter().collect(),
            (d, _) => vec![d],
        }
    }

    /// `sum over factors of ln(rank)`: the range of the entropy over the space.
    pub fn log_rank(&self) -> f64 {
        self.factors()
            .iter()
            .map(|f| (f.rank() as f64).ln())
            .sum()
    }

    fn split<'a>(&self, x: &'a EjaElement) -> Vec<&'a EjaElement> {
        if self.per_block {
            x.blocks().expect("per-block space over a product").iter().collect()
        } else {
            vec![x]
        }
    }

    fn assemble(&self, mut parts: Vec<EjaElement>) -> EjaElement {
        if self.per_block {
            EjaElement::product(parts).expect("nonempty factor list")
        } else {
            parts.pop().expect("one factor")
        }
    }

    pub(crate) fn check(&self, x: &EjaElement) -> Result<()> {
        if x.has_descriptor(&self.descriptor) {
            Ok(())
        } else {
            Err(mismatch(&self.descriptor, x.descriptor()))
        }
    }

    /// The entropy minimizer: `e_i / rank_i` on every factor.
    pub fn uniform(&self) -> SimplexPoint {
        let parts = self
            .factors()
            .into_iter()
            .map(|f| EjaElement::identity(f).scale(1.0 / f.rank() as f64))
            .collect();
        SimplexPoint {
            element: self.assemble(parts),
        }
    }

    /// `exp(w) / tr(exp(w))`, factor by factor, shifted by `lambda_max(w)`
    /// before exponentiation.
    pub fn exp_normalize(&self, w: &EjaElement) -> Result<SimplexPoint> {
        self.check(w)?;
        if !w.is_finite() {
            return Err(Error::NonFinite("exp_normalize input"));
        }
        let parts = self.split(w).into_iter().map(exp_normalize_factor).collect();
        Ok(SimplexPoint {
            element: self.assemble(parts),
        })
    }

    /// `max_{y in space} <c, y>` together with a maximizing vertex. On each
    /// factor this is the largest eigenvalue and its primitive idempotent;
    /// ties go to the first maximal eigenvalue in decomposition order.
    pub fn support_max(&self, c: &EjaElement) -> Result<Support> {
        self.check(c)?;
        let mut value = 0.0;
        let mut parts = Vec::new();
        for block in self.split(c) {
            let sd = block.spectral_decompose();
            let (k, lmax) = sd
                .eigenvalues
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, l)| {
                    if l > best.1 {
                        (i, l)
                    } else {
                        best
                    }
                });
            value += lmax;
            parts.push(sd.frame[k].clone());
        }
        Ok(Support {
            value,
            argmax: SimplexPoint {
                element: self.assemble(parts),
            },
        })
    }

    /// Support value only.
    pub fn support_value(&self, c: &EjaElement) -> Result<f64> {
        self.check(c)?;
        Ok(self.split(c).into_iter().map(|b| b.lambda_max()).sum())
    }

    pub fn contains(&self, x: &EjaElement, tol: f64) -> bool {
        x.has_descriptor(&self.descriptor)
            && self
                .split(x)
                .into_iter()
                .all(|b| (b.trace() - 1.0).abs() <= tol && b.in_cone(tol))
    }

    /// Validates membership with [`SIMPLEX_TOL`].
    pub fn point(&self, x: EjaElement) -> Result<SimplexPoint> {
        self.check(&x)?;
        if !self.contains(&x, SIMPLEX_TOL) {
            let traces: Vec<f64> = self.split(&x).iter().map(|b| b.trace()).collect();
            return Err(Error::NotInSimplex(format!(
                "traces {traces:?}, lambda_min {}",
                x.lambda_min()
            )));
        }
        Ok(SimplexPoint { element: x })
    }

    /// Interior point `exp_normalize(g)` with `g` a standard Gaussian element.
    pub fn random_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> SimplexPoint {
        let g = EjaElement::gaussian(&self.descriptor, rng);
        self.exp_normalize(&g).expect("gaussian element is finite")
    }

    /// Random point of the space that may lie on the boundary: a random
    /// convex combination of a few vertices and an interior point.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> SimplexPoint {
        let mut acc = self.random_interior(rng).into_element();
        let mut weight = 1.0;
        for _ in 0..3 {
            let g = EjaElement::gaussian(&self.descriptor, rng);
            let vertex = self.support_max(&g).expect("same descriptor").argmax;
            let w: f64 = rng.random_range(0.0..2.0);
            acc.add_scaled_unchecked(w, &vertex);
            weight += w;
        }
        SimplexPoint {
            element: acc.scale(1.0 / weight),
        }
    }
}

fn exp_normalize_factor(w: &EjaElement) -> EjaElement {
    let spectrum = Spectrum::of(w, &NumericPolicy::default());
    let lmax = spectrum
        .eigenvalues()
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let e = spectrum.apply(&|l| (l - lmax).exp());
    let tr = e.trace();
    e.scale(1.0 / tr)
}

impl SimplexPoint {
    pub fn as_element(&self) -> &EjaElement {
        &self.element
    }

    pub fn into_element(self) -> EjaElement {
        self.element
    }

    /// Wraps a value already known to lie in the space (e.g. an average of
    /// points of the space).
    pub(crate) fn new_unchecked(element: EjaElement) -> Self {
        Self { element }
    }
}

impl Deref for SimplexPoint {
    type Target = EjaElement;

    fn deref(&self) -> &EjaElement {
        &self.element
    }
}

impl AsRef<EjaElement> for SimplexPoint {
    fn as_ref(&self) -> &EjaElement {
        &self.element
    }
}

/// Center of the trace-one slice of `desc`: `e / rank`.
pub fn uniform_point(desc: &ConeDescriptor) -> SimplexPoint {
    SimplexPoint {
        element: EjaElement::identity(desc).scale(1.0 / desc.rank() as f64),
    }
}

/// `exp(w) / tr(exp(w))` onto the trace-one slice of `w`'s own cone.
pub fn exp_normalize(w: &EjaElement) -> Result<SimplexPoint> {
    if !w.is_finite() {
        return Err(Error::NonFinite("exp_normalize input"));
    }
    Ok(SimplexPoint {
        element: exp_normalize_factor(w),
    })
}

/// `lambda_max(c)` and a primitive idempotent attaining it.
pub fn support_max(c: &EjaElement) -> Support {
    StrategySpace {
        descriptor: c.descriptor(),
        per_block: false,
    }
    .support_max(c)
    .expect("descriptor taken from c")
}

/// Negative entropy `tr(x ∘ ln x) = sum lambda_i ln lambda_i` on the interior.
pub fn entropy(x: &EjaElement) -> Result<f64> {
    entropy_with(x, BoundaryPolicy::Reject)
}

pub fn entropy_with(x: &EjaElement, policy: BoundaryPolicy) -> Result<f64> {
    let mut sum = 0.0;
    for l in x.eigenvalues() {
        sum += xlogx(l, policy)?;
    }
    Ok(sum)
}

fn xlogx(l: f64, policy: BoundaryPolicy) -> Result<f64> {
    if l > 0.0 && (policy == BoundaryPolicy::Reject || l >= 1e-300) {
        return Ok(l * l.ln());
    }
    if policy == BoundaryPolicy::ZeroLogZero && (0.0..1e-300).contains(&l) {
        return Ok(0.0);
    }
    Err(Error::Domain {
        function: "entropy",
        eigenvalue: l,
    })
}

/// Bregman divergence of the negative entropy,
/// `tr(x ∘ ln x - x ∘ ln y + y - x)`, for interior `x` and `y`.
pub fn bregman(x: &EjaElement, y: &EjaElement) -> Result<f64> {
    x.check_same(y)?;
    let phi_x = entropy(x)?;
    let ln_y = y.ln()?;
    Ok(phi_x - x.inner_unchecked(&ln_y) + y.trace() - x.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eja::{BlockRef, ScalarFn};
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spaces() -> Vec<StrategySpace> {
        vec![
            StrategySpace::simplex(ConeDescriptor::orthant(5)).unwrap(),
            StrategySpace::simplex(ConeDescriptor::spin(6)).unwrap(),
            StrategySpace::simplex(ConeDescriptor::sym(4)).unwrap(),
            StrategySpace::simplex(ConeDescriptor::product(vec![
                ConeDescriptor::orthant(3),
                ConeDescriptor::spin(4),
                ConeDescriptor::sym(2),
            ]))
            .unwrap(),
            StrategySpace::product_of_simplices(vec![
                ConeDescriptor::spin(3),
                ConeDescriptor::spin(3),
                ConeDescriptor::orthant(2),
            ])
            .unwrap(),
        ]
    }

    #[test]
    fn uniform_points() {
        let u = uniform_point(&ConeDescriptor::orthant(4));
        assert_eq!(*u, EjaElement::orthant(vec![0.25; 4]).unwrap());
        let u = uniform_point(&ConeDescriptor::spin(5));
        assert_eq!(*u, EjaElement::spin(0.5, vec![0.0; 4]).unwrap());
        let u = uniform_point(&ConeDescriptor::sym(3));
        assert_eq!(
            *u,
            EjaElement::sym(DMatrix::identity(3, 3) / 3.0).unwrap()
        );
        for s in spaces() {
            assert!(s.contains(&s.uniform(), 1e-12));
        }
    }

    #[test]
    fn entropy_examples() {
        for r in [2usize, 3, 7] {
            let u = uniform_point(&ConeDescriptor::sym(r));
            assert!((entropy(&u).unwrap() + (r as f64).ln()).abs() < 1e-14);
        }
        let d = 1e-12;
        let x = EjaElement::orthant(vec![1.0 - 2.0 * d, d, d]).unwrap();
        assert!(entropy(&x).unwrap().abs() < 1e-10);

        let x = EjaElement::spin(0.5, vec![0.25, 0.0]).unwrap();
        let expected = 0.75 * 0.75f64.ln() + 0.25 * 0.25f64.ln();
        assert!((entropy(&x).unwrap() - expected).abs() < 1e-15);
        assert!((expected + 0.5623351446188083).abs() < 1e-12);
    }

    #[test]
    fn entropy_boundary_policy() {
        let x = EjaElement::orthant(vec![1.0, 0.0]).unwrap();
        assert!(matches!(entropy(&x), Err(Error::Domain { .. })));
        assert_eq!(entropy_with(&x, BoundaryPolicy::ZeroLogZero).unwrap(), 0.0);
        let neg = EjaElement::orthant(vec![1.1, -0.1]).unwrap();
        assert!(entropy_with(&neg, BoundaryPolicy::ZeroLogZero).is_err());
    }

    #[test]
    fn bregman_examples() {
        let x = EjaElement::orthant(vec![0.5, 0.5]).unwrap();
        let y = EjaElement::orthant(vec![0.25, 0.75]).unwrap();
        // scalar KL divergence
        let kl = 0.5 * (0.5f64 / 0.25).ln() + 0.5 * (0.5f64 / 0.75).ln();
        assert!((bregman(&x, &y).unwrap() - kl).abs() < 1e-15);
        assert!((kl - 0.14384103622589045).abs() < 1e-12);
        assert!(bregman(&x, &x).unwrap().abs() < 1e-15);

        let boundary = EjaElement::orthant(vec![1.0, 0.0]).unwrap();
        assert!(bregman(&x, &boundary).is_err());
    }

    #[test]
    fn strong_convexity_spot_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for s in spaces().into_iter().take(4) {
            for _ in 0..100 {
                let x = s.random_interior(&mut rng);
                let y = s.random_interior(&mut rng);
                let d = bregman(&x, &y).unwrap();
                let n = (&*x - &*y).trace_norm();
                assert!(d - 0.5 * n * n >= -1e-9, "{:?}", s.descriptor());
            }
        }
    }

    #[test]
    fn exp_normalize_examples() {
        for s in spaces() {
            let w = EjaElement::zero(s.descriptor());
            assert!((&*s.exp_normalize(&w).unwrap() - &*s.uniform()).norm() < 1e-15);
        }
        let w = EjaElement::orthant(vec![1.0f64.ln(), 3.0f64.ln()]).unwrap();
        let x = exp_normalize(&w).unwrap();
        let BlockRef::Orthant(v) = x.view() else { panic!() };
        assert!((v[0] - 0.25).abs() < 1e-15 && (v[1] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn exp_normalize_is_shift_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for s in spaces() {
            for _ in 0..20 {
                let w = EjaElement::gaussian(s.descriptor(), &mut rng);
                let shifted = &w + &EjaElement::identity(s.descriptor()).scale(17.0);
                let a = s.exp_normalize(&w).unwrap();
                let b = s.exp_normalize(&shifted).unwrap();
                assert!((&*a - &*b).spectral_norm() < 1e-12);
                assert!(s.contains(&a, 1e-12));
                assert!(a.lambda_min() > 0.0);
            }
        }
    }

    #[test]
    fn exp_normalize_survives_large_weights() {
        let s = StrategySpace::simplex(ConeDescriptor::sym(3)).unwrap();
        let w = EjaElement::sym(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![5000.0, 4999.0, -3000.0]))).unwrap();
        let x = s.exp_normalize(&w).unwrap();
        assert!(x.is_finite());
        assert!(s.contains(&x, 1e-12));
        let bad = EjaElement::orthant(vec![f64::NAN, 1.0]).unwrap();
        assert!(exp_normalize(&bad).is_err());
    }

    #[test]
    fn support_examples() {
        let c = EjaElement::orthant(vec![1.0, 3.0, 2.0]).unwrap();
        let s = support_max(&c);
        assert_eq!(s.value, 3.0);
        assert_eq!(*s.argmax, EjaElement::orthant(vec![0.0, 1.0, 0.0]).unwrap());

        let c = EjaElement::spin(1.0, vec![0.5, 0.0]).unwrap();
        let s = support_max(&c);
        assert!((s.value - 1.5).abs() < 1e-15);
        assert_eq!(*s.argmax, EjaElement::spin(0.5, vec![0.5, 0.0]).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for space in spaces() {
            for _ in 0..20 {
                let c = EjaElement::gaussian(space.descriptor(), &mut rng);
                let sup = space.support_max(&c).unwrap();
                assert!((c.inner(&sup.argmax).unwrap() - sup.value).abs() < 1e-10);
                assert!(space.contains(&sup.argmax, 1e-10));
                for _ in 0..10 {
                    let y = space.random_point(&mut rng);
                    assert!(space.contains(&y, 1e-9));
                    assert!(sup.value >= c.inner(&y).unwrap() - 1e-12);
                }
            }
        }
    }

    #[test]
    fn per_block_geometry() {
        let s = StrategySpace::product_of_simplices(vec![
            ConeDescriptor::spin(3),
            ConeDescriptor::orthant(3),
        ])
        .unwrap();
        assert!((s.log_rank() - (2f64.ln() + 3f64.ln())).abs() < 1e-15);
        let u = s.uniform();
        let blocks = u.blocks().unwrap();
        assert_eq!(blocks[0].trace(), 1.0);
        assert!((blocks[1].trace() - 1.0).abs() < 1e-15);

        // the joint simplex of the same cone is a different set
        let joint = StrategySpace::simplex(s.descriptor().clone()).unwrap();
        assert!(!joint.contains(&u, 1e-9));
        let c = EjaElement::product(vec![
            EjaElement::spin(0.0, vec![1.0, 0.0]).unwrap(),
            EjaElement::orthant(vec![0.0, 2.0, 0.0]).unwrap(),
        ])
        .unwrap();
        assert!((s.support_value(&c).unwrap() - 3.0).abs() < 1e-15);
        assert!((joint.support_value(&c).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_range_on_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for s in spaces().into_iter().take(4) {
            let r = s.descriptor().rank() as f64;
            for _ in 0..50 {
                let x = s.random_interior(&mut rng);
                let h = entropy(&x).unwrap();
                assert!(h >= -r.ln() - 1e-12 && h <= 1e-12);
            }
        }
    }

    #[test]
    fn ln_of_exp_normalize_is_shifted_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let s = StrategySpace::simplex(ConeDescriptor::sym(3)).unwrap();
        let w = EjaElement::gaussian(s.descriptor(), &mut rng);
        let x = s.exp_normalize(&w).unwrap();
        let l = x.lowner_apply(ScalarFn::Ln).unwrap();
        // ln x = w - c e for the scalar c = ln tr exp(w)
        let diff = &l - &w;
        let ev = diff.eigenvalues();
        let spread = ev.iter().cloned().fold(f64::MIN, f64::max) - ev.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-12);
    }
}
