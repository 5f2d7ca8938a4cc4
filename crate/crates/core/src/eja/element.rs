use std::ops::{Add, Neg, Sub};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::ConeDescriptor;
use crate::error::{mismatch, Error, Result};

/// An element of a Euclidean Jordan algebra, stored blockwise.
///
/// Symmetric-matrix blocks are symmetrized when constructed, so every
/// `EjaElement` is a valid member of the algebra named by [`descriptor`].
///
/// [`descriptor`]: EjaElement::descriptor
#[derive(Clone, Debug, PartialEq)]
pub struct EjaElement {
    kind: Kind,
}

#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Orthant(Vec<f64>),
    Spin { s: f64, v: Vec<f64> },
    Sym(DMatrix<f64>),
    Product(Vec<EjaElement>),
}

/// Borrowed view of one block, for callers that need the raw payload.
#[derive(Clone, Copy, Debug)]
pub enum BlockRef<'a> {
    Orthant(&'a [f64]),
    Spin { s: f64, v: &'a [f64] },
    Sym(&'a DMatrix<f64>),
    Product(&'a [EjaElement]),
}

impl EjaElement {
    pub fn orthant(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDescriptor("orthant(0)".into()));
        }
        Ok(Self {
            kind: Kind::Orthant(values),
        })
    }

    /// Spin element `(s, v)`; `v` must be nonempty.
    pub fn spin(s: f64, v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidDescriptor("spin(1)".into()));
        }
        Ok(Self {
            kind: Kind::Spin { s, v },
        })
    }

    /// Symmetric-matrix element; the input is replaced by `(M + M^T) / 2`.
    pub fn sym(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidDescriptor(format!(
                "sym block must be square and nonempty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(Self {
            kind: Kind::Sym(sym),
        })
    }

    pub fn product(blocks: Vec<EjaElement>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidDescriptor("product of zero cones".into()));
        }
        Ok(Self {
            kind: Kind::Product(blocks),
        })
    }

    pub fn zero(desc: &ConeDescriptor) -> Self {
        Self::filled(desc, 0.0)
    }

    /// The unit element `e`.
    pub fn identity(desc: &ConeDescriptor) -> Self {
        Self::filled(desc, 1.0)
    }

    // `fill` times the identity
    fn filled(desc: &ConeDescriptor, fill: f64) -> Self {
        let kind = match desc {
            ConeDescriptor::Orthant(n) => Kind::Orthant(vec![fill; *n]),
            ConeDescriptor::Spin(n) => Kind::Spin {
                s: fill,
                v: vec![0.0; n.saturating_sub(1)],
            },
            ConeDescriptor::Sym(n) => Kind::Sym(DMatrix::identity(*n, *n) * fill),
            ConeDescriptor::Product(parts) => {
                Kind::Product(parts.iter().map(|p| Self::filled(p, fill)).collect())
            }
        };
        Self { kind }
    }

    /// Element with i.i.d. standard normal coordinates (sym blocks are the
    /// symmetric part of a Gaussian matrix).
    pub fn gaussian<R: Rng + ?Sized>(desc: &ConeDescriptor, rng: &mut R) -> Self {
        let mut normal = || rng.sample::<f64, _>(StandardNormal);
        Self::gaussian_with(desc, &mut normal)
    }

    fn gaussian_with(desc: &ConeDescriptor, normal: &mut dyn FnMut() -> f64) -> Self {
        let kind = match desc {
            ConeDescriptor::Orthant(n) => Kind::Orthant((0..*n).map(|_| normal()).collect()),
            ConeDescriptor::Spin(n) => Kind::Spin {
                s: normal(),
                v: (1..*n).map(|_| normal()).collect(),
            },
            ConeDescriptor::Sym(n) => {
                let g = DMatrix::from_fn(*n, *n, |_, _| normal());
                Kind::Sym((&g + g.transpose()) * 0.5)
            }
            ConeDescriptor::Product(parts) => Kind::Product(
                parts
                    .iter()
                    .map(|p| Self::gaussian_with(p, normal))
                    .collect(),
            ),
        };
        Self { kind }
    }

    pub fn view(&self) -> BlockRef<'_> {
        match &self.kind {
            Kind::Orthant(x) => BlockRef::Orthant(x),
            Kind::Spin { s, v } => BlockRef::Spin { s: *s, v },
            Kind::Sym(m) => BlockRef::Sym(m),
            Kind::Product(b) => BlockRef::Product(b),
        }
    }

    /// Component blocks of a product element, `None` otherwise.
    pub fn blocks(&self) -> Option<&[EjaElement]> {
        match &self.kind {
            Kind::Product(b) => Some(b),
            _ => None,
        }
    }

    pub fn into_blocks(self) -> Option<Vec<EjaElement>> {
        match self.kind {
            Kind::Product(b) => Some(b),
            _ => None,
        }
    }

    pub fn descriptor(&self) -> ConeDescriptor {
        match &self.kind {
            Kind::Orthant(x) => ConeDescriptor::Orthant(x.len()),
            Kind::Spin { v, .. } => ConeDescriptor::Spin(v.len() + 1),
            Kind::Sym(m) => ConeDescriptor::Sym(m.nrows()),
            Kind::Product(b) => ConeDescriptor::Product(b.iter().map(|e| e.descriptor()).collect()),
        }
    }

    /// True when `self` lives in the algebra named by `desc`.
    pub fn has_descriptor(&self, desc: &ConeDescriptor) -> bool {
        match (&self.kind, desc) {
            (Kind::Orthant(x), ConeDescriptor::Orthant(n)) => x.len() == *n,
            (Kind::Spin { v, .. }, ConeDescriptor::Spin(n)) => v.len() + 1 == *n,
            (Kind::Sym(m), ConeDescriptor::Sym(n)) => m.nrows() == *n,
            (Kind::Product(b), ConeDescriptor::Product(parts)) => {
                b.len() == parts.len() && b.iter().zip(parts).all(|(e, p)| e.has_descriptor(p))
            }
            _ => false,
        }
    }

    pub fn same_algebra(&self, other: &EjaElement) -> bool {
        match (&self.kind, &other.kind) {
            (Kind::Orthant(a), Kind::Orthant(b)) => a.len() == b.len(),
            (Kind::Spin { v: a, .. }, Kind::Spin { v: b, .. }) => a.len() == b.len(),
            (Kind::Sym(a), Kind::Sym(b)) => a.nrows() == b.nrows(),
            (Kind::Product(a), Kind::Product(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_algebra(y))
            }
            _ => false,
        }
    }

    pub(crate) fn check_same(&self, other: &EjaElement) -> Result<()> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(mismatch(self.descriptor(), other.descriptor()))
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.kind {
            Kind::Orthant(x) => x.iter().all(|v| v.is_finite()),
            Kind::Spin { s, v } => s.is_finite() && v.iter().all(|v| v.is_finite()),
            Kind::Sym(m) => m.iter().all(|v| v.is_finite()),
            Kind::Product(b) => b.iter().all(|e| e.is_finite()),
        }
    }

    /// Jordan product `x ∘ y`.
    pub fn jordan_product(&self, other: &EjaElement) -> Result<EjaElement> {
        self.check_same(other)?;
        Ok(self.jordan_unchecked(other))
    }

    pub(crate) fn jordan_unchecked(&self, other: &EjaElement) -> EjaElement {
        let kind = match (&self.kind, &other.kind) {
            (Kind::Orthant(a), Kind::Orthant(b)) => {
                Kind::Orthant(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (Kind::Spin { s: s1, v: v1 }, Kind::Spin { s: s2, v: v2 }) => Kind::Spin {
                s: s1 * s2 + dot(v1, v2),
                v: v1.iter().zip(v2).map(|(a, b)| s1 * b + s2 * a).collect(),
            },
            (Kind::Sym(a), Kind::Sym(b)) => {
                let ab = a * b;
                Kind::Sym((&ab + ab.transpose()) * 0.5)
            }
            (Kind::Product(a), Kind::Product(b)) => Kind::Product(
                a.iter().zip(b).map(|(x, y)| x.jordan_unchecked(y)).collect(),
            ),
            _ => unreachable!("algebra checked by caller"),
        };
        EjaElement { kind }
    }

    /// Sum of eigenvalues.
    pub fn trace(&self) -> f64 {
        match &self.kind {
            Kind::Orthant(x) => x.iter().sum(),
            Kind::Spin { s, .. } => 2.0 * s,
            Kind::Sym(m) => m.trace(),
            Kind::Product(b) => b.iter().map(|e| e.trace()).sum(),
        }
    }

    /// Canonical inner product `tr(x ∘ y)`. On spin blocks this is twice the
    /// Euclidean dot product.
    pub fn inner(&self, other: &EjaElement) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &EjaElement) -> f64 {
        match (&self.kind, &other.kind) {
            (Kind::Orthant(a), Kind::Orthant(b)) => dot(a, b),
            (Kind::Spin { s: s1, v: v1 }, Kind::Spin { s: s2, v: v2 }) => {
                2.0 * (s1 * s2 + dot(v1, v2))
            }
            (Kind::Sym(a), Kind::Sym(b)) => a.dot(b),
            (Kind::Product(a), Kind::Product(b)) => {
                a.iter().zip(b).map(|(x, y)| x.inner_unchecked(y)).sum()
            }
            _ => unreachable!("algebra checked by caller"),
        }
    }

    /// Norm induced by the canonical inner product.
    pub fn norm(&self) -> f64 {
        self.inner_unchecked(self).sqrt()
    }

    pub fn scale(&self, c: f64) -> EjaElement {
        self.map(&|v| v * c)
    }

    pub(crate) fn map(&self, f: &dyn Fn(f64) -> f64) -> EjaElement {
        let kind = match &self.kind {
            Kind::Orthant(x) => Kind::Orthant(x.iter().map(|v| f(*v)).collect()),
            Kind::Spin { s, v } => Kind::Spin {
                s: f(*s),
                v: v.iter().map(|a| f(*a)).collect(),
            },
            Kind::Sym(m) => Kind::Sym(m.map(f)),
            Kind::Product(b) => Kind::Product(b.iter().map(|e| e.map(f)).collect()),
        };
        EjaElement { kind }
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &EjaElement) -> Result<()> {
        self.check_same(other)?;
        self.add_scaled_unchecked(alpha, other);
        Ok(())
    }

    pub(crate) fn add_scaled_unchecked(&mut self, alpha: f64, other: &EjaElement) {
        match (&mut self.kind, &other.kind) {
            (Kind::Orthant(a), Kind::Orthant(b)) => {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += alpha * y)
            }
            (Kind::Spin { s: s1, v: v1 }, Kind::Spin { s: s2, v: v2 }) => {
                *s1 += alpha * s2;
                v1.iter_mut().zip(v2).for_each(|(x, y)| *x += alpha * y);
            }
            (Kind::Sym(a), Kind::Sym(b)) => a.zip_apply(b, |x, y| *x += alpha * y),
            (Kind::Product(a), Kind::Product(b)) => a
                .iter_mut()
                .zip(b)
                .for_each(|(x, y)| x.add_scaled_unchecked(alpha, y)),
            _ => unreachable!("algebra checked by caller"),
        }
    }

    /// Coordinates in a fixed flat order: orthant entries, spin `(s, v)`,
    /// sym upper triangle row by row, products concatenated.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.push_flat(&mut out);
        out
    }

    fn push_flat(&self, out: &mut Vec<f64>) {
        match &self.kind {
            Kind::Orthant(x) => out.extend_from_slice(x),
            Kind::Spin { s, v } => {
                out.push(*s);
                out.extend_from_slice(v);
            }
            Kind::Sym(m) => {
                let n = m.nrows();
                for i in 0..n {
                    for j in i..n {
                        out.push(m[(i, j)]);
                    }
                }
            }
            Kind::Product(b) => b.iter().for_each(|e| e.push_flat(out)),
        }
    }

    /// Inverse of [`to_flat`](Self::to_flat).
    pub fn from_flat(desc: &ConeDescriptor, coords: &[f64]) -> Result<Self> {
        desc.validate()?;
        if coords.len() != desc.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{desc} has {} coordinates, got {}",
                desc.ambient_dim(),
                coords.len()
            )));
        }
        let mut pos = 0;
        Ok(Self::read_flat(desc, coords, &mut pos))
    }

    fn read_flat(desc: &ConeDescriptor, coords: &[f64], pos: &mut usize) -> Self {
        let mut take = |k: usize| {
            let s = &coords[*pos..*pos + k];
            *pos += k;
            s
        };
        let kind = match desc {
            ConeDescriptor::Orthant(n) => Kind::Orthant(take(*n).to_vec()),
            ConeDescriptor::Spin(n) => {
                let c = take(*n);
                Kind::Spin {
                    s: c[0],
                    v: c[1..].to_vec(),
                }
            }
            ConeDescriptor::Sym(n) => {
                let c = take(n * (n + 1) / 2);
                let mut m = DMatrix::zeros(*n, *n);
                let mut k = 0;
                for i in 0..*n {
                    for j in i..*n {
                        m[(i, j)] = c[k];
                        m[(j, i)] = c[k];
                        k += 1;
                    }
                }
                Kind::Sym(m)
            }
            ConeDescriptor::Product(parts) => Kind::Product(
                parts
                    .iter()
                    .map(|p| Self::read_flat(p, coords, pos))
                    .collect(),
            ),
        };
        Self { kind }
    }
}

/// Diagonal Gram weights of the canonical inner product in flat coordinates:
/// `<x, y> = sum_k w_k x_k y_k`.
pub fn flat_gram_weights(desc: &ConeDescriptor) -> Vec<f64> {
    let mut out = Vec::with_capacity(desc.ambient_dim());
    push_weights(desc, &mut out);
    out
}

fn push_weights(desc: &ConeDescriptor, out: &mut Vec<f64>) {
    match desc {
        ConeDescriptor::Orthant(n) => out.extend(std::iter::repeat_n(1.0, *n)),
        ConeDescriptor::Spin(n) => out.extend(std::iter::repeat_n(2.0, *n)),
        ConeDescriptor::Sym(n) => {
            for i in 0..*n {
                for j in i..*n {
                    out.push(if i == j { 1.0 } else { 2.0 });
                }
            }
        }
        ConeDescriptor::Product(parts) => parts.iter().for_each(|p| push_weights(p, out)),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Add for &EjaElement {
    type Output = EjaElement;

    /// Panics if the operands live in different algebras; use
    /// [`EjaElement::add_scaled`] for a checked variant.
    fn add(self, rhs: &EjaElement) -> EjaElement {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs).expect("EjaElement + EjaElement");
        out
    }
}

impl Sub for &EjaElement {
    type Output = EjaElement;

    fn sub(self, rhs: &EjaElement) -> EjaElement {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs).expect("EjaElement - EjaElement");
        out
    }
}

impl Neg for &EjaElement {
    type Output = EjaElement;

    fn neg(self) -> EjaElement {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn descriptors() -> Vec<ConeDescriptor> {
        vec![
            ConeDescriptor::orthant(4),
            ConeDescriptor::spin(5),
            ConeDescriptor::sym(3),
            ConeDescriptor::product(vec![
                ConeDescriptor::orthant(2),
                ConeDescriptor::spin(3),
                ConeDescriptor::sym(2),
            ]),
        ]
    }

    #[test]
    fn identity_elements() {
        let e = EjaElement::identity(&ConeDescriptor::orthant(3));
        assert_eq!(e, EjaElement::orthant(vec![1.0, 1.0, 1.0]).unwrap());

        let e = EjaElement::identity(&ConeDescriptor::spin(4));
        assert_eq!(e, EjaElement::spin(1.0, vec![0.0; 3]).unwrap());

        let desc = ConeDescriptor::product(vec![ConeDescriptor::orthant(2), ConeDescriptor::spin(3)]);
        let e = EjaElement::identity(&desc);
        let expected = EjaElement::product(vec![
            EjaElement::orthant(vec![1.0, 1.0]).unwrap(),
            EjaElement::spin(1.0, vec![0.0, 0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(e, expected);

        for d in descriptors() {
            assert_eq!(EjaElement::identity(&d).trace(), d.rank() as f64);
        }
    }

    #[test]
    fn jordan_product_examples() {
        let a = EjaElement::orthant(vec![1.0, 2.0]).unwrap();
        let b = EjaElement::orthant(vec![3.0, 4.0]).unwrap();
        assert_eq!(
            a.jordan_product(&b).unwrap(),
            EjaElement::orthant(vec![3.0, 8.0]).unwrap()
        );

        let e = EjaElement::identity(&ConeDescriptor::spin(3));
        let x = EjaElement::spin(0.3, vec![-1.5, 2.0]).unwrap();
        assert_eq!(e.jordan_product(&x).unwrap(), x);

        let d1 = EjaElement::sym(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]))).unwrap();
        let d2 = EjaElement::sym(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 4.0]))).unwrap();
        let expected = EjaElement::sym(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 8.0]))).unwrap();
        assert_eq!(d1.jordan_product(&d2).unwrap(), expected);
    }

    #[test]
    fn trace_and_inner_examples() {
        assert_eq!(EjaElement::identity(&ConeDescriptor::sym(4)).trace(), 4.0);
        assert_eq!(EjaElement::spin(1.0, vec![0.6, 0.8]).unwrap().trace(), 2.0);
        let x = EjaElement::spin(1.0, vec![0.0, 0.0]).unwrap();
        let y = EjaElement::spin(0.5, vec![0.25, 0.0]).unwrap();
        assert_eq!(x.inner(&y).unwrap(), 1.0);
    }

    #[test]
    fn inner_is_trace_of_jordan_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in descriptors() {
            for _ in 0..20 {
                let x = EjaElement::gaussian(&d, &mut rng);
                let y = EjaElement::gaussian(&d, &mut rng);
                let a = x.inner(&y).unwrap();
                let b = x.jordan_product(&y).unwrap().trace();
                assert!((a - b).abs() < 1e-12, "{d}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let a = EjaElement::orthant(vec![1.0, 2.0]).unwrap();
        let b = EjaElement::spin(1.0, vec![2.0]).unwrap();
        assert!(matches!(
            a.jordan_product(&b),
            Err(Error::DescriptorMismatch { .. })
        ));
        assert!(a.inner(&b).is_err());
        let c = EjaElement::orthant(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(a.inner(&c).is_err());
    }

    #[test]
    fn sym_blocks_are_symmetrized() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 3.0]);
        let x = EjaElement::sym(m).unwrap();
        let BlockRef::Sym(s) = x.view() else { panic!() };
        assert_eq!(s[(0, 1)], 1.0);
        assert_eq!(s[(1, 0)], 1.0);
    }

    #[test]
    fn gram_weights_reproduce_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in descriptors() {
            let w = flat_gram_weights(&d);
            let x = EjaElement::gaussian(&d, &mut rng);
            let y = EjaElement::gaussian(&d, &mut rng);
            let (fx, fy) = (x.to_flat(), y.to_flat());
            let flat: f64 = (0..w.len()).map(|k| w[k] * fx[k] * fy[k]).sum();
            assert!((flat - x.inner(&y).unwrap()).abs() < 1e-12);
            assert_eq!(EjaElement::from_flat(&d, &fx).unwrap(), x);
        }
    }
}
