use nalgebra::{DMatrix, DVector};

use super::jacobi::symmetric_eigen;
use super::{BlockRef, ConeDescriptor, EjaElement};
use crate::error::{Error, Result};

/// Tolerances shared by the structural checks of the algebra.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericPolicy {
    /// Idempotent, orthogonality and reconstruction checks.
    pub structural: f64,
    /// Below this norm the vector part of a spin element counts as zero.
    pub degeneracy: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self {
            structural: 1e-9,
            degeneracy: 1e-14,
        }
    }
}

/// `x = sum_i eigenvalues[i] * frame[i]` over a Jordan frame.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub frame: Vec<EjaElement>,
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> EjaElement {
        let mut out = self.frame[0].scale(self.eigenvalues[0]);
        for (l, q) in self.eigenvalues.iter().zip(&self.frame).skip(1) {
            out.add_scaled_unchecked(*l, q);
        }
        out
    }
}

/// Compact per-block spectrum; Löwner maps are evaluated from this without
/// materializing the frame.
#[derive(Clone, Debug)]
pub(crate) enum Spectrum {
    Orthant(Vec<f64>),
    Spin { hi: f64, lo: f64, dir: Vec<f64> },
    Sym { values: Vec<f64>, vectors: DMatrix<f64> },
    Product(Vec<Spectrum>),
}

impl Spectrum {
    pub(crate) fn of(x: &EjaElement, policy: &NumericPolicy) -> Self {
        match x.view() {
            BlockRef::Orthant(v) => Spectrum::Orthant(v.to_vec()),
            BlockRef::Spin { s, v } => {
                let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                let dir = if norm < policy.degeneracy {
                    let mut d = vec![0.0; v.len()];
                    d[0] = 1.0;
                    d
                } else {
                    v.iter().map(|a| a / norm).collect()
                };
                Spectrum::Spin {
                    hi: s + norm,
                    lo: s - norm,
                    dir,
                }
            }
            BlockRef::Sym(m) => {
                let (values, vectors) = symmetric_eigen(m);
                Spectrum::Sym { values, vectors }
            }
            BlockRef::Product(blocks) => {
                Spectrum::Product(blocks.iter().map(|b| Spectrum::of(b, policy)).collect())
            }
        }
    }

    fn descriptor(&self) -> ConeDescriptor {
        match self {
            Spectrum::Orthant(v) => ConeDescriptor::Orthant(v.len()),
            Spectrum::Spin { dir, .. } => ConeDescriptor::Spin(dir.len() + 1),
            Spectrum::Sym { values, .. } => ConeDescriptor::Sym(values.len()),
            Spectrum::Product(parts) => {
                ConeDescriptor::Product(parts.iter().map(|p| p.descriptor()).collect())
            }
        }
    }

    pub(crate) fn eigenvalues(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.push_eigenvalues(&mut out);
        out
    }

    fn push_eigenvalues(&self, out: &mut Vec<f64>) {
        match self {
            Spectrum::Orthant(v) => out.extend_from_slice(v),
            Spectrum::Spin { hi, lo, .. } => out.extend([*hi, *lo]),
            Spectrum::Sym { values, .. } => out.extend_from_slice(values),
            Spectrum::Product(parts) => parts.iter().for_each(|p| p.push_eigenvalues(out)),
        }
    }

    /// `sum_i f(lambda_i) q_i`.
    pub(crate) fn apply(&self, f: &dyn Fn(f64) -> f64) -> EjaElement {
        match self {
            Spectrum::Orthant(v) => EjaElement::orthant(v.iter().map(|l| f(*l)).collect()).unwrap(),
            Spectrum::Spin { hi, lo, dir } => {
                let (fh, fl) = (f(*hi), f(*lo));
                let half_diff = 0.5 * (fh - fl);
                EjaElement::spin(0.5 * (fh + fl), dir.iter().map(|d| half_diff * d).collect())
                    .unwrap()
            }
            Spectrum::Sym { values, vectors } => {
                let fv = DVector::from_iterator(values.len(), values.iter().map(|l| f(*l)));
                let scaled = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |r, c| {
                    vectors[(r, c)] * fv[c]
                });
                EjaElement::sym(scaled * vectors.transpose()).unwrap()
            }
            Spectrum::Product(parts) => {
                EjaElement::product(parts.iter().map(|p| p.apply(f)).collect()).unwrap()
            }
        }
    }

    pub(crate) fn frame(&self) -> Vec<EjaElement> {
        match self {
            Spectrum::Orthant(v) => (0..v.len())
                .map(|i| {
                    let mut e = vec![0.0; v.len()];
                    e[i] = 1.0;
                    EjaElement::orthant(e).unwrap()
                })
                .collect(),
            Spectrum::Spin { dir, .. } => [1.0, -1.0]
                .iter()
                .map(|sign| {
                    EjaElement::spin(0.5, dir.iter().map(|d| 0.5 * sign * d).collect()).unwrap()
                })
                .collect(),
            Spectrum::Sym { vectors, .. } => (0..vectors.ncols())
                .map(|k| {
                    let col = vectors.column(k);
                    EjaElement::sym(col * col.transpose()).unwrap()
                })
                .collect(),
            Spectrum::Product(parts) => {
                let zeros: Vec<EjaElement> = parts
                    .iter()
                    .map(|p| EjaElement::zero(&p.descriptor()))
                    .collect();
                let mut out = Vec::new();
                for (i, part) in parts.iter().enumerate() {
                    for q in part.frame() {
                        let mut blocks = zeros.clone();
                        blocks[i] = q;
                        out.push(EjaElement::product(blocks).unwrap());
                    }
                }
                out
            }
        }
    }
}

/// Scalar functions that can be lifted to the algebra through the spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarFn {
    Exp,
    Ln,
    Abs,
    Pow(f64),
}

impl EjaElement {
    pub fn spectral_decompose(&self) -> SpectralDecomposition {
        self.spectral_decompose_with(&NumericPolicy::default())
    }

    pub fn spectral_decompose_with(&self, policy: &NumericPolicy) -> SpectralDecomposition {
        let spectrum = Spectrum::of(self, policy);
        SpectralDecomposition {
            eigenvalues: spectrum.eigenvalues(),
            frame: spectrum.frame(),
        }
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        Spectrum::of(self, &NumericPolicy::default()).eigenvalues()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Löwner extension `sum_i f(lambda_i) q_i`.
    pub fn lowner_apply(&self, f: ScalarFn) -> Result<EjaElement> {
        let spectrum = Spectrum::of(self, &NumericPolicy::default());
        for l in spectrum.eigenvalues() {
            check_domain(f, l)?;
        }
        Ok(match f {
            ScalarFn::Exp => spectrum.apply(&f64::exp),
            ScalarFn::Ln => spectrum.apply(&f64::ln),
            ScalarFn::Abs => spectrum.apply(&f64::abs),
            ScalarFn::Pow(a) => spectrum.apply(&|l| l.powf(a)),
        })
    }

    pub fn exp(&self) -> EjaElement {
        Spectrum::of(self, &NumericPolicy::default()).apply(&f64::exp)
    }

    pub fn ln(&self) -> Result<EjaElement> {
        self.lowner_apply(ScalarFn::Ln)
    }

    /// `(sum |lambda_i|^p)^(1/p)`, or `max |lambda_i|` for `p = inf`.
    pub fn trace_p_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidNormExponent(p));
        }
        let ev = self.eigenvalues();
        Ok(if p.is_infinite() {
            ev.iter().fold(0.0, |m, l| m.max(l.abs()))
        } else if p == 1.0 {
            ev.iter().map(|l| l.abs()).sum()
        } else {
            ev.iter().map(|l| l.abs().powf(p)).sum::<f64>().powf(1.0 / p)
        })
    }

    /// Trace-1 norm (sum of absolute eigenvalues).
    pub fn trace_norm(&self) -> f64 {
        self.eigenvalues().iter().map(|l| l.abs()).sum()
    }

    /// Trace-infinity norm (largest absolute eigenvalue).
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// Cone membership: `lambda_min >= -tol`.
    pub fn in_cone(&self, tol: f64) -> bool {
        self.lambda_min() >= -tol
    }
}

fn check_domain(f: ScalarFn, l: f64) -> Result<()> {
    let bad = match f {
        ScalarFn::Ln => l <= 0.0,
        ScalarFn::Pow(a) if a.fract() != 0.0 => l <= 0.0,
        ScalarFn::Pow(a) if a < 0.0 => l == 0.0,
        _ => false,
    };
    if bad || l.is_nan() {
        let function = match f {
            ScalarFn::Exp => "exp",
            ScalarFn::Ln => "ln",
            ScalarFn::Abs => "abs",
            ScalarFn::Pow(_) => "pow",
        };
        return Err(Error::Domain {
            function,
            eigenvalue: l,
        });
    }
    Ok(())
}

/// Checks the Jordan-frame axioms for `frame` in the algebra of `like`.
pub fn check_frame(frame: &[EjaElement], like: &EjaElement, tol: f64) -> Result<()> {
    let desc = like.descriptor();
    if frame.len() != desc.rank() {
        return Err(Error::InvalidFrame(format!(
            "{} elements for a rank-{} algebra",
            frame.len(),
            desc.rank()
        )));
    }
    let mut sum = EjaElement::zero(&desc);
    for (i, q) in frame.iter().enumerate() {
        q.check_same(like)?;
        let sq = q.jordan_unchecked(q);
        if (&sq - q).spectral_norm() > tol {
            return Err(Error::InvalidFrame(format!("element {i} is not idempotent")));
        }
        if (q.trace() - 1.0).abs() > tol {
            return Err(Error::InvalidFrame(format!(
                "element {i} has trace {}",
                q.trace()
            )));
        }
        for (j, p) in frame.iter().enumerate().skip(i + 1) {
            if q.jordan_unchecked(p).spectral_norm() > tol {
                return Err(Error::InvalidFrame(format!("elements {i} and {j} not orthogonal")));
            }
        }
        sum.add_scaled_unchecked(1.0, q);
    }
    if (&sum - &EjaElement::identity(&desc)).spectral_norm() > tol {
        return Err(Error::InvalidFrame("elements do not sum to the identity".into()));
    }
    Ok(())
}

/// Diagonal map `z -> sum_i <z, q_i> q_i` over the unit-normalized frame.
pub fn diagonal_map(z: &EjaElement, frame: &[EjaElement]) -> Result<EjaElement> {
    diagonal_map_with(z, frame, &NumericPolicy::default())
}

pub fn diagonal_map_with(
    z: &EjaElement,
    frame: &[EjaElement],
    policy: &NumericPolicy,
) -> Result<EjaElement> {
    check_frame(frame, z, policy.structural)?;
    let mut out = EjaElement::zero(&z.descriptor());
    for q in frame {
        let unit = q.scale(1.0 / q.norm());
        out.add_scaled_unchecked(z.inner_unchecked(&unit), &unit);
    }
    Ok(out)
}
