//! Metric learning as a simplex–spectraplex game: the min player weights
//! dissimilar pairs, the max player picks a trace-one PSD metric, and the
//! payoff is `<sum_t x_t W_t, Y>` with `W_t` the pair scatter whitened by the
//! similar-pair scatter.

use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::eja::{symmetric_eigen, BlockRef, ConeDescriptor, EjaElement};
use crate::entropy::StrategySpace;
use crate::error::{Error, Result};
use crate::games::{BilinearZeroSumGame, LinearMap};

/// Smallest eigenvalue the similar-pair scatter is lifted to before its
/// inverse square root is taken.
pub const MIN_EIGENVALUE: f64 = 1e-8;

/// Points with labels and the sampled similar / dissimilar index pairs.
#[derive(Clone, Debug)]
pub struct MetricLearningInstance {
    pub points: Vec<DVector<f64>>,
    pub similar: Vec<(usize, usize)>,
    pub dissimilar: Vec<(usize, usize)>,
}

/// Feature rows with one label each.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<String>,
}

/// `(M + ridge I)^(-1/2)` through an eigendecomposition.
pub fn inverse_sqrt_psd(m: &DMatrix<f64>, ridge: f64) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::InvalidParameter(format!("ridge must be nonnegative, got {ridge}")));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix entries"));
    }
    let (values, vectors) = symmetric_eigen(m);
    let mut scaled = vectors.clone();
    for (k, lambda) in values.iter().enumerate() {
        let l = lambda + ridge;
        if l <= 0.0 {
            return Err(Error::Domain {
                function: "inverse square root",
                eigenvalue: l,
            });
        }
        scaled.column_mut(k).scale_mut(l.powf(-0.5));
    }
    let out = &scaled * vectors.transpose();
    Ok((&out + out.transpose()) * 0.5)
}

/// The ridge that lifts the smallest eigenvalue of `m` to [`MIN_EIGENVALUE`].
pub fn ridge_for(m: &DMatrix<f64>) -> f64 {
    let (values, _) = symmetric_eigen(m);
    let lmin = values.last().copied().unwrap_or(0.0);
    (MIN_EIGENVALUE - lmin).max(0.0)
}

impl MetricLearningInstance {
    pub fn new(points: Vec<DVector<f64>>, similar: Vec<(usize, usize)>, dissimilar: Vec<(usize, usize)>) -> Result<Self> {
        let d = points.first().map(|p| p.len()).unwrap_or(0);
        if d == 0 || points.iter().any(|p| p.len() != d) {
            return Err(Error::DimensionMismatch("points must share a positive dimension".into()));
        }
        if similar.is_empty() || dissimilar.is_empty() {
            return Err(Error::InvalidParameter("both pair sets must be nonempty".into()));
        }
        let n = points.len();
        if similar.iter().chain(&dissimilar).any(|&(i, j)| i >= n || j >= n) {
            return Err(Error::InvalidParameter(format!("pair index out of range for {n} points")));
        }
        Ok(Self {
            points,
            similar,
            dissimilar,
        })
    }

    /// Samples pairs of a dataset: similar pairs share a label, dissimilar
    /// pairs do not. Pairs are drawn with replacement among `i != j`.
    pub fn sample<R: Rng + ?Sized>(
        data: &LabeledDataset,
        n_similar: usize,
        n_dissimilar: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let n = data.features.len();
        let mut same = Vec::new();
        let mut different = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if data.labels[i] == data.labels[j] {
                    same.push((i, j));
                } else {
                    different.push((i, j));
                }
            }
        }
        if same.is_empty() || different.is_empty() {
            return Err(Error::Dataset(
                "need at least one same-label and one different-label pair".into(),
            ));
        }
        let draw = |pool: &[(usize, usize)], k: usize, rng: &mut R| -> Vec<(usize, usize)> {
            (0..k).map(|_| pool[rng.random_range(0..pool.len())]).collect()
        };
        let similar = draw(&same, n_similar, rng);
        let dissimilar = draw(&different, n_dissimilar, rng);
        let points = data
            .features
            .iter()
            .map(|f| DVector::from_column_slice(f))
            .collect();
        Self::new(points, similar, dissimilar)
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    fn scatter(&self, (i, j): (usize, usize)) -> DMatrix<f64> {
        let diff = &self.points[i] - &self.points[j];
        &diff * diff.transpose()
    }

    /// Sum of the similar-pair scatters.
    pub fn similar_scatter(&self) -> DMatrix<f64> {
        let d = self.dim();
        self.similar
            .iter()
            .fold(DMatrix::zeros(d, d), |acc, &p| acc + self.scatter(p))
    }

    /// Whitened dissimilar-pair scatters and the ridge that was applied.
    pub fn whitened(&self) -> Result<(Vec<DMatrix<f64>>, f64)> {
        let s = self.similar_scatter();
        let ridge = ridge_for(&s);
        let w = inverse_sqrt_psd(&s, ridge)?;
        let mats = self
            .dissimilar
            .iter()
            .map(|&p| {
                let m = &w * self.scatter(p) * &w;
                (&m + m.transpose()) * 0.5
            })
            .collect();
        Ok((mats, ridge))
    }
}

/// `x -> sum_t x_t W_t` from the orthant to the symmetric matrices.
#[derive(Clone, Debug)]
pub struct WeightedSum {
    domain: ConeDescriptor,
    codomain: ConeDescriptor,
    mats: Vec<DMatrix<f64>>,
}

impl LinearMap for WeightedSum {
    fn domain(&self) -> &ConeDescriptor {
        &self.domain
    }

    fn codomain(&self) -> &ConeDescriptor {
        &self.codomain
    }

    fn apply(&self, x: &EjaElement) -> EjaElement {
        let BlockRef::Orthant(w) = x.view() else {
            unreachable!("domain is an orthant")
        };
        let d = self.mats[0].nrows();
        let sum = w
            .iter()
            .zip(&self.mats)
            .fold(DMatrix::zeros(d, d), |acc, (wi, m)| acc + m * *wi);
        EjaElement::sym(sum).expect("finite symmetric sum")
    }

    fn adjoint(&self, y: &EjaElement) -> EjaElement {
        let BlockRef::Sym(ym) = y.view() else {
            unreachable!("codomain is sym")
        };
        EjaElement::orthant(self.mats.iter().map(|m| m.dot(ym)).collect()).expect("finite pairings")
    }
}

/// The game over `orthant(D) x sym(d)` for given symmetric PSD matrices,
/// with `L1 = L2 = max_t lambda_max(W_t)`.
pub fn metric_game_from_whitened(mats: Vec<DMatrix<f64>>) -> Result<BilinearZeroSumGame> {
    let d = mats.first().map(|m| m.nrows()).ok_or_else(|| {
        Error::InvalidParameter("need at least one dissimilar pair".into())
    })?;
    let mut lip: f64 = 0.0;
    for m in &mats {
        if m.shape() != (d, d) {
            return Err(Error::DimensionMismatch("pair matrices must share a shape".into()));
        }
        let e = EjaElement::sym(m.clone())?;
        lip = lip.max(e.spectral_norm());
    }
    let op = WeightedSum {
        domain: ConeDescriptor::orthant(mats.len()),
        codomain: ConeDescriptor::sym(d),
        mats,
    };
    let space_x = StrategySpace::simplex(op.domain.clone())?;
    let space_y = StrategySpace::simplex(op.codomain.clone())?;
    let b = EjaElement::zero(space_x.descriptor());
    let c = EjaElement::zero(space_y.descriptor());
    BilinearZeroSumGame::new(space_x, space_y, Arc::new(op), b, c, (lip, lip))
}

/// Whitens the instance and builds its game. Also returns the ridge used.
pub fn build_metric_learning_game(inst: &MetricLearningInstance) -> Result<(BilinearZeroSumGame, f64)> {
    let (mats, ridge) = inst.whitened()?;
    Ok((metric_game_from_whitened(mats)?, ridge))
}

impl LabeledDataset {
    /// Reads a CSV with a header row, numeric feature columns and a final
    /// label column.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Dataset(format!("{}: {e}", path.display())))?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let width = rdr
            .headers()
            .map_err(|e| Error::Dataset(e.to_string()))?
            .len();
        if width < 2 {
            return Err(Error::Dataset("need at least one feature and a label column".into()));
        }
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Dataset(e.to_string()))?;
            let mut f = Vec::with_capacity(width - 1);
            for (col, field) in record.iter().take(width - 1).enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::Dataset(format!("row {}, column {}: {field:?} is not a number", row + 1, col + 1))
                })?;
                if !v.is_finite() {
                    return Err(Error::Dataset(format!("row {}: non-finite feature", row + 1)));
                }
                f.push(v);
            }
            features.push(f);
            labels.push(record[width - 1].trim().to_string());
        }
        if features.len() < 2 {
            return Err(Error::Dataset("need at least two rows".into()));
        }
        Ok(Self { features, labels })
    }

    /// Centers every feature and scales it to unit (population) standard
    /// deviation; constant features are only centered.
    pub fn standardize(&mut self) {
        let n = self.features.len() as f64;
        let d = self.features[0].len();
        for j in 0..d {
            let mean = self.features.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = self.features.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
            for r in &mut self.features {
                r[j] = (r[j] - mean) / sd;
            }
        }
    }

    /// Gaussian clusters: `per_class` points around each of `classes`
    /// random centers in `R^dim`.
    pub fn synthetic<R: Rng + ?Sized>(classes: usize, per_class: usize, dim: usize, rng: &mut R) -> Self {
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for c in 0..classes {
            let center: Vec<f64> = (0..dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    2.0 * z
                })
                .collect();
            let spread: Vec<f64> = (0..dim).map(|_| rng.random_range(0.3..1.5)).collect();
            for _ in 0..per_class {
                features.push(
                    center
                        .iter()
                        .zip(&spread)
                        .map(|(m, s)| {
                            let z: f64 = StandardNormal.sample(rng);
                            m + s * z
                        })
                        .collect(),
                );
                labels.push(format!("class{c}"));
            }
        }
        Self { features, labels }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{self_play, SelfPlayOptions};
    use crate::learners::LearnerConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(v))
    }

    #[test]
    fn inverse_sqrt_examples() {
        assert!((inverse_sqrt_psd(&DMatrix::identity(3, 3), 0.0).unwrap() - DMatrix::identity(3, 3)).amax() < 1e-15);
        let r = inverse_sqrt_psd(&diag(&[4.0, 9.0]), 0.0).unwrap();
        assert!((r - diag(&[0.5, 1.0 / 3.0])).amax() < 1e-15);
        assert!(inverse_sqrt_psd(&diag(&[1.0, 0.0]), 0.0).is_err());
        assert!(inverse_sqrt_psd(&diag(&[1.0, 0.0]), 1e-8).is_ok());
    }

    #[test]
    fn inverse_sqrt_reconstructs_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in [2, 4, 6] {
            let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
            let m = &g * g.transpose() + DMatrix::identity(n, n) * 0.1;
            let r = inverse_sqrt_psd(&m, 0.0).unwrap();
            assert!((&r * &m * &r - DMatrix::identity(n, n)).amax() < 1e-7);
            assert!((&r - r.transpose()).amax() == 0.0);
        }
    }

    #[test]
    fn ridge_only_when_needed() {
        assert_eq!(ridge_for(&DMatrix::identity(2, 2)), 0.0);
        let r = ridge_for(&diag(&[1.0, 0.0]));
        assert!((r - MIN_EIGENVALUE).abs() < 1e-20);
    }

    #[test]
    fn identity_pair_is_constant_game() {
        let g = metric_game_from_whitened(vec![DMatrix::identity(3, 3)]).unwrap();
        let x = g.space_x().uniform();
        let y = g.space_y().uniform();
        let r = g.duality_gap(&x, &y).unwrap();
        assert!((r.primal - 1.0).abs() < 1e-12);
        assert!(r.gap.abs() < 1e-12);
        assert_eq!(g.lipschitz(), (1.0, 1.0));
    }

    #[test]
    fn commuting_pairs_value_two_thirds() {
        let g = metric_game_from_whitened(vec![diag(&[2.0, 0.0]), diag(&[0.0, 1.0])]).unwrap();
        let cx = LearnerConfig::oscmwu(g.space_x().clone(), 0.25).unwrap();
        let cy = LearnerConfig::oscmwu(g.space_y().clone(), 0.25).unwrap();
        let tr = self_play(&g, &cx, &cy, &SelfPlayOptions::new(4000).record_every(1000)).unwrap();
        let last = tr.last();
        assert!(last.gap.gap < 5e-3);
        assert!(last.gap.primal >= 2.0 / 3.0 - 1e-9 && last.gap.dual <= 2.0 / 3.0 + 1e-9);
        let BlockRef::Orthant(x) = tr.average_x.view() else { panic!() };
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-2);
    }

    #[test]
    fn forward_is_psd_on_simplex() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let data = LabeledDataset::synthetic(3, 10, 4, &mut rng);
        let inst = MetricLearningInstance::sample(&data, 15, 20, &mut rng).unwrap();
        let (g, ridge) = build_metric_learning_game(&inst).unwrap();
        assert_eq!(ridge, 0.0);
        let lip = g.lipschitz().0;
        for _ in 0..50 {
            let x = g.space_x().random_point(&mut rng);
            let ax = g.operator().apply(&x);
            assert!(ax.in_cone(1e-12));
            assert!(ax.lambda_max() <= lip + 1e-12);
        }
    }

    #[test]
    fn rank_deficient_similar_scatter_gets_ridge() {
        let points = vec![
            DVector::from_column_slice(&[0.0, 0.0]),
            DVector::from_column_slice(&[1.0, 0.0]),
            DVector::from_column_slice(&[0.0, 1.0]),
        ];
        let inst = MetricLearningInstance::new(points, vec![(0, 1)], vec![(0, 2)]).unwrap();
        let (_, ridge) = inst.whitened().unwrap();
        assert!(ridge > 0.0);
        assert!(MetricLearningInstance::new(vec![DVector::zeros(2)], vec![], vec![(0, 0)]).is_err());
    }

    #[test]
    fn csv_round_trip_and_standardize() {
        let text = "a,b,label\n1,10,x\n3,10,y\n5,10,x\n";
        let mut data = LabeledDataset::from_reader(text.as_bytes()).unwrap();
        assert_eq!(data.labels, vec!["x", "y", "x"]);
        data.standardize();
        let col: Vec<f64> = data.features.iter().map(|r| r[0]).collect();
        let sd = (8.0f64 / 3.0).sqrt();
        assert!((col[0] + 2.0 / sd).abs() < 1e-15 && col[1] == 0.0);
        assert!(data.features.iter().all(|r| r[1] == 0.0));

        assert!(LabeledDataset::from_reader("a,label\nfoo,x\n1,y\n".as_bytes()).is_err());
        let one_class = LabeledDataset::from_reader("a,label\n1,x\n2,x\n".as_bytes()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(MetricLearningInstance::sample(&one_class, 1, 1, &mut rng).is_err());
    }
}
