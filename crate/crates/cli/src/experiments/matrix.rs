use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;
use symcone::games::DenseOperator;
use symcone::{ConeDescriptor, EjaElement};

use super::{BuildContext, Experiment, Instance};
use crate::error::{CliError, Result};

pub struct MatchingPennies;

impl Experiment for MatchingPennies {
    fn name(&self) -> &'static str {
        "matching-pennies"
    }

    fn summary(&self) -> &'static str {
        "2x2 matrix game [[1, -1], [-1, 1]] over the probability simplex"
    }

    fn build(&self, _ctx: BuildContext<'_>) -> Result<Instance> {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let op = DenseOperator::new(ConeDescriptor::orthant(2), ConeDescriptor::orthant(2), m)?;
        Ok(Instance::Static {
            game: op.into_game(None)?,
            primal: None,
        })
    }
}

/// A bilinear game `<y, A x> + <b, x> + <c, y>`, x minimizing, read from
/// JSON:
///
/// ```json
/// { "x": {"spin": 3}, "y": {"product": [{"orthant": 2}, {"sym": 2}]},
///   "matrix": [[...], ...], "b": [...], "c": [...], "lipschitz": [1.0, 1.0] }
/// ```
///
/// `matrix` has one row per flat coordinate of `y` and one column per flat
/// coordinate of `x`; `b`, `c` and `lipschitz` are optional.
pub struct GameFile;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub x: ConeDescriptor,
    pub y: ConeDescriptor,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub b: Option<Vec<f64>>,
    #[serde(default)]
    pub c: Option<Vec<f64>>,
    #[serde(default)]
    pub lipschitz: Option<[f64; 2]>,
}

impl GameSpec {
    pub fn load(path: &Path) -> Result<Self> {
        let input = |message: String| CliError::Input {
            path: path.to_path_buf(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| input(e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| input(e.to_string()))
    }

    pub fn into_instance(self) -> Result<Instance> {
        let rows = self.matrix.len();
        let cols = self.matrix.first().map_or(0, Vec::len);
        if let Some(r) = self.matrix.iter().position(|r| r.len() != cols) {
            return Err(symcone::Error::DimensionMismatch(format!(
                "matrix row {r} has {} entries, row 0 has {cols}",
                self.matrix[r].len()
            ))
            .into());
        }
        let m = DMatrix::from_row_iterator(rows, cols, self.matrix.into_iter().flatten());
        let b = match &self.b {
            Some(v) => EjaElement::from_flat(&self.x, v)?,
            None => EjaElement::zero(&self.x),
        };
        let c = match &self.c {
            Some(v) => EjaElement::from_flat(&self.y, v)?,
            None => EjaElement::zero(&self.y),
        };
        let op = DenseOperator::new(self.x, self.y, m)?;
        let game = op.into_game_with_offsets(b, c, self.lipschitz.map(|[l1, l2]| (l1, l2)))?;
        Ok(Instance::Static { game, primal: None })
    }
}

impl Experiment for GameFile {
    fn name(&self) -> &'static str {
        "game-file"
    }

    fn summary(&self) -> &'static str {
        "bilinear game read from the JSON file given by --game"
    }

    fn build(&self, ctx: BuildContext<'_>) -> Result<Instance> {
        let path = ctx
            .game
            .ok_or_else(|| CliError::Config("game-file needs --game <json>".into()))?;
        GameSpec::load(path)?.into_instance()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Instance> {
        serde_json::from_str::<GameSpec>(text)
            .map_err(|e| CliError::Config(e.to_string()))?
            .into_instance()
    }

    #[test]
    fn spin_game_from_json() {
        let inst = parse(r#"{"x": {"spin": 2}, "y": {"orthant": 2}, "matrix": [[1, 0], [0, 1]], "c": [0.5, 0]}"#).unwrap();
        let Instance::Static { game, .. } = inst else { panic!() };
        assert_eq!(game.space_x().descriptor(), &ConeDescriptor::spin(2));
        let x = game.space_x().uniform();
        let y = game.space_y().uniform();
        // <y, A x> = 0.25 and <c, y> = 0.25
        assert!((game.value(&x, &y).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn malformed_games() {
        let shape = parse(r#"{"x": {"orthant": 2}, "y": {"orthant": 2}, "matrix": [[1, 0, 0], [0, 1, 0]]}"#);
        assert_eq!(shape.err().unwrap().kind(), "dimension_mismatch");
        let ragged = parse(r#"{"x": {"orthant": 2}, "y": {"orthant": 2}, "matrix": [[1, 0], [0]]}"#);
        assert_eq!(ragged.err().unwrap().kind(), "dimension_mismatch");
        let offset = parse(r#"{"x": {"orthant": 2}, "y": {"orthant": 2}, "matrix": [[1, 0], [0, 1]], "b": [1]}"#);
        assert!(offset.is_err());
        assert!(parse(r#"{"x": {"orthant": 2}, "y": {"orthant": 2}, "matrix": [], "extra": 1}"#).is_err());
    }
}
