//! Game builders for the applications: simplex–spectraplex metric learning,
//! Fermat–Weber location as a second-order-cone game, and its streaming
//! online variant.

pub mod fermat_weber;
pub mod metric;
pub mod stream;

pub use fermat_weber::{
    build_fermat_weber_game, sum_of_norms, synthetic_fermat_weber, FermatWeberInstance, FermatWeberOperator,
};
pub use metric::{
    build_metric_learning_game, inverse_sqrt_psd, metric_game_from_whitened, LabeledDataset,
    MetricLearningInstance, MIN_EIGENVALUE,
};
pub use stream::{generate_stream, online_self_play, OnlineTrace, Stream, StreamParams};
