//! Minimal 64-bit neural-network engine for the stride-length regressor.
//!
//! The architecture is three Conv → BatchNorm → LeakyReLU → MaxPool blocks
//! (kernels 2x1, 5x1, 5x1 convolving over time only) followed by a fully
//! connected layer and a softplus output, trained with plain SGD on MSE.
//! Everything runs in f64 so analytic gradients can be validated against
//! central finite differences to tight tolerances.
//!
//! Determinism: initialization, batch shuffling and updates are driven by
//! seeded ChaCha streams; intra-layer parallelism writes disjoint output
//! slices and reduces in fixed order, so repeated runs are bit-identical.

pub mod batch;
pub mod error;
pub mod gradcheck;
pub mod io;
pub mod layers;
pub mod model;
pub mod net;
pub mod spec;
pub mod tensor;
pub mod train;

pub use batch::Batch;
pub use error::NnError;
pub use gradcheck::{check_model_gradients, GradCheckReport};
pub use io::{load_model, save_model};
pub use model::Model;
pub use net::{backward, forward, forward_eval, mse_loss, Mode};
pub use spec::{LayerSpec, ModelSpec};
pub use tensor::Tensor;
pub use train::{fine_tune, train, EpochStats, TrainConfig};
