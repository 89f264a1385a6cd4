//! Mixture proportion estimation for positive-unlabeled learning.
//!
//! Given a positive sample `P` and an unlabeled mixture sample `U`, the
//! p-dimensional problem is reduced to one dimension by training a
//! probabilistic P-vs-U classifier and keeping only the per-row class
//! probabilities. Two one-dimensional estimators of the identifiable lower
//! bound `alpha0` then run on those scores:
//!
//! * [`mpe::patra_sen`] removes as much of the labeled score distribution
//!   from the unlabeled one as possible while the rescaled remainder stays
//!   close to a valid CDF (isotonic projection distance, elbow or threshold
//!   selection);
//! * [`mpe::roc`] evaluates the Storey ratio
//!   `k(t) = (G_n(t) - G_{L,n}(t)) / (1 - G_{L,n}(t))` at a shrinking
//!   cutoff or takes its supremum over the ROC curve.
//!
//! The estimate feeds a plug-in posterior upper bound used to classify the
//! unlabeled rows. Everything is deterministic given a seed.

pub mod classifier;
pub mod dataset;
pub mod empirical;
pub mod error;
pub mod isotonic;
pub mod mpe;
pub mod oracle;
pub mod posterior;
pub mod seeding;
pub mod spy;

pub use classifier::{ForestConfig, ForestModel, LogisticConfig, LogisticModel, ScoreSet};
pub use dataset::{FeatureMatrix, PcaModel, PuDataset};
pub use empirical::StepCdf;
pub use error::{Error, Result};
pub use mpe::{AlphaEstimate, DistanceCurve, Method};
