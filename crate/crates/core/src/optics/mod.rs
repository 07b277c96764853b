//! The beamsplitter cascade, its loss model, the mirror return test, the
//! Walsh certification stage and the two-photon aperture experiment.

mod certify;
mod element;
mod network;
pub mod spdc;

pub use certify::{
    certification_transform, detector_distribution, sample_clicks, walsh_pattern_state, walsh_row_of,
    ModeTransform, FOUR_MODE_PATTERNS,
};
pub use element::{BeamsplitterElement, Convention};
pub use network::{
    build_certification_network, build_w_network, return_probability, run_network, MidpointChannel,
    OpticalNetwork, MAX_ITERATIONS,
};
