//! Flooding belief-propagation decoders over the edge-typed Tanner graph.

mod bp;
mod kernels;

pub use bp::{
    cn_update_spa, id_msa_decode, msa_decode, spa_decode, BpDecoder, CheckRule, DecodeOptions, DecodeResult,
    DecoderWorkspace, IterationTrace,
};
pub use kernels::{
    approx_box_plus, box_plus, cn_update_tanh_scaled, correction_term, correction_term_approx, Llr,
    LLR_SATURATION,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("channel LLR vector has length {found}, code length is {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("min-sum scaling factor {0} outside (0, 1]")]
    InvalidFactor(f64),
    #[error("maximum iteration count must be at least 1")]
    ZeroIterations,
    #[error("LUT has {lut} edge types, code has {code}")]
    LutEdgeTypes { lut: usize, code: usize },
    #[error("LUT covers {lut} iterations, decoder runs up to {required}")]
    LutIterations { lut: usize, required: usize },
    #[error("LUT has no quantization levels")]
    EmptyLut,
}
