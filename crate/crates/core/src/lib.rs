//! Multi-edge-type LDPC codes for low-rate reconciliation.
//!
//! The crate covers protograph parsing and quasi-cyclic lifting ([`code`]),
//! the BI-AWGN channel and Monte Carlo frame-error estimation ([`channel`]),
//! flooding decoders with sum-product, scaled min-sum and
//! iteration-dependent scaled min-sum check rules ([`decoder`]), protograph
//! EXIT and density-evolution analysis ([`analysis`]) and the scaling
//! coefficient lookup tables built from it ([`lut`]).

pub mod analysis;
pub mod channel;
pub mod code;
pub mod decoder;
pub mod lut;
