//! Minimal-size sorting networks: exact search over sets of Boolean
//! sequences, Huffman-style lower bounds, and checkable certificates.

pub mod canon;
pub mod certificate;
pub mod dump;
pub mod error;
pub mod huffman;
pub mod network;
#[cfg(any(test, feature = "oracles"))]
pub mod oracle;
pub mod search;
pub mod seqset;
pub mod subsume;
pub mod table;

pub use certificate::{check_certificate, generate_certificate, Certificate};
pub use error::{Error, Result};
pub use network::{ComparatorNetwork, Op};
pub use search::{memo_min_size, van_voorhis_chain, Search};
pub use seqset::{BoolSeq, BoolSeqSet, ChannelPermutation, Comparator};
pub use table::{BoundInterval, BoundsTable};
