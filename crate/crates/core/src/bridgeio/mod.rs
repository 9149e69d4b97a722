//! Classic bridge ⇄ combinatorial bridge conversion, file formats, the
//! byte-cost report and the losslessness check.

mod codec;
mod csvio;
mod manifest;
mod stats;
mod verify;

pub use codec::{
    compress_bridge, decompress_bridge, encode_group, ClassicBridge, CompressedBridge, Mode,
};
pub use csvio::{
    read_relation_csv, read_relation_from, write_atomic, write_relation_csv, write_relation_to,
    SchemaHint,
};
pub use manifest::{parse_manifest, read_universe_manifest, render_manifest, write_universe_manifest};
pub use stats::{compression_stats, CompressionReport, COST_MODEL_NOTE};
pub use verify::{first_divergence, verify_lossless, VerifyReport};

use crate::{GroupKey, Result};

/// Canonical `h:k` text of a group key.
pub fn serialize_group_key(key: &GroupKey) -> String {
    key.to_string()
}

/// Inverse of [`serialize_group_key`]; rejects leading zeros and zero
/// components.
pub fn parse_group_key(text: &str) -> Result<GroupKey> {
    text.parse()
}
