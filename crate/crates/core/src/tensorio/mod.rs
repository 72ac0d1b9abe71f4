//! The CGRT tensor container and per-run JSON manifests.
//!
//! CGRT layout, all integers little-endian:
//!
//! ```text
//! header (20 bytes)
//!   0  magic     "CGRT"
//!   4  version   u16 = 1
//!   6  dtype     u8  (0 = u32 counts, 1 = f32 normalized)
//!   7  k         u8
//!   8  channels  u8  (1 or 2)
//!   9  padding   3 zero bytes
//!  12  n_samples u64
//! each sample
//!      label     u8  (0 negative, 1 positive)
//!      id_len    u16
//!      id        id_len bytes of UTF-8
//!      values    channels * 2^k * 2^k four-byte values,
//!                channel by channel, rows y = 0 upward, x ascending
//! ```

mod cgrt;
mod manifest;

pub use cgrt::{
    decode_cgrt, encode_cgrt, file_size, read_cgrt, write_cgrt, CgrtFile, CgrtSample, CgrtValues,
    Dtype, TensorError, HEADER_LEN, MAGIC, VERSION,
};
pub use manifest::{
    digest_file, read_manifest, sha256_hex, write_manifest, FileDigest, RunManifest,
};
