//! Raw planar luma file reading and writing.
//!
//! Layout: frames concatenated in display order, each frame row-major from
//! the top-left, one byte per sample.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::video::RawVideo;

/// Reads a raw 8-bit luma file. The file size must be an exact multiple of
/// `width * height` bytes and hold at least two frames.
pub fn load_raw_video(path: &Path, width: u32, height: u32, frame_rate: f64) -> Result<RawVideo> {
    if width == 0 || height == 0 {
        return Err(Error::validation(format!(
            "frame dimensions must be positive, got {width}x{height}"
        )));
    }
    if frame_rate <= 0.0 || !frame_rate.is_finite() {
        return Err(Error::validation(format!(
            "frame rate must be positive, got {frame_rate}"
        )));
    }
    let data = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let frame_bytes = width as u64 * height as u64;
    if !(data.len() as u64).is_multiple_of(frame_bytes) {
        return Err(Error::FileSize {
            path: path.to_path_buf(),
            width,
            height,
            frame_bytes,
            actual: data.len() as u64,
        });
    }
    RawVideo::new(width, height, frame_rate, data)
}

/// Writes the concatenated frames back out; inverse of `load_raw_video`.
pub fn write_raw_video(path: &Path, video: &RawVideo) -> Result<()> {
    fs::write(path, video.bytes()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_mismatch_names_byte_counts() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.raw");
        fs::write(&path, vec![0u8; 513]).unwrap();
        let err = load_raw_video(&path, 16, 16, 50.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("513"), "{msg}");
        assert!(msg.contains("256"), "{msg}");
    }

    #[test]
    fn exact_two_frame_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ok.raw");
        fs::write(&path, vec![7u8; 512]).unwrap();
        let video = load_raw_video(&path, 16, 16, 50.0).unwrap();
        assert_eq!(video.frame_count(), 2);
    }

    #[test]
    fn zero_dimensions_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("any.raw");
        fs::write(&path, vec![0u8; 512]).unwrap();
        assert!(load_raw_video(&path, 0, 16, 50.0).is_err());
        assert!(load_raw_video(&path, 16, 16, 0.0).is_err());
    }

    #[test]
    fn write_then_load_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("roundtrip.raw");
        let data: Vec<u8> = (0..2048u32).map(|i| (i % 251) as u8).collect();
        let video = RawVideo::new(32, 32, 25.0, data).unwrap();
        write_raw_video(&path, &video).unwrap();
        let back = load_raw_video(&path, 32, 32, 25.0).unwrap();
        assert_eq!(back, video);
    }
}
