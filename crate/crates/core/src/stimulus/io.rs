//! Image import and the native raw video container.
//!
//! Raw layout (all little-endian):
//!
//! | bytes | field                      |
//! |-------|----------------------------|
//! | 8     | magic `VDCRAW1\0`          |
//! | 4     | width (u32)                |
//! | 4     | height (u32)               |
//! | 4     | frame count (u32)          |
//! | 8     | sample rate (f64)          |
//! | 4·N   | pixels (f32), frame-major, row-major within a frame |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use image::{DynamicImage, GrayImage, Luma};

use crate::error::{Error, Result};
use crate::frame::{Frame, VideoSequence};

pub const RAW_MAGIC: &[u8; 8] = b"VDCRAW1\0";
const HEADER_LEN: usize = 8 + 4 + 4 + 4 + 8;

/// Loads any supported image as luminance.
///
/// Colour images use `(0.299 R + 0.587 G + 0.114 B) / max`; grayscale images
/// are normalised by the channel maximum.
pub fn load_image(path: impl AsRef<Path>) -> Result<Frame> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|e| Error::parse(path, e.to_string()))?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let luminance: Vec<f64> = match &img {
        DynamicImage::ImageLuma8(g) => g.pixels().map(|p| p.0[0] as f64 / 255.0).collect(),
        DynamicImage::ImageLuma16(g) => g.pixels().map(|p| p.0[0] as f64 / 65535.0).collect(),
        DynamicImage::ImageLumaA8(g) => g.pixels().map(|p| p.0[0] as f64 / 255.0).collect(),
        DynamicImage::ImageRgb16(_) | DynamicImage::ImageRgba16(_) => img
            .to_rgb16()
            .pixels()
            .map(|p| rgb_luma(p.0[0] as f64, p.0[1] as f64, p.0[2] as f64) / 65535.0)
            .collect(),
        _ => img
            .to_rgb8()
            .pixels()
            .map(|p| rgb_luma(p.0[0] as f64, p.0[1] as f64, p.0[2] as f64) / 255.0)
            .collect(),
    };
    Frame::from_fn(w, h, |x, y| luminance[y * w + x])
}

#[inline]
fn rgb_luma(r: f64, g: f64, b: f64) -> f64 {
    0.299 * r + 0.587 * g + 0.114 * b
}

/// Writes an 8-bit binary PGM (P5).
pub fn save_pgm(frame: &Frame, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let img = GrayImage::from_fn(frame.width() as u32, frame.height() as u32, |x, y| {
        Luma([(frame.get(x as usize, y as usize) * 255.0).round() as u8])
    });
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut enc = image::codecs::pnm::PnmEncoder::new(BufWriter::new(file))
        .with_subtype(image::codecs::pnm::PnmSubtype::Graymap(
            image::codecs::pnm::SampleEncoding::Binary,
        ));
    enc.encode(
        img.as_raw().as_slice(),
        img.width(),
        img.height(),
        image::ExtendedColorType::L8,
    )?;
    Ok(())
}

pub fn save_video(seq: &VideoSequence, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let (w, h) = seq.dims().unwrap_or((0, 0));
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut header = Vec::with_capacity(HEADER_LEN);
    header.extend_from_slice(RAW_MAGIC);
    header.extend_from_slice(&(w as u32).to_le_bytes());
    header.extend_from_slice(&(h as u32).to_le_bytes());
    header.extend_from_slice(&(seq.len() as u32).to_le_bytes());
    header.extend_from_slice(&seq.sample_rate().to_le_bytes());
    out.write_all(&header).map_err(|e| Error::io(path, e))?;
    for frame in seq.frames() {
        let bytes: Vec<u8> = frame.pixels().iter().flat_map(|p| p.to_le_bytes()).collect();
        out.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn load_video(path: impl AsRef<Path>) -> Result<VideoSequence> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut buf = Vec::new();
    BufReader::new(file)
        .read_to_end(&mut buf)
        .map_err(|e| Error::io(path, e))?;
    if buf.len() < HEADER_LEN {
        return Err(Error::parse(path, "file shorter than raw video header"));
    }
    if &buf[..8] != RAW_MAGIC {
        return Err(Error::parse(path, "bad magic, not a raw video file"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(buf[o..o + 4].try_into().unwrap()) as usize;
    let (w, h, n) = (u32_at(8), u32_at(12), u32_at(16));
    let rate = f64::from_le_bytes(buf[20..28].try_into().unwrap());
    let expected = w
        .checked_mul(h)
        .and_then(|p| p.checked_mul(n))
        .and_then(|p| p.checked_mul(4))
        .ok_or_else(|| Error::parse(path, "header dimensions overflow"))?;
    if buf.len() - HEADER_LEN != expected {
        return Err(Error::parse(
            path,
            format!(
                "payload is {} bytes, header implies {expected}",
                buf.len() - HEADER_LEN
            ),
        ));
    }
    let payload = &buf[HEADER_LEN..];
    let frames = (0..n)
        .map(|i| {
            let chunk = &payload[i * w * h * 4..(i + 1) * w * h * 4];
            let px = chunk
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
                .collect();
            Frame::new(w, h, px).map_err(|e| Error::parse(path, e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    VideoSequence::new(frames, rate).map_err(|e| Error::parse(path, e.to_string()))
}
