//! PNG/PPM decoding into normalized tensors, encoding back to 8-bit files,
//! binary mask files, and bilinear resizing.

use std::path::Path;

use image::{DynamicImage, GrayImage, ImageError, ImageReader, RgbImage};

use crate::error::{Error, Result};
use crate::types::{ImageTensor, SegmentationMask, Shape, StructureLabel};

/// Failing to open the file is an I/O error; anything after that, including a
/// truncated stream, means the content is undecodable.
fn open(path: &Path) -> Result<DynamicImage> {
    let reader = ImageReader::open(path).map_err(|e| Error::io(path, e))?;
    reader.decode().map_err(|e| Error::UndecodableImage {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Width and height from the file header, without decoding pixels.
pub fn image_dimensions(path: &Path) -> Result<(u32, u32)> {
    image::image_dimensions(path).map_err(|e| match e {
        ImageError::IoError(source) => Error::io(path, source),
        other => Error::UndecodableImage {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    })
}

/// Decodes a grayscale or RGB image with values scaled into `[0, 1]`
/// (8-bit by 1/255, 16-bit by 1/65535).
pub fn decode_image(path: &Path) -> Result<ImageTensor> {
    let img = open(path)?;
    let undecodable = |reason: &str| Error::UndecodableImage {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (channels, interleaved): (usize, Vec<f64>) = match &img {
        DynamicImage::ImageLuma8(b) => (1, b.as_raw().iter().map(|&v| f64::from(v) / 255.0).collect()),
        DynamicImage::ImageLuma16(b) => (1, b.as_raw().iter().map(|&v| f64::from(v) / 65535.0).collect()),
        DynamicImage::ImageRgb8(b) => (3, b.as_raw().iter().map(|&v| f64::from(v) / 255.0).collect()),
        DynamicImage::ImageRgb16(b) => (3, b.as_raw().iter().map(|&v| f64::from(v) / 65535.0).collect()),
        other if other.color().has_alpha() => return Err(undecodable("alpha channels are not supported")),
        _ => return Err(undecodable("unsupported pixel format")),
    };
    let shape = Shape::new(channels, h, w).map_err(|e| e.in_file(path))?;
    let mut planar = vec![0.0; shape.len()];
    for (i, px) in interleaved.chunks_exact(channels).enumerate() {
        for (c, &v) in px.iter().enumerate() {
            planar[c * h * w + i] = v;
        }
    }
    ImageTensor::from_shape(shape, planar).map_err(|e| e.in_file(path))
}

/// `round(clamp(v, 0, 1) * 255)`.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Clamps into `[0, 1]`, quantizes to 8 bits and writes a grayscale (C = 1) or
/// RGB (C = 3) file; the format follows the extension.
pub fn encode_image(tensor: &ImageTensor, path: &Path) -> Result<()> {
    let (h, w) = (tensor.height(), tensor.width());
    let plane = h * w;
    let data = tensor.data();
    let encode_err = |e: ImageError| match e {
        ImageError::IoError(source) => Error::io(path, source),
        other => Error::Encode {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    };
    match tensor.channels() {
        1 => {
            let raw = data.iter().map(|&v| quantize(v)).collect();
            let img = GrayImage::from_raw(w as u32, h as u32, raw).expect("buffer sized from shape");
            img.save(path).map_err(encode_err)
        }
        3 => {
            let mut raw = Vec::with_capacity(3 * plane);
            for i in 0..plane {
                for c in 0..3 {
                    raw.push(quantize(data[c * plane + i]));
                }
            }
            let img = RgbImage::from_raw(w as u32, h as u32, raw).expect("buffer sized from shape");
            img.save(path).map_err(encode_err)
        }
        c => Err(Error::Encode {
            path: path.to_path_buf(),
            reason: format!("cannot encode {c}-channel image"),
        }),
    }
}

/// Reads a single-channel mask where 0 is background and 255 is foreground.
pub fn decode_mask(path: &Path, label: StructureLabel) -> Result<SegmentationMask> {
    let img = open(path)?.into_luma8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let mut data = Vec::with_capacity(w * h);
    for (index, &v) in img.as_raw().iter().enumerate() {
        match v {
            0 => data.push(0),
            255 => data.push(1),
            value => return Err(Error::NonBinaryMask { index, value }.in_file(path)),
        }
    }
    SegmentationMask::new(h, w, data, label).map_err(|e| e.in_file(path))
}

pub fn encode_mask(mask: &SegmentationMask, path: &Path) -> Result<()> {
    let raw = mask.data().iter().map(|&v| v * 255).collect();
    let img = GrayImage::from_raw(mask.width() as u32, mask.height() as u32, raw)
        .expect("buffer sized from mask");
    img.save(path).map_err(|e| match e {
        ImageError::IoError(source) => Error::io(path, source),
        other => Error::Encode {
            path: path.to_path_buf(),
            reason: other.to_string(),
        },
    })
}

/// Bilinear resampling with pixel-centre alignment and edge clamping.
/// Same-size input is returned unchanged.
pub fn resize_bilinear(src: &ImageTensor, height: usize, width: usize) -> Result<ImageTensor> {
    let shape = Shape::new(src.channels(), height, width)?;
    if (height, width) == (src.height(), src.width()) {
        return Ok(src.clone());
    }
    let axis = |out: usize, input: usize| -> Vec<(usize, usize, f64)> {
        let scale = input as f64 / out as f64;
        (0..out)
            .map(|i| {
                let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (input - 1) as f64);
                let lo = pos.floor() as usize;
                let hi = (lo + 1).min(input - 1);
                (lo, hi, pos - lo as f64)
            })
            .collect()
    };
    let rows = axis(height, src.height());
    let cols = axis(width, src.width());
    ImageTensor::from_fn(shape, |c, r, col| {
        let (r0, r1, fr) = rows[r];
        let (c0, c1, fc) = cols[col];
        let top = src.get(c, r0, c0) * (1.0 - fc) + src.get(c, r0, c1) * fc;
        let bottom = src.get(c, r1, c0) * (1.0 - fc) + src.get(c, r1, c1) * fc;
        top * (1.0 - fr) + bottom * fr
    })
}
