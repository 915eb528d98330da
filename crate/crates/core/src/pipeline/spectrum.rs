use std::path::Path;

use crate::error::Result;
use crate::fourier;
use crate::pipeline::imageio;
use crate::types::ImageTensor;

/// Per-channel `log(1 + |X|)` divided by its channel maximum, with the zero
/// frequency moved to `(H/2, W/2)`. Values lie in `[0, 1]`; an all-zero
/// channel stays zero.
pub fn spectrum_heatmap(image: &ImageTensor) -> ImageTensor {
    let shape = image.shape();
    let (h, w) = (shape.height, shape.width);
    let amplitude = fourier::decompose(&fourier::dft2(image)).amplitude;
    let mut out = vec![0.0; shape.len()];
    for c in 0..shape.channels {
        let logs: Vec<f64> = amplitude.channel(c).iter().map(|a| a.ln_1p()).collect();
        let max = logs.iter().copied().fold(0.0, f64::max);
        let plane = &mut out[c * h * w..(c + 1) * h * w];
        for u in 0..h {
            for v in 0..w {
                let value = if max > 0.0 { logs[u * w + v] / max } else { 0.0 };
                plane[((u + h / 2) % h) * w + (v + w / 2) % w] = value;
            }
        }
    }
    ImageTensor::from_shape(shape, out).expect("normalized values are finite")
}

/// Decodes `image`, renders its amplitude heatmap and writes it to `out`.
pub fn inspect_spectrum(image: &Path, out: &Path) -> Result<ImageTensor> {
    let decoded = imageio::decode_image(image)?;
    let heatmap = spectrum_heatmap(&decoded);
    imageio::encode_image(&heatmap, out)?;
    Ok(heatmap)
}
