//! Binary PGM (P5, maxval 255) encoding and decoding.

use std::path::Path;

use gridwarp_core::image::GrayImage;

use crate::CliError;

/// Encode to P5 bytes; samples quantize to `round(v * 255)`.
pub fn encode(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(
        img.samples()
            .iter()
            .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8),
    );
    out
}

/// Decode P5 bytes (whitespace and `#` comments allowed in the header).
pub fn decode(bytes: &[u8]) -> Result<GrayImage, CliError> {
    let mut pos = 0usize;

    let mut next_token = |bytes: &[u8]| -> Result<String, CliError> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(CliError::pipeline("truncated PGM header"));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };

    let magic = next_token(bytes)?;
    if magic != "P5" {
        return Err(CliError::pipeline(format!(
            "unsupported PGM magic \"{magic}\" (only binary P5)"
        )));
    }
    let width: usize = next_token(bytes)?
        .parse()
        .map_err(|_| CliError::pipeline("bad PGM width"))?;
    let height: usize = next_token(bytes)?
        .parse()
        .map_err(|_| CliError::pipeline("bad PGM height"))?;
    let maxval: usize = next_token(bytes)?
        .parse()
        .map_err(|_| CliError::pipeline("bad PGM maxval"))?;
    if maxval != 255 {
        return Err(CliError::pipeline(format!(
            "unsupported PGM maxval {maxval} (only 255)"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| CliError::pipeline("PGM dimensions overflow"))?;
    let raster = bytes
        .get(pos..pos + expected)
        .ok_or_else(|| CliError::pipeline("PGM raster shorter than header promises"))?;
    let samples: Vec<f64> = raster.iter().map(|&b| b as f64 / 255.0).collect();
    GrayImage::new(width, height, samples)
        .map_err(|e| CliError::pipeline(format!("PGM contents invalid: {e}")))
}

pub fn write(path: &Path, img: &GrayImage) -> Result<(), CliError> {
    std::fs::write(path, encode(img))
        .map_err(|e| CliError::pipeline(format!("cannot write {}: {e}", path.display())))
}

pub fn read(path: &Path) -> Result<GrayImage, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::pipeline(format!("cannot read {}: {e}", path.display())))?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantized_round_trip() {
        let img = GrayImage::new(
            5,
            3,
            (0..15).map(|i| i as f64 / 14.0).collect(),
        )
        .unwrap();
        let decoded = decode(&encode(&img)).unwrap();
        assert_eq!(decoded.width(), 5);
        assert_eq!(decoded.height(), 3);
        for (a, b) in img.samples().iter().zip(decoded.samples()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
        // A second pass is byte-identical (quantization is idempotent).
        assert_eq!(encode(&decoded), encode(&img));
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P5\n# generated\n2 2\n255\n".to_vec();
        bytes.extend([0u8, 128, 255, 64]);
        let img = decode(&bytes).unwrap();
        assert_eq!(img.width(), 2);
        assert!((img.get(1, 0) - 128.0 / 255.0).abs() < 1e-12);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(decode(b"P2\n2 2\n255\n....").is_err());
        assert!(decode(b"P5\n2 2\n255\n\x00").is_err());
        assert!(decode(b"P5\n2 2\n65535\n\x00\x00\x00\x00").is_err());
    }
}
