//! QR rendering of identifiers.
//!
//! The contract is decode round-trip: a conformant decoder applied to the
//! emitted symbol yields exactly the encoded 64-character text. Encoding
//! is delegated to a standards-conformant QR encoder; this module owns the
//! module grid and its ASCII/PNG renderings.

use crate::error::{Result, W3idError};
use crate::id::{require_lower_hex, W3ID_HEX_LEN};

/// Error-correction level of a symbol.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EcLevel {
    Low,
    #[default]
    Medium,
    Quartile,
    High,
}

impl std::str::FromStr for EcLevel {
    type Err = W3idError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "l" => Ok(EcLevel::Low),
            "M" | "m" => Ok(EcLevel::Medium),
            "Q" | "q" => Ok(EcLevel::Quartile),
            "H" | "h" => Ok(EcLevel::High),
            other => Err(W3idError::MalformedKey(format!(
                "unknown error-correction level {other:?}, expected L, M, Q, or H"
            ))),
        }
    }
}

impl std::fmt::Display for EcLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EcLevel::Low => f.write_str("L"),
            EcLevel::Medium => f.write_str("M"),
            EcLevel::Quartile => f.write_str("Q"),
            EcLevel::High => f.write_str("H"),
        }
    }
}

/// Quiet-zone width in modules on every side of rendered output.
const QUIET_ZONE: usize = 4;

/// A square grid of dark/light modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QrSymbol {
    width: usize,
    modules: Vec<bool>,
    ec_level: EcLevel,
}

impl QrSymbol {
    /// Modules per side, quiet zone excluded.
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ec_level(&self) -> EcLevel {
        self.ec_level
    }

    /// True for a dark module.
    pub fn module(&self, x: usize, y: usize) -> bool {
        self.modules[y * self.width + x]
    }

    /// Terminal rendering with two-character-wide blocks for aspect
    /// correctness, quiet zone included. Cosmetic only.
    pub fn to_ascii(&self) -> String {
        let total = self.width + 2 * QUIET_ZONE;
        let mut out = String::with_capacity(total * (2 * total + 1));
        for y in 0..total {
            for x in 0..total {
                let dark = x >= QUIET_ZONE
                    && y >= QUIET_ZONE
                    && x < QUIET_ZONE + self.width
                    && y < QUIET_ZONE + self.width
                    && self.module(x - QUIET_ZONE, y - QUIET_ZONE);
                out.push_str(if dark { "██" } else { "  " });
            }
            out.push('\n');
        }
        out
    }

    /// Grayscale PNG at `scale` pixels per module, quiet zone included.
    /// Deterministic for a fixed symbol and scale.
    pub fn to_png(&self, scale: u32) -> Vec<u8> {
        let scale = scale.max(1) as usize;
        let total = (self.width + 2 * QUIET_ZONE) * scale;
        let mut pixels = vec![0xffu8; total * total];
        for y in 0..self.width {
            for x in 0..self.width {
                if !self.module(x, y) {
                    continue;
                }
                let top = (y + QUIET_ZONE) * scale;
                let left = (x + QUIET_ZONE) * scale;
                for dy in 0..scale {
                    let row = (top + dy) * total + left;
                    pixels[row..row + scale].fill(0x00);
                }
            }
        }

        let mut out = Vec::new();
        {
            let mut encoder = png::Encoder::new(&mut out, total as u32, total as u32);
            encoder.set_color(png::ColorType::Grayscale);
            encoder.set_depth(png::BitDepth::Eight);
            let mut writer = encoder.write_header().expect("png header");
            writer.write_image_data(&pixels).expect("png data");
        }
        out
    }
}

/// Encode a 64-character identifier as a QR symbol.
pub fn render_qr(w3id: &str, ec_level: EcLevel) -> Result<QrSymbol> {
    require_lower_hex(w3id, W3ID_HEX_LEN).map_err(W3idError::MalformedId)?;
    let ec = match ec_level {
        EcLevel::Low => qrcode::EcLevel::L,
        EcLevel::Medium => qrcode::EcLevel::M,
        EcLevel::Quartile => qrcode::EcLevel::Q,
        EcLevel::High => qrcode::EcLevel::H,
    };
    let code = qrcode::QrCode::with_error_correction_level(w3id.as_bytes(), ec)
        .map_err(|e| W3idError::MalformedId(format!("qr encode: {e}")))?;
    let width = code.width();
    let modules = code.to_colors().iter().map(|c| *c == qrcode::Color::Dark).collect();
    Ok(QrSymbol { width, modules, ec_level })
}
