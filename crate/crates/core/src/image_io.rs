//! 8-bit grayscale rasters and PGM (P2/P5) encoding.

use thiserror::Error;

/// Row-major 8-bit grayscale image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("image dimensions must be positive, got {0}x{1}")]
    ZeroDimension(u32, u32),
    #[error("pixel buffer holds {found} samples, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroDimension(width, height));
        }
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(ImageError::LengthMismatch {
                expected,
                found: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image filled with a single intensity.
    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Same dimensions, pixels replaced by `f(pixel)`.
    pub fn map(&self, f: impl Fn(u8) -> u8) -> Self {
        Self {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgmError {
    #[error("not a PGM stream (expected magic P2 or P5)")]
    BadMagic,
    #[error("malformed PGM header: {0}")]
    MalformedHeader(&'static str),
    #[error("unsupported maxval {0} (only 8-bit PGM up to 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("PGM declares zero dimension {0}x{1}")]
    ZeroDimension(u32, u32),
    #[error("truncated pixel payload: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("malformed ASCII sample at position {0}")]
    BadSample(usize),
    #[error("sample {value} at position {index} exceeds maxval {maxval}")]
    SampleOutOfRange {
        index: usize,
        value: u32,
        maxval: u32,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Encoding {
    Ascii,
    Binary,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next unsigned decimal token, or `None` if the token is missing or not a number.
    fn number(&mut self) -> Option<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        // A token must end at whitespace, a comment, or end of input.
        if let Some(&b) = self.data.get(self.pos) {
            if !(b.is_ascii_whitespace() || b == b'#') {
                return None;
            }
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()?
            .parse()
            .ok()
    }
}

/// Decodes a P2 or P5 stream with maxval at most 255.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let encoding = match bytes.get(..2) {
        Some(b"P2") => Encoding::Ascii,
        Some(b"P5") => Encoding::Binary,
        _ => return Err(PgmError::BadMagic),
    };
    let mut cur = Cursor {
        data: bytes,
        pos: 2,
    };
    if !cur
        .data
        .get(cur.pos)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(PgmError::MalformedHeader("missing separator after magic"));
    }
    let width = cur.number().ok_or(PgmError::MalformedHeader("bad width"))?;
    let height = cur
        .number()
        .ok_or(PgmError::MalformedHeader("bad height"))?;
    let maxval = cur
        .number()
        .ok_or(PgmError::MalformedHeader("bad maxval"))?;
    if width == 0 || height == 0 {
        return Err(PgmError::ZeroDimension(width, height));
    }
    if maxval == 0 {
        return Err(PgmError::MalformedHeader("maxval must be positive"));
    }
    if maxval > 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    let expected = (width as usize)
        .checked_mul(height as usize)
        .ok_or(PgmError::MalformedHeader("dimensions overflow"))?;

    let pixels = match encoding {
        Encoding::Binary => {
            // Exactly one whitespace byte separates the header from the raster.
            match cur.data.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(PgmError::MalformedHeader("missing raster separator")),
            }
            let raster = &cur.data[cur.pos..];
            if raster.len() < expected {
                return Err(PgmError::Truncated {
                    expected,
                    found: raster.len(),
                });
            }
            let raster = &raster[..expected];
            if let Some(index) = raster.iter().position(|&v| u32::from(v) > maxval) {
                return Err(PgmError::SampleOutOfRange {
                    index,
                    value: u32::from(raster[index]),
                    maxval,
                });
            }
            raster.to_vec()
        }
        Encoding::Ascii => {
            let mut pixels = Vec::with_capacity(expected.min(bytes.len()));
            for index in 0..expected {
                cur.skip_whitespace_and_comments();
                if cur.pos >= cur.data.len() {
                    return Err(PgmError::Truncated {
                        expected,
                        found: index,
                    });
                }
                let value = cur.number().ok_or(PgmError::BadSample(index))?;
                if value > maxval {
                    return Err(PgmError::SampleOutOfRange {
                        index,
                        value,
                        maxval,
                    });
                }
                pixels.push(value as u8);
            }
            pixels
        }
    };
    Ok(GrayImage {
        width,
        height,
        pixels,
    })
}

/// Encodes as binary P5 with maxval 255.
pub fn write_pgm(image: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", image.width, image.height);
    let mut out = Vec::with_capacity(header.len() + image.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&image.pixels);
    out
}
