use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample counts per class; sums to `width · height · samples_per_pixel`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassHistogram {
    pub capture: u64,
    pub cycle: u64,
    pub escape: u64,
    pub unresolved: u64,
}

impl ClassHistogram {
    pub fn total(&self) -> u64 {
        self.capture + self.cycle + self.escape + self.unresolved
    }

    /// Fractions in the order capture, cycle, escape, unresolved.
    pub fn fractions(&self) -> [f64; 4] {
        let total = self.total().max(1) as f64;
        [self.capture, self.cycle, self.escape, self.unresolved].map(|n| n as f64 / total)
    }

    pub(crate) fn add(&mut self, tag: &str) {
        match tag {
            "capture" => self.capture += 1,
            "cycle" => self.cycle += 1,
            "escape" => self.escape += 1,
            _ => self.unresolved += 1,
        }
    }

    pub(crate) fn merge(&mut self, other: &ClassHistogram) {
        self.capture += other.capture;
        self.cycle += other.cycle;
        self.escape += other.escape;
        self.unresolved += other.unresolved;
    }
}

/// Row-major RGB8 image, top row first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageBuffer {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
    pub histogram: ClassHistogram,
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, pixels: vec![0; 3 * width * height], histogram: ClassHistogram::default() }
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Binary PPM (P6, maxval 255).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    /// Rotates counterclockwise by `quarter_turns · 90°`.
    pub fn rotated(&self, quarter_turns: u8) -> Self {
        let mut out = self.clone();
        for _ in 0..quarter_turns % 4 {
            let src = out;
            out = ImageBuffer::new(src.height, src.width);
            out.histogram = src.histogram;
            for y in 0..src.height {
                for x in 0..src.width {
                    out.set_pixel(y, src.width - 1 - x, src.pixel(x, y));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageFormat {
    Ppm,
    Png,
}

impl ImageFormat {
    /// Format implied by the file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        match path.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref() {
            Some("ppm") => Ok(ImageFormat::Ppm),
            Some("png") => Ok(ImageFormat::Png),
            _ => Err(Error::InvalidArgument(format!("unknown image extension in {}", path.display()))),
        }
    }
}

pub fn write_image(buf: &ImageBuffer, path: &Path, format: ImageFormat) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    match format {
        ImageFormat::Ppm => {
            writer.write_all(&buf.to_ppm()).map_err(|e| Error::io(path, e))?;
        }
        ImageFormat::Png => {
            let png_err = |source| Error::Png { path: path.to_path_buf(), source };
            let mut encoder = png::Encoder::new(&mut writer, buf.width as u32, buf.height as u32);
            encoder.set_color(png::ColorType::Rgb);
            encoder.set_depth(png::BitDepth::Eight);
            let mut png_writer = encoder.write_header().map_err(png_err)?;
            png_writer.write_image_data(&buf.pixels).map_err(png_err)?;
            png_writer.finish().map_err(png_err)?;
        }
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Reads a binary P6 file with maxval 255; the histogram is left empty.
pub fn read_ppm(path: &Path) -> Result<ImageBuffer> {
    let mut bytes = Vec::new();
    File::open(path).and_then(|mut f| f.read_to_end(&mut bytes)).map_err(|e| Error::io(path, e))?;
    let bad = || Error::InvalidArgument(format!("{} is not a binary PPM", path.display()));
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad());
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad())?.to_string());
    }
    pos += 1;
    if fields[0] != "P6" || fields[3] != "255" {
        return Err(bad());
    }
    let width: usize = fields[1].parse().map_err(|_| bad())?;
    let height: usize = fields[2].parse().map_err(|_| bad())?;
    let data = bytes.get(pos..pos + 3 * width * height).ok_or_else(bad)?;
    Ok(ImageBuffer { width, height, pixels: data.to_vec(), histogram: ClassHistogram::default() })
}
