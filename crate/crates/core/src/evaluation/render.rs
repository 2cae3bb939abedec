use std::fmt::Write;

use crate::error::{Error, Result};
use crate::geometry::{PolygonM, Ring};
use crate::ingest::Block;
use crate::metrics::PearsonMatrix;

/// Pixels per neuron in encoding maps.
pub const ENCODING_CELL_PX: usize = 16;

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Per-neuron lightness `1 − d_j / max_j d_j`; all white when every distance is 0.
pub fn encoding_lightness(values: &[f64]) -> Vec<f64> {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return vec![1.0; values.len()];
    }
    values.iter().map(|d| 1.0 - d / max).collect()
}

/// 8-bit grayscale PNG of an encoding laid out on the `rows × cols` grid.
pub fn encoding_png(values: &[f64], rows: usize, cols: usize) -> Result<Vec<u8>> {
    if values.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            found: values.len(),
        });
    }
    let light = encoding_lightness(values);
    let (w, h) = (cols * ENCODING_CELL_PX, rows * ENCODING_CELL_PX);
    let mut pixels = vec![0u8; w * h];
    for (py, row) in pixels.chunks_exact_mut(w).enumerate() {
        let r = py / ENCODING_CELL_PX;
        for (px, p) in row.iter_mut().enumerate() {
            *p = (light[r * cols + px / ENCODING_CELL_PX] * 255.0).round() as u8;
        }
    }
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, w as u32, h as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut writer = enc
            .write_header()
            .map_err(|e| Error::InvalidConfig(format!("png: {e}")))?;
        writer
            .write_image_data(&pixels)
            .map_err(|e| Error::InvalidConfig(format!("png: {e}")))?;
    }
    Ok(out)
}

/// Diverging scale: −1 blue, 0 white, +1 red.
pub fn diverging_rgb(r: f64) -> [u8; 3] {
    const NEG: [f64; 3] = [33.0, 102.0, 172.0];
    const POS: [f64; 3] = [178.0, 24.0, 43.0];
    let t = r.clamp(-1.0, 1.0);
    let end = if t < 0.0 { NEG } else { POS };
    let a = t.abs();
    end.map(|c| (255.0 + (c - 255.0) * a).round() as u8)
}

pub fn pearson_csv(m: &PearsonMatrix) -> String {
    let mut s = String::from("indicator");
    for i in &m.indicators {
        let _ = write!(s, ",{i}");
    }
    s.push('\n');
    for (i, row) in m.indicators.iter().zip(&m.values) {
        s.push_str(i.abbrev());
        for v in row {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

pub fn pearson_svg(m: &PearsonMatrix) -> String {
    const C: f64 = 40.0;
    const PAD: f64 = 60.0;
    let n = m.indicators.len() as f64;
    let side = PAD + n * C;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}" font-family="sans-serif" font-size="10">"#
    );
    for (k, i) in m.indicators.iter().enumerate() {
        let at = PAD + (k as f64 + 0.5) * C;
        let _ = writeln!(s, r#"<text x="{at}" y="{}" text-anchor="middle">{i}</text>"#, PAD - 8.0);
        let _ = writeln!(s, r#"<text x="{}" y="{at}" text-anchor="end" dominant-baseline="middle">{i}</text>"#, PAD - 6.0);
    }
    for (r, row) in m.values.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            let [red, green, blue] = diverging_rgb(v);
            let (x, y) = (PAD + c as f64 * C, PAD + r as f64 * C);
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{C}" height="{C}" fill="rgb({red},{green},{blue})"><title>{} / {}: {v:.4}</title></rect><text x="{}" y="{}" text-anchor="middle" dominant-baseline="middle">{v:.2}</text>"#,
                m.indicators[r],
                m.indicators[c],
                x + C / 2.0,
                y + C / 2.0
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn ring_path(ring: &Ring, map: &impl Fn(f64, f64) -> (f64, f64), out: &mut String) {
    for (k, p) in ring.vertices().iter().enumerate() {
        let (x, y) = map(p.x, p.y);
        let _ = write!(out, "{}{x:.2},{y:.2}", if k == 0 { "M" } else { "L" });
    }
    out.push('Z');
}

fn polygon_path(p: &PolygonM, map: &impl Fn(f64, f64) -> (f64, f64)) -> String {
    let mut d = String::new();
    ring_path(p.outer(), map, &mut d);
    for h in p.holes() {
        ring_path(h, map, &mut d);
    }
    d
}

/// SVG elements drawing `block` fitted into a `size × size` box: the block
/// outline plus footprints shaded darker with height.
pub fn block_paths(block: &Block, size: f64, margin: f64) -> String {
    let (lo, hi) = block.boundary.bounds();
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let scale = (size - 2.0 * margin) / span;
    let (ox, oy) = (
        margin + (size - 2.0 * margin - (hi.x - lo.x) * scale) / 2.0,
        margin + (size - 2.0 * margin - (hi.y - lo.y) * scale) / 2.0,
    );
    let map = |x: f64, y: f64| (ox + (x - lo.x) * scale, size - oy - (y - lo.y) * scale);
    let top = block.buildings.iter().map(|b| b.height).fold(0.0, f64::max).max(1.0);
    let mut s = format!(
        r##"<path d="{}" fill="#ffffff" fill-opacity="0.85" stroke="#444" stroke-width="0.6" fill-rule="evenodd"/>"##,
        polygon_path(&block.boundary, &map)
    );
    for b in &block.buildings {
        let g = (200.0 - 160.0 * (b.height / top)).round() as u8;
        let _ = write!(
            s,
            r#"<path d="{}" fill="rgb({g},{g},{g})" fill-rule="evenodd"/>"#,
            polygon_path(&b.footprint, &map)
        );
    }
    s
}

/// Standalone SVG thumbnail of one block.
pub fn block_svg(block: &Block, size: f64) -> String {
    format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">{}</svg>"#,
        block_paths(block, size, 4.0)
    )
}
