//! Minimal SVG text builder and the data-to-pixel mapping.

use std::fmt::Write;

use crate::geometry::Vec2;

/// Formats with 6 significant digits, shortest form, no negative zero.
pub fn num(v: f64) -> String {
    if !v.is_finite() || v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{v:.5e}").parse().expect("valid float text");
    if rounded == 0.0 {
        "0".into()
    } else {
        rounded.to_string()
    }
}

pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
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

/// Affine map from a data rectangle onto a pixel viewport, y pointing up
/// in data space and down in pixel space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
}

impl Frame {
    pub fn new(
        x_range: (f64, f64),
        y_range: (f64, f64),
        viewport: (f64, f64, f64, f64),
    ) -> Self {
        let (left, top, width, height) = viewport;
        Self {
            x_range,
            y_range,
            left,
            top,
            width,
            height,
        }
    }

    /// A square data window `[-r, r]²` centered in the viewport with equal
    /// scale on both axes.
    pub fn square(r: f64, viewport: (f64, f64, f64, f64)) -> Self {
        let (left, top, width, height) = viewport;
        let side = width.min(height);
        Self::new(
            (-r, r),
            (-r, r),
            (left + (width - side) / 2.0, top + (height - side) / 2.0, side, side),
        )
    }

    fn sx(&self) -> f64 {
        self.width / (self.x_range.1 - self.x_range.0)
    }

    fn sy(&self) -> f64 {
        self.height / (self.y_range.1 - self.y_range.0)
    }

    pub fn to_px(&self, p: Vec2) -> (f64, f64) {
        (
            self.left + (p.x - self.x_range.0) * self.sx(),
            self.top + (self.y_range.1 - p.y) * self.sy(),
        )
    }

    pub fn from_px(&self, (px, py): (f64, f64)) -> Vec2 {
        Vec2::new(
            self.x_range.0 + (px - self.left) / self.sx(),
            self.y_range.1 - (py - self.top) / self.sy(),
        )
    }

    pub fn right(&self) -> f64 {
        self.left + self.width
    }

    pub fn bottom(&self) -> f64 {
        self.top + self.height
    }
}

/// Accumulates SVG markup.
pub struct Svg {
    buf: String,
}

impl Svg {
    pub fn new(width: u32, height: u32) -> Self {
        let mut buf = String::new();
        buf.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            buf,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
        );
        Self { buf }
    }

    pub fn raw(&mut self, markup: &str) {
        self.buf.push_str(markup);
        self.buf.push('\n');
    }

    pub fn open_group(&mut self, class: &str) {
        let _ = writeln!(self.buf, "<g class=\"{class}\">");
    }

    pub fn close_group(&mut self) {
        self.buf.push_str("</g>\n");
    }

    pub fn rect(&mut self, class: &str, x: f64, y: f64, w: f64, h: f64, fill: &str, extra: &str) {
        let _ = writeln!(
            self.buf,
            "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"{extra}/>",
            num(x),
            num(y),
            num(w.max(0.0)),
            num(h.max(0.0))
        );
    }

    pub fn line(&mut self, class: &str, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64, extra: &str) {
        let _ = writeln!(
            self.buf,
            "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"{}\"{extra}/>",
            num(a.0),
            num(a.1),
            num(b.0),
            num(b.1),
            num(width)
        );
    }

    pub fn circle(&mut self, class: &str, c: (f64, f64), r: f64, fill: &str, extra: &str) {
        let _ = writeln!(
            self.buf,
            "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"{extra}/>",
            num(c.0),
            num(c.1),
            num(r)
        );
    }

    pub fn path(&mut self, class: &str, points: &[(f64, f64)], closed: bool, stroke: &str, extra: &str) {
        let mut d = String::new();
        for (k, (x, y)) in points.iter().enumerate() {
            let _ = write!(d, "{}{},{}", if k == 0 { "M" } else { " L" }, num(*x), num(*y));
        }
        if closed {
            d.push_str(" Z");
        }
        let _ = writeln!(
            self.buf,
            "<path class=\"{class}\" d=\"{d}\" fill=\"none\" stroke=\"{stroke}\"{extra}/>"
        );
    }

    pub fn text(&mut self, class: &str, at: (f64, f64), anchor: &str, size: f64, content: &str, extra: &str) {
        let _ = writeln!(
            self.buf,
            "<text class=\"{class}\" x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"{}\"{extra}>{}</text>",
            num(at.0),
            num(at.1),
            num(size),
            escape(content)
        );
    }

    pub fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}
