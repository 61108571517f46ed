use super::svg::{num, Frame, Svg};
use super::{RenderConfig, RenderError};
use crate::dataset::Observation;
use crate::geometry::Vec2;

const ENTITY_COLORS: [&str; 2] = ["#4c72b0", "#dd8452"];

/// Grouped bar chart for one pair: a group per variable, a bar per entity.
///
/// Both groups share the pixel area but not the value scale; each variable
/// is scaled to its own maximum so the visual order inside a group is what
/// matters. Values below zero are clipped to a zero-height bar.
pub fn render_pair_bars(
    a: &Observation,
    b: &Observation,
    names: (&str, &str),
    config: &RenderConfig,
) -> Result<String, RenderError> {
    config.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(RenderError::InvalidConfig("bar values must be finite".into()));
    }
    let (w, h, m) = (config.width as f64, config.height as f64, config.margin as f64);
    let mut svg = Svg::new(config.width, config.height);
    svg.rect("canvas", 0.0, 0.0, w, h, "#ffffff", "");
    svg.text("title", (w / 2.0, m * 0.55), "middle", 14.0, &format!("{} vs {}", a.label, b.label), "");

    let frame = Frame::new((0.0, 2.0), (0.0, 1.0), (m, m, w - 2.0 * m, h - 2.0 * m));
    let groups = [(names.0, a.x, b.x), (names.1, a.y, b.y)];
    for (g, (name, va, vb)) in groups.into_iter().enumerate() {
        svg.open_group("bar-group");
        let top = va.max(vb).max(0.0);
        let scale = if top > 0.0 { 1.0 / top } else { 0.0 };
        for (k, value) in [va, vb].into_iter().enumerate() {
            let x0 = g as f64 + 0.15 + 0.35 * k as f64;
            let height = value.max(0.0) * scale;
            let (px, py) = frame.to_px(Vec2::new(x0, height));
            let (px1, base) = frame.to_px(Vec2::new(x0 + 0.33, 0.0));
            svg.rect(
                "bar",
                px,
                py,
                px1 - px,
                base - py,
                ENTITY_COLORS[k],
                &format!(" data-entity=\"{k}\" data-value=\"{}\"", num(value)),
            );
            svg.text("bar-value", ((px + px1) / 2.0, py - 4.0), "middle", 11.0, &num(value), "");
        }
        let (cx, base) = frame.to_px(Vec2::new(g as f64 + 0.5, 0.0));
        svg.text("axis-label", (cx, base + 18.0), "middle", 12.0, name, "");
        svg.close_group();
    }
    svg.line("axis", (frame.left, frame.bottom()), (frame.right(), frame.bottom()), "#444444", 1.0, "");

    svg.open_group("legend");
    for (k, label) in [&a.label, &b.label].into_iter().enumerate() {
        let y = m + 8.0 + 18.0 * k as f64;
        svg.rect("legend-swatch", w - m - 110.0, y - 10.0, 12.0, 12.0, ENTITY_COLORS[k], "");
        svg.text("legend-label", (w - m - 92.0, y), "start", 12.0, label, "");
    }
    svg.close_group();
    Ok(svg.finish())
}
