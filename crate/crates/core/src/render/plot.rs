use super::contour::{contour_polylines, default_levels};
use super::kde::DensityGrid;
use super::svg::{num, Frame, Svg};
use super::{PlotStyle, RenderConfig, RenderError};
use crate::dataset::RankedDataset;
use crate::geometry::{
    dissimilarity_field_at, ClockVectors, TransformMode, TransformedSegment, Vec2,
};
use crate::kendall::{tau_b_brute_with_tolerance, PairCounts, TauResult};

const SHADE_CONCORDANT: &str = "#ffffff";
const SHADE_DISCORDANT: &str = "#d9d9d9";
const CLOCK_MEAN: &str = "#000000";
const CLOCK_SUMMARY: &str = "#d62728";
const FONT: f64 = 12.0;

/// Renders supplied layer inputs into a standalone SVG 1.1 document.
///
/// Every transformed-plane layer needs `segments` (they fix the plot
/// radius); `clock` and `grid` are needed by the clock and density layers.
/// When both untransformed lines and transformed layers are requested the
/// canvas is split into two panels, original data on the left.
pub fn render_svg(
    dataset: &RankedDataset,
    segments: Option<&[TransformedSegment]>,
    clock: Option<&ClockVectors>,
    grid: Option<&DensityGrid>,
    style: &PlotStyle,
    config: &RenderConfig,
) -> Result<String, RenderError> {
    if !style.has_any_layer() {
        return Err(RenderError::EmptyStyle);
    }
    config.validate()?;
    if style.has_transformed_layer() && segments.is_none() {
        let layer = if style.clock {
            "clock"
        } else if style.density {
            "density"
        } else if style.points {
            "points"
        } else if style.heatmap_background {
            "heatmap"
        } else {
            "segments"
        };
        return Err(RenderError::MissingLayer(layer));
    }
    if style.clock && clock.is_none() {
        return Err(RenderError::MissingLayer("clock"));
    }
    if style.density && grid.is_none() {
        return Err(RenderError::MissingLayer("density"));
    }
    if let Some(segs) = segments {
        if segs.len() as u64 != dataset.pair_count() {
            return Err(RenderError::InvalidConfig(format!(
                "{} segments supplied for {} pairs",
                segs.len(),
                dataset.pair_count()
            )));
        }
    }

    let tau = match segments {
        Some(segs) => TauResult::from_counts(PairCounts::from_classes(segs.iter().map(|s| s.pair.class))),
        None => tau_b_brute_with_tolerance(dataset, style.transform.tie_epsilon)
            .map_err(crate::geometry::GeometryError::from)?,
    };

    let (w, h, m) = (config.width as f64, config.height as f64, config.margin as f64);
    let mut svg = Svg::new(config.width, config.height);
    if !config.deterministic {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        svg.raw(&format!("<!-- rendered at unix time {secs} -->"));
    }
    svg.rect("canvas", 0.0, 0.0, w, h, "#ffffff", "");
    svg.text("title", (w / 2.0, m * 0.55), "middle", FONT * 1.2, &title(&tau), "");

    let inner = (m, m, w - 2.0 * m, h - 2.0 * m);
    let split = style.untransformed_lines && style.has_transformed_layer();
    let (data_vp, plane_vp) = if split {
        let half = (inner.2 - m) / 2.0;
        (
            (inner.0, inner.1, half, inner.3),
            (inner.0 + half + m, inner.1, half, inner.3),
        )
    } else {
        (inner, inner)
    };

    if style.untransformed_lines {
        draw_data_panel(&mut svg, dataset, segments, style, config, data_vp);
    }
    if style.has_transformed_layer() {
        let segs = segments.expect("checked above");
        draw_plane_panel(&mut svg, dataset, segs, clock, grid, style, config, plane_vp);
    }
    Ok(svg.finish())
}

fn title(tau: &TauResult) -> String {
    let t = match tau.tau {
        Some(t) => format!("τ = {t:.4}"),
        None => "τ undefined".into(),
    };
    let c = &tau.counts;
    format!(
        "{t}   c={} d={} t_x={} t_y={} t_xy={}",
        c.concordant, c.discordant, c.tie_x, c.tie_y, c.tie_xy
    )
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn draw_data_panel(
    svg: &mut Svg,
    dataset: &RankedDataset,
    segments: Option<&[TransformedSegment]>,
    style: &PlotStyle,
    config: &RenderConfig,
    viewport: (f64, f64, f64, f64),
) {
    let xs = dataset.xs();
    let ys = dataset.ys();
    let fold = |v: &[f64]| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let (x0, x1) = fold(&xs);
    let (y0, y1) = fold(&ys);
    let frame = Frame::new(padded_range(x0, x1), padded_range(y0, y1), viewport);

    svg.open_group("panel panel-data");
    svg.rect("frame", frame.left, frame.top, frame.width, frame.height, "#ffffff", " stroke=\"#444444\"");

    svg.open_group("layer-lines");
    let obs = &dataset.observations;
    let classes: Vec<_> = match segments {
        Some(segs) => segs.iter().map(|s| (s.pair.i, s.pair.j, s.pair.class)).collect(),
        None => {
            let eps = style.transform.tie_epsilon;
            (0..obs.len())
                .flat_map(|i| (i + 1..obs.len()).map(move |j| (i, j)))
                .map(|(i, j)| (i, j, crate::kendall::classify_pair_with_tolerance(&obs[i], &obs[j], eps)))
                .collect()
        }
    };
    for (i, j, class) in classes {
        let a = frame.to_px(Vec2::new(obs[i].x, obs[i].y));
        let b = frame.to_px(Vec2::new(obs[j].x, obs[j].y));
        svg.line(
            "pair-line",
            a,
            b,
            config.class_colors.get(class),
            1.0,
            &format!(" data-i=\"{i}\" data-j=\"{j}\" data-class=\"{class}\""),
        );
    }
    svg.close_group();

    svg.open_group("layer-observations");
    for (k, o) in obs.iter().enumerate() {
        svg.circle("observation", frame.to_px(Vec2::new(o.x, o.y)), 3.0, "#222222", &format!(" data-index=\"{k}\""));
    }
    svg.close_group();

    axis_labels(svg, &frame, &dataset.x_name, &dataset.y_name);
    tick_labels(svg, &frame);
    svg.close_group();
}

#[allow(clippy::too_many_arguments)]
fn draw_plane_panel(
    svg: &mut Svg,
    dataset: &RankedDataset,
    segments: &[TransformedSegment],
    clock: Option<&ClockVectors>,
    grid: Option<&DensityGrid>,
    style: &PlotStyle,
    config: &RenderConfig,
    viewport: (f64, f64, f64, f64),
) {
    let mode = style.transform.mode;
    let radius = segments.iter().map(|s| s.length).fold(0.0, f64::max);
    let radius = if radius > 0.0 { radius } else { 1.0 };
    let frame = Frame::square(1.05 * radius, viewport);
    let (ox, oy) = frame.to_px(Vec2::ZERO);

    svg.open_group("panel panel-plane");
    match mode {
        TransformMode::TranslateRotate => {
            svg.rect("region-concordant", frame.left, frame.top, frame.width, oy - frame.top, SHADE_CONCORDANT, "");
            svg.rect("region-discordant", frame.left, oy, frame.width, frame.bottom() - oy, SHADE_DISCORDANT, "");
        }
        TransformMode::TranslateOnly => {
            svg.rect("region", frame.left, frame.top, frame.width, frame.height, "#ffffff", "");
        }
    }

    svg.raw(&format!(
        "<clipPath id=\"plane-clip\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>",
        num(frame.left),
        num(frame.top),
        num(frame.width),
        num(frame.height)
    ));
    svg.raw("<g class=\"plane-content\" clip-path=\"url(#plane-clip)\">");

    if style.heatmap_background {
        svg.open_group("layer-heatmap");
        let n = config.heatmap_resolution;
        let r = frame.x_range.1;
        let cell = 2.0 * r / n as f64;
        let mut values = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let c = Vec2::new(-r + (i as f64 + 0.5) * cell, -r + (j as f64 + 0.5) * cell);
                values.push(dissimilarity_field_at(c, mode));
            }
        }
        let max = values.iter().copied().fold(0.0, f64::max);
        for j in 0..n {
            for i in 0..n {
                let v = values[j * n + i];
                let (px, py) = frame.to_px(Vec2::new(-r + i as f64 * cell, -r + (j + 1) as f64 * cell));
                let side = frame.width / n as f64;
                let t = if max > 0.0 { v / max } else { 0.0 };
                svg.rect("heatmap-cell", px, py, side, side, &config.palette.at(t), " shape-rendering=\"crispEdges\"");
            }
        }
        svg.close_group();
    }

    if let (true, Some(grid)) = (style.density, grid) {
        svg.open_group("layer-density");
        let levels = default_levels(grid, config.contour_levels);
        let n = levels.len();
        for (k, level) in contour_polylines(grid, &levels).into_iter().enumerate() {
            let t = if n > 1 { 0.15 + 0.7 * k as f64 / (n - 1) as f64 } else { 0.5 };
            let color = config.palette.at(t);
            for line in &level.polylines {
                let pts: Vec<(f64, f64)> = line.points.iter().map(|&p| frame.to_px(p)).collect();
                svg.path(
                    "contour",
                    &pts,
                    line.closed,
                    &color,
                    &format!(" stroke-width=\"1.5\" data-level=\"{}\"", num(level.level)),
                );
            }
        }
        svg.close_group();
    }

    svg.open_group("axes");
    svg.line("axis", (frame.left, oy), (frame.right(), oy), "#444444", 1.0, "");
    svg.line("axis", (ox, frame.top), (ox, frame.bottom()), "#444444", 1.0, "");
    svg.close_group();

    if style.segments {
        svg.open_group("layer-segments");
        for s in segments {
            let color = config.class_colors.get(s.pair.class);
            svg.line(
                "segment",
                (ox, oy),
                frame.to_px(s.endpoint),
                color,
                1.0,
                &format!(
                    " data-i=\"{}\" data-j=\"{}\" data-class=\"{}\"",
                    s.pair.i, s.pair.j, s.pair.class
                ),
            );
        }
        svg.close_group();
    }

    if style.points {
        svg.open_group("layer-points");
        for s in segments {
            svg.circle(
                "endpoint",
                frame.to_px(s.endpoint),
                2.5,
                config.class_colors.get(s.pair.class),
                &format!(" data-i=\"{}\" data-j=\"{}\"", s.pair.i, s.pair.j),
            );
        }
        svg.close_group();
    }

    if let (true, Some(clock)) = (style.clock, clock) {
        svg.open_group("layer-clock");
        let vectors = [
            ("concordant-mean", clock.concordant_mean, CLOCK_MEAN),
            ("discordant-mean", clock.discordant_mean, CLOCK_MEAN),
            ("summary", clock.summary, CLOCK_SUMMARY),
        ];
        for (kind, v, color) in vectors {
            if let Some(v) = v {
                svg.line(
                    "clock-vector",
                    (ox, oy),
                    frame.to_px(v.scale(radius)),
                    color,
                    3.0,
                    &format!(" stroke-linecap=\"round\" data-kind=\"{kind}\""),
                );
            }
        }
        svg.close_group();
    }
    svg.close_group();

    let suffix = match mode {
        TransformMode::TranslateOnly => "(t)",
        TransformMode::TranslateRotate => "(t+r)",
    };
    axis_labels(
        svg,
        &frame,
        &format!("{} {suffix}", dataset.x_name),
        &format!("{} {suffix}", dataset.y_name),
    );
    tick_labels(svg, &frame);
    svg.close_group();
}

fn axis_labels(svg: &mut Svg, frame: &Frame, x_label: &str, y_label: &str) {
    svg.text(
        "axis-label",
        (frame.left + frame.width / 2.0, frame.bottom() + 2.6 * FONT),
        "middle",
        FONT,
        x_label,
        "",
    );
    let (cx, cy) = (frame.left - 2.2 * FONT, frame.top + frame.height / 2.0);
    svg.text(
        "axis-label",
        (cx, cy),
        "middle",
        FONT,
        y_label,
        &format!(" transform=\"rotate(-90 {} {})\"", num(cx), num(cy)),
    );
}

fn tick_labels(svg: &mut Svg, frame: &Frame) {
    let y_text = frame.bottom() + 1.2 * FONT;
    svg.text("tick", (frame.left, y_text), "start", FONT * 0.85, &num(frame.x_range.0), "");
    svg.text("tick", (frame.right(), y_text), "end", FONT * 0.85, &num(frame.x_range.1), "");
    let x_text = frame.left - 0.4 * FONT;
    svg.text("tick", (x_text, frame.bottom()), "end", FONT * 0.85, &num(frame.y_range.0), "");
    svg.text("tick", (x_text, frame.top + FONT * 0.85), "end", FONT * 0.85, &num(frame.y_range.1), "");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{clock_vectors, transform_all, ClockMode, TransformConfig};
    use crate::kendall::tau_b_brute;
    use crate::render::{kde_grid, plot};

    fn eight() -> RankedDataset {
        RankedDataset::from_columns(
            &[20., 86., 35., 55., 60., 85., 8., 15.],
            &[40., 78., 80., 35., 25., 15., 19., 93.],
        )
    }

    fn count(svg: &str, class: &str) -> usize {
        svg.matches(&format!("class=\"{class}\"")).count()
    }

    fn style(tokens: &str) -> PlotStyle {
        PlotStyle::from_tokens(tokens).unwrap()
    }

    #[test]
    fn segment_and_point_counts() {
        let svg = plot(&eight(), &style("segments,points"), &RenderConfig::default()).unwrap();
        assert_eq!(count(&svg, "segment"), 28);
        assert_eq!(count(&svg, "endpoint"), 28);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn clock_has_three_strokes() {
        let svg = plot(&eight(), &style("clock"), &RenderConfig::default()).unwrap();
        assert_eq!(count(&svg, "clock-vector"), 3);
        assert_eq!(svg.matches(&format!("stroke=\"{CLOCK_MEAN}\" stroke-width=\"3\"")).count(), 2);
        assert_eq!(svg.matches(&format!("stroke=\"{CLOCK_SUMMARY}\"")).count(), 1);
    }

    #[test]
    fn class_colors_applied() {
        let cfg = RenderConfig::default();
        let svg = plot(&eight(), &style("segments"), &cfg).unwrap();
        for line in svg.lines().filter(|l| l.contains("class=\"segment\"")) {
            let class: crate::kendall::PairClass = attr(line, "data-class").parse().unwrap();
            assert_eq!(attr(line, "stroke"), cfg.class_colors.get(class));
        }
    }

    fn attr<'a>(line: &'a str, name: &str) -> &'a str {
        let key = format!(" {name}=\"");
        let start = line.find(&key).unwrap() + key.len();
        &line[start..start + line[start..].find('"').unwrap()]
    }

    #[test]
    fn deterministic_output() {
        let s = style("heatmap,density,segments,points,clock,lines");
        let a = plot(&eight(), &s, &RenderConfig::default()).unwrap();
        let b = plot(&eight(), &s, &RenderConfig::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(count(&a, "pair-line"), 28);
        assert_eq!(count(&a, "heatmap-cell"), 48 * 48);
        assert!(count(&a, "contour") > 0);
    }

    #[test]
    fn layer_order() {
        let a = plot(&eight(), &style("clock,points,segments,density,heatmap"), &RenderConfig::default()).unwrap();
        let pos = |g: &str| a.find(&format!("<g class=\"{g}\">")).unwrap();
        assert!(pos("layer-heatmap") < pos("layer-density"));
        assert!(pos("layer-density") < pos("layer-segments"));
        assert!(pos("layer-segments") < pos("layer-points"));
        assert!(pos("layer-points") < pos("layer-clock"));
    }

    #[test]
    fn shading_only_when_rotated() {
        let rotated = plot(&eight(), &style("segments"), &RenderConfig::default()).unwrap();
        assert_eq!(count(&rotated, "region-discordant"), 1);
        let s = style("segments").with_transform(TransformConfig::translate_only());
        let translated = plot(&eight(), &s, &RenderConfig::default()).unwrap();
        assert_eq!(count(&translated, "region-discordant"), 0);
    }

    #[test]
    fn missing_inputs() {
        let d = eight();
        let cfg = RenderConfig::default();
        assert_eq!(
            render_svg(&d, None, None, None, &style("clock"), &cfg),
            Err(RenderError::MissingLayer("clock"))
        );
        let segs = transform_all(&d, &TransformConfig::default()).unwrap();
        assert_eq!(
            render_svg(&d, Some(&segs), None, None, &style("clock"), &cfg),
            Err(RenderError::MissingLayer("clock"))
        );
        assert_eq!(
            render_svg(&d, Some(&segs), None, None, &style("density"), &cfg),
            Err(RenderError::MissingLayer("density"))
        );
        assert_eq!(
            render_svg(&d, None, None, None, &PlotStyle::default(), &cfg),
            Err(RenderError::EmptyStyle)
        );
    }

    #[test]
    fn direct_and_composed_agree() {
        let d = eight();
        let s = style("segments,density,clock");
        let cfg = RenderConfig::default();
        let segs = transform_all(&d, &s.transform).unwrap();
        let tau = tau_b_brute(&d).unwrap();
        let clock = clock_vectors(&segs, &tau, ClockMode::Calibrated).unwrap();
        let pts: Vec<_> = segs.iter().map(|s| s.endpoint).collect();
        let grid = kde_grid(&pts, cfg.density_resolution, cfg.density_resolution, None).unwrap();
        let direct = render_svg(&d, Some(&segs), Some(&clock), Some(&grid), &s, &cfg).unwrap();
        assert_eq!(direct, plot(&d, &s, &cfg).unwrap());
    }

    #[test]
    fn lines_only_uses_data_space() {
        let svg = plot(&eight(), &style("lines"), &RenderConfig::default()).unwrap();
        assert_eq!(count(&svg, "pair-line"), 28);
        assert_eq!(count(&svg, "observation"), 8);
        assert_eq!(count(&svg, "segment"), 0);
    }

    #[test]
    fn labels_are_escaped() {
        let mut d = eight();
        d.y_name = "R&D <%GDP>".into();
        let svg = plot(&d, &style("segments"), &RenderConfig::default()).unwrap();
        assert!(svg.contains("R&amp;D &lt;%GDP&gt; (t+r)"));
    }

    #[test]
    fn clock_in_translate_only_is_rejected() {
        let s = style("clock").with_transform(TransformConfig::translate_only());
        assert!(matches!(
            plot(&eight(), &s, &RenderConfig::default()),
            Err(RenderError::Geometry(_))
        ));
    }

    #[test]
    fn nondeterministic_flag_adds_timestamp() {
        let cfg = RenderConfig {
            deterministic: false,
            ..RenderConfig::default()
        };
        let svg = plot(&eight(), &style("segments"), &cfg).unwrap();
        assert!(svg.contains("<!-- rendered at unix time"));
    }
}
