//! End-to-end library use: CSV in, counts, geometry and SVG out. Golden
//! SVGs live in `tests/fixtures`; set `TAUGRAPH_BLESS=1` to rewrite them.

use std::path::PathBuf;

use taugraph::dataset::{parse_csv, write_csv, ColumnSpec, RankedDataset};
use taugraph::geometry::{GeometryDocument, Quadrant, TransformConfig};
use taugraph::kendall::{tau_b_brute, tau_b_fast, PairClass};
use taugraph::render::{plot, PlotStyle, RenderConfig};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn eight() -> RankedDataset {
    let raw = std::fs::read(fixture("eight.csv")).unwrap();
    parse_csv(&raw, &ColumnSpec::new("x0", "y0").with_label("name"))
        .unwrap()
        .dataset
}

fn golden(name: &str, actual: &str) {
    let path = fixture(name);
    if std::env::var_os("TAUGRAPH_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert!(expected == actual, "{name} differs from golden file");
}

#[test]
fn eight_counts() {
    let d = eight();
    let r = tau_b_brute(&d).unwrap();
    assert_eq!((r.counts.concordant, r.counts.discordant), (11, 17));
    assert_eq!(r.counts.total, 28);
    assert_eq!(r.tau, Some(-6.0 / 28.0));
    assert_eq!(tau_b_fast(&d).unwrap(), r);
}

#[test]
fn csv_round_trip_preserves_results() {
    let d = eight();
    let text = write_csv(&d);
    let back = parse_csv(text.as_bytes(), &ColumnSpec::new("x0", "y0").with_label("label"))
        .unwrap()
        .dataset;
    assert_eq!(back, d);
}

#[test]
fn geometry_semantics() {
    let doc = GeometryDocument::build(&eight(), &TransformConfig::default()).unwrap();
    assert_eq!(doc.segments.len(), 28);
    let pairs: Vec<_> = doc.segments.iter().map(|s| (s.i, s.j)).collect();
    let mut sorted = pairs.clone();
    sorted.sort();
    assert_eq!(pairs, sorted);
    for s in &doc.segments {
        match s.class {
            PairClass::Concordant => {
                assert!(matches!(s.quadrant, Quadrant::Q1 | Quadrant::Q2 | Quadrant::PosYAxis))
            }
            PairClass::Discordant => {
                assert!(matches!(s.quadrant, Quadrant::Q3 | Quadrant::Q4 | Quadrant::NegYAxis))
            }
            _ => unreachable!("no ties in this dataset"),
        }
        // x dominating |y| lands right of the y-axis
        assert_eq!(s.endpoint.x > 0.0, s.x > s.y.abs());
    }
    assert_eq!(doc.segment(3, 7).unwrap().dissimilarity, 98.0);
}

#[test]
fn golden_svgs() {
    let d = eight();
    let cfg = RenderConfig::default();
    for (name, tokens, config) in [
        ("eight_lines.svg", "lines", TransformConfig::default()),
        ("eight_segments.svg", "segments", TransformConfig::default()),
        ("eight_translated.svg", "segments,heatmap", TransformConfig::translate_only()),
        ("eight_clock.svg", "segments,clock", TransformConfig::default()),
        ("eight_density.svg", "density,points", TransformConfig::default()),
    ] {
        let style = PlotStyle::from_tokens(tokens).unwrap().with_transform(config);
        let svg = plot(&d, &style, &cfg).unwrap();
        assert_eq!(svg, plot(&d, &style, &cfg).unwrap());
        golden(name, &svg);
    }
}

#[test]
fn segment_count_law() {
    let cfg = RenderConfig::default();
    for m in [2usize, 3, 10, 25] {
        let x: Vec<f64> = (0..m).map(|i| ((i * 7) % m) as f64).collect();
        let y: Vec<f64> = (0..m).map(|i| ((i * 3 + 1) % m) as f64).collect();
        let d = RankedDataset::from_columns(&x, &y);
        let svg = plot(&d, &PlotStyle::from_tokens("segments,points").unwrap(), &cfg).unwrap();
        let n = m * (m - 1) / 2;
        assert_eq!(svg.matches("class=\"segment\"").count(), n);
        assert_eq!(svg.matches("class=\"endpoint\"").count(), n);
    }
}
