//! Deterministic SVG rendering of path statistics.
//!
//! Draws the ensemble mean path with its one-standard-deviation covariance
//! ellipses, optionally over the scenario geometry (obstacles, features,
//! corridor edges). Output bytes are a pure function of the inputs: floats
//! are formatted with fixed precision and elements are emitted in a fixed
//! order, so renders diff cleanly and reproduce byte-identically.

use std::fmt::Write as _;

use nalgebra::Vector2;

use crate::analysis::PathStatistics;
use crate::strategy::{FeatureKind, Scenario};

const SCALE: f64 = 60.0; // pixels per meter
const MARGIN: f64 = 1.0; // meters around the data

struct Frame {
    min: Vector2<f64>,
    max: Vector2<f64>,
}

impl Frame {
    fn map(&self, p: Vector2<f64>) -> (f64, f64) {
        // Flip y so +y (toward the upper corridor edge) points up on screen.
        (
            (p.x - self.min.x) * SCALE,
            (self.max.y - p.y) * SCALE,
        )
    }

    fn width(&self) -> f64 {
        (self.max.x - self.min.x) * SCALE
    }

    fn height(&self) -> f64 {
        (self.max.y - self.min.y) * SCALE
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

/// Render statistics (and optionally the scenario) to an SVG document.
pub fn render_stats(stats: &PathStatistics, scenario: Option<&Scenario>) -> String {
    let mut min = Vector2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Vector2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    fn grow(min: &mut Vector2<f64>, max: &mut Vector2<f64>, p: Vector2<f64>) {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        max.x = max.x.max(p.x);
        max.y = max.y.max(p.y);
    }
    for p in &stats.mean_points {
        grow(&mut min, &mut max, *p);
    }
    if let Some(s) = scenario {
        let (bmin, bmax) = s.bounds_box();
        grow(&mut min, &mut max, bmin);
        grow(&mut min, &mut max, bmax);
    }
    if !min.x.is_finite() {
        grow(&mut min, &mut max, Vector2::zeros());
    }
    min -= Vector2::new(MARGIN, MARGIN);
    max += Vector2::new(MARGIN, MARGIN);
    let frame = Frame { min, max };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt(frame.width()),
        fmt(frame.height()),
        fmt(frame.width()),
        fmt(frame.height()),
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    if let Some(s) = scenario {
        render_scenario(&mut svg, s, &frame);
    }

    // Covariance ellipses at one standard deviation.
    for (center, ell) in stats.mean_points.iter().zip(&stats.ellipses) {
        let (cx, cy) = frame.map(*center);
        // Screen y is flipped, so the axis angle negates.
        let angle = -ell.major_dir.y.atan2(ell.major_dir.x).to_degrees();
        let _ = writeln!(
            svg,
            r#"<ellipse cx="0" cy="0" rx="{}" ry="{}" transform="translate({} {}) rotate({})" fill="none" stroke="blue" stroke-width="0.6"/>"#,
            fmt(ell.major_len * SCALE),
            fmt(ell.minor_len * SCALE),
            fmt(cx),
            fmt(cy),
            fmt(angle),
        );
    }

    // Mean path on top.
    let points: Vec<String> = stats
        .mean_points
        .iter()
        .map(|p| {
            let (x, y) = frame.map(*p);
            format!("{},{}", fmt(x), fmt(y))
        })
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline points="{}" fill="none" stroke="red" stroke-width="2"/>"#,
        points.join(" ")
    );

    svg.push_str("</svg>\n");
    svg
}

fn render_scenario(svg: &mut String, scenario: &Scenario, frame: &Frame) {
    for edge in [&scenario.corridor_bounds.upper, &scenario.corridor_bounds.lower] {
        let points: Vec<String> = edge
            .iter()
            .map(|p| {
                let (x, y) = frame.map(Vector2::new(p[0], p[1]));
                format!("{},{}", fmt(x), fmt(y))
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="gray" stroke-width="1" stroke-dasharray="6 4"/>"#,
            points.join(" ")
        );
    }
    for f in &scenario.features {
        let (x, y) = frame.map(f.point());
        match f.kind {
            FeatureKind::Obstacle => {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{}" cy="{}" r="6" fill="none" stroke="black" stroke-width="1.5"/>"#,
                    fmt(x),
                    fmt(y),
                );
            }
            FeatureKind::Tree | FeatureKind::MemorizedLandmark => {
                let _ = writeln!(
                    svg,
                    r#"<path d="M {} {} l -5 9 l 10 0 z" fill="none" stroke="green" stroke-width="1"/>"#,
                    fmt(x),
                    fmt(y - 6.0),
                );
            }
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="10" fill="black">{}</text>"#,
            fmt(x + 7.0),
            fmt(y - 7.0),
            f.id,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{ensemble_stats, PathStatistics};
    use crate::kinematics::{Sample, Trajectory, VehicleState};

    fn small_stats() -> PathStatistics {
        let trajs: Vec<Trajectory> = (0..20)
            .map(|i| {
                let y = 0.05 * i as f64;
                let mut t = Trajectory::new(format!("a{i}"), 0.0);
                for k in 0..40 {
                    let x = 0.1 * k as f64;
                    t.samples.push(Sample {
                        time: 0.01 * k as f64,
                        state: VehicleState::new(
                            nalgebra::Vector2::new(x, y + 0.01 * (k as f64).sin()),
                            nalgebra::Vector2::new(1.0, 0.0),
                            10.0,
                        )
                        .unwrap(),
                    });
                }
                t
            })
            .collect();
        ensemble_stats(&trajs, 0.1).unwrap()
    }

    #[test]
    fn render_is_deterministic_and_wellformed() {
        let stats = small_stats();
        let scenario = Scenario::default_corridor();
        let a = render_stats(&stats, Some(&scenario));
        let b = render_stats(&stats, Some(&scenario));
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert_eq!(a.matches("<ellipse").count(), stats.mean_points.len());
        assert!(a.contains("<polyline"));
    }

    #[test]
    fn render_without_scenario() {
        let stats = small_stats();
        let svg = render_stats(&stats, None);
        assert!(!svg.contains("<circle"));
        assert!(svg.contains("<polyline"));
    }
}
