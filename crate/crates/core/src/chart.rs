//! Per-group rate chart: a tidy CSV plus a fixed-layout SVG bar chart.
//!
//! The SVG has one `<rect class="bar">` per (group, cause), a dashed line per
//! cause at the observed pooled rate and a solid line per cause at the
//! do-adjusted rate. Output depends only on the input, so repeated calls are
//! byte-identical.

use crate::adjust::DoTable;
use crate::report::format_full;
use crate::tables::StratifiedDataset;
use std::fmt::Write as _;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;
const COLORS: [&str; 2] = ["#4477aa", "#ee6677"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupChart {
    /// `group,cause,rate,weight` rows.
    pub csv: String,
    pub svg: String,
}

/// Round to three decimals for stable SVG coordinates.
fn coord(v: f64) -> String {
    let s = format!("{:.3}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn emit_group_chart(dataset: &StratifiedDataset, adjusted: &DoTable) -> GroupChart {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["group", "cause", "rate", "weight"])
        .expect("in-memory write");
    for (gi, g) in dataset.groups().iter().enumerate() {
        for (c, cause) in dataset.causes().iter().enumerate() {
            writer
                .write_record([
                    g.label.as_str(),
                    cause.as_str(),
                    &format_full(dataset.rate(gi, c)),
                    &format_full(dataset.weight(gi, c)),
                ])
                .expect("in-memory write");
        }
    }
    let csv = String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8");

    GroupChart {
        csv,
        svg: render_svg(dataset, adjusted),
    }
}

fn render_svg(dataset: &StratifiedDataset, adjusted: &DoTable) -> String {
    let groups = dataset.groups();
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let observed = [dataset.pooled_rate(0), dataset.pooled_rate(1)];

    let max_rate = (0..groups.len())
        .flat_map(|g| [dataset.rate(g, 0), dataset.rate(g, 1)])
        .chain(observed)
        .chain(adjusted.rates)
        .fold(0.0_f64, f64::max);
    let y_max = if max_rate > 0.0 { max_rate * 1.1 } else { 1.0 };
    let y = |v: f64| MARGIN_TOP + plot_h * (1.0 - v / y_max);

    let slot = plot_w / groups.len().max(1) as f64;
    let bar_w = slot * 0.35;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(s, r#"<rect class="background" x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{x}" y1="{top}" x2="{x}" y2="{bottom}" stroke="black"/>"#,
        x = MARGIN_LEFT,
        top = MARGIN_TOP,
        bottom = HEIGHT - MARGIN_BOTTOM
    );
    let _ = writeln!(
        s,
        r#"<line class="axis" x1="{left}" y1="{y}" x2="{right}" y2="{y}" stroke="black"/>"#,
        left = MARGIN_LEFT,
        right = WIDTH - MARGIN_RIGHT,
        y = HEIGHT - MARGIN_BOTTOM
    );
    for tick in 0..=4 {
        let v = y_max * tick as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text class="tick" x="{x}" y="{y}" font-size="10" text-anchor="end">{label}</text>"#,
            x = coord(MARGIN_LEFT - 5.0),
            y = coord(y(v) + 3.0),
            label = crate::report::format_sig(v)
        );
    }

    for (gi, g) in groups.iter().enumerate() {
        let left = MARGIN_LEFT + slot * gi as f64 + (slot - 2.0 * bar_w) / 2.0;
        for c in 0..2 {
            let rate = dataset.rate(gi, c);
            let top = y(rate);
            let _ = writeln!(
                s,
                r#"<rect class="bar" data-group="{group}" data-cause="{cause}" x="{x}" y="{y}" width="{w}" height="{h}" fill="{fill}"/>"#,
                group = escape(&g.label),
                cause = escape(&dataset.causes()[c]),
                x = coord(left + bar_w * c as f64),
                y = coord(top),
                w = coord(bar_w),
                h = coord(HEIGHT - MARGIN_BOTTOM - top),
                fill = COLORS[c]
            );
        }
        let _ = writeln!(
            s,
            r#"<text class="group-label" x="{x}" y="{y}" font-size="10" text-anchor="middle">{label}</text>"#,
            x = coord(MARGIN_LEFT + slot * (gi as f64 + 0.5)),
            y = coord(HEIGHT - MARGIN_BOTTOM + 14.0),
            label = escape(&g.label)
        );
    }

    for c in 0..2 {
        let cause = escape(&dataset.causes()[c]);
        let _ = writeln!(
            s,
            r#"<line class="observed" data-cause="{cause}" x1="{l}" y1="{y}" x2="{r}" y2="{y}" stroke="{color}" stroke-dasharray="6 4"/>"#,
            l = MARGIN_LEFT,
            r = WIDTH - MARGIN_RIGHT,
            y = coord(y(observed[c])),
            color = COLORS[c]
        );
        let _ = writeln!(
            s,
            r#"<line class="adjusted" data-cause="{cause}" x1="{l}" y1="{y}" x2="{r}" y2="{y}" stroke="{color}" stroke-width="2"/>"#,
            l = MARGIN_LEFT,
            r = WIDTH - MARGIN_RIGHT,
            y = coord(y(adjusted.rates[c])),
            color = COLORS[c]
        );
        let _ = writeln!(
            s,
            r#"<text class="legend" x="{x}" y="{y}" font-size="11" fill="{color}">{cause} (dashed: observed, solid: do-adjusted as {role})</text>"#,
            x = coord(MARGIN_LEFT + 250.0 * c as f64),
            y = coord(HEIGHT - 15.0),
            color = COLORS[c],
            role = adjusted.role_used
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adjust::do_adjust;
    use crate::builtin::{builtin, Builtin};
    use crate::tables::CausalRole;

    fn chart(name: &str) -> GroupChart {
        let Some(Builtin::Stratified(f)) = builtin(name) else {
            unreachable!()
        };
        let adj = do_adjust(&f.dataset, CausalRole::Confounder).unwrap();
        emit_group_chart(&f.dataset, &adj)
    }

    #[test]
    fn one_bar_per_group_and_cause() {
        assert_eq!(chart("kidney_stones").svg.matches(r#"class="bar""#).count(), 4);
        assert_eq!(chart("covid_cfr_by_age").svg.matches(r#"class="bar""#).count(), 22);
    }

    #[test]
    fn markers_present() {
        let c = chart("kidney_stones");
        assert_eq!(c.svg.matches(r#"class="observed""#).count(), 2);
        assert_eq!(c.svg.matches(r#"class="adjusted""#).count(), 2);
        assert!(c.svg.contains("stroke-dasharray"));
    }

    #[test]
    fn csv_rows() {
        let c = chart("kidney_stones");
        let lines: Vec<&str> = c.csv.lines().collect();
        assert_eq!(lines[0], "group,cause,rate,weight");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("small,x1,"));
    }

    #[test]
    fn deterministic() {
        assert_eq!(chart("covid_cfr_by_age"), chart("covid_cfr_by_age"));
    }

    #[test]
    fn coordinates_are_tidy() {
        assert_eq!(coord(12.0), "12");
        assert_eq!(coord(1.23456), "1.235");
        assert_eq!(coord(-0.0001), "0");
    }
}
