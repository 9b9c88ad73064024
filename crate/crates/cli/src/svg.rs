//! Minimal standalone SVG bar charts for the confidence histograms:
//! one panel per (POS class, position), grouped bars per bin with one
//! color per error class.

use cliff_core::confcal::{
    HistogramTable, PosClass, TokenErrorClass, TokenPosition,
};

const ERROR_CLASSES: [TokenErrorClass; 4] = [
    TokenErrorClass::Extrinsic,
    TokenErrorClass::Intrinsic,
    TokenErrorClass::WorldKnowledge,
    TokenErrorClass::Correct,
];

const COLORS: [&str; 4] = ["#c0392b", "#e67e22", "#2980b9", "#27ae60"];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 360.0;
const MARGIN_LEFT: f64 = 48.0;
const MARGIN_BOTTOM: f64 = 42.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_RIGHT: f64 = 12.0;

/// Renders one histogram panel, or `None` when the panel has no counts.
pub fn histogram_svg(
    table: &HistogramTable,
    pos: PosClass,
    position: TokenPosition,
) -> Option<String> {
    let bins = table.bins();
    let series: Vec<&[u64]> = ERROR_CLASSES
        .iter()
        .map(|err| {
            table
                .counts(&(pos, *err, position))
                .unwrap_or(&[])
        })
        .collect();
    let max_count = series
        .iter()
        .flat_map(|s| s.iter())
        .copied()
        .max()
        .unwrap_or(0);
    if max_count == 0 {
        return None;
    }

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let group_w = plot_w / bins as f64;
    let bar_w = (group_w * 0.9) / ERROR_CLASSES.len() as f64;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"11\">\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"18\" font-size=\"14\">first-token probability — {} ({})</text>\n",
        MARGIN_LEFT,
        pos.as_str(),
        position.as_str()
    ));

    // axes
    let x0 = MARGIN_LEFT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"#333\"/>\n",
        x0 + plot_w
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{}\" x2=\"{x0}\" y2=\"{y0}\" stroke=\"#333\"/>\n",
        MARGIN_TOP
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">probability bin</text>\n",
        x0 + plot_w / 2.0,
        HEIGHT - 8.0
    ));

    // y-axis caps
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
        x0 - 6.0,
        MARGIN_TOP + 4.0,
        max_count
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">0</text>\n",
        x0 - 6.0,
        y0
    ));

    for b in 0..bins {
        let gx = x0 + b as f64 * group_w;
        // bin label at group center
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{:.1}</text>\n",
            gx + group_w / 2.0,
            y0 + 14.0,
            table.bin_edges[b]
        ));
        for (s, counts) in series.iter().enumerate() {
            let count = counts.get(b).copied().unwrap_or(0);
            if count == 0 {
                continue;
            }
            let h = plot_h * count as f64 / max_count as f64;
            let x = gx + group_w * 0.05 + s as f64 * bar_w;
            svg.push_str(&format!(
                "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"{bar_w:.2}\" height=\"{h:.2}\" fill=\"{}\"/>\n",
                y0 - h,
                COLORS[s]
            ));
        }
    }

    // legend
    for (s, err) in ERROR_CLASSES.iter().enumerate() {
        let lx = x0 + 8.0 + s as f64 * 140.0;
        svg.push_str(&format!(
            "<rect x=\"{lx}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
            MARGIN_TOP - 4.0,
            COLORS[s]
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            lx + 14.0,
            MARGIN_TOP + 5.0,
            err.as_str()
        ));
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cliff_core::confcal::confidence_histogram;
    use cliff_core::synth::synthetic_outputs;

    #[test]
    fn panels_render_for_populated_rows() {
        let table = confidence_histogram(&synthetic_outputs(), 10).unwrap();
        let svg = histogram_svg(&table, PosClass::Propn, TokenPosition::First).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("</svg>"));
        assert!(svg.contains("<rect"));
    }

    #[test]
    fn empty_panels_are_skipped() {
        let table = confidence_histogram(&[], 10).unwrap();
        assert!(histogram_svg(&table, PosClass::Verb, TokenPosition::Nonfirst).is_none());
    }
}
