//! SVG preview: one `<rect>` per block filled with its model's color, plus
//! the model glyph centered on top when it has one. Layout y grows upward,
//! so rows are flipped; the drawing has one unit of padding on every side.

use std::fmt::Write;

use super::{escape, EmitError};
use crate::fixed::Centi;
use crate::layout::Level;
use crate::style::ModelCatalog;

pub const SVG_PIXELS_PER_UNIT: i64 = 40;

const PAD: Centi = Centi(100);

pub fn render_svg(level: &Level, catalog: &ModelCatalog) -> Result<Vec<u8>, EmitError> {
    let (l, b, r, t) = level.bounds();
    let (vx, vw) = (l - PAD, r - l + PAD + PAD);
    let vh = t - b + PAD + PAD;
    // flip: layout y maps to (t + PAD) - y in view space
    let flip = |y: Centi| t + PAD - y;

    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        vw.0 * SVG_PIXELS_PER_UNIT / 100,
        vh.0 * SVG_PIXELS_PER_UNIT / 100,
        vx,
        Centi::ZERO,
        vw,
        vh
    )
    .unwrap();
    for blk in &level.blocks {
        let model = catalog
            .get(&blk.model)
            .ok_or_else(|| EmitError::UnknownModel(blk.model.clone()))?;
        writeln!(
            out,
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#222\" stroke-width=\"0.02\"><title>{}</title></rect>",
            blk.x,
            flip(blk.top()),
            blk.w,
            blk.h,
            escape(&model.fill),
            escape(&model.id)
        )
        .unwrap();
        if let Some(g) = &model.glyph {
            let size = Centi(blk.h.0.min(blk.w.0) * 7 / 10);
            writeln!(
                out,
                "  <text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\">{}</text>",
                Centi(blk.x.0 + blk.w.0 / 2),
                flip(Centi(blk.y.0 + blk.h.0 / 2)),
                size,
                escape(g)
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    Ok(out.into_bytes())
}
