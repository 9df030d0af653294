//! Deterministic rendering of drawings: an SVG document model with
//! byte-stable serialization, and a self-contained rasterizer producing
//! lossless PNGs (node labels use an embedded digit font, so output never
//! depends on system fonts).

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::layout::Drawing;
use image::{ImageEncoder, RgbImage};
use serde::{Deserialize, Serialize};

/// sRGB color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Color(pub u8, pub u8, pub u8);

impl Color {
    pub const BLACK: Color = Color(0, 0, 0);
    pub const WHITE: Color = Color(255, 255, 255);

    fn hex(&self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.0, self.1, self.2)
    }
}

/// Rendering parameters. Sizes are in output pixels; the drawing is scaled
/// to fit `raster_width` with height following the bounding-box aspect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderStyle {
    pub raster_width: u32,
    pub node_radius: f64,
    pub font_size: f64,
    /// Labels must render at least this large; the LLM has to read them.
    pub min_label_font: f64,
    pub edge_stroke: f64,
    pub node_stroke: f64,
    pub background: Color,
    pub ink: Color,
    pub node_fill: Color,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            raster_width: 1024,
            node_radius: 14.0,
            font_size: 13.0,
            min_label_font: 8.0,
            edge_stroke: 1.8,
            node_stroke: 1.8,
            background: Color::WHITE,
            ink: Color::BLACK,
            node_fill: Color::WHITE,
        }
    }
}

impl RenderStyle {
    fn check(&self) -> Result<()> {
        if self.raster_width == 0 {
            return Err(Error::Render("raster width must be positive".into()));
        }
        if self.node_radius <= 0.0 || self.font_size <= 0.0 {
            return Err(Error::Render("node radius and font size must be positive".into()));
        }
        if self.font_size < self.min_label_font {
            return Err(Error::Render(format!(
                "label font {}px below the configured minimum {}px",
                self.font_size, self.min_label_font
            )));
        }
        Ok(())
    }
}

/// Scene elements in paint order.
#[derive(Debug, Clone, PartialEq)]
pub enum SvgElement {
    Polyline {
        points: Vec<Point>,
        stroke: Color,
        width: f64,
    },
    Circle {
        center: Point,
        radius: f64,
        fill: Color,
        stroke: Color,
        width: f64,
    },
    Label {
        center: Point,
        text: String,
        size: f64,
        color: Color,
    },
}

/// A rendered vector scene; serializes byte-identically for equal inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgDocument {
    pub width: u32,
    pub height: u32,
    pub background: Color,
    pub elements: Vec<SvgElement>,
}

impl SvgDocument {
    pub fn circle_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, SvgElement::Circle { .. }))
            .count()
    }

    pub fn polyline_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, SvgElement::Polyline { .. }))
            .count()
    }

    /// SVG 1.1 serialization with fixed 2-decimal coordinates.
    pub fn to_svg_string(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            w = self.width,
            h = self.height
        ));
        out.push_str(&format!(
            "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
            self.width,
            self.height,
            self.background.hex()
        ));
        for el in &self.elements {
            match el {
                SvgElement::Polyline { points, stroke, width } => {
                    let pts: Vec<String> =
                        points.iter().map(|p| format!("{},{}", fmt(p.x), fmt(p.y))).collect();
                    out.push_str(&format!(
                        "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"{}\"/>\n",
                        stroke.hex(),
                        fmt(*width),
                        pts.join(" ")
                    ));
                }
                SvgElement::Circle {
                    center,
                    radius,
                    fill,
                    stroke,
                    width,
                } => {
                    out.push_str(&format!(
                        "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>\n",
                        fmt(center.x),
                        fmt(center.y),
                        fmt(*radius),
                        fill.hex(),
                        stroke.hex(),
                        fmt(*width)
                    ));
                }
                SvgElement::Label { center, text, size, color } => {
                    out.push_str(&format!(
                        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"{}\" text-anchor=\"middle\" dominant-baseline=\"central\" fill=\"{}\">{}</text>\n",
                        fmt(center.x),
                        fmt(center.y),
                        fmt(*size),
                        color.hex(),
                        text
                    ));
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

fn fmt(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v }; // normalize -0
    format!("{v:.2}")
}

/// Renders a drawing into the SVG scene: every node as a labeled circle,
/// every route as its polyline. Output is a pure function of the inputs.
pub fn render_svg(drawing: &Drawing, style: &RenderStyle) -> Result<SvgDocument> {
    style.check()?;
    let bbox = drawing.bbox;
    let (w, h) = (bbox.width(), bbox.height());
    if !(w.is_finite() && h.is_finite()) || w <= 0.0 || h <= 0.0 {
        return Err(Error::Render(format!(
            "degenerate bounding box {w} x {h}"
        )));
    }
    let width = style.raster_width;
    let height = ((width as f64) / (w / h)).round().max(1.0) as u32;
    let sx = width as f64 / w;
    let sy = height as f64 / h;
    let map = |p: &Point| Point::new((p.x - bbox.min_x) * sx, (p.y - bbox.min_y) * sy);

    let mut elements = Vec::new();
    for route in &drawing.routes {
        elements.push(SvgElement::Polyline {
            points: route.points.iter().map(&map).collect(),
            stroke: style.ink,
            width: style.edge_stroke,
        });
    }
    for (v, pos) in drawing.positions.iter().enumerate() {
        let center = map(pos);
        elements.push(SvgElement::Circle {
            center,
            radius: style.node_radius,
            fill: style.node_fill,
            stroke: style.ink,
            width: style.node_stroke,
        });
        elements.push(SvgElement::Label {
            center,
            text: v.to_string(),
            size: style.font_size,
            color: style.ink,
        });
    }
    Ok(SvgDocument {
        width,
        height,
        background: style.background,
        elements,
    })
}

/// Rasterizes the scene to a lossless PNG. Width is exactly the document
/// width; labels are drawn with the embedded digit font.
pub fn rasterize(doc: &SvgDocument, style: &RenderStyle) -> Result<Vec<u8>> {
    style.check()?;
    if doc.width == 0 || doc.height == 0 {
        return Err(Error::Render("cannot rasterize an empty canvas".into()));
    }
    let mut img = RgbImage::from_pixel(
        doc.width,
        doc.height,
        image::Rgb([doc.background.0, doc.background.1, doc.background.2]),
    );
    for el in &doc.elements {
        match el {
            SvgElement::Polyline { points, stroke, width } => {
                for seg in points.windows(2) {
                    stamp_segment(&mut img, seg[0], seg[1], *width / 2.0, *stroke);
                }
            }
            SvgElement::Circle {
                center,
                radius,
                fill,
                stroke,
                width,
            } => {
                draw_circle(&mut img, *center, *radius, *fill, *stroke, *width);
            }
            SvgElement::Label { center, text, size, color } => {
                draw_label(&mut img, *center, text, *size, *color);
            }
        }
    }
    let mut png = Vec::new();
    image::codecs::png::PngEncoder::new(&mut png)
        .write_image(img.as_raw(), doc.width, doc.height, image::ExtendedColorType::Rgb8)
        .map_err(|e| Error::Render(format!("png encoding: {e}")))?;
    Ok(png)
}

fn put(img: &mut RgbImage, x: i64, y: i64, c: Color) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, image::Rgb([c.0, c.1, c.2]));
    }
}

/// Thick line as a sequence of filled discs along the segment.
fn stamp_segment(img: &mut RgbImage, a: Point, b: Point, radius: f64, color: Color) {
    let len = a.distance(&b);
    let steps = (len * 2.0).ceil() as usize + 1;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let cx = a.x + (b.x - a.x) * t;
        let cy = a.y + (b.y - a.y) * t;
        stamp_disc(img, cx, cy, radius.max(0.5), color);
    }
}

fn stamp_disc(img: &mut RgbImage, cx: f64, cy: f64, r: f64, color: Color) {
    let (x0, x1) = ((cx - r).floor() as i64, (cx + r).ceil() as i64);
    let (y0, y1) = ((cy - r).floor() as i64, (cy + r).ceil() as i64);
    for y in y0..=y1 {
        for x in x0..=x1 {
            let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
            if dx * dx + dy * dy <= r * r {
                put(img, x, y, color);
            }
        }
    }
}

fn draw_circle(img: &mut RgbImage, c: Point, r: f64, fill: Color, stroke: Color, width: f64) {
    let outer = r + width / 2.0;
    let inner = r - width / 2.0;
    let (x0, x1) = ((c.x - outer).floor() as i64, (c.x + outer).ceil() as i64);
    let (y0, y1) = ((c.y - outer).floor() as i64, (c.y + outer).ceil() as i64);
    for y in y0..=y1 {
        for x in x0..=x1 {
            let (dx, dy) = (x as f64 + 0.5 - c.x, y as f64 + 0.5 - c.y);
            let d = (dx * dx + dy * dy).sqrt();
            if d <= outer {
                let col = if d >= inner { stroke } else { fill };
                put(img, x, y, col);
            }
        }
    }
}

// 5x7 bitmap digits; each row is 5 bits, MSB left.
const DIGITS: [[u8; 7]; 10] = [
    [0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110],
    [0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110],
    [0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111],
    [0b11111, 0b00010, 0b00100, 0b00010, 0b00001, 0b10001, 0b01110],
    [0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010],
    [0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110],
    [0b00110, 0b01000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110],
    [0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000],
    [0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110],
    [0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00010, 0b01100],
];

fn draw_label(img: &mut RgbImage, center: Point, text: &str, size: f64, color: Color) {
    let scale = size / 7.0;
    let glyph_w = 5.0 * scale;
    let advance = glyph_w + scale; // one column of spacing
    let total_w = advance * text.len() as f64 - scale;
    let left = center.x - total_w / 2.0;
    let top = center.y - size / 2.0;
    for (i, ch) in text.chars().enumerate() {
        let Some(digit) = ch.to_digit(10) else {
            continue; // labels are numeric node ids
        };
        let glyph = &DIGITS[digit as usize];
        let gx = left + i as f64 * advance;
        let px0 = gx.round() as i64;
        let py0 = top.round() as i64;
        let w = (glyph_w.round() as i64).max(5);
        let h = (size.round() as i64).max(7);
        for py in 0..h {
            let row = ((py as f64 / h as f64) * 7.0).floor().min(6.0) as usize;
            for px in 0..w {
                let col = ((px as f64 / w as f64) * 5.0).floor().min(4.0) as usize;
                if glyph[row] & (1 << (4 - col)) != 0 {
                    put(img, px0 + px, py0 + py, color);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::random_connected_gnp;
    use crate::geometry::Rect;
    use crate::graph::Graph;
    use crate::layout::{layout_force_directed, layout_orthogonal, Paradigm};

    fn png_size(bytes: &[u8]) -> (u32, u32) {
        assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
        let w = u32::from_be_bytes(bytes[16..20].try_into().unwrap());
        let h = u32::from_be_bytes(bytes[20..24].try_into().unwrap());
        (w, h)
    }

    #[test]
    fn single_node_renders_one_circle_and_label() {
        let g = Graph::new(1, &[]).unwrap();
        let d = layout_force_directed(&g, 10, 0).unwrap();
        let doc = render_svg(&d, &RenderStyle::default()).unwrap();
        assert_eq!(doc.circle_count(), 1);
        let svg = doc.to_svg_string();
        assert!(svg.contains(">0</text>"));
    }

    #[test]
    fn k3_has_three_circles_and_three_lines() {
        let g = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let d = layout_force_directed(&g, 200, 1).unwrap();
        let doc = render_svg(&d, &RenderStyle::default()).unwrap();
        assert_eq!(doc.circle_count(), 3);
        assert_eq!(doc.polyline_count(), 3);
    }

    #[test]
    fn svg_output_is_byte_identical() {
        let g = random_connected_gnp(9, 0.3, 4);
        let d = layout_orthogonal(&g, 7).unwrap();
        let style = RenderStyle::default();
        let a = render_svg(&d, &style).unwrap().to_svg_string();
        let b = render_svg(&d, &style).unwrap().to_svg_string();
        assert_eq!(a.as_bytes(), b.as_bytes());
    }

    #[test]
    fn raster_width_and_aspect() {
        let style = RenderStyle::default();
        // Square padded bbox -> square raster.
        let mut d = layout_force_directed(&Graph::new(1, &[]).unwrap(), 5, 0).unwrap();
        d.bbox = Rect { min_x: 0.0, min_y: 0.0, max_x: 50.0, max_y: 50.0 };
        let doc = render_svg(&d, &style).unwrap();
        let png = rasterize(&doc, &style).unwrap();
        assert_eq!(png_size(&png), (1024, 1024));
        // 2:1 padded bbox -> 1024 x 512.
        d.bbox = Rect { min_x: 0.0, min_y: 0.0, max_x: 100.0, max_y: 50.0 };
        d.positions[0] = crate::geometry::Point::new(50.0, 25.0);
        let doc = render_svg(&d, &style).unwrap();
        let png = rasterize(&doc, &style).unwrap();
        assert_eq!(png_size(&png), (1024, 512));
    }

    #[test]
    fn raster_is_pixel_identical_across_runs() {
        let g = random_connected_gnp(8, 0.35, 2);
        let style = RenderStyle::default();
        let d1 = layout_force_directed(&g, 300, 5).unwrap();
        let d2 = layout_force_directed(&g, 300, 5).unwrap();
        let a = rasterize(&render_svg(&d1, &style).unwrap(), &style).unwrap();
        let b = rasterize(&render_svg(&d2, &style).unwrap(), &style).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_bbox_is_an_error() {
        let g = Graph::new(1, &[]).unwrap();
        let mut d = layout_force_directed(&g, 5, 0).unwrap();
        d.bbox = Rect { min_x: 0.0, min_y: 0.0, max_x: 0.0, max_y: 10.0 };
        assert!(render_svg(&d, &RenderStyle::default()).is_err());
    }

    #[test]
    fn style_validation() {
        let mut style = RenderStyle::default();
        style.font_size = 4.0; // below min_label_font
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let d = layout_force_directed(&g, 10, 0).unwrap();
        assert!(render_svg(&d, &style).is_err());
        style.font_size = 13.0;
        style.raster_width = 0;
        assert!(render_svg(&d, &style).is_err());
    }

    #[test]
    fn separated_nodes_render_disjoint_glyphs() {
        // If layout-space min distance maps to >= 2 * node_radius px, the
        // rendered circles cannot overlap.
        let g = random_connected_gnp(10, 0.25, 9);
        let d = layout_orthogonal(&g, 3).unwrap();
        let style = RenderStyle::default();
        let doc = render_svg(&d, &style).unwrap();
        let centers: Vec<Point> = doc
            .elements
            .iter()
            .filter_map(|e| match e {
                SvgElement::Circle { center, .. } => Some(*center),
                _ => None,
            })
            .collect();
        let scale = doc.width as f64 / d.bbox.width();
        let min_layout_dist = {
            let mut min = f64::INFINITY;
            for i in 0..d.positions.len() {
                for j in (i + 1)..d.positions.len() {
                    min = min.min(d.positions[i].distance(&d.positions[j]));
                }
            }
            min
        };
        if min_layout_dist * scale >= 2.0 * style.node_radius {
            for i in 0..centers.len() {
                for j in (i + 1)..centers.len() {
                    assert!(centers[i].distance(&centers[j]) >= 2.0 * style.node_radius - 1e-6);
                }
            }
        }
        assert_eq!(d.paradigm, Paradigm::Orthogonal);
    }
}
