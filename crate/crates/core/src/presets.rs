//! Built-in hole masks, scaled to the deployment area.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{Point, Polygon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HolePreset {
    None,
    /// A centered plus sign.
    Cross,
    /// Two separate axis-aligned blocks.
    TwoBlocks,
    /// A U-shaped notch open to the top edge of the hole region.
    UShape,
    /// An L-shaped hole in the lower-left quadrant.
    LShape,
    /// Four small squares scattered over the area.
    Scattered,
}

impl HolePreset {
    pub const ALL: [HolePreset; 6] = [
        HolePreset::None,
        HolePreset::Cross,
        HolePreset::TwoBlocks,
        HolePreset::UShape,
        HolePreset::LShape,
        HolePreset::Scattered,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HolePreset::None => "none",
            HolePreset::Cross => "cross",
            HolePreset::TwoBlocks => "two_blocks",
            HolePreset::UShape => "u_shape",
            HolePreset::LShape => "l_shape",
            HolePreset::Scattered => "scattered",
        }
    }

    /// Mask polygons for a `width` x `height` area.
    pub fn polygons(self, width: f64, height: f64) -> Vec<Polygon> {
        let p = |fx: f64, fy: f64| Point::new(fx * width, fy * height);
        let rect = |x0: f64, y0: f64, x1: f64, y1: f64| {
            Polygon::rect(x0 * width, y0 * height, x1 * width, y1 * height)
        };
        match self {
            HolePreset::None => Vec::new(),
            HolePreset::Cross => vec![Polygon::new(vec![
                p(0.4, 0.2),
                p(0.6, 0.2),
                p(0.6, 0.4),
                p(0.8, 0.4),
                p(0.8, 0.6),
                p(0.6, 0.6),
                p(0.6, 0.8),
                p(0.4, 0.8),
                p(0.4, 0.6),
                p(0.2, 0.6),
                p(0.2, 0.4),
                p(0.4, 0.4),
            ])],
            HolePreset::TwoBlocks => vec![rect(0.15, 0.2, 0.4, 0.75), rect(0.6, 0.3, 0.85, 0.6)],
            HolePreset::UShape => vec![Polygon::new(vec![
                p(0.25, 0.25),
                p(0.75, 0.25),
                p(0.75, 0.7),
                p(0.6, 0.7),
                p(0.6, 0.4),
                p(0.4, 0.4),
                p(0.4, 0.7),
                p(0.25, 0.7),
            ])],
            HolePreset::LShape => vec![Polygon::new(vec![
                p(0.2, 0.2),
                p(0.6, 0.2),
                p(0.6, 0.35),
                p(0.35, 0.35),
                p(0.35, 0.7),
                p(0.2, 0.7),
            ])],
            HolePreset::Scattered => vec![
                rect(0.2, 0.2, 0.3, 0.3),
                rect(0.65, 0.2, 0.75, 0.3),
                rect(0.2, 0.65, 0.3, 0.75),
                rect(0.6, 0.6, 0.75, 0.75),
            ],
        }
    }
}

impl fmt::Display for HolePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HolePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        HolePreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown hole preset `{s}`")))
    }
}
