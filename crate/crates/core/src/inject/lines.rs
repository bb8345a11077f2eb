//! Broken electronics lines: full rows or columns forced to 0 or 255.

use std::collections::HashSet;

use super::params::{BrokenLine, BrokenLineParams, LineDirection, LineOrientation, Polarity, SensorArchitecture};
use crate::error::{Error, Result};
use crate::raster::{FaultMask, ImageRgbi};
use crate::rng::SeededRng;

/// Draws `count` distinct lines. Full-frame and frame-transfer CCDs take the
/// orientation that matches the image-wide readout `direction`; the other
/// sensors pick row or column per line. `white` fixes the number of white
/// lines, otherwise each polarity is a coin flip.
pub fn sample_broken_lines(
    count: usize,
    white: Option<usize>,
    sensor: SensorArchitecture,
    direction: LineDirection,
    dims: (usize, usize),
    rng: &mut SeededRng,
) -> Result<BrokenLineParams> {
    let (w, h) = dims;
    if let Some(k) = white {
        if k > count {
            return Err(Error::invalid(format!("{k} white lines requested out of {count}")));
        }
    }
    let forced = sensor.single_line_orientation().then(|| direction.line_orientation());
    let orientations: Vec<LineOrientation> = (0..count)
        .map(|_| {
            forced.unwrap_or_else(|| {
                if rng.bernoulli(0.5) {
                    LineOrientation::Row
                } else {
                    LineOrientation::Column
                }
            })
        })
        .collect();
    let n_rows = orientations.iter().filter(|&&o| o == LineOrientation::Row).count();
    let n_cols = count - n_rows;
    if n_rows > h || n_cols > w {
        return Err(Error::invalid(format!(
            "cannot place {n_rows} rows and {n_cols} columns in a {w}x{h} raster"
        )));
    }
    let mut rows = rng.distinct(h as u64, n_rows).into_iter();
    let mut cols = rng.distinct(w as u64, n_cols).into_iter();
    let polarities: Vec<Polarity> = match white {
        Some(k) => {
            let mut p: Vec<Polarity> = (0..count)
                .map(|i| if i < k { Polarity::White } else { Polarity::Black })
                .collect();
            rng.shuffle(&mut p);
            p
        }
        None => (0..count)
            .map(|_| if rng.bernoulli(0.5) { Polarity::White } else { Polarity::Black })
            .collect(),
    };
    let lines = orientations
        .into_iter()
        .zip(polarities)
        .map(|(orientation, polarity)| {
            let index = match orientation {
                LineOrientation::Row => rows.next(),
                LineOrientation::Column => cols.next(),
            }
            .expect("index pool sized to orientation counts") as usize;
            BrokenLine {
                orientation,
                index,
                polarity,
            }
        })
        .collect();
    Ok(BrokenLineParams { sensor, count, lines })
}

impl BrokenLineParams {
    pub fn validate(&self, dims: (usize, usize)) -> Result<()> {
        if self.count != self.lines.len() {
            return Err(Error::invalid(format!(
                "broken line count {} does not match {} records",
                self.count,
                self.lines.len()
            )));
        }
        if self.sensor.single_line_orientation() && self.has_mixed_orientation() {
            return Err(Error::invalid(format!(
                "{:?} cannot carry row and column line faults in one image",
                self.sensor
            )));
        }
        let mut seen = HashSet::new();
        for l in &self.lines {
            let limit = match l.orientation {
                LineOrientation::Row => dims.1,
                LineOrientation::Column => dims.0,
            };
            if l.index >= limit {
                return Err(Error::invalid(format!("{:?} {} outside raster", l.orientation, l.index)));
            }
            if !seen.insert((l.orientation, l.index)) {
                return Err(Error::invalid(format!("{:?} {} listed twice", l.orientation, l.index)));
            }
        }
        Ok(())
    }
}

/// Later lines overwrite earlier ones where a row and a column cross.
pub fn apply_broken_lines(img: &ImageRgbi, params: &BrokenLineParams) -> Result<(ImageRgbi, FaultMask)> {
    params.validate(img.dims())?;
    let (w, h) = img.dims();
    let mut out = img.clone();
    let mut mask = FaultMask::empty(w, h);
    for l in &params.lines {
        let px = [l.polarity.value(); 4];
        match l.orientation {
            LineOrientation::Row => (0..w).for_each(|x| {
                out.set(x, l.index, px);
                mask.set(x, l.index);
            }),
            LineOrientation::Column => (0..h).for_each(|y| {
                out.set(l.index, y, px);
                mask.set(l.index, y);
            }),
        }
    }
    Ok((out, mask))
}

pub fn inject_broken_lines(
    img: &ImageRgbi,
    params: &BrokenLineParams,
) -> Result<(ImageRgbi, FaultMask)> {
    apply_broken_lines(img, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(orientation: LineOrientation, index: usize, polarity: Polarity) -> BrokenLine {
        BrokenLine {
            orientation,
            index,
            polarity,
        }
    }

    #[test]
    fn full_frame_rejects_mixed() {
        let p = BrokenLineParams {
            sensor: SensorArchitecture::FullFrameCcd,
            count: 2,
            lines: vec![
                line(LineOrientation::Row, 3, Polarity::White),
                line(LineOrientation::Column, 3, Polarity::Black),
            ],
        };
        let img = ImageRgbi::new(16, 16, [9; 4]).unwrap();
        assert!(apply_broken_lines(&img, &p).is_err());
        let p = BrokenLineParams {
            sensor: SensorArchitecture::Cmos,
            ..p
        };
        assert!(apply_broken_lines(&img, &p).is_ok());
    }

    #[test]
    fn white_row_is_saturated() {
        let img = ImageRgbi::new(16, 8, [40, 50, 60, 50]).unwrap();
        let p = BrokenLineParams {
            sensor: SensorArchitecture::Cmos,
            count: 1,
            lines: vec![line(LineOrientation::Row, 5, Polarity::White)],
        };
        let (out, mask) = apply_broken_lines(&img, &p).unwrap();
        assert!((0..16).all(|x| out.get(x, 5) == [255; 4]));
        assert_eq!(mask.count(), 16);
    }

    #[test]
    fn fixed_polarity_counts() {
        let mut rng = SeededRng::new(4);
        let p = sample_broken_lines(5, Some(3), SensorArchitecture::Cmos, LineDirection::Up, (64, 64), &mut rng)
            .unwrap();
        assert_eq!((p.white_count(), p.black_count()), (3, 2));
        let img = ImageRgbi::new(64, 64, [100; 4]).unwrap();
        let (_, mask) = apply_broken_lines(&img, &p).unwrap();
        assert!(mask.count() >= 5 * 64 - 6);
    }

    #[test]
    fn orientation_follows_direction_on_full_frame() {
        let mut rng = SeededRng::new(8);
        for dir in LineDirection::ALL {
            let p = sample_broken_lines(5, None, SensorArchitecture::FrameTransferCcd, dir, (32, 32), &mut rng).unwrap();
            assert!(p.lines.iter().all(|l| l.orientation == dir.line_orientation()));
        }
    }
}
