//! Row-major 2D lattices and the normalized stimulus field.

use crate::error::{Error, Result};

/// Floor applied to every stimulus value. Neurons with zero stimulus never
/// fire, so dark pixels are lifted to this level.
pub const STIMULUS_FLOOR: f64 = 1e-3;

/// Dense row-major 2D array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

/// Real-valued image on the [0, 1] scale.
pub type Image = Grid<f64>;

impl<T: Clone> Grid<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }
}

impl<T> Grid<T> {
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} grid needs {} values, got {}",
                width,
                height,
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.width + col] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn same_dims<U>(&self, other: &Grid<U>) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub(crate) fn ensure_same_dims<U>(&self, other: &Grid<U>, what: &str) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{what}: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )))
        }
    }
}

impl Image {
    /// Quantize to 8-bit gray levels with rounding, clamping to [0, 255].
    pub fn to_gray_levels(&self) -> Grid<u8> {
        self.map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// External input of the network: one value per neuron in
/// [`STIMULUS_FLOOR`], 1].
#[derive(Clone, Debug, PartialEq)]
pub struct StimulusField {
    values: Image,
}

impl StimulusField {
    /// Wrap already-normalized values, rejecting anything outside
    /// [`STIMULUS_FLOOR`, 1].
    pub fn new(values: Image) -> Result<Self> {
        if let Some(bad) = values
            .as_slice()
            .iter()
            .find(|v| !v.is_finite() || **v < STIMULUS_FLOOR || **v > 1.0)
        {
            return Err(Error::InvalidParameter(format!(
                "stimulus value {bad} outside [{STIMULUS_FLOOR}, 1]"
            )));
        }
        Ok(Self { values })
    }

    /// Clamp arbitrary reals into the valid stimulus range. NaN maps to the floor.
    pub fn from_unit(values: &Image) -> Self {
        Self {
            values: values.map(|&v| clamp_stimulus(v)),
        }
    }

    /// 8-bit style gray values (0..=255, fractional allowed) to stimuli:
    /// `S = max(g / 255, 1e-3)`.
    pub fn from_gray(width: usize, height: usize, gray: &[f64]) -> Result<Self> {
        let grid = Grid::from_vec(
            width,
            height,
            gray.iter().map(|&g| gray_to_stimulus(g)).collect(),
        )?;
        Ok(Self { values: grid })
    }

    pub fn uniform(width: usize, height: usize, level: f64) -> Result<Self> {
        Self::new(Grid::filled(width, height, level))
    }

    /// Test-only escape hatch for fields holding exact zeros.
    #[cfg(test)]
    pub(crate) fn unchecked(values: Image) -> Self {
        Self { values }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.values.width()
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.values.height()
    }

    #[inline]
    pub fn values(&self) -> &Image {
        &self.values
    }

    /// Inverse of the gray mapping, rounded to the nearest level.
    pub fn to_gray_levels(&self) -> Grid<u8> {
        self.values.to_gray_levels()
    }
}

#[inline]
pub fn gray_to_stimulus(gray: f64) -> f64 {
    clamp_stimulus(gray / 255.0)
}

#[inline]
fn clamp_stimulus(v: f64) -> f64 {
    if v.is_nan() {
        STIMULUS_FLOOR
    } else {
        v.clamp(STIMULUS_FLOOR, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_mapping_applies_floor() {
        let s = StimulusField::from_gray(2, 2, &[0.0, 128.0, 255.0, 64.0]).unwrap();
        let v = s.values().as_slice();
        assert_eq!(v[0], 1e-3);
        assert!((v[1] - 128.0 / 255.0).abs() < 1e-15);
        assert_eq!(v[2], 1.0);
        assert!((v[3] - 64.0 / 255.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_values() {
        let g = Grid::from_vec(2, 1, vec![0.5, 0.0]).unwrap();
        assert!(StimulusField::new(g).is_err());
        let g = Grid::from_vec(1, 1, vec![f64::NAN]).unwrap();
        assert!(StimulusField::new(g).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Grid::from_vec(0, 3, Vec::<f64>::new()).is_err());
        assert!(Grid::from_vec(2, 2, vec![0.0; 3]).is_err());
    }
}
