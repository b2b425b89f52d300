//! Points of `R₊ᴺ` and `R₊₊ᴺ`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};

fn check_finite(entries: &[f64]) -> Result<()> {
    if entries.is_empty() {
        return Err(Error::Empty);
    }
    match entries.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: entries[index],
        }),
        None => Ok(()),
    }
}

/// A finite vector with every entry `≥ 0` and at least one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegVector(Vec<f64>);

impl NonnegVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_finite(&entries)?;
        if let Some(index) = entries.iter().position(|&v| v < 0.0) {
            return Err(Error::Negative {
                index,
                value: entries[index],
            });
        }
        Ok(Self(entries))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for NonnegVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<PositiveVector> for NonnegVector {
    fn from(v: PositiveVector) -> Self {
        Self(v.0)
    }
}

/// A finite vector with every entry `> 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveVector(Vec<f64>);

impl PositiveVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_finite(&entries)?;
        if let Some(index) = entries.iter().position(|&v| v <= 0.0) {
            return Err(Error::NotPositive {
                index,
                value: entries[index],
            });
        }
        Ok(Self(entries))
    }

    pub fn ones(dim: usize) -> Result<Self> {
        Self::new(vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for PositiveVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<NonnegVector> for PositiveVector {
    type Error = Error;

    fn try_from(v: NonnegVector) -> Result<Self> {
        Self::new(v.0)
    }
}
