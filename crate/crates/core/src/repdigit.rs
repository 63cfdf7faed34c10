//! Repdigits `d * (10^m - 1) / 9`.

use std::fmt;

use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::Nat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RepdigitForm {
    digit: u8,
    len: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepdigitError {
    #[error("repdigit digit must be in 1..=9, got {0}")]
    Digit(u8),
    #[error("repdigit length must be at least 1")]
    Length,
}

impl RepdigitForm {
    pub fn new(digit: u8, len: u32) -> Result<Self, RepdigitError> {
        if !(1..=9).contains(&digit) {
            return Err(RepdigitError::Digit(digit));
        }
        if len == 0 {
            return Err(RepdigitError::Length);
        }
        Ok(RepdigitForm { digit, len })
    }

    pub fn digit(self) -> u8 {
        self.digit
    }

    pub fn len(self) -> u32 {
        self.len
    }

    /// Forms always have at least one digit.
    pub fn is_empty(self) -> bool {
        false
    }
}

impl fmt::Display for RepdigitForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} m={}", self.digit, self.len)
    }
}

/// `(10^m - 1) / 9`, the repunit of length `m`.
pub fn repunit(m: u32) -> Nat {
    (Nat::from(10u32).pow(m) - Nat::one()) / 9u32
}

pub fn repdigit_value(form: RepdigitForm) -> Nat {
    repunit(form.len) * form.digit
}

/// Recognises a repdigit by scanning its decimal digits. Zero is not a repdigit.
pub fn as_repdigit(n: &Nat) -> Option<RepdigitForm> {
    if n.is_zero() {
        return None;
    }
    let digits = n.to_str_radix(10);
    let first = digits.as_bytes()[0];
    digits
        .bytes()
        .all(|b| b == first)
        .then(|| RepdigitForm {
            digit: first - b'0',
            len: digits.len() as u32,
        })
}
