//! Exact rational coefficients and their JSON form.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::partitions::Partition;

pub type Rational = Ratio<i128>;

/// One `{"partition": [...], "num": .., "den": ..}` entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub partition: Partition,
    pub num: i128,
    pub den: i128,
}

impl CoeffEntry {
    pub fn new(partition: Partition, value: Rational) -> Self {
        CoeffEntry { partition, num: *value.numer(), den: *value.denom() }
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.num, self.den)
    }
}

pub fn rat(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

pub fn int(v: i128) -> Rational {
    Rational::from_integer(v)
}
