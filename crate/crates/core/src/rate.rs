//! Exact code rates.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::Error;

/// A code rate `K/N` kept as a reduced fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rate(Ratio<usize>);

impl Rate {
    pub const THIRD: Rate = Rate(Ratio::new_raw(1, 3));
    pub const HALF: Rate = Rate(Ratio::new_raw(1, 2));
    pub const TWO_THIRDS: Rate = Rate(Ratio::new_raw(2, 3));

    pub fn new(k: usize, n: usize) -> Result<Rate, Error> {
        if k == 0 || n == 0 || k > n {
            return Err(Error::UnsupportedRate(format!("{k}/{n}")));
        }
        Ok(Rate(Ratio::new(k, n)))
    }

    pub fn numer(&self) -> usize {
        *self.0.numer()
    }

    pub fn denom(&self) -> usize {
        *self.0.denom()
    }

    pub fn as_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Block length for `k` information symbols, if it is an integer.
    pub fn block_len(&self, k: usize) -> Option<usize> {
        let scaled = k.checked_mul(self.denom())?;
        (scaled % self.numer() == 0).then(|| scaled / self.numer())
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rate, Error> {
        let bad = || Error::UnsupportedRate(s.to_string());
        let (k, n) = s.trim().split_once('/').ok_or_else(bad)?;
        let k = k.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        Rate::new(k, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        assert_eq!("2/6".parse::<Rate>().unwrap(), Rate::THIRD);
        assert_eq!(Rate::TWO_THIRDS.to_string(), "2/3");
        assert!("0.5".parse::<Rate>().is_err());
        assert!("3/2".parse::<Rate>().is_err());
    }

    #[test]
    fn block_len_is_exact() {
        assert_eq!(Rate::THIRD.block_len(1024), Some(3072));
        assert_eq!(Rate::TWO_THIRDS.block_len(1024), Some(1536));
        assert_eq!(Rate::TWO_THIRDS.block_len(1023), None);
    }
}
