//! Spin configurations, fixed-magnetization sectors and the full-space bit
//! encoding.
//!
//! Sectors are listed in colexicographic order of the down-spin positions,
//! which coincides with ascending order of the bit masks. The rank of a
//! configuration is given by the combinatorial number system.

use crate::{invalid_dim, C64, Error, Result};

/// Largest chain length for which full-space (`2^L`) objects are built.
pub const MAX_FULL_LENGTH: usize = 20;
/// Largest chain length for which sector bases are enumerated.
pub const MAX_SECTOR_LENGTH: usize = 24;

/// Full-space and sector state vectors are plain amplitude lists; the owner
/// knows which basis they refer to.
pub type StateVector = Vec<C64>;

/// `binomial(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Positions of the down spins on a chain of `length` sites.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfiguration {
    length: usize,
    downs: Vec<usize>,
}

impl SpinConfiguration {
    /// `downs` must be strictly increasing and lie in `1..=length`.
    pub fn new(length: usize, downs: Vec<usize>) -> Result<Self> {
        if length == 0 || length > MAX_SECTOR_LENGTH {
            return Err(Error::InvalidArgument(format!(
                "chain length {length} outside 1..={MAX_SECTOR_LENGTH}"
            )));
        }
        if downs.iter().any(|&x| x == 0 || x > length) {
            return Err(Error::InvalidArgument(format!(
                "down-spin positions {downs:?} outside 1..={length}"
            )));
        }
        if downs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "down-spin positions {downs:?} not strictly increasing"
            )));
        }
        Ok(Self { length, downs })
    }

    pub fn from_mask(length: usize, mask: u64) -> Self {
        let downs = (0..length).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        Self { length, downs }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn downs(&self) -> &[usize] {
        &self.downs
    }

    pub fn down_count(&self) -> usize {
        self.downs.len()
    }

    /// Full-space index: bit `x - 1` set for every down spin at site `x`.
    pub fn mask(&self) -> u64 {
        self.downs.iter().fold(0u64, |m, &x| m | 1 << (x - 1))
    }
}

/// All configurations with `down_count` down spins on `length` sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    length: usize,
    down_count: usize,
    masks: Vec<u64>,
}

/// Enumerate the sector `H_m` in colexicographic order.
pub fn enumerate_sector(length: usize, down_count: usize) -> Result<SectorBasis> {
    SectorBasis::new(length, down_count)
}

impl SectorBasis {
    pub fn new(length: usize, down_count: usize) -> Result<Self> {
        if length == 0 || length > MAX_SECTOR_LENGTH {
            return Err(Error::TooLarge(format!(
                "sector basis for L = {length} (supported 1..={MAX_SECTOR_LENGTH})"
            )));
        }
        if down_count > length {
            return Err(Error::InvalidArgument(format!(
                "down-spin count {down_count} exceeds chain length {length}"
            )));
        }
        let size = binomial(length, down_count) as usize;
        let mut masks = Vec::with_capacity(size);
        if down_count == 0 {
            masks.push(0);
        } else {
            // Gosper's hack walks fixed-weight masks in increasing order.
            let mut v: u64 = (1u64 << down_count) - 1;
            let limit = 1u64 << length;
            while v < limit {
                masks.push(v);
                let t = v | (v - 1);
                v = (t + 1) | (((!t & (!t).wrapping_neg()) - 1) >> (v.trailing_zeros() + 1));
            }
        }
        debug_assert_eq!(masks.len(), size);
        Ok(Self { length, down_count, masks })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn down_count(&self) -> usize {
        self.down_count
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// Full-space masks in sector order.
    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    pub fn config_of(&self, index: usize) -> Result<SpinConfiguration> {
        match self.masks.get(index) {
            Some(&m) => Ok(SpinConfiguration::from_mask(self.length, m)),
            None => Err(Error::InvalidArgument(format!(
                "index {index} out of range for sector of size {}",
                self.masks.len()
            ))),
        }
    }

    /// Rank of a configuration: `Σ_i C(x_i - 1, i)` over the sorted positions.
    pub fn index_of(&self, config: &SpinConfiguration) -> Result<usize> {
        if config.length() != self.length || config.down_count() != self.down_count {
            return Err(Error::InvalidArgument(format!(
                "configuration (L = {}, m = {}) does not belong to sector (L = {}, m = {})",
                config.length(),
                config.down_count(),
                self.length,
                self.down_count
            )));
        }
        Ok(self.rank_mask(config.mask()))
    }

    /// Rank of a full-space mask assumed to carry `down_count` bits.
    pub fn rank_mask(&self, mask: u64) -> usize {
        let mut rank = 0u64;
        let mut i = 0;
        let mut rest = mask;
        while rest != 0 {
            let pos = rest.trailing_zeros() as usize;
            i += 1;
            rank += binomial(pos, i);
            rest &= rest - 1;
        }
        rank as usize
    }

    /// Place a sector vector into the full `2^L` space.
    pub fn embed(&self, v: &[C64]) -> Result<StateVector> {
        embed_sector(self, v)
    }

    /// Components of a full-space vector on this sector.
    pub fn restrict(&self, full: &[C64]) -> Result<StateVector> {
        let dim = full_dimension(self.length)?;
        if full.len() != dim {
            return invalid_dim(dim, full.len());
        }
        Ok(self.masks.iter().map(|&m| full[m as usize]).collect())
    }
}

/// `2^L`, guarded by [`MAX_FULL_LENGTH`].
pub fn full_dimension(length: usize) -> Result<usize> {
    if length > MAX_FULL_LENGTH {
        return Err(Error::TooLarge(format!(
            "full space for L = {length} (supported up to {MAX_FULL_LENGTH})"
        )));
    }
    Ok(1usize << length)
}

pub fn index_of(basis: &SectorBasis, config: &SpinConfiguration) -> Result<usize> {
    basis.index_of(config)
}

pub fn embed_sector(basis: &SectorBasis, v: &[C64]) -> Result<StateVector> {
    if v.len() != basis.len() {
        return invalid_dim(basis.len(), v.len());
    }
    let mut out = vec![C64::new(0.0, 0.0); full_dimension(basis.length)?];
    for (&m, &a) in basis.masks.iter().zip(v) {
        out[m as usize] = a;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_sizes() {
        assert_eq!(enumerate_sector(4, 2).unwrap().len(), 6);
        let empty = enumerate_sector(3, 0).unwrap();
        assert_eq!(empty.len(), 1);
        assert!(empty.config_of(0).unwrap().downs().is_empty());
        let full = enumerate_sector(5, 5).unwrap();
        assert_eq!(full.len(), 1);
        assert_eq!(full.config_of(0).unwrap().downs(), &[1, 2, 3, 4, 5]);
    }

    #[test]
    fn rejects_bad_sector() {
        assert!(enumerate_sector(3, 4).is_err());
        assert!(SpinConfiguration::new(4, vec![2, 2]).is_err());
        assert!(SpinConfiguration::new(4, vec![0]).is_err());
        assert!(SpinConfiguration::new(4, vec![5]).is_err());
        let b = enumerate_sector(4, 2).unwrap();
        let wrong_m = SpinConfiguration::new(4, vec![1]).unwrap();
        let wrong_l = SpinConfiguration::new(5, vec![1, 2]).unwrap();
        assert!(b.index_of(&wrong_m).is_err());
        assert!(b.index_of(&wrong_l).is_err());
    }

    #[test]
    fn colex_endpoints() {
        for (l, m) in [(6, 3), (7, 2), (5, 1)] {
            let b = enumerate_sector(l, m).unwrap();
            let first = SpinConfiguration::new(l, (1..=m).collect()).unwrap();
            let last = SpinConfiguration::new(l, (l - m + 1..=l).collect()).unwrap();
            assert_eq!(b.index_of(&first).unwrap(), 0);
            assert_eq!(b.index_of(&last).unwrap() as u64, binomial(l, m) - 1);
        }
    }

    #[test]
    fn rank_roundtrip_up_to_twelve() {
        for l in 1..=12 {
            let mut total = 0u64;
            for m in 0..=l {
                let b = enumerate_sector(l, m).unwrap();
                total += b.len() as u64;
                for i in 0..b.len() {
                    let c = b.config_of(i).unwrap();
                    assert_eq!(b.index_of(&c).unwrap(), i);
                }
            }
            assert_eq!(total, 1 << l);
        }
    }

    #[test]
    fn embedding_examples() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let b = enumerate_sector(2, 1).unwrap();
        let full = embed_sector(&b, &[one, zero]).unwrap();
        assert_eq!(full, vec![zero, one, zero, zero]);
        assert_eq!(embed_sector(&b, &[zero, zero]).unwrap(), vec![zero; 4]);
        let b2 = enumerate_sector(2, 2).unwrap();
        assert_eq!(embed_sector(&b2, &[one]).unwrap()[3], one);
        assert!(embed_sector(&b2, &[one, one]).is_err());
    }

    #[test]
    fn sectors_are_orthogonal() {
        let l = 5;
        let mut seen = vec![false; 1 << l];
        for m in 0..=l {
            for &mask in enumerate_sector(l, m).unwrap().masks() {
                assert!(!seen[mask as usize]);
                assert_eq!(mask.count_ones() as usize, m);
                seen[mask as usize] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
}
