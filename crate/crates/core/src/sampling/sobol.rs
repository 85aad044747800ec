//! Unscrambled Sobol sequence in Gray-code order.
//!
//! Direction numbers are read from the bundled Joe–Kuo table
//! (`assets/new-joe-kuo-6.256.txt`); dimension 1 is the van der Corput
//! sequence in base 2.

use std::sync::OnceLock;

use super::SamplingError;

const BITS: usize = 32;
const TABLE: &str = include_str!("../../assets/new-joe-kuo-6.256.txt");

struct Primitive {
    s: u32,
    a: u32,
    m: Vec<u32>,
}

fn table() -> &'static [Primitive] {
    static PARSED: OnceLock<Vec<Primitive>> = OnceLock::new();
    PARSED.get_or_init(|| {
        TABLE
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with('d'))
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let nums: Vec<u32> = l
                    .split_whitespace()
                    .map(|t| t.parse().expect("direction table is numeric"))
                    .collect();
                let (s, a) = (nums[1], nums[2]);
                let m = nums[3..].to_vec();
                assert_eq!(m.len(), s as usize, "malformed direction table row for d={}", nums[0]);
                Primitive { s, a, m }
            })
            .collect()
    })
}

/// Largest supported dimension.
pub fn max_dimension() -> usize {
    table().len() + 1
}

fn direction_numbers(dim_index: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim_index == 0 {
        for (i, v) in v.iter_mut().enumerate() {
            *v = 1 << (BITS - 1 - i);
        }
        return v;
    }
    let Primitive { s, a, m } = &table()[dim_index - 1];
    let s = *s as usize;
    // v[i] holds V_{i+1} of the usual 1-based recurrence
    for i in 0..s.min(BITS) {
        v[i] = m[i] << (BITS - 1 - i);
    }
    for i in s..BITS {
        v[i] = v[i - s] ^ (v[i - s] >> s);
        for k in 1..s {
            if (a >> (s - 1 - k)) & 1 == 1 {
                v[i] ^= v[i - k];
            }
        }
    }
    v
}

/// Stateful generator yielding successive points of a `dim`-dimensional
/// Sobol sequence as 32-bit integers.
#[derive(Debug, Clone)]
pub struct SobolSequence {
    directions: Vec<[u32; BITS]>,
    state: Vec<u32>,
    index: u64,
}

impl SobolSequence {
    pub fn new(dim: usize) -> Result<Self, SamplingError> {
        if dim == 0 {
            return Err(SamplingError::ZeroDimension);
        }
        if dim > max_dimension() {
            return Err(SamplingError::DimensionTooLarge { dim, max: max_dimension() });
        }
        Ok(Self {
            directions: (0..dim).map(direction_numbers).collect(),
            state: vec![0; dim],
            index: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.state.len()
    }

    /// Jumps to raw index `index` (index 0 is the all-zeros point).
    pub fn seek(&mut self, index: u64) -> Result<(), SamplingError> {
        if index >= 1 << BITS {
            return Err(SamplingError::IndexOverflow(index));
        }
        let gray = index ^ (index >> 1);
        for (x, v) in self.state.iter_mut().zip(&self.directions) {
            *x = (0..BITS).filter(|b| (gray >> b) & 1 == 1).fold(0, |acc, b| acc ^ v[b]);
        }
        self.index = index;
        Ok(())
    }

    /// Current point as integers; `next_point` advances.
    fn current(&self) -> &[u32] {
        &self.state
    }

    fn advance(&mut self) -> Result<(), SamplingError> {
        let c = self.index.trailing_ones() as usize;
        if c >= BITS {
            return Err(SamplingError::IndexOverflow(self.index + 1));
        }
        for (x, v) in self.state.iter_mut().zip(&self.directions) {
            *x ^= v[c];
        }
        self.index += 1;
        Ok(())
    }

    /// Returns the point at the current index as reals in `[0, 1)` and advances.
    pub fn next_point(&mut self) -> Result<Vec<f64>, SamplingError> {
        let scale = 1.0 / (1u64 << BITS) as f64;
        let p = self.current().iter().map(|&x| x as f64 * scale).collect();
        self.advance()?;
        Ok(p)
    }
}

/// `n` points of the `dim`-dimensional sequence, leaving out the origin and
/// then `skip` further points, i.e. raw indices `1 + skip ..`.
pub fn sobol_points(dim: usize, n: usize, skip: u64) -> Result<Vec<Vec<f64>>, SamplingError> {
    sobol_points_raw(dim, n, skip.checked_add(1).ok_or(SamplingError::IndexOverflow(skip))?)
}

/// `n` points starting at raw index `start`; raw index 0 is the origin.
pub fn sobol_points_raw(dim: usize, n: usize, start: u64) -> Result<Vec<Vec<f64>>, SamplingError> {
    let mut seq = SobolSequence::new(dim)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if start + n as u64 > 1 << BITS {
        return Err(SamplingError::IndexOverflow(start + n as u64));
    }
    seq.seek(start)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let scale = 1.0 / (1u64 << BITS) as f64;
        out.push(seq.current().iter().map(|&x| x as f64 * scale).collect());
        if i + 1 < n {
            seq.advance()?;
        }
    }
    Ok(out)
}
