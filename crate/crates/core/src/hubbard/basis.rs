use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Occupations (n₀, σ, n₂) of the two condensate modes and up to two lattice sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FockState {
    pub n0: u32,
    pub sigma: [u32; 2],
    pub n2: u32,
}

impl FockState {
    pub fn new(n0: u32, sigma: u32, n2: u32) -> Self {
        FockState { n0, sigma: [sigma, 0], n2 }
    }

    pub fn two_site(n0: u32, sigma: [u32; 2], n2: u32) -> Self {
        FockState { n0, sigma, n2 }
    }

    pub fn total(&self) -> u32 {
        self.n0 + self.sigma[0] + self.sigma[1] + self.n2
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sigma[1] == 0 {
            write!(f, "|{},{},{}⟩", self.n0, self.sigma[0], self.n2)
        } else {
            write!(f, "|{},{}{},{}⟩", self.n0, self.sigma[0], self.sigma[1], self.n2)
        }
    }
}

/// A fixed-N set of Fock states with a stable index map.
///
/// Lattice sites hold at most `capacity` atoms. The hard-core default of one
/// atom per site excludes the doubly occupied intermediate states that carry
/// the U₁₁ path; capacity 2 includes them.
#[derive(Debug, Clone, Serialize)]
pub struct FockBasis {
    pub n_total: u32,
    pub sites: usize,
    pub capacity: u32,
    states: Vec<FockState>,
    #[serde(skip)]
    index: HashMap<FockState, usize>,
}

impl FockBasis {
    /// Every state with `n_total` atoms, ordered by (σ, n₀) descending n₀.
    pub fn new(n_total: u32, sites: usize, capacity: u32) -> Result<Self> {
        check_shape(sites, capacity)?;
        let mut states = Vec::new();
        let cap1 = if sites == 2 { capacity } else { 0 };
        for s0 in 0..=capacity.min(n_total) {
            for s1 in 0..=cap1.min(n_total - s0) {
                let rest = n_total - s0 - s1;
                for n2 in 0..=rest {
                    states.push(FockState { n0: rest - n2, sigma: [s0, s1], n2 });
                }
            }
        }
        Self::from_states(n_total, sites, capacity, states)
    }

    /// Hard-core single-site basis.
    pub fn single_site(n_total: u32) -> Result<Self> {
        Self::new(n_total, 1, 1)
    }

    /// A basis over an explicit subset of states (kept in the given order).
    pub fn from_states(n_total: u32, sites: usize, capacity: u32, states: Vec<FockState>) -> Result<Self> {
        check_shape(sites, capacity)?;
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if s.total() != n_total {
                return Err(Error::Config(format!("{s} does not hold {n_total} atoms")));
            }
            if s.sigma.iter().any(|&v| v > capacity) || (sites == 1 && s.sigma[1] != 0) {
                return Err(Error::Config(format!("{s} exceeds the site capacity {capacity}")));
            }
            if index.insert(*s, i).is_some() {
                return Err(Error::Config(format!("{s} listed twice")));
            }
        }
        Ok(FockBasis { n_total, sites, capacity, states, index })
    }

    /// States reachable from `seeds` by at most `depth` single-atom moves.
    /// Gives a small basis around a large-N operating point.
    pub fn neighbourhood(n_total: u32, sites: usize, capacity: u32, seeds: &[FockState], depth: usize) -> Result<Self> {
        check_shape(sites, capacity)?;
        let mut set: BTreeSet<FockState> = seeds.iter().copied().collect();
        let mut frontier: Vec<FockState> = seeds.to_vec();
        for _ in 0..depth {
            let mut next = Vec::new();
            for s in &frontier {
                for t in single_moves(s, sites, capacity) {
                    if set.insert(t) {
                        next.push(t);
                    }
                }
            }
            frontier = next;
        }
        Self::from_states(n_total, sites, capacity, set.into_iter().collect())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> FockState {
        self.states[i]
    }

    pub fn index_of(&self, s: &FockState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Indices of the states with lattice occupations `sigma`.
    pub fn manifold(&self, sigma: [u32; 2]) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.states[i].sigma == sigma).collect()
    }
}

fn check_shape(sites: usize, capacity: u32) -> Result<()> {
    if !(1..=2).contains(&sites) {
        return Err(Error::Config(format!("{sites} lattice sites requested; 1 or 2 supported")));
    }
    if capacity == 0 {
        return Err(Error::Config("site capacity must be at least 1".into()));
    }
    Ok(())
}

/// All states one atom move away: 0↔site, 2↔site, 0↔2.
pub fn single_moves(s: &FockState, sites: usize, capacity: u32) -> Vec<FockState> {
    let mut out = Vec::new();
    for site in 0..sites {
        let sg = s.sigma[site];
        let with = |n0: u32, sg: u32, n2: u32| {
            let mut t = *s;
            t.n0 = n0;
            t.sigma[site] = sg;
            t.n2 = n2;
            t
        };
        if s.n0 > 0 && sg < capacity {
            out.push(with(s.n0 - 1, sg + 1, s.n2));
        }
        if sg > 0 {
            out.push(with(s.n0 + 1, sg - 1, s.n2));
            out.push(with(s.n0, sg - 1, s.n2 + 1));
        }
        if s.n2 > 0 && sg < capacity {
            out.push(with(s.n0, sg + 1, s.n2 - 1));
        }
    }
    if s.n0 > 0 {
        out.push(FockState { n0: s.n0 - 1, n2: s.n2 + 1, ..*s });
    }
    if s.n2 > 0 {
        out.push(FockState { n0: s.n0 + 1, n2: s.n2 - 1, ..*s });
    }
    out
}

/// Whether `a` and `b` differ by one atom moved between a site and {0, 2},
/// or between 0 and 2.
pub fn is_single_move(a: &FockState, b: &FockState) -> bool {
    let d0 = b.n0 as i64 - a.n0 as i64;
    let d2 = b.n2 as i64 - a.n2 as i64;
    let ds = [b.sigma[0] as i64 - a.sigma[0] as i64, b.sigma[1] as i64 - a.sigma[1] as i64];
    let site_moves = ds.iter().filter(|&&v| v != 0).count();
    match site_moves {
        0 => d0.abs() == 1 && d0 + d2 == 0,
        1 => {
            let dsite = ds[0] + ds[1];
            dsite.abs() == 1 && ((d0 == -dsite && d2 == 0) || (d2 == -dsite && d0 == 0))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_index_map() {
        let b = FockBasis::new(6, 1, 1).unwrap();
        assert_eq!(b.len(), 7 + 6);
        for (i, s) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(s), Some(i));
            assert_eq!(s.total(), 6);
        }
        let b2 = FockBasis::new(4, 2, 1).unwrap();
        assert_eq!(b2.len(), 5 + 4 + 4 + 3);
        let b3 = FockBasis::new(4, 1, 2).unwrap();
        assert_eq!(b3.len(), 5 + 4 + 3);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(FockBasis::new(4, 3, 1).is_err());
        assert!(FockBasis::new(4, 1, 0).is_err());
        let s = FockState::new(2, 2, 0);
        assert!(FockBasis::from_states(4, 1, 1, vec![s]).is_err());
        let d = FockState::new(3, 0, 1);
        assert!(FockBasis::from_states(4, 1, 1, vec![d, d]).is_err());
    }

    #[test]
    fn neighbourhood_moves_are_single() {
        let seed = FockState::new(100, 0, 400);
        let b = FockBasis::neighbourhood(500, 1, 2, &[seed], 1).unwrap();
        for s in b.states() {
            if *s != seed {
                assert!(is_single_move(&seed, s), "{s}");
            }
        }
        assert_eq!(b.len(), 1 + 4);
    }
}
