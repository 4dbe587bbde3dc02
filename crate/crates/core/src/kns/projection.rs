//! Per-dimension section density ratios and the k-nearest-sections ratio of
//! a section re-projected onto another dimension.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::section_space::SectionSpace;

/// Density ratio of every (dimension, section) cell; empty cells have none.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstProjection<T> {
    scn: usize,
    values: Vec<Option<T>>,
}

impl<T: Scalar> FirstProjection<T> {
    /// Ratio for section `g` (1-based) of dimension `i`.
    pub fn sdr(&self, i: usize, g: u32) -> Option<T> {
        self.values[i * self.scn + g as usize - 1]
    }

    /// Ratio shared by every point of the cell that point `j` occupies in dimension `i`.
    pub fn point_sdr(&self, space: &SectionSpace<T>, i: usize, j: usize) -> T {
        self.sdr(i, space.section_id(i, j))
            .expect("an occupied section always has a ratio")
    }
}

/// `(d / mean_d)^2` for every occupied section, where `d` is the section's
/// population and `mean_d` the dimension's mean occupied-section population.
pub fn first_projection_sdr<T: Scalar>(space: &SectionSpace<T>) -> FirstProjection<T> {
    let scn = space.scn();
    let mut values = Vec::with_capacity(scn * space.m());
    for i in 0..space.m() {
        let mean = space.mean_density(i);
        values.extend(space.counts(i).iter().map(|&c| {
            (c > 0).then(|| {
                let ratio = T::from_count(c as usize) / mean;
                ratio * ratio
            })
        }));
    }
    FirstProjection { scn, values }
}

fn check_dims<T: Scalar>(space: &SectionSpace<T>, i: usize, g: u32, j: usize) -> Result<()> {
    if i >= space.m() || j >= space.m() {
        return Err(Error::param("dimension index out of range"));
    }
    if i == j {
        return Err(Error::param("source and target dimension must differ"));
    }
    if g == 0 || g as usize > space.scn() {
        return Err(Error::param(format!("section {g} out of range")));
    }
    Ok(())
}

/// Tie-inclusive k nearest co-members of point `p` in section `g` of
/// dimension `i`, measured by section distance in dimension `j`. Self is
/// excluded. Returns point indices in ascending order.
pub fn nearest_sections<T: Scalar>(
    space: &SectionSpace<T>,
    i: usize,
    g: u32,
    j: usize,
    p: usize,
    k: usize,
) -> Result<Vec<usize>> {
    check_dims(space, i, g, j)?;
    if space.section_id(i, p) != g {
        return Err(Error::param(format!("point {p} is not in section {g}")));
    }
    let members = space.members(i, g);
    if members.len() <= k {
        return Err(Error::param(format!(
            "section holds {} points, need more than k = {k}",
            members.len()
        )));
    }
    let mut dists: Vec<u32> = members
        .iter()
        .map(|&q| q as usize)
        .filter(|&q| q != p)
        .map(|q| space.dists(j, p, q))
        .collect();
    dists.sort_unstable();
    let k_dist = dists[k - 1];
    Ok(members
        .iter()
        .map(|&q| q as usize)
        .filter(|&q| q != p && space.dists(j, p, q) <= k_dist)
        .collect())
}

/// Reusable buffers for projecting sections onto a target dimension.
pub(crate) struct Projector<T> {
    k: usize,
    threshold: usize,
    /// Members of the current section per target section id (index 0 unused).
    hist: Vec<u32>,
    /// Mean squared neighbour distance per target section id.
    mean_sq: Vec<T>,
    touched: Vec<u32>,
}

impl<T: Scalar> Projector<T> {
    pub(crate) fn new(scn: usize, k: usize, threshold: usize) -> Self {
        Self {
            k,
            threshold,
            hist: vec![0; scn + 2],
            mean_sq: vec![T::zero(); scn + 2],
            touched: Vec::new(),
        }
    }

    /// Calls `emit(point, sdr)` for every member of section `g` of dimension
    /// `i` projected onto dimension `j`. Empty sections emit nothing.
    pub(crate) fn project_section(
        &mut self,
        space: &SectionSpace<T>,
        i: usize,
        g: u32,
        j: usize,
        mut emit: impl FnMut(usize, T),
    ) {
        let members = space.members(i, g);
        let s = members.len();
        if s == 0 {
            return;
        }
        if s < self.threshold {
            for &p in members {
                emit(p as usize, T::one());
            }
            return;
        }
        debug_assert!(s > self.k, "threshold must exceed k");

        let target = space.dimension(j);
        for &p in members {
            let t = target[p as usize];
            if self.hist[t as usize] == 0 {
                self.touched.push(t);
            }
            self.hist[t as usize] += 1;
        }

        // Every member projecting onto the same target section shares its
        // neighbour-distance profile, so it is computed once per target section.
        let scn = space.scn() as u32;
        for &t in &self.touched {
            let mut count = u64::from(self.hist[t as usize] - 1);
            let mut sum_sq = count;
            let mut offset = 0u32;
            while count < self.k as u64 {
                offset += 1;
                let mut level = 0u64;
                if t > offset {
                    level += u64::from(self.hist[(t - offset) as usize]);
                }
                if t + offset <= scn {
                    level += u64::from(self.hist[(t + offset) as usize]);
                }
                let dist = u64::from(offset + 1);
                count += level;
                sum_sq += level * dist * dist;
            }
            self.mean_sq[t as usize] = T::lit(sum_sq as f64) / T::lit(count as f64);
        }

        let total = members.iter().fold(T::zero(), |acc, &p| {
            acc + self.mean_sq[target[p as usize] as usize]
        });
        let mean = total / T::from_count(s);
        for &p in members {
            emit(p as usize, self.mean_sq[target[p as usize] as usize] / mean);
        }

        for &t in &self.touched {
            self.hist[t as usize] = 0;
        }
        self.touched.clear();
    }
}

/// Second-stage ratio of every member of section `g` of dimension `i` after
/// projection onto dimension `j`, as `(point index, sdr)` in member order.
///
/// A member's ratio is its mean squared section distance to its nearest
/// section neighbours over the section-wide mean of that quantity. Sections
/// below the small-section threshold `ceil(1.5 k)` yield 1 for every member.
pub fn second_projection_sdr<T: Scalar>(
    space: &SectionSpace<T>,
    i: usize,
    g: u32,
    j: usize,
    k: usize,
) -> Result<Vec<(usize, T)>> {
    check_dims(space, i, g, j)?;
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    let mut projector = Projector::new(space.scn(), k, (3 * k).div_ceil(2));
    let mut out = Vec::with_capacity(space.count(i, g));
    projector.project_section(space, i, g, j, |p, v| out.push((p, v)));
    Ok(out)
}
