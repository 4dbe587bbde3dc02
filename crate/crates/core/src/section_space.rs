//! Equi-width section grid over every dimension.
//!
//! Each dimension's observed range is widened by 0.1% (half on each side) and
//! cut into `scn` sections of equal width. Section ids are 1-based. The grid
//! keeps, per dimension, the section of every point, the population of every
//! section, and the member list of every section.

use std::io::Write;

use crate::dataset::{Dataset, PointId};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Observed and widened bounds of one dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionRange<T> {
    pub lo_raw: T,
    pub hi_raw: T,
    pub lo_ext: T,
    pub hi_ext: T,
    /// Section width; zero for a constant dimension.
    pub width: T,
}

impl<T: Scalar> DimensionRange<T> {
    fn from_bounds(lo_raw: T, hi_raw: T, scn: usize) -> Self {
        let len = hi_raw - lo_raw;
        let pad = len * T::lit(0.0005);
        Self {
            lo_raw,
            hi_raw,
            lo_ext: lo_raw - pad,
            hi_ext: hi_raw + pad,
            width: len * T::lit(1.001) / T::from_count(scn),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.width == T::zero()
    }

    /// Section id in `1..=scn` for a value inside the observed range.
    ///
    /// The offset is measured from `lo_raw`, so a positive affine map of the
    /// column that is exact in floating point leaves every id unchanged.
    pub fn section_of(&self, v: T, scn: usize) -> u32 {
        if self.is_degenerate() {
            return 1;
        }
        let pad = (self.hi_raw - self.lo_raw) * T::lit(0.0005);
        let pos = ((v - self.lo_raw + pad) / self.width).floor();
        let idx = pos.to_usize().unwrap_or(0).saturating_add(1);
        idx.clamp(1, scn) as u32
    }
}

pub fn compute_ranges<T: Scalar>(
    dataset: &Dataset<T>,
    scn: usize,
) -> Result<Vec<DimensionRange<T>>> {
    if scn == 0 {
        return Err(Error::param("scn must be at least 1"));
    }
    Ok((0..dataset.m())
        .map(|i| {
            let (lo, hi) = dataset
                .column(i)
                .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
            DimensionRange::from_bounds(lo, hi, scn)
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct SectionSpace<T> {
    n: usize,
    m: usize,
    scn: usize,
    point_ids: Vec<PointId>,
    ranges: Vec<DimensionRange<T>>,
    /// Dimension-major: `point_info[i * n + j]` is the section of point `j` in dimension `i`.
    point_info: Vec<u32>,
    /// `section_info[i * scn + (g - 1)]` is the population of section `g` in dimension `i`.
    section_info: Vec<u32>,
    mean_density: Vec<T>,
    /// Point indices of dimension `i` grouped by section, ascending within a section.
    members: Vec<u32>,
    /// `offsets[i * (scn + 1) + g - 1 .. i * (scn + 1) + g]` brackets section `g` in `members`.
    offsets: Vec<usize>,
    diagnostics: Vec<String>,
}

impl<T: Scalar> SectionSpace<T> {
    pub fn build(dataset: &Dataset<T>, scn: usize) -> Result<Self> {
        let ranges = compute_ranges(dataset, scn)?;
        let (n, m) = (dataset.n(), dataset.m());
        if scn > u32::MAX as usize || n > u32::MAX as usize {
            return Err(Error::Capacity("section or point count exceeds u32".into()));
        }
        let mut diagnostics = Vec::new();
        if scn > n {
            diagnostics.push(format!(
                "scn = {scn} exceeds n = {n}; most sections will be empty"
            ));
        }

        let mut point_info = vec![0u32; n * m];
        let mut section_info = vec![0u32; scn * m];
        for j in 0..n {
            for (i, range) in ranges.iter().enumerate() {
                let g = range.section_of(dataset.value(j, i), scn);
                point_info[i * n + j] = g;
                section_info[i * scn + g as usize - 1] += 1;
            }
        }

        let mut offsets = vec![0usize; m * (scn + 1)];
        let mut members = vec![0u32; n * m];
        let mut cursor = vec![0usize; scn];
        for i in 0..m {
            let base = i * (scn + 1);
            let mut acc = i * n;
            for g in 0..scn {
                offsets[base + g] = acc;
                cursor[g] = acc;
                acc += section_info[i * scn + g] as usize;
            }
            offsets[base + scn] = acc;
            for j in 0..n {
                let g = point_info[i * n + j] as usize - 1;
                members[cursor[g]] = j as u32;
                cursor[g] += 1;
            }
        }

        let mean_density = (0..m)
            .map(|i| {
                let occupied = section_info[i * scn..(i + 1) * scn]
                    .iter()
                    .filter(|&&c| c > 0)
                    .count();
                T::from_count(n) / T::from_count(occupied)
            })
            .collect();

        Ok(Self {
            n,
            m,
            scn,
            point_ids: dataset.point_ids().to_vec(),
            ranges,
            point_info,
            section_info,
            mean_density,
            members,
            offsets,
            diagnostics,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn scn(&self) -> usize {
        self.scn
    }

    pub fn point_ids(&self) -> &[PointId] {
        &self.point_ids
    }

    pub fn ranges(&self) -> &[DimensionRange<T>] {
        &self.ranges
    }

    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    /// Section id (1-based) of point `j` in dimension `i`.
    #[inline]
    pub fn section_id(&self, i: usize, j: usize) -> u32 {
        self.point_info[i * self.n + j]
    }

    /// Section ids of all points in dimension `i`, indexed by point.
    #[inline]
    pub fn dimension(&self, i: usize) -> &[u32] {
        &self.point_info[i * self.n..(i + 1) * self.n]
    }

    /// Population of section `g` (1-based) in dimension `i`.
    #[inline]
    pub fn count(&self, i: usize, g: u32) -> usize {
        self.section_info[i * self.scn + g as usize - 1] as usize
    }

    pub fn counts(&self, i: usize) -> &[u32] {
        &self.section_info[i * self.scn..(i + 1) * self.scn]
    }

    /// Point indices in section `g` (1-based) of dimension `i`, ascending.
    #[inline]
    pub fn members(&self, i: usize, g: u32) -> &[u32] {
        let base = i * (self.scn + 1) + g as usize - 1;
        &self.members[self.offsets[base]..self.offsets[base + 1]]
    }

    /// `n` over the number of non-empty sections of dimension `i`.
    pub fn mean_density(&self, i: usize) -> T {
        self.mean_density[i]
    }

    /// Section distance of points `p` and `q` measured in dimension `j`:
    /// the difference of their section ids plus one.
    #[inline]
    pub fn dists(&self, j: usize, p: usize, q: usize) -> u32 {
        self.section_id(j, p).abs_diff(self.section_id(j, q)) + 1
    }

    /// Dumps the section population table: one row per section id, one
    /// column per dimension.
    pub fn write_section_info<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["section".to_string()];
        header.extend((1..=self.m).map(|i| format!("p{i}")));
        w.write_record(&header)?;
        for g in 1..=self.scn as u32 {
            let mut row = vec![g.to_string()];
            row.extend((0..self.m).map(|i| self.count(i, g).to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(m: usize, values: Vec<f64>) -> Dataset<f64> {
        Dataset::new(m, values, None).unwrap()
    }

    #[test]
    fn extended_ranges_match_worked_example() {
        let d = ds(2, vec![5.0, 6.0, 23.0, 25.0, 14.0, 15.0]);
        let r = compute_ranges(&d, 5).unwrap();
        assert!((r[0].lo_ext - 4.991).abs() < 1e-9);
        assert!((r[0].hi_ext - 23.009).abs() < 1e-9);
        assert!((r[0].width - 3.6036).abs() < 1e-9);
        assert!((r[1].lo_ext - 5.9905).abs() < 1e-9);
        assert!((r[1].hi_ext - 25.0095).abs() < 1e-9);
        assert!((r[1].width - 3.8038).abs() < 1e-9);
    }

    #[test]
    fn constant_column_is_degenerate() {
        let d = ds(1, vec![7.0; 4]);
        let r = compute_ranges(&d, 3).unwrap();
        assert!(r[0].is_degenerate());
        let s = SectionSpace::build(&d, 3).unwrap();
        assert!(s.dimension(0).iter().all(|&g| g == 1));
        assert_eq!(s.mean_density(0), 4.0);
    }

    #[test]
    fn extremes_land_in_end_sections() {
        let d = ds(1, vec![0.0, 10.0, 4.0]);
        let s = SectionSpace::build(&d, 4).unwrap();
        assert_eq!(s.dimension(0), &[1, 4, 2]);
        // Exactly the widened upper bound still maps to the last section.
        let r = s.ranges()[0];
        assert_eq!(r.section_of(r.hi_ext, 4), 4);
        assert_eq!(r.section_of(r.lo_ext, 4), 1);
    }

    #[test]
    fn single_point() {
        let d = ds(3, vec![1.0, 2.0, 3.0]);
        let s = SectionSpace::build(&d, 5).unwrap();
        for i in 0..3 {
            assert_eq!(s.counts(i).iter().sum::<u32>(), 1);
            assert_eq!(s.mean_density(i), 1.0);
        }
        assert!(!s.diagnostics().is_empty());
    }

    #[test]
    fn one_occupied_section_means_density_n() {
        let d = ds(1, vec![0.0, 0.1, 0.2, 0.15, 0.05]);
        let s = SectionSpace::build(&d, 1).unwrap();
        assert_eq!(s.mean_density(0), 5.0);
    }

    #[test]
    fn dists_examples() {
        let d = ds(1, vec![0.0, 1.0, 2.0, 3.0, 4.0, 4.1]);
        let s = SectionSpace::build(&d, 5).unwrap();
        assert_eq!(s.dimension(0), &[1, 2, 3, 4, 5, 5]);
        assert_eq!(s.dists(0, 4, 5), 1);
        assert_eq!(s.dists(0, 1, 4), 4);
        assert_eq!(s.dists(0, 3, 3), 1);
    }

    #[test]
    fn members_group_by_section() {
        let d = ds(1, vec![9.0, 0.0, 9.5, 0.2, 5.0]);
        let s = SectionSpace::build(&d, 3).unwrap();
        assert_eq!(s.members(0, 1), &[1, 3]);
        assert_eq!(s.members(0, 2), &[4]);
        assert_eq!(s.members(0, 3), &[0, 2]);
    }

    #[test]
    fn section_info_dump() {
        let d = ds(2, vec![0.0, 0.0, 0.5, 0.0, 2.0, 1.0]);
        let s = SectionSpace::build(&d, 2).unwrap();
        let mut buf = Vec::new();
        s.write_section_info(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "section,p1,p2\n1,2,2\n2,1,1\n"
        );
    }
}
