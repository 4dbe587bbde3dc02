mod common;

use common::*;
use kns_core::dataset::PointId;
use kns_core::eval::{label_map, pr_curve};
use kns_core::kns::{nearest_sections, second_projection_sdr, Execution};
use kns_core::*;

fn random_instance(rng: &mut Lcg, n: usize, m: usize) -> Dataset64 {
    // Mix of a few blobs so sections are uneven.
    let centers: Vec<f64> = (0..3 * m).map(|_| rng.uniform() * 10.0).collect();
    let values = (0..n)
        .flat_map(|_| {
            let c = rng.below(3) as usize;
            (0..m)
                .map(|i| centers[c * m + i] + (rng.uniform() - 0.5) * 4.0)
                .collect::<Vec<_>>()
        })
        .collect();
    Dataset::new(m, values, None).unwrap()
}

#[test]
fn grid_example_sections_match_brute_tally() {
    let values: Vec<f64> = GRID_EXAMPLE_POINTS
        .iter()
        .flat_map(|&(x, y)| [x, y])
        .collect();
    let d = Dataset::new(2, values, None).unwrap();
    let space = SectionSpace::build(&d, 5).unwrap();
    // Tally with the widened ranges stated for this example.
    let lows = [4.991, 5.9905];
    let widths = [3.6036, 3.8038];
    for i in 0..2 {
        let mut tally = [0u32; 5];
        for (j, p) in GRID_EXAMPLE_POINTS.iter().enumerate() {
            let v = if i == 0 { p.0 } else { p.1 };
            let g = (((v - lows[i]) / widths[i]).floor() as usize + 1).min(5);
            tally[g - 1] += 1;
            assert_eq!(space.section_id(i, j) as usize, g, "point {j} dim {i}");
        }
        assert_eq!(space.counts(i), &tally);
        assert_eq!(tally.iter().sum::<u32>(), 23);
    }
}

#[test]
fn section_ids_match_reference() {
    let mut rng = Lcg(7);
    for _ in 0..20 {
        let d = random_instance(&mut rng, 40, 3);
        let scn = 2 + rng.below(8) as usize;
        let space = SectionSpace::build(&d, scn).unwrap();
        let ids = section_ids(d.values(), 3, scn);
        for i in 0..3 {
            assert_eq!(space.dimension(i), ids[i].as_slice());
        }
    }
}

#[test]
fn nearest_sections_match_sort_oracle() {
    let mut rng = Lcg(11);
    for _ in 0..25 {
        // 30 points sharing section 1 of dimension 0, scattered in dimension 1.
        let scn = 12;
        let mut values = Vec::new();
        for _ in 0..30 {
            values.extend([0.0, rng.below(scn as u64) as f64]);
        }
        values.extend([100.0, 0.0, 100.0, (scn - 1) as f64]);
        let d = Dataset::new(2, values, None).unwrap();
        let space = SectionSpace::build(&d, scn).unwrap();
        let members: Vec<usize> = space.members(0, 1).iter().map(|&p| p as usize).collect();
        assert_eq!(members, (0..30).collect::<Vec<_>>());
        let targets: Vec<u32> = members.iter().map(|&p| space.section_id(1, p)).collect();
        for p in 0..30 {
            let got = nearest_sections(&space, 0, 1, 1, p, 4).unwrap();
            assert_eq!(got, neighbours(&targets, p, 4));
            assert!(got.len() >= 4);
        }
    }
}

#[test]
fn second_projection_matches_brute_force() {
    let mut rng = Lcg(3);
    let mut checked = 0;
    for _ in 0..30 {
        let n = 20 + rng.below(11) as usize;
        let m = 2 + rng.below(3) as usize;
        let scn = 2 + rng.below(5) as usize;
        let d = random_instance(&mut rng, n, m);
        let space = SectionSpace::build(&d, scn).unwrap();
        let ids = section_ids(d.values(), m, scn);
        for i in 0..m {
            for j in (0..m).filter(|&j| j != i) {
                for g in 1..=scn as u32 {
                    let members: Vec<usize> = (0..n).filter(|&p| ids[i][p] == g).collect();
                    let targets: Vec<u32> = members.iter().map(|&p| ids[j][p]).collect();
                    let want = second_stage_ratios(&targets, 4);
                    let got = second_projection_sdr(&space, i, g, j, 4).unwrap();
                    assert_eq!(got.len(), members.len());
                    for ((p, v), (&q, w)) in got.iter().zip(members.iter().zip(want)) {
                        assert_eq!(*p, q);
                        assert!(relative_close(*v, w, 1e-12), "{v} vs {w}");
                    }
                    checked += members.len();
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn full_score_matches_brute_force() {
    let mut rng = Lcg(5);
    for round in 0..20 {
        let n = 15 + rng.below(16) as usize;
        let m = 1 + rng.below(4) as usize;
        let scn = 2 + rng.below(5) as usize;
        let d = random_instance(&mut rng, n, m);
        let ids = section_ids(d.values(), m, scn);
        let want = full_scores(&ids, scn, 4);
        let execution = if round % 2 == 0 {
            Execution::Sequential
        } else {
            Execution::Parallel
        };
        let params = KnsParams {
            k: 4,
            scn: Some(scn),
            strategy: Some(Strategy::Full),
            execution,
            ..KnsParams::default()
        };
        let r = detect(&d, &params).unwrap();
        for (row, w) in r.rows.iter().zip(&want) {
            assert!(relative_close(row.sum_first, w.sum_first, 1e-12));
            assert!(
                relative_close(row.sum_second, w.sum_second, 1e-12)
                    || w.sum_second == row.sum_second
            );
            assert_eq!(row.count_second, w.count_second);
            assert_eq!(row.count_second, (m * (m - 1)) as u64);
            assert!(relative_close(row.si, w.si, 1e-12));
        }
    }
}

#[test]
fn lof_matches_reference() {
    let mut rng = Lcg(19);
    for _ in 0..15 {
        let n = 12 + rng.below(19) as usize;
        let m = 1 + rng.below(4) as usize;
        let k = 1 + rng.below(6) as usize;
        let d = random_instance(&mut rng, n, m);
        let r = lof_score(&d, &LofParams { k_nn: k }).unwrap();
        for (row, (lrd, lof)) in r.rows.iter().zip(lof_reference(d.values(), m, k)) {
            assert!(relative_close(row.lrd, lrd, 1e-12));
            assert!(relative_close(row.lof, lof, 1e-12));
        }
    }
}

#[test]
fn lof_reference_with_duplicates() {
    let mut values = vec![2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 3.0, 7.0, 7.5, 9.0];
    values.extend([2.0, 4.0]);
    let d = Dataset::new(1, values.clone(), None).unwrap();
    let r = lof_score(&d, &LofParams { k_nn: 3 }).unwrap();
    for (row, (lrd, lof)) in r.rows.iter().zip(lof_reference(&values, 1, 3)) {
        assert!(relative_close(row.lrd, lrd, 1e-12));
        assert!(relative_close(row.lof, lof, 1e-12));
        assert!(row.lof.is_finite());
    }
}

#[test]
fn max_f_matches_exhaustive_cutoffs() {
    let mut rng = Lcg(23);
    for _ in 0..50 {
        let n = 500;
        let mut order: Vec<u64> = (1..=n).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.below(i as u64 + 1) as usize);
        }
        let outliers: Vec<u64> = (1..=10).map(|t| t * 37).collect();
        let ids: Vec<PointId> = (1..=n).map(PointId).collect();
        let labels: Vec<Label> = ids
            .iter()
            .map(|id| {
                if outliers.contains(&id.0) {
                    Label::Outlier
                } else {
                    Label::Normal
                }
            })
            .collect();
        let ranking: Vec<PointId> = order.iter().map(|&i| PointId(i)).collect();
        let curve = pr_curve(&ranking, &label_map(&ids, &labels)).unwrap();
        let flags: Vec<bool> = order.iter().map(|i| outliers.contains(i)).collect();
        assert_eq!(curve.max_f, max_f_exhaustive(&flags));
        assert_eq!(curve.levels.len(), 10);
    }
}
