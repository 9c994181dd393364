mod common;

use std::collections::BTreeSet;

use common::BruteGeometry;
use ndooc::bounds::num_lines;
use ndooc::geometry::SingerGeometry;
use num_bigint::BigInt;

const CASES: &[(u32, u32, u32)] = &[
    (2, 1, 3),
    (3, 1, 3),
    (2, 2, 3),
    (2, 1, 5),
    (5, 1, 3),
    (2, 1, 4),
];

#[test]
fn lines_agree_with_field_arithmetic() {
    for &(p, m, k) in CASES {
        let q = p.pow(m);
        let geom = SingerGeometry::new(q, k).unwrap();
        let brute = BruteGeometry::new(p, m, k);
        assert_eq!(geom.num_points(), brute.n);
        let fast: BTreeSet<Vec<u32>> = geom
            .enumerate_lines()
            .into_iter()
            .map(|l| l.points().to_vec())
            .collect();
        let slow = brute.all_lines();
        assert_eq!(fast, slow, "PG({k},{q})");
        assert_eq!(BigInt::from(fast.len()), num_lines(k, q as u64));
    }
}

#[test]
fn line_through_matches_brute_force_pairs() {
    let geom = SingerGeometry::new(3, 3).unwrap();
    let brute = BruteGeometry::new(3, 1, 3);
    for a in (0..40).step_by(3) {
        for b in (a + 1..40).step_by(7) {
            assert_eq!(
                geom.line_through(a, b).unwrap().points(),
                brute.line(a, b).as_slice()
            );
        }
    }
}

#[test]
fn spreads_partition_points_into_flats() {
    for &(q, k, d) in &[
        (2, 3, 1),
        (3, 3, 1),
        (4, 3, 1),
        (2, 5, 1),
        (2, 5, 2),
        (3, 5, 1),
    ] {
        let geom = SingerGeometry::new(q, k).unwrap();
        let spread = geom.singer_spread(d).unwrap();
        let mut seen = vec![0u32; geom.num_points() as usize];
        for (j, e) in spread.elements.iter().enumerate() {
            assert!(geom.is_flat(e, d));
            for &p in e.points() {
                seen[p as usize] += 1;
                assert_eq!(spread.element_of(p), j as u32);
            }
        }
        assert!(seen.iter().all(|&c| c == 1), "PG({k},{q}) d={d}");
    }
}

#[test]
fn non_spread_lines_meet_elements_at_most_once() {
    for &(q, k, d) in &[(2, 3, 1), (3, 3, 1), (2, 5, 2), (2, 5, 1)] {
        let geom = SingerGeometry::new(q, k).unwrap();
        let spread = geom.singer_spread(d).unwrap();
        for line in geom.enumerate_lines() {
            if spread.contains_set(&line) {
                continue;
            }
            for e in &spread.elements {
                assert!(line.intersection_len(e) <= 1);
            }
        }
    }
}

#[test]
fn invalid_spread_dimensions() {
    let geom = SingerGeometry::new(2, 4).unwrap();
    assert!(geom.singer_spread(1).is_err());
    assert!(geom.singer_spread(4).is_err());
}
