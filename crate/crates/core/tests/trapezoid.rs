use std::sync::Arc;

use lgl_core::lattice::*;
use lgl_core::sampler::{enumerate_tilings, enumerate_tilings_with_cap, sample_cftp};
use lgl_core::trapezoid::*;
use num_rational::Ratio;
use proptest::prelude::*;

fn boundary(d: &Arc<Domain>) -> BoundaryHeightFunction {
    BoundaryHeightFunction::of_domain(d.clone(), 0).unwrap()
}

fn all_specs(max_width: u32, max_side: u32) -> Vec<TrapezoidSpec> {
    let mut out = Vec::new();
    for l in 1..=max_width {
        for a in 0..=max_side {
            let top = (a + l) as i32;
            // subsets of 0..top of size l
            for mask in 0u32..(1 << top) {
                if mask.count_ones() == l {
                    let lambda: Vec<i32> = (0..top).filter(|&i| mask >> i & 1 == 1).collect();
                    out.push(TrapezoidSpec::new(l, a, lambda).unwrap());
                }
            }
        }
    }
    out
}

fn spec_tilings(spec: &TrapezoidSpec) -> (Arc<Domain>, Vec<Tiling>) {
    let d = Arc::new(spec.domain().unwrap());
    let b = boundary(&d);
    let tilings = enumerate_tilings_with_cap(&d, &b, 200).unwrap();
    (d, tilings)
}

/// A tiling of the side-5 hexagon whose first three levels along the left
/// side are given, completed by the minimal extension.
fn hexagon_with_left_array(levels: &InterlacingArray) -> Tiling {
    let d = Arc::new(Domain::hexagon(5, 5, 5).unwrap());
    let width = levels.depth() as u32;
    let spec = TrapezoidSpec::new(width, 5, levels.top().to_vec()).unwrap();
    let local = height_from_array(levels, &spec).unwrap();
    let shift = TriVertex::new(width as i32, 0);
    let mut fixed: Vec<(usize, i32)> = boundary(&d).entries().collect();
    for (i, &v) in local.domain().vertices().iter().enumerate() {
        let j = d.index_of(v + shift).expect("trapezoid sits inside the hexagon");
        if !d.is_boundary(j) {
            fixed.push((j, local.at(i)));
        }
    }
    let (lo, _) = extremal_extensions(&d, &fixed).unwrap();
    tiling_from_height(&lo).unwrap()
}

#[test]
fn hexagon_figure_left_array() {
    let fig = InterlacingArray::new(vec![vec![2], vec![0, 4], vec![0, 2, 6]]).unwrap();
    let t = hexagon_with_left_array(&fig);
    let frame = TrapezoidFrame::hexagon_left(5, 5, 5);
    assert!(detect_embedded_trapezoid(&t, &frame).unwrap());
    let full = extract_boundary_array(&t, &frame).unwrap();
    assert_eq!(full.depth(), 5);
    assert_eq!(full.truncate(3), fig);
    assert_eq!(full.get(1, 1), 2);
    assert_eq!((full.get(2, 1), full.get(2, 2)), (0, 4));
    assert_eq!(full.rows()[2], vec![0, 2, 6]);
}

#[test]
fn bijection_round_trip_small_trapezoids() {
    let specs = all_specs(3, 4);
    assert!(specs.len() > 100);
    for spec in &specs {
        let (_, tilings) = spec_tilings(spec);
        assert_eq!(tilings.len() as u128, spec.tiling_count(), "{spec:?}");
        let arrays = InterlacingArray::enumerate_with_top(&spec.lambda);
        assert_eq!(arrays.len(), tilings.len());
        let mut seen = Vec::new();
        for t in &tilings {
            let a = array_from_tiling(t, spec).unwrap();
            assert_eq!(a.top(), spec.lambda.as_slice());
            assert_eq!(&tiling_from_array(&a, spec).unwrap(), t);
            seen.push(a);
        }
        seen.sort_by(|a, b| a.rows().cmp(b.rows()));
        seen.dedup();
        assert_eq!(seen.len(), tilings.len());
        for a in &arrays {
            assert_eq!(&array_from_tiling(&tiling_from_array(a, spec).unwrap(), spec).unwrap(), a);
        }
    }
}

#[test]
fn frozen_array_is_the_staircase() {
    for l in 1..=5 {
        let spec = TrapezoidSpec::frozen(l, 2).unwrap();
        let (_, tilings) = spec_tilings(&spec);
        assert_eq!(tilings.len(), 1);
        let a = array_from_tiling(&tilings[0], &spec).unwrap();
        for k in 1..=l as usize {
            for i in 1..=k {
                assert_eq!(a.get(k, i), i as i32 - 1);
            }
        }
        let (lhs, rhs) = height_sum_identity(&tilings[0], &spec).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, i64::from(l * (l - 1) / 2));
    }
}

#[test]
fn height_sum_identity_on_enumerated_trapezoids() {
    for spec in all_specs(3, 3) {
        let (_, tilings) = spec_tilings(&spec);
        for t in &tilings {
            let (lhs, rhs) = height_sum_identity(t, &spec).unwrap();
            assert_eq!(lhs, rhs, "{spec:?}");
        }
    }
    let single = TrapezoidSpec::new(1, 4, vec![3]).unwrap();
    let (_, tilings) = spec_tilings(&single);
    assert_eq!(height_sum_identity(&tilings[0], &single).unwrap(), (3, 3));
}

#[test]
fn tiling_from_array_rejects_bad_input() {
    let spec = TrapezoidSpec::new(2, 2, vec![0, 3]).unwrap();
    let wrong_top = InterlacingArray::new(vec![vec![1], vec![0, 2]]).unwrap();
    assert!(matches!(tiling_from_array(&wrong_top, &spec), Err(TrapezoidError::TopRowMismatch { .. })));
    let short = InterlacingArray::new(vec![vec![1]]).unwrap();
    assert!(tiling_from_array(&short, &spec).is_err());
    assert!(TrapezoidSpec::new(2, 2, vec![0, 4]).is_err());
    let other = TrapezoidSpec::new(2, 2, vec![1, 3]).unwrap();
    let (_, tilings) = spec_tilings(&other);
    assert_eq!(array_from_tiling(&tilings[0], &spec), Err(TrapezoidError::DomainMismatch));
}

#[test]
fn dent_statistics_examples() {
    let s = dent_stats(&TrapezoidSpec::new(3, 5, vec![0, 2, 6]).unwrap());
    assert_eq!(s.m_exact, Ratio::new(7, 6));
    assert_eq!(s.sigma2_exact, Ratio::new(197, 324));
    assert!((s.sigma2 - 0.608_024_691_358).abs() < 1e-9);

    let frozen = dent_stats(&TrapezoidSpec::new(3, 5, vec![0, 1, 2]).unwrap());
    assert_eq!(frozen.sigma2_exact, Ratio::new(-1, 108));
    assert_eq!(frozen.sigma(), 0.0);

    for l in 1..=7i128 {
        for shift in 0..4 {
            let lambda: Vec<i32> = (0..l as i32).map(|i| i + shift).collect();
            let st = dent_stats(&TrapezoidSpec::new(l as u32, 4, lambda).unwrap());
            let want = Ratio::new(l - 1, l) * (Ratio::new(2 * l - 1, 6 * l) - Ratio::new(l - 1, 4 * l)) - Ratio::new(1, 12);
            assert_eq!(st.sigma2_exact, want, "L = {l}");
        }
    }
}

/// Under the uniform measure the exact mean of `y_1^1` is
/// `Σλ/L - (L - 1)/2`, half a unit above the centre `m(λ)`.
#[test]
fn first_line_mean_is_half_above_centre() {
    for spec in all_specs(3, 3) {
        let arrays = InterlacingArray::enumerate_with_top(&spec.lambda);
        let total: i128 = arrays.iter().map(|a| i128::from(a.get(1, 1))).sum();
        let mean = Ratio::new(total, arrays.len() as i128);
        let l = i128::from(spec.width);
        let sum: i128 = spec.lambda.iter().map(|&x| i128::from(x)).sum();
        assert_eq!(mean, Ratio::new(sum, l) - Ratio::new(l - 1, 2), "{spec:?}");
        assert_eq!(mean, dent_stats(&spec).m_exact + Ratio::new(1, 2), "{spec:?}");
    }
}

fn rotate_tiling(t: &Tiling, turns: u8) -> Tiling {
    let d = t.domain();
    let steps: Vec<Direction> = d.steps().iter().map(|s| s.rotate(turns)).collect();
    let rd = Arc::new(Domain::from_path(d.start().rotate(turns), &steps).unwrap());
    Tiling::new(rd, t.lozenges().iter().map(|z| z.rotate(turns)).collect()).unwrap()
}

#[test]
fn six_orientations_agree() {
    let d = Arc::new(Domain::hexagon(3, 2, 3).unwrap());
    let frame = TrapezoidFrame::hexagon_left(3, 2, 3);
    for t in enumerate_tilings(&d, &boundary(&d)).unwrap() {
        let a = extract_boundary_array(&t, &frame).unwrap();
        for j in 1..6 {
            let rt = rotate_tiling(&t, j);
            let rf = frame.rotate(j);
            assert!(detect_embedded_trapezoid(&rt, &rf).unwrap());
            assert_eq!(extract_boundary_array(&rt, &rf).unwrap(), a, "rotation {j}");
        }
    }
}

#[test]
fn extraction_matches_trapezoid_encoding() {
    // a trapezoid shifted so that its straight side starts at the origin
    let spec = TrapezoidSpec::new(3, 2, vec![0, 2, 4]).unwrap();
    let (_, tilings) = spec_tilings(&spec);
    let frame = TrapezoidFrame::canonical(spec.start(), 2, 3, 3);
    for t in &tilings {
        assert!(detect_embedded_trapezoid(t, &frame).unwrap());
        assert_eq!(extract_boundary_array(t, &frame).unwrap(), array_from_tiling(t, &spec).unwrap());
    }
}

#[test]
fn boundary_frames_are_always_embedded() {
    let d = Arc::new(Domain::hexagon(2, 2, 2).unwrap());
    let frame = TrapezoidFrame::hexagon_left(2, 2, 2);
    for t in enumerate_tilings(&d, &boundary(&d)).unwrap() {
        for j in 0..6 {
            let rt = rotate_tiling(&t, j);
            assert!(detect_embedded_trapezoid(&rt, &frame.rotate(j)).unwrap());
        }
    }
}

/// The faces on the two sides of the lattice edge `{v, w}`.
fn faces_beside(v: TriVertex, w: TriVertex) -> Vec<Face> {
    v.neighbors()
        .into_iter()
        .filter(|n| n.is_adjacent(w))
        .map(|n| Face::from_vertices([v, w, n]).unwrap())
        .collect()
}

/// Direct geometric test: every unit edge of the three segments borders a
/// face of the domain and is not the inner diagonal of a lozenge.
fn embedded_by_geometry(t: &Tiling, frame: &TrapezoidFrame) -> bool {
    let d = t.domain();
    [frame.left, frame.side, frame.right].iter().all(|seg| {
        (0..seg.len).all(|s| {
            let v = TriVertex::new(
                seg.start.x + s as i32 * seg.dir.offset().x,
                seg.start.y + s as i32 * seg.dir.offset().y,
            );
            let w = v.step(seg.dir);
            let faces = faces_beside(v, w);
            let inside = faces.iter().any(|&f| d.contains_face(f));
            let crossed = t.lozenges().iter().any(|z| {
                let fz = z.faces();
                faces.contains(&fz[0]) && faces.contains(&fz[1])
            });
            inside && !crossed
        })
    })
}

#[test]
fn a_crossed_segment_is_detected() {
    let d = Arc::new(Domain::hexagon(2, 2, 2).unwrap());
    let mut crossed = 0;
    for t in enumerate_tilings(&d, &boundary(&d)).unwrap() {
        for z in t.lozenges().iter().filter(|z| z.kind == LozengeKind::Type2) {
            let (start, dir) = z.diagonal();
            assert_eq!(dir, Direction::U);
            let frame = TrapezoidFrame::canonical(start, 1, 1, 1);
            assert!(!detect_embedded_trapezoid(&t, &frame).unwrap());
            assert!(extract_boundary_array(&t, &frame).is_err());
            crossed += 1;
        }
    }
    assert!(crossed > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn detection_agrees_with_geometry(
        idx in 0usize..490,
        px in -1i32..7, py in -1i32..7,
        side in 1u32..4, left in 1u32..4, right in 1u32..4,
        turns in 0u8..6,
    ) {
        let d = Arc::new(Domain::hexagon(3, 3, 2).unwrap());
        let tilings = enumerate_tilings(&d, &boundary(&d)).unwrap();
        let t = &tilings[idx % tilings.len()];
        let frame = TrapezoidFrame::canonical(TriVertex::new(px, py), side, left, right);
        // rotate about p so the frame stays near the domain
        let p = frame.side.start;
        let r = frame.rotate(turns);
        let back = r.side.start;
        let shift = |s: Segment| Segment::new(TriVertex::new(s.start.x - back.x + p.x, s.start.y - back.y + p.y), s.dir, s.len);
        let frame = TrapezoidFrame { left: shift(r.left), side: shift(r.side), right: shift(r.right) };
        prop_assert_eq!(detect_embedded_trapezoid(t, &frame).unwrap(), embedded_by_geometry(t, &frame));
    }

    #[test]
    fn dent_stats_shift_invariance(mask in 1u32..(1 << 12), side in 0u32..4, c in 0i32..20) {
        let lambda: Vec<i32> = (0..12).filter(|&i| mask >> i & 1 == 1).collect();
        let l = lambda.len() as u32;
        let spec = TrapezoidSpec::new(l, 12 - l + side, lambda.clone()).unwrap();
        let moved = TrapezoidSpec::new(l, 12 - l + side + c as u32, lambda.iter().map(|x| x + c).collect()).unwrap();
        let (a, b) = (dent_stats(&spec), dent_stats(&moved));
        prop_assert_eq!(b.m_exact, a.m_exact + Ratio::from_integer(i128::from(c)));
        prop_assert_eq!(b.sigma2_exact, a.sigma2_exact);
        prop_assert!(a.sigma2_exact >= Ratio::new(-1, 12));
    }

    #[test]
    fn sampled_trapezoids_satisfy_the_identities(mask in 1u32..(1 << 10), seed in any::<u64>()) {
        let lambda: Vec<i32> = (0..10).filter(|&i| mask >> i & 1 == 1).collect();
        prop_assume!(lambda.len() <= 8);
        let l = lambda.len() as u32;
        let spec = TrapezoidSpec::new(l, 10 - l, lambda).unwrap();
        let d = Arc::new(spec.domain().unwrap());
        let t = sample_cftp(&d, &boundary(&d), seed).unwrap();
        let (lhs, rhs) = height_sum_identity(&t, &spec).unwrap();
        prop_assert_eq!(lhs, rhs);
        let a = array_from_tiling(&t, &spec).unwrap();
        prop_assert_eq!(tiling_from_array(&a, &spec).unwrap(), t);
        let back = InterlacingArray::from_json_line(&a.to_json_line()).unwrap();
        prop_assert_eq!(back, a);
    }
}
