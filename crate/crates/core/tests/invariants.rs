//! Symmetry and conservation properties over randomly drawn states.

use std::f64::consts::PI;

use curveflow::geometry::frenet_quantities;
use curveflow::geometry::segment_lengths;
use curveflow::reduced::{circles_rhs, CircleSystemState};
use curveflow::scheme::{assemble_rhs, CurveParams, SystemState};
use curveflow::{BiotSavartSpec, DiscreteCurve, GeometryCache, RedistParams, Vec3};
use proptest::prelude::*;

/// Rotation by `angle` about a unit axis, as a closure.
fn rotation(axis: Vec3, angle: f64) -> impl Fn(Vec3) -> Vec3 {
    let k = axis.normalized().expect("nonzero axis");
    let (s, c) = angle.sin_cos();
    move |v: Vec3| v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c))
}

fn wobbly(m: usize, center: Vec3, radius: f64, amp: f64, freq: f64, phase: f64) -> DiscreteCurve {
    DiscreteCurve::sample(m, |u| {
        let t = 2.0 * PI * u;
        center + Vec3::new(radius * t.cos(), radius * t.sin(), amp * (freq * t + phase).sin())
    })
    .unwrap()
}

fn two_curve_state(seed: (f64, f64, f64), omega: f64) -> SystemState {
    let (amp, phase, gap) = seed;
    let upper = wobbly(40, Vec3::new(0.3, -0.1, gap), 1.2, amp, 3.0, phase);
    let lower = DiscreteCurve::sample(50, |u| {
        let t = 2.0 * PI * u;
        Vec3::new(0.2 + 1.5 * t.cos(), 0.9 * t.sin(), amp * (2.0 * t).cos())
    })
    .unwrap();
    SystemState::new(
        vec![upper, lower],
        vec![CurveParams::new(0.7, 0.3), CurveParams::new(0.2, -0.4)],
        BiotSavartSpec::default(),
        RedistParams::with_omega(omega),
    )
    .unwrap()
}

fn max_norm(v: &[Vec<Vec3>]) -> f64 {
    v.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
}

fn seeds() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..0.4f64, 0.0..(2.0 * PI), 1.2..3.0f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn geometry_is_translation_invariant(
        seed in seeds(),
        c in prop::array::uniform3(-50.0..50.0f64),
    ) {
        let curve = two_curve_state(seed, 0.0).curves[0].clone();
        let moved = curve.translated(Vec3::from(c));
        let (g, h) = (GeometryCache::compute(&curve).unwrap(), GeometryCache::compute(&moved).unwrap());
        for k in 0..curve.len() {
            prop_assert!((g.d[k] - h.d[k]).abs() < 1e-12);
            prop_assert!((g.tangents[k] - h.tangents[k]).norm() < 1e-12);
            prop_assert!((g.curvature_vectors[k] - h.curvature_vectors[k]).norm() < 1e-10);
        }
    }

    #[test]
    fn geometry_scales_with_the_curve(seed in seeds(), lambda in 0.05..20.0f64) {
        let curve = two_curve_state(seed, 0.0).curves[1].clone();
        let scaled = curve.map(|p| p * lambda).unwrap();
        let g = frenet_quantities(&curve, segment_lengths(&curve).unwrap());
        let h = frenet_quantities(&scaled, segment_lengths(&scaled).unwrap());
        prop_assert!((h.length / (lambda * g.length) - 1.0).abs() < 1e-12);
        for k in 0..curve.len() {
            prop_assert!((h.d[k] / (lambda * g.d[k]) - 1.0).abs() < 1e-12);
            prop_assert!((h.curvatures[k] * lambda / g.curvatures[k] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rhs_is_translation_invariant(
        seed in seeds(),
        omega in 0.0..10.0f64,
        c in prop::array::uniform3(-20.0..20.0f64),
    ) {
        let s = two_curve_state(seed, omega);
        let base = assemble_rhs(&s).unwrap();
        let moved = assemble_rhs(&s.translated(Vec3::from(c))).unwrap();
        let scale = max_norm(&base);
        for (a, b) in base.iter().flatten().zip(moved.iter().flatten()) {
            prop_assert!((*a - *b).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn rhs_is_rotation_equivariant(
        seed in seeds(),
        omega in 0.0..10.0f64,
        axis in prop::array::uniform3(-1.0..1.0f64),
        angle in 0.0..(2.0 * PI),
    ) {
        let axis = Vec3::from(axis);
        prop_assume!(axis.norm() > 0.1);
        let rot = rotation(axis, angle);
        let s = two_curve_state(seed, omega);
        let mut turned = s.clone();
        turned.curves = s.curves.iter().map(|c| c.map(&rot).unwrap()).collect();
        let base = assemble_rhs(&s).unwrap();
        let after = assemble_rhs(&turned).unwrap();
        let scale = max_norm(&base);
        for (a, b) in base.iter().flatten().zip(after.iter().flatten()) {
            prop_assert!((rot(*a) - *b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn rhs_scales_inversely_with_size(seed in seeds(), lambda in 0.2..5.0f64) {
        // every term is homogeneous of degree -1 when delta = 0 and omega = 0
        let s = two_curve_state(seed, 0.0);
        let mut big = s.clone();
        big.curves = s.curves.iter().map(|c| c.map(|p| p * lambda).unwrap()).collect();
        let base = assemble_rhs(&s).unwrap();
        let after = assemble_rhs(&big).unwrap();
        let scale = max_norm(&base);
        for (a, b) in base.iter().flatten().zip(after.iter().flatten()) {
            prop_assert!((*a / lambda - *b).norm() <= 1e-11 * scale);
        }
    }

    #[test]
    fn reduced_radii_conserve_area(
        radii in prop::collection::vec(0.2..4.0f64, 2..6),
        gaps in prop::collection::vec(-4.0..4.0f64, 5),
    ) {
        let n = radii.len();
        let gaps: Vec<f64> = gaps[..n - 1].iter().map(|g| if g.abs() < 0.05 { g + 0.1 } else { *g }).collect();
        let state = CircleSystemState::new(radii.clone(), gaps).unwrap();
        let d = circles_rhs(&state).unwrap();
        let scale: f64 = radii.iter().zip(&d.radii).map(|(r, v)| (r * v).abs()).sum::<f64>().max(1e-300);
        let total: f64 = radii.iter().zip(&d.radii).map(|(r, v)| r * v).sum();
        prop_assert!(total.abs() <= 1e-14 * scale.max(1.0), "{total}");
    }

    #[test]
    fn reconstructed_gaps_telescope(gaps in prop::collection::vec(-5.0..5.0f64, 1..6)) {
        let n = gaps.len() + 1;
        let state = CircleSystemState { radii: vec![1.0; n], gaps };
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(state.z(i, j), -state.z(j, i));
                for k in 0..n {
                    prop_assert!((state.z(i, j) - (state.z(i, k) + state.z(k, j))).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn reversing_a_source_negates_its_field() {
    let source = wobbly(60, Vec3::ZERO, 1.0, 0.3, 2.0, 0.4);
    let p = Vec3::new(0.2, 0.1, 1.4);
    let spec = BiotSavartSpec::default();
    let f = curveflow::forces::biot_savart_at_point(p, &source, &spec).unwrap();
    let g = curveflow::forces::biot_savart_at_point(p, &source.reversed(), &spec).unwrap();
    assert!((f + g).norm() <= 1e-14 * f.norm());
}
