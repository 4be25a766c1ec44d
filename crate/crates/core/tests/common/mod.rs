#![allow(dead_code)]

use std::sync::Arc;

use fixscan_core::construction::{ConstructedScene, FSigmaSpec, IntervalUnion};
use fixscan_core::geometry::{ConvexSetDescriptor, PointN, SquareInX};
use fixscan_core::seed::test_seed;
use proptest::test_runner::{Config, RngSeed};

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(test_seed()),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn scene(level: &[(f64, f64)]) -> ConstructedScene {
    let spec = FSigmaSpec::closed(IntervalUnion::new(level.to_vec()).unwrap()).unwrap();
    ConstructedScene::new(spec).unwrap()
}

pub fn two_level_scene() -> ConstructedScene {
    let spec = FSigmaSpec::new(
        vec![
            IntervalUnion::new(vec![(0.0, 0.0)]).unwrap(),
            IntervalUnion::new(vec![(0.0, 0.0), (0.3, 0.5)]).unwrap(),
        ],
        Default::default(),
    )
    .unwrap();
    ConstructedScene::new(spec).unwrap()
}

/// Every set variant, each paired with a sampler of its members.
pub fn variants() -> Vec<(&'static str, ConvexSetDescriptor)> {
    let s = scene(&[(0.0, 0.0), (0.2, 0.4)]);
    vec![
        ("singleton", ConvexSetDescriptor::singleton(vec![1.0, 0.0]).unwrap()),
        ("vertical_ray", ConvexSetDescriptor::vertical_ray(0.0, 0.0)),
        ("parabola", ConvexSetDescriptor::ParabolaEpigraph),
        ("square_epigraph", ConvexSetDescriptor::SmoothEpigraph(Arc::new(SquareInX))),
        ("scene_epigraph", s.a1().clone()),
        (
            "parabola_x_half_line",
            ConvexSetDescriptor::product_with_half_line(ConvexSetDescriptor::ParabolaEpigraph).unwrap(),
        ),
    ]
}

/// A member of `set` built from three numbers in `[-1, 1]`.
pub fn member(set: &ConvexSetDescriptor, t: [f64; 3]) -> PointN {
    match set {
        ConvexSetDescriptor::Singleton(q) => q.clone(),
        ConvexSetDescriptor::VerticalRay { base } => PointN::from([base[0], base[1], 2.0 * (t[2] + 1.0)]),
        ConvexSetDescriptor::ParabolaEpigraph => {
            let x = 2.0 * t[0];
            PointN::from([x, x * x + t[1].abs()])
        }
        ConvexSetDescriptor::SmoothEpigraph(f) => {
            let x = 2.0 * t[0];
            let z = 2.0 * (t[2] + 1.0);
            PointN::from([x, f.value(x, z) + t[1].abs(), z])
        }
        ConvexSetDescriptor::ProductWithHalfLine(_) => {
            let x = 2.0 * t[0];
            PointN::from([x, x * x + t[1].abs(), 2.0 * (t[2] + 1.0)])
        }
    }
}

pub fn point(dim: usize, c: [f64; 3]) -> PointN {
    PointN::new(c[..dim].to_vec()).unwrap()
}
