use nalgebra::{Rotation3, Unit};
use oamlos::geometry::*;
use proptest::prelude::*;

fn scene(m: usize, n: usize, tx_sp: f64, rx_sp: f64, range: f64) -> ArrayGeometry {
    build_uniform_linear_geometry(m, n, tx_sp, rx_sp, range, 1.5).unwrap()
}

fn remap(g: &ArrayGeometry, f: impl Fn(Vec3) -> Vec3, turn: impl Fn(Vec3) -> Vec3) -> ArrayGeometry {
    let map = |poses: &[AntennaPose]| {
        poses
            .iter()
            .map(|p| AntennaPose::new(f(p.position()), turn(p.boresight())).unwrap())
            .collect::<Vec<_>>()
    };
    ArrayGeometry::new(map(g.tx()), map(g.rx())).unwrap()
}

fn vec3() -> impl Strategy<Value = Vec3> {
    (-100.0f64..100.0, -100.0f64..100.0, -100.0f64..100.0).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

proptest! {
    #[test]
    fn translation_changes_nothing(
        m in 1usize..5, n in 1usize..5,
        tx_sp in 0.05f64..2.0, rx_sp in 0.05f64..2.0, range in 1.0f64..50.0,
        shift in vec3(),
    ) {
        let g = scene(m, n, tx_sp, rx_sp, range);
        let moved = remap(&g, |p| p + shift, |b| b);
        for i in 0..n {
            for j in 0..m {
                let (a, b) = (g.link_angles(i, j).unwrap(), moved.link_angles(i, j).unwrap());
                prop_assert!((g.link_distance(i, j).unwrap() - moved.link_distance(i, j).unwrap()).abs() < 1e-9);
                prop_assert!((a.theta - b.theta).abs() < 1e-9);
                prop_assert!((a.phi - b.phi).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rotation_preserves_polar_angles(
        m in 1usize..5, n in 1usize..5,
        tx_sp in 0.05f64..2.0, rx_sp in 0.05f64..2.0, range in 1.0f64..50.0,
        axis in vec3(), angle in -3.1f64..3.1,
    ) {
        prop_assume!(axis.norm() > 1e-3);
        let rot = Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle);
        let g = scene(m, n, tx_sp, rx_sp, range);
        let turned = remap(&g, |p| rot * p, |b| rot * b);
        for i in 0..n {
            for j in 0..m {
                let (a, b) = (g.link_angles(i, j).unwrap(), turned.link_angles(i, j).unwrap());
                prop_assert!((a.theta - b.theta).abs() < 1e-9);
                prop_assert!((g.link_distance(i, j).unwrap() - turned.link_distance(i, j).unwrap()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn link_length_exceeds_range_off_axis(
        m in 1usize..6, n in 1usize..6,
        tx_sp in 0.05f64..2.0, rx_sp in 0.05f64..2.0, range in 1.0f64..50.0,
    ) {
        let g = scene(m, n, tx_sp, rx_sp, range);
        for i in 0..n {
            for j in 0..m {
                let d = g.link_distance(i, j).unwrap();
                let lateral = (g.rx()[i].position().x - g.tx()[j].position().x).abs();
                if lateral < 1e-12 {
                    prop_assert!((d - range).abs() < 1e-12);
                } else {
                    prop_assert!(d > range);
                }
            }
        }
    }
}
