use vergo::volumetric::{LidarWedgeParams, RaycastCameraParams};
use vergo::{DynamicsModel, SearchSpace, VolumetricModel};

fn corners(model: &VolumetricModel, n_u: usize, n_v: usize, altitude: f64) -> Vec<Vec<f64>> {
    let q = DynamicsModel::default_quadcopter();
    let big = SearchSpace::new(vec![100.0, 100.0]).unwrap();
    let s = vec![50.0, 50.0, altitude, 0.0, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let pts = model.sample_points_unclamped(&q, &big, &s).unwrap();
    [0, n_u - 1, n_u * n_v - 1, n_u * (n_v - 1)].iter().map(|&i| pts[i].clone()).collect()
}

#[test]
fn nadir_footprint_scales_with_altitude() {
    let params = RaycastCameraParams { n_u: 7, n_v: 5, tilt: 0.0, ..RaycastCameraParams::default() };
    let model = VolumetricModel::camera(params).unwrap();
    let low = corners(&model, 7, 5, 1.0);
    let high = corners(&model, 7, 5, 2.0);
    for (a, b) in low.iter().zip(&high) {
        // ray-plane similarity about the nadir point
        for i in 0..2 {
            assert!(((b[i] - 50.0) - 2.0 * (a[i] - 50.0)).abs() <= 1e-12);
        }
    }
    let diameter = |c: &[Vec<f64>]| ((c[0][0] - c[2][0]).powi(2) + (c[0][1] - c[2][1]).powi(2)).sqrt();
    assert!((diameter(&high) / diameter(&low) - 2.0).abs() <= 1e-12);

    let q = DynamicsModel::default_quadcopter();
    let space = SearchSpace::new(vec![100.0, 100.0]).unwrap();
    let state = |z: f64| vec![50.0, 50.0, z, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    let a1 = model.camera_footprint_area(&q, &space, &state(1.0)).unwrap();
    let a2 = model.camera_footprint_area(&q, &space, &state(2.0)).unwrap();
    assert!((a2 / a1 - 4.0).abs() <= 1e-9);
}

#[test]
fn lidar_samples_stay_inside_the_wedge() {
    let p = LidarWedgeParams::with_range(0.25);
    let model = VolumetricModel::lidar(p.clone()).unwrap();
    assert_eq!(model.n_samples(), 1000);
    let dd = DynamicsModel::diff_drive(1.0, 1.0).unwrap();
    let big = SearchSpace::new(vec![10.0, 10.0]).unwrap();
    let s = [5.0, 5.0, 0.4, 0.0, 0.0];
    for q in model.sample_points_unclamped(&dd, &big, &s).unwrap() {
        let (dx, dy) = (q[0] - 5.0, q[1] - 5.0);
        let r = dx.hypot(dy);
        assert!(r >= p.min_range - 1e-12 && r <= p.max_range + 1e-12);
        let bearing = vergo::dynamics::wrap_angle(dy.atan2(dx) - 0.4);
        assert!(bearing.abs() <= 0.5 * p.fov + 1e-12);
    }
}

#[test]
fn clamped_samples_lie_in_the_space() {
    let model = VolumetricModel::camera(RaycastCameraParams::default()).unwrap();
    let q = DynamicsModel::default_quadcopter();
    let space = SearchSpace::unit_square();
    let s = vec![0.9, 0.1, 2.5, 0.1, -0.2, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
    for p in model.sample_points(&q, &space, &s).unwrap() {
        assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
    }
}
