use super::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::avdm::AvdmParams;

fn small_config() -> ArenaConfig {
    let mut cfg = ArenaConfig::default();
    cfg.camera.width = 40;
    cfg.camera.height = 20;
    cfg.camera.supersample = 4;
    cfg
}

#[test]
fn one_second_step_moves_speed() {
    let cfg = ArenaConfig::default();
    let s = RobotState::at_center(&cfg, 0.3);
    let (n, crashed) = step_robot(&s, 1.0, &cfg).unwrap();
    assert!(!crashed);
    assert!(((n.x - s.x).hypot(n.y - s.y) - 0.08).abs() < 1e-12);
    assert_eq!(n.heading, s.heading);
}

#[test]
fn heading_quarter_turn_moves_along_y() {
    let cfg = ArenaConfig::default();
    let s = RobotState::at_center(&cfg, FRAC_PI_2);
    let (n, _) = step_robot(&s, 1.0, &cfg).unwrap();
    assert!((n.x - s.x).abs() < 1e-15);
    assert!((n.y - s.y - 0.08).abs() < 1e-12);
}

#[test]
fn half_steps_equal_full_step() {
    let cfg = ArenaConfig::default();
    let s = RobotState::at_center(&cfg, 1.1);
    let (a, _) = step_robot(&s, 0.5, &cfg).unwrap();
    let (a, _) = step_robot(&a, 0.5, &cfg).unwrap();
    let (b, _) = step_robot(&s, 1.0, &cfg).unwrap();
    assert!((a.x - b.x).abs() < 1e-15 && (a.y - b.y).abs() < 1e-15);
}

#[test]
fn step_rejects_bad_dt_and_outside() {
    let cfg = ArenaConfig::default();
    let s = RobotState::at_center(&cfg, 0.0);
    assert!(step_robot(&s, 0.0, &cfg).is_err());
    let out = RobotState { x: 1.5, ..s };
    assert!(matches!(step_robot(&out, 0.1, &cfg), Err(Error::OutsideArena { .. })));
}

#[test]
fn step_into_wall_clamps_and_crashes() {
    let cfg = ArenaConfig::default();
    let s = RobotState {
        x: 0.95,
        y: 0.5,
        heading: 0.0,
        speed_mps: 0.08,
    };
    let (n, crashed) = step_robot(&s, 1.0, &cfg).unwrap();
    assert!(crashed);
    assert!((n.x - (1.0 - cfg.wall_clearance_m)).abs() < 1e-12);
}

#[test]
fn turn_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = RobotState::at_center(&ArenaConfig::default(), 1.0);
    let n = 10_000;
    let (mut sum, mut left) = (0.0, 0usize);
    for _ in 0..n {
        let t = boundary_turn(&s, &mut rng);
        let mut d = (t.heading - s.heading).rem_euclid(TAU);
        if d > PI {
            d -= TAU;
        }
        let mag = d.abs().to_degrees();
        assert!((80.0 - 1e-9..=100.0 + 1e-9).contains(&mag), "{mag}");
        assert_eq!((t.x, t.y), (s.x, s.y));
        sum += mag;
        left += usize::from(d > 0.0);
    }
    assert!((sum / n as f64 - 90.0).abs() < 0.5);
    assert!((left as f64 / n as f64 - 0.5).abs() < 0.02);
}

#[test]
fn turns_reproducible_per_seed() {
    let s = RobotState::at_center(&ArenaConfig::default(), 0.0);
    let seq = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..20).map(|_| boundary_turn(&s, &mut rng).heading).collect::<Vec<_>>()
    };
    assert_eq!(seq(9), seq(9));
    assert_ne!(seq(9), seq(10));
}

#[test]
fn cast_ray_perimeter_coordinates() {
    let (d, s) = cast_ray(1.0, 0.5, 0.5, 0.0);
    assert!((d - 0.5).abs() < 1e-12 && (s - 1.5).abs() < 1e-12);
    let (_, s) = cast_ray(1.0, 0.5, 0.5, FRAC_PI_2);
    assert!((s - 2.5).abs() < 1e-12);
    let (_, s) = cast_ray(1.0, 0.5, 0.5, PI);
    assert!((s - 3.5).abs() < 1e-12);
    let (_, s) = cast_ray(1.0, 0.5, 0.5, -FRAC_PI_2);
    assert!((s - 0.5).abs() < 1e-12);
}

#[test]
fn render_deterministic_and_in_range() {
    let world = World::new(small_config()).unwrap();
    let s = RobotState::at_center(&world.config, 0.4);
    let a = render_view(&world, &s, 0.25).unwrap();
    let b = render_view(&world, &s, 0.25).unwrap();
    assert_eq!(a, b);
    assert!(a.pixels().iter().all(|p| (0.0..=1.0).contains(p)));
}

#[test]
fn zero_contrast_wall_renders_uniform() {
    let mut cfg = small_config();
    cfg.wall = WallPattern::Grating {
        cycles_per_m: 40.0,
        contrast: 0.0,
        mean_luminance: 0.5,
    };
    let world = World::new(cfg).unwrap();
    let f = render_view(&world, &RobotState::at_center(&world.config, 0.0), 0.0).unwrap();
    assert!(f.pixels().iter().all(|&p| (p - 0.5).abs() < 1e-6));
}

#[test]
fn render_outside_rejected() {
    let world = World::new(small_config()).unwrap();
    let s = RobotState {
        x: -0.1,
        y: 0.5,
        heading: 0.0,
        speed_mps: 0.08,
    };
    assert!(render_view(&world, &s, 0.0).is_err());
}

fn mid_row_crossings(f: &Frame) -> usize {
    let row = f.row(f.height() / 2);
    let mean = row.iter().map(|&p| p as f64).sum::<f64>() / row.len() as f64;
    row.windows(2)
        .filter(|w| (w[0] as f64 - mean).signum() != (w[1] as f64 - mean).signum())
        .count()
}

#[test]
fn nearer_view_shows_fewer_cycles() {
    let mut cfg = ArenaConfig::default();
    cfg.wall = WallPattern::Grating {
        cycles_per_m: 10.0,
        contrast: 1.0,
        mean_luminance: 0.5,
    };
    let world = World::new(cfg).unwrap();
    let mut last = usize::MAX;
    for x in [0.5, 0.6, 0.7, 0.8, 0.9, 0.95] {
        let s = RobotState {
            x,
            y: 0.5,
            heading: 0.0,
            speed_mps: 0.08,
        };
        let n = mid_row_crossings(&render_view(&world, &s, 0.0).unwrap());
        assert!(n <= last, "x={x}: {n} > {last}");
        last = n;
    }
    assert!(last < 10);
}

#[test]
fn wall_drift_moves_pattern() {
    let mut cfg = small_config();
    cfg.wall_tf_hz = 2.0;
    let world = World::new(cfg).unwrap();
    // A full drift period returns the same wall.
    for s in [0.1, 1.3, 2.7] {
        let a = world.wall_luminance(s, 0.0);
        let b = world.wall_luminance(s, 0.5);
        assert!((a - b).abs() < 1e-9);
        assert!((world.wall_luminance(s, 0.125) - a).abs() > 1e-6 || a == 0.5);
    }
}

#[test]
fn config_text_round_trip() {
    let cfg = ArenaConfig {
        wall: WallPattern::natural(),
        wall_tf_hz: 3.0,
        ..ArenaConfig::default()
    };
    let text = cfg.to_text().unwrap();
    assert_eq!(ArenaConfig::from_text(&text).unwrap(), cfg);
    assert!(ArenaConfig::from_text("side_m = -1.0").is_err());
}

#[test]
fn navigation_contained_continuous_and_counted() {
    let cfg = small_config();
    let params = AvdmParams::default();
    let traj = run_navigation(&cfg, 60.0, &Controller::LightRing, 5, &params).unwrap();
    assert_eq!(traj.samples.len(), (60.0 * cfg.sample_rate_hz) as usize);
    for s in &traj.samples {
        assert!((0.0..=cfg.side_m).contains(&s.x) && (0.0..=cfg.side_m).contains(&s.y));
    }
    assert!(traj.max_step_excess() <= 1e-9);
    assert!(traj.events().any(|e| e.kind == EventKind::Turn));
    let again = run_navigation(&cfg, 60.0, &Controller::LightRing, 5, &params).unwrap();
    assert_eq!(traj, again);
}

#[test]
fn approach_ends_at_clearance() {
    let cfg = small_config();
    let runs = run_approach(&cfg, 1.0, 2, 4, &AvdmParams::default()).unwrap();
    assert_eq!(runs.len(), 2);
    for r in &runs {
        let last = r.samples.last().unwrap();
        assert!((cfg.side_m - last.x - cfg.wall_clearance_m).abs() < 1e-9);
        assert!(r.max_step_excess() <= 1e-9);
    }
    assert_eq!(runs, run_approach(&cfg, 1.0, 2, 4, &AvdmParams::default()).unwrap());
}
