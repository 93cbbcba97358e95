use vdc_core::arena::{render_view, run_navigation, ArenaConfig, Controller, RobotState, World};
use vdc_core::avdm::AvdmParams;
use vdc_core::collision::{CollisionModel, CollisionParams};
use vdc_core::profiler::{build_histogram, build_map};

fn small_config() -> ArenaConfig {
    let mut cfg = ArenaConfig::default();
    cfg.camera.width = 40;
    cfg.camera.height = 20;
    cfg.camera.supersample = 4;
    cfg.wall_tf_hz = 2.0;
    cfg
}

struct Row {
    x: f64,
    y: f64,
    score: f64,
    warmup: bool,
}

fn parse_csv(text: &str) -> Vec<Row> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (cx, cy, cs, cw) = (col("x"), col("y"), col("score"), col("warmup"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            Row {
                x: f[cx].parse().unwrap(),
                y: f[cy].parse().unwrap(),
                score: f[cs].parse().unwrap(),
                warmup: f[cw] == "1",
            }
        })
        .collect()
}

#[test]
fn exported_trajectory_refolds_to_map_and_histogram() {
    let cfg = small_config();
    let traj = run_navigation(&cfg, 40.0, &Controller::LightRing, 3, &AvdmParams::default()).unwrap();
    let rows = parse_csv(&traj.to_csv());
    assert_eq!(rows.len(), traj.samples.len());

    let live: Vec<&Row> = rows.iter().filter(|r| !r.warmup).collect();
    let mut scores: Vec<f64> = live.iter().map(|r| r.score).collect();
    scores.sort_by(f64::total_cmp);
    let threshold = scores[scores.len() / 2];

    let hist = build_histogram(&traj, threshold, 5.0, 4).unwrap();
    let above = live.iter().filter(|r| r.score > threshold).count() as u64;
    assert_eq!(hist.total(), above);

    let cells = 8;
    let map = build_map(&traj, cells).unwrap();
    let mut counts = vec![0u64; cells * cells];
    let mut sums = vec![0.0f64; cells * cells];
    for r in &live {
        let ix = ((r.x / cfg.side_m * cells as f64) as usize).min(cells - 1);
        let iy = ((r.y / cfg.side_m * cells as f64) as usize).min(cells - 1);
        counts[iy * cells + ix] += 1;
        sums[iy * cells + ix] += r.score;
    }
    for iy in 0..cells {
        for ix in 0..cells {
            let s = map.get(ix, iy);
            assert_eq!(s.count, counts[iy * cells + ix]);
            assert!((s.sum - sums[iy * cells + ix]).abs() <= 1e-9 * sums[iy * cells + ix].abs().max(1.0));
        }
    }
}

#[test]
fn navigation_is_reproducible_end_to_end() {
    let cfg = small_config();
    let params = AvdmParams::default();
    let a = run_navigation(&cfg, 20.0, &Controller::Collision(CollisionParams::default()), 9, &params).unwrap();
    let b = run_navigation(&cfg, 20.0, &Controller::Collision(CollisionParams::default()), 9, &params).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    let c = run_navigation(&cfg, 20.0, &Controller::Collision(CollisionParams::default()), 10, &params).unwrap();
    assert_ne!(a.to_csv(), c.to_csv());
}

#[test]
fn looming_wall_drives_the_collision_potential_up() {
    let cfg = ArenaConfig {
        wall_tf_hz: 0.0,
        ..ArenaConfig::default()
    };
    let world = World::new(cfg.clone()).unwrap();
    let mut model = CollisionModel::new(cfg.camera.width, cfg.camera.height, CollisionParams::default()).unwrap();
    let dt = 1.0 / cfg.sample_rate_hz;
    let mut state = RobotState::at_center(&cfg, 0.0);
    let mut trace = Vec::new();
    let mut n = 0;
    while state.distance_ahead(&cfg) > cfg.wall_clearance_m {
        let frame = render_view(&world, &state, n as f64 * dt).unwrap();
        trace.push((state.distance_ahead(&cfg), model.step(&frame).unwrap().potential));
        state.x += cfg.speed_mps * dt;
        n += 1;
    }
    let mean_within = |lo: f64, hi: f64| {
        let v: Vec<f64> = trace.iter().filter(|(d, _)| *d > lo && *d <= hi).map(|(_, p)| *p).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let far = mean_within(0.35, 0.45);
    let near = mean_within(cfg.wall_clearance_m, 0.1);
    assert!(near > far, "near {near} far {far}");
}
