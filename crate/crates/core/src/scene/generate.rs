use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{validate_scene, BoxSpec, Scene, SceneConfig, ShelfSpec};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// Placement attempts allowed per box before giving up.
const ATTEMPTS_PER_BOX: usize = 200;
/// Fresh stacking runs before giving up.
const RESTARTS: usize = 10;
/// Candidate positions drawn per attempt.
const PROPOSALS: usize = 3;

/// The three carton sizes used in the shelf trials (m).
pub fn default_palette() -> Vec<Vec3> {
    vec![
        Vec3::new(0.23, 0.31, 0.25),
        Vec3::new(0.20, 0.20, 0.20),
        Vec3::new(0.50, 0.17, 0.17),
    ]
}

/// Generates a stable scene on the standard 1.0 × 0.3 × 1.6 m shelf.
pub fn generate_scene(seed: u64, n_boxes: usize, palette: &[Vec3]) -> Result<Scene> {
    generate_scene_on(
        ShelfSpec::default(),
        SceneConfig::default(),
        seed,
        n_boxes,
        palette,
    )
}

/// Seeded random stacking. Each box is dropped from above at a random x/y
/// position (sometimes aligned with an earlier box so that columns and
/// bridges form) and lands on the highest footprint it overlaps. Placements
/// that leave the scene invalid are retried.
pub fn generate_scene_on(
    shelf: ShelfSpec,
    config: SceneConfig,
    seed: u64,
    n_boxes: usize,
    palette: &[Vec3],
) -> Result<Scene> {
    if n_boxes == 0 {
        return Err(Error::InvalidArgument("n_boxes must be at least 1".into()));
    }
    if palette.is_empty() {
        return Err(Error::InvalidArgument("palette must not be empty".into()));
    }
    if palette
        .iter()
        .any(|d| !(d.x > 0.0 && d.y > 0.0 && d.z > 0.0))
    {
        return Err(Error::InvalidArgument(
            "palette dims must be positive".into(),
        ));
    }

    let min_volume = palette
        .iter()
        .map(|d| d.x * d.y * d.z)
        .fold(f64::INFINITY, f64::min);
    if min_volume * n_boxes as f64 > shelf.volume() {
        return Err(Error::GenerationExhausted {
            placed: 0,
            requested: n_boxes,
        });
    }

    let width = n_boxes.to_string().len().max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..RESTARTS {
        match stack_boxes(&mut rng, Scene::new(shelf, config), n_boxes, width, palette) {
            Ok(scene) => return Ok(scene),
            Err(placed) => best = best.max(placed),
        }
    }
    Err(Error::GenerationExhausted {
        placed: best,
        requested: n_boxes,
    })
}

/// One stacking run; on failure returns how many boxes were placed.
fn stack_boxes(
    rng: &mut ChaCha8Rng,
    mut scene: Scene,
    n_boxes: usize,
    width: usize,
    palette: &[Vec3],
) -> std::result::Result<Scene, usize> {
    for i in 0..n_boxes {
        let id = format!("b{:0width$}", i + 1);
        let mut placed = false;
        for _ in 0..ATTEMPTS_PER_BOX {
            // Keep the lowest of a few proposals so the shelf fills from the
            // bottom instead of growing thin towers.
            let Some(candidate) = (0..PROPOSALS)
                .filter_map(|_| propose(rng, &scene, &id, palette))
                .min_by(|a, b| a.center.z.total_cmp(&b.center.z))
            else {
                continue;
            };
            scene.boxes.push(candidate);
            if validate_scene(&scene).is_valid() {
                placed = true;
                break;
            }
            scene.boxes.pop();
        }
        if !placed {
            return Err(i);
        }
    }
    Ok(scene)
}

fn propose(rng: &mut ChaCha8Rng, scene: &Scene, id: &str, palette: &[Vec3]) -> Option<BoxSpec> {
    let shelf = &scene.shelf;
    let mut dims = palette[rng.gen_range(0..palette.len())];
    let fits_y = dims.y <= shelf.depth_y;
    let fits_rotated = dims.x <= shelf.depth_y && dims.y <= shelf.width_x;
    if (!fits_y && fits_rotated) || (fits_y && fits_rotated && rng.gen_bool(0.25)) {
        dims = Vec3::new(dims.y, dims.x, dims.z);
    }
    if dims.x > shelf.width_x || dims.z > shelf.height_z {
        return None;
    }

    let x = match scene.boxes.len() {
        n if n > 0 && rng.gen_bool(0.4) => {
            let other = &scene.boxes[rng.gen_range(0..n)];
            let slack = (other.dims.x - dims.x) / 2.0;
            match rng.gen_range(0..5) {
                0 => other.center.x,
                1 => other.center.x - slack,
                2 => other.center.x + slack,
                3 => other.center.x - (other.dims.x + dims.x) / 2.0,
                _ => other.center.x + (other.dims.x + dims.x) / 2.0,
            }
        }
        _ => grid(rng, dims.x / 2.0, shelf.width_x - dims.x / 2.0),
    };
    if x - dims.x / 2.0 < 0.0 || x + dims.x / 2.0 > shelf.width_x {
        return None;
    }
    let y = if dims.y <= shelf.depth_y {
        grid(rng, dims.y / 2.0, shelf.depth_y - dims.y / 2.0)
    } else {
        shelf.depth_y / 2.0
    };

    let probe = BoxSpec::new(id, dims, Vec3::new(x, y, 0.0), &scene.config);
    let footprint = probe.footprint();
    let floor = scene
        .boxes
        .iter()
        .filter(|b| b.footprint().intersection(&footprint).is_some())
        .map(|b| b.top())
        .fold(0.0, f64::max);
    if floor + dims.z > shelf.height_z {
        return None;
    }
    Some(BoxSpec::new(
        id,
        dims,
        Vec3::new(x, y, floor + dims.z / 2.0),
        &scene.config,
    ))
}

/// Uniform value on a 1 cm grid inside `[lo, hi]`.
fn grid(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let lo_cm = (lo * 100.0).ceil() as i64;
    let hi_cm = (hi * 100.0).floor() as i64;
    if hi_cm <= lo_cm {
        return (lo + hi) / 2.0;
    }
    rng.gen_range(lo_cm..=hi_cm) as f64 / 100.0
}
