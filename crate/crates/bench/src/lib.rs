//! Shared inputs for the criterion benchmarks.

use shelfplan_core::{generate_scene, scene::default_palette, Scene, Vec3};

/// A generated scene on the standard shelf.
pub fn scene(seed: u64, boxes: usize) -> Scene {
    generate_scene(seed, boxes, &default_palette()).expect("benchmark scene generates")
}

/// A deterministic pseudo-random cloud of `n` points in a 0.5 m cube, made
/// of a few dense blobs and some uniform noise.
pub fn cloud(n: usize) -> Vec<Vec3> {
    let mut state = 0x9e37_79b9_7f4a_7c15_u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let centers = [
        Vec3::new(0.1, 0.1, 0.1),
        Vec3::new(0.3, 0.2, 0.4),
        Vec3::new(0.4, 0.4, 0.2),
    ];
    (0..n)
        .map(|i| {
            if i % 5 == 0 {
                Vec3::new(next() * 0.5, next() * 0.5, next() * 0.5)
            } else {
                let c = centers[i % centers.len()];
                c + Vec3::new(next() - 0.5, next() - 0.5, next() - 0.5).scale(0.06)
            }
        })
        .collect()
}
