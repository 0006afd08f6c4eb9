use proptest::prelude::*;
use shelfplan_core::scene::default_palette;
use shelfplan_core::{export_scene, generate_scene, parse_scene, validate_scene, Vec3};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn export_then_parse_is_identity(seed in any::<u64>(), n in 0usize..14, mass in proptest::option::of(0.01f64..20.0)) {
        let mut scene = generate_scene(seed, n.max(1), &default_palette()).unwrap();
        if n == 0 {
            scene.boxes.clear();
        }
        if let (Some(m), Some(b)) = (mass, scene.boxes.first_mut()) {
            b.mass = m;
            b.mass_overridden = true;
        }
        let doc = export_scene(&scene);
        prop_assert_eq!(parse_scene(&doc).unwrap(), scene);
    }

    #[test]
    fn generated_scenes_validate(seed in any::<u64>(), n in 1usize..14) {
        let scene = generate_scene(seed, n, &default_palette()).unwrap();
        prop_assert_eq!(scene.len(), n);
        prop_assert!(validate_scene(&scene).violations.is_empty());
    }

    #[test]
    fn generation_is_bit_exact(seed in any::<u64>(), n in 1usize..10) {
        let a = export_scene(&generate_scene(seed, n, &default_palette()).unwrap());
        let b = export_scene(&generate_scene(seed, n, &default_palette()).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn custom_palettes_generate(seed in any::<u64>(), w in 0.05f64..0.4, d in 0.05f64..0.3, h in 0.05f64..0.4) {
        let scene = generate_scene(seed, 4, &[Vec3::new(w, d, h)]).unwrap();
        prop_assert!(validate_scene(&scene).violations.is_empty());
    }
}
