//! The run-config parser must handle arbitrary input without panicking.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(cfg) = cutstencil::formats::parse_config(text) {
            // parsed values respect the documented invariants
            if let Some(meshes) = &cfg.meshes {
                assert!(meshes.iter().all(|&n| n >= 4));
            }
            if let Some(tol) = cfg.tol {
                assert!(tol > 0.0);
            }
            if let Some(t) = cfg.threads {
                assert!(t >= 1);
            }
        }
    }
});
