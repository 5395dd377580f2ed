//! The coordinate-format system parser must handle arbitrary input without
//! panicking, and anything it accepts must satisfy the CSR invariants.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(sys) = cutstencil::formats::parse_coo_system(text) {
            assert_eq!(sys.rhs.len(), sys.n_unknowns);
            for r in 0..sys.n_unknowns {
                let (cols, vals) = sys.row(r);
                assert!(cols.windows(2).all(|w| w[0] < w[1]));
                assert!(cols.iter().all(|&c| c < sys.n_unknowns));
                assert!(vals.iter().all(|v| v.is_finite()));
            }
            // and must survive a write/parse round trip
            let rendered = cutstencil::formats::write_coo_system(&sys);
            let again = cutstencil::formats::parse_coo_system(&rendered)
                .expect("round trip of a valid system must parse");
            assert_eq!(again.n_unknowns, sys.n_unknowns);
            assert_eq!(again.nnz(), sys.nnz());
        }
    }
});
