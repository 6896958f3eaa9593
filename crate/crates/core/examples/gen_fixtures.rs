//! Regenerate the fixture codes under `data/`.
//!
//! ```bash
//! cargo run --release -p phasemix --example gen_fixtures
//! ```
//!
//! Both codes come from the seeded PEG constructor, so the output is
//! byte-identical across runs; a test in `tests/ldpc_fixtures.rs` checks the
//! shipped files against a fresh construction.

use phasemix::ldpc::{peg_construct, serialize_alist, LdpcCode};
use std::path::Path;

fn main() {
    let out_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    // 1023 = 3 * 341 keeps the high-rate code usable at 8PSK.
    for (name, n, m, dv, seed) in [
        ("peg_96_48.alist", 96usize, 48usize, 3usize, 7u64),
        ("peg_1023_96.alist", 1023, 96, 3, 19),
    ] {
        let h = peg_construct(n, m, dv, seed);
        let code = LdpcCode::new(h.clone());
        println!(
            "{name}: n={n} m={m} rank={} punctured={} rate={:.4}",
            code.encoder().rank(),
            code.encoder().punctured_rows(),
            code.rate()
        );
        let path = out_dir.join(name);
        std::fs::write(&path, serialize_alist(&h)).expect("write fixture");
        println!("wrote {}", path.display());
    }
}
