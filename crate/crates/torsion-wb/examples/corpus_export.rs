//! Regenerate the shipped JSON corpus under `data/` from the built-in
//! constructors. Run from the crate root:
//!
//!     cargo run --example corpus_export -- crates/torsion-wb/data

use std::path::PathBuf;

use torsion_wb::{corpus, jsonfmt};

fn main() {
    let dir: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "data".into()).into();
    std::fs::create_dir_all(&dir).expect("create output directory");

    for name in ["circle", "torus", "lens_5_1", "lens_7_1"] {
        let k = corpus::system_by_name(name).unwrap();
        let value = serde_json::json!({ "system": k.to_value() });
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, jsonfmt::to_string(&value)).expect("write system file");
        println!("wrote {}", path.display());
    }
    for (name, fam) in corpus::families() {
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, jsonfmt::to_string(&fam.to_value())).expect("write family file");
        println!("wrote {}", path.display());
    }
}
