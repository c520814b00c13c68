use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(env::var("CARGO_MANIFEST_DIR").unwrap());
    let header = crate_dir.join("include").join("polarcs.h");
    // The header is a shipped artifact; failing to regenerate it must fail
    // the build rather than silently leaving a stale copy.
    cbindgen::generate(&crate_dir)
        .expect("cbindgen must parse the crate")
        .write_to_file(&header);
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
