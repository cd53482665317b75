fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").expect("manifest dir");
    let header = std::path::Path::new(&crate_dir).join("include/qfl_sim.h");
    cbindgen::generate(&crate_dir)
        .expect("cbindgen header generation")
        .write_to_file(header);
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
