//! Regenerates the checked-in `fixtures/` tree.

fn main() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("fixtures");
    scenesmith::synth::make_shipped_fixture(&root).expect("fixture generation");
    println!("fixtures written to {}", root.display());
}
