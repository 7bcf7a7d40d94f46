fn main() {
    std::process::exit(scenesmith::cli_main());
}
