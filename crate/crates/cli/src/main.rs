fn main() {
    std::process::exit(driftgauge::run_cli());
}
