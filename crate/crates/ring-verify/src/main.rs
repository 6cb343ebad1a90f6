fn main() {
    std::process::exit(ring_verify::cli::run());
}
