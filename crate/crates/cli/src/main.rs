fn main() {
    std::process::exit(stablab_cli::run(std::env::args().collect()));
}
