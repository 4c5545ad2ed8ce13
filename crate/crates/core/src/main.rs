fn main() {
    std::process::exit(geocalc::harness::run_cli(std::env::args_os()));
}
