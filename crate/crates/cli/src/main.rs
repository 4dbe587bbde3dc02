fn main() {
    std::process::exit(kns_cli::run(std::env::args_os()));
}
