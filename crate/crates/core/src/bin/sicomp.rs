fn main() {
    std::process::exit(sicomp::cli::run(std::env::args_os()));
}
