fn main() {
    std::process::exit(hnpoly::cli::run(std::env::args_os()));
}
