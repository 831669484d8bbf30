fn main() {
    std::process::exit(largeorder::cli::run(std::env::args_os()));
}
