fn main() {
    std::process::exit(charfield::cli::run(std::env::args_os()));
}
