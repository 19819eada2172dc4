fn main() {
    std::process::exit(chromaseg::cli::run(std::env::args_os()));
}
