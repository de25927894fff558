fn main() {
    std::process::exit(lingomix::cli::run(std::env::args_os()));
}
