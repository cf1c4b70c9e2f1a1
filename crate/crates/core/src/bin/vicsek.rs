fn main() {
    std::process::exit(vicsek::cli::run(std::env::args_os()));
}
