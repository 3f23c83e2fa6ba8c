fn main() {
    std::process::exit(reilly::cli::run(std::env::args_os()));
}
