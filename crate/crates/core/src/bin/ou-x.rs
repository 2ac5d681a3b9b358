fn main() {
    std::process::exit(ou_crossing::cli::run(std::env::args_os()));
}
