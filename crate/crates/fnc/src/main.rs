fn main() {
    std::process::exit(fnc::cli::run());
}
