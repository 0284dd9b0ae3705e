fn main() {
    std::process::exit(conelength::cli::run());
}
