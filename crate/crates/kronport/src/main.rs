fn main() {
    std::process::exit(kronport::cli::run());
}
