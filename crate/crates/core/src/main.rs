fn main() {
    std::process::exit(stackbandit::cli::run());
}
