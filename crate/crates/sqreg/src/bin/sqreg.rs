fn main() {
    std::process::exit(sqreg::cli::run());
}
