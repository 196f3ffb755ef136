fn main() {
    std::process::exit(eigencount::cli::main());
}
