fn main() {
    std::process::exit(fockpath::cli::main_entry());
}
