fn main() {
    std::process::exit(uwb_link::cli::main_entry());
}
