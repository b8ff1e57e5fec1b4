fn main() {
    std::process::exit(gup_dosc::cli::main_with_args(std::env::args_os()));
}
