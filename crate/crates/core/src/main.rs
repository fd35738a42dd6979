fn main() {
    std::process::exit(ahlfors_green::cli::run(std::env::args_os()));
}
