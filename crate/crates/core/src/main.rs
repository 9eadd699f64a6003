fn main() {
    std::process::exit(sipgeom::cli::main_with_args(std::env::args_os()));
}
