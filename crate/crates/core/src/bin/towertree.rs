fn main() {
    std::process::exit(tower_trees::cli::main_with_args(std::env::args_os()));
}
