fn main() {
    std::process::exit(taugraph_cli::run(std::env::args_os()));
}
