fn main() {
    std::process::exit(gridpursuit::cli::main(std::env::args_os()));
}
