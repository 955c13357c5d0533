fn main() {
    toelanczos_cli::init_threads();
    let code = toelanczos_cli::main_with_args(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
