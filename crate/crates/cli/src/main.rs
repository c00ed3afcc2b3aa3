fn main() {
    let threads = std::env::var(hypcert_cli::THREADS_ENV).ok();
    let code = hypcert_cli::run(std::env::args_os(), threads, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
