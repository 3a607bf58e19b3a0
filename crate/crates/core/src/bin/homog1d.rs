fn main() {
    if let Ok(v) = std::env::var("HOMOG1D_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("error: thread pool: {e}");
                    std::process::exit(1);
                }
            }
            _ => {
                eprintln!("error: HOMOG1D_THREADS must be a positive integer, got {v:?}");
                std::process::exit(2);
            }
        }
    }
    std::process::exit(homog1d::cli::main_with_args(std::env::args_os()));
}
