use std::process::ExitCode;

fn main() -> ExitCode {
    if let Some(n) = std::env::var("CHAOS_MWU_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match mwu_scan::run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(mwu_scan::CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chaos-mwu: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
