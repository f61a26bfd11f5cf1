use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("QKMECH_LOG"))
        .format_timestamp(None)
        .try_init();
    let code = qkmech::cli::run(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock());
    ExitCode::from(code as u8)
}
