use std::process::ExitCode;

fn main() -> ExitCode {
    // Die quietly when the reader goes away (`packbounds bound ... | head`),
    // like any other line-oriented tool, instead of panicking on EPIPE.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    packbounds::cli::run(std::env::args_os())
}
