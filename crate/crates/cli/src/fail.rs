use std::fmt::Display;

pub const INPUT: u8 = 2;
pub const SOLVER: u8 = 3;

/// An error tagged with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

pub type Outcome<T = ()> = Result<T, Failure>;

pub trait Tag<T> {
    fn input(self) -> Outcome<T>;
    fn solver(self) -> Outcome<T>;
}

impl<T, E: Into<anyhow::Error>> Tag<T> for Result<T, E> {
    fn input(self) -> Outcome<T> {
        self.map_err(|e| Failure {
            code: INPUT,
            error: e.into(),
        })
    }

    fn solver(self) -> Outcome<T> {
        self.map_err(|e| Failure {
            code: SOLVER,
            error: e.into(),
        })
    }
}

pub fn input_error(msg: impl Display) -> Failure {
    Failure {
        code: INPUT,
        error: anyhow::anyhow!("{msg}"),
    }
}

/// Adds context to an already tagged failure.
pub trait Context<T> {
    fn context(self, msg: impl Display + Send + Sync + 'static) -> Outcome<T>;
}

impl<T> Context<T> for Outcome<T> {
    fn context(self, msg: impl Display + Send + Sync + 'static) -> Outcome<T> {
        self.map_err(|f| Failure {
            code: f.code,
            error: f.error.context(msg),
        })
    }
}
