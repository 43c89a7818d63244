use std::fmt;

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    /// Exit code 1: I/O and other runtime problems.
    pub fn io(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    /// Exit code 2: the input does not follow the file schema.
    pub fn schema(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    /// Exit code 3: the input parses but violates a physical invariant.
    pub fn invariant(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<fermi_ent::Error> for Failure {
    fn from(e: fermi_ent::Error) -> Self {
        Failure::invariant(e.to_string())
    }
}
