//! Small helpers for '-' (stdin/stdout) conventions and buffered file I/O.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::commands::CmdError;

pub fn open_input(path: &str) -> Result<Box<dyn BufRead>, CmdError> {
    if path == "-" {
        Ok(Box::new(BufReader::new(io::stdin())))
    } else {
        let file = File::open(path)
            .map_err(|e| CmdError::Io(format!("cannot open {path}: {e}")))?;
        Ok(Box::new(BufReader::new(file)))
    }
}

pub fn open_output(path: &str) -> Result<Box<dyn Write>, CmdError> {
    if path == "-" {
        Ok(Box::new(BufWriter::new(io::stdout())))
    } else {
        let file = File::create(path)
            .map_err(|e| CmdError::Io(format!("cannot create {path}: {e}")))?;
        Ok(Box::new(BufWriter::new(file)))
    }
}

pub fn read_to_string(path: &Path) -> Result<String, CmdError> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| CmdError::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(text)
}

pub fn write_string(path: &str, text: &str) -> Result<(), CmdError> {
    let mut out = open_output(path)?;
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CmdError::Io(format!("cannot write {path}: {e}")))
}
