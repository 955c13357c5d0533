use std::fs;
use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Writes `bytes` next to `path` and renames it into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Sends `bytes` to `dir/name` when an output directory is set, to `out`
/// otherwise.
pub fn emit(dir: Option<&Path>, name: &str, bytes: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    match dir {
        Some(d) => write_atomic(&d.join(name), bytes),
        None => Ok(out.write_all(bytes)?),
    }
}

pub fn json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s.into_bytes()
}
