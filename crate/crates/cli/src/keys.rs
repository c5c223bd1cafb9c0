//! Key directory layout: `<scheme><bits>.<kind>` files, e.g. `cp80.pub`.

use std::path::{Path, PathBuf};

use abekit_core::abe::Scheme;
use abekit_core::fsutil::write_atomic;
use abekit_core::pairing::SecurityLevel;

use crate::error::{io_err, CliError, Result};

pub const ENV_HOME: &str = "ABE_HOME";

#[derive(Clone, Copy, Debug)]
pub enum KeyFile {
    Public,
    Master,
    /// KP attribute exponents (secret).
    Universe,
    /// KP attribute public values.
    PublicUniverse,
}

impl KeyFile {
    fn ext(self) -> &'static str {
        match self {
            KeyFile::Public => "pub",
            KeyFile::Master => "msk",
            KeyFile::Universe => "uni",
            KeyFile::PublicUniverse => "upub",
        }
    }
}

pub struct KeyDir(pub PathBuf);

impl KeyDir {
    /// Explicit flag, then `ABE_HOME`, then `~/.abekit`.
    pub fn resolve(flag: Option<&Path>) -> Result<Self> {
        if let Some(p) = flag {
            return Ok(KeyDir(p.to_path_buf()));
        }
        if let Some(p) = std::env::var_os(ENV_HOME).filter(|v| !v.is_empty()) {
            return Ok(KeyDir(PathBuf::from(p)));
        }
        let home = std::env::var_os("HOME").ok_or_else(|| CliError::usage("no key directory: pass --keys or set ABE_HOME"))?;
        Ok(KeyDir(PathBuf::from(home).join(".abekit")))
    }

    pub fn path(&self, scheme: Scheme, level: SecurityLevel, kind: KeyFile) -> PathBuf {
        self.0.join(format!("{scheme}{}.{}", level.bits(), kind.ext()))
    }

    pub fn read(&self, scheme: Scheme, level: SecurityLevel, kind: KeyFile) -> Result<Vec<u8>> {
        let p = self.path(scheme, level, kind);
        std::fs::read(&p).map_err(|e| {
            if e.kind() == std::io::ErrorKind::NotFound {
                CliError::new(
                    crate::error::Class::Key,
                    format!("{} not found; run `abekit setup --scheme {scheme} --level {}` first", p.display(), level.bits()),
                )
            } else {
                io_err(p.display(), e)
            }
        })
    }

    pub fn write(&self, scheme: Scheme, level: SecurityLevel, kind: KeyFile, bytes: &[u8]) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.0).map_err(|e| io_err(self.0.display(), e))?;
        let p = self.path(scheme, level, kind);
        write_atomic(&p, bytes).map_err(|e| io_err(p.display(), e))?;
        Ok(p)
    }
}

pub fn read_file(p: &Path) -> Result<Vec<u8>> {
    std::fs::read(p).map_err(|e| io_err(p.display(), e))
}

pub fn write_file(p: &Path, bytes: &[u8]) -> Result<()> {
    write_atomic(p, bytes).map_err(|e| io_err(p.display(), e))
}
