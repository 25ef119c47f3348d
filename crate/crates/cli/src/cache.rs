//! On-disk caches for the `R_n`/`T_n` table and the `P_{k,l}` table.
//!
//! Writes go to a temporary file in the cache directory which is then
//! renamed over the target, so readers never see a half-written file. A file
//! that fails to parse or validate is ignored with a warning and rebuilt.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use kdvgrav::gelfand_dickey::{GdTable, PklTable};
use kdvgrav::DiffPolyError;

pub const GD_FILE: &str = "gd_table.json";
pub const PKL_FILE: &str = "pkl_table.json";

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    fn read(&self, name: &str) -> Option<String> {
        let path = self.path(name)?;
        match fs::read_to_string(&path) {
            Ok(s) => Some(s),
            Err(e) if e.kind() == io::ErrorKind::NotFound => None,
            Err(e) => {
                log::warn!("cannot read {}: {e}; recomputing", path.display());
                None
            }
        }
    }

    fn write(&self, name: &str, contents: &str) {
        if let Some(path) = self.path(name) {
            if let Err(e) = write_atomic(&path, contents) {
                log::warn!("cannot write {}: {e}", path.display());
            }
        }
    }

    fn parse_gd(&self, contents: Option<&str>) -> GdTable {
        let Some(s) = contents else {
            return GdTable::new();
        };
        match GdTable::from_json(s) {
            Ok(t) => t,
            Err(e) => {
                log::warn!("ignoring cached {GD_FILE}: {e}; recomputing");
                GdTable::new()
            }
        }
    }

    /// The cached table, or a fresh one if absent or invalid.
    pub fn load_gd(&self) -> GdTable {
        self.parse_gd(self.read(GD_FILE).as_deref())
    }

    /// A table holding at least `0..=max_n`; the cache is rewritten only
    /// when the table had to be extended or the file was unusable.
    pub fn gd_table(&self, max_n: usize) -> Result<GdTable, DiffPolyError> {
        let before = self.read(GD_FILE);
        let mut table = self.parse_gd(before.as_deref());
        table.extend_to(max_n)?;
        let json = table.to_json();
        if before.as_deref() != Some(json.as_str()) {
            self.write(GD_FILE, &json);
        }
        Ok(table)
    }

    pub fn save_gd(&self, table: &GdTable) {
        let json = table.to_json();
        if self.read(GD_FILE).as_deref() != Some(json.as_str()) {
            self.write(GD_FILE, &json);
        }
    }

    pub fn load_pkl(&self, table: &mut GdTable) -> PklTable {
        let Some(s) = self.read(PKL_FILE) else {
            return PklTable::default();
        };
        match PklTable::from_json(&s, table) {
            Ok(t) => t,
            Err(e) => {
                log::warn!("ignoring cached {PKL_FILE}: {e}; recomputing");
                PklTable::default()
            }
        }
    }

    pub fn save_pkl(&self, pkl: &PklTable) {
        let json = pkl.to_json();
        if self.read(PKL_FILE).as_deref() != Some(json.as_str()) {
            self.write(PKL_FILE, &json);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_extension() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf()));
        let t5 = cache.gd_table(5).unwrap();
        let first = fs::read_to_string(dir.path().join(GD_FILE)).unwrap();
        assert_eq!(cache.load_gd(), t5);
        cache.gd_table(3).unwrap();
        assert_eq!(fs::read_to_string(dir.path().join(GD_FILE)).unwrap(), first);

        let t8 = cache.gd_table(8).unwrap();
        assert_eq!(&t8.entries()[..=5], t5.entries());
        assert_eq!(t8, GdTable::with_max_n(8).unwrap());
    }

    #[test]
    fn corrupt_file_is_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join(GD_FILE),
            "{\"schema_version\": 1, \"garbage\"",
        )
        .unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf()));
        let t = cache.gd_table(3).unwrap();
        assert_eq!(t, GdTable::with_max_n(3).unwrap());
        assert_eq!(cache.load_gd(), t);
    }

    #[test]
    fn no_directory_means_no_files() {
        let cache = Cache::new(None);
        assert_eq!(cache.gd_table(2).unwrap(), GdTable::with_max_n(2).unwrap());
    }
}
