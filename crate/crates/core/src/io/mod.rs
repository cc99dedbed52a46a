//! File formats: grayscale PNG/PGM images, the CPDLv1 dictionary container,
//! paired-corpus manifests, and CSV quality reports.

mod corpus;
mod dict_file;
mod images;
mod report;

pub use corpus::{ingest_corpus, load_manifest, PairEntry, PairedCorpusManifest};
pub use dict_file::{load_dictionary, save_dictionary};
pub use images::{load_image, load_image_with, save_image, BitDepth, LoadOptions};
pub use report::write_report;
