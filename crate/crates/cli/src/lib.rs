//! IO, file formats, and command wiring for the curation toolkit.
