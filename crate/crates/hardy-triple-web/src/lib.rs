//! Browser bindings (placeholder during bring-up).
