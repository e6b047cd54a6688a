//! Experiment suite (in progress).
