//! Benchmarks for the crbloch pipeline.
