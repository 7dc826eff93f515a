//! Holds the `acceptance` test target only. Kept in its own package so that a
//! failing criterion does not stop the remaining suites from running.
