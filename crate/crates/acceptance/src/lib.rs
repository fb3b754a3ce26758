//! Holds no code; the suite is the `acceptance` test target.
