#pragma once

#include <stdexcept>
#include <string>

namespace infosig {

class error : public std::runtime_error {
  public:
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid or inconsistent configuration (bad bounds, mismatched window params).
class config_error : public error {
  public:
    using error::error;
};

// Rejected input data: non-finite values, bad record fields, sequencing violations.
class malformed_input : public error {
  public:
    using error::error;
};

// A metric was requested from an empty table. Never silently zero.
class undefined_metric : public error {
  public:
    using error::error;
};

// Too few windows/signatures to compute the requested statistic.
class insufficient_data : public error {
  public:
    using error::error;
};

class io_error : public error {
  public:
    using error::error;
};

// Serialized artifact has a missing field or unsupported schema version.
class schema_error : public error {
  public:
    using error::error;
};

} // namespace infosig
