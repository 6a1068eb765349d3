#pragma once

#include <stdexcept>
#include <string>

namespace hifie {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidSpec : Error {
  explicit InvalidSpec(const std::string& msg) : Error("invalid spec: " + msg) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

struct NonpositiveDistance : Error {
  explicit NonpositiveDistance(const std::string& msg) : Error("nonpositive distance: " + msg) {}
};

// A pivot of a redundant block fell below the singularity threshold.
struct SingularBlock : Error {
  explicit SingularBlock(const std::string& msg) : Error("singular block: " + msg) {}
};

// SingularBlock enriched with factorization context (level, cluster, sizes).
struct SingularRedundantBlock : Error {
  explicit SingularRedundantBlock(const std::string& msg)
      : Error("singular redundant block: " + msg) {}
};

// Interpolation matrix norm exceeded the f = 4 quality bound.
struct IdQualityError : Error {
  explicit IdQualityError(const std::string& msg) : Error("id quality: " + msg) {}
};

struct NotTranslationInvariant : Error {
  explicit NotTranslationInvariant(const std::string& msg)
      : Error("not translation invariant: " + msg) {}
};

struct CapExceeded : Error {
  explicit CapExceeded(const std::string& msg) : Error("cap exceeded: " + msg) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("io error: " + msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

}  // namespace hifie
