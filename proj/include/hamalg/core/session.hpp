#pragma once

#include "hamalg/core/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hamalg {

/// Test-only corruptions used to prove that the suites catch defects.
enum class Fault { None, CanonicalizerSign };

struct SessionOptions {
  int dimension = 1;
  std::vector<std::string> functions{"f", "g", "j"};
  int max_derivative_order = 8;
  Fault fault = Fault::None;
};

/// Write-once registry: spatial dimension, declared coefficient functions and
/// the derivative bound. Immutable after construction, so sharing a Session
/// across threads is safe.
class Session {
 public:
  explicit Session(SessionOptions opts = {});

  int dimension() const { return opts_.dimension; }
  int max_derivative_order() const { return opts_.max_derivative_order; }
  Fault fault() const { return opts_.fault; }
  const SessionOptions& options() const { return opts_; }

  /// Sorted, de-duplicated function names; a function's kind code is its index.
  const std::vector<std::string>& functions() const { return names_; }
  std::optional<KindCode> function_kind(const std::string& name) const;
  std::string kind_name(KindCode k) const;

  /// Copy with a different derivative bound (the property suites need more
  /// headroom than interactive use).
  Session with_max_derivative_order(int order) const;

  void check_order(const MultiIndex& d) const;

 private:
  SessionOptions opts_;
  std::vector<std::string> names_;
};

}  // namespace hamalg
