#include "hamalg/core/types.hpp"
#include "hamalg/core/session.hpp"

#include <algorithm>
#include <cctype>

namespace hamalg {

long multi_binomial(const MultiIndex& k, const MultiIndex& j) {
  long r = 1;
  for (int d = 0; d < kMaxDim; ++d) {
    int n = k.v[d], m = j.v[d];
    if (m > n) return 0;
    long b = 1;
    for (int t = 1; t <= m; ++t) b = b * (n - m + t) / t;
    r *= b;
  }
  return r;
}

const std::vector<std::string>& variable_names() {
  static const std::vector<std::string> names{"x", "y", "z", "w", "u", "v", "s", "r"};
  return names;
}

int free_variable_id(const std::string& name) {
  const auto& n = variable_names();
  auto it = std::find(n.begin(), n.end(), name);
  return it == n.end() ? -1 : static_cast<int>(it - n.begin());
}

std::string variable_name(int list_index) {
  const auto& n = variable_names();
  if (list_index < static_cast<int>(n.size())) return n[list_index];
  return "x" + std::to_string(list_index - static_cast<int>(n.size()) + 1);
}

std::strong_ordering compare_structure(const Term& a, const Term& b) {
  if (auto c = a.nd <=> b.nd; c != 0) return c;
  if (auto c = a.f <=> b.f; c != 0) return c;
  if (auto c = lex_compare(a.fields, b.fields); c != 0) return c;
  if (auto c = lex_compare(a.funcs, b.funcs); c != 0) return c;
  return lex_compare(a.deltas, b.deltas);
}

Session::Session(SessionOptions opts) : opts_(std::move(opts)) {
  if (opts_.dimension < 1 || opts_.dimension > kMaxDim)
    throw Error(ErrorCode::Usage, "spatial dimension must be between 1 and " +
                                      std::to_string(kMaxDim));
  if (opts_.max_derivative_order < 1 || opts_.max_derivative_order > 200)
    throw Error(ErrorCode::Usage, "max derivative order must be between 1 and 200");
  names_ = opts_.functions;
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  static const std::vector<std::string> reserved{
      "int", "qint", "phi", "pi", "Phi", "Pi", "D", "delta", "delta0", "deltasq", "vol",
      "h",   "i",    "m"};
  for (const auto& n : names_) {
    if (n.empty() || !(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_'))
      throw Error(ErrorCode::Usage, "invalid function name '" + n + "'");
    for (char ch : n)
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'))
        throw Error(ErrorCode::Usage, "invalid function name '" + n + "'");
    if (std::find(reserved.begin(), reserved.end(), n) != reserved.end() ||
        free_variable_id(n) >= 0)
      throw Error(ErrorCode::Usage, "function name '" + n + "' is reserved");
  }
  if (names_.size() >= kPhi)
    throw Error(ErrorCode::Usage, "too many declared functions");
}

std::optional<KindCode> Session::function_kind(const std::string& name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<KindCode>(it - names_.begin());
}

std::string Session::kind_name(KindCode k) const {
  if (k == kPhi) return "phi";
  if (k == kPi) return "pi";
  if (k < names_.size()) return names_[k];
  throw Error(ErrorCode::Internal, "unknown kind code");
}

Session Session::with_max_derivative_order(int order) const {
  SessionOptions o = opts_;
  o.max_derivative_order = order;
  return Session(o);
}

void Session::check_order(const MultiIndex& d) const {
  for (int k = 0; k < kMaxDim; ++k) {
    if (k >= opts_.dimension && d.v[k] != 0)
      throw Error(ErrorCode::Usage, "multi-index exceeds the spatial dimension");
    if (d.v[k] > opts_.max_derivative_order)
      throw Error(ErrorCode::DerivativeBound,
                  "derivative order " + std::to_string(d.v[k]) +
                      " exceeds the maximum " + std::to_string(opts_.max_derivative_order));
  }
}

}  // namespace hamalg
