#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rbl {

enum class ErrorKind {
  domain,
  precondition,
  convergence,
  degenerate_domain,
  period,
  sampling,
  not_nested,
  degree,
  tracing,
  search,
  topology,
  model,
  structure,
  approximation,
  report,
  io,
};

constexpr std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::degenerate_domain: return "degenerate-domain";
    case ErrorKind::period: return "period";
    case ErrorKind::sampling: return "sampling";
    case ErrorKind::not_nested: return "domain-not-nested";
    case ErrorKind::degree: return "degree";
    case ErrorKind::tracing: return "tracing";
    case ErrorKind::search: return "search";
    case ErrorKind::topology: return "topology";
    case ErrorKind::model: return "model";
    case ErrorKind::structure: return "structure";
    case ErrorKind::approximation: return "approximation";
    case ErrorKind::report: return "report";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a kind so callers can branch
/// on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace rbl
