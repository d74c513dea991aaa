#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qd {

// Every failure the pipeline can signal carries a stable machine-readable
// code; reports serialize the code, the CLI maps any Error to exit status 2.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 protected:
  static std::string joined(const std::string& base, const std::string& detail) {
    return detail.empty() ? base : base + ": " + detail;
  }

 private:
  std::string code_;
};

struct NotAGroup : Error {
  explicit NotAGroup(const std::string& axiom = "")
      : Error("not_a_group", joined("multiplication table violates group axiom", axiom)) {}
};

struct RadiusTooSmall : Error {
  explicit RadiusTooSmall(const std::string& detail = "")
      : Error("radius_too_small", joined("bump radius below lattice resolution", detail)) {}
};

struct BandTooSmall : Error {
  explicit BandTooSmall(const std::string& detail = "")
      : Error("band_too_small", joined("band cannot reach requested kernel accuracy", detail)) {}
};

struct NegativityViolation : Error {
  explicit NegativityViolation(const std::string& detail = "")
      : Error("negativity_violation", joined("kernel fails positivity check", detail)) {}
};

struct GridTooCoarse : Error {
  explicit GridTooCoarse(const std::string& detail = "")
      : Error("grid_too_coarse", joined("sample grid cannot represent the band", detail)) {}
};

struct QuadratureTooCoarse : Error {
  explicit QuadratureTooCoarse(const std::string& detail = "")
      : Error("quadrature_too_coarse", joined("averaging quadrature not converged", detail)) {}
};

struct NotPositiveDefinite : Error {
  explicit NotPositiveDefinite(const std::string& detail = "")
      : Error("not_positive_definite",
              joined("matrix expected positive definite is not", detail)) {}
};

struct SingularV : Error {
  explicit SingularV(const std::string& detail = "")
      : Error("singular_v", joined("basis change is numerically singular", detail)) {}
};

struct Unachievable : Error {
  explicit Unachievable(const std::string& detail = "")
      : Error("unachievable",
              joined("target accuracy not reachable within the dimension cap", detail)) {}
};

struct ClosureTooLarge : Error {
  explicit ClosureTooLarge(const std::string& detail = "")
      : Error("closure_too_large", joined("orbit closure exceeds the order cap", detail)) {}
};

struct CoverNotFound : Error {
  explicit CoverNotFound(const std::string& detail = "")
      : Error("cover_not_found", joined("no dense orbit cover within the basepoint cap", detail)) {}
};

struct ParseError : Error {
  ParseError(int line_number, const std::string& detail)
      : Error("parse_error", "parse error at line " + std::to_string(line_number) + ": " + detail),
        line(line_number) {}
  explicit ParseError(const std::string& detail)
      : Error("parse_error", "parse error: " + detail), line(0) {}
  int line;
};

struct ValidationError : Error {
  explicit ValidationError(std::string field_name, const std::string& detail = "")
      : Error("validation_error",
              joined("invalid scenario field: " + field_name, detail)),
        field(std::move(field_name)) {}
  std::string field;
};

}  // namespace qd
