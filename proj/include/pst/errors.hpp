#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pst {

// Every error carries a stable machine-readable code (E_SPECTRUM, E_SOLVER, ...)
// so front ends can prefix diagnostics without parsing messages.
class error : public std::runtime_error {
 public:
  error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

struct invalid_argument : error {
  explicit invalid_argument(const std::string& what, std::string code = "E_ARG")
      : error(std::move(code), what) {}
};

// Contraction would collide or reorder levels; names the offending pair.
struct contraction_error : error {
  contraction_error(const std::string& what, long long lower, long long upper)
      : error("E_SPECTRUM", what), lower_level(lower), upper_level(upper) {}
  long long lower_level;
  long long upper_level;
};

struct degenerate_spectrum : error {
  explicit degenerate_spectrum(const std::string& what) : error("E_SPECTRUM", what) {}
};

// The three-term recurrence produced a non-positive off-diagonal at `index`.
struct reconstruction_failure : error {
  reconstruction_failure(const std::string& what, std::size_t idx)
      : error("E_SOLVER", what), index(idx) {}
  std::size_t index;
};

struct numerical_instability : error {
  explicit numerical_instability(const std::string& what) : error("E_SOLVER", what) {}
};

struct not_pst_configuration : error {
  explicit not_pst_configuration(const std::string& what) : error("E_PHASE", what) {}
};

struct bracket_failure : error {
  explicit bracket_failure(const std::string& what) : error("E_GRID", what) {}
};

}  // namespace pst
