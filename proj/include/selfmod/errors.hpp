#pragma once

#include <stdexcept>
#include <string>

namespace selfmod {

enum class Errc {
  invalid_argument,
  invalid_lottery,
  degenerate_utility,
  name_collision,
  invalid_ledger,
  precondition,
  invalid_game,
  too_large,
  infeasible_game,
  invalid_state,
  invalid_belief,
  range,
  invalid_scenario,
  config,
  parse,
  io,
};

// Single exception type for the whole library. The code is what the C API
// maps to a status; the message is what humans see.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_lottery: return "invalid-lottery";
    case Errc::degenerate_utility: return "degenerate-utility";
    case Errc::name_collision: return "name-collision";
    case Errc::invalid_ledger: return "invalid-ledger";
    case Errc::precondition: return "precondition";
    case Errc::invalid_game: return "invalid-game";
    case Errc::too_large: return "too-large";
    case Errc::infeasible_game: return "infeasible-game";
    case Errc::invalid_state: return "invalid-state";
    case Errc::invalid_belief: return "invalid-belief";
    case Errc::range: return "range";
    case Errc::invalid_scenario: return "invalid-scenario";
    case Errc::config: return "config";
    case Errc::parse: return "parse";
    case Errc::io: return "io";
  }
  return "unknown";
}

}  // namespace selfmod
