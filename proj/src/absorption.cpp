#include "mcsim/absorption.hpp"

#include <cmath>
#include <string>

#include "mcsim/error.hpp"

namespace mcsim {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Smc: return "smc";
    case PolicyKind::Rmc: return "rmc";
    case PolicyKind::LineCrossing: return "line";
    case PolicyKind::Apmc: return "apmc";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  if (name == "smc") return PolicyKind::Smc;
  if (name == "rmc") return PolicyKind::Rmc;
  if (name == "line" || name == "line-crossing" || name == "line_crossing")
    return PolicyKind::LineCrossing;
  if (name == "apmc") return PolicyKind::Apmc;
  return std::nullopt;
}

void AbsorptionPolicy::validate() const {
  if (!(xi >= 0.0 && xi < 1.0)) throw_invalid("xi must lie in [0, 1), got " + std::to_string(xi));
}

}  // namespace mcsim
