#include "attackbench/types.hpp"

#include <string>

#include "attackbench/errors.hpp"

namespace attackbench {

std::string to_string(Norm p) {
  switch (p) {
    case Norm::L0: return "l0";
    case Norm::L1: return "l1";
    case Norm::L2: return "l2";
    case Norm::Linf: return "linf";
  }
  return "l2";
}

Norm parse_norm(std::string_view text) {
  if (text == "l0" || text == "L0" || text == "0") return Norm::L0;
  if (text == "l1" || text == "L1" || text == "1") return Norm::L1;
  if (text == "l2" || text == "L2" || text == "2") return Norm::L2;
  if (text == "linf" || text == "Linf" || text == "inf") return Norm::Linf;
  throw ConfigError("unknown norm '" + std::string(text) + "' (expected l0, l1, l2 or linf)");
}

}  // namespace attackbench
