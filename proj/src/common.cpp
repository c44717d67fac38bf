#include "netlmi/common.hpp"

namespace netlmi {

std::string to_string(Domain d) { return d == Domain::CT ? "ct" : "dt"; }

Domain domain_from_string(const std::string& s) {
  if (s == "ct" || s == "CT") return Domain::CT;
  if (s == "dt" || s == "DT") return Domain::DT;
  throw Error("unknown domain: " + s);
}

}  // namespace netlmi
