// Offline fitting of the frozen constants. Prints the JSON that lives in
// data/fitted_constants.json; the numbers are then copied into
// include/qda/constants.hpp.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include "json.hpp"
#include "qda/fitting.hpp"

int main(int argc, char** argv) {
  std::string only = argc > 1 ? argv[1] : "";
  nlohmann::ordered_json out;
  out["safety_factor"] = qda::kFitSafety;
  for (const auto& section : qda::fit_sections()) {
    if (!only.empty() && only != section.name) continue;
    std::cerr << "fitting " << section.name << "...\n";
    out[section.name] = section.run();
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}
