#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qda {

inline constexpr double kFitSafety = 1.5;
inline constexpr std::uint64_t kThetaSeed = 1000;
inline constexpr std::uint64_t kKernelSeed = 1;

struct FitSection {
  std::string name;
  std::function<nlohmann::ordered_json()> run;
};

// Every fitted constant with the corpus it was fitted on.
std::vector<FitSection> fit_sections();

struct CorpusHash {
  std::uint64_t h = 1469598103934665603ull;
  void add(std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  }
  std::string hex() const;
};

}  // namespace qda
