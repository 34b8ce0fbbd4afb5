#pragma once

// Fitted constants, frozen. Regenerate with `qda_fit` and keep in sync with
// data/fitted_constants.json (test_constants checks both agree).

namespace qda {

struct RootConstantsEntry {
  long d;
  double c1, c2, c3;
};

// Root error contract: observed extremes over all roots with Q <= 1e4, times 1.5.
inline constexpr RootConstantsEntry kRootConstants[] = {
    {3, 0.3849001794597506, 1.4852228001312828, 1.4408822646794037},
    {7, 0.2958438662014147, 5.303300858899106, 48.75},
    {11, 0.20100756305184242, 1.4558009108120222, 4.209580538592451},
};

// Theta bound: count <= C (X^2 Z^2 / W + 1) log^2 max(W, 2) on the seeded
// conformant corpus.
inline constexpr double kThetaC = 1.7055971731522233;

// Kernel bound: sum <= C (1 + H/r)(X + r) log 2r on the seeded kernel corpus.
inline constexpr double kKernelC = 1.8723870930523157;

// Weights with C = 4, D = 2 on the weights corpus (d in {3,7,11},
// N in {100, 1000}): Psi floor on N <= norm <= 2N, Psi envelope constant,
// F <= C (1 + delta^2 norm/N).
inline constexpr double kPsiFloor = 3.5587208248512555e-221;
inline constexpr double kPsiEnvelopeK = 0.6514417228548777;
inline constexpr double kFSizeC = 0.9670480226189762;

}  // namespace qda
