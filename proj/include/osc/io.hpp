#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "osc/diff_op.hpp"
#include "osc/graded_lie_algebra.hpp"
#include "osc/symbol_family.hpp"

namespace osc {

/// 17-significant-digit round-trip formatting; every float that reaches an
/// artifact goes through this, so identical runs are byte-identical.
std::string fmt17(double v);

/// JSON spec loaders.  Rationals are "p/q" or "p" strings; frames are
/// coefficient expression strings over x0..x{n-1} (aliases x,y,z,w).
GradedLieAlgebra algebra_from_json(const nlohmann::json& j);
FilteredPatch patch_from_json(const nlohmann::json& j);
FilteredDiffOp operator_from_json(PatchRef patch, const nlohmann::json& j);

/// Named family catalog: cone, eta-squared, identity, log-kernel,
/// lap-potential, heis-sublaplacian.  Grid fields may be overridden.
struct FamilySpec {
  std::string kind;
  int grid_x = 256;
  int grid_eta = 256;
  int t_levels = 12;
};
FamilySpec family_spec_from_json(const nlohmann::json& j);
SymbolFamily family_from_spec(const FamilySpec& spec);

nlohmann::json load_json(const std::string& path);

/// Array exchange: <base>.json header {shape, axes:{x,eta,t}, weight,
/// weights, dtype complex128 little-endian} plus flat <base>.bin.
void write_family(const std::string& base, const SymbolFamily& S);
SymbolFamily read_family(const std::string& base);

/// Shell table as CSV: one row per (a,b,k,shell).
std::string seminorm_csv(const SchwartzSeminormReport& rep);
std::string shell_profile_csv(const ShellProfile& p);

void write_text(const std::string& path, const std::string& content);

/// Zoom-action defect of the logarithmic kernel log|xi| dxi of weight -1:
/// the cocycle at scale lambda is the constant density -log(lambda)/lambda,
/// so its symbol is that constant times the patch volume at eta = 0 and
/// rapidly decaying (roundoff) elsewhere.  Both kernels are sampled with the
/// same cell-average value at xi = 0, so the singular cell cancels exactly
/// in the float difference.
struct LogCocycleEntry {
  double lambda = 0;
  double expected = 0;    // -log(lambda)/lambda * volume
  double measured = 0;    // real part of the eta = 0 coefficient
  double rel_error = 0;
  double tail_max = 0;    // largest |coefficient| off eta = 0
};
struct LogCocycleReport {
  std::vector<LogCocycleEntry> entries;
  bool pass = false;
};
LogCocycleReport log_cocycle_check(int G, const std::vector<double>& lambdas,
                                   double tol = 1e-6);

/// Full symbol of the properly supported logarithmic kernel on the circle:
/// constant in t, weight -1.
SymbolFamily log_kernel_family(int G, int t_levels = 12);

/// Deterministic dump: ordered keys, floats pre-formatted via fmt17.
std::string dump_json(const nlohmann::json& j);

}  // namespace osc
