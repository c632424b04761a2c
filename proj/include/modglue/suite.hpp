#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace modglue {

// One numeric or structural check within a criterion. Structural checks
// (dimension equalities, witnesses found) use residual = mismatch count, tol = 0.
struct Measure {
  std::string label;
  double residual = 0;
  double tol = 0;
  std::size_t samples = 0;

  bool pass() const { return residual <= tol; }
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<Measure> measures;
  std::size_t instances = 0;
  double wall_time = 0;
  std::string note;

  bool pass() const;
  // The failing measure with the largest residual/tol excess, else the largest residual.
  const Measure* worst() const;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::size_t trials = 200;
};

CriterionResult criterion_round_trip_phi(const SuiteOptions& opt);
CriterionResult criterion_round_trip_epsilon(const SuiteOptions& opt);
CriterionResult criterion_delta_isometry(const SuiteOptions& opt);
CriterionResult criterion_descent_identities(const SuiteOptions& opt);
CriterionResult criterion_kernels(const SuiteOptions& opt);
CriterionResult criterion_image_eta(const SuiteOptions& opt);
CriterionResult criterion_degeneracy(const SuiteOptions& opt);
CriterionResult criterion_morita(const SuiteOptions& opt);
CriterionResult criterion_picard(const SuiteOptions& opt);
CriterionResult criterion_oracle(const SuiteOptions& opt);
CriterionResult criterion_cech(const SuiteOptions& opt);

// Criteria 1..11 in order.
CriterionResult run_criterion(int id, const SuiteOptions& opt);
std::vector<CriterionResult> run_suite(const SuiteOptions& opt);

// "PASS c<id> <name> ..." plus one indented line per measure.
std::string format_result(const CriterionResult& r);

}  // namespace modglue
