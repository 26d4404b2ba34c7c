#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hdp/stats.hpp"

namespace hdp {

struct VerifyOptions {
  std::uint64_t seed = 20231109;
  unsigned workers = 0;
};

using MsdFn = std::function<double(double, double, double)>;

// One function per acceptance criterion; each returns one report per case.
std::vector<VerificationReport> verify_exit_probability(const VerifyOptions& o);
std::vector<VerificationReport> verify_msd(const VerifyOptions& o, const MsdFn& evaluator);
std::vector<VerificationReport> verify_benchmark_residual(const VerifyOptions& o);
std::vector<VerificationReport> verify_skew_residual(const VerifyOptions& o);
std::vector<VerificationReport> verify_skew_failure(const VerifyOptions& o);
std::vector<VerificationReport> verify_tanaka_bracket(const VerifyOptions& o);
std::vector<VerificationReport> verify_mollifier(const VerifyOptions& o);
std::vector<VerificationReport> verify_density_normalization(const VerifyOptions& o);
std::vector<VerificationReport> verify_heat(const VerifyOptions& o);
std::vector<VerificationReport> verify_reversal(const VerifyOptions& o);
std::vector<VerificationReport> verify_pv(const VerifyOptions& o);
std::vector<VerificationReport> verify_law_of_solutions(const VerifyOptions& o);
std::vector<VerificationReport> verify_chain_rule(const VerifyOptions& o);

struct Criterion {
  int id;  // 0 for checks outside the numbered list
  std::string title;
  std::string suite;
  std::function<std::vector<VerificationReport>(const VerifyOptions&)> run;
};

/// Numbered acceptance criteria followed by the chain-rule check.
const std::vector<Criterion>& criteria();

/// densities, msd, exit-prob, brackets, sde-residuals, reversal, heat, pv,
/// chain-rule, all.
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

/// Throws std::invalid_argument for an unknown suite.
std::vector<VerificationReport> run_suite(const std::string& suite, const VerifyOptions& o);

bool all_pass(const std::vector<VerificationReport>& reports);

}  // namespace hdp
