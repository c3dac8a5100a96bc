#pragma once

#include <string>
#include <vector>

#include "gvb/gvcore.hpp"
#include "gvb/mrcore.hpp"

namespace gvb {

/// Pair counts by Hamming distance for the labels of a single-state graph.
///
/// `alpha[t]` counts ordered label pairs at distance t. When a subset 𝒫 is
/// given, `alpha` counts pairs inside 𝒫, `beta` mixed pairs and `gamma`
/// pairs outside 𝒫.
struct DistanceProfile {
  int s = 0;
  long long edges = 0;
  long long subset = 0;
  std::vector<long long> alpha;
  std::vector<long long> beta;
  std::vector<long long> gamma;

  bool partitioned() const noexcept { return !beta.empty(); }
  /// α_t + β_t + γ_t for a partitioned profile, α_t otherwise.
  std::vector<long long> total() const;
  /// Empty when the invariants hold.
  std::vector<std::string> check() const;
};

Poly profile_poly(const std::vector<long long>& counts);

/// Exact counts over all ordered label pairs.
DistanceProfile distance_profile(const std::vector<std::string>& labels);
DistanceProfile partition_profile(const std::vector<std::string>& labels, const std::vector<bool>& in_subset);

/// Closed-form counts for SECC(L,w): full profile, and the partition by
/// labels of weight exactly w.
DistanceProfile secc_profile_formula(int length, int weight);
DistanceProfile secc_partition_formula(int length, int weight);

struct CheckedProfile {
  DistanceProfile profile;            // exhaustive counts
  std::vector<std::string> mismatch;  // one entry per disagreeing count
};

/// Exhaustive SECC profile cross-checked against the closed forms; the
/// exhaustive counts are returned whatever the formulas say.
CheckedProfile secc_profile_closed(int length, int weight, bool partitioned);

double ss_delta_max(const DistanceProfile& prof);

GvPointResult ss_gv_fixed(const DistanceProfile& prof, double delta, const SolverConfig& cfg = {});
std::vector<CurvePoint> ss_gv_curve(const DistanceProfile& prof, int n_points, const SolverConfig& cfg = {});

/// S(p) = (H(p) + p log|𝒫| + (1-p) log(|ℰ|-|𝒫|)) / s, in bits per bit.
double ss_Sp(double p, long long edges, long long subset, int s);
/// z = p(|ℰ|-|𝒫|) / ((1-p)|𝒫|); +inf at p = 1.
double ss_z_opt(double p, long long edges, long long subset);

ScalarMrModel ss_mr_model(const DistanceProfile& prof);
MrPointResult ss_mr_fixed(const DistanceProfile& prof, double delta, const SolverConfig& cfg = {});
MrCurve ss_mr_curve(const DistanceProfile& prof, int n_points, const SolverConfig& cfg = {});

/// `t,alpha,beta,gamma` rows (beta and gamma are 0 for a full profile).
std::string profile_csv(const DistanceProfile& prof);

}  // namespace gvb
