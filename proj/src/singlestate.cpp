#include "gvb/singlestate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "gvb/error.hpp"
#include "gvb/graphs.hpp"

namespace gvb {

std::vector<long long> DistanceProfile::total() const {
  std::vector<long long> out = alpha;
  if (partitioned())
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += beta[t] + gamma[t];
  return out;
}

std::vector<std::string> DistanceProfile::check() const {
  std::vector<std::string> out;
  const auto n = static_cast<std::size_t>(s) + 1;
  if (alpha.size() != n || (partitioned() && (beta.size() != n || gamma.size() != n))) {
    out.push_back("profile length differs from s + 1");
    return out;
  }
  long long sum = 0;
  for (long long v : total()) sum += v;
  if (sum != edges * edges) out.push_back("counts do not add up to |E|^2");
  for (const auto* v : {&alpha, &beta, &gamma})
    for (long long c : *v)
      if (c < 0) out.push_back("negative count");
  for (long long b : beta)
    if (b % 2 != 0) out.push_back("odd mixed-pair count");
  return out;
}

Poly profile_poly(const std::vector<long long>& counts) {
  Poly p;
  for (std::size_t t = 0; t < counts.size(); ++t)
    if (counts[t] != 0) p += Poly::monomial(static_cast<double>(counts[t]), 0, static_cast<int>(t));
  return p;
}

namespace {

int common_length(const std::vector<std::string>& labels) {
  if (labels.empty()) throw Error(ErrorKind::invalid_parameters, "no labels");
  const auto s = labels.front().size();
  for (const auto& l : labels) {
    if (l.size() != s) throw Error(ErrorKind::invalid_parameters, "labels differ in length");
    if (l.find_first_not_of("01") != std::string::npos)
      throw Error(ErrorKind::invalid_parameters, "labels must be binary strings");
  }
  if (s == 0 || s > 30) throw Error(ErrorKind::size_limit, "label length must lie in 1..30");
  return static_cast<int>(s);
}

std::uint32_t bits(const std::string& l) { return static_cast<std::uint32_t>(std::stoul(l, nullptr, 2)); }

// Pair counts between two label multisets, by distance.
std::vector<long long> cross_counts(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b, int s) {
  std::vector<long long> out(static_cast<std::size_t>(s) + 1, 0);
  const double pairs = static_cast<double>(a.size()) * static_cast<double>(b.size());
  if (pairs <= double(1 << 26) || s > 24) {
    for (std::uint32_t u : a)
      for (std::uint32_t v : b) ++out[static_cast<std::size_t>(std::popcount(u ^ v))];
    return out;
  }
  // XOR convolution through the Walsh-Hadamard transform; exact in 64 bits.
  const std::size_t n = std::size_t{1} << s;
  std::vector<long long> fa(n, 0), fb(n, 0);
  for (std::uint32_t u : a) ++fa[u];
  for (std::uint32_t v : b) ++fb[v];
  auto wht = [n](std::vector<long long>& f) {
    for (std::size_t h = 1; h < n; h <<= 1)
      for (std::size_t i = 0; i < n; i += h << 1)
        for (std::size_t j = i; j < i + h; ++j) {
          const long long u = f[j], v = f[j + h];
          f[j] = u + v;
          f[j + h] = u - v;
        }
  };
  wht(fa);
  wht(fb);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  wht(fa);
  for (std::size_t v = 0; v < n; ++v) out[static_cast<std::size_t>(std::popcount(v))] += fa[v] >> s;
  return out;
}

}  // namespace

DistanceProfile distance_profile(const std::vector<std::string>& labels) {
  DistanceProfile p;
  p.s = common_length(labels);
  p.edges = static_cast<long long>(labels.size());
  std::vector<std::uint32_t> w;
  for (const auto& l : labels) w.push_back(bits(l));
  p.alpha = cross_counts(w, w, p.s);
  return p;
}

DistanceProfile partition_profile(const std::vector<std::string>& labels, const std::vector<bool>& in_subset) {
  if (in_subset.size() != labels.size()) throw Error(ErrorKind::invalid_parameters, "subset size mismatch");
  DistanceProfile p;
  p.s = common_length(labels);
  p.edges = static_cast<long long>(labels.size());
  std::vector<std::uint32_t> in, out;
  for (std::size_t i = 0; i < labels.size(); ++i) (in_subset[i] ? in : out).push_back(bits(labels[i]));
  p.subset = static_cast<long long>(in.size());
  p.alpha = cross_counts(in, in, p.s);
  p.beta = cross_counts(in, out, p.s);
  for (auto& v : p.beta) v *= 2;
  p.gamma = cross_counts(out, out, p.s);
  return p;
}

namespace {

void check_secc(int length, int weight) {
  if (length < 1 || length > 20 || weight < 0 || weight > length)
    throw Error(ErrorKind::invalid_parameters, "SECC needs 0 <= w <= L <= 20");
}

long long secc_edges(int length, int weight) {
  long long e = 0;
  for (int k = weight; k <= length; ++k) e += binomial(length, k);
  return e;
}

}  // namespace

DistanceProfile secc_profile_formula(int L, int w) {
  check_secc(L, w);
  DistanceProfile p;
  p.s = L;
  p.edges = secc_edges(L, w);
  for (int t = 0; t <= L; ++t) {
    long long inner = 0;
    for (int j = 1; j <= t; ++j)
      for (int k = 0; k <= (j + 1) / 2 - 1; ++k) inner += binomial(L - t, w - j + k) * binomial(t, k);
    p.alpha.push_back(binomial(L, t) * (p.edges - inner));
  }
  return p;
}

DistanceProfile secc_partition_formula(int L, int w) {
  const DistanceProfile full = secc_profile_formula(L, w);
  DistanceProfile p;
  p.s = L;
  p.edges = full.edges;
  p.subset = binomial(L, w);
  for (int t = 0; t <= L; ++t) {
    const long long a = t % 2 == 0 ? binomial(L, w) * binomial(L - w, t / 2) * binomial(w, t / 2) : 0;
    long long sum = 0;
    for (int j = 1; j <= t / 2; ++j) sum += binomial(L - w, t - j) * binomial(w, j);
    const long long b = 2 * binomial(L, w) * sum - 2 * a;
    p.alpha.push_back(a);
    p.beta.push_back(b);
    p.gamma.push_back(full.alpha[static_cast<std::size_t>(t)] - a - b);
  }
  return p;
}

CheckedProfile secc_profile_closed(int L, int w, bool partitioned) {
  check_secc(L, w);
  const LabelledGraph g = build_secc(L, w);
  const auto labels = g.labels();
  CheckedProfile out;
  DistanceProfile formula;
  if (partitioned) {
    std::vector<bool> in;
    for (const auto& l : labels) in.push_back(std::count(l.begin(), l.end(), '1') == w);
    out.profile = partition_profile(labels, in);
    formula = secc_partition_formula(L, w);
  } else {
    out.profile = distance_profile(labels);
    formula = secc_profile_formula(L, w);
  }
  auto compare = [&](const char* name, const std::vector<long long>& brute, const std::vector<long long>& closed) {
    for (std::size_t t = 0; t < brute.size(); ++t)
      if (brute[t] != closed[t]) {
        std::ostringstream os;
        os << "closed-form " << name << "_" << t << " = " << closed[t] << " but exhaustive count is " << brute[t]
           << " for SECC(" << L << "," << w << ")";
        out.mismatch.push_back(os.str());
      }
  };
  compare("alpha", out.profile.alpha, formula.alpha);
  if (partitioned) {
    compare("beta", out.profile.beta, formula.beta);
    compare("gamma", out.profile.gamma, formula.gamma);
  }
  return out;
}

namespace {

ScalarGvModel gv_model(const DistanceProfile& prof) {
  if (auto errs = prof.check(); !errs.empty()) throw Error(ErrorKind::invalid_parameters, errs.front());
  return ScalarGvModel(profile_poly(prof.total()), static_cast<double>(prof.edges), prof.s);
}

}  // namespace

double ss_delta_max(const DistanceProfile& prof) {
  const auto a = prof.total();
  double num = 0;
  for (std::size_t t = 0; t < a.size(); ++t) num += static_cast<double>(t) * static_cast<double>(a[t]);
  const double e = static_cast<double>(prof.edges);
  return num / (prof.s * e * e);
}

GvPointResult ss_gv_fixed(const DistanceProfile& prof, double delta, const SolverConfig& cfg) {
  return gv_fixed_delta(gv_model(prof), delta, cfg);
}

std::vector<CurvePoint> ss_gv_curve(const DistanceProfile& prof, int n_points, const SolverConfig& cfg) {
  return gv_curve(gv_model(prof), n_points, cfg);
}

double ss_Sp(double p, long long edges, long long subset, int s) {
  if (!(p >= 0 && p <= 1)) throw Error(ErrorKind::invalid_parameters, "p must lie in [0,1]");
  if (!(subset > 0 && subset < edges) || s <= 0)
    throw Error(ErrorKind::invalid_parameters, "S(p) needs 0 < |P| < |E| and s > 0");
  const double rest = static_cast<double>(edges - subset);
  if (p == 0) return std::log2(rest) / s;
  if (p == 1) return std::log2(static_cast<double>(subset)) / s;
  return (binary_entropy(p) + p * std::log2(static_cast<double>(subset)) + (1 - p) * std::log2(rest)) / s;
}

double ss_z_opt(double p, long long edges, long long subset) {
  if (!(p >= 0 && p <= 1)) throw Error(ErrorKind::invalid_parameters, "p must lie in [0,1]");
  if (!(subset > 0 && subset < edges)) throw Error(ErrorKind::invalid_parameters, "z needs 0 < |P| < |E|");
  if (p == 1) return std::numeric_limits<double>::infinity();
  return p * static_cast<double>(edges - subset) / ((1 - p) * static_cast<double>(subset));
}

ScalarMrModel ss_mr_model(const DistanceProfile& prof) {
  if (!prof.partitioned()) throw Error(ErrorKind::invalid_parameters, "MR needs a partitioned profile");
  if (auto errs = prof.check(); !errs.empty()) throw Error(ErrorKind::invalid_parameters, errs.front());
  return ScalarMrModel(profile_poly(prof.alpha), profile_poly(prof.beta), profile_poly(prof.gamma),
                       static_cast<double>(prof.edges), static_cast<double>(prof.subset), prof.s);
}

MrPointResult ss_mr_fixed(const DistanceProfile& prof, double delta, const SolverConfig& cfg) {
  return mr_fixed_delta(ss_mr_model(prof), delta, cfg);
}

MrCurve ss_mr_curve(const DistanceProfile& prof, int n_points, const SolverConfig& cfg) {
  return mr_curve(ss_mr_model(prof), n_points, cfg);
}

std::string profile_csv(const DistanceProfile& prof) {
  std::ostringstream os;
  os << "t,alpha,beta,gamma\n";
  for (std::size_t t = 0; t < prof.alpha.size(); ++t) {
    os << t << ',' << prof.alpha[t] << ',' << (prof.partitioned() ? prof.beta[t] : 0) << ','
       << (prof.partitioned() ? prof.gamma[t] : 0) << '\n';
  }
  return os.str();
}

}  // namespace gvb
