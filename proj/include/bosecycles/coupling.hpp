#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bosecycles {

/// Multigraph on cycles 0..vertices-1.  Edge multiplicities are stored for
/// pairs i < j in lexicographic order; there are no self-edges.
class MergerMultigraph {
 public:
  explicit MergerMultigraph(int vertices);
  MergerMultigraph(int vertices, std::vector<int> multiplicities);

  int vertices() const { return vertices_; }
  int pairs() const { return static_cast<int>(mult_.size()); }
  int multiplicity(int i, int j) const;
  void set_multiplicity(int i, int j, int m);
  void add_edges(int i, int j, int count = 1);
  const std::vector<int>& multiplicities() const { return mult_; }
  int degree(int v) const;
  int edge_count() const;

  int pair_index(int i, int j) const;

 private:
  int vertices_;
  std::vector<int> mult_;
};

/// Delta = 1 iff every vertex has even degree.
int is_merger_graph(const MergerMultigraph& g);

/// Sum over edge-carrying components of (V_i - 1).  DomainError when Delta = 0.
int k_index(const MergerMultigraph& g);

/// Explicit search for a decomposition into edge-disjoint circles of length >= 2
/// (a 2-circle uses two parallel edges).  Exponential; small graphs only.
bool circle_decomposable(const MergerMultigraph& g);

/// Non-isolated vertices minus edge-carrying components, by graph traversal.
int k_by_component_count(const MergerMultigraph& g);

struct CensusRow {
  std::vector<int> multiplicities;
  int delta = 0;
  int k = -1;  // -1 when delta = 0
};

struct MergerCensus {
  int vertices = 0;
  int max_multiplicity = 0;
  std::int64_t total = 0;
  std::int64_t delta_one = 0;
  /// Graphs where the even-degree rule and the decomposition search disagree.
  std::int64_t delta_mismatches = 0;
  /// Graphs where k_index and k_by_component_count disagree.
  std::int64_t k_mismatches = 0;
  std::map<int, std::int64_t> k_histogram;
  std::vector<CensusRow> rows;  // filled on request
};

inline constexpr int kCensusMaxVertices = 5;
inline constexpr int kCensusMaxMultiplicity = 3;

/// Every multigraph on `vertices` labelled vertices with multiplicities
/// 0..max_multiplicity.  ArgumentError beyond 5 vertices or multiplicity 3.
MergerCensus enumerate_merger_graphs(int vertices, int max_multiplicity, bool keep_rows = false);

struct CouplingParams {
  double c = 0.5;      // cycles per particle
  double a = 0.5;      // uncoupled cycles per particle
  double eps = 0.25;   // combinatorial damping
  double rho_v = 1.0;  // rho * v_{beta,alpha}
  double c1 = 1.0;     // penalty constant
  double lambda = 1.0;
  double rho = 1.0;
  int d = 3;

  void validate() const;
  std::string describe() const;
};

/// ((c-a)/2) ln(eps rho_v / (e (c-a))) + c ln c - a ln a
double coupling_gain_rate(const CouplingParams& p);

/// -c1 lambda^2 rho^{2/d} (c - a)
double fluctuation_penalty(const CouplingParams& p);

/// Gain plus penalty with the c ln c - a ln a term dropped.
double truncated_objective(const CouplingParams& p);
double full_objective(const CouplingParams& p);

struct CouplingOptimum {
  double a_star = 0.0;
  double gap = 0.0;  // c - a_star
  double C = 0.0;
  bool clamped = false;
  std::string warning;
  /// Golden-section maximizers over a in [0, c].
  double numeric_truncated_argmax = 0.0;
  double numeric_full_argmax = 0.0;
  double truncated_at_a_star = 0.0;
  double full_max = 0.0;
  bool full_exceeds_truncated = false;
};

/// Ignores p.a.  a* = c - eps rho_v exp(-2 (c1 lambda^2 rho^{2/d} + 1)),
/// C = (c - a*)/2; clamped to a* = 0 when the gap reaches c.
CouplingOptimum optimize_coupling(const CouplingParams& p);

/// ln of [eps rho_v / N]^m (cN)! / ((aN)! m! 2^m) with m = (c-a)N/2.  Exact
/// integer arithmetic for N <= 200, log-gamma beyond.  cN, aN and m must be
/// integers.
double exact_gain_log(int N, double c, double a, double eps, double rho_v);

inline constexpr int kExactGainMaxN = 200;

struct CouplingSweepRow {
  double a = 0.0;
  double gain = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

/// a on a uniform grid of `points` values in [0, c].
std::vector<CouplingSweepRow> coupling_sweep(const CouplingParams& p, int points);

}  // namespace bosecycles
