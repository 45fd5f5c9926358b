#include "bosecycles/coupling.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "bosecycles/errors.hpp"

namespace bosecycles {

namespace {

using Circle = std::vector<int>;  // pair indices, repeated for a 2-circle

// Every circle through pair (u, v), oriented u -> v -> ... -> u.
std::vector<Circle> circles_through(int n, int u, int v, const MergerMultigraph& index) {
  std::vector<Circle> out;
  const int e = index.pair_index(u, v);
  out.push_back({e, e});
  std::vector<int> path;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  used[static_cast<std::size_t>(u)] = used[static_cast<std::size_t>(v)] = true;
  auto extend = [&](auto&& self) -> void {
    for (int w = 0; w < n; ++w) {
      if (used[static_cast<std::size_t>(w)]) continue;
      used[static_cast<std::size_t>(w)] = true;
      path.push_back(w);
      Circle c{e};
      int prev = v;
      for (int x : path) {
        c.push_back(index.pair_index(prev, x));
        prev = x;
      }
      c.push_back(index.pair_index(prev, u));
      out.push_back(std::move(c));
      self(self);
      path.pop_back();
      used[static_cast<std::size_t>(w)] = false;
    }
  };
  extend(extend);
  return out;
}

class CircleSearch {
 public:
  CircleSearch(int n, int base) : base_(static_cast<std::uint64_t>(base)), probe_(n) {
    const int pairs = probe_.pairs();
    pow_.resize(static_cast<std::size_t>(pairs));
    std::uint64_t p = 1;
    for (int i = 0; i < pairs; ++i) {
      pow_[static_cast<std::size_t>(i)] = p;
      p *= base_;
    }
    size_ = p;
    circles_.resize(static_cast<std::size_t>(pairs));
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        circles_[static_cast<std::size_t>(probe_.pair_index(u, v))] = circles_through(n, u, v, probe_);
  }

  std::uint64_t size() const { return size_; }

  std::uint64_t encode(const std::vector<int>& m) const {
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < m.size(); ++i) code += static_cast<std::uint64_t>(m[i]) * pow_[i];
    return code;
  }

  void decode(std::uint64_t code, std::vector<int>& m) const {
    m.resize(pow_.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = static_cast<int>(code % base_);
      code /= base_;
    }
  }

  // Calls f(reduced_code) for every circle through the first nonzero pair that
  // fits into m; returns false when f never returned true.  Empty graph: true.
  template <class F>
  bool any_removal(const std::vector<int>& m, std::uint64_t code, F&& f) const {
    std::size_t first = m.size();
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] > 0) {
        first = i;
        break;
      }
    if (first == m.size()) return true;
    std::vector<int> need(m.size(), 0);
    for (const Circle& c : circles_[first]) {
      bool fits = true;
      for (int e : c) ++need[static_cast<std::size_t>(e)];
      std::uint64_t reduced = code;
      for (int e : c) {
        if (need[static_cast<std::size_t>(e)] > m[static_cast<std::size_t>(e)]) fits = false;
      }
      if (fits)
        for (int e : c) reduced -= pow_[static_cast<std::size_t>(e)];
      for (int e : c) need[static_cast<std::size_t>(e)] = 0;
      if (fits && f(reduced)) return true;
    }
    return false;
  }

  bool decomposable(std::vector<int>& m) {
    const std::uint64_t code = encode(m);
    if (auto it = memo_.find(code); it != memo_.end()) return it->second;
    const bool ok = any_removal(m, code, [&](std::uint64_t reduced) {
      std::vector<int> sub;
      decode(reduced, sub);
      return decomposable(sub);
    });
    memo_[code] = ok;
    return ok;
  }

 private:
  std::uint64_t base_;
  MergerMultigraph probe_;
  std::vector<std::uint64_t> pow_;
  std::uint64_t size_ = 1;
  std::vector<std::vector<Circle>> circles_;
  std::unordered_map<std::uint64_t, bool> memo_;
};

template <class T>
T xlogx(T x) {
  return x > 0 ? x * std::log(x) : T(0);
}

template <class T>
T truncated_rate(T c, T a, T eps_rho_v, T pen) {
  const T x = c - a;
  if (x <= 0) return T(0);
  return x / 2 * (std::log(eps_rho_v) - 1 - std::log(x)) - pen * x;
}

template <class T>
T full_rate(T c, T a, T eps_rho_v, T pen) {
  return truncated_rate(c, a, eps_rho_v, pen) + xlogx(c) - xlogx(a);
}

template <class F>
long double golden_argmax(F&& f, long double lo, long double hi) {
  const long double r = (std::sqrt(5.0L) - 1) / 2;
  long double x1 = hi - r * (hi - lo);
  long double x2 = lo + r * (hi - lo);
  long double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 400 && hi - lo > 1e-16L * (1 + std::fabs(hi)); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    }
  }
  return (lo + hi) / 2;
}

double penalty_coefficient(const CouplingParams& p) {
  return p.c1 * p.lambda * p.lambda * std::pow(p.rho, 2.0 / p.d);
}

int checked_integer(double x, const char* what) {
  const double r = std::round(x);
  if (std::fabs(x - r) > 1e-9 * std::max(1.0, std::fabs(x)) || r < 0)
    throw ArgumentError(std::string(what) + " must be a nonnegative integer");
  return static_cast<int>(r);
}

double log_of(const boost::multiprecision::cpp_int& x) {
  const unsigned bits = boost::multiprecision::msb(x);
  if (bits < 62) return std::log(x.convert_to<double>());
  const unsigned shift = bits - 60;
  const boost::multiprecision::cpp_int top = x >> shift;
  return std::log(top.convert_to<double>()) + shift * std::log(2.0);
}

}  // namespace

MergerMultigraph::MergerMultigraph(int vertices) : vertices_(vertices) {
  if (vertices < 0) throw ArgumentError("vertex count must be >= 0");
  mult_.assign(static_cast<std::size_t>(vertices * (vertices - 1) / 2), 0);
}

MergerMultigraph::MergerMultigraph(int vertices, std::vector<int> multiplicities) : MergerMultigraph(vertices) {
  if (multiplicities.size() != mult_.size())
    throw ArgumentError("expected " + std::to_string(mult_.size()) + " multiplicities");
  for (int m : multiplicities)
    if (m < 0) throw ArgumentError("multiplicities must be nonnegative");
  mult_ = std::move(multiplicities);
}

int MergerMultigraph::pair_index(int i, int j) const {
  if (i == j) throw ArgumentError("no self-edges");
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= vertices_) throw ArgumentError("vertex out of range");
  return i * (2 * vertices_ - i - 1) / 2 + (j - i - 1);
}

int MergerMultigraph::multiplicity(int i, int j) const {
  return mult_[static_cast<std::size_t>(pair_index(i, j))];
}

void MergerMultigraph::set_multiplicity(int i, int j, int m) {
  if (m < 0) throw ArgumentError("multiplicities must be nonnegative");
  mult_[static_cast<std::size_t>(pair_index(i, j))] = m;
}

void MergerMultigraph::add_edges(int i, int j, int count) {
  set_multiplicity(i, j, multiplicity(i, j) + count);
}

int MergerMultigraph::degree(int v) const {
  int deg = 0;
  for (int w = 0; w < vertices_; ++w)
    if (w != v) deg += multiplicity(v, w);
  return deg;
}

int MergerMultigraph::edge_count() const { return std::accumulate(mult_.begin(), mult_.end(), 0); }

int is_merger_graph(const MergerMultigraph& g) {
  for (int v = 0; v < g.vertices(); ++v)
    if (g.degree(v) % 2 != 0) return 0;
  return 1;
}

int k_index(const MergerMultigraph& g) {
  if (is_merger_graph(g) == 0) throw DomainError("K is undefined for a graph with odd-degree vertices");
  std::vector<int> parent(static_cast<std::size_t>(g.vertices()));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  int merges = 0;
  for (int i = 0; i < g.vertices(); ++i)
    for (int j = i + 1; j < g.vertices(); ++j) {
      if (g.multiplicity(i, j) == 0) continue;
      const int a = find(i), b = find(j);
      if (a != b) {
        parent[static_cast<std::size_t>(a)] = b;
        ++merges;
      }
    }
  return merges;
}

bool circle_decomposable(const MergerMultigraph& g) {
  int top = 0;
  for (int m : g.multiplicities()) top = std::max(top, m);
  CircleSearch search(g.vertices(), top + 1);
  std::vector<int> m = g.multiplicities();
  return search.decomposable(m);
}

int k_by_component_count(const MergerMultigraph& g) {
  const int n = g.vertices();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int non_isolated = 0, components = 0;
  for (int s = 0; s < n; ++s) {
    if (g.degree(s) == 0) continue;
    ++non_isolated;
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<int> stack{s};
    comp[static_cast<std::size_t>(s)] = components;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        if (w == v || g.multiplicity(v, w) == 0 || comp[static_cast<std::size_t>(w)] >= 0) continue;
        comp[static_cast<std::size_t>(w)] = components;
        stack.push_back(w);
      }
    }
    ++components;
  }
  return non_isolated - components;
}

MergerCensus enumerate_merger_graphs(int vertices, int max_multiplicity, bool keep_rows) {
  if (vertices < 1 || vertices > kCensusMaxVertices)
    throw ArgumentError("census supports 1.." + std::to_string(kCensusMaxVertices) + " vertices");
  if (max_multiplicity < 0 || max_multiplicity > kCensusMaxMultiplicity)
    throw ArgumentError("census supports multiplicities up to " + std::to_string(kCensusMaxMultiplicity));

  CircleSearch search(vertices, max_multiplicity + 1);
  std::vector<std::int8_t> decomposable(search.size(), 0);
  MergerCensus census;
  census.vertices = vertices;
  census.max_multiplicity = max_multiplicity;

  std::vector<int> m;
  // Removing a circle lowers the code, so ascending order sees every
  // sub-graph before its parents.
  for (std::uint64_t code = 0; code < search.size(); ++code) {
    search.decode(code, m);
    const bool dec = search.any_removal(m, code, [&](std::uint64_t reduced) { return decomposable[reduced] != 0; });
    decomposable[code] = dec ? 1 : 0;

    const MergerMultigraph g(vertices, m);
    const int delta = is_merger_graph(g);
    ++census.total;
    if ((delta == 1) != dec) ++census.delta_mismatches;
    int k = -1;
    if (delta == 1) {
      ++census.delta_one;
      k = k_index(g);
      if (k != k_by_component_count(g)) ++census.k_mismatches;
      ++census.k_histogram[k];
    }
    if (keep_rows) census.rows.push_back({m, delta, k});
  }
  return census;
}

void CouplingParams::validate() const {
  if (!(c > 0 && c < 1)) throw ArgumentError("coupling: c must lie in (0, 1)");
  if (!(a >= 0 && a <= c)) throw ArgumentError("coupling: a must lie in [0, c]");
  if (!(eps > 0 && eps <= 1)) throw ArgumentError("coupling: eps must lie in (0, 1]");
  if (!(rho_v > 0)) throw ArgumentError("coupling: rho_v must be positive");
  if (!(c1 > 0)) throw ArgumentError("coupling: c1 must be positive");
  if (!(lambda > 0) || !(rho > 0)) throw ArgumentError("coupling: lambda and rho must be positive");
  if (d < 1) throw ArgumentError("coupling: d must be >= 1");
}

std::string CouplingParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "c=" << c << " a=" << a << " eps=" << eps << " rho_v=" << rho_v << " c1=" << c1 << " lambda=" << lambda
     << " rho=" << rho << " d=" << d;
  return os.str();
}

double coupling_gain_rate(const CouplingParams& p) {
  p.validate();
  return full_rate<double>(p.c, p.a, p.eps * p.rho_v, 0.0);
}

double fluctuation_penalty(const CouplingParams& p) {
  p.validate();
  return -penalty_coefficient(p) * (p.c - p.a);
}

double truncated_objective(const CouplingParams& p) {
  p.validate();
  return truncated_rate<double>(p.c, p.a, p.eps * p.rho_v, penalty_coefficient(p));
}

double full_objective(const CouplingParams& p) {
  p.validate();
  return full_rate<double>(p.c, p.a, p.eps * p.rho_v, penalty_coefficient(p));
}

CouplingOptimum optimize_coupling(const CouplingParams& p) {
  CouplingParams q = p;
  q.a = q.c;
  q.validate();
  const double pen = penalty_coefficient(q);
  CouplingOptimum out;
  out.gap = q.eps * q.rho_v * std::exp(-2 * (pen + 1));
  out.C = out.gap / 2;
  if (out.gap >= q.c) {
    out.clamped = true;
    out.gap = q.c;
    out.a_star = 0.0;
    out.warning = "closed-form gap eps*rho_v*exp(-2(c1 lambda^2 rho^(2/d)+1)) >= c; a* clamped to 0";
  } else {
    out.a_star = q.c - out.gap;
  }

  const long double c = q.c, er = q.eps * q.rho_v, pl = pen;
  out.numeric_truncated_argmax = static_cast<double>(
      golden_argmax([&](long double a) { return truncated_rate(c, a, er, pl); }, 0.0L, c));
  out.numeric_full_argmax =
      static_cast<double>(golden_argmax([&](long double a) { return full_rate(c, a, er, pl); }, 0.0L, c));
  out.truncated_at_a_star = truncated_rate<double>(q.c, out.a_star, er, pen);
  out.full_max = full_rate<double>(q.c, out.numeric_full_argmax, er, pen);
  out.full_exceeds_truncated = out.full_max >= out.truncated_at_a_star;
  return out;
}

double exact_gain_log(int N, double c, double a, double eps, double rho_v) {
  if (N < 1) throw ArgumentError("N must be >= 1");
  if (!(eps > 0) || !(rho_v > 0)) throw ArgumentError("eps and rho_v must be positive");
  const int cN = checked_integer(c * N, "c*N");
  const int aN = checked_integer(a * N, "a*N");
  if (aN > cN) throw ArgumentError("a must not exceed c");
  if ((cN - aN) % 2 != 0) throw ArgumentError("(c-a)*N must be even");
  const int m = (cN - aN) / 2;

  double log_ratio;
  if (N <= kExactGainMaxN) {
    using boost::multiprecision::cpp_int;
    cpp_int num = 1, den = 1;
    for (int k = aN + 1; k <= cN; ++k) num *= k;
    for (int k = 2; k <= m; ++k) den *= k;
    den <<= static_cast<unsigned>(m);
    if (num % den != 0) throw NumericError("factorial ratio is not an integer");
    log_ratio = log_of(num / den);
  } else {
    log_ratio = std::lgamma(cN + 1.0) - std::lgamma(aN + 1.0) - std::lgamma(m + 1.0) - m * std::log(2.0);
  }
  return log_ratio + m * std::log(eps * rho_v / N);
}

std::vector<CouplingSweepRow> coupling_sweep(const CouplingParams& p, int points) {
  if (points < 2) throw ArgumentError("sweep needs at least 2 points");
  CouplingParams q = p;
  std::vector<CouplingSweepRow> rows;
  rows.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    q.a = i == points - 1 ? q.c : q.c * i / (points - 1);
    CouplingSweepRow r;
    r.a = q.a;
    r.gain = coupling_gain_rate(q);
    r.penalty = fluctuation_penalty(q);
    r.total = r.gain + r.penalty;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace bosecycles
