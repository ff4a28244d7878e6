#pragma once

// Graph -> weighted halfspace-learning instance generator with a
// machine-checkable planted-solution certificate.
//
// Given a graph G on n vertices and a target clique size k, the generated
// distribution over B_{n+1} x {+-1} has the property that a k-clique yields
// a unit halfspace whose gamma-margin error is exactly kappa, while absence
// of a k-clique forces every halfspace's zero-one error above
// kappa + 0.001/n^3. All probabilities and certificate margins are kept in
// exact rational (or quadratic-field) form alongside the float dataset.

#include "margin/error.hpp"
#include "margin/exact_lp.hpp"
#include "margin/rational.hpp"
#include "margin/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace margin {

struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // 0-indexed, i < j, sorted, unique
  std::vector<std::vector<bool>> adj;

  static Graph make(int n, std::vector<std::pair<int, int>> raw_edges) {
    if (n <= 0) throw std::invalid_argument("Graph: n must be positive");
    Graph g;
    g.n = n;
    g.adj.assign(n, std::vector<bool>(n, false));
    for (auto [a, b] : raw_edges) {
      if (a == b) throw std::invalid_argument("Graph: self-loop");
      if (a < 0 || b < 0 || a >= n || b >= n)
        throw std::invalid_argument("Graph: vertex out of range");
      if (a > b) std::swap(a, b);
      if (g.adj[a][b]) throw std::invalid_argument("Graph: duplicate edge");
      g.adj[a][b] = g.adj[b][a] = true;
      g.edges.emplace_back(a, b);
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
  }

  bool has_edge(int a, int b) const { return a != b && adj[a][b]; }

  std::vector<std::pair<int, int>> non_edges() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (!adj[i][j]) out.emplace_back(i, j);
    return out;
  }
};

// Edge-list text format: header "n m", then m lines "i j" with 1-indexed
// vertices.
inline Graph graph_from_text(const std::string& text) {
  std::istringstream in(text);
  long long n = 0, m = 0;
  if (!(in >> n >> m)) throw std::invalid_argument("graph_from_text: bad header");
  if (n <= 0 || m < 0) throw std::invalid_argument("graph_from_text: bad header values");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long e = 0; e < m; ++e) {
    long long a = 0, b = 0;
    if (!(in >> a >> b)) throw std::invalid_argument("graph_from_text: truncated edge list");
    if (a < 1 || b < 1 || a > n || b > n)
      throw std::invalid_argument("graph_from_text: vertex out of range");
    edges.emplace_back(static_cast<int>(a - 1), static_cast<int>(b - 1));
  }
  return Graph::make(static_cast<int>(n), std::move(edges));
}

inline std::string graph_to_text(const Graph& g) {
  std::ostringstream os;
  os << g.n << " " << g.edges.size() << "\n";
  for (auto [a, b] : g.edges) os << (a + 1) << " " << (b + 1) << "\n";
  return os.str();
}

// Lexicographically first k-clique by exhaustive search, or nullopt.
inline std::optional<std::vector<int>> find_clique(const Graph& g, int k) {
  if (k <= 0 || k > g.n) return std::nullopt;
  std::vector<int> cur;
  cur.reserve(static_cast<std::size_t>(k));
  std::optional<std::vector<int>> result;
  auto rec = [&](auto&& self, int start) -> bool {
    if (static_cast<int>(cur.size()) == k) {
      result = cur;
      return true;
    }
    const int need = k - static_cast<int>(cur.size());
    for (int v = start; v <= g.n - need; ++v) {
      bool ok = true;
      for (int u : cur)
        if (!g.adj[u][v]) { ok = false; break; }
      if (!ok) continue;
      cur.push_back(v);
      if (self(self, v + 1)) return true;
      cur.pop_back();
    }
    return false;
  };
  rec(rec, 0);
  return result;
}

// Canonical sample order: positivity, then non-edges lexicographically, then
// vertices ascending.
struct CliqueSampleInfo {
  enum Kind { Positivity = 0, NonEdge = 1, Vertex = 2 };
  Kind kind;
  int i = -1, j = -1;  // vertices involved (NonEdge uses both, Vertex uses i)
};

inline std::vector<CliqueSampleInfo> clique_sample_layout(const Graph& g) {
  std::vector<CliqueSampleInfo> out;
  out.push_back({CliqueSampleInfo::Positivity, -1, -1});
  for (auto [a, b] : g.non_edges()) out.push_back({CliqueSampleInfo::NonEdge, a, b});
  for (int v = 0; v < g.n; ++v) out.push_back({CliqueSampleInfo::Vertex, v, -1});
  return out;
}

namespace clique_detail {

struct ExactParams {
  Rat beta;             // 1 - 0.01/n^2
  Rat positivity_mass;  // beta/2 * renorm
  Rat non_edge_mass;    // beta/(2M) * renorm, 0 if complete
  Rat vertex_mass;      // 0.01/n^3 * renorm
  Rat kappa;            // (n-k) * vertex_mass
  Rat epsilon;          // 0.001/n^3 * renorm (soundness gap)
  Rat renorm;           // 1 unless the graph is complete
  long long num_non_edges = 0;
  bool complete = false;
};

inline ExactParams exact_params(const Graph& g, int k) {
  ExactParams p;
  const long long n = g.n;
  const long long total_pairs = n * (n - 1) / 2;
  p.num_non_edges = total_pairs - static_cast<long long>(g.edges.size());
  p.complete = (p.num_non_edges == 0);
  p.beta = Rat(1) - Rat(BigInt(1), BigInt(100 * n * n));
  p.renorm = Rat(1);
  if (p.complete) {
    // Without the non-edge family the raw masses sum to beta/2 + 1/(100 n^2);
    // scale everything so the total is exactly 1.
    const Rat raw_total = p.beta / 2 + Rat(BigInt(1), BigInt(100 * n * n));
    p.renorm = Rat(1) / raw_total;
  }
  p.positivity_mass = p.beta / 2 * p.renorm;
  p.non_edge_mass =
      p.complete ? Rat(0) : p.beta / (2 * Rat(BigInt(p.num_non_edges))) * p.renorm;
  p.vertex_mass = Rat(BigInt(1), BigInt(100) * n * n * n) * p.renorm;
  p.kappa = Rat(BigInt(n - k)) * p.vertex_mass;
  p.epsilon = Rat(BigInt(1), BigInt(1000) * n * n * n) * p.renorm;
  return p;
}

}  // namespace clique_detail

inline std::vector<Rat> clique_sample_masses(const Graph& g, int k) {
  const auto p = clique_detail::exact_params(g, k);
  std::vector<Rat> out;
  for (const auto& info : clique_sample_layout(g)) {
    switch (info.kind) {
      case CliqueSampleInfo::Positivity: out.push_back(p.positivity_mass); break;
      case CliqueSampleInfo::NonEdge: out.push_back(p.non_edge_mass); break;
      case CliqueSampleInfo::Vertex: out.push_back(p.vertex_mass); break;
    }
  }
  return out;
}

// Exact sample rows for the zero-one LP oracle, in the substituted variables
// (u, w_1..w_n) with u = w_* / sqrt(k); the substitution makes every
// coordinate rational without changing which sign patterns are realizable.
inline std::vector<ExactSample> clique_exact_rows(const Graph& g, int k) {
  const auto layout = clique_sample_layout(g);
  const auto masses = clique_sample_masses(g, k);
  std::vector<ExactSample> rows;
  rows.reserve(layout.size());
  const std::size_t d = static_cast<std::size_t>(g.n) + 1;
  for (std::size_t idx = 0; idx < layout.size(); ++idx) {
    const auto& info = layout[idx];
    ExactSample s;
    s.coeffs.assign(d, Rat(0));
    s.mass = masses[idx];
    switch (info.kind) {
      case CliqueSampleInfo::Positivity:
        // <x, w> = -w_* = -sqrt(k) u; scaled by 1/sqrt(k).
        s.coeffs[0] = Rat(-1);
        s.label = -1;
        break;
      case CliqueSampleInfo::NonEdge:
        // <x, w> = (1.1 u - w_i - w_j) / 2; scaled by 2 and cleared to /20.
        s.coeffs[0] = rat(11, 10);
        s.coeffs[1 + static_cast<std::size_t>(info.i)] = Rat(-1);
        s.coeffs[1 + static_cast<std::size_t>(info.j)] = Rat(-1);
        s.label = 1;
        break;
      case CliqueSampleInfo::Vertex:
        // <x, w> = (w_i - 0.9 u) / 2; scaled by 2.
        s.coeffs[0] = rat(-9, 10);
        s.coeffs[1 + static_cast<std::size_t>(info.i)] = Rat(1);
        s.label = 1;
        break;
    }
    rows.push_back(std::move(s));
  }
  return rows;
}

// Exhaustive exact oracle: OPT_{0-1} <= theta for the generated distribution?
inline bool clique_opt_zero_one_at_most(const Graph& g, int k, const Rat& theta) {
  return opt_zero_one_at_most(clique_exact_rows(g, k), theta);
}

inline ReductionInstance reduce_clique(
    const Graph& g, int k,
    std::optional<std::vector<int>> clique_hint = std::nullopt) {
  if (k < 2 || k > g.n) throw std::invalid_argument("reduce_clique: need 2 <= k <= n");
  const int n = g.n;
  const auto p = clique_detail::exact_params(g, k);
  const auto layout = clique_sample_layout(g);
  const auto masses = clique_sample_masses(g, k);

  ReductionInstance R;
  const int d = n + 1;  // coordinate 0 is *, coordinate 1+v is vertex v
  const std::size_t N = layout.size();
  R.dataset.dim = d;
  R.dataset.X = Matrix::Zero(static_cast<Eigen::Index>(N), d);
  R.dataset.y = Vector::Zero(static_cast<Eigen::Index>(N));
  R.dataset.p = Vector::Zero(static_cast<Eigen::Index>(N));
  R.exact_mass = masses;

  const double inv_sqrt_k = 1.0 / std::sqrt(static_cast<double>(k));
  for (std::size_t idx = 0; idx < N; ++idx) {
    const auto& info = layout[idx];
    const auto r = static_cast<Eigen::Index>(idx);
    switch (info.kind) {
      case CliqueSampleInfo::Positivity:
        R.dataset.X(r, 0) = -1.0;
        R.dataset.y(r) = -1.0;
        break;
      case CliqueSampleInfo::NonEdge:
        R.dataset.X(r, 0) = 0.55 * inv_sqrt_k;
        R.dataset.X(r, 1 + info.i) = -0.5;
        R.dataset.X(r, 1 + info.j) = -0.5;
        R.dataset.y(r) = 1.0;
        break;
      case CliqueSampleInfo::Vertex:
        R.dataset.X(r, 0) = -0.45 * inv_sqrt_k;
        R.dataset.X(r, 1 + info.i) = 0.5;
        R.dataset.y(r) = 1.0;
        break;
    }
    if (R.dataset.X.row(r).norm() > 1.0 + 1e-12)
      throw std::logic_error("reduce_clique: sample escaped the unit ball");
    R.dataset.p(r) = rat_to_double(masses[idx]);
  }

  R.gamma = 0.1 / (2.0 * std::sqrt(2.0 * k));
  R.kappa = rat_to_double(p.kappa);
  R.epsilon = rat_to_double(p.epsilon);
  R.alpha = 1.0;

  R.exact_params["beta"] = rat_str(p.beta);
  R.exact_params["positivity_mass"] = rat_str(p.positivity_mass);
  R.exact_params["non_edge_mass_each"] = rat_str(p.non_edge_mass);
  R.exact_params["vertex_mass_each"] = rat_str(p.vertex_mass);
  R.exact_params["kappa"] = rat_str(p.kappa);
  R.exact_params["epsilon"] = rat_str(p.epsilon);
  R.exact_params["gamma_squared"] = rat_str(Rat(BigInt(1), BigInt(800) * k));
  R.exact_params["renormalization"] = rat_str(p.renorm);
  if (p.complete) R.flags.push_back("complete_graph_renormalized");

  std::optional<std::vector<int>> clique = std::move(clique_hint);
  if (clique) {
    if (static_cast<int>(clique->size()) != k)
      throw std::invalid_argument("reduce_clique: clique hint has wrong size");
    for (std::size_t a = 0; a < clique->size(); ++a) {
      int va = (*clique)[a];
      if (va < 0 || va >= n) throw std::invalid_argument("reduce_clique: hint vertex range");
      for (std::size_t b = a + 1; b < clique->size(); ++b)
        if (!g.adj[va][(*clique)[b]])
          throw std::invalid_argument("reduce_clique: hint is not a clique");
    }
  } else if (n <= 20) {
    clique = find_clique(g, k);
  }
  if (clique) {
    std::sort(clique->begin(), clique->end());
    Vector w = Vector::Zero(d);
    w(0) = 1.0 / std::sqrt(2.0);
    const double wi = 1.0 / std::sqrt(2.0 * k);
    for (int v : *clique) w(1 + v) = wi;
    R.certificate = Halfspace{w};
    R.has_certificate = true;
    std::ostringstream os;
    for (std::size_t a = 0; a < clique->size(); ++a)
      os << (a ? "," : "") << ((*clique)[a] + 1);
    R.exact_params["certificate_clique"] = os.str();
  }
  return R;
}

// Exact certificate audit: margins of the planted halfspace are evaluated in
// Q[sqrt(k)] (scaled by sqrt(2k), against threshold 1/20) so the error masses
// come out as exact rationals.
struct CliqueCertificateCheck {
  Rat mass_total;
  Rat margin_gamma_error;  // mass with y<w,x> strictly below gamma
  Rat zero_one_error;
  Rat kappa;
  bool noerror_margins_at_least_gamma = true;
  bool complete_graph = false;
};

inline CliqueCertificateCheck clique_certificate_check(const Graph& g, int k,
                                                       const std::vector<int>& S) {
  if (static_cast<int>(S.size()) != k)
    throw std::invalid_argument("clique_certificate_check: |S| != k");
  std::vector<bool> in_S(static_cast<std::size_t>(g.n), false);
  for (int v : S) {
    if (v < 0 || v >= g.n) throw std::invalid_argument("clique_certificate_check: vertex range");
    in_S[static_cast<std::size_t>(v)] = true;
  }
  const auto p = clique_detail::exact_params(g, k);
  const auto layout = clique_sample_layout(g);
  const auto masses = clique_sample_masses(g, k);
  const Rat thr = rat(1, 20);  // gamma * sqrt(2k)

  CliqueCertificateCheck out;
  out.mass_total = 0;
  out.margin_gamma_error = 0;
  out.zero_one_error = 0;
  out.kappa = p.kappa;
  out.complete_graph = p.complete;

  for (std::size_t idx = 0; idx < layout.size(); ++idx) {
    const auto& info = layout[idx];
    // u = y <w_cert, x> * sqrt(2k) expressed as a*sqrt(k) + b.
    Rat a(0), b(0);
    int label = 1;
    switch (info.kind) {
      case CliqueSampleInfo::Positivity:
        a = 1;
        label = -1;
        break;
      case CliqueSampleInfo::NonEdge:
        b = rat(11, 20) - (in_S[info.i] ? rat(1, 2) : Rat(0)) -
            (in_S[info.j] ? rat(1, 2) : Rat(0));
        break;
      case CliqueSampleInfo::Vertex:
        b = (in_S[info.i] ? rat(1, 2) : Rat(0)) - rat(9, 20);
        break;
    }
    const int u_sign = quad_sign(a, b, k);
    const int margin_sign = quad_sign(a, b - thr, k);  // sign of u - gamma*sqrt(2k)
    const bool margin_err = margin_sign < 0;
    const bool zo_err = (label > 0) ? (u_sign < 0) : (u_sign <= 0);
    out.mass_total += masses[idx];
    if (margin_err) out.margin_gamma_error += masses[idx];
    if (zo_err) out.zero_one_error += masses[idx];
    // Certificate property: any sample it classifies correctly should clear
    // the full margin (no samples inside the band [0, gamma)).
    if (!zo_err && margin_sign < 0) out.noerror_margins_at_least_gamma = false;
  }
  return out;
}

}  // namespace margin
