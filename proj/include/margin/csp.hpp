#pragma once

// Constraint-satisfaction -> weighted halfspace-learning instance generator.
//
// A regular k-CSP (every variable in the same number Delta of constraints)
// maps to a distribution over B_d x {+-1} with d = 1 + sum_S |Pi_S|: one
// coordinate per accepting assignment of each constraint plus a special
// coordinate *. A satisfying assignment yields a certificate halfspace whose
// gamma-margin error is exactly kappa = |V|/Z; when no assignment attains
// value nu, every halfspace's zero-one error exceeds alpha*kappa + epsilon.
// All probabilities and certificate margins are exact rationals.

#include "margin/error.hpp"
#include "margin/exact_lp.hpp"
#include "margin/io.hpp"
#include "margin/rational.hpp"
#include "margin/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace margin {

struct CspConstraint {
  std::vector<int> scope;                  // variable indices, size k, distinct
  std::vector<std::vector<int>> accepting; // rows of label indices, one per scope slot
};

struct CspInstance {
  std::vector<json> variables;  // display values (names)
  std::vector<json> alphabet;   // display values (labels)
  int k = 0;
  std::vector<CspConstraint> constraints;
};

inline std::vector<std::string> validate_csp(const CspInstance& L) {
  std::vector<std::string> out;
  const int nv = static_cast<int>(L.variables.size());
  const int na = static_cast<int>(L.alphabet.size());
  if (nv == 0) out.push_back("no variables");
  if (na == 0) out.push_back("empty alphabet");
  if (L.k < 1) out.push_back("arity k must be >= 1");
  if (L.constraints.empty()) out.push_back("no constraints");
  {
    std::set<std::string> seen;
    for (const auto& v : L.variables)
      if (!seen.insert(v.dump()).second) out.push_back("duplicate variable " + v.dump());
  }
  {
    std::set<std::string> seen;
    for (const auto& a : L.alphabet)
      if (!seen.insert(a.dump()).second) out.push_back("duplicate label " + a.dump());
  }
  std::vector<int> degree(static_cast<std::size_t>(std::max(nv, 0)), 0);
  std::set<std::vector<int>> scope_sets;
  for (std::size_t c = 0; c < L.constraints.size(); ++c) {
    const auto& con = L.constraints[c];
    const std::string tag = "constraint " + std::to_string(c);
    if (static_cast<int>(con.scope.size()) != L.k) {
      out.push_back(tag + ": scope size != k");
      continue;
    }
    bool scope_ok = true;
    std::set<int> distinct;
    for (int v : con.scope) {
      if (v < 0 || v >= nv) { out.push_back(tag + ": scope variable out of range"); scope_ok = false; }
      else if (!distinct.insert(v).second) { out.push_back(tag + ": repeated scope variable"); scope_ok = false; }
    }
    if (!scope_ok) continue;
    std::vector<int> sorted_scope(distinct.begin(), distinct.end());
    if (!scope_sets.insert(sorted_scope).second) out.push_back(tag + ": duplicate scope set");
    for (int v : con.scope) degree[static_cast<std::size_t>(v)]++;
    if (con.accepting.empty())
      out.push_back(tag + ": empty accepting set (constraint unsatisfiable; breaks the construction)");
    std::set<std::vector<int>> rows;
    for (const auto& f : con.accepting) {
      if (static_cast<int>(f.size()) != L.k) { out.push_back(tag + ": accepting row size != k"); continue; }
      for (int lbl : f)
        if (lbl < 0 || lbl >= na) out.push_back(tag + ": accepting label out of range");
      if (!rows.insert(f).second) out.push_back(tag + ": duplicate accepting row");
    }
  }
  if (out.empty()) {
    for (int v = 1; v < nv; ++v)
      if (degree[static_cast<std::size_t>(v)] != degree[0]) {
        out.push_back("not regular: variable degrees differ");
        break;
      }
    if (nv > 0 && degree[0] == 0) out.push_back("not regular: variables appear in no constraint");
  }
  return out;
}

// Degree Delta of a valid regular instance.
inline int csp_degree(const CspInstance& L) {
  std::vector<int> degree(L.variables.size(), 0);
  for (const auto& con : L.constraints)
    for (int v : con.scope) degree[static_cast<std::size_t>(v)]++;
  return L.variables.empty() ? 0 : degree[0];
}

// JSON interchange: {"variables": [...], "alphabet": [...],
//   "constraints": [{"scope": [names], "accepting": [[labels]]}]}.
inline CspInstance csp_from_json(const json& j) {
  CspInstance L;
  if (!j.contains("variables") || !j.contains("alphabet") || !j.contains("constraints"))
    throw std::invalid_argument("csp_from_json: need variables/alphabet/constraints");
  std::map<std::string, int> var_idx, lbl_idx;
  for (const auto& v : j.at("variables")) {
    var_idx.emplace(v.dump(), static_cast<int>(L.variables.size()));
    L.variables.push_back(v);
  }
  for (const auto& a : j.at("alphabet")) {
    lbl_idx.emplace(a.dump(), static_cast<int>(L.alphabet.size()));
    L.alphabet.push_back(a);
  }
  bool first = true;
  for (const auto& cj : j.at("constraints")) {
    CspConstraint con;
    for (const auto& v : cj.at("scope")) {
      auto it = var_idx.find(v.dump());
      if (it == var_idx.end()) throw std::invalid_argument("csp_from_json: unknown scope variable " + v.dump());
      con.scope.push_back(it->second);
    }
    if (first) { L.k = static_cast<int>(con.scope.size()); first = false; }
    for (const auto& fj : cj.at("accepting")) {
      std::vector<int> f;
      for (const auto& lbl : fj) {
        auto it = lbl_idx.find(lbl.dump());
        if (it == lbl_idx.end()) throw std::invalid_argument("csp_from_json: unknown label " + lbl.dump());
        f.push_back(it->second);
      }
      con.accepting.push_back(std::move(f));
    }
    L.constraints.push_back(std::move(con));
  }
  return L;
}

inline json csp_to_json(const CspInstance& L) {
  json j;
  j["variables"] = L.variables;
  j["alphabet"] = L.alphabet;
  j["constraints"] = json::array();
  for (const auto& con : L.constraints) {
    json cj;
    cj["scope"] = json::array();
    for (int v : con.scope) cj["scope"].push_back(L.variables[static_cast<std::size_t>(v)]);
    cj["accepting"] = json::array();
    for (const auto& f : con.accepting) {
      json fj = json::array();
      for (int lbl : f) fj.push_back(L.alphabet[static_cast<std::size_t>(lbl)]);
      cj["accepting"].push_back(fj);
    }
    j["constraints"].push_back(std::move(cj));
  }
  return j;
}

// Fraction of constraints whose restriction of `assignment` is accepting.
inline double csp_value(const CspInstance& L, const std::vector<int>& assignment) {
  if (L.constraints.empty()) throw std::invalid_argument("csp_value: no constraints");
  if (assignment.size() != L.variables.size())
    throw std::invalid_argument("csp_value: assignment must cover every variable");
  for (int lbl : assignment)
    if (lbl < 0 || lbl >= static_cast<int>(L.alphabet.size()))
      throw std::invalid_argument("csp_value: label out of range");
  int sat = 0;
  for (const auto& con : L.constraints) {
    std::vector<int> restricted;
    restricted.reserve(con.scope.size());
    for (int v : con.scope) restricted.push_back(assignment[static_cast<std::size_t>(v)]);
    for (const auto& f : con.accepting)
      if (f == restricted) { ++sat; break; }
  }
  return static_cast<double>(sat) / static_cast<double>(L.constraints.size());
}

// Exhaustive satisfiability search (lexicographic, variable 0 most
// significant); nullopt when the search space exceeds the cap or no
// satisfying assignment exists.
inline std::optional<std::vector<int>> find_satisfying_assignment(
    const CspInstance& L, std::uint64_t cap = 1'000'000) {
  const std::size_t nv = L.variables.size();
  const std::uint64_t na = L.alphabet.size();
  if (nv == 0 || na == 0) return std::nullopt;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < nv; ++i) {
    if (total > cap / na + 1) return std::nullopt;
    total *= na;
    if (total > cap) return std::nullopt;
  }
  std::vector<int> a(nv, 0);
  for (std::uint64_t it = 0; it < total; ++it) {
    if (csp_value(L, a) == 1.0) return a;
    // increment odometer, last variable fastest
    std::size_t pos = nv;
    while (pos > 0) {
      --pos;
      if (++a[pos] < static_cast<int>(na)) break;
      a[pos] = 0;
    }
  }
  return std::nullopt;
}

namespace csp_detail {

struct Layout {
  int num_vars = 0, num_labels = 0, k = 0, degree = 0;
  long long num_constraints = 0;
  long long n = 0;  // sum of |Pi_S| = number of (S, f) coordinates
  std::vector<long long> coord_offset;  // per constraint, into coords 1..n
  BigInt Z;
  Rat delta;   // 0.1 / (Delta |Sigma|^{2k})
  BigInt s;    // 10 Delta |Sigma|^k
  Rat kappa;   // |V| / Z
  Rat zeta_sq; // 1 / (1 + |Q|)
};

inline Layout layout(const CspInstance& L) {
  Layout lay;
  lay.num_vars = static_cast<int>(L.variables.size());
  lay.num_labels = static_cast<int>(L.alphabet.size());
  lay.k = L.k;
  lay.degree = csp_degree(L);
  lay.num_constraints = static_cast<long long>(L.constraints.size());
  for (const auto& con : L.constraints) {
    lay.coord_offset.push_back(lay.n);
    lay.n += static_cast<long long>(con.accepting.size());
  }
  const BigInt sigma_k = boost::multiprecision::pow(BigInt(lay.num_labels),
                                                    static_cast<unsigned>(lay.k));
  lay.Z = 2 * (BigInt(lay.num_vars) * lay.num_labels +
               2 * BigInt(lay.k) * lay.num_constraints + 2 * BigInt(lay.k) * lay.n);
  lay.delta = Rat(BigInt(1), BigInt(10) * lay.degree * sigma_k * sigma_k);
  lay.s = BigInt(10) * lay.degree * sigma_k;
  lay.kappa = Rat(BigInt(lay.num_vars), lay.Z);
  lay.zeta_sq = Rat(BigInt(1), BigInt(1 + lay.num_constraints));
  return lay;
}

}  // namespace csp_detail

// Canonical sample order: positivity; non-negativity per coordinate (S, f)
// in coordinate order; satisfiability per constraint; selection per (v,
// sigma) lexicographically.
struct CspSampleInfo {
  enum Kind { Positivity = 0, NonNegativity = 1, Satisfiability = 2, Selection = 3 };
  Kind kind;
  int constraint = -1, accepting = -1;  // NonNegativity
  int variable = -1, label = -1;        // Selection
};

inline std::vector<CspSampleInfo> csp_sample_layout(const CspInstance& L) {
  std::vector<CspSampleInfo> out;
  out.push_back({CspSampleInfo::Positivity, -1, -1, -1, -1});
  for (int c = 0; c < static_cast<int>(L.constraints.size()); ++c)
    for (int f = 0; f < static_cast<int>(L.constraints[static_cast<std::size_t>(c)].accepting.size()); ++f)
      out.push_back({CspSampleInfo::NonNegativity, c, f, -1, -1});
  for (int c = 0; c < static_cast<int>(L.constraints.size()); ++c)
    out.push_back({CspSampleInfo::Satisfiability, c, -1, -1, -1});
  for (int v = 0; v < static_cast<int>(L.variables.size()); ++v)
    for (int a = 0; a < static_cast<int>(L.alphabet.size()); ++a)
      out.push_back({CspSampleInfo::Selection, -1, -1, v, a});
  return out;
}

inline std::vector<Rat> csp_sample_masses(const CspInstance& L) {
  const auto lay = csp_detail::layout(L);
  const Rat non_neg_mass(2 * BigInt(lay.k), lay.Z);
  const Rat selection_mass(BigInt(1), lay.Z);
  std::vector<Rat> out;
  for (const auto& info : csp_sample_layout(L)) {
    switch (info.kind) {
      case CspSampleInfo::Positivity: out.push_back(rat(1, 2)); break;
      case CspSampleInfo::NonNegativity:
      case CspSampleInfo::Satisfiability: out.push_back(non_neg_mass); break;
      case CspSampleInfo::Selection: out.push_back(selection_mass); break;
    }
  }
  return out;
}

// Exact sample rows for the zero-one LP oracle over w = (w_*, w_{(S,f)}...),
// scaled per-sample by s (positive, classification-invariant).
inline std::vector<ExactSample> csp_exact_rows(const CspInstance& L) {
  const auto lay = csp_detail::layout(L);
  const auto layout_v = csp_sample_layout(L);
  const auto masses = csp_sample_masses(L);
  const std::size_t d = static_cast<std::size_t>(lay.n) + 1;
  std::vector<ExactSample> rows;
  rows.reserve(layout_v.size());
  for (std::size_t idx = 0; idx < layout_v.size(); ++idx) {
    const auto& info = layout_v[idx];
    ExactSample smp;
    smp.coeffs.assign(d, Rat(0));
    smp.mass = masses[idx];
    switch (info.kind) {
      case CspSampleInfo::Positivity:
        smp.coeffs[0] = Rat(-1);
        smp.label = -1;
        break;
      case CspSampleInfo::NonNegativity:
        smp.coeffs[0] = lay.delta;
        smp.coeffs[1 + static_cast<std::size_t>(
                       lay.coord_offset[static_cast<std::size_t>(info.constraint)] +
                       info.accepting)] = Rat(1);
        smp.label = 1;
        break;
      case CspSampleInfo::Satisfiability: {
        smp.coeffs[0] = lay.delta - 1;
        const auto& con = L.constraints[static_cast<std::size_t>(info.constraint)];
        for (std::size_t f = 0; f < con.accepting.size(); ++f)
          smp.coeffs[1 + static_cast<std::size_t>(
                         lay.coord_offset[static_cast<std::size_t>(info.constraint)]) + f] = Rat(1);
        smp.label = 1;
        break;
      }
      case CspSampleInfo::Selection: {
        smp.coeffs[0] = -lay.delta;
        for (int c = 0; c < static_cast<int>(L.constraints.size()); ++c) {
          const auto& con = L.constraints[static_cast<std::size_t>(c)];
          int slot = -1;
          for (int s_i = 0; s_i < lay.k; ++s_i)
            if (con.scope[static_cast<std::size_t>(s_i)] == info.variable) { slot = s_i; break; }
          if (slot < 0) continue;
          for (std::size_t f = 0; f < con.accepting.size(); ++f)
            if (con.accepting[f][static_cast<std::size_t>(slot)] == info.label)
              smp.coeffs[1 + static_cast<std::size_t>(lay.coord_offset[static_cast<std::size_t>(c)]) + f] = Rat(1);
        }
        smp.label = -1;
        break;
      }
    }
    rows.push_back(std::move(smp));
  }
  return rows;
}

inline bool csp_opt_zero_one_at_most(const CspInstance& L, const Rat& theta) {
  return opt_zero_one_at_most(csp_exact_rows(L), theta);
}

inline ReductionInstance reduce_csp(
    const CspInstance& L, double nu,
    std::optional<std::vector<int>> assignment_hint = std::nullopt) {
  if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("reduce_csp: need 0 < nu < 1");
  {
    const auto violations = validate_csp(L);
    if (!violations.empty())
      throw std::invalid_argument("reduce_csp: invalid instance: " + violations.front());
  }
  const auto lay = csp_detail::layout(L);
  const auto layout_v = csp_sample_layout(L);
  const auto masses = csp_sample_masses(L);
  const auto exact_rows = csp_exact_rows(L);

  ReductionInstance R;
  const std::size_t N = layout_v.size();
  const int d = static_cast<int>(lay.n) + 1;
  const double s_f = static_cast<double>(lay.s);
  R.dataset.dim = d;
  R.dataset.X = Matrix::Zero(static_cast<Eigen::Index>(N), d);
  R.dataset.y = Vector::Zero(static_cast<Eigen::Index>(N));
  R.dataset.p = Vector::Zero(static_cast<Eigen::Index>(N));
  R.exact_mass = masses;

  for (std::size_t idx = 0; idx < N; ++idx) {
    const auto r = static_cast<Eigen::Index>(idx);
    const auto& row = exact_rows[idx];
    if (layout_v[idx].kind == CspSampleInfo::Positivity) {
      R.dataset.X(r, 0) = -1.0;  // the positivity sample is not scaled by 1/s
    } else {
      for (std::size_t j = 0; j < row.coeffs.size(); ++j)
        if (row.coeffs[j] != 0)
          R.dataset.X(r, static_cast<Eigen::Index>(j)) = rat_to_double(row.coeffs[j]) / s_f;
    }
    R.dataset.y(r) = row.label;
    R.dataset.p(r) = rat_to_double(masses[idx]);
    if (R.dataset.X.row(r).norm() > 1.0 + 1e-12)
      throw std::logic_error("reduce_csp: sample escaped the unit ball");
  }

  const double zeta = std::sqrt(rat_to_double(lay.zeta_sq));
  const double delta_f = rat_to_double(lay.delta);
  R.gamma = zeta * delta_f / s_f;
  R.kappa = rat_to_double(lay.kappa);
  R.alpha = std::pow(1.0 / nu, 1.0 / static_cast<double>(lay.k)) /
            (40.0 * static_cast<double>(lay.k));
  R.epsilon = R.kappa * R.alpha;

  const Rat alpha_rat = rat_from_double(R.alpha);
  R.exact_params["Z"] = rat_str(Rat(lay.Z));
  R.exact_params["delta"] = rat_str(lay.delta);
  R.exact_params["s"] = rat_str(Rat(lay.s));
  R.exact_params["kappa"] = rat_str(lay.kappa);
  R.exact_params["zeta_squared"] = rat_str(lay.zeta_sq);
  R.exact_params["gamma_squared"] =
      rat_str(lay.zeta_sq * lay.delta * lay.delta / (Rat(lay.s) * Rat(lay.s)));
  R.exact_params["alpha"] = rat_str(alpha_rat);
  R.exact_params["epsilon"] = rat_str(lay.kappa * alpha_rat);
  R.exact_params["non_negativity_mass_each"] = rat_str(Rat(2 * BigInt(lay.k), lay.Z));
  R.exact_params["satisfiability_mass_each"] = rat_str(Rat(2 * BigInt(lay.k), lay.Z));
  R.exact_params["selection_mass_each"] = rat_str(Rat(BigInt(1), lay.Z));
  if (R.alpha <= 1.0) R.flags.push_back("degenerate_gap");

  std::optional<std::vector<int>> phi = std::move(assignment_hint);
  if (phi) {
    if (csp_value(L, *phi) != 1.0)
      throw std::invalid_argument("reduce_csp: hint does not satisfy the instance");
  } else {
    phi = find_satisfying_assignment(L);
  }
  if (phi) {
    Vector w = Vector::Zero(d);
    w(0) = zeta;
    for (std::size_t c = 0; c < L.constraints.size(); ++c) {
      const auto& con = L.constraints[c];
      std::vector<int> restricted;
      restricted.reserve(con.scope.size());
      for (int v : con.scope) restricted.push_back((*phi)[static_cast<std::size_t>(v)]);
      for (std::size_t f = 0; f < con.accepting.size(); ++f)
        if (con.accepting[f] == restricted)
          w(1 + static_cast<Eigen::Index>(lay.coord_offset[c]) + static_cast<Eigen::Index>(f)) = zeta;
    }
    R.certificate = Halfspace{w};
    R.has_certificate = true;
    std::ostringstream os;
    for (std::size_t v = 0; v < phi->size(); ++v) os << (v ? "," : "") << (*phi)[v];
    R.exact_params["certificate_assignment"] = os.str();
  }
  return R;
}

// Exact certificate audit in pure rationals: u = y <w_phi, x> * s / zeta is
// rational for every sample; the margin threshold is u >= delta.
struct CspCertificateCheck {
  Rat mass_total;
  Rat margin_gamma_error;
  Rat zero_one_error;
  Rat kappa;
  bool noerror_margins_at_least_gamma = true;
};

inline CspCertificateCheck csp_certificate_check(const CspInstance& L,
                                                 const std::vector<int>& phi) {
  if (phi.size() != L.variables.size())
    throw std::invalid_argument("csp_certificate_check: assignment size mismatch");
  const auto lay = csp_detail::layout(L);
  const auto layout_v = csp_sample_layout(L);
  const auto masses = csp_sample_masses(L);

  // Restriction match per constraint.
  std::vector<int> matched(L.constraints.size(), -1);  // accepting index of phi|_S or -1
  for (std::size_t c = 0; c < L.constraints.size(); ++c) {
    const auto& con = L.constraints[c];
    std::vector<int> restricted;
    restricted.reserve(con.scope.size());
    for (int v : con.scope) restricted.push_back(phi[static_cast<std::size_t>(v)]);
    for (std::size_t f = 0; f < con.accepting.size(); ++f)
      if (con.accepting[f] == restricted) { matched[c] = static_cast<int>(f); break; }
  }

  CspCertificateCheck out;
  out.mass_total = 0;
  out.margin_gamma_error = 0;
  out.zero_one_error = 0;
  out.kappa = lay.kappa;

  for (std::size_t idx = 0; idx < layout_v.size(); ++idx) {
    const auto& info = layout_v[idx];
    Rat u;  // y <w, x> * s / zeta
    int label = 1;
    switch (info.kind) {
      case CspSampleInfo::Positivity:
        u = Rat(lay.s);
        label = -1;
        break;
      case CspSampleInfo::NonNegativity:
        u = lay.delta + (matched[static_cast<std::size_t>(info.constraint)] == info.accepting
                             ? Rat(1) : Rat(0));
        break;
      case CspSampleInfo::Satisfiability:
        u = lay.delta - 1 + (matched[static_cast<std::size_t>(info.constraint)] >= 0
                                 ? Rat(1) : Rat(0));
        break;
      case CspSampleInfo::Selection: {
        // Sum over S containing v of [phi|_S accepting and phi(v) = sigma].
        Rat cnt = 0;
        if (phi[static_cast<std::size_t>(info.variable)] == info.label) {
          for (std::size_t c = 0; c < L.constraints.size(); ++c) {
            if (matched[c] < 0) continue;
            for (int v : L.constraints[c].scope)
              if (v == info.variable) { cnt += 1; break; }
          }
        }
        u = lay.delta - cnt;
        label = -1;
        break;
      }
    }
    const bool margin_err = u < lay.delta;
    const bool zo_err = (label > 0) ? (u < 0) : (u <= 0);
    out.mass_total += masses[idx];
    if (margin_err) out.margin_gamma_error += masses[idx];
    if (zo_err) out.zero_one_error += masses[idx];
    if (!zo_err && margin_err) out.noerror_margins_at_least_gamma = false;
  }
  return out;
}

// Decode an assignment from a halfspace per the soundness argument: scale so
// w_* = 1, repair violated non-negativity rows to zero and violated
// satisfiability rows by raising the first accepting weight to the deficit,
// then pick phi(v) uniformly (seeded) from the labels whose selection
// constraint the repaired vector violates.
struct DecodeResult {
  std::vector<int> assignment;
  std::vector<std::string> flags;
  std::vector<std::vector<int>> selection_sets;  // L_v per variable
};

inline DecodeResult decode_assignment(const CspInstance& L, const ReductionInstance& R,
                                      const Vector& w_in, std::uint64_t seed = 0) {
  const auto lay = csp_detail::layout(L);
  const int d = static_cast<int>(lay.n) + 1;
  if (w_in.size() != d) throw std::invalid_argument("decode_assignment: dimension mismatch");
  if (R.dataset.dim != d) throw std::invalid_argument("decode_assignment: instance mismatch");
  if (!(w_in(0) > 0.0))
    throw std::invalid_argument("decode_assignment: positivity violated (w_* <= 0 has error >= 1/2)");

  Vector w = w_in / w_in(0);  // w_* = 1
  const double delta_f = rat_to_double(lay.delta);

  // Repair non-negativity: w_{(S,f)} + delta < 0 -> zero the coordinate.
  for (Eigen::Index j = 1; j < d; ++j)
    if (w(j) + delta_f < 0.0) w(j) = 0.0;
  // Repair satisfiability: raise the first accepting weight by the deficit.
  for (std::size_t c = 0; c < L.constraints.size(); ++c) {
    const auto off = 1 + static_cast<Eigen::Index>(lay.coord_offset[c]);
    const auto cnt = static_cast<Eigen::Index>(L.constraints[c].accepting.size());
    const double total = w.segment(off, cnt).sum();
    const double target = 1.0 - delta_f;
    if (total < target) w(off) += target - total;
  }

  DecodeResult out;
  out.selection_sets.assign(L.variables.size(), {});
  std::mt19937_64 rng(seed);
  for (int v = 0; v < static_cast<int>(L.variables.size()); ++v) {
    auto& Lv = out.selection_sets[static_cast<std::size_t>(v)];
    for (int a = 0; a < static_cast<int>(L.alphabet.size()); ++a) {
      // Selection sample (v, a) misclassified <=> sum of matching weights >= delta.
      double sum = 0.0;
      for (std::size_t c = 0; c < L.constraints.size(); ++c) {
        const auto& con = L.constraints[c];
        int slot = -1;
        for (int s_i = 0; s_i < lay.k; ++s_i)
          if (con.scope[static_cast<std::size_t>(s_i)] == v) { slot = s_i; break; }
        if (slot < 0) continue;
        for (std::size_t f = 0; f < con.accepting.size(); ++f)
          if (con.accepting[f][static_cast<std::size_t>(slot)] == a)
            sum += w(1 + static_cast<Eigen::Index>(lay.coord_offset[c]) + static_cast<Eigen::Index>(f));
      }
      if (sum >= delta_f) Lv.push_back(a);
    }
    if (Lv.empty()) {
      out.assignment.push_back(0);
      if (out.flags.empty() || out.flags.back() != "empty_selection_set")
        out.flags.push_back("empty_selection_set");
    } else {
      out.assignment.push_back(Lv[static_cast<std::size_t>(rng() % Lv.size())]);
    }
  }
  return out;
}

}  // namespace margin
