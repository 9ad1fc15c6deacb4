// Variable elimination over binary noisy-OR networks.
//
// Each vertex contributes one factor; vertices with more than three parents
// are decomposed into a chain of auxiliary OR variables so that factor scopes
// stay at three variables. The elimination order is greedy min-fill with
// min-degree and lowest-id tie breaks. Every eliminated variable leaves a
// clique behind; cliques linked through their outgoing messages form a tree
// (a forest over disconnected components), and a second, top-down pass over
// that tree produces every requested marginal without re-running elimination.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <tuple>

#include "netdiag/bayes.hpp"
#include "netdiag/error.hpp"

namespace netdiag {

namespace {

using Var = std::uint32_t;

constexpr std::size_t kMaxDirectParents = 3;
constexpr std::size_t kMaxCliqueVars = 22;

struct Factor {
  std::vector<Var> vars;  // ascending
  std::vector<double> table;  // bit j of the index is the state of vars[j], 1 = down
};

Factor ones(std::vector<Var> vars) {
  Factor f;
  const std::size_t size = std::size_t{1} << vars.size();
  f.vars = std::move(vars);
  f.table.assign(size, 1.0);
  return f;
}

std::vector<Var> merge_vars(const std::vector<Var>& a, const std::vector<Var>& b) {
  std::vector<Var> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// For each var of `outer`, the bit it occupies in `inner` (0 if absent).
std::vector<std::size_t> strides(const std::vector<Var>& outer, const std::vector<Var>& inner) {
  std::vector<std::size_t> s(outer.size(), 0);
  std::size_t p = 0;
  for (std::size_t j = 0; j < outer.size() && p < inner.size(); ++j) {
    if (outer[j] == inner[p]) s[j] = std::size_t{1} << p++;
  }
  return s;
}

Factor product(const Factor& a, const Factor& b) {
  Factor out;
  out.vars = merge_vars(a.vars, b.vars);
  if (out.vars.size() > kMaxCliqueVars) {
    fail(Errc::size, "inference clique of " + std::to_string(out.vars.size()) +
                         " variables exceeds the limit of " + std::to_string(kMaxCliqueVars));
  }
  const auto sa = strides(out.vars, a.vars);
  const auto sb = strides(out.vars, b.vars);
  const std::size_t size = std::size_t{1} << out.vars.size();
  out.table.resize(size);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t ia = 0;
    std::size_t ib = 0;
    for (std::size_t j = 0; j < out.vars.size(); ++j) {
      if ((idx >> j) & 1) {
        ia += sa[j];
        ib += sb[j];
      }
    }
    out.table[idx] = a.table[ia] * b.table[ib];
  }
  return out;
}

// Sums `f` down onto `keep`, which must be a subset of f.vars.
Factor marginalize(const Factor& f, std::vector<Var> keep) {
  Factor out;
  const auto s = strides(f.vars, keep);
  out.table.assign(std::size_t{1} << keep.size(), 0.0);
  out.vars = std::move(keep);
  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    std::size_t r = 0;
    for (std::size_t j = 0; j < f.vars.size(); ++j) {
      if ((idx >> j) & 1) r += s[j];
    }
    out.table[r] += f.table[idx];
  }
  return out;
}

Factor restrict_var(const Factor& f, Var x, int state) {
  const auto pos = static_cast<std::size_t>(
      std::find(f.vars.begin(), f.vars.end(), x) - f.vars.begin());
  Factor out;
  for (std::size_t j = 0; j < f.vars.size(); ++j) {
    if (j != pos) out.vars.push_back(f.vars[j]);
  }
  out.table.resize(std::size_t{1} << out.vars.size());
  for (std::size_t r = 0; r < out.table.size(); ++r) {
    const std::size_t low = r & ((std::size_t{1} << pos) - 1);
    const std::size_t high = (r >> pos) << (pos + 1);
    out.table[r] = f.table[high | (static_cast<std::size_t>(state) << pos) | low];
  }
  return out;
}

double total(const Factor& f) {
  double s = 0.0;
  for (double v : f.table) s += v;
  return s;
}

// Noisy-OR factor over target and up to kMaxDirectParents parents. `carry`
// is an optional parent that forces the target down (the previous chain link).
Factor or_factor(Var target, double leak, const std::vector<std::pair<Var, double>>& parents) {
  std::vector<Var> vars{target};
  for (const auto& [p, q] : parents) vars.push_back(p);
  std::sort(vars.begin(), vars.end());
  Factor f = ones(vars);
  for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
    double up = 1.0 - leak;
    bool target_down = false;
    for (std::size_t j = 0; j < vars.size(); ++j) {
      const bool down = (idx >> j) & 1;
      if (vars[j] == target) {
        target_down = down;
        continue;
      }
      if (!down) continue;
      for (const auto& [p, q] : parents) {
        if (p == vars[j]) up *= q;
      }
    }
    f.table[idx] = target_down ? 1.0 - up : up;
  }
  return f;
}

struct Problem {
  std::vector<Factor> factors;
  std::vector<std::string> names;  // per variable, for diagnostics
  std::vector<int> observed;       // -1 unobserved, else observed state
  double log_constant = 0.0;
};

Problem build_problem(const BayesianNetwork& bn, const Evidence& evidence,
                      const std::vector<std::size_t>& queries) {
  const std::size_t n = bn.size();
  Problem pb;
  pb.observed.assign(n, -1);
  std::vector<const Likelihood*> soft(n, nullptr);
  for (const auto& [label, s] : evidence.hard()) pb.observed[bn.index_of(label)] = static_cast<int>(s);
  for (const auto& [label, l] : evidence.soft()) soft[bn.index_of(label)] = &l;

  // Only ancestors of evidence and queries matter; everything else sums to one.
  std::vector<bool> relevant(n, false);
  std::vector<std::size_t> stack(queries.begin(), queries.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (pb.observed[i] >= 0 || soft[i]) stack.push_back(i);
  }
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    if (relevant[v]) continue;
    relevant[v] = true;
    for (auto p : bn.vertex(v).parents) stack.push_back(p);
  }

  pb.names.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pb.names.push_back(bn.vertex(i).label);

  for (std::size_t v = 0; v < n; ++v) {
    if (!relevant[v]) continue;
    const auto& bv = bn.vertex(v);
    std::vector<std::pair<Var, double>> parents;
    for (std::size_t k = 0; k < bv.parents.size(); ++k) {
      parents.emplace_back(static_cast<Var>(bv.parents[k]), bv.cpt.inhibition[k]);
    }
    if (parents.size() <= kMaxDirectParents) {
      pb.factors.push_back(or_factor(static_cast<Var>(v), bv.cpt.leak, parents));
    } else {
      // Chain: z_1 = leak OR p_1, z_j = z_{j-1} OR p_j, ..., v = z_{m-1} OR p_m.
      std::optional<Var> carry;
      for (std::size_t k = 0; k < parents.size(); ++k) {
        Var target = static_cast<Var>(v);
        if (k + 1 < parents.size()) {
          target = static_cast<Var>(pb.names.size());
          pb.names.push_back(bv.label + "~" + std::to_string(k + 1));
          pb.observed.push_back(-1);
        }
        std::vector<std::pair<Var, double>> step{parents[k]};
        if (carry) step.emplace_back(*carry, 0.0);
        pb.factors.push_back(or_factor(target, carry ? 0.0 : bv.cpt.leak, step));
        carry = target;
      }
    }
    if (soft[v]) pb.factors.push_back({{static_cast<Var>(v)}, {soft[v]->up, soft[v]->down}});
  }

  std::vector<Factor> reduced;
  reduced.reserve(pb.factors.size());
  for (auto& f : pb.factors) {
    Factor g = std::move(f);
    for (std::size_t j = g.vars.size(); j-- > 0;) {
      const Var x = g.vars[j];
      if (pb.observed[x] >= 0) g = restrict_var(g, x, pb.observed[x]);
    }
    if (g.vars.empty()) {
      if (!(g.table[0] > 0.0)) {
        fail(Errc::contradiction, "evidence has zero probability under the model");
      }
      pb.log_constant += std::log(g.table[0]);
    } else {
      reduced.push_back(std::move(g));
    }
  }
  pb.factors = std::move(reduced);
  return pb;
}

std::vector<Var> elimination_order(const Problem& pb) {
  const std::size_t n = pb.names.size();
  std::vector<std::vector<Var>> adj(n);
  std::vector<bool> present(n, false);
  for (const auto& f : pb.factors) {
    for (auto a : f.vars) {
      present[a] = true;
      for (auto b : f.vars) {
        if (a != b) adj[a].push_back(b);
      }
    }
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  const auto connected = [&](Var a, Var b) {
    return std::binary_search(adj[a].begin(), adj[a].end(), b);
  };
  const auto fill_in = [&](Var v) {
    std::size_t fill = 0;
    const auto& nb = adj[v];
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) {
        if (!connected(nb[i], nb[j])) ++fill;
      }
    }
    return fill;
  };

  using Key = std::tuple<std::size_t, std::size_t, Var>;
  std::set<Key> queue;
  std::vector<Key> key_of(n);
  for (Var v = 0; v < n; ++v) {
    if (!present[v]) continue;
    key_of[v] = {fill_in(v), adj[v].size(), v};
    queue.insert(key_of[v]);
  }

  std::vector<Var> order;
  while (!queue.empty()) {
    const Var v = std::get<2>(*queue.begin());
    queue.erase(queue.begin());
    order.push_back(v);
    const auto nb = adj[v];
    for (auto a : nb) {
      auto& la = adj[a];
      la.erase(std::lower_bound(la.begin(), la.end(), v));
      for (auto b : nb) {
        if (a == b) continue;
        auto it = std::lower_bound(la.begin(), la.end(), b);
        if (it == la.end() || *it != b) la.insert(it, b);
      }
    }
    adj[v].clear();
    for (auto a : nb) {
      queue.erase(key_of[a]);
      key_of[a] = {fill_in(a), adj[a].size(), a};
      queue.insert(key_of[a]);
    }
  }
  return order;
}

struct Clique {
  Var var = 0;
  Factor potential;  // original factors, over the full clique scope
  std::vector<std::size_t> children;
  std::optional<std::size_t> parent;
  Factor up;    // normalized message to the parent
  Factor down;  // normalized message from the parent
};

struct Solution {
  double log_z = 0.0;
  std::vector<double> p_down;  // per requested variable
};

Solution solve(const Problem& pb, const std::vector<Var>& wanted) {
  Solution sol;
  sol.log_z = pb.log_constant;

  struct Entry {
    Factor f;
    std::optional<std::size_t> source;  // clique that produced a message
    bool alive = true;
  };
  std::vector<Entry> pool;
  std::vector<std::vector<std::size_t>> entries_of(pb.names.size());
  const auto push = [&](Factor f, std::optional<std::size_t> source) {
    for (auto x : f.vars) entries_of[x].push_back(pool.size());
    pool.push_back({std::move(f), source, true});
  };
  for (const auto& f : pb.factors) push(f, std::nullopt);

  std::vector<Clique> cliques;
  std::vector<std::size_t> clique_of(pb.names.size(), SIZE_MAX);
  for (const Var x : elimination_order(pb)) {
    Clique c;
    c.var = x;
    std::vector<Var> scope;
    std::vector<std::size_t> taken;
    for (auto e : entries_of[x]) {
      if (!pool[e].alive) continue;
      pool[e].alive = false;
      taken.push_back(e);
      scope = merge_vars(scope, pool[e].f.vars);
    }
    if (scope.size() > kMaxCliqueVars) {
      fail(Errc::size, "eliminating '" + pb.names[x] + "' creates a clique of " +
                           std::to_string(scope.size()) + " variables");
    }
    c.potential = ones(scope);
    Factor full = c.potential;
    for (auto e : taken) {
      if (pool[e].source) {
        c.children.push_back(*pool[e].source);
        cliques[*pool[e].source].parent = cliques.size();
      } else {
        c.potential = product(c.potential, pool[e].f);
      }
      full = product(full, pool[e].f);
    }
    std::vector<Var> sep;
    for (auto v : scope) {
      if (v != x) sep.push_back(v);
    }
    c.up = marginalize(full, sep);
    const double mass = total(c.up);
    if (!(mass > 0.0)) {
      fail(Errc::contradiction,
           "evidence has zero probability (detected while eliminating '" + pb.names[x] + "')");
    }
    for (auto& v : c.up.table) v /= mass;
    sol.log_z += std::log(mass);
    clique_of[x] = cliques.size();
    const bool root = sep.empty();
    cliques.push_back(std::move(c));
    if (!root) push(cliques.back().up, cliques.size() - 1);
  }

  if (wanted.empty()) return sol;

  // Top-down pass: parents were created after their children.
  std::vector<Factor> belief(cliques.size());
  for (std::size_t ci = cliques.size(); ci-- > 0;) {
    auto& c = cliques[ci];
    Factor base = c.potential;
    if (c.parent) base = product(base, c.down);
    const auto m = c.children.size();
    std::vector<Factor> prefix{base};
    prefix.reserve(m + 1);
    for (std::size_t i = 0; i < m; ++i) prefix.push_back(product(prefix.back(), cliques[c.children[i]].up));
    Factor suffix = ones(c.potential.vars);
    for (std::size_t i = m; i-- > 0;) {
      auto& child = cliques[c.children[i]];
      Factor msg = marginalize(product(prefix[i], suffix), child.up.vars);
      const double s = total(msg);
      if (s > 0.0) {
        for (auto& v : msg.table) v /= s;
      }
      child.down = std::move(msg);
      suffix = product(suffix, child.up);
    }
    belief[ci] = std::move(prefix.back());
  }

  for (const Var x : wanted) {
    const auto ci = clique_of[x];
    const auto m = marginalize(belief[ci], {x});
    const double s = m.table[0] + m.table[1];
    if (!(s > 0.0)) {
      fail(Errc::contradiction, "evidence has zero probability (belief of '" + pb.names[x] + "')");
    }
    sol.p_down.push_back(m.table[1] / s);
  }
  return sol;
}

}  // namespace

Marginals eliminate_variables(const BayesianNetwork& bn, const Evidence& evidence,
                              const std::vector<std::string>& queries) {
  std::vector<std::size_t> query_idx;
  for (const auto& q : queries) query_idx.push_back(bn.index_of(q));
  const auto pb = build_problem(bn, evidence, query_idx);

  std::vector<Var> wanted;
  for (auto q : query_idx) {
    if (pb.observed[q] < 0) wanted.push_back(static_cast<Var>(q));
  }
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
  const auto sol = solve(pb, wanted);

  Marginals out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto q = query_idx[i];
    if (pb.observed[q] >= 0) {
      out[queries[i]] = pb.observed[q] == static_cast<int>(State::Down) ? 1.0 : 0.0;
    } else {
      const auto pos = std::lower_bound(wanted.begin(), wanted.end(), static_cast<Var>(q)) - wanted.begin();
      out[queries[i]] = sol.p_down[static_cast<std::size_t>(pos)];
    }
  }
  return out;
}

double log_evidence_probability(const BayesianNetwork& bn, const Evidence& evidence) {
  const auto pb = build_problem(bn, evidence, {});
  return solve(pb, {}).log_z;
}

}  // namespace netdiag
