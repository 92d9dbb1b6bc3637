#ifndef SHIFTAUDIT_CAUSAL_GRAPH_HPP
#define SHIFTAUDIT_CAUSAL_GRAPH_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "shiftaudit/errors.hpp"

namespace shiftaudit {

enum class NodeRole { Environment, Attribute, Covariate, Outcome, Auxiliary };

inline const char* role_name(NodeRole r) {
  switch (r) {
    case NodeRole::Environment: return "env";
    case NodeRole::Attribute: return "attr";
    case NodeRole::Covariate: return "cov";
    case NodeRole::Outcome: return "out";
    case NodeRole::Auxiliary: return "aux";
  }
  return "?";
}

inline NodeRole role_from_name(const std::string& s) {
  if (s == "env") return NodeRole::Environment;
  if (s == "attr") return NodeRole::Attribute;
  if (s == "cov") return NodeRole::Covariate;
  if (s == "out") return NodeRole::Outcome;
  if (s == "aux") return NodeRole::Auxiliary;
  fail(errc::parse_error, "unknown node role '" + s + "'");
}

struct NodeDef {
  std::string name;
  NodeRole role = NodeRole::Covariate;
  bool observed = true;
};

enum class FairnessCriterion { DemographicParity, EqualizedOdds };

inline const char* criterion_name(FairnessCriterion c) {
  return c == FairnessCriterion::DemographicParity ? "demographic_parity" : "equalized_odds";
}

// Validated DAG over named, role-tagged nodes. Construction via build_graph is
// the only path to an instance; all queries are const, so values are freely
// shareable across threads.
class CausalGraph {
 public:
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const NodeDef& node(int i) const { return nodes_[static_cast<size_t>(i)]; }
  const std::vector<NodeDef>& nodes() const { return nodes_; }

  bool has_node(const std::string& name) const { return index_.count(name) > 0; }

  int index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) fail(errc::unknown_node, "no node named '" + name + "'");
    return it->second;
  }

  const std::vector<int>& parents(int i) const { return parents_[static_cast<size_t>(i)]; }
  const std::vector<int>& children(int i) const { return children_[static_cast<size_t>(i)]; }

  bool has_edge(int parent, int child) const {
    const auto& cs = children_[static_cast<size_t>(parent)];
    return std::find(cs.begin(), cs.end(), child) != cs.end();
  }

  int environment_index() const { return env_; }
  int outcome_index() const { return outcome_; }
  const std::string& environment_name() const { return nodes_[static_cast<size_t>(env_)].name; }
  const std::string& outcome_name() const { return nodes_[static_cast<size_t>(outcome_)].name; }

  std::vector<std::string> attribute_names() const {
    std::vector<std::string> out;
    for (const auto& n : nodes_)
      if (n.role == NodeRole::Attribute) out.push_back(n.name);
    return out;
  }

  std::vector<std::pair<std::string, std::string>> edges() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (int p = 0; p < node_count(); ++p)
      for (int c : children_[static_cast<size_t>(p)])
        out.emplace_back(nodes_[static_cast<size_t>(p)].name, nodes_[static_cast<size_t>(c)].name);
    return out;
  }

  // Descendants of i, excluding i itself.
  std::vector<int> descendants(int i) const {
    std::vector<char> seen(nodes_.size(), 0);
    std::deque<int> queue{i};
    while (!queue.empty()) {
      int m = queue.front();
      queue.pop_front();
      for (int c : children_[static_cast<size_t>(m)]) {
        if (!seen[static_cast<size_t>(c)]) {
          seen[static_cast<size_t>(c)] = 1;
          queue.push_back(c);
        }
      }
    }
    std::vector<int> out;
    for (int j = 0; j < node_count(); ++j)
      if (seen[static_cast<size_t>(j)] && j != i) out.push_back(j);
    return out;
  }

  friend CausalGraph build_graph(std::vector<NodeDef> nodes,
                                 std::vector<std::pair<std::string, std::string>> edges);

 private:
  CausalGraph() = default;

  std::vector<NodeDef> nodes_;
  std::map<std::string, int> index_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  int env_ = -1;
  int outcome_ = -1;
};

inline CausalGraph build_graph(std::vector<NodeDef> nodes,
                               std::vector<std::pair<std::string, std::string>> edges) {
  CausalGraph g;
  g.nodes_ = std::move(nodes);
  for (int i = 0; i < g.node_count(); ++i) {
    const auto& n = g.nodes_[static_cast<size_t>(i)];
    if (!g.index_.emplace(n.name, i).second)
      fail(errc::duplicate_node, "node '" + n.name + "' declared twice");
    if (n.role == NodeRole::Environment) {
      if (g.env_ >= 0) fail(errc::multiple_environment_nodes, "second environment node '" + n.name + "'");
      g.env_ = i;
    }
    if (n.role == NodeRole::Outcome) {
      if (g.outcome_ >= 0) fail(errc::multiple_outcome_nodes, "second outcome node '" + n.name + "'");
      g.outcome_ = i;
    }
  }
  if (g.env_ < 0) fail(errc::missing_environment_node, "graph declares no environment node");
  if (g.outcome_ < 0) fail(errc::missing_outcome_node, "graph declares no outcome node");

  g.parents_.assign(g.nodes_.size(), {});
  g.children_.assign(g.nodes_.size(), {});
  for (const auto& [pname, cname] : edges) {
    auto pit = g.index_.find(pname);
    auto cit = g.index_.find(cname);
    if (pit == g.index_.end()) fail(errc::unknown_endpoint, "edge parent '" + pname + "' is not a node");
    if (cit == g.index_.end()) fail(errc::unknown_endpoint, "edge child '" + cname + "' is not a node");
    if (g.has_edge(pit->second, cit->second)) continue;  // duplicate edges collapse
    g.children_[static_cast<size_t>(pit->second)].push_back(cit->second);
    g.parents_[static_cast<size_t>(cit->second)].push_back(pit->second);
  }
  if (!g.parents_[static_cast<size_t>(g.env_)].empty())
    fail(errc::environment_has_parents, "environment node '" + g.environment_name() + "' must be exogenous");

  // Kahn's algorithm; leftover nodes sit on a cycle.
  std::vector<int> indeg(g.nodes_.size(), 0);
  for (int i = 0; i < g.node_count(); ++i)
    indeg[static_cast<size_t>(i)] = static_cast<int>(g.parents_[static_cast<size_t>(i)].size());
  std::deque<int> ready;
  for (int i = 0; i < g.node_count(); ++i)
    if (indeg[static_cast<size_t>(i)] == 0) ready.push_back(i);
  int emitted = 0;
  while (!ready.empty()) {
    int m = ready.front();
    ready.pop_front();
    ++emitted;
    for (int c : g.children_[static_cast<size_t>(m)])
      if (--indeg[static_cast<size_t>(c)] == 0) ready.push_back(c);
  }
  if (emitted != g.node_count()) fail(errc::cycle_detected, "edge set contains a directed cycle");
  return g;
}

namespace detail {

// d-separation decided by reachability over (node, direction) states,
// after Koller & Friedman's Reachable procedure (alg. 3.1). An optional
// deleted edge supports blocking-set verification without copying the graph.
inline bool d_separated_impl(const CausalGraph& g, int u, int w, const std::vector<char>& in_z,
                             int del_parent = -1, int del_child = -1) {
  const int n = g.node_count();
  auto edge_deleted = [&](int p, int c) { return p == del_parent && c == del_child; };

  // ancestors of Z (inclusive)
  std::vector<char> anc(static_cast<size_t>(n), 0);
  std::deque<int> queue;
  for (int i = 0; i < n; ++i)
    if (in_z[static_cast<size_t>(i)]) {
      anc[static_cast<size_t>(i)] = 1;
      queue.push_back(i);
    }
  while (!queue.empty()) {
    int m = queue.front();
    queue.pop_front();
    for (int p : g.parents(m)) {
      if (edge_deleted(p, m)) continue;
      if (!anc[static_cast<size_t>(p)]) {
        anc[static_cast<size_t>(p)] = 1;
        queue.push_back(p);
      }
    }
  }

  // direction 0: trail arrives from a parent (downward), 1: from a child (upward)
  std::vector<char> visited(static_cast<size_t>(2 * n), 0);
  std::deque<std::pair<int, int>> frontier;
  frontier.emplace_back(u, 1);
  while (!frontier.empty()) {
    auto [m, dir] = frontier.front();
    frontier.pop_front();
    char& v = visited[static_cast<size_t>(2 * m + dir)];
    if (v) continue;
    v = 1;
    if (m == w) return false;

    if (dir == 1) {
      // arrived from below; m cannot be a collider here
      if (!in_z[static_cast<size_t>(m)]) {
        for (int p : g.parents(m))
          if (!edge_deleted(p, m)) frontier.emplace_back(p, 1);
        for (int c : g.children(m))
          if (!edge_deleted(m, c)) frontier.emplace_back(c, 0);
      }
    } else {
      // arrived from above; chains continue unless blocked, colliders need an
      // ancestor of Z at m
      if (!in_z[static_cast<size_t>(m)]) {
        for (int c : g.children(m))
          if (!edge_deleted(m, c)) frontier.emplace_back(c, 0);
      }
      if (anc[static_cast<size_t>(m)]) {
        for (int p : g.parents(m))
          if (!edge_deleted(p, m)) frontier.emplace_back(p, 1);
      }
    }
  }
  return true;
}

inline std::vector<char> z_mask(const CausalGraph& g, const std::vector<std::string>& z, int u, int w) {
  std::vector<char> mask(static_cast<size_t>(g.node_count()), 0);
  for (const auto& name : z) {
    int zi = g.index_of(name);
    if (zi == u || zi == w)
      fail(errc::overlapping_arguments, "conditioning set contains endpoint '" + name + "'");
    mask[static_cast<size_t>(zi)] = 1;
  }
  return mask;
}

}  // namespace detail

inline bool d_separated(const CausalGraph& g, const std::string& u, const std::string& w,
                        const std::vector<std::string>& z = {}) {
  int ui = g.index_of(u);
  int wi = g.index_of(w);
  if (ui == wi) fail(errc::overlapping_arguments, "endpoints coincide ('" + u + "')");
  return detail::d_separated_impl(g, ui, wi, detail::z_mask(g, z, ui, wi));
}

struct BlockingSet {
  std::vector<std::string> nodes;  // sorted by name
  // True when the set d-separates S from the target in the graph with the
  // direct S-edge removed. False marks the best-effort fallback used when an
  // unobserved mediator makes every observed set fail.
  bool verified = true;
};

// Variables conditioned on to isolate the direct effect of the environment on
// `node`: the observed parents of `node` (minus S) when they verify, otherwise
// the smallest observed non-descendant set that does. If nothing verifies the
// observed-parent default is returned unverified, so pipelines can still
// condition on what is available; `require_verified` turns that case into
// NoValidBlockingSet instead.
inline BlockingSet blocking_set(const CausalGraph& g, const std::string& node,
                                bool require_verified = false) {
  const int target = g.index_of(node);
  const int env = g.environment_index();
  if (target == env) fail(errc::node_is_environment, "cannot test the environment node itself");

  auto verify = [&](const std::vector<int>& set_idx) {
    std::vector<char> mask(static_cast<size_t>(g.node_count()), 0);
    for (int i : set_idx) mask[static_cast<size_t>(i)] = 1;
    int del_p = g.has_edge(env, target) ? env : -1;
    int del_c = g.has_edge(env, target) ? target : -1;
    return detail::d_separated_impl(g, env, target, mask, del_p, del_c);
  };
  auto names_of = [&](const std::vector<int>& idx) {
    std::vector<std::string> names;
    names.reserve(idx.size());
    for (int i : idx) names.push_back(g.node(i).name);
    std::sort(names.begin(), names.end());
    return names;
  };

  std::vector<int> base;
  for (int p : g.parents(target))
    if (p != env && g.node(p).observed) base.push_back(p);
  if (verify(base)) return {names_of(base), true};

  // candidate pool: observed non-descendants of the target
  std::vector<int> pool;
  {
    auto desc = g.descendants(target);
    std::vector<char> is_desc(static_cast<size_t>(g.node_count()), 0);
    for (int d : desc) is_desc[static_cast<size_t>(d)] = 1;
    for (int i = 0; i < g.node_count(); ++i) {
      if (i == target || i == env) continue;
      if (is_desc[static_cast<size_t>(i)]) continue;
      if (!g.node(i).observed) continue;
      pool.push_back(i);
    }
  }
  std::sort(pool.begin(), pool.end(),
            [&](int a, int b) { return g.node(a).name < g.node(b).name; });

  if (pool.size() <= 16) {
    // subsets ordered smallest-first, lexicographic within a size
    const size_t m = pool.size();
    for (size_t size = 0; size <= m; ++size) {
      std::vector<size_t> pick(size);
      for (size_t i = 0; i < size; ++i) pick[i] = i;
      bool more = true;
      while (more) {
        std::vector<int> subset;
        subset.reserve(size);
        for (size_t i : pick) subset.push_back(pool[i]);
        if (verify(subset)) return {names_of(subset), true};
        // next combination
        more = false;
        for (size_t i = size; i-- > 0;) {
          if (pick[i] + (size - i) < m) {
            ++pick[i];
            for (size_t j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
            more = true;
            break;
          }
        }
        if (size == 0) break;
      }
    }
  }

  if (require_verified)
    fail(errc::no_valid_blocking_set, "no observed set d-separates '" + g.environment_name() +
                                          "' from '" + node + "' once the direct edge is removed");
  return {names_of(base), false};
}

struct SeparatingSets {
  // All inclusion-maximal valid subsets of the candidate pool, each sorted by
  // name; family sorted by (size desc, lexicographic).
  std::vector<std::vector<std::string>> family;
  FairnessCriterion criterion = FairnessCriterion::DemographicParity;
  bool trivial_predictor = false;  // true iff even the empty set fails
};

// Feature sets a transferably fair predictor may use: V must d-separate the
// outcome from the environment, and every member must itself be shielded from
// the environment given the attribute (plus the outcome for equalized odds).
inline SeparatingSets separating_set(const CausalGraph& g, FairnessCriterion criterion) {
  const std::string env = g.environment_name();
  const std::string outcome = g.outcome_name();
  const auto attrs = g.attribute_names();

  std::vector<std::string> pool;
  for (const auto& n : g.nodes()) {
    if (!n.observed) continue;
    if (n.name == env || n.name == outcome) continue;
    pool.push_back(n.name);
  }
  std::sort(pool.begin(), pool.end());
  if (pool.size() > 16) fail(errc::invalid_spec, "candidate pool too large for exhaustive search");

  auto is_attr = [&](const std::string& v) {
    return std::find(attrs.begin(), attrs.end(), v) != attrs.end();
  };

  auto member_cond = [&](const std::string& v) {
    if (is_attr(v)) return true;  // trivially shielded
    std::vector<std::string> cond = attrs;
    if (criterion == FairnessCriterion::EqualizedOdds) cond.push_back(outcome);
    return d_separated(g, v, env, cond);
  };

  auto outcome_cond = [&](const std::vector<std::string>& v) {
    std::vector<std::string> cond = v;
    if (criterion == FairnessCriterion::EqualizedOdds)
      for (const auto& a : attrs)
        if (std::find(cond.begin(), cond.end(), a) == cond.end()) cond.push_back(a);
    return d_separated(g, outcome, env, cond);
  };

  // member condition is per-node, so precompute
  std::vector<char> member_ok(pool.size(), 0);
  for (size_t i = 0; i < pool.size(); ++i) member_ok[i] = member_cond(pool[i]) ? 1 : 0;

  const size_t m = pool.size();
  std::vector<uint32_t> valid_masks;
  for (uint32_t mask = 0; mask < (1u << m); ++mask) {
    bool members = true;
    for (size_t i = 0; i < m && members; ++i)
      if ((mask >> i) & 1u) members = member_ok[i] != 0;
    if (!members) continue;
    std::vector<std::string> v;
    for (size_t i = 0; i < m; ++i)
      if ((mask >> i) & 1u) v.push_back(pool[i]);
    if (outcome_cond(v)) valid_masks.push_back(mask);
  }

  SeparatingSets out;
  out.criterion = criterion;
  if (valid_masks.empty()) {
    out.trivial_predictor = true;  // even V = {} fails
    return out;
  }
  for (uint32_t a : valid_masks) {
    bool maximal = true;
    for (uint32_t b : valid_masks)
      if (a != b && (a & b) == a) {
        maximal = false;
        break;
      }
    if (maximal) {
      std::vector<std::string> v;
      for (size_t i = 0; i < m; ++i)
        if ((a >> i) & 1u) v.push_back(pool[i]);
      out.family.push_back(std::move(v));
    }
  }
  std::sort(out.family.begin(), out.family.end(),
            [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a < b;
            });
  return out;
}

// The family with attribute nodes stripped from each set.
inline std::vector<std::vector<std::string>> non_attribute_content(const CausalGraph& g,
                                                                   const SeparatingSets& sets) {
  const auto attrs = g.attribute_names();
  std::vector<std::vector<std::string>> out;
  for (const auto& v : sets.family) {
    std::vector<std::string> kept;
    for (const auto& name : v)
      if (std::find(attrs.begin(), attrs.end(), name) == attrs.end()) kept.push_back(name);
    out.push_back(std::move(kept));
  }
  return out;
}

// Rendering convention for the review-table comparison: demographic parity
// reports the full maximal set; equalized odds reports the set without the
// attribute unless the attribute is all that remains.
inline std::vector<std::string> table_entry(const CausalGraph& g, const SeparatingSets& sets) {
  if (sets.family.empty()) return {};
  const auto& primary = sets.family.front();
  if (sets.criterion == FairnessCriterion::DemographicParity) return primary;
  const auto attrs = g.attribute_names();
  std::vector<std::string> stripped;
  for (const auto& name : primary)
    if (std::find(attrs.begin(), attrs.end(), name) == attrs.end()) stripped.push_back(name);
  return stripped.empty() ? primary : stripped;
}

// ---------------------------------------------------------------------------
// Graph-spec text format:
//   nodes: S:env, A:attr, X:cov, Y:out, M:aux:unobserved
//   S -> A
//   A -> Y
// '#' starts a comment line; whitespace is insignificant.

namespace detail {

inline std::string strip_ws(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace detail

inline CausalGraph parse_graph_spec(std::istream& in) {
  std::vector<NodeDef> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
  bool have_nodes = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = detail::strip_ws(line);
    if (s.empty() || s[0] == '#') continue;
    if (!have_nodes) {
      if (s.rfind("nodes:", 0) != 0)
        fail(errc::parse_error, "line " + std::to_string(lineno) + ": expected 'nodes:' header");
      for (const auto& tok : detail::split(s.substr(6), ',')) {
        if (tok.empty()) continue;
        auto parts = detail::split(tok, ':');
        if (parts.size() < 2 || parts.size() > 3 || parts[0].empty())
          fail(errc::parse_error, "line " + std::to_string(lineno) + ": bad node spec '" + tok + "'");
        NodeDef def;
        def.name = parts[0];
        def.role = role_from_name(parts[1]);
        if (parts.size() == 3) {
          if (parts[2] != "unobserved")
            fail(errc::parse_error,
                 "line " + std::to_string(lineno) + ": unknown node flag '" + parts[2] + "'");
          def.observed = false;
        }
        nodes.push_back(std::move(def));
      }
      have_nodes = true;
      continue;
    }
    auto arrow = s.find("->");
    if (arrow == std::string::npos || arrow == 0 || arrow + 2 >= s.size())
      fail(errc::parse_error, "line " + std::to_string(lineno) + ": expected 'parent -> child'");
    edges.emplace_back(s.substr(0, arrow), s.substr(arrow + 2));
  }
  if (!have_nodes) fail(errc::parse_error, "graph spec has no 'nodes:' header");
  return build_graph(std::move(nodes), std::move(edges));
}

inline CausalGraph parse_graph_spec(const std::string& text) {
  std::istringstream in(text);
  return parse_graph_spec(in);
}

inline void format_graph_spec(const CausalGraph& g, std::ostream& out) {
  out << "nodes: ";
  for (int i = 0; i < g.node_count(); ++i) {
    const auto& n = g.node(i);
    if (i) out << ", ";
    out << n.name << ":" << role_name(n.role);
    if (!n.observed) out << ":unobserved";
  }
  out << "\n";
  for (const auto& [p, c] : g.edges()) out << p << " -> " << c << "\n";
}

inline std::string format_graph_spec(const CausalGraph& g) {
  std::ostringstream out;
  format_graph_spec(g, out);
  return out.str();
}

}  // namespace shiftaudit

#endif  // SHIFTAUDIT_CAUSAL_GRAPH_HPP
