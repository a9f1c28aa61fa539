#include "cubealg/model/dimension.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "cubealg/error.hpp"

namespace cubealg::model {

namespace {

struct LevelGraph {
  std::vector<std::string> names;
  std::map<std::string, std::size_t, std::less<>> index;
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::vector<std::size_t>> in;
};

LevelGraph index_levels(const DimensionSchema& schema,
                        std::vector<std::string>* errors) {
  LevelGraph g;
  for (const auto& level : schema.levels) {
    if (g.index.count(level)) {
      if (errors) errors->push_back("duplicate level '" + level + "'");
      continue;
    }
    g.index.emplace(level, g.names.size());
    g.names.push_back(level);
  }
  g.out.resize(g.names.size());
  g.in.resize(g.names.size());
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [from, to] : schema.edges) {
    auto f = g.index.find(from);
    auto t = g.index.find(to);
    if (f == g.index.end() || t == g.index.end()) {
      if (errors) {
        errors->push_back("edge " + from + "->" + to +
                          " references an unknown level");
      }
      continue;
    }
    if (f->second == t->second) {
      if (errors) errors->push_back("self-loop on level '" + from + "'");
      continue;
    }
    if (!seen.insert({f->second, t->second}).second) continue;
    g.out[f->second].push_back(t->second);
    g.in[t->second].push_back(f->second);
  }
  return g;
}

// Kahn's algorithm; empty result means the graph has a cycle.
std::vector<std::size_t> topological_order(const LevelGraph& g) {
  std::vector<std::size_t> indegree(g.names.size());
  for (std::size_t v = 0; v < g.names.size(); ++v) indegree[v] = g.in[v].size();
  std::vector<std::size_t> order;
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < g.names.size(); ++v) {
    if (indegree[v] == 0) ready.push_back(v);
  }
  while (!ready.empty()) {
    std::size_t v = ready.front();
    ready.erase(ready.begin());
    order.push_back(v);
    for (std::size_t w : g.out[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  if (order.size() != g.names.size()) return {};
  return order;
}

// reach[a][b] iff there is a (possibly empty) path a -> b.
std::vector<std::vector<char>> reachability(const LevelGraph& g) {
  std::size_t n = g.names.size();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack{s};
    reach[s][s] = 1;
    while (!stack.empty()) {
      std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t w : g.out[v]) {
        if (!reach[s][w]) {
          reach[s][w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  return reach;
}

std::string join_names(const LevelGraph& g, const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += g.names[v[i]];
  }
  return out;
}

// Emits a warning for every pair of levels without a unique least upper
// bound or greatest lower bound.
void check_lattice(const LevelGraph& g, std::vector<std::string>& warnings) {
  auto reach = reachability(g);
  std::size_t n = g.names.size();
  auto has_extremum = [&](std::size_t x, std::size_t y, bool upper) {
    std::vector<std::size_t> bounds;
    for (std::size_t z = 0; z < n; ++z) {
      bool ok = upper ? (reach[x][z] && reach[y][z])
                      : (reach[z][x] && reach[z][y]);
      if (ok) bounds.push_back(z);
    }
    for (std::size_t c : bounds) {
      bool extremal = std::all_of(bounds.begin(), bounds.end(), [&](auto z) {
        return upper ? reach[c][z] : reach[z][c];
      });
      if (extremal) return true;
    }
    return false;
  };
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      if (!has_extremum(x, y, true)) {
        warnings.push_back("levels '" + g.names[x] + "' and '" + g.names[y] +
                           "' have no unique join");
      }
      if (!has_extremum(x, y, false)) {
        warnings.push_back("levels '" + g.names[x] + "' and '" + g.names[y] +
                           "' have no unique meet");
      }
    }
  }
}

}  // namespace

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (i) out << "; ";
    out << errors[i];
  }
  return out.str();
}

ValidationReport validate_schema(const DimensionSchema& schema) {
  ValidationReport report;
  LevelGraph g = index_levels(schema, &report.errors);
  if (g.names.empty()) {
    report.errors.push_back("schema has no levels");
    return report;
  }
  auto order = topological_order(g);
  if (order.empty()) {
    report.errors.push_back("schema is not acyclic");
    return report;
  }

  std::vector<std::size_t> tops, bottoms;
  for (std::size_t v = 0; v < g.names.size(); ++v) {
    if (g.out[v].empty()) tops.push_back(v);
    if (g.in[v].empty()) bottoms.push_back(v);
  }
  if (tops.size() != 1) {
    report.errors.push_back("non-unique All: top nodes " + join_names(g, tops));
  } else if (g.names[tops[0]] != kAllLevel) {
    report.errors.push_back("top node '" + g.names[tops[0]] +
                            "' must be named All");
  }
  if (bottoms.size() != 1) {
    report.errors.push_back("non-unique Bottom: bottom nodes " +
                            join_names(g, bottoms));
  } else if (g.names[bottoms[0]] == kAllLevel) {
    report.errors.push_back("schema has no level below All");
  }
  if (!report.ok()) return report;

  // Every maximal path must run Bottom -> All: each level lies between them.
  auto reach = reachability(g);
  std::size_t bottom = bottoms[0], top = tops[0];
  for (std::size_t v = 0; v < g.names.size(); ++v) {
    if (!reach[bottom][v] || !reach[v][top]) {
      report.errors.push_back("level '" + g.names[v] +
                              "' is not on a path from Bottom to All");
    }
  }
  check_lattice(g, report.warnings);
  return report;
}

std::vector<Hierarchy> hierarchies(const DimensionSchema& schema) {
  LevelGraph g = index_levels(schema, nullptr);
  std::size_t bottom = 0;
  for (std::size_t v = 0; v < g.names.size(); ++v) {
    if (g.in[v].empty()) bottom = v;
  }
  for (auto& outs : g.out) std::sort(outs.begin(), outs.end());
  std::vector<Hierarchy> result;
  std::vector<std::size_t> path{bottom};
  auto walk = [&](auto&& self) -> void {
    std::size_t v = path.back();
    if (g.out[v].empty()) {
      Hierarchy h;
      for (std::size_t l : path) h.path.push_back(g.names[l]);
      result.push_back(std::move(h));
      return;
    }
    for (std::size_t w : g.out[v]) {
      path.push_back(w);
      self(self);
      path.pop_back();
    }
  };
  if (!g.names.empty()) walk(walk);
  return result;
}

DimensionGraph::DimensionGraph(DimensionInstance instance)
    : instance_(std::move(instance)) {
  LevelGraph g = index_levels(instance_.schema, nullptr);
  level_names_ = g.names;
  level_parents_ = g.out;
  std::size_t levels = level_names_.size();
  level_members_.resize(levels);

  bool have_all = false;
  for (std::size_t v = 0; v < levels; ++v) {
    if (g.in[v].empty() && level_names_[v] != kAllLevel) bottom_level_ = v;
    if (level_names_[v] == kAllLevel) {
      all_level_ = v;
      have_all = true;
    }
  }
  if (!have_all) indexing_errors_.push_back("schema has no All level");

  std::map<std::string, MemberId, std::less<>> by_name;
  auto add_member = [&](const std::string& name, LevelId level) {
    MemberId id = members_.size();
    members_.push_back({name, level, {}});
    by_name.emplace(name, id);
    level_members_[level].push_back(id);
  };
  for (const auto& [name, level] : instance_.members) {
    auto l = g.index.find(level);
    if (l == g.index.end()) {
      indexing_errors_.push_back("member '" + name + "' has unknown level '" +
                                 level + "'");
      continue;
    }
    if (by_name.count(name)) {
      indexing_errors_.push_back("duplicate member '" + name + "'");
      continue;
    }
    if (have_all && l->second == all_level_ && name != kAllMember) {
      indexing_errors_.push_back("dom(All) must be {all}, found '" + name +
                                 "'");
      continue;
    }
    if (name == kAllMember && (!have_all || l->second != all_level_)) {
      indexing_errors_.push_back("member 'all' must live at level All");
      continue;
    }
    add_member(name, l->second);
  }
  if (have_all && !by_name.count(kAllMember)) {
    add_member(std::string(kAllMember), all_level_);
  }

  auto has_level_edge = [&](LevelId from, LevelId to) {
    const auto& outs = level_parents_[from];
    return std::find(outs.begin(), outs.end(), to) != outs.end();
  };
  for (const auto& [child, parent] : instance_.member_edges) {
    auto c = by_name.find(child);
    auto p = by_name.find(parent);
    if (c == by_name.end() || p == by_name.end()) {
      indexing_errors_.push_back("edge " + child + "->" + parent +
                                 " references an unknown member");
      continue;
    }
    Member& cm = members_[c->second];
    if (!has_level_edge(cm.level, members_[p->second].level)) {
      indexing_errors_.push_back("edge " + child + "->" + parent +
                                 " does not follow a schema edge");
      continue;
    }
    auto& ps = cm.parents;
    if (std::find(ps.begin(), ps.end(), p->second) == ps.end()) {
      ps.push_back(p->second);
    }
  }
  if (have_all) {
    MemberId all = by_name.at(std::string(kAllMember));
    for (auto& m : members_) {
      if (m.level == all_level_ || !has_level_edge(m.level, all_level_)) {
        continue;
      }
      bool linked = std::any_of(m.parents.begin(), m.parents.end(),
                                [&](MemberId p) { return p == all; });
      if (!linked) m.parents.push_back(all);
    }
  }

  bottom_position_.assign(members_.size(), std::nullopt);
  for (const auto& name : instance_.bottom_order) {
    auto it = by_name.find(name);
    if (it == by_name.end() || members_[it->second].level != bottom_level_) {
      indexing_errors_.push_back("bottom order names '" + name +
                                 "', which is not a bottom member");
      continue;
    }
    if (bottom_position_[it->second]) {
      indexing_errors_.push_back("bottom order repeats '" + name + "'");
      continue;
    }
    bottom_position_[it->second] = bottom_members_.size();
    bottom_members_.push_back(it->second);
  }
  if (levels > 0) {
    for (MemberId m : level_members_[bottom_level_]) {
      if (!bottom_position_[m]) {
        indexing_errors_.push_back("bottom order omits '" + members_[m].name +
                                   "'");
        bottom_position_[m] = bottom_members_.size();
        bottom_members_.push_back(m);
      }
    }
  }

  reached_.assign(bottom_members_.size(),
                  std::vector<std::vector<MemberId>>(levels));
  rep_.assign(members_.size(), std::nullopt);
  is_rep_.assign(levels, std::vector<char>(bottom_members_.size(), 0));
  for (std::size_t pos = 0; pos < bottom_members_.size(); ++pos) {
    std::vector<char> seen(members_.size(), 0);
    std::vector<MemberId> stack{bottom_members_[pos]};
    seen[stack.back()] = 1;
    while (!stack.empty()) {
      MemberId m = stack.back();
      stack.pop_back();
      reached_[pos][members_[m].level].push_back(m);
      if (!rep_[m]) {
        rep_[m] = pos;
        is_rep_[members_[m].level][pos] = 1;
      }
      for (MemberId p : members_[m].parents) {
        if (!seen[p]) {
          seen[p] = 1;
          stack.push_back(p);
        }
      }
    }
    for (auto& r : reached_[pos]) std::sort(r.begin(), r.end());
  }
}

std::optional<DimensionGraph::LevelId> DimensionGraph::find_level(
    std::string_view name) const {
  for (LevelId l = 0; l < level_names_.size(); ++l) {
    if (level_names_[l] == name) return l;
  }
  return std::nullopt;
}

DimensionGraph::LevelId DimensionGraph::level_id(std::string_view name) const {
  if (auto l = find_level(name)) return *l;
  throw UnknownName("level", this->name() + "." + std::string(name));
}

std::optional<DimensionGraph::MemberId> DimensionGraph::find_member(
    std::string_view name) const {
  for (MemberId m = 0; m < members_.size(); ++m) {
    if (members_[m].name == name) return m;
  }
  return std::nullopt;
}

DimensionGraph::MemberId DimensionGraph::member_id(
    std::string_view name) const {
  if (auto m = find_member(name)) return *m;
  throw UnknownName("member", this->name() + "." + std::string(name));
}

std::vector<DimensionGraph::MemberId> DimensionGraph::level_members_induced(
    LevelId level) const {
  std::vector<MemberId> out = level_members_[level];
  std::stable_sort(out.begin(), out.end(), [&](MemberId a, MemberId b) {
    auto ra = rep_[a], rb = rep_[b];
    if (ra && rb) return *ra < *rb;
    return ra.has_value() && !rb.has_value();
  });
  return out;
}

std::optional<std::size_t> DimensionGraph::bottom_position(MemberId m) const {
  return bottom_position_[m];
}

std::optional<DimensionGraph::MemberId> DimensionGraph::rolls_up(
    std::size_t position, LevelId level) const {
  const auto& r = reached_[position][level];
  if (r.empty()) return std::nullopt;
  return r.front();
}

bool DimensionGraph::is_representative(std::size_t position,
                                       LevelId level) const {
  return is_rep_[level][position] != 0;
}

std::strong_ordering DimensionGraph::induced_compare(MemberId a,
                                                     MemberId b) const {
  if (members_[a].level != members_[b].level) {
    throw ValidationError("induced order compares members '" +
                          members_[a].name + "' and '" + members_[b].name +
                          "' at different levels");
  }
  if (a == b) return std::strong_ordering::equal;
  auto ra = rep_[a], rb = rep_[b];
  if (!ra || !rb) {
    throw ValidationError("member without representative in dimension " +
                          name());
  }
  return *ra <=> *rb;
}

ValidationReport validate_graph(const DimensionGraph& graph) {
  ValidationReport report = validate_schema(graph.schema());
  if (!report.ok()) return report;
  for (const auto& e : graph.indexing_errors()) report.errors.push_back(e);

  for (std::size_t l = 0; l < graph.level_count(); ++l) {
    if (graph.level_members(l).empty()) {
      report.errors.push_back("level '" + graph.level_name(l) +
                              "' has no members");
    }
  }

  for (std::size_t m = 0; m < graph.member_count(); ++m) {
    std::map<std::size_t, int> per_level;
    for (auto p : graph.parents(m)) ++per_level[graph.member_level(p)];
    for (auto [level, count] : per_level) {
      if (count > 1) {
        report.errors.push_back("not a tree: member '" + graph.member_name(m) +
                                "' has " + std::to_string(count) +
                                " parents at level '" +
                                graph.level_name(level) + "'");
      }
    }
    if (!graph.representative(m)) {
      report.errors.push_back("member '" + graph.member_name(m) +
                              "' is not reached from any bottom member");
    }
  }

  // Levels ordered by longest distance from Bottom, so the first divergent
  // level on any path is the one reported.
  LevelGraph g = index_levels(graph.schema(), nullptr);
  auto order = topological_order(g);
  for (std::size_t pos = 0; pos < graph.bottom_size(); ++pos) {
    for (std::size_t level : order) {
      const auto& r = graph.reached(pos, level);
      if (r.size() > 1) {
        report.errors.push_back(
            "unsound at level '" + graph.level_name(level) + "': '" +
            graph.member_name(graph.bottom_member(pos)) + "' rolls up to '" +
            graph.member_name(r[0]) + "' and '" + graph.member_name(r[1]) +
            "'");
        break;
      }
    }
  }

  for (std::size_t l = 0; l < graph.level_count(); ++l) {
    std::map<std::size_t, std::size_t> owner;
    for (auto m : graph.level_members(l)) {
      auto rep = graph.representative(m);
      if (!rep) continue;
      auto [it, fresh] = owner.emplace(*rep, m);
      if (!fresh) {
        report.errors.push_back(
            "members '" + graph.member_name(it->second) + "' and '" +
            graph.member_name(m) + "' at level '" + graph.level_name(l) +
            "' share representative '" +
            graph.member_name(graph.bottom_member(*rep)) + "'");
      }
    }
  }
  return report;
}

std::optional<std::string> rolls_up(const DimensionGraph& graph,
                                    std::string_view bottom_member,
                                    std::string_view level) {
  auto m = graph.member_id(bottom_member);
  auto l = graph.level_id(level);
  auto pos = graph.bottom_position(m);
  if (!pos) {
    throw ValidationError("'" + std::string(bottom_member) +
                          "' is not a bottom member");
  }
  auto target = graph.rolls_up(*pos, l);
  if (!target) return std::nullopt;
  return graph.member_name(*target);
}

std::string representative(const DimensionGraph& graph,
                           std::string_view member) {
  auto rep = graph.representative(graph.member_id(member));
  if (!rep) {
    throw ValidationError("member '" + std::string(member) +
                          "' has no representative");
  }
  return graph.member_name(graph.bottom_member(*rep));
}

std::strong_ordering induced_compare(const DimensionGraph& graph,
                                     std::string_view level,
                                     std::string_view a, std::string_view b) {
  auto l = graph.level_id(level);
  auto ma = graph.member_id(a), mb = graph.member_id(b);
  if (graph.member_level(ma) != l || graph.member_level(mb) != l) {
    throw ValidationError("members '" + std::string(a) + "' and '" +
                          std::string(b) + "' are not both at level '" +
                          std::string(level) + "'");
  }
  return graph.induced_compare(ma, mb);
}

}  // namespace cubealg::model
