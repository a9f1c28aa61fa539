#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cubealg::model {

inline constexpr std::string_view kAllLevel = "All";
inline constexpr std::string_view kAllMember = "all";

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
  std::string summary() const;
};

// A lattice of levels. Edges point from the finer level to the coarser one.
struct DimensionSchema {
  std::string name;
  std::vector<std::string> levels;
  std::vector<std::pair<std::string, std::string>> edges;

  bool operator==(const DimensionSchema&) const = default;
};

// One Bottom -> All path through a schema.
struct Hierarchy {
  std::vector<std::string> path;

  bool operator==(const Hierarchy&) const = default;
};

ValidationReport validate_schema(const DimensionSchema& schema);

// All Bottom -> All paths, in lexicographic order of level indices. The
// schema must validate.
std::vector<Hierarchy> hierarchies(const DimensionSchema& schema);

// Raw, unvalidated content of a dimension graph, as read from a document.
struct DimensionInstance {
  DimensionSchema schema;
  // (member, level)
  std::vector<std::pair<std::string, std::string>> members;
  // (child, parent)
  std::vector<std::pair<std::string, std::string>> member_edges;
  std::vector<std::string> bottom_order;

  bool operator==(const DimensionInstance&) const = default;
};

// Indexed, immutable dimension graph.
//
// Construction never throws on content problems; everything that is wrong
// with the instance is reported by validate_graph(). The member `all` and
// its incoming edges are completed implicitly: dom(All) can only be {all},
// so every member of a level with a schema edge into All gets an edge to
// `all` unless the document already lists one.
//
// Bottom members are addressed by position in the bottom order; that
// position is the cell coordinate along this dimension.
class DimensionGraph {
 public:
  using MemberId = std::size_t;
  using LevelId = std::size_t;

  explicit DimensionGraph(DimensionInstance instance);

  const std::string& name() const { return instance_.schema.name; }
  const DimensionSchema& schema() const { return instance_.schema; }
  // The instance as given, before implicit completion.
  const DimensionInstance& instance() const { return instance_; }

  std::size_t level_count() const { return level_names_.size(); }
  const std::string& level_name(LevelId level) const {
    return level_names_[level];
  }
  std::optional<LevelId> find_level(std::string_view name) const;
  LevelId level_id(std::string_view name) const;  // throws UnknownName
  LevelId bottom_level() const { return bottom_level_; }
  LevelId all_level() const { return all_level_; }

  std::size_t member_count() const { return members_.size(); }
  const std::string& member_name(MemberId m) const { return members_[m].name; }
  LevelId member_level(MemberId m) const { return members_[m].level; }
  std::optional<MemberId> find_member(std::string_view name) const;
  MemberId member_id(std::string_view name) const;  // throws UnknownName
  // Members of a level in document order.
  const std::vector<MemberId>& level_members(LevelId level) const {
    return level_members_[level];
  }
  // Members of a level sorted by the order induced from the bottom order.
  std::vector<MemberId> level_members_induced(LevelId level) const;
  const std::vector<MemberId>& parents(MemberId m) const {
    return members_[m].parents;
  }

  std::size_t bottom_size() const { return bottom_members_.size(); }
  MemberId bottom_member(std::size_t position) const {
    return bottom_members_[position];
  }
  std::optional<std::size_t> bottom_position(MemberId m) const;

  // The member at `level` that the bottom member at `position` rolls up to.
  // A bottom member rolls up to itself at the bottom level.
  std::optional<MemberId> rolls_up(std::size_t position, LevelId level) const;
  // Every member reached at `level`; more than one means the graph is
  // unsound there.
  const std::vector<MemberId>& reached(std::size_t position,
                                       LevelId level) const {
    return reached_[position][level];
  }
  // Bottom position of the smallest bottom member rolling up to `m`.
  std::optional<std::size_t> representative(MemberId m) const {
    return rep_[m];
  }
  bool is_representative(std::size_t position, LevelId level) const;
  // Throws ValidationError when the members live at different levels.
  std::strong_ordering induced_compare(MemberId a, MemberId b) const;

  // Problems found while indexing (unknown levels, duplicate names, ...).
  const std::vector<std::string>& indexing_errors() const {
    return indexing_errors_;
  }

 private:
  struct Member {
    std::string name;
    LevelId level = 0;
    std::vector<MemberId> parents;
  };

  DimensionInstance instance_;
  std::vector<std::string> level_names_;
  std::vector<std::vector<LevelId>> level_parents_;
  LevelId bottom_level_ = 0;
  LevelId all_level_ = 0;
  std::vector<Member> members_;
  std::vector<std::vector<MemberId>> level_members_;
  std::vector<MemberId> bottom_members_;
  std::vector<std::optional<std::size_t>> bottom_position_;
  std::vector<std::vector<std::vector<MemberId>>> reached_;
  std::vector<std::optional<std::size_t>> rep_;
  std::vector<std::vector<char>> is_rep_;
  std::vector<std::string> indexing_errors_;
};

ValidationReport validate_graph(const DimensionGraph& graph);

// Name-level API. Unknown names throw UnknownName.
std::optional<std::string> rolls_up(const DimensionGraph& graph,
                                    std::string_view bottom_member,
                                    std::string_view level);
std::string representative(const DimensionGraph& graph,
                           std::string_view member);
std::strong_ordering induced_compare(const DimensionGraph& graph,
                                     std::string_view level,
                                     std::string_view a, std::string_view b);

}  // namespace cubealg::model
