#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sitrec/ids.hpp"

namespace sitrec {

enum class Dimension { Location = 0, Time = 1, Social = 2 };

inline constexpr std::array<Dimension, 3> kDimensions = {Dimension::Location, Dimension::Time,
                                                         Dimension::Social};

std::string_view to_string(Dimension dim);

/// One problem found while reading a line-oriented input file.
struct Diagnostic {
    std::size_t line = 0;  // 1-based; 0 when the problem is not tied to a line
    std::string message;
};

/// Carries every diagnostic found while loading a taxonomy.
class TaxonomyParseError : public Error {
public:
    explicit TaxonomyParseError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

class UnknownConceptError : public Error {
public:
    UnknownConceptError(Dimension dim, const std::string& id);
};

/// Rooted concept tree for one context dimension. Immutable once built.
///
/// Depth counts nodes on the path to the root, so depth(root) == 1 and the
/// concept similarity 2*depth(lcs)/(depth(a)+depth(b)) is always in (0, 1].
class Taxonomy {
public:
    using NodeIndex = std::uint32_t;

    /// Parses `concept<TAB>parent` lines; the root uses `-` as parent.
    /// Throws TaxonomyParseError listing every problem with its line number.
    static Taxonomy parse(std::string_view text, Dimension dim);

    /// Builds from (concept, parent) pairs; an empty or "-" parent marks the root.
    /// Diagnostics use the 1-based pair position as the line number.
    static Taxonomy from_edges(Dimension dim,
                               std::span<const std::pair<std::string, std::string>> edges);

    Dimension dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return ids_.size(); }
    NodeIndex root_index() const noexcept { return root_; }
    const ConceptId& root() const { return ids_[root_]; }

    bool contains(const ConceptId& id) const { return index_.contains(id); }
    std::optional<NodeIndex> find(const ConceptId& id) const;
    /// Throws UnknownConceptError when `id` is not in this taxonomy.
    NodeIndex index_of(const ConceptId& id) const;
    const ConceptId& concept_at(NodeIndex i) const { return ids_.at(i); }

    std::optional<NodeIndex> parent(NodeIndex i) const;
    std::span<const NodeIndex> children(NodeIndex i) const { return children_.at(i); }
    bool is_leaf(NodeIndex i) const { return children_.at(i).empty(); }
    std::vector<NodeIndex> leaves() const;

    std::size_t depth(NodeIndex i) const { return depth_.at(i); }
    std::size_t depth(const ConceptId& id) const { return depth_[index_of(id)]; }

    /// Deepest node lying on both root paths.
    NodeIndex lcs(NodeIndex a, NodeIndex b) const;
    const ConceptId& lcs(const ConceptId& a, const ConceptId& b) const;

    double similarity(NodeIndex a, NodeIndex b) const;
    double similarity(const ConceptId& a, const ConceptId& b) const;

    /// Serializes back to the line format accepted by parse().
    std::string to_text() const;

private:
    Taxonomy() = default;
    static Taxonomy build(Dimension dim, std::vector<std::pair<std::string, std::string>> edges,
                          std::vector<std::size_t> lines);

    static constexpr NodeIndex kNoParent = static_cast<NodeIndex>(-1);

    Dimension dimension_ = Dimension::Location;
    std::vector<ConceptId> ids_;
    std::vector<NodeIndex> parent_;
    std::vector<std::uint32_t> depth_;
    std::vector<std::vector<NodeIndex>> children_;
    std::unordered_map<ConceptId, NodeIndex> index_;
    NodeIndex root_ = 0;
};

/// Reads a taxonomy file from disk; I/O failures raise sitrec::Error.
Taxonomy load_taxonomy_file(const std::string& path, Dimension dim);

}  // namespace sitrec
