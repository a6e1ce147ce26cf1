#include "sitrec/taxonomy.hpp"

#include <algorithm>
#include <sstream>

#include "text_util.hpp"

namespace sitrec {

std::string_view to_string(Dimension dim) {
    switch (dim) {
        case Dimension::Location: return "location";
        case Dimension::Time: return "time";
        case Dimension::Social: return "social";
    }
    return "unknown";
}

namespace {

std::string join_diagnostics(const std::vector<Diagnostic>& diags) {
    std::ostringstream os;
    for (std::size_t i = 0; i < diags.size(); ++i) {
        if (i) os << "; ";
        if (diags[i].line) os << "line " << diags[i].line << ": ";
        os << diags[i].message;
    }
    return os.str();
}

bool is_root_marker(std::string_view parent) { return parent.empty() || parent == "-"; }

}  // namespace

TaxonomyParseError::TaxonomyParseError(std::vector<Diagnostic> diagnostics)
    : Error("taxonomy: " + join_diagnostics(diagnostics)), diagnostics_(std::move(diagnostics)) {}

UnknownConceptError::UnknownConceptError(Dimension dim, const std::string& id)
    : Error("unknown " + std::string(to_string(dim)) + " concept '" + id + "'") {}

Taxonomy Taxonomy::parse(std::string_view text, Dimension dim) {
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<std::size_t> lines;
    std::vector<Diagnostic> diags;

    const auto all = detail::lines_of(text);
    for (std::size_t n = 0; n < all.size(); ++n) {
        const auto line = all[n];
        if (detail::is_skippable(line)) continue;
        const auto fields = detail::split(line, '\t');
        if (fields.size() != 2) {
            diags.push_back({n + 1, "expected 'concept<TAB>parent', got " +
                                        std::to_string(fields.size()) + " field(s)"});
            continue;
        }
        const auto child = detail::trim(fields[0]);
        const auto parent = detail::trim(fields[1]);
        if (child.empty() || detail::has_whitespace(child)) {
            diags.push_back({n + 1, "invalid concept id '" + std::string(child) + "'"});
            continue;
        }
        if (!is_root_marker(parent) && detail::has_whitespace(parent)) {
            diags.push_back({n + 1, "invalid parent id '" + std::string(parent) + "'"});
            continue;
        }
        edges.emplace_back(std::string(child), std::string(parent));
        lines.push_back(n + 1);
    }
    if (!diags.empty()) {
        // Report structural problems too, as far as the well-formed lines allow.
        try {
            build(dim, edges, lines);
        } catch (const TaxonomyParseError& e) {
            diags.insert(diags.end(), e.diagnostics().begin(), e.diagnostics().end());
        }
        std::stable_sort(diags.begin(), diags.end(),
                         [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
        throw TaxonomyParseError(std::move(diags));
    }
    return build(dim, std::move(edges), std::move(lines));
}

Taxonomy Taxonomy::from_edges(Dimension dim,
                              std::span<const std::pair<std::string, std::string>> edges) {
    std::vector<std::pair<std::string, std::string>> copy(edges.begin(), edges.end());
    std::vector<std::size_t> lines(copy.size());
    for (std::size_t i = 0; i < lines.size(); ++i) lines[i] = i + 1;
    return build(dim, std::move(copy), std::move(lines));
}

Taxonomy Taxonomy::build(Dimension dim, std::vector<std::pair<std::string, std::string>> edges,
                         std::vector<std::size_t> lines) {
    Taxonomy t;
    t.dimension_ = dim;
    std::vector<Diagnostic> diags;
    std::vector<std::size_t> node_line;

    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& name = edges[i].first;
        if (name.empty() || detail::has_whitespace(name)) {
            diags.push_back({lines[i], "invalid concept id '" + name + "'"});
            continue;
        }
        ConceptId id(name);
        if (t.index_.contains(id)) {
            diags.push_back({lines[i], "duplicate concept id '" + name + "'"});
            continue;
        }
        t.index_.emplace(id, static_cast<NodeIndex>(t.ids_.size()));
        t.ids_.push_back(std::move(id));
        node_line.push_back(i);
    }

    const std::size_t n = t.ids_.size();
    t.parent_.assign(n, kNoParent);
    std::optional<NodeIndex> root;
    for (NodeIndex v = 0; v < n; ++v) {
        const auto& [name, parent] = edges[node_line[v]];
        const auto line = lines[node_line[v]];
        if (is_root_marker(parent)) {
            if (root) {
                diags.push_back({line, "multiple roots: '" + name + "' and '" +
                                           t.ids_[*root].str() + "'"});
            } else {
                root = v;
            }
            continue;
        }
        const auto it = t.index_.find(ConceptId(parent));
        if (it == t.index_.end()) {
            diags.push_back({line, "unknown parent id '" + parent + "' for '" + name + "'"});
            continue;
        }
        t.parent_[v] = it->second;
    }
    if (!root && n > 0 && diags.empty()) {
        diags.push_back({0, "no root line (a concept with parent '-')"});
    }
    if (n == 0 && diags.empty()) diags.push_back({0, "taxonomy has no concepts"});

    // Cycle detection: 0 = unvisited, 1 = on current walk, 2 = reaches the root.
    std::vector<std::uint8_t> state(n, 0);
    for (NodeIndex start = 0; start < n; ++start) {
        if (state[start]) continue;
        std::vector<NodeIndex> walk;
        NodeIndex v = start;
        bool cyclic = false;
        while (true) {
            if (state[v] == 2) break;
            if (state[v] == 1) {
                cyclic = true;
                break;
            }
            state[v] = 1;
            walk.push_back(v);
            if (t.parent_[v] == kNoParent) break;
            v = t.parent_[v];
        }
        if (cyclic) {
            diags.push_back({lines[node_line[v]], "cycle detected through '" + t.ids_[v].str() + "'"});
        }
        for (auto w : walk) state[w] = 2;
    }

    if (!diags.empty()) {
        std::stable_sort(diags.begin(), diags.end(),
                         [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
        throw TaxonomyParseError(std::move(diags));
    }

    t.root_ = *root;
    t.children_.assign(n, {});
    for (NodeIndex v = 0; v < n; ++v) {
        if (t.parent_[v] != kNoParent) t.children_[t.parent_[v]].push_back(v);
    }
    t.depth_.assign(n, 0);
    std::vector<NodeIndex> queue{t.root_};
    t.depth_[t.root_] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto v = queue[head];
        for (auto c : t.children_[v]) {
            t.depth_[c] = t.depth_[v] + 1;
            queue.push_back(c);
        }
    }
    return t;
}

std::optional<Taxonomy::NodeIndex> Taxonomy::find(const ConceptId& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Taxonomy::NodeIndex Taxonomy::index_of(const ConceptId& id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) throw UnknownConceptError(dimension_, id.str());
    return it->second;
}

std::optional<Taxonomy::NodeIndex> Taxonomy::parent(NodeIndex i) const {
    const auto p = parent_.at(i);
    if (p == kNoParent) return std::nullopt;
    return p;
}

std::vector<Taxonomy::NodeIndex> Taxonomy::leaves() const {
    std::vector<NodeIndex> out;
    for (NodeIndex v = 0; v < size(); ++v) {
        if (children_[v].empty()) out.push_back(v);
    }
    return out;
}

Taxonomy::NodeIndex Taxonomy::lcs(NodeIndex a, NodeIndex b) const {
    while (depth_.at(a) > depth_.at(b)) a = parent_[a];
    while (depth_.at(b) > depth_.at(a)) b = parent_[b];
    while (a != b) {
        a = parent_[a];
        b = parent_[b];
    }
    return a;
}

const ConceptId& Taxonomy::lcs(const ConceptId& a, const ConceptId& b) const {
    return ids_[lcs(index_of(a), index_of(b))];
}

double Taxonomy::similarity(NodeIndex a, NodeIndex b) const {
    if (a == b) return 1.0;
    const double common = depth_[lcs(a, b)];
    return 2.0 * common / static_cast<double>(depth_[a] + depth_[b]);
}

double Taxonomy::similarity(const ConceptId& a, const ConceptId& b) const {
    return similarity(index_of(a), index_of(b));
}

std::string Taxonomy::to_text() const {
    std::ostringstream os;
    os << "# " << to_string(dimension_) << " taxonomy\n";
    // Parents before children so the output reads top-down.
    std::vector<NodeIndex> queue{root_};
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const auto v = queue[head];
        os << ids_[v].str() << '\t' << (parent_[v] == kNoParent ? std::string("-") : ids_[parent_[v]].str())
           << '\n';
        for (auto c : children_[v]) queue.push_back(c);
    }
    return os.str();
}

Taxonomy load_taxonomy_file(const std::string& path, Dimension dim) {
    return Taxonomy::parse(detail::read_file(path), dim);
}

}  // namespace sitrec
