#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <unordered_map>
#include <vector>

#include "sitrec/ids.hpp"
#include "sitrec/situation.hpp"

namespace sitrec {

/// Per-document preference counters. clicks <= recommendations always.
struct DocumentStats {
    std::uint64_t clicks = 0;
    std::uint64_t recommendations = 0;
    double reading_time = 0.0;  // seconds; stored only

    friend bool operator==(const DocumentStats&, const DocumentStats&) = default;
};

/// Click-through rate; a never-recommended document has CTR 0.
double get_ctr(const DocumentStats& s);

/// Ordered by id, which is also the exploitation tie-break order.
using DocumentMap = std::map<DocumentId, DocumentStats>;

/// The user model: past situations and their per-document statistics.
class CaseBase {
public:
    struct Entry {
        Situation situation;
        DocumentMap documents;
    };

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const Entry& entry(std::size_t i) const { return entries_.at(i); }

    std::optional<std::size_t> find(const Situation& s) const;
    bool contains(const Situation& s) const { return find(s).has_value(); }

    /// Adds an entry for `s` unless one exists; returns its index either way.
    /// `documents` is ignored for an existing entry.
    std::size_t add(const Situation& s, DocumentMap documents = {});

    /// Creates an entry for `target` holding `source`'s document ids at zero
    /// counts. Returns the index of `target`'s entry; existing entries are kept.
    std::size_t seed_from(const Situation& target, std::size_t source);

    /// The document statistics stored under `s`; throws sitrec::Error if absent.
    const DocumentMap& candidate_documents(const Situation& s) const;

    /// One recommendation of `doc` under `s`, with its click outcome. Missing
    /// situation or document entries are created.
    void record_feedback(const Situation& s, const DocumentId& doc, bool clicked,
                         double reading_time = 0.0);
    void record_feedback(std::size_t entry, const DocumentId& doc, bool clicked,
                         double reading_time = 0.0);

    std::uint64_t total_clicks() const;
    std::uint64_t total_recommendations() const;

private:
    std::vector<Entry> entries_;
    std::unordered_map<Situation, std::size_t, SituationHash> index_;
};

/// One row per (situation, document), entries in insertion order.
void write_case_base_csv(const CaseBase& cb, std::ostream& out);

}  // namespace sitrec
