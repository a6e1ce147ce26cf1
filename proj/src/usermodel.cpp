#include "sitrec/usermodel.hpp"

#include <cstdio>

namespace sitrec {

double get_ctr(const DocumentStats& s) {
    if (s.recommendations == 0) return 0.0;
    return static_cast<double>(s.clicks) / static_cast<double>(s.recommendations);
}

std::optional<std::size_t> CaseBase::find(const Situation& s) const {
    const auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t CaseBase::add(const Situation& s, DocumentMap documents) {
    if (const auto i = find(s)) return *i;
    entries_.push_back({s, std::move(documents)});
    index_.emplace(s, entries_.size() - 1);
    return entries_.size() - 1;
}

std::size_t CaseBase::seed_from(const Situation& target, std::size_t source) {
    if (const auto i = find(target)) return *i;
    DocumentMap docs;
    for (const auto& [id, stats] : entries_.at(source).documents) docs.emplace(id, DocumentStats{});
    return add(target, std::move(docs));
}

const DocumentMap& CaseBase::candidate_documents(const Situation& s) const {
    const auto i = find(s);
    if (!i) throw Error("case base has no entry for situation " + to_string(s));
    return entries_[*i].documents;
}

void CaseBase::record_feedback(const Situation& s, const DocumentId& doc, bool clicked,
                               double reading_time) {
    record_feedback(add(s), doc, clicked, reading_time);
}

void CaseBase::record_feedback(std::size_t entry, const DocumentId& doc, bool clicked,
                               double reading_time) {
    auto& stats = entries_.at(entry).documents[doc];
    stats.recommendations += 1;
    if (clicked) stats.clicks += 1;
    if (reading_time > 0.0) stats.reading_time += reading_time;
}

std::uint64_t CaseBase::total_clicks() const {
    std::uint64_t n = 0;
    for (const auto& e : entries_) {
        for (const auto& [id, s] : e.documents) n += s.clicks;
    }
    return n;
}

std::uint64_t CaseBase::total_recommendations() const {
    std::uint64_t n = 0;
    for (const auto& e : entries_) {
        for (const auto& [id, s] : e.documents) n += s.recommendations;
    }
    return n;
}

void write_case_base_csv(const CaseBase& cb, std::ostream& out) {
    out << "situation_loc,situation_time,situation_social,doc_id,clicks,recommendations,reading_time\n";
    char buf[64];
    for (const auto& e : cb.entries()) {
        for (const auto& [id, s] : e.documents) {
            std::snprintf(buf, sizeof buf, "%.3f", s.reading_time);
            out << e.situation.location << ',' << e.situation.time << ',' << e.situation.social << ','
                << id << ',' << s.clicks << ',' << s.recommendations << ',' << buf << '\n';
        }
    }
}

}  // namespace sitrec
