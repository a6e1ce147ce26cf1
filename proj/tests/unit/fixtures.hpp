#pragma once

#include <string>

#include "sitrec/situation.hpp"

namespace fixtures {

// Location          depth
//   workplace         2
//     company         3
//       societe       4
//       office        4
//     client_site     3
//       showroom      4
//   public_place      2
//     eating          3
//       restaurant    4
//       cafe          4
inline const char* kLocation =
    "# location\n"
    "Location\t-\n"
    "workplace\tLocation\n"
    "company\tworkplace\n"
    "societe\tcompany\n"
    "office\tcompany\n"
    "client_site\tworkplace\n"
    "showroom\tclient_site\n"
    "public_place\tLocation\n"
    "eating\tpublic_place\n"
    "restaurant\teating\n"
    "cafe\teating\n";

inline const char* kTime =
    "Time\t-\n"
    "workday\tTime\n"
    "morning\tworkday\n"
    "matin\tmorning\n"
    "early\tmorning\n"
    "noon\tworkday\n"
    "midi\tnoon\n"
    "weekend\tTime\n"
    "sunday\tweekend\n";

inline const char* kSocial =
    "Social\t-\n"
    "professional\tSocial\n"
    "hierarchy\tprofessional\n"
    "manager\thierarchy\n"
    "director\thierarchy\n"
    "external\tprofessional\n"
    "client\texternal\n"
    "personal\tSocial\n"
    "friend\tpersonal\n";

inline sitrec::ContextModel model(sitrec::SimilarityWeights w = {}) {
    using sitrec::Dimension;
    using sitrec::Taxonomy;
    return sitrec::ContextModel(Taxonomy::parse(kLocation, Dimension::Location),
                                Taxonomy::parse(kTime, Dimension::Time),
                                Taxonomy::parse(kSocial, Dimension::Social), w);
}

inline sitrec::Situation sit(const std::string& l, const std::string& t, const std::string& s) {
    return {sitrec::ConceptId(l), sitrec::ConceptId(t), sitrec::ConceptId(s)};
}

}  // namespace fixtures
