#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace sitrec {

/// Opaque string token tagged by the kind of thing it names.
template <typename Tag>
class StringId {
public:
    StringId() = default;
    explicit StringId(std::string value) : value_(std::move(value)) {
        if (value_.empty()) {
            throw std::invalid_argument(std::string(Tag::kind) + " must be non-empty");
        }
    }

    const std::string& str() const noexcept { return value_; }

    friend auto operator<=>(const StringId&, const StringId&) = default;
    friend bool operator==(const StringId&, const StringId&) = default;

    friend std::ostream& operator<<(std::ostream& os, const StringId& id) { return os << id.value_; }

private:
    std::string value_;
};

struct ConceptTag {
    static constexpr const char* kind = "concept id";
};
struct DocumentTag {
    static constexpr const char* kind = "document id";
};

using ConceptId = StringId<ConceptTag>;
using DocumentId = StringId<DocumentTag>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sitrec

template <typename Tag>
struct std::hash<sitrec::StringId<Tag>> {
    std::size_t operator()(const sitrec::StringId<Tag>& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
