#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace codeattn {

/// Half-open byte range [begin, end) into a source buffer.
struct ByteSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const { return end > begin ? end - begin : 0; }
    bool empty() const { return end <= begin; }
    friend bool operator==(const ByteSpan&, const ByteSpan&) = default;
};

/// Overlap length in bytes of two half-open ranges.
inline std::size_t overlap(const ByteSpan& a, const ByteSpan& b) {
    const std::size_t lo = a.begin > b.begin ? a.begin : b.begin;
    const std::size_t hi = a.end < b.end ? a.end : b.end;
    return hi > lo ? hi - lo : 0;
}

enum class TokenCategory : std::uint8_t { Identifier, Keyword, Operator, Punctuation, Literal };

std::string_view to_string(TokenCategory c);
TokenCategory parse_category(std::string_view s);

struct CodeToken {
    std::string text;
    ByteSpan span;
    std::size_t index = 0;
    TokenCategory category = TokenCategory::Identifier;
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, std::size_t offset)
        : Error(msg + " at byte " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace codeattn
