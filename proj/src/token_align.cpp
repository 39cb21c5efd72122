#include "codeattn/token_align.hpp"

#include <algorithm>

namespace codeattn {

std::size_t Alignment::num_code() const {
    int m = -1;
    for (const int e : entries) m = std::max(m, e);
    return static_cast<std::size_t>(m + 1);
}

void Alignment::validate(bool require_monotone) const {
    if (entries.empty()) throw Error("empty alignment");
    int last = -1;
    std::vector<bool> seen(num_code(), false);
    for (std::size_t p = 0; p < entries.size(); ++p) {
        const int e = entries[p];
        if (e == kSentinel) continue;
        if (e < 0) throw Error("invalid alignment entry " + std::to_string(e) + " at position " + std::to_string(p));
        if (require_monotone && e < last) throw Error("alignment decreases at sub-token " + std::to_string(p));
        last = std::max(last, e);
        seen[static_cast<std::size_t>(e)] = true;
    }
    if (last < 0) throw Error("alignment has no code tokens");
    for (std::size_t c = 0; c < seen.size(); ++c) {
        if (!seen[c]) throw Error("code token " + std::to_string(c) + " has no sub-token");
    }
}

AlignmentResult build_alignment(std::span<const ByteSpan> sub_token_spans, std::span<const CodeToken> code_tokens) {
    if (sub_token_spans.empty() || code_tokens.empty()) throw Error("build_alignment: empty input");
    for (std::size_t k = 1; k < code_tokens.size(); ++k) {
        if (code_tokens[k].span.begin < code_tokens[k - 1].span.end)
            throw Error("code tokens overlap or are out of order at index " + std::to_string(k));
    }
    AlignmentResult res;
    res.alignment.entries.assign(sub_token_spans.size(), Alignment::kSentinel);
    for (std::size_t s = 0; s < sub_token_spans.size(); ++s) {
        const ByteSpan sp = sub_token_spans[s];
        if (sp.empty()) continue;
        // First code token that could overlap: end > sp.begin.
        auto it = std::upper_bound(code_tokens.begin(), code_tokens.end(), sp.begin,
                                   [](std::size_t b, const CodeToken& t) { return b < t.span.end; });
        std::size_t best = 0;
        int best_idx = Alignment::kSentinel;
        bool tie = false;
        for (; it != code_tokens.end() && it->span.begin < sp.end; ++it) {
            const std::size_t ov = overlap(sp, it->span);
            if (ov > best) {
                best = ov;
                best_idx = static_cast<int>(it - code_tokens.begin());
                tie = false;
            } else if (ov == best && ov > 0) {
                tie = true;
            }
        }
        if (tie)
            res.diagnostics.push_back("sub-token " + std::to_string(s) + " overlaps several code tokens equally; mapped to " +
                                      std::to_string(best_idx));
        res.alignment.entries[s] = best_idx;
    }
    std::vector<bool> seen(code_tokens.size(), false);
    for (const int e : res.alignment.entries) {
        if (e >= 0) seen[static_cast<std::size_t>(e)] = true;
    }
    for (std::size_t c = 0; c < seen.size(); ++c) {
        if (!seen[c])
            throw Error("code token " + std::to_string(c) + " ('" + code_tokens[c].text + "') is not covered by any sub-token");
    }
    return res;
}

namespace detail {

Groups group_positions(const Alignment& a) {
    a.validate(false);
    Groups g;
    g.members.resize(a.num_code());
    for (std::size_t p = 0; p < a.entries.size(); ++p) {
        if (a.entries[p] >= 0) g.members[static_cast<std::size_t>(a.entries[p])].push_back(static_cast<Eigen::Index>(p));
    }
    return g;
}

}  // namespace detail

}  // namespace codeattn
