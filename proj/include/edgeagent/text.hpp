#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edgeagent::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);

/// Lowercased alphanumeric runs. Bytes >= 0x80 count as word characters so
/// UTF-8 text stays in one token.
std::vector<std::string> tokenize(std::string_view s);

/// Lowercase, drop ASCII punctuation, collapse whitespace, trim.
std::string normalize(std::string_view s);

std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

std::string percent_encode(std::string_view s);
std::string percent_decode(std::string_view s);

/// Replaces `{name}` placeholders using `lookup`; unknown names expand to "".
std::string substitute(std::string_view tmpl,
                       const std::function<std::optional<std::string>(std::string_view)>& lookup);

/// First decimal number in `s` (e.g. "¥12.90 incl." -> "12.90"), verbatim.
std::optional<std::string> first_number(std::string_view s);

}  // namespace edgeagent::text
