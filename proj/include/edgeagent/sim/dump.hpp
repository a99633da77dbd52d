#pragma once

#include <string>
#include <string_view>

namespace edgeagent::sim {

// Escaping shared by the dump emitter and parser. A backslash escapes the
// next byte; "\n" stands for a newline.

/// For act/dat/cmp tokens: escapes backslash, space, braces, and a lone "-".
std::string escape_dump_token(std::string_view s);
/// For extras keys and values: escapes backslash, ',', '=', braces.
std::string escape_dump_extra(std::string_view s);
std::string unescape_dump(std::string_view s);

}  // namespace edgeagent::sim
