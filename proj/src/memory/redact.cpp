#include "edgeagent/memory/redact.hpp"

#include "edgeagent/error.hpp"

namespace edgeagent::memory {

RedactionPolicy RedactionPolicy::defaults() {
  return {{R"(\b\d{11}\b)", R"(\b\d{17}[0-9Xx]\b)", R"(addr:[^,;\n]*)"}, "[REDACTED]"};
}

Redactor::Redactor(const RedactionPolicy& policy) : replacement_(policy.replacement) {
  if (replacement_.empty()) throw Error(Errc::InvalidArgument, "redaction replacement must be non-empty");
  for (const auto& p : policy.patterns) {
    try {
      compiled_.emplace_back(p, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw Error(Errc::InvalidArgument, "bad redaction pattern '" + p + "': " + e.what());
    }
  }
}

std::string Redactor::apply(std::string_view text) const {
  std::string out(text);
  // A replacement can expose a new match at its edge; iterate to a fixpoint.
  for (int round = 0; round < 16; ++round) {
    std::string next = out;
    for (const auto& re : compiled_) next = std::regex_replace(next, re, replacement_);
    if (next == out) break;
    out = std::move(next);
  }
  return out;
}

bool Redactor::matches_any(std::string_view text) const { return count_matches(text) > 0; }

size_t Redactor::count_matches(std::string_view text) const {
  std::string s(text);
  size_t n = 0;
  for (const auto& re : compiled_)
    n += static_cast<size_t>(std::distance(std::sregex_iterator(s.begin(), s.end(), re), std::sregex_iterator()));
  return n;
}

std::string redact(std::string_view text, const RedactionPolicy& policy) { return Redactor(policy).apply(text); }

}  // namespace edgeagent::memory
