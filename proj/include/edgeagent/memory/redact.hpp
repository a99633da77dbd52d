#pragma once

#include <regex>
#include <string>
#include <vector>

namespace edgeagent::memory {

/// Deny-list applied to every text field before it is written to memory.
struct RedactionPolicy {
  std::vector<std::string> patterns;
  std::string replacement = "[REDACTED]";

  /// Phone numbers (11 digits), national-ID shapes (17 digits + digit/X),
  /// and "addr:"-prefixed strings.
  static RedactionPolicy defaults();
};

class Redactor {
 public:
  /// Throws Error(InvalidArgument) if a pattern does not compile or the
  /// replacement is empty.
  explicit Redactor(const RedactionPolicy& policy);

  /// Replaces every match, repeating until no pattern matches.
  std::string apply(std::string_view text) const;
  bool matches_any(std::string_view text) const;
  size_t count_matches(std::string_view text) const;

 private:
  std::vector<std::regex> compiled_;
  std::string replacement_;
};

std::string redact(std::string_view text, const RedactionPolicy& policy);

}  // namespace edgeagent::memory
