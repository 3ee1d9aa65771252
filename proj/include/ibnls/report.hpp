#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ibnls/error.hpp"

namespace ibnls {

/// Ordered key/value audit output. Serializes as "key = value" lines.
class AuditReport {
 public:
  explicit AuditReport(std::string name) : name_(std::move(name)) {}

  void add(const std::string& key, double value);
  void add(const std::string& key, const std::string& value);
  /// Records a PASS/FAIL entry; any failing check fails the report.
  void check(const std::string& key, bool ok);
  /// Marks the report failed with a witness radius and the error class to
  /// raise from require_pass().
  void fail_with(ErrorKind kind, const std::string& key, double witness);

  bool pass() const { return pass_; }
  const std::string& name() const { return name_; }
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::optional<std::string> find(const std::string& key) const;

  std::string to_text() const;
  /// Throws the recorded error kind when the report failed.
  void require_pass() const;

 private:
  std::string name_;
  std::vector<std::pair<std::string, std::string>> entries_;
  bool pass_ = true;
  std::optional<ErrorKind> failure_;
  std::string failure_detail_;
};

/// Shortest round-trip text for a double (17 significant digits).
std::string format_double(double v);

}  // namespace ibnls
