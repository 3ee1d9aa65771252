#include "ibnls/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ibnls {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void AuditReport::add(const std::string& key, double value) {
  entries_.emplace_back(key, format_double(value));
}

void AuditReport::add(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void AuditReport::check(const std::string& key, bool ok) {
  entries_.emplace_back(key, ok ? "PASS" : "FAIL");
  if (!ok) pass_ = false;
}

void AuditReport::fail_with(ErrorKind kind, const std::string& key, double witness) {
  pass_ = false;
  add(key + ".witness_radius", witness);
  if (!failure_) {
    failure_ = kind;
    failure_detail_ = key + " violated at r = " + format_double(witness);
  }
}

std::optional<std::string> AuditReport::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

std::string AuditReport::to_text() const {
  std::ostringstream os;
  os << "# " << name_ << "\n";
  for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
  os << "result = " << (pass_ ? "PASS" : "FAIL") << "\n";
  return os.str();
}

void AuditReport::require_pass() const {
  if (pass_) return;
  throw Error(failure_.value_or(ErrorKind::PropertyViolated),
              failure_detail_.empty() ? name_ + " failed" : failure_detail_);
}

}  // namespace ibnls
