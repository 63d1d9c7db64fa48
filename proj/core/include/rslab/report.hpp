#pragma once

// Check reports: an ordered list of named cases with pass flags, shared by
// all verification operations and serialized by the CLI.

#include <string>
#include <vector>

namespace rslab {

struct CaseRecord {
  std::string label;
  bool pass = false;
  std::string detail;
};

struct Report {
  std::string name;
  bool pass = true;
  std::vector<CaseRecord> cases;

  Report() = default;
  explicit Report(std::string report_name) : name(std::move(report_name)) {}

  void add(const std::string& label, bool ok, const std::string& detail = "") {
    cases.push_back({label, ok, detail});
    pass = pass && ok;
  }
  int failures() const {
    int n = 0;
    for (const auto& c : cases)
      if (!c.pass) ++n;
    return n;
  }
};

}  // namespace rslab
