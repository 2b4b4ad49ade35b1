#pragma once

#include <string>
#include <vector>

#include "framecheck/io_json.hpp"
#include "framecheck/verdict.hpp"

namespace framecheck {

struct CorpusCheck {
  std::string name;
  bool pass = false;
  std::string expected;
  std::string actual;
};

struct CorpusEntryResult {
  std::string id;
  std::string source;
  bool pass = false;
  std::vector<CorpusCheck> checks;
};

struct CorpusReport {
  std::vector<CorpusEntryResult> entries;
  bool all_pass = false;
};

/// Replays every registry entry in the directory (id-ordered) against the
/// live engine. Unknown expectation keys are configuration errors naming
/// the entry.
CorpusReport run_corpus(const std::string& dir, const std::string& filter = "",
                        const SearchParams& params = {});

json corpus_report_to_json(const CorpusReport& report);

}  // namespace framecheck
