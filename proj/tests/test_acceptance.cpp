// Acceptance gate: runs every built-in check at full depth and prints one
// verdict line per criterion.  Exits nonzero if any check fails, so CI can
// gate on this binary alone.

#include <cstdio>
#include <vector>

#include <rodbif/verify.hpp>

int main() {
  const std::vector<rodbif::CheckResult> results =
      rodbif::run_acceptance_checks(rodbif::VerifyLevel::full);

  int failed = 0, passed = 0, skipped = 0;
  for (const rodbif::CheckResult& c : results) {
    const char* tag = c.status == rodbif::CheckStatus::pass   ? "[PASS]"
                      : c.status == rodbif::CheckStatus::fail ? "[FAIL]"
                                                              : "[SKIP]";
    if (c.status == rodbif::CheckStatus::pass) ++passed;
    if (c.status == rodbif::CheckStatus::fail) ++failed;
    if (c.status == rodbif::CheckStatus::skip) ++skipped;
    if (c.details.empty())
      std::printf("%s %s %s\n", tag, c.id.c_str(), c.name.c_str());
    else
      std::printf("%s %s %s | %s\n", tag, c.id.c_str(), c.name.c_str(), c.details.c_str());
  }
  std::printf("summary: passed=%d failed=%d skipped=%d\n", passed, failed, skipped);
  return failed > 0 ? 1 : 0;
}
