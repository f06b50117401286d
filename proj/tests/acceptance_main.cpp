#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "lsdrift/acceptance.hpp"
#include "lsdrift/experiments.hpp"

// Usage: acceptance [--quick] [--only N]... [--json PATH]
int main(int argc, char** argv) {
  namespace acc = lsdrift::acceptance;
  acc::SuiteOptions o;
  o.work_dir = "acceptance_work";
  std::vector<int> only;
  std::string json_path = "acceptance_report.json";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--quick") {
      o.scale = acc::Scale::quick;
    } else if (a == "--only" && i + 1 < argc) {
      only.push_back(std::atoi(argv[++i]));
    } else if (a == "--json" && i + 1 < argc) {
      json_path = argv[++i];
    } else {
      std::fprintf(stderr, "unknown argument %s\n", a.c_str());
      return 2;
    }
  }
  std::printf("acceptance suite, scale=%s, seed=%llu\n", acc::scale_name(o.scale),
              static_cast<unsigned long long>(o.seed));
  const auto results = acc::run_suite(o, only);
  bool all = true;
  for (const auto& r : results) {
    std::printf("%s\n", acc::format_line(r).c_str());
    if (!r.detail.empty()) std::printf("    %s\n", r.detail.c_str());
    all = all && r.pass;
  }
  lsdrift::experiments::write_text_file(json_path, acc::to_json(results, o).dump(2) + "\n");
  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
